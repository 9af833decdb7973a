//! Upper bound on how far a curve piece strays from its end points.
//!
//! For every piece with end points `a`, `b` at distance `d`, all points of
//! the piece lie within `d·R` of the nearer of `a` and `b`.

use super::{ChildRef, Piece, Traversal, DEFAULT_RADIUS_DEPTH};
use crate::geom::{Similarity, Vec2};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionBound {
    pub radius: f64,
    pub depth_used: u32,
}

#[inline]
fn endpoint_distance(v: Vec2) -> f64 {
    v.norm().min(v.dist(Vec2::ONE))
}

impl Traversal {
    pub fn expansion_radius(&self) -> ExpansionBound {
        self.expansion_radius_at(DEFAULT_RADIUS_DEPTH)
    }

    /// Bound computed from the refinement vertices down to `depth` levels.
    ///
    /// With `V_j` the largest nearer-end-point distance over all vertices
    /// of levels `1..=j`, `c` the largest contraction and
    /// `R₁ = V₁ / (1 − c)` (a coarse but sound bound), every
    /// `V_j + c^j·R₁` bounds the curve; the minimum over `j ≤ depth` is
    /// returned, taken as the worst case over all generators.
    pub fn expansion_radius_at(&self, depth: u32) -> ExpansionBound {
        let depth = depth.max(1);
        let c = self.max_contraction;
        let per_generator: Vec<Vec<f64>> = (0..self.generators.len())
            .map(|g| self.vertex_extents(g, depth))
            .collect();
        let coarse = per_generator.iter().map(|v| v[0]).fold(0.0, f64::max) / (1.0 - c);
        let restricted = self.restriction != (0.0, 1.0);
        let mut radius = f64::INFINITY;
        let mut piece_bound = f64::INFINITY;
        for j in 0..depth as usize {
            let level_bound = per_generator
                .iter()
                .map(|levels| levels[j] + c.powi(j as i32 + 1) * coarse)
                .fold(0.0, f64::max);
            piece_bound = piece_bound.min(level_bound);
            let total = if restricted {
                piece_bound.max(self.restricted_extent(j as u32 + 1, piece_bound))
            } else {
                piece_bound
            };
            radius = radius.min(total);
        }
        ExpansionBound {
            radius,
            depth_used: depth,
        }
    }

    /// `V_1..=V_depth` for one generator's canonical curve.
    fn vertex_extents(&self, generator: usize, depth: u32) -> Vec<f64> {
        let mut levels = vec![0.0f64; depth as usize];
        let root = Piece {
            map: Similarity::IDENTITY,
            generator,
            reversed: false,
            t0: 0.0,
            t1: 1.0,
        };
        self.collect_vertices(&root, 1, depth, &mut levels);
        for j in 1..levels.len() {
            levels[j] = levels[j].max(levels[j - 1]);
        }
        levels
    }

    fn collect_vertices(&self, piece: &Piece, level: u32, depth: u32, levels: &mut [f64]) {
        let slot = level as usize - 1;
        self.for_each_child(piece, |c| {
            if let ChildRef::Piece(p) = c {
                levels[slot] = levels[slot]
                    .max(endpoint_distance(p.start()))
                    .max(endpoint_distance(p.end()));
                if level < depth {
                    self.collect_vertices(&p, level + 1, depth, levels);
                }
            }
        });
    }

    /// Extent bound of the restricted curve as a whole, which is generally
    /// not a piece of the full curve. `piece_radius` bounds every piece.
    fn restricted_extent(&self, depth: u32, piece_radius: f64) -> f64 {
        let (lo, hi) = self.restriction;
        let mut vertex_max: f64 = 0.0;
        let mut leaf_scale: f64 = 0.0;
        let min_scale = self.min_scale() * 1e3;
        let mut stack = vec![(self.root_piece(), 0u32)];
        while let Some((p, level)) = stack.pop() {
            if p.t1 < lo || p.t0 > hi {
                continue;
            }
            let partial = p.t0 < lo || p.t1 > hi;
            let is_leaf = if partial {
                p.map.scale() < min_scale
            } else {
                level >= depth
            };
            if is_leaf {
                vertex_max = vertex_max
                    .max(endpoint_distance(p.start()))
                    .max(endpoint_distance(p.end()));
                leaf_scale = leaf_scale.max(p.map.scale());
                continue;
            }
            self.for_each_child(&p, |c| {
                if let ChildRef::Piece(child) = c {
                    stack.push((child, level + 1));
                }
            });
        }
        vertex_max + leaf_scale * piece_radius
    }
}
