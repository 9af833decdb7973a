//! Evaluation of the traversal `f: [0,1] → ℝ²` defined by a
//! [`CurveDefinition`](crate::curvedef::CurveDefinition).
//!
//! A definition is compiled into a [`Traversal`]: every generator gets its
//! children listed in traversal order, both forwards and backwards, with
//! cumulative parameter weights. A *piece* is a similar copy of one
//! generator's curve covering a parameter interval; refinement replaces a
//! piece by its children.

mod closeup;
mod inverse;
mod radius;
mod sample;

use thiserror::Error;

use crate::curvedef::{segment_transforms, validate, CurveDefinition, DefinitionError, ItemTransform};
use crate::geom::{Similarity, Vec2};

pub use closeup::{closeup, CloseUp, TrailPoint};
pub use radius::ExpansionBound;
pub use sample::SamplePoint;

/// Default descent depth for [`Traversal::point_at`].
pub const DEFAULT_DEPTH: u32 = 128;
/// Default refinement depth for the expansion-radius bound.
pub const DEFAULT_RADIUS_DEPTH: u32 = 6;

/// Pieces whose scale (relative to the root chord) falls below this are
/// treated as straight segments.
pub(crate) const MIN_RELATIVE_SCALE: f64 = 1e-15;
pub(crate) const MAX_DEPTH: u32 = 512;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TraversalError {
    #[error("parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("invalid definition: {0}")]
    Definition(#[from] DefinitionError),
    #[error("restricted curve has coinciding end points")]
    DegenerateRestriction,
    #[error("zoom exponent must be at least 1, got {0}")]
    ZoomBelowOne(f64),
    #[error("sampling gap must be positive and finite, got {0}")]
    BadGap(f64),
}

#[derive(Clone, Debug)]
pub(crate) enum Child {
    Seg {
        map: Similarity,
        reversed: bool,
        target: usize,
        w0: f64,
        w1: f64,
    },
    Jump {
        from: Vec2,
        to: Vec2,
        at: f64,
    },
}

#[derive(Clone, Debug)]
struct CompiledGenerator {
    id: String,
    forward: Vec<Child>,
    backward: Vec<Child>,
}

/// A similar copy of one generator's curve, running from `map(0,0)` to
/// `map(1,0)` over the full-curve parameter interval `[t0, t1]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Piece {
    pub map: Similarity,
    pub generator: usize,
    pub reversed: bool,
    pub t0: f64,
    pub t1: f64,
}

impl Piece {
    #[inline]
    pub fn start(&self) -> Vec2 {
        self.map.translation
    }

    #[inline]
    pub fn end(&self) -> Vec2 {
        self.map.translation + self.map.linear
    }

    /// Whether the piece lies outside `[lo, hi]` apart from one end point.
    /// Pieces too short for their parameter interval to be represented
    /// (`t0 == t1`) are kept when they touch the interval.
    #[inline]
    pub fn outside(&self, lo: f64, hi: f64) -> bool {
        if self.t0 == self.t1 {
            self.t1 < lo || self.t0 > hi
        } else {
            self.t1 <= lo || self.t0 >= hi
        }
    }
}

/// Point reflection about `(1/2, 0)`; swaps the unit segment's end points.
const HALF_TURN: Similarity = Similarity {
    linear: Vec2 { x: -1.0, y: 0.0 },
    mirrored: false,
    translation: Vec2 { x: 1.0, y: 0.0 },
};

/// A compiled, validated traversal.
#[derive(Clone, Debug)]
pub struct Traversal {
    name: String,
    generators: Vec<CompiledGenerator>,
    start: usize,
    root: Similarity,
    restriction: (f64, f64),
    max_contraction: f64,
}

impl Traversal {
    pub fn new(def: &CurveDefinition) -> Result<Self, TraversalError> {
        let report = validate(def);
        if let Some(e) = report.errors.into_iter().next() {
            return Err(e.into());
        }
        let ids: Vec<&String> = def.generators.keys().collect();
        let index_of = |id: &str| ids.iter().position(|k| k.as_str() == id).unwrap();

        let mut generators = Vec::with_capacity(ids.len());
        let mut max_contraction: f64 = 0.0;
        for g in def.generators.values() {
            let transforms = segment_transforms(g, def)?;
            let mut forward = Vec::with_capacity(transforms.len());
            let mut acc = 0.0;
            for t in &transforms {
                match t {
                    ItemTransform::Segment {
                        similarity,
                        weight,
                        reversed,
                        target,
                    } => {
                        max_contraction = max_contraction.max(similarity.scale());
                        let w0 = acc;
                        acc += weight;
                        forward.push(Child::Seg {
                            map: *similarity,
                            reversed: *reversed,
                            target: index_of(target),
                            w0,
                            w1: acc,
                        });
                    }
                    ItemTransform::Jump { from, to } => forward.push(Child::Jump {
                        from: *from,
                        to: *to,
                        at: acc,
                    }),
                }
            }
            pin_last_weight(&mut forward);

            let mut backward = Vec::with_capacity(forward.len());
            let mut acc = 0.0;
            for c in forward.iter().rev() {
                match c {
                    Child::Seg {
                        map,
                        reversed,
                        target,
                        w0,
                        w1,
                    } => {
                        let w0_new = acc;
                        acc += w1 - w0;
                        backward.push(Child::Seg {
                            map: HALF_TURN.compose(map).compose(&HALF_TURN),
                            reversed: !reversed,
                            target: *target,
                            w0: w0_new,
                            w1: acc,
                        });
                    }
                    Child::Jump { from, to, .. } => backward.push(Child::Jump {
                        from: HALF_TURN.apply(*to),
                        to: HALF_TURN.apply(*from),
                        at: acc,
                    }),
                }
            }
            pin_last_weight(&mut backward);
            generators.push(CompiledGenerator {
                id: g.id.clone(),
                forward,
                backward,
            });
        }

        let mut traversal = Traversal {
            name: def.name.clone(),
            generators,
            start: index_of(&def.start),
            root: Similarity::IDENTITY,
            restriction: (0.0, 1.0),
            max_contraction,
        };
        if let Some((t0, t1)) = def.restriction {
            let a = traversal.eval_full(t0, DEFAULT_DEPTH);
            let b = traversal.eval_full(t1, DEFAULT_DEPTH);
            if a.dist(b) == 0.0 {
                return Err(TraversalError::DegenerateRestriction);
            }
            traversal.root = Similarity::from_segment(a, b, false).inverse();
            traversal.restriction = (t0, t1);
        }
        Ok(traversal)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generator_ids(&self) -> impl Iterator<Item = &str> {
        self.generators.iter().map(|g| g.id.as_str())
    }

    /// Largest segment contraction over all generators.
    pub fn max_contraction(&self) -> f64 {
        self.max_contraction
    }

    /// The parameter interval of the underlying full curve.
    pub fn restriction(&self) -> (f64, f64) {
        self.restriction
    }

    pub(crate) fn root_piece(&self) -> Piece {
        Piece {
            map: self.root,
            generator: self.start,
            reversed: false,
            t0: 0.0,
            t1: 1.0,
        }
    }

    pub(crate) fn min_scale(&self) -> f64 {
        MIN_RELATIVE_SCALE * self.root.scale()
    }

    pub(crate) fn children(&self, piece: &Piece) -> &[Child] {
        let g = &self.generators[piece.generator];
        if piece.reversed {
            &g.backward
        } else {
            &g.forward
        }
    }

    /// Visit the refinement of `piece` in traversal order.
    pub(crate) fn for_each_child(&self, piece: &Piece, mut f: impl FnMut(ChildRef)) {
        let width = piece.t1 - piece.t0;
        for c in self.children(piece) {
            match *c {
                Child::Seg {
                    map,
                    reversed,
                    target,
                    w0,
                    w1,
                } => f(ChildRef::Piece(Piece {
                    map: piece.map.compose(&map),
                    generator: target,
                    reversed,
                    t0: piece.t0 + width * w0,
                    t1: if w1 == 1.0 { piece.t1 } else { piece.t0 + width * w1 },
                })),
                Child::Jump { from, to, at } => f(ChildRef::Jump {
                    from: piece.map.apply(from),
                    to: piece.map.apply(to),
                    t: piece.t0 + width * at,
                }),
            }
        }
    }

    /// Point of the full (unrestricted) curve at parameter `t`, in this
    /// traversal's output frame.
    pub(crate) fn eval_full(&self, t: f64, depth: u32) -> Vec2 {
        let mut piece = self.root_piece();
        let min_scale = self.min_scale();
        let mut local = t;
        for _ in 0..depth {
            if piece.map.scale() < min_scale {
                break;
            }
            let children = self.children(&piece);
            // Right-closed descent: the last segment whose interval starts
            // at or before `local`.
            let mut chosen = None;
            for c in children {
                if let Child::Seg { w0, .. } = c {
                    if *w0 <= local || chosen.is_none() {
                        chosen = Some(c);
                    } else {
                        break;
                    }
                }
            }
            let Some(Child::Seg {
                map,
                reversed,
                target,
                w0,
                w1,
            }) = chosen
            else {
                unreachable!("generators have at least one segment")
            };
            local = ((local - w0) / (w1 - w0)).clamp(0.0, 1.0);
            piece = Piece {
                map: piece.map.compose(map),
                generator: *target,
                reversed: *reversed,
                t0: 0.0,
                t1: 1.0,
            };
        }
        piece.map.apply(Vec2::new(local, 0.0))
    }

    /// `f(t)` evaluated with [`DEFAULT_DEPTH`] levels of descent.
    pub fn point_at(&self, t: f64) -> Result<Vec2, TraversalError> {
        self.point_at_depth(t, DEFAULT_DEPTH)
    }

    /// `f(t)`: descend `depth` levels (or until pieces are negligibly small)
    /// and interpolate linearly inside the final piece.
    pub fn point_at_depth(&self, t: f64, depth: u32) -> Result<Vec2, TraversalError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(TraversalError::ParameterOutOfRange(t));
        }
        let (lo, hi) = self.restriction;
        let full = if (lo, hi) == (0.0, 1.0) {
            t
        } else {
            (lo + (hi - lo) * t).min(hi)
        };
        Ok(self.eval_full(full, depth.max(1)))
    }

    /// Map a full-curve parameter to this traversal's parameter.
    #[inline]
    pub(crate) fn renormalize(&self, t_full: f64) -> f64 {
        let (lo, hi) = self.restriction;
        if (lo, hi) == (0.0, 1.0) {
            t_full
        } else {
            ((t_full - lo) / (hi - lo)).clamp(0.0, 1.0)
        }
    }
}

pub(crate) enum ChildRef {
    Piece(Piece),
    Jump { from: Vec2, to: Vec2, t: f64 },
}

fn pin_last_weight(children: &mut [Child]) {
    if let Some(Child::Seg { w1, .. }) = children
        .iter_mut()
        .rev()
        .find(|c| matches!(c, Child::Seg { .. }))
    {
        *w1 = 1.0;
    }
}

/// `f(t)` for a definition; see [`Traversal::point_at_depth`].
pub fn point_at(def: &CurveDefinition, t: f64, depth: u32) -> Result<Vec2, TraversalError> {
    Traversal::new(def)?.point_at_depth(t, depth)
}

/// Expansion-radius bound of a definition at the default depth.
pub fn expansion_radius(def: &CurveDefinition) -> Result<ExpansionBound, TraversalError> {
    Ok(Traversal::new(def)?.expansion_radius())
}

/// Density-guaranteed samples of a definition; see [`Traversal::sample`].
pub fn sample(
    def: &CurveDefinition,
    max_gap: f64,
    oversample: u32,
) -> Result<Vec<SamplePoint>, TraversalError> {
    Traversal::new(def)?.sample(max_gap, oversample)
}

/// Smallest parameter whose image lies within `eps` of `q`.
pub fn inverse_at(def: &CurveDefinition, q: Vec2, eps: f64) -> Result<Option<f64>, TraversalError> {
    let t = Traversal::new(def)?;
    let r = t.expansion_radius();
    Ok(t.inverse_at(q, eps, r.radius))
}
