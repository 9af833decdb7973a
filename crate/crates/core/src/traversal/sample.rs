//! Adaptive sampling with a spacing guarantee.
//!
//! Pieces are refined until their end points are at most `gap` apart; the
//! end points of the final pieces form the sample stream. Since every point
//! of a piece is within `d·R` of one of its end points, choosing
//! `gap = e / (2R)` puts every curve point within `e/2` of a sample.

use rayon::prelude::*;

use super::closeup::CloseUp;
use super::{ChildRef, Piece, Traversal, TraversalError, MAX_DEPTH};
use crate::geom::Vec2;

/// One vertex of the polyline approximating the traversal.
///
/// Samples are ordered by `(t, tie)`: points produced at the same
/// parameter value (the exit of a jump, the points on its connector and
/// the entry after it) share `t` and are told apart by an increasing `tie`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplePoint {
    pub t: f64,
    pub tie: u32,
    pub position: Vec2,
    pub on_jump: bool,
}

impl SamplePoint {
    #[inline]
    pub fn order_key(&self) -> (f64, u32) {
        (self.t, self.tie)
    }
}

/// When a piece is fine enough to stop refining.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Density {
    Chord { gap: f64 },
    CloseUp { gap: f64, view: CloseUp, radius: f64 },
}

impl Density {
    fn gap(&self) -> f64 {
        match *self {
            Density::Chord { gap } | Density::CloseUp { gap, .. } => gap,
        }
    }

    fn fine_enough(&self, p: &Piece) -> bool {
        match *self {
            Density::Chord { gap } => p.map.scale() <= gap,
            Density::CloseUp { gap, view, radius } => {
                let (a, b) = (p.start(), p.end());
                let spread = p.map.scale() * radius;
                // Chord mode guarantees `scale·R ≤ gap·R`; demand the same
                // of the mapped neighbourhoods of both end points.
                view.spread_bound(a, spread) <= gap * radius
                    && view.spread_bound(b, spread) <= gap * radius
                    && view.map_position(a).dist(view.map_position(b)) <= gap
            }
        }
    }

    /// Number of equal parts to split a jump connector into.
    fn connector_parts(&self, from: Vec2, to: Vec2) -> usize {
        const PROBES: usize = 64;
        let gap = self.gap();
        let length = match *self {
            Density::Chord { .. } => from.dist(to),
            Density::CloseUp { view, .. } => (0..PROBES)
                .map(|i| {
                    let a = view.map_position(from.lerp(to, i as f64 / PROBES as f64));
                    let b = view.map_position(from.lerp(to, (i + 1) as f64 / PROBES as f64));
                    a.dist(b)
                })
                .sum::<f64>()
                // Slack for the curvature of the mapped connector.
                * 2.0,
        };
        ((length / gap).ceil() as usize).clamp(1, 1 << 20)
    }
}

#[derive(Clone, Copy, Debug)]
struct RawPoint {
    t_full: f64,
    position: Vec2,
    on_jump: bool,
}

enum Task {
    Subtree(Piece, u32),
    Point(RawPoint),
}

/// Positions closer than this (in the unit frame) at the same parameter are
/// the same sample.
const DEDUP_TOLERANCE: f64 = 1e-12;

struct Emitter<'a, F: FnMut(SamplePoint)> {
    traversal: &'a Traversal,
    last: Option<SamplePoint>,
    sink: F,
}

impl<F: FnMut(SamplePoint)> Emitter<'_, F> {
    fn push(&mut self, raw: RawPoint) {
        let t = self.traversal.renormalize(raw.t_full);
        let mut tie = 0;
        if let Some(last) = self.last {
            if t == last.t {
                if raw.position.dist(last.position) <= DEDUP_TOLERANCE {
                    return;
                }
                tie = last.tie + 1;
            }
        }
        let s = SamplePoint {
            t,
            tie,
            position: raw.position,
            on_jump: raw.on_jump,
        };
        self.last = Some(s);
        (self.sink)(s);
    }
}

impl Traversal {
    /// Sample the traversal so that consecutive samples are at most
    /// `max_gap / oversample` apart. Runs on the current rayon pool; the
    /// output does not depend on the number of worker threads.
    pub fn sample(&self, max_gap: f64, oversample: u32) -> Result<Vec<SamplePoint>, TraversalError> {
        let mut out = Vec::new();
        self.sample_each(max_gap, oversample, |s| out.push(s))?;
        Ok(out)
    }

    /// Streaming form of [`Traversal::sample`]: samples are handed to `sink`
    /// in order while only a bounded batch is held in memory.
    pub fn sample_each(
        &self,
        max_gap: f64,
        oversample: u32,
        sink: impl FnMut(SamplePoint),
    ) -> Result<(), TraversalError> {
        let density = chord_density(max_gap, oversample)?;
        self.stream(density, sink);
        Ok(())
    }

    /// Sample for a polynomial close-up: spacing is measured after mapping
    /// positions through `view`. `radius` is the expansion radius. Returned
    /// positions are *not* mapped.
    pub fn sample_closeup(
        &self,
        max_gap: f64,
        oversample: u32,
        view: CloseUp,
        radius: f64,
    ) -> Result<Vec<SamplePoint>, TraversalError> {
        let mut out = Vec::new();
        self.sample_closeup_each(max_gap, oversample, view, radius, |s| out.push(s))?;
        Ok(out)
    }

    pub fn sample_closeup_each(
        &self,
        max_gap: f64,
        oversample: u32,
        view: CloseUp,
        radius: f64,
        sink: impl FnMut(SamplePoint),
    ) -> Result<(), TraversalError> {
        let Density::Chord { gap } = chord_density(max_gap, oversample)? else {
            unreachable!()
        };
        let density = if view.zeta() == 1.0 {
            Density::Chord { gap }
        } else {
            Density::CloseUp { gap, view, radius }
        };
        self.stream(density, sink);
        Ok(())
    }

    fn stream(&self, density: Density, sink: impl FnMut(SamplePoint)) {
        const SPLIT_TARGET: usize = 4096;
        let mut tasks = Vec::new();
        let split_depth = self.split_depth(SPLIT_TARGET);
        self.plan(&self.root_piece(), 0, split_depth, &density, &mut tasks);

        let batch = (4 * rayon::current_num_threads()).max(16);
        let mut emitter = Emitter {
            traversal: self,
            last: None,
            sink,
        };
        for group in tasks.chunks(batch) {
            let chunks: Vec<Vec<RawPoint>> = group
                .par_iter()
                .map(|task| match task {
                    Task::Point(p) => vec![*p],
                    Task::Subtree(piece, depth) => {
                        let mut out = Vec::new();
                        self.walk(piece, *depth, &density, &mut |raw| out.push(raw));
                        out
                    }
                })
                .collect();
            for raw in chunks.into_iter().flatten() {
                emitter.push(raw);
            }
        }
    }

    fn split_depth(&self, target: usize) -> u32 {
        let fanout = self
            .generators
            .iter()
            .map(|g| {
                g.forward
                    .iter()
                    .filter(|c| matches!(c, super::Child::Seg { .. }))
                    .count()
            })
            .min()
            .unwrap_or(1)
            .max(2);
        let mut depth = 0;
        let mut count = 1usize;
        while count < target && depth < 16 {
            count *= fanout;
            depth += 1;
        }
        depth
    }

    /// Same traversal as [`Traversal::walk`], but hands whole subtrees at
    /// `split_depth` to the caller instead of descending into them.
    fn plan(&self, piece: &Piece, depth: u32, split_depth: u32, density: &Density, tasks: &mut Vec<Task>) {
        if depth >= split_depth {
            tasks.push(Task::Subtree(*piece, depth));
            return;
        }
        match self.classify(piece, depth, density) {
            Visit::Skip => {}
            Visit::Leaf => self.emit_leaf(piece, &mut |raw| tasks.push(Task::Point(raw))),
            Visit::Refine => self.for_each_child(piece, |c| match c {
                ChildRef::Piece(child) => self.plan(&child, depth + 1, split_depth, density, tasks),
                ChildRef::Jump { from, to, t } => {
                    self.emit_connector(from, to, t, density, &mut |raw| tasks.push(Task::Point(raw)))
                }
            }),
        }
    }

    fn walk(&self, piece: &Piece, depth: u32, density: &Density, out: &mut dyn FnMut(RawPoint)) {
        match self.classify(piece, depth, density) {
            Visit::Skip => {}
            Visit::Leaf => self.emit_leaf(piece, out),
            Visit::Refine => self.for_each_child(piece, |c| match c {
                ChildRef::Piece(child) => self.walk(&child, depth + 1, density, out),
                ChildRef::Jump { from, to, t } => self.emit_connector(from, to, t, density, out),
            }),
        }
    }

    fn classify(&self, piece: &Piece, depth: u32, density: &Density) -> Visit {
        let (lo, hi) = self.restriction;
        if piece.outside(lo, hi) {
            return Visit::Skip;
        }
        let partial = piece.t0 < lo || piece.t1 > hi;
        let tiny = piece.map.scale() < self.min_scale() || depth >= MAX_DEPTH;
        // The root is always refined once so that every stream shows the
        // first level's gates.
        if tiny || (depth > 0 && !partial && density.fine_enough(piece)) {
            Visit::Leaf
        } else {
            Visit::Refine
        }
    }

    fn emit_leaf(&self, piece: &Piece, out: &mut dyn FnMut(RawPoint)) {
        let (lo, hi) = self.restriction;
        let (ta, pa) = if piece.t0 < lo {
            (lo, self.eval_full(lo, super::DEFAULT_DEPTH))
        } else {
            (piece.t0, piece.start())
        };
        let (tb, pb) = if piece.t1 > hi {
            (hi, self.eval_full(hi, super::DEFAULT_DEPTH))
        } else {
            (piece.t1, piece.end())
        };
        out(RawPoint {
            t_full: ta,
            position: pa,
            on_jump: false,
        });
        out(RawPoint {
            t_full: tb,
            position: pb,
            on_jump: false,
        });
    }

    fn emit_connector(&self, from: Vec2, to: Vec2, t: f64, density: &Density, out: &mut dyn FnMut(RawPoint)) {
        let (lo, hi) = self.restriction;
        if !(lo < t && t < hi) {
            return;
        }
        let parts = density.connector_parts(from, to);
        for i in 1..parts {
            out(RawPoint {
                t_full: t,
                position: from.lerp(to, i as f64 / parts as f64),
                on_jump: true,
            });
        }
    }
}

enum Visit {
    Skip,
    Leaf,
    Refine,
}

fn chord_density(max_gap: f64, oversample: u32) -> Result<Density, TraversalError> {
    if !(max_gap > 0.0 && max_gap.is_finite()) {
        return Err(TraversalError::BadGap(max_gap));
    }
    Ok(Density::Chord {
        gap: max_gap / oversample.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvedef::{builtin, BUILTIN_NAMES};

    fn trav(name: &str) -> Traversal {
        Traversal::new(&builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn coarse_polya() {
        let s = trav("polya").sample(1.0, 1).unwrap();
        let pts: Vec<Vec2> = s.iter().map(|p| p.position).collect();
        assert_eq!(pts.len(), 3);
        assert!(pts[0].dist(Vec2::ZERO) < 1e-15);
        assert!(pts[1].dist(Vec2::new(0.5, 0.5)) < 1e-15);
        assert!(pts[2].dist(Vec2::ONE) < 1e-15);
        assert_eq!(s[1].t, 0.5);
    }

    #[test]
    fn strictly_ordered_and_spaced() {
        for name in BUILTIN_NAMES {
            let gap = 0.02;
            let s = trav(name).sample(gap, 2).unwrap();
            assert_eq!(s.first().unwrap().t, 0.0, "{name}");
            assert_eq!(s.last().unwrap().t, 1.0, "{name}");
            for w in s.windows(2) {
                assert!(w[0].order_key() < w[1].order_key(), "{name}: {:?}", w);
                assert!(
                    w[0].position.dist(w[1].position) <= gap / 2.0 + 1e-12,
                    "{name}: {:?}",
                    w
                );
            }
        }
    }

    #[test]
    fn zorder_has_connectors() {
        let s = trav("zorder").sample(0.05, 1).unwrap();
        let jumps: Vec<_> = s.iter().filter(|p| p.on_jump).collect();
        assert!(!jumps.is_empty());
        // The long middle jump runs at t = 1/2 from (1/2, 1/2)·N to (0, 1/2)·N.
        let mid: Vec<_> = jumps.iter().filter(|p| p.t == 0.5).collect();
        assert!(mid.len() >= 10);
        assert!(mid.windows(2).all(|w| w[0].tie + 1 == w[1].tie));
    }

    #[test]
    fn halving_gap_quadruples_count() {
        let t = trav("polya");
        let a = t.sample(0.01, 1).unwrap().len() as f64;
        let b = t.sample(0.005, 1).unwrap().len() as f64;
        let ratio = b / a;
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn independent_of_thread_count() {
        let t = trav("gosper");
        let v = t.sample(0.01, 1).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let w = pool.install(|| t.sample(0.01, 1).unwrap());
        assert_eq!(v, w);
    }

    #[test]
    fn rejects_bad_gap() {
        assert!(trav("polya").sample(0.0, 1).is_err());
        assert!(trav("polya").sample(f64::NAN, 1).is_err());
    }
}
