//! Tie-broken inverse: the smallest parameter whose image is near a point.

use super::{ChildRef, Piece, Traversal, MAX_DEPTH};
use crate::geom::Vec2;

/// Ulps around a sub-resolution leaf searched for an acceptable parameter.
const SLACK_ULPS: usize = 4;

impl Traversal {
    /// Smallest `t` (up to the resolution of the search) with
    /// `|f(t) − q| ≤ eps`, or `None` when no point of the curve is that close.
    ///
    /// `radius` must be a valid expansion radius for this traversal.
    /// Pieces are discarded when `min(|q − a|, |q − b|) − d·radius > eps`
    /// and the rest are refined in parameter order, so the first accepted
    /// piece carries the smallest parameter. A piece is accepted once its
    /// image is small enough that its start lies within `eps` of `q`
    /// whenever any of its points does; the returned parameter always
    /// satisfies `|point_at(t) − q| ≤ eps`.
    pub fn inverse_at(&self, q: Vec2, eps: f64, radius: f64) -> Option<f64> {
        if !(eps > 0.0) || !q.is_finite() {
            return None;
        }
        let (lo, hi) = self.restriction;
        let min_scale = self.min_scale();
        let mut stack: Vec<(Piece, u32)> = vec![(self.root_piece(), 0)];
        while let Some((p, depth)) = stack.pop() {
            if p.outside(lo, hi) {
                continue;
            }
            let (a, b) = (p.start(), p.end());
            let d = a.dist(b);
            if q.dist(a).min(q.dist(b)) - d * radius > eps {
                continue;
            }
            let partial = p.t0 < lo || p.t1 > hi;
            let small = d * (1.0 + radius) <= eps / 2.0;
            let exhausted = p.map.scale() < min_scale || depth >= MAX_DEPTH;
            if exhausted || (small && !partial) {
                if let Some(u) = self.accept(&p, q, eps) {
                    return Some(u);
                }
                continue;
            }
            let mark = stack.len();
            self.for_each_child(&p, |c| {
                if let ChildRef::Piece(child) = c {
                    stack.push((child, depth + 1));
                }
            });
            stack[mark..].reverse();
        }
        None
    }

    /// First parameter of a leaf piece whose image is within `eps` of `q`.
    /// Only parameters that evaluate within `eps` are returned; rounding of
    /// accumulated parameters can move them slightly off the piece's gates.
    fn accept(&self, p: &Piece, q: Vec2, eps: f64) -> Option<f64> {
        let (lo, hi) = self.restriction;
        let (t0, t1) = (p.t0.max(lo), p.t1.min(hi));
        let hit = |t: f64| {
            let u = self.renormalize(t);
            self.point_at(u).is_ok_and(|f| q.dist(f) <= eps).then_some(u)
        };
        // Below parameter resolution the gates need not be representable and
        // accumulated bounds drift by a few ulps: scan every value nearby.
        if t1 <= t0 + 8.0 * f64::EPSILON * t0.abs().max(f64::MIN_POSITIVE) {
            let step = |mut t: f64, n: usize, up: bool| {
                for _ in 0..n {
                    t = if up { t.next_up() } else { t.next_down() };
                }
                t
            };
            let end = step(t1, SLACK_ULPS, true).min(hi);
            let mut t = step(t0, SLACK_ULPS, false).max(lo);
            while t <= end {
                if let Some(u) = hit(t) {
                    return Some(u);
                }
                t = t.next_up();
            }
            return None;
        }
        let d = p.start().dist(p.end());
        [(t0, p.start()), (t1, p.end())]
            .into_iter()
            .filter(|(_, g)| q.dist(*g) <= eps + d)
            .find_map(|(t, _)| hit(t))
    }
}

#[cfg(test)]
mod tests {
    use crate::curvedef::builtin;
    use crate::geom::Vec2;
    use crate::traversal::Traversal;

    fn inv(name: &str, q: Vec2, eps: f64) -> Option<f64> {
        let t = Traversal::new(&builtin(name).unwrap()).unwrap();
        let r = t.expansion_radius().radius;
        t.inverse_at(q, eps, r)
    }

    #[test]
    fn polya_examples() {
        assert_eq!(inv("polya", Vec2::ZERO, 1e-9), Some(0.0));
        let t = inv("polya", Vec2::new(0.5, 0.5), 1e-9).unwrap();
        assert!((t - 0.5).abs() <= 1e-9, "{t}");
        assert_eq!(inv("polya", Vec2::new(2.0, 2.0), 1e-3), None);
    }

    #[test]
    fn end_point_found_below_parameter_resolution() {
        let t = inv("polya", Vec2::ONE, 1e-9).unwrap();
        assert!(t > 1.0 - 1e-9, "{t}");
    }

    #[test]
    fn smallest_parameter_wins() {
        // The Pólya curve passes (1/2, 0) at t = 1/4 and again at t = 3/4.
        let t = inv("polya", Vec2::new(0.5, 0.0), 1e-9).unwrap();
        assert!((t - 0.25).abs() <= 1e-9, "{t}");
    }
}
