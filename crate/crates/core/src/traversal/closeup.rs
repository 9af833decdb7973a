//! Polynomial close-up around a focus point of the trail.
//!
//! With the focus as origin of the `(x, y, t)` frame, a point at polar
//! position `(r, φ)` moves to `(r^(1/ζ), φ)` and the relative parameter `t`
//! to `sign(t)·|t|^(1/(1.5ζ − 0.5))`. Output stays focus-relative.

use super::TraversalError;
use crate::geom::Vec2;

/// A point of the trail: plan position plus parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrailPoint {
    pub position: Vec2,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloseUp {
    focus: TrailPoint,
    zeta: f64,
}

impl CloseUp {
    pub fn new(focus: TrailPoint, zeta: f64) -> Result<Self, TraversalError> {
        if !(zeta >= 1.0 && zeta.is_finite()) {
            return Err(TraversalError::ZoomBelowOne(zeta));
        }
        Ok(CloseUp { focus, zeta })
    }

    pub fn focus(&self) -> TrailPoint {
        self.focus
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Exponent applied to the relative parameter.
    pub fn t_exponent(&self) -> f64 {
        1.0 / (1.5 * self.zeta - 0.5)
    }

    #[inline]
    fn radial(&self, r: f64) -> f64 {
        r.powf(1.0 / self.zeta)
    }

    pub fn map_position(&self, p: Vec2) -> Vec2 {
        let d = p - self.focus.position;
        if self.zeta == 1.0 {
            return d;
        }
        let r = d.norm();
        if r == 0.0 {
            return Vec2::ZERO;
        }
        d * (self.radial(r) / r)
    }

    pub fn map_t(&self, t: f64) -> f64 {
        let d = t - self.focus.t;
        if self.zeta == 1.0 {
            return d;
        }
        d.signum() * d.abs().powf(self.t_exponent())
    }

    pub fn apply(&self, p: TrailPoint) -> TrailPoint {
        TrailPoint {
            position: self.map_position(p.position),
            t: self.map_t(p.t),
        }
    }

    /// Upper bound on how far the image of any point within `rho` of `c`
    /// lies from the image of `c`.
    pub(crate) fn spread_bound(&self, c: Vec2, rho: f64) -> f64 {
        let rc = c.dist(self.focus.position);
        if rc > rho {
            // Radial change plus the arc swept at the outermost radius.
            (self.radial(rc) - self.radial(rc - rho))
                + self.radial(rc + rho) * (rho / rc).asin()
        } else {
            self.radial(rc) + self.radial(rc + rho)
        }
    }
}

/// Apply a close-up to every point of a stream.
pub fn closeup<I>(
    points: I,
    focus: TrailPoint,
    zeta: f64,
) -> Result<impl Iterator<Item = TrailPoint>, TraversalError>
where
    I: IntoIterator<Item = TrailPoint>,
{
    let view = CloseUp::new(focus, zeta)?;
    Ok(points.into_iter().map(move |p| view.apply(p)))
}
