//! Polynomial close-up around a curve point: distances to the focus become
//! r^(1/zeta), parameters are stretched to match.
//!
//!     cargo run --example closeup [ZETA]

use pftrail::traversal::{closeup, TrailPoint};
use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let zeta: f64 = match std::env::args().nth(1) {
        Some(z) => z.parse()?,
        None => 2.0,
    };
    let t = Traversal::new(&builtin("gosper")?)?;
    let focus_t = 0.0;
    let focus = TrailPoint {
        position: t.point_at(focus_t)?,
        t: focus_t,
    };
    let points: Vec<TrailPoint> = t
        .sample(0.05, 1)?
        .into_iter()
        .map(|s| TrailPoint {
            position: s.position,
            t: s.t,
        })
        .collect();
    let mapped: Vec<TrailPoint> = closeup(points.iter().copied(), focus, zeta)?.collect();
    for (p, q) in points.iter().zip(&mapped).step_by(points.len() / 10 + 1) {
        println!(
            "t {:.5} r {:.5}  ->  t' {:+.5} r' {:.5}",
            p.t,
            p.position.dist(focus.position),
            q.t,
            q.position.norm()
        );
    }
    Ok(())
}
