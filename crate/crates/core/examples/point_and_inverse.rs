//! Evaluate f(t) and recover the smallest parameter visiting a point.
//!
//!     cargo run --example point_and_inverse [NAME]

use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "polya".into());
    let t = Traversal::new(&builtin(&name)?)?;
    let radius = t.expansion_radius().radius;
    for i in 0..=8 {
        let s = i as f64 / 8.0;
        let p = t.point_at(s)?;
        let back = t.inverse_at(p, 1e-9, radius);
        match back {
            Some(u) => println!("t = {s:.4} -> {p} -> first visit at t = {u:.9}"),
            None => println!("t = {s:.4} -> {p} -> not found"),
        }
    }
    Ok(())
}
