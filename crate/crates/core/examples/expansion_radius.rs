//! Compare the computed expansion radius at increasing depths with a dense
//! sampling estimate of the true value.
//!
//!     cargo run --release --example expansion_radius [NAME]

use pftrail::{builtin, Traversal, Vec2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "hilbert".into());
    let t = Traversal::new(&builtin(&name)?)?;
    for depth in 1..=8 {
        let b = t.expansion_radius_at(depth);
        println!("depth {depth}: R = {:.6}", b.radius);
    }
    // Every point must stay within R of the nearer end point (0,0) or (1,0).
    let estimate = t
        .sample(1e-3, 1)?
        .iter()
        .map(|s| s.position.norm().min(s.position.dist(Vec2::ONE)))
        .fold(0.0, f64::max);
    println!("dense estimate: {estimate:.6}");
    Ok(())
}
