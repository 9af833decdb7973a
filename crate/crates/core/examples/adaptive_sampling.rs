//! Sample a curve so that consecutive samples are at most a given distance
//! apart, and report how the sample count grows as the gap shrinks.
//!
//!     cargo run --release --example adaptive_sampling [NAME]

use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "gosper".into());
    let t = Traversal::new(&builtin(&name)?)?;
    for k in 1..=6 {
        let gap = 0.5f64.powi(k);
        let samples = t.sample(gap, 1)?;
        let widest = samples
            .windows(2)
            .filter(|w| !w[1].on_jump)
            .map(|w| w[0].position.dist(w[1].position))
            .fold(0.0, f64::max);
        let jumps = samples.iter().filter(|s| s.on_jump).count();
        println!(
            "gap {gap:<9} samples {:>7}  widest step {widest:.5}  jump samples {jumps}",
            samples.len()
        );
    }
    Ok(())
}
