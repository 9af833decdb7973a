//! List the builtin curves with their contraction, radius bound and end
//! points.
//!
//!     cargo run --example builtin_catalogue

use pftrail::curvedef::BUILTIN_NAMES;
use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<18} {:>8} {:>10} {:>22}", "name", "max c", "R", "f(1/2)");
    for name in BUILTIN_NAMES {
        let def = builtin(name)?;
        let t = Traversal::new(&def)?;
        let mid = t.point_at(0.5)?;
        println!(
            "{name:<18} {:>8.5} {:>10.6} {:>22}",
            t.max_contraction(),
            t.expansion_radius().radius,
            format!("({:.5}, {:.5})", mid.x, mid.y)
        );
    }
    Ok(())
}
