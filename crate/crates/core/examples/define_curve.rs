//! Parse a curve definition from text, validate it and print the derived
//! per-segment geometry.
//!
//!     cargo run --example define_curve [FILE]

use std::error::Error;

use pftrail::curvedef::{segment_transforms, validate, ItemTransform};
use pftrail::parse_definition;

const TERDRAGON: &str = "\
# Terdragon: three unit steps on the triangular lattice.
curve terdragon
start T
generator T basis triangular
seg 1 0
seg -1 1
seg 1 0
";

fn main() -> Result<(), Box<dyn Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => TERDRAGON.to_string(),
    };
    let def = parse_definition(&text)?;
    println!("curve {} (start {})", def.name, def.start);
    println!("validation: {}", validate(&def));
    for g in def.generators.values() {
        println!("generator {} ({} items, basis {})", g.id, g.items.len(), g.basis.keyword());
        for (i, item) in segment_transforms(g, &def)?.iter().enumerate() {
            match item {
                ItemTransform::Segment {
                    similarity,
                    weight,
                    reversed,
                    target,
                } => println!(
                    "  {i}: seg -> {target} scale {:.6} turn {:+.3} rad weight {weight:.6}{}{}",
                    similarity.scale(),
                    similarity.rotation(),
                    if similarity.mirrored { " mirrored" } else { "" },
                    if *reversed { " reversed" } else { "" },
                ),
                ItemTransform::Jump { from, to } => println!("  {i}: jump {from} -> {to}"),
            }
        }
    }
    Ok(())
}
