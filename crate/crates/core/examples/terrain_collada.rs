//! Render a curve as a terrain model and write it as COLLADA.
//!
//!     cargo run --release --example terrain_collada [NAME] [N] [OUT.dae]

use std::fs::File;
use std::io::BufWriter;

use pftrail::render::{render_collada, RenderConfig};
use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "hilbert".into());
    let grid: usize = args.next().map_or(Ok(64), |s| s.parse())?;
    let out = args.next().unwrap_or_else(|| format!("{name}.dae"));
    let t = Traversal::new(&builtin(&name)?)?;
    let cfg = RenderConfig {
        grid,
        ..RenderConfig::default()
    };
    let stats = render_collada(&t, &cfg, BufWriter::new(File::create(&out)?))?;
    stats.write_report(std::io::stdout())?;
    println!("wrote {out}");
    Ok(())
}
