//! Bin samples into hexagonal cell columns and inspect the layers.
//!
//!     cargo run --release --example hex_rasterize [NAME] [N]

use pftrail::hexraster::{default_gap_threshold, rasterize, HexGrid, MergePolicy, RasterOptions};
use pftrail::imaging::curve_bounds;
use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "zorder".into());
    let n: usize = args.next().map_or(Ok(32), |s| s.parse())?;
    let t = Traversal::new(&builtin(&name)?)?;
    let radius = t.expansion_radius().radius;
    let bounds = curve_bounds(&t, radius)?;
    let edge = bounds.width() / (1.5 * n as f64);
    let grid = HexGrid::covering(bounds, edge)?;
    let options = RasterOptions {
        gap_threshold: default_gap_threshold(&grid, bounds),
        policy: MergePolicy::Max,
        height_scale: 1.0,
    };
    let samples = t.sample(edge / (2.0 * radius), 1)?;
    let raster = rasterize(samples, grid, options)?;
    println!(
        "{} samples -> {} cells, {} layers ({} bridges)",
        raster.sample_count(),
        raster.cell_count(),
        raster.layer_count(),
        raster.bridge_count()
    );
    for line in raster.dump().lines().take(12) {
        println!("  {line}");
    }
    Ok(())
}
