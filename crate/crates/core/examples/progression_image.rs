//! Draw a progression image: every pixel coloured by when the curve
//! reaches it.
//!
//!     cargo run --release --example progression_image [NAME] [SIZE] [OUT.ppm]

use std::fs::File;
use std::io::BufWriter;

use pftrail::colour::Colormap;
use pftrail::hexraster::MergePolicy;
use pftrail::imaging::{progression_image, write_ppm};
use pftrail::{builtin, Traversal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "peano".into());
    let size: usize = args.next().map_or(Ok(256), |s| s.parse())?;
    let out = args.next().unwrap_or_else(|| format!("{name}.ppm"));
    let t = Traversal::new(&builtin(&name)?)?;
    let img = progression_image(&t, size, size, Colormap::Rainbow, MergePolicy::Last)?;
    write_ppm(&img, BufWriter::new(File::create(&out)?))?;
    let lit = img.pixels.chunks(3).filter(|p| p.iter().any(|&b| b > 0)).count();
    println!("wrote {out}: {lit} of {} pixels visited", size * size);
    Ok(())
}
