//! Progression images: every pixel coloured by the parameter at which the
//! curve visits it.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::colour::Colormap;
use crate::geom::{Bounds, Vec2};
use crate::hexraster::MergePolicy;
use crate::traversal::{Traversal, TraversalError};

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image size must be at least 1x1, got {0}x{1}")]
    BadSize(usize, usize),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error("malformed PPM: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Row-major RGB image, top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize) -> Self {
        RasterImage {
            width,
            height,
            pixels: vec![0; 3 * width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }
}

/// Binary PPM (P6).
pub fn write_ppm(img: &RasterImage, mut out: impl Write) -> io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", img.width, img.height)?;
    out.write_all(&img.pixels)?;
    out.flush()
}

/// Read a binary PPM as written by [`write_ppm`].
pub fn read_ppm(mut input: impl Read) -> Result<RasterImage, ImageError> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(ImageError::Malformed("truncated header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    // Exactly one whitespace byte separates the header from the data.
    pos += 1;
    if fields[0] != "P6" {
        return Err(ImageError::Malformed(format!("magic `{}`", fields[0])));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| ImageError::Malformed(format!("bad number `{s}`")))
    };
    let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
    if maxval != 255 {
        return Err(ImageError::Malformed(format!("maxval {maxval}")));
    }
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() != 3 * width * height {
        return Err(ImageError::Malformed(format!(
            "expected {} data bytes, found {}",
            3 * width * height,
            data.len()
        )));
    }
    Ok(RasterImage {
        width,
        height,
        pixels: data.to_vec(),
    })
}

/// Mapping from the plane to pixels: square pixels, y pointing up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelFrame {
    pub width: usize,
    pub height: usize,
    /// World position of the lower-left image corner.
    pub origin: Vec2,
    pub pixel_size: f64,
}

impl PixelFrame {
    /// Fit `bounds` plus a 2% margin into the image, centred.
    pub fn fit(bounds: Bounds, width: usize, height: usize) -> Self {
        let margin = 0.02 * bounds.width().max(bounds.height()).max(1e-12);
        let b = bounds.pad(margin);
        let pixel_size = (b.width() / width as f64).max(b.height() / height as f64);
        let c = b.center();
        let origin = c - Vec2::new(width as f64, height as f64) * (pixel_size / 2.0);
        PixelFrame {
            width,
            height,
            origin,
            pixel_size,
        }
    }

    /// Column and row (row 0 at the top) of the pixel containing `p`.
    pub fn pixel(&self, p: Vec2) -> Option<(usize, usize)> {
        let u = (p.x - self.origin.x) / self.pixel_size;
        let v = (p.y - self.origin.y) / self.pixel_size;
        if !(u >= 0.0 && v >= 0.0) {
            return None;
        }
        let (x, y_up) = (u.floor() as usize, v.floor() as usize);
        if x >= self.width || y_up >= self.height {
            return None;
        }
        Some((x, self.height - 1 - y_up))
    }
}

/// Bounding box of the whole curve: a coarse sample pass, padded by the
/// largest distance the curve can stray from it.
pub fn curve_bounds(traversal: &Traversal, radius: f64) -> Result<Bounds, TraversalError> {
    const COARSE_GAP: f64 = 0.01;
    let mut b = Bounds::EMPTY;
    traversal.sample_each(COARSE_GAP, 1, |s| b.include(s.position))?;
    Ok(b.pad(COARSE_GAP * radius))
}

/// Parameter chosen for every pixel (row-major, top row first), `None`
/// where the curve never lands.
pub fn progression_values(
    traversal: &Traversal,
    width: usize,
    height: usize,
    policy: MergePolicy,
) -> Result<(PixelFrame, Vec<Option<f64>>), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::BadSize(width, height));
    }
    let radius = traversal.expansion_radius().radius;
    let frame = PixelFrame::fit(curve_bounds(traversal, radius)?, width, height);
    let gap = frame.pixel_size / (2.0 * radius);
    let mut values: Vec<Option<f64>> = vec![None; width * height];
    traversal.sample_each(gap, 1, |s| {
        if s.on_jump {
            return;
        }
        if let Some((x, y)) = frame.pixel(s.position) {
            let slot = &mut values[y * width + x];
            *slot = Some(match *slot {
                None => s.t,
                Some(old) => match policy {
                    MergePolicy::First | MergePolicy::Min => old.min(s.t),
                    MergePolicy::Last | MergePolicy::Max => old.max(s.t),
                },
            });
        }
    })?;
    Ok((frame, values))
}

/// Colour each pixel by `scheme(t)`, with `t` picked by `policy` among the
/// samples in that pixel; unvisited pixels stay black.
pub fn progression_image(
    traversal: &Traversal,
    width: usize,
    height: usize,
    scheme: Colormap,
    policy: MergePolicy,
) -> Result<RasterImage, ImageError> {
    let (_, values) = progression_values(traversal, width, height, policy)?;
    let mut img = RasterImage::new(width, height);
    for (i, v) in values.iter().enumerate() {
        if let Some(t) = v {
            img.set(i % width, i / width, scheme.bytes(*t));
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvedef::builtin;

    #[test]
    fn ppm_bytes() {
        let mut img = RasterImage::new(1, 1);
        img.set(0, 0, [255, 255, 255]);
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(out, b"P6\n1 1\n255\n\xff\xff\xff");

        let mut img = RasterImage::new(2, 1);
        img.set(1, 0, [255, 255, 255]);
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(&out[out.len() - 6..], &[0, 0, 0, 255, 255, 255]);
        assert_eq!(read_ppm(&out[..]).unwrap(), img);
    }

    #[test]
    fn single_pixel_takes_policy_over_everything() {
        let t = Traversal::new(&builtin("polya").unwrap()).unwrap();
        let last = progression_image(&t, 1, 1, Colormap::Gray, MergePolicy::Last).unwrap();
        assert_eq!(last.get(0, 0), [255, 255, 255]);
        let first = progression_image(&t, 1, 1, Colormap::Gray, MergePolicy::First).unwrap();
        assert_eq!(first.get(0, 0), [0, 0, 0]);
    }

    #[test]
    fn zero_size_rejected() {
        let t = Traversal::new(&builtin("polya").unwrap()).unwrap();
        assert!(matches!(
            progression_image(&t, 0, 0, Colormap::Gray, MergePolicy::Last),
            Err(ImageError::BadSize(0, 0))
        ));
    }

    #[test]
    fn frame_is_y_up() {
        let f = PixelFrame::fit(
            Bounds {
                min: Vec2::ZERO,
                max: Vec2::new(1.0, 1.0),
            },
            10,
            10,
        );
        assert_eq!(f.pixel(Vec2::new(0.0, 0.0)), Some((0, 9)));
        assert_eq!(f.pixel(Vec2::new(1.0, 1.0)), Some((9, 0)));
        assert_eq!(f.pixel(Vec2::new(5.0, 0.0)), None);
    }
}
