//! Colour maps from a normalized value in `[0, 1]` to linear RGB.

use std::fmt;
use std::str::FromStr;

pub type Rgb = [f64; 3];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Colormap {
    Gray,
    /// Hue `300°·u` at full saturation and value.
    #[default]
    Rainbow,
    /// Green lowlands through brown to white peaks.
    Hypsometric,
}

impl Colormap {
    pub fn keyword(self) -> &'static str {
        match self {
            Colormap::Gray => "gray",
            Colormap::Rainbow => "rainbow",
            Colormap::Hypsometric => "hypsometric",
        }
    }

    pub fn colour(self, u: f64) -> Rgb {
        let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, 1.0) };
        match self {
            Colormap::Gray => [u, u, u],
            Colormap::Rainbow => hue_to_rgb(300.0 * u),
            Colormap::Hypsometric => {
                const STOPS: [Rgb; 3] = [[0.16, 0.45, 0.18], [0.55, 0.40, 0.22], [1.0, 1.0, 1.0]];
                let (a, b, s) = if u < 0.5 {
                    (STOPS[0], STOPS[1], u * 2.0)
                } else {
                    (STOPS[1], STOPS[2], u * 2.0 - 1.0)
                };
                [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * s)
            }
        }
    }

    /// Colour as bytes, each channel `round(255·c)`.
    pub fn bytes(self, u: f64) -> [u8; 3] {
        self.colour(u).map(|c| (255.0 * c).round() as u8)
    }
}

/// HSV to RGB with `s = v = 1`; `hue` in degrees.
pub fn hue_to_rgb(hue: f64) -> Rgb {
    let h = hue.rem_euclid(360.0) / 60.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    match h as u32 {
        0 => [1.0, x, 0.0],
        1 => [x, 1.0, 0.0],
        2 => [0.0, 1.0, x],
        3 => [0.0, x, 1.0],
        4 => [x, 0.0, 1.0],
        _ => [1.0, 0.0, x],
    }
}

impl FromStr for Colormap {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gray" | "grey" => Ok(Colormap::Gray),
            "rainbow" => Ok(Colormap::Rainbow),
            "hypsometric" => Ok(Colormap::Hypsometric),
            _ => Err(format!("unknown colour scheme `{s}` (expected gray, rainbow or hypsometric)")),
        }
    }
}

impl fmt::Display for Colormap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_ends() {
        assert_eq!(Colormap::Gray.bytes(0.0), [0, 0, 0]);
        assert_eq!(Colormap::Gray.bytes(1.0), [255, 255, 255]);
        assert_eq!(Colormap::Gray.bytes(0.5), [128, 128, 128]);
    }

    #[test]
    fn rainbow_hues() {
        assert_eq!(Colormap::Rainbow.bytes(0.0), [255, 0, 0]);
        assert_eq!(Colormap::Rainbow.bytes(0.4), [0, 255, 0]);
        assert_eq!(Colormap::Rainbow.bytes(0.8), [0, 0, 255]);
        assert_eq!(Colormap::Rainbow.bytes(1.0), [255, 0, 255]);
    }
}
