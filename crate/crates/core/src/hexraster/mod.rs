//! Flat-top hexagonal grid and the per-cell layer stacks built from a
//! sample stream.

mod layers;

use std::fmt;

use thiserror::Error;

use crate::geom::{Bounds, Vec2};

pub use layers::{
    default_gap_threshold, erode, mark_cliffs, rasterize, CellColumn, Layer, LayerKind, MergePolicy,
    Raster, RasterOptions, Rasterizer,
};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("no samples to rasterize")]
    Empty,
    #[error("cell edge must be positive and finite, got {0}")]
    BadEdge(f64),
    #[error("layer gap threshold must be positive, got {0}")]
    BadGapThreshold(f64),
    #[error("samples must arrive in increasing parameter order")]
    OutOfOrder,
}

/// Axial cell address. Orders lexicographically by `(q, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub q: i32,
    pub r: i32,
}

impl Cell {
    pub const fn new(q: i32, r: i32) -> Self {
        Cell { q, r }
    }

    /// Neighbour across edge `dir`; see [`DIRECTIONS`].
    pub fn neighbour(self, dir: usize) -> Cell {
        let (dq, dr) = DIRECTIONS[dir % 6];
        Cell::new(self.q + dq, self.r + dr)
    }

    pub fn neighbours(self) -> impl Iterator<Item = (usize, Cell)> {
        (0..6).map(move |d| (d, self.neighbour(d)))
    }

    /// Integer key of corner `k`; shared corners of adjacent cells get the
    /// same key. The corner lies at `origin + (X·e/2, Y·e·√3/2)`.
    pub fn corner_key(self, k: usize) -> (i32, i32) {
        const DX: [i32; 6] = [2, 1, -1, -2, -1, 1];
        const DY: [i32; 6] = [0, 1, 1, 0, -1, -1];
        let k = k % 6;
        (3 * self.q + DX[k], 2 * self.r + self.q + DY[k])
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.r)
    }
}

/// Axial offsets of the six neighbours. Direction `d` points through the
/// edge between corners `d` and `d + 1`, at `30° + 60°·d`.
pub const DIRECTIONS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Inclusive axial ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxialExtent {
    pub q_min: i32,
    pub q_max: i32,
    pub r_min: i32,
    pub r_max: i32,
}

impl AxialExtent {
    pub fn contains(&self, c: Cell) -> bool {
        (self.q_min..=self.q_max).contains(&c.q) && (self.r_min..=self.r_max).contains(&c.r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexGrid {
    edge: f64,
    origin: Vec2,
    extent: Option<AxialExtent>,
}

impl HexGrid {
    pub fn new(edge: f64, origin: Vec2) -> Result<Self, RasterError> {
        if !(edge > 0.0 && edge.is_finite()) {
            return Err(RasterError::BadEdge(edge));
        }
        Ok(HexGrid {
            edge,
            origin,
            extent: None,
        })
    }

    /// Grid with its origin at the box's lower-left corner and an extent
    /// covering every cell that can contain a point of the box.
    pub fn covering(bounds: Bounds, edge: f64) -> Result<Self, RasterError> {
        let mut grid = HexGrid::new(edge, bounds.min)?;
        let corners = [
            bounds.min,
            bounds.max,
            Vec2::new(bounds.min.x, bounds.max.y),
            Vec2::new(bounds.max.x, bounds.min.y),
        ];
        let mut ext = AxialExtent {
            q_min: i32::MAX,
            q_max: i32::MIN,
            r_min: i32::MAX,
            r_max: i32::MIN,
        };
        for p in corners {
            let c = grid.world_to_cell(p);
            ext.q_min = ext.q_min.min(c.q - 1);
            ext.q_max = ext.q_max.max(c.q + 1);
            ext.r_min = ext.r_min.min(c.r - 1);
            ext.r_max = ext.r_max.max(c.r + 1);
        }
        grid.extent = Some(ext);
        Ok(grid)
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn extent(&self) -> Option<AxialExtent> {
        self.extent
    }

    pub fn cell_area(&self) -> f64 {
        1.5 * SQRT3 * self.edge * self.edge
    }

    /// Distance between the centres of adjacent cells.
    pub fn center_spacing(&self) -> f64 {
        SQRT3 * self.edge
    }

    pub fn center(&self, c: Cell) -> Vec2 {
        let q = c.q as f64;
        let r = c.r as f64;
        self.origin + Vec2::new(1.5 * self.edge * q, SQRT3 * self.edge * (r + q / 2.0))
    }

    pub fn corner(&self, c: Cell, k: usize) -> Vec2 {
        let (x, y) = c.corner_key(k);
        self.origin + Vec2::new(x as f64 * self.edge / 2.0, y as f64 * self.edge * SQRT3 / 2.0)
    }

    /// The cell whose centre is nearest to `p`; exact ties (up to rounding)
    /// go to the lexicographically smallest `(q, r)`.
    pub fn world_to_cell(&self, p: Vec2) -> Cell {
        let d = p - self.origin;
        let fq = (2.0 / 3.0) * d.x / self.edge;
        let fr = (-d.x / 3.0 + SQRT3 / 3.0 * d.y) / self.edge;
        let guess = cube_round(fq, fr);
        let mut candidates = [(0.0, guess); 7];
        for (d, c) in guess.neighbours() {
            candidates[d + 1].1 = c;
        }
        for cand in candidates.iter_mut() {
            cand.0 = p.dist(self.center(cand.1));
        }
        let nearest = candidates.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let tolerance = 1e-9 * self.edge;
        candidates
            .iter()
            .filter(|s| s.0 <= nearest + tolerance)
            .map(|s| s.1)
            .min()
            .unwrap()
    }

    /// Whether the whole cell lies inside the convex polygon `poly`
    /// (counter-clockwise).
    pub fn cell_inside_convex(&self, c: Cell, poly: &[Vec2]) -> bool {
        (0..6).all(|k| point_in_convex(self.corner(c, k), poly))
    }
}

fn cube_round(fq: f64, fr: f64) -> Cell {
    let fs = -fq - fr;
    let mut q = fq.round();
    let mut r = fr.round();
    let s = fs.round();
    let dq = (q - fq).abs();
    let dr = (r - fr).abs();
    let ds = (s - fs).abs();
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    Cell::new(q as i32, r as i32)
}

/// Point in a counter-clockwise convex polygon, boundary included.
pub fn point_in_convex(p: Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        let v = p - a;
        e.x * v.y - e.y * v.x >= -1e-12
    })
}
