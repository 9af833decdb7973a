//! Triangle meshes of the trail terrain and its backdrop.
//!
//! Every ground layer becomes a hexagonal prism standing on `z = 0`. Walls
//! are only built where the neighbouring ground is lower, and each wall is
//! split at the heights of the third cell meeting at its ends, so ground
//! terrain without bridges forms a closed, edge-manifold surface.

mod collada;

use crate::colour::{Colormap, Rgb};
use crate::geom::{Bounds, Vec2};
use crate::hexraster::{Cell, HexGrid, Layer, LayerKind, Raster};

pub use collada::write_collada;

pub type Point3 = [f64; 3];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub colours: Vec<Rgb>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    fn vertex(&mut self, p: Point3, colour: Rgb) -> u32 {
        self.vertices.push(p);
        self.colours.push(colour);
        (self.vertices.len() - 1) as u32
    }

    fn triangle(&mut self, a: u32, b: u32, c: u32) {
        self.triangles.push([a, b, c]);
    }

    /// Counter-clockwise (as seen from the front) quad.
    fn quad(&mut self, corners: [Point3; 4], colour: Rgb) {
        let [a, b, c, d] = corners.map(|p| self.vertex(p, colour));
        self.triangle(a, b, c);
        self.triangle(a, c, d);
    }

    pub fn append(&mut self, other: &Mesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.colours.extend_from_slice(&other.colours);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
    }

    /// Unit normal of triangle `i` following its winding.
    pub fn face_normal(&self, i: usize) -> Point3 {
        let [a, b, c] = self.triangles[i].map(|k| self.vertices[k as usize]);
        let u = sub(b, a);
        let v = sub(c, a);
        normalize(cross(u, v))
    }

    pub fn bounds(&self) -> Option<(Point3, Point3)> {
        let mut it = self.vertices.iter();
        let first = *it.next()?;
        Some(it.fold((first, first), |(lo, hi), p| {
            ([0, 1, 2].map(|i| lo[i].min(p[i])), [0, 1, 2].map(|i| hi[i].max(p[i])))
        }))
    }
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn normalize(a: Point3) -> Point3 {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    if n == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        a.map(|c| c / n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub position: Point3,
    pub look_at: Point3,
    /// Vertical field of view in degrees.
    pub fov: f64,
}

impl Camera {
    /// Camera on a sphere around `target`; angles in degrees, azimuth
    /// counter-clockwise from +x, elevation above the ground plane.
    pub fn orbit(target: Point3, azimuth: f64, elevation: f64, distance: f64, fov: f64) -> Self {
        let (az, el) = (azimuth.to_radians(), elevation.to_radians());
        let dir = [el.cos() * az.cos(), el.cos() * az.sin(), el.sin()];
        Camera {
            position: [0, 1, 2].map(|i| target[i] + distance * dir[i]),
            look_at: target,
            fov,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Background {
    pub enabled: bool,
    pub front_z: f64,
    pub back_z: f64,
    pub cliff_y: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parapet {
    pub enabled: bool,
    pub height: f64,
    pub thickness: f64,
    /// Elevation drop that counts as a cliff.
    pub trigger: f64,
}

impl Parapet {
    pub fn for_edge(edge: f64) -> Self {
        Parapet {
            enabled: false,
            height: 1.5 * edge,
            thickness: 0.25 * edge,
            trigger: 20.0 * edge,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneConfig {
    pub camera: Camera,
    pub background: Background,
    pub parapet: Parapet,
    /// Slab thickness of bridge layers; `None` leaves bridges out.
    pub bridge_thickness: Option<f64>,
    pub colormap: Colormap,
    /// Elevations mapped to the ends of the colour map.
    pub colour_range: (f64, f64),
}

impl SceneConfig {
    /// Defaults for a model whose cells have edge `edge`, spanning `bounds`
    /// in plan and `0..=height` in elevation.
    pub fn for_model(bounds: Bounds, height: f64, edge: f64) -> Self {
        let c = bounds.center();
        let diagonal = (bounds.width().powi(2) + bounds.height().powi(2) + height * height).sqrt();
        SceneConfig {
            camera: Camera::orbit([c.x, c.y, height / 2.0], 210.0, 35.0, 2.2 * diagonal, 50.0),
            background: Background {
                enabled: true,
                front_z: 0.0,
                back_z: height,
                cliff_y: bounds.max.y + 0.2 * bounds.height(),
            },
            parapet: Parapet::for_edge(edge),
            bridge_thickness: Some(3.0 * edge),
            colormap: Colormap::default(),
            colour_range: (0.0, height),
        }
    }

    fn colour(&self, z: f64) -> Rgb {
        let (lo, hi) = self.colour_range;
        let u = if hi > lo { (z - lo) / (hi - lo) } else { 0.0 };
        self.colormap.colour(u)
    }
}

/// Fraction of the edge length below which caps are raised, so a ground
/// layer never collapses onto the base plane.
const MIN_CAP_FRACTION: f64 = 1e-3;

struct Terrain<'a> {
    raster: &'a Raster,
    grid: &'a HexGrid,
    floor: f64,
}

impl Terrain<'_> {
    /// Cap height of a cell's ground, or the base plane when it has none.
    fn ground(&self, cell: Cell) -> f64 {
        self.raster
            .ground_top(cell)
            .map_or(0.0, |t| t.max(self.floor))
    }


    /// Heights at which a wall from `low` to `high` is split along an end
    /// where it meets the cell `third`.
    fn chain(&self, third: Cell, low: f64, high: f64) -> Vec<f64> {
        let mid = self.ground(third);
        if mid > low && mid < high {
            vec![low, mid, high]
        } else {
            vec![low, high]
        }
    }
}

/// Vertices of one cell, shared between its faces.
const CENTRE: usize = usize::MAX;

struct CellVertices<'a> {
    grid: &'a HexGrid,
    cell: Cell,
    colour: Rgb,
    seen: Vec<(usize, u64, u32)>,
}

impl<'a> CellVertices<'a> {
    fn new(grid: &'a HexGrid, cell: Cell, colour: Rgb) -> Self {
        CellVertices {
            grid,
            cell,
            colour,
            seen: Vec::with_capacity(24),
        }
    }

    fn at(&mut self, mesh: &mut Mesh, k: usize, z: f64) -> u32 {
        let k = if k == CENTRE { k } else { k % 6 };
        if let Some(&(_, _, i)) = self.seen.iter().find(|e| e.0 == k && e.1 == z.to_bits()) {
            return i;
        }
        let p = if k == CENTRE {
            self.grid.center(self.cell)
        } else {
            self.grid.corner(self.cell, k)
        };
        let i = mesh.vertex([p.x, p.y, z], self.colour);
        self.seen.push((k, z.to_bits(), i));
        i
    }
}

/// Build the terrain mesh: prisms for ground layers, walls towards lower
/// neighbours, slabs for bridges and optional parapets along cliffs.
pub fn build_terrain(raster: &Raster, config: &SceneConfig) -> Mesh {
    let grid = raster.grid();
    let e = grid.edge();
    let terrain = Terrain {
        raster,
        grid,
        floor: MIN_CAP_FRACTION * e,
    };
    let mut mesh = Mesh::default();
    for col in raster.columns() {
        let cell = col.cell;
        for layer in &col.layers {
            match layer.kind {
                LayerKind::Ground => {
                    let top = terrain.ground(cell);
                    let colour = config.colour(layer.top);
                    let mut verts = CellVertices::new(grid, cell, colour);
                    hex_cap(&mut mesh, &mut verts, top, true);
                    hex_cap(&mut mesh, &mut verts, 0.0, false);
                    ground_walls(&mut mesh, &terrain, &mut verts, top);
                    if config.parapet.enabled {
                        parapets(&mut mesh, &terrain, cell, top, layer, &config.parapet, colour);
                    }
                }
                LayerKind::Bridge => {
                    if let Some(thickness) = config.bridge_thickness {
                        let colour = config.colour(layer.top);
                        slab(&mut mesh, grid, cell, layer.top, thickness, colour);
                    }
                }
            }
        }
    }
    mesh
}

/// Hexagon at height `z`, facing up (fan of 6 from the centre) or down
/// (4 triangles on the corners).
fn hex_cap(mesh: &mut Mesh, verts: &mut CellVertices, z: f64, up: bool) {
    let corners: Vec<u32> = (0..6).map(|k| verts.at(mesh, k, z)).collect();
    if up {
        let centre = verts.at(mesh, CENTRE, z);
        for k in 0..6 {
            mesh.triangle(centre, corners[k], corners[(k + 1) % 6]);
        }
    } else {
        for k in 1..5 {
            mesh.triangle(corners[0], corners[k + 1], corners[k]);
        }
    }
}

fn ground_walls(mesh: &mut Mesh, terrain: &Terrain, verts: &mut CellVertices, top: f64) {
    let cell = verts.cell;
    for (d, n) in cell.neighbours() {
        let low = terrain.ground(n);
        if low >= top {
            continue;
        }
        // Corner d is shared with the neighbour in direction d - 1, corner
        // d + 1 with the neighbour in direction d + 1.
        let left = terrain.chain(cell.neighbour((d + 5) % 6), low, top);
        let right = terrain.chain(cell.neighbour((d + 1) % 6), low, top);
        let l: Vec<u32> = left.iter().map(|&z| verts.at(mesh, d, z)).collect();
        let r: Vec<u32> = right.iter().map(|&z| verts.at(mesh, d + 1, z)).collect();
        ladder(mesh, &l, &left, &r, &right);
    }
}

/// Triangulate the strip between two vertical chains that start and end at
/// the same heights; the wall faces away from the cell.
fn ladder(mesh: &mut Mesh, l: &[u32], lz: &[f64], r: &[u32], rz: &[f64]) {
    let (mut i, mut j) = (0, 0);
    while i + 1 < l.len() || j + 1 < r.len() {
        let advance_right = i + 1 == l.len() || (j + 1 < r.len() && rz[j + 1] <= lz[i + 1]);
        if advance_right {
            mesh.triangle(l[i], r[j], r[j + 1]);
            j += 1;
        } else {
            mesh.triangle(l[i], r[j], l[i + 1]);
            i += 1;
        }
    }
}

fn slab(mesh: &mut Mesh, grid: &HexGrid, cell: Cell, top: f64, thickness: f64, colour: Rgb) {
    let bottom = top - thickness;
    let mut verts = CellVertices::new(grid, cell, colour);
    hex_cap(mesh, &mut verts, top, true);
    hex_cap(mesh, &mut verts, bottom, false);
    for k in 0..6 {
        let a = grid.corner(cell, k);
        let b = grid.corner(cell, k + 1);
        mesh.quad(
            [
                [a.x, a.y, bottom],
                [b.x, b.y, bottom],
                [b.x, b.y, top],
                [a.x, a.y, top],
            ],
            colour,
        );
    }
}

fn parapets(
    mesh: &mut Mesh,
    terrain: &Terrain,
    cell: Cell,
    top: f64,
    layer: &Layer,
    parapet: &Parapet,
    colour: Rgb,
) {
    let grid = terrain.grid;
    let centre = grid.center(cell);
    let apothem = grid.edge() * 3f64.sqrt() / 2.0;
    let inset = (parapet.thickness / apothem).min(1.0);
    let inner = |p: Vec2| p + (centre - p) * inset;
    let z1 = top + parapet.height;
    for d in 0..6 {
        let neighbour_top = terrain.ground(cell.neighbour(d));
        if !layer.cliff_flags[d] || top - neighbour_top <= parapet.trigger {
            continue;
        }
        let (a, b) = (grid.corner(cell, d), grid.corner(cell, d + 1));
        let (ai, bi) = (inner(a), inner(b));
        let at = |p: Vec2, z: f64| [p.x, p.y, z];
        // Outer face, top, inner face and the two ends.
        mesh.quad([at(a, top), at(b, top), at(b, z1), at(a, z1)], colour);
        mesh.quad([at(a, z1), at(b, z1), at(bi, z1), at(ai, z1)], colour);
        mesh.quad([at(bi, top), at(ai, top), at(ai, z1), at(bi, z1)], colour);
        mesh.quad([at(ai, top), at(a, top), at(a, z1), at(ai, z1)], colour);
        mesh.quad([at(b, top), at(bi, top), at(bi, z1), at(b, z1)], colour);
    }
}

/// Low front plane, cliff and high back plane behind the model.
pub fn build_background(config: &SceneConfig, model: Bounds) -> Mesh {
    let bg = config.background;
    let mut mesh = Mesh::default();
    if !bg.enabled {
        return mesh;
    }
    let ext = model.inflate(3.0);
    let (x0, x1) = (ext.min.x, ext.max.x);
    let (y0, y1) = (ext.min.y, ext.max.y.max(bg.cliff_y + model.height().max(1e-9)));
    let yc = bg.cliff_y;
    let front = [0.55, 0.55, 0.52];
    let back = [0.70, 0.70, 0.66];
    let cliff = [0.45, 0.42, 0.38];
    mesh.quad(
        [[x0, y0, bg.front_z], [x1, y0, bg.front_z], [x1, yc, bg.front_z], [x0, yc, bg.front_z]],
        front,
    );
    mesh.quad(
        [[x0, yc, bg.back_z], [x1, yc, bg.back_z], [x1, y1, bg.back_z], [x0, y1, bg.back_z]],
        back,
    );
    mesh.quad(
        [[x0, yc, bg.front_z], [x1, yc, bg.front_z], [x1, yc, bg.back_z], [x0, yc, bg.back_z]],
        cliff,
    );
    mesh
}
