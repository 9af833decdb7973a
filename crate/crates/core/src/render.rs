//! The full terrain pipeline: sample, rasterize, mesh and serialize.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::colour::Colormap;
use crate::geom::{Bounds, Vec2};
use crate::hexraster::{
    default_gap_threshold, erode, mark_cliffs, HexGrid, MergePolicy, Raster, RasterError, RasterOptions,
    Rasterizer,
};
use crate::imaging::curve_bounds;
use crate::meshgen::{build_background, build_terrain, write_collada, Camera, Mesh, SceneConfig};
use crate::traversal::{CloseUp, SamplePoint, TrailPoint, Traversal, TraversalError};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Focus {
    /// Curve parameter; the focus is `f(t)`.
    Parameter(f64),
    /// Explicit plan position; the focus parameter is the curve's inverse
    /// at that point.
    Point(Vec2),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zoom {
    pub focus: Focus,
    pub zeta: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    #[default]
    Normal,
    /// Ground slopes limited by repeated relaxation. A provisional rule:
    /// the look of eroded renders has no fixed definition.
    Eroded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraSpec {
    pub azimuth: f64,
    pub elevation: f64,
    /// Distance from the model centre; `None` means 2.2 × the model's
    /// bounding-box diagonal.
    pub distance: Option<f64>,
    pub fov: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            azimuth: 210.0,
            elevation: 35.0,
            distance: None,
            fov: 50.0,
        }
    }
}

/// Parapet settings; lengths are multiples of the cell edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParapetSpec {
    pub enabled: bool,
    pub height: f64,
    pub thickness: f64,
    pub trigger: f64,
}

impl Default for ParapetSpec {
    fn default() -> Self {
        ParapetSpec {
            enabled: false,
            height: 1.5,
            thickness: 0.25,
            trigger: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderConfig {
    /// Cells across the model's width.
    pub grid: usize,
    /// Elevation of `t = 1`; `None` means half the model width.
    pub height_scale: Option<f64>,
    pub policy: MergePolicy,
    /// Layer gap in parameter units; `None` uses the area-share default.
    pub gap_threshold: Option<f64>,
    pub parapet: ParapetSpec,
    pub style: Style,
    /// Elevation gain per unit of horizontal distance allowed by erosion.
    pub slope_limit: f64,
    /// Erosion rounds; 0 runs to a fixpoint.
    pub erode_iterations: usize,
    pub colormap: Colormap,
    pub camera: CameraSpec,
    pub background: bool,
    pub bridges: bool,
    pub oversample: u32,
    pub zoom: Option<Zoom>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            grid: 128,
            height_scale: None,
            policy: MergePolicy::Max,
            gap_threshold: None,
            parapet: ParapetSpec::default(),
            style: Style::Normal,
            slope_limit: 1.0,
            erode_iterations: 0,
            colormap: Colormap::Rainbow,
            camera: CameraSpec::default(),
            background: true,
            bridges: true,
            oversample: 1,
            zoom: None,
        }
    }
}

impl RenderConfig {
    pub fn check(&self) -> Result<(), RenderError> {
        let bad = |m: String| Err(RenderError::Config(m));
        if self.grid < 8 {
            return bad(format!("grid resolution must be at least 8, got {}", self.grid));
        }
        if self.oversample < 1 {
            return bad("oversampling factor must be at least 1".into());
        }
        if let Some(z) = self.zoom {
            if !(z.zeta >= 1.0) {
                return bad(format!("zoom exponent must be at least 1, got {}", z.zeta));
            }
            if let Focus::Parameter(t) = z.focus {
                if !(0.0..=1.0).contains(&t) {
                    return bad(format!("zoom parameter must lie in [0, 1], got {t}"));
                }
            }
        }
        if !(self.camera.fov > 10.0 && self.camera.fov < 120.0) {
            return bad(format!("field of view must lie in (10, 120) degrees, got {}", self.camera.fov));
        }
        if let Some(h) = self.height_scale {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("height scale must be positive, got {h}"));
            }
        }
        if let Some(tau) = self.gap_threshold {
            if !(tau > 0.0) {
                return bad(format!("layer gap must be positive, got {tau}"));
            }
        }
        if self.parapet.enabled && !(self.parapet.height > 0.0 && self.parapet.thickness > 0.0) {
            return bad("parapet height and thickness must be positive".into());
        }
        if self.style == Style::Eroded && !(self.slope_limit > 0.0) {
            return bad(format!("slope limit must be positive, got {}", self.slope_limit));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RenderStats {
    pub radius: f64,
    pub radius_depth: u32,
    pub edge: f64,
    pub samples: usize,
    pub cells: usize,
    pub layers: usize,
    pub bridges: usize,
    pub triangles: usize,
    pub timings: Vec<(&'static str, Duration)>,
}

impl RenderStats {
    pub fn write_report(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "expansion radius R = {:.6} (depth {})", self.radius, self.radius_depth)?;
        writeln!(out, "cell edge e = {:.6e}", self.edge)?;
        writeln!(out, "samples: {}", self.samples)?;
        writeln!(out, "cells: {}", self.cells)?;
        writeln!(out, "layers: {} ({} bridge)", self.layers, self.bridges)?;
        writeln!(out, "triangles: {}", self.triangles)?;
        for (stage, d) in &self.timings {
            writeln!(out, "time {stage}: {:.3} s", d.as_secs_f64())?;
        }
        Ok(())
    }
}

/// Everything produced before serialization.
#[derive(Clone, Debug)]
pub struct Model {
    pub raster: Raster,
    pub terrain: Mesh,
    pub background: Mesh,
    pub scene: SceneConfig,
    pub stats: RenderStats,
}

struct Timer {
    last: Instant,
    log: Vec<(&'static str, Duration)>,
}

impl Timer {
    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        self.log.push((stage, now - self.last));
        self.last = now;
    }
}

/// Resolve the zoom into a close-up view in the traversal's frame.
fn closeup_view(traversal: &Traversal, zoom: Zoom, radius: f64) -> Result<CloseUp, RenderError> {
    let focus = match zoom.focus {
        Focus::Parameter(t) => TrailPoint {
            position: traversal.point_at(t)?,
            t,
        },
        Focus::Point(p) => {
            let t = traversal
                .inverse_at(p, 1e-9, radius)
                .or_else(|| traversal.inverse_at(p, 1e-3, radius))
                .ok_or_else(|| RenderError::Config(format!("focus point {p} is not on the curve")))?;
            TrailPoint { position: p, t }
        }
    };
    Ok(CloseUp::new(focus, zoom.zeta)?)
}

/// Run the pipeline up to the meshes.
pub fn build_model(traversal: &Traversal, cfg: &RenderConfig) -> Result<Model, RenderError> {
    cfg.check()?;
    let mut timer = Timer {
        last: Instant::now(),
        log: Vec::new(),
    };
    let bound = traversal.expansion_radius();
    let radius = bound.radius;
    timer.lap("radius");

    let view = cfg.zoom.map(|z| closeup_view(traversal, z, radius)).transpose()?;
    let mut bounds = curve_bounds(traversal, radius)?;
    if let Some(v) = view {
        let mut mapped = Bounds::EMPTY;
        traversal.sample_each(0.01, 1, |s| mapped.include(v.map_position(s.position)))?;
        bounds = mapped.pad(0.02 * mapped.width().max(mapped.height()));
    }
    timer.lap("bounds");

    let width = bounds.width().max(bounds.height() * 1e-3);
    let edge = width / (1.5 * cfg.grid as f64);
    let height_scale = cfg.height_scale.unwrap_or(0.5 * width);
    let grid = HexGrid::covering(bounds, edge)?;
    let t_span = view.map_or(1.0, |v| v.map_t(1.0) - v.map_t(0.0));
    let options = RasterOptions {
        gap_threshold: cfg
            .gap_threshold
            .unwrap_or_else(|| default_gap_threshold(&grid, bounds) * t_span),
        policy: cfg.policy,
        height_scale,
    };
    let mut rasterizer = Rasterizer::new(grid, options)?;
    let max_gap = edge / (2.0 * radius);
    let mut failure = None;
    let mut push = |s: SamplePoint| {
        if failure.is_none() {
            if let Err(e) = rasterizer.push(s) {
                failure = Some(e);
            }
        }
    };
    match view {
        None => traversal.sample_each(max_gap, cfg.oversample, &mut push)?,
        Some(v) => traversal.sample_closeup_each(max_gap, cfg.oversample, v, radius, |s| {
            push(SamplePoint {
                t: v.map_t(s.t),
                position: v.map_position(s.position),
                ..s
            })
        })?,
    }
    if let Some(e) = failure {
        return Err(e.into());
    }
    let samples = rasterizer.sample_count();
    let mut raster = rasterizer.finish()?;
    timer.lap("sample+rasterize");

    let (z_lo, _) = raster.elevation_range();
    if view.is_some() {
        raster.shift_elevation(-z_lo);
    }
    let z_top = if view.is_some() {
        raster.elevation_range().1
    } else {
        height_scale
    };
    mark_cliffs(&mut raster, cfg.parapet.trigger * edge);
    if cfg.style == Style::Eroded {
        erode(&mut raster, cfg.slope_limit, cfg.erode_iterations);
    }
    timer.lap("cliffs");

    let mut scene = SceneConfig::for_model(bounds, z_top, edge);
    scene.colormap = cfg.colormap;
    scene.background.enabled = cfg.background;
    scene.parapet.enabled = cfg.parapet.enabled;
    scene.parapet.height = cfg.parapet.height * edge;
    scene.parapet.thickness = cfg.parapet.thickness * edge;
    scene.parapet.trigger = cfg.parapet.trigger * edge;
    if !cfg.bridges {
        scene.bridge_thickness = None;
    }
    let target = scene.camera.look_at;
    let distance = cfg.camera.distance.unwrap_or_else(|| {
        2.2 * (bounds.width().powi(2) + bounds.height().powi(2) + z_top * z_top).sqrt()
    });
    scene.camera = Camera::orbit(target, cfg.camera.azimuth, cfg.camera.elevation, distance, cfg.camera.fov);
    let terrain = build_terrain(&raster, &scene);
    let background = build_background(&scene, bounds);
    timer.lap("mesh");

    let stats = RenderStats {
        radius,
        radius_depth: bound.depth_used,
        edge,
        samples,
        cells: raster.cell_count(),
        layers: raster.layer_count(),
        bridges: raster.bridge_count(),
        triangles: terrain.triangles.len() + background.triangles.len(),
        timings: timer.log,
    };
    Ok(Model {
        raster,
        terrain,
        background,
        scene,
        stats,
    })
}

/// Build the model and write it as COLLADA.
pub fn render_collada(
    traversal: &Traversal,
    cfg: &RenderConfig,
    out: impl Write,
) -> Result<RenderStats, RenderError> {
    let model = build_model(traversal, cfg)?;
    let start = Instant::now();
    write_collada(&[&model.terrain, &model.background], &model.scene.camera, out)?;
    let mut stats = model.stats;
    stats.timings.push(("write", start.elapsed()));
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvedef::builtin;

    fn trav(name: &str) -> Traversal {
        Traversal::new(&builtin(name).unwrap()).unwrap()
    }

    #[test]
    fn small_render_is_deterministic() {
        let cfg = RenderConfig {
            grid: 16,
            ..RenderConfig::default()
        };
        let t = trav("polya");
        let mut a = Vec::new();
        let mut b = Vec::new();
        render_collada(&t, &cfg, &mut a).unwrap();
        render_collada(&t, &cfg, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(b"<?xml"));
    }

    #[test]
    fn config_checks() {
        let t = trav("polya");
        for cfg in [
            RenderConfig {
                grid: 4,
                ..RenderConfig::default()
            },
            RenderConfig {
                zoom: Some(Zoom {
                    focus: Focus::Parameter(0.5),
                    zeta: 0.5,
                }),
                ..RenderConfig::default()
            },
        ] {
            assert!(matches!(build_model(&t, &cfg), Err(RenderError::Config(_))));
        }
    }

    #[test]
    fn zoomed_model_starts_at_zero() {
        let cfg = RenderConfig {
            grid: 24,
            zoom: Some(Zoom {
                focus: Focus::Parameter(2.0 / 7.0),
                zeta: 2.0,
            }),
            ..RenderConfig::default()
        };
        let m = build_model(&trav("gosper"), &cfg).unwrap();
        assert_eq!(m.raster.elevation_range().0, 0.0);
    }
}
