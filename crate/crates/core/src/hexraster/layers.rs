use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use super::{Cell, HexGrid, RasterError};
use crate::geom::Bounds;
use crate::traversal::SamplePoint;

/// Which parameter of a cluster sets the elevation of its layer.
///
/// Samples of a cluster arrive in parameter order, so `First` and `Min`
/// (and `Last` and `Max`) pick the same sample; both spellings are kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MergePolicy {
    #[default]
    Max,
    Min,
    First,
    Last,
}

impl MergePolicy {
    pub fn keyword(self) -> &'static str {
        match self {
            MergePolicy::Max => "max",
            MergePolicy::Min => "min",
            MergePolicy::First => "first",
            MergePolicy::Last => "last",
        }
    }

    /// Pick from a cluster's parameter range.
    pub fn select(self, t_lo: f64, t_hi: f64) -> f64 {
        match self {
            MergePolicy::Max | MergePolicy::Last => t_hi,
            MergePolicy::Min | MergePolicy::First => t_lo,
        }
    }
}

impl FromStr for MergePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(MergePolicy::Max),
            "min" => Ok(MergePolicy::Min),
            "first" => Ok(MergePolicy::First),
            "last" => Ok(MergePolicy::Last),
            _ => Err(format!("unknown merge policy `{s}` (expected max, min, first or last)")),
        }
    }
}

impl fmt::Display for MergePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerKind {
    Ground,
    Bridge,
}

impl LayerKind {
    pub fn keyword(self) -> &'static str {
        match self {
            LayerKind::Ground => "ground",
            LayerKind::Bridge => "bridge",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub t_lo: f64,
    pub t_hi: f64,
    pub top: f64,
    pub kind: LayerKind,
    /// Indexed by neighbour direction.
    pub cliff_flags: [bool; 6],
    /// Number of samples in the cluster.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellColumn {
    pub cell: Cell,
    pub layers: Vec<Layer>,
}

impl CellColumn {
    pub fn ground(&self) -> Option<&Layer> {
        self.layers.first().filter(|l| l.kind == LayerKind::Ground)
    }

    pub fn ground_top(&self) -> Option<f64> {
        self.ground().map(|l| l.top)
    }

    pub fn bridges(&self) -> impl Iterator<Item = &Layer> {
        self.layers.iter().filter(|l| l.kind == LayerKind::Bridge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterOptions {
    /// Parameter gap that separates two visits of the same cell.
    pub gap_threshold: f64,
    pub policy: MergePolicy,
    /// Elevation per unit of parameter.
    pub height_scale: f64,
}

/// Ten times the parameter measure of one cell of an area-filling curve
/// whose image has the given bounding box.
pub fn default_gap_threshold(grid: &HexGrid, bounds: Bounds) -> f64 {
    let area = bounds.area().max(grid.cell_area());
    10.0 * grid.cell_area() / area
}

#[derive(Clone, Copy, Debug)]
struct OpenLayer {
    t_lo: f64,
    t_hi: f64,
    count: usize,
    all_on_jump: bool,
}

/// Incremental rasterizer for a stream that arrives in parameter order.
#[derive(Debug)]
pub struct Rasterizer {
    grid: HexGrid,
    options: RasterOptions,
    open: HashMap<Cell, Vec<OpenLayer>>,
    last: Option<(f64, u32)>,
    count: usize,
}

impl Rasterizer {
    pub fn new(grid: HexGrid, options: RasterOptions) -> Result<Self, RasterError> {
        if !(options.gap_threshold > 0.0) {
            return Err(RasterError::BadGapThreshold(options.gap_threshold));
        }
        Ok(Rasterizer {
            grid,
            options,
            open: HashMap::new(),
            last: None,
            count: 0,
        })
    }

    pub fn push(&mut self, s: SamplePoint) -> Result<(), RasterError> {
        let key = s.order_key();
        if let Some(last) = self.last {
            if key.0 < last.0 || (key.0 == last.0 && key.1 <= last.1) {
                return Err(RasterError::OutOfOrder);
            }
        }
        self.last = Some(key);
        self.count += 1;
        let cell = self.grid.world_to_cell(s.position);
        let stack = self.open.entry(cell).or_default();
        match stack.last_mut() {
            Some(layer) if s.t - layer.t_hi <= self.options.gap_threshold => {
                layer.t_hi = s.t;
                layer.count += 1;
                layer.all_on_jump &= s.on_jump;
            }
            _ => stack.push(OpenLayer {
                t_lo: s.t,
                t_hi: s.t,
                count: 1,
                all_on_jump: s.on_jump,
            }),
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> Result<Raster, RasterError> {
        if self.count == 0 {
            return Err(RasterError::Empty);
        }
        let RasterOptions {
            policy, height_scale, ..
        } = self.options;
        let columns = self
            .open
            .into_iter()
            .map(|(cell, stack)| {
                let layers = stack
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| Layer {
                        t_lo: l.t_lo,
                        t_hi: l.t_hi,
                        top: height_scale * policy.select(l.t_lo, l.t_hi),
                        kind: if i == 0 && !l.all_on_jump {
                            LayerKind::Ground
                        } else {
                            LayerKind::Bridge
                        },
                        cliff_flags: [false; 6],
                        count: l.count,
                    })
                    .collect();
                (cell, CellColumn { cell, layers })
            })
            .collect();
        Ok(Raster {
            grid: self.grid,
            columns,
            sample_count: self.count,
        })
    }
}

/// Columns of a rasterized sample stream, keyed by cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    grid: HexGrid,
    columns: BTreeMap<Cell, CellColumn>,
    sample_count: usize,
}

impl Raster {
    pub fn grid(&self) -> &HexGrid {
        &self.grid
    }

    pub fn columns(&self) -> impl Iterator<Item = &CellColumn> {
        self.columns.values()
    }

    pub fn get(&self, cell: Cell) -> Option<&CellColumn> {
        self.columns.get(&cell)
    }

    pub fn ground_top(&self, cell: Cell) -> Option<f64> {
        self.get(cell).and_then(CellColumn::ground_top)
    }

    pub fn cell_count(&self) -> usize {
        self.columns.len()
    }

    pub fn layer_count(&self) -> usize {
        self.columns.values().map(|c| c.layers.len()).sum()
    }

    pub fn bridge_count(&self) -> usize {
        self.columns.values().map(|c| c.bridges().count()).sum()
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Lowest and highest layer top.
    pub fn elevation_range(&self) -> (f64, f64) {
        self.columns
            .values()
            .flat_map(|c| c.layers.iter())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), l| {
                (lo.min(l.top), hi.max(l.top))
            })
    }

    /// Add `dz` to every layer top.
    pub fn shift_elevation(&mut self, dz: f64) {
        for l in self.columns.values_mut().flat_map(|c| c.layers.iter_mut()) {
            l.top += dz;
        }
    }

    /// One line `q r layer_index t_lo t_hi top kind` per layer, sorted by
    /// cell and layer index.
    pub fn write_dump(&self, mut out: impl Write) -> io::Result<()> {
        for col in self.columns.values() {
            for (i, l) in col.layers.iter().enumerate() {
                writeln!(
                    out,
                    "{} {} {} {:.9} {:.9} {:.9} {}",
                    col.cell.q,
                    col.cell.r,
                    i,
                    l.t_lo,
                    l.t_hi,
                    l.top,
                    l.kind.keyword()
                )?;
            }
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        let mut buf = Vec::new();
        self.write_dump(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("dump is ASCII")
    }

    fn ground_tops(&self) -> HashMap<Cell, f64> {
        self.columns
            .iter()
            .filter_map(|(c, col)| col.ground_top().map(|t| (*c, t)))
            .collect()
    }
}

/// Rasterize samples given in any order; they are sorted by `(t, tie)`
/// first, so the result does not depend on arrival order.
pub fn rasterize(
    samples: impl IntoIterator<Item = SamplePoint>,
    grid: HexGrid,
    options: RasterOptions,
) -> Result<Raster, RasterError> {
    let mut samples: Vec<SamplePoint> = samples.into_iter().collect();
    samples.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.tie.cmp(&b.tie)));
    let mut r = Rasterizer::new(grid, options)?;
    for s in samples {
        r.push(s)?;
    }
    r.finish()
}

/// Flag every edge of a ground layer whose neighbour has no ground or a
/// ground top lower by more than `threshold`.
pub fn mark_cliffs(raster: &mut Raster, threshold: f64) {
    let tops = raster.ground_tops();
    for (cell, col) in raster.columns.iter_mut() {
        let Some(ground) = col.layers.first_mut().filter(|l| l.kind == LayerKind::Ground) else {
            continue;
        };
        for (d, n) in cell.neighbours() {
            ground.cliff_flags[d] = match tops.get(&n) {
                None => true,
                Some(&t) => ground.top - t > threshold,
            };
        }
    }
}

/// Limit ground slopes: each ground top is lowered to at most
/// `neighbour top + slope_limit·1.5·e`. Runs `iterations` rounds, or until
/// nothing changes when `iterations` is 0. Returns the rounds run.
pub fn erode(raster: &mut Raster, slope_limit: f64, iterations: usize) -> usize {
    let step = slope_limit * 1.5 * raster.grid.edge();
    let mut rounds = 0;
    loop {
        if iterations > 0 && rounds == iterations {
            break;
        }
        let tops = raster.ground_tops();
        let mut changed = false;
        for (cell, col) in raster.columns.iter_mut() {
            let Some(ground) = col.layers.first_mut().filter(|l| l.kind == LayerKind::Ground) else {
                continue;
            };
            let limit = cell
                .neighbours()
                .filter_map(|(_, n)| tops.get(&n))
                .map(|t| t + step)
                .fold(f64::INFINITY, f64::min);
            if limit < ground.top {
                ground.top = limit;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        rounds += 1;
    }
    rounds
}
