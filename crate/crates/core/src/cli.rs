//! The `pftrail` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::colour::Colormap;
use crate::curvedef::{builtin, parse_definition, segment_transforms, validate, CurveDefinition, ItemTransform};
use crate::geom::Vec2;
use crate::hexraster::MergePolicy;
use crate::imaging::{progression_image, write_ppm, ImageError};
use crate::render::{
    build_model, CameraSpec, Focus, ParapetSpec, RenderConfig, RenderError, Style, Zoom,
};
use crate::meshgen::write_collada;
use crate::traversal::{Traversal, TraversalError};

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "PFTRAIL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "pftrail", version, about = "Plane-filling trails: terrain models and progression images of plane-filling curves")]
struct Cli {
    /// Worker threads [default: $PFTRAIL_THREADS, else all cores]
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a COLLADA terrain model of the curve
    Render(RenderArgs),
    /// Write a progression image (binary PPM)
    Image(ImageArgs),
    /// Print generators, weights, expansion radius and validation findings
    Info(InputArgs),
    /// Print the smallest parameter whose image lies near a point
    Invert(InvertArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Curve definition file (.pfc)
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    input: Option<PathBuf>,
    /// Use a catalogued curve instead of a file
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StyleArg {
    Normal,
    Eroded,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolicyArg {
    Max,
    Min,
    First,
    Last,
}

impl From<PolicyArg> for MergePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Max => MergePolicy::Max,
            PolicyArg::Min => MergePolicy::Min,
            PolicyArg::First => MergePolicy::First,
            PolicyArg::Last => MergePolicy::Last,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Gray,
    Rainbow,
    Hypsometric,
}

impl From<SchemeArg> for Colormap {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Gray => Colormap::Gray,
            SchemeArg::Rainbow => Colormap::Rainbow,
            SchemeArg::Hypsometric => Colormap::Hypsometric,
        }
    }
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output file, `-` for standard output
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    /// Hex cells across the model width (at least 8)
    #[arg(long, default_value_t = 128)]
    grid: usize,
    /// Elevation of t = 1 [default: half the model width]
    #[arg(long)]
    height: Option<f64>,
    /// Which parameter of a cell visit sets its elevation
    #[arg(long, value_enum, default_value = "max")]
    policy: PolicyArg,
    /// Parameter gap separating two visits of a cell [default: 10 x cell area / bounding-box area]
    #[arg(long)]
    tau: Option<f64>,
    /// Add parapets along the top of high cliffs
    #[arg(long)]
    parapets: bool,
    /// Parapet height in cell edges
    #[arg(long, default_value_t = 1.5)]
    parapet_height: f64,
    /// Parapet thickness in cell edges
    #[arg(long, default_value_t = 0.25)]
    parapet_thickness: f64,
    /// Drop (in cell edges) that counts as a cliff
    #[arg(long, default_value_t = 20.0)]
    parapet_trigger: f64,
    /// Terrain style
    #[arg(long, value_enum, default_value = "normal")]
    style: StyleArg,
    /// Largest slope left by the eroded style
    #[arg(long, default_value_t = 1.0)]
    slope: f64,
    /// Erosion rounds, 0 to run until nothing changes
    #[arg(long, default_value_t = 0)]
    erode_iterations: usize,
    /// Colour scheme
    #[arg(long, value_enum, default_value = "rainbow")]
    colormap: SchemeArg,
    /// Camera azimuth in degrees, counter-clockwise from +x
    #[arg(long, default_value_t = 210.0, allow_negative_numbers = true)]
    azimuth: f64,
    /// Camera elevation in degrees
    #[arg(long, default_value_t = 35.0)]
    elevation: f64,
    /// Camera distance [default: 2.2 x bounding-box diagonal]
    #[arg(long)]
    distance: Option<f64>,
    /// Vertical field of view in degrees
    #[arg(long, default_value_t = 50.0)]
    fov: f64,
    /// Leave out the background planes and cliff
    #[arg(long)]
    no_background: bool,
    /// Leave out bridge slabs
    #[arg(long)]
    no_bridges: bool,
    /// Oversampling factor (at least 1)
    #[arg(long, default_value_t = 1)]
    oversample: u32,
    /// Close-up around f(t) with exponent ZETA [default: none]
    #[arg(long, value_name = "T,ZETA", conflicts_with = "focus")]
    zoom: Option<String>,
    /// Close-up around the plan point (X, Y) with exponent ZETA [default: none]
    #[arg(long, value_name = "X,Y,ZETA", allow_hyphen_values = true)]
    focus: Option<String>,
    /// Also write the cell layers as text, one line per layer
    #[arg(long, value_name = "PATH")]
    dump_cells: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ImageArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output file, `-` for standard output
    #[arg(short, long, default_value = "-")]
    output: PathBuf,
    /// Image size in pixels
    #[arg(long, value_name = "WxH", default_value = "256x256")]
    size: String,
    /// Colour scheme
    #[arg(long, value_enum, default_value = "rainbow")]
    scheme: SchemeArg,
    /// Which visit colours a pixel
    #[arg(long, value_enum, default_value = "last")]
    policy: PolicyArg,
}

#[derive(Debug, Args)]
struct InvertArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Query point
    #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
    point: String,
    /// Distance tolerance
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
}

/// Error with its process exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Validation(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Output(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Validation(m) | CliError::Output(m) => m,
        }
    }
}

impl From<TraversalError> for CliError {
    fn from(e: TraversalError) -> Self {
        match e {
            TraversalError::Definition(_) | TraversalError::DegenerateRestriction => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Config(m) => CliError::Usage(m),
            RenderError::Traversal(t) => t.into(),
            RenderError::Raster(r) => CliError::Usage(r.to_string()),
            RenderError::Io(e) => CliError::Output(format!("cannot write output: {e}")),
        }
    }
}

/// Parse arguments, run the command and return the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pftrail: {}", e.message());
            e.exit_code()
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a thread count, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("thread count must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Render(a) => run_render(a),
        Command::Image(a) => run_image(a),
        Command::Info(a) => run_info(a),
        Command::Invert(a) => run_invert(a),
    })
}

fn load(input: &InputArgs) -> Result<CurveDefinition, CliError> {
    if let Some(name) = &input.builtin {
        return builtin(name).map_err(|e| CliError::Parse(e.to_string()));
    }
    let path = input.input.as_ref().expect("clap requires an input");
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_definition(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn compile(def: &CurveDefinition) -> Result<Traversal, CliError> {
    let report = validate(def);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(Traversal::new(def)?)
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("{what} expects {n} comma-separated numbers, got `{s}`"))),
    }
}

/// Write through a buffered file, or standard output for `-`.
fn with_output<F>(path: &Path, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    let fail = |e: io::Error| CliError::Output(format!("cannot write {}: {e}", path.display()));
    if path.as_os_str() == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        f(&mut lock)?;
        lock.flush().map_err(fail)
    } else {
        let file = File::create(path).map_err(fail)?;
        let mut w = io::BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(fail)
    }
}

fn run_render(a: RenderArgs) -> Result<(), CliError> {
    let def = load(&a.input)?;
    let traversal = compile(&def)?;
    let zoom = match (&a.zoom, &a.focus) {
        (Some(z), _) => {
            let v = numbers(z, 2, "--zoom")?;
            Some(Zoom {
                focus: Focus::Parameter(v[0]),
                zeta: v[1],
            })
        }
        (None, Some(f)) => {
            let v = numbers(f, 3, "--focus")?;
            Some(Zoom {
                focus: Focus::Point(Vec2::new(v[0], v[1])),
                zeta: v[2],
            })
        }
        (None, None) => None,
    };
    let cfg = RenderConfig {
        grid: a.grid,
        height_scale: a.height,
        policy: a.policy.into(),
        gap_threshold: a.tau,
        parapet: ParapetSpec {
            enabled: a.parapets,
            height: a.parapet_height,
            thickness: a.parapet_thickness,
            trigger: a.parapet_trigger,
        },
        style: match a.style {
            StyleArg::Normal => Style::Normal,
            StyleArg::Eroded => Style::Eroded,
        },
        slope_limit: a.slope,
        erode_iterations: a.erode_iterations,
        colormap: a.colormap.into(),
        camera: CameraSpec {
            azimuth: a.azimuth,
            elevation: a.elevation,
            distance: a.distance,
            fov: a.fov,
        },
        background: !a.no_background,
        bridges: !a.no_bridges,
        oversample: a.oversample,
        zoom,
    };
    let model = build_model(&traversal, &cfg)?;
    let start = Instant::now();
    with_output(&a.output, |w| {
        write_collada(&[&model.terrain, &model.background], &model.scene.camera, w)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", a.output.display())))
    })?;
    if let Some(path) = &a.dump_cells {
        let fail = |e: io::Error| CliError::Output(format!("cannot write {}: {e}", path.display()));
        let file = File::create(path).map_err(fail)?;
        let mut w = io::BufWriter::new(file);
        model.raster.write_dump(&mut w).map_err(fail)?;
        w.flush().map_err(fail)?;
    }
    let mut stats = model.stats;
    stats.timings.push(("write", start.elapsed()));
    let _ = stats.write_report(io::stderr().lock());
    Ok(())
}

fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--size expects WxH with positive integers, got `{s}`"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn run_image(a: ImageArgs) -> Result<(), CliError> {
    let (w, h) = parse_size(&a.size)?;
    let def = load(&a.input)?;
    let traversal = compile(&def)?;
    let img = progression_image(&traversal, w, h, a.scheme.into(), a.policy.into()).map_err(|e| match e {
        ImageError::Traversal(t) => t.into(),
        other => CliError::Usage(other.to_string()),
    })?;
    with_output(&a.output, |out| {
        write_ppm(&img, out).map_err(|e| CliError::Output(format!("cannot write {}: {e}", a.output.display())))
    })
}

fn run_info(a: InputArgs) -> Result<(), CliError> {
    let def = load(&a)?;
    let report = validate(&def);
    let mut out = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(out, "curve {}", def.name);
    let _ = writeln!(out, "start {}", def.start);
    if let Some((t0, t1)) = def.restriction {
        let _ = writeln!(out, "restrict {t0} {t1}");
    }
    for g in def.generators.values() {
        let _ = writeln!(
            out,
            "generator {} basis {}: {} segments, {} jumps",
            g.id,
            g.basis.keyword(),
            g.segment_count(),
            g.items.len() - g.segment_count()
        );
        match segment_transforms(g, &def) {
            Ok(items) => {
                let mut sum = 0.0;
                for (i, item) in items.iter().enumerate() {
                    match item {
                        ItemTransform::Segment {
                            similarity,
                            weight,
                            reversed,
                            target,
                        } => {
                            sum += weight;
                            let flags = format!(
                                "{}{}",
                                if *reversed { "R" } else { "" },
                                if similarity.mirrored { "F" } else { "" }
                            );
                            let _ = writeln!(
                                out,
                                "  {i:>3} seg   scale {:.6}  rotation {:>9.3}°  weight {:.6}  flags {:<2}  -> {target}",
                                similarity.scale(),
                                similarity.rotation().to_degrees(),
                                weight,
                                if flags.is_empty() { "-" } else { &flags },
                            );
                        }
                        ItemTransform::Jump { from, to } => {
                            let _ = writeln!(out, "  {i:>3} jump  {from} -> {to}");
                        }
                    }
                }
                let _ = writeln!(out, "  sum of weights {sum:.15}");
            }
            Err(e) => {
                let _ = writeln!(out, "  {e}");
            }
        }
    }
    if report.is_ok() {
        let t = Traversal::new(&def)?;
        let r = t.expansion_radius();
        let _ = writeln!(out, "expansion radius R = {:.6} (depth {})", r.radius, r.depth_used);
    }
    if report.errors.is_empty() && report.warnings.is_empty() {
        out.push_str("validation: ok\n");
    } else {
        let _ = write!(out, "{report}");
    }
    print!("{out}");
    if !report.is_ok() {
        return Err(CliError::Validation("definition is invalid".into()));
    }
    Ok(())
}

fn run_invert(a: InvertArgs) -> Result<(), CliError> {
    let v = numbers(&a.point, 2, "--point")?;
    if !(a.eps > 0.0) {
        return Err(CliError::Usage(format!("--eps must be positive, got {}", a.eps)));
    }
    let def = load(&a.input)?;
    let traversal = compile(&def)?;
    let r = traversal.expansion_radius().radius;
    match traversal.inverse_at(Vec2::new(v[0], v[1]), a.eps, r) {
        Some(t) => println!("{t:.17}"),
        None => println!("not on curve"),
    }
    Ok(())
}
