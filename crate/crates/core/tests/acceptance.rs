//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.
//!
//!     cargo test -p pftrail --test acceptance

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use pftrail::colour::Colormap;
use pftrail::curvedef::{inner_flip, BUILTIN_NAMES};
use pftrail::hexraster::{Cell, HexGrid, MergePolicy};
use pftrail::imaging::{curve_bounds, progression_image, progression_values, write_ppm};
use pftrail::meshgen::Mesh;
use pftrail::render::{build_model, render_collada, RenderConfig};
use pftrail::traversal::{CloseUp, TrailPoint};
use pftrail::{builtin, Traversal, Vec2};

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn traversal(name: &str) -> Traversal {
    Traversal::new(&builtin(name).unwrap()).unwrap()
}

// 1 -------------------------------------------------------------------------

/// Separating-axis test: do two convex polygons overlap with positive area?
fn overlap(a: &[Vec2], b: &[Vec2], tol: f64) -> bool {
    for poly in [a, b] {
        for i in 0..poly.len() {
            let e = poly[(i + 1) % poly.len()] - poly[i];
            let axis = Vec2::new(-e.y, e.x);
            let proj = |p: &[Vec2]| {
                p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let d = v.dot(axis);
                    (lo.min(d), hi.max(d))
                })
            };
            let (a_lo, a_hi) = proj(a);
            let (b_lo, b_hi) = proj(b);
            if a_hi <= b_lo + tol * axis.norm() || b_hi <= a_lo + tol * axis.norm() {
                return false;
            }
        }
    }
    true
}

fn sampling_density() -> Result<String, String> {
    let start = Instant::now();
    let t = traversal("polya");
    let radius = t.expansion_radius().radius;
    let bounds = curve_bounds(&t, radius).unwrap();
    let triangle = [Vec2::ZERO, Vec2::ONE, Vec2::new(0.5, 0.5)];
    let mut summary = Vec::new();
    for n in [32, 64, 128] {
        let edge = bounds.width() / (1.5 * n as f64);
        let grid = HexGrid::covering(bounds, edge).unwrap();
        let occupied: HashSet<Cell> = t
            .sample(edge / (2.0 * radius), 1)
            .unwrap()
            .iter()
            .map(|s| grid.world_to_cell(s.position))
            .collect();
        let ext = grid.extent().unwrap();
        let (mut inside, mut partial, mut violations) = (0, 0, 0);
        for q in ext.q_min..=ext.q_max {
            for r in ext.r_min..=ext.r_max {
                let c = Cell::new(q, r);
                let hex: Vec<Vec2> = (0..6).map(|k| grid.corner(c, k)).collect();
                if grid.cell_inside_convex(c, &triangle) {
                    inside += 1;
                    if !occupied.contains(&c) {
                        violations += 1;
                    }
                } else if overlap(&hex, &triangle, 1e-12 * edge) {
                    partial += 1;
                    if !occupied.contains(&c) && !c.neighbours().any(|(_, m)| occupied.contains(&m)) {
                        violations += 1;
                    }
                }
            }
        }
        ensure(violations == 0, || format!("N={n}: {violations} violations"))?;
        ensure(inside > 0 && partial > 0, || format!("N={n}: no cells classified"))?;
        summary.push(format!("N={n}: {inside} inside, {partial} partial"));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{}; 0 violations in {secs:.2} s", summary.join(", ")))
}

// 2 -------------------------------------------------------------------------

fn radius_soundness() -> Result<String, String> {
    const POINTS: usize = 1_000_000;
    let mut lines = Vec::new();
    for name in BUILTIN_NAMES {
        let t = traversal(name);
        let (a, b) = (t.point_at(0.0).unwrap(), t.point_at(1.0).unwrap());
        let oracle = (0..POINTS)
            .into_par_iter()
            .map(|i| {
                let p = t.point_at(i as f64 / (POINTS - 1) as f64).unwrap();
                p.dist(a).min(p.dist(b)) / a.dist(b)
            })
            .reduce(|| 0.0, f64::max);
        let r = t.expansion_radius().radius;
        ensure(oracle <= r && r <= 5.0 * oracle, || {
            format!("{name}: oracle {oracle:.6}, R {r:.6}")
        })?;
        if name == "polya" {
            let want = std::f64::consts::FRAC_1_SQRT_2;
            ensure((oracle - want).abs() <= 0.01, || format!("polya oracle {oracle:.6}"))?;
        }
        lines.push(format!("{name} {oracle:.4}<={r:.4}"));
    }
    Ok(lines.join(", "))
}

// 3 -------------------------------------------------------------------------

/// Position along the Hilbert order of cell `(x, y)` in an `n × n` grid
/// whose curve enters at the lower-left and leaves at the lower-right
/// corner.
fn hilbert_index(x: u32, y: u32, n: u32) -> u32 {
    if n == 1 {
        return 0;
    }
    let h = n / 2;
    let q = h * h;
    match (x < h, y < h) {
        (true, true) => hilbert_index(y, x, h),
        (true, false) => q + hilbert_index(x, y - h, h),
        (false, false) => 2 * q + hilbert_index(x - h, y - h, h),
        (false, true) => 3 * q + hilbert_index(h - 1 - y, 2 * h - 1 - x, h),
    }
}

fn hilbert_order() -> Result<String, String> {
    const N: u32 = 8;
    let t = traversal("hilbert");
    let mut first: HashMap<(u32, u32), f64> = HashMap::new();
    for s in t.sample(1e-3, 1).unwrap() {
        let (u, v) = (s.position.x * N as f64, s.position.y * N as f64);
        ensure((0.0..=N as f64).contains(&u) && (0.0..=N as f64).contains(&v), || {
            format!("sample {} outside the unit square", s.position)
        })?;
        // Ignore points on cell borders; they belong to two cells at once.
        let off = |w: f64| (w - w.round()).abs() < 1e-9;
        if off(u) || off(v) {
            continue;
        }
        first.entry((u as u32, v as u32)).or_insert(s.t);
    }
    ensure(first.len() == (N * N) as usize, || format!("{} cells visited", first.len()))?;
    let mut by_t: Vec<((u32, u32), f64)> = first.into_iter().collect();
    by_t.sort_by(|a, b| a.1.total_cmp(&b.1));
    let matches = by_t
        .iter()
        .enumerate()
        .filter(|(i, ((x, y), _))| hilbert_index(*x, *y, N) == *i as u32)
        .count();
    ensure(matches == 64, || format!("{matches}/64 cells in oracle order"))?;
    Ok("64/64 cells in oracle order".into())
}

// 4 -------------------------------------------------------------------------

fn trapezoid_equivalence() -> Result<String, String> {
    let trap = traversal("trapezoid");
    let polya = traversal("polya");
    let a = polya.point_at(0.0).unwrap();
    let b = polya.point_at(0.75).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let s = i as f64 / 9_999.0;
        let want = (polya.point_at(0.75 * s).unwrap() - a).cdiv(b - a);
        worst = worst.max(trap.point_at(s).unwrap().dist(want));
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} over 10^4 parameters"))
}

// 5 -------------------------------------------------------------------------

fn closeup_transform() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(5);
    let focus = TrailPoint {
        position: Vec2::new(0.3, 0.2),
        t: 0.4,
    };
    let view = CloseUp::new(focus, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = TrailPoint {
            position: Vec2::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            t: rng.gen_range(0.0..1.0),
        };
        let m = view.apply(p);
        worst = worst
            .max((m.position + focus.position).dist(p.position))
            .max((m.t + focus.t - p.t).abs());
    }
    ensure(worst <= 1e-12, || format!("zeta=1 deviation {worst:e}"))?;
    let exponent = CloseUp::new(focus, 2.0).unwrap().t_exponent();
    ensure(exponent == 0.4, || format!("t-exponent at zeta=2 is {exponent}"))?;
    Ok(format!("zeta=1 deviation {worst:.1e}; exponent at zeta=2 = {exponent}"))
}

// 6 -------------------------------------------------------------------------

fn gosper_constant() -> Result<String, String> {
    let m = builtin("gosper")
        .unwrap()
        .spiral_magnification()
        .map_err(|e| e.to_string())?
        .ok_or("no spiral")?;
    ensure((8.5e7..=9.6e7).contains(&m), || format!("magnification {m:.4e}"))?;
    Ok(format!("magnification per turn {m:.4e}"))
}

// 7 -------------------------------------------------------------------------

fn inner_flip_involution() -> Result<String, String> {
    for name in BUILTIN_NAMES {
        let def = builtin(name).unwrap();
        ensure(inner_flip(&inner_flip(&def)) == def, || format!("{name}: not an involution"))?;
    }
    let flipped = inner_flip(&builtin("gosper").unwrap());
    ensure(builtin("gosper-innerflip").unwrap().structurally_eq(&flipped), || {
        "gosper-innerflip differs from the flipped gosper".into()
    })?;
    Ok("involution on all builtins; gosper-innerflip matches".into())
}

// 8 -------------------------------------------------------------------------

fn mesh_sound(mesh: &Mesh, what: &str) -> Result<(), String> {
    let n = mesh.vertices.len();
    ensure(mesh.colours.len() == n, || format!("{what}: colour count"))?;
    for (i, tri) in mesh.triangles.iter().enumerate() {
        ensure(tri.iter().all(|&v| (v as usize) < n), || format!("{what}: index out of range"))?;
        let len = mesh.face_normal(i).iter().map(|c| c * c).sum::<f64>().sqrt();
        ensure((len - 1.0).abs() <= 1e-6, || format!("{what}: normal length {len}"))?;
    }
    ensure(mesh.vertices.iter().flatten().all(|c| c.is_finite()), || format!("{what}: NaN"))
}

/// Every edge, identified by quantized end-point positions, must be used by
/// exactly two triangles.
fn edge_manifold(mesh: &Mesh, quantum: f64) -> Result<usize, String> {
    let key = |v: u32| mesh.vertices[v as usize].map(|c| (c / quantum).round() as i64);
    let mut uses: HashMap<([i64; 3], [i64; 3]), u32> = HashMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (key(tri[k]), key(tri[(k + 1) % 3]));
            *uses.entry(if a < b { (a, b) } else { (b, a) }).or_default() += 1;
        }
    }
    let bad = uses.values().filter(|&&u| u != 2).count();
    ensure(bad == 0, || format!("{bad} of {} edges not shared by exactly 2 triangles", uses.len()))?;
    Ok(uses.len())
}

fn mesh_validity() -> Result<String, String> {
    let t = traversal("hilbert");
    let cfg = RenderConfig {
        grid: 64,
        ..RenderConfig::default()
    };
    let model = build_model(&t, &cfg).map_err(|e| e.to_string())?;
    mesh_sound(&model.terrain, "terrain")?;
    mesh_sound(&model.background, "background")?;

    let bare = RenderConfig {
        bridges: false,
        background: false,
        ..cfg.clone()
    };
    let solid = build_model(&t, &bare).map_err(|e| e.to_string())?;
    let edges = edge_manifold(&solid.terrain, 1e-6 * solid.stats.edge)?;

    let render = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut out = Vec::new();
            render_collada(&t, &cfg, &mut out).unwrap();
            Sha256::digest(&out)
        })
    };
    let reference = render(4);
    for threads in [4, 4, 1] {
        ensure(render(threads) == reference, || format!("output differs with {threads} threads"))?;
    }
    Ok(format!(
        "{} triangles sound; {edges} edges manifold without bridges; COLLADA stable",
        model.terrain.triangles.len() + model.background.triangles.len()
    ))
}

// 9 -------------------------------------------------------------------------

fn inverse_queries() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(9);
    let mut worst = [0.0f64; 2];
    for name in BUILTIN_NAMES {
        let t = traversal(name);
        let radius = t.expansion_radius().radius;
        for _ in 0..100 {
            let s: f64 = rng.gen_range(0.0..=1.0);
            let q = t.point_at(s).unwrap();
            for (k, eps) in [1e-9, 1e-6].into_iter().enumerate() {
                let u = t
                    .inverse_at(q, eps, radius)
                    .ok_or_else(|| format!("{name}: no preimage for t={s} at eps {eps:e}"))?;
                ensure(u <= s + 1e-9, || format!("{name}: inverse {u} > t {s}"))?;
                let d = t.point_at(u).unwrap().dist(q);
                worst[k] = worst[k].max(d);
                ensure(d <= eps, || format!("{name}: image of {u} is {d:e} from the query"))?;
            }
        }
    }
    Ok(format!(
        "700 queries; worst image distance {:.1e} at eps 1e-9, {:.1e} at eps 1e-6",
        worst[0], worst[1]
    ))
}

// 10 ------------------------------------------------------------------------

fn children_peak_rss_bytes() -> u64 {
    let mut usage = std::mem::MaybeUninit::<libc::rusage>::zeroed();
    // SAFETY: getrusage only writes into the provided struct.
    let usage = unsafe {
        libc::getrusage(libc::RUSAGE_CHILDREN, usage.as_mut_ptr());
        usage.assume_init()
    };
    usage.ru_maxrss as u64 * 1024
}

fn desk_scale_render() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("hilbert500.dae");
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_pftrail"))
        .args(["render", "--builtin", "hilbert", "--grid", "500", "-o"])
        .arg(&out)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let peak = children_peak_rss_bytes();
    ensure(status.success(), || format!("render exited with {status}"))?;
    let size = std::fs::metadata(&out).map_err(|e| e.to_string())?.len();
    ensure(size > 0, || "empty output".into())?;
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    ensure(peak < 1 << 30, || format!("peak memory {} MB", peak >> 20))?;
    Ok(format!("{secs:.1} s, peak {} MB, {} MB written", peak >> 20, size >> 20))
}

// 11 ------------------------------------------------------------------------

fn progression_golden() -> Result<String, String> {
    let t = traversal("polya");
    let img = progression_image(&t, 256, 256, Colormap::Gray, MergePolicy::Last).map_err(|e| e.to_string())?;
    let (_, values) = progression_values(&t, 256, 256, MergePolicy::Last).map_err(|e| e.to_string())?;
    for (i, v) in values.iter().enumerate() {
        let want = v.map_or(0, |t| (255.0 * t).round() as u8);
        let got = img.get(i % 256, i / 256);
        ensure(got == [want; 3], || format!("pixel {i}: {got:?}, expected {want}"))?;
    }
    let mut ppm = Vec::new();
    write_ppm(&img, &mut ppm).unwrap();
    let digest: String = Sha256::digest(&ppm).iter().map(|b| format!("{b:02x}")).collect();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/polya_256_gray.sha256");
    match std::fs::read_to_string(&golden) {
        Ok(stored) => {
            ensure(stored.trim() == digest, || format!("digest {digest} != golden {}", stored.trim()))?;
            Ok(format!("matches golden {}", &digest[..16]))
        }
        Err(_) => {
            std::fs::write(&golden, format!("{digest}\n")).map_err(|e| e.to_string())?;
            Ok(format!("golden recorded {}", &digest[..16]))
        }
    }
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("sampling density on hex grids", sampling_density),
        ("expansion radius sound and tight", radius_soundness),
        ("hilbert first-visit order", hilbert_order),
        ("trapezoid equals restricted polya", trapezoid_equivalence),
        ("close-up transform", closeup_transform),
        ("gosper spiral constant", gosper_constant),
        ("inner flip", inner_flip_involution),
        ("mesh validity and determinism", mesh_validity),
        ("inverse queries", inverse_queries),
        ("desk-scale render", desk_scale_render),
        ("progression image", progression_golden),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
