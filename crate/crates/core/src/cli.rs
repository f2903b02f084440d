//! Command-line front end. `main` only forwards to [`main_with_args`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::geodesic;
use crate::io;
use crate::mesh::{Point3, TriMesh};
use crate::metric::{EuclideanPoints, MetricPointSet, PoseSet, Se3Metric, WitnessParams, WitnessSpace};
use crate::par::{self, Execution};
use crate::pipeline::{self, Mode, MotionOptions, Options, ReconstructionResult};
use crate::sampling::{self, DiscreteCurve, Thresholds};

const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "sigdv", version, about = "Closed-curve reconstruction from sparse samples")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Run every stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct curves through mesh vertices or planar points.
    Reconstruct(ReconstructArgs),
    /// Reconstruct one closed curve per SIGDV component.
    ReconstructMulti(ReconstructArgs),
    /// Reconstruct a closed path of rigid motions.
    ReconstructMotion(MotionArgs),
    /// Subsample a dense curve to meet sampling targets.
    Sample(SampleArgs),
    /// Measure a sampling of a dense curve against the sampling conditions.
    CheckSampling(CheckArgs),
    /// Extract samples near an isovalue of a per-vertex field.
    Isoline(IsolineArgs),
    /// Run the MST-chain baseline.
    Baseline(BaselineArgs),
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got {s:?}")),
    }
}

fn at_least_one(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 1.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a number >= 1, got {s:?}")),
    }
}

#[derive(Debug, Args)]
struct SampleInput {
    /// Triangle mesh (.off or .obj).
    #[arg(long, requires = "samples", conflicts_with = "points")]
    mesh: Option<PathBuf>,
    /// Sample vertex indices, one per line.
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Planar sample points, `x y` per line.
    #[arg(long, required_unless_present = "mesh")]
    points: Option<PathBuf>,
    /// Proceed on meshes that fail manifold validation.
    #[arg(long)]
    allow_non_manifold: bool,
}

#[derive(Debug, Args)]
struct Outputs {
    /// Tour file: one sample index per line, tours separated by blank lines.
    #[arg(long)]
    tours: Option<PathBuf>,
    /// JSON report (printed to stdout when absent).
    #[arg(long)]
    report: Option<PathBuf>,
    /// OBJ file with one polyline per tour.
    #[arg(long)]
    obj: Option<PathBuf>,
    /// Include wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[command(flatten)]
    input: SampleInput,
    /// Bridge all components into a single curve.
    #[arg(long)]
    single: bool,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpaceArg {
    Se3,
    R7,
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Weight of the squared rotation angle.
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    w_rot: f64,
    /// Weight of the squared translation distance.
    #[arg(long, default_value_t = 1.0, value_parser = non_negative)]
    w_tr: f64,
}

#[derive(Debug, Args)]
struct MotionArgs {
    /// Poses, `qw qx qy qz tx ty tz` per line.
    #[arg(long)]
    poses: PathBuf,
    /// Dense pose trace used as witnesses.
    #[arg(long)]
    witnesses: Option<PathBuf>,
    #[command(flatten)]
    metric: MetricArgs,
    /// Interpolation steps per pose pair for generated witnesses.
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    witness_steps: u32,
    /// Nearest poses each pose is interpolated towards.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    witness_neighbors: u32,
    /// Space in which witnesses are matched to samples.
    #[arg(long, value_enum, default_value_t = SpaceArg::Se3)]
    witness_space: SpaceArg,
    /// Relative bisector tolerance for witness adjacency.
    #[arg(long, default_value_t = 0.25, value_parser = positive)]
    bisector_tol: f64,
    /// Seed for witness placement.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    single: bool,
    #[command(flatten)]
    out: Outputs,
}

#[derive(Debug, Args)]
struct CurveInput {
    /// Mesh carrying the curve; without it the curve is planar.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Dense closed curve: vertex indices on a mesh, `x y` points otherwise.
    #[arg(long)]
    curve: PathBuf,
    /// Lower bound on the injectivity radius, clamping feature sizes.
    #[arg(long, value_parser = positive)]
    injectivity_bound: Option<f64>,
    #[arg(long)]
    allow_non_manifold: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    curve: CurveInput,
    #[arg(long, value_parser = positive)]
    rho: f64,
    #[arg(long, value_parser = at_least_one)]
    u: f64,
    /// Selected samples: vertex indices on a mesh, `x y` points otherwise.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    curve: CurveInput,
    /// Samples: vertex indices on a mesh; curve point indices or `x y` points otherwise.
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, value_parser = positive)]
    rho: Option<f64>,
    #[arg(long, value_parser = at_least_one)]
    u: Option<f64>,
    #[arg(long, value_parser = positive)]
    theta: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IsolineArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Scalar field, one value per vertex line.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    value: f64,
    #[arg(long, value_parser = positive)]
    tol: f64,
    /// Extracted sample vertex indices.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    single: bool,
    #[arg(long)]
    allow_non_manifold: bool,
    #[command(flatten)]
    outputs: Outputs,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[arg(long, conflicts_with_all = ["points", "poses"], requires = "samples")]
    mesh: Option<PathBuf>,
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, conflicts_with = "poses")]
    points: Option<PathBuf>,
    #[arg(long)]
    poses: Option<PathBuf>,
    #[command(flatten)]
    metric: MetricArgs,
    #[arg(long)]
    tours: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match par::with_threads(cli.threads, || run(cli.command, exec)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load_mesh(path: &Path, allow_non_manifold: bool) -> Result<TriMesh> {
    let mesh = TriMesh::load_auto(path)?;
    let report = crate::mesh::validate_manifold(&mesh);
    if !report.is_manifold && !allow_non_manifold {
        return Err(Error::NonManifold(report.defects.len()));
    }
    Ok(mesh)
}

fn emit_report(path: Option<&Path>, report: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report is serialisable") + "\n";
    match path {
        Some(p) => io::write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_base(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m
}

fn add_reconstruction(m: &mut Map<String, Value>, r: &ReconstructionResult, mode: Mode) {
    m.insert("mode".into(), json!(mode));
    m.insert("samples".into(), json!(r.distances.len()));
    m.insert("edges".into(), json!(r.edge_counts()));
    m.insert(
        "tours".into(),
        Value::Array(
            r.tours
                .iter()
                .map(|t| json!({ "samples": t.order.len(), "length": t.length }))
                .collect(),
        ),
    );
    m.insert(
        "bridged_edges".into(),
        Value::Array(r.bridged_edges.iter().map(|e| json!([e.a, e.b])).collect()),
    );
    m.insert("chains".into(), json!(r.chains));
    m.insert("warnings".into(), json!(r.warnings));
}

fn write_outputs(
    out: &Outputs,
    command: &str,
    mode: Mode,
    r: &ReconstructionResult,
    polyline: impl Fn(&crate::tsp::Tour) -> Result<Vec<Point3>>,
    started: Instant,
) -> Result<()> {
    if let Some(p) = &out.tours {
        let orders: Vec<Vec<usize>> = r.tours.iter().map(|t| t.order.clone()).collect();
        io::write_text(p, &io::format_tours(&orders))?;
    }
    if let Some(p) = &out.obj {
        let lines = r.tours.iter().map(&polyline).collect::<Result<Vec<_>>>()?;
        io::write_text(p, &io::polylines_to_obj(&lines))?;
    }
    let mut m = report_base(command);
    add_reconstruction(&mut m, r, mode);
    if out.timing {
        m.insert("timing_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
    }
    emit_report(out.report.as_deref(), &Value::Object(m))
}

fn closed_points(points: impl Iterator<Item = Point3>) -> Vec<Point3> {
    let mut v: Vec<Point3> = points.collect();
    if let Some(&first) = v.first() {
        v.push(first);
    }
    v
}

fn run(command: Command, exec: Execution) -> Result<()> {
    let started = Instant::now();
    match command {
        Command::Reconstruct(a) => run_reconstruct(a, false, exec, started),
        Command::ReconstructMulti(a) => run_reconstruct(a, true, exec, started),
        Command::ReconstructMotion(a) => run_motion(a, exec, started),
        Command::Sample(a) => run_sample(a, exec),
        Command::CheckSampling(a) => run_check(a, exec),
        Command::Isoline(a) => run_isoline(a, exec, started),
        Command::Baseline(a) => run_baseline(a, exec),
    }
}

fn mode_of(single: bool) -> Mode {
    if single {
        Mode::Single
    } else {
        Mode::Multi
    }
}

fn run_reconstruct(a: ReconstructArgs, force_multi: bool, exec: Execution, started: Instant) -> Result<()> {
    let mode = if force_multi { Mode::Multi } else { mode_of(a.single) };
    let command = if force_multi { "reconstruct-multi" } else { "reconstruct" };
    let opts = Options {
        mode,
        allow_non_manifold: a.input.allow_non_manifold,
        exec,
    };
    match (&a.input.mesh, &a.input.points) {
        (Some(mesh_path), _) => {
            let mesh = load_mesh(mesh_path, a.input.allow_non_manifold)?;
            let samples = io::read_indices(a.input.samples.as_deref().expect("clap requires samples"))?;
            let r = pipeline::reconstruct_mesh(&mesh, &samples, &opts)?;
            write_outputs(
                &a.out,
                command,
                mode,
                &r,
                |t| {
                    let path = pipeline::tour_polyline(&mesh, &samples, t)?;
                    Ok(path.iter().map(|&v| mesh.position(v)).collect())
                },
                started,
            )
        }
        (None, Some(points_path)) => {
            let pts = io::read_points2(points_path)?;
            let set = EuclideanPoints::planar(&pts);
            let r = pipeline::reconstruct_points(&set, &opts)?;
            write_outputs(
                &a.out,
                command,
                mode,
                &r,
                |t| Ok(closed_points(t.order.iter().map(|&i| [pts[i][0], pts[i][1], 0.0]))),
                started,
            )
        }
        (None, None) => Err(Error::invalid("either --mesh with --samples, or --points, is required")),
    }
}

fn metric_of(m: &MetricArgs) -> Result<Se3Metric> {
    Se3Metric::new(m.w_rot, m.w_tr)
}

fn run_motion(a: MotionArgs, exec: Execution, started: Instant) -> Result<()> {
    let poses = PoseSet::new(io::read_poses(&a.poses)?, metric_of(&a.metric)?);
    let witnesses = a.witnesses.as_deref().map(io::read_poses).transpose()?;
    let motion = MotionOptions {
        witness: WitnessParams {
            neighbors: a.witness_neighbors as usize,
            steps: a.witness_steps as usize,
            seed: a.seed,
        },
        space: match a.witness_space {
            SpaceArg::Se3 => WitnessSpace::Se3,
            SpaceArg::R7 => WitnessSpace::R7,
        },
        bisector_tolerance: a.bisector_tol,
    };
    let mode = mode_of(a.single);
    let opts = Options {
        mode,
        allow_non_manifold: false,
        exec,
    };
    let r = pipeline::reconstruct_motion(&poses, witnesses.as_deref(), &motion, &opts)?;
    write_outputs(
        &a.out,
        "reconstruct-motion",
        mode,
        &r,
        |t| Ok(closed_points(t.order.iter().map(|&i| poses.poses[i].translation))),
        started,
    )
}

/// Dense curve plus, for mesh-borne curves, the mesh.
fn load_curve(c: &CurveInput, exec: Execution) -> Result<(DiscreteCurve, Option<TriMesh>)> {
    match &c.mesh {
        Some(mesh_path) => {
            let mesh = load_mesh(mesh_path, c.allow_non_manifold)?;
            let verts = io::read_indices(&c.curve)?;
            let curve = DiscreteCurve::on_mesh(&mesh, &verts, exec)?;
            Ok((curve, Some(mesh)))
        }
        None => Ok((DiscreteCurve::planar(&io::read_points2(&c.curve)?)?, None)),
    }
}

fn feature_sizes(curve: &DiscreteCurve, mesh: Option<&TriMesh>, bound: Option<f64>) -> Result<sampling::FeatureSizes> {
    let axis = sampling::approximate_medial_axis(&[curve], mesh)?;
    sampling::local_feature_sizes(curve, &axis, bound)
}

fn run_sample(a: SampleArgs, exec: Execution) -> Result<()> {
    let (curve, mesh) = load_curve(&a.curve, exec)?;
    let lfs = feature_sizes(&curve, mesh.as_ref(), a.curve.injectivity_bound)?;
    let chosen = sampling::subsample_curve(&curve, &lfs.values, a.rho, a.u)?;
    let text = match curve.vertices() {
        Some(verts) => io::format_indices(&chosen.iter().map(|&i| verts[i]).collect::<Vec<_>>()),
        None => io::format_points2(
            &chosen
                .iter()
                .map(|&i| [curve.positions()[i][0], curve.positions()[i][1]])
                .collect::<Vec<_>>(),
        ),
    };
    io::write_text(&a.out, &text)?;
    let thresholds = Thresholds {
        rho: Some(a.rho),
        u: Some(a.u),
        theta: None,
    };
    let report = sampling::analyze_sampling(&curve, &chosen, &lfs, thresholds)?;
    let mut m = report_base("sample");
    m.insert("samples".into(), json!(chosen.len()));
    merge(&mut m, serde_json::to_value(&report).expect("report is serialisable"));
    emit_report(a.report.as_deref(), &Value::Object(m))
}

fn merge(m: &mut Map<String, Value>, v: Value) {
    if let Value::Object(o) = v {
        m.extend(o);
    }
}

fn run_check(a: CheckArgs, exec: Execution) -> Result<()> {
    let (curve, mesh) = load_curve(&a.curve, exec)?;
    let samples = match curve.vertices() {
        Some(verts) => io::read_indices(&a.samples)?
            .iter()
            .map(|v| {
                verts
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::invalid(format!("sample vertex {v} is not on the curve")))
            })
            .collect::<Result<Vec<_>>>()?,
        // Planar samples are curve point indices, or points as written by `sample`.
        None => {
            let text = io::read_text(&a.samples)?;
            match io::parse_indices(&a.samples, &text) {
                Ok(indices) => indices,
                Err(_) => io::parse_points2(&a.samples, &text)?
                    .iter()
                    .map(|p| curve_point_index(&curve, p))
                    .collect::<Result<Vec<_>>>()?,
            }
        }
    };
    let lfs = feature_sizes(&curve, mesh.as_ref(), a.curve.injectivity_bound)?;
    let thresholds = Thresholds {
        rho: a.rho,
        u: a.u,
        theta: a.theta,
    };
    let report = sampling::analyze_sampling(&curve, &samples, &lfs, thresholds)?;
    let mut m = report_base("check-sampling");
    m.insert("samples".into(), json!(samples.len()));
    merge(&mut m, serde_json::to_value(&report).expect("report is serialisable"));
    emit_report(a.report.as_deref(), &Value::Object(m))
}

fn curve_point_index(curve: &DiscreteCurve, p: &[f64; 2]) -> Result<usize> {
    let (i, d) = curve
        .positions()
        .iter()
        .map(|q| (q[0] - p[0]).hypot(q[1] - p[1]))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::invalid("empty curve"))?;
    if d > 1e-9 * (1.0 + p[0].hypot(p[1])) {
        return Err(Error::invalid(format!("sample point {} {} is not on the curve", p[0], p[1])));
    }
    Ok(i)
}

fn run_isoline(a: IsolineArgs, exec: Execution, started: Instant) -> Result<()> {
    let mesh = load_mesh(&a.mesh, a.allow_non_manifold)?;
    let field = io::read_scalars(&a.field)?;
    let samples = pipeline::extract_isoline_samples(&mesh, &field, a.value, a.tol)?;
    if let Some(p) = &a.out {
        io::write_text(p, &io::format_indices(&samples))?;
    }
    if samples.len() < 3 {
        return Err(Error::Reconstruction(format!(
            "only {} vertices lie in the isoline band",
            samples.len()
        )));
    }
    let mode = mode_of(a.single);
    let opts = Options {
        mode,
        allow_non_manifold: a.allow_non_manifold,
        exec,
    };
    let r = pipeline::reconstruct_mesh(&mesh, &samples, &opts)?;
    write_outputs(
        &a.outputs,
        "isoline",
        mode,
        &r,
        |t| {
            let path = pipeline::tour_polyline(&mesh, &samples, t)?;
            Ok(path.iter().map(|&v| mesh.position(v)).collect())
        },
        started,
    )
}

fn run_baseline(a: BaselineArgs, exec: Execution) -> Result<()> {
    let d: DistanceMatrix = match (&a.mesh, &a.points, &a.poses) {
        (Some(mesh_path), _, _) => {
            let mesh = load_mesh(mesh_path, false)?;
            let samples = io::read_indices(a.samples.as_deref().expect("clap requires samples"))?;
            geodesic::pairwise_distances_with(&mesh, &samples, false, exec)?
        }
        (None, Some(p), _) => EuclideanPoints::planar(&io::read_points2(p)?).distance_matrix(exec),
        (None, None, Some(p)) => PoseSet::new(io::read_poses(p)?, metric_of(&a.metric)?).distance_matrix(exec),
        _ => return Err(Error::invalid("one of --mesh/--samples, --points or --poses is required")),
    };
    let b = pipeline::mst_chain_baseline(&d)?;
    if let (Some(p), Some(t)) = (&a.tours, &b.tour) {
        io::write_text(p, &io::format_tours(&[t.order.clone()]))?;
    }
    let mut m = report_base("baseline");
    m.insert("samples".into(), json!(d.len()));
    m.insert("mst_is_chain".into(), json!(b.mst_is_chain));
    m.insert("branching_vertices".into(), json!(b.branching_vertices));
    m.insert("mst_weight".into(), json!(b.mst_weight));
    m.insert("tour_length".into(), json!(b.tour.as_ref().map(|t| t.length)));
    emit_report(a.report.as_deref(), &Value::Object(m))
}
