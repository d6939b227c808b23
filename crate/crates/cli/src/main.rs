//! `ktrans`: generate scenes, check the consistency conditions, search for
//! and verify transversals, and draw figures. Every command prints one JSON
//! report on standard output.
//!
//! Exit codes: 0 for a definitive answer, 2 for an inconclusive one, 1 for
//! usage and input errors.

mod report;

use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ktransversal::consistency::{
    check_dependency_consistency, check_separation_consistency, find_hadwiger_order, hadwiger_order_check,
    subfamily_bound, validate_counterexample, witness_from_transversal, Budget, ConsistencyVerdict, HadwigerCheck,
    PointAssignment, SeparationVerdict, TransversalWitness,
};
use ktransversal::engines::{
    alternating_flat_fit, find_transversal_stiefel, hyperplane_transversal_2d_exact, verify_transversal, EngineOpts,
    EngineOutcome,
};
use ktransversal::geometry::{AffineFlat, ScalarField};
use ktransversal::instances::{
    emit_scene, gen_disjoint_2d, gen_planted, gen_singletons, parse_flat, parse_scene, render_svg, DisjointMode,
    GenSpec, Projection, Scene,
};
use ktransversal::{Error, Result};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "ktrans", version, about = "k-transversals of convex polytope families")]
struct Cli {
    /// Add wall-clock timing to the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded scene.
    Gen(GenArgs),
    /// Check dependency consistency of the scene's assignment.
    CheckConsistency(ConsistencyArgs),
    /// Check separation consistency of the scene's assignment.
    CheckSeparation(SceneArg),
    /// Search for a k-transversal.
    FindTransversal(FindArgs),
    /// Verify a flat against a scene, or re-validate a report.
    Verify(VerifyArgs),
    /// Points on a transversal and the assignment they induce.
    Witness(FlatArgs),
    /// Check or search for an order in which every triple has a line transversal.
    Hadwiger(HadwigerArgs),
    /// Subfamily size bound for (k, d, field).
    Bound(BoundArgs),
    /// Draw the scene as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Planted,
    Singletons,
    #[value(name = "disjoint2d")]
    Disjoint2d,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    PlantedOnLine,
    Random,
    TriangleCorners,
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Stiefel,
    Altfit,
}

fn parse_field(s: &str) -> std::result::Result<ScalarField, String> {
    ScalarField::from_tag(s).ok_or_else(|| format!("expected R or C, got {s:?}"))
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = parse_field, default_value = "R")]
    field: ScalarField,
    /// Vertices per set.
    #[arg(long, default_value_t = 4)]
    vertices: usize,
    /// Radius of the vertex cloud around each anchor.
    #[arg(long, default_value_t = 0.5)]
    spread: f64,
    /// Placement of the polygons for `disjoint2d`.
    #[arg(long, value_enum, default_value = "planted-on-line")]
    mode: Mode,
    /// Write the scene here and print a report; without it the scene goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SceneArg {
    /// Scene file; standard input when omitted or `-`.
    scene: Option<PathBuf>,
}

#[derive(Args)]
struct ConsistencyArgs {
    scene: Option<PathBuf>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 4096)]
    samples: usize,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
}

#[derive(Args)]
struct FindArgs {
    scene: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "stiefel")]
    engine: Engine,
    #[arg(long)]
    seed: u64,
    /// Flat dimension; the scene's `k` when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Objective threshold for convergence.
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
}

#[derive(Args)]
struct VerifyArgs {
    scene: Option<PathBuf>,
    #[arg(long, conflicts_with = "report", required_unless_present = "report")]
    flat: Option<PathBuf>,
    /// A report previously printed by this tool for the same scene.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct FlatArgs {
    scene: Option<PathBuf>,
    #[arg(long)]
    flat: PathBuf,
}

#[derive(Args)]
struct HadwigerArgs {
    scene: Option<PathBuf>,
    /// Search all orders instead of checking the given one.
    #[arg(long)]
    find_order: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_field)]
    field: ScalarField,
}

#[derive(Args)]
struct PlotArgs {
    scene: Option<PathBuf>,
    #[arg(long)]
    flat: Option<PathBuf>,
    /// Also mark the nearest point of each set on the flat.
    #[arg(long, requires = "flat")]
    witness: bool,
    /// Two realified coordinate axes to draw, e.g. `0,2`; needed when the
    /// scene is not planar.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    plane: Option<Vec<usize>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Definitive,
    Inconclusive,
    /// The input was checked and rejected.
    Rejected,
}

type Report = (Map<String, Value>, Status);

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Io(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn load_scene(path: Option<&Path>) -> Result<Scene> {
    parse_scene(&read_input(path)?)
}

/// A bare flat document, or any report carrying `certificate.flat`.
fn load_flat(path: &Path, scene: &Scene) -> Result<AffineFlat> {
    let text = read_input(Some(path))?;
    match parse_flat(&text, scene.field, scene.d) {
        Ok(f) => Ok(f),
        Err(e) => {
            let embedded = serde_json::from_str::<Value>(&text)
                .ok()
                .and_then(|v| v.get("certificate").and_then(|c| c.get("flat")).cloned());
            match embedded {
                Some(v) => report::to_flat(scene.field, scene.d, &v, "certificate.flat"),
                None => Err(e),
            }
        }
    }
}

/// The scene's assignment, or the origin assignment when `k = 0`.
fn assignment_of(scene: &Scene) -> Result<PointAssignment> {
    match (&scene.assignment, scene.k) {
        (Some(a), _) => Ok(a.clone()),
        (None, 0) => Ok(PointAssignment::origin(scene.field, scene.sets.len())),
        (None, _) => Err(Error::InvalidInput("scene has no assignment and k > 0".into())),
    }
}

fn nonempty(scene: &Scene) -> Result<()> {
    if scene.sets.is_empty() {
        return Err(Error::InvalidInput("scene has no sets".into()));
    }
    Ok(())
}

fn gen(args: &GenArgs) -> Result<Option<Report>> {
    let mut spec = GenSpec::new(args.seed, args.d, args.k, args.n, args.field);
    spec.vertices = args.vertices;
    spec.spread = args.spread;
    let scene = match args.kind {
        Kind::Planted => gen_planted(&spec)?,
        Kind::Singletons => gen_singletons(&spec)?,
        Kind::Disjoint2d => gen_disjoint_2d(
            &spec,
            match args.mode {
                Mode::PlantedOnLine => DisjointMode::PlantedOnLine,
                Mode::Random => DisjointMode::Random,
                Mode::TriangleCorners => DisjointMode::TriangleCorners,
            },
        )?,
    };
    let text = emit_scene(&scene)?;
    let Some(out) = &args.out else {
        write_stdout(&text);
        return Ok(None);
    };
    std::fs::write(out, &text).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    let label = scene.label.as_ref();
    let cert = json!({
        "path": out.display().to_string(),
        "sets": scene.sets.len(),
        "provenance": label.map(|l| l.provenance.clone()),
    });
    let verdict = label.map_or("unknown", |l| l.value.tag());
    Ok(Some((report::envelope("gen", verdict, cert, Value::Null, Some(args.seed)), Status::Definitive)))
}

fn check_consistency(args: &ConsistencyArgs) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    nonempty(&scene)?;
    let assignment = assignment_of(&scene)?;
    let mut budget = Budget::new(args.seed);
    budget.samples = args.samples;
    budget.restarts = args.restarts;
    let verdict = check_dependency_consistency(&scene.sets, &assignment, &budget)?;
    let (tag, cert) = report::consistency(&verdict);
    let residuals = match &verdict {
        ConsistencyVerdict::Inconsistent(v) => json!({
            "dependency": ktransversal::consistency::dependency_residual(&v.tuple, &assignment),
        }),
        _ => Value::Null,
    };
    let status = match verdict {
        ConsistencyVerdict::ConsistentUpToResolution { .. } => Status::Inconclusive,
        _ => Status::Definitive,
    };
    Ok((report::envelope("check-consistency", tag, cert, residuals, Some(args.seed)), status))
}

fn check_separation(args: &SceneArg) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    nonempty(&scene)?;
    let assignment = assignment_of(&scene)?;
    let verdict = check_separation_consistency(&scene.sets, &assignment)?;
    let (tag, cert) = report::separation(&verdict);
    Ok((report::envelope("check-separation", tag, cert, Value::Null, None), Status::Definitive))
}

fn find_transversal(args: &FindArgs) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    nonempty(&scene)?;
    let k = args.k.unwrap_or(scene.k);
    let opts = EngineOpts { restarts: args.restarts, max_iters: args.max_iters, tol: args.tol, seed: args.seed };
    let (name, rep) = match args.engine {
        Engine::Stiefel => ("stiefel", find_transversal_stiefel(&scene.sets, k, &opts)?),
        Engine::Altfit => ("altfit", alternating_flat_fit(&scene.sets, k, &opts)?),
    };
    let (verdict, cert, residuals, status) = match &rep.outcome {
        EngineOutcome::Found { flat, residual, restart } => {
            let check = verify_transversal(flat, &scene.sets, f64::INFINITY)?;
            let distances: Vec<f64> = check.certificates.iter().map(|c| c.distance).collect();
            let cert = json!({
                "engine": name,
                "flat": report::flat(flat),
                "restart": restart,
                "iterations": rep.iterations,
                "tol": residual,
            });
            ("found", cert, json!({ "max": residual, "per_set": distances }), Status::Definitive)
        }
        EngineOutcome::NotFound { best_value, frame, restart_log } => {
            let cert = json!({
                "engine": name,
                "best_value": best_value,
                "iterations": rep.iterations,
                "frame": frame.as_ref().map(|f| report::vectors(f.vectors())),
                "restarts": restart_log
                    .iter()
                    .map(|r| json!({ "restart": r.restart, "value": r.value, "iterations": r.iterations }))
                    .collect::<Vec<_>>(),
            });
            ("not-found", cert, json!({ "best_value": best_value }), Status::Inconclusive)
        }
    };
    Ok((report::envelope("find-transversal", verdict, cert, residuals, Some(args.seed)), status))
}

fn verify_flat(scene: &Scene, flat: &AffineFlat, tol: f64) -> Result<Report> {
    let check = verify_transversal(flat, &scene.sets, tol)?;
    let cert = json!({ "flat": report::flat(flat), "tol": tol, "stabs": report::stab_check(&check) });
    let distances: Vec<f64> = check.certificates.iter().map(|c| c.distance).collect();
    let (verdict, status) =
        if check.passes { ("transversal", Status::Definitive) } else { ("not-transversal", Status::Rejected) };
    Ok((
        report::envelope("verify", verdict, cert, json!({ "max": check.residual, "per_set": distances }), None),
        status,
    ))
}

fn verify(args: &VerifyArgs) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    if let Some(path) = &args.flat {
        let flat = load_flat(path, &scene)?;
        return verify_flat(&scene, &flat, args.tol);
    }
    let path = args.report.as_ref().expect("clap requires --flat or --report");
    let text = read_input(Some(path))?;
    let rep: Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
    let command = report::get(&rep, "command", "report")?.as_str().unwrap_or_default().to_string();
    let verdict = report::get(&rep, "verdict", "report")?.as_str().unwrap_or_default().to_string();
    let valid = revalidate(&scene, &command, &verdict, &rep)?;
    let (tag, status) = match valid {
        Some(true) => ("valid", Status::Definitive),
        Some(false) => ("invalid", Status::Rejected),
        None => ("inconclusive", Status::Inconclusive),
    };
    let cert = json!({ "report_command": command, "report_verdict": verdict });
    Ok((report::envelope("verify", tag, cert, Value::Null, None), status))
}

/// Re-checks the certificate embedded in a report. `None` when the report
/// carries no certificate to check (inconclusive verdicts).
fn revalidate(scene: &Scene, command: &str, verdict: &str, rep: &Value) -> Result<Option<bool>> {
    let cert = report::get(rep, "certificate", "report")?;
    let n = scene.sets.len();
    let (field, d) = (scene.field, scene.d);
    match (command, verdict) {
        ("check-consistency", "inconsistent") => {
            let a = assignment_of(scene)?;
            let v = report::to_violation(field, n, report::get(cert, "violation", "certificate")?)?;
            Ok(Some(v.validate(&scene.sets, &a)))
        }
        ("check-consistency", "consistent") => {
            let a = assignment_of(scene)?;
            let r = report::to_realization(field, d, a.k(), n, report::get(cert, "realization", "certificate")?)?;
            let whole = r.subfamily == (0..n).collect::<Vec<_>>();
            Ok(Some(whole && r.validate(&scene.sets, &a)))
        }
        ("check-consistency", _) | ("find-transversal", "not-found") => Ok(None),
        ("check-separation", "separation-violated") => {
            let a = assignment_of(scene)?;
            let v = report::to_separation(n, cert)?;
            Ok(Some(validate_counterexample(&scene.sets, &a, &v)))
        }
        ("check-separation", "separation-consistent") => {
            let a = assignment_of(scene)?;
            Ok(Some(matches!(check_separation_consistency(&scene.sets, &a)?, SeparationVerdict::Ok { .. })))
        }
        ("find-transversal", "found") | ("verify", "transversal") => {
            let flat = report::to_flat(field, d, report::get(cert, "flat", "certificate")?, "certificate.flat")?;
            let tol = report::get(cert, "tol", "certificate")?.as_f64().unwrap_or(0.0);
            Ok(Some(verify_transversal(&flat, &scene.sets, tol)?.passes))
        }
        ("verify", "not-transversal") => {
            let flat = report::to_flat(field, d, report::get(cert, "flat", "certificate")?, "certificate.flat")?;
            let tol = report::get(cert, "tol", "certificate")?.as_f64().unwrap_or(0.0);
            Ok(Some(!verify_transversal(&flat, &scene.sets, tol)?.passes))
        }
        ("witness", "witness") => {
            let flat = report::to_flat(field, d, report::get(cert, "flat", "certificate")?, "certificate.flat")?;
            let k = flat.dim();
            let a = report::get(cert, "assignment", "certificate")?;
            let points = report::to_vectors(field, k, report::get(a, "points", "assignment")?, "assignment.points")?;
            let phi = report::as_usizes(report::get(a, "phi", "assignment")?, "assignment.phi")?;
            let w = TransversalWitness {
                flat,
                points: report::to_vectors(
                    field,
                    d,
                    report::get(cert, "points", "certificate")?,
                    "certificate.points",
                )?,
                weights: report::to_weights(report::get(cert, "weights", "certificate")?, "certificate.weights")?,
                assignment: PointAssignment::new(field, k, points, phi)?,
            };
            Ok(Some(w.assignment.len() == n && w.validate(&scene.sets)))
        }
        ("hadwiger", _) => {
            let (again, _) = hadwiger_on(scene, matches!(verdict, "order-found" | "no-order"))?;
            Ok(Some(again.get("verdict") == rep.get("verdict") && again.get("certificate") == Some(cert)))
        }
        ("bound", "bound") => {
            let index = |key: &str| -> Result<usize> {
                report::get(cert, key, "certificate")?
                    .as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::InvalidInput(format!("certificate.{key}: expected an integer")))
            };
            let field = parse_field(report::get(cert, "field", "certificate")?.as_str().unwrap_or_default())
                .map_err(Error::InvalidInput)?;
            let (again, _) = bound(&BoundArgs { k: index("k")?, d: index("d")?, field })?;
            Ok(Some(again.get("certificate") == Some(cert)))
        }
        _ => Err(Error::InvalidInput(format!("cannot re-validate a {command:?} report with verdict {verdict:?}"))),
    }
}

fn witness(args: &FlatArgs) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    let flat = load_flat(&args.flat, &scene)?;
    let w = witness_from_transversal(&scene.sets, &flat)?;
    if !w.validate(&scene.sets) {
        return Err(Error::InvariantViolation("witness failed its own re-check".into()));
    }
    let distances: Vec<f64> = w.points.iter().map(|q| flat.distance_to(q)).collect();
    Ok((
        report::envelope("witness", "witness", report::witness(&w), json!({ "per_set": distances }), None),
        Status::Definitive,
    ))
}

fn hadwiger_on(scene: &Scene, find_order: bool) -> Result<Report> {
    nonempty(scene)?;
    let line = hyperplane_transversal_2d_exact(&scene.sets)?;
    let line_json = line.as_ref().map(report::flat);
    let (verdict, cert) = if find_order {
        match find_hadwiger_order(&scene.sets)? {
            Some(order) => ("order-found", json!({ "order": order, "exact_line": line_json })),
            None => ("no-order", json!({ "order": null, "exact_line": line_json })),
        }
    } else {
        match hadwiger_order_check(&scene.sets)? {
            HadwigerCheck::Ok => ("order-ok", json!({ "triple": null, "exact_line": line_json })),
            HadwigerCheck::BadTriple(i, j, l) => {
                ("bad-triple", json!({ "triple": [i, j, l], "exact_line": line_json }))
            }
        }
    };
    Ok((report::envelope("hadwiger", verdict, cert, Value::Null, None), Status::Definitive))
}

fn hadwiger(args: &HadwigerArgs) -> Result<Report> {
    hadwiger_on(&load_scene(args.scene.as_deref())?, args.find_order)
}

fn bound(args: &BoundArgs) -> Result<Report> {
    let b = subfamily_bound(args.k, args.d, args.field)?;
    let cert = json!({ "bound": b, "k": args.k, "d": args.d, "field": args.field.tag() });
    let mut m = report::envelope("bound", "bound", cert, Value::Null, None);
    m.insert("bound".into(), json!(b));
    Ok((m, Status::Definitive))
}

fn plot(args: &PlotArgs) -> Result<Report> {
    let scene = load_scene(args.scene.as_deref())?;
    let flat = args.flat.as_deref().map(|p| load_flat(p, &scene)).transpose()?;
    let witness_points = match (&flat, args.witness) {
        (Some(f), true) => witness_from_transversal(&scene.sets, f)?.points,
        _ => Vec::new(),
    };
    let projection = match &args.plane {
        None => None,
        Some(axes) => {
            let rdim = scene.d * scene.field.real_dim();
            if let Some(&a) = axes.iter().find(|&&a| a >= rdim) {
                return Err(Error::InvalidInput(format!("axis {a} out of range for {rdim} real coordinates")));
            }
            let unit = |a: usize| (0..rdim).map(|j| if j == a { 1.0 } else { 0.0 }).collect();
            Some(Projection { x: unit(axes[0]), y: unit(axes[1]) })
        }
    };
    let svg = render_svg(&scene, flat.as_ref(), &witness_points, projection.as_ref())?;
    std::fs::write(&args.out, &svg).map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let cert = json!({ "path": args.out.display().to_string(), "bytes": svg.len() });
    Ok((report::envelope("plot", "written", cert, Value::Null, None), Status::Definitive))
}

fn run(cli: &Cli) -> Result<Option<Report>> {
    Ok(Some(match &cli.command {
        Command::Gen(a) => return gen(a),
        Command::CheckConsistency(a) => check_consistency(a)?,
        Command::CheckSeparation(a) => check_separation(a)?,
        Command::FindTransversal(a) => find_transversal(a)?,
        Command::Verify(a) => verify(a)?,
        Command::Witness(a) => witness(a)?,
        Command::Hadwiger(a) => hadwiger(a)?,
        Command::Bound(a) => bound(a)?,
        Command::Plot(a) => plot(a)?,
    }))
}

/// A reader that closes the pipe early is not an error of ours.
fn write_stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some((mut report, status))) => {
            if cli.timing {
                report.insert("timing".into(), json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 }));
            }
            let text = serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize");
            write_stdout(&format!("{text}\n"));
            ExitCode::from(match status {
                Status::Definitive => 0,
                Status::Inconclusive => 2,
                Status::Rejected => 1,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
