//! `latqma`: generate instances, build witnesses, run audits and protocol experiments.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use latqma::autocorr::{audit_samples, gaussian_autocorr_audit};
use latqma::lattice::format::LatticeFile;
use latqma::lattice::{DyadicVector, GapThresholds, GridSpec, Instance, Lattice, LatticeGrid};
use latqma::protocol::{
    reduce_svp_to_cvp, run_experiment, ExperimentKind, ExperimentParams, Mode, PdSource, TestKind,
};
use latqma::witness::{
    build_adversarial_witness, build_honest_witness, default_cutoff, validate, AdversarialKind,
    QuantumWitness,
};
use latqma::Error;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser, Debug)]
#[command(
    name = "latqma",
    version,
    about = "Classical simulation of the lattice QMA protocol"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Write a lattice file: scale * Z^n with a deep-hole target, or a random basis with --seed.
    Gen(GenArgs),
    /// Build a witness state and write it to a file.
    Witness(WitnessArgs),
    /// Compare g(x) with mu(tau(x)/2) on sampled shifts.
    AuditAutocorr(AuditArgs),
    /// PD property audits and the no-PD certificate for h.
    PdAudit(PdArgs),
    /// Run a protocol experiment.
    Protocol(ProtocolArgs),
    /// Write the CVP' instances of the SVP-to-CVP' reduction.
    Reduce(ReduceArgs),
    /// Repeat a verb over values of one parameter.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Rational scale factor, e.g. `15` or `32/3`.
    #[arg(long, default_value = "1")]
    scale: String,
    #[arg(long)]
    m: u32,
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Random basis and target instead of scale * Z^n.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[arg(long)]
    lattice: PathBuf,
    /// Overrides the grid exponent of the lattice file.
    #[arg(long)]
    m: Option<u32>,
    /// Support radius of Gaussian witnesses; defaults to 2 sqrt(n).
    #[arg(long)]
    cutoff: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct WitnessArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// honest, honest-for-no-instance, lattice-delta, wrong-width, shifted or random-phase.
    #[arg(long, default_value = "honest")]
    kind: String,
    /// Width factor for wrong-width.
    #[arg(long, default_value_t = 1.5)]
    gamma: f64,
    /// Signed grid coefficients for shifted, e.g. `3,-1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    shift: Vec<i64>,
    /// Phase seed for random-phase.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct AuditArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled shifts.
    #[arg(long, default_value_t = 512)]
    trials: usize,
    /// Shifts within this distance of the origin are sampled first.
    #[arg(long, default_value_t = 3.0)]
    near_radius: f64,
    /// Samples are drawn on this coarser grid and lifted, so runs at different m share them.
    #[arg(long, default_value_t = 5)]
    base_m: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ExperimentArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    witness: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p3: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    ball_radius: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// exact or sampled.
    #[arg(long, default_value = "sampled")]
    mode: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PdArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Signed grid coefficients of the anomaly w, e.g. `4,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    anomaly: Vec<i64>,
    /// Replace h(±w) by this value.
    #[arg(long, allow_hyphen_values = true)]
    suppress: Option<f64>,
    /// witness or gaussian.
    #[arg(long, default_value = "witness")]
    source: String,
}

#[derive(Args, Debug, Clone)]
struct ProtocolArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// completeness, soundness, reduction or pd-audit.
    #[arg(long)]
    kind: String,
    /// Force the target or short branch of the super-verifier.
    #[arg(long)]
    branch: Option<String>,
    /// SVP promise threshold for the reduction experiment.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ReduceArgs {
    #[arg(long)]
    lattice: PathBuf,
    /// Output prefix; instance i goes to `<prefix>_<i>.txt`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// m, ball_radius, p3 or k.
    #[arg(long)]
    param: String,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// The inner verb and its flags.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, required = true)]
    inner: Vec<String>,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

type Res<T> = std::result::Result<T, Failure>;

/// What a verb produced: a human report, an optional CSV, files to write and one headline number.
struct Output {
    report: String,
    csv: Option<String>,
    files: Vec<(PathBuf, String)>,
    metric: f64,
}

fn require_seed(seed: Option<u64>, verb: &str) -> Res<u64> {
    seed.ok_or_else(|| Failure::Usage(format!("`{verb}` is stochastic and requires --seed <SEED>")))
}

fn load_grid(args: &GridArgs) -> Res<(LatticeFile, Arc<LatticeGrid>)> {
    let mut file = LatticeFile::read(&args.lattice)?;
    if let Some(m) = args.m {
        file.grid = GridSpec::new(m, file.grid.ell);
    }
    let grid = Arc::new(LatticeGrid::new(file.lattice.clone(), file.grid)?);
    Ok((file, grid))
}

fn cutoff(args: &GridArgs, n: usize) -> f64 {
    args.cutoff.unwrap_or_else(|| default_cutoff(n))
}

fn load_witness(
    path: &Option<PathBuf>,
    grid: &Arc<LatticeGrid>,
) -> Res<Option<Arc<QuantumWitness>>> {
    Ok(match path {
        Some(p) => Some(Arc::new(QuantumWitness::read(p, grid.clone())?)),
        None => None,
    })
}

fn gen(a: &GenArgs) -> Res<Output> {
    let scale: BigRational = a
        .scale
        .parse()
        .map_err(|_| Failure::Usage(format!("--scale: not a rational: `{}`", a.scale)))?;
    if a.ell == 0 {
        return Err(Error::InvalidParameter("--ell must be at least 1".into()).into());
    }
    let (lattice, target) = match a.seed {
        None => {
            let l = Lattice::scaled_identity(a.n, scale)?;
            (l, DyadicVector::new(vec![1i64 << (a.ell - 1); a.n], a.ell))
        }
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<Vec<i64>> = (0..a.n)
                .map(|i| {
                    (0..a.n)
                        .map(|j| rng.gen_range(-2..=2) + if i == j { 6 } else { 0 })
                        .collect()
                })
                .collect();
            let l = Lattice::from_integer_rows(&rows, 1)?.scaled(&scale)?;
            let side = 1i64 << a.ell;
            (
                l,
                DyadicVector::new((0..a.n).map(|_| rng.gen_range(0..side)).collect(), a.ell),
            )
        }
    };
    let spec = GridSpec::new(a.m, a.ell);
    spec.validate(a.n, latqma::lattice::DEFAULT_POINT_BUDGET)?;
    let inst = Instance::new(
        lattice.clone(),
        target.clone(),
        1.0,
        GapThresholds::desk(a.n),
    )?;
    let file = LatticeFile {
        lattice,
        grid: spec,
        target: Some(target),
    };
    Ok(Output {
        report: format!(
            "wrote n={} m={} ell={}: lambda1={:.6} d(v,L)={:.6} label {}",
            a.n, a.m, a.ell, inst.lambda1, inst.distance, inst.truth
        ),
        csv: None,
        files: vec![(a.out.clone(), file.to_text())],
        metric: inst.distance,
    })
}

fn witness(a: &WitnessArgs) -> Res<Output> {
    let (_, grid) = load_grid(&a.grid)?;
    let c = cutoff(&a.grid, grid.n());
    let w = match a.kind.replace('_', "-").as_str() {
        "honest" => build_honest_witness(&grid, c)?,
        other => {
            let kind = match other.parse::<AdversarialKind>()? {
                AdversarialKind::WrongWidth { .. } => {
                    AdversarialKind::WrongWidth { gamma: a.gamma }
                }
                AdversarialKind::Shifted { .. } => {
                    if a.shift.len() != grid.n() {
                        return Err(Failure::Usage(format!(
                            "--shift needs {} coefficients",
                            grid.n()
                        )));
                    }
                    AdversarialKind::Shifted {
                        shift: grid.from_signed(&a.shift),
                    }
                }
                AdversarialKind::RandomPhase { .. } => AdversarialKind::RandomPhase {
                    seed: require_seed(a.seed, "witness --kind random-phase")?,
                },
                k => k,
            };
            build_adversarial_witness(&kind, &grid, c)?
        }
    };
    let report = validate(&w);
    if !report.is_valid() {
        return Err(Error::Precondition(format!(
            "built witness is invalid: {:?}",
            report.violations
        ))
        .into());
    }
    let support: usize = w.components().iter().map(|(_, s)| s.nonzero_count()).sum();
    Ok(Output {
        report: format!(
            "{} witness on {} grid points, support {support}",
            a.kind,
            grid.len()
        ),
        csv: None,
        files: vec![(a.out.clone(), w.to_text())],
        metric: support as f64,
    })
}

fn audit(a: &AuditArgs) -> Res<Output> {
    let seed = require_seed(a.seed, "audit-autocorr")?;
    let (_, grid) = load_grid(&a.grid)?;
    let w = match load_witness(&a.witness, &grid)? {
        Some(w) => w,
        None => Arc::new(build_honest_witness(&grid, cutoff(&a.grid, grid.n()))?),
    };
    let state = w
        .state()
        .ok_or_else(|| Failure::Usage("audit-autocorr needs a pure-state witness".into()))?;
    let base = grid.with_m(a.base_m.min(grid.m()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = audit_samples(&base, a.near_radius, a.trials, &mut rng)
        .iter()
        .map(|p| base.lift(p, grid.m()))
        .collect::<latqma::Result<Vec<_>>>()?;
    let rep = gaussian_autocorr_audit(&grid, state, &samples)?;
    Ok(Output {
        report: format!(
            "m={} samples={} max_dev={:.6e}",
            grid.m(),
            rep.rows.len(),
            rep.max_dev
        ),
        csv: Some(rep.to_csv()),
        files: Vec::new(),
        metric: rep.max_dev,
    })
}

fn experiment_params(a: &ExperimentArgs, verb: &str) -> Res<ExperimentParams> {
    let seed = require_seed(a.seed, verb)?;
    let (file, grid) = load_grid(&a.grid)?;
    let n = grid.n();
    let target = file
        .target
        .clone()
        .unwrap_or_else(|| DyadicVector::new(vec![0; n], 1));
    let inst = Instance::new(file.lattice.clone(), target, 1.0, GapThresholds::desk(n))?;
    let mut p = ExperimentParams::new(inst, grid.clone(), seed);
    p.instance_id = a
        .grid
        .lattice
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".into());
    p.cutoff = cutoff(&a.grid, n);
    p.witness = load_witness(&a.witness, &grid)?;
    if let Some(k) = a.k {
        p.config.k = k;
    }
    if let Some(p3) = a.p3 {
        p.config.p3 = p3;
    }
    if let Some(s) = a.s {
        p.config.s_desk = s;
    }
    if let Some(r) = a.ball_radius {
        p.config.ball_radius = r;
    }
    if let Some(t) = a.trials {
        p.trials = t;
    }
    p.config.mode = a.mode.parse::<Mode>()?;
    p.config.validate()?;
    Ok(p)
}

fn experiment_output(out: latqma::protocol::ExperimentOutcome) -> Output {
    let mut report = format!(
        "{}: {} = {:.6} over {} runs, overall {}",
        out.kind,
        out.metric_name,
        out.metric,
        out.runs,
        if out.accept { "ACCEPT" } else { "REJECT" }
    );
    for d in &out.diagnostics {
        report.push_str("\n  ");
        report.push_str(d);
    }
    Output {
        report,
        csv: Some(out.csv),
        files: Vec::new(),
        metric: out.metric,
    }
}

fn pd_audit(a: &PdArgs) -> Res<Output> {
    let mut p = experiment_params(&a.exp, "pd-audit")?;
    if a.exp.trials.is_none() {
        p.trials = 1000;
    }
    if !a.anomaly.is_empty() {
        if a.anomaly.len() != p.grid.n() {
            return Err(Failure::Usage(format!(
                "--anomaly needs {} coefficients",
                p.grid.n()
            )));
        }
        p.anomaly = Some(p.grid.from_signed(&a.anomaly));
    }
    p.suppress = a.suppress;
    p.pd_source = a.source.parse::<PdSource>()?;
    Ok(experiment_output(run_experiment(
        ExperimentKind::PdAudit,
        &p,
    )?))
}

fn protocol(a: &ProtocolArgs) -> Res<Output> {
    let kind = a.kind.parse::<ExperimentKind>()?;
    let mut p = experiment_params(&a.exp, "protocol")?;
    if let Some(b) = &a.branch {
        p.force = Some(b.parse::<TestKind>()?);
    }
    if let Some(beta) = a.beta {
        p.beta = beta;
    }
    Ok(experiment_output(run_experiment(kind, &p)?))
}

fn reduce(a: &ReduceArgs) -> Res<Output> {
    let file = LatticeFile::read(&a.lattice)?;
    let prefix = a.out.with_extension("");
    let mut files = Vec::new();
    for ri in reduce_svp_to_cvp(&file.lattice)? {
        let ell = file.grid.ell.max(1);
        let m = file.grid.m.max(ell + 1);
        let f = LatticeFile {
            lattice: ri.lattice,
            grid: GridSpec::new(m, ell),
            target: Some(DyadicVector::new(
                ri.target
                    .num
                    .iter()
                    .map(|v| v << (ell - ri.target.log_den))
                    .collect(),
                ell,
            )),
        };
        let name = format!("{}_{}.txt", prefix.display(), ri.index + 1);
        files.push((PathBuf::from(name), f.to_text()));
    }
    Ok(Output {
        report: format!("wrote {} reduced instances", files.len()),
        csv: None,
        metric: files.len() as f64,
        files,
    })
}

fn sweep(a: &SweepArgs) -> Res<Output> {
    let flag = match a.param.as_str() {
        "m" => "--m",
        "ball_radius" | "ball-radius" => "--ball-radius",
        "p3" => "--p3",
        "k" => "--k",
        other => {
            return Err(Failure::Usage(format!(
                "cannot sweep `{other}`; use m, ball_radius, p3 or k"
            )))
        }
    };
    let mut csv = String::from("param,value,metric\n");
    let mut lines = Vec::new();
    for v in &a.values {
        let mut argv = vec!["latqma".to_string()];
        let mut skip = false;
        for t in &a.inner {
            if skip {
                skip = false;
                continue;
            }
            if t == flag {
                skip = true;
                continue;
            }
            if t.starts_with(&format!("{flag}=")) {
                continue;
            }
            argv.push(t.clone());
        }
        argv.push(flag.to_string());
        argv.push(v.clone());
        let cli = Cli::try_parse_from(&argv).map_err(|e| Failure::Usage(e.to_string()))?;
        if matches!(cli.verb, Verb::Sweep(_)) {
            return Err(Failure::Usage("sweeps cannot be nested".into()));
        }
        let out = run(&cli.verb)?;
        csv.push_str(&format!("{},{v},{:.12e}\n", a.param, out.metric));
        lines.push(format!("{}={v}: {}", a.param, out.report));
    }
    Ok(Output {
        report: lines.join("\n"),
        csv: Some(csv),
        files: Vec::new(),
        metric: f64::NAN,
    })
}

fn run(verb: &Verb) -> Res<Output> {
    match verb {
        Verb::Gen(a) => gen(a),
        Verb::Witness(a) => witness(a),
        Verb::AuditAutocorr(a) => audit(a),
        Verb::PdAudit(a) => pd_audit(a),
        Verb::Protocol(a) => protocol(a),
        Verb::Reduce(a) => reduce(a),
        Verb::Sweep(a) => sweep(a),
    }
}

fn csv_target(verb: &Verb) -> Option<&Path> {
    match verb {
        Verb::AuditAutocorr(a) => a.out.as_deref(),
        Verb::PdAudit(a) => a.exp.out.as_deref(),
        Verb::Protocol(a) => a.exp.out.as_deref(),
        Verb::Sweep(a) => a.out.as_deref(),
        _ => None,
    }
}

fn emit(verb: &Verb, out: Output) -> Res<()> {
    for (path, text) in &out.files {
        fs::write(path, text)?;
    }
    eprintln!("{}", out.report);
    if let Some(csv) = out.csv {
        match csv_target(verb) {
            Some(p) => fs::write(p, csv)?,
            None => print!("{csv}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.verb).and_then(|o| emit(&cli.verb, o)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor usage, try `latqma help`.");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
