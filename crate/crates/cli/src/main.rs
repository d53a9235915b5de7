//! `kslab`: batch front end for the chemotaxis laboratory.
//!
//! One verb per invocation; every artifact is a CSV whose header comments
//! echo the effective numeric parameters, so a file is enough to re-run the
//! experiment that produced it. Exit codes: 0 success, 1 usage error,
//! 2 numerical failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use kslab_core::diagnostics::{sample, DiagnosticsSample, DEFAULT_THRESHOLD};
use kslab_core::dynamics::{
    default_mesh, integrate, stable_dt, stride_for, ModelParams, State, StepControl,
};
use kslab_core::error::Error;
use kslab_core::experiments::{
    convergence_study, decay_study, parse_config, render_csv, run_case, run_sweep, shared_mesh,
    write_csv_commented, CsvRecord, SweepConfig, DEFAULT_N_FLOOR, DEFAULT_OBSERVER_DT,
};
use kslab_core::grid::Grid1D;
use kslab_core::transform::{c_from_v, initial_average, InitialCondition};

#[derive(Parser)]
#[command(
    name = "kslab",
    version,
    about = "Finite-difference laboratory for a 1-d chemotaxis model with logistic growth"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Integrate one (eps, r) case and emit the diagnostics time series
    Simulate(SimulateArgs),
    /// Run an (eps, r) grid and write the characteristic-times table
    Sweep(SweepArgs),
    /// Report the characteristic times of one (eps, r) case
    Timescales(TimescalesArgs),
    /// Compare eps > 0 runs against the eps = 0 reference on one lattice
    Converge(ConvergeArgs),
    /// Fit the exponential tail after arrival at carrying capacity
    Decay(DecayArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IcKind {
    /// Square-wave u0 with the off-center Gaussian v0
    Paper,
    /// Cosine/sine pair compatible with the boundary conditions
    Smooth,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    /// Integration horizon; defaults to 30 / r
    #[arg(long, visible_alias = "t-max")]
    t_end: Option<f64>,
    /// Mesh intervals; defaults to the layer rule for eps (floor 64)
    #[arg(long)]
    n: Option<usize>,
    /// Time step; defaults to the stability bound (dx^2 / 2)
    #[arg(long)]
    dt: Option<f64>,
    /// Sampling interval in time units
    #[arg(long, default_value_t = DEFAULT_OBSERVER_DT)]
    observer_dt: f64,
    #[arg(long, value_enum, default_value_t = IcKind::Paper)]
    ic: IcKind,
    /// Cosine amplitude of u0 (--ic smooth)
    #[arg(long, default_value_t = 0.2)]
    a_u: f64,
    /// Sine amplitude of v0 (--ic smooth)
    #[arg(long, default_value_t = 0.2)]
    a_v: f64,
    /// Write field snapshots nearest these times (comma-separated; needs --out)
    #[arg(long, value_delimiter = ',')]
    snapshot_at: Vec<f64>,
    /// Time-series CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reset negative u values to zero after each step
    #[arg(long)]
    clamp_u: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Plain-text config (`key = value`, `#` comments); desk defaults when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the configured output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker pool size for case execution
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TimescalesArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Cutoff when no arrival is detected; defaults to 30 / r
    #[arg(long, visible_alias = "t-end")]
    t_max: Option<f64>,
    /// Mesh intervals; defaults to the layer rule for eps (floor 64)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_OBSERVER_DT)]
    observer_dt: f64,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Diffusivities to compare against eps = 0, sorted descending
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = [0.2, 0.1, 0.05, 0.025, 0.0125]
    )]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    /// Comparison horizon
    #[arg(long, visible_alias = "t-max", default_value_t = 1.0)]
    t_end: f64,
    /// Shared mesh; defaults to the layer rule for the smallest eps
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = IcKind::Smooth)]
    ic: IcKind,
    #[arg(long, default_value_t = 0.2)]
    a_u: f64,
    #[arg(long, default_value_t = 0.2)]
    a_v: f64,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    /// Fit-window end (integration horizon)
    #[arg(long, visible_alias = "t-end", default_value_t = 60.0)]
    t_max: f64,
    #[arg(long, value_enum, default_value_t = IcKind::Paper)]
    ic: IcKind,
    #[arg(long, default_value_t = 0.2)]
    a_u: f64,
    #[arg(long, default_value_t = 0.2)]
    a_v: f64,
}

/// Failures split by exit code: bad invocations vs. runs that went wrong.
enum Failure {
    Usage(String),
    Run(String),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Errors from inside an experiment: numerical ones and I/O keep exit 2,
/// anything else was a bad parameter after all.
fn classify(e: Error) -> Failure {
    if e.is_numerical() || matches!(e, Error::File { .. }) {
        Failure::Run(e.to_string())
    } else {
        usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.verb {
        Verb::Simulate(args) => simulate(args),
        Verb::Sweep(args) => sweep(args),
        Verb::Timescales(args) => timescales(args),
        Verb::Converge(args) => converge(args),
        Verb::Decay(args) => decay(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn pick_ic(kind: IcKind, a_u: f64, a_v: f64) -> InitialCondition {
    match kind {
        IcKind::Paper => InitialCondition::SquareWave,
        IcKind::Smooth => InitialCondition::SmoothCosine { a_u, a_v },
    }
}

fn resolve_horizon(flag: Option<f64>, r: f64) -> Result<f64, Failure> {
    match flag {
        Some(t) => Ok(t),
        None if r > 0.0 => Ok(30.0 / r),
        None => Err(Failure::Usage(
            "r = 0 never reaches carrying capacity; pass --t-end explicitly".into(),
        )),
    }
}

/// Resolve mesh and step from flags, warning (not rejecting) when an
/// override leaves the layer rule or the stability bound unsatisfied.
fn build_control(
    n_flag: Option<usize>,
    dt_flag: Option<f64>,
    eps: f64,
    t_end: f64,
    observer_dt: f64,
) -> Result<(usize, f64, StepControl), Failure> {
    if !(observer_dt.is_finite() && observer_dt > 0.0) {
        return Err(Failure::Usage(format!(
            "--observer-dt must be positive, got {observer_dt}"
        )));
    }
    let n = n_flag.unwrap_or_else(|| default_mesh(eps, DEFAULT_N_FLOOR));
    if let Some(nf) = n_flag {
        let rule = default_mesh(eps, Grid1D::MIN_INTERVALS);
        if nf < rule {
            eprintln!(
                "warning: n = {nf} does not resolve the eps = {eps} layer (rule wants n >= {rule})"
            );
        }
    }
    let bound = stable_dt(1.0 / n as f64);
    let dt = dt_flag.unwrap_or(bound);
    let ctrl = StepControl::new(n, dt, t_end, stride_for(observer_dt, dt)).map_err(usage)?;
    if ctrl.violates_stability() {
        eprintln!(
            "warning: dt = {dt} exceeds the stability bound {bound} for n = {n}; expect blow-up"
        );
    }
    Ok((n, dt, ctrl))
}

/// Write or print a rendered CSV.
fn emit<R: CsvRecord>(
    records: &[R],
    comments: &[String],
    out: Option<&Path>,
) -> Result<(), Failure> {
    match out {
        Some(path) => {
            write_csv_commented(records, path, comments).map_err(|e| Failure::Run(e.to_string()))
        }
        None => {
            print!("{}", render_csv(records, comments));
            Ok(())
        }
    }
}

fn join(xs: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{x}");
    }
    s
}

/// One diagnostics sample as a time-series row.
struct SampleRow(DiagnosticsSample);

impl CsvRecord for SampleRow {
    fn header() -> &'static str {
        "t,l2_ux_sq,l2_u_minus_avg_sq,l2_u_minus_1_sq,l2_v_sq,l2_vx_sq,e1,f_integral,min_u"
    }

    fn row(&self) -> String {
        let s = &self.0;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            s.t,
            s.l2_ux_sq,
            s.l2_u_minus_avg_sq,
            s.l2_u_minus_1_sq,
            s.l2_v_sq,
            s.l2_vx_sq,
            s.e1,
            s.f_integral.map(|v| v.to_string()).unwrap_or_default(),
            s.min_u
        )
    }
}

/// One spatial node of a field snapshot.
struct SnapshotRow {
    x: f64,
    u: f64,
    v: f64,
    c: f64,
}

impl CsvRecord for SnapshotRow {
    fn header() -> &'static str {
        "x,u,v,c"
    }

    fn row(&self) -> String {
        format!("{},{},{},{}", self.x, self.u, self.v, self.c)
    }
}

fn snapshot_path(out: &Path, target: f64) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "snapshot".into());
    out.with_file_name(format!("{stem}-snapshot-t{target}.csv"))
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let p = ModelParams::new(args.eps, args.r).map_err(usage)?;
    let t_end = resolve_horizon(args.t_end, args.r)?;
    let (n, dt, ctrl) = build_control(args.n, args.dt, args.eps, t_end, args.observer_dt)?;
    let ctrl = ctrl.with_clamp_u(args.clamp_u);
    if !args.snapshot_at.is_empty() && args.out.is_none() {
        return Err(Failure::Usage(
            "--snapshot-at needs --out to derive snapshot file names".into(),
        ));
    }

    let g = Grid1D::new(n).map_err(usage)?;
    let ic = pick_ic(args.ic, args.a_u, args.a_v);
    let s0 = State::from_ic(&ic, &g).map_err(usage)?;
    let avg0 = initial_average(&s0.u, &g);

    // Nearest-sample snapshot capture: no interpolation, the closest
    // observer event wins.
    let mut trackers: Vec<(f64, Option<(f64, State)>)> =
        args.snapshot_at.iter().map(|&t| (t, None)).collect();
    let mut observer = |s: &State, g: &Grid1D| {
        for (target, best) in trackers.iter_mut() {
            let gap = (s.t - *target).abs();
            if best.as_ref().is_none_or(|(prev, _)| gap < *prev) {
                *best = Some((gap, s.clone()));
            }
        }
        sample(s, g, avg0)
    };
    let (_, samples) = integrate(s0, &p, &ctrl, &mut [&mut observer]).map_err(|interrupted| {
        let mut msg = interrupted.error.to_string();
        if let Some(last) = interrupted.partial.last() {
            let _ = write!(msg, " (last healthy sample at t = {})", last.t);
        }
        Failure::Run(msg)
    })?;

    let mut comments = vec![
        format!("eps={}", args.eps),
        format!("r={}", args.r),
        format!("t_end={t_end}"),
        format!("n={n}"),
        format!("dt={dt}"),
        format!("observer_dt={}", args.observer_dt),
    ];
    if args.ic == IcKind::Smooth {
        comments.push(format!("a_u={}", args.a_u));
        comments.push(format!("a_v={}", args.a_v));
    }
    let rows: Vec<SampleRow> = samples.into_iter().map(SampleRow).collect();
    emit(&rows, &comments, args.out.as_deref())?;

    for (target, best) in trackers {
        let (_, state) = best.expect("runs always produce at least one sample");
        let c = c_from_v(&state.v, &g, 1.0).map_err(|e| Failure::Run(e.to_string()))?;
        let rows: Vec<SnapshotRow> = (0..=g.n() as isize)
            .map(|i| SnapshotRow {
                x: g.x(i),
                u: state.u[i],
                v: state.v[i],
                c: c[i],
            })
            .collect();
        let mut snap_comments = comments.clone();
        snap_comments.push(format!("snapshot_requested_t={target}"));
        snap_comments.push(format!("snapshot_t={}", state.t));
        let path = snapshot_path(args.out.as_ref().expect("checked above"), target);
        emit(&rows, &snap_comments, Some(&path))?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            parse_config(&text).map_err(usage)?
        }
        None => SweepConfig::desk("sweep.csv"),
    };
    if let Some(out) = args.out {
        cfg.out_path = out;
    }
    if let Some(jobs) = args.jobs {
        cfg.jobs = Some(jobs);
    }
    cfg.validate().map_err(usage)?;

    let records = run_sweep(&cfg).map_err(classify)?;

    // Rewrite with the parameter echo so the artifact is self-describing.
    let mut comments = vec![
        format!("eps_list={}", join(&cfg.eps_list)),
        format!("r_list={}", join(&cfg.r_list)),
        format!("threshold={}", cfg.threshold),
        format!("observer_dt={}", cfg.observer_dt),
    ];
    if let Some(t) = cfg.t_max {
        comments.push(format!("t_max={t}"));
    }
    if let Some(n) = cfg.n_override {
        comments.push(format!("n_override={n}"));
    }
    if let Some(jobs) = cfg.jobs {
        comments.push(format!("jobs={jobs}"));
    }
    write_csv_commented(&records, &cfg.out_path, &comments)
        .map_err(|e| Failure::Run(e.to_string()))?;
    println!("wrote {} ({} cases)", cfg.out_path.display(), records.len());
    Ok(())
}

fn timescales(args: TimescalesArgs) -> Result<(), Failure> {
    let cfg = SweepConfig {
        eps_list: vec![args.eps],
        r_list: vec![args.r],
        threshold: args.threshold,
        t_max: args.t_max,
        n_override: args.n,
        observer_dt: args.observer_dt,
        out_path: PathBuf::new(),
        jobs: None,
    };
    let rec = run_case(args.eps, args.r, &cfg).map_err(classify)?;

    println!("# eps={}", args.eps);
    println!("# r={}", args.r);
    println!("# threshold={}", args.threshold);
    if let Some(t) = args.t_max {
        println!("# t_max={t}");
    }
    if let Some(n) = args.n {
        println!("# n={n}");
    }
    println!("# observer_dt={}", args.observer_dt);
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
    println!("flatten_rate = {}", opt(rec.flatten_rate));
    println!("leave_time = {}", opt(rec.leave_time));
    println!("arrive_time = {}", opt(rec.arrive_time));
    println!("regime = {}", rec.regime);
    println!("relative_transition = {}", opt(rec.relative_transition));
    Ok(())
}

fn converge(args: ConvergeArgs) -> Result<(), Failure> {
    let n = args
        .n
        .unwrap_or_else(|| shared_mesh(&args.eps, DEFAULT_N_FLOOR));
    if let Some(nf) = args.n {
        let rule = shared_mesh(&args.eps, Grid1D::MIN_INTERVALS);
        if nf < rule {
            eprintln!(
                "warning: n = {nf} does not resolve the smallest requested layer (rule wants n >= {rule})"
            );
        }
    }
    let ic = pick_ic(args.ic, args.a_u, args.a_v);
    let records = convergence_study(&args.eps, args.t_end, &ic, n, args.r).map_err(classify)?;

    let mut comments = vec![
        format!("eps_list={}", join(&args.eps)),
        format!("r={}", args.r),
        format!("t_end={}", args.t_end),
        format!("n={n}"),
        format!("dt={}", stable_dt(1.0 / n as f64)),
    ];
    if args.ic == IcKind::Smooth {
        comments.push(format!("a_u={}", args.a_u));
        comments.push(format!("a_v={}", args.a_v));
    }
    emit(&records, &comments, args.out.as_deref())
}

fn decay(args: DecayArgs) -> Result<(), Failure> {
    let ic = pick_ic(args.ic, args.a_u, args.a_v);
    let fit = decay_study(args.eps, args.r, &ic, args.t_max).map_err(classify)?;

    println!("# eps={}", args.eps);
    println!("# r={}", args.r);
    println!("# t_max={}", args.t_max);
    if args.ic == IcKind::Smooth {
        println!("# a_u={}", args.a_u);
        println!("# a_v={}", args.a_v);
    }
    println!("rate = {}", fit.rate);
    println!("intercept = {}", fit.intercept);
    println!("r_squared = {}", fit.r_squared);
    println!("window_start = {}", fit.window.0);
    println!("window_end = {}", fit.window.1);
    Ok(())
}
