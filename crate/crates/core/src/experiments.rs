//! Experiment harness: single (eps, r) cells, parameter sweeps, the
//! zero-diffusivity comparison, late-time decay fits, and CSV persistence.
//!
//! Every experiment is deterministic: same config, same records (the lone
//! exception is the `wall_time` column, which reports measured runtime).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::diagnostics::{
    detect_time_scales, fit_decay, sample, DecayFit, Regime, DEFAULT_THRESHOLD,
};
use crate::dynamics::{
    default_mesh, drive, stable_dt, stride_for, Flow, ModelParams, State, StepControl,
};
use crate::error::Error;
use crate::grid::{h1_sq, Field, Grid1D};
use crate::transform::{initial_average, InitialCondition};

/// Mesh floor when nothing finer is required by the layer rule.
pub const DEFAULT_N_FLOOR: usize = 64;

/// Default sampling interval in time units.
pub const DEFAULT_OBSERVER_DT: f64 = 0.01;

/// A sweep over the cartesian product eps_list x r_list.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub eps_list: Vec<f64>,
    pub r_list: Vec<f64>,
    pub threshold: f64,
    /// Per-case cutoff; `None` means 30 / r, generously above the observed
    /// arrival times (~22 / (10 r)).
    pub t_max: Option<f64>,
    pub n_override: Option<usize>,
    pub observer_dt: f64,
    pub out_path: PathBuf,
    /// Worker pool size for case execution; `None` = one per core.
    pub jobs: Option<usize>,
}

impl SweepConfig {
    /// The desk-scale grid: eps in {0.01, 0.1, 0.9} x r in {0.1, 0.01}.
    /// Small-eps/small-r corners need hundreds of millions of steps and are
    /// deliberately not part of the default.
    pub fn desk(out_path: impl Into<PathBuf>) -> Self {
        SweepConfig {
            eps_list: vec![0.01, 0.1, 0.9],
            r_list: vec![0.1, 0.01],
            threshold: DEFAULT_THRESHOLD,
            t_max: None,
            n_override: None,
            observer_dt: DEFAULT_OBSERVER_DT,
            out_path: out_path.into(),
            jobs: None,
        }
    }

    /// Reject structurally bad configs before any case runs.
    pub fn validate(&self) -> Result<(), Error> {
        if self.eps_list.is_empty() {
            return Err(Error::InvalidArgument {
                name: "eps_list",
                msg: "must not be empty".into(),
            });
        }
        if self.r_list.is_empty() {
            return Err(Error::InvalidArgument {
                name: "r_list",
                msg: "must not be empty".into(),
            });
        }
        for &eps in &self.eps_list {
            if !(eps.is_finite() && (0.0..1.0).contains(&eps)) {
                return Err(Error::ParamOutOfRange {
                    name: "eps_list entry",
                    value: eps,
                    requirement: "0 <= eps < 1",
                });
            }
        }
        for &r in &self.r_list {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::ParamOutOfRange {
                    name: "r_list entry",
                    value: r,
                    requirement: "r > 0",
                });
            }
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "threshold",
                value: self.threshold,
                requirement: "threshold > 0",
            });
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::ParamOutOfRange {
                    name: "t_max",
                    value: t,
                    requirement: "t_max > 0",
                });
            }
        }
        if !(self.observer_dt.is_finite() && self.observer_dt > 0.0) {
            return Err(Error::ParamOutOfRange {
                name: "observer_dt",
                value: self.observer_dt,
                requirement: "observer_dt > 0",
            });
        }
        if let Some(n) = self.n_override {
            Grid1D::new(n)?;
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidArgument {
                name: "jobs",
                msg: "worker count must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Classification column of a sweep row: a detected regime, or a marker that
/// the case itself failed (blow-up, lost positivity, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunRegime {
    Classified(Regime),
    Error,
}

impl From<Regime> for RunRegime {
    fn from(r: Regime) -> Self {
        RunRegime::Classified(r)
    }
}

impl std::fmt::Display for RunRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunRegime::Classified(r) => write!(f, "{r}"),
            RunRegime::Error => f.write_str("error"),
        }
    }
}

/// One sweep cell: the characteristic times of a single (eps, r) run.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRecord {
    pub eps: f64,
    pub r: f64,
    pub leave_time: Option<f64>,
    pub arrive_time: Option<f64>,
    pub regime: RunRegime,
    pub relative_transition: Option<f64>,
    /// 1 / t_flatten, the rate at which the initial data levels out.
    pub flatten_rate: Option<f64>,
    /// Measured case runtime in seconds (the one nondeterministic column).
    pub wall_time: f64,
}

impl TableRecord {
    fn failed(eps: f64, r: f64, wall_time: f64) -> Self {
        TableRecord {
            eps,
            r,
            leave_time: None,
            arrive_time: None,
            regime: RunRegime::Error,
            relative_transition: None,
            flatten_rate: None,
            wall_time,
        }
    }
}

/// One cell of the zero-diffusivity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub eps: f64,
    pub t_horizon: f64,
    /// sup over shared sample times of h1_sq(u_eps - u_0) + h1_sq(v_eps - v_0).
    pub sup_h1_sq_diff: f64,
}

/// Run one (eps, r) cell: square-wave/Gaussian data on the rule-based mesh,
/// integrated until arrival at carrying capacity is detected or t_max is hit,
/// then classified by [`detect_time_scales`].
pub fn run_case(eps: f64, r: f64, cfg: &SweepConfig) -> Result<TableRecord, Error> {
    let start = Instant::now();
    let p = ModelParams::new(eps, r)?;
    if !(cfg.threshold.is_finite() && cfg.threshold > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "threshold",
            value: cfg.threshold,
            requirement: "threshold > 0",
        });
    }
    let t_max = match cfg.t_max {
        Some(t) => t,
        None if r > 0.0 => 30.0 / r,
        None => {
            return Err(Error::InvalidArgument {
                name: "t_max",
                msg: "r = 0 never reaches carrying capacity; set an explicit cutoff".into(),
            })
        }
    };
    let n = cfg
        .n_override
        .unwrap_or_else(|| default_mesh(eps, DEFAULT_N_FLOOR));
    let g = Grid1D::new(n)?;
    let dt = stable_dt(g.dx());
    let ctrl = StepControl::new(n, dt, t_max, stride_for(cfg.observer_dt, dt))?;

    let s0 = State::from_ic(&InitialCondition::SquareWave, &g)?;
    let u_avg0 = initial_average(&s0.u, &g);
    let threshold = cfg.threshold;
    let mut samples = Vec::new();
    drive(s0, &p, &ctrl, &mut |s, g| {
        let smp = sample(s, g, u_avg0)?;
        let arrived = smp.l2_u_minus_1_sq < threshold;
        samples.push(smp);
        Ok(if arrived { Flow::Stop } else { Flow::Continue })
    })?;

    let report = detect_time_scales(&samples, threshold)?;
    Ok(TableRecord {
        eps,
        r,
        leave_time: report.t_leave,
        arrive_time: report.t_arrive,
        regime: report.regime.into(),
        relative_transition: report.relative_transition,
        flatten_rate: report.t_flatten.and_then(|t| (t > 0.0).then(|| 1.0 / t)),
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Run every cell of `eps_list x r_list` on a bounded worker pool, sort the
/// records by (eps, r), and persist them to `cfg.out_path`. A cell that fails
/// numerically becomes a `regime = error` row; the sweep keeps going.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<TableRecord>, Error> {
    cfg.validate()?;
    let mut cases = Vec::new();
    for &eps in &cfg.eps_list {
        for &r in &cfg.r_list {
            cases.push((eps, r));
        }
    }
    let workers = cfg
        .jobs
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .min(cases.len())
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument {
            name: "jobs",
            msg: e.to_string(),
        })?;
    let mut records: Vec<TableRecord> = pool.install(|| {
        cases
            .par_iter()
            .map(|&(eps, r)| {
                let start = Instant::now();
                run_case(eps, r, cfg)
                    .unwrap_or_else(|_| TableRecord::failed(eps, r, start.elapsed().as_secs_f64()))
            })
            .collect()
    });
    records.sort_by(|a, b| a.eps.total_cmp(&b.eps).then_with(|| a.r.total_cmp(&b.r)));
    write_csv(&records, &cfg.out_path)?;
    Ok(records)
}

/// Mesh satisfying the layer rule for the smallest positive entry of
/// `eps_list` (so one lattice serves the whole comparison).
pub fn shared_mesh(eps_list: &[f64], n_floor: usize) -> usize {
    let min_pos = eps_list
        .iter()
        .copied()
        .filter(|&e| e > 0.0)
        .fold(f64::INFINITY, f64::min);
    if min_pos.is_finite() {
        default_mesh(min_pos, n_floor)
    } else {
        n_floor.max(Grid1D::MIN_INTERVALS)
    }
}

/// Compare each eps > 0 run against the eps = 0 reference on one shared
/// space-time lattice (same n, same dt, same sample times), reporting the
/// sup over sampled times of the squared H1 differences. Growth rate `r` is
/// common to all runs.
pub fn convergence_study(
    eps_list: &[f64],
    t_horizon: f64,
    ic: &InitialCondition,
    n: usize,
    r: f64,
) -> Result<Vec<ConvergenceRecord>, Error> {
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument {
            name: "eps_list",
            msg: "must not be empty".into(),
        });
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument {
            name: "eps_list",
            msg: "must be sorted strictly descending".into(),
        });
    }
    if !(t_horizon.is_finite() && t_horizon > 0.0) {
        return Err(Error::ParamOutOfRange {
            name: "T",
            value: t_horizon,
            requirement: "T > 0",
        });
    }
    let g = Grid1D::new(n)?;
    let dt = stable_dt(g.dx());
    let ctrl = StepControl::new(n, dt, t_horizon, stride_for(DEFAULT_OBSERVER_DT, dt))?;

    let reference = sampled_states(&g, &ctrl, ic, 0.0, r)?;
    let mut out = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let states = sampled_states(&g, &ctrl, ic, eps, r)?;
        debug_assert_eq!(states.len(), reference.len());
        let mut sup = 0.0f64;
        for ((u_eps, v_eps), (u_ref, v_ref)) in states.iter().zip(&reference) {
            let d = h1_sq_diff(u_eps, u_ref, &g) + h1_sq_diff(v_eps, v_ref, &g);
            sup = sup.max(d);
        }
        out.push(ConvergenceRecord {
            eps,
            t_horizon,
            sup_h1_sq_diff: sup,
        });
    }
    Ok(out)
}

fn sampled_states(
    g: &Grid1D,
    ctrl: &StepControl,
    ic: &InitialCondition,
    eps: f64,
    r: f64,
) -> Result<Vec<(Field, Field)>, Error> {
    let p = ModelParams::new(eps, r)?;
    let s0 = State::from_ic(ic, g)?;
    let mut states = Vec::new();
    drive(s0, &p, ctrl, &mut |s, _| {
        states.push((s.u.clone(), s.v.clone()));
        Ok(Flow::Continue)
    })?;
    Ok(states)
}

fn h1_sq_diff(a: &Field, b: &Field, g: &Grid1D) -> f64 {
    let mut d = Field::zeros(g);
    for ((dst, &x), &y) in d.slots_mut().iter_mut().zip(a.slots()).zip(b.slots()) {
        *dst = x - y;
    }
    h1_sq(&d, g)
}

/// Integrate to `t_max`, locate the arrival time, and fit the exponential
/// tail of ||u - 1||^2 + ||v||^2 on (t_arrive, t_max).
pub fn decay_study(eps: f64, r: f64, ic: &InitialCondition, t_max: f64) -> Result<DecayFit, Error> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::ParamOutOfRange {
            name: "eps",
            value: eps,
            requirement: "eps > 0",
        });
    }
    let p = ModelParams::new(eps, r)?;
    let n = default_mesh(eps, DEFAULT_N_FLOOR);
    let g = Grid1D::new(n)?;
    // Integrating far past arrival exactly at the diffusive stability bound
    // is not safe: there the grid-scale mode of the u-update is neutral, and
    // linearizing the logistic term about u = 1 tips it into e^{rt} growth
    // that eventually swamps the decaying tail. A 10% margin damps it.
    let dt = 0.9 * stable_dt(g.dx());
    let ctrl = StepControl::new(n, dt, t_max, stride_for(DEFAULT_OBSERVER_DT, dt))?;
    let s0 = State::from_ic(ic, &g)?;
    let u_avg0 = initial_average(&s0.u, &g);
    let mut samples = Vec::new();
    drive(s0, &p, &ctrl, &mut |s, g| {
        samples.push(sample(s, g, u_avg0)?);
        Ok(Flow::Continue)
    })?;
    let report = detect_time_scales(&samples, DEFAULT_THRESHOLD)?;
    let t_arrive = report.t_arrive.ok_or(Error::ArrivalNotReached { t_max })?;
    fit_decay(&samples, t_arrive, t_max)
}

/// A record type that knows its CSV shape.
pub trait CsvRecord {
    /// Comma-joined column names.
    fn header() -> &'static str;
    /// One comma-joined row; optional fields empty when absent.
    fn row(&self) -> String;
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl CsvRecord for TableRecord {
    fn header() -> &'static str {
        "eps,r,leave_time,arrive_time,regime,relative_transition,flatten_rate,wall_time"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.eps,
            self.r,
            cell(self.leave_time),
            cell(self.arrive_time),
            self.regime,
            cell(self.relative_transition),
            cell(self.flatten_rate),
            self.wall_time
        )
    }
}

impl CsvRecord for ConvergenceRecord {
    fn header() -> &'static str {
        "eps,T,sup_h1_sq_diff"
    }

    fn row(&self) -> String {
        format!("{},{},{}", self.eps, self.t_horizon, self.sup_h1_sq_diff)
    }
}

/// Header plus one row per record, UTF-8, LF endings, full-precision floats.
pub fn write_csv<R: CsvRecord>(records: &[R], path: &Path) -> Result<(), Error> {
    write_csv_commented(records, path, &[])
}

/// Like [`write_csv`] but with leading `# ...` comment lines, used by the
/// CLI to echo effective parameters into the artifact.
pub fn write_csv_commented<R: CsvRecord>(
    records: &[R],
    path: &Path,
    comments: &[String],
) -> Result<(), Error> {
    std::fs::write(path, render_csv(records, comments)).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

/// The exact bytes [`write_csv_commented`] persists.
pub fn render_csv<R: CsvRecord>(records: &[R], comments: &[String]) -> String {
    let mut text = String::new();
    for line in comments {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(R::header());
    text.push('\n');
    for rec in records {
        text.push_str(&rec.row());
        text.push('\n');
    }
    text
}

/// Parse the plain-text sweep config format: `key = value` lines, `#`
/// comments, lists comma-separated. Unknown keys are an error. Missing keys
/// keep the desk-scale defaults.
pub fn parse_config(text: &str) -> Result<SweepConfig, Error> {
    let mut cfg = SweepConfig::desk("sweep.csv");
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| Error::Config {
            line,
            msg: format!("expected `key = value`, got `{stripped}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "eps_list" => cfg.eps_list = parse_list(value, line)?,
            "r_list" => cfg.r_list = parse_list(value, line)?,
            "threshold" => cfg.threshold = parse_num(value, line)?,
            "t_max" => cfg.t_max = Some(parse_num(value, line)?),
            "n_override" => cfg.n_override = Some(parse_int(value, line)?),
            "observer_dt" => cfg.observer_dt = parse_num(value, line)?,
            "out_path" => cfg.out_path = PathBuf::from(value),
            "jobs" => cfg.jobs = Some(parse_int(value, line)?),
            other => {
                return Err(Error::Config {
                    line,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    Ok(cfg)
}

fn parse_num(s: &str, line: usize) -> Result<f64, Error> {
    s.parse().map_err(|_| Error::Config {
        line,
        msg: format!("`{s}` is not a number"),
    })
}

fn parse_int(s: &str, line: usize) -> Result<usize, Error> {
    s.parse().map_err(|_| Error::Config {
        line,
        msg: format!("`{s}` is not a nonnegative integer"),
    })
}

fn parse_list(s: &str, line: usize) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|item| parse_num(item.trim(), line))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_config_is_valid() {
        assert!(SweepConfig::desk("out.csv").validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = SweepConfig::desk("out.csv");
        cfg.eps_list.clear();
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::desk("out.csv");
        cfg.r_list = vec![0.0];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::desk("out.csv");
        cfg.eps_list = vec![1.0];
        assert!(cfg.validate().is_err());

        let mut cfg = SweepConfig::desk("out.csv");
        cfg.jobs = Some(0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_text_round_trip() {
        let text = "\
# comment line
eps_list = 0.5, 0.25
r_list = 0.2
threshold = 0.05   # trailing comment
t_max = 7.5
n_override = 32
observer_dt = 0.02
out_path = runs/table.csv
jobs = 2
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.eps_list, vec![0.5, 0.25]);
        assert_eq!(cfg.r_list, vec![0.2]);
        assert_eq!(cfg.threshold, 0.05);
        assert_eq!(cfg.t_max, Some(7.5));
        assert_eq!(cfg.n_override, Some(32));
        assert_eq!(cfg.observer_dt, 0.02);
        assert_eq!(cfg.out_path, PathBuf::from("runs/table.csv"));
        assert_eq!(cfg.jobs, Some(2));
    }

    #[test]
    fn config_defaults_survive_partial_files() {
        let cfg = parse_config("r_list = 0.3\n").unwrap();
        assert_eq!(cfg.eps_list, vec![0.01, 0.1, 0.9]);
        assert_eq!(cfg.r_list, vec![0.3]);
        assert_eq!(cfg.threshold, DEFAULT_THRESHOLD);
    }

    #[test]
    fn config_rejects_unknown_keys_and_junk() {
        assert!(matches!(
            parse_config("speed = 9\n"),
            Err(Error::Config { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("eps_list = 0.1\nthreshold ten\n"),
            Err(Error::Config { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("threshold = fast\n"),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn csv_rows_render_byte_stable_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let records = vec![TableRecord {
            eps: 0.1,
            r: 0.25,
            leave_time: Some(4.5),
            arrive_time: None,
            regime: RunRegime::Classified(Regime::Incomplete),
            relative_transition: None,
            flatten_rate: Some(2.0),
            wall_time: 0.5,
        }];
        write_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "eps,r,leave_time,arrive_time,regime,relative_transition,flatten_rate,wall_time\n\
             0.1,0.25,4.5,,incomplete,,2,0.5\n"
        );
    }

    #[test]
    fn empty_record_list_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv::<ConvergenceRecord>(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "eps,T,sup_h1_sq_diff\n"
        );
    }

    #[test]
    fn unwritable_path_reports_the_path() {
        let err = write_csv::<ConvergenceRecord>(&[], Path::new("/no/such/dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/no/such/dir/x.csv"));
    }

    #[test]
    fn shared_mesh_uses_smallest_positive_eps() {
        assert_eq!(shared_mesh(&[0.2, 0.1, 0.0125], 64), 64);
        assert_eq!(shared_mesh(&[0.2, 1e-4], 64), 317);
        assert_eq!(shared_mesh(&[0.0], 64), 64);
    }

    #[test]
    fn run_case_without_growth_is_incomplete() {
        let mut cfg = SweepConfig::desk("unused.csv");
        cfg.t_max = Some(5.0);
        let rec = run_case(0.5, 0.0, &cfg).unwrap();
        assert_eq!(rec.regime, RunRegime::Classified(Regime::Incomplete));
        assert_eq!(rec.arrive_time, None);
    }

    #[test]
    fn run_case_with_zero_growth_needs_explicit_cutoff() {
        let cfg = SweepConfig::desk("unused.csv");
        assert!(matches!(
            run_case(0.5, 0.0, &cfg),
            Err(Error::InvalidArgument { name: "t_max", .. })
        ));
    }

    #[test]
    fn decay_study_without_growth_reports_no_arrival() {
        let err = decay_study(0.5, 0.0, &InitialCondition::SquareWave, 2.0).unwrap_err();
        assert!(matches!(err, Error::ArrivalNotReached { .. }));
    }

    #[test]
    fn trivial_convergence_of_reference_against_itself() {
        let recs = convergence_study(
            &[0.0],
            0.05,
            &InitialCondition::SmoothCosine { a_u: 0.2, a_v: 0.2 },
            16,
            0.1,
        )
        .unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].sup_h1_sq_diff, 0.0);
    }

    #[test]
    fn convergence_study_rejects_unsorted_lists() {
        let ic = InitialCondition::SmoothCosine { a_u: 0.2, a_v: 0.2 };
        assert!(convergence_study(&[0.1, 0.2], 1.0, &ic, 16, 0.1).is_err());
        assert!(convergence_study(&[], 1.0, &ic, 16, 0.1).is_err());
    }

    #[test]
    fn single_cell_sweep_matches_run_case() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = SweepConfig::desk(dir.path().join("one.csv"));
        cfg.eps_list = vec![0.5];
        cfg.r_list = vec![0.5];
        cfg.threshold = 0.05;
        cfg.t_max = Some(12.0);
        let direct = run_case(0.5, 0.5, &cfg).unwrap();
        let swept = run_sweep(&cfg).unwrap();
        assert_eq!(swept.len(), 1);
        assert_eq!(swept[0].leave_time, direct.leave_time);
        assert_eq!(swept[0].arrive_time, direct.arrive_time);
        assert_eq!(swept[0].regime, direct.regime);
        assert!(cfg.out_path.exists());
    }

    #[test]
    fn sweep_rows_are_deterministic_apart_from_wall_time() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = SweepConfig::desk(dir.path().join("det.csv"));
        cfg.eps_list = vec![0.3, 0.6];
        cfg.r_list = vec![0.5];
        cfg.threshold = 0.05;
        cfg.t_max = Some(8.0);
        cfg.jobs = Some(2);
        let strip_wall = |recs: &[TableRecord]| -> Vec<String> {
            recs.iter()
                .map(|rec| {
                    let row = rec.row();
                    row.rsplit_once(',').unwrap().0.to_string()
                })
                .collect()
        };
        let a = strip_wall(&run_sweep(&cfg).unwrap());
        let b = strip_wall(&run_sweep(&cfg).unwrap());
        assert_eq!(a, b);
    }
}
