//! Synthetic problem generation, per-epoch metrics and multi-trial
//! aggregation.
//!
//! Problems follow the usual sparse-recovery recipe: `A` has i.i.d. standard
//! normal entries, a Gaussian dual vector `y` gives the reference solution
//! `x̂ = S_λ(Aᵀy)`, and `b = A x̂`. Because `x̂ = ∇f*(Aᵀy)` and `A x̂ = b`,
//! `x̂` is the exact minimizer of `f` over `{Ax = b}` and `y` is a dual
//! optimum.
//!
//! Gaussian draws use `rand_distr::StandardNormal` (ziggurat) over a
//! `ChaCha8Rng` seeded by `seed_from_u64(seed)` on stream 0. `A` is drawn
//! row by row, then `y`; a zero `x̂` triggers a fresh `y`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{LinearSystem, ProblemFile};
use crate::potentials::Potential;
use crate::solvers::{run, Method, SolverOptions, StoppingRule};
use crate::vecops::{dist, norm};

/// Redraws of `y` allowed before giving up on a zero reference solution.
pub const MAX_TARGET_ATTEMPTS: usize = 100;

/// Largest dimension for which the condition number is computed.
pub const KAPPA_MAX_DIM: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn new(m: usize, n: usize, lambda: f64, seed: u64) -> Result<Self> {
        let spec = Self { m, n, lambda, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidArgument(format!(
                "m and n must be at least 1, got m={} n={}",
                self.m, self.n
            )));
        }
        Potential::new(self.lambda)?;
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub spec: ProblemSpec,
    pub sys: LinearSystem,
    pub x_hat: Vec<f64>,
    /// The Gaussian dual vector that produced `x_hat`.
    pub y: Vec<f64>,
    pub sparsity: usize,
}

impl GeneratedProblem {
    pub fn potential(&self) -> Potential {
        Potential::new(self.spec.lambda).expect("validated at generation")
    }

    pub fn to_file(&self) -> ProblemFile {
        ProblemFile::from_system(
            &self.sys,
            self.spec.lambda,
            self.x_hat.clone(),
            self.spec.seed,
        )
    }

    pub fn from_file(file: &ProblemFile) -> Result<Self> {
        let sys = file.to_system()?;
        let spec = ProblemSpec::new(file.m, file.n, file.lambda, file.seed)?;
        let sparsity = count_nonzeros(&file.x_hat);
        Ok(Self {
            spec,
            sys,
            x_hat: file.x_hat.clone(),
            y: Vec::new(),
            sparsity,
        })
    }
}

fn count_nonzeros(v: &[f64]) -> usize {
    v.iter().filter(|x| **x != 0.0).count()
}

pub fn generate(spec: &ProblemSpec) -> Result<GeneratedProblem> {
    spec.validate()?;
    let p = Potential::new(spec.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a: Vec<f64> = (0..spec.m * spec.n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    // b is filled in once x̂ is known; the placeholder only fixes the shape.
    let shape = LinearSystem::from_row_major(spec.m, spec.n, a, vec![0.0; spec.m])?;

    for _ in 0..MAX_TARGET_ATTEMPTS {
        let y: Vec<f64> = (0..spec.m)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let x_hat = p.conj_grad(&shape.apply_transpose(&y)?);
        let sparsity = count_nonzeros(&x_hat);
        if sparsity == 0 {
            continue;
        }
        let b = shape.apply(&x_hat)?;
        let sys = LinearSystem::from_row_major(spec.m, spec.n, shape.row_major().to_vec(), b)?;
        return Ok(GeneratedProblem {
            spec: *spec,
            sys,
            x_hat,
            y,
            sparsity,
        });
    }
    Err(Error::DegenerateTarget {
        attempts: MAX_TARGET_ATTEMPTS,
    })
}

/// `σ_max / σ_min` over the `min(m, n)` singular values, or `None` above
/// [`KAPPA_MAX_DIM`].
pub fn condition_number(sys: &LinearSystem) -> Option<f64> {
    if sys.rows() > KAPPA_MAX_DIM || sys.cols() > KAPPA_MAX_DIM {
        return None;
    }
    let a = nalgebra::DMatrix::from_row_slice(sys.rows(), sys.cols(), sys.row_major());
    let sv = a.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(max / min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rel_residual: f64,
    pub rel_error: f64,
    /// `D_f^{x*}(x, x̂)`
    pub bregman: f64,
}

/// Metric names in lexical order, as used in aggregated output.
pub const METRIC_NAMES: [&str; 3] = ["bregman", "rel_error", "rel_residual"];

impl Metrics {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "bregman" => Some(self.bregman),
            "rel_error" => Some(self.rel_error),
            "rel_residual" => Some(self.rel_residual),
            _ => None,
        }
    }
}

/// Relative residual, relative error and Bregman distance to `x̂` of the
/// iterate `x = ∇f*(x*)`.
pub fn metrics(
    sys: &LinearSystem,
    p: &Potential,
    x: &[f64],
    x_star: &[f64],
    x_hat: &[f64],
) -> Result<Metrics> {
    if x_hat.len() != sys.cols() {
        return Err(Error::DimensionMismatch {
            what: "reference solution",
            expected: sys.cols(),
            found: x_hat.len(),
        });
    }
    if x.len() != sys.cols() || x_star.len() != sys.cols() {
        return Err(Error::DimensionMismatch {
            what: "iterate",
            expected: sys.cols(),
            found: x.len().min(x_star.len()),
        });
    }
    let b_norm = sys.rhs_norm();
    let ref_norm = norm(x_hat);
    if b_norm == 0.0 || ref_norm == 0.0 {
        return Err(Error::InvalidArgument(
            "relative metrics need nonzero b and x_hat".into(),
        ));
    }
    Ok(Metrics {
        rel_residual: sys.residual(x)? / b_norm,
        rel_error: dist(x, x_hat) / ref_norm,
        bregman: p.bregman_from_dual(x_star, x_hat)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub metrics: Metrics,
}

impl EpochRecord {
    pub fn new(epoch: usize, metrics: Metrics) -> Self {
        Self { epoch, metrics }
    }
}

/// Per-epoch metrics of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub method: Method,
    pub seed: u64,
    pub records: Vec<EpochRecord>,
}

impl TrialLog {
    pub const CSV_HEADER: &'static str = "epoch,rel_residual,rel_error,bregman";

    pub fn new(method: Method, seed: u64) -> Self {
        Self {
            method,
            seed,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, rec: EpochRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.epoch < rec.epoch));
        self.records.push(rec);
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }

    /// Metrics at `epoch`, carrying the final record forward if the run
    /// stopped earlier.
    pub fn at_epoch(&self, epoch: usize) -> Option<&Metrics> {
        match self.records.binary_search_by_key(&epoch, |r| r.epoch) {
            Ok(i) => Some(&self.records[i].metrics),
            Err(i) if i == self.records.len() => self.records.last().map(|r| &r.metrics),
            Err(_) => None,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e}",
                r.epoch, m.rel_residual, m.rel_error, m.bregman
            );
        }
        out
    }
}

/// Where each trial's problem comes from.
#[derive(Debug, Clone)]
pub enum ProblemSource {
    /// A fresh problem per trial, generated with the trial seed.
    Generate(ProblemSpec),
    /// One fixed problem; trials differ only in the row stream.
    Fixed(Box<GeneratedProblem>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSetup {
    pub methods: Vec<Method>,
    pub trials: usize,
    pub stop: StoppingRule,
    pub seed_base: u64,
    pub theta0: Option<f64>,
    pub constant_theta: bool,
}

impl TrialSetup {
    pub fn new(methods: Vec<Method>, trials: usize, stop: StoppingRule, seed_base: u64) -> Self {
        Self {
            methods,
            trials,
            stop,
            seed_base,
            theta0: None,
            constant_theta: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one method is required".into(),
            ));
        }
        self.stop.validate()
    }

    fn options(&self) -> SolverOptions {
        SolverOptions {
            theta0: self.theta0,
            constant_theta: self.constant_theta,
            ..SolverOptions::default()
        }
    }

    pub fn trial_seed(&self, t: usize) -> u64 {
        self.seed_base.wrapping_add(t as u64)
    }
}

/// Output of one trial: the problem statistics and one log per method.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub sparsity: usize,
    pub logs: Vec<TrialLog>,
}

/// Runs every method in `setup.methods` on the problem of trial `t`.
///
/// All methods share the problem and the row-index stream of the trial.
pub fn run_trial(source: &ProblemSource, setup: &TrialSetup, t: usize) -> Result<TrialResult> {
    let seed = setup.trial_seed(t);
    let generated;
    let problem = match source {
        ProblemSource::Generate(spec) => {
            generated = generate(&spec.with_seed(seed))?;
            &generated
        }
        ProblemSource::Fixed(p) => p.as_ref(),
    };
    let pot = problem.potential();
    let opts = setup.options();
    let logs = setup
        .methods
        .iter()
        .map(|&m| {
            run(
                m,
                &problem.sys,
                &pot,
                &problem.x_hat,
                seed,
                setup.stop,
                &opts,
            )
            .map(|o| o.log)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialResult {
        seed,
        sparsity: problem.sparsity,
        logs,
    })
}

/// All trials on the calling thread, in order.
pub fn run_trials_sequential(source: &ProblemSource, setup: &TrialSetup) -> Result<Comparison> {
    setup.validate()?;
    let results = (0..setup.trials)
        .map(|t| run_trial(source, setup, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison::from_results(setup, results))
}

/// Trials spread over the rayon pool. Results are identical to
/// [`run_trials_sequential`]: each trial owns its sampler and state, and the
/// reduction runs after collection in trial order.
#[cfg(feature = "parallel")]
pub fn run_trials_parallel(source: &ProblemSource, setup: &TrialSetup) -> Result<Comparison> {
    use rayon::prelude::*;
    setup.validate()?;
    let results = (0..setup.trials)
        .into_par_iter()
        .map(|t| run_trial(source, setup, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison::from_results(setup, results))
}

/// Runs all trials, in parallel when the `parallel` feature is enabled.
pub fn run_trials(source: &ProblemSource, setup: &TrialSetup) -> Result<Comparison> {
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(source, setup)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(source, setup)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub trials: Vec<TrialResult>,
    pub table: AggregateTable,
}

impl Comparison {
    fn from_results(setup: &TrialSetup, trials: Vec<TrialResult>) -> Self {
        let table = AggregateTable::from_trials(&setup.methods, &trials);
        Self { trials, table }
    }

    /// Logs of `method` across trials, in trial order.
    pub fn logs_for(&self, method: Method) -> impl Iterator<Item = &TrialLog> {
        self.trials
            .iter()
            .flat_map(move |t| t.logs.iter().filter(move |l| l.method == method))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// Summary statistics of a nonempty sample. The mean sums in input order.
    pub fn of(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "summary of an empty sample");
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        Self {
            mean,
            median,
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub epoch: usize,
    pub metric: String,
    pub stats: Summary,
}

/// Per-(method, epoch, metric) statistics across trials.
///
/// Rows are ordered by method name, then epoch, then metric name. Trials that
/// stopped early contribute their final record to later epochs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AggregateTable {
    pub rows: Vec<AggregateRow>,
}

impl AggregateTable {
    pub const CSV_HEADER: &'static str = "method,epoch,metric,mean,median,min,max";
    pub const COLUMNS: [&'static str; 7] =
        ["method", "epoch", "metric", "mean", "median", "min", "max"];

    pub fn from_trials(methods: &[Method], trials: &[TrialResult]) -> Self {
        let mut methods = methods.to_vec();
        methods.sort_by_key(|m| m.name());
        methods.dedup();
        let mut rows = Vec::new();
        for method in methods {
            let logs: Vec<&TrialLog> = trials
                .iter()
                .flat_map(|t| t.logs.iter().filter(|l| l.method == method))
                .collect();
            rows.extend(Self::aggregate_logs(method.name(), &logs));
        }
        Self { rows }
    }

    fn aggregate_logs(method: &str, logs: &[&TrialLog]) -> Vec<AggregateRow> {
        let last_epoch = logs.iter().filter_map(|l| l.last().map(|r| r.epoch)).max();
        let Some(last_epoch) = last_epoch else {
            return Vec::new();
        };
        let mut rows = Vec::new();
        for epoch in 0..=last_epoch {
            let at: Vec<&Metrics> = logs.iter().filter_map(|l| l.at_epoch(epoch)).collect();
            if at.is_empty() {
                continue;
            }
            for name in METRIC_NAMES {
                let values: Vec<f64> = at.iter().map(|m| m.get(name).unwrap()).collect();
                rows.push(AggregateRow {
                    method: method.to_string(),
                    epoch,
                    metric: name.to_string(),
                    stats: Summary::of(&values),
                });
            }
        }
        rows
    }

    pub fn get(&self, method: &str, epoch: usize, metric: &str) -> Option<&Summary> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.epoch == epoch && r.metric == metric)
            .map(|r| &r.stats)
    }

    pub fn methods(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.rows.iter().map(|r| r.method.as_str()).collect();
        out.dedup();
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let s = &r.stats;
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e},{:e},{:e}",
                r.method, r.epoch, r.metric, s.mean, s.median, s.min, s.max
            );
        }
        out
    }
}

fn check_header(header: Option<&str>, expected: &[&str]) -> Result<()> {
    let header = header.ok_or_else(|| Error::MalformedCsv("missing header".into()))?;
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    for (pos, want) in expected.iter().enumerate() {
        match cols.get(pos) {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(Error::MalformedCsv(format!(
                    "unexpected column '{got}' at position {} (expected '{want}')",
                    pos + 1
                )))
            }
            None => {
                return Err(Error::MalformedCsv(format!("missing column '{want}'")));
            }
        }
    }
    if let Some(extra) = cols.get(expected.len()) {
        return Err(Error::MalformedCsv(format!("unexpected column '{extra}'")));
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, column: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| {
        Error::MalformedCsv(format!(
            "line {line}: cannot parse '{field}' in column '{column}'"
        ))
    })
}

fn data_lines(body: &str) -> impl Iterator<Item = (usize, &str)> {
    body.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
}

fn split_fields(line: &str, lineno: usize, width: usize) -> Result<Vec<&str>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != width {
        return Err(Error::MalformedCsv(format!(
            "line {lineno}: expected {width} fields, found {}",
            fields.len()
        )));
    }
    Ok(fields)
}

/// Parses the single-run log written by [`TrialLog::to_csv`].
pub fn parse_trial_csv(body: &str) -> Result<Vec<EpochRecord>> {
    const COLS: [&str; 4] = ["epoch", "rel_residual", "rel_error", "bregman"];
    check_header(body.lines().next(), &COLS)?;
    let mut out = Vec::new();
    for (lineno, line) in data_lines(body) {
        let f = split_fields(line, lineno, COLS.len())?;
        out.push(EpochRecord::new(
            parse_field(f[0], COLS[0], lineno)?,
            Metrics {
                rel_residual: parse_field(f[1], COLS[1], lineno)?,
                rel_error: parse_field(f[2], COLS[2], lineno)?,
                bregman: parse_field(f[3], COLS[3], lineno)?,
            },
        ));
    }
    if out.is_empty() {
        return Err(Error::MalformedCsv("no data rows".into()));
    }
    Ok(out)
}

impl AggregateTable {
    /// Parses the output of [`AggregateTable::to_csv`].
    pub fn from_csv(body: &str) -> Result<Self> {
        let cols = Self::COLUMNS;
        check_header(body.lines().next(), &cols)?;
        let mut rows = Vec::new();
        for (lineno, line) in data_lines(body) {
            let f = split_fields(line, lineno, cols.len())?;
            if !METRIC_NAMES.contains(&f[2]) {
                return Err(Error::MalformedCsv(format!(
                    "line {lineno}: unknown metric '{}'",
                    f[2]
                )));
            }
            rows.push(AggregateRow {
                method: f[0].to_string(),
                epoch: parse_field(f[1], cols[1], lineno)?,
                metric: f[2].to_string(),
                stats: Summary {
                    mean: parse_field(f[3], cols[3], lineno)?,
                    median: parse_field(f[4], cols[4], lineno)?,
                    min: parse_field(f[5], cols[5], lineno)?,
                    max: parse_field(f[6], cols[6], lineno)?,
                },
            });
        }
        if rows.is_empty() {
            return Err(Error::MalformedCsv("no data rows".into()));
        }
        Ok(Self { rows })
    }
}
