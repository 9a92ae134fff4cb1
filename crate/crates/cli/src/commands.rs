use std::path::Path;
use std::time::Instant;

use arbk::experiments::{
    condition_number, generate as generate_problem, parse_trial_csv, run_trials, AggregateTable,
    GeneratedProblem, ProblemSource, ProblemSpec, TrialSetup,
};
use arbk::solvers::{run, SolverOptions, StoppingRule};
use arbk::ProblemFile;
use log::info;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{read_to_string, write_atomic};
use crate::svg;
use crate::{CompareArgs, GenerateArgs, PlotArgs, SolveArgs};

pub const COMPARE_CSV: &str = "compare.csv";
pub const COMPARE_META: &str = "compare.meta.json";
pub const RESIDUALS_SVG: &str = "residuals.svg";
pub const ERRORS_SVG: &str = "errors.svg";

fn load_problem(path: &Path) -> CliResult<GeneratedProblem> {
    let body = read_to_string(path)?;
    let file = ProblemFile::from_json(&body)?;
    Ok(GeneratedProblem::from_file(&file)?)
}

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let spec = ProblemSpec::new(args.m, args.n, args.lambda, args.seed)?;
    info!(
        "generating {}x{} problem, lambda={}",
        args.m, args.n, args.lambda
    );
    let problem = generate_problem(&spec)?;
    write_atomic(&args.out, &problem.to_file().to_json())?;
    println!("sparsity={}", problem.sparsity);
    if let Some(kappa) = condition_number(&problem.sys) {
        println!("kappa={kappa:e}");
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    let problem = load_problem(&args.problem)?;
    let stop = StoppingRule {
        max_epochs: args.epochs,
        residual_tol: args.tol,
    };
    let opts = SolverOptions {
        theta0: args.theta0,
        ..SolverOptions::default()
    };
    let started = Instant::now();
    let out = run(
        args.method,
        &problem.sys,
        &problem.potential(),
        &problem.x_hat,
        args.seed,
        stop,
        &opts,
    )?;
    let wall = started.elapsed();
    write_atomic(&args.out, &out.log.to_csv())?;
    let last = out.log.last().expect("log holds the starting point");
    println!(
        "method={} epochs={} iterations={} converged={} rel_residual={:e} rel_error={:e} bregman={:e} wall_time_s={:.3}",
        args.method,
        last.epoch,
        out.iterations,
        out.converged,
        last.metrics.rel_residual,
        last.metrics.rel_error,
        last.metrics.bregman,
        wall.as_secs_f64()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct CompareMeta<'a> {
    version: &'static str,
    problem: ProblemMeta,
    methods: Vec<&'static str>,
    trials: usize,
    epochs: usize,
    residual_tol: f64,
    theta0: Option<f64>,
    seed_base: u64,
    trial_seeds: Vec<u64>,
    sparsity: Vec<usize>,
    kappa: Option<f64>,
    outputs: [&'a str; 3],
}

#[derive(Debug, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
enum ProblemMeta {
    Generated {
        m: usize,
        n: usize,
        lambda: f64,
    },
    File {
        path: String,
        m: usize,
        n: usize,
        lambda: f64,
    },
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let (source, problem_meta) = match (&args.problem, args.m, args.n, args.lambda) {
        (Some(path), ..) => {
            let p = load_problem(path)?;
            let meta = ProblemMeta::File {
                path: path.display().to_string(),
                m: p.spec.m,
                n: p.spec.n,
                lambda: p.spec.lambda,
            };
            (ProblemSource::Fixed(Box::new(p)), meta)
        }
        (None, Some(m), Some(n), Some(lambda)) => (
            ProblemSource::Generate(ProblemSpec::new(m, n, lambda, args.seed)?),
            ProblemMeta::Generated { m, n, lambda },
        ),
        _ => {
            return Err(CliError::Usage(
                "compare needs either --problem or all of --m, --n and --lambda".into(),
            ))
        }
    };

    let mut methods = args.methods.clone();
    methods.sort();
    methods.dedup();
    let mut setup = TrialSetup::new(
        methods.clone(),
        args.trials,
        StoppingRule {
            max_epochs: args.epochs,
            residual_tol: args.tol,
        },
        args.seed,
    );
    setup.theta0 = args.theta0;

    info!(
        "running {} trials of {:?} for {} epochs",
        args.trials,
        methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        args.epochs
    );
    let cmp = run_trials(&source, &setup)?;

    let kappa = match &source {
        ProblemSource::Fixed(p) => condition_number(&p.sys),
        ProblemSource::Generate(spec) => {
            condition_number(&generate_problem(&spec.with_seed(setup.trial_seed(0)))?.sys)
        }
    };

    let meta = CompareMeta {
        version: arbk::VERSION,
        problem: problem_meta,
        methods: methods.iter().map(|m| m.name()).collect(),
        trials: args.trials,
        epochs: args.epochs,
        residual_tol: args.tol,
        theta0: args.theta0,
        seed_base: args.seed,
        trial_seeds: cmp.trials.iter().map(|t| t.seed).collect(),
        sparsity: cmp.trials.iter().map(|t| t.sparsity).collect(),
        kappa,
        outputs: [COMPARE_CSV, RESIDUALS_SVG, ERRORS_SVG],
    };

    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let dir = &args.out_dir;
    let residuals = render_table(&cmp.table, "rel_residual");
    let errors = render_table(&cmp.table, "rel_error");
    write_atomic(&dir.join(COMPARE_CSV), &cmp.table.to_csv())?;
    write_atomic(
        &dir.join(COMPARE_META),
        &(serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n"),
    )?;
    write_atomic(&dir.join(RESIDUALS_SVG), &residuals)?;
    write_atomic(&dir.join(ERRORS_SVG), &errors)?;

    let last = args.epochs;
    for m in &methods {
        let at = |metric| {
            cmp.table
                .rows
                .iter()
                .rev()
                .find(|r| r.method == m.name() && r.metric == metric && r.epoch <= last)
                .map(|r| r.stats.mean)
                .unwrap_or(f64::NAN)
        };
        println!(
            "method={} mean_rel_residual={:e} mean_rel_error={:e}",
            m,
            at("rel_residual"),
            at("rel_error")
        );
    }
    Ok(())
}

fn render_table(table: &AggregateTable, metric: &str) -> String {
    svg::render(&svg::series_from_table(table, metric), metric)
}

pub fn plot(args: &PlotArgs) -> CliResult<()> {
    let body = read_to_string(&args.input)?;
    let is_table = body
        .lines()
        .next()
        .is_some_and(|h| h.split(',').next() == Some("method"));
    let rendered = if is_table {
        let table = AggregateTable::from_csv(&body)?;
        render_table(&table, &args.metric)
    } else {
        let records = parse_trial_csv(&body)?;
        let series = svg::series_from_log(&records, &args.metric, &args.label);
        svg::render(&[series], &args.metric)
    };
    write_atomic(&args.out, &rendered)?;
    Ok(())
}
