//! Subcommand definitions and their implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use fracdecomp::oracle::{gl_direct_solve, manufacture};
use fracdecomp::stepper::reconstruct_derivatives;
use fracdecomp::{solve, Config, Error, EulerSweep, Inversion, OperatorOrder, Problem, Series, Solution};

use crate::csvio::{read_uniform_series, CsvError, CsvTable};
use crate::problem_file::{ParseError, ProblemFile};
use crate::verify::{self, VerifyOptions};

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            Error::NumericalFailure { .. } | Error::Singular(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracdecomp", version, about = "Fractional differential equations by decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file and write `t,y[,z1][,dy1…]`.
    Solve(SolveArgs),
    /// Sup-norm errors and observed orders over a list of steps.
    Convergence(ConvergenceArgs),
    /// Apply a fractional operator to sampled data in a `t,value` CSV.
    Apply(ApplyArgs),
    /// Run the built-in property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InversionArg {
    Babenko,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    TopDown,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Gl,
    #[value(name = "self")]
    SelfRef,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{}` is not a number", s))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive and finite, got {}", s))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Inversion of the combined temporary function (dependent problems).
    #[arg(long, value_enum, default_value = "direct")]
    pub inversion: InversionArg,
    /// Number of Babenko series terms.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..))]
    pub babenko_terms: u32,
    /// In-place update order of the Euler state.
    #[arg(long, value_enum, default_value = "top-down")]
    pub sweep: SweepArg,
}

impl SolverArgs {
    fn config(&self, step: f64, t_end: f64) -> Result<Config, CliError> {
        let inversion = match self.inversion {
            InversionArg::Direct => Inversion::DirectVolterra,
            InversionArg::Babenko => Inversion::babenko(self.babenko_terms as usize),
        };
        let sweep = match self.sweep {
            SweepArg::TopDown => EulerSweep::TopDown,
            SweepArg::Forward => EulerSweep::Forward,
        };
        Ok(Config::new(step, t_end)?.with_inversion(inversion).with_sweep(sweep))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_parser = positive, allow_hyphen_values = true)]
    pub step: f64,
    #[arg(long, value_parser = positive, allow_hyphen_values = true)]
    pub t_end: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Add the temporary function column `z1`.
    #[arg(long)]
    pub z1: bool,
    /// Add columns `dy1 … dy{m1-1}`.
    #[arg(long)]
    pub derivatives: bool,
    /// Output CSV (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Comma-separated step sizes, at least two.
    #[arg(long, value_delimiter = ',', value_parser = positive, required = true)]
    pub steps: Vec<f64>,
    #[arg(long, value_parser = positive, allow_hyphen_values = true)]
    pub t_end: f64,
    /// Reference solution: the GL direct solver or the decomposition solver itself.
    #[arg(long, value_enum, default_value = "self")]
    pub oracle: OracleArg,
    /// Step of the reference run (default: the finest step divided by 10).
    #[arg(long, value_parser = positive, allow_hyphen_values = true)]
    pub reference_step: Option<f64>,
    /// Replace the forcing so that t^P is the exact solution and measure against it.
    #[arg(long, value_name = "P")]
    pub manufactured: Option<u32>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ApplyArgs {
    /// Input CSV `t,value` on a uniform grid starting at 0.
    #[arg(long)]
    pub input: PathBuf,
    /// Signed order: negative for integrals, positive for derivatives.
    #[arg(long, allow_hyphen_values = true)]
    pub order: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Perturb the reference gamma function (exercises the failure path).
    #[arg(long, hide = true)]
    pub fault_gamma: bool,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Convergence(args) => run_convergence(&args),
        Command::Apply(args) => run_apply(&args),
        Command::Verify(args) => run_verify(&args),
    }
}

fn emit(table: &CsvTable, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => table.write_file(path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock)?;
            lock.flush().map_err(|e| CliError::Input(e.to_string()))?;
        }
    }
    Ok(())
}

fn load(path: &Path) -> Result<Problem, CliError> {
    Ok(ProblemFile::load(path)?.spec)
}

pub fn run_solve(args: &SolveArgs) -> Result<(), CliError> {
    let problem = load(&args.problem)?;
    let cfg = args.solver.config(args.step, args.t_end)?;
    let traj = solve(&problem, &cfg)?;
    let t: Vec<f64> = traj.y.times().collect();

    let mut header = vec!["t".to_string(), "y".to_string()];
    let mut columns: Vec<Vec<f64>> = vec![t, traj.y.values().to_vec()];
    if args.z1 {
        header.push("z1".into());
        columns.push(traj.z1.values().to_vec());
    }
    if args.derivatives && traj.is_complete() {
        let alpha1 = problem.terms()[0].order;
        let derivs = reconstruct_derivatives(&traj.z1, problem.initial_conditions(), alpha1, problem.m1())?;
        for (k, d) in derivs.into_iter().enumerate() {
            header.push(format!("dy{}", k + 1));
            columns.push(d.into_values());
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let cols: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    emit(&CsvTable::from_columns(&header, &cols)?, args.out.as_deref())?;
    info!("solved {} nodes with h = {}", traj.y.len(), traj.h);

    match traj.diagnostics.nan_node {
        Some(node) => Err(CliError::Numerical(format!(
            "non-finite value at node {} (t = {}); wrote {} rows",
            node,
            node as f64 * traj.h,
            traj.y.len()
        ))),
        None => Ok(()),
    }
}

fn complete(traj: Solution) -> Result<Series, CliError> {
    Ok(traj.into_result()?.y)
}

pub fn run_convergence(args: &ConvergenceArgs) -> Result<(), CliError> {
    let mut steps = args.steps.clone();
    steps.sort_by(|a, b| b.total_cmp(a));
    steps.dedup();
    if steps.len() < 2 {
        return Err(CliError::Usage("convergence needs at least two distinct step values".into()));
    }
    let base = load(&args.problem)?;
    let finest = *steps.last().expect("non-empty");

    let solve_at = |h: f64| -> Result<(Series, Option<Series>), CliError> {
        let cfg = args.solver.config(h, args.t_end)?;
        match args.manufactured {
            Some(p) => {
                let nodes = cfg.steps()? + 1;
                let case = manufacture(&base, p, h, nodes)?;
                let y = complete(solve(&case.problem, &cfg)?)?;
                Ok((y, Some(case.exact_series(h, nodes)?)))
            }
            None => Ok((complete(solve(&base, &cfg)?)?, None)),
        }
    };

    let reference = if args.manufactured.is_some() {
        None
    } else {
        let h_ref = args.reference_step.unwrap_or(finest / 10.0);
        let cfg = args.solver.config(h_ref, args.t_end)?;
        let y = match args.oracle {
            OracleArg::Gl => complete(gl_direct_solve(&base, &cfg)?)?,
            OracleArg::SelfRef => complete(solve(&base, &cfg)?)?,
        };
        info!("reference computed with h = {}", h_ref);
        Some(y)
    };

    let runs: Vec<Result<(Series, Option<Series>), CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = steps.iter().map(|&h| scope.spawn(move || solve_at(h))).collect();
        handles.into_iter().map(|handle| handle.join().expect("solver thread panicked")).collect()
    });

    let mut table = CsvTable::new(&["h", "sup_error", "observed_order"]);
    let mut previous: Option<(f64, f64)> = None;
    for (&h, run) in steps.iter().zip(runs) {
        let (y, exact) = run?;
        let err = match (&reference, exact) {
            (Some(reference), _) => y.sup_distance_common(reference)?,
            (None, Some(exact)) => y.sup_distance(&exact)?,
            (None, None) => unreachable!("either a reference run or an exact solution exists"),
        };
        let order = previous.map(|(h_prev, e_prev)| (e_prev / err).ln() / (h_prev / h).ln());
        table.rows.push(vec![Some(h), Some(err), order]);
        previous = Some((h, err));
    }
    emit(&table, args.out.as_deref())
}

pub fn run_apply(args: &ApplyArgs) -> Result<(), CliError> {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {}", args.input.display(), e)))?;
    let z = read_uniform_series(&CsvTable::read(file)?)?;
    let op = fracdecomp::DiscreteOperator::new(OperatorOrder::new(args.order)?, z.h(), z.len())?;
    let v = z.values();
    let mut out = Vec::with_capacity(v.len());
    for i in 0..v.len() {
        out.push(match op.at(v, i) {
            // The difference formula is unbounded at the origin when z0 ≠ 0.
            Err(Error::SingularOrigin { .. }) => f64::INFINITY.copysign(v[0]),
            other => other?,
        });
    }
    let t: Vec<f64> = z.times().collect();
    emit(&CsvTable::from_columns(&["t", "value"], &[&t, &out])?, args.out.as_deref())
}

fn skewed_gamma(x: f64) -> fracdecomp::Result<f64> {
    fracdecomp::gamma::gamma(x).map(|g| g * 1.01)
}

pub fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mut opts = VerifyOptions::default();
    if args.fault_gamma {
        opts.reference_gamma = skewed_gamma;
    }
    let report = verify::run(&opts);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
    } else {
        print!("{}", report.table());
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Numerical("verification failed".into()))
    }
}
