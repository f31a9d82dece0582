use std::fs;
use std::path::{Path, PathBuf};

use lilypond::io::{self, ChecksRecord, EstimateRow, IoError, SolutionRecord, StructureRecord};
use lilypond::pointprocess::{n_closest_to_origin, sample_poisson_with, MarkDistribution, PointProcessError, Window};
use lilypond::render::{render_svg, Highlight, RenderOptions};
use lilypond::solver::{
    solve_chain, solve_fixed_point, solve_greedy_oracle, verify_gmhs, Model, Solution, SolverError,
};
use lilypond::stats::{
    config_hash, estimate_mu_consistency, gaussian_tail_diagnostic, mass_transport_check, percolation_trend,
    pinned_origin_radii, run_monte_carlo, tail_of_r2, Certification, McConfig, StatsError,
};
use lilypond::structure::{analyze, contact_count_identity, contact_count_identity_where, StructureError};
use serde::Serialize;

use crate::args::{AnalyzeArgs, GenerateArgs, HighlightArg, McArgs, MethodArg, RenderArgs, SolveArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input files: exit code 2.
    Validation(String),
    /// A check that should always hold failed: exit code 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal consistency failure: {m}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PointProcessError> for CliError {
    fn from(e: PointProcessError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::ConditionDViolation(ties) => {
                let pairs: Vec<String> = ties.iter().map(|t| t.to_string()).collect();
                CliError::Validation(format!(
                    "realization is not generic; undecidable comparisons at {}",
                    pairs.join("; ")
                ))
            }
            e => CliError::Internal(e.to_string()),
        }
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        CliError::Internal(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::InvalidConfig(_)
            | StatsError::InsufficientSizes(_)
            | StatsError::InsufficientTail { .. }
            | StatsError::Sampling(_) => CliError::Validation(e.to_string()),
            e => CliError::Internal(e.to_string()),
        }
    }
}

/// Files a command read and wrote, for the manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to standard output when absent.
fn emit(path: Option<&Path>, text: &str, outcome: &mut Outcome) -> Result<(), CliError> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            outcome.outputs.push(p.to_path_buf());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn model(n: u8) -> Model {
    Model::from_number(n).expect("clap restricts the model to 1 or 2")
}

pub fn parse_window(text: &str) -> Result<Window, CliError> {
    let bad = || CliError::Validation(format!("window {text:?} is not of the form WxH"));
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: f64 = w.trim().parse().map_err(|_| bad())?;
    let h: f64 = h.trim().parse().map_err(|_| bad())?;
    Ok(Window::square_origin(w, h)?)
}

fn parse_two_atom(text: &str) -> Result<MarkDistribution, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Validation(format!("two-atom marks {text:?} are not numbers")))?;
    let [theta1, theta2, p] = parts[..] else {
        return Err(CliError::Validation("two-atom marks need THETA1,THETA2,P".into()));
    };
    let marks = MarkDistribution::TwoAtom { theta1, theta2, p };
    marks.validate()?;
    Ok(marks)
}

pub fn generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let window = match (&a.window, a.disk) {
        (Some(w), None) => parse_window(w)?,
        (None, Some(r)) => Window::disk(0.0, 0.0, r)?,
        (None, None) => return Err(CliError::Validation("one of --window or --disk is required".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    let marks = match &a.two_atom {
        Some(s) => parse_two_atom(s)?,
        None => MarkDistribution::Uniform,
    };
    let mut set = sample_poisson_with::<f64>(a.lambda, &window, a.seed, &marks)?;
    if let Some(k) = a.n_closest {
        set = n_closest_to_origin(&set, k, None)?;
    }
    let mut outcome = Outcome {
        seeds: vec![a.seed],
        ..Default::default()
    };
    emit(a.out.as_deref(), &io::realization_to_json(&set), &mut outcome)?;
    Ok(outcome)
}

fn agree(a: &Solution<f64>, b: &Solution<f64>) -> Result<(), CliError> {
    for (i, (&x, &y)) in a.radii.as_slice().iter().zip(b.radii.as_slice()).enumerate() {
        let same = if x.is_infinite() || y.is_infinite() {
            x == y
        } else {
            (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0)
        };
        if !same {
            return Err(CliError::Internal(format!(
                "{:?} and {:?} disagree at germ {i}: {x} vs {y}",
                a.method, b.method
            )));
        }
    }
    Ok(())
}

pub fn solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let set = io::realization_from_json(&read(&a.input)?)?;
    let m = model(a.model);
    let solution = match a.method {
        MethodArg::Fixed => solve_fixed_point(&set, m)?,
        MethodArg::Chain => solve_chain(&set, m, None)?.0,
        MethodArg::Oracle => solve_greedy_oracle(&set, m)?,
        MethodArg::All => {
            let chain = solve_chain(&set, m, None)?.0;
            agree(&chain, &solve_fixed_point(&set, m)?)?;
            agree(&chain, &solve_greedy_oracle(&set, m)?)?;
            chain
        }
    };
    let mut outcome = Outcome {
        inputs: vec![a.input.clone()],
        ..Default::default()
    };
    emit(a.out.as_deref(), &io::solution_to_json(&solution), &mut outcome)?;
    Ok(outcome)
}

fn load_solution(path: &Path) -> Result<Solution<f64>, CliError> {
    let solution = io::solution_from_json(&read(path)?)?;
    let report = verify_gmhs(&solution.set, &solution.radii, solution.model, 1e-9);
    if !report.passes {
        return Err(CliError::Validation(format!(
            "{} is not a valid solution: {}",
            path.display(),
            report.summary()
        )));
    }
    Ok(solution)
}

pub fn analyze_cmd(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let solution = load_solution(&a.input)?;
    let report = analyze(&solution)?;
    let cert = match (a.margin, solution.set.window()) {
        (Some(m), Some(w)) => {
            if !(m >= 0.0) {
                return Err(CliError::Validation(format!("margin {m} must be nonnegative")));
            }
            Some(Certification::new(&solution, &w, m))
        }
        (Some(_), None) => {
            return Err(CliError::Validation(
                "--margin needs a realization with a sampling window".into(),
            ))
        }
        (None, _) => None,
    };
    let identity = match &cert {
        Some(c) => contact_count_identity_where(&report, &solution, |m| c.cluster_fully_certified(m)),
        None => contact_count_identity(&report, &solution),
    };
    let transport = mass_transport_check(&solution, &report, cert.as_ref());
    if !identity.holds() {
        return Err(CliError::Internal(format!(
            "neighbour-count identity fails: {identity:?}"
        )));
    }
    if transport.exhaustive && !transport.balanced() {
        return Err(CliError::Internal(format!("mass transport unbalanced: {transport:?}")));
    }
    let mut record = SolutionRecord::from_solution(&solution);
    record.structure = Some(StructureRecord::from(&report));
    record.checks = Some(ChecksRecord {
        margin: a.margin,
        contact_identity: (&identity).into(),
        mass_transport: (&transport).into(),
    });
    let mut outcome = Outcome {
        inputs: vec![a.input.clone()],
        ..Default::default()
    };
    emit(a.out.as_deref(), &io::to_json(&record), &mut outcome)?;
    Ok(outcome)
}

pub fn render(a: &RenderArgs) -> Result<Outcome, CliError> {
    let solution = load_solution(&a.input)?;
    let highlight = match a.highlight {
        HighlightArg::Cycles => Highlight::Cycles,
        HighlightArg::Doublets => Highlight::Doublets,
        HighlightArg::None => Highlight::None,
    };
    let report = match highlight {
        Highlight::None => None,
        _ => Some(analyze(&solution)?),
    };
    let opts = RenderOptions {
        highlight,
        clip: a.clip,
        scale: None,
    };
    let mut outcome = Outcome {
        inputs: vec![a.input.clone()],
        ..Default::default()
    };
    emit(
        a.out.as_deref(),
        &render_svg(&solution, report.as_ref(), &opts),
        &mut outcome,
    )?;
    Ok(outcome)
}

const KNOWN: [&str; 7] = ["nu", "varpi", "mu", "p_finite", "tail", "gaussian", "trend"];

fn write_file(dir: &Path, name: &str, text: &str, outcome: &mut Outcome) -> Result<(), CliError> {
    emit(Some(&dir.join(name)), text, outcome)
}

pub fn mc(a: &McArgs) -> Result<Outcome, CliError> {
    let wanted: Vec<&str> = a
        .estimators
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    if let Some(bad) = wanted.iter().find(|w| !KNOWN.contains(w)) {
        return Err(CliError::Validation(format!(
            "unknown estimator {bad:?}; expected any of {}",
            KNOWN.join(", ")
        )));
    }
    let m = model(a.model);
    let config = McConfig {
        model: m,
        lambda: a.lambda,
        window: parse_window(&a.window)?,
        margin: a.margin,
        replications: a.reps,
        base_seed: a.seed,
        marks: MarkDistribution::Uniform,
    };
    config.validate()?;
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Validation(format!("{}: {e}", a.out_dir.display())))?;
    let mut outcome = Outcome {
        seeds: vec![a.seed],
        ..Default::default()
    };
    let has = |name: &str| wanted.contains(&name);

    if ["nu", "varpi", "mu", "p_finite"].iter().any(|n| has(n)) {
        let hash = config_hash(&config);
        let est = run_monte_carlo(&config)?;
        let mu = estimate_mu_consistency(&est);
        let rows: Vec<EstimateRow> = io::palm_rows(&est, Some(&mu), &wanted, &hash);
        write_file(&a.out_dir, "estimates.csv", &io::estimates_csv(&rows)?, &mut outcome)?;
        #[derive(Serialize)]
        struct Palm<'a> {
            config: &'a McConfig,
            config_hash: &'a str,
            estimates: &'a lilypond::stats::PalmEstimates,
            mu_consistency: &'a lilypond::stats::MuConsistency,
        }
        let palm = Palm {
            config: &config,
            config_hash: &hash,
            estimates: &est,
            mu_consistency: &mu,
        };
        write_file(&a.out_dir, "palm.json", &io::to_json(&palm), &mut outcome)?;
    }

    if has("tail") || has("gaussian") {
        let pinned = pinned_origin_radii(m, a.lambda, a.n_closest, a.tail_samples, a.seed)?;
        if has("tail") {
            let grid: Vec<f64> = (0..=24).map(|k| k as f64 * 0.25).collect();
            let table = tail_of_r2(&pinned.radii, &grid);
            write_file(&a.out_dir, "survival.csv", &io::survival_csv(&table)?, &mut outcome)?;
        }
        if has("gaussian") {
            let fit = gaussian_tail_diagnostic(&pinned.radii)?;
            write_file(&a.out_dir, "gaussian_tail.json", &io::to_json(&fit), &mut outcome)?;
        }
    }

    if has("trend") {
        let table = percolation_trend(m, a.lambda, &a.sizes, a.reps, a.seed)?;
        write_file(&a.out_dir, "trend.csv", &io::trend_csv(&table)?, &mut outcome)?;
        write_file(&a.out_dir, "trend.json", &io::to_json(&table), &mut outcome)?;
    }
    Ok(outcome)
}
