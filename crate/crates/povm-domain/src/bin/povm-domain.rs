//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unusable input, 2 numerical failure,
//! 3 validation failure.

use clap::{Parser, Subcommand};
use povm_domain::domain::{membership, probabilities, subspace_dimension, tetrahedron_coordinates};
use povm_domain::estimation::{classify, dispersion, simulate_counts, FeasibilityVerdict};
use povm_domain::io::{
    read_json, to_json_string, CountsJson, IoError, PovmJson, RunConfig, StateJson,
};
use povm_domain::linalg::LinalgError;
use povm_domain::povm::{effective_dimension, validate, Povm, TETRAHEDRON_VERTICES};
use povm_domain::states::{bloch_state, BlochVector, DensityMatrix};
use povm_domain::{domain, DEFAULT_TOL};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "povm-domain",
    version,
    about = "Probability domains of generalized quantum measurements"
)]
struct Cli {
    /// Numerical tolerance for validation, rank cuts and membership.
    #[arg(
        long,
        global = true,
        env = "POVM_DOMAIN_TOL",
        default_value_t = DEFAULT_TOL
    )]
    tol: f64,
    /// Write the report to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check Hermiticity, positivity and completeness of a measurement.
    ValidatePovm { povm: PathBuf },
    /// Outcome probabilities of a state under a measurement.
    MapState { state: PathBuf, povm: PathBuf },
    /// Rank of the affine map and the affine dimension of sampled extreme
    /// points.
    DomainDim {
        povm: PathBuf,
        /// Number of random pure states to sample.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simulate repeated measurements of a state.
    SampleCounts {
        state: PathBuf,
        povm: PathBuf,
        /// Number of shots to draw.
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify a count record against the physical domain.
    Estimate {
        counts: PathBuf,
        povm: PathBuf,
        /// Half-width of the error box in estimated standard deviations.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Candidate budget for the boundary search.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sweep pure states over the Bloch sphere and emit CSV rows of
    /// probabilities and tetrahedron coordinates (four-outcome qubit
    /// measurements only).
    Figure {
        povm: PathBuf,
        /// Grid as THETAxPHI counts; theta spans [0, pi], phi [0, 2pi).
        #[arg(long, default_value = "64x128")]
        grid: String,
    },
}

enum CliError {
    Input(String),
    Numerical(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::Validation(m) => m,
        }
    }
}

/// Walks the source chain; a stalled eigensolver or SVD is a numerical
/// failure, everything else is an input problem.
fn lift_error<E: std::error::Error + 'static>(e: E) -> CliError {
    let mut source: Option<&(dyn std::error::Error + 'static)> = Some(&e);
    while let Some(err) = source {
        if matches!(
            err.downcast_ref::<LinalgError>(),
            Some(LinalgError::NoConvergence { .. })
        ) {
            return CliError::Numerical(e.to_string());
        }
        source = err.source();
    }
    CliError::Input(e.to_string())
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Input(format!(
            "tolerance {tol} must be finite and nonnegative"
        )));
    }
    match cli.command {
        Command::ValidatePovm { povm } => cmd_validate(&povm, tol, cli.output.as_deref()),
        Command::MapState { state, povm } => {
            cmd_map_state(&state, &povm, tol, cli.output.as_deref())
        }
        Command::DomainDim {
            povm,
            samples,
            seed,
        } => cmd_domain_dim(&povm, samples, seed, tol, cli.output.as_deref()),
        Command::SampleCounts {
            state,
            povm,
            shots,
            seed,
        } => cmd_sample_counts(&state, &povm, shots, seed, tol, cli.output.as_deref()),
        Command::Estimate {
            counts,
            povm,
            k,
            budget,
            seed,
        } => cmd_estimate(&counts, &povm, k, budget, seed, tol, cli.output.as_deref()),
        Command::Figure { povm, grid } => cmd_figure(&povm, &grid, tol, cli.output.as_deref()),
    }
}

fn write_report(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_povm(path: &Path) -> Result<Povm, CliError> {
    let json: PovmJson = read_json(path).map_err(lift_io(path))?;
    json.to_povm().map_err(lift_io(path))
}

fn load_validated_povm(path: &Path, tol: f64) -> Result<Povm, CliError> {
    let povm = load_povm(path)?;
    let report = validate(&povm, tol);
    if !report.ok {
        return Err(CliError::Input(format!(
            "{} is not a valid measurement: {}",
            path.display(),
            report.violations.join("; ")
        )));
    }
    Ok(povm)
}

fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let json: StateJson = read_json(path).map_err(lift_io(path))?;
    json.to_density().map_err(lift_io(path))
}

fn lift_io(path: &Path) -> impl Fn(IoError) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn cmd_validate(povm_path: &Path, tol: f64, output: Option<&Path>) -> Result<i32, CliError> {
    let povm = load_povm(povm_path)?;
    let report = validate(&povm, tol);
    #[derive(Serialize)]
    struct Report<'a> {
        d: usize,
        n_effects: usize,
        tol: f64,
        #[serde(flatten)]
        validation: &'a povm_domain::povm::PovmValidation,
    }
    let rendered = to_json_string(&Report {
        d: povm.dim(),
        n_effects: povm.len(),
        tol,
        validation: &report,
    });
    write_report(output, &rendered)?;
    if report.ok {
        Ok(0)
    } else {
        Err(CliError::Validation(format!(
            "measurement violates {} condition(s)",
            report.violations.len()
        )))
    }
}

fn cmd_map_state(
    state_path: &Path,
    povm_path: &Path,
    tol: f64,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    let rho = load_state(state_path)?;
    let povm = load_validated_povm(povm_path, tol)?;
    let p = probabilities(&rho, &povm).map_err(lift_error)?;
    #[derive(Serialize)]
    struct Report {
        d: usize,
        n_outcomes: usize,
        probabilities: Vec<f64>,
    }
    write_report(
        output,
        &to_json_string(&Report {
            d: povm.dim(),
            n_outcomes: povm.len(),
            probabilities: p.values().to_vec(),
        }),
    )?;
    Ok(0)
}

fn cmd_domain_dim(
    povm_path: &Path,
    samples: usize,
    seed: u64,
    tol: f64,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    let povm = load_validated_povm(povm_path, tol)?;
    if samples < 2 {
        return Err(CliError::Input(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let rank = effective_dimension(&povm, tol);
    let points = domain::extreme_point_sample(&povm, samples, seed);
    let sampled = subspace_dimension(&points, tol).map_err(lift_error)?;
    #[derive(Serialize)]
    struct Report {
        d: usize,
        n_outcomes: usize,
        matrix_rank: usize,
        sampled_dimension: usize,
        config: RunConfig,
    }
    write_report(
        output,
        &to_json_string(&Report {
            d: povm.dim(),
            n_outcomes: povm.len(),
            matrix_rank: rank,
            sampled_dimension: sampled,
            config: RunConfig {
                seed,
                tol,
                samples,
                ..RunConfig::default()
            },
        }),
    )?;
    Ok(0)
}

fn cmd_sample_counts(
    state_path: &Path,
    povm_path: &Path,
    shots: u64,
    seed: u64,
    tol: f64,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    let rho = load_state(state_path)?;
    let povm = load_validated_povm(povm_path, tol)?;
    let record = simulate_counts(&rho, &povm, shots, seed).map_err(lift_error)?;
    write_report(output, &to_json_string(&CountsJson::from_record(&record)))?;
    Ok(0)
}

fn cmd_estimate(
    counts_path: &Path,
    povm_path: &Path,
    k: f64,
    budget: usize,
    seed: u64,
    tol: f64,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(CliError::Input(format!(
            "k = {k} must be finite and nonnegative"
        )));
    }
    let json: CountsJson = read_json(counts_path).map_err(lift_io(counts_path))?;
    let record = json.to_record().map_err(lift_io(counts_path))?;
    let povm = load_validated_povm(povm_path, tol)?;
    let q = record.frequencies();
    let raw = membership(&q, &povm, tol);
    let verdict = classify(&record, &povm, k, budget, seed, tol).map_err(lift_error)?;
    let n = record.n();
    let halfwidths: Vec<f64> = dispersion(&record)
        .iter()
        .map(|d| k * d / n as f64)
        .collect();
    #[derive(Serialize)]
    struct Report {
        verdict: &'static str,
        n: u64,
        frequencies: Vec<f64>,
        halfwidths: Vec<f64>,
        consistency_residual: f64,
        min_eigenvalue: f64,
        non_unique: bool,
        estimate: Option<StateJson>,
        boundary_point: Option<Vec<f64>>,
        config: RunConfig,
    }
    let (verdict_name, estimate, boundary_point) = match &verdict {
        FeasibilityVerdict::Feasible { estimate } => {
            ("feasible", Some(StateJson::from_density(estimate)), None)
        }
        FeasibilityVerdict::Marginal {
            boundary_point,
            estimate,
        } => (
            "marginal",
            Some(StateJson::from_density(estimate)),
            Some(boundary_point.values().to_vec()),
        ),
        FeasibilityVerdict::Insufficient => ("insufficient", None, None),
    };
    write_report(
        output,
        &to_json_string(&Report {
            verdict: verdict_name,
            n,
            frequencies: q.values().to_vec(),
            halfwidths,
            consistency_residual: raw.consistency_residual,
            min_eigenvalue: raw.min_eigenvalue,
            non_unique: raw.non_unique,
            estimate,
            boundary_point,
            config: RunConfig {
                seed,
                tol,
                k,
                budget,
                ..RunConfig::default()
            },
        }),
    )?;
    Ok(0)
}

fn parse_grid(grid: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = grid.split('x').collect();
    let bad = || CliError::Input(format!("grid {grid:?} is not THETAxPHI, e.g. 64x128"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let theta: usize = parts[0].parse().map_err(|_| bad())?;
    let phi: usize = parts[1].parse().map_err(|_| bad())?;
    if theta < 1 || phi < 1 {
        return Err(bad());
    }
    Ok((theta, phi))
}

fn bloch_angles(x: f64, y: f64, z: f64) -> (f64, f64) {
    let theta = z.clamp(-1.0, 1.0).acos();
    let mut phi = y.atan2(x);
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    (theta, phi)
}

fn cmd_figure(
    povm_path: &Path,
    grid: &str,
    tol: f64,
    output: Option<&Path>,
) -> Result<i32, CliError> {
    let povm = load_validated_povm(povm_path, tol)?;
    if povm.dim() != 2 || povm.len() != 4 {
        return Err(CliError::Input(format!(
            "figure needs a four-outcome qubit measurement, got d = {} with {} outcomes",
            povm.dim(),
            povm.len()
        )));
    }
    let (n_theta, n_phi) = parse_grid(grid)?;
    let mut csv = String::from("theta_b,phi_b,p1,p2,p3,p4,x,y,z\n");
    let mut push_row = |theta: f64, phi: f64| -> Result<(), CliError> {
        let n = BlochVector::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        );
        let rho = bloch_state(&n).map_err(lift_error)?;
        let p = probabilities(&rho, &povm).map_err(lift_error)?;
        let (x, y, z) = tetrahedron_coordinates(&p).map_err(lift_error)?;
        let v = p.values();
        csv.push_str(&format!(
            "{theta:.16e},{phi:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{x:.16e},{y:.16e},{z:.16e}\n",
            v[0], v[1], v[2], v[3]
        ));
        Ok(())
    };
    for i in 0..n_theta {
        let theta = if n_theta == 1 {
            0.0
        } else {
            std::f64::consts::PI * i as f64 / (n_theta - 1) as f64
        };
        for j in 0..n_phi {
            push_row(theta, std::f64::consts::TAU * j as f64 / n_phi as f64)?;
        }
    }
    // Tangency directions: antipodes of the tetrahedron vertices never fall on
    // a uniform grid, so the four plane-touching points are appended explicitly.
    let s = 1.0 / 3.0f64.sqrt();
    for vertex in TETRAHEDRON_VERTICES {
        let (theta, phi) = bloch_angles(-vertex[0] * s, -vertex[1] * s, -vertex[2] * s);
        push_row(theta, phi)?;
    }
    write_report(output, &csv)?;
    Ok(0)
}
