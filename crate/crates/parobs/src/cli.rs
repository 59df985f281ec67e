//! Command-line front end: solve a problem, sweep the penalization
//! parameter, compute diagnostics, or run the acceptance suite.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::builtin::{builtin, default_resolution, run_builtin, BuiltinProblem};
use crate::diagnostics::{
    extract_free_boundary, holder_exponent_gradient, quasiconvexity_check,
    time_derivative_modulus, RegularityReport,
};
use crate::error::{Error, Result};
use crate::io;
use crate::reference::solve_reference;
use crate::solvers::eps_sweep;

/// Validated run configuration (the JSON schema ships in docs/).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Built-in test name; exclusive with `problem_file`.
    #[serde(default)]
    pub test: Option<String>,
    /// Path to a JSON ProblemSpec + grid document.
    #[serde(default)]
    pub problem_file: Option<String>,
    #[serde(default)]
    pub grid: Option<GridParams>,
    #[serde(default)]
    pub eps: Option<Vec<f64>>,
    #[serde(default = "default_out")]
    pub out: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Window radii for the modulus diagnostic.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridParams {
    pub n_space: usize,
    pub n_time: usize,
}

fn default_out() -> String {
    "out".into()
}

fn default_jobs() -> usize {
    1
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        match self.command.as_str() {
            "solve" | "sweep" | "diagnose" | "verify" => {}
            other => {
                return Err(Error::ConfigInvalid {
                    path: "command".into(),
                    reason: format!(
                        "unknown command `{other}` (expected solve, sweep, diagnose or verify)"
                    ),
                })
            }
        }
        if self.command != "verify" && self.test.is_none() && self.problem_file.is_none() {
            return Err(Error::ConfigInvalid {
                path: "test".into(),
                reason: "give a built-in test name or a problem file".into(),
            });
        }
        if let Some(eps) = &self.eps {
            if eps.iter().any(|&e| e <= 0.0) {
                return Err(Error::ConfigInvalid {
                    path: "eps".into(),
                    reason: "entries must be positive".into(),
                });
            }
        }
        if self.jobs == 0 {
            return Err(Error::ConfigInvalid {
                path: "jobs".into(),
                reason: "jobs must be at least 1".into(),
            });
        }
        Ok(())
    }

    fn materialize(&self) -> Result<BuiltinProblem> {
        if let Some(path) = &self.problem_file {
            return load_problem_file(Path::new(path), self);
        }
        let name = self.test.as_deref().unwrap();
        let (nx, nt) = self
            .grid
            .map(|g| (g.n_space, g.n_time))
            .unwrap_or_else(|| default_resolution(name));
        let eps = self
            .eps
            .as_ref()
            .and_then(|v| v.first().copied())
            .unwrap_or(1e-3);
        builtin(name, nx, nt, eps)
    }
}

/// External problem document: grid parameters plus a full ProblemSpec.
#[derive(Debug, Serialize, Deserialize)]
struct ProblemDocument {
    grid: crate::grid::Grid,
    spec: crate::solvers::ProblemSpec,
}

fn load_problem_file(path: &Path, _config: &RunConfig) -> Result<BuiltinProblem> {
    let bytes = std::fs::read(path).map_err(|e| Error::ConfigInvalid {
        path: format!("problem_file = {}", path.display()),
        reason: e.to_string(),
    })?;
    let doc: ProblemDocument = serde_json::from_slice(&bytes).map_err(|e| Error::ConfigInvalid {
        path: format!("problem_file = {}", path.display()),
        reason: e.to_string(),
    })?;
    doc.spec.validate(&doc.grid)?;
    Ok(BuiltinProblem {
        name: path.display().to_string(),
        grid: doc.grid,
        spec: doc.spec,
        analytic: None,
    })
}

#[derive(Parser)]
#[command(
    name = "parobs",
    about = "Penalized solvers and regularity diagnostics for parabolic obstacle problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// March a problem and write its artifacts.
    Solve(CommonArgs),
    /// Run the penalization sweep against the complementarity reference.
    Sweep(CommonArgs),
    /// Compute the regularity report of a problem.
    Diagnose(CommonArgs),
    /// Run the acceptance suite; exits nonzero on any failure.
    Verify(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON config file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in test name.
    #[arg(long)]
    test: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid as NX,NT.
    #[arg(long)]
    grid: Option<String>,
    /// Comma-separated penalization parameters, largest first.
    #[arg(long)]
    eps: Option<String>,
    /// Parallel sweep workers.
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for randomized spot checks.
    #[arg(long)]
    seed: Option<u64>,
}

fn merge(args: CommonArgs, command: &str) -> Result<RunConfig> {
    let mut config: RunConfig = match &args.config {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| Error::ConfigInvalid {
                path: format!("--config {}", path.display()),
                reason: e.to_string(),
            })?;
            serde_json::from_slice(&bytes).map_err(|e| Error::ConfigInvalid {
                path: format!("--config {}", path.display()),
                reason: e.to_string(),
            })?
        }
        None => RunConfig {
            command: command.into(),
            test: None,
            problem_file: None,
            grid: None,
            eps: None,
            out: default_out(),
            seed: 0,
            jobs: 1,
            radii: None,
        },
    };
    config.command = command.into();
    if let Some(t) = args.test {
        config.test = Some(t);
    }
    if let Some(o) = args.out {
        config.out = o.display().to_string();
    }
    if let Some(g) = args.grid {
        let parts: Vec<_> = g.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::ConfigInvalid {
                path: "--grid".into(),
                reason: "expected NX,NT".into(),
            });
        }
        let parse = |s: &str, what: &str| -> Result<usize> {
            s.trim().parse().map_err(|_| Error::ConfigInvalid {
                path: format!("--grid {what}"),
                reason: format!("`{s}` is not a positive integer"),
            })
        };
        config.grid = Some(GridParams {
            n_space: parse(parts[0], "NX")?,
            n_time: parse(parts[1], "NT")?,
        });
    }
    if let Some(e) = args.eps {
        let mut eps = Vec::new();
        for part in e.split(',') {
            eps.push(part.trim().parse::<f64>().map_err(|_| Error::ConfigInvalid {
                path: "--eps".into(),
                reason: format!("`{part}` is not a number"),
            })?);
        }
        config.eps = Some(eps);
    }
    if let Some(j) = args.jobs {
        config.jobs = j;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let (config, label) = match cli.command {
        Command::Solve(a) => (merge(a, "solve"), "solve"),
        Command::Sweep(a) => (merge(a, "sweep"), "sweep"),
        Command::Diagnose(a) => (merge(a, "diagnose"), "diagnose"),
        Command::Verify(a) => (merge(a, "verify"), "verify"),
    };
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{label}: {e}");
            return 2;
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{label}: {e}");
            1
        }
    }
}

/// Executes a validated config. Returns the exit status.
pub fn run(config: &RunConfig) -> Result<i32> {
    config.validate()?;
    let out = Path::new(&config.out);
    match config.command.as_str() {
        "solve" => {
            let problem = config.materialize()?;
            let result = run_builtin(&problem)?;
            io::write_solve_artifacts(out, &result)?;
            io::write_json(&out.join("metadata.json"), &run_metadata(&problem.name))?;
            println!(
                "solved `{}`: {} levels, final residual {:.3e}",
                problem.name,
                problem.grid.n_time,
                result.per_step.last().map_or(0.0, |s| s.residual)
            );
            Ok(0)
        }
        "sweep" => {
            let problem = config.materialize()?;
            let eps_list = config
                .eps
                .clone()
                .unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3]);
            let reference = solve_reference(&problem.spec, &problem.grid)?;
            let table = sweep_parallel(&problem, &eps_list, &reference.u, config)?;
            io::write_sweep_csv(&out.join("sweep.csv"), &table)?;
            io::write_json(&out.join("sweep.json"), &table)?;
            io::write_json(&out.join("metadata.json"), &run_metadata(&problem.name))?;
            for row in &table.rows {
                println!(
                    "eps {:9.3e}: err {:10.4e}  min_gap {:10.3e}  defect {:9.3e}",
                    row.eps, row.err_inf, row.min_gap, row.complementarity_defect
                );
            }
            Ok(0)
        }
        "diagnose" => {
            let problem = config.materialize()?;
            let result = run_builtin(&problem)?;
            let report = diagnose(&problem, &result, config)?;
            std::fs::create_dir_all(out)?;
            io::write_json(&out.join("report.json"), &report)?;
            if let Some(t) = &report.modulus_table {
                io::write_series_csv(&out.join("modulus.csv"), "radius,oscillation", t)?;
            }
            if let Some(t) = &report.density_series {
                io::write_series_csv(&out.join("density.csv"), "radius,density", t)?;
            }
            io::write_json(&out.join("metadata.json"), &run_metadata(&problem.name))?;
            println!("report written to {}", out.join("report.json").display());
            Ok(0)
        }
        "verify" => {
            let results = crate::acceptance::run_all(config.seed);
            std::fs::create_dir_all(out)?;
            io::write_json(&out.join("acceptance.json"), &results)?;
            let mut all_ok = true;
            for r in &results {
                all_ok &= r.passed;
                println!(
                    "[{}] criterion {:2}: {} ({:.1}s) - {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.index,
                    r.name,
                    r.seconds,
                    r.detail
                );
            }
            Ok(if all_ok { 0 } else { 1 })
        }
        _ => unreachable!("validated"),
    }
}

#[derive(Serialize)]
struct Metadata {
    problem: String,
    timestamp_unix: u64,
    version: &'static str,
}

/// Timestamps live here so the data artifacts stay byte-identical across
/// reruns.
fn run_metadata(problem: &str) -> Metadata {
    Metadata {
        problem: problem.into(),
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        version: env!("CARGO_PKG_VERSION"),
    }
}

fn sweep_parallel(
    problem: &BuiltinProblem,
    eps_list: &[f64],
    reference: &crate::grid::ScalarField,
    config: &RunConfig,
) -> Result<crate::solvers::SweepTable> {
    if config.jobs <= 1 || eps_list.len() < 2 {
        return eps_sweep(
            &problem.spec,
            &problem.grid,
            eps_list,
            reference,
            config.radii.as_deref(),
        );
    }
    // entries are independent; run each eps as its own single-entry sweep on
    // a worker and stitch the rows back in order
    let chunks: Vec<Vec<f64>> = eps_list.iter().map(|&e| vec![e]).collect();
    let mut rows: Vec<Option<crate::solvers::SweepRow>> = vec![None; eps_list.len()];
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for (i, chunk) in chunks.iter().enumerate() {
            let spec = &problem.spec;
            let grid = &problem.grid;
            let radii = config.radii.clone();
            let handle = scope.spawn(move || {
                let mut spec = spec.clone();
                spec.eps = crate::penalty::PenaltyParams::new(chunk[0]);
                let result = crate::solvers::march(&spec, grid)?;
                let err_inf = result
                    .u
                    .values
                    .iter()
                    .zip(&reference.values)
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                let min_gap = result
                    .per_step
                    .iter()
                    .map(|r| r.min_gap)
                    .fold(f64::INFINITY, f64::min);
                let defect = result
                    .per_step
                    .iter()
                    .map(|r| r.complementarity_defect)
                    .fold(0.0f64, f64::max);
                let (table, fit) = match radii {
                    Some(radii) => {
                        let m = time_derivative_modulus(&result, &radii, true)?;
                        (Some(m.table.clone()), Some(m.fit.exponent))
                    }
                    None => (None, None),
                };
                Ok::<_, Error>(crate::solvers::SweepRow {
                    eps: chunk[0],
                    err_inf,
                    min_gap,
                    complementarity_defect: defect,
                    modulus_table: table,
                    modulus_fit: fit,
                })
            });
            handles.push((i, handle));
        }
        for (i, handle) in handles {
            rows[i] = Some(handle.join().expect("sweep worker panicked")?);
        }
        Ok(())
    })?;
    Ok(crate::solvers::SweepTable {
        rows: rows.into_iter().map(|r| r.unwrap()).collect(),
    })
}

/// Diagnostics applicable to a finished run.
fn diagnose(
    problem: &BuiltinProblem,
    result: &crate::solvers::SolveResult,
    config: &RunConfig,
) -> Result<RegularityReport> {
    let mut report = RegularityReport::default();
    if problem.spec.data.bilap_phi0.is_some() {
        let q = quasiconvexity_check(result, &problem.spec.data)?;
        report.utt_min = Some(q.utt_min);
        report.utt_bound = Some(q.utt_bound);
        report.pass_margin = Some(q.pass_margin);
    }
    let radii = config.radii.clone().unwrap_or_else(|| {
        let h = problem.grid.h;
        vec![6.0 * h, 10.0 * h, 16.0 * h, 26.0 * h, 42.0 * h]
    });
    if let Ok(m) = time_derivative_modulus(result, &radii, true) {
        report.modulus_table = Some(m.table);
        report.holder_fit = Some(m.fit);
    }
    let gap_tol = 3.0 * result.eps_used;
    let snaps = extract_free_boundary(&result.u, &problem.spec.data.psi, gap_tol);
    report.interface_count = Some(snaps.iter().map(|s| s.interface_points.len()).sum());
    if snaps.iter().any(|s| !s.interface_points.is_empty()) {
        if let Ok(rep) = holder_exponent_gradient(&result.u, &problem.spec.data.psi, &snaps, &radii)
        {
            report.gradient_fit = Some(rep.gradient_fit);
        }
        if let Some(snap) = snaps.iter().rev().find(|s| !s.interface_points.is_empty()) {
            let point = snap.interface_points[0];
            let radii = [0.1, 0.15, 0.2];
            if let Ok(d) =
                crate::diagnostics::parabolic_density(&snaps, &problem.grid, point, snap.t, &radii)
            {
                report.density_series = Some(d.series);
                report.c_hat = Some(d.c_hat);
            }
        }
    }
    Ok(report)
}
