//! Command-line front end. Every command emits one JSON [`Report`].
//!
//! Exit codes: 0 success, 2 input or parse error, 3 numerical failure,
//! 4 when `--expect p-stationary` is given and the point is not certified.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::json;

use crate::certify::{self, grade_point, grade_primal_dual, PrimalDualPoint, Verdict};
use crate::error::{Error, Result};
use crate::io::fixtures;
use crate::io::{gen_synthetic, inputs_digest, write_dataset, DataFormat, Report, SyntheticConfig};
use crate::problem::{Dataset, ProblemData};
use crate::prox::{prox_vector, ProxParams};
use crate::solver::{predict, probe_local_minimum, train_admm, SolveStatus, SolverConfig};
use crate::support::{extract_support, support_threshold, verify_support_hyperplanes};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_EXPECTATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rampsvm",
    version,
    about = "Ramp-loss SVM training and certification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    PStationary,
}

fn parse_finite(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("'{t}' is not a finite number"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train with ADMM and certify the result.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "csv")]
        format: DataFormat,
        #[arg(long = "C")]
        c: f64,
        /// Defaults to C/2 (γC = 2).
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        expect: Option<Expectation>,
    },
    /// Certify a given (w, b), optionally with a multiplier.
    Certify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "csv")]
        format: DataFormat,
        #[arg(long, value_parser = parse_finite, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w: Vec<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, value_parser = parse_finite, value_delimiter = ',', allow_hyphen_values = true)]
        gammas: Option<Vec<f64>>,
        #[arg(long, value_parser = parse_finite, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
        #[arg(long, default_value_t = certify::DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        expect: Option<Expectation>,
    },
    /// Evaluate the ramp prox componentwise.
    ProxEval {
        #[arg(long, value_parser = parse_finite, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        s: Vec<f64>,
        #[arg(long)]
        gamma: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Train, extract support vectors, and check the support hyperplanes when γC ≥ 2.
    SupportVectors {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "csv")]
        format: DataFormat,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the KKT-but-not-P-stationary three-point example.
    Counterexample {
        #[arg(long, value_parser = parse_finite, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded two-blob dataset.
    GenData {
        /// Samples per class.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sep: f64,
        #[arg(long)]
        outliers: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "csv")]
        format: DataFormat,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    /// Text for stdout; `None` when the report went to `--out`.
    pub stdout: Option<String>,
    pub exit_code: u8,
}

pub fn exit_code_for(err: &Error) -> u8 {
    if err.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERICAL
    }
}

fn load(path: &Path, format: DataFormat) -> Result<(Dataset, Vec<u8>)> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
        line: 0,
        message: "file is not UTF-8".into(),
    })?;
    Ok((crate::io::parse_dataset_str(&text, format)?, bytes))
}

fn emit(report: Report, out: Option<&Path>, exit_code: u8) -> Result<Outcome> {
    let text = report.to_json();
    let stdout = match out {
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))?;
            None
        }
        None => Some(text),
    };
    Ok(Outcome {
        report,
        stdout,
        exit_code,
    })
}

fn expectation_code(expect: Option<Expectation>, verdict: Verdict) -> u8 {
    match expect {
        Some(Expectation::PStationary) if verdict != Verdict::PStationary => EXIT_EXPECTATION,
        _ => EXIT_OK,
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Train {
            data,
            format,
            c,
            sigma,
            tol,
            max_iter,
            seed,
            out,
            expect,
        } => {
            let (dataset, bytes) = load(data, *format)?;
            let problem = ProblemData::build(&dataset)?;
            let mut config = SolverConfig::new(*c)
                .with_tol(*tol)
                .with_max_iter(*max_iter);
            if let Some(s) = sigma {
                config = config.with_sigma(*s);
            }
            config.seed = *seed;
            let result = train_admm(&problem, &config)?;
            let correct = (0..dataset.n_samples())
                .filter(|&i| {
                    let x = dataset.sample(i);
                    predict(result.point.w.as_slice(), result.point.b, &x).ok()
                        == Some(dataset.label(i) as i8)
                })
                .count();
            let probe = if result.status == SolveStatus::Converged {
                Some(probe_local_minimum(
                    &problem,
                    &result.point.w,
                    result.point.b,
                    *c,
                    1e-3,
                    1000,
                    *seed,
                )?)
            } else {
                None
            };
            let digest = inputs_digest([
                bytes.as_slice(),
                format!("train {c} {sigma:?} {tol} {max_iter} {seed}").as_bytes(),
            ]);
            let code = if result.status == SolveStatus::Diverged {
                EXIT_NUMERICAL
            } else {
                expectation_code(*expect, result.certificate.verdict)
            };
            let payload = json!({
                "config": config,
                "gamma": config.gamma(),
                "gamma_c": config.gamma_c(),
                "solve": result,
                "training_accuracy": correct as f64 / dataset.n_samples() as f64,
                "local_min_probe": probe,
            });
            let report = Report::new("train", digest, payload)
                .with_problem(&problem)
                .with_seed(*seed);
            emit(report, out.as_deref(), code)
        }

        Command::Certify {
            data,
            format,
            w,
            b,
            c,
            gammas,
            lambda,
            tol,
            out,
            expect,
        } => {
            let (dataset, bytes) = load(data, *format)?;
            let problem = ProblemData::build(&dataset)?;
            let w = DVector::from_column_slice(w);
            let gammas = gammas
                .clone()
                .unwrap_or_else(|| certify::default_gammas(&problem, *c));
            let grade = match lambda {
                Some(l) => {
                    let lambda = DVector::from_column_slice(l);
                    crate::error::ensure_len("lambda", problem.n_samples(), lambda.len())?;
                    problem.slack(&w, *b)?;
                    let n = problem.n_features();
                    let rhs = DVector::from_fn(n + 1, |i, _| if i < n { -w[i] } else { 0.0 });
                    let residual = (problem.b().transpose() * &lambda - rhs).norm();
                    let point = PrimalDualPoint::from_primal(&problem, w.clone(), *b, lambda)?;
                    grade_primal_dual(point, residual, &problem, *c, &gammas, *tol)?
                }
                None => grade_point(&w, *b, &problem, *c, &gammas, *tol)?,
            };
            let digest = inputs_digest([
                bytes.as_slice(),
                format!("certify {w:?} {b} {c} {gammas:?} {lambda:?} {tol}").as_bytes(),
            ]);
            let code = expectation_code(*expect, grade.verdict);
            let payload = json!({
                "c": c,
                "tol": tol,
                "gammas": gammas,
                "objective": problem.objective(&w, *b, *c)?,
                "grade": grade,
            });
            emit(
                Report::new("certify", digest, payload).with_problem(&problem),
                out.as_deref(),
                code,
            )
        }

        Command::ProxEval { s, gamma, c } => {
            let params = ProxParams::new(*gamma, *c)?;
            let sets = prox_vector(s, params)?;
            let digest = inputs_digest([format!("prox-eval {s:?} {gamma} {c}")]);
            let payload = json!({
                "gamma": gamma,
                "c": c,
                "gamma_c": params.gamma_c(),
                "regime": if params.is_large_step() { "gamma_c_at_least_2" } else { "gamma_c_below_2" },
                "s": s,
                "prox": sets,
            });
            emit(Report::new("prox-eval", digest, payload), None, EXIT_OK)
        }

        Command::SupportVectors {
            data,
            format,
            c,
            sigma,
            tol,
            max_iter,
            out,
        } => {
            let (dataset, bytes) = load(data, *format)?;
            let problem = ProblemData::build(&dataset)?;
            let config = SolverConfig::new(*c)
                .with_sigma(*sigma)
                .with_tol(*tol)
                .with_max_iter(*max_iter);
            let result = train_admm(&problem, &config)?;
            let support = extract_support(
                &result.point,
                &problem,
                support_threshold(config.gamma(), *tol),
            )?
            .with_source(result.certificate.verdict);
            let check = if config.gamma_c() >= 2.0 {
                Some(verify_support_hyperplanes(
                    &result.point,
                    &problem,
                    *c,
                    config.gamma(),
                    *tol,
                )?)
            } else {
                None
            };
            let digest = inputs_digest([
                bytes.as_slice(),
                format!("support-vectors {c} {sigma} {tol} {max_iter}").as_bytes(),
            ]);
            let code = if result.status == SolveStatus::Diverged {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            };
            let payload = json!({
                "config": config,
                "gamma_c": config.gamma_c(),
                "solve": result,
                "support": support,
                "hyperplane_check": check,
            });
            emit(
                Report::new("support-vectors", digest, payload).with_problem(&problem),
                out.as_deref(),
                code,
            )
        }

        Command::Counterexample { gammas, out } => {
            let gammas = gammas
                .clone()
                .unwrap_or_else(|| fixtures::COUNTEREXAMPLE_GAMMAS.to_vec());
            let report = counterexample_report(&gammas)?;
            emit(report, out.as_deref(), EXIT_OK)
        }

        Command::GenData {
            n,
            sep,
            outliers,
            seed,
            out,
            dim,
            format,
        } => {
            let config = SyntheticConfig::new(*n, *sep, *outliers, *seed).with_dim(*dim);
            let data = gen_synthetic(&config)?;
            std::fs::write(out, write_dataset(&data.dataset, *format))?;
            let digest = inputs_digest([format!("gen-data {config:?} {format:?}")]);
            let payload = json!({
                "config": config,
                "path": out,
                "format": format,
                "samples": data.dataset.n_samples(),
                "outliers": data.outliers,
            });
            emit(
                Report::new("gen-data", digest, payload).with_seed(*seed),
                None,
                EXIT_OK,
            )
        }
    }
}

/// KKT and per-`γ` P-stationarity reports for the embedded three-point example.
pub fn counterexample_report(gammas: &[f64]) -> Result<Report> {
    let dataset = fixtures::counterexample();
    let problem = ProblemData::build(&dataset)?;
    let c = fixtures::COUNTEREXAMPLE_C;
    let w = DVector::from_column_slice(&fixtures::COUNTEREXAMPLE_W);
    let lambda = DVector::from_column_slice(&fixtures::COUNTEREXAMPLE_LAMBDA);
    let point = PrimalDualPoint::from_primal(&problem, w, fixtures::COUNTEREXAMPLE_B, lambda)?;
    let grade = grade_primal_dual(point, 0.0, &problem, c, gammas, certify::DEFAULT_TOL)?;
    let digest = inputs_digest([format!("counterexample {gammas:?}")]);
    let payload = json!({
        "c": c,
        "objective": problem.objective(&grade.point.w, grade.point.b, c)?,
        "kkt": grade.certificates[0].kkt,
        "per_gamma": grade.certificates.iter().map(|cert| json!({
            "gamma": cert.gamma,
            "gamma_c": cert.gamma * c,
            "r_prox": cert.r_prox,
            "prox_residuals": cert.prox_residuals,
            "verdict": cert.verdict,
        })).collect::<Vec<_>>(),
        "grade": grade,
    });
    Ok(Report::new("counterexample", digest, payload).with_problem(&problem))
}
