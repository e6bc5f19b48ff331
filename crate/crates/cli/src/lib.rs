//! The `icek` command line: extension values, event traces, certificates
//! and exact oracles on model files.
//!
//! Exit codes: 0 on success (including a verified-valid certificate), 1 for
//! a certificate that fails verification, 2 for unusable input, 3 when a
//! numerical procedure fails.

use clap::{Parser, Subcommand, ValueEnum};
use icek_core::extension::{
    precise_reach_probability, precise_safety_probability, reach_limit, safety_limit,
    williams_nmeasurable, LimitOptions, LimitResult,
};
use icek_core::io;
use icek_core::sampling;
use icek_core::witness::{lp_witness_search, williams_gap_search, GapReport};
use icek_core::Error as CoreError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "icek", version, about = "Imprecise Markov chains: extension values and executable certificates")]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower expectation of a finite-depth gamble.
    Nmeas {
        model: PathBuf,
        gamble: PathBuf,
    },
    /// Lower probability of ever entering the target states.
    Reach {
        model: PathBuf,
        /// Target states, comma separated or repeated.
        #[arg(long, required = true, value_delimiter = ',')]
        target: Vec<String>,
        #[arg(long, default_value_t = 64)]
        max_horizon: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Lower probability of never leaving the safe states.
    Safety {
        model: PathBuf,
        /// Safe states, comma separated or repeated.
        #[arg(long, required = true, value_delimiter = ',')]
        safe: Vec<String>,
        #[arg(long, default_value_t = 64)]
        max_horizon: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Certificate search and verification.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Exact values for precise chains.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Probe sampled stay events for daylight between the two extensions.
    GapSearch {
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Horizons at which certificates are searched.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3usize])]
        cert_horizons: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        extremes: usize,
        #[arg(long, default_value_t = 64)]
        max_horizon: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Search for the best certificate at a horizon.
    Search {
        model: PathBuf,
        gamble: PathBuf,
        /// Domination horizon; defaults to the gamble's depth.
        #[arg(long)]
        horizon: Option<usize>,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify a certificate against a model and gamble.
    Verify {
        model: PathBuf,
        gamble: PathBuf,
        certificate: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact event probabilities for a precise stationary chain.
    Precise {
        model: PathBuf,
        /// Target states for the hitting probability.
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<String>>,
        /// Safe states for the staying probability.
        #[arg(long, value_delimiter = ',')]
        safe: Option<Vec<String>>,
    },
}

/// Runs the command line and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &CoreError) -> i32 {
    match e {
        CoreError::Solver(_) | CoreError::Numerical(_) | CoreError::NotMonotone { .. } => 3,
        _ => 2,
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| CoreError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<io::ModelDocument> {
    let doc = io::parse_model(&read_file(path)?)?;
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    Ok(doc)
}

fn member_indices(names: &[String], listed: &[String]) -> Result<Vec<usize>> {
    listed.iter().map(|s| io::state_index(names, s)).collect()
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce(&T)) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => text(value),
    }
    Ok(())
}

fn print_limit(res: &LimitResult) {
    println!("value: {}", res.value);
    println!("horizon: {}", res.horizon);
    println!("converged: {}", res.converged);
    println!(
        "certified for: {}",
        if res.vvs_only {
            "limit-superior extension only"
        } else {
            "both extensions"
        }
    );
    let trace: Vec<String> = res.trace.iter().map(|v| v.to_string()).collect();
    println!("trace: {}", trace.join(" "));
}

#[derive(Serialize)]
struct NmeasOut {
    value: f64,
    depth: usize,
}

#[derive(Serialize)]
struct SearchOut {
    alpha: f64,
    horizon: usize,
    selection_depth: usize,
    almost_desirable: bool,
    min_lower_expectation: f64,
    dominates: bool,
    domination_margin: f64,
}

#[derive(Serialize)]
struct OracleOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    reach: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    safety: Option<f64>,
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Nmeas { model, gamble } => {
            let doc = load_model(model)?;
            let f = io::parse_gamble(&read_file(gamble)?, &doc.names)?;
            let value = williams_nmeasurable(&doc.model, &f)?;
            let out = NmeasOut {
                value,
                depth: f.depth(),
            };
            emit(cli.format, &out, |o| {
                println!("value: {}", o.value);
                println!("depth: {}", o.depth);
            })?;
            Ok(0)
        }
        Command::Reach {
            model,
            target,
            max_horizon,
            tol,
        } => {
            let doc = load_model(model)?;
            let set = member_indices(&doc.names, target)?;
            let options = LimitOptions {
                tol: *tol,
                max_horizon: *max_horizon,
            };
            let res = reach_limit(&doc.model, &set, &options)?;
            emit(cli.format, &res, print_limit)?;
            Ok(0)
        }
        Command::Safety {
            model,
            safe,
            max_horizon,
            tol,
        } => {
            let doc = load_model(model)?;
            let set = member_indices(&doc.names, safe)?;
            let options = LimitOptions {
                tol: *tol,
                max_horizon: *max_horizon,
            };
            let res = safety_limit(&doc.model, &set, &options)?;
            emit(cli.format, &res, print_limit)?;
            Ok(0)
        }
        Command::Witness(WitnessCommand::Search {
            model,
            gamble,
            horizon,
            output,
        }) => {
            let doc = load_model(model)?;
            let f = io::parse_gamble(&read_file(gamble)?, &doc.names)?;
            let horizon = horizon.unwrap_or_else(|| f.depth());
            let cert = lp_witness_search(&doc.model, &f, horizon)?;
            let report = io::verify_certificate(&doc.model, &doc.names, &f, &cert)?;
            let cert_text = io::write_certificate(&cert, &doc.names)?;
            let summary = SearchOut {
                alpha: cert.alpha,
                horizon: cert.horizon,
                selection_depth: cert.selection.depth(),
                almost_desirable: report.almost_desirable,
                min_lower_expectation: report.min_lower_expectation,
                dominates: report.dominates,
                domination_margin: report.domination_margin,
            };
            match output {
                Some(path) => {
                    fs::write(path, cert_text + "\n").map_err(|e| {
                        CoreError::Parse(format!("cannot write {}: {e}", path.display()))
                    })?;
                    emit(cli.format, &summary, |s| {
                        println!("alpha: {}", s.alpha);
                        println!("horizon: {}", s.horizon);
                        println!("almost desirable: {}", s.almost_desirable);
                        println!("dominates: {}", s.dominates);
                    })?;
                    eprintln!("wrote certificate to {}", path.display());
                }
                None => {
                    println!("{cert_text}");
                    eprintln!("alpha: {}", summary.alpha);
                }
            }
            Ok(0)
        }
        Command::Witness(WitnessCommand::Verify {
            model,
            gamble,
            certificate,
        }) => {
            let doc = load_model(model)?;
            let f = io::parse_gamble(&read_file(gamble)?, &doc.names)?;
            let cert = io::parse_certificate(&read_file(certificate)?, &doc.names)?;
            let report = io::verify_certificate(&doc.model, &doc.names, &f, &cert)?;
            emit(cli.format, &report, |r| {
                println!("alpha: {}", r.alpha);
                println!("horizon: {}", r.horizon);
                println!(
                    "almost desirable: {} (min lower expectation {} at `{}`)",
                    r.almost_desirable, r.min_lower_expectation, r.worst_situation
                );
                println!(
                    "dominates: {} (margin {} on path {})",
                    r.dominates,
                    r.domination_margin,
                    r.worst_path.join(".")
                );
                println!("certificate is {}", if r.valid { "valid" } else { "INVALID" });
            })?;
            Ok(if report.valid { 0 } else { 1 })
        }
        Command::Oracle(OracleCommand::Precise {
            model,
            target,
            safe,
        }) => {
            if target.is_none() && safe.is_none() {
                return Err(CoreError::InvalidArgument(
                    "pass --target and/or --safe".into(),
                ));
            }
            let doc = load_model(model)?;
            let reach = target
                .as_ref()
                .map(|t| {
                    let set = member_indices(&doc.names, t)?;
                    precise_reach_probability(&doc.model, &set)
                })
                .transpose()?;
            let safety = safe
                .as_ref()
                .map(|b| {
                    let set = member_indices(&doc.names, b)?;
                    precise_safety_probability(&doc.model, &set)
                })
                .transpose()?;
            let out = OracleOut { reach, safety };
            emit(cli.format, &out, |o| {
                if let Some(v) = o.reach {
                    println!("reach: {v}");
                }
                if let Some(v) = o.safety {
                    println!("safety: {v}");
                }
            })?;
            Ok(0)
        }
        Command::GapSearch {
            states,
            trials,
            seed,
            cert_horizons,
            extremes,
            max_horizon,
            tol,
        } => {
            if *states < 2 {
                return Err(CoreError::InvalidArgument(
                    "gap probes need at least two states".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let nx = *states;
            let k = *extremes;
            let options = LimitOptions {
                tol: *tol,
                max_horizon: *max_horizon,
            };
            let report = williams_gap_search(
                *trials,
                |_| {
                    let model = sampling::random_markov_model(&mut rng, nx, k)?;
                    let safe = random_proper_subset(&mut rng, nx);
                    Ok((model, safe))
                },
                cert_horizons,
                &options,
            )?;
            emit(cli.format, &report, print_gap_report)?;
            Ok(0)
        }
    }
}

fn print_gap_report(report: &GapReport) {
    for p in &report.probes {
        let safe: Vec<String> = p.safe.iter().map(|x| x.to_string()).collect();
        let certs: Vec<String> = p
            .certified_lower
            .iter()
            .map(|hb| format!("h{}={}", hb.horizon, hb.alpha))
            .collect();
        println!(
            "trial {}: safe states [{}], limit {}{}, trace upper bound {}, certified lower {}{}",
            p.trial,
            safe.join(","),
            p.ev_limit,
            if p.converged { "" } else { " (not converged)" },
            p.williams_upper,
            certs.join(" "),
            if p.gap_flagged { ", FLAGGED" } else { "" },
        );
    }
    if report.any_flagged {
        println!("some probes flagged a gap beyond {}", report.threshold);
    } else {
        println!(
            "no probe flagged a gap beyond {}; the trace never undercuts its own limit",
            report.threshold
        );
    }
}

fn random_proper_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let size = rng.gen_range(1..n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    let mut subset = idx[..size].to_vec();
    subset.sort_unstable();
    subset
}
