//! Command-line front end: run simulations, certify surface energies,
//! run convergence studies, and compare snapshots.
//!
//! Exit codes: 0 success, 1 runtime failure (early termination, energy
//! violation, solver breakdown), 2 invalid input (unparseable files,
//! failed validation, disproven stability for `check-gamma`, mismatched
//! topologies for `distance`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use curveflow::anisotropy::{run_all_certifiers, GammaSpec, Verdict};
use curveflow::driver::{build_initial, run, SimulationConfig, Termination};
use curveflow::error::Error;
use curveflow::fem;
use curveflow::geometry::{manifold_distance, Topology};
use curveflow::harness::{run_convergence, ConvergenceSpec, ORDER_PASS_THRESHOLD};
use curveflow::io;

#[derive(Parser)]
#[command(
    name = "curveflow",
    about = "Energy-stable finite element evolution of curves under anisotropic surface diffusion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation from a JSON configuration file.
    Simulate {
        /// Simulation configuration (JSON).
        config: PathBuf,
        /// Output directory for diagnostics and snapshots.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Additionally dump the first step system in coordinate format.
        #[arg(long)]
        dump_system: bool,
    },
    /// Certify the energy-stability condition for a surface energy spec.
    CheckGamma {
        /// Anisotropy spec (JSON).
        spec: PathBuf,
    },
    /// Run a mesh-refinement convergence study.
    Converge {
        /// Convergence study spec (JSON).
        spec: PathBuf,
        /// Output directory for the error table and reference snapshots.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Symmetric-difference distance between two snapshot files.
    Distance {
        a: PathBuf,
        b: PathBuf,
    },
}

/// Exit code 2 for input-side errors, 1 for runtime failures.
fn classify(err: &Error) -> u8 {
    match err {
        Error::Malformed(_)
        | Error::InvalidConfig(_)
        | Error::InvalidShape(_)
        | Error::InvalidSpec(_)
        | Error::InvalidConvergenceSpec(_)
        | Error::InvalidMobility(_)
        | Error::InvalidCurve(_)
        | Error::NonPositiveGamma { .. }
        | Error::TopologyMismatch { .. }
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(classify(err))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            out_dir,
            dump_system,
        } => cmd_simulate(&config, &out_dir, dump_system),
        Command::CheckGamma { spec } => cmd_check_gamma(&spec),
        Command::Converge { spec, out_dir } => cmd_converge(&spec, &out_dir),
        Command::Distance { a, b } => cmd_distance(&a, &b),
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

/// Formats a time for use in snapshot file names (shortest exact
/// decimal, e.g. `0.25` or `1`).
fn time_label(t: f64) -> String {
    format!("{t}")
}

fn cmd_simulate(config_path: &Path, out_dir: &Path, dump_system: bool) -> ExitCode {
    let outcome = (|| -> Result<Termination, Error> {
        let config = SimulationConfig::from_json(&read_text(config_path)?)?;
        config.validate()?;

        if dump_system {
            let initial = build_initial(&config)?;
            fem::wellposed(&initial)?;
            let system = match config.topology {
                Topology::Closed => fem::assemble_closed(&initial, &config.gamma, config.tau)?,
                Topology::OpenOnSubstrate => fem::assemble_open(
                    &initial,
                    &config.gamma,
                    config.tau,
                    config.sigma,
                    config.eta,
                )?,
            };
            let path = out_dir.join("system_step0.txt");
            io::atomic_write(&path, system.dump_coordinate_text().as_bytes())?;
            println!("wrote {}", path.display());
        }

        let result = run(&config)?;

        let csv_path = out_dir.join("diagnostics.csv");
        io::atomic_write(
            &csv_path,
            curveflow::driver::diagnostics_to_csv(&result.diagnostics).as_bytes(),
        )?;
        for (t, curve) in &result.snapshots {
            io::write_snapshot(&out_dir.join(format!("snap_{}.json", time_label(*t))), curve)?;
        }
        io::write_snapshot(&out_dir.join("final.json"), &result.final_curve)?;

        let last = result.diagnostics.last().expect("diagnostics never empty");
        println!(
            "termination: {:?} at t = {}; area = {:.6}, energy = {:.6}, mesh ratio = {:.3}",
            result.termination, last.t, last.area, last.energy, last.mesh_ratio
        );
        println!("wrote {}", csv_path.display());
        Ok(result.termination)
    })();

    match outcome {
        Ok(Termination::ReachedTEnd) | Ok(Termination::Equilibrium) => ExitCode::SUCCESS,
        Ok(reason) => {
            eprintln!("run terminated early: {reason:?}");
            ExitCode::from(1)
        }
        Err(e) => fail(&e),
    }
}

fn cmd_check_gamma(spec_path: &Path) -> ExitCode {
    let outcome = (|| -> Result<Vec<curveflow::anisotropy::ConditionReport>, Error> {
        let spec: GammaSpec = serde_json::from_str(&read_text(spec_path)?)
            .map_err(|e| Error::Malformed(format!("anisotropy spec: {e}")))?;
        spec.validate()?;
        run_all_certifiers(&spec)
    })();

    match outcome {
        Ok(reports) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&reports).expect("report serialization cannot fail")
            );
            if reports.iter().any(|r| r.verdict == Verdict::Disproven) {
                ExitCode::from(2)
            } else if reports.iter().any(|r| r.verdict == Verdict::Proven) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_converge(spec_path: &Path, out_dir: &Path) -> ExitCode {
    let outcome = (|| {
        let spec = ConvergenceSpec::from_json(&read_text(spec_path)?)?;
        let report = run_convergence(&spec)?;

        let csv_path = out_dir.join("convergence.csv");
        io::atomic_write(&csv_path, report.to_csv().as_bytes())?;
        for (t, curve) in &report.reference {
            io::write_snapshot(&out_dir.join(format!("ref_{}.json", time_label(*t))), curve)?;
        }
        println!("wrote {}", csv_path.display());
        Ok::<_, Error>(report)
    })();

    match outcome {
        Ok(report) => {
            if report.fitted_orders.is_empty() {
                eprintln!("warning: single mesh size, no order to fit");
                return ExitCode::SUCCESS;
            }
            for (t, order) in &report.fitted_orders {
                println!("t = {t}: fitted order {order:.3}");
            }
            if report.passes() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "error decay below order {ORDER_PASS_THRESHOLD} at some evaluation time"
                );
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_distance(a: &Path, b: &Path) -> ExitCode {
    let outcome = (|| {
        let ca = io::read_snapshot(a)?;
        let cb = io::read_snapshot(b)?;
        manifold_distance(&ca, &cb)
    })();
    match outcome {
        Ok(d) => {
            println!("{d:.11e}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
