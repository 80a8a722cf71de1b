//! `toric-dhym`: run stability and period checks on toric fans and write
//! JSON reports. Exit codes: 0 all verdicts computed, 1 input error,
//! 2 numerical failure.

mod examples;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use job::{render, run, Check, Failure, JobSpec};

#[derive(Parser, Debug)]
#[command(name = "toric-dhym", version, about = "dHYM, Bridgeland and mirror-period checks on smooth toric varieties")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Preset fan: p1, p2, pn(n), p1xp1, hirzebruch(a), blp_p2, blpq_p2, blp_pn(n)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Fan document (JSON with dim, rays, max_cones and optional name, basis)
    #[arg(long, global = true)]
    fan_file: Option<PathBuf>,
    /// Float tolerance for verdicts (exact arithmetic when absent)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiply omega by sqrt(S), e.g. 1/3
    #[arg(long, global = true, value_name = "S")]
    omega_scale: Option<String>,
    /// B-field class
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
}

/// Classes are "c0,c1,.." in ray or declared-basis coordinates, or "2,-1@basis(h,e)".
#[derive(Subcommand, Debug)]
enum Cmd {
    /// Nakai-Moishezon dHYM positivity of alpha with respect to omega
    CheckDhym {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Phase-inequality form for the line bundle L
    PhaseForm {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long = "L", visible_alias = "l", allow_hyphen_values = true)]
        l: String,
    },
    /// Arcara-Miles scan of L^k over a range of k
    Bridgeland {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long = "L", visible_alias = "l", allow_hyphen_values = true)]
        l: String,
        #[arg(long, conflicts_with = "k_scan")]
        k: Option<u64>,
        /// Inclusive range a..b (default 1..10)
        #[arg(long)]
        k_scan: Option<String>,
        /// Also compare with dHYM positivity of -L at each k
        #[arg(long)]
        dictionary: bool,
    },
    /// Minimal angle and semipositivity
    MinAngle {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Rank-2 inequalities for L1 + L2
    HigherRank {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long = "L1", visible_alias = "l1", allow_hyphen_values = true)]
        l1: String,
        /// Defaults to O
        #[arg(long = "L2", visible_alias = "l2", allow_hyphen_values = true)]
        l2: Option<String>,
        /// Comma-separated scales
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<u64>,
        /// Also run the Bridgeland rank-2 instability test
        #[arg(long)]
        instability: bool,
    },
    /// Jacob-Sheu windows on Bl_p P^n
    JacobSheu {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long = "L", visible_alias = "l", allow_hyphen_values = true)]
        l: String,
    },
    /// Mirror potential for (omega, beta)
    LgBuild {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long)]
        critical_points: bool,
    },
    /// Gamma-class integral against the positive-cycle period
    GammaCheck {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        z: f64,
        /// Novikov truncation degree
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Period over the positive real cycle
    Period {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        z: f64,
    },
    /// Residue pairing K(f, g) over the critical points
    Residue {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Write the worked example reports to a directory
    Examples {
        #[arg(long, default_value = "example-reports")]
        out: PathBuf,
    },
    /// Run a JSON job file
    Run {
        #[arg(long)]
        job: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Novikov coordinates, one per Mori cone generator
    #[arg(long, value_delimiter = ',', conflicts_with = "omega")]
    q: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
}

fn job_from(g: &Global, cmd: Cmd) -> Result<JobSpec, Failure> {
    let mut j = JobSpec {
        preset: g.preset.clone(),
        fan_file: g.fan_file.clone(),
        omega_scale: g.omega_scale.clone(),
        beta: g.beta.clone(),
        tol: g.tol,
        seed: g.seed,
        output: g.json_out.clone(),
        ..Default::default()
    };
    match cmd {
        Cmd::CheckDhym { omega, alpha } => {
            j.omega = Some(omega);
            j.alpha = Some(alpha);
            j.checks = vec![Check::CheckDhym];
        }
        Cmd::PhaseForm { omega, l } => {
            j.omega = Some(omega);
            j.l = Some(l);
            j.checks = vec![Check::PhaseForm];
        }
        Cmd::Bridgeland { omega, l, k, k_scan, dictionary } => {
            j.omega = Some(omega);
            j.l = Some(l);
            j.k = k.into_iter().collect();
            j.k_range = k_scan;
            j.checks = vec![Check::Bridgeland];
            if dictionary {
                j.checks.push(Check::Dictionary);
            }
        }
        Cmd::MinAngle { omega, alpha } => {
            j.omega = Some(omega);
            j.alpha = Some(alpha);
            j.checks = vec![Check::MinAngle];
        }
        Cmd::HigherRank { omega, l1, l2, k, instability } => {
            j.omega = Some(omega);
            j.l1 = Some(l1);
            j.l2 = l2;
            j.k = k;
            j.checks = vec![Check::HigherRank];
            if instability {
                j.checks.push(Check::Instability);
            }
        }
        Cmd::JacobSheu { omega, l } => {
            j.omega = Some(omega);
            j.l = Some(l);
            j.checks = vec![Check::JacobSheu];
        }
        Cmd::LgBuild { omega, critical_points } => {
            j.omega = Some(omega);
            j.checks = vec![Check::LgBuild];
            if critical_points {
                j.checks.push(Check::CriticalPoints);
            }
        }
        Cmd::GammaCheck { point, z, n_max } => {
            (j.q, j.omega) = (point.q, point.omega);
            j.z = Some(z);
            j.n_max = n_max;
            j.checks = vec![Check::GammaCheck];
        }
        Cmd::Period { point, z } => {
            (j.q, j.omega) = (point.q, point.omega);
            j.z = Some(z);
            j.checks = vec![Check::Period];
        }
        Cmd::Residue { point, f, g } => {
            (j.q, j.omega) = (point.q, point.omega);
            j.f = Some(f);
            j.g = Some(g);
            j.checks = vec![Check::Residue];
        }
        Cmd::Run { job } => {
            let text = std::fs::read_to_string(&job).map_err(|e| Failure::Input(format!("{}: {e}", job.display())))?;
            let mut spec: JobSpec =
                serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", job.display())))?;
            if g.json_out.is_some() {
                spec.output = g.json_out.clone();
            }
            return Ok(spec);
        }
        Cmd::Examples { .. } => unreachable!("handled before lowering"),
    }
    Ok(j)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Cmd::Examples { out } = &cli.cmd {
        for name in examples::emit(out)? {
            println!("{}", out.join(name).display());
        }
        return Ok(());
    }
    let job = job_from(&cli.global, cli.cmd)?;
    let report = run(&job)?;
    let text = render(&report);
    match &job.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            for r in &report.results {
                let name = serde_json::to_value(r.check).unwrap();
                println!("{}: {}", name.as_str().unwrap(), r.summary);
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap reports usage errors with status 2, which is reserved here
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
