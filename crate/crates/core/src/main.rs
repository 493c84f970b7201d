use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ymh::config::{Mode, SimConfig};
use ymh::hopf::HopfSampler;
use ymh::verify::{verify_algebra, verify_hopf, Check};
use ymh::{Error, Result};

/// Euler–Yang-Mills charged fluid simulator.
#[derive(Parser)]
#[command(name = "ymh", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation (or verification) described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        dt: Option<f64>,
        /// Worker threads for internal parallelism; never changes results.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Built-in verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Print a template configuration.
    EmitConfig {
        #[arg(long)]
        template: String,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Fiber volume and integration formula on the Hopf fibration.
    Hopf {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Bracket, Jacobi and coadjoint duality checks for su(2) on T^2.
    Algebra {
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        instances: Option<usize>,
    },
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn print_checks(checks: &[Check]) -> bool {
    let mut ok = true;
    for c in checks {
        let verdict = if c.passed() { "pass" } else { "FAIL" };
        println!("{:<44} {:>12.3e}  (tol {:.0e})  {verdict}", c.name, c.value, c.tolerance);
        ok &= c.passed();
    }
    ok
}

fn hopf(sampler: &HopfSampler) -> Result<Outcome> {
    let r = verify_hopf(sampler)?;
    println!("orbit volume {:.15}", r.orbit_volume);
    let mut ok = print_checks(&r.checks);
    println!("{:<8} {:>20} {:>20} {:>12} {:>12}", "f", "lhs", "rhs", "|lhs-rhs|", "3 sigma");
    for (name, c) in &r.functions {
        let verdict = if c.passed() { "pass" } else { "FAIL" };
        println!(
            "{name:<8} {:>20.12} {:>20.12} {:>12.3e} {:>12.3e}  {verdict}",
            c.lhs,
            c.rhs,
            c.difference(),
            3.0 * c.std_error
        );
        ok &= c.passed();
    }
    Ok(if ok { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn algebra(resolution: usize, instances: usize, seed: u64) -> Result<Outcome> {
    let r = verify_algebra(resolution, instances, seed)?;
    println!("su(2) on T^2, N = {}, {} instances", r.resolution, r.instances);
    Ok(if print_checks(&r.checks) { Outcome::Ok } else { Outcome::ChecksFailed })
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Run { config, output_dir, steps, dt, threads } => {
            let mut cfg = SimConfig::from_path(&config)?;
            if let Some(d) = output_dir {
                cfg.output.dir = d;
            }
            if let Some(s) = steps {
                cfg.time.steps = s;
            }
            if let Some(t) = dt {
                cfg.time.dt = t;
            }
            if threads == Some(0) {
                return Err(Error::InvalidArgument("--threads must be at least 1".into()));
            }
            cfg.validate()?;
            match cfg.mode {
                Mode::VerifyHopf => hopf(&cfg.sampler()),
                Mode::VerifyAlgebra => algebra(cfg.verify.resolution, cfg.verify.instances, cfg.seed),
                Mode::Simulate => {
                    let r = ymh::run::run(&cfg)?;
                    let first = r.records.first().expect("initial record");
                    let last = r.records.last().expect("initial record");
                    println!("steps {}  t {:.6}", cfg.time.steps, last.t);
                    println!("E_total {:.15e} -> {:.15e}", first.total, last.total);
                    if first.total != 0.0 {
                        println!("relative drift {:.3e}", (last.total - first.total) / first.total);
                    }
                    println!("diagnostics {}", r.csv.display());
                    Ok(Outcome::Ok)
                }
            }
        }
        Command::Verify { suite: Suite::Hopf { samples } } => {
            let mut s = HopfSampler::default();
            if let Some(k) = samples {
                s.samples = k;
            }
            hopf(&s)
        }
        Command::Verify { suite: Suite::Algebra { resolution, instances } } => {
            let n = resolution.unwrap_or(32);
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidArgument(format!("resolution must be a power of two >= 8, got {n}")));
            }
            algebra(n, instances.unwrap_or(50).max(1), HopfSampler::default().seed)
        }
        Command::EmitConfig { template } => {
            print!("{}", SimConfig::template(&template)?.to_toml());
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprint!("YMH-ERROR: {}", msg.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => {
            eprintln!("YMH-ERROR: verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("YMH-ERROR: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
