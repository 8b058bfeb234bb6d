use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use tvfj_core::scenario::{
    load_scenario, preset_doc, run, PresetName, ReportBundle, RunOptions, Scenario, Verb,
    WindowSpec, OUT_DIR_ENV,
};
use tvfj_core::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_CERTIFICATE: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "tvfj",
    version,
    about = "Simulate time-varying Friedkin-Johnsen opinion dynamics and certify their stability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the trajectory and the norm trace of Φ(t, 0).
    Simulate(Common),
    /// Scan windows for defected temporal graphs and report bounds.
    Certify(Common),
    /// Decompose a periodic schedule into per-phase time-invariant systems.
    Decompose(Common),
    /// Estimate the ω-limit points and check containment.
    Omega(Common),
    /// Compute the robustness threshold and run the configured perturbation.
    Robustness(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file, or `preset:example1|example2|example3`. Repeat to run
    /// several scenarios.
    #[arg(long, required = true)]
    scenario: Vec<String>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "w-threshold")]
    w_threshold: Option<f64>,
    /// Window length, `switching` or `period`.
    #[arg(long, value_parser = parse_window)]
    window: Option<WindowSpec>,
    /// Each run writes into `<out-dir>/<scenario>/<verb>`.
    #[arg(long = "out-dir", env = OUT_DIR_ENV, default_value = "tvfj-out")]
    out_dir: PathBuf,
    /// Number of scenarios to run concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
}

fn parse_window(s: &str) -> Result<WindowSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Outcome {
    Done { dir: PathBuf, bundle: Box<ReportBundle> },
    Failed { code: u8, message: String },
}

fn resolve_scenario(arg: &str) -> Result<Scenario, Error> {
    match arg.strip_prefix("preset:") {
        Some(name) => {
            let preset = match name {
                "example1" => PresetName::Example1,
                "example2" => PresetName::Example2,
                "example3" => PresetName::Example3,
                other => return Err(Error::Parse(format!("unknown preset {other:?}"))),
            };
            Scenario::from_doc(preset_doc(preset))
        }
        None => load_scenario(arg),
    }
}

fn error_code(e: &Error) -> u8 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_CERTIFICATE
    }
}

fn run_one(arg: &str, opts: &RunOptions, dir: &Path) -> Outcome {
    let result = resolve_scenario(arg).and_then(|sc| run(&sc, opts));
    match result {
        // Parse errors from files already name the path.
        Err(e @ Error::Parse(_)) => Outcome::Failed {
            code: error_code(&e),
            message: e.to_string(),
        },
        Err(e) => Outcome::Failed {
            code: error_code(&e),
            message: format!("{arg}: {e}"),
        },
        Ok(bundle) => match bundle
            .write_to(dir)
            .with_context(|| format!("writing {}", dir.display()))
        {
            Ok(()) => Outcome::Done {
                dir: dir.to_path_buf(),
                bundle: Box::new(bundle),
            },
            Err(e) => Outcome::Failed {
                code: EXIT_IO,
                message: format!("{arg}: {e:#}"),
            },
        },
    }
}

/// Output directory per scenario argument, disambiguating repeated names.
fn output_dirs(args: &[String], root: &Path, verb: &str) -> Vec<PathBuf> {
    let mut used: Vec<String> = Vec::new();
    args.iter()
        .map(|arg| {
            let base = match arg.strip_prefix("preset:") {
                Some(name) => name.to_string(),
                None => Path::new(arg)
                    .file_stem()
                    .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned()),
            };
            let mut name = base.clone();
            let mut k = 2;
            while used.contains(&name) {
                name = format!("{base}-{k}");
                k += 1;
            }
            used.push(name.clone());
            root.join(name).join(verb)
        })
        .collect()
}

fn summary(bundle: &ReportBundle) -> String {
    let r = &bundle.report;
    if let Some(reason) = &r.certificate_unavailable {
        return format!("certificate unavailable: {reason}");
    }
    if let Some(s) = &r.simulation {
        return format!("final ‖Φ(t,0)‖ = {:.6e}", s.final_norm);
    }
    if let Some(c) = &r.certification {
        let dtg = c.windows.iter().filter(|w| w.is_dtg).count();
        let bound = c.union_bound_trace.last().copied().unwrap_or(1.0);
        return format!(
            "{}: {dtg}/{} windows defected, union bound {bound:.6e}",
            c.verdict.label(),
            c.windows.len()
        );
    }
    if let Some(d) = &r.decomposition {
        let points = d.omega.as_ref().map_or(0, |o| o.points.len());
        return format!("period {}, {points} distinct fixed points", d.period);
    }
    if let Some(o) = &r.omega {
        return format!(
            "{} ω points, contained in innate range: {}",
            o.estimate.points.len(),
            o.contained_in_innate_range
        );
    }
    if let Some(rb) = &r.robustness {
        return format!("threshold {:.6e}", rb.threshold.threshold);
    }
    String::new()
}

fn execute(verb: Verb, verb_name: &str, common: Common) -> u8 {
    let opts = RunOptions {
        verb,
        horizon: common.horizon,
        epsilon: common.epsilon,
        w_threshold: common.w_threshold,
        window: common.window,
    };
    let dirs = output_dirs(&common.scenario, &common.out_dir, verb_name);
    let count = common.scenario.len();
    let results: Vec<Mutex<Option<Outcome>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = (common.jobs as usize).min(count).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= count {
                    break;
                }
                let outcome = run_one(&common.scenario[k], &opts, &dirs[k]);
                *results[k].lock().expect("result slot") = Some(outcome);
            });
        }
    });

    let mut code = 0u8;
    for (arg, slot) in common.scenario.iter().zip(results) {
        match slot.into_inner().expect("result slot").expect("every job ran") {
            Outcome::Done { dir, bundle } => {
                println!("{arg}: {} -> {}", summary(&bundle), dir.display());
                if bundle.report.certificate_unavailable.is_some() {
                    code = combine(code, EXIT_CERTIFICATE);
                }
            }
            Outcome::Failed { code: c, message } => {
                eprintln!("error: {message}");
                code = combine(code, c);
            }
        }
    }
    code
}

/// Validation failures dominate certificate failures, which dominate success.
fn combine(current: u8, new: u8) -> u8 {
    let rank = |c: u8| match c {
        0 => 0,
        EXIT_CERTIFICATE => 1,
        EXIT_VALIDATION => 2,
        _ => 3,
    };
    if rank(new) > rank(current) {
        new
    } else {
        current
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (verb, name, common) = match cli.command {
        Command::Simulate(c) => (Verb::Simulate, "simulate", c),
        Command::Certify(c) => (Verb::Certify, "certify", c),
        Command::Decompose(c) => (Verb::Decompose, "decompose", c),
        Command::Omega(c) => (Verb::Omega, "omega", c),
        Command::Robustness(c) => (Verb::Robustness, "robustness", c),
    };
    ExitCode::from(execute(verb, name, common))
}
