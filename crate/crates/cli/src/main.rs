use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use firefront::output::write_outputs;
use firefront::{
    check_strong_convexity, gielis_theta_jet, load_scenario, run_scenario, Scenario, ScenarioError,
};

const EXIT_SCENARIO: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

/// Wildfire front propagation with superformula speed profiles.
#[derive(Debug, Parser)]
#[command(name = "firefront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shoot the ray fan, prune crossings and write fronts.
    Simulate {
        scenario: PathBuf,
        /// Number of rays (overrides the scenario).
        #[arg(long)]
        rays: Option<usize>,
        /// RK4 step (overrides the scenario).
        #[arg(long)]
        dt: Option<f64>,
        /// Output directory (overrides the scenario).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the SVG plot. With --csv or --svg only the named formats are written.
        #[arg(long)]
        svg: bool,
        /// Write the CSV tables.
        #[arg(long)]
        csv: bool,
        /// Refuse to run when the profile at the ignition point is not strongly convex.
        #[arg(long)]
        strict_convexity: bool,
    },
    /// Check strong convexity of the speed profile on a uniform angle grid.
    CheckConvexity {
        scenario: PathBuf,
        #[arg(long)]
        grid: usize,
        /// Evaluation point; defaults to the ignition point at t0.
        #[arg(long, value_name = "t,x1,x2", value_parser = parse_point)]
        at: Option<[f64; 3]>,
    },
    /// Print v(θ) and its derivatives as a CSV table.
    EvalProfile {
        scenario: PathBuf,
        #[arg(long, value_name = "t,x1,x2", value_parser = parse_point)]
        at: [f64; 3],
        #[arg(long)]
        samples: usize,
    },
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected t,x1,x2 but got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .map_err(|e| format!("`{p}`: {e}"))
            .and_then(|x| {
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(format!("`{p}` is not finite"))
                }
            })?;
    }
    Ok(out)
}

/// Reads and validates a scenario without the ignition convexity check.
fn read_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_toml_str(&text)
}

fn fail(e: &ScenarioError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    path: &Path,
    rays: Option<usize>,
    dt: Option<f64>,
    out: Option<PathBuf>,
    svg: bool,
    csv: bool,
    strict: bool,
) -> ExitCode {
    let scenario = match load_scenario(path, strict).and_then(|s| s.with_solver(rays, dt)) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let mut settings = scenario.output.clone();
    if let Some(dir) = out {
        settings.dir = dir;
    }
    if svg || csv {
        settings.svg = svg;
        settings.csv = csv;
    }
    let result = match run_scenario(&scenario) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let d = &result.diagnostics;
    println!(
        "rays: {}  dead: {}  failed: {}  min convexity margin: {:.6e}  wall time: {:.3} s",
        scenario.n_rays,
        d.dead_rays.len(),
        d.failed_rays.len(),
        d.min_margin,
        d.wall_time.as_secs_f64()
    );
    for f in &result.fronts {
        println!(
            "front t = {}: {} points{}",
            f.time,
            f.points.len(),
            if f.closed { ", closed" } else { "" }
        );
    }
    match write_outputs(&result, &settings) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing to {}: {e}", settings.dir.display());
            return ExitCode::from(EXIT_IO);
        }
    }
    if d.failed_rays.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "error: {} ray(s) hit a numerical failure: {:?}",
            d.failed_rays.len(),
            d.failed_rays
        );
        ExitCode::from(EXIT_NUMERICAL)
    }
}

fn check_convexity(path: &Path, grid: usize, at: Option<[f64; 3]>) -> ExitCode {
    let scenario = match read_scenario(path) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if grid < 64 {
        eprintln!("error: --grid must be at least 64");
        return ExitCode::from(EXIT_SCENARIO);
    }
    let [t, x1, x2] = at.unwrap_or([scenario.t0, scenario.ignition[0], scenario.ignition[1]]);
    let report = match scenario
        .field
        .params_at(t, [x1, x2])
        .and_then(|p| check_strong_convexity(&p, grid))
    {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    println!(
        "at t = {t}, x = ({x1}, {x2}): min margin {:.9e} at theta = {:.9} over {} angles: {}",
        report.min_margin,
        report.argmin_theta,
        report.grid_size,
        if report.passed {
            "strongly convex"
        } else {
            "NOT strongly convex"
        }
    );
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERICAL)
    }
}

fn eval_profile(path: &Path, at: [f64; 3], samples: usize) -> ExitCode {
    let scenario = match read_scenario(path) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    if samples == 0 {
        eprintln!("error: --samples must be positive");
        return ExitCode::from(EXIT_SCENARIO);
    }
    let [t, x1, x2] = at;
    let params = match scenario.field.params_at(t, [x1, x2]) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let mut table = String::from("theta,v,v_theta,v_thetatheta,convexity_margin\n");
    for k in 0..samples {
        let theta = std::f64::consts::TAU * k as f64 / samples as f64;
        match gielis_theta_jet(&params, theta) {
            Ok(j) => table.push_str(&format!(
                "{theta},{},{},{},{}\n",
                j.v,
                j.v_th,
                j.v_thth,
                j.convexity_margin()
            )),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_NUMERICAL);
            }
        }
    }
    print!("{table}");
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCENARIO } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    log::debug!("{cli:?}");
    match cli.command {
        Command::Simulate {
            scenario,
            rays,
            dt,
            out,
            svg,
            csv,
            strict_convexity,
        } => simulate(&scenario, rays, dt, out, svg, csv, strict_convexity),
        Command::CheckConvexity { scenario, grid, at } => check_convexity(&scenario, grid, at),
        Command::EvalProfile {
            scenario,
            at,
            samples,
        } => eval_profile(&scenario, at, samples),
    }
}
