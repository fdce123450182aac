//! `ilim` command line.
//!
//! Exit status is 0 on success, 1 for usage or validation errors and 2 when a
//! run fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use super::config::{Engine, SweepConfig};
use super::report::emit_report;
use super::sweep::{resolve_jobs, run_sweep, SweepResult};
use crate::analysis::{energy_budget_series, error_series};
use crate::corrector::{verify_corrector_scalings, ScalingReport, Trace};
use crate::criteria::{evaluate_criteria, evaluate_criteria_viscous, Exponent, LayerSpec, MSchedule};
use crate::error::{Error, Result};
use crate::field::{make_channel_grid, Clustering, GridSpec};
use crate::solver::{run_simulation, Trajectory};

#[derive(Parser, Debug)]
#[command(name = "ilim", version, about = "Inviscid-limit experiments for 2D channel flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flag overrides applied on top of a configuration file.
#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    /// Viscosities, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    nu: Vec<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Lebesgue exponent of the layer condition (`inf` allowed).
    #[arg(long)]
    r: Option<Exponent>,
    /// Layer constant.
    #[arg(long = "C")]
    c: Option<f64>,
    /// `constant:C`, `power:C,A` or `table:t:M,...`.
    #[arg(long = "M-form")]
    m_form: Option<MSchedule>,
}

impl Overrides {
    fn apply(&self, cfg: &mut SweepConfig) -> Result<()> {
        if !self.nu.is_empty() {
            let mut nus = self.nu.clone();
            nus.sort_by(|a, b| b.total_cmp(a));
            nus.dedup();
            cfg.nu_list = nus;
        }
        if let Some(nx) = self.nx {
            cfg.grid.nx = nx;
        }
        if let Some(ny) = self.ny {
            cfg.grid.ny = ny;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(r) = self.r {
            cfg.layer.r = r;
        }
        if let Some(c) = self.c {
            cfg.layer.c = c;
        }
        if let Some(m) = &self.m_form {
            cfg.m_schedule = m.clone();
        }
        cfg.validate()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One paired Navier-Stokes / Euler run (first viscosity of the config).
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, default_value = "ilim-run")]
        out: PathBuf,
    },
    /// Runs every viscosity of a sweep configuration and writes the report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Worker threads (falls back to ILIM_JOBS, then the core count).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "ilim-sweep")]
        out: PathBuf,
    },
    /// Evaluates the layer criteria on stored snapshots.
    Criteria {
        /// Output of `simulate` or a single trajectory directory.
        dir: PathBuf,
        /// Euler trajectory paired with a single viscous trajectory.
        #[arg(long)]
        euler: Option<PathBuf>,
        #[arg(long, default_value = "2")]
        r: Exponent,
        #[arg(long = "C", default_value_t = 10.0)]
        c: f64,
        #[arg(long = "M-form", default_value = "power:1,0.5")]
        m_form: MSchedule,
        /// Use `−∂2 u1` instead of the vorticity.
        #[arg(long)]
        du1dy: bool,
        /// Report path (default `DIR/criteria.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits the corrector norm scalings for a sample trace.
    CorrectorCheck {
        #[arg(long, default_value_t = 64)]
        nx: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error rates and criteria for the exact shear solution.
    ShearVerify {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "ilim-shear")]
        out: PathBuf,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => 1,
                _ => 2,
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate {
            config,
            overrides,
            out,
        } => simulate(config.as_deref(), &overrides, &out),
        Command::Sweep {
            config,
            overrides,
            jobs,
            out,
        } => {
            let mut cfg = SweepConfig::load(&config)?;
            overrides.apply(&mut cfg)?;
            let result = run_sweep(&cfg, resolve_jobs(jobs))?;
            emit_report(&result, &out)?;
            summarize(&result, &out);
            Ok(())
        }
        Command::Criteria {
            dir,
            euler,
            r,
            c,
            m_form,
            du1dy,
            out,
        } => criteria(&dir, euler.as_deref(), LayerSpec { c, r }, &m_form, du1dy, out),
        Command::CorrectorCheck { nx, out } => corrector_check(nx, out.as_deref()),
        Command::ShearVerify { overrides, jobs, out } => shear_verify(&overrides, jobs, &out),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn simulate(config: Option<&Path>, overrides: &Overrides, out: &Path) -> Result<()> {
    let mut cfg = match config {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default(),
    };
    overrides.apply(&mut cfg)?;
    let nu = cfg.nu_list[0];
    let run = run_simulation(&cfg.simulation(nu))?;
    run.ns.write_dir(&out.join("ns"))?;
    run.euler.write_dir(&out.join("euler"))?;
    let errors = error_series(&run.ns, &run.euler)?;
    errors.write_csv(&out.join("errors.csv"))?;
    let report = evaluate_criteria(&run.ns, &run.euler, &cfg.m_schedule, &cfg.layer, cfg.use_du1dy)?;
    report.write_csv(&out.join("criteria.csv"))?;
    if run.ns.len() >= 3 {
        energy_budget_series(&run.ns, &run.euler, cfg.alpha_for(nu))?.write_csv(&out.join("budget.csv"))?;
    }
    write_text(&out.join("config.toml"), &cfg.to_toml_string())?;
    println!(
        "nu = {nu}: {} snapshots, sup |u - ubar|^2 = {:e}, criteria {}",
        run.ns.len(),
        errors.sup_value,
        if report.all_pass() { "pass" } else { "fail" }
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn summarize(result: &SweepResult, out: &Path) {
    for p in &result.points {
        match &p.outcome {
            Ok(r) => println!(
                "nu = {:e}: sup error {:e}, criteria {}{}",
                p.nu,
                r.errors.sup_value,
                if r.criteria_pass() { "pass" } else { "fail" },
                if r.under_resolved() { " (under-resolved layer)" } else { "" }
            ),
            Err(m) => println!("nu = {:e}: failed: {m}", p.nu),
        }
    }
    match &result.rate {
        Some(f) => println!("fitted exponent {:.4} over {} points", f.exponent, f.n_samples),
        None => println!("fitted exponent undefined (fewer than 3 usable points)"),
    }
    println!("wrote {}", out.display());
}

fn load_pair(dir: &Path, euler: Option<&Path>) -> Result<(Trajectory, Option<Trajectory>)> {
    let (ns_dir, eu_dir) = if dir.join("ns").is_dir() {
        (dir.join("ns"), Some(euler.map_or_else(|| dir.join("euler"), Path::to_path_buf)))
    } else {
        (dir.to_path_buf(), euler.map(Path::to_path_buf))
    };
    let ns = Trajectory::read_dir(&ns_dir)?;
    let eu = match eu_dir {
        Some(d) if d.is_dir() => Some(Trajectory::read_dir(&d)?),
        Some(d) if euler.is_some() => return Err(Error::invalid(format!("{} is not a directory", d.display()))),
        _ => None,
    };
    Ok((ns, eu))
}

fn criteria(
    dir: &Path,
    euler: Option<&Path>,
    spec: LayerSpec,
    m: &MSchedule,
    du1dy: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    spec.validate()?;
    let (ns, eu) = load_pair(dir, euler)?;
    let report = match &eu {
        Some(e) => evaluate_criteria(&ns, e, m, &spec, du1dy)?,
        None => evaluate_criteria_viscous(&ns, m, &spec, du1dy)?,
    };
    let path = out.unwrap_or_else(|| dir.join("criteria.csv"));
    report.write_csv(&path)?;
    println!(
        "{} times, criteria {}{}; wrote {}",
        report.rows.len(),
        if report.all_pass() { "pass" } else { "fail" },
        if eu.is_none() { " (no Euler trajectory: back-flow not checked)" } else { "" },
        path.display()
    );
    Ok(())
}

fn corrector_check(nx: usize, out: Option<&Path>) -> Result<()> {
    let period = 2.0 * std::f64::consts::PI;
    let grid = make_channel_grid(nx, 3, period, 4.0, Clustering::Uniform)?;
    let trace = Trace::from_fn(
        &grid,
        |x| 1.0 + 0.5 * x.cos() + 0.25 * (2.0 * x).sin(),
        |x| -0.5 * x.sin() + 0.5 * (2.0 * x).cos(),
        |x| -0.5 * x.cos() - (2.0 * x).sin(),
    );
    let samples: Vec<f64> = (0..7).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect();
    let mut report = ScalingReport::default();
    for p in [1.0, 2.0, f64::INFINITY] {
        report.extend(verify_corrector_scalings(p, &samples, &trace, period, 4.0)?);
    }
    let mut ok = true;
    for row in &report.rows {
        let pass = (row.fitted_exponent - row.expected_exponent).abs() <= 0.05;
        ok &= pass;
        println!(
            "{:>8} p = {:<3} exponent {:+.4} (expected {:+.4}) {}",
            row.quantity.name(),
            Exponent(row.p),
            row.fitted_exponent,
            row.expected_exponent,
            if pass { "ok" } else { "MISMATCH" }
        );
    }
    if let Some(path) = out {
        report.write_csv(path)?;
        println!("wrote {}", path.display());
    }
    if ok {
        Ok(())
    } else {
        Err(Error::Format("corrector scalings outside tolerance".into()))
    }
}

/// Default configuration of the exact shear study.
pub fn shear_verify_config() -> SweepConfig {
    SweepConfig {
        nu_list: vec![1e-2, 1e-3, 1e-4, 1e-5],
        grid: GridSpec {
            nx: 8,
            ny: 1025,
            period: 2.0 * std::f64::consts::PI,
            height: 4.0,
            clustering: Clustering::Tanh { strength: 3.0 },
        },
        t_end: 1.0,
        dt: 0.05,
        outputs: 20,
        engine: Engine::ShearExact,
        ..SweepConfig::default()
    }
}

fn shear_verify(overrides: &Overrides, jobs: Option<usize>, out: &Path) -> Result<()> {
    let mut cfg = shear_verify_config();
    overrides.apply(&mut cfg)?;
    let jobs = resolve_jobs(jobs);
    let result = run_sweep(&cfg, jobs)?;
    emit_report(&result, out)?;
    for r in [1.0, 2.0, f64::INFINITY] {
        let spec = LayerSpec { r: Exponent(r), ..cfg.layer };
        let name = format!("criteria_r{}.csv", Exponent(r));
        let extra = if spec == cfg.layer {
            result.clone()
        } else {
            run_sweep(&SweepConfig { layer: spec, ..cfg.clone() }, jobs)?
        };
        write_text(&out.join(&name), &super::report::criteria_csv(&extra))?;
        let pass = extra
            .points
            .iter()
            .all(|p| p.outcome.as_ref().is_ok_and(|o| o.criteria_pass()));
        println!("r = {}: criteria {}", Exponent(r), if pass { "pass" } else { "fail" });
    }
    summarize(&result, out);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["ilim", "sweep"]), 1);
        assert_eq!(run(["ilim", "frobnicate"]), 1);
        assert_eq!(run(["ilim", "simulate", "--bogus"]), 1);
        assert_eq!(run(["ilim", "--help"]), 0);
    }

    #[test]
    fn invalid_overrides_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        let o = out.to_str().unwrap();
        assert_eq!(run(["ilim", "simulate", "--nu", "-1", "--out", o]), 1);
        assert_eq!(run(["ilim", "simulate", "--M-form", "power:x", "--out", o]), 1);
        assert_eq!(run(["ilim", "sweep", "--config", "/nonexistent/cfg.toml", "--out", o]), 1);
    }
}
