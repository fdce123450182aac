use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::config::SweepConfig;
use super::sweep::SweepResult;
use crate::criteria::CRITERIA_HEADER;
use crate::error::{Error, Result};
use crate::solver::{EULER_SCHEME, NS_SCHEME};

pub const SWEEP_HEADER: &str = "nu,status,sup_error,thm1,thm2,within_bound,criteria_pass,under_resolved";

#[derive(Serialize)]
struct RatesJson {
    exponent: Option<f64>,
    intercept: Option<f64>,
    residual: Option<f64>,
    n_samples: usize,
    defined: bool,
}

#[derive(Serialize)]
struct Failure<'a> {
    nu: f64,
    message: &'a str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    ns_scheme: &'static str,
    euler_scheme: &'static str,
    config: &'a SweepConfig,
    output_times: Vec<f64>,
    c_fit: Option<f64>,
    c_fit_calibrated: bool,
    failures: Vec<Failure<'a>>,
    files: Vec<String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// File name of the per-viscosity error curve.
pub fn error_curve_name(nu: f64) -> String {
    format!("error_nu_{nu:e}.dat")
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in &result.points {
        let (thm1, thm2) = match result.bounds(p.nu) {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        let _ = match &p.outcome {
            Ok(r) => writeln!(
                out,
                "{},ok,{},{},{},{},{},{}",
                p.nu,
                r.errors.sup_value,
                opt(thm1),
                opt(thm2),
                opt_bool(result.within_bound(p)),
                r.criteria_pass(),
                r.under_resolved()
            ),
            Err(_) => writeln!(out, "{},failed,,{},{},,,", p.nu, opt(thm1), opt(thm2)),
        };
    }
    out
}

pub fn criteria_csv(result: &SweepResult) -> String {
    let mut buf = format!("{CRITERIA_HEADER}\n").into_bytes();
    for p in &result.points {
        if let Ok(r) = &p.outcome {
            r.criteria.write_csv_rows(&mut buf).expect("writing to memory");
        }
    }
    String::from_utf8(buf).expect("ascii output")
}

/// Criterion rows for the additional layer constants, with a leading `C` column.
pub fn criteria_grid_csv(result: &SweepResult) -> String {
    let mut out = format!("C,{CRITERIA_HEADER}\n");
    for p in &result.points {
        if let Ok(r) = &p.outcome {
            for (spec, rep) in &r.extra_criteria {
                let mut rows = Vec::new();
                rep.write_csv_rows(&mut rows).expect("writing to memory");
                for line in String::from_utf8(rows).expect("ascii output").lines() {
                    let _ = writeln!(out, "{},{line}", spec.c);
                }
            }
        }
    }
    out
}

pub fn rates_json(result: &SweepResult) -> String {
    let n_samples = result.rate.as_ref().map(|r| r.n_samples).unwrap_or_else(|| {
        result
            .points
            .iter()
            .filter(|p| p.outcome.as_ref().is_ok_and(|r| r.errors.sup_value > 0.0))
            .count()
    });
    let body = RatesJson {
        exponent: result.rate.as_ref().map(|r| r.exponent),
        intercept: result.rate.as_ref().map(|r| r.intercept),
        residual: result.rate.as_ref().map(|r| r.residual),
        n_samples,
        defined: result.rate.is_some(),
    };
    serde_json::to_string_pretty(&body).expect("rates serialize") + "\n"
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `sweep.csv`, `criteria.csv`, `rates.json`, `manifest.json` and the
/// two-column `.dat` curves into `dir`. Output bytes depend only on `result`.
pub fn emit_report(result: &SweepResult, dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        write(dir, &name, &contents)?;
        files.push(name);
        Ok(())
    };
    put("sweep.csv".into(), sweep_csv(result))?;
    put("criteria.csv".into(), criteria_csv(result))?;
    if !result.config.extra_layers().is_empty() {
        put("criteria_cgrid.csv".into(), criteria_grid_csv(result))?;
    }
    put("rates.json".into(), rates_json(result))?;
    let mut sup = String::from("# nu sup_error\n");
    for p in &result.points {
        if let Ok(r) = &p.outcome {
            let _ = writeln!(sup, "{} {}", p.nu, r.errors.sup_value);
            let mut curve = format!("# t error_sq (nu = {})\n", p.nu);
            for (t, e) in r.errors.times.iter().zip(&r.errors.values) {
                let _ = writeln!(curve, "{t} {e}");
            }
            put(error_curve_name(p.nu), curve)?;
        }
    }
    put("sup_error.dat".into(), sup)?;
    files.push("manifest.json".into());
    let manifest = Manifest {
        tool: "ilim",
        version: env!("CARGO_PKG_VERSION"),
        ns_scheme: NS_SCHEME,
        euler_scheme: EULER_SCHEME,
        config: &result.config,
        output_times: result.config.output_times(),
        c_fit: result.c_fit,
        c_fit_calibrated: result.c_fit_calibrated,
        failures: result.failures().map(|(nu, message)| Failure { nu, message }).collect(),
        files: files.clone(),
    };
    write(
        dir,
        "manifest.json",
        &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
    )?;
    Ok(files)
}

/// Reads the configuration embedded in a report's `manifest.json`.
pub fn load_manifest_config(path: &Path) -> Result<SweepConfig> {
    #[derive(serde::Deserialize)]
    struct Partial {
        config: SweepConfig,
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let m: Partial =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(m.config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweep::{run_sweep, SweepPoint};
    use crate::harness::{Engine, SweepConfig};
    use crate::field::{Clustering, GridSpec};

    fn config() -> SweepConfig {
        SweepConfig {
            nu_list: vec![1e-2, 1e-3, 1e-4],
            grid: GridSpec {
                nx: 4,
                ny: 129,
                period: 1.0,
                height: 4.0,
                clustering: Clustering::Tanh { strength: 2.0 },
            },
            t_end: 1.0,
            dt: 0.1,
            outputs: 4,
            engine: Engine::ShearExact,
            c_grid: vec![5.0, 10.0, 20.0],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn empty_result_writes_headers() {
        let result = SweepResult {
            config: config(),
            points: vec![],
            c_fit: None,
            c_fit_calibrated: true,
            rate: None,
        };
        assert_eq!(sweep_csv(&result), format!("{SWEEP_HEADER}\n"));
        assert_eq!(criteria_csv(&result), format!("{CRITERIA_HEADER}\n"));
        let v: serde_json::Value = serde_json::from_str(&rates_json(&result)).unwrap();
        assert_eq!(v["defined"], false);
        assert!(v["exponent"].is_null());
    }

    #[test]
    fn one_point_and_failures() {
        let cfg = SweepConfig {
            nu_list: vec![1e-3],
            ..config()
        };
        let mut result = run_sweep(&cfg, 1).unwrap();
        assert_eq!(sweep_csv(&result).lines().count(), 2);
        result.points.push(SweepPoint {
            nu: 1e-5,
            outcome: Err("diverged".into()),
        });
        let dir = tempfile::tempdir().unwrap();
        emit_report(&result, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("0.00001,failed"));
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["failures"][0]["message"], "diverged");
    }

    #[test]
    fn parse_back_and_manifest_round_trip() {
        let cfg = config();
        let result = run_sweep(&cfg, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_report(&result, dir.path()).unwrap();
        assert!(files.contains(&"criteria_cgrid.csv".to_string()));
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        for (line, p) in text.lines().skip(1).zip(&result.points) {
            let cols: Vec<&str> = line.split(',').collect();
            let nu: f64 = cols[0].parse().unwrap();
            let sup: f64 = cols[2].parse().unwrap();
            assert!((nu - p.nu).abs() <= 1e-15 * p.nu);
            let want = p.outcome.as_ref().unwrap().errors.sup_value;
            assert!((sup - want).abs() <= 1e-15 * want);
        }
        let crit = std::fs::read_to_string(dir.path().join("criteria.csv")).unwrap();
        let rows: Vec<_> = result.points.iter().flat_map(|p| p.outcome.as_ref().unwrap().criteria.rows.clone()).collect();
        for (line, r) in crit.lines().skip(1).zip(&rows) {
            let cols: Vec<f64> = line.split(',').filter_map(|c| c.parse().ok()).collect();
            assert_eq!(cols[0], r.t);
            assert_eq!(cols[4], r.cond_lhs);
        }
        let curve = std::fs::read_to_string(dir.path().join(error_curve_name(1e-3))).unwrap();
        assert_eq!(curve.lines().count(), 1 + cfg.outputs + 1);
        let reloaded = load_manifest_config(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(reloaded, cfg);
    }

    #[test]
    fn reports_are_byte_identical() {
        let cfg = config();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        emit_report(&run_sweep(&cfg, 1).unwrap(), a.path()).unwrap();
        emit_report(&run_sweep(&cfg, 3).unwrap(), b.path()).unwrap();
        for f in ["sweep.csv", "criteria.csv", "rates.json", "manifest.json", "sup_error.dat"] {
            assert_eq!(
                std::fs::read(a.path().join(f)).unwrap(),
                std::fs::read(b.path().join(f)).unwrap(),
                "{f}"
            );
        }
    }
}
