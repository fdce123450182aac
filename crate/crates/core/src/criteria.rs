//! Hypotheses of the conditional inviscid-limit theorem evaluated on computed
//! flows: non-dimensional scales, the Kato-type layer, absence of back-flow in
//! the Euler trace and the lower bound on the very negative vorticity.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{d_dy, layer_region, lp_norm, ScalarField};
use crate::quad;
use crate::solver::{FlowState, Trajectory};

/// Form of the vorticity threshold `M_ν(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum MSchedule {
    /// `M = c`.
    Constant { c: f64 },
    /// `M = c ν^a`.
    Power { c: f64, a: f64 },
    /// Piecewise-linear in `t` through `(t, M)` samples, held constant outside.
    Table { samples: Vec<(f64, f64)> },
}

impl Default for MSchedule {
    fn default() -> Self {
        MSchedule::Power { c: 1.0, a: 0.5 }
    }
}

impl MSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            MSchedule::Constant { c } | MSchedule::Power { c, .. } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::invalid(format!("M schedule constant must be positive, got {c}")));
                }
            }
            MSchedule::Table { samples } => {
                if samples.is_empty() {
                    return Err(Error::invalid("M table needs at least one sample"));
                }
                if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::invalid("M table times must increase"));
                }
                if samples.iter().any(|&(t, m)| !(m > 0.0 && m.is_finite() && t.is_finite())) {
                    return Err(Error::invalid("M table values must be positive"));
                }
            }
        }
        if let MSchedule::Power { a, .. } = self {
            if !a.is_finite() {
                return Err(Error::invalid("M power exponent must be finite"));
            }
        }
        Ok(())
    }

    /// `M_ν(t)`.
    pub fn eval(&self, nu: f64, t: f64) -> f64 {
        match self {
            MSchedule::Constant { c } => *c,
            MSchedule::Power { c, a } => c * nu.powf(*a),
            MSchedule::Table { samples } => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = samples.partition_point(|s| s.0 <= t);
                let (a, b) = (samples[k - 1], samples[k]);
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }

    /// `∫0^T M_ν(t) dt`.
    pub fn integral(&self, nu: f64, horizon: f64) -> f64 {
        if horizon <= 0.0 {
            return 0.0;
        }
        let breaks: Vec<f64> = match self {
            MSchedule::Table { samples } => samples.iter().map(|s| s.0).filter(|&t| t > 0.0 && t < horizon).collect(),
            _ => vec![],
        };
        quad::integrate_split(|t| self.eval(nu, t), 0.0, horizon, &breaks)
    }
}

impl fmt::Display for MSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MSchedule::Constant { c } => write!(f, "constant:{c}"),
            MSchedule::Power { c, a } => write!(f, "power:{c},{a}"),
            MSchedule::Table { samples } => {
                write!(f, "table:")?;
                for (k, (t, m)) in samples.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{t}:{m}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `constant:C`, `power:C,A` or `table:t0:m0,t1:m1,...`.
impl FromStr for MSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("M form `{s}` must look like kind:parameters")))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number `{v}` in M form `{s}`")))
        };
        let sched = match kind.trim() {
            "constant" | "const" => MSchedule::Constant { c: num(rest)? },
            "power" => {
                let (c, a) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::invalid("power form needs `power:C,A`"))?;
                MSchedule::Power { c: num(c)?, a: num(a)? }
            }
            "table" => MSchedule::Table {
                samples: rest
                    .split(',')
                    .map(|pair| {
                        let (t, m) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::invalid(format!("table entry `{pair}` must be t:M")))?;
                        Ok((num(t)?, num(m)?))
                    })
                    .collect::<Result<_>>()?,
            },
            other => return Err(Error::invalid(format!("unknown M form `{other}`"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}

/// Lebesgue exponent in `[1, ∞]`; serialized as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        crate::field::parse_exponent(s).map(Exponent)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v >= 1.0 => Ok(Exponent(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("exponent must be >= 1, got {v}"))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Layer constant `C` and Lebesgue exponent `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    #[serde(rename = "C")]
    pub c: f64,
    pub r: Exponent,
}

impl Default for LayerSpec {
    fn default() -> Self {
        LayerSpec {
            c: 10.0,
            r: Exponent(2.0),
        }
    }
}

impl LayerSpec {
    pub fn new(c: f64, r: f64) -> Result<Self> {
        let spec = LayerSpec { c, r: Exponent(r) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(format!("layer constant C must be positive, got {}", self.c)));
        }
        if !(self.r.0 >= 1.0) {
            return Err(Error::invalid(format!("layer exponent r must be >= 1, got {}", self.r)));
        }
        Ok(())
    }
}

/// `(ℒ, 𝒯)` from samples of the trace `U(x1, t)` on a uniform `x1` grid of
/// the given period (one row per time).
pub fn scales_from_trace(samples: &[Vec<f64>], period: f64) -> Result<(f64, f64)> {
    let mut l2_sq: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for row in samples {
        if row.is_empty() {
            return Err(Error::invalid("empty trace sample"));
        }
        let dx = period / row.len() as f64;
        l2_sq = l2_sq.max(row.iter().map(|u| u * u).sum::<f64>() * dx);
        sup = row.iter().fold(sup, |m, u| m.max(u.abs()));
    }
    if !(sup > 0.0) {
        return Err(Error::invalid("scales are undefined for a vanishing trace"));
    }
    let length = l2_sq / (sup * sup);
    Ok((length, length / sup))
}

/// Layer height with a flag set when the logarithm was clamped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerHeight {
    pub height: f64,
    pub clamped: bool,
}

/// `h = (ντ/C) log(C/(M_ν(t) τ))`, `τ = min(t, 1)`; empty at `t = 0` and clamped to
/// zero when the logarithm is not positive.
pub fn layer_height(nu: f64, t: f64, m: &MSchedule, spec: &LayerSpec) -> LayerHeight {
    let tau = t.clamp(0.0, 1.0);
    if tau == 0.0 {
        return LayerHeight {
            height: 0.0,
            clamped: false,
        };
    }
    let arg = spec.c / (m.eval(nu, t) * tau);
    if !(arg > 1.0) {
        return LayerHeight {
            height: 0.0,
            clamped: true,
        };
    }
    LayerHeight {
        height: nu * tau / spec.c * arg.ln(),
        clamped: false,
    }
}

/// `min_x1 U`; non-negative iff there is no back-flow.
pub fn backflow_margin(trace: &[f64]) -> f64 {
    trace.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Back-flow margin of an Euler state (its wall trace).
pub fn no_backflow_margin(euler: &FlowState) -> f64 {
    backflow_margin(euler.wall_trace())
}

/// Outcome of the very-negative-vorticity condition at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KatoOutcome {
    pub lhs: f64,
    pub rhs: f64,
    pub layer: LayerHeight,
    /// Grid rows inside the layer.
    pub rows: usize,
}

impl KatoOutcome {
    pub fn pass(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `ν^{(r−1)/r} ‖min(ω + M/ν, 0)‖_{L^r(Γ)}` against `τ^{1/r} M` for a given field.
pub fn kato_condition_field(omega: &ScalarField, nu: f64, t: f64, m: &MSchedule, spec: &LayerSpec) -> Result<KatoOutcome> {
    if !(nu > 0.0) {
        return Err(Error::invalid("the vorticity condition needs nu > 0"));
    }
    let r = spec.r.0;
    let tau = t.clamp(0.0, 1.0);
    let mv = m.eval(nu, t);
    let layer = layer_height(nu, t, m, spec);
    let region = layer_region(omega.grid(), layer.height);
    let rows = region.row_count();
    let rhs = if r.is_infinite() { mv } else { tau.powf(1.0 / r) * mv };
    let lhs = if region.is_empty() {
        0.0
    } else {
        let threshold = mv / nu;
        let negative = omega.map(|w| (w + threshold).min(0.0));
        let prefactor = if r.is_infinite() { nu } else { nu.powf((r - 1.0) / r) };
        prefactor * lp_norm(&negative, r, &region)?
    };
    Ok(KatoOutcome { lhs, rhs, layer, rows })
}

/// Field entering the condition: `ω`, or `−∂2 u1` when `use_du1dy` is set.
pub fn kato_field(state: &FlowState, use_du1dy: bool) -> ScalarField {
    if use_du1dy {
        d_dy(&state.velocity.comp1).scale(-1.0)
    } else {
        state.vorticity.clone()
    }
}

pub fn kato_condition(
    state: &FlowState,
    nu: f64,
    t: f64,
    m: &MSchedule,
    spec: &LayerSpec,
    use_du1dy: bool,
) -> Result<KatoOutcome> {
    kato_condition_field(&kato_field(state, use_du1dy), nu, t, m, spec)
}

/// `min_x1 (ω_wall + M_ν(t)/ν)`; non-negative iff the wall condition holds.
pub fn boundary_vorticity_condition(omega_wall: &[f64], nu: f64, t: f64, m: &MSchedule) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(Error::invalid("the wall vorticity condition needs nu > 0"));
    }
    let threshold = m.eval(nu, t) / nu;
    Ok(omega_wall.iter().map(|w| w + threshold).fold(f64::INFINITY, f64::min))
}

/// One line of a criterion report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub t: f64,
    pub nu: f64,
    pub layer_height: f64,
    pub backflow_margin: f64,
    pub cond_lhs: f64,
    pub cond_rhs: f64,
    pub cond_pass: bool,
    pub wall_vort_margin: f64,
    pub under_resolved: bool,
    #[serde(skip)]
    pub layer_clamped: bool,
}

impl CriterionRow {
    /// All three hypotheses hold at this time.
    pub fn all_pass(&self) -> bool {
        !(self.backflow_margin < 0.0) && self.cond_pass && self.wall_vort_margin >= 0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CriterionReport {
    pub rows: Vec<CriterionRow>,
}

pub const CRITERIA_HEADER: &str =
    "t,nu,layer_height,backflow_margin,cond_lhs,cond_rhs,cond_pass,wall_vort_margin,under_resolved";

impl CriterionReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.all_pass())
    }

    pub fn any_under_resolved(&self) -> bool {
        self.rows.iter().any(|r| r.under_resolved)
    }

    pub fn write_csv_rows(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                r.nu,
                r.layer_height,
                r.backflow_margin,
                r.cond_lhs,
                r.cond_rhs,
                r.cond_pass,
                r.wall_vort_margin,
                r.under_resolved
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = format!("{CRITERIA_HEADER}\n").into_bytes();
        self.write_csv_rows(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Evaluates back-flow, the layer condition and the wall condition at every
/// shared output time.
pub fn evaluate_criteria(
    ns: &Trajectory,
    euler: &Trajectory,
    m: &MSchedule,
    spec: &LayerSpec,
    use_du1dy: bool,
) -> Result<CriterionReport> {
    ns.check_paired(euler)?;
    evaluate(ns, Some(euler), m, spec, use_du1dy)
}

/// Like [`evaluate_criteria`] for a viscous trajectory alone; the back-flow
/// margin is reported as NaN.
pub fn evaluate_criteria_viscous(ns: &Trajectory, m: &MSchedule, spec: &LayerSpec, use_du1dy: bool) -> Result<CriterionReport> {
    evaluate(ns, None, m, spec, use_du1dy)
}

fn evaluate(
    ns: &Trajectory,
    euler: Option<&Trajectory>,
    m: &MSchedule,
    spec: &LayerSpec,
    use_du1dy: bool,
) -> Result<CriterionReport> {
    m.validate()?;
    spec.validate()?;
    let nu = ns.nu;
    let rows = ns
        .states()
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let kato = kato_condition(u, nu, u.t, m, spec, use_du1dy)?;
            let wall = boundary_vorticity_condition(u.vorticity.row(0), nu, u.t, m)?;
            Ok(CriterionRow {
                t: u.t,
                nu,
                layer_height: kato.layer.height,
                backflow_margin: euler.map_or(f64::NAN, |e| no_backflow_margin(&e.states()[k])),
                cond_lhs: kato.lhs,
                cond_rhs: kato.rhs,
                cond_pass: kato.pass(),
                wall_vort_margin: wall,
                under_resolved: u.t > 0.0 && kato.rows < 2,
                layer_clamped: kato.layer.clamped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriterionReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_channel_grid, Clustering, Region, VectorField};
    use proptest::prelude::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid() -> Arc<crate::field::Grid> {
        make_channel_grid(16, 65, 2.0 * PI, 1.0, Clustering::Uniform).unwrap()
    }

    // h is about 0.12 at nu = 1e-3, t = 1: several rows of the test grid
    fn thick_layer(r: f64) -> (MSchedule, LayerSpec) {
        (MSchedule::Constant { c: 1e-4 }, LayerSpec::new(0.05, r).unwrap())
    }

    #[test]
    fn scales_examples() {
        let n = 64;
        let ones = vec![vec![1.0; n]];
        let (l, t) = scales_from_trace(&ones, 3.0).unwrap();
        assert!((l - 3.0).abs() < 1e-14 && (t - 3.0).abs() < 1e-14);
        let cos: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
        let (l, t) = scales_from_trace(std::slice::from_ref(&cos), 2.0 * PI).unwrap();
        assert!((l - PI).abs() < 1e-12 && (t - PI).abs() < 1e-12);
        let doubled: Vec<f64> = cos.iter().map(|u| 2.0 * u).collect();
        let (l2, t2) = scales_from_trace(&[doubled], 2.0 * PI).unwrap();
        assert!((l2 - l).abs() < 1e-12 && (t2 - t / 2.0).abs() < 1e-12);
        assert!(scales_from_trace(&[vec![0.0; 4]], 1.0).is_err());
    }

    #[test]
    fn layer_height_examples() {
        let spec = LayerSpec::new(10.0, 2.0).unwrap();
        let m = MSchedule::Constant { c: 1e-2 };
        assert_eq!(layer_height(1e-3, 0.0, &m, &spec).height, 0.0);
        let h = layer_height(1e-3, 1.0, &m, &spec);
        assert!((h.height - 1e-4 * 1000f64.ln()).abs() < 1e-18);
        assert!((h.height - 6.9078e-4).abs() < 1e-8);
        let big = MSchedule::Constant { c: 20.0 };
        let h = layer_height(1e-3, 1.0, &big, &spec);
        assert!(h.height == 0.0 && h.clamped);
    }

    #[test]
    fn backflow_examples() {
        let n = 32;
        let xs: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
        let a: Vec<f64> = xs.iter().map(|x| 1.0 + x.cos()).collect();
        let b: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        assert!(backflow_margin(&a).abs() < 1e-15);
        assert!((backflow_margin(&b) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn kato_constant_fields() {
        let g = grid();
        let (nu, t) = (1e-3, 1.0);
        let (m, spec) = thick_layer(1.0);
        let layer = layer_height(nu, t, &m, &spec);
        let region = layer_region(&g, layer.height);
        assert!(region.row_count() >= 2);
        let calm = ScalarField::from_fn(&g, |_, _| 0.0);
        let out = kato_condition_field(&calm, nu, t, &m, &spec).unwrap();
        assert_eq!(out.lhs, 0.0);
        assert!(out.pass());
        let mv = m.eval(nu, t);
        let violent = ScalarField::from_fn(&g, |_, _| -2.0 * mv / nu);
        let out = kato_condition_field(&violent, nu, t, &m, &spec).unwrap();
        let area = region.area();
        assert!((out.lhs - mv * area / nu).abs() < 1e-12 * out.lhs);
        let inf = LayerSpec { r: Exponent::INFINITY, ..spec };
        let out = kato_condition_field(&violent, nu, t, &m, &inf).unwrap();
        assert!((out.lhs - nu * mv / nu).abs() < 1e-15);
        assert_eq!(out.rhs, mv);
    }

    #[test]
    fn wall_condition_examples() {
        let m = MSchedule::Constant { c: 0.1 };
        let nu = 1e-2;
        assert!((boundary_vorticity_condition(&[0.0; 4], nu, 0.5, &m).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(boundary_vorticity_condition(&[-10.0; 4], nu, 0.5, &m).unwrap(), 0.0);
    }

    #[test]
    fn schedules() {
        let p: MSchedule = "power:2,0.5".parse().unwrap();
        assert!((p.eval(1e-4, 0.3) - 2e-2).abs() < 1e-16);
        assert!((p.integral(1e-4, 2.0) - 4e-2).abs() < 1e-15);
        let t: MSchedule = "table:0:1,1:3".parse().unwrap();
        assert_eq!(t.eval(0.0, 0.5), 2.0);
        assert!((t.integral(0.0, 2.0) - 5.0).abs() < 1e-12);
        assert!("table:1:1,0:2".parse::<MSchedule>().is_err());
        assert!("power:-1,0.5".parse::<MSchedule>().is_err());
        assert!("wild:1".parse::<MSchedule>().is_err());
        assert_eq!(p.to_string().parse::<MSchedule>().unwrap(), p);
    }

    #[test]
    fn exponent_serde() {
        let spec = LayerSpec {
            c: 10.0,
            r: Exponent::INFINITY,
        };
        let j = serde_json::to_string(&spec).unwrap();
        assert_eq!(j, r#"{"C":10.0,"r":"inf"}"#);
        assert_eq!(serde_json::from_str::<LayerSpec>(&j).unwrap(), spec);
        assert!(serde_json::from_str::<LayerSpec>(r#"{"C":1.0,"r":0.5}"#).is_err());
    }

    #[test]
    fn manufactured_violation_fails() {
        let g = grid();
        let (nu, t) = (1e-3, 1.0);
        let (m, spec) = thick_layer(2.0);
        let k = 100.0 * m.eval(nu, t);
        let bad = ScalarField::from_fn(&g, |_, _| -k / nu);
        assert!(!kato_condition_field(&bad, nu, t, &m, &spec).unwrap().pass());
    }

    #[test]
    fn zero_flow_passes_everything() {
        let g = grid();
        let mut ns = Trajectory::new(&g, "ns", 0.1, 1e-3);
        let mut eu = Trajectory::new(&g, "euler", 0.1, 0.0);
        for k in 0..3 {
            let t = 0.5 * k as f64;
            ns.push(FlowState::new(t, 1e-3, VectorField::zeros(&g)).unwrap()).unwrap();
            eu.push(FlowState::new(t, 0.0, VectorField::zeros(&g)).unwrap()).unwrap();
        }
        let rep = evaluate_criteria(&ns, &eu, &MSchedule::default(), &LayerSpec::default(), false).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert!(rep.all_pass());
        assert!(rep.to_csv().starts_with(CRITERIA_HEADER));
        let short = Trajectory::new(&g, "x", 0.1, 0.0);
        assert!(evaluate_criteria(&ns, &short, &MSchedule::default(), &LayerSpec::default(), false).is_err());
    }

    proptest! {
        #[test]
        fn lhs_monotone_in_layer(seed in 0u64..1000, c1 in 3e-3f64..0.1, scale in 1.0f64..10.0) {
            let g = grid();
            let (nu, t) = (1e-3, 0.7);
            let m = MSchedule::Constant { c: 1e-3 };
            let field = ScalarField::from_fn(&g, |x, y| -50.0 * ((x * (1.0 + seed as f64 % 7.0)).sin() + y).abs());
            let thin = LayerSpec::new(c1 * scale, 2.0).unwrap();
            let thick = LayerSpec::new(c1, 2.0).unwrap();
            // h decreases in C once C exceeds e M tau
            let (h_thin, h_thick) = (layer_height(nu, t, &m, &thin).height, layer_height(nu, t, &m, &thick).height);
            prop_assert!(h_thick >= h_thin);
            let a = lp_norm(&field.map(|w| (w + m.eval(nu, t) / nu).min(0.0)), 2.0, &layer_region(&g, h_thin)).unwrap();
            let b = lp_norm(&field.map(|w| (w + m.eval(nu, t) / nu).min(0.0)), 2.0, &layer_region(&g, h_thick)).unwrap();
            prop_assert!(a <= b);
        }

        #[test]
        fn lhs_vanishes_above_threshold(r in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)], shift in 0.0f64..5.0) {
            let g = grid();
            let (nu, t) = (1e-3, 1.0);
            let (m, spec) = thick_layer(r);
            let field = ScalarField::from_fn(&g, |x, _| -m.eval(nu, t) / nu + shift * (1.0 + x.sin()));
            prop_assert_eq!(kato_condition_field(&field, nu, t, &m, &spec).unwrap().lhs, 0.0);
        }

        #[test]
        fn layer_monotone_in_tau(m in 1e-3f64..1.0, c in 1.0f64..50.0, t1 in 1e-4f64..1.0, t2 in 1e-4f64..1.0) {
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            let sched = MSchedule::Constant { c: m };
            prop_assume!(m * hi <= c / std::f64::consts::E);
            let spec = LayerSpec::new(c, 2.0).unwrap();
            prop_assert!(layer_height(1e-3, lo, &sched, &spec).height <= layer_height(1e-3, hi, &sched, &spec).height * (1.0 + 1e-12));
        }

        #[test]
        fn length_scale_homogeneous(lambda in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0]) {
            let row: Vec<f64> = (0..32).map(|i| 1.0 + 0.5 * (i as f64).sin()).collect();
            let scaled: Vec<f64> = row.iter().map(|u| lambda * u).collect();
            let (l1, _) = scales_from_trace(&[row], 2.0).unwrap();
            let (l2, _) = scales_from_trace(&[scaled], 2.0).unwrap();
            prop_assert!((l1 - l2).abs() <= 1e-12 * l1);
        }
    }

    #[test]
    fn r_one_and_infinity_match_direct_formulas() {
        let g = grid();
        let (nu, t) = (1e-3, 1.0);
        let (m, spec1) = thick_layer(1.0);
        let c = -7.0 * m.eval(nu, t) / nu;
        let field = ScalarField::from_fn(&g, |_, _| c);
        let h = layer_height(nu, t, &m, &spec1).height;
        let region = Region::strip(&g, h);
        let direct_area: f64 = (0..g.ny())
            .filter(|&j| g.y_coords()[j] > 0.0 && g.y_coords()[j] <= h)
            .map(|j| g.y_weights()[j] * g.period())
            .sum();
        let neg = (c + m.eval(nu, t) / nu).abs();
        let one = kato_condition_field(&field, nu, t, &m, &spec1).unwrap().lhs;
        assert!((one - neg * direct_area).abs() < 1e-12 * one);
        assert!((region.area() - direct_area).abs() < 1e-14);
        let inf = kato_condition_field(&field, nu, t, &m, &LayerSpec { r: Exponent::INFINITY, ..spec1 }).unwrap().lhs;
        assert!((inf - nu * neg).abs() < 1e-15 * inf.max(1.0));
    }
}
