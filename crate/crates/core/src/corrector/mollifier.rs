use std::sync::OnceLock;

use crate::quad;

/// Normalized smooth bump `c · exp(−1/((z−a)(b−z)))` on `(a, b)`, zero elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    lo: f64,
    hi: f64,
    norm: f64,
    /// Length unit of the exponent; `1` gives the literal formula above.
    unit: f64,
}

/// The unit-mass bump supported in `[1/2, 4]` used by the flat corrector.
pub fn make_mollifier() -> Mollifier {
    static STANDARD: OnceLock<Mollifier> = OnceLock::new();
    *STANDARD.get_or_init(|| Mollifier::on(0.5, 4.0))
}

impl Mollifier {
    /// Unit-mass bump on `(lo, hi)`; the constant comes from adaptive quadrature.
    pub fn on(lo: f64, hi: f64) -> Self {
        Self::with_unit(lo, hi, 1.0)
    }

    /// Unit-mass bump on `(lo, hi)` with the shape of the bump on `(0, 1)`,
    /// i.e. `c · exp(−w²/((z−a)(b−z)))` with `w = b − a`.
    pub fn scaled(lo: f64, hi: f64) -> Self {
        Self::with_unit(lo, hi, hi - lo)
    }

    fn with_unit(lo: f64, hi: f64, unit: f64) -> Self {
        assert!(hi > lo, "empty mollifier support");
        let raw = Mollifier { lo, hi, norm: 1.0, unit };
        let mid = 0.5 * (lo + hi);
        let mass = quad::integrate(|z| raw.value(z), lo, mid) + quad::integrate(|z| raw.value(z), mid, hi);
        Mollifier {
            lo,
            hi,
            norm: 1.0 / mass,
            unit,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Normalization constant `c`.
    pub fn constant(&self) -> f64 {
        self.norm
    }

    #[inline]
    fn gap(&self, z: f64) -> f64 {
        (z - self.lo) * (self.hi - z) / (self.unit * self.unit)
    }

    pub fn value(&self, z: f64) -> f64 {
        if z <= self.lo || z >= self.hi {
            return 0.0;
        }
        self.norm * (-1.0 / self.gap(z)).exp()
    }

    /// `ψ'(z) = ψ(z) · g'(z) / g(z)²` with `g = (z−a)(b−z)/w²`.
    pub fn derivative(&self, z: f64) -> f64 {
        if z <= self.lo || z >= self.hi {
            return 0.0;
        }
        let g = self.gap(z);
        let dg = (self.lo + self.hi - 2.0 * z) / (self.unit * self.unit);
        self.value(z) * dg / (g * g)
    }

    /// `∫_{-∞}^{z} ψ`.
    pub fn cumulative(&self, z: f64) -> f64 {
        if z <= self.lo {
            return 0.0;
        }
        if z >= self.hi {
            return 1.0;
        }
        let mid = 0.5 * (self.lo + self.hi);
        if z <= mid {
            quad::integrate(|s| self.value(s), self.lo, z)
        } else {
            1.0 - quad::integrate(|s| self.value(s), z, self.hi)
        }
    }

    /// Cumulative integral at each of the increasing points `zs`.
    pub fn cumulative_at(&self, zs: &[f64]) -> Vec<f64> {
        zs.iter().map(|&z| self.cumulative(z)).collect()
    }

    /// Total mass, recomputed by quadrature.
    pub fn mass(&self) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        quad::integrate(|z| self.value(z), self.lo, mid) + quad::integrate(|z| self.value(z), mid, self.hi)
    }
}

/// Smooth cutoff equal to 1 on `(-∞, one_until]` and 0 on `[zero_from, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothCutoff {
    one_until: f64,
    zero_from: f64,
}

fn ramp_exp(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

impl SmoothCutoff {
    pub fn new(one_until: f64, zero_from: f64) -> Self {
        assert!(zero_from > one_until, "cutoff transition must have positive width");
        SmoothCutoff { one_until, zero_from }
    }

    fn phase(&self, y: f64) -> f64 {
        (self.zero_from - y) / (self.zero_from - self.one_until)
    }

    pub fn value(&self, y: f64) -> f64 {
        if y <= self.one_until {
            return 1.0;
        }
        if y >= self.zero_from {
            return 0.0;
        }
        let s = self.phase(y);
        let (a, b) = (ramp_exp(s), ramp_exp(1.0 - s));
        a / (a + b)
    }

    /// `ln(1 − η(y))`, accurate where `1 − η` underflows.
    pub fn ln_complement(&self, y: f64) -> f64 {
        if y <= self.one_until {
            return f64::NEG_INFINITY;
        }
        if y >= self.zero_from {
            return 0.0;
        }
        let s = self.phase(y);
        let (la, lb) = (-1.0 / s, -1.0 / (1.0 - s));
        let m = la.max(lb);
        lb - (m + ((la - m).exp() + (lb - m).exp()).ln())
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.one_until, self.zero_from)
    }
}
