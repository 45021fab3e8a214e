//! Test-function families on the unit disk, their evaluation, Taylor
//! coefficients and the exact membership criteria for `H(p, q, α)`.

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, serde_exact, to_f64, ExtRational, Rational};

/// A point `z = (1 - t) e^{iθ}` of the disk, stored through `t = 1 - |z|` so
/// that points extremely close to the boundary keep full relative precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint {
    pub t: f64,
    pub theta: f64,
}

impl DiskPoint {
    pub fn polar(t: f64, theta: f64) -> Self {
        DiskPoint { t, theta }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let modulus = z.norm();
        if !(modulus < 1.0) {
            return Err(Error::Domain(format!("point {z} is not inside the unit disk")));
        }
        Ok(DiskPoint { t: 1.0 - modulus, theta: z.arg() })
    }

    pub fn radius(&self) -> f64 {
        1.0 - self.t
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0 - self.t, self.theta)
    }

    /// `1 - z` without cancellation near `z = 1`.
    pub fn one_minus(&self) -> Complex64 {
        let (s, c) = self.theta.sin_cos();
        let h = (0.5 * self.theta).sin();
        Complex64::new(2.0 * h * h + self.t * c, -(1.0 - self.t) * s)
    }
}

/// The triple `(p, q, α)` with `p, q ∈ (0, ∞]` and `α ∈ (0, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: ExtRational,
    pub q: ExtRational,
    #[serde(with = "serde_exact")]
    pub alpha: Rational,
}

impl SpaceParams {
    pub fn new(p: ExtRational, q: ExtRational, alpha: Rational) -> Result<Self> {
        if !p.is_positive() || !q.is_positive() || !alpha.is_positive() {
            return Err(Error::Domain(format!(
                "space parameters need p > 0, q > 0, alpha > 0 (got p={p}, q={q}, alpha={})",
                format_rational(&alpha)
            )));
        }
        Ok(SpaceParams { p, q, alpha })
    }

    /// Parses `"p,q,alpha"`, e.g. `"1,2,3/2"` or `"inf,inf,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected 'p,q,alpha', got '{s}'")));
        }
        let p: ExtRational = parts[0].parse()?;
        let q: ExtRational = parts[1].parse()?;
        let alpha = match parts[2].parse::<ExtRational>()? {
            ExtRational::Finite(a) => a,
            ExtRational::Infinity => return Err(Error::Domain("alpha must be finite".into())),
        };
        SpaceParams::new(p, q, alpha)
    }

    /// `α + 1/p`, the critical growth exponent of the space.
    pub fn critical_exponent(&self) -> Rational {
        &self.alpha + self.p.recip()
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    pub fn p_f64(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn q_f64(&self) -> f64 {
        self.q.to_f64()
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.q, format_rational(&self.alpha))
    }
}

/// A user-supplied coefficient rule `n ↦ a_n` for lacunary series.
#[derive(Clone)]
pub struct CustomRule {
    pub name: String,
    pub coefficient: Arc<dyn Fn(u32) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomRule({})", self.name)
    }
}

impl PartialEq for CustomRule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.coefficient, &other.coefficient)
    }
}

/// Coefficient rule of a lacunary series `Σ_{n≥1} a_n z^{2^{n-1}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LacunaryRule {
    /// `a_n = 2^{nβ} n^{-κ}`.
    Geometric {
        #[serde(with = "serde_exact")]
        log2_growth: Rational,
        #[serde(with = "serde_exact")]
        poly_decay: Rational,
    },
    #[serde(skip)]
    Custom(CustomRule),
}

impl LacunaryRule {
    /// `ln |a_n|` and the sign of `a_n`.
    fn log_coefficient(&self, n: u32) -> (f64, f64) {
        match self {
            LacunaryRule::Geometric { log2_growth, poly_decay } => {
                let nf = n as f64;
                (nf * to_f64(log2_growth) * LN_2 - to_f64(poly_decay) * nf.ln(), 1.0)
            }
            LacunaryRule::Custom(rule) => {
                let a = (rule.coefficient)(n);
                (a.abs().ln(), if a < 0.0 { -1.0 } else { 1.0 })
            }
        }
    }

    pub fn coefficient(&self, n: u32) -> f64 {
        match self {
            LacunaryRule::Geometric { log2_growth, poly_decay } => {
                2f64.powf(n as f64 * to_f64(log2_growth)) * (n as f64).powf(-to_f64(poly_decay))
            }
            LacunaryRule::Custom(rule) => (rule.coefficient)(n),
        }
    }
}

pub const LACUNARY_MAX_TERMS: u32 = 1100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lacunary {
    pub rule: LacunaryRule,
    /// Number of terms kept. Terms whose modulus has dropped below the
    /// machine floor are skipped regardless.
    #[serde(default = "default_terms")]
    pub terms: u32,
}

fn default_terms() -> u32 {
    LACUNARY_MAX_TERMS
}

impl Lacunary {
    pub fn geometric(log2_growth: Rational, poly_decay: Rational) -> Self {
        Lacunary { rule: LacunaryRule::Geometric { log2_growth, poly_decay }, terms: LACUNARY_MAX_TERMS }
    }

    pub fn ones() -> Self {
        Self::geometric(Rational::zero(), Rational::zero())
    }

    pub fn custom(name: &str, coefficient: impl Fn(u32) -> f64 + Send + Sync + 'static) -> Self {
        Lacunary {
            rule: LacunaryRule::Custom(CustomRule { name: name.to_string(), coefficient: Arc::new(coefficient) }),
            terms: LACUNARY_MAX_TERMS,
        }
    }

    pub fn with_terms(mut self, terms: u32) -> Self {
        self.terms = terms.clamp(1, LACUNARY_MAX_TERMS);
        self
    }

    /// Truncation for norm computations in a space with weight `α`: keeps
    /// terms while `2^{-nα}|a_n| > tol·2^{-nα/2}` and returns the number of
    /// terms together with a geometric bound on the dropped weighted tail
    /// `Σ_{n>N} 2^{-nα}|a_n|` (infinite when no bound is available).
    pub fn truncation_for(&self, alpha: f64, tol: f64) -> (u32, f64) {
        let mut n = 1;
        while n < LACUNARY_MAX_TERMS {
            let (la, _) = self.rule.log_coefficient(n);
            let weighted = la - n as f64 * alpha * LN_2;
            if weighted <= tol.ln() - 0.5 * n as f64 * alpha * LN_2 {
                break;
            }
            n += 1;
        }
        let tail = match &self.rule {
            LacunaryRule::Geometric { log2_growth, poly_decay } => {
                let excess = to_f64(log2_growth) - alpha;
                let kappa = to_f64(poly_decay);
                // ratio of consecutive weighted terms is at most 2^{excess}·max(1, ((n+1)/n)^{-κ})
                let ratio = 2f64.powf(excess) * if kappa < 0.0 { (1.0 + 1.0 / n as f64).powf(-kappa) } else { 1.0 };
                if ratio < 1.0 {
                    let (la, _) = self.rule.log_coefficient(n);
                    let w = (la - n as f64 * alpha * LN_2).exp();
                    w * ratio / (1.0 - ratio)
                } else {
                    f64::INFINITY
                }
            }
            LacunaryRule::Custom(_) => f64::INFINITY,
        };
        (n, tail)
    }

    /// Terms of `f` on the circle `|z| = 1 - t` as `(n, c_n)` with
    /// `a_n r^{2^{n-1}} = c_n e^{scale}`; terms below `e^{-45}` of the largest
    /// are dropped. Returns `None` when every term vanishes.
    pub(crate) fn ring_terms(&self, t: f64) -> Option<(f64, Vec<(u32, f64)>)> {
        let ln_r = (-t).ln_1p();
        let mut raw: Vec<(u32, f64, f64)> = Vec::new();
        let mut max_log = f64::NEG_INFINITY;
        let mut power = 1.0f64;
        let mut decreasing = 0;
        let mut prev = f64::INFINITY;
        for n in 1..=self.terms {
            let (la, sign) = self.rule.log_coefficient(n);
            let lm = la + power * ln_r;
            if lm.is_nan() {
                break;
            }
            if lm > f64::NEG_INFINITY {
                raw.push((n, lm, sign));
                max_log = max_log.max(lm);
            }
            decreasing = if lm < prev { decreasing + 1 } else { 0 };
            prev = lm;
            if decreasing >= 3 && lm < max_log - 60.0 && -power * ln_r >= 64.0 {
                break;
            }
            power *= 2.0;
        }
        if max_log == f64::NEG_INFINITY {
            return None;
        }
        let terms = raw
            .into_iter()
            .filter(|(_, lm, _)| *lm >= max_log - 45.0)
            .map(|(n, lm, sign)| (n, sign * (lm - max_log).exp()))
            .collect();
        Some((max_log, terms))
    }

    /// `ln |f(z)|` and `f(z)` scaled by `exp(-scale)`; returns `(scale, value)`.
    fn eval_scaled(&self, pt: &DiskPoint) -> (f64, Complex64) {
        let ln_r = (-pt.t).ln_1p();
        let mut terms: Vec<(f64, Complex64)> = Vec::new();
        let mut phase = Complex64::from_polar(1.0, pt.theta);
        let mut power = 1.0f64; // 2^{n-1}
        let mut max_log = f64::NEG_INFINITY;
        let mut decreasing = 0;
        let mut prev = f64::INFINITY;
        for n in 1..=self.terms {
            let (la, sign) = self.rule.log_coefficient(n);
            let lm = la + power * ln_r;
            if lm.is_nan() || lm == f64::NEG_INFINITY && power * ln_r == f64::NEG_INFINITY {
                break;
            }
            if lm > f64::NEG_INFINITY {
                terms.push((lm, phase * sign));
            }
            if lm > max_log {
                max_log = lm;
            }
            decreasing = if lm < prev { decreasing + 1 } else { 0 };
            prev = lm;
            if decreasing >= 3 && lm < max_log - 60.0 && -power * ln_r >= 64.0 {
                break;
            }
            phase = phase * phase;
            phase /= phase.norm();
            power *= 2.0;
        }
        if terms.is_empty() || max_log == f64::NEG_INFINITY {
            return (0.0, Complex64::zero());
        }
        let sum: Complex64 = terms.iter().map(|(lm, ph)| ph * (lm - max_log).exp()).sum();
        (max_log, sum)
    }
}

/// The test-function families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum AnalyticFunction {
    /// `(1 - z)^{-γ}`
    Power {
        #[serde(with = "serde_exact")]
        gamma: Rational,
    },
    /// `(1 - z)^{-γ} (log(e/(1 - z)))^{-c}`
    LogPower {
        #[serde(with = "serde_exact")]
        gamma: Rational,
        #[serde(with = "serde_exact")]
        c: Rational,
    },
    Lacunary(Lacunary),
    /// `(1 - |z₀|²)^s / (1 - z̄₀ w)^e`
    Kernel {
        center: Complex64,
        #[serde(with = "serde_exact")]
        s: Rational,
        #[serde(with = "serde_exact")]
        exponent: Rational,
    },
    /// `z^k`
    Monomial { k: u32 },
    /// `Σ c_n z^n` (finite)
    Series { coeffs: Vec<Complex64> },
    /// `factor · inner`
    Scaled { factor: Complex64, inner: Box<AnalyticFunction> },
}

impl AnalyticFunction {
    pub fn power(gamma: Rational) -> Self {
        AnalyticFunction::Power { gamma }
    }

    pub fn log_power(gamma: Rational, c: Rational) -> Self {
        AnalyticFunction::LogPower { gamma, c }
    }

    pub fn constant(c: f64) -> Self {
        AnalyticFunction::Series { coeffs: vec![Complex64::new(c, 0.0)] }
    }

    pub fn monomial(k: u32) -> Self {
        AnalyticFunction::Monomial { k }
    }

    pub fn kernel(center: Complex64, s: Rational, exponent: Rational) -> Result<Self> {
        if !(center.norm() < 1.0) {
            return Err(Error::Domain(format!("kernel center {center} must lie in the open disk")));
        }
        if !s.is_positive() {
            return Err(Error::Domain("kernel s must be positive".into()));
        }
        Ok(AnalyticFunction::Kernel { center, s, exponent })
    }

    /// The extremal kernel `(1-|z|²)^s / (1 - z̄w)^{α+1/p+s}` for a space.
    pub fn extremal_kernel(center: Complex64, space: &SpaceParams, s: Rational) -> Result<Self> {
        let exponent = space.critical_exponent() + &s;
        Self::kernel(center, s, exponent)
    }

    pub fn scaled(self, factor: Complex64) -> Self {
        AnalyticFunction::Scaled { factor, inner: Box::new(self) }
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        serde_json::to_value(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let f: AnalyticFunction =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("function spec: {e}")))?;
        f.validate()?;
        Ok(f)
    }

    /// Checks constructor invariants that deserialization cannot express.
    pub fn validate(&self) -> Result<()> {
        match self {
            AnalyticFunction::Kernel { center, s, .. } => {
                if !(center.norm() < 1.0) || !s.is_positive() {
                    return Err(Error::Domain("kernel needs |center| < 1 and s > 0".into()));
                }
            }
            AnalyticFunction::Series { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return Err(Error::Domain("series needs at least one finite coefficient".into()));
                }
            }
            AnalyticFunction::Scaled { factor, inner } => {
                if !factor.re.is_finite() || !factor.im.is_finite() {
                    return Err(Error::Domain("scale factor must be finite".into()));
                }
                inner.validate()?;
            }
            AnalyticFunction::Lacunary(l) => {
                if l.terms == 0 || l.terms > LACUNARY_MAX_TERMS {
                    return Err(Error::Domain(format!("lacunary terms must be in 1..={LACUNARY_MAX_TERMS}")));
                }
            }
            AnalyticFunction::Monomial { k } if *k > 1_000_000 => {
                return Err(Error::Domain("monomial degree too large".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            AnalyticFunction::Power { gamma } => format!("power:{}", format_rational(gamma)),
            AnalyticFunction::LogPower { gamma, c } => {
                format!("logpower:{},{}", format_rational(gamma), format_rational(c))
            }
            AnalyticFunction::Lacunary(l) => match &l.rule {
                LacunaryRule::Geometric { log2_growth, poly_decay } if log2_growth.is_zero() && poly_decay.is_zero() => {
                    "lacunary:ones".to_string()
                }
                LacunaryRule::Geometric { log2_growth, poly_decay } => {
                    format!("lacunary:{},{}", format_rational(log2_growth), format_rational(poly_decay))
                }
                LacunaryRule::Custom(c) => format!("lacunary:custom({})", c.name),
            },
            AnalyticFunction::Kernel { center, s, exponent } => format!(
                "kernel:{},{},{},{}",
                center.re,
                center.im,
                format_rational(s),
                format_rational(exponent)
            ),
            AnalyticFunction::Monomial { k } => format!("monomial:{k}"),
            AnalyticFunction::Series { coeffs } if coeffs.len() == 1 && coeffs[0].im == 0.0 => {
                format!("const:{}", coeffs[0].re)
            }
            AnalyticFunction::Series { coeffs } => {
                let parts: Vec<String> = coeffs
                    .iter()
                    .map(|c| if c.im == 0.0 { c.re.to_string() } else { format!("{}{:+}i", c.re, c.im) })
                    .collect();
                format!("series:{}", parts.join(","))
            }
            AnalyticFunction::Scaled { factor, inner } => format!("({factor})*{}", inner.label()),
        }
    }

    /// `f(z)` for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_at(&DiskPoint::from_complex(z)?))
    }

    /// `f` at a disk point given through `(1 - |z|, arg z)`.
    pub fn eval_at(&self, pt: &DiskPoint) -> Complex64 {
        match self {
            AnalyticFunction::Power { gamma } => {
                let w = pt.one_minus();
                (-to_f64(gamma) * w.ln()).exp()
            }
            AnalyticFunction::LogPower { gamma, c } => {
                let lw = pt.one_minus().ln();
                let u = Complex64::new(1.0, 0.0) - lw;
                (-to_f64(gamma) * lw - to_f64(c) * u.ln()).exp()
            }
            AnalyticFunction::Lacunary(l) => {
                let (scale, v) = l.eval_scaled(pt);
                v * scale.exp()
            }
            AnalyticFunction::Kernel { center, s, exponent } => {
                let d = Complex64::new(1.0, 0.0) - center.conj() * pt.to_complex();
                let k = (1.0 - center.norm_sqr()).powf(to_f64(s));
                k * (-to_f64(exponent) * d.ln()).exp()
            }
            AnalyticFunction::Monomial { k } => {
                let modulus = (*k as f64 * (-pt.t).ln_1p()).exp();
                Complex64::from_polar(modulus, *k as f64 * pt.theta)
            }
            AnalyticFunction::Series { coeffs } => {
                let z = pt.to_complex();
                coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c)
            }
            AnalyticFunction::Scaled { factor, inner } => factor * inner.eval_at(pt),
        }
    }

    /// `ln |f|` at a disk point, computed without forming `f` when the family
    /// allows it (keeps large exponents from overflowing).
    pub fn log_abs_at(&self, pt: &DiskPoint) -> f64 {
        match self {
            AnalyticFunction::Power { gamma } => -to_f64(gamma) * pt.one_minus().norm().ln(),
            AnalyticFunction::LogPower { gamma, c } => {
                let lw = pt.one_minus().ln();
                let u = Complex64::new(1.0, 0.0) - lw;
                -to_f64(gamma) * lw.re - to_f64(c) * u.norm().ln()
            }
            AnalyticFunction::Lacunary(l) => {
                let (scale, v) = l.eval_scaled(pt);
                scale + v.norm().ln()
            }
            AnalyticFunction::Kernel { center, s, exponent } => {
                let d = Complex64::new(1.0, 0.0) - center.conj() * pt.to_complex();
                to_f64(s) * (1.0 - center.norm_sqr()).ln() - to_f64(exponent) * d.norm().ln()
            }
            AnalyticFunction::Monomial { k } => *k as f64 * (-pt.t).ln_1p(),
            AnalyticFunction::Series { .. } => self.eval_at(pt).norm().ln(),
            AnalyticFunction::Scaled { factor, inner } => factor.norm().ln() + inner.log_abs_at(pt),
        }
    }

    /// Angle and angular width of the near-boundary singularity seen from the
    /// circle of radius `1 - t`, for families that have one.
    pub fn singularity(&self, t: f64) -> Option<(f64, f64)> {
        match self {
            AnalyticFunction::Power { gamma } if gamma.is_zero() => None,
            AnalyticFunction::Power { .. } | AnalyticFunction::LogPower { .. } => Some((0.0, t)),
            AnalyticFunction::Kernel { center, .. } => {
                let m = center.norm();
                if m < 1e-12 {
                    None
                } else {
                    Some((center.arg(), (1.0 - m + t * m) / m))
                }
            }
            AnalyticFunction::Scaled { inner, .. } => inner.singularity(t),
            _ => None,
        }
    }

    /// Whether the family admits Taylor coefficients.
    pub fn has_coefficients(&self) -> bool {
        match self {
            AnalyticFunction::LogPower { .. } => false,
            AnalyticFunction::Scaled { inner, .. } => inner.has_coefficients(),
            _ => true,
        }
    }

    /// Taylor coefficients `c_0..c_N` at the origin.
    pub fn taylor_coefficients(&self, n_max: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::zero(); n_max + 1];
        match self {
            AnalyticFunction::Power { gamma } => {
                binomial_series(to_f64(gamma), Complex64::new(1.0, 0.0), 1.0, &mut out);
            }
            AnalyticFunction::LogPower { .. } => {
                return Err(Error::UnsupportedFamily(
                    "log-power functions have no closed-form Taylor coefficients".into(),
                ))
            }
            AnalyticFunction::Lacunary(l) => {
                let mut idx = 1usize;
                for n in 1..=l.terms {
                    if idx > n_max {
                        break;
                    }
                    out[idx] = Complex64::new(l.rule.coefficient(n), 0.0);
                    idx = match idx.checked_mul(2) {
                        Some(i) => i,
                        None => break,
                    };
                }
            }
            AnalyticFunction::Kernel { center, s, exponent } => {
                let k = (1.0 - center.norm_sqr()).powf(to_f64(s));
                binomial_series(to_f64(exponent), center.conj(), k, &mut out);
            }
            AnalyticFunction::Monomial { k } => {
                if (*k as usize) <= n_max {
                    out[*k as usize] = Complex64::new(1.0, 0.0);
                }
            }
            AnalyticFunction::Series { coeffs } => {
                for (o, c) in out.iter_mut().zip(coeffs) {
                    *o = *c;
                }
            }
            AnalyticFunction::Scaled { factor, inner } => {
                out = inner.taylor_coefficients(n_max)?.into_iter().map(|c| factor * c).collect();
            }
        }
        Ok(out)
    }

    /// Exact membership in `H(p, q, α)` from the analytic criteria.
    pub fn known_membership(&self, space: &SpaceParams) -> Membership {
        known_membership(self, space)
    }
}

/// The ten test functions used to cross-check inclusions and estimates.
pub fn standard_battery() -> Vec<AnalyticFunction> {
    use crate::rational::ratio;
    vec![
        AnalyticFunction::constant(1.0),
        AnalyticFunction::monomial(1),
        AnalyticFunction::monomial(4),
        AnalyticFunction::Series {
            coeffs: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-1.0 / 3.0, 0.0)],
        },
        AnalyticFunction::power(ratio(1, 2)),
        AnalyticFunction::power(int(1)),
        AnalyticFunction::power(ratio(3, 2)),
        AnalyticFunction::log_power(int(1), int(1)),
        AnalyticFunction::Kernel { center: Complex64::new(0.5, 0.0), s: int(1), exponent: int(2) },
        AnalyticFunction::Kernel { center: Complex64::new(0.0, 0.9), s: int(1), exponent: int(3) },
    ]
}

/// Coefficients of `scale · (1 - c z)^{-e}` via `b_n = b_{n-1} (n - 1 + e)/n`.
fn binomial_series(e: f64, c: Complex64, scale: f64, out: &mut [Complex64]) {
    let mut b = scale;
    let mut cp = Complex64::new(1.0, 0.0);
    for (n, o) in out.iter_mut().enumerate() {
        if n > 0 {
            b *= (n as f64 - 1.0 + e) / n as f64;
            cp *= c;
        }
        *o = cp * b;
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for CustomRule {
    fn serialize<S: Serializer>(&self, _s: S) -> std::result::Result<S::Ok, S::Error> {
        Err(serde::ser::Error::custom(format!("custom lacunary rule '{}' cannot be serialized", self.name)))
    }
}

impl<'de> Deserialize<'de> for CustomRule {
    fn deserialize<D: Deserializer<'de>>(_d: D) -> std::result::Result<Self, D::Error> {
        Err(serde::de::Error::custom("custom lacunary rules cannot be deserialized"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NotMember,
    Unknown,
}

/// Which analytic criterion decided a membership question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `(1-z)^{-γ}`: member iff `γ < α + 1/p` (`≤` when `q = ∞`).
    PowerExponent,
    /// log-power at `γ = α + 1/p`: member iff `c > 1/q` (`c ≥ 0` when `q = ∞`).
    LogPowerCritical,
    /// log-power away from the critical exponent, decided by the power
    /// criterion on `γ` (an extension; the log factor cannot close a power gap).
    LogPowerDerivedFromPower,
    /// lacunary series: member iff `{2^{-nα} a_n} ∈ l^q`, decided exactly.
    LacunaryWeighted,
    /// lacunary series with a general rule: numeric `l^q` tail test.
    LacunaryNumericTail,
    /// bounded on the disk (polynomials, kernels with `|z₀| < 1`).
    Bounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub verdict: Verdict,
    pub criterion: Criterion,
}

impl Membership {
    fn new(member: bool, criterion: Criterion) -> Self {
        Membership { verdict: if member { Verdict::Member } else { Verdict::NotMember }, criterion }
    }

    pub fn is_member(&self) -> bool {
        self.verdict == Verdict::Member
    }
}

pub fn known_membership(f: &AnalyticFunction, s: &SpaceParams) -> Membership {
    let crit = s.critical_exponent();
    let q_finite = !s.q.is_infinite();
    match f {
        AnalyticFunction::Power { gamma } => {
            let member = if q_finite { *gamma < crit } else { *gamma <= crit };
            Membership::new(member, Criterion::PowerExponent)
        }
        AnalyticFunction::LogPower { gamma, c } => {
            if *gamma == crit {
                let member = match s.q.as_finite() {
                    Some(q) => *c > q.recip(),
                    None => !c.is_negative(),
                };
                Membership::new(member, Criterion::LogPowerCritical)
            } else {
                Membership::new(*gamma < crit, Criterion::LogPowerDerivedFromPower)
            }
        }
        AnalyticFunction::Lacunary(l) => match &l.rule {
            LacunaryRule::Geometric { log2_growth, poly_decay } => {
                let member = if *log2_growth < s.alpha {
                    true
                } else if *log2_growth > s.alpha {
                    false
                } else {
                    // weighted coefficients are n^{-κ}
                    match s.q.as_finite() {
                        Some(q) => poly_decay * q > int(1),
                        None => !poly_decay.is_negative(),
                    }
                };
                Membership::new(member, Criterion::LacunaryWeighted)
            }
            LacunaryRule::Custom(rule) => numeric_lacunary_membership(rule, l.terms, s),
        },
        AnalyticFunction::Kernel { .. } | AnalyticFunction::Monomial { .. } | AnalyticFunction::Series { .. } => {
            Membership::new(true, Criterion::Bounded)
        }
        AnalyticFunction::Scaled { factor, inner } => {
            if factor.norm() == 0.0 {
                Membership::new(true, Criterion::Bounded)
            } else {
                known_membership(inner, s)
            }
        }
    }
}

/// Member only when the weighted coefficients decay geometrically over the
/// last terms of the budget and the `l^q` tail bound is negligible; otherwise
/// `Unknown`. Never answers `NotMember`.
fn numeric_lacunary_membership(rule: &CustomRule, terms: u32, s: &SpaceParams) -> Membership {
    let alpha = s.alpha_f64();
    let n_max = terms.min(200);
    let weighted: Vec<f64> =
        (1..=n_max).map(|n| (rule.coefficient)(n).abs() * (-(n as f64) * alpha * LN_2).exp()).collect();
    let unknown = Membership { verdict: Verdict::Unknown, criterion: Criterion::LacunaryNumericTail };
    if weighted.len() < 20 || weighted.iter().any(|w| !w.is_finite()) {
        return unknown;
    }
    let tail = &weighted[weighted.len() - 10..];
    let mut ratio: f64 = 0.0;
    for w in tail.windows(2) {
        if w[0] == 0.0 {
            if w[1] == 0.0 {
                continue;
            }
            return unknown;
        }
        ratio = ratio.max(w[1] / w[0]);
    }
    if ratio >= 1.0 {
        return unknown;
    }
    let last = *weighted.last().unwrap_or(&0.0);
    let (sum, tail_bound) = match s.q.as_finite() {
        Some(q) => {
            let qf = to_f64(q);
            let rq = ratio.powf(qf);
            (weighted.iter().map(|w| w.powf(qf)).sum::<f64>(), last.powf(qf) * rq / (1.0 - rq))
        }
        None => (weighted.iter().cloned().fold(0.0, f64::max), last * ratio / (1.0 - ratio)),
    };
    if tail_bound <= 1e-12 * sum.max(f64::MIN_POSITIVE) {
        Membership { verdict: Verdict::Member, criterion: Criterion::LacunaryNumericTail }
    } else {
        unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sp(s: &str) -> SpaceParams {
        SpaceParams::parse(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = AnalyticFunction::power(int(1));
        assert_relative_eq!(f.eval(Complex64::new(0.0, 0.0)).unwrap().re, 1.0);
        assert_relative_eq!(f.eval(Complex64::new(0.5, 0.0)).unwrap().re, 2.0, max_relative = 1e-15);

        // direct partial summation of Σ 2^{-2^{n-1}}
        let mut direct = 0.0;
        for n in 1..12 {
            direct += 0.5f64.powi(1 << (n - 1));
        }
        let lac = AnalyticFunction::Lacunary(Lacunary::ones());
        let v = lac.eval(Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, direct, max_relative = 1e-15);
        assert_relative_eq!(v.re, 0.816_421_509_0, epsilon = 1e-10);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_boundary() {
        let f = AnalyticFunction::power(int(1));
        assert!(matches!(f.eval(Complex64::new(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(f.eval(Complex64::new(0.6, 0.9)).is_err());
    }

    #[test]
    fn one_minus_is_accurate_near_one() {
        let pt = DiskPoint::polar(1e-200, 3e-201);
        let w = pt.one_minus();
        assert_relative_eq!(w.re, 1e-200, max_relative = 1e-12);
        assert_relative_eq!(w.im, -3e-201, max_relative = 1e-12);
    }

    #[test]
    fn log_power_principal_branch() {
        // on the real axis log(e/(1-x)) = 1 - ln(1-x) > 0
        let f = AnalyticFunction::log_power(ratio(3, 2), int(1));
        let x = 0.9f64;
        let expected = (1.0 - x).powf(-1.5) / (1.0 - (1.0 - x).ln());
        let v = f.eval(Complex64::new(x, 0.0)).unwrap();
        assert_relative_eq!(v.re, expected, max_relative = 1e-13);
        assert!(v.im.abs() < 1e-12);
        let pt = DiskPoint::polar(0.1, 0.7);
        assert_relative_eq!(f.log_abs_at(&pt), f.eval_at(&pt).norm().ln(), max_relative = 1e-13);
    }

    #[test]
    fn kernel_value_at_center() {
        let s = sp("2,2,1");
        let f = AnalyticFunction::extremal_kernel(Complex64::new(0.9, 0.0), &s, int(1)).unwrap();
        let v = f.eval(Complex64::new(0.9, 0.0)).unwrap();
        // (1-|z|²)^{-(α+1/p)}
        assert_relative_eq!(v.re, (1.0 - 0.81f64).powf(-1.5), max_relative = 1e-13);
    }

    #[test]
    fn taylor_examples() {
        let c = AnalyticFunction::power(int(1)).taylor_coefficients(3).unwrap();
        assert_eq!(c.iter().map(|c| c.re).collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, 1.0]);
        let c = AnalyticFunction::monomial(2).taylor_coefficients(3).unwrap();
        assert_eq!(c.iter().map(|c| c.re).collect::<Vec<_>>(), vec![0.0, 0.0, 1.0, 0.0]);
        let c = AnalyticFunction::power(int(2)).taylor_coefficients(3).unwrap();
        assert_eq!(c.iter().map(|c| c.re).collect::<Vec<_>>(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            AnalyticFunction::log_power(int(1), int(1)).taylor_coefficients(3),
            Err(Error::UnsupportedFamily(_))
        ));
        let lac = AnalyticFunction::Lacunary(Lacunary::geometric(int(1), int(0))).taylor_coefficients(8).unwrap();
        let nz: Vec<(usize, f64)> =
            lac.iter().enumerate().filter(|(_, c)| c.re != 0.0).map(|(i, c)| (i, c.re)).collect();
        assert_eq!(nz, vec![(1, 2.0), (2, 4.0), (4, 8.0), (8, 16.0)]);
    }

    #[test]
    fn membership_examples() {
        let m = known_membership(&AnalyticFunction::power(int(1)), &sp("1,2,1"));
        assert_eq!((m.verdict, m.criterion), (Verdict::Member, Criterion::PowerExponent));

        let lac = AnalyticFunction::Lacunary(Lacunary::geometric(int(1), int(0)));
        assert_eq!(known_membership(&lac, &sp("2,2,1")).verdict, Verdict::NotMember);

        let lp = AnalyticFunction::log_power(ratio(3, 2), int(1));
        let m = known_membership(&lp, &sp("1,2,1/2"));
        assert_eq!((m.verdict, m.criterion), (Verdict::Member, Criterion::LogPowerCritical));
    }

    #[test]
    fn membership_boundaries() {
        // q = ∞ admits the critical power, q < ∞ does not
        let f = AnalyticFunction::power(int(2));
        assert!(!known_membership(&f, &sp("1,2,1")).is_member());
        assert!(known_membership(&f, &sp("1,inf,1")).is_member());
        // log-power at the critical exponent
        let crit = AnalyticFunction::log_power(int(2), ratio(1, 2));
        assert!(!known_membership(&crit, &sp("1,2,1")).is_member());
        assert!(!known_membership(&crit, &sp("1,1,1")).is_member());
        assert!(known_membership(&crit, &sp("1,3,1")).is_member());
        assert!(known_membership(&AnalyticFunction::log_power(int(2), int(0)), &sp("1,inf,1")).is_member());
        assert!(!known_membership(&AnalyticFunction::log_power(int(2), int(-1)), &sp("1,inf,1")).is_member());
        // derived branch
        let m = known_membership(&AnalyticFunction::log_power(ratio(19, 10), int(-3)), &sp("1,2,1"));
        assert_eq!((m.verdict, m.criterion), (Verdict::Member, Criterion::LogPowerDerivedFromPower));
        // lacunary at α = β with polynomial decay
        let lac = AnalyticFunction::Lacunary(Lacunary::geometric(int(1), ratio(1, 2)));
        assert!(known_membership(&lac, &sp("2,3,1")).is_member());
        assert!(!known_membership(&lac, &sp("2,2,1")).is_member());
        assert!(known_membership(&lac, &sp("2,inf,1")).is_member());
        // bounded families
        assert!(known_membership(&AnalyticFunction::monomial(7), &sp("1/2,1/3,1/9")).is_member());
    }

    #[test]
    fn custom_lacunary_numeric_membership() {
        let geometric = AnalyticFunction::Lacunary(Lacunary::custom("half", |n| 2f64.powf(0.5 * n as f64)));
        let m = known_membership(&geometric, &sp("2,2,1"));
        assert_eq!((m.verdict, m.criterion), (Verdict::Member, Criterion::LacunaryNumericTail));
        // weighted terms 1/n: l² but too slow to certify numerically
        let slow = AnalyticFunction::Lacunary(Lacunary::custom("slow", |n| 2f64.powi(n as i32) / n as f64));
        assert_eq!(known_membership(&slow, &sp("2,2,1")).verdict, Verdict::Unknown);
        let growing = AnalyticFunction::Lacunary(Lacunary::custom("grow", |n| 4f64.powi(n as i32)));
        assert_eq!(known_membership(&growing, &sp("2,2,1")).verdict, Verdict::Unknown);
    }

    #[test]
    fn truncation_budget_rule() {
        let l = Lacunary::ones();
        let (n, tail) = l.truncation_for(1.0, 1e-9);
        // 2^{-n} <= 1e-9·2^{-n/2}  ⇔  n >= 2·log2(1e9) ≈ 59.8
        assert_eq!(n, 60);
        assert!(tail <= 2f64.powi(-60) * 1.0000001);
    }

    #[test]
    fn json_round_trip() {
        let fs = vec![
            AnalyticFunction::power(ratio(3, 2)),
            AnalyticFunction::log_power(int(2), ratio(1, 3)),
            AnalyticFunction::Lacunary(Lacunary::geometric(int(1), ratio(1, 2))),
            AnalyticFunction::kernel(Complex64::new(0.5, 0.25), int(1), ratio(5, 2)).unwrap(),
            AnalyticFunction::monomial(3),
            AnalyticFunction::constant(2.0).scaled(Complex64::new(0.0, 1.0)),
        ];
        for f in fs {
            let v = f.to_json().unwrap();
            assert_eq!(AnalyticFunction::from_json(&v).unwrap(), f);
        }
        let v: serde_json::Value = serde_json::json!({"family": "power", "params": {"gamma": "3/2"}});
        assert_eq!(AnalyticFunction::from_json(&v).unwrap(), AnalyticFunction::power(ratio(3, 2)));
        let bad = serde_json::json!({"family": "power", "params": {"gamma": 1.5}});
        assert!(AnalyticFunction::from_json(&bad).is_err());
        let custom = AnalyticFunction::Lacunary(Lacunary::custom("c", |_| 1.0));
        assert!(custom.to_json().is_err());
    }

    proptest! {
        #[test]
        fn power_membership_flips_exactly_at_critical(num in -40i64..80, den in 1i64..12) {
            let gamma = ratio(num, den);
            for (s, crit) in [(sp("1,2,1"), int(2)), (sp("2,inf,1/2"), int(1)), (sp("inf,1,3/2"), ratio(3, 2))] {
                let m = known_membership(&AnalyticFunction::power(gamma.clone()), &s).is_member();
                if s.q.is_infinite() {
                    prop_assert_eq!(m, gamma <= crit);
                } else {
                    prop_assert_eq!(m, gamma < crit);
                }
            }
        }

        #[test]
        fn membership_monotone_in_alpha(g in -10i64..40, b in -10i64..40, k in 0i64..6,
                                        a1 in 1i64..20, da in 1i64..20, qi in 0usize..4) {
            let qs = ["1/2", "1", "3", "inf"];
            let s1 = sp(&format!("2,{},{}/4", qs[qi], a1));
            let s2 = sp(&format!("2,{},{}/4", qs[qi], a1 + da));
            let fams = [
                AnalyticFunction::power(ratio(g, 4)),
                AnalyticFunction::Lacunary(Lacunary::geometric(ratio(b, 4), ratio(k, 2))),
            ];
            for f in fams {
                if known_membership(&f, &s1).is_member() {
                    prop_assert!(known_membership(&f, &s2).is_member());
                }
            }
        }

        #[test]
        fn eval_matches_taylor_partial_sums(rr in 0.0f64..0.9, th in -3.2f64..3.2, fam in 0usize..5) {
            let f = match fam {
                0 => AnalyticFunction::power(ratio(3, 2)),
                1 => AnalyticFunction::Lacunary(Lacunary::ones()),
                2 => AnalyticFunction::kernel(Complex64::new(0.6, 0.0), int(1), ratio(5, 2)).unwrap(),
                3 => AnalyticFunction::Series { coeffs: vec![Complex64::new(1.0, 0.0), Complex64::new(-2.0, 1.0), Complex64::new(0.5, 0.0)] },
                _ => AnalyticFunction::monomial(4),
            };
            let z = Complex64::from_polar(rr, th);
            let coeffs = f.taylor_coefficients(600).unwrap();
            let partial: Complex64 = coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c);
            let direct = f.eval(z).unwrap();
            prop_assert!((partial - direct).norm() <= 1e-9 * (1.0 + direct.norm()));
        }
    }
}
