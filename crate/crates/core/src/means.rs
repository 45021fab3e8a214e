//! Integral means `M_p(r, f)` for `0 < p ≤ ∞`.
//!
//! Radii are handled through `t = 1 - r` so that circles extremely close to
//! the boundary keep full precision.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, DiskPoint, Lacunary, LacunaryRule};
use crate::quadrature::adaptive_gk;
use crate::rational::{to_f64, ExtRational};

/// Maximum number of angles (or integrand evaluations) spent on one mean.
pub const NODE_BUDGET: usize = 1 << 20;

const MAX_GRID: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub value: f64,
    /// Absolute error bound.
    pub error: f64,
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn check_p(p: &ExtRational) -> Result<()> {
    if !p.is_positive() {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// `M_p(r, f)` with relative error at most `tol`.
pub fn integral_mean(f: &AnalyticFunction, p: &ExtRational, r: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
    }
    integral_mean_at(f, p, 1.0 - r, tol).map(|m| m.value)
}

/// `M_p(1 - t, f)` with its error bound, for `0 < t ≤ 1`.
pub fn integral_mean_at(f: &AnalyticFunction, p: &ExtRational, t: f64, tol: f64) -> Result<MeanEstimate> {
    check_tol(tol)?;
    check_p(p)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("1 - r must lie in (0, 1], got {t}")));
    }
    match p {
        ExtRational::Infinity => max_modulus(f, t, tol),
        ExtRational::Finite(pr) => {
            let pf = to_f64(pr);
            if t == 1.0 {
                let v = f.eval_at(&DiskPoint::polar(1.0, 0.0)).norm();
                return Ok(MeanEstimate { value: v, error: 0.0 });
            }
            let m = match f.singularity(t) {
                Some((center, width)) => graded_mean(f, pf, t, center, width, tol)?,
                None => match f {
                    AnalyticFunction::Lacunary(l) => lacunary_trapezoid(l, pf, t, tol)?,
                    _ => trapezoid_mean(f, pf, t, tol)?,
                },
            };
            finite_or_overflow(m, t)
        }
    }
}

/// Running sum of `exp(x_i - scale)` that rescales when a larger exponent
/// arrives, so `|f|^p` never overflows.
struct LogSum {
    scale: f64,
    sum: f64,
}

impl LogSum {
    fn new(scale: f64) -> Self {
        LogSum { scale, sum: 0.0 }
    }

    fn add(&mut self, x: f64, weight: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.scale + 600.0 || self.scale == f64::NEG_INFINITY {
            self.sum *= (self.scale - x).exp();
            self.scale = x;
        }
        self.sum += weight * (x - self.scale).exp();
    }
}

fn finish(scale: f64, mean: f64, rel_err: f64, p: f64) -> MeanEstimate {
    if mean <= 0.0 || scale == f64::NEG_INFINITY {
        return MeanEstimate { value: 0.0, error: 0.0 };
    }
    let value = ((scale + mean.ln()) / p).exp();
    MeanEstimate { value, error: value * rel_err / p }
}

fn finite_or_overflow(m: MeanEstimate, t: f64) -> Result<MeanEstimate> {
    if m.value.is_finite() {
        Ok(m)
    } else {
        Err(Error::ToleranceNotReached(format!("integral mean exceeds the floating-point range at 1-r={t:e}")))
    }
}

fn trapezoid_mean(f: &AnalyticFunction, p: f64, t: f64, tol: f64) -> Result<MeanEstimate> {
    let target = 0.5 * p * tol;
    let log_g = |theta: f64| p * f.log_abs_at(&DiskPoint::polar(t, theta));
    let mut n = 64usize;
    let first: Vec<f64> = (0..n).map(|j| log_g(2.0 * PI * j as f64 / n as f64)).collect();
    let scale = first.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = LogSum::new(scale);
    for x in first {
        acc.add(x, 1.0);
    }
    let mut prev = acc.sum / n as f64;
    let mut prev_scale = acc.scale;
    loop {
        if 2 * n > NODE_BUDGET {
            return Err(Error::ToleranceNotReached(format!(
                "periodic trapezoid rule did not converge within {NODE_BUDGET} angles at 1-r={t:e}"
            )));
        }
        let step = PI / n as f64;
        for j in 0..n {
            acc.add(log_g(step * (2 * j + 1) as f64), 1.0);
        }
        n *= 2;
        let cur = acc.sum / n as f64;
        let prev_rescaled = prev * (prev_scale - acc.scale).exp();
        let diff = (cur - prev_rescaled).abs();
        if cur == 0.0 {
            return Ok(MeanEstimate { value: 0.0, error: 0.0 });
        }
        if n >= 256 && diff <= target * cur {
            return Ok(finish(acc.scale, cur, diff / cur, p));
        }
        prev = cur;
        prev_scale = acc.scale;
    }
}

/// Periodic trapezoid rule for lacunary series on `N = 2^L` angles. The
/// phase of `z^{2^{n-1}}` at node `j` is the root of unity with index
/// `j·2^{n-1} mod N`, so it is read from a table instead of being computed.
fn lacunary_trapezoid(l: &Lacunary, p: f64, t: f64, tol: f64) -> Result<MeanEstimate> {
    let Some((scale, terms)) = l.ring_terms(t) else {
        return Ok(MeanEstimate { value: 0.0, error: 0.0 });
    };
    let bound: f64 = terms.iter().map(|(_, c)| c.abs()).sum();
    let target = 0.5 * p * tol;
    let mut n = ((4.0 / t).ceil() as usize).next_power_of_two().max(64);
    if n > NODE_BUDGET {
        return Err(Error::ToleranceNotReached(format!(
            "lacunary series needs more than {NODE_BUDGET} angles at 1-r={t:e}"
        )));
    }
    // |S_j / bound|^p at the nodes j ≡ offset (mod stride) of the N-point grid
    let level_sum = |n: usize, offset: usize, stride: usize| -> f64 {
        let bits = n.trailing_zeros();
        let table: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)).collect();
        let mask = n - 1;
        (offset..n)
            .step_by(stride)
            .map(|j| {
                let s: Complex64 = terms
                    .iter()
                    .map(|&(m, c)| {
                        let shift = m - 1;
                        let idx = if shift >= bits { 0 } else { (j << shift) & mask };
                        table[idx] * c
                    })
                    .sum();
                (s.norm() / bound).powf(p)
            })
            .sum()
    };
    let mut total = level_sum(n, 0, 1);
    let mut prev = total / n as f64;
    loop {
        if 2 * n > NODE_BUDGET {
            return Err(Error::ToleranceNotReached(format!(
                "periodic trapezoid rule did not converge within {NODE_BUDGET} angles at 1-r={t:e}"
            )));
        }
        total += level_sum(2 * n, 1, 2);
        n *= 2;
        let cur = total / n as f64;
        if cur == 0.0 {
            return Ok(MeanEstimate { value: 0.0, error: 0.0 });
        }
        let diff = (cur - prev).abs();
        if n >= 256 && diff <= target * cur {
            return Ok(finish(p * (scale + bound.ln()), cur, diff / cur, p));
        }
        prev = cur;
    }
}

/// Breakpoints `c ± w·2^j` up to `c ± π`.
fn graded_breakpoints(center: f64, width: f64) -> Vec<f64> {
    let mut offsets = Vec::new();
    if width < PI / 8.0 {
        let mut d = width;
        while d < PI {
            offsets.push(d);
            d *= 2.0;
        }
    } else {
        offsets.extend((1..8).map(|k| PI * k as f64 / 8.0));
    }
    let mut bp: Vec<f64> = offsets.iter().rev().map(|d| center - d).collect();
    bp.insert(0, center - PI);
    bp.push(center);
    bp.extend(offsets.iter().map(|d| center + d));
    bp.push(center + PI);
    bp
}

fn graded_mean(f: &AnalyticFunction, p: f64, t: f64, center: f64, width: f64, tol: f64) -> Result<MeanEstimate> {
    let log_g = |theta: f64| p * f.log_abs_at(&DiskPoint::polar(t, theta));
    let mut scale = log_g(center);
    for j in 0..32 {
        scale = scale.max(log_g(center + 2.0 * PI * (j as f64 + 0.5) / 32.0));
    }
    if scale == f64::NEG_INFINITY {
        return Ok(MeanEstimate { value: 0.0, error: 0.0 });
    }
    let bp = graded_breakpoints(center, width);
    let q = adaptive_gk(|theta| (log_g(theta) - scale).exp(), &bp, 0.5 * p * tol, 0.0, NODE_BUDGET)
        .map_err(|e| match e {
            Error::ToleranceNotReached(m) => Error::ToleranceNotReached(format!("angular quadrature at 1-r={t:e}: {m}")),
            other => other,
        })?;
    let mean = q.value / (2.0 * PI);
    if mean <= 0.0 {
        return Ok(MeanEstimate { value: 0.0, error: 0.0 });
    }
    Ok(finish(scale, mean, q.error / q.value.abs(), p))
}

/// Golden-section maximization of `phi` on `[a, b]` down to width `min_width`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(phi: F, mut a: f64, mut b: f64, min_width: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    let mut iter = 0;
    while b - a > min_width && iter < 2000 {
        if !(x1 < x2) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        }
        iter += 1;
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `M_∞(1 - t, f)`: grid of 1024 angles, then golden-section refinement
/// around every local grid maximum within 1% of the largest one.
fn max_modulus(f: &AnalyticFunction, t: f64, tol: f64) -> Result<MeanEstimate> {
    let phi = |theta: f64| f.log_abs_at(&DiskPoint::polar(t, theta));
    if t == 1.0 {
        let v = phi(0.0).exp();
        return Ok(MeanEstimate { value: v, error: 0.0 });
    }
    let h = 2.0 * PI / MAX_GRID as f64;
    let grid: Vec<f64> = (0..MAX_GRID).map(|j| phi(h * j as f64)).collect();
    let mut best = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let singular = f.singularity(t);
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    if let Some((c, w)) = singular {
        best = best.max(phi(c));
        candidates.push((c, w));
    }
    let threshold = best + (0.99f64).ln();
    for j in 0..MAX_GRID {
        let prev = grid[(j + MAX_GRID - 1) % MAX_GRID];
        let next = grid[(j + 1) % MAX_GRID];
        if grid[j] >= threshold && grid[j] >= prev && grid[j] >= next {
            candidates.push((h * j as f64, h));
        }
    }
    for (c, w) in candidates {
        let min_width = (w.min(h) * 1e-7).max(f64::MIN_POSITIVE);
        let (_, v) = golden_max(phi, c - h, c + h, min_width);
        best = best.max(v).max(phi(c));
    }
    if best == f64::NEG_INFINITY {
        return Ok(MeanEstimate { value: 0.0, error: 0.0 });
    }
    if !best.is_finite() {
        return Err(Error::ToleranceNotReached(format!("maximum modulus overflowed at 1-r={t:e}")));
    }
    let value = best.exp();
    Ok(MeanEstimate { value, error: tol * value })
}

/// Compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.c
    }
}

const PARSEVAL_REL: f64 = 1e-12;
const PARSEVAL_MAX_TERMS: usize = 50_000_000;

/// `M_2(r, f)` from `Σ |c_n|² r^{2n}`.
pub fn parseval_mean(f: &AnalyticFunction, r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius must lie in [0, 1), got {r}")));
    }
    parseval_mean_at(f, 1.0 - r)
}

/// `M_2(1 - t, f)` from the Taylor coefficients.
pub fn parseval_mean_at(f: &AnalyticFunction, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("1 - r must lie in (0, 1], got {t}")));
    }
    let (scale, sum) = parseval_sq(f, t)?;
    if sum <= 0.0 {
        return Ok(0.0);
    }
    Ok((0.5 * (scale + sum.ln())).exp())
}

/// `Σ |c_n|² r^{2n}` as `(scale, s)` meaning `exp(scale)·s`.
fn parseval_sq(f: &AnalyticFunction, t: f64) -> Result<(f64, f64)> {
    let r = 1.0 - t;
    let ln_r = (-t).ln_1p();
    match f {
        AnalyticFunction::Power { gamma } => Ok((0.0, binomial_sq_sum(to_f64(gamma), r)?)),
        AnalyticFunction::Kernel { center, s, exponent } => {
            let k = (1.0 - center.norm_sqr()).powf(2.0 * to_f64(s));
            Ok((0.0, k * binomial_sq_sum(to_f64(exponent), r * center.norm())?))
        }
        AnalyticFunction::Monomial { k } => Ok((2.0 * *k as f64 * ln_r, 1.0)),
        AnalyticFunction::Series { coeffs } => {
            let mut acc = Neumaier::default();
            let mut rp = 1.0;
            for c in coeffs {
                acc.add(c.norm_sqr() * rp);
                rp *= r * r;
            }
            Ok((0.0, acc.total()))
        }
        AnalyticFunction::Lacunary(l) => {
            let mut logs = Vec::new();
            let mut power = 2.0f64; // 2^n
            let mut max_log = f64::NEG_INFINITY;
            let mut prev = f64::INFINITY;
            let mut decreasing = 0;
            for n in 1..=l.terms {
                let a = l.rule.coefficient(n);
                let lt = 2.0 * a.abs().ln() + power * ln_r;
                if lt.is_nan() {
                    break;
                }
                logs.push(lt);
                max_log = max_log.max(lt);
                decreasing = if lt < prev { decreasing + 1 } else { 0 };
                prev = lt;
                if decreasing >= 3 && lt < max_log - 40.0 && -power * ln_r >= 64.0 {
                    break;
                }
                power *= 2.0;
            }
            if max_log == f64::NEG_INFINITY {
                return Ok((0.0, 0.0));
            }
            let mut acc = Neumaier::default();
            for lt in logs {
                acc.add((lt - max_log).exp());
            }
            Ok((max_log, acc.total()))
        }
        AnalyticFunction::Scaled { factor, inner } => {
            let (sc, s) = parseval_sq(inner, t)?;
            Ok((sc + 2.0 * factor.norm().ln(), s))
        }
        AnalyticFunction::LogPower { .. } => Err(Error::UnsupportedFamily(
            "Parseval mean needs Taylor coefficients; log-power functions have none in closed form".into(),
        )),
    }
}

/// `Σ b_n² x^{2n}` for `(1 - x z)^{-e} = Σ b_n x^n z^n`, `0 ≤ x < 1`.
fn binomial_sq_sum(e: f64, x: f64) -> Result<f64> {
    let x2 = x * x;
    let mut acc = Neumaier::default();
    let mut term = 1.0f64; // b_n² x^{2n}
    acc.add(term);
    let mut n = 0usize;
    loop {
        let factor = (n as f64 + e) / (n as f64 + 1.0);
        let next = term * factor * factor * x2;
        n += 1;
        if next == 0.0 {
            return Ok(acc.total());
        }
        acc.add(next);
        term = next;
        // ratio of the following terms is bounded by this one once n + 1 ≥ e
        // (factor decreasing) or by x² when e < 1 (factor increasing to 1)
        let f_next = (n as f64 + e) / (n as f64 + 1.0);
        let rho = if e >= 1.0 { f_next * f_next * x2 } else { x2 };
        if rho < 1.0 && term * rho / (1.0 - rho) <= PARSEVAL_REL * acc.total() && n as f64 + 1.0 >= e {
            return Ok(acc.total());
        }
        if n > PARSEVAL_MAX_TERMS {
            return Err(Error::ToleranceNotReached(format!(
                "Parseval series needs more than {PARSEVAL_MAX_TERMS} terms at radius {x}"
            )));
        }
    }
}

/// Best available `M_p(1 - t, f)`: exact coefficient formulas where a family
/// admits them (lacunary `p = 2` via Parseval, nonnegative lacunary
/// `p = ∞` via `f(r)`), quadrature otherwise.
pub fn best_mean_at(f: &AnalyticFunction, p: &ExtRational, t: f64, tol: f64) -> Result<MeanEstimate> {
    match f {
        AnalyticFunction::Lacunary(l) => {
            if let ExtRational::Finite(pr) = p {
                if to_f64(pr) == 2.0 {
                    let v = parseval_mean_at(f, t)?;
                    return Ok(MeanEstimate { value: v, error: v * PARSEVAL_REL });
                }
            }
            if p.is_infinite() {
                if let LacunaryRule::Geometric { .. } = l.rule {
                    // positive coefficients: the maximum sits on the positive axis
                    let v = f.eval_at(&DiskPoint::polar(t, 0.0)).norm();
                    return Ok(MeanEstimate { value: v, error: v * 1e-14 });
                }
            }
            integral_mean_at(f, p, t, tol)
        }
        AnalyticFunction::Scaled { factor, inner } => {
            let m = best_mean_at(inner, p, t, tol)?;
            let c = factor.norm();
            Ok(MeanEstimate { value: c * m.value, error: c * m.error })
        }
        _ => integral_mean_at(f, p, t, tol),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSample {
    pub r: f64,
    pub value: Option<f64>,
    pub error: Option<f64>,
    pub failure: Option<String>,
}

/// `r ↦ M_p(r, f)` sampled on increasing radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanProfile {
    pub p: ExtRational,
    pub samples: Vec<MeanSample>,
}

impl MeanProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.r).collect()
    }

    /// Values, `None` for failed samples.
    pub fn values(&self) -> Vec<Option<f64>> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn error_bounds(&self) -> Vec<Option<f64>> {
        self.samples.iter().map(|s| s.error).collect()
    }

    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.failure.is_some()).count()
    }
}

/// Integral means on `radii` (strictly increasing in `[0, 1)`); failed
/// samples are recorded, not propagated.
pub fn mean_profile(f: &AnalyticFunction, p: &ExtRational, radii: &[f64], tol: f64) -> Result<MeanProfile> {
    check_tol(tol)?;
    check_p(p)?;
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("radii must be strictly increasing".into()));
    }
    if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::Domain("radii must lie in [0, 1)".into()));
    }
    let samples = radii
        .par_iter()
        .map(|&r| match integral_mean_at(f, p, 1.0 - r, tol) {
            Ok(m) => MeanSample { r, value: Some(m.value), error: Some(m.error), failure: None },
            Err(e) => MeanSample { r, value: None, error: None, failure: Some(e.to_string()) },
        })
        .collect();
    Ok(MeanProfile { p: p.clone(), samples })
}

/// `M_p` on the circle through `z`, convenience for callers holding a point.
pub fn integral_mean_through(f: &AnalyticFunction, p: &ExtRational, z: Complex64, tol: f64) -> Result<f64> {
    let pt = DiskPoint::from_complex(z)?;
    integral_mean_at(f, p, pt.t, tol).map(|m| m.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(s: &str) -> ExtRational {
        s.parse().unwrap()
    }

    #[test]
    fn lacunary_table_rule_matches_generic_rule() {
        let alternating = Lacunary::custom("alternating", |n| if n % 2 == 0 { -1.0 } else { 2.0 });
        for l in [Lacunary::ones(), Lacunary::geometric(ratio(1, 2), int(1)), alternating] {
            let f = AnalyticFunction::Lacunary(l.clone());
            for (pf, t) in [(1.0, 0.3), (3.0, 0.05), (0.5, 2f64.powi(-7))] {
                let fast = lacunary_trapezoid(&l, pf, t, 1e-9).unwrap();
                let slow = trapezoid_mean(&f, pf, t, 1e-9).unwrap();
                assert_relative_eq!(fast.value, slow.value, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn spec_examples() {
        let one = AnalyticFunction::constant(1.0);
        for ps in ["1/2", "1", "3", "inf"] {
            assert_relative_eq!(integral_mean(&one, &p(ps), 0.9, 1e-9).unwrap(), 1.0, max_relative = 1e-12);
        }
        let cauchy = AnalyticFunction::power(int(1));
        assert_relative_eq!(integral_mean(&cauchy, &p("2"), 0.6, 1e-9).unwrap(), 1.25, max_relative = 1e-9);
        assert_relative_eq!(integral_mean(&cauchy, &p("inf"), 0.75, 1e-9).unwrap(), 4.0, max_relative = 1e-9);
    }

    #[test]
    fn profile_examples() {
        let prof = mean_profile(&AnalyticFunction::monomial(1), &p("4"), &[0.1, 0.5, 0.9], 1e-9).unwrap();
        for (v, e) in prof.values().iter().zip([0.1, 0.5, 0.9]) {
            assert_relative_eq!(v.unwrap(), e, max_relative = 1e-12);
        }
        let prof = mean_profile(&AnalyticFunction::power(int(1)), &p("2"), &[0.6, 0.8], 1e-9).unwrap();
        assert_relative_eq!(prof.values()[0].unwrap(), 1.25, max_relative = 1e-9);
        assert_relative_eq!(prof.values()[1].unwrap(), 5.0 / 3.0, max_relative = 1e-9);
        assert!(mean_profile(&AnalyticFunction::monomial(1), &p("1"), &[0.5, 0.5], 1e-9).is_err());
    }

    #[test]
    fn parseval_examples() {
        assert_relative_eq!(parseval_mean(&AnalyticFunction::monomial(3), 0.5).unwrap(), 0.125, max_relative = 1e-14);
        assert_relative_eq!(parseval_mean(&AnalyticFunction::power(int(1)), 0.6).unwrap(), 1.25, max_relative = 1e-11);
        let s = AnalyticFunction::Series { coeffs: vec![Complex64::new(1.0, 0.0); 2] };
        assert_relative_eq!(parseval_mean(&s, 0.5).unwrap(), 1.25f64.sqrt(), max_relative = 1e-14);
        assert!(matches!(
            parseval_mean(&AnalyticFunction::log_power(int(1), int(1)), 0.5),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn cauchy_l1_mean_grows_logarithmically() {
        // M_1(r, 1/(1-z)) = Σ ((1/2)_n / n!)² r^{2n} ... compare with the classical
        // closed form 2K(r)/π / ... use the elementary bound instead:
        // M_1 = (1/2π)∫ dθ/|1-re^{iθ}| = (2/π) K(r) with K the complete elliptic integral
        let r: f64 = 0.9;
        // arithmetic-geometric mean: K(k) = π / (2 agm(1, sqrt(1-k²)))
        let (mut a, mut b) = (1.0f64, (1.0 - r * r).sqrt());
        for _ in 0..40 {
            let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
            a = na;
            b = nb;
        }
        let k = PI / (2.0 * a);
        let expected = 2.0 * k / PI;
        let v = integral_mean(&AnalyticFunction::power(int(1)), &p("1"), r, 1e-10).unwrap();
        assert_relative_eq!(v, expected, max_relative = 1e-9);
    }

    #[test]
    fn near_boundary_power_means() {
        // M_∞ of (1-z)^{-γ} is (1-r)^{-γ} exactly
        let f = AnalyticFunction::power(ratio(3, 2));
        for k in [8, 16, 24, 40] {
            let t = 2f64.powi(-k);
            let m = integral_mean_at(&f, &p("inf"), t, 1e-9).unwrap();
            assert_relative_eq!(m.value, t.powf(-1.5), max_relative = 1e-9);
        }
        // M_2 of (1-z)^{-1} is (1-r²)^{-1/2}; quadrature at r = 1 - 2^{-24}
        let g = AnalyticFunction::power(int(1));
        let t = 2f64.powi(-24);
        let m = integral_mean_at(&g, &p("2"), t, 1e-9).unwrap();
        assert_relative_eq!(m.value, (t * (2.0 - t)).powf(-0.5), max_relative = 1e-9);
    }

    #[test]
    fn large_exponent_does_not_overflow() {
        let f = AnalyticFunction::power(int(80));
        let t = 2f64.powi(-8);
        let m = integral_mean_at(&f, &p("4"), t, 1e-9).unwrap();
        assert!(m.value.is_finite() && m.value > 0.0);
        let v = integral_mean_at(&f, &p("60"), t, 1e-9).unwrap();
        assert!(v.value >= m.value);
        assert!(matches!(integral_mean_at(&f, &p("4"), 2f64.powi(-20), 1e-9), Err(Error::ToleranceNotReached(_))));
    }

    #[test]
    fn lacunary_means() {
        let f = AnalyticFunction::Lacunary(Lacunary::ones());
        for r in [0.1, 0.5, 0.9, 0.99] {
            let quad = integral_mean(&f, &p("2"), r, 1e-10).unwrap();
            let pars = parseval_mean(&f, r).unwrap();
            assert_relative_eq!(quad, pars, max_relative = 1e-9);
        }
        let best = best_mean_at(&f, &p("inf"), 0.01, 1e-9).unwrap();
        let quad = integral_mean_at(&f, &p("inf"), 0.01, 1e-9).unwrap();
        assert_relative_eq!(best.value, quad.value, max_relative = 1e-9);
    }

    #[test]
    fn kernel_mean_matches_parseval() {
        let f = AnalyticFunction::kernel(Complex64::new(0.0, 0.95), int(1), ratio(5, 2)).unwrap();
        for r in [0.3, 0.9, 0.99] {
            let quad = integral_mean(&f, &p("2"), r, 1e-10).unwrap();
            assert_relative_eq!(quad, parseval_mean(&f, r).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = AnalyticFunction::constant(1.0);
        assert!(integral_mean(&f, &p("1"), 1.0, 1e-9).is_err());
        assert!(integral_mean(&f, &p("1"), -0.1, 1e-9).is_err());
        assert!(integral_mean(&f, &p("1"), 0.5, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn monotone_in_r_and_p(g in 1i64..12, r1 in 0.05f64..0.9, dr in 0.01f64..0.09) {
            let f = AnalyticFunction::power(ratio(g, 4));
            let r2 = r1 + dr;
            let ps = ["1/2", "1", "2", "4", "inf"];
            let mut prev_row: Option<Vec<f64>> = None;
            for r in [r1, r2] {
                let row: Vec<f64> = ps.iter().map(|s| integral_mean(&f, &p(s), r, 1e-9).unwrap()).collect();
                for w in row.windows(2) {
                    prop_assert!(w[0] <= w[1] * (1.0 + 4e-9));
                }
                if let Some(prev) = &prev_row {
                    for (a, b) in prev.iter().zip(&row) {
                        prop_assert!(*a <= *b * (1.0 + 4e-9));
                    }
                }
                prev_row = Some(row);
            }
        }

        #[test]
        fn interpolation_inequality(g in 1i64..10, r in 0.1f64..0.95, pi in 0usize..3) {
            let f = AnalyticFunction::power(ratio(g, 4));
            let (pp, uu) = [("1", "2"), ("1/2", "3"), ("2", "4")][pi];
            let mp = integral_mean(&f, &p(pp), r, 1e-9).unwrap();
            let mu = integral_mean(&f, &p(uu), r, 1e-9).unwrap();
            let minf = integral_mean(&f, &p("inf"), r, 1e-9).unwrap();
            let ratio_pu = p(pp).to_f64() / p(uu).to_f64();
            let rhs = minf.powf(1.0 - ratio_pu) * mp.powf(ratio_pu);
            prop_assert!(mu <= rhs * (1.0 + 4e-9));
        }
    }
}
