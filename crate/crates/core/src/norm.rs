//! Mixed norms `‖f‖_{p,q,α}`, divergence classification and growth exponents.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{AnalyticFunction, SpaceParams};
use crate::means::{best_mean_at, golden_max, MeanEstimate};
use crate::quadrature::adaptive_gk;
use crate::rational::{to_f64, ExtRational};
use crate::special::beta;

/// Margin `δ` by which the fitted growth exponent must exceed `α` before a
/// norm is declared divergent.
pub const DIVERGENCE_MARGIN: f64 = 0.02;
/// Maximal least-squares residual for the growth fit to count.
pub const FIT_RESIDUAL_MAX: f64 = 0.01;
/// Dyadic tail ratios must stay below this for a geometric extrapolation.
pub const RATIO_CEILING: f64 = 0.99;
/// Ratios at or above this over the last panels indicate a non-decaying tail.
pub const RATIO_FLOOR_DIVERGENT: f64 = 0.999;

const MIN_PANELS: usize = 6;
const MAX_PANELS: usize = 120;
const PANEL_EVALS: usize = 15 * 64;
const MIN_LOG2_T: f64 = -1000.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormResult {
    Finite { value: f64, err: f64 },
    Divergent { gamma_hat: f64 },
    Inconclusive { partial: f64, gamma_hat: f64 },
}

impl NormResult {
    pub fn finite_value(&self) -> Option<f64> {
        match self {
            NormResult::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, NormResult::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, NormResult::Divergent { .. })
    }

    pub fn gamma_hat(&self) -> Option<f64> {
        match self {
            NormResult::Divergent { gamma_hat } | NormResult::Inconclusive { gamma_hat, .. } => Some(*gamma_hat),
            NormResult::Finite { .. } => None,
        }
    }
}

/// Least-squares fit of `log M_p(1 - 2^{-k}) ≈ c + γ̂ k log 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub gamma_hat: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    /// Number of radii that contributed.
    pub points: usize,
}

/// Mixed norm together with the diagnostics that led to the classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub result: NormResult,
    pub panels: usize,
    pub last_ratio: Option<f64>,
    pub fit: Option<GrowthFit>,
}

/// Growth exponent of `M_p(r, f)` over `r_k = 1 - 2^{-k}`, `k = 8..=24`.
pub fn growth_exponent(f: &AnalyticFunction, p: &ExtRational) -> GrowthFit {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut any_zero = false;
    for k in 8..=24 {
        let t = 2f64.powi(-k);
        match best_mean_at(f, p, t, 1e-6) {
            Ok(m) if m.value > 0.0 && m.value.is_finite() => {
                xs.push(k as f64 * std::f64::consts::LN_2);
                ys.push(m.value.ln());
            }
            Ok(m) if m.value == 0.0 => any_zero = true,
            _ => break,
        }
    }
    if xs.is_empty() && any_zero {
        return GrowthFit { gamma_hat: 0.0, residual: 0.0, points: 0 };
    }
    least_squares(&xs, &ys)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> GrowthFit {
    let n = xs.len();
    if n < 3 {
        return GrowthFit { gamma_hat: f64::NAN, residual: f64::INFINITY, points: n };
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    GrowthFit { gamma_hat: slope, residual: (rss / nf).sqrt(), points: n }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// `‖f‖_{p,q,α}` with relative error at most `tol` when finite.
pub fn mixed_norm(f: &AnalyticFunction, s: &SpaceParams, tol: f64) -> Result<NormResult> {
    mixed_norm_report(f, s, tol).map(|r| r.result)
}

pub fn mixed_norm_report(f: &AnalyticFunction, s: &SpaceParams, tol: f64) -> Result<NormReport> {
    check_tol(tol)?;
    match s.q.as_finite() {
        Some(q) => norm_finite_q(f, s, to_f64(q), tol),
        None => norm_sup(f, s, tol),
    }
}

struct Panels {
    integrals: Vec<f64>,
    sum: f64,
    quad_err: f64,
}

impl Panels {
    fn ratios(&self, last: usize) -> Option<Vec<f64>> {
        let n = self.integrals.len();
        if n < last + 1 {
            return None;
        }
        let r: Vec<f64> = (n - last..n).map(|k| self.integrals[k] / self.integrals[k - 1]).collect();
        if r.iter().all(|x| x.is_finite()) {
            Some(r)
        } else {
            None
        }
    }

    /// Geometric tail `(estimate, error)` when the last four ratios are
    /// stable and below the ceiling.
    fn geometric_tail(&self) -> Option<(f64, f64)> {
        let r = self.ratios(4)?;
        let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(hi < RATIO_CEILING) || lo < 0.0 || hi - lo > 0.1 * (1.0 - hi) {
            return None;
        }
        let last = *self.integrals.last()?;
        let rho = *r.last()?;
        let g = |x: f64| x / (1.0 - x);
        Some((last * g(rho), last * (g(hi) - g(lo))))
    }

    fn non_decaying(&self, last: usize) -> bool {
        self.ratios(last).is_some_and(|r| r.iter().all(|x| *x >= RATIO_FLOOR_DIVERGENT))
    }
}

fn norm_finite_q(f: &AnalyticFunction, s: &SpaceParams, q: f64, tol: f64) -> Result<NormReport> {
    let alpha = s.alpha_f64();
    let aq = alpha * q;
    let subst = aq < 1.0;
    let mean_tol = tol / 4.0;
    let quad_rel = q * tol / 8.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    // integrand in x ∈ (0, 1]: t = x^{1/(αq)} when αq < 1, t = x otherwise
    let t_of = |x: f64| if subst { x.powf(1.0 / aq) } else { x };
    let h = |x: f64| -> f64 {
        let t = t_of(x);
        match best_mean_at(f, &s.p, t, mean_tol) {
            Ok(MeanEstimate { value, .. }) => {
                let mq = value.powf(q);
                if subst {
                    mq
                } else {
                    aq * x.powf(aq - 1.0) * mq
                }
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let mut panels = Panels { integrals: Vec::new(), sum: 0.0, quad_err: 0.0 };
    let mut fit: Option<GrowthFit> = None;
    let get_fit = |fit: &mut Option<GrowthFit>| -> GrowthFit {
        fit.get_or_insert_with(|| growth_exponent(f, &s.p)).clone()
    };
    let report = |result: NormResult, panels: &Panels, fit: Option<GrowthFit>| NormReport {
        result,
        panels: panels.integrals.len(),
        last_ratio: panels.ratios(1).map(|r| r[0]),
        fit,
    };

    let mut stopped_early = false;
    for k in 0..MAX_PANELS {
        let (a, b) = (2f64.powi(-(k as i32) - 1), 2f64.powi(-(k as i32)));
        if t_of(a).log2() < MIN_LOG2_T || t_of(a) == 0.0 {
            stopped_early = true;
            break;
        }
        let abs_tol = quad_rel * panels.sum / 4.0;
        let quad = adaptive_gk(&h, &[a, b], quad_rel, abs_tol, PANEL_EVALS);
        let quad = match quad {
            Ok(qr) if qr.value.is_finite() => qr,
            _ => {
                if let Some(e) = failure.borrow_mut().take() {
                    if !matches!(e, Error::ToleranceNotReached(_)) {
                        return Err(e);
                    }
                }
                stopped_early = true;
                break;
            }
        };
        panels.integrals.push(quad.value);
        panels.sum += quad.value;
        panels.quad_err += quad.error;

        if k + 1 < MIN_PANELS {
            continue;
        }
        if panels.sum == 0.0 {
            if panels.integrals.iter().all(|v| *v == 0.0) && k + 1 >= MIN_PANELS {
                return Ok(report(NormResult::Finite { value: 0.0, err: 0.0 }, &panels, fit));
            }
            continue;
        }
        if let Some((tail, tail_err)) = panels.geometric_tail() {
            let total = panels.sum + tail;
            // mean errors enter the integral with relative weight q·mean_tol
            let err_s = panels.quad_err + tail_err + q * mean_tol * total;
            if err_s <= q * tol * total {
                let value = total.powf(1.0 / q);
                let err = value * err_s / (q * total);
                return Ok(report(NormResult::Finite { value, err }, &panels, fit));
            }
        }
        if panels.non_decaying(4) {
            let g = get_fit(&mut fit);
            if g.gamma_hat > alpha + DIVERGENCE_MARGIN && g.residual < FIT_RESIDUAL_MAX {
                return Ok(report(NormResult::Divergent { gamma_hat: g.gamma_hat }, &panels, fit));
            }
            if k + 1 >= 2 * MIN_PANELS && panels.non_decaying(6) {
                return Ok(report(NormResult::Divergent { gamma_hat: g.gamma_hat }, &panels, fit));
            }
        }
    }

    let g = get_fit(&mut fit);
    if panels.geometric_tail().is_some() {
        return Err(Error::ToleranceNotReached(format!(
            "mixed norm tail still shrinking after {} panels{}",
            panels.integrals.len(),
            if stopped_early { " (integral means unavailable closer to the boundary)" } else { "" }
        )));
    }
    if g.gamma_hat > alpha + DIVERGENCE_MARGIN && g.residual < FIT_RESIDUAL_MAX {
        return Ok(report(NormResult::Divergent { gamma_hat: g.gamma_hat }, &panels, fit));
    }
    let partial = panels.sum.max(0.0).powf(1.0 / q);
    Ok(report(NormResult::Inconclusive { partial, gamma_hat: g.gamma_hat }, &panels, fit))
}

/// `sup_r (1-r)^α M_p(r, f)` on `1 - r = 2^{-k/4}`, `k = 0..=96`, refined
/// around the grid maximizer.
fn norm_sup(f: &AnalyticFunction, s: &SpaceParams, tol: f64) -> Result<NormReport> {
    let alpha = s.alpha_f64();
    let mean_tol = tol / 4.0;
    let log_w = |t: f64| -> Result<f64> {
        let m = best_mean_at(f, &s.p, t, mean_tol)?;
        Ok(alpha * t.ln() + m.value.ln())
    };
    let mut grid: Vec<(f64, f64)> = Vec::new();
    for k in 0..=96 {
        let t = 2f64.powf(-(k as f64) / 4.0);
        match log_w(t) {
            Ok(v) => grid.push((t, v)),
            Err(Error::ToleranceNotReached(_)) if grid.len() > 8 => break,
            Err(e) => return Err(e),
        }
    }
    let report = |result: NormResult, fit: Option<GrowthFit>, n: usize| NormReport {
        result,
        panels: n,
        last_ratio: None,
        fit,
    };
    let n = grid.len();
    if grid.iter().all(|(_, v)| *v == f64::NEG_INFINITY) {
        return Ok(report(NormResult::Finite { value: 0.0, err: 0.0 }, None, n));
    }
    let (j, &(_, mut best)) = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or_else(|| Error::ToleranceNotReached("no integral means available".into()))?;
    if j + 4 < n {
        let lo = grid[(j + 1).min(n - 1)].0.ln();
        let hi = grid[j.saturating_sub(1)].0.ln();
        let (_, v) = golden_max(|u| log_w(u.exp()).unwrap_or(f64::NEG_INFINITY), lo, hi, 1e-6);
        best = best.max(v);
        let value = best.exp();
        return Ok(report(NormResult::Finite { value, err: tol * value }, None, n));
    }
    // maximum sits in the last octave: finite only if the curve has levelled off
    let last = grid[n - 1].1;
    let octave_back = grid[n - 5].1;
    let rise = last - octave_back;
    if rise <= 0.5 * tol {
        let value = best.exp();
        let err = value * (tol / 2.0 + rise.max(0.0));
        return Ok(report(NormResult::Finite { value, err }, None, n));
    }
    let g = growth_exponent(f, &s.p);
    let result = if g.gamma_hat > alpha + DIVERGENCE_MARGIN && g.residual < FIT_RESIDUAL_MAX {
        NormResult::Divergent { gamma_hat: g.gamma_hat }
    } else {
        NormResult::Inconclusive { partial: best.exp(), gamma_hat: g.gamma_hat }
    };
    Ok(report(result, Some(g), n))
}

/// The pointwise constant `m` of the space: `2^{1/p} / (αq B(αq, q/p + 1))^{1/q}`
/// for `p, q < ∞`, and `1` when `p = ∞`.
pub fn pointwise_constant(s: &SpaceParams) -> Result<f64> {
    let p = match s.p.as_finite() {
        None => return Ok(1.0),
        Some(p) => to_f64(p),
    };
    let q = match s.q.as_finite() {
        None => {
            return Err(Error::Domain(format!(
                "the pointwise constant needs q < ∞ when p < ∞ (space {s})"
            )))
        }
        Some(q) => to_f64(q),
    };
    let aq = s.alpha_f64() * q;
    Ok(2f64.powf(1.0 / p) / (aq * beta(aq, q / p + 1.0)?).powf(1.0 / q))
}

/// Bound `m / (1 - |z|)^{α + 1/p}` on the norm of point evaluation at `z`.
pub fn point_evaluation_bound(s: &SpaceParams, z: Complex64) -> Result<f64> {
    let modulus = z.norm();
    if !(modulus < 1.0) {
        return Err(Error::Domain(format!("point {z} is not inside the unit disk")));
    }
    let m = pointwise_constant(s)?;
    Ok(m / (1.0 - modulus).powf(to_f64(&s.critical_exponent())))
}

/// Memoizes mixed norms by function, space and tolerance. Functions that
/// cannot be serialized (custom coefficient rules) are computed uncached.
#[derive(Default)]
pub struct NormCache {
    map: Mutex<HashMap<(String, String, u64), Result<NormResult>>>,
}

impl NormCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, f: &AnalyticFunction, s: &SpaceParams, tol: f64) -> Result<NormResult> {
        let key = match serde_json::to_string(f) {
            Ok(js) => (js, s.to_string(), tol.to_bits()),
            Err(_) => return mixed_norm(f, s, tol),
        };
        if let Some(v) = self.map.lock().map_err(|_| poisoned())?.get(&key) {
            return v.clone();
        }
        let v = mixed_norm(f, s, tol);
        self.map.lock().map_err(|_| poisoned())?.insert(key, v.clone());
        v
    }

    pub fn len(&self) -> usize {
        self.map.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn poisoned() -> Error {
    Error::ToleranceNotReached("norm cache lock poisoned by a panicking worker".into())
}
