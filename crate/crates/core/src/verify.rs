//! Quantitative checks of the growth estimates behind the inclusion results.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use glob::Pattern;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::function::{known_membership, AnalyticFunction, DiskPoint, SpaceParams};
use crate::means::best_mean_at;
use crate::norm::{pointwise_constant, NormCache, NormResult};
use crate::quadrature::tanh_sinh;
use crate::rational::{int, ratio, to_f64, ExtRational, Rational};
use crate::special::beta;

pub const BETA_IDENTITY_TOL: f64 = 1e-8;
/// Two-sided comparability window for the extremal kernel quantities.
pub const COMPARABILITY_WINDOW: f64 = 20.0;

pub const CHECK_NAMES: [&str; 8] = [
    "beta_identity",
    "extremal_kernel",
    "higher_mean_bound",
    "littleoh_mean",
    "mean_power_bound",
    "mean_ratio_bound",
    "pointwise_bound",
    "subharmonic_bound",
];

const SHARPNESS_NOTE: &str = "when q = inf the weighted quantity need not vanish: \
(1-z)^-(alpha+1/p) keeps it bounded away from zero, so the little-oh refinement holds only for q < inf";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    ExpectedFail { citation: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub instance: String,
    pub grid: Vec<f64>,
    /// Largest signed relative violation; the check passes when it does not
    /// exceed `tolerance`.
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(flatten)]
    pub outcome: Outcome,
    pub metadata: BTreeMap<String, Value>,
}

impl CheckReport {
    fn new(name: &str, instance: String, grid: Vec<f64>, max_violation: f64, tolerance: f64) -> Self {
        let outcome = if max_violation <= tolerance { Outcome::Pass } else { Outcome::Fail };
        CheckReport { name: name.into(), instance, grid, max_violation, tolerance, outcome, metadata: BTreeMap::new() }
    }

    fn failed(name: &str, instance: String, reason: String) -> Self {
        let mut r = CheckReport::new(name, instance, Vec::new(), f64::INFINITY, 0.0);
        r.metadata.insert("error".into(), json!(reason));
        r
    }

    fn meta(mut self, key: &str, v: Value) -> Self {
        self.metadata.insert(key.into(), v);
        self
    }

    /// Failures in a `q = ∞` space are the documented sharpness cases.
    fn expect_fail_if(mut self, cond: bool) -> Self {
        if cond && self.outcome == Outcome::Fail && !self.metadata.contains_key("error") {
            self.outcome = Outcome::ExpectedFail { citation: SHARPNESS_NOTE.into() };
        }
        self
    }

    pub fn is_unexpected_failure(&self) -> bool {
        self.outcome == Outcome::Fail
    }

    pub fn is_expected_failure(&self) -> bool {
        matches!(self.outcome, Outcome::ExpectedFail { .. })
    }
}

fn instance(f: &AnalyticFunction, s: &SpaceParams) -> String {
    format!("f={} s={s}", f.label())
}

/// `t_k = 2^{-k}` for `k` in `range`.
fn dyadic(range: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    range.map(|k| 2f64.powi(-k)).collect()
}

fn max_or(xs: impl Iterator<Item = f64>, empty: f64) -> f64 {
    xs.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x)))).unwrap_or(empty)
}

/// Runs checks against a shared norm cache.
pub struct Verifier {
    pub tol: f64,
    cache: NormCache,
}

impl Verifier {
    pub fn new(tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-2) {
            return Err(Error::Domain(format!("tolerance must lie in (0, 1e-2], got {tol}")));
        }
        Ok(Verifier { tol, cache: NormCache::new() })
    }

    fn norm(&self, f: &AnalyticFunction, s: &SpaceParams) -> Result<f64> {
        match self.cache.get(f, s, self.tol)? {
            NormResult::Finite { value, .. } => Ok(value),
            other => Err(Error::ToleranceNotReached(format!("norm of {} in {s} is {other:?}", f.label()))),
        }
    }

    fn mean(&self, f: &AnalyticFunction, p: &ExtRational, t: f64) -> Result<f64> {
        best_mean_at(f, p, t, self.tol / 4.0).map(|m| m.value)
    }

    /// `(1-r)^α M_p(r, f)` on `r_k = 1 - 2^{-k}` (`k = 2..=20` by default) is
    /// eventually decreasing and ends below half its first value.
    pub fn check_little_oh_mean(&self, f: &AnalyticFunction, s: &SpaceParams, ts: Option<&[f64]>) -> CheckReport {
        const NAME: &str = "littleoh_mean";
        let ts = ts.map(<[f64]>::to_vec).unwrap_or_else(|| dyadic(2..=20));
        let alpha = s.alpha_f64();
        let w: Result<Vec<f64>> = ts.iter().map(|&t| Ok(t.powf(alpha) * self.mean(f, &s.p, t)?)).collect();
        let w = match w {
            Ok(w) => w,
            Err(e) => return CheckReport::failed(NAME, instance(f, s), e.to_string()),
        };
        let first = w[0];
        let last = *w.last().unwrap_or(&first);
        let half_violation = if first > 0.0 { last / (0.5 * first) - 1.0 } else { 0.0 };
        let tail = &w[w.len() / 2..];
        let rise = max_or(tail.windows(2).map(|p| if p[0] > 0.0 { p[1] / p[0] - 1.0 } else { 0.0 }), -1.0);
        CheckReport::new(NAME, instance(f, s), ts.iter().map(|t| 1.0 - t).collect(), half_violation.max(rise), 4.0 * self.tol)
            .meta("weighted_means", json!(w))
            .expect_fail_if(s.q.is_infinite())
    }

    /// `∫_{|z|}^1 (1-ρ)^{αq-1}(ρ-|z|)^{q/p} dρ = B(αq, q/p+1)(1-|z|)^{αq+q/p}`.
    pub fn check_beta_identity(&self, alpha_q: f64, q_over_p: f64, z_mod: f64) -> CheckReport {
        const NAME: &str = "beta_identity";
        let inst = format!("alpha*q={alpha_q} q/p={q_over_p} |z|={z_mod}");
        if !(alpha_q > 0.0 && q_over_p > 0.0 && (0.0..1.0).contains(&z_mod)) {
            return CheckReport::failed(NAME, inst, "parameters out of range".into());
        }
        let quad = tanh_sinh(|_, from_z, to_one| to_one.powf(alpha_q - 1.0) * from_z.powf(q_over_p), z_mod, 1.0, 1e-12);
        let closed = beta(alpha_q, q_over_p + 1.0).map(|b| b * (1.0 - z_mod).powf(alpha_q + q_over_p));
        match (quad, closed) {
            (Ok(q), Ok(c)) => {
                let v = (q.value - c).abs() / c;
                CheckReport::new(NAME, inst, vec![z_mod], v, BETA_IDENTITY_TOL)
                    .meta("quadrature", json!(q.value))
                    .meta("closed_form", json!(c))
            }
            (Err(e), _) | (_, Err(e)) => CheckReport::failed(NAME, inst, e.to_string()),
        }
    }

    /// `|f(z)| ≤ m ‖f‖ (1-|z|)^{-(α+1/p)}` on radial and angular grids, and
    /// `|f(z)|(1-|z|)^{α+1/p}` falling below half its initial value radially.
    pub fn check_pointwise_bound(&self, f: &AnalyticFunction, s: &SpaceParams, z_grid: Option<&[DiskPoint]>) -> CheckReport {
        const NAME: &str = "pointwise_bound";
        let crit = to_f64(&s.critical_exponent());
        let default_grid: Vec<DiskPoint> = [1.0, 0.75, 0.5, 0.25, 0.1, 0.01, 0.001]
            .iter()
            .flat_map(|&t| [0.0, PI / 3.0, PI / 2.0, PI, 4.0 * PI / 3.0].map(|th| DiskPoint::polar(t, th)))
            .collect();
        let grid = z_grid.map(<[DiskPoint]>::to_vec).unwrap_or(default_grid);
        let norm = match self.norm(f, s) {
            Ok(n) => n,
            Err(e) => return CheckReport::failed(NAME, instance(f, s), e.to_string()),
        };
        let mut violation = f64::NEG_INFINITY;
        let mut meta_m = Value::Null;
        if let Ok(m) = pointwise_constant(s) {
            meta_m = json!(m);
            for pt in &grid {
                let lhs = f.eval_at(pt).norm() * pt.t.powf(crit);
                violation = violation.max(lhs / (m * norm) - 1.0);
            }
        }
        // radial decay along the direction of the strongest growth
        let direction = f.singularity(1e-3).map(|(c, _)| c).unwrap_or(0.0);
        let radial: Vec<f64> =
            dyadic(1..=20).iter().map(|&t| f.eval_at(&DiskPoint::polar(t, direction)).norm() * t.powf(crit)).collect();
        let decay_violation = if radial[0] > 0.0 { radial[radial.len() - 1] / (0.5 * radial[0]) - 1.0 } else { 0.0 };
        violation = violation.max(decay_violation);
        CheckReport::new(NAME, instance(f, s), grid.iter().map(|p| p.radius()).collect(), violation, 4.0 * self.tol)
            .meta("norm", json!(norm))
            .meta("m", meta_m)
            .meta("radial_weighted_modulus", json!(radial))
            .meta(
                "note",
                json!("checks |f(z)|(1-|z|)^(alpha+1/p) -> 0, the quantity bounded in the argument; \
                       the exponent in the displayed little-oh statement has the opposite sign"),
            )
            .expect_fail_if(s.q.is_infinite())
    }

    /// Extremal kernels `f_z` have comparable norms and comparable
    /// `|f_z(z)|(1-|z|)^{α+1/p}` across `z_mods`, and respect the
    /// point-evaluation bound.
    pub fn check_extremal_kernel(&self, s: &SpaceParams, s_exp: &Rational, z_mods: Option<&[f64]>) -> CheckReport {
        const NAME: &str = "extremal_kernel";
        let inst = format!("s={s} s_exp={}", crate::rational::format_rational(s_exp));
        let z_mods = z_mods.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0, 0.5, 0.9, 0.99, 0.999]);
        let crit = to_f64(&s.critical_exponent());
        let mut ns = Vec::new();
        let mut gs = Vec::new();
        for &zm in &z_mods {
            let center = Complex64::new(zm, 0.0);
            let f = match AnalyticFunction::extremal_kernel(center, s, s_exp.clone()) {
                Ok(f) => f,
                Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
            };
            match self.norm(&f, s) {
                Ok(n) => ns.push(n),
                Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
            }
            let pt = DiskPoint::polar(1.0 - zm, 0.0);
            gs.push(f.eval_at(&pt).norm() * pt.t.powf(crit));
        }
        let spread = |v: &[f64]| max_or(v.iter().cloned(), 0.0) / v.iter().cloned().fold(f64::INFINITY, f64::min);
        let (sn, sg) = (spread(&ns), spread(&gs));
        let mut violation = (sn / COMPARABILITY_WINDOW - 1.0).max(sg / COMPARABILITY_WINDOW - 1.0);
        let mut meta_m = Value::Null;
        if let Ok(m) = pointwise_constant(s) {
            meta_m = json!(m);
            for (g, n) in gs.iter().zip(&ns) {
                violation = violation.max(g / (m * n) - 1.0);
            }
        }
        CheckReport::new(NAME, inst, z_mods, violation, 4.0 * self.tol)
            .meta("norms", json!(ns))
            .meta("weighted_values", json!(gs))
            .meta("norm_spread", json!(sn))
            .meta("value_spread", json!(sg))
            .meta("m", meta_m)
            .meta("window", json!(COMPARABILITY_WINDOW))
    }

    /// `M_p^v ≤ ‖f‖^{v-q} (1-r)^{-α(v-q)} M_p^q` for `q ≤ v < ∞`.
    pub fn check_mean_power_bound(&self, f: &AnalyticFunction, s: &SpaceParams, v: &Rational, ts: Option<&[f64]>) -> CheckReport {
        const NAME: &str = "mean_power_bound";
        let inst = format!("{} v={}", instance(f, s), crate::rational::format_rational(v));
        let q = match s.q.as_finite() {
            Some(q) if q <= v => to_f64(q),
            _ => return CheckReport::failed(NAME, inst, "needs q <= v < inf".into()),
        };
        let vf = to_f64(v);
        let ts = ts.map(<[f64]>::to_vec).unwrap_or_else(|| dyadic(1..=20));
        let norm = match self.norm(f, s) {
            Ok(n) => n,
            Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
        };
        let alpha = s.alpha_f64();
        let mut violation = f64::NEG_INFINITY;
        for &t in &ts {
            let m = match self.mean(f, &s.p, t) {
                Ok(m) => m,
                Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
            };
            if m == 0.0 {
                continue;
            }
            let lhs = vf * m.ln();
            let rhs = (vf - q) * norm.ln() - alpha * (vf - q) * t.ln() + q * m.ln();
            violation = violation.max(((lhs - rhs) / vf).exp() - 1.0);
        }
        CheckReport::new(NAME, inst, ts.iter().map(|t| 1.0 - t).collect(), violation, 4.0 * self.tol).meta("norm", json!(norm))
    }

    /// `M_u(r) ≤ m^{1-p/u} ‖f‖ (1-r)^{-α+1/u-1/p}` for `p < u`, `q < ∞`.
    pub fn check_higher_mean_bound(&self, f: &AnalyticFunction, s: &SpaceParams, u: &ExtRational, ts: Option<&[f64]>) -> CheckReport {
        const NAME: &str = "higher_mean_bound";
        let inst = format!("{} u={u}", instance(f, s));
        if !(&s.p < u) || s.q.is_infinite() {
            return CheckReport::failed(NAME, inst, "needs p < u and q < inf".into());
        }
        let m = match pointwise_constant(s) {
            Ok(m) => m,
            Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
        };
        let norm = match self.norm(f, s) {
            Ok(n) => n,
            Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
        };
        let ts = ts.map(<[f64]>::to_vec).unwrap_or_else(|| dyadic(1..=20));
        let pf = s.p_f64();
        let uf = u.to_f64();
        let exponent = s.alpha_f64() - 1.0 / uf + 1.0 / pf;
        let c = m.powf(1.0 - pf / uf) * norm;
        let mut violation = f64::NEG_INFINITY;
        for &t in &ts {
            match self.mean(f, u, t) {
                Ok(mu) => violation = violation.max(mu * t.powf(exponent) / c - 1.0),
                Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
            }
        }
        CheckReport::new(NAME, inst, ts.iter().map(|t| 1.0 - t).collect(), violation, 4.0 * self.tol)
            .meta("norm", json!(norm))
            .meta("m", json!(m))
    }

    /// `R(r) = M_u(r)(1-r)^{1/p-1/u} / M_p(r)` stays bounded: over the last
    /// ten dyadic radii the latest five values stay within twice the median.
    /// The largest observed `R` is recorded as the empirical constant.
    pub fn check_mean_ratio_bound(&self, f: &AnalyticFunction, p: &ExtRational, u: &ExtRational, ts: Option<&[f64]>) -> CheckReport {
        const NAME: &str = "mean_ratio_bound";
        let inst = format!("f={} p={p} u={u}", f.label());
        if p > u {
            return CheckReport::failed(NAME, inst, "needs p <= u".into());
        }
        let ts = ts.map(<[f64]>::to_vec).unwrap_or_else(|| dyadic(1..=20));
        let exponent = to_f64(&(p.recip() - u.recip()));
        let mut rs = Vec::new();
        for &t in &ts {
            let mp = self.mean(f, p, t);
            let mu = self.mean(f, u, t);
            match (mp, mu) {
                (Ok(mp), Ok(mu)) if mp > 0.0 => rs.push(mu * t.powf(exponent) / mp),
                (Ok(_), Ok(_)) => rs.push(0.0),
                (Err(e), _) | (_, Err(e)) => return CheckReport::failed(NAME, inst, e.to_string()),
            }
        }
        let window: Vec<f64> = rs[rs.len().saturating_sub(10)..].to_vec();
        let mut sorted = window.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let late = max_or(window[window.len().saturating_sub(5)..].iter().cloned(), 0.0);
        let violation = if median > 0.0 { late / (2.0 * median) - 1.0 } else { 0.0 };
        let c_hat = max_or(rs.iter().cloned(), 0.0);
        CheckReport::new(NAME, inst, ts.iter().map(|t| 1.0 - t).collect(), violation, 4.0 * self.tol)
            .meta("ratios", json!(rs))
            .meta("empirical_constant", json!(c_hat))
    }

    /// `|f(re^{iθ})| (ρ - r)^{1/p} ≤ 2^{1/p} M_p(ρ, f)` for `r < ρ < 1`.
    pub fn check_subharmonic_bound(&self, f: &AnalyticFunction, p: &ExtRational) -> CheckReport {
        const NAME: &str = "subharmonic_bound";
        let inst = format!("f={} p={p}", f.label());
        let inv_p = to_f64(&p.recip());
        let mut violation = f64::NEG_INFINITY;
        let mut grid = Vec::new();
        for &t in &[1.0, 0.5, 0.1, 0.01] {
            for frac in [0.25, 0.5, 0.75] {
                // ρ = r + frac (1 - r), so 1 - ρ = (1 - frac) t and ρ - r = frac t
                let t_rho = (1.0 - frac) * t;
                let m = match self.mean(f, p, t_rho) {
                    Ok(m) => m,
                    Err(e) => return CheckReport::failed(NAME, inst, e.to_string()),
                };
                for th in [0.0, 1.0, PI] {
                    let lhs = f.eval_at(&DiskPoint::polar(t, th)).norm() * (frac * t).powf(inv_p);
                    let rhs = 2f64.powf(inv_p) * m;
                    if rhs > 0.0 {
                        violation = violation.max(lhs / rhs - 1.0);
                    }
                }
                grid.push(1.0 - t);
            }
        }
        CheckReport::new(NAME, inst, grid, violation, 4.0 * self.tol)
    }

    /// Runs every check whose name matches `pattern` over `battery` and the
    /// standard parameter sets; reports are sorted by name, then instance.
    pub fn run(&self, pattern: &str, battery: &[AnalyticFunction]) -> Result<Vec<CheckReport>> {
        let pat = Pattern::new(pattern).map_err(|e| Error::Parse(format!("check pattern '{pattern}': {e}")))?;
        let selected: Vec<&str> = CHECK_NAMES.iter().copied().filter(|n| pat.matches(n)).collect();
        if selected.is_empty() {
            return Err(Error::Domain(format!("no check matches '{pattern}' (available: {})", CHECK_NAMES.join(", "))));
        }
        if battery.is_empty() {
            return Err(Error::Domain("the function battery is empty".into()));
        }
        let jobs = self.jobs(&selected, battery);
        let mut reports: Vec<CheckReport> = jobs.into_par_iter().map(|job| job.run(self)).collect();
        reports.sort_by(|a, b| (&a.name, &a.instance).cmp(&(&b.name, &b.instance)));
        Ok(reports)
    }

    fn jobs(&self, selected: &[&str], battery: &[AnalyticFunction]) -> Vec<Job> {
        let spaces: Vec<SpaceParams> = SUITE_SPACES.iter().filter_map(|s| SpaceParams::parse(s).ok()).collect();
        let members = |s: &SpaceParams| -> Vec<AnalyticFunction> {
            battery.iter().filter(|f| known_membership(f, s).is_member() && strictly_inside(f, s)).cloned().collect()
        };
        let mut jobs = Vec::new();
        for &name in selected {
            match name {
                "beta_identity" => {
                    let vals = [0.25, 0.5, 1.0, 2.0, 4.0];
                    for &aq in &vals {
                        for &qp in &vals {
                            for &z in &[0.0, 0.5, 0.9] {
                                jobs.push(Job::Beta(aq, qp, z));
                            }
                        }
                    }
                }
                "littleoh_mean" => {
                    for s in &spaces {
                        jobs.extend(members(s).into_iter().map(|f| Job::LittleOh(f, s.clone())));
                    }
                    jobs.push(Job::LittleOh(AnalyticFunction::power(ratio(3, 2)), space("2,inf,1")));
                }
                "pointwise_bound" => {
                    for s in &spaces {
                        jobs.extend(members(s).into_iter().map(|f| Job::Pointwise(f, s.clone())));
                    }
                    jobs.push(Job::Pointwise(AnalyticFunction::power(int(1)), space("inf,inf,1")));
                }
                "extremal_kernel" => {
                    for s in &spaces {
                        for s_exp in [ratio(1, 2), int(1), int(2)] {
                            jobs.push(Job::Kernel(s.clone(), s_exp));
                        }
                    }
                }
                "mean_power_bound" => {
                    for s in &spaces {
                        let q = s.q.as_finite().cloned().unwrap_or_else(|| int(1));
                        for f in members(s) {
                            for v in [q.clone(), &q + int(1), &q * int(2)] {
                                jobs.push(Job::LemmaD(f.clone(), s.clone(), v));
                            }
                        }
                    }
                }
                "higher_mean_bound" => {
                    for s in spaces.iter().filter(|s| !s.p.is_infinite()) {
                        let p = s.p.as_finite().cloned().unwrap_or_else(|| int(1));
                        for f in members(s) {
                            for u in [ExtRational::Finite(&p * int(2)), ExtRational::Infinity] {
                                jobs.push(Job::LemmaE(f.clone(), s.clone(), u));
                            }
                        }
                    }
                }
                "mean_ratio_bound" => {
                    for f in battery {
                        for (p, u) in RATIO_PAIRS {
                            jobs.push(Job::LemmaF(f.clone(), ext(p), ext(u)));
                        }
                    }
                }
                "subharmonic_bound" => {
                    for f in battery {
                        for p in ["1/2", "1", "2"] {
                            jobs.push(Job::Subharmonic(f.clone(), ext(p)));
                        }
                    }
                }
                _ => {}
            }
        }
        jobs
    }
}

/// Spaces the battery-driven checks run in (all with `q < ∞`).
pub const SUITE_SPACES: [&str; 6] = ["1,2,1", "2,2,1", "2,1,1/2", "inf,2,1", "4,1,3/2", "1/2,2,2"];

const RATIO_PAIRS: [(&str, &str); 5] = [("1", "1"), ("1", "2"), ("1", "inf"), ("2", "4"), ("1/2", "1")];

fn space(s: &str) -> SpaceParams {
    SpaceParams::parse(s).expect("built-in space literal")
}

fn ext(s: &str) -> ExtRational {
    s.parse().expect("built-in parameter literal")
}

/// Members at least `0.05` away from the critical growth, so their norms
/// converge within the panel budget.
fn strictly_inside(f: &AnalyticFunction, s: &SpaceParams) -> bool {
    match f {
        AnalyticFunction::Power { gamma } | AnalyticFunction::LogPower { gamma, .. } => {
            to_f64(&(s.critical_exponent() - gamma)) >= 0.05
        }
        AnalyticFunction::Scaled { inner, .. } => strictly_inside(inner, s),
        _ => true,
    }
}

enum Job {
    Beta(f64, f64, f64),
    LittleOh(AnalyticFunction, SpaceParams),
    Pointwise(AnalyticFunction, SpaceParams),
    Kernel(SpaceParams, Rational),
    LemmaD(AnalyticFunction, SpaceParams, Rational),
    LemmaE(AnalyticFunction, SpaceParams, ExtRational),
    LemmaF(AnalyticFunction, ExtRational, ExtRational),
    Subharmonic(AnalyticFunction, ExtRational),
}

impl Job {
    fn run(self, v: &Verifier) -> CheckReport {
        match self {
            Job::Beta(a, b, z) => v.check_beta_identity(a, b, z),
            Job::LittleOh(f, s) => v.check_little_oh_mean(&f, &s, None),
            Job::Pointwise(f, s) => v.check_pointwise_bound(&f, &s, None),
            Job::Kernel(s, e) => v.check_extremal_kernel(&s, &e, None),
            Job::LemmaD(f, s, q) => v.check_mean_power_bound(&f, &s, &q, None),
            Job::LemmaE(f, s, u) => v.check_higher_mean_bound(&f, &s, &u, None),
            Job::LemmaF(f, p, u) => v.check_mean_ratio_bound(&f, &p, &u, None),
            Job::Subharmonic(f, p) => v.check_subharmonic_bound(&f, &p),
        }
    }
}
