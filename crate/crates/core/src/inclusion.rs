//! Decides `H(p, q, α) ⊆ H(u, v, β)`, with embedding constants for the
//! included branches and explicit witnesses for the others.

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{known_membership, AnalyticFunction, Lacunary, SpaceParams, Verdict};
use crate::norm::{pointwise_constant, NormCache, NormResult};
use crate::rational::{int, to_f64, Rational};

/// Tolerance on the fitted exponent when a witness norm is inconclusive.
pub const BOUNDARY_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "T1-strict")]
    T1Strict,
    #[serde(rename = "T1-equal")]
    T1Equal,
    #[serde(rename = "T2-strict")]
    T2Strict,
    #[serde(rename = "T2-equal")]
    T2Equal,
    #[serde(rename = "T1-fail-alpha")]
    T1FailAlpha,
    #[serde(rename = "T1-fail-q")]
    T1FailQ,
    #[serde(rename = "T2-fail-strict")]
    T2FailStrict,
    #[serde(rename = "T2-fail-equal")]
    T2FailEqual,
}

impl Branch {
    pub const ALL: [Branch; 8] = [
        Branch::T1Strict,
        Branch::T1Equal,
        Branch::T2Strict,
        Branch::T2Equal,
        Branch::T1FailAlpha,
        Branch::T1FailQ,
        Branch::T2FailStrict,
        Branch::T2FailEqual,
    ];

    pub fn is_included(self) -> bool {
        matches!(self, Branch::T1Strict | Branch::T1Equal | Branch::T2Strict | Branch::T2Equal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::T1Strict => "T1-strict",
            Branch::T1Equal => "T1-equal",
            Branch::T2Strict => "T2-strict",
            Branch::T2Equal => "T2-equal",
            Branch::T1FailAlpha => "T1-fail-alpha",
            Branch::T1FailQ => "T1-fail-q",
            Branch::T2FailStrict => "T2-fail-strict",
            Branch::T2FailEqual => "T2-fail-equal",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Explicit,
    /// The value omits a multiplicative factor `C(p, u)` whose size is not known.
    UpToUnknownFactor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantInfo {
    pub kind: ConstantKind,
    pub value: f64,
    pub formula: String,
}

impl ConstantInfo {
    fn explicit(value: f64, formula: &str) -> Self {
        ConstantInfo { kind: ConstantKind::Explicit, value, formula: formula.to_string() }
    }

    fn partial(value: f64, formula: &str) -> Self {
        ConstantInfo { kind: ConstantKind::UpToUnknownFactor, value, formula: formula.to_string() }
    }

    pub fn explicit_value(&self) -> Option<f64> {
        (self.kind == ConstantKind::Explicit).then_some(self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    Included,
    NotIncluded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionVerdict {
    pub verdict: Inclusion,
    pub branch: Branch,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<ConstantInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<AnalyticFunction>,
}

impl InclusionVerdict {
    pub fn is_included(&self) -> bool {
        self.verdict == Inclusion::Included
    }
}

/// The branch of the characterization that applies to `(src, dst)`.
pub fn classify(src: &SpaceParams, dst: &SpaceParams) -> Branch {
    if src.p >= dst.p {
        if src.alpha < dst.alpha {
            Branch::T1Strict
        } else if src.alpha == dst.alpha {
            if src.q <= dst.q {
                Branch::T1Equal
            } else {
                Branch::T1FailQ
            }
        } else {
            Branch::T1FailAlpha
        }
    } else {
        let a = src.critical_exponent();
        let b = dst.critical_exponent();
        if a < b {
            Branch::T2Strict
        } else if a == b {
            if src.q <= dst.q {
                Branch::T2Equal
            } else {
                Branch::T2FailEqual
            }
        } else {
            Branch::T2FailStrict
        }
    }
}

pub fn decide_inclusion(src: &SpaceParams, dst: &SpaceParams) -> Result<InclusionVerdict> {
    let branch = classify(src, dst);
    if branch.is_included() {
        Ok(InclusionVerdict {
            verdict: Inclusion::Included,
            branch,
            constant: Some(embedding_constant(src, dst, branch)?),
            witness: None,
        })
    } else {
        Ok(InclusionVerdict {
            verdict: Inclusion::NotIncluded,
            branch,
            constant: None,
            witness: Some(witness(src, dst, branch)?),
        })
    }
}

fn ensure_branch(src: &SpaceParams, dst: &SpaceParams, branch: Branch) -> Result<()> {
    let actual = classify(src, dst);
    if actual != branch {
        return Err(Error::BranchMismatch(format!("{src} -> {dst} falls in branch {actual}, not {branch}")));
    }
    Ok(())
}

/// Pointwise constant used in the `p < u` estimates. For `q = ∞` the
/// sub-mean-value bound `|f(re^{iθ})| (ρ - r)^{1/p} ≤ 2^{1/p} M_p(ρ)` at
/// `ρ = (1 + r)/2` gives `2^{α + 2/p}`.
fn growth_constant(src: &SpaceParams) -> Result<(f64, &'static str)> {
    if src.q.is_infinite() && !src.p.is_infinite() {
        let p = src.p_f64();
        Ok((2f64.powf(src.alpha_f64() + 2.0 / p), "m=2^(alpha+2/p)"))
    } else {
        Ok((pointwise_constant(src)?, "m=2^(1/p)/(alpha*q*B(alpha*q,q/p+1))^(1/q)"))
    }
}

pub fn embedding_constant(src: &SpaceParams, dst: &SpaceParams, branch: Branch) -> Result<ConstantInfo> {
    if !branch.is_included() {
        return Err(Error::BranchMismatch(format!("{branch} is not an inclusion branch")));
    }
    ensure_branch(src, dst, branch)?;
    let alpha = to_f64(&src.alpha);
    let beta = to_f64(&dst.alpha);
    let v = dst.q.as_finite().map(to_f64);
    Ok(match branch {
        Branch::T1Strict => match v {
            Some(v) => ConstantInfo::explicit((beta / (beta - alpha)).powf(1.0 / v), "(beta/(beta-alpha))^(1/v)"),
            None => ConstantInfo::explicit(1.0, "1"),
        },
        Branch::T1Equal => match v {
            Some(v) => {
                let q = to_f64(src.q.as_finite().ok_or_else(|| {
                    Error::BranchMismatch("equal-weight branch with finite v needs finite q".into())
                })?);
                ConstantInfo::explicit((v / q).powf(1.0 / v), "(v/q)^(1/v)")
            }
            None => ConstantInfo::explicit(1.0, "1"),
        },
        Branch::T2Strict => {
            let (m, m_formula) = growth_constant(src)?;
            let exponent = 1.0 - src.p_f64() / dst.p_f64();
            let mpart = m.powf(exponent);
            match v {
                Some(v) => {
                    let gap: Rational = &dst.alpha - &src.alpha + dst.p.recip() - src.p.recip();
                    let value = mpart * (beta / to_f64(&gap)).powf(1.0 / v);
                    ConstantInfo::explicit(
                        value,
                        &format!("m^(1-p/u)*(beta/(beta-alpha+1/u-1/p))^(1/v), {m_formula}"),
                    )
                }
                None => ConstantInfo::explicit(mpart, &format!("m^(1-p/u), {m_formula}")),
            }
        }
        Branch::T2Equal => match v {
            Some(v) => {
                let q = to_f64(src.q.as_finite().ok_or_else(|| {
                    Error::BranchMismatch("equal-exponent branch with finite v needs finite q".into())
                })?);
                ConstantInfo::partial((beta * v / (alpha * q)).powf(1.0 / v), "C*(beta*v/(alpha*q))^(1/v)")
            }
            None => ConstantInfo::partial(1.0, "C"),
        },
        _ => unreachable!("inclusion branches handled above"),
    })
}

pub fn witness(src: &SpaceParams, dst: &SpaceParams, branch: Branch) -> Result<AnalyticFunction> {
    if branch.is_included() {
        return Err(Error::BranchMismatch(format!("{branch} is an inclusion branch; there is no witness")));
    }
    ensure_branch(src, dst, branch)?;
    let two = int(2);
    let f = match branch {
        Branch::T1FailAlpha => {
            // 2^{nβ}; for v = ∞ the sequence {1} is bounded, so move to the midpoint exponent
            let growth = if dst.q.is_infinite() { (&src.alpha + &dst.alpha) / &two } else { dst.alpha.clone() };
            AnalyticFunction::Lacunary(Lacunary::geometric(growth, Rational::zero()))
        }
        Branch::T1FailQ => {
            let v = dst.q.as_finite().ok_or_else(|| Error::BranchMismatch("q > v forces v < ∞".into()))?;
            AnalyticFunction::Lacunary(Lacunary::geometric(src.alpha.clone(), v.recip()))
        }
        Branch::T2FailStrict => {
            let b = dst.critical_exponent();
            let gamma = if dst.q.is_infinite() { (src.critical_exponent() + b) / &two } else { b };
            AnalyticFunction::power(gamma)
        }
        Branch::T2FailEqual => {
            let v = dst.q.as_finite().ok_or_else(|| Error::BranchMismatch("q > v forces v < ∞".into()))?;
            AnalyticFunction::log_power(src.critical_exponent(), v.recip())
        }
        _ => unreachable!("failure branches handled above"),
    };
    let in_src = known_membership(&f, src).verdict;
    let in_dst = known_membership(&f, dst).verdict;
    if in_src != Verdict::Member || in_dst != Verdict::NotMember {
        return Err(Error::BranchMismatch(format!(
            "witness {f} for {src} -> {dst} has memberships {in_src:?}/{in_dst:?}"
        )));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EntryStatus {
    Passed,
    Violated,
    Skipped { reason: String },
    Failed { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingEntry {
    pub function: String,
    pub src_norm: Option<NormResult>,
    pub dst_norm: Option<NormResult>,
    pub ratio: Option<f64>,
    #[serde(flatten)]
    pub status: EntryStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub src: SpaceParams,
    pub dst: SpaceParams,
    pub branch: Branch,
    pub constant: f64,
    pub tol: f64,
    pub entries: Vec<EmbeddingEntry>,
    pub max_ratio: Option<f64>,
}

impl EmbeddingReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.status == EntryStatus::Violated).count()
    }

    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.status, EntryStatus::Failed { .. })).count()
    }

    pub fn checked(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.status, EntryStatus::Passed | EntryStatus::Violated)).count()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

/// Checks `‖f‖_dst ≤ C ‖f‖_src (1 + 4 tol)` over a battery.
pub fn verify_embedding(
    src: &SpaceParams,
    dst: &SpaceParams,
    battery: &[AnalyticFunction],
    tol: f64,
) -> Result<EmbeddingReport> {
    verify_embedding_cached(src, dst, battery, tol, &NormCache::new())
}

pub fn verify_embedding_cached(
    src: &SpaceParams,
    dst: &SpaceParams,
    battery: &[AnalyticFunction],
    tol: f64,
    cache: &NormCache,
) -> Result<EmbeddingReport> {
    let verdict = decide_inclusion(src, dst)?;
    let constant = verdict
        .constant
        .as_ref()
        .and_then(|c| c.explicit_value())
        .ok_or_else(|| {
            Error::BranchMismatch(format!(
                "{src} -> {dst} ({}) has no explicit embedding constant",
                verdict.branch
            ))
        })?;
    let entries: Vec<EmbeddingEntry> = battery
        .par_iter()
        .map(|f| {
            let mut entry = EmbeddingEntry {
                function: f.label(),
                src_norm: None,
                dst_norm: None,
                ratio: None,
                status: EntryStatus::Passed,
            };
            let a = match cache.get(f, src, tol) {
                Ok(NormResult::Finite { value, err }) if value > 0.0 => {
                    entry.src_norm = Some(NormResult::Finite { value, err });
                    value
                }
                Ok(other) => {
                    entry.status = EntryStatus::Skipped { reason: format!("source norm {other:?}") };
                    entry.src_norm = Some(other);
                    return entry;
                }
                Err(e) => {
                    entry.status = EntryStatus::Skipped { reason: format!("source norm: {e}") };
                    return entry;
                }
            };
            match cache.get(f, dst, tol) {
                Ok(NormResult::Finite { value, err }) => {
                    let ratio = value / a;
                    entry.dst_norm = Some(NormResult::Finite { value, err });
                    entry.ratio = Some(ratio);
                    entry.status = if ratio <= constant * (1.0 + 4.0 * tol) {
                        EntryStatus::Passed
                    } else {
                        EntryStatus::Violated
                    };
                }
                Ok(NormResult::Divergent { gamma_hat }) => {
                    entry.dst_norm = Some(NormResult::Divergent { gamma_hat });
                    entry.status = EntryStatus::Violated;
                }
                Ok(other) => {
                    entry.status = EntryStatus::Failed { reason: format!("target norm {other:?}") };
                    entry.dst_norm = Some(other);
                }
                Err(e) => entry.status = EntryStatus::Failed { reason: format!("target norm: {e}") },
            }
            entry
        })
        .collect();
    let max_ratio = entries.iter().filter_map(|e| e.ratio).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    Ok(EmbeddingReport {
        src: src.clone(),
        dst: dst.clone(),
        branch: verdict.branch,
        constant,
        tol,
        entries,
        max_ratio,
    })
}

/// Numerical side of a non-inclusion: the witness has a finite source norm
/// and a target norm that is divergent or inconclusive with a fitted
/// exponent at or beyond the target weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub witness: String,
    pub src_norm: std::result::Result<NormResult, String>,
    pub dst_norm: std::result::Result<NormResult, String>,
    pub passed: bool,
}

pub fn check_witness_numerically(
    src: &SpaceParams,
    dst: &SpaceParams,
    witness: &AnalyticFunction,
    tol: f64,
    cache: &NormCache,
) -> WitnessCheck {
    let a = cache.get(witness, src, tol);
    let b = cache.get(witness, dst, tol);
    let beta = dst.alpha_f64();
    let src_ok = matches!(a, Ok(NormResult::Finite { .. }));
    let dst_ok = match &b {
        Ok(NormResult::Divergent { .. }) => true,
        Ok(NormResult::Inconclusive { gamma_hat, .. }) => *gamma_hat >= beta - BOUNDARY_SLACK,
        _ => false,
    };
    WitnessCheck {
        witness: witness.label(),
        src_norm: a.map_err(|e| e.to_string()),
        dst_norm: b.map_err(|e| e.to_string()),
        passed: src_ok && dst_ok,
    }
}

/// Distance of a witness from the critical case in the source space, as used
/// to decide which witnesses the numerical check applies to.
pub fn witness_source_margin(src: &SpaceParams, witness: &AnalyticFunction) -> Option<f64> {
    match witness {
        AnalyticFunction::Power { gamma } | AnalyticFunction::LogPower { gamma, .. } => {
            Some(to_f64(&(src.critical_exponent() - gamma)))
        }
        AnalyticFunction::Lacunary(l) => match &l.rule {
            crate::function::LacunaryRule::Geometric { log2_growth, .. } => Some(to_f64(&(&src.alpha - log2_growth))),
            crate::function::LacunaryRule::Custom(_) => None,
        },
        _ => None,
    }
}
