//! Membership verdicts for the first and second Bernstein classes.
//!
//! Membership is a tail property, so a finite scan can only produce
//! evidence. A verdict therefore carries two parts: the literal scan over
//! `n ≤ N` (witnesses or partial sums) and, when the error sequence has a
//! closed-form tail and the rate a certificate, an exact decision.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::error_seq::{dominated_by, Decay, ErrorSeq, TailRule, WitnessRecord};
use crate::rates::{sigma, Limit, RateFn, Role};
use crate::wiener::{wiener_en, WienerElement};
use crate::DEFAULT_HORIZON;

/// Witness indices kept in a record.
const KEEP_WITNESSES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", content = "rate", rename_all = "lowercase"))]
pub enum ClassSpec {
    /// `liminf (E_n)^{φ(n)} < 1`
    Second(RateFn),
    /// `∑ κ(n)·ln E_n = −∞`
    First(RateFn),
}

impl ClassSpec {
    pub fn second(phi: RateFn) -> Result<Self> {
        if phi.role() != Role::Scale {
            return invalid("second class needs a scale function");
        }
        Ok(ClassSpec::Second(phi))
    }

    pub fn first(kappa: RateFn) -> Result<Self> {
        if kappa.role() != Role::Weight {
            return invalid("first class needs a weight function");
        }
        Ok(ClassSpec::First(kappa))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ClassConfig {
    /// Margin: a second-class witness needs `(E_n)^{φ(n)} ≤ rho`.
    pub rho: f64,
    /// Witnesses required for `InWitnessed`.
    pub witnesses: usize,
    pub horizon: u64,
}

impl Default for ClassConfig {
    fn default() -> Self {
        ClassConfig { rho: 0.5, witnesses: 3, horizon: DEFAULT_HORIZON }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum VerdictStatus {
    InWitnessed,
    DivergenceCertified,
    ConsistentWithNonMembership,
    Inconclusive,
}

/// Decision from closed forms.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ExactVerdict {
    pub member: bool,
    /// `liminf (E_n)^{φ(n)}` for second-class decisions.
    pub liminf: Option<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MembershipVerdict {
    pub status: VerdictStatus,
    pub witness: Option<WitnessRecord>,
    pub rho: Option<f64>,
    /// `S_N = ∑_{n ≤ N} κ(n)·ln E_n` for first-class scans.
    pub partial_sum: Option<f64>,
    /// Largest index actually scanned.
    pub horizon: u64,
    pub exact: Option<ExactVerdict>,
}

impl MembershipVerdict {
    /// Exact membership when decided, else whether the scan found evidence.
    pub fn is_member(&self) -> Option<bool> {
        self.exact.as_ref().map(|e| e.member)
    }
}

pub fn classify(e: &ErrorSeq, spec: &ClassSpec, config: &ClassConfig) -> MembershipVerdict {
    match spec {
        ClassSpec::Second(phi) => second_class_verdict(e, phi, config),
        ClassSpec::First(kappa) => first_class_verdict(e, kappa, config),
    }
}

fn scan_limit(e: &ErrorSeq, horizon: u64) -> (u64, bool) {
    match e.known_up_to() {
        Some(len) if len < horizon => (len, true),
        _ => (horizon, false),
    }
}

fn exact_second(e: &ErrorSeq, phi: &RateFn) -> Option<ExactVerdict> {
    let from_limit = |l: Limit, reason: String| {
        let (member, liminf) = match l {
            Limit::Zero => (false, 1.0),
            Limit::Positive(c) => (true, libm::exp(-c)),
            Limit::Infinite => (true, 0.0),
        };
        ExactVerdict { member, liminf: Some(liminf), reason }
    };
    match e.decay() {
        Decay::Vanishing => Some(ExactVerdict { member: true, liminf: Some(0.0), reason: "E vanishes eventually".into() }),
        Decay::Exact(d) => {
            let a = phi.asymptote()?;
            Some(from_limit(a.mul(&d).limit(), "lim φ(n)·(−ln E_n) from certificates".into()))
        }
        Decay::StepEnvelope { envelope, .. } => {
            // On a block λ is constant and φ decreases, so the limsup of
            // φ·λ is attained at the block starts, where λ meets the envelope.
            let a = phi.asymptote()?;
            Some(from_limit(a.mul(&envelope).limit(), "limsup of φ(n_i)·(−ln E_{n_i}) along the step starts".into()))
        }
        Decay::Profile => {
            let TailRule::Profile(p) = e.tail()? else { return None };
            // φ·λ = φ/(hΣκ) → 0 when φ ≤ C·Σκ, since h → ∞.
            dominated_by(phi, &p.phi).then(|| ExactVerdict {
                member: false,
                liminf: Some(1.0),
                reason: "φ ≤ C·Σ(κ) and h → ∞ give (E_n)^{φ(n)} → 1".into(),
            })
        }
        Decay::Unknown => None,
    }
}

/// Second-class verdict: witnesses are the indices `n ≤ N` with
/// `(E_n)^{φ(n)} ≤ ρ`.
pub fn second_class_verdict(e: &ErrorSeq, phi: &RateFn, config: &ClassConfig) -> MembershipVerdict {
    let (limit, truncated) = scan_limit(e, config.horizon);
    let ln_rho = libm::log(config.rho);
    let mut w = WitnessRecord::new("(E_n)^{φ(n)} ≤ ρ");
    for n in 1..=limit {
        let lam = e.neg_ln(n);
        let lv = if lam == f64::INFINITY { f64::NEG_INFINITY } else { -phi.eval(n) * lam };
        if lv <= ln_rho {
            w.push(n, libm::exp(lv), KEEP_WITNESSES);
        }
    }
    let exact = exact_second(e, phi);
    let status = if w.total as usize >= config.witnesses {
        VerdictStatus::InWitnessed
    } else if truncated && exact.is_none() {
        VerdictStatus::Inconclusive
    } else {
        VerdictStatus::ConsistentWithNonMembership
    };
    MembershipVerdict { status, witness: Some(w), rho: Some(config.rho), partial_sum: None, horizon: limit, exact }
}

fn exact_first(e: &ErrorSeq, kappa: &RateFn) -> Option<ExactVerdict> {
    let verdict = |member: bool, reason: &str| ExactVerdict { member, liminf: None, reason: reason.into() };
    match e.decay() {
        Decay::Vanishing => Some(verdict(true, "E vanishes eventually")),
        Decay::Exact(d) => {
            let a = kappa.asymptote()?;
            let summable = a.mul(&d).summable();
            Some(verdict(!summable, "summability of κ(n)·(−ln E_n) from certificates"))
        }
        Decay::StepEnvelope { envelope, regular } => {
            let a = kappa.asymptote()?;
            if a.mul(&envelope).summable() {
                // −ln E_n ≤ envelope(n) everywhere.
                Some(verdict(false, "κ·envelope is summable and bounds κ(n)·(−ln E_n)"))
            } else if regular {
                Some(verdict(true, "κ·envelope diverges and the envelope is comparable across blocks"))
            } else {
                None
            }
        }
        Decay::Profile | Decay::Unknown => None,
    }
}

/// First-class verdict from `S_N = ∑_{n ≤ N} κ(n)·ln E_n`. Witness indices
/// are the first `n` with `S_n < −k` for `k = 1, 2, …`.
pub fn first_class_verdict(e: &ErrorSeq, kappa: &RateFn, config: &ClassConfig) -> MembershipVerdict {
    let (limit, truncated) = scan_limit(e, config.horizon);
    let mut w = WitnessRecord::new("∑_{m ≤ n} κ(m)·ln E_m < −k");
    let mut s = 0.0f64;
    let mut next_level = 1.0f64;
    let mut vanished = None;
    let mut scanned = limit;
    for n in 1..=limit {
        let lam = e.neg_ln(n);
        if lam == f64::INFINITY {
            vanished = Some(n);
            s = f64::NEG_INFINITY;
            scanned = n;
            break;
        }
        s -= kappa.eval(n) * lam;
        while s < -next_level {
            w.push(n, s, KEEP_WITNESSES);
            next_level += 1.0;
        }
    }
    let mut exact = exact_first(e, kappa);
    if let Some(n) = vanished {
        exact = Some(ExactVerdict { member: true, liminf: None, reason: format!("E_{n} = 0, so the product vanishes") });
    }
    let block_bounds = match e.tail() {
        Some(TailRule::Profile(p)) if &p.kappa == kappa && !p.blocks.is_empty() => {
            // Every realized block end must show S_{N_k} < −k.
            let mut ok = true;
            let mut acc = 0.0;
            let mut k = 0.0;
            for b in &p.blocks {
                if b.end > limit {
                    ok = false;
                    break;
                }
                acc += b.block_sum;
                k += 1.0;
                ok &= acc > k && w.indices.iter().zip(&w.margins).any(|(&i, &m)| i <= b.end && m < -k);
            }
            ok
        }
        _ => false,
    };
    let status = match &exact {
        Some(x) if x.member => VerdictStatus::DivergenceCertified,
        _ if block_bounds => VerdictStatus::DivergenceCertified,
        Some(_) => VerdictStatus::ConsistentWithNonMembership,
        None if truncated => VerdictStatus::Inconclusive,
        None => VerdictStatus::Inconclusive,
    };
    MembershipVerdict { status, witness: Some(w), rho: None, partial_sum: Some(s), horizon: scanned, exact }
}

/// Both verdicts for `φ = Σ(κ)`, checked against `𝔅_{Σ(κ)} ⊂ 𝔅*_κ`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EmbeddingReport {
    pub second: MembershipVerdict,
    pub first: MembershipVerdict,
    /// Second-class exact membership implies certified first-class divergence.
    pub implication_holds: bool,
    /// First-class member with an exact second-class non-membership.
    pub strict_witness: bool,
}

pub fn check_sigma_embedding(kappa: &RateFn, e: &ErrorSeq, config: &ClassConfig) -> Result<EmbeddingReport> {
    let phi = sigma(kappa)?;
    let second = second_class_verdict(e, &phi, config);
    let first = first_class_verdict(e, kappa, config);
    let first_member = first.status == VerdictStatus::DivergenceCertified;
    let implication_holds = second.is_member() != Some(true) || first_member;
    let strict_witness = first_member && second.is_member() == Some(false);
    Ok(EmbeddingReport { second, first, implication_holds, strict_witness })
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SplitConfig {
    pub rho: f64,
    /// Verified boundaries requested (split evenly between the parts).
    pub boundaries: usize,
    pub horizon: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { rho: 0.5, boundaries: 20, horizon: DEFAULT_HORIZON }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SplitBoundary {
    pub n: u64,
    /// Part (1 or 2) whose error is bounded at `n`.
    pub part: u8,
    /// `E_n(part)`, an exact tail sum.
    pub error: f64,
    /// `ln ρ / φ(n)`, the log of the bound `ρ^{1/φ(n)}`.
    pub ln_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SplitReport {
    pub f1: WienerElement,
    pub f2: WienerElement,
    /// Block edges `N_1 < N_2 < …`; block `j` is `N_j < |n| ≤ N_{j+1}`.
    pub edges: Vec<u64>,
    pub boundaries: Vec<SplitBoundary>,
    pub finite_support: bool,
}

impl SplitReport {
    pub fn verified(&self, part: u8) -> usize {
        self.boundaries.iter().filter(|b| b.part == part && b.holds).count()
    }
}

/// Minimal `N > from` with `ln E_N(f) ≤ ln_bound`.
fn first_below(f: &WienerElement, from: u64, ln_bound: f64, horizon: u64) -> Result<Option<u64>> {
    let below = |n: u64| -> Result<bool> { Ok(libm::log(wiener_en(f, n)?) <= ln_bound) };
    let mut lo = from;
    let mut step = 1u64;
    let hi = loop {
        let cand = from.saturating_add(step);
        if cand > horizon {
            if below(horizon)? && horizon > from {
                break horizon;
            }
            return Ok(None);
        }
        if below(cand)? {
            break cand;
        }
        lo = cand;
        step = step.saturating_mul(2);
    };
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Splits `f = f1 + f2` into alternating frequency blocks so that both parts
/// pass the second-class test for `φ` with margin `ρ` at every other edge.
///
/// With edges `N_1 = 1 < N_2 < …`, block `j` (frequencies `N_j < |n| ≤
/// N_{j+1}`, block 0 being `|n| ≤ N_1`) goes to `f1` for even `j` and to
/// `f2` for odd `j`; the remainder beyond the last edge goes to the next
/// owner. `N_{j+1}` is the least `N > N_j` with `E_N(f) ≤ ρ^{1/φ(N_j)}`,
/// which bounds the error of the part not owning block `j` at `n = N_j`.
pub fn markushevich_split(f: &WienerElement, phi: &RateFn, config: &SplitConfig) -> Result<SplitReport> {
    if phi.role() != Role::Scale {
        return invalid("split needs a scale function");
    }
    if !(config.rho > 0.0 && config.rho < 1.0) {
        return invalid("rho must lie in (0, 1)");
    }
    if f.is_finitely_supported() {
        return Ok(SplitReport {
            f1: f.clone(),
            f2: WienerElement::zero(f.dim(), f.norm_kind()),
            edges: Vec::new(),
            boundaries: Vec::new(),
            finite_support: true,
        });
    }
    let ln_rho = libm::log(config.rho);
    let mut edges = alloc::vec![1u64];
    while edges.len() <= config.boundaries {
        let nj = *edges.last().unwrap();
        if wiener_en(f, nj)? == 0.0 {
            break;
        }
        let ln_bound = ln_rho / phi.eval(nj);
        match first_below(f, nj, ln_bound, config.horizon)? {
            Some(n) => edges.push(n),
            None => {
                return Err(Error::HorizonExhausted {
                    horizon: config.horizon,
                    achieved: edges.len() - 1,
                    detail: format!("no edge after N={nj} within the horizon"),
                })
            }
        }
    }
    let last = *edges.last().unwrap();
    let owner_of = |a: u64| -> usize {
        // index of the block containing |n| = a
        let j = edges.partition_point(|&e| e < a);
        j % 2
    };
    let mut parts = [
        WienerElement::zero(f.dim(), f.norm_kind()),
        WienerElement::zero(f.dim(), f.norm_kind()),
    ];
    let assign = |n: i64, v: Vec<f64>, parts: &mut [WienerElement; 2]| -> Result<()> {
        parts[owner_of(n.unsigned_abs())].set(n, v)
    };
    let sparse: BTreeMap<i64, Vec<f64>> = f.coefficients().clone();
    for (n, v) in sparse {
        assign(n, v, &mut parts)?;
    }
    if let Some(t) = f.tail() {
        for a in t.start()..=last {
            for n in [a as i64, -(a as i64)] {
                let v = f.coefficient(n);
                if v.iter().any(|x| *x != 0.0) {
                    assign(n, v, &mut parts)?;
                }
            }
        }
        parts[owner_of(last + 1)].set_tail(t.restricted_from(last + 1))?;
    }
    let mut boundaries = Vec::new();
    for (j, &n) in edges.iter().enumerate().take(edges.len() - 1) {
        // edges[j] closes block j; its owner has no frequencies in block j + 1.
        let p = j % 2;
        let err = wiener_en(&parts[p], n)?;
        let ln_bound = ln_rho / phi.eval(n);
        boundaries.push(SplitBoundary {
            n,
            part: p as u8 + 1,
            error: err,
            ln_bound,
            holds: libm::log(err) <= ln_bound,
        });
    }
    let [f1, f2] = parts;
    Ok(SplitReport { f1, f2, edges, boundaries, finite_support: false })
}

/// Checks `f1 + f2 = f` coefficientwise with disjoint supports over
/// `|n| ≤ up_to`, and that any tail is `f`'s own tail restricted.
pub fn split_identity_holds(f: &WienerElement, f1: &WienerElement, f2: &WienerElement, up_to: u64) -> bool {
    let up_to = up_to as i64;
    for n in -up_to..=up_to {
        let (a, b, c) = (f1.coefficient(n), f2.coefficient(n), f.coefficient(n));
        let a_zero = a.iter().all(|x| *x == 0.0);
        let b_zero = b.iter().all(|x| *x == 0.0);
        if !a_zero && !b_zero {
            return false;
        }
        if a.iter().zip(&b).zip(&c).any(|((x, y), z)| x + y != *z) {
            return false;
        }
    }
    match (f.tail(), f1.tail(), f2.tail()) {
        (None, None, None) => true,
        (Some(t), Some(s), None) | (Some(t), None, Some(s)) => *s == t.restricted_from(s.start()),
        _ => false,
    }
}
