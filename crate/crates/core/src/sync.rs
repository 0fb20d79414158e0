//! Synchronization analysis: tolerance-γ synchronous state sets, local and
//! global synchronization tests, the maximum synchronization basin, and
//! shortest synchronization times.

use std::collections::BTreeSet;

use crate::dynamics::{attractor_set_of, attractors, max_invariant_subset, AttractorReport};
use crate::error::{Error, Result};
use crate::network::{decode_levels, AugmentedSystem};
use crate::stp::IndexVector;

/// Tolerance spec: paired node levels may differ by at most `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncSpec {
    pub k: usize,
    pub n: usize,
    pub gamma: usize,
}

impl SyncSpec {
    pub fn new(k: usize, n: usize, gamma: usize) -> Result<Self> {
        if gamma > k - 1 {
            return Err(Error::GammaRange { gamma, max: k - 1 });
        }
        Ok(Self { k, n, gamma })
    }

    /// γ ≥ 1 at k = 2 puts every state in the set; worth a warning upstream.
    pub fn is_degenerate(&self) -> bool {
        self.k == 2 && self.gamma >= 1
    }
}

#[derive(Debug, Clone)]
pub struct SyncStateSet {
    pub spec: SyncSpec,
    pub members: BTreeSet<usize>,
}

impl SyncStateSet {
    pub fn contains(&self, idx: usize) -> bool {
        self.members.contains(&idx)
    }

    pub fn index_vector(&self, state_count: usize) -> IndexVector {
        IndexVector { len: state_count, support: self.members.clone() }
    }
}

/// A set Φ of initial composite states.
#[derive(Debug, Clone)]
pub struct Basin {
    pub members: BTreeSet<usize>,
    /// Set when this is the maximum basin for its sync set.
    pub max: bool,
}

impl Basin {
    pub fn of(members: impl IntoIterator<Item = usize>) -> Self {
        Basin { members: members.into_iter().collect(), max: false }
    }
}

/// Enumerate the synchronous state set by the digit-pair filter.
pub fn sync_state_set(spec: SyncSpec) -> Result<SyncStateSet> {
    let SyncSpec { k, n, gamma } = spec;
    let total = k.pow(2 * n as u32);
    let mut members = BTreeSet::new();
    for idx in 1..=total {
        let levels = decode_levels(idx, k, 2 * n)?;
        let ok = (0..n).all(|l| levels[l].abs_diff(levels[n + l]) <= gamma);
        if ok {
            members.insert(idx);
        }
    }
    Ok(SyncStateSet { spec, members })
}

/// Closed form for |Λ| at γ = 1: Σ_l C(n,l)·3^l·(k−2)^l·2^{2(n−l)} = (3k−2)^n.
pub fn sync_cardinality(k: usize, n: usize) -> usize {
    let mut binom = 1usize;
    let mut total = 0usize;
    for l in 0..=n {
        total += binom * 3usize.pow(l as u32) * (k - 2).pow(l as u32)
            * 4usize.pow((n - l) as u32);
        binom = binom * (n - l) / (l + 1);
    }
    debug_assert_eq!(total, (3 * k - 2).pow(n as u32));
    total
}

/// Local synchronization w.r.t. Φ: every attractor reachable from Φ lies
/// inside Λ.
pub fn check_local_sync(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    phi: &Basin,
    lambda: &SyncStateSet,
) -> Result<bool> {
    let omega = attractor_set_of(sys, report, &phi.members)?;
    Ok(omega.is_subset(&lambda.members))
}

/// Global synchronization: every attractor state lies inside Λ.
pub fn check_global_sync(report: &AttractorReport, lambda: &SyncStateSet) -> bool {
    report.attractor_states().is_subset(&lambda.members)
}

/// Same criterion through index-vector arithmetic: sgn(L^τ·1) ≤ Ξ₂ becomes
/// "the τ-step image of the full space is ≤ the Λ indicator".
pub fn check_global_sync_index_form(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    lambda: &SyncStateSet,
) -> bool {
    let total = sys.state_count();
    let mut image: BTreeSet<usize> = (1..=total).collect();
    for _ in 0..report.tau {
        image = image.iter().map(|&i| sys.step(i)).collect();
    }
    IndexVector { len: total, support: image }.le(&lambda.index_vector(total))
}

/// Local criterion through index vectors, summed over one cycle period.
pub fn check_local_sync_index_form(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    phi: &Basin,
    lambda: &SyncStateSet,
) -> Result<bool> {
    let total = sys.state_count();
    for &i in &phi.members {
        if i < 1 || i > total {
            return Err(Error::IndexRange { index: i, max: total });
        }
    }
    let mut image = phi.members.clone();
    for _ in 0..report.tau {
        image = image.iter().map(|&i| sys.step(i)).collect();
    }
    let mut union = BTreeSet::new();
    for _ in 0..report.lambda.max(1) {
        union.extend(image.iter().copied());
        image = image.iter().map(|&i| sys.step(i)).collect();
    }
    Ok(IndexVector { len: total, support: union }.le(&lambda.index_vector(total)))
}

/// Maximum synchronization basin: all states whose attractor lies in Λ.
pub fn masb(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    lambda: &SyncStateSet,
) -> Basin {
    let good_cycle: Vec<bool> = report
        .cycles
        .iter()
        .map(|c| c.iter().all(|s| lambda.contains(*s)))
        .collect();
    let members = (1..=sys.state_count())
        .filter(|&i| good_cycle[report.cycle_of[i]])
        .collect();
    Basin { members, max: true }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SastResult {
    /// Γ: smallest t ≥ 1 with the t-step image of Φ inside the maximum
    /// invariant subset of Λ.
    pub gamma_time: usize,
    /// Φ was already inside the invariant subset before the first step.
    pub already_at_zero: bool,
}

/// Shortest synchronization time for a basin Φ.
pub fn sast(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    phi: &Basin,
    lambda: &SyncStateSet,
) -> Result<SastResult> {
    if !check_local_sync(sys, report, phi, lambda)? {
        return Err(Error::NotSynchronous);
    }
    let inv = max_invariant_subset(sys, &lambda.members)?;
    let already_at_zero = phi.members.is_subset(&inv);
    let tau_phi = phi
        .members
        .iter()
        .map(|&i| report.per_state_transient[i])
        .max()
        .unwrap_or(0);
    let mut image = phi.members.clone();
    for t in 1..=tau_phi.max(1) {
        image = image.iter().map(|&i| sys.step(i)).collect();
        if image.is_subset(&inv) {
            return Ok(SastResult { gamma_time: t, already_at_zero });
        }
    }
    Err(Error::Internal(
        "image of a synchronizing basin failed to enter the invariant subset".into(),
    ))
}

/// Shortest synchronization time over the whole state space.
pub fn global_sast(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    lambda: &SyncStateSet,
) -> Result<SastResult> {
    if !check_global_sync(report, lambda) {
        return Err(Error::NotSynchronous);
    }
    let phi = Basin::of(1..=sys.state_count());
    sast(sys, report, &phi, lambda)
}

/// Convenience bundle used by both the CLI and the pinning verifier.
pub fn analyze(sys: &AugmentedSystem, spec: SyncSpec) -> Result<Analysis> {
    let lambda = sync_state_set(spec)?;
    let report = attractors(sys);
    let global = check_global_sync(&report, &lambda);
    let basin = masb(sys, &report, &lambda);
    let global_time = if global { Some(global_sast(sys, &report, &lambda)?) } else { None };
    Ok(Analysis { spec, lambda, report, global_sync: global, masb: basin, global_time })
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: SyncSpec,
    pub lambda: SyncStateSet,
    pub report: AttractorReport,
    pub global_sync: bool,
    pub masb: Basin,
    pub global_time: Option<SastResult>,
}
