//! Pinning-control synthesis: pick the attractors that break
//! synchronization, rewire a minimal set of transition-matrix columns, derive
//! the pinned nodes, and solve for per-node feedback matrices.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{attractors, max_invariant_subset, AttractorReport};
use crate::error::{Error, Result};
use crate::network::{node_structure_from_l, AugmentedSystem};
use crate::stp::{khatri_rao, IndexVector, LogicMatrix};
use crate::sync::{check_global_sync, global_sast, masb, SyncStateSet};

/// Attractors with at least one state outside the synchronous set.
#[derive(Debug, Clone)]
pub struct PerturbTargets {
    pub omega0: Vec<Vec<usize>>,
}

/// How the rewiring stage picks redirect sources and targets.
#[derive(Debug, Clone)]
pub enum TargetPolicy {
    /// Source = minimal δ-index in the attractor; target = minimal δ-index
    /// among candidate fixed points, else minimal candidate.
    LowestIndex,
    /// Uniform choices from a seeded generator.
    Seeded(u64),
    /// Caller-supplied (source, target) pairs, one per attractor.
    Explicit(Vec<Redirect>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Redirect {
    pub source: usize,
    pub target: usize,
}

/// Feedback matrices for one pinned node.
#[derive(Debug, Clone)]
pub struct Feedback {
    /// K_i ∈ L_{k×k^{2n}}: per-state controller output.
    pub k_matrix: LogicMatrix,
    /// M_i ∈ L_{k×k²}: the coupling operation ⊙_{φ_i}.
    pub m_matrix: LogicMatrix,
}

#[derive(Debug, Clone)]
pub struct PinnedNode {
    /// Original node dynamics H_i.
    pub h: LogicMatrix,
    /// Perturbed node dynamics H̄_i.
    pub h_bar: LogicMatrix,
    pub feedback: Option<Feedback>,
}

#[derive(Debug, Clone)]
pub struct PinningPlan {
    pub k: usize,
    pub n: usize,
    pub l_bar: LogicMatrix,
    /// Pinned node positions in [1, 2n].
    pub pinned: BTreeSet<usize>,
    pub nodes: BTreeMap<usize, PinnedNode>,
    /// Column rewrites applied to L, in application order.
    pub redirects: Vec<Redirect>,
}

impl PinningPlan {
    /// Pinned x-system nodes.
    pub fn p1(&self) -> BTreeSet<usize> {
        self.pinned.iter().copied().filter(|&i| i <= self.n).collect()
    }

    /// Pinned z-system nodes, renumbered to [1, n].
    pub fn p2(&self) -> BTreeSet<usize> {
        self.pinned.iter().copied().filter(|&i| i > self.n).map(|i| i - self.n).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.pinned.is_empty()
    }
}

/// Attractors needing perturbation: Ξ^C ∘ Ξ₂ ≠ Ξ^C.
pub fn attractors_to_perturb(
    report: &AttractorReport,
    lambda: &SyncStateSet,
    state_count: usize,
) -> PerturbTargets {
    let xi2 = lambda.index_vector(state_count);
    let omega0 = report
        .cycles
        .iter()
        .filter(|cycle| {
            let xi = IndexVector {
                len: state_count,
                support: cycle.iter().copied().collect(),
            };
            xi.hadamard(&xi2) != xi
        })
        .cloned()
        .collect();
    PerturbTargets { omega0 }
}

fn pick_target(
    candidates: &BTreeSet<usize>,
    l_bar: &[usize],
    rng: &mut Option<ChaCha8Rng>,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::Infeasible("no redirect target available".into()));
    }
    let fixed: Vec<usize> =
        candidates.iter().copied().filter(|&t| l_bar[t - 1] == t).collect();
    let pool: Vec<usize> = if fixed.is_empty() {
        candidates.iter().copied().collect()
    } else {
        fixed
    };
    Ok(match rng {
        Some(r) => pool[r.gen_range(0..pool.len())],
        None => pool[0],
    })
}

fn pick_source(cycle: &[usize], rng: &mut Option<ChaCha8Rng>) -> usize {
    match rng {
        Some(r) => cycle[r.gen_range(0..cycle.len())],
        None => *cycle.iter().min().expect("nonempty cycle"),
    }
}

/// Rewire L into L̄ so every attractor ends up inside Λ, then read the pinned
/// node set off the digit projections.
pub fn perturb_transition(
    sys: &AugmentedSystem,
    lambda: &SyncStateSet,
    inv: &BTreeSet<usize>,
    masb_members: &BTreeSet<usize>,
    targets: &PerturbTargets,
    policy: &TargetPolicy,
) -> Result<PinningPlan> {
    let total = sys.state_count();
    if lambda.members.is_empty() {
        return Err(Error::Infeasible("synchronous state set is empty".into()));
    }
    let mut cols: Vec<usize> = sys.l.col_indices().to_vec();
    let mut redirects = Vec::new();
    let mut rng = match policy {
        TargetPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };

    let explicit = match policy {
        TargetPolicy::Explicit(list) => Some(list),
        _ => None,
    };
    let candidate_set: &BTreeSet<usize>;
    if masb_members.is_empty() {
        // make Λ invariant first, then aim redirects at Λ
        for &i in &lambda.members {
            if !lambda.members.contains(&cols[i - 1]) {
                let t = pick_target(&lambda.members, &cols, &mut rng)?;
                cols[i - 1] = t;
                redirects.push(Redirect { source: i, target: t });
            }
        }
        candidate_set = &lambda.members;
    } else {
        candidate_set = inv;
    }

    for cycle in &targets.omega0 {
        let (source, target) = match explicit {
            Some(list) => {
                let r = list
                    .iter()
                    .find(|r| cycle.contains(&r.source))
                    .ok_or_else(|| {
                        Error::Infeasible(format!(
                            "no explicit redirect covers the attractor starting at {}",
                            cycle[0]
                        ))
                    })?;
                if r.target < 1 || r.target > total {
                    return Err(Error::IndexRange { index: r.target, max: total });
                }
                (r.source, r.target)
            }
            None => {
                let s = pick_source(cycle, &mut rng);
                let t = pick_target(candidate_set, &cols, &mut rng)?;
                (s, t)
            }
        };
        cols[source - 1] = target;
        redirects.push(Redirect { source, target });
    }

    let l_bar = LogicMatrix::new(total, cols)?;
    let mut pinned = BTreeSet::new();
    let mut nodes = BTreeMap::new();
    for i in 1..=2 * sys.n {
        let h = node_structure_from_l(&sys.l, sys.k, sys.n, i)?;
        let h_bar = node_structure_from_l(&l_bar, sys.k, sys.n, i)?;
        if h != h_bar {
            pinned.insert(i);
            nodes.insert(i, PinnedNode { h, h_bar, feedback: None });
        }
    }
    Ok(PinningPlan { k: sys.k, n: sys.n, l_bar, pinned, nodes, redirects })
}

/// Per-node partition of column indices by (old value, new value) pairs.
#[derive(Debug, Clone)]
pub struct FeedbackSolveState {
    /// t_sets[(α, β)] = {l : h_l = α, h̄_l = β}, α/β in [1, k].
    pub t_sets: BTreeMap<(usize, usize), Vec<usize>>,
    /// For each σ, the nonempty (σ, β) groups in ascending β order.
    pub groups: BTreeMap<usize, Vec<usize>>,
}

pub fn feedback_solve_state(h: &LogicMatrix, h_bar: &LogicMatrix, k: usize) -> Result<FeedbackSolveState> {
    if h.rows() != k || h_bar.rows() != k || h.num_cols() != h_bar.num_cols() {
        return Err(Error::Dimension(format!(
            "node matrices must share shape {}×m, got {}×{} and {}×{}",
            k,
            h.rows(),
            h.num_cols(),
            h_bar.rows(),
            h_bar.num_cols()
        )));
    }
    let mut t_sets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for l in 1..=h.num_cols() {
        t_sets.entry((h.col(l), h_bar.col(l))).or_default().push(l);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(alpha, beta) in t_sets.keys() {
        groups.entry(alpha).or_default().push(beta);
    }
    Ok(FeedbackSolveState { t_sets, groups })
}

/// Solve `H̄ = M (K ∗ H)` column-wise for one node.
///
/// Within each σ the κ-th nonempty (σ, β) group (ascending β) gets w = κ;
/// m_{(w−1)k+h} = h̄; unconstrained entries of M default to 1.
pub fn solve_feedback(h: &LogicMatrix, h_bar: &LogicMatrix, k: usize) -> Result<Feedback> {
    let state = feedback_solve_state(h, h_bar, k)?;
    let cols = h.num_cols();
    let mut w = vec![0usize; cols + 1];
    let mut m = vec![1usize; k * k];
    for (&sigma, betas) in &state.groups {
        for (kappa, &beta) in betas.iter().enumerate() {
            let kappa = kappa + 1;
            for &l in &state.t_sets[&(sigma, beta)] {
                w[l] = kappa;
            }
            m[(kappa - 1) * k + sigma - 1] = beta;
        }
    }
    let k_matrix = LogicMatrix::new(k, w[1..].to_vec())?;
    let m_matrix = LogicMatrix::new(k, m)?;
    Ok(Feedback { k_matrix, m_matrix })
}

/// One Prop-2 violation: two columns in the same σ with equal w but
/// different required outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssignmentConflict {
    pub sigma: usize,
    pub l_mu: usize,
    pub l_nu: usize,
}

#[derive(Debug, Clone)]
pub struct AssignmentCheck {
    pub ok: bool,
    pub conflicts: Vec<AssignmentConflict>,
}

/// Does a caller-supplied K admit a consistent M?
pub fn validate_assignment(
    k_matrix: &LogicMatrix,
    h: &LogicMatrix,
    h_bar: &LogicMatrix,
    k: usize,
) -> Result<AssignmentCheck> {
    if k_matrix.rows() != k || k_matrix.num_cols() != h.num_cols() {
        return Err(Error::Dimension(format!(
            "K must be {}×{}, got {}×{}",
            k,
            h.num_cols(),
            k_matrix.rows(),
            k_matrix.num_cols()
        )));
    }
    feedback_solve_state(h, h_bar, k)?;
    let mut conflicts = Vec::new();
    // (w, h) must determine h̄ uniquely; remember the first witness column
    let mut seen: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for l in 1..=h.num_cols() {
        let key = (k_matrix.col(l), h.col(l));
        let beta = h_bar.col(l);
        match seen.get(&key) {
            Some(&(prev_beta, prev_l)) if prev_beta != beta => {
                conflicts.push(AssignmentConflict { sigma: h.col(l), l_mu: prev_l, l_nu: l });
            }
            Some(_) => {}
            None => {
                seen.insert(key, (beta, l));
            }
        }
    }
    Ok(AssignmentCheck { ok: conflicts.is_empty(), conflicts })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyReport {
    pub global_sync: bool,
    /// Post-pinning shortest synchronization time.
    pub gamma_time: Option<usize>,
    /// Transient period of the perturbed system.
    pub tau_bar: usize,
}

/// Rebuild L̄ from the per-node matrices, check it matches the plan, then
/// analyze the closed loop.
pub fn verify_plan(
    sys: &AugmentedSystem,
    plan: &PinningPlan,
    lambda: &SyncStateSet,
) -> Result<VerifyReport> {
    let mut acc: Option<LogicMatrix> = None;
    for i in 1..=2 * sys.n {
        let hi = match plan.nodes.get(&i) {
            Some(node) => {
                let fb = node.feedback.as_ref().ok_or_else(|| {
                    Error::Internal(format!("node {i} is pinned but has no feedback solved"))
                })?;
                let cols = (1..=node.h.num_cols())
                    .map(|l| {
                        let idx = (fb.k_matrix.col(l) - 1) * sys.k + node.h.col(l);
                        fb.m_matrix.col(idx)
                    })
                    .collect();
                LogicMatrix::new(sys.k, cols)?
            }
            None => node_structure_from_l(&sys.l, sys.k, sys.n, i)?,
        };
        acc = Some(match acc {
            None => hi,
            Some(prev) => khatri_rao(&prev, &hi)?,
        });
    }
    let rebuilt = acc.ok_or_else(|| Error::Internal("empty system".into()))?;
    if rebuilt != plan.l_bar {
        return Err(Error::Internal(
            "feedback matrices do not reconstruct the perturbed transition matrix".into(),
        ));
    }
    let bar_sys = AugmentedSystem { k: sys.k, n: sys.n, l: plan.l_bar.clone() };
    let report = attractors(&bar_sys);
    let global = check_global_sync(&report, lambda);
    let gamma_time = if global {
        Some(global_sast(&bar_sys, &report, lambda)?.gamma_time)
    } else {
        None
    };
    Ok(VerifyReport { global_sync: global, gamma_time, tau_bar: report.tau })
}

/// Full synthesis pipeline: targets → rewiring → feedback solve.
pub fn synthesize(
    sys: &AugmentedSystem,
    lambda: &SyncStateSet,
    policy: &TargetPolicy,
) -> Result<PinningPlan> {
    let report = attractors(sys);
    let inv = max_invariant_subset(sys, &lambda.members)?;
    let basin = masb(sys, &report, lambda);
    let targets = attractors_to_perturb(&report, lambda, sys.state_count());
    let mut plan =
        perturb_transition(sys, lambda, &inv, &basin.members, &targets, policy)?;
    for node in plan.nodes.values_mut() {
        node.feedback = Some(solve_feedback(&node.h, &node.h_bar, sys.k)?);
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sync::{sync_state_set, SyncSpec};

    fn sys_from(cols: Vec<usize>, k: usize, n: usize) -> AugmentedSystem {
        let rows = cols.len();
        AugmentedSystem { k, n, l: LogicMatrix::new(rows, cols).unwrap() }
    }

    #[test]
    fn targets_are_cycles_leaving_lambda() {
        // fixed points 1 (diagonal) and 6 (off-diagonal), γ = 0
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let report = attractors(&sys);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let t = attractors_to_perturb(&report, &lambda, 9);
        assert_eq!(t.omega0, vec![vec![6]]);
    }

    #[test]
    fn no_targets_when_all_attractors_synchronize() {
        let sys = sys_from(vec![1, 1, 1, 1, 1, 1, 1, 1, 1], 3, 1);
        let report = attractors(&sys);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        assert!(attractors_to_perturb(&report, &lambda, 9).omega0.is_empty());
    }

    #[test]
    fn empty_targets_leave_l_unchanged() {
        let sys = sys_from(vec![1, 1, 1, 1, 1, 1, 1, 1, 1], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
        assert_eq!(plan.l_bar, sys.l);
        assert!(plan.is_empty());
        assert!(verify_plan(&sys, &plan, &lambda).unwrap().global_sync);
    }

    #[test]
    fn lowest_index_policy_redirects_into_invariant_subset() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
        assert_eq!(plan.redirects, vec![Redirect { source: 6, target: 1 }]);
        let rep = verify_plan(&sys, &plan, &lambda).unwrap();
        assert!(rep.global_sync);
        assert!(rep.gamma_time.is_some());
    }

    #[test]
    fn empty_masb_case_makes_lambda_invariant() {
        // every diagonal state escapes: 1→2, 5→6, 9→8; single cycle 2→3→2
        let sys = sys_from(vec![2, 3, 2, 3, 6, 3, 3, 3, 8], 3, 1);
        let report = attractors(&sys);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let inv = max_invariant_subset(&sys, &lambda.members).unwrap();
        assert!(inv.is_empty());
        let basin = masb(&sys, &report, &lambda);
        assert!(basin.members.is_empty());
        let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
        for &i in &lambda.members {
            assert!(lambda.members.contains(&plan.l_bar.col(i)));
        }
        assert!(verify_plan(&sys, &plan, &lambda).unwrap().global_sync);
    }

    #[test]
    fn seeded_policy_is_reproducible_and_sound() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let a = synthesize(&sys, &lambda, &TargetPolicy::Seeded(7)).unwrap();
        let b = synthesize(&sys, &lambda, &TargetPolicy::Seeded(7)).unwrap();
        assert_eq!(a.redirects, b.redirects);
        assert!(verify_plan(&sys, &a, &lambda).unwrap().global_sync);
    }

    #[test]
    fn explicit_policy_uses_given_pair() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let policy = TargetPolicy::Explicit(vec![Redirect { source: 6, target: 5 }]);
        let plan = synthesize(&sys, &lambda, &policy).unwrap();
        assert_eq!(plan.l_bar.col(6), 5);
        // 5 → 6 → 5 forms a cycle partly outside Λ′, so this plan fails
        assert!(!verify_plan(&sys, &plan, &lambda).unwrap().global_sync);
    }

    #[test]
    fn explicit_policy_missing_attractor_errors() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let policy = TargetPolicy::Explicit(vec![Redirect { source: 4, target: 1 }]);
        assert!(matches!(
            synthesize(&sys, &lambda, &policy),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn solve_feedback_satisfies_column_equation() {
        let h = LogicMatrix::new(3, vec![1, 2, 3, 1, 2, 3, 1, 2, 3]).unwrap();
        let h_bar = LogicMatrix::new(3, vec![1, 2, 3, 2, 2, 3, 1, 1, 3]).unwrap();
        let fb = solve_feedback(&h, &h_bar, 3).unwrap();
        for l in 1..=9 {
            let idx = (fb.k_matrix.col(l) - 1) * 3 + h.col(l);
            assert_eq!(fb.m_matrix.col(idx), h_bar.col(l), "column {l}");
        }
        assert!(validate_assignment(&fb.k_matrix, &h, &h_bar, 3).unwrap().ok);
    }

    #[test]
    fn solve_feedback_identity_perturbation() {
        let h = LogicMatrix::new(2, vec![1, 2, 2, 1]).unwrap();
        let fb = solve_feedback(&h, &h, 2).unwrap();
        for l in 1..=4 {
            let idx = (fb.k_matrix.col(l) - 1) * 2 + h.col(l);
            assert_eq!(fb.m_matrix.col(idx), h.col(l));
        }
    }

    #[test]
    fn validate_assignment_detects_contradiction() {
        let h = LogicMatrix::new(2, vec![1, 1]).unwrap();
        let h_bar = LogicMatrix::new(2, vec![1, 2]).unwrap();
        let k_matrix = LogicMatrix::new(2, vec![1, 1]).unwrap();
        let check = validate_assignment(&k_matrix, &h, &h_bar, 2).unwrap();
        assert!(!check.ok);
        assert_eq!(
            check.conflicts,
            vec![AssignmentConflict { sigma: 1, l_mu: 1, l_nu: 2 }]
        );
        // distinct w values fix it
        let k_matrix = LogicMatrix::new(2, vec![1, 2]).unwrap();
        assert!(validate_assignment(&k_matrix, &h, &h_bar, 2).unwrap().ok);
    }

    #[test]
    fn validate_accepts_any_k_when_groups_singleton() {
        // every σ has one β: H̄ = H up to a per-σ constant shift
        let h = LogicMatrix::new(2, vec![1, 2, 1, 2]).unwrap();
        let h_bar = LogicMatrix::new(2, vec![2, 1, 2, 1]).unwrap();
        for cols in [[1, 1, 1, 1], [2, 1, 2, 1], [1, 2, 2, 1]] {
            let k_matrix = LogicMatrix::new(2, cols.to_vec()).unwrap();
            assert!(validate_assignment(&k_matrix, &h, &h_bar, 2).unwrap().ok);
        }
    }

    #[test]
    fn t_sets_partition_and_group_bound() {
        let h = LogicMatrix::new(3, vec![1, 2, 3, 1, 2, 3, 1, 2, 3]).unwrap();
        let h_bar = LogicMatrix::new(3, vec![3, 2, 1, 2, 2, 3, 1, 1, 3]).unwrap();
        let state = feedback_solve_state(&h, &h_bar, 3).unwrap();
        let mut seen = BTreeSet::new();
        for ls in state.t_sets.values() {
            for &l in ls {
                assert!(seen.insert(l), "column {l} in two T-sets");
            }
        }
        assert_eq!(seen.len(), 9);
        for betas in state.groups.values() {
            assert!(betas.len() <= 3);
            assert!(betas.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn verify_plan_rejects_corrupted_m() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let mut plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
        let node = plan.nodes.values_mut().next().unwrap();
        let fb = node.feedback.as_mut().unwrap();
        let mut cols = fb.m_matrix.col_indices().to_vec();
        cols[0] = cols[0] % 3 + 1;
        cols[4] = cols[4] % 3 + 1;
        fb.m_matrix = LogicMatrix::new(3, cols).unwrap();
        assert!(matches!(
            verify_plan(&sys, &plan, &lambda),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn pinned_set_matches_digit_differences() {
        let sys = sys_from(vec![1, 1, 1, 6, 6, 6, 1, 1, 6], 3, 1);
        let lambda = sync_state_set(SyncSpec::new(3, 1, 0).unwrap()).unwrap();
        let plan = synthesize(&sys, &lambda, &TargetPolicy::LowestIndex).unwrap();
        for i in 1..=2 {
            let h = node_structure_from_l(&sys.l, 3, 1, i).unwrap();
            let h_bar = node_structure_from_l(&plan.l_bar, 3, 1, i).unwrap();
            assert_eq!(plan.pinned.contains(&i), h != h_bar);
        }
    }
}
