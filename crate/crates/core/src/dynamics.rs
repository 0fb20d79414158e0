//! Functional-graph analysis of a transition matrix: attractors, transient
//! periods and maximum invariant subsets.
//!
//! A logic matrix has out-degree one, so the full attractor structure falls
//! out of a single traversal instead of matrix powers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::network::AugmentedSystem;

/// Complete attractor decomposition of `ξ(t+1) = L ξ(t)`.
#[derive(Debug, Clone)]
pub struct AttractorReport {
    /// Cycles in traversal order, each rotated to start at its minimal
    /// δ-index. Fixed points are length-1 cycles.
    pub cycles: Vec<Vec<usize>>,
    /// τ_ξ per state, indexed by δ-index (entry 0 unused).
    pub per_state_transient: Vec<usize>,
    /// Cycle id per state (the cycle its trajectory ends in).
    pub cycle_of: Vec<usize>,
    /// Global transient period τ = max_ξ τ_ξ.
    pub tau: usize,
    /// λ = lcm of the cycle lengths.
    pub lambda: usize,
}

impl AttractorReport {
    pub fn is_on_cycle(&self, idx: usize) -> bool {
        self.per_state_transient[idx] == 0
    }

    /// All attractor states.
    pub fn attractor_states(&self) -> BTreeSet<usize> {
        self.cycles.iter().flatten().copied().collect()
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Attractor enumeration by visited-coloring with reverse-tail accumulation.
pub fn attractors(sys: &AugmentedSystem) -> AttractorReport {
    let n = sys.state_count();
    // 0 = unvisited, 1 = on current path, 2 = finished
    let mut color = vec![0u8; n + 1];
    let mut tail = vec![0usize; n + 1];
    let mut cycle_of = vec![usize::MAX; n + 1];
    let mut cycles: Vec<Vec<usize>> = Vec::new();

    let mut path = Vec::new();
    for start in 1..=n {
        if color[start] != 0 {
            continue;
        }
        path.clear();
        let mut u = start;
        while color[u] == 0 {
            color[u] = 1;
            path.push(u);
            u = sys.step(u);
        }
        if color[u] == 1 {
            // closed a new cycle inside the current path
            let pos = path.iter().position(|&v| v == u).expect("cycle head on path");
            let id = cycles.len();
            let mut cyc: Vec<usize> = path[pos..].to_vec();
            for &c in &cyc {
                color[c] = 2;
                tail[c] = 0;
                cycle_of[c] = id;
            }
            // deterministic output: rotate to the minimal δ-index
            let min_pos = cyc
                .iter()
                .enumerate()
                .min_by_key(|(_, &v)| v)
                .map(|(p, _)| p)
                .unwrap();
            cyc.rotate_left(min_pos);
            cycles.push(cyc);
            path.truncate(pos);
        }
        for &v in path.iter().rev() {
            let next = sys.step(v);
            tail[v] = tail[next] + 1;
            cycle_of[v] = cycle_of[next];
            color[v] = 2;
        }
    }

    let tau = tail[1..].iter().copied().max().unwrap_or(0);
    let lambda = cycles.iter().fold(1, |acc, c| lcm(acc, c.len()));
    AttractorReport { cycles, per_state_transient: tail, cycle_of, tau, lambda }
}

/// `Ω_Φ`: the union of the attractors of every state in `Φ`, computed by
/// walking each state to its cycle and collecting the whole cycle.
pub fn attractor_set_of(
    sys: &AugmentedSystem,
    report: &AttractorReport,
    phi: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>> {
    let n = sys.state_count();
    let mut out = BTreeSet::new();
    let mut seen = vec![false; report.cycles.len()];
    for &s in phi {
        if s < 1 || s > n {
            return Err(Error::IndexRange { index: s, max: n });
        }
        let id = report.cycle_of[s];
        if !seen[id] {
            seen[id] = true;
            out.extend(report.cycles[id].iter().copied());
        }
    }
    Ok(out)
}

/// Largest `I ⊆ S` with `image(I) ⊆ I`: iterate the prune of states whose
/// image escapes until a fixed point.
pub fn max_invariant_subset(sys: &AugmentedSystem, s: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let n = sys.state_count();
    let mut inv: BTreeSet<usize> = BTreeSet::new();
    for &i in s {
        if i < 1 || i > n {
            return Err(Error::IndexRange { index: i, max: n });
        }
        inv.insert(i);
    }
    loop {
        let removed: Vec<usize> =
            inv.iter().copied().filter(|&i| !inv.contains(&sys.step(i))).collect();
        if removed.is_empty() {
            break;
        }
        for i in removed {
            inv.remove(&i);
        }
    }
    Ok(inv)
}
