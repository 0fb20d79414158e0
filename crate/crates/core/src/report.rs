//! JSON analysis reports and CSV trajectory output.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::network::CompositeState;
use crate::pinning::{PinningPlan, VerifyReport};
use crate::stp::LogicMatrix;
use crate::sync::Analysis;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AttractorSummary {
    pub cycles: Vec<Vec<usize>>,
    pub tau: usize,
    pub lambda: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PinnedNodeReport {
    pub node: usize,
    /// δ-compact column list of K_i.
    pub k_matrix: Vec<usize>,
    /// δ-compact column list of M_i.
    pub m_matrix: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PinningReport {
    pub pinned: Vec<usize>,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub redirects: Vec<(usize, usize)>,
    pub nodes: Vec<PinnedNodeReport>,
    pub global_sync: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub post_pinning_gamma_time: Option<usize>,
    pub tau_bar: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AnalysisReport {
    pub k: usize,
    pub n: usize,
    pub gamma: usize,
    pub lambda_set_size: usize,
    pub attractors: AttractorSummary,
    pub global_sync: bool,
    pub masb_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub masb_members: Option<Vec<usize>>,
    /// Global shortest synchronization time, when global sync holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_sast: Option<usize>,
    /// SAST for an explicitly requested basin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basin_sast: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinning: Option<PinningReport>,
}

pub fn analysis_report(analysis: &Analysis, full_basin: bool) -> AnalysisReport {
    AnalysisReport {
        k: analysis.spec.k,
        n: analysis.spec.n,
        gamma: analysis.spec.gamma,
        lambda_set_size: analysis.lambda.members.len(),
        attractors: AttractorSummary {
            cycles: analysis.report.cycles.clone(),
            tau: analysis.report.tau,
            lambda: analysis.report.lambda,
        },
        global_sync: analysis.global_sync,
        masb_size: analysis.masb.members.len(),
        masb_members: full_basin.then(|| analysis.masb.members.iter().copied().collect()),
        global_sast: analysis.global_time.map(|t| t.gamma_time),
        basin_sast: None,
        pinning: None,
    }
}

pub fn pinning_report(plan: &PinningPlan, verify: &VerifyReport) -> PinningReport {
    let delta_compact = |m: &LogicMatrix| m.col_indices().to_vec();
    PinningReport {
        pinned: plan.pinned.iter().copied().collect(),
        p1: plan.p1().into_iter().collect(),
        p2: plan.p2().into_iter().collect(),
        redirects: plan.redirects.iter().map(|r| (r.source, r.target)).collect(),
        nodes: plan
            .nodes
            .iter()
            .map(|(&i, node)| {
                let fb = node.feedback.as_ref().expect("solved plan");
                PinnedNodeReport {
                    node: i,
                    k_matrix: delta_compact(&fb.k_matrix),
                    m_matrix: delta_compact(&fb.m_matrix),
                }
            })
            .collect(),
        global_sync: verify.global_sync,
        post_pinning_gamma_time: verify.gamma_time,
        tau_bar: verify.tau_bar,
    }
}

/// CSV trajectory: `t, delta_index, x1..xn, z1..zn, e1..en` with scalar
/// states as exact fractions and e_i = |x_i − z_i|.
pub fn trajectory_csv(trajectory: &[CompositeState], k: usize, n: usize) -> Result<String> {
    let mut out = String::from("t,delta_index");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",z{i}"));
    }
    for i in 1..=n {
        out.push_str(&format!(",e{i}"));
    }
    out.push('\n');
    for (t, state) in trajectory.iter().enumerate() {
        out.push_str(&format!("{t},{}", state.delta_index));
        for s in state.scalars(k) {
            out.push_str(&format!(",{s}"));
        }
        for i in 0..n {
            let diff = state.levels[i].abs_diff(state.levels[n + i]);
            out.push_str(&format!(",{}", crate::expr::fraction_string(diff, k - 1)));
        }
        out.push('\n');
    }
    Ok(out)
}
