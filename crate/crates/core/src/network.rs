//! Coupled-network model: algebraic form assembly, the augmented transition
//! matrix, composite-state encoding and trajectory simulation.

use crate::error::{Error, Result};
use crate::expr::{fraction_string, structure_matrix, Expr};
use crate::stp::{khatri_rao, LogicMatrix};

/// Two coupled k-valued logical networks with n nodes each. Every update
/// rule may mention all 2n variables `x1..xn, z1..zn`.
#[derive(Debug, Clone)]
pub struct Network {
    pub k: usize,
    pub n: usize,
    pub x_rules: Vec<Expr>,
    pub z_rules: Vec<Expr>,
}

impl Network {
    /// Variable order shared by every structure matrix: x1..xn, z1..zn.
    pub fn var_order(&self) -> Vec<String> {
        (1..=self.n)
            .map(|i| format!("x{i}"))
            .chain((1..=self.n).map(|i| format!("z{i}")))
            .collect()
    }

    pub fn state_count(&self) -> usize {
        self.k.pow(2 * self.n as u32)
    }
}

/// Algebraic form of the coupled pair: `x(t+1) = F x(t) z(t)`,
/// `z(t+1) = G x(t) z(t)` with `F, G ∈ L_{k^n × k^{2n}}`.
#[derive(Debug, Clone)]
pub struct CoupledAlgebraic {
    pub k: usize,
    pub n: usize,
    pub f: LogicMatrix,
    pub g: LogicMatrix,
}

/// The augmented system `ξ(t+1) = L ξ(t)` on `Δ_{k^{2n}}`.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    pub k: usize,
    pub n: usize,
    pub l: LogicMatrix,
}

impl AugmentedSystem {
    pub fn state_count(&self) -> usize {
        self.l.num_cols()
    }

    /// One-step image of a δ-index.
    pub fn step(&self, idx: usize) -> usize {
        self.l.col(idx)
    }
}

/// A composite state in all three representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeState {
    pub delta_index: usize,
    /// Levels (i_1..i_n, j_1..j_n), each in [1, k].
    pub levels: Vec<usize>,
}

impl CompositeState {
    /// Scalar tuple `(X, Z)` as reduced fraction strings.
    pub fn scalars(&self, k: usize) -> Vec<String> {
        self.levels.iter().map(|&l| fraction_string(k - l, k - 1)).collect()
    }
}

/// Mixed-radix encode: first level most significant, 1-based throughout.
pub fn encode_levels(levels: &[usize], k: usize) -> Result<usize> {
    let mut idx = 0usize;
    for &l in levels {
        if l < 1 || l > k {
            return Err(Error::LevelRange { level: l, k });
        }
        idx = idx * k + (l - 1);
    }
    Ok(idx + 1)
}

pub fn decode_levels(delta_index: usize, k: usize, count: usize) -> Result<Vec<usize>> {
    let max = k.pow(count as u32);
    if delta_index < 1 || delta_index > max {
        return Err(Error::IndexRange { index: delta_index, max });
    }
    let mut rem = delta_index - 1;
    let mut out = vec![0; count];
    for slot in out.iter_mut().rev() {
        *slot = rem % k + 1;
        rem /= k;
    }
    Ok(out)
}

pub fn encode_state(levels: &[usize], k: usize) -> Result<CompositeState> {
    Ok(CompositeState { delta_index: encode_levels(levels, k)?, levels: levels.to_vec() })
}

pub fn decode_state(delta_index: usize, k: usize, n: usize) -> Result<CompositeState> {
    Ok(CompositeState { delta_index, levels: decode_levels(delta_index, k, 2 * n)? })
}

/// Build `F = F_1 ∗ ⋯ ∗ F_n` and `G = G_1 ∗ ⋯ ∗ G_n` from the per-node
/// structure matrices over the shared variable order.
pub fn assemble(network: &Network) -> Result<CoupledAlgebraic> {
    let order_owned = network.var_order();
    let order: Vec<&str> = order_owned.iter().map(String::as_str).collect();
    let fold = |rules: &[Expr]| -> Result<LogicMatrix> {
        let mut acc: Option<LogicMatrix> = None;
        for rule in rules {
            let m = structure_matrix(rule, &order, network.k)?;
            acc = Some(match acc {
                None => m,
                Some(prev) => khatri_rao(&prev, &m)?,
            });
        }
        acc.ok_or_else(|| Error::Dimension("network has no nodes".into()))
    };
    Ok(CoupledAlgebraic { k: network.k, n: network.n, f: fold(&network.x_rules)?, g: fold(&network.z_rules)? })
}

/// `L = F (I ⊗ G) M_r` via the index shortcut: column `j` of `L` is
/// `(f_j - 1)·k^n + g_j`.
pub fn build_augmented(alg: &CoupledAlgebraic) -> Result<AugmentedSystem> {
    if alg.f.num_cols() != alg.g.num_cols() || alg.f.rows() != alg.g.rows() {
        return Err(Error::Dimension("F and G shapes differ".into()));
    }
    let kn = alg.f.rows();
    let cols = alg
        .f
        .col_indices()
        .iter()
        .zip(alg.g.col_indices())
        .map(|(&f, &g)| (f - 1) * kn + g)
        .collect();
    Ok(AugmentedSystem { k: alg.k, n: alg.n, l: LogicMatrix::new(kn * kn, cols)? })
}

/// Iterate `ξ(t+1) = L ξ(t)` for `steps` steps; the result has length
/// `steps + 1` and starts at `x0`.
pub fn simulate(sys: &AugmentedSystem, x0: usize, steps: usize) -> Result<Vec<CompositeState>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = x0;
    out.push(decode_state(cur, sys.k, sys.n)?);
    for _ in 0..steps {
        cur = sys.step(cur);
        out.push(decode_state(cur, sys.k, sys.n)?);
    }
    Ok(out)
}

/// Digit projection of a square transition matrix: the structure matrix of
/// node `i` (1-based over the 2n combined nodes), equal to
/// `(1ᵀ ⊗ I_k ⊗ 1ᵀ) L` in the dense formulation.
pub fn node_structure_from_l(l: &LogicMatrix, k: usize, n: usize, i: usize) -> Result<LogicMatrix> {
    if i < 1 || i > 2 * n {
        return Err(Error::IndexRange { index: i, max: 2 * n });
    }
    // digit i of the image index, base k, first digit most significant
    let shift = k.pow((2 * n - i) as u32);
    let cols = l
        .col_indices()
        .iter()
        .map(|&target| (target - 1) / shift % k + 1)
        .collect();
    LogicMatrix::new(k, cols)
}
