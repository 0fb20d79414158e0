//! Exact matrix algebra for the semi-tensor (Cheng) product framework.
//!
//! Logic matrices are kept in column-index form throughout the library; the
//! dense representation exists so that identities can be checked against the
//! textbook formulas.

use crate::error::{Error, Result};

/// Entry cap for any dense intermediate. The Cheng product blows dimensions
/// up to the lcm of the inner sizes, so unchecked use can hit `k^{3n}`.
pub const DENSE_ENTRY_CAP: u128 = 100_000_000;

/// Dense integer matrix in row-major order. All quantities in this crate are
/// exact; there is no floating point anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<i64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_cap(rows, cols)?;
        Ok(Self { rows, cols, entries: vec![0; rows * cols] })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self { rows: n, cols: n, entries: vec![0; n * n] };
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn ones_row(n: usize) -> Self {
        Self { rows: 1, cols: n, entries: vec![1; n] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    /// Ordinary matrix product; inner dimensions must match.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += a * other.get(l, j);
                }
            }
        }
        Ok(out)
    }
}

fn check_cap(rows: usize, cols: usize) -> Result<()> {
    let entries = rows as u128 * cols as u128;
    if entries > DENSE_ENTRY_CAP {
        return Err(Error::DimensionCap { entries, cap: DENSE_ENTRY_CAP });
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Kronecker product of dense matrices.
pub fn kronecker(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = DenseMatrix::zeros(a.rows * b.rows, a.cols * b.cols)?;
    for i in 0..a.rows {
        for j in 0..a.cols {
            let v = a.get(i, j);
            if v == 0 {
                continue;
            }
            for p in 0..b.rows {
                for q in 0..b.cols {
                    out.set(i * b.rows + p, j * b.cols + q, v * b.get(p, q));
                }
            }
        }
    }
    Ok(out)
}

/// Cheng (semi-tensor) product: `(A ⊗ I_{t/n})(B ⊗ I_{t/p})` with
/// `t = lcm(cols(A), rows(B))`. Degenerates to the ordinary product when the
/// inner dimensions match.
pub fn cheng_product(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let t = lcm(a.cols, b.rows);
    if t == a.cols && t == b.rows {
        return a.matmul(b);
    }
    // the blown-up factors are the largest intermediates; cap them up front
    check_cap(a.rows * (t / a.cols), t)?;
    check_cap(t, b.cols * (t / b.rows))?;
    check_cap(t / a.cols, t / a.cols)?;
    check_cap(t / b.rows, t / b.rows)?;
    let left = kronecker(a, &DenseMatrix::identity(t / a.cols))?;
    let right = kronecker(b, &DenseMatrix::identity(t / b.rows))?;
    left.matmul(&right)
}

/// A column-stochastic 0/1 matrix stored as 1-based column indices:
/// `L = δ_m[i_1, i_2, ..., i_n]` keeps `rows = m` and `cols = [i_1..i_n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicMatrix {
    rows: usize,
    cols: Vec<usize>,
}

impl LogicMatrix {
    pub fn new(rows: usize, cols: Vec<usize>) -> Result<Self> {
        for &i in &cols {
            if i < 1 || i > rows {
                return Err(Error::IndexRange { index: i, max: rows });
            }
        }
        Ok(Self { rows, cols })
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: (1..=n).collect() }
    }

    /// The basis column `δ_m^i` as a one-column logic matrix.
    pub fn delta(m: usize, i: usize) -> Result<Self> {
        Self::new(m, vec![i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols.len()
    }

    /// 1-based index of the single 1 in column `j` (1-based).
    pub fn col(&self, j: usize) -> usize {
        self.cols[j - 1]
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let mut d = DenseMatrix::zeros(self.rows, self.cols.len())?;
        for (j, &i) in self.cols.iter().enumerate() {
            d.set(i - 1, j, 1);
        }
        Ok(d)
    }

    /// Compact `δ_m[i1 i2 ...]` rendering.
    pub fn compact(&self) -> String {
        let idx: Vec<String> = self.cols.iter().map(|i| i.to_string()).collect();
        format!("δ_{}[{}]", self.rows, idx.join(" "))
    }
}

/// Composition of conformable logic matrices: column `j` of `A·B` is column
/// `b_j` of `A`. Agrees with the dense Cheng product.
pub fn logic_compose(a: &LogicMatrix, b: &LogicMatrix) -> Result<LogicMatrix> {
    if a.num_cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "logic compose {}x{} * {}x{}",
            a.rows(),
            a.num_cols(),
            b.rows(),
            b.num_cols()
        )));
    }
    let cols = b.col_indices().iter().map(|&j| a.col(j)).collect();
    LogicMatrix::new(a.rows(), cols)
}

/// Swap matrix `W_{[m,n]} = [I_n ⊗ δ_m^1, ..., I_n ⊗ δ_m^m]`;
/// satisfies `W X Y = Y X` for `X ∈ Δ_m`, `Y ∈ Δ_n`.
pub fn swap_matrix(m: usize, n: usize) -> LogicMatrix {
    let mut cols = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 1..=n {
            cols.push((j - 1) * m + i);
        }
    }
    LogicMatrix { rows: m * n, cols }
}

/// Power-reducing matrix `M_{r,k} = δ_{k²}[1, k+2, 2k+3, ..., k²]`;
/// satisfies `x ⋉ x = M_{r,k} x` for `x ∈ Δ_k`.
pub fn power_reducing_matrix(k: usize) -> LogicMatrix {
    let cols = (0..k).map(|j| j * (k + 1) + 1).collect();
    LogicMatrix { rows: k * k, cols }
}

/// Khatri-Rao product of logic matrices: column `j` of the result is
/// `Col_j(A) ⊗ Col_j(B)`, i.e. index `(a_j - 1)·rows(B) + b_j`.
pub fn khatri_rao(a: &LogicMatrix, b: &LogicMatrix) -> Result<LogicMatrix> {
    if a.num_cols() != b.num_cols() {
        return Err(Error::Dimension(format!(
            "khatri-rao column counts {} vs {}",
            a.num_cols(),
            b.num_cols()
        )));
    }
    let cols = a
        .col_indices()
        .iter()
        .zip(b.col_indices())
        .map(|(&i, &j)| (i - 1) * b.rows() + j)
        .collect();
    LogicMatrix::new(a.rows() * b.rows(), cols)
}

/// Index vector of a state subset: length plus 1-based support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVector {
    pub len: usize,
    pub support: std::collections::BTreeSet<usize>,
}

impl IndexVector {
    pub fn new(len: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let support: std::collections::BTreeSet<usize> = support.into_iter().collect();
        if let Some(&i) = support.iter().next_back() {
            if i > len {
                return Err(Error::IndexRange { index: i, max: len });
            }
        }
        if support.iter().next() == Some(&0) {
            return Err(Error::IndexRange { index: 0, max: len });
        }
        Ok(Self { len, support })
    }

    pub fn contains(&self, i: usize) -> bool {
        self.support.contains(&i)
    }

    /// Componentwise `sgn(self) ≤ other` for 0/1 index vectors: support inclusion.
    pub fn le(&self, other: &IndexVector) -> bool {
        self.support.is_subset(&other.support)
    }

    /// Hadamard product of 0/1 index vectors: support intersection.
    pub fn hadamard(&self, other: &IndexVector) -> IndexVector {
        IndexVector {
            len: self.len,
            support: self.support.intersection(&other.support).copied().collect(),
        }
    }
}
