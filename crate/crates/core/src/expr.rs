//! k-valued logical expressions: operator semantics, structure matrices and
//! logical-form retrieval.
//!
//! A k-valued level `i ∈ [1, k]` is identified with the scalar
//! `(k - i)/(k - 1) ∈ {0, 1/(k-1), ..., 1}`; level 1 is logical truth.
//! All evaluation happens on levels, which keeps every operation exact.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::stp::LogicMatrix;

/// A k-valued logical value in vector form `δ_k^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KValue {
    pub level: usize,
}

impl KValue {
    pub fn new(level: usize, k: usize) -> Result<Self> {
        if level < 1 || level > k {
            return Err(Error::LevelRange { level, k });
        }
        Ok(Self { level })
    }

    /// Scalar form `(k - level)/(k - 1)` as a reduced fraction string.
    pub fn scalar_string(&self, k: usize) -> String {
        fraction_string(k - self.level, k - 1)
    }
}

pub(crate) fn fraction_string(num: usize, den: usize) -> String {
    if den == 0 {
        // k = 1 never occurs; guard anyway
        return "0".to_string();
    }
    if num == 0 {
        return "0".to_string();
    }
    let g = gcd(num, den);
    let (n, d) = (num / g, den / g);
    if d == 1 { n.to_string() } else { format!("{n}/{d}") }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Operator tags of the k-valued logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Negation,
    Conjunction,
    Disjunction,
    ModAdd,
    Confirmor,
    Rotator,
}

/// Expression tree over named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    ModAdd(Box<Expr>, Box<Expr>),
    Confirmor(usize, Box<Expr>),
    Rotator(Box<Expr>),
    Const(usize),
}

impl Expr {
    pub fn free_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Var(name) => {
                out.insert(name.as_str());
            }
            Expr::Not(e) | Expr::Rotator(e) | Expr::Confirmor(_, e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::ModAdd(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Const(_) => {}
        }
    }
}

// Level-wise operator semantics. Levels decrease as scalars increase, so
// min/max flip: conjunction (scalar min) is the level maximum.
fn op_not(l: usize, k: usize) -> usize {
    k + 1 - l
}

fn op_and(a: usize, b: usize) -> usize {
    a.max(b)
}

fn op_or(a: usize, b: usize) -> usize {
    a.min(b)
}

fn op_mod_add(a: usize, b: usize, k: usize) -> usize {
    // scalar [(k-1)(x+y)] mod k / (k-1) with x = (k-a)/(k-1), y = (k-b)/(k-1)
    k - (2 * k - a - b) % k
}

fn op_confirmor(i: usize, l: usize, k: usize) -> usize {
    if l == i { 1 } else { k }
}

fn op_rotator(l: usize, k: usize) -> usize {
    if l < k { l + 1 } else { 1 }
}

/// Structure matrix of a unary/binary operator, per the standard tables.
/// Generated from the scalar semantics so the two stay in lockstep.
pub fn operator_matrix(op: Operator, k: usize, confirmor_index: Option<usize>) -> Result<LogicMatrix> {
    if k < 2 {
        return Err(Error::LevelRange { level: k, k: 2 });
    }
    match op {
        Operator::Negation => LogicMatrix::new(k, (1..=k).map(|l| op_not(l, k)).collect()),
        Operator::Rotator => LogicMatrix::new(k, (1..=k).map(|l| op_rotator(l, k)).collect()),
        Operator::Confirmor => {
            let i = confirmor_index
                .ok_or_else(|| Error::Dimension("confirmor requires an index".into()))?;
            if i < 1 || i > k {
                return Err(Error::ConfirmorIndex { index: i, k });
            }
            LogicMatrix::new(k, (1..=k).map(|l| op_confirmor(i, l, k)).collect())
        }
        Operator::Conjunction | Operator::Disjunction | Operator::ModAdd => {
            let mut cols = Vec::with_capacity(k * k);
            for a in 1..=k {
                for b in 1..=k {
                    cols.push(match op {
                        Operator::Conjunction => op_and(a, b),
                        Operator::Disjunction => op_or(a, b),
                        Operator::ModAdd => op_mod_add(a, b, k),
                        _ => unreachable!(),
                    });
                }
            }
            LogicMatrix::new(k, cols)
        }
    }
}

/// Evaluate an expression against a level assignment.
pub fn eval_expr(e: &Expr, assignment: &dyn Fn(&str) -> Option<usize>, k: usize) -> Result<KValue> {
    let level = eval_level(e, assignment, k)?;
    KValue::new(level, k)
}

fn eval_level(e: &Expr, assignment: &dyn Fn(&str) -> Option<usize>, k: usize) -> Result<usize> {
    Ok(match e {
        Expr::Var(name) => assignment(name).ok_or_else(|| Error::UnboundVariable(name.clone()))?,
        Expr::Const(l) => {
            if *l < 1 || *l > k {
                return Err(Error::LevelRange { level: *l, k });
            }
            *l
        }
        Expr::Not(a) => op_not(eval_level(a, assignment, k)?, k),
        Expr::And(a, b) => op_and(eval_level(a, assignment, k)?, eval_level(b, assignment, k)?),
        Expr::Or(a, b) => op_or(eval_level(a, assignment, k)?, eval_level(b, assignment, k)?),
        Expr::ModAdd(a, b) => {
            op_mod_add(eval_level(a, assignment, k)?, eval_level(b, assignment, k)?, k)
        }
        Expr::Confirmor(i, a) => {
            if *i < 1 || *i > k {
                return Err(Error::ConfirmorIndex { index: *i, k });
            }
            op_confirmor(*i, eval_level(a, assignment, k)?, k)
        }
        Expr::Rotator(a) => op_rotator(eval_level(a, assignment, k)?, k),
    })
}

/// Structure matrix `M_f ∈ L_{k×k^m}` of `f` over the given variable order.
/// Column `j` corresponds to the mixed-radix encoding of the input levels
/// with the first variable most significant.
pub fn structure_matrix(e: &Expr, var_order: &[&str], k: usize) -> Result<LogicMatrix> {
    for v in e.free_vars() {
        if !var_order.contains(&v) {
            return Err(Error::UnboundVariable(v.to_string()));
        }
    }
    let m = var_order.len();
    let ncols = k.checked_pow(m as u32).ok_or_else(|| Error::Dimension("k^m overflow".into()))?;
    let mut levels = vec![1usize; m];
    let mut cols = Vec::with_capacity(ncols);
    for _ in 0..ncols {
        let assignment = |name: &str| {
            var_order.iter().position(|v| *v == name).map(|i| levels[i])
        };
        cols.push(eval_level(e, &assignment, k)?);
        // odometer over levels, last variable fastest
        for i in (0..m).rev() {
            if levels[i] < k {
                levels[i] += 1;
                break;
            }
            levels[i] = 1;
        }
    }
    LogicMatrix::new(k, cols)
}

/// Canonical logical form of a structure matrix: the nested
/// `⋁_i [∇_{i,k}(x_1) ∧ f_i(x_2, ...)]` decomposition over variables
/// `x1..x<arity>`. No simplification is attempted.
pub fn logical_form(m: &LogicMatrix, k: usize, arity: usize) -> Result<Expr> {
    let expect = k.checked_pow(arity as u32).ok_or_else(|| Error::Dimension("k^m overflow".into()))?;
    if m.rows() != k || m.num_cols() != expect {
        return Err(Error::Dimension(format!(
            "expected {}x{} structure matrix, got {}x{}",
            k,
            expect,
            m.rows(),
            m.num_cols()
        )));
    }
    logical_form_at(m, k, arity, 1)
}

fn logical_form_at(m: &LogicMatrix, k: usize, arity: usize, first_var: usize) -> Result<Expr> {
    if arity == 0 {
        return Ok(Expr::Const(m.col(1)));
    }
    let block = m.num_cols() / k;
    let var = format!("x{first_var}");
    let mut terms = Vec::with_capacity(k);
    for i in 1..=k {
        let cols: Vec<usize> = ((i - 1) * block..i * block).map(|j| m.col(j + 1)).collect();
        let blk = LogicMatrix::new(k, cols)?;
        let inner = logical_form_at(&blk, k, arity - 1, first_var + 1)?;
        terms.push(Expr::And(
            Box::new(Expr::Confirmor(i, Box::new(Expr::Var(var.clone())))),
            Box::new(inner),
        ));
    }
    let mut it = terms.into_iter();
    let first = it.next().expect("k >= 2");
    Ok(it.fold(first, |acc, t| Expr::Or(Box::new(acc), Box::new(t))))
}
