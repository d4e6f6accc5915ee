//! Small dense matrices of expressions.

use crate::symexpr::SymExpr;

pub type Matrix = Vec<Vec<SymExpr>>;

pub fn zeros(n: usize) -> Matrix {
    vec![vec![SymExpr::zero(); n]; n]
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = SymExpr::zero();
            for k in 0..n {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    continue;
                }
                acc += &(&a[i][k] * &b[k][j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    zip(a, b, |x, y| x + y)
}

pub fn sub(a: &Matrix, b: &Matrix) -> Matrix {
    zip(a, b, |x, y| x - y)
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    sub(&mul(a, b), &mul(b, a))
}

pub fn map(a: &Matrix, f: impl Fn(&SymExpr) -> SymExpr) -> Matrix {
    a.iter().map(|row| row.iter().map(&f).collect()).collect()
}

pub fn try_map<E>(a: &Matrix, f: impl Fn(&SymExpr) -> Result<SymExpr, E>) -> Result<Matrix, E> {
    a.iter().map(|row| row.iter().map(&f).collect::<Result<Vec<_>, E>>()).collect()
}

fn zip(a: &Matrix, b: &Matrix, f: impl Fn(&SymExpr, &SymExpr) -> SymExpr) -> Matrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f(x, y)).collect()).collect()
}

pub fn is_zero(a: &Matrix) -> bool {
    a.iter().all(|r| r.iter().all(|e| e.is_zero()))
}

/// `(row, col)` of every nonzero entry.
pub fn nonzero_entries(a: &Matrix) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for (i, r) in a.iter().enumerate() {
        for (j, e) in r.iter().enumerate() {
            if !e.is_zero() {
                v.push((i, j));
            }
        }
    }
    v
}
