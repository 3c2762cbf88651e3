//! Symbolic determinants.
//!
//! Up to 5x5 the determinant is a Laplace expansion along the sparsest row,
//! simplifying every partial product. Larger matrices go through
//! fraction-free Bareiss elimination.

use nalgebra::DMatrix;

use super::field::ExprMatrix;
use crate::error::{Error, Result};
use crate::symexpr::{simplify, sum, Expr};

pub const COFACTOR_LIMIT: usize = 5;

pub fn det_symbolic(m: &ExprMatrix) -> Result<Expr> {
    if m.rows() != m.cols() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Expr::one());
    }
    // alternating: a repeated row forces zero
    for i in 0..n {
        for k in (i + 1)..n {
            if m.row(i) == m.row(k) {
                return Ok(Expr::zero());
            }
        }
    }
    let rows: Vec<Vec<Expr>> = m.entries().to_vec();
    if n <= COFACTOR_LIMIT {
        let row_idx: Vec<usize> = (0..n).collect();
        let col_idx: Vec<usize> = (0..n).collect();
        Ok(cofactor(&rows, &row_idx, &col_idx))
    } else {
        Ok(bareiss(rows))
    }
}

fn cofactor(m: &[Vec<Expr>], rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        1 => return m[rows[0]][cols[0]].clone(),
        2 => {
            let (r0, r1) = (rows[0], rows[1]);
            let (c0, c1) = (cols[0], cols[1]);
            return simplify(&(&m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0]));
        }
        _ => {}
    }
    let zeros = |r: usize| cols.iter().filter(|&&c| m[r][c].is_zero()).count();
    let pivot_pos = (0..rows.len())
        .max_by_key(|&k| (zeros(rows[k]), std::cmp::Reverse(k)))
        .unwrap_or(0);
    let pivot_row = rows[pivot_pos];
    let minor_rows: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != pivot_pos)
        .map(|(_, &r)| r)
        .collect();
    let terms = cols.iter().enumerate().filter_map(|(j, &c)| {
        let entry = &m[pivot_row][c];
        if entry.is_zero() {
            return None;
        }
        let minor_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, &c)| c)
            .collect();
        let minor = cofactor(m, &minor_rows, &minor_cols);
        if minor.is_zero() {
            return None;
        }
        let term = simplify(&(entry * &minor));
        Some(if (pivot_pos + j) % 2 == 1 {
            simplify(&-term)
        } else {
            term
        })
    });
    sum(terms)
}

fn bareiss(mut a: Vec<Vec<Expr>>) -> Expr {
    let n = a.len();
    let mut sign = 1.0;
    let mut prev = Expr::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Expr::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = simplify(&(num / prev.clone()));
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0.0 {
        simplify(&-d)
    } else {
        d
    }
}

/// LU-based determinant of a numeric matrix.
pub fn det_numeric(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}
