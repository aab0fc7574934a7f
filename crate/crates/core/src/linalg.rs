//! Exact linear algebra over Q(i).
//!
//! Rank is computed by fraction-free (Bareiss) elimination on an
//! integer-scaled copy, which keeps intermediate entries polynomially sized;
//! pivots are chosen as the first nonzero entry in deterministic order, so
//! results are reproducible. Echelon-form routines for kernels and solving
//! use plain field elimination, which is exact over Q(i) anyway.

use num::bigint::BigInt;
use num::integer::lcm;
use num::traits::One;

use crate::scalar::{GaussRational, Rational};

pub type Matrix = Vec<Vec<GaussRational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        GaussRational::one()
                    } else {
                        GaussRational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &[Vec<GaussRational>]) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    let cols = m[0].len();
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<GaussRational>], b: &[Vec<GaussRational>]) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = GaussRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<GaussRational>], x: &[GaussRational]) -> Vec<GaussRational> {
    a.iter()
        .map(|row| {
            let mut acc = GaussRational::zero();
            for (c, v) in row.iter().zip(x) {
                if !c.is_zero() && !v.is_zero() {
                    acc += &(c * v);
                }
            }
            acc
        })
        .collect()
}

/// The standard symmetric bilinear form on coordinate vectors (no
/// conjugation).
pub fn dot(x: &[GaussRational], y: &[GaussRational]) -> GaussRational {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = GaussRational::zero();
    for (a, b) in x.iter().zip(y) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * b);
        }
    }
    acc
}

/// Exact rank via fraction-free elimination.
pub fn rank(rows: &[Vec<GaussRational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    debug_assert!(rows.iter().all(|r| r.len() == ncols));
    let mut m: Matrix = rows.iter().map(|r| scale_to_integers(r)).collect();
    let nrows = m.len();
    let mut prev = GaussRational::one();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(pivot) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        for r in row + 1..nrows {
            for c in col + 1..ncols {
                // Bareiss one-step formula; the division is exact.
                let t = &(&m[row][col] * &m[r][c]) - &(&m[r][col] * &m[row][c]);
                m[r][c] = t.try_div(&prev).expect("fraction-free pivot is nonzero");
            }
            m[r][col] = GaussRational::zero();
        }
        prev = m[row][col].clone();
        rank += 1;
        row += 1;
    }
    rank
}

/// Multiplies a row by the lcm of all denominators so every entry becomes a
/// Gaussian integer. Scaling a row never changes the rank.
fn scale_to_integers(row: &[GaussRational]) -> Vec<GaussRational> {
    let mut m = BigInt::one();
    for v in row {
        m = lcm(m, v.re.denominator().clone());
        m = lcm(m, v.im.denominator().clone());
    }
    let factor = GaussRational::from_rational(Rational::from_bigint(m));
    row.iter().map(|v| v * &factor).collect()
}

/// In-place reduced row echelon form; returns the pivot column indices.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    if m.is_empty() {
        return Vec::new();
    }
    let ncols = m[0].len();
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip().expect("pivot is nonzero");
        for cell in m[row].iter_mut().skip(col) {
            *cell = &*cell * &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let factor = other[col].clone();
                for (cell, p) in other.iter_mut().zip(&pivot_row).skip(col) {
                    let delta = &factor * p;
                    *cell = &*cell - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Basis of the right kernel `{x : M x = 0}`.
pub fn kernel_basis(rows: &[Vec<GaussRational>], ncols: usize) -> Vec<Vec<GaussRational>> {
    let mut m: Matrix = rows.to_vec();
    let pivots = rref(&mut m);
    let pivot_of_col: Vec<Option<usize>> = {
        let mut v = vec![None; ncols];
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = Some(r);
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut x = vec![GaussRational::zero(); ncols];
        x[free] = GaussRational::one();
        for (col, pr) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pr {
                x[col] = -&m[*r][free];
            }
        }
        basis.push(x);
    }
    basis
}

/// One exact solution of `A x = b` (free variables set to zero), if any.
pub fn solve(a: &[Vec<GaussRational>], b: &[GaussRational]) -> Option<Vec<GaussRational>> {
    let nrows = a.len();
    if nrows == 0 {
        return Some(Vec::new());
    }
    let ncols = a[0].len();
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&ncols) {
        return None; // inconsistent
    }
    let mut x = vec![GaussRational::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Exact inverse of a square matrix, if it is nonsingular.
pub fn invert(a: &[Vec<GaussRational>]) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            debug_assert_eq!(row.len(), n);
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j {
                    GaussRational::one()
                } else {
                    GaussRational::zero()
                });
            }
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}
