//! Exact linear systems: echelon forms and multi right-hand-side solves.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::Field;
use crate::Rational;

/// Plain Gaussian elimination (first nonzero pivot).
pub fn gauss_echelon<C: Field>(rows: &mut [Vec<C>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = C::one() / rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone() * inv.clone();
            for j in c..rows[i].len() {
                let t = f.clone() * rows[r][j].clone();
                rows[i][j] -= &t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Fraction-free (Bareiss) elimination. Each row is first cleared of
/// denominators, the integer sweep then keeps every entry a minor of the
/// scaled matrix, and the result is handed back as rationals.
pub fn bareiss_echelon(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut l = BigInt::one();
            for c in row {
                if !c.is_zero() {
                    l = l.lcm(c.denom());
                }
            }
            row.iter().map(|c| (c * &l).to_integer()).collect()
        })
        .collect();
    let width = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let piv_row = &top[r];
        let piv = &piv_row[c];
        for row in rest.iter_mut() {
            let a = row[c].clone();
            for j in c + 1..width {
                let v = piv * &row[j] - &a * &piv_row[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = piv.clone();
        pivots.push(c);
        r += 1;
    }
    for (dst, src) in rows.iter_mut().zip(m) {
        for (d, s) in dst.iter_mut().zip(src) {
            *d = Rational::from_integer(s);
        }
    }
    pivots
}

/// Solve `A s = b_j` for every right-hand side `b_j`, sharing one
/// elimination. Free variables are set to zero. `None` marks an
/// inconsistent system.
pub fn solve_many<C: Field>(a: &[Vec<C>], ncols: usize, rhs: &[Vec<C>]) -> Vec<Option<Vec<C>>> {
    let nrows = a.len();
    let nr = rhs.len();
    let mut aug: Vec<Vec<C>> = (0..nrows)
        .map(|i| {
            let mut row = a[i].clone();
            row.resize(ncols, C::zero());
            row.extend(rhs.iter().map(|b| b[i].clone()));
            row
        })
        .collect();
    let pivots = C::echelon(&mut aug, ncols);
    let rank = pivots.len();
    (0..nr)
        .map(|j| {
            let col = ncols + j;
            if aug[rank..].iter().any(|row| !row[col].is_zero()) {
                return None;
            }
            let mut s = vec![C::zero(); ncols];
            for (r, &pc) in pivots.iter().enumerate().rev() {
                let mut v = aug[r][col].clone();
                for (k, x) in s.iter().enumerate().skip(pc + 1) {
                    if !x.is_zero() && !aug[r][k].is_zero() {
                        v -= &(aug[r][k].clone() * x.clone());
                    }
                }
                s[pc] = v / aug[r][pc].clone();
            }
            Some(s)
        })
        .collect()
}

/// Rank of a matrix.
pub fn rank<C: Field>(a: &[Vec<C>], ncols: usize) -> usize {
    let mut m = a.to_vec();
    C::echelon(&mut m, ncols).len()
}
