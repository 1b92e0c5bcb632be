//! Exact nullspaces and reduced echelon forms over the rationals.
//!
//! Elimination runs on integer rows: each row is cleared of denominators,
//! combined fraction-free (`a*r - b*s`), and divided by its content after
//! every step so entry growth stays bounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

fn to_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut out: Vec<BigInt> = row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g > BigInt::one() {
        for v in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Row echelon form over the integers, fraction-free. Returns the nonzero
/// rows and their pivot columns.
fn integer_echelon(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| to_integer_row(r))
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .collect();
    let mut echelon = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let Some(pos) = work
            .iter()
            .enumerate()
            .filter(|(_, r)| !r[col].is_zero())
            .min_by_key(|(_, r)| r[col].bits())
            .map(|(i, _)| i)
        else {
            continue;
        };
        let pivot_row = work.swap_remove(pos);
        let a = pivot_row[col].clone();
        for row in work.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let b = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &a * &*x - &b * p;
            }
            make_primitive(row);
        }
        work.retain(|r| r.iter().any(|v| !v.is_zero()));
        echelon.push(pivot_row);
        pivots.push(col);
    }
    (echelon, pivots)
}

/// Reduced row echelon form: returns the nonzero rows (pivot entries one)
/// and the pivot columns, in increasing pivot order.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let (echelon, pivots) = integer_echelon(rows, ncols);
    let mut out: Vec<Vec<Rational>> = echelon
        .into_iter()
        .zip(&pivots)
        .map(|(row, &p)| {
            let lead = Rational::from_bigint(row[p].clone());
            row.into_iter().map(|v| Rational::from_bigint(v) / &lead).collect()
        })
        .collect();
    for i in (0..out.len()).rev() {
        let p = pivots[i];
        let (above, rest) = out.split_at_mut(i);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, v) in row.iter_mut().zip(pivot_row) {
                if !v.is_zero() {
                    *x -= &(&f * v);
                }
            }
        }
    }
    (out, pivots)
}

/// Basis of `{v : A v = 0}` for the `rows` x `ncols` matrix `A`, one vector
/// per free column (free entry one, other free entries zero).
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (reduced, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); ncols];
            v[free] = Rational::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            v
        })
        .collect()
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    integer_echelon(rows, ncols).1.len()
}

/// True when every entry is an integer and the gcd of the entries is one
/// (up to sign).
pub fn is_primitive_integer(values: &[Rational]) -> bool {
    values.iter().all(Rational::is_integer)
        && values
            .iter()
            .fold(BigInt::zero(), |acc, v| acc.gcd(v.numer()))
            .abs()
            .is_one()
}
