//! Exact linear algebra over Q and small dense f64 solves.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::qseries::BigRat;

pub type Matrix = Vec<Vec<BigRat>>;

/// Univariate polynomial over Q, lowest degree first.
pub type Poly = Vec<BigRat>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![BigRat::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigRat::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of the right nullspace {x : A x = 0}.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<BigRat>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRat::zero(); cols];
            v[f] = BigRat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solve `A x = b` for square nonsingular `A`.
pub fn solve(a: &Matrix, b: &[BigRat]) -> Option<Vec<BigRat>> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

/// Characteristic polynomial det(xI - A), monic, lowest degree first
/// (Faddeev-LeVerrier).
pub fn charpoly(a: &Matrix) -> Poly {
    let n = a.len();
    let mut c = vec![BigRat::zero(); n + 1];
    c[n] = BigRat::one();
    let mut m = zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        m = next;
        let am = mat_mul(a, &m);
        let tr = (0..n).fold(BigRat::zero(), |acc, i| acc + &am[i][i]);
        c[n - k] = -tr / BigRat::from_integer(k.into());
    }
    c
}

pub fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn poly_degree(p: &Poly) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

pub fn poly_eval(p: &Poly, x: &BigRat) -> BigRat {
    p.iter().rev().fold(BigRat::zero(), |acc, c| acc * x + c)
}

pub fn poly_eval_f64(p: &Poly, x: f64) -> f64 {
    use num_traits::ToPrimitive;
    p.iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

pub fn poly_derivative(p: &Poly) -> Poly {
    if p.len() <= 1 {
        return vec![BigRat::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRat::from_integer(i.into()))
        .collect()
}

/// Remainder and quotient of polynomial division.
pub fn poly_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = poly_degree(b);
    assert!(!b[db].is_zero(), "division by the zero polynomial");
    let mut r = a.clone();
    poly_trim(&mut r);
    let mut q = vec![BigRat::zero(); r.len().saturating_sub(db).max(1)];
    while !poly_is_zero(&r) && poly_degree(&r) >= db {
        let dr = poly_degree(&r);
        let f = &r[dr] / &b[db];
        for i in 0..=db {
            let t = &f * &b[i];
            r[dr - db + i] -= t;
        }
        q[dr - db] = f;
        poly_trim(&mut r);
    }
    (q, r)
}

pub fn poly_is_zero(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !poly_is_zero(&y) {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = r;
    }
    let lead = x[poly_degree(&x)].clone();
    x.iter().map(|c| c / &lead).collect()
}

pub fn is_squarefree(p: &Poly) -> bool {
    poly_degree(&poly_gcd(p, &poly_derivative(p))) == 0
}

/// Solve a small dense real system by Gaussian elimination with partial pivoting.
/// Returns `None` if a pivot falls below `tol` relative to the largest entry.
pub fn solve_f64(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut r = r.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() <= tol * scale {
            return None;
        }
        m.swap(c, p);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..=n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

pub fn max_abs_rat(v: &[BigRat]) -> BigRat {
    v.iter()
        .map(|x| x.abs())
        .fold(BigRat::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn charpoly_of_small_matrix() {
        // [[2,1],[1,3]] -> x^2 - 5x + 5
        assert_eq!(charpoly(&m(&[&[2, 1], &[1, 3]])), [int(5), int(-5), int(1)]);
        let a = m(&[&[1, 2, 0], &[0, 1, 3], &[4, 0, 1]]);
        // det(A) = 1 + 24 = 25, trace 3
        let c = charpoly(&a);
        assert_eq!(c[3], int(1));
        assert_eq!(c[2], int(-3));
        assert_eq!(c[0], int(-25));
    }

    #[test]
    fn nullspace_and_solve() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let s = row
                    .iter()
                    .zip(v)
                    .fold(BigRat::zero(), |acc, (x, y)| acc + x * y);
                assert!(s.is_zero());
            }
        }
        let x = solve(&m(&[&[2, 1], &[1, 3]]), &[int(3), int(5)]).unwrap();
        assert_eq!(x, [crate::qseries::rat(4, 5), crate::qseries::rat(7, 5)]);
    }

    #[test]
    fn polynomial_gcd() {
        // (x-1)^2 (x+2)
        let p = vec![int(2), int(-3), int(0), int(1)];
        assert!(!is_squarefree(&p));
        assert!(is_squarefree(&vec![int(-2), int(0), int(1)]));
    }
}
