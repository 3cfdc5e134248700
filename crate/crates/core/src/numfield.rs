//! Arithmetic in Q(θ) = Q[x]/(P) for the Hecke fields of level-one eigenforms,
//! and exact real-root isolation of P.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, Matrix, Poly};
use crate::qseries::BigRat;
use crate::{Error, Result};

/// Q[x]/(P) with P monic and irreducible.
#[derive(Clone, Debug, PartialEq)]
pub struct NumberField {
    modulus: Poly,
}

/// Element of a number field, coefficients on 1, θ, …, θ^{D-1}.
pub type Elem = Vec<BigRat>;

impl NumberField {
    pub fn new(modulus: Poly) -> Self {
        let mut m = modulus;
        linalg::poly_trim(&mut m);
        let lead = m[m.len() - 1].clone();
        let m = m.iter().map(|c| c / &lead).collect();
        NumberField { modulus: m }
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn from_rat(&self, r: BigRat) -> Elem {
        let mut e = vec![BigRat::zero(); self.degree()];
        e[0] = r;
        e
    }

    pub fn zero(&self) -> Elem {
        vec![BigRat::zero(); self.degree()]
    }

    pub fn one(&self) -> Elem {
        self.from_rat(BigRat::one())
    }

    pub fn generator(&self) -> Elem {
        if self.degree() == 1 {
            return vec![-self.modulus[0].clone()];
        }
        let mut e = self.zero();
        e[1] = BigRat::one();
        e
    }

    fn reduce(&self, mut p: Poly) -> Elem {
        let d = self.degree();
        while p.len() > d {
            let top = p.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = p.len() - d;
            for i in 0..d {
                let t = &top * &self.modulus[i];
                p[base + i] -= t;
            }
        }
        p.resize(d, BigRat::zero());
        p
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &Elem, c: &BigRat) -> Elem {
        a.iter().map(|x| x * c).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut p = vec![BigRat::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    p[i + j] += x * y;
                }
            }
        }
        self.reduce(p)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(Zero::is_zero)
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero(
                "zero element of the Hecke field".into(),
            ));
        }
        // Invariant: s_i * a = r_i mod P.
        let (mut r0, mut r1) = (self.modulus.clone(), a.clone());
        linalg::poly_trim(&mut r1);
        let (mut s0, mut s1): (Poly, Poly) = (vec![BigRat::zero()], vec![BigRat::one()]);
        while !linalg::poly_is_zero(&r1) {
            let (q, r) = linalg::poly_divrem(&r0, &r1);
            let qs = poly_mul(&q, &s1);
            let mut s2 = poly_sub(&s0, &qs);
            linalg::poly_trim(&mut s2);
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s2);
        }
        if linalg::poly_degree(&r0) != 0 {
            return Err(Error::Diagonalization(
                "Hecke polynomial is reducible".into(),
            ));
        }
        let c = r0[0].recip();
        Ok(self.reduce(s0.iter().map(|x| x * &c).collect()))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Trace of multiplication by `a`.
    pub fn trace(&self, a: &Elem) -> BigRat {
        let m = self.mult_matrix(a);
        (0..self.degree()).fold(BigRat::zero(), |acc, i| acc + &m[i][i])
    }

    /// Norm of `a` (determinant of multiplication by `a`).
    pub fn norm(&self, a: &Elem) -> BigRat {
        let cp = linalg::charpoly(&self.mult_matrix(a));
        let d = self.degree();
        if d.is_multiple_of(2) {
            cp[0].clone()
        } else {
            -cp[0].clone()
        }
    }

    fn mult_matrix(&self, a: &Elem) -> Matrix {
        let d = self.degree();
        // Column j is a * θ^j.
        let mut cols = Vec::with_capacity(d);
        let mut basis = self.one();
        for _ in 0..d {
            cols.push(self.mul(a, &basis));
            let mut shifted = vec![BigRat::zero()];
            shifted.extend(basis.iter().cloned());
            basis = self.reduce(shifted);
        }
        (0..d)
            .map(|i| (0..d).map(|j| cols[j][i].clone()).collect())
            .collect()
    }

    /// Real embedding θ ↦ root.
    pub fn embed(&self, a: &Elem, root: f64) -> f64 {
        if self.degree() == 1 {
            return a[0].to_f64().unwrap_or(f64::NAN);
        }
        a.iter()
            .rev()
            .fold(0.0, |acc, c| acc * root + c.to_f64().unwrap_or(f64::NAN))
    }

    /// All real roots of the modulus, increasing.
    pub fn real_roots(&self) -> Vec<f64> {
        real_roots(&self.modulus)
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut p = vec![BigRat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            p[i + j] += x * y;
        }
    }
    p
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRat::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRat::zero);
            x - y
        })
        .collect()
}

fn sign(x: &BigRat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), linalg::poly_derivative(p)];
    loop {
        let n = chain.len();
        if linalg::poly_is_zero(&chain[n - 1]) || linalg::poly_degree(&chain[n - 1]) == 0 {
            break;
        }
        let (_, r) = linalg::poly_divrem(&chain[n - 2], &chain[n - 1]);
        if linalg::poly_is_zero(&r) {
            break;
        }
        chain.push(r.iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(chain: &[Poly], x: &BigRat) -> usize {
    let signs: Vec<i32> = chain
        .iter()
        .map(|p| sign(&linalg::poly_eval(p, x)))
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Real roots of a squarefree polynomial, increasing, isolated by Sturm
/// sequences and refined by exact-sign bisection.
pub fn real_roots(p: &Poly) -> Vec<f64> {
    let d = linalg::poly_degree(p);
    if d == 0 {
        return Vec::new();
    }
    let lead = p[d].abs();
    let bound = p[..d]
        .iter()
        .fold(BigRat::zero(), |acc, c| acc + c.abs() / &lead)
        + BigRat::one();
    let bound = BigRat::from_integer(bound.ceil().to_integer());
    let chain = sturm_chain(p);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((a, b)) = stack.pop() {
        let count = sign_changes(&chain, &a) - sign_changes(&chain, &b);
        match count {
            0 => {}
            1 => out.push(refine(p, a, b)),
            _ => {
                let mid = (&a + &b) / BigRat::from_integer(BigInt::from(2));
                if linalg::poly_eval(p, &mid).is_zero() {
                    out.push(mid.to_f64().unwrap());
                    let eps = (&b - &a) / BigRat::from_integer(BigInt::from(1u64 << 40));
                    stack.push((&mid + &eps, b));
                    stack.push((a, &mid - &eps));
                } else {
                    stack.push((mid.clone(), b));
                    stack.push((a, mid));
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Bisect (a, b] containing exactly one root until the f64 midpoint is stable.
fn refine(p: &Poly, mut a: BigRat, mut b: BigRat) -> f64 {
    let two = BigRat::from_integer(BigInt::from(2));
    let sa = sign(&linalg::poly_eval(p, &a));
    if sign(&linalg::poly_eval(p, &b)) == 0 {
        return b.to_f64().unwrap();
    }
    for _ in 0..200 {
        let (fa, fb) = (a.to_f64().unwrap(), b.to_f64().unwrap());
        if fa == fb || (fb - fa).abs() <= 1e-18 * fa.abs().max(fb.abs()) {
            break;
        }
        let mid = (&a + &b) / &two;
        let sm = sign(&linalg::poly_eval(p, &mid));
        if sm == 0 {
            return mid.to_f64().unwrap();
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    ((&a + &b) / two).to_f64().unwrap()
}

/// Integer roots of a monic polynomial with integer coefficients
/// (rational Hecke eigenvalues are algebraic integers).
pub fn integer_roots(p: &Poly) -> Vec<BigInt> {
    let mut out = Vec::new();
    for r in real_roots(p) {
        let cand = BigInt::from(libm::round(r) as i128);
        if linalg::poly_eval(p, &BigRat::from_integer(cand.clone())).is_zero()
            && !out.contains(&cand)
        {
            out.push(cand);
        }
    }
    out
}

/// Divide `p` by `(x - r)`.
pub fn deflate(p: &Poly, r: &BigRat) -> Poly {
    let (q, rem) = linalg::poly_divrem(p, &vec![-r.clone(), BigRat::one()]);
    debug_assert!(linalg::poly_is_zero(&rem));
    q
}

/// A nonzero vector in the kernel of `A - θ I` over the field, normalized so its
/// first nonzero coordinate is 1.
pub fn eigenvector(k: &NumberField, a: &Matrix) -> Result<Vec<Elem>> {
    common_eigenvector(k, &[(a, k.generator())])
}

/// The one-dimensional common kernel of `A_i - λ_i I` over the field, with first
/// nonzero coordinate 1. Errors unless the kernel has dimension exactly one.
pub fn common_eigenvector(k: &NumberField, ops: &[(&Matrix, Elem)]) -> Result<Vec<Elem>> {
    let n = ops.first().map_or(0, |(a, _)| a.len());
    let mut m: Vec<Vec<Elem>> = Vec::with_capacity(n * ops.len());
    for (a, lam) in ops {
        for i in 0..n {
            m.push(
                (0..n)
                    .map(|j| {
                        let e = k.from_rat(a[i][j].clone());
                        if i == j {
                            k.sub(&e, lam)
                        } else {
                            e
                        }
                    })
                    .collect(),
            );
        }
    }
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !k.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = k.inv(&m[r][c])?;
        for j in 0..n {
            m[r][j] = k.mul(&m[r][j], &inv);
        }
        for i in 0..rows {
            if i != r && !k.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in 0..n {
                    let t = k.mul(&f, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::Diagonalization(alloc::format!(
            "eigenspace has dimension {} over the Hecke field",
            free.len()
        )));
    }
    let f = free[0];
    let mut v = vec![k.zero(); n];
    v[f] = k.one();
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = k.scale(&m[row][f], &-BigRat::one());
    }
    let lead = v.iter().find(|e| !k.is_zero(e)).cloned().unwrap();
    let inv = k.inv(&lead)?;
    Ok(v.iter().map(|e| k.mul(e, &inv)).collect())
}
