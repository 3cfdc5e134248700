//! The Kohnen plus space of weight k + 1/2 on Γ₀(4): construction from θ and
//! F, the Hecke operators T(p²), eigenforms and their Shimura lifts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::arith;
use crate::charsums::kronecker;
use crate::classical::{self, EigenData};
use crate::linalg::{self, Matrix, Poly};
use crate::numfield::{self, Elem, NumberField};
use crate::qseries::{BigRat, QSeries};
use crate::{Error, Result};

/// Odd primes whose T(p²) are computed on the plus space.
pub const PLUS_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// Number of coefficient conditions imposed when cutting out the plus space.
pub fn sturm_bound(k: u32) -> usize {
    2 * k as usize + 4
}

/// A form of weight k + 1/2 with raw coefficients a_g(n) in a number field.
#[derive(Clone, Debug)]
pub struct HalfIntegralForm {
    pub id: String,
    pub k: u32,
    pub field: NumberField,
    /// Real embedding used for floating values.
    pub root: f64,
    pub coeffs: Vec<Elem>,
    pub plus_flag: bool,
    pub cusp_flag: bool,
    /// T(p²) eigenvalues when the form is an eigenform.
    pub eigen_data: Option<Vec<(u64, Elem)>>,
}

fn rational_field() -> NumberField {
    NumberField::new(vec![BigRat::zero(), BigRat::one()])
}

/// (-1)^k n mod 4 lies in {2, 3}.
pub fn plus_forbidden(k: u32, n: usize) -> bool {
    let r = if k.is_multiple_of(2) {
        n % 4
    } else {
        (4 - n % 4) % 4
    };
    r == 2 || r == 3
}

impl HalfIntegralForm {
    pub fn from_series(k: u32, s: &QSeries) -> Self {
        let field = rational_field();
        let coeffs = s.coeffs().iter().map(|c| vec![c.clone()]).collect();
        let mut g = HalfIntegralForm {
            id: String::new(),
            k,
            field,
            root: 0.0,
            coeffs,
            plus_flag: false,
            cusp_flag: false,
            eigen_data: None,
        };
        g.plus_flag = g.satisfies_plus();
        g.cusp_flag = g.coeffs.first().is_none_or(|c| g.field.is_zero(c));
        g
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.field.degree() == 1
    }

    pub fn coeff(&self, n: usize) -> &Elem {
        &self.coeffs[n]
    }

    pub fn coeff_rational(&self, n: usize) -> Option<BigRat> {
        self.is_rational().then(|| self.coeffs[n][0].clone())
    }

    pub fn coeff_f64(&self, n: usize) -> f64 {
        self.field.embed(&self.coeffs[n], self.root)
    }

    /// The q-expansion when the coefficients are rational.
    pub fn series(&self) -> Option<QSeries> {
        self.is_rational()
            .then(|| QSeries::from_coeffs(self.coeffs.iter().map(|c| c[0].clone()).collect()))
    }

    pub fn satisfies_plus(&self) -> bool {
        (0..=self.trunc())
            .all(|n| !plus_forbidden(self.k, n) || self.field.is_zero(&self.coeffs[n]))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }
}

pub fn theta_series(trunc: usize) -> QSeries {
    let mut c = vec![BigRat::zero(); trunc + 1];
    c[0] = BigRat::one();
    let mut m = 1;
    while m * m <= trunc {
        c[m * m] = BigRat::from_integer(BigInt::from(2));
        m += 1;
    }
    QSeries::from_coeffs(c)
}

/// F = Σ_{n odd} σ₁(n) qⁿ.
pub fn f_weight2(trunc: usize) -> QSeries {
    let sig = arith::sigma_table(1, trunc + 1);
    QSeries::from_ints((0..=trunc).map(|n| {
        if n % 2 == 1 {
            BigInt::from(sig[n])
        } else {
            BigInt::zero()
        }
    }))
}

/// θ^{2k+1-4j} F^j for 0 ≤ j ≤ (2k+1)/4.
pub fn full_space_basis(k: u32, trunc: usize) -> Result<Vec<QSeries>> {
    if k < 2 {
        return Err(Error::Domain(format!("weight {k} + 1/2 needs k ≥ 2")));
    }
    let top = (2 * k + 1) / 4;
    let theta = theta_series(trunc);
    let theta4 = theta.pow(4);
    let f = f_weight2(trunc);
    // θ powers with exponent ≡ 2k+1 mod 4, smallest first.
    let mut tpow = Vec::with_capacity(top as usize + 1);
    tpow.push(theta.pow((2 * k + 1) % 4));
    for i in 1..=top as usize {
        let next = &tpow[i - 1] * &theta4;
        tpow.push(next);
    }
    let mut out = Vec::with_capacity(top as usize + 1);
    let mut fpow = QSeries::one(trunc);
    for j in 0..=top as usize {
        out.push(&tpow[top as usize - j] * &fpow);
        if j < top as usize {
            fpow = &fpow * &f;
        }
    }
    Ok(out)
}

/// Echelon basis of S⁺_{k+1/2}(4). Element i has coefficient 1 at its pivot
/// (its valuation) and 0 at every other pivot.
pub fn plus_cusp_basis(k: u32, trunc: usize) -> Result<Vec<HalfIntegralForm>> {
    let bound = sturm_bound(k);
    if trunc < bound {
        return Err(Error::TruncTooSmall {
            needed: bound,
            have: trunc,
        });
    }
    let mons = full_space_basis(k, trunc)?;
    let cond: Vec<usize> = (0..=bound)
        .filter(|&n| n == 0 || plus_forbidden(k, n))
        .collect();
    let rows: Matrix = cond
        .iter()
        .map(|&n| mons.iter().map(|m| m.coeff(n).clone()).collect())
        .collect();
    let kernel = linalg::nullspace(&rows, mons.len());
    let forms: Vec<QSeries> = kernel
        .iter()
        .map(|v| {
            let terms: Vec<(BigRat, &QSeries)> = v.iter().cloned().zip(mons.iter()).collect();
            QSeries::linear_combination(&terms)
        })
        .collect();
    // Echelonize on the first bound+1 coefficients, tracking the transform.
    let r = forms.len();
    let mut aug: Matrix = forms
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut row: Vec<BigRat> = f.coeffs()[..=bound].to_vec();
            row.extend((0..r).map(|j| {
                if i == j {
                    BigRat::one()
                } else {
                    BigRat::zero()
                }
            }));
            row
        })
        .collect();
    let pivots = linalg::rref(&mut aug);
    let mut basis = Vec::new();
    for (row, &p) in aug.iter().zip(&pivots) {
        if p > bound {
            break;
        }
        let terms: Vec<(BigRat, &QSeries)> =
            row[bound + 1..].iter().cloned().zip(forms.iter()).collect();
        basis.push(QSeries::linear_combination(&terms));
    }
    let expected = classical::dim_cusp(2 * k);
    if basis.len() != expected || forms.len() != expected {
        return Err(Error::DimensionMismatch {
            computed: basis.len().max(forms.len()),
            expected,
        });
    }
    let mut out = Vec::with_capacity(basis.len());
    for (i, s) in basis.iter().enumerate() {
        let mut g = HalfIntegralForm::from_series(k, s);
        if !g.plus_flag {
            let n = (0..=trunc)
                .find(|&n| plus_forbidden(k, n) && !s.coeff(n).is_zero())
                .unwrap();
            return Err(Error::Domain(format!(
                "plus condition fails at n = {n} for k = {k}"
            )));
        }
        if !g.cusp_flag {
            return Err(Error::Domain(format!("constant term survives for k = {k}")));
        }
        g.id = format!("plus{k}/basis{}", i + 1);
        out.push(g);
    }
    Ok(out)
}

fn pow_rat(p: u64, e: u32) -> BigRat {
    BigRat::from_integer(BigInt::from(p).pow(e))
}

/// (T(p²)g)(n) on raw coefficients.
fn tp2_coeff(g: &HalfIntegralForm, p: u64, n: usize, pk1: &BigRat, p2k1: &BigRat) -> Elem {
    let k = &g.field;
    let p2 = (p * p) as usize;
    let mut s = g.coeffs[p2 * n].clone();
    let disc = if g.k.is_multiple_of(2) {
        n as i64
    } else {
        -(n as i64)
    };
    let chi = kronecker(disc, p as i64);
    if chi != 0 && !k.is_zero(&g.coeffs[n]) {
        let c = if chi > 0 { pk1.clone() } else { -pk1.clone() };
        s = k.add(&s, &k.scale(&g.coeffs[n], &c));
    }
    if n.is_multiple_of(p2) && !k.is_zero(&g.coeffs[n / p2]) {
        s = k.add(&s, &k.scale(&g.coeffs[n / p2], p2k1));
    }
    s
}

/// T(p²) for an odd prime p; the output is truncated at trunc/p².
pub fn hecke_tp2(g: &HalfIntegralForm, p: u64) -> Result<HalfIntegralForm> {
    if p.is_multiple_of(2) || !arith::is_prime(p) {
        return Err(Error::Domain(format!("T(p²) needs an odd prime, got {p}")));
    }
    let p2 = (p * p) as usize;
    if g.trunc() < p2 {
        return Err(Error::TruncTooSmall {
            needed: p2,
            have: g.trunc(),
        });
    }
    let out_trunc = g.trunc() / p2;
    let pk1 = pow_rat(p, g.k - 1);
    let p2k1 = pow_rat(p, 2 * g.k - 1);
    let coeffs = (0..=out_trunc)
        .map(|n| tp2_coeff(g, p, n, &pk1, &p2k1))
        .collect();
    Ok(HalfIntegralForm {
        coeffs,
        eigen_data: None,
        ..g.clone()
    })
}

fn pivots_of(basis: &[HalfIntegralForm]) -> Vec<usize> {
    basis
        .iter()
        .map(|g| {
            (0..=g.trunc())
                .find(|&n| !g.field.is_zero(&g.coeffs[n]))
                .unwrap_or(0)
        })
        .collect()
}

/// Matrix of T(p²) on an echelon plus basis (column i = image of element i).
pub fn plus_hecke_matrix(basis: &[HalfIntegralForm], p: u64) -> Result<Matrix> {
    let piv = pivots_of(basis);
    let top = piv.iter().copied().max().unwrap_or(0);
    let p2 = (p * p) as usize;
    let mut m = linalg::zeros(basis.len(), basis.len());
    for (i, g) in basis.iter().enumerate() {
        if g.trunc() < p2 * top {
            return Err(Error::TruncTooSmall {
                needed: p2 * top,
                have: g.trunc(),
            });
        }
        let pk1 = pow_rat(p, g.k - 1);
        let p2k1 = pow_rat(p, 2 * g.k - 1);
        for (j, &n) in piv.iter().enumerate() {
            m[j][i] = tp2_coeff(g, p, n, &pk1, &p2k1)[0].clone();
        }
    }
    Ok(m)
}

/// Truncation needed so that every T(p²), p ≤ 13, can be read off at the pivots.
pub fn hecke_trunc(k: u32) -> usize {
    169 * sturm_bound(k)
}

/// Characteristic polynomial of T(p²) on S⁺_{k+1/2}(4).
pub fn plus_hecke_charpoly(k: u32, p: u64) -> Result<Poly> {
    let basis = plus_cusp_basis(k, (p * p) as usize * sturm_bound(k))?;
    Ok(linalg::charpoly(&plus_hecke_matrix(&basis, p)?))
}

/// A plus-space eigenform with its Shimura lift.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub g: HalfIntegralForm,
    pub f: EigenData,
    pub eigen_table: Vec<(u64, Elem)>,
}

impl EigenPair {
    pub fn k(&self) -> u32 {
        self.g.k
    }

    pub fn eigenvalue_f64(&self, p: u64) -> Option<f64> {
        self.eigen_table
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| self.g.field.embed(e, self.g.root))
    }
}

/// Scale so that the first nonzero coefficient is a positive integer and the
/// coordinates over the power basis of the field are coprime integers.
fn normalize(k: &NumberField, coeffs: &mut [Elem]) -> Result<()> {
    let Some(lead) = coeffs.iter().find(|c| !k.is_zero(c)).cloned() else {
        return Ok(());
    };
    let inv = k.inv(&lead)?;
    for c in coeffs.iter_mut() {
        if !k.is_zero(c) {
            *c = k.mul(c, &inv);
        }
    }
    let l = coeffs
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let g = coeffs
        .iter()
        .flatten()
        .fold(BigInt::zero(), |acc, x| acc.gcd(&(x * &l).to_integer()));
    let s = BigRat::new(l, g);
    for c in coeffs.iter_mut() {
        for x in c.iter_mut() {
            *x = &*x * &s;
        }
    }
    Ok(())
}

/// Simultaneous T(p²) eigenbasis of S⁺_{k+1/2}(4), each matched to its lift.
pub fn eigenbasis_plus(k: u32, trunc: usize) -> Result<Vec<EigenPair>> {
    let dim = classical::dim_cusp(2 * k);
    if k < 2 || dim == 0 {
        return Err(Error::Precondition(format!(
            "S+ of weight {k} + 1/2 is zero"
        )));
    }
    let t = trunc.max(hecke_trunc(k));
    eigenbasis_from_basis(k, &plus_cusp_basis(k, t)?)
}

/// As [`eigenbasis_plus`], starting from an echelon plus basis (for instance a
/// cached one) whose truncation is at least [`hecke_trunc`].
pub fn eigenbasis_from_basis(k: u32, basis: &[HalfIntegralForm]) -> Result<Vec<EigenPair>> {
    let dim = classical::dim_cusp(2 * k);
    if dim == 0 || basis.len() != dim || basis.iter().any(|g| g.k != k || !g.is_rational()) {
        return Err(Error::Precondition(format!(
            "not a rational plus basis of weight {k} + 1/2"
        )));
    }
    let t = basis.iter().map(|g| g.trunc()).min().unwrap_or(0);
    if t < hecke_trunc(k) {
        return Err(Error::TruncTooSmall {
            needed: hecke_trunc(k),
            have: t,
        });
    }
    let mats: Vec<(u64, Matrix)> = PLUS_PRIMES
        .iter()
        .map(|&p| plus_hecke_matrix(basis, p).map(|m| (p, m)))
        .collect::<Result<_>>()?;
    for (i, (p, a)) in mats.iter().enumerate() {
        for (q, b) in &mats[i + 1..] {
            if linalg::mat_mul(a, b) != linalg::mat_mul(b, a) {
                return Err(Error::Diagonalization(format!(
                    "T({p}²) and T({q}²) do not commute"
                )));
            }
        }
    }
    let f_trunc = 64.max(t.isqrt() + 1);
    let lifts = classical::eigenbasis_level1(2 * k, f_trunc)?;
    let mut out = Vec::new();
    let mut done: Vec<(NumberField, Vec<Elem>)> = Vec::new();
    for f in &lifts {
        let field = &f.field;
        let cached = done
            .iter()
            .find(|(fld, _)| fld == field)
            .map(|(_, c)| c.clone());
        let coeffs = match cached {
            Some(c) => c,
            None => {
                let lam: Vec<(u64, Elem)> = PLUS_PRIMES
                    .iter()
                    .map(|&p| {
                        (
                            p,
                            f.eigenvalue(p)
                                .cloned()
                                .unwrap_or_else(|| field.from_rat(f.coeffs[p as usize][0].clone())),
                        )
                    })
                    .collect();
                let ops: Vec<(&Matrix, Elem)> = mats
                    .iter()
                    .zip(&lam)
                    .map(|((_, m), (_, l))| (m, l.clone()))
                    .collect();
                let v = numfield::common_eigenvector(field, &ops)
                    .map_err(|e| Error::NoLiftMatch(format!("{}: {e}", f.id)))?;
                let mut coeffs: Vec<Elem> = (0..=t)
                    .map(|n| {
                        let mut s = field.zero();
                        for (x, b) in v.iter().zip(basis) {
                            let c = &b.coeffs[n][0];
                            if !c.is_zero() {
                                s = field.add(&s, &field.scale(x, c));
                            }
                        }
                        s
                    })
                    .collect();
                normalize(field, &mut coeffs)?;
                done.push((field.clone(), coeffs.clone()));
                coeffs
            }
        };
        let eigen_table: Vec<(u64, Elem)> = PLUS_PRIMES
            .iter()
            .map(|&p| (p, f.eigenvalue(p).cloned().unwrap()))
            .collect();
        let g = HalfIntegralForm {
            id: format!("plus{k}/{}", f.id),
            k,
            field: field.clone(),
            root: f.root,
            coeffs,
            plus_flag: true,
            cusp_flag: true,
            eigen_data: Some(eigen_table.clone()),
        };
        verify_eigen(&g, &eigen_table)?;
        out.push(EigenPair {
            g,
            f: f.clone(),
            eigen_table,
        });
    }
    Ok(out)
}

/// Exact check T(p²)g = λ_p g on all coefficients available at the output truncation.
fn verify_eigen(g: &HalfIntegralForm, table: &[(u64, Elem)]) -> Result<()> {
    let k = &g.field;
    for (p, lam) in table {
        let p2 = (p * p) as usize;
        if g.trunc() < p2 {
            continue;
        }
        let pk1 = pow_rat(*p, g.k - 1);
        let p2k1 = pow_rat(*p, 2 * g.k - 1);
        for n in 0..=g.trunc() / p2 {
            if tp2_coeff(g, *p, n, &pk1, &p2k1) != k.mul(lam, &g.coeffs[n]) {
                return Err(Error::NoLiftMatch(format!(
                    "{}: T({p}²) fails at n = {n}",
                    g.id
                )));
            }
        }
    }
    Ok(())
}

/// Both sides of a_g(n²|d|) = a_g(|d|) Σ_{r|n} μ(r)χ_d(r) r^{k-1} a_f(n/r).
#[derive(Clone, Debug, PartialEq)]
pub struct ShimuraCheck {
    pub d: i64,
    pub n: u64,
    pub holds: bool,
    pub lhs: Elem,
    pub rhs: Elem,
}

pub fn shimura_identity_check(pair: &EigenPair, d: i64, n: u64) -> Result<ShimuraCheck> {
    let k = pair.k();
    let sign_ok = if k.is_multiple_of(2) { d > 0 } else { d < 0 };
    if !sign_ok || !arith::is_fundamental_discriminant(d) {
        return Err(Error::Precondition(format!(
            "d = {d} is not a fundamental discriminant of sign (-1)^{k}"
        )));
    }
    let ad = d.unsigned_abs() as usize;
    let idx = (n * n) as usize * ad;
    if idx > pair.g.trunc() {
        return Err(Error::TruncTooSmall {
            needed: idx,
            have: pair.g.trunc(),
        });
    }
    if n as usize > pair.f.trunc() {
        return Err(Error::TruncTooSmall {
            needed: n as usize,
            have: pair.f.trunc(),
        });
    }
    let fld = &pair.g.field;
    let mut sum = fld.zero();
    for r in arith::divisors(n) {
        let mu = arith::mobius(r);
        let chi = kronecker(d, r as i64);
        if mu == 0 || chi == 0 {
            continue;
        }
        let c = pow_rat(r, k - 1) * BigRat::from_integer(BigInt::from(mu * chi as i64));
        sum = fld.add(&sum, &fld.scale(&pair.f.coeffs[(n / r) as usize], &c));
    }
    let rhs = fld.mul(&pair.g.coeffs[ad], &sum);
    let lhs = pair.g.coeffs[idx].clone();
    Ok(ShimuraCheck {
        d,
        n,
        holds: lhs == rhs,
        lhs,
        rhs,
    })
}

/// c_g(n) = a_g(n)/n^{k/2-1/4}.
pub fn normalized_coeff(g: &HalfIntegralForm, n: usize) -> f64 {
    let a = g.coeff_f64(n);
    if a == 0.0 || n == 0 {
        return a;
    }
    let mag = libm::exp(libm::log(a.abs()) - (0.5 * g.k as f64 - 0.25) * libm::log(n as f64));
    mag.copysign(a)
}

/// c_g(m)/c_g(n) computed exactly in the field before embedding.
pub fn coeff_ratio(g: &HalfIntegralForm, m: usize, n: usize) -> Result<f64> {
    let k = &g.field;
    if k.is_zero(&g.coeffs[n]) {
        return Err(Error::ZeroCoefficient(format!("a_g({n}) = 0 for {}", g.id)));
    }
    let q = k.div(&g.coeffs[m], &g.coeffs[n])?;
    let scale = libm::pow(n as f64 / m as f64, 0.5 * g.k as f64 - 0.25);
    Ok(k.embed(&q, g.root) * scale)
}
