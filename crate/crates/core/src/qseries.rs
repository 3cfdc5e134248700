//! Truncated power series in q with exact rational coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ntt;

pub type BigRat = BigRational;

/// A q-expansion known exactly for `0 <= n <= trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigRat>,
}

impl QSeries {
    pub fn zero(trunc: usize) -> Self {
        QSeries {
            coeffs: vec![BigRat::zero(); trunc + 1],
        }
    }

    pub fn one(trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = BigRat::one();
        s
    }

    /// Series with the given coefficients; `trunc = coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<BigRat>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        QSeries { coeffs }
    }

    pub fn from_ints<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(BigRat::from_integer).collect())
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::from_ints(coeffs.iter().map(|&c| BigInt::from(c)))
    }

    /// `sum c_n q^n` over the listed (n, c_n) with every other coefficient zero.
    pub fn sparse(trunc: usize, terms: &[(usize, i64)]) -> Self {
        let mut s = Self::zero(trunc);
        for &(n, c) in terms {
            if n <= trunc {
                s.coeffs[n] += BigRat::from_integer(c.into());
            }
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of q^n; `None` beyond the truncation order.
    pub fn get(&self, n: usize) -> Option<&BigRat> {
        self.coeffs.get(n)
    }

    /// Coefficient of q^n. Panics beyond the truncation order.
    pub fn coeff(&self, n: usize) -> &BigRat {
        assert!(
            n <= self.trunc(),
            "coefficient {n} beyond truncation {}",
            self.trunc()
        );
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc(), "cannot extend a truncated series");
        QSeries {
            coeffs: self.coeffs[..=trunc].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, if all denominators are 1.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigRat) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Least common multiple of the denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Rescale to a primitive integer series (content 1) with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        let Some(v) = self.valuation() else {
            return self.clone();
        };
        let l = self.denominator_lcm();
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if ints[v].is_negative() {
            g = -g;
        }
        Self::from_ints(ints.into_iter().map(|x| x / &g))
    }

    /// Linear combination `sum c_i s_i`; all series must share the same truncation.
    pub fn linear_combination(terms: &[(BigRat, &QSeries)]) -> Self {
        let t = terms
            .iter()
            .map(|(_, s)| s.trunc())
            .min()
            .expect("nonempty combination");
        let mut out = Self::zero(t);
        for (c, s) in terms {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.coeffs.iter_mut().zip(&s.coeffs) {
                if !x.is_zero() {
                    *o += x * c;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.trunc());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let t = self.trunc().min(other.trunc());
        let len = t + 1;
        let la = self.coeffs[..len]
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1);
        let lb = other.coeffs[..len]
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1);
        if la.min(lb) <= 24 {
            let mut out = vec![BigRat::zero(); len];
            for (i, x) in self.coeffs[..la].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in other.coeffs[..lb.min(len - i)].iter().enumerate() {
                    if !y.is_zero() {
                        out[i + j] += x * y;
                    }
                }
            }
            return QSeries { coeffs: out };
        }
        // Clear denominators and multiply integer series modularly.
        let da = self.truncate(t).denominator_lcm();
        let db = other.truncate(t).denominator_lcm();
        let ia: Vec<BigInt> = self.coeffs[..la]
            .iter()
            .map(|c| (c * &da).to_integer())
            .collect();
        let prod = if core::ptr::eq(self, other) {
            ntt::mul_bigint(&ia, &ia, len)
        } else {
            let ib: Vec<BigInt> = other.coeffs[..lb]
                .iter()
                .map(|c| (c * &db).to_integer())
                .collect();
            ntt::mul_bigint(&ia, &ib, len)
        };
        let den = da * db;
        let coeffs = if den.is_one() {
            prod.into_iter().map(BigRat::from_integer).collect()
        } else {
            prod.into_iter()
                .map(|x| BigRat::new(x, den.clone()))
                .collect()
        };
        QSeries { coeffs }
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let t = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: (0..=t).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect(),
        }
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let t = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: (0..=t).map(|n| &self.coeffs[n] - &rhs.coeffs[n]).collect(),
        }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        self.mul_impl(rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for QSeries {
    type Output = QSeries;
    fn add(self, rhs: QSeries) -> QSeries {
        &self + &rhs
    }
}

impl Sub for QSeries {
    type Output = QSeries;
    fn sub(self, rhs: QSeries) -> QSeries {
        &self - &rhs
    }
}

impl Mul for QSeries {
    type Output = QSeries;
    fn mul(self, rhs: QSeries) -> QSeries {
        &self * &rhs
    }
}

pub fn qs_add(a: &QSeries, b: &QSeries) -> QSeries {
    a + b
}

pub fn qs_mul(a: &QSeries, b: &QSeries) -> QSeries {
    a * b
}

pub fn qs_pow(a: &QSeries, e: u32) -> QSeries {
    a.pow(e)
}

pub fn rat(n: i64, d: i64) -> BigRat {
    BigRat::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRat {
    BigRat::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(t: usize) -> QSeries {
        let mut terms = vec![(0, 1)];
        let mut m = 1;
        while m * m <= t {
            terms.push((m * m, 2));
            m += 1;
        }
        QSeries::sparse(t, &terms)
    }

    #[test]
    fn trivial_identities() {
        let a = QSeries::from_i64s(&[1, 1, 0]);
        let b = QSeries::from_i64s(&[1, -1, 0]);
        assert_eq!(qs_add(&a, &b), QSeries::from_i64s(&[2, 0, 0]));
        assert_eq!(qs_mul(&a, &b), QSeries::from_i64s(&[1, 0, -1]));
        assert_eq!(qs_add(&a, &QSeries::zero(2)), a);
        assert_eq!(qs_mul(&a, &QSeries::one(2)), a);
        assert_eq!(qs_pow(&a, 0), QSeries::one(2));
        assert_eq!(qs_pow(&a, 2), QSeries::from_i64s(&[1, 2, 1]));
    }

    #[test]
    fn mixed_trunc_takes_min() {
        let a = QSeries::from_i64s(&[1, 2, 3, 4]);
        let b = QSeries::from_i64s(&[1, 1]);
        assert_eq!((&a + &b).trunc(), 1);
        assert_eq!((&a * &b).trunc(), 1);
        assert!(a.get(4).is_none());
    }

    // r_2(n) and r_4(n) by brute force over lattice points.
    fn r(k: u32, n: i64) -> i64 {
        let b = 3i64;
        let mut c = 0;
        let total = (2 * b + 1).pow(k);
        for idx in 0..total {
            let mut i = idx;
            let mut s = 0;
            for _ in 0..k {
                let x = i % (2 * b + 1) - b;
                i /= 2 * b + 1;
                s += x * x;
            }
            if s == n {
                c += 1;
            }
        }
        c
    }

    #[test]
    fn theta_powers_count_lattice_points() {
        let t = theta(8);
        assert_eq!(&t + &t, QSeries::sparse(8, &[(0, 2), (1, 4), (4, 4)]));
        let t2 = &t * &t;
        let t4 = t.pow(4);
        for n in 0..=8 {
            assert_eq!(t2.coeff(n), &int(r(2, n as i64)), "r2({n})");
            assert_eq!(t4.coeff(n), &int(r(4, n as i64)), "r4({n})");
        }
        assert_eq!(t4.coeff(1), &int(8));
    }

    #[test]
    fn long_products_agree_with_schoolbook() {
        let t = theta(400);
        let f = QSeries::from_coeffs(
            (0..=400)
                .map(|n| rat(n as i64 % 7 - 3, 1 + n as i64 % 4))
                .collect(),
        );
        let fast = &t.pow(3) * &f;
        let mut slow = vec![BigRat::zero(); 401];
        let t3 = t.pow(3);
        for i in 0..=400 {
            for j in 0..=400 - i {
                slow[i + j] += t3.coeff(i) * f.coeff(j);
            }
        }
        assert_eq!(fast, QSeries::from_coeffs(slow));
    }

    #[test]
    fn primitive_scaling() {
        let s = QSeries::from_coeffs(vec![int(0), rat(-2, 3), rat(4, 9)]);
        assert_eq!(s.primitive(), QSeries::from_i64s(&[0, 3, -2]));
    }
}
