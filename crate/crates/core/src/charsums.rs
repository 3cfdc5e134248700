//! Kronecker symbols, Kloosterman sums, Gauss-type sums and the twisted
//! character sums and Poisson identities built from them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{self, gcd, inv_mod};
use crate::{Error, Result};

/// A computed exponential sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharSumResult {
    pub value: Complex64,
    pub terms: u64,
    /// True when the value comes from an exact closed form rather than
    /// floating summation.
    pub exact: bool,
}

impl CharSumResult {
    fn summed(value: Complex64, terms: u64) -> Self {
        CharSumResult {
            value,
            terms,
            exact: false,
        }
    }
}

/// e(a/c) with the fraction reduced first.
pub fn e_frac(a: i64, c: i64) -> Complex64 {
    let r = a.rem_euclid(c) as f64 / c as f64;
    let t = 2.0 * PI * r;
    Complex64::new(libm::cos(t), libm::sin(t))
}

/// Jacobi symbol (a/n) for odd n > 0.
pub fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        core::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// The Kronecker symbol (d/n), extended to all integers n.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut res = 1;
    let mut m = n;
    if m < 0 {
        m = -m;
        if d < 0 {
            res = -res;
        }
    }
    let v = m.trailing_zeros();
    m >>= v;
    if v > 0 {
        let r2 = match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        if r2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            res *= r2;
        }
    }
    res * jacobi(d, m as u64)
}

/// S(m, n; c) by direct summation.
pub fn kloosterman(m: i64, n: i64, c: u64) -> CharSumResult {
    let ci = c as i64;
    let mut s = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for x in 0..ci {
        if gcd(x as u64, c) != 1 {
            continue;
        }
        let xb = inv_mod(x, ci).unwrap_or(0);
        let a = (m.rem_euclid(ci) * x + n.rem_euclid(ci) * xb) % ci;
        s += e_frac(a, ci);
        terms += 1;
    }
    CharSumResult::summed(Complex64::new(s.re, s.im), terms)
}

/// The plus-space Kloosterman sum K⁺ for weight κ = k + 1/2, depending on k mod 2.
pub fn kloosterman_plus(kappa_parity: u32, m: i64, n: i64, c: u64) -> CharSumResult {
    let factor = if !c.is_multiple_of(4) {
        return CharSumResult {
            value: Complex64::new(0.0, 0.0),
            terms: 0,
            exact: true,
        };
    } else if !c.is_multiple_of(8) {
        2.0
    } else {
        1.0
    };
    let ci = c as i64;
    // ε_d^{2k+1} = 1 or i(-1)^k.
    let eps3 = if kappa_parity.is_multiple_of(2) {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(0.0, -1.0)
    };
    let mut s = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for d in 1..ci {
        if gcd(d as u64, c) != 1 {
            continue;
        }
        let chi = kronecker(ci, d);
        if chi == 0 {
            continue;
        }
        let db = inv_mod(d, ci).unwrap();
        let a = (m.rem_euclid(ci) * d + n.rem_euclid(ci) * db) % ci;
        let eps = if d % 4 == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            eps3
        };
        s += eps * (chi as f64) * e_frac(a, ci);
        terms += 1;
    }
    CharSumResult::summed(s * factor, terms)
}

/// ((1 + i)/2 + (-1/n)(1 - i)/2): the factor taking G_ℓ(n) to τ_ℓ(n).
fn tau_prefactor(n: u64) -> Complex64 {
    if n % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// τ_ℓ(n) = Σ_{b mod n} (b/n) e(ℓb/n) by direct summation.
pub fn gauss_tau_bruteforce(l: i64, n: u64) -> Result<Complex64> {
    if n.is_multiple_of(2) || n == 0 {
        return Err(Error::Domain("Gauss-type sum needs odd n".into()));
    }
    let ni = n as i64;
    let mut s = Complex64::new(0.0, 0.0);
    let lr = l.rem_euclid(ni);
    for b in 0..ni {
        let chi = jacobi(b, n);
        if chi != 0 {
            s += e_frac(lr * b % ni, ni) * chi as f64;
        }
    }
    Ok(s)
}

/// G_ℓ(n) by direct summation, i.e. τ_ℓ(n) divided by its prefactor.
pub fn gauss_g_bruteforce(l: i64, n: u64) -> Result<Complex64> {
    Ok(gauss_tau_bruteforce(l, n)? / tau_prefactor(n))
}

/// G_ℓ(p^β) from the prime-power table.
pub fn gauss_g_prime_power(l: i64, p: u64, beta: u32) -> f64 {
    if beta == 0 {
        return 1.0;
    }
    let alpha = if l == 0 {
        u32::MAX
    } else {
        arith::valuation(l.unsigned_abs(), p)
    };
    let pf = p as f64;
    if beta <= alpha {
        if beta % 2 == 1 {
            0.0
        } else {
            arith::euler_phi(p.pow(beta)) as f64
        }
    } else if beta == alpha + 1 {
        let pa = libm::pow(pf, alpha as f64);
        if beta.is_multiple_of(2) {
            -pa
        } else {
            let unit = l / (p.pow(alpha) as i64);
            jacobi(unit, p) as f64 * pa * libm::sqrt(pf)
        }
    } else {
        0.0
    }
}

/// G_ℓ(n) from the table and multiplicativity.
pub fn gauss_g_formula(l: i64, n: u64) -> Result<f64> {
    if n.is_multiple_of(2) || n == 0 {
        return Err(Error::Domain("Gauss-type sum needs odd n".into()));
    }
    Ok(arith::factorize(n)
        .iter()
        .map(|&(p, b)| gauss_g_prime_power(l, p, b))
        .product())
}

/// τ_ℓ(n) from the table: multiplicativity applies to G, then one prefactor.
pub fn gauss_tau_formula(l: i64, n: u64) -> Result<Complex64> {
    Ok(tau_prefactor(n) * gauss_g_formula(l, n)?)
}

/// The character sum over x, w mod [c, d] of χ_d(x)χ_d(w) S(x, w; c) e((xv + wη)/[c, d]).
pub fn twisted_charsum(d: u64, c: u64, v: u64, eta: u64) -> Result<CharSumResult> {
    if d.is_multiple_of(2) || !arith::is_squarefree(d) || c == 0 {
        return Err(Error::Precondition(
            "d must be odd squarefree and c positive".into(),
        ));
    }
    let l = arith::lcm(c, d);
    if (v as u128) * (eta as u128) * (c as u128).pow(2) != (l as u128).pow(2) {
        return Err(Error::Precondition("v·η must equal [c,d]²/c²".into()));
    }
    let (li, ci) = (l as i64, c as i64);
    // S(x, w; c) depends on x, w mod c.
    let table: Vec<Complex64> = (0..ci)
        .flat_map(|x| (0..ci).map(move |w| kloosterman(x, w, c).value))
        .collect();
    let chi: Vec<i32> = (0..li).map(|x| jacobi(x, d)).collect();
    let ev: Vec<Complex64> = (0..li).map(|x| e_frac(x * v as i64 % li, li)).collect();
    let ee: Vec<Complex64> = (0..li).map(|w| e_frac(w * eta as i64 % li, li)).collect();
    let mut s = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for x in 0..li {
        if chi[x as usize] == 0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for w in 0..li {
            if chi[w as usize] == 0 {
                continue;
            }
            inner +=
                table[((x % ci) * ci + w % ci) as usize] * ee[w as usize] * chi[w as usize] as f64;
            terms += 1;
        }
        s += inner * ev[x as usize] * chi[x as usize] as f64;
    }
    Ok(CharSumResult::summed(s, terms))
}

/// The stated closed form for `twisted_charsum`: 0 unless d | c, else c²φ(d)/d.
pub fn twisted_charsum_reference(d: u64, c: u64) -> f64 {
    if !c.is_multiple_of(d) {
        0.0
    } else {
        (c * c) as f64 * arith::euler_phi(d) as f64 / d as f64
    }
}

/// The value direct summation produces: 0 unless d | c, else (c²/d)·c_d(c/d)
/// with the Ramanujan sum c_d(n) = ∏_{p|d} (p - 1 if p | n, else -1) for
/// squarefree d. This is μ(d)c²/d when (d, c/d) = 1 and c²φ(d)/d when d² | c.
pub fn twisted_charsum_ramanujan(d: u64, c: u64) -> f64 {
    if !c.is_multiple_of(d) {
        return 0.0;
    }
    let n = c / d;
    let r: i64 = arith::factorize(d)
        .iter()
        .map(|&(p, _)| {
            if n.is_multiple_of(p) {
                p as i64 - 1
            } else {
                -1
            }
        })
        .product();
    (c * c) as f64 / d as f64 * r as f64
}

/// Admissible (v, η) with v·η = [c, d]²/c².
pub fn admissible_pairs(d: u64, c: u64) -> Vec<(u64, u64)> {
    let l = arith::lcm(c, d);
    let r = (l / c) * (l / c);
    arith::divisors(r).into_iter().map(|v| (v, r / v)).collect()
}

/// F(x) = exp(-(x/w)²) and its Fourier transform w√π exp(-(πwξ)²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTest {
    pub width: f64,
}

impl GaussianTest {
    pub fn f(&self, x: f64) -> f64 {
        let t = x / self.width;
        libm::exp(-t * t)
    }

    pub fn f_hat(&self, xi: f64) -> f64 {
        let t = PI * self.width * xi;
        self.width * libm::sqrt(PI) * libm::exp(-t * t)
    }

    /// Smallest R with F(x) < tol for |x| > R.
    fn support(&self, tol: f64) -> f64 {
        self.width * libm::sqrt(-libm::log(tol))
    }
}

/// Both sides of the twisted Poisson formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonCheck {
    pub lhs: f64,
    pub rhs: Complex64,
    pub residual: f64,
    pub d_range: i64,
    pub l_range: i64,
}

/// Σ_{d ≡ η (q)} (d/n) F(d) against (1/qn)(q/n) Σ_ℓ F̂(ℓ/nq) e(ℓηn̄/q) τ_ℓ(n).
pub fn twisted_poisson_residual(n: u64, q: u64, eta: i64, f: GaussianTest) -> Result<PoissonCheck> {
    if n.is_multiple_of(2) || gcd(n, q) != 1 || gcd(eta.unsigned_abs(), q) != 1 {
        return Err(Error::Precondition(
            "need n odd, (n, q) = 1 and η a unit mod q".into(),
        ));
    }
    let (ni, qi) = (n as i64, q as i64);
    let tol = 1e-16;
    let d_range = libm::ceil(f.support(tol)) as i64 + qi;
    let mut lhs = 0.0;
    let start = -d_range + (eta - (-d_range)).rem_euclid(qi);
    let mut d = start;
    while d <= d_range {
        lhs += kronecker(d, ni) as f64 * f.f(d as f64);
        d += qi;
    }
    // F̂(ℓ/nq) < tol once π w ℓ/(nq) > sqrt(-log tol).
    let l_range =
        libm::ceil(libm::sqrt(-libm::log(tol)) * (n * q) as f64 / (PI * f.width)) as i64 + 1;
    let nbar = inv_mod(ni, qi).unwrap_or(0);
    let taus: Vec<Complex64> = (0..ni)
        .map(|l| gauss_tau_bruteforce(l, n))
        .collect::<Result<_>>()?;
    let mut s = Complex64::new(0.0, 0.0);
    for l in -l_range..=l_range {
        let fh = f.f_hat(l as f64 / (n * q) as f64);
        if fh == 0.0 {
            continue;
        }
        s += e_frac(l * eta % qi * nbar, qi) * taus[l.rem_euclid(ni) as usize] * fh;
    }
    let rhs = s * (kronecker(qi, ni) as f64 / (n * q) as f64);
    let residual = (Complex64::new(lhs, 0.0) - rhs).norm();
    Ok(PoissonCheck {
        lhs,
        rhs,
        residual,
        d_range,
        l_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_small() {
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(1, -7), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(12, 3), 0);
        assert_eq!(kronecker(-4, 3), -1);
    }

    #[test]
    fn kloosterman_small() {
        assert!((kloosterman(1, 1, 2).value.re - 1.0).abs() < 1e-12);
        assert!((kloosterman(0, 0, 12).value.re - 4.0).abs() < 1e-12);
        assert_eq!(kloosterman_plus(0, 1, 1, 6).value, Complex64::new(0.0, 0.0));
    }
}
