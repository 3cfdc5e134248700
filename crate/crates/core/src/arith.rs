//! Elementary integer arithmetic.

use alloc::vec;
use alloc::vec::Vec;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists. Result in `[0, m)`.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(s0.rem_euclid(m))
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `<= n`.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i64 {
    let mut s = 1;
    for (_, e) in factorize(n) {
        if e > 1 {
            return 0;
        }
        s = -s;
    }
    s
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n != 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// `sigma_k(n)` for all `n <= len - 1` (entry 0 is 0).
pub fn sigma_table(k: u32, len: usize) -> Vec<u128> {
    let mut s = vec![0u128; len];
    for d in 1..len {
        let dk = (d as u128).pow(k);
        let mut m = d;
        while m < len {
            s[m] += dk;
            m += d;
        }
    }
    s
}

/// Largest power of `p` dividing `n` (n > 0).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return d == 1;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Which discriminants enter a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscriminantFilter {
    /// Every fundamental discriminant (and d = 1).
    Fundamental,
    /// Fundamental discriminants with d = 1 mod 16.
    Flat,
}

impl DiscriminantFilter {
    pub fn accepts(self, d: i64) -> bool {
        match self {
            DiscriminantFilter::Fundamental => is_fundamental_discriminant(d),
            DiscriminantFilter::Flat => d.rem_euclid(16) == 1 && is_fundamental_discriminant(d),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DiscriminantFilter::Fundamental => "fundamental",
            DiscriminantFilter::Flat => "flat",
        }
    }
}

/// Discriminants `d` with `(-1)^k d > 0`, `|d| <= bound`, accepted by the filter,
/// ordered by `|d|`.
pub fn discriminants_for(k: u32, bound: u64, filter: DiscriminantFilter) -> Vec<i64> {
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    (1..=bound as i64)
        .map(|a| sign * a)
        .filter(|&d| filter.accepts(d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(euler_phi(9), 6);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(num_divisors(12), 6);
        assert_eq!(divisors(12), [1, 2, 3, 4, 6, 12]);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(561));
    }

    #[test]
    fn fundamental() {
        let f: Vec<i64> = (-20..=20)
            .filter(|&d| is_fundamental_discriminant(d))
            .collect();
        assert_eq!(f, [-20, -19, -15, -11, -8, -7, -4, -3, 1, 5, 8, 12, 13, 17]);
        assert_eq!(
            discriminants_for(0, 40, DiscriminantFilter::Flat),
            [1, 17, 33]
        );
        assert_eq!(
            discriminants_for(1, 40, DiscriminantFilter::Flat),
            [-15, -31]
        );
    }

    #[test]
    fn sigma() {
        let s = sigma_table(1, 13);
        assert_eq!(s[12], 28);
        let s = sigma_table(5, 3);
        assert_eq!(s[2], 33);
    }
}
