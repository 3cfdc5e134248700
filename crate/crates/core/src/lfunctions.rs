//! Central values of quadratic twists by the approximate functional equation,
//! harmonic weights from the Petersson formula, and the Waldspurger relation
//! between plus-space coefficients and twisted L-values.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::arith;
use crate::charsums::{e_frac, kloosterman, kloosterman_plus, kronecker};
use crate::classical::{self, lambda_f, EigenData};
use crate::halfint::{self, EigenPair};
use crate::linalg;
use crate::specfun::{bessel_j, bessel_majorant, PrecisionBudget, VTable};
use crate::{Error, Result};

/// L(1/2, f⊗χ_d) with its truncation data.
#[derive(Clone, Debug, PartialEq)]
pub struct LValueRecord {
    pub f_id: String,
    pub weight: u32,
    pub d: i64,
    pub value: f64,
    pub m_max: usize,
    pub err_budget: f64,
    /// |L(m_max) - L(2 m_max)|.
    pub residual: f64,
    /// Set when the root number is -1 and the value is 0 without computation.
    pub declared_zero: bool,
}

/// Root number of f⊗χ_d for f of level one and weight 2k: (-1)^k sign(d).
pub fn root_number(weight: u32, d: i64) -> i32 {
    let s = if (weight / 2).is_multiple_of(2) {
        1
    } else {
        -1
    };
    if d > 0 {
        s
    } else {
        -s
    }
}

/// The AFE weight V_k for one weight, tabulated in log x.
#[derive(Clone, Debug)]
pub struct AfeKernel {
    pub weight: u32,
    table: VTable,
    /// (u, ∫_u^∞ V(e^t)² dt) on a descending grid.
    tail: Vec<(f64, f64)>,
}

const TAIL_STEP: f64 = 1.0 / 16.0;

impl AfeKernel {
    pub fn new(weight: u32) -> Result<Self> {
        let k = weight / 2;
        if k < 2 {
            return Err(Error::Domain(format!("no AFE kernel for weight {weight}")));
        }
        let centre = libm::log(k as f64 / (2.0 * PI));
        let (lo, hi) = (-8.0, centre + 18.0);
        let table = VTable::new(k, lo, hi)?;
        // Cumulative ∫_u^∞ V(e^t)² dt on a grid, from the top down.
        let n = libm::ceil((hi - centre) / TAIL_STEP) as usize;
        let mut tail = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let sq = |u: f64| {
            let v = table.eval(libm::exp(u));
            v * v
        };
        let mut prev = sq(hi);
        tail.push((hi, 0.0));
        for i in 1..=n {
            let u = hi - i as f64 * TAIL_STEP;
            let v = sq(u);
            acc += 0.5 * (v + prev) * TAIL_STEP;
            prev = v;
            tail.push((u, acc));
        }
        Ok(AfeKernel {
            weight,
            table,
            tail,
        })
    }

    pub fn k(&self) -> u32 {
        self.weight / 2
    }

    pub fn v(&self, x: f64) -> f64 {
        self.table.eval(x)
    }

    /// Truncation point for |d| and an error budget: with λ_f(m)χ_d(m) treated
    /// as random signs of mean square 1, the omitted sum 2Σ_{m>M} has standard
    /// deviation 2(∫_{M/|d|}^∞ V(x)² dx/x)^{1/2}; M is the least point where
    /// four of those stay below half the budget.
    pub fn m_max(&self, d_abs: u64, err_budget: f64) -> usize {
        let target = err_budget / 2.0;
        let mut u_star = self.tail[0].0;
        for &(u, t) in &self.tail {
            if 8.0 * libm::sqrt(t) > target {
                break;
            }
            u_star = u;
        }
        (libm::ceil(libm::exp(u_star) * d_abs as f64) as usize).max(1)
    }

    /// Length of λ table needed for a record (value and doubled check).
    pub fn required_len(&self, d_abs: u64, err_budget: f64) -> usize {
        2 * self.m_max(d_abs, err_budget) + 1
    }

    /// w(m) = χ_d(m) V(m/|d|) / √m for 0 ≤ m < len (w(0) = 0).
    pub fn twist_weights(&self, d: i64, len: usize) -> Vec<f64> {
        let da = d.unsigned_abs() as f64;
        let mut w = vec![0.0; len];
        for (m, x) in w.iter_mut().enumerate().skip(1) {
            let chi = kronecker(d, m as i64);
            if chi != 0 {
                *x = chi as f64 * self.v(m as f64 / da) / libm::sqrt(m as f64);
            }
        }
        w
    }
}

fn dot(a: &[f64], b: &[f64], upto: usize) -> f64 {
    // Pairwise blocks keep the rounding error of long sums small.
    a[1..=upto]
        .chunks(4096)
        .zip(b[1..=upto].chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

/// L(1/2, f⊗χ_d) for several forms of one weight sharing the twist weights.
/// `lambdas[i]` holds λ_{f_i}(m) for 0 ≤ m < len.
pub fn l_central_twists(
    fs: &[EigenData],
    lambdas: &[Vec<f64>],
    d: i64,
    err_budget: f64,
    kernel: &AfeKernel,
) -> Result<Vec<LValueRecord>> {
    if d == 0 || !arith::is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!(
            "{d} is not a fundamental discriminant"
        )));
    }
    let weight = kernel.weight;
    let record = |f: &EigenData, value, m_max, residual, declared_zero| LValueRecord {
        f_id: f.id.clone(),
        weight,
        d,
        value,
        m_max,
        err_budget,
        residual,
        declared_zero,
    };
    if root_number(weight, d) < 0 {
        return Ok(fs.iter().map(|f| record(f, 0.0, 0, 0.0, true)).collect());
    }
    let m_max = kernel.m_max(d.unsigned_abs(), err_budget);
    let need = 2 * m_max + 1;
    if let Some(short) = lambdas.iter().find(|l| l.len() < need) {
        return Err(Error::CoefficientShortage {
            needed: need,
            have: short.len(),
        });
    }
    let w = kernel.twist_weights(d, need);
    Ok(fs
        .iter()
        .zip(lambdas)
        .map(|(f, lam)| {
            let short = 2.0 * dot(&w, lam, m_max);
            let long = 2.0 * dot(&w, lam, 2 * m_max);
            record(f, long, m_max, (short - long).abs(), false)
        })
        .collect())
}

pub fn l_central_twist(
    f: &EigenData,
    lambda: &[f64],
    d: i64,
    err_budget: f64,
    kernel: &AfeKernel,
) -> Result<LValueRecord> {
    let mut v = l_central_twists(
        core::slice::from_ref(f),
        &[lambda.to_vec()],
        d,
        err_budget,
        kernel,
    )?;
    Ok(v.remove(0))
}

/// Least C with Σ_{c>C} |S(m,n;c)|/c |J_ν(x/c)| ≤ tol, bounding |S| ≤ c and
/// |J_ν(y)| ≤ (y/2)^ν/Γ(ν+1).
pub fn kloosterman_cutoff(nu: f64, x: f64, tol: f64) -> u64 {
    let mut c = 1u64;
    loop {
        // Σ_{c'>c} c'^{-ν} ≤ c^{1-ν}/(ν-1).
        let bound = bessel_majorant(nu, x) * libm::pow(c as f64, 1.0 - nu) / (nu - 1.0);
        if bound <= tol || c > 1_000_000 {
            return c;
        }
        c += 1;
    }
}

/// 2π i^{2k} Σ_{c ≤ C} S(m,n;c)/c J_{2k-1}(4π√(mn)/c), with C from the tail bound.
pub fn petersson_geometric(weight: u32, m: u64, n: u64, tol: f64) -> Result<(f64, u64)> {
    let nu = weight as f64 - 1.0;
    let x = 4.0 * PI * libm::sqrt((m * n) as f64);
    let c_max = kloosterman_cutoff(nu, x, tol / (2.0 * PI));
    let budget = PrecisionBudget::with_abs(tol * 1e-3);
    let mut s = 0.0;
    for c in 1..=c_max {
        let k = kloosterman(m as i64, n as i64, c).value.re;
        if k != 0.0 {
            s += k / c as f64 * bessel_j(nu, x / c as f64, budget)?;
        }
    }
    let sign = if (weight / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Ok((2.0 * PI * sign * s, c_max))
}

/// Harmonic weights ω_f for one weight.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicWeights {
    pub weight: u32,
    pub ids: Vec<String>,
    pub omega: Vec<f64>,
    pub c_max: u64,
    pub tol: f64,
}

impl HarmonicWeights {
    pub fn sum(&self) -> f64 {
        self.omega.iter().sum()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ids.iter().position(|i| i == id).map(|i| self.omega[i])
    }
}

/// Solve Σ_f ω_f λ_f(n) = δ_{n,1} + (geometric side at (1, n)), n = 1..dim.
pub fn omega_f_solve(eigens: &[EigenData], tol: f64) -> Result<HarmonicWeights> {
    let Some(first) = eigens.first() else {
        return Err(Error::Precondition("empty cusp space".into()));
    };
    let weight = first.weight;
    let dim = eigens.len();
    if eigens.iter().any(|f| f.trunc() < dim) {
        return Err(Error::CoefficientShortage {
            needed: dim,
            have: eigens.iter().map(|f| f.trunc()).min().unwrap_or(0),
        });
    }
    let mut a = vec![vec![0.0; dim]; dim];
    let mut b = vec![0.0; dim];
    let mut c_max = 0;
    for n in 1..=dim {
        for (j, f) in eigens.iter().enumerate() {
            a[n - 1][j] = lambda_f(f, n);
        }
        let (g, c) = petersson_geometric(weight, 1, n as u64, tol)?;
        c_max = c_max.max(c);
        b[n - 1] = if n == 1 { 1.0 } else { 0.0 } + g;
    }
    let omega = linalg::solve_f64(&a, &b, 1e-10)
        .ok_or_else(|| Error::IllConditioned(format!("λ matrix at weight {weight}")))?;
    if omega.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::IllConditioned(format!(
            "nonpositive harmonic weight at weight {weight}"
        )));
    }
    Ok(HarmonicWeights {
        weight,
        ids: eigens.iter().map(|f| f.id.clone()).collect(),
        omega,
        c_max,
        tol,
    })
}

/// L(1, sym² f) = 2π²/((2k-1) ω_f), with 2k the weight.
pub fn sym2_l1(weight: u32, omega: f64) -> f64 {
    2.0 * PI * PI / ((weight as f64 - 1.0) * omega)
}

/// Spectral minus geometric side of the Petersson formula at (m, n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceResidual {
    pub m: u64,
    pub n: u64,
    pub spectral: f64,
    pub geometric: f64,
    pub residual: f64,
}

pub fn petersson_residual(
    eigens: &[EigenData],
    w: &HarmonicWeights,
    m: u64,
    n: u64,
) -> Result<TraceResidual> {
    let spectral: f64 = eigens
        .iter()
        .zip(&w.omega)
        .map(|(f, o)| o * lambda_f(f, m as usize) * lambda_f(f, n as usize))
        .sum();
    let (g, _) = petersson_geometric(w.weight, m, n, w.tol)?;
    let geometric = if m == n { 1.0 } else { 0.0 } + g;
    Ok(TraceResidual {
        m,
        n,
        spectral,
        geometric,
        residual: (spectral - geometric).abs(),
    })
}

/// α_g fixed from one reference discriminant.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaG {
    pub g_id: String,
    pub alpha: f64,
    pub reference_d: i64,
}

/// α_g = ω_f L(1/2, f⊗χ_ref)/c_g(|ref|)².
pub fn alpha_g_fix(pair: &EigenPair, omega: f64, l_ref: &LValueRecord) -> Result<AlphaG> {
    let d = l_ref.d;
    if root_number(pair.f.weight, d) < 0 {
        return Err(Error::Precondition(format!(
            "(-1)^k d < 0 for reference {d}"
        )));
    }
    let c = halfint::normalized_coeff(&pair.g, d.unsigned_abs() as usize);
    if c == 0.0 {
        return Err(Error::ZeroCoefficient(format!(
            "c_g({}) = 0 for {}",
            d.unsigned_abs(),
            pair.g.id
        )));
    }
    Ok(AlphaG {
        g_id: pair.g.id.clone(),
        alpha: omega * l_ref.value / (c * c),
        reference_d: d,
    })
}

/// |(c_g(|d1|)²/c_g(|d2|)²)/(L1/L2) - 1|.
pub fn waldspurger_ratio_check(
    pair: &EigenPair,
    l1: &LValueRecord,
    l2: &LValueRecord,
) -> Result<f64> {
    for l in [l1, l2] {
        if l.value.abs() <= l.err_budget {
            return Err(Error::DivisionByZero(format!(
                "L(1/2, f⊗χ_{}) is below its error budget",
                l.d
            )));
        }
    }
    let r = halfint::coeff_ratio(
        &pair.g,
        l1.d.unsigned_abs() as usize,
        l2.d.unsigned_abs() as usize,
    )?;
    Ok(((r * r) / (l1.value / l2.value) - 1.0).abs())
}

/// Σ_{ℓ ≤ L, ℓ odd squarefree} μ(ℓ)λ_f(ℓ)χ_d(ℓ)ℓ^{-1/2}(1 - log ℓ/log L).
pub fn mollifier_value(lambda: &[f64], d: i64, l_len: usize) -> Result<f64> {
    if l_len == 0 {
        return Err(Error::Domain("mollifier length must be at least 1".into()));
    }
    if lambda.len() <= l_len {
        return Err(Error::CoefficientShortage {
            needed: l_len + 1,
            have: lambda.len(),
        });
    }
    if l_len == 1 {
        return Ok(1.0);
    }
    let log_l = libm::log(l_len as f64);
    let mut s = 0.0;
    for l in (1..=l_len).step_by(2) {
        let mu = arith::mobius(l as u64);
        if mu == 0 {
            continue;
        }
        let chi = kronecker(d, l as i64);
        if chi == 0 {
            continue;
        }
        let taper = 1.0 - libm::log(l as f64) / log_l;
        s += (mu * chi as i64) as f64 * lambda[l] / libm::sqrt(l as f64) * taper;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonvanishingRow {
    pub k: u32,
    pub forms: usize,
    pub nonzero: usize,
    pub mass: f64,
    pub nonzero_mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonvanishingReport {
    pub d: i64,
    pub rows: Vec<NonvanishingRow>,
    pub natural: f64,
    pub harmonic: f64,
}

/// Proportion of plus eigenforms with c_g(|d|) ≠ 0 (exact test), plain and
/// weighted by ω_f, over the k with (-1)^k d > 0.
pub fn nonvanishing_experiment(ks: &[u32], d: i64, tol: f64) -> Result<NonvanishingReport> {
    let da = d.unsigned_abs() as usize;
    let mut rows = Vec::new();
    for &k in ks {
        if root_number(2 * k, d) < 0 || classical::dim_cusp(2 * k) == 0 {
            continue;
        }
        let pairs = halfint::eigenbasis_plus(k, da + 1)?;
        let fs: Vec<EigenData> = pairs.iter().map(|p| p.f.clone()).collect();
        let w = omega_f_solve(&fs, tol)?;
        let mut row = NonvanishingRow {
            k,
            forms: pairs.len(),
            nonzero: 0,
            mass: 0.0,
            nonzero_mass: 0.0,
        };
        for (p, o) in pairs.iter().zip(&w.omega) {
            row.mass += o;
            if !p.g.field.is_zero(p.g.coeff(da)) {
                row.nonzero += 1;
                row.nonzero_mass += o;
            }
        }
        rows.push(row);
    }
    let (n, t) = rows
        .iter()
        .fold((0, 0), |(a, b), r| (a + r.nonzero, b + r.forms));
    let (hm, ht) = rows
        .iter()
        .fold((0.0, 0.0), |(a, b), r| (a + r.nonzero_mass, b + r.mass));
    Ok(NonvanishingReport {
        d,
        rows,
        natural: if t == 0 { 0.0 } else { n as f64 / t as f64 },
        harmonic: if ht == 0.0 { 0.0 } else { hm / ht },
    })
}

/// 2π e(-κ/4) Σ_{c ≤ C} K⁺(m,n;c)/c J_{κ-1}(4π√(mn)/c) for κ = k + 1/2.
pub fn half_petersson_geometric(k: u32, m: u64, n: u64, tol: f64) -> Result<(Complex64, u64)> {
    let nu = k as f64 - 0.5;
    let x = 4.0 * PI * libm::sqrt((m * n) as f64);
    // |K⁺| ≤ 2c.
    let c_max = kloosterman_cutoff(nu, x, tol / (4.0 * PI));
    let budget = PrecisionBudget::with_abs(tol * 1e-3);
    let mut s = Complex64::new(0.0, 0.0);
    for c in (4..=c_max).step_by(4) {
        let kp = kloosterman_plus(k % 2, m as i64, n as i64, c).value;
        s += kp / c as f64 * bessel_j(nu, x / c as f64, budget)?;
    }
    // e(-κ/4) = e(-(2k+1)/8).
    Ok((s * e_frac(-(2 * k as i64 + 1), 8) * (2.0 * PI), c_max))
}

/// Σ_g α_g c_g(m) c_g(n) against (2/3)(δ_{m,n} + geometric).
pub fn half_petersson_residual(
    pairs: &[EigenPair],
    alphas: &[AlphaG],
    m: u64,
    n: u64,
    tol: f64,
) -> Result<TraceResidual> {
    let k = pairs
        .first()
        .map(|p| p.k())
        .ok_or_else(|| Error::Precondition("no eigenforms".into()))?;
    let spectral: f64 = pairs
        .iter()
        .zip(alphas)
        .map(|(p, a)| {
            a.alpha
                * halfint::normalized_coeff(&p.g, m as usize)
                * halfint::normalized_coeff(&p.g, n as usize)
        })
        .sum();
    let (g, _) = half_petersson_geometric(k, m, n, tol)?;
    let geometric = 2.0 / 3.0 * (if m == n { 1.0 } else { 0.0 } + g.re);
    Ok(TraceResidual {
        m,
        n,
        spectral,
        geometric,
        residual: (spectral - geometric).abs(),
    })
}
