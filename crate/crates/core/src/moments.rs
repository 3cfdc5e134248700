//! First and second moments of plus-space coefficients over weights and
//! discriminants, computed from coefficients and from L-values, and the
//! constants of their predicted main terms.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arith::{self, DiscriminantFilter};
use crate::classical::{self, EigenData};
use crate::halfint::{self, EigenPair};
use crate::lfunctions::{self, AfeKernel, HarmonicWeights, LValueRecord};
use crate::specfun::trapezoid;
use crate::{Error, Result};

/// G(0) from a truncated Euler product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerG0 {
    pub p_max: u64,
    /// Tail-accelerated value: (8/π²) ∏_{2<p≤p_max} (1 + 1/((p+1)²(p-1))).
    pub value: f64,
    /// Plain partial product ∏_{2<p≤p_max} (1 - 1/(p(p+1))).
    pub raw: f64,
    /// Σ_{p>p_max} p^{-2} bound on the relative tail of the plain product.
    pub raw_tail_bound: f64,
    /// Bound on the relative tail of the accelerated product, Σ_{n>p_max} n^{-3}.
    pub tail_bound: f64,
}

/// ∏_{p odd} (1 - p^{-2}(1 - p^{-1})/(1 - p^{-2})) truncated at p_max.
/// The factors equal (1 - p^{-2})(1 + 1/((p+1)²(p-1))), so pulling out
/// ∏_{p>2}(1 - p^{-2}) = 8/π² leaves a product with an O(p_max^{-2}) tail.
pub fn euler_g0(p_max: u64) -> EulerG0 {
    let (mut raw, mut acc) = (1.0f64, 1.0f64);
    let primes = if p_max >= 3 {
        arith::primes_up_to(p_max as usize)
    } else {
        Vec::new()
    };
    for &p in primes.iter().filter(|&&p| p > 2) {
        let pf = p as f64;
        raw *= 1.0 - 1.0 / (pf * (pf + 1.0));
        acc *= 1.0 + 1.0 / ((pf + 1.0) * (pf + 1.0) * (pf - 1.0));
    }
    let pm = p_max.max(2) as f64;
    let value = if p_max < 3 {
        1.0
    } else {
        8.0 / (PI * PI) * acc
    };
    EulerG0 {
        p_max,
        value,
        raw,
        raw_tail_bound: 1.0 / (pm - 1.0),
        tail_bound: 0.5 / (pm * pm),
    }
}

/// G'(0) = G(0) Σ_{p>2} -log p / ((p+1)²(p-1)(1 - 1/(p(p+1)))).
pub fn euler_g0_prime(p_max: u64) -> f64 {
    let g0 = euler_g0(p_max).value;
    let mut s = 0.0;
    for &p in arith::primes_up_to(p_max.max(2) as usize)
        .iter()
        .filter(|&&p| p > 2)
    {
        let pf = p as f64;
        s -= libm::log(pf)
            / ((pf + 1.0) * (pf + 1.0) * (pf - 1.0) * (1.0 - 1.0 / (pf * (pf + 1.0))));
    }
    g0 * s
}

/// B_{2j}/(2j)! for j = 1..8.
const BERN_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Euler's constant by Euler–Maclaurin on H_n - log n at n = 40.
pub fn euler_gamma() -> f64 {
    let n = 40u32;
    let h: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    let nf = n as f64;
    // γ = H_n - log n - 1/(2n) + Σ B_{2j}/(2j n^{2j}).
    let mut g = h - libm::log(nf) - 0.5 / nf;
    for (j, b) in BERN_FACT.iter().enumerate() {
        let m = 2 * (j + 1);
        // B_{2j}/(2j) = (B_{2j}/(2j)!)·(2j-1)!
        let fact: f64 = (1..m).map(|i| i as f64).product();
        g += b * fact / libm::pow(nf, m as f64);
    }
    g
}

/// ζ'(2) = -Σ log n/n² by Euler–Maclaurin at N = 30.
pub fn zeta_prime_2() -> f64 {
    let n = 30u32;
    let nf = n as f64;
    let mut s: f64 = (2..n)
        .map(|j| libm::log(j as f64) / (j as f64 * j as f64))
        .sum();
    let ln = libm::log(nf);
    s += (ln + 1.0) / nf + 0.5 * ln / (nf * nf);
    // f^{(m)}(x) = (-1)^m (m+1)! x^{-2-m} (log x - H_{m+1} + 1) for f = log x/x².
    for (j, b) in BERN_FACT.iter().enumerate() {
        let m = 2 * j + 1;
        let fact: f64 = (1..=m + 1).map(|i| i as f64).product();
        let h: f64 = (1..=m + 1).map(|i| 1.0 / i as f64).sum();
        let deriv = -fact * libm::pow(nf, -(2.0 + m as f64)) * (ln - h + 1.0);
        s -= b * deriv;
    }
    -s
}

/// ζ'(2)/ζ(2).
pub fn zeta_log_derivative_2() -> f64 {
    zeta_prime_2() / (PI * PI / 6.0)
}

/// The constant 𝒞 and its ingredients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantC {
    pub p_max: u64,
    pub g0: f64,
    pub g0_prime: f64,
    pub gamma: f64,
    pub zeta_ratio: f64,
    pub value: f64,
}

/// (log 2/3 + γ - ζ'(2)/ζ(2) - log 2π) G(0) + G'(0).
pub fn assemble_c(g0: f64, g0_prime: f64, gamma: f64, zeta_ratio: f64) -> f64 {
    (core::f64::consts::LN_2 / 3.0 + gamma - zeta_ratio - libm::log(2.0 * PI)) * g0 + g0_prime
}

pub fn constant_c(p_max: u64) -> ConstantC {
    let g0 = euler_g0(p_max).value;
    let g0_prime = euler_g0_prime(p_max);
    let gamma = euler_gamma();
    let zeta_ratio = zeta_log_derivative_2();
    ConstantC {
        p_max,
        g0,
        g0_prime,
        gamma,
        zeta_ratio,
        value: assemble_c(g0, g0_prime, gamma, zeta_ratio),
    }
}

/// exp(-1/(1 - t²)) on (-1, 1) moved to (centre - half_width, centre + half_width).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub centre: f64,
    pub half_width: f64,
    /// Multiplier applied to the profile.
    pub scale: f64,
}

impl Bump {
    /// The bump on [1, 2] with unit integral.
    pub fn unit() -> Self {
        let raw = Bump {
            centre: 1.5,
            half_width: 0.5,
            scale: 1.0,
        };
        Bump {
            scale: 1.0 / raw.integral(QUAD_NODES),
            ..raw
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.centre) / self.half_width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            self.scale * libm::exp(-1.0 / (1.0 - t * t))
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.centre - self.half_width, self.centre + self.half_width)
    }

    fn integral(&self, n: usize) -> f64 {
        let (a, b) = self.support();
        trapezoid(|x| self.eval(x), a, b, n)
    }

    fn log_moment(&self, n: usize) -> f64 {
        let (a, b) = self.support();
        trapezoid(
            |x| {
                if x > 0.0 {
                    self.eval(x) * libm::log(x)
                } else {
                    0.0
                }
            },
            a,
            b,
            n,
        )
    }
}

const QUAD_NODES: usize = 4000;

/// The weight function h and the discriminant function φ with the integrals
/// entering the main terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunctionPair {
    pub h: Bump,
    pub phi: Bump,
    pub h_hat0: f64,
    pub phi_hat0: f64,
    pub h_log: f64,
    pub phi_log: f64,
    /// Largest change of the four integrals when the node count is halved.
    pub quad_stability: f64,
}

impl TestFunctionPair {
    pub fn new(h: Bump, phi: Bump) -> Result<Self> {
        if h.support().0 <= 0.0 || phi.support().0 <= 0.0 {
            return Err(Error::Domain("test functions must live on (0, ∞)".into()));
        }
        let vals = |n| {
            [
                h.integral(n),
                phi.integral(n),
                h.log_moment(n),
                phi.log_moment(n),
            ]
        };
        let (fine, coarse) = (vals(QUAD_NODES), vals(QUAD_NODES / 2));
        let quad_stability = fine
            .iter()
            .zip(&coarse)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        Ok(TestFunctionPair {
            h,
            phi,
            h_hat0: fine[0],
            phi_hat0: fine[1],
            h_log: fine[2],
            phi_log: fine[3],
            quad_stability,
        })
    }

    pub fn standard() -> Self {
        Self::new(Bump::unit(), Bump::unit()).unwrap()
    }
}

/// Eigen data, harmonic weights and λ tables for one k.
#[derive(Clone, Debug)]
pub struct WeightData {
    pub k: u32,
    pub pairs: Vec<EigenPair>,
    pub omega: HarmonicWeights,
    pub kernel: AfeKernel,
    pub lambdas: Vec<Vec<f64>>,
    pub err_budget: f64,
}

impl WeightData {
    /// Everything needed for L-values with |d| ≤ d_max at the given budget.
    pub fn new(k: u32, d_max: u64, err_budget: f64, tol: f64) -> Result<Self> {
        Self::from_pairs(
            k,
            halfint::eigenbasis_plus(k, (d_max as usize).max(1))?,
            d_max,
            err_budget,
            tol,
        )
    }

    /// As [`WeightData::new`] with the eigenforms already at hand.
    pub fn from_pairs(
        k: u32,
        pairs: Vec<EigenPair>,
        d_max: u64,
        err_budget: f64,
        tol: f64,
    ) -> Result<Self> {
        if pairs.iter().any(|p| p.k() != k) {
            return Err(Error::Precondition(format!(
                "eigenforms of the wrong weight for k = {k}"
            )));
        }
        let fs: Vec<EigenData> = pairs.iter().map(|p| p.f.clone()).collect();
        let omega = lfunctions::omega_f_solve(&fs, tol)?;
        let kernel = AfeKernel::new(2 * k)?;
        let len = kernel.required_len(d_max, err_budget);
        let lambdas = classical::lambda_tables(&fs, len)?;
        Ok(WeightData {
            k,
            pairs,
            omega,
            kernel,
            lambdas,
            err_budget,
        })
    }

    pub fn eigens(&self) -> Vec<EigenData> {
        self.pairs.iter().map(|p| p.f.clone()).collect()
    }

    /// α_g for every form, fixed at the reference discriminant.
    pub fn alphas(&self, bound: u64) -> Result<Vec<lfunctions::AlphaG>> {
        let (_, ls) = reference_discriminant(self, &[], bound)?;
        self.pairs
            .iter()
            .zip(&self.omega.omega)
            .zip(&ls)
            .map(|((p, &om), l)| lfunctions::alpha_g_fix(p, om, l))
            .collect()
    }

    pub fn l_values(&self, d: i64) -> Result<Vec<LValueRecord>> {
        lfunctions::l_central_twists(
            &self.eigens(),
            &self.lambdas,
            d,
            self.err_budget,
            &self.kernel,
        )
    }
}

/// One (k, g, d) contribution to a moment.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentCell {
    pub k: u32,
    pub g_id: String,
    pub d: i64,
    pub reference_d: i64,
    pub weight: f64,
    pub coeff_route: f64,
    pub l_route: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub moment: u32,
    pub big_k: u32,
    pub x: f64,
    pub filter: DiscriminantFilter,
    /// Every integer k with h((2k-1)/K) ≠ 0 is summed.
    pub convention: String,
    pub route_a: f64,
    pub route_b: f64,
    /// |a - b|/|b|.
    pub agreement: f64,
    pub predicted: f64,
    /// Summands of the prediction (one for the first moment, four for the second).
    pub prediction_terms: Vec<f64>,
    /// |route_b - predicted|/|predicted|.
    pub deviation: f64,
    pub cells: Vec<MomentCell>,
}

/// The integers k with h((2k-1)/K) ≠ 0.
pub fn k_range(big_k: u32, h: &Bump) -> Vec<u32> {
    let top = libm::ceil(h.support().1 * big_k as f64) as u32;
    (1..=top)
        .filter(|&k| h.eval((2.0 * k as f64 - 1.0) / big_k as f64) != 0.0)
        .collect()
}

/// The discriminants d with (-1)^k d/X in the support of φ, accepted by the filter.
pub fn discriminant_window(k: u32, x: f64, phi: &Bump, filter: DiscriminantFilter) -> Vec<i64> {
    let (a, b) = phi.support();
    let hi = libm::floor(b * x) as u64;
    arith::discriminants_for(k, hi, filter)
        .into_iter()
        .filter(|&d| {
            phi.eval(d.unsigned_abs() as f64 / x) != 0.0 && d.unsigned_abs() as f64 > a * x
        })
        .collect()
}

/// Reference discriminant for α_g: the smallest |d| of the right sign, outside
/// `avoid`, with c_g(|d|) ≠ 0 for every form and L-values above 1/10.
pub fn reference_discriminant(
    w: &WeightData,
    avoid: &[i64],
    bound: u64,
) -> Result<(i64, Vec<LValueRecord>)> {
    for d in arith::discriminants_for(w.k, bound, DiscriminantFilter::Fundamental) {
        if avoid.contains(&d) {
            continue;
        }
        let da = d.unsigned_abs() as usize;
        if w.pairs.iter().any(|p| p.g.field.is_zero(p.g.coeff(da))) {
            continue;
        }
        let ls = w.l_values(d)?;
        if ls.iter().all(|l| l.value > 0.1) {
            return Ok((d, ls));
        }
    }
    Err(Error::Precondition(format!(
        "no usable reference discriminant for k = {}",
        w.k
    )))
}

fn moment(
    power: u32,
    big_k: u32,
    x: f64,
    tf: &TestFunctionPair,
    data: &[WeightData],
    filter: DiscriminantFilter,
) -> Result<MomentReport> {
    let mut cells = Vec::new();
    let (mut a, mut b) = (0.0, 0.0);
    for k in k_range(big_k, &tf.h) {
        if classical::dim_cusp(2 * k) == 0 {
            continue;
        }
        let w = data
            .iter()
            .find(|w| w.k == k)
            .ok_or_else(|| Error::Precondition(format!("no eigen data for k = {k}")))?;
        let hk = tf.h.eval((2.0 * k as f64 - 1.0) / big_k as f64);
        let ds = discriminant_window(k, x, &tf.phi, filter);
        if ds.is_empty() {
            continue;
        }
        let bound = ds.iter().map(|d| d.unsigned_abs()).max().unwrap();
        let (reference, l_ref) = reference_discriminant(w, &ds, bound)?;
        for &d in &ds {
            let weight = hk * tf.phi.eval(d.unsigned_abs() as f64 / x);
            let ls = w.l_values(d)?;
            for ((pair, l), (om, lr)) in w
                .pairs
                .iter()
                .zip(&ls)
                .zip(w.omega.omega.iter().zip(&l_ref))
            {
                // α_g c_g(|d|)² = ω_f L(ref) (c_g(|d|)/c_g(|ref|))².
                let r = halfint::coeff_ratio(
                    &pair.g,
                    d.unsigned_abs() as usize,
                    reference.unsigned_abs() as usize,
                )?;
                let alpha_c2 = om * lr.value * r * r;
                let (ca, cb) = match power {
                    1 => (alpha_c2, om * l.value),
                    _ => (alpha_c2 * alpha_c2 / om, om * l.value * l.value),
                };
                a += weight * ca;
                b += weight * cb;
                cells.push(MomentCell {
                    k,
                    g_id: pair.g.id.clone(),
                    d,
                    reference_d: reference,
                    weight,
                    coeff_route: ca,
                    l_route: cb,
                });
            }
        }
    }
    let xk = x * big_k as f64;
    let prediction_terms = if power == 1 {
        alloc::vec![xk * tf.h_hat0 * tf.phi_hat0 / (2.0 * PI * PI)]
    } else {
        let g0 = euler_g0(1_000_000).value;
        let c = constant_c(1_000_000).value;
        let s = xk / (PI * PI);
        alloc::vec![
            s * g0 * tf.h_hat0 * tf.phi_hat0 * libm::log(xk),
            s * g0 * tf.h_hat0 * tf.phi_log,
            s * g0 * tf.phi_hat0 * tf.h_log,
            s * tf.h_hat0 * tf.phi_hat0 * c,
        ]
    };
    let predicted: f64 = prediction_terms.iter().sum();
    Ok(MomentReport {
        moment: power,
        big_k,
        x,
        filter,
        convention: "all integers k with h((2k-1)/K) nonzero".into(),
        route_a: a,
        route_b: b,
        agreement: if b == 0.0 {
            (a - b).abs()
        } else {
            (a - b).abs() / b.abs()
        },
        predicted,
        prediction_terms,
        deviation: (b - predicted).abs() / predicted.abs(),
        cells,
    })
}

/// Σ_k h((2k-1)/K) Σ_g α_g Σ_d c_g(|d|)² φ((-1)^k d/X), from coefficients and from L-values.
pub fn s1_empirical(
    big_k: u32,
    x: f64,
    tf: &TestFunctionPair,
    data: &[WeightData],
    filter: DiscriminantFilter,
) -> Result<MomentReport> {
    moment(1, big_k, x, tf, data, filter)
}

/// Σ_k h Σ_g α_g² ω_f^{-1} Σ_d c_g(|d|)⁴ φ, from coefficients and from L-values.
pub fn s2_empirical(
    big_k: u32,
    x: f64,
    tf: &TestFunctionPair,
    data: &[WeightData],
    filter: DiscriminantFilter,
) -> Result<MomentReport> {
    moment(2, big_k, x, tf, data, filter)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightsSum {
    pub weight: u32,
    pub dim: usize,
    pub sum: f64,
    pub deviation: f64,
}

/// Σ_f ω_f over the eigenforms of one weight (0 for an empty space).
pub fn weights_sum_check(weight: u32, tol: f64) -> Result<WeightsSum> {
    let dim = classical::dim_cusp(weight);
    let sum = if dim == 0 {
        0.0
    } else {
        let fs = classical::eigenbasis_level1(weight, dim.max(2))?;
        lfunctions::omega_f_solve(&fs, tol)?.sum()
    };
    Ok(WeightsSum {
        weight,
        dim,
        sum,
        deviation: (sum - 1.0).abs(),
    })
}
