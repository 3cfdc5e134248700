//! Plus-space eigenforms on the geodesics Re z = -1/2 and Re z = 0: sign
//! evaluation with explicit tail bounds, sign changes of the coefficient
//! proxy, and bisection-certified real zeros.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::arith::{self, DiscriminantFilter};
use crate::charsums::kronecker;
use crate::halfint::{normalized_coeff, EigenPair};
use crate::specfun::i_profile_log;
use crate::{Error, Result};

/// The two geodesics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geodesic {
    /// Re z = -1/2, where e(mα) = (-1)^m.
    Half,
    /// Re z = 0.
    Zero,
}

impl Geodesic {
    pub fn alpha(self) -> f64 {
        match self {
            Geodesic::Half => -0.5,
            Geodesic::Zero => 0.0,
        }
    }

    fn phase(self, m: usize) -> f64 {
        match self {
            Geodesic::Half if m % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

/// Window constant and the majorant used beyond the computed coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineParams {
    /// B in Δ₁ = √(B(k - 1/2) log k).
    pub window_b: f64,
}

impl Default for LineParams {
    fn default() -> Self {
        LineParams { window_b: 12.0 }
    }
}

/// A plus eigenform with its α_g, prepared for evaluation on the geodesics.
#[derive(Clone, Debug)]
pub struct LineForm {
    pub id: String,
    pub k: u32,
    pub sqrt_alpha: f64,
    /// c_g(m) for 0 ≤ m ≤ trunc.
    pub c: Vec<f64>,
    /// A with |c_g(m)| ≤ A m^{1/4} assumed beyond trunc.
    pub majorant: f64,
    pub params: LineParams,
}

impl LineForm {
    pub fn new(pair: &EigenPair, alpha_g: f64, params: LineParams) -> Result<Self> {
        if !(alpha_g > 0.0) {
            return Err(Error::Domain("α_g must be positive".into()));
        }
        let c: Vec<f64> = (0..=pair.g.trunc())
            .map(|m| normalized_coeff(&pair.g, m))
            .collect();
        // Twice the largest observed c(m)/m^{1/4}, the Hecke-bound shape.
        let majorant = 2.0
            * c.iter()
                .enumerate()
                .skip(1)
                .map(|(m, x)| x.abs() / libm::pow(m as f64, 0.25))
                .fold(0.0, f64::max);
        Ok(LineForm {
            id: pair.g.id.clone(),
            k: pair.k(),
            sqrt_alpha: libm::sqrt(alpha_g),
            c,
            majorant,
            params,
        })
    }

    pub fn trunc(&self) -> usize {
        self.c.len() - 1
    }

    /// s = k + 1/2 and the peak y₀ = k/2 - 1/4 of I_s.
    fn peak(&self) -> (f64, f64) {
        (self.k as f64 + 0.5, 0.5 * self.k as f64 - 0.25)
    }

    /// Δ₁ = √(B(k - 1/2) log k).
    pub fn window(&self) -> f64 {
        let k = self.k as f64;
        libm::sqrt(self.params.window_b * (k - 0.5) * libm::log(k))
    }

    /// y_ℓ = (k - 1/2)/(4πℓ), where 2πℓy is the peak of I_s.
    pub fn y_ell(&self, l: usize) -> f64 {
        (self.k as f64 - 0.5) / (4.0 * PI * l as f64)
    }

    /// √α_g c_g(ℓ) e(αℓ).
    pub fn proxy(&self, geo: Geodesic, l: usize) -> f64 {
        self.sqrt_alpha * self.c[l] * geo.phase(l)
    }
}

/// A real value on a geodesic with the bound on everything omitted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineValue {
    pub value: f64,
    pub tail: f64,
    pub window_terms: usize,
}

impl LineValue {
    pub fn sign(&self) -> Result<i8> {
        if self.value.abs() > self.tail {
            Ok(if self.value > 0.0 { 1 } else { -1 })
        } else {
            Err(Error::InconclusiveSign {
                value: self.value,
                tail: self.tail,
            })
        }
    }

    pub fn log_magnitude(&self) -> f64 {
        libm::log(self.value.abs())
    }
}

/// Φ_g(α + iy)/I_s(y₀) = Σ_m √α_g c_g(m) e(mα) I_s(2πmy)/I_s(y₀) over the
/// window |2πmy - y₀| ≤ Δ₁, with the rest bounded.
pub fn eval_on_line(form: &LineForm, geo: Geodesic, y: f64) -> Result<LineValue> {
    if !(y > 0.0) {
        return Err(Error::Domain("y must be positive".into()));
    }
    let (s, y0) = form.peak();
    let log_peak = i_profile_log(s, y0);
    let delta = form.window();
    let ratio = |m: usize| libm::exp(i_profile_log(s, 2.0 * PI * m as f64 * y) - log_peak);
    let (mut value, mut tail, mut terms, mut mass) = (0.0, 0.0, 0, 0.0);
    for m in 1..=form.trunc() {
        let t = form.sqrt_alpha * form.c[m] * geo.phase(m) * ratio(m);
        if (2.0 * PI * m as f64 * y - y0).abs() <= delta {
            value += t;
            mass += t.abs();
            terms += 1;
        } else {
            tail += t.abs();
        }
    }
    // Beyond trunc: A m^{1/4} I_s(2πmy)/I_s(y₀). Once 2πmy > 2s the ratio of
    // consecutive terms is below q = e^{-πy}·(1 + 1/m)^{s/2 + 1/4} < 1.
    let n = form.trunc() + 1;
    let x = 2.0 * PI * n as f64 * y;
    if x <= 2.0 * s + y0 + delta {
        return Err(Error::CoefficientShortage {
            needed: libm::ceil((2.0 * s + y0 + delta) / (2.0 * PI * y)) as usize + 1,
            have: n,
        });
    }
    let first = form.sqrt_alpha * form.majorant * libm::pow(n as f64, 0.25) * ratio(n);
    let q = libm::exp(-2.0 * PI * y + (0.5 * s + 0.25) * libm::log1p(1.0 / n as f64));
    tail += if q < 1.0 {
        first / (1.0 - q)
    } else {
        f64::INFINITY
    };
    // Rounding in the window sum.
    tail += 4.0 * f64::EPSILON * (terms as f64 + 8.0) * mass;
    Ok(LineValue {
        value,
        tail,
        window_terms: terms,
    })
}

/// |Φ_g(α + iy_ℓ)/I_s(y₀) - √α_g c_g(ℓ)e(αℓ)|.
pub fn coeff_proxy_error(form: &LineForm, geo: Geodesic, l: usize) -> Result<f64> {
    let v = eval_on_line(form, geo, form.y_ell(l))?;
    Ok((v.value - form.proxy(geo, l)).abs() + v.tail)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub y_lo: f64,
    pub y_hi: f64,
    pub sign_lo: i8,
    pub sign_hi: i8,
}

/// Bisect [y1, y2] to relative width 1e-6 keeping certified opposite signs.
pub fn certify_zero(form: &LineForm, geo: Geodesic, y1: f64, y2: f64) -> Result<Bracket> {
    if !(y1 < y2) {
        return Err(Error::Domain("need y1 < y2".into()));
    }
    let (mut lo, mut hi) = (y1, y2);
    let s_lo = eval_on_line(form, geo, lo)?.sign()?;
    let s_hi = eval_on_line(form, geo, hi)?.sign()?;
    if s_lo == s_hi {
        return Err(Error::NoSignChange);
    }
    while hi - lo >= 1e-6 * lo {
        let mid = 0.5 * (lo + hi);
        let s = eval_on_line(form, geo, mid)?.sign()?;
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket {
        y_lo: lo,
        y_hi: hi,
        sign_lo: s_lo,
        sign_hi: s_hi,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignChange {
    /// Indices ℓ₁ < ℓ₂ of consecutive nonzero proxies.
    pub l1: usize,
    pub l2: usize,
    pub bracket: Option<Bracket>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroReport {
    pub g_id: String,
    pub k: u32,
    pub alpha: f64,
    pub y_floor: f64,
    pub l_max: usize,
    /// Margin-passing sign changes of the proxy with their certification.
    pub sign_changes: Vec<SignChange>,
    /// ℓ where the proxy was too small against its error.
    pub inconclusive: Vec<usize>,
    pub certified_sign_changes: usize,
    pub certified_zeros: usize,
    /// Brackets whose endpoint signs failed a fresh evaluation.
    pub false_brackets: usize,
    /// Brackets whose midpoint sign could be certified (informational).
    pub midpoint_certified: usize,
    /// Zeros found from certified sign changes on a log-spaced y grid over
    /// [Y, 2y₁], independently of the proxy.
    pub grid_zeros: Vec<Bracket>,
    /// Grid points where the sign could not be certified.
    pub grid_inconclusive: usize,
    /// k/Y for comparison.
    pub heuristic_count: f64,
    /// Whether Y ≥ √(k log k).
    pub in_regime: bool,
}

impl ZeroReport {
    pub fn brackets(&self) -> impl Iterator<Item = &Bracket> {
        self.sign_changes.iter().filter_map(|s| s.bracket.as_ref())
    }
}

/// Walk ℓ = 1..(k - 1/2)/(4πY) on one geodesic and certify a zero for every
/// proxy sign change whose margins exceed the proxy errors.
pub fn real_zero_scan(form: &LineForm, geo: Geodesic, y_floor: f64) -> Result<ZeroReport> {
    if !(y_floor > 0.0) {
        return Err(Error::Domain("Y must be positive".into()));
    }
    let k = form.k as f64;
    let l_max = libm::floor((k - 0.5) / (4.0 * PI * y_floor)) as usize;
    let mut report = ZeroReport {
        g_id: form.id.clone(),
        k: form.k,
        alpha: geo.alpha(),
        y_floor,
        l_max,
        sign_changes: Vec::new(),
        inconclusive: Vec::new(),
        certified_sign_changes: 0,
        certified_zeros: 0,
        false_brackets: 0,
        midpoint_certified: 0,
        grid_zeros: Vec::new(),
        grid_inconclusive: 0,
        heuristic_count: k / y_floor,
        in_regime: y_floor >= libm::sqrt(k * libm::log(k)),
    };
    // Consecutive nonzero proxies with certified signs.
    let mut prev: Option<(usize, f64)> = None;
    for l in 1..=l_max.min(form.trunc()) {
        let p = form.proxy(geo, l);
        if p == 0.0 {
            continue;
        }
        let err = coeff_proxy_error(form, geo, l)?;
        if p.abs() <= err {
            report.inconclusive.push(l);
            prev = None;
            continue;
        }
        if let Some((l1, p1)) = prev {
            if p1.signum() != p.signum() {
                report.certified_sign_changes += 1;
                let mut sc = SignChange {
                    l1,
                    l2: l,
                    bracket: None,
                    failure: None,
                };
                match certify_zero(form, geo, form.y_ell(l), form.y_ell(l1)) {
                    Ok(b) => {
                        report.certified_zeros += 1;
                        let lo = eval_on_line(form, geo, b.y_lo).and_then(|v| v.sign());
                        let hi = eval_on_line(form, geo, b.y_hi).and_then(|v| v.sign());
                        if lo.ok() != Some(b.sign_lo)
                            || hi.ok() != Some(b.sign_hi)
                            || b.sign_lo == b.sign_hi
                        {
                            report.false_brackets += 1;
                        }
                        let mid = eval_on_line(form, geo, 0.5 * (b.y_lo + b.y_hi));
                        if mid.and_then(|v| v.sign()).is_ok() {
                            report.midpoint_certified += 1;
                        }
                        sc.bracket = Some(b);
                    }
                    Err(e) => sc.failure = Some(format!("{e}")),
                }
                report.sign_changes.push(sc);
            }
        }
        prev = Some((l, p));
    }
    let y_top = 2.0 * form.y_ell(1);
    if y_top > y_floor {
        let mut last: Option<(f64, i8)> = None;
        for i in 0..=GRID_POINTS {
            let y = y_floor * libm::pow(y_top / y_floor, i as f64 / GRID_POINTS as f64);
            match eval_on_line(form, geo, y)?.sign() {
                Ok(sg) => {
                    if let Some((y1, s1)) = last {
                        if s1 != sg {
                            if let Ok(b) = certify_zero(form, geo, y1, y) {
                                report.grid_zeros.push(b);
                            }
                        }
                    }
                    last = Some((y, sg));
                }
                Err(_) => report.grid_inconclusive += 1,
            }
        }
    }
    Ok(report)
}

const GRID_POINTS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalStat {
    pub x: u64,
    pub s1: f64,
    pub s_abs: f64,
    pub count: usize,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortIntervalTable {
    pub g_id: String,
    pub big_x: u64,
    pub h: u64,
    pub filter: DiscriminantFilter,
    pub rows: Vec<IntervalStat>,
    pub flagged: usize,
    /// H k^{-1/2}/log X.
    pub threshold: f64,
}

/// For x in [X, 2X] (step `step`), S₁ = |Σ √α_g c_g(|d|)| and S_abs = Σ √α_g |c_g(|d|)|
/// over x ≤ (-1)^k d ≤ x + H; flagged when S₁ < S_abs.
pub fn short_interval_stats(
    form: &LineForm,
    big_x: u64,
    h: u64,
    step: u64,
    filter: DiscriminantFilter,
) -> Result<ShortIntervalTable> {
    let top = (2 * big_x + h) as usize;
    if top > form.trunc() {
        return Err(Error::CoefficientShortage {
            needed: top + 1,
            have: form.trunc() + 1,
        });
    }
    let sign: i64 = if form.k.is_multiple_of(2) { 1 } else { -1 };
    let mut rows = Vec::new();
    let mut x = big_x;
    while x <= 2 * big_x {
        let (mut s, mut s_abs, mut count) = (0.0, 0.0, 0);
        for a in x..=x + h {
            if !filter.accepts(sign * a as i64) {
                continue;
            }
            let v = form.sqrt_alpha * form.c[a as usize];
            if v != 0.0 {
                count += 1;
            }
            s += v;
            s_abs += v.abs();
        }
        let s1 = s.abs();
        rows.push(IntervalStat {
            x,
            s1,
            s_abs,
            count,
            flagged: s1 < s_abs * (1.0 - 1e-12),
        });
        x += step.max(1);
    }
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let threshold = h as f64 / libm::sqrt(form.k as f64) / libm::log(big_x.max(2) as f64);
    Ok(ShortIntervalTable {
        g_id: form.id.clone(),
        big_x,
        h,
        filter,
        rows,
        flagged,
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HgReport {
    pub d: i64,
    /// h_g(m) for 0 ≤ m ≤ bound (entry 0 unused).
    pub table: Vec<i8>,
    /// Least prime power p^ν with h_g(p^ν) = -1, as (p, ν).
    pub first: Option<(u64, u32)>,
    /// Entries compared with signs of computed coefficients.
    pub checked: usize,
    pub mismatches: usize,
}

/// h_g(m) = sign(c_g(|d|) c_g(|d|m²)) from Σ_{r|m} μ(r)χ_d(r) r^{-1/2} λ_f(m/r).
pub fn hg_and_first_signchange(
    pair: &EigenPair,
    d: i64,
    lambda: &[f64],
    bound: usize,
) -> Result<HgReport> {
    let da = d.unsigned_abs() as usize;
    let k = pair.k();
    if k.is_multiple_of(2) != (d > 0) || !arith::is_fundamental_discriminant(d) {
        return Err(Error::Precondition(format!(
            "d = {d} does not match the plus space of weight {k} + 1/2"
        )));
    }
    if da > pair.g.trunc() || pair.g.field.is_zero(pair.g.coeff(da)) {
        return Err(Error::ZeroCoefficient(format!(
            "c_g({da}) is zero or not computed"
        )));
    }
    if lambda.len() <= bound {
        return Err(Error::CoefficientShortage {
            needed: bound + 1,
            have: lambda.len(),
        });
    }
    let mut table = alloc::vec![0i8; bound + 1];
    for m in 1..=bound {
        let mut s = 0.0;
        for r in arith::divisors(m as u64) {
            let mu = arith::mobius(r);
            let chi = kronecker(d, r as i64);
            if mu * chi as i64 != 0 {
                s += (mu * chi as i64) as f64 / libm::sqrt(r as f64) * lambda[m / r as usize];
            }
        }
        table[m] = if s > 0.0 {
            1
        } else if s < 0.0 {
            -1
        } else {
            0
        };
    }
    let first = (2..=bound).find_map(|m| {
        let f = arith::factorize(m as u64);
        (f.len() == 1 && table[m] == -1).then(|| f[0])
    });
    let base = normalized_coeff(&pair.g, da);
    let (mut checked, mut mismatches) = (0, 0);
    for m in 1..=bound {
        let n = da * m * m;
        if n > pair.g.trunc() {
            break;
        }
        let c = normalized_coeff(&pair.g, n) * base;
        let h = if c > 0.0 {
            1
        } else if c < 0.0 {
            -1
        } else {
            0
        };
        checked += 1;
        if h != table[m] {
            mismatches += 1;
        }
    }
    Ok(HgReport {
        d,
        table,
        first,
        checked,
        mismatches,
    })
}
