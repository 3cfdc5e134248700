//! Level-one cusp forms of integral weight: generators, bases, Hecke
//! operators, eigenforms and long tables of normalized eigenvalues.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::linalg::{self, Matrix, Poly};
use crate::ntt::{self, Crt, Modulus};
use crate::numfield::{self, Elem, NumberField};
use crate::qseries::{BigRat, QSeries};
use crate::specfun::bernoulli;
use crate::{Error, Result};

/// Primes whose Hecke operators are computed and cross-checked.
pub const HECKE_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralForm {
    pub weight: u32,
    pub series: QSeries,
    pub is_eigen: bool,
}

/// dim S_w(SL_2(Z)).
pub fn dim_cusp(weight: u32) -> usize {
    if weight % 2 == 1 || weight < 12 {
        return 0;
    }
    let q = (weight / 12) as usize;
    if weight % 12 == 2 {
        q - 1
    } else {
        q
    }
}

/// -2w/B_w, the coefficient of Σ σ_{w-1}(n) q^n in E_w.
pub fn eisenstein_factor(weight: u32) -> BigRat {
    let b = bernoulli(weight as usize);
    -BigRat::from_integer(BigInt::from(2 * weight)) / &b[weight as usize]
}

/// E_w = 1 + (-2w/B_w) Σ σ_{w-1}(n) q^n for even w ≥ 4.
pub fn eisenstein_general(weight: u32, trunc: usize) -> Result<QSeries> {
    if weight < 4 || weight % 2 == 1 {
        return Err(Error::Domain(format!(
            "no level-one Eisenstein series of weight {weight}"
        )));
    }
    let c = eisenstein_factor(weight);
    let sig = sigma_table_big(weight - 1, trunc + 1);
    let mut coeffs: Vec<BigRat> = sig
        .into_iter()
        .map(|s| BigRat::from_integer(s) * &c)
        .collect();
    coeffs[0] = BigRat::one();
    Ok(QSeries::from_coeffs(coeffs))
}

/// E_4 or E_6.
pub fn eisenstein(weight: u32, trunc: usize) -> Result<QSeries> {
    if weight != 4 && weight != 6 {
        return Err(Error::Domain("eisenstein takes weight 4 or 6".into()));
    }
    eisenstein_general(weight, trunc)
}

fn sigma_table_big(k: u32, len: usize) -> Vec<BigInt> {
    if (k as f64) * libm::log2(len.max(2) as f64) < 120.0 {
        return arith::sigma_table(k, len)
            .into_iter()
            .map(BigInt::from)
            .collect();
    }
    let mut s = vec![BigInt::zero(); len];
    for d in 1..len {
        let dk = BigInt::from(d).pow(k);
        let mut m = d;
        while m < len {
            s[m] += &dk;
            m += d;
        }
    }
    s
}

/// Δ = (E_4³ - E_6²)/1728.
pub fn delta(trunc: usize) -> IntegralForm {
    assert!(trunc >= 2, "delta needs trunc >= 2");
    let e4 = eisenstein(4, trunc).unwrap();
    let e6 = eisenstein(6, trunc).unwrap();
    let d = &e4.pow(3) - &e6.pow(2);
    let series = d.scale(&BigRat::new(BigInt::one(), BigInt::from(1728)));
    IntegralForm {
        weight: 12,
        series,
        is_eigen: true,
    }
}

/// Echelon basis of S_w from the monomials Δ·E_4^a·E_6^b; basis element i has
/// leading term q^{i+1} and vanishing coefficients at the other pivots.
pub fn cusp_basis(weight: u32, trunc: usize) -> Result<Vec<IntegralForm>> {
    if weight % 2 == 1 {
        return Err(Error::Domain("odd weight".into()));
    }
    let dim = dim_cusp(weight);
    if dim == 0 {
        return Ok(Vec::new());
    }
    if trunc < dim + 1 {
        return Err(Error::TruncTooSmall {
            needed: dim + 1,
            have: trunc,
        });
    }
    let rest = weight - 12;
    let e4 = eisenstein(4, trunc)?;
    let e6 = eisenstein(6, trunc)?;
    let d = delta(trunc.max(2)).series.truncate(trunc);
    let mut monomials = Vec::new();
    for b in 0..=rest / 6 {
        if (rest - 6 * b).is_multiple_of(4) {
            let a = (rest - 6 * b) / 4;
            monomials.push(&(&d * &e4.pow(a)) * &e6.pow(b));
        }
    }
    let mut m: Matrix = monomials.iter().map(|s| s.coeffs().to_vec()).collect();
    let pivots = linalg::rref(&mut m);
    if pivots.len() != dim {
        return Err(Error::DimensionMismatch {
            computed: pivots.len(),
            expected: dim,
        });
    }
    Ok(m.into_iter()
        .take(dim)
        .map(|row| IntegralForm {
            weight,
            series: QSeries::from_coeffs(row),
            is_eigen: false,
        })
        .collect())
}

/// (T_p f)(n) = a(pn) + p^{w-1} a(n/p).
pub fn hecke_tp_series(s: &QSeries, weight: u32, p: u64) -> QSeries {
    let p = p as usize;
    let out_trunc = s.trunc() / p;
    let pw = BigRat::from_integer(BigInt::from(p).pow(weight - 1));
    let coeffs = (0..=out_trunc)
        .map(|n| {
            let mut c = s.coeff(p * n).clone();
            if n % p == 0 {
                c += s.coeff(n / p) * &pw;
            }
            c
        })
        .collect();
    QSeries::from_coeffs(coeffs)
}

pub fn hecke_tp_integral(f: &IntegralForm, p: u64, out_trunc: usize) -> Result<IntegralForm> {
    if !arith::is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let needed = p as usize * out_trunc;
    if f.series.trunc() < needed {
        return Err(Error::TruncTooSmall {
            needed,
            have: f.series.trunc(),
        });
    }
    let s = hecke_tp_series(&f.series, f.weight, p).truncate(out_trunc);
    Ok(IntegralForm {
        weight: f.weight,
        series: s,
        is_eigen: f.is_eigen,
    })
}

/// Matrix of a linear operator on an echelon basis: column i holds the
/// coordinates of the image of basis element i.
pub fn operator_matrix(images: &[QSeries], pivots: &[usize]) -> Matrix {
    let d = pivots.len();
    (0..d)
        .map(|j| (0..d).map(|i| images[i].coeff(pivots[j]).clone()).collect())
        .collect()
}

pub fn hecke_matrix(basis: &[IntegralForm], p: u64) -> Matrix {
    let pivots: Vec<usize> = (1..=basis.len()).collect();
    let images: Vec<QSeries> = basis
        .iter()
        .map(|b| hecke_tp_series(&b.series, b.weight, p))
        .collect();
    operator_matrix(&images, &pivots)
}

/// A normalized Hecke eigenform of level one with coefficients in a Hecke field.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub id: String,
    pub weight: u32,
    /// Q(θ) where θ is the eigenvalue of T_{generator_p}; degree 1 when rational.
    pub field: NumberField,
    pub generator_p: u64,
    /// Real embedding of θ for this form.
    pub root: f64,
    /// Coordinates in the echelon cusp basis (first coordinate 1).
    pub coords: Vec<Elem>,
    /// a_f(n) in Q(θ) for 0 ≤ n ≤ trunc.
    pub coeffs: Vec<Elem>,
    /// Eigenvalues a_f(p) for p in HECKE_PRIMES.
    pub eigenvalues: Vec<(u64, Elem)>,
    /// Characteristic polynomial of T_{generator_p} on the full cusp space.
    pub charpoly: Poly,
}

impl EigenData {
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        self.field.degree() == 1
    }

    pub fn k(&self) -> u32 {
        self.weight / 2
    }

    /// a_f(n) as a float.
    pub fn coeff_f64(&self, n: usize) -> f64 {
        self.field.embed(&self.coeffs[n], self.root)
    }

    /// a_f(n) exactly when the form has rational coefficients.
    pub fn coeff_rational(&self, n: usize) -> Option<BigRat> {
        self.is_rational().then(|| self.coeffs[n][0].clone())
    }

    pub fn eigenvalue(&self, p: u64) -> Option<&Elem> {
        self.eigenvalues
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, e)| e)
    }

    pub fn eigenvalue_f64(&self, p: u64) -> Option<f64> {
        self.eigenvalue(p).map(|e| self.field.embed(e, self.root))
    }

    /// The q-expansion when the coefficients are rational.
    pub fn series(&self) -> Option<QSeries> {
        self.is_rational()
            .then(|| QSeries::from_coeffs(self.coeffs.iter().map(|c| c[0].clone()).collect()))
    }
}

/// λ_f(n) = a_f(n)/n^{(w-1)/2}.
pub fn lambda_f(f: &EigenData, n: usize) -> f64 {
    let v = f.coeff_f64(n) * libm::pow(n as f64, -0.5 * (f.weight as f64 - 1.0));
    debug_assert!(
        !arith::is_prime(n as u64) || v.abs() <= 2.0 + 1e-9,
        "Deligne bound violated at {n}"
    );
    v
}

/// Hecke eigenforms of S_w normalized by a(1) = 1, coefficients up to `trunc`.
pub fn eigenbasis_level1(weight: u32, trunc: usize) -> Result<Vec<EigenData>> {
    let dim = dim_cusp(weight);
    if weight < 12 || dim == 0 {
        return Ok(Vec::new());
    }
    let t = trunc.max(13 * dim + 1);
    let basis = cusp_basis(weight, t)?;
    let mats: Vec<(u64, Matrix)> = HECKE_PRIMES
        .iter()
        .map(|&p| (p, hecke_matrix(&basis, p)))
        .collect();
    for (i, (p, a)) in mats.iter().enumerate() {
        for (q, b) in &mats[i + 1..] {
            if linalg::mat_mul(a, b) != linalg::mat_mul(b, a) {
                return Err(Error::Diagonalization(format!(
                    "T_{p} and T_{q} do not commute"
                )));
            }
        }
    }
    let (gen_p, gen_mat, cp) = [3u64, 2, 5, 7, 11, 13]
        .iter()
        .map(|&p| {
            let m = mats.iter().find(|(q, _)| *q == p).unwrap().1.clone();
            let cp = linalg::charpoly(&m);
            (p, m, cp)
        })
        .find(|(_, _, cp)| linalg::is_squarefree(cp))
        .ok_or_else(|| Error::Diagonalization("no Hecke operator with simple spectrum".into()))?;

    let mut factors: Vec<Poly> = Vec::new();
    let mut rest = cp.clone();
    for r in numfield::integer_roots(&cp) {
        let r = BigRat::from_integer(r);
        factors.push(vec![-r.clone(), BigRat::one()]);
        rest = numfield::deflate(&rest, &r);
    }
    if linalg::poly_degree(&rest) > 0 {
        factors.push(rest);
    }

    let mut out = Vec::new();
    for factor in factors {
        let field = NumberField::new(factor);
        let coords = numfield::eigenvector(&field, &gen_mat)?;
        let coeffs: Vec<Elem> = (0..=trunc.min(t))
            .map(|n| {
                let mut s = field.zero();
                for (x, b) in coords.iter().zip(&basis) {
                    let c = b.series.coeff(n);
                    if !c.is_zero() {
                        s = field.add(&s, &field.scale(x, c));
                    }
                }
                s
            })
            .collect();
        let mut eigenvalues = Vec::new();
        for (p, m) in &mats {
            // a_f(p) = p-th coefficient; check M x = a_f(p) x exactly.
            let mut lam = field.zero();
            for (x, b) in coords.iter().zip(&basis) {
                lam = field.add(&lam, &field.scale(x, b.series.coeff(*p as usize)));
            }
            for j in 0..dim {
                let mut s = field.zero();
                for i in 0..dim {
                    s = field.add(&s, &field.scale(&coords[i], &m[j][i]));
                }
                if s != field.mul(&lam, &coords[j]) {
                    return Err(Error::Diagonalization(format!(
                        "not an eigenvector of T_{p}"
                    )));
                }
            }
            eigenvalues.push((*p, lam));
        }
        let roots = field.real_roots();
        if roots.len() != field.degree() {
            return Err(Error::Diagonalization(
                "Hecke polynomial has non-real roots".into(),
            ));
        }
        for root in roots {
            out.push(EigenData {
                id: String::new(),
                weight,
                field: field.clone(),
                generator_p: gen_p,
                root,
                coords: coords.clone(),
                coeffs: coeffs.clone(),
                eigenvalues: eigenvalues.clone(),
                charpoly: cp.clone(),
            });
        }
    }
    out.sort_by(|a, b| {
        let x = a.field.embed(&a.field.generator(), a.root);
        let y = b.field.embed(&b.field.generator(), b.root);
        x.total_cmp(&y)
    });
    for (i, f) in out.iter_mut().enumerate() {
        f.id = format!("w{weight}/{}", i + 1);
    }
    Ok(out)
}

/// Characteristic polynomial of T_p on S_w.
pub fn hecke_charpoly(weight: u32, p: u64) -> Result<Poly> {
    let dim = dim_cusp(weight);
    let basis = cusp_basis(weight, p as usize * dim + 1)?;
    Ok(linalg::charpoly(&hecke_matrix(&basis, p)))
}

/// Smallest-prime-factor sieve and prime-power part, for multiplicative tables.
struct Sieve {
    spf: Vec<u32>,
    /// largest power of spf(n) dividing n
    ppart: Vec<u32>,
}

impl Sieve {
    fn new(len: usize) -> Self {
        let mut spf = vec![0u32; len];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = i * p as usize;
                if p > spf[i] || m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        let mut ppart = vec![1u32; len];
        for i in 2..len {
            let p = spf[i] as usize;
            let m = i / p;
            ppart[i] = if m.is_multiple_of(p) {
                ppart[m] * p as u32
            } else {
                p as u32
            };
        }
        Sieve { spf, ppart }
    }

    /// σ_k(n) mod p for 0 ≤ n < len.
    fn sigma_mod(&self, k: u32, m: &Modulus) -> Vec<u32> {
        let len = self.spf.len();
        let mut s = vec![0u32; len];
        if len > 1 {
            s[1] = 1;
        }
        for n in 2..len {
            let pe = self.ppart[n] as usize;
            if pe == n {
                let p = self.spf[n] as usize;
                let prev = if n == p { 1 } else { s[n / p] };
                s[n] = m.add(prev, m.pow((n % m.p as usize) as u32, k as u64));
            } else {
                s[n] = m.mul(s[pe], s[n / pe]);
            }
        }
        s
    }
}

/// Jacobi's η³/q^{1/8} = Σ (-1)^j (2j+1) q^{j(j+1)/2} modulo p.
fn eta_cubed_mod(len: usize, m: &Modulus) -> Vec<u32> {
    let mut v = vec![0u32; len];
    let mut j = 0usize;
    while j * (j + 1) / 2 < len {
        let c = (2 * j + 1) as i64 * if j.is_multiple_of(2) { 1 } else { -1 };
        v[j * (j + 1) / 2] = m.from_i64(c);
        j += 1;
    }
    v
}

/// Square of a sparse series, truncated to `len`.
fn sparse_square(a: &[u32], len: usize, m: &Modulus) -> Vec<u32> {
    let nz: Vec<(usize, u32)> = a
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i, x))
        .collect();
    let mut out = vec![0u32; len];
    for (x, &(i, a)) in nz.iter().enumerate() {
        for &(j, b) in &nz[x..] {
            if i + j >= len {
                break;
            }
            let t = m.mul(a, b);
            out[i + j] = m.add(out[i + j], if i == j { t } else { m.add(t, t) });
        }
    }
    out
}

/// Δ modulo p together with its transform under `plan`.
fn delta_mod(len: usize, m: &Modulus, plan: &ntt::Plan) -> (Vec<u32>, Vec<u32>) {
    let e6 = sparse_square(&eta_cubed_mod(len, m), len, m);
    let f6 = plan.forward(&e6);
    let e12 = plan.inverse(plan.pointwise(&f6, &f6), len);
    let f12 = plan.forward(&e12);
    let e24 = plan.inverse(plan.pointwise(&f12, &f12), len);
    let mut d = vec![0u32; len];
    d[1..].copy_from_slice(&e24[..len - 1]);
    let fd = plan.forward(&d);
    (d, fd)
}

fn rat_mod(r: &BigRat, m: &Modulus) -> u32 {
    let n = m.from_bigint(r.numer());
    let d = m.from_bigint(r.denom());
    m.mul(n, m.inv(d))
}

/// Long tables of normalized eigenvalues λ_f(m), 0 ≤ m ≤ n_max (entry 0 unused),
/// for every eigenform of one weight. Computed exactly modulo NTT primes in the
/// basis Δ^j E_{w-12j} and reconstructed to floating point.
pub fn lambda_tables(eigens: &[EigenData], n_max: usize) -> Result<Vec<Vec<f64>>> {
    if eigens.is_empty() {
        return Ok(Vec::new());
    }
    let weight = eigens[0].weight;
    let dim = dim_cusp(weight);
    let len = n_max + 1;
    if (2 * len).next_power_of_two() > ntt::MAX_TRANSFORM_LEN {
        return Err(Error::BudgetExceeded(format!(
            "eigenvalue table of length {len} exceeds the transform limit of {} terms",
            ntt::MAX_TRANSFORM_LEN / 2
        )));
    }
    let low = 2 * dim + 2;
    // Exact low-order expansions of the basis B_j = Δ^j E_{w-12j}.
    let d_low = delta(low.max(2)).series.truncate(low);
    let mut b_low = Vec::with_capacity(dim);
    let mut dpow = QSeries::one(low);
    for j in 1..=dim as u32 {
        dpow = &dpow * &d_low;
        let w = weight - 12 * j;
        let e = if w == 0 {
            QSeries::one(low)
        } else {
            eisenstein_general(w, low)?
        };
        b_low.push(&dpow * &e);
    }

    // Group eigenforms by Hecke field; each field contributes one exact target
    // per power of θ.
    struct Target {
        combo: Vec<BigRat>,
        scale: BigRat,
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, f) in eigens.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|(rep, _)| eigens[*rep].field == f.field)
        {
            Some(g) => g.1.push(i),
            None => groups.push((i, vec![i])),
        }
    }
    let mut targets: Vec<Target> = Vec::new();
    let mut group_targets: Vec<(usize, usize)> = Vec::new();
    let mut target_log2_bound: Vec<f64> = Vec::new();
    let deligne_log2 = (0.5 * (weight as f64 - 1.0) + 0.5) * libm::log2(n_max.max(2) as f64) + 2.0;
    for (rep, members) in &groups {
        let f = &eigens[*rep];
        let deg = f.field.degree();
        // Solve f = Σ y_j B_j over Q(θ) using coefficients 1..dim (triangular).
        let mut y: Vec<Elem> = Vec::with_capacity(dim);
        for n in 1..=dim {
            let mut rhs = f.coeffs[n].clone();
            for (j, yj) in y.iter().enumerate() {
                rhs = f.field.sub(&rhs, &f.field.scale(yj, b_low[j].coeff(n)));
            }
            let lead = b_low[n - 1].coeff(n).clone();
            y.push(f.field.scale(&rhs, &lead.recip()));
        }
        // Bound on the θ^e component via the inverse Vandermonde of the conjugates.
        let roots: Vec<f64> = members.iter().map(|&i| eigens[i].root).collect();
        let vinv = vandermonde_inverse_abs_rows(&roots);
        let start = targets.len();
        for e in 0..deg {
            let combo: Vec<BigRat> = y.iter().map(|yj| yj[e].clone()).collect();
            let mut den = BigInt::one();
            for (j, c) in combo.iter().enumerate() {
                let w = weight - 12 * (j as u32 + 1);
                den = num_integer::Integer::lcm(&den, c.denom());
                if w > 0 {
                    let t = c * eisenstein_factor(w);
                    den = num_integer::Integer::lcm(&den, t.denom());
                }
            }
            let scale = BigRat::from_integer(den);
            let log2 = deligne_log2 + libm::log2(vinv[e]) + scale.numer().bits() as f64 + 8.0;
            target_log2_bound.push(log2);
            targets.push(Target { combo, scale });
        }
        group_targets.push((start, deg));
    }

    let bits = target_log2_bound.iter().fold(0.0f64, |a, &b| a.max(b));
    let crt = Crt::new(ntt::moduli_for_bits(ntt::bits_for_log2(bits)));
    let sieve = Sieve::new(len);
    // residues[t][prime][n]
    let mut residues: Vec<Vec<Vec<u32>>> = (0..targets.len()).map(|_| Vec::new()).collect();
    for m in crt.moduli() {
        let plan = ntt::Plan::for_products(m, len);
        let (_, fd) = delta_mod(len, m, &plan);
        let coeffs: Vec<Vec<u32>> = targets
            .iter()
            .map(|tg| {
                tg.combo
                    .iter()
                    .map(|c| rat_mod(&(c * &tg.scale), m))
                    .collect()
            })
            .collect();
        let mut acc = vec![vec![0u32; plan.len()]; targets.len()];
        let mut fdpow = fd.clone();
        for j in 1..=dim as u32 {
            if j > 1 {
                let dpow = plan.inverse(plan.pointwise(&fdpow, &fd), len);
                fdpow = plan.forward(&dpow);
            }
            let w = weight - 12 * j;
            let fe = (w > 0).then(|| {
                let c = rat_mod(&eisenstein_factor(w), m);
                let mut e: Vec<u32> = sieve
                    .sigma_mod(w - 1, m)
                    .iter()
                    .map(|&s| m.mul(s, c))
                    .collect();
                e[0] = 1;
                plan.forward(&e)
            });
            for (a, c) in acc.iter_mut().zip(&coeffs) {
                let c = c[j as usize - 1];
                if c != 0 {
                    plan.accumulate(a, c, &fdpow, fe.as_deref());
                }
            }
        }
        for (t, a) in acc.into_iter().enumerate() {
            residues[t].push(plan.inverse(a, len));
        }
    }
    // Reconstruct each target to f64 (divided by its scale).
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(targets.len());
    let mut res = vec![0u32; crt.moduli().len()];
    for (t, tg) in targets.iter().enumerate() {
        let inv_scale = tg.scale.recip().to_f64().unwrap();
        let v: Vec<f64> = (0..len)
            .map(|n| {
                for (r, im) in res.iter_mut().zip(&residues[t]) {
                    *r = im[n];
                }
                crt.to_f64(&res) * inv_scale
            })
            .collect();
        values.push(v);
    }
    let mut out = vec![Vec::new(); eigens.len()];
    for ((_, members), &(start, deg)) in groups.iter().zip(&group_targets) {
        for &i in members {
            let f = &eigens[i];
            let theta = f.root;
            let expo = -0.5 * (weight as f64 - 1.0);
            let mut table = vec![0.0; len];
            for n in 1..len {
                let mut a = 0.0;
                for e in (0..deg).rev() {
                    a = a * theta + values[start + e][n];
                }
                table[n] = a * libm::pow(n as f64, expo);
            }
            // Consistency with the exact expansion where both exist.
            for n in 1..=f.trunc().min(n_max) {
                let exact = f.coeff_f64(n) * libm::pow(n as f64, expo);
                if (exact - table[n]).abs() > 1e-9 * (1.0 + exact.abs()) {
                    return Err(Error::Precondition(format!(
                        "modular coefficient table disagrees with exact expansion at n = {n}"
                    )));
                }
            }
            out[i] = table;
        }
    }
    Ok(out)
}

/// Row sums of |V^{-1}| for the Vandermonde matrix V[σ][e] = θ_σ^e.
fn vandermonde_inverse_abs_rows(roots: &[f64]) -> Vec<f64> {
    let n = roots.len();
    let v: Vec<Vec<f64>> = roots
        .iter()
        .map(|&r| (0..n).map(|e| libm::pow(r, e as f64)).collect())
        .collect();
    let mut rows = vec![0.0; n];
    for s in 0..n {
        let mut rhs = vec![0.0; n];
        rhs[s] = 1.0;
        // Column s of V^{-1}: solve V x = e_s.
        let x = linalg::solve_f64(&v, &rhs, 1e-300).unwrap_or_else(|| vec![f64::MAX; n]);
        for e in 0..n {
            rows[e] += x[e].abs();
        }
    }
    rows.iter().map(|r| r.max(1.0)).collect()
}

/// Bound in bits used for integer reconstruction; exposed for diagnostics.
pub fn bigint_bits(x: &BigInt) -> u64 {
    x.abs().bits()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::int;

    #[test]
    fn eisenstein_coefficients() {
        let e4 = eisenstein(4, 5).unwrap();
        let e6 = eisenstein(6, 5).unwrap();
        assert_eq!(e4.coeff(0), &int(1));
        assert_eq!(e4.coeff(1), &int(240));
        assert_eq!(e6.coeff(2), &int(-16632));
        assert_eq!(eisenstein_factor(12), BigRat::new(65520.into(), 691.into()));
        assert!(eisenstein(8, 3).is_err());
    }

    #[test]
    fn hecke_on_zero() {
        let z = IntegralForm {
            weight: 12,
            series: QSeries::zero(20),
            is_eigen: false,
        };
        assert!(hecke_tp_integral(&z, 2, 10).unwrap().series.is_zero());
        assert!(hecke_tp_integral(&z, 3, 10).is_err());
    }
}
