use halfint_core::arith::DiscriminantFilter;
use halfint_core::moments::*;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

fn odd_primes(n: usize) -> Vec<f64> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            if i > 2 {
                out.push(i as f64);
            }
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn euler_product_g0() {
    assert_eq!(euler_g0(2).value, 1.0);
    let a = euler_g0(100_000);
    let b = euler_g0(1_000_000);
    assert!((a.value - b.value).abs() < 1e-9);
    assert!(b.value > 0.0 && b.value < 1.0);
    assert!(b.tail_bound < a.tail_bound);
    // Plain product out to 2·10⁶ with the ∑ p^{-2} tail.
    let direct: f64 = odd_primes(2_000_000)
        .iter()
        .map(|p| 1.0 - 1.0 / (p * (p + 1.0)))
        .product();
    assert!((direct - b.value).abs() < 1e-6);
    assert!((b.raw - b.value).abs() <= b.raw_tail_bound * b.raw);
    let series: f64 = odd_primes(1_000_000)
        .iter()
        .map(|p| -p.ln() / ((p + 1.0) * (p + 1.0) * (p - 1.0) * (1.0 - 1.0 / (p * (p + 1.0)))))
        .sum();
    assert!((euler_g0_prime(1_000_000) - b.value * series).abs() < 1e-12);
    assert!(euler_g0_prime(1_000_000) < 0.0);
}

#[test]
fn classical_constants() {
    assert!((euler_gamma() - 0.577_215_664_901_532_9).abs() < 1e-12);
    assert!((zeta_prime_2() + 0.937_548_254_315_843_8).abs() < 1e-12);
    assert!((zeta_log_derivative_2() + 0.569_960_993_094_532_2).abs() < 1e-10);
}

#[test]
fn constant_c_assembly() {
    assert!((assemble_c(1.0, 0.0, 0.0, 0.0) - (LN_2 / 3.0 - (2.0 * PI).ln())).abs() < 1e-15);
    assert_eq!(assemble_c(0.0, 0.5, 1.0, 1.0), 0.5);
    let a = constant_c(100_000);
    let b = constant_c(200_000);
    assert!((a.value - b.value).abs() < 1e-8);
    let c = assemble_c(b.g0, b.g0_prime, b.gamma, b.zeta_ratio);
    assert_eq!(c, b.value);
}

#[test]
fn test_functions() {
    let tf = TestFunctionPair::standard();
    assert!((tf.h_hat0 - 1.0).abs() < 1e-14);
    assert!((tf.phi_hat0 - 1.0).abs() < 1e-14);
    assert!(tf.quad_stability < 1e-12);
    let u = Bump::unit();
    let want = simpson(|x| u.eval(x) * x.ln(), 1.0, 2.0, 200_000);
    assert!((tf.h_log - want).abs() < 1e-10);
    assert!((tf.phi_log - want).abs() < 1e-10);
    assert!(TestFunctionPair::new(
        Bump {
            centre: 0.5,
            half_width: 1.0,
            scale: 1.0
        },
        u
    )
    .is_err());
    assert_eq!(k_range(12, &u), (7..=12).collect::<Vec<_>>());
    assert_eq!(k_range(20, &u), (11..=20).collect::<Vec<_>>());
}

#[test]
fn discriminant_windows() {
    let u = Bump::unit();
    let even = discriminant_window(8, 10.0, &u, DiscriminantFilter::Fundamental);
    assert_eq!(even, [12, 13, 17]);
    let odd = discriminant_window(9, 10.0, &u, DiscriminantFilter::Fundamental);
    assert_eq!(odd, [-11, -15, -19]);
}

#[test]
fn weights_sums_approach_one() {
    let w14 = weights_sum_check(14, 1e-13).unwrap();
    assert_eq!((w14.dim, w14.sum), (0, 0.0));
    let devs: Vec<f64> = [16u32, 18, 20, 22, 24]
        .iter()
        .map(|&w| weights_sum_check(w, 1e-13).unwrap().deviation)
        .collect();
    assert!(devs.windows(2).all(|p| p[1] < p[0]), "{devs:?}");
    assert!(devs[4] < 1e-3);
}

fn data() -> &'static [WeightData] {
    static D: OnceLock<Vec<WeightData>> = OnceLock::new();
    D.get_or_init(|| {
        (7..=12)
            .filter(|&k| k != 7)
            .map(|k| WeightData::new(k, 20, 1e-8, 1e-13).unwrap())
            .collect()
    })
}

#[test]
fn small_moments_agree_across_routes() {
    let tf = TestFunctionPair::standard();
    let s1 = s1_empirical(12, 10.0, &tf, data(), DiscriminantFilter::Fundamental).unwrap();
    assert!(s1.agreement < 1e-6, "{s1:?}");
    assert!((s1.predicted - 120.0 / (2.0 * PI * PI)).abs() < 1e-12);
    let b: f64 = s1.cells.iter().map(|c| c.weight * c.l_route).sum();
    assert!((b - s1.route_b).abs() < 1e-12 * s1.route_b.abs());
    assert!(s1
        .cells
        .iter()
        .all(|c| c.reference_d.abs() <= 20 && c.reference_d != c.d));
    let s2 = s2_empirical(12, 10.0, &tf, data(), DiscriminantFilter::Fundamental).unwrap();
    assert!(s2.agreement < 1e-6);
    assert_eq!(s2.prediction_terms.len(), 4);
    assert!(s2.route_b > 0.0);
    assert!(s1_empirical(20, 10.0, &tf, data(), DiscriminantFilter::Fundamental).is_err());
}

proptest! {
    #[test]
    fn bump_is_supported_and_nonnegative(x in -1.0f64..4.0) {
        let u = Bump::unit();
        let v = u.eval(x);
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v > 0.0, x > 1.0 && x < 2.0);
    }

    #[test]
    fn k_range_is_the_support(big_k in 2u32..60) {
        let u = Bump::unit();
        for k in 1..=2 * big_k {
            let t = (2.0 * k as f64 - 1.0) / big_k as f64;
            prop_assert_eq!(k_range(big_k, &u).contains(&k), t > 1.0 && t < 2.0);
        }
    }
}
