use halfint_core::classical::*;
use halfint_core::linalg;
use halfint_core::qseries::{int, BigRat, QSeries};
use num_bigint::BigInt;
use proptest::prelude::*;

/// q ∏ (1 - q^n)^24 by repeated multiplication. Intermediate values may wrap;
/// the final coefficients fit, so arithmetic mod 2^128 is exact.
fn tau_oracle(n_max: usize) -> Vec<i128> {
    let mut p = vec![0i128; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        for _ in 0..24 {
            for m in (n..=n_max).rev() {
                p[m] = p[m].wrapping_sub(p[m - n]);
            }
        }
    }
    let mut t = vec![0i128; n_max + 1];
    t[1..].copy_from_slice(&p[..n_max]);
    t
}

/// Number of (a, b) with 4a + 6b = w - 12: the monomial count.
fn dim_oracle(w: u32) -> usize {
    if w < 12 || w % 2 == 1 {
        return 0;
    }
    let r = w - 12;
    (0..=r / 6)
        .filter(|b| (r - 6 * b).is_multiple_of(4))
        .count()
}

#[test]
fn delta_matches_eta_product() {
    let d = delta(30);
    let oracle = tau_oracle(30);
    for n in 0..=30 {
        assert_eq!(
            d.series.coeff(n),
            &BigRat::from_integer(BigInt::from(oracle[n])),
            "n = {n}"
        );
    }
    assert_eq!(d.series.coeff(1), &int(1));
    assert_eq!(d.series.coeff(2), &int(-24));
    assert_eq!(d.series.coeff(3), &int(252));
}

#[test]
fn basis_dimensions() {
    assert_eq!(cusp_basis(12, 10).unwrap().len(), 1);
    assert_eq!(cusp_basis(24, 10).unwrap().len(), 2);
    assert_eq!(cusp_basis(10, 10).unwrap().len(), 0);
    for w in (12..=60).step_by(2) {
        let b = cusp_basis(w, dim_oracle(w) + 2).unwrap();
        assert_eq!(b.len(), dim_oracle(w), "weight {w}");
        assert_eq!(dim_cusp(w), dim_oracle(w));
        for (i, f) in b.iter().enumerate() {
            assert_eq!(f.series.valuation(), Some(i + 1));
            assert!(f.series.is_integral());
        }
    }
    assert!(matches!(
        cusp_basis(36, 3),
        Err(halfint_core::Error::TruncTooSmall { .. })
    ));
}

#[test]
fn hecke_on_delta() {
    let d = delta(40);
    let t2 = hecke_tp_integral(&d, 2, 10).unwrap();
    let t3 = hecke_tp_integral(&d, 3, 10).unwrap();
    assert_eq!(t2.series, d.series.truncate(10).scale(&int(-24)));
    assert_eq!(t3.series, d.series.truncate(10).scale(&int(252)));
}

#[test]
fn hecke_operators_commute() {
    for w in [24u32, 36, 48, 60] {
        let dim = dim_cusp(w);
        let basis = cusp_basis(w, 13 * 13 * dim + 1).unwrap();
        let mats: Vec<_> = HECKE_PRIMES
            .iter()
            .map(|&p| hecke_matrix(&basis, p))
            .collect();
        for a in &mats {
            for b in &mats {
                assert_eq!(linalg::mat_mul(a, b), linalg::mat_mul(b, a));
            }
        }
    }
}

#[test]
fn eigenforms_of_small_weights() {
    let e = eigenbasis_level1(12, 30).unwrap();
    assert_eq!(e.len(), 1);
    let oracle = tau_oracle(30);
    for n in 0..=30 {
        assert_eq!(
            e[0].coeff_rational(n).unwrap(),
            BigRat::from_integer(BigInt::from(oracle[n]))
        );
    }
    let ev: Vec<f64> = [2u64, 3, 5]
        .iter()
        .map(|&p| e[0].eigenvalue_f64(p).unwrap())
        .collect();
    assert_eq!(ev, [-24.0, 252.0, 4830.0]);
    assert_eq!(e[0].coeff_rational(4).unwrap(), int(-1472));

    assert_eq!(eigenbasis_level1(26, 10).unwrap().len(), 1);

    let e24 = eigenbasis_level1(24, 20).unwrap();
    assert_eq!(e24.len(), 2);
    assert!(!e24[0].is_rational());
    // Sum and product of the T_2 eigenvalues are the trace and determinant of T_2.
    let basis = cusp_basis(24, 10).unwrap();
    let t2 = hecke_matrix(&basis, 2);
    let cp = linalg::charpoly(&t2);
    let k = &e24[0].field;
    let a2 = e24[0].eigenvalue(2).unwrap();
    assert_eq!(k.trace(a2), -cp[1].clone());
    assert_eq!(k.norm(a2), cp[0].clone());
    let s = e24[0].eigenvalue_f64(2).unwrap() + e24[1].eigenvalue_f64(2).unwrap();
    assert!((s - k.trace(a2).to_string().parse::<f64>().unwrap()).abs() < 1e-6);
}

#[test]
fn normalized_eigenvalues() {
    let e = eigenbasis_level1(12, 30).unwrap();
    let d = &e[0];
    assert_eq!(lambda_f(d, 1), 1.0);
    assert!((lambda_f(d, 2) - (-0.530330085889911)).abs() < 1e-12);
    for p in [2usize, 3, 5] {
        let l = lambda_f(d, p);
        assert!((l * l - lambda_f(d, p * p) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn exact_multiplicativity_in_hecke_field() {
    for w in [12u32, 24, 32] {
        for f in eigenbasis_level1(w, 60).unwrap() {
            let k = &f.field;
            for m in 1..=60usize {
                for n in 1..=60 / m {
                    if num_integer::Integer::gcd(&m, &n) == 1 {
                        assert_eq!(k.mul(&f.coeffs[m], &f.coeffs[n]), f.coeffs[m * n]);
                    }
                }
            }
        }
    }
}

#[test]
fn long_tables_match_exact_and_are_multiplicative() {
    for w in [12u32, 24, 36] {
        let eig = eigenbasis_level1(w, 40).unwrap();
        let tables = lambda_tables(&eig, 20_000).unwrap();
        for (f, t) in eig.iter().zip(&tables) {
            for n in 1..=40 {
                assert!((t[n] - lambda_f(f, n)).abs() < 1e-12);
            }
            for (a, b) in [(101usize, 197usize), (97, 199), (128, 149), (3, 6661)] {
                let lhs = t[a] * t[b];
                assert!(
                    (lhs - t[a * b]).abs() < 1e-10 * (1.0 + lhs.abs()),
                    "w {w}: {a}*{b}"
                );
            }
            for p in [9973usize, 10007, 19997] {
                if p < t.len() {
                    assert!(t[p].abs() <= 2.0);
                }
            }
        }
    }
}

#[test]
fn overlong_tables_are_refused() {
    let eig = eigenbasis_level1(12, 4).unwrap();
    let n = halfint_core::ntt::MAX_TRANSFORM_LEN / 2;
    assert!(matches!(
        lambda_tables(&eig, n),
        Err(halfint_core::Error::BudgetExceeded(_))
    ));
    assert_eq!(lambda_tables(&eig, n - 2).unwrap()[0].len(), n - 1);
}

#[test]
fn hecke_charpoly_t3_weight24() {
    let cp = hecke_charpoly(24, 3).unwrap();
    assert_eq!(cp.len(), 3);
    assert_eq!(cp[2], int(1));
}

#[test]
fn delta_series_from_eigendata() {
    let e = eigenbasis_level1(12, 10).unwrap();
    let s: QSeries = e[0].series().unwrap();
    assert_eq!(s, delta(10).series);
}

proptest! {
    #[test]
    fn coprime_multiplicativity_of_delta(m in 1usize..40, n in 1usize..40) {
        prop_assume!(num_integer::Integer::gcd(&m, &n) == 1);
        let t = tau_oracle(m * n);
        prop_assert_eq!(t[m] * t[n], t[m * n]);
        let e = eigenbasis_level1(12, m * n).unwrap();
        prop_assert_eq!(e[0].coeff_rational(m * n).unwrap(), BigRat::from_integer(BigInt::from(t[m * n])));
    }
}
