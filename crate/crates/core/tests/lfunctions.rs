use halfint_core::charsums::kronecker;
use halfint_core::classical::{eigenbasis_level1, lambda_tables};
use halfint_core::halfint::{eigenbasis_plus, normalized_coeff};
use halfint_core::lfunctions::*;
use halfint_core::Error;
use std::f64::consts::PI;

/// τ(n) for n ≤ n_max from q∏(1 - qⁿ)^24.
fn tau(n_max: usize) -> Vec<i128> {
    let mut p = vec![0i128; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        for _ in 0..24 {
            for m in (n..=n_max).rev() {
                p[m] -= p[m - n];
            }
        }
    }
    let mut t = vec![0i128; n_max + 1];
    t[1..].copy_from_slice(&p[..n_max]);
    t
}

/// L(1/2, Δ⊗χ_d) from the unsmoothed functional equation:
/// 2 Σ λ(m)χ_d(m) m^{-1/2} Γ(6, 2πm/|d|)/Γ(6).
fn delta_twist_oracle(d: i64) -> f64 {
    let n = 400;
    let t = tau(n);
    let mut s = 0.0;
    for m in 1..=n {
        let chi = kronecker(d, m as i64);
        if chi == 0 {
            continue;
        }
        let y = 2.0 * PI * m as f64 / d.unsigned_abs() as f64;
        let mut g = 0.0;
        let mut term = 1.0;
        for j in 0..6 {
            if j > 0 {
                term *= y / j as f64;
            }
            g += term;
        }
        let lam = t[m] as f64 / (m as f64).powf(5.5);
        s += chi as f64 * lam / (m as f64).sqrt() * (-y).exp() * g;
    }
    2.0 * s
}

#[test]
fn twisted_values_of_delta_match_unsmoothed_oracle() {
    let f = eigenbasis_level1(12, 10).unwrap().remove(0);
    let kernel = AfeKernel::new(12).unwrap();
    let lam = lambda_tables(std::slice::from_ref(&f), kernel.required_len(17, 1e-10))
        .unwrap()
        .remove(0);
    for d in [1i64, 5, 8, 12, 13, 17] {
        let r = l_central_twist(&f, &lam, d, 1e-10, &kernel).unwrap();
        let want = delta_twist_oracle(d);
        assert!(
            (r.value - want).abs() < 1e-9,
            "d {d}: {} vs {want}",
            r.value
        );
        assert!(r.residual <= r.err_budget);
        assert!(r.value >= -1e-8);
        assert!(!r.declared_zero);
    }
    let r = l_central_twist(&f, &lam, 1, 1e-8, &kernel).unwrap();
    assert!((r.value - 0.792_122_838_6).abs() < 1e-8);
    // Wrong sign: declared zero, nothing summed.
    let z = l_central_twist(&f, &lam, -3, 1e-8, &kernel).unwrap();
    assert!(z.declared_zero && z.value == 0.0 && z.m_max == 0);
    assert!(matches!(
        l_central_twist(&f, &lam[..100], 5, 1e-8, &kernel),
        Err(Error::CoefficientShortage { .. })
    ));
    assert!(l_central_twist(&f, &lam, 9, 1e-8, &kernel).is_err());
}

#[test]
fn truncation_grows_with_budget_and_discriminant() {
    let kernel = AfeKernel::new(24).unwrap();
    let a = kernel.m_max(5, 1e-6);
    let b = kernel.m_max(5, 1e-9);
    let c = kernel.m_max(20, 1e-9);
    assert!(a < b && b < c);
    assert!((c as f64 / b as f64 - 4.0).abs() < 0.01);
    assert_eq!(root_number(12, 5), 1);
    assert_eq!(root_number(12, -3), -1);
    assert_eq!(root_number(18, -3), 1);
}

#[test]
fn harmonic_weight_of_delta() {
    let f = eigenbasis_level1(12, 10).unwrap();
    let w = omega_f_solve(&f, 1e-14).unwrap();
    let omega = w.omega[0];
    // Direct: ω = 1 + 2π Σ_c S(1,1;c)/c J_11(4π/c), with a doubled cutoff.
    let (g, c) = petersson_geometric(12, 1, 1, 1e-14).unwrap();
    assert!((omega - 1.0 - g).abs() < 1e-13);
    let wide: f64 = {
        use halfint_core::charsums::kloosterman;
        use halfint_core::specfun::{bessel_j, PrecisionBudget};
        (1..=2 * c)
            .map(|c| {
                kloosterman(1, 1, c).value.re / c as f64
                    * bessel_j(11.0, 4.0 * PI / c as f64, PrecisionBudget::with_abs(1e-18)).unwrap()
            })
            .sum()
    };
    assert!((1.0 + 2.0 * PI * wide - omega).abs() < 1e-12);
    // Second route through (2, 2): ω λ(2)² = 1 + geometric(2, 2).
    let lam2 = halfint_core::classical::lambda_f(&f[0], 2);
    let (g22, _) = petersson_geometric(12, 2, 2, 1e-14).unwrap();
    assert!(((1.0 + g22) / (lam2 * lam2) - omega).abs() < 1e-10);
    let s = sym2_l1(12, omega);
    assert!(s > 0.0);
    assert!((s - sym2_l1(12, (1.0 + g22) / (lam2 * lam2))).abs() < 1e-8);
    assert!(omega_f_solve(&[], 1e-12).is_err());
}

#[test]
fn petersson_residuals() {
    for w in [12u32, 16, 18, 20, 22, 26, 24, 28] {
        let f = eigenbasis_level1(w, 10).unwrap();
        let h = omega_f_solve(&f, 1e-13).unwrap();
        assert!(h.omega.iter().all(|&o| o > 0.0));
        for m in 1..=4 {
            for n in 1..=4 {
                let r = petersson_residual(&f, &h, m, n).unwrap();
                assert!(r.residual < 1e-8, "w {w} ({m},{n}): {r:?}");
            }
        }
    }
}

#[test]
fn waldspurger_and_alpha() {
    let pairs = eigenbasis_plus(6, 100).unwrap();
    let p = &pairs[0];
    let kernel = AfeKernel::new(12).unwrap();
    let lam = lambda_tables(std::slice::from_ref(&p.f), kernel.required_len(17, 1e-9))
        .unwrap()
        .remove(0);
    let ls: Vec<LValueRecord> = [1i64, 5, 13, 17]
        .iter()
        .map(|&d| l_central_twist(&p.f, &lam, d, 1e-9, &kernel).unwrap())
        .collect();
    for a in &ls {
        assert_eq!(waldspurger_ratio_check(p, a, a).unwrap(), 0.0);
        for b in &ls {
            assert!(waldspurger_ratio_check(p, a, b).unwrap() < 1e-6);
        }
    }
    let omega = omega_f_solve(std::slice::from_ref(&p.f), 1e-14)
        .unwrap()
        .omega[0];
    let a1 = alpha_g_fix(p, omega, &ls[0]).unwrap();
    let a5 = alpha_g_fix(p, omega, &ls[1]).unwrap();
    assert!(a1.alpha > 0.0 && a1.reference_d == 1);
    assert!((a1.alpha / a5.alpha - 1.0).abs() < 1e-6);
    // Global coherence against every other discriminant.
    for l in &ls[2..] {
        let c = normalized_coeff(&p.g, l.d as usize);
        assert!((a1.alpha * c * c / (omega * l.value) - 1.0).abs() < 1e-6);
    }
    // √α_g |c_g(d)| is of size k^{-1/2} up to a factor 10.
    let s = a1.alpha.sqrt() * normalized_coeff(&p.g, 5).abs();
    let scale = 1.0 / 6f64.sqrt();
    assert!(s > scale / 10.0 && s < scale * 10.0);
    let zero = LValueRecord {
        value: 1e-12,
        ..ls[0].clone()
    };
    assert!(matches!(
        waldspurger_ratio_check(p, &zero, &ls[1]),
        Err(Error::DivisionByZero(_))
    ));
    let neg = LValueRecord {
        d: -3,
        ..ls[0].clone()
    };
    assert!(alpha_g_fix(p, omega, &neg).is_err());
}

#[test]
fn mollifier() {
    let f = eigenbasis_level1(12, 40).unwrap().remove(0);
    let lam: Vec<f64> = (0..=40)
        .map(|n| {
            if n == 0 {
                0.0
            } else {
                halfint_core::classical::lambda_f(&f, n)
            }
        })
        .collect();
    assert_eq!(mollifier_value(&lam, 5, 1).unwrap(), 1.0);
    assert!((mollifier_value(&lam, 1, 3).unwrap() - 1.0).abs() < 1e-15);
    let t = tau(10);
    let mut want = 0.0;
    for (l, mu) in [(1usize, 1.0), (3, -1.0), (5, -1.0), (7, -1.0)] {
        let lam_l = t[l] as f64 / (l as f64).powf(5.5);
        want += mu * lam_l * kronecker(5, l as i64) as f64 / (l as f64).sqrt()
            * (1.0 - (l as f64).ln() / 10f64.ln());
    }
    assert!((mollifier_value(&lam, 5, 10).unwrap() - want).abs() < 1e-12);
    assert!(mollifier_value(&lam, 5, 0).is_err());
    assert!(mollifier_value(&lam, 5, 100).is_err());
}

#[test]
fn nonvanishing_report() {
    let r = nonvanishing_experiment(&[6, 8, 9, 10, 11], 1, 1e-12).unwrap();
    assert_eq!(r.rows.iter().map(|r| r.k).collect::<Vec<_>>(), [6, 8, 10]);
    assert_eq!(r.natural, 1.0);
    assert!((r.harmonic - 1.0).abs() < 1e-15);
    let r = nonvanishing_experiment(&[9, 11], -3, 1e-12).unwrap();
    assert_eq!(r.rows.len(), 2);
    for row in &r.rows {
        assert!(row.nonzero <= row.forms && row.nonzero_mass <= row.mass + 1e-15);
    }
}

#[test]
fn half_integral_petersson_sides() {
    let pairs = eigenbasis_plus(6, 100).unwrap();
    let p = &pairs[0];
    let kernel = AfeKernel::new(12).unwrap();
    let lam = lambda_tables(std::slice::from_ref(&p.f), kernel.required_len(1, 1e-10))
        .unwrap()
        .remove(0);
    let l1 = l_central_twist(&p.f, &lam, 1, 1e-10, &kernel).unwrap();
    let omega = omega_f_solve(std::slice::from_ref(&p.f), 1e-14)
        .unwrap()
        .omega[0];
    let alpha = alpha_g_fix(p, omega, &l1).unwrap();
    for m in [1u64, 4, 5] {
        let (g, _) = half_petersson_geometric(6, m, m, 1e-10).unwrap();
        assert!(g.im.abs() < 1e-12);
        let r = half_petersson_residual(&pairs, std::slice::from_ref(&alpha), m, m, 1e-10).unwrap();
        // Observed normalization: the spectral side is 2(1 + geometric).
        assert!(
            (r.spectral - 2.0 * (1.0 + g.re)).abs() < 1e-6,
            "m {m}: {r:?}"
        );
    }
}
