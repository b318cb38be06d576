use std::f64::consts::{PI, SQRT_2};

use radmax_core::bounds::{
    gaussian_construction, gaussian_mode_radius, gaussian_upper_construction, solve_radius_equation, t_exact, theorem1_construction,
    theorem1_parameters, unitball_case_analysis, unitball_sandwich, verify_remark, ExactPolicy,
};
use radmax_core::geometry::{beta0_concentric, beta0_unit_ball, off_center_ball_measure, GeometrySpec};
use radmax_core::optimize::{critical_exponent, find_root, sup_log_growth_base};
use radmax_core::oracle::{empirical_constant_lower_bound, monte_carlo_ball_measure, verify_level_set_inclusion, ProfileGrid};
use radmax_core::radial_measure::{log_ball_measure, log_total_measure};
use radmax_core::{Dimension, Exponent, RadialDensity, TestFunctionSpec, UnitBallCase};

fn dim(n: u64) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gaussian_radius_root_matches_dense_scan() {
    let f = RadialDensity::Gaussian;
    let n = dim(100);
    let (beta0, _, k) = theorem1_parameters(0.2).unwrap();
    assert!((k - 1.0 / 21.0).abs() < 1e-15);
    let root = solve_radius_equation(&f, n, beta0, k).unwrap();

    let ln_sin = beta0.sin().ln();
    let g = |r: f64| log_ball_measure(&f, n, r * beta0.sin()).unwrap().ln() - log_ball_measure(&f, n, r).unwrap().ln() - 100.0 * k * ln_sin;
    // largest sign change of g: coarse scan, then 10⁵ points inside the bracketing cell
    let last_change = |lo: f64, hi: f64, steps: usize| {
        let h = (hi - lo) / steps as f64;
        let mut prev = g(hi);
        for i in (0..steps).rev() {
            let x = lo + i as f64 * h;
            let v = g(x);
            if v.signum() != prev.signum() {
                return Some((x, x + h));
            }
            prev = v;
        }
        None
    };
    let (a, b) = last_change(0.5 * root, 2.0 * root, 1000).expect("coarse scan saw no sign change");
    let found = last_change(a, b, 100_000).map(|(x, y)| 0.5 * (x + y));
    let scanned = found.expect("dense scan saw no sign change");
    assert!(rel(root, scanned) < 1e-6, "root {root} vs scan {scanned}");
}

#[test]
fn unit_ball_radius_has_closed_form() {
    let f = RadialDensity::UnitBallIndicator;
    for lambda in [0.05, 0.2, 0.4] {
        let (beta0, _, k) = theorem1_parameters(lambda).unwrap();
        let expected = beta0.sin().powf(k - 1.0);
        for n in [3, 12, 50] {
            let root = solve_radius_equation(&f, dim(n), beta0, k).unwrap();
            assert!(rel(root, expected) < 1e-8, "λ = {lambda}, n = {n}: {root} vs {expected}");
        }
        let g = |r: f64| (r * beta0.sin()).min(1.0).ln() - r.min(1.0).ln() - k * beta0.sin().ln();
        let x = find_root(g, 1.0, 10.0, 1e-13).unwrap();
        assert!(rel(x, expected) < 1e-10);
    }
}

fn grid_scan(kind: Exponent, points: usize) -> (f64, f64) {
    let (lo, hi) = Exponent::domain();
    (0..points)
        .map(|i| {
            let l = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            (kind.objective(l), l)
        })
        .filter(|(v, _)| v.is_finite())
        .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
}

#[test]
fn critical_exponents_match_reference_values_and_grid_scans() {
    for kind in Exponent::ALL {
        let sup = critical_exponent(kind).unwrap();
        assert!((sup.value - kind.reference_value()).abs() < 1e-3, "{}: {}", kind.name(), sup.value);
        let (scan, _) = grid_scan(kind, 1_000_000);
        assert!(sup.value >= scan - 1e-6, "{}: optimizer {} below scan {scan}", kind.name(), sup.value);
        assert!(sup.value - scan < 1e-6, "{}: optimizer {} far above scan {scan}", kind.name(), sup.value);
    }
}

#[test]
fn frozen_exponents() {
    let expect = [
        (Exponent::General, 1.005_274_188),
        (Exponent::GaussianLower, 1.011_871_519),
        (Exponent::GaussianUpper, 1.049_426_410),
        (Exponent::UnitBall, 1.039_463_188),
    ];
    for (kind, v) in expect {
        let got = critical_exponent(kind).unwrap().value;
        assert!((got - v).abs() < 2e-9, "{}: {got}", kind.name());
    }
}

#[test]
fn exponent_ordering_on_a_lambda_grid() {
    let (lo, hi) = Exponent::domain();
    for i in 1..200 {
        let l = lo + (hi - lo) * i as f64 / 200.0;
        let g = Exponent::General.objective(l);
        assert!(Exponent::GaussianLower.objective(l) > g);
        assert!(Exponent::UnitBall.objective(l) > g);
        let (a, b) = Exponent::GaussianUpper.growth_coefficients(l);
        // e^{(1-λ²)/2} λ / sin β₀ < 1
        assert!(a + b < 0.0, "λ = {l}");
    }
    assert!(Exponent::General.objective(0.2) > 1.0);
}

#[test]
fn alpha_crosses_one_at_the_critical_exponent() {
    for kind in Exponent::ALL {
        let sup = critical_exponent(kind).unwrap();
        let at = kind.log_growth_base(sup.value, sup.argmax);
        assert!(at.abs() < 1e-6, "{}: ln α = {at}", kind.name());
        let below = sup_log_growth_base(kind, sup.value - 1e-3).unwrap().value;
        let above = sup_log_growth_base(kind, sup.value + 1e-3).unwrap().value;
        assert!(below > 0.0 && above < 0.0, "{}: {below} {above}", kind.name());
    }
}

#[test]
fn gaussian_upper_bound_dominates_exact_t() {
    let f = RadialDensity::Gaussian;
    for n in [20, 50] {
        let rn = gaussian_mode_radius(dim(n));
        for lambda in [0.1, 0.3] {
            for big_r in [0.5 * rn, rn] {
                let bound = gaussian_upper_construction(dim(n), 1.06, big_r, lambda * big_r).unwrap();
                let t = t_exact(&f, dim(n), 1.06, big_r, lambda * big_r).unwrap();
                assert!(t <= bound, "n = {n}, λ = {lambda}, R = {big_r}: {t} > {bound}");
            }
        }
    }
    assert!(gaussian_upper_construction(dim(20), 1.06, 2.0 * gaussian_mode_radius(dim(20)), 0.1).is_err());
}

#[test]
fn half_space_boundary_gives_t_at_most_two() {
    let f = RadialDensity::Gaussian;
    let n = dim(10);
    let lambda = SQRT_2 - 1.0;
    assert!(beta0_concentric(lambda).unwrap().cos().abs() < 1e-12);
    for big_r in [0.3, 1.0, gaussian_mode_radius(n)] {
        for p in [1.0, 1.06, 2.0] {
            let t = t_exact(&f, n, p, big_r, lambda * big_r).unwrap();
            assert!(t <= 2f64.ln() + 1e-12, "R = {big_r}, p = {p}: {}", t.exp());
        }
    }
}

#[test]
fn unit_ball_sandwich_contains_exact_t() {
    let f = RadialDensity::UnitBallIndicator;
    for n in [5, 10, 20] {
        let (lo, hi) = unitball_sandwich(dim(n), 1.02, 1.0, 0.15).unwrap();
        let t = t_exact(&f, dim(n), 1.02, 1.0, 0.15).unwrap();
        assert!(lo <= t && t <= hi, "n = {n}: {lo} <= {t} <= {hi}");
        let ratio = log_ball_measure(&f, dim(n), 0.15).unwrap().ln() - log_ball_measure(&f, dim(n), 1.0).unwrap().ln();
        assert!((ratio - n as f64 * 0.15f64.ln()).abs() < 1e-9);
    }
    assert!((beta0_unit_ball(1.0, 0.2).unwrap().cos() - beta0_concentric(0.2).unwrap().cos()).abs() < 1e-15);
}

#[test]
fn unit_ball_case_bounds_dominate_exact_t() {
    let f = RadialDensity::UnitBallIndicator;
    let p = 1.1;
    let mut seen = [false; 4];
    for n in [5, 15] {
        for big_r in [0.3, 0.55, 0.8, 0.95, 1.0] {
            for lambda in [0.05, 0.2, 0.35, 0.6] {
                let (case, bound) = unitball_case_analysis(dim(n), p, big_r, lambda).unwrap();
                seen[case as usize - 1] = true;
                let t = t_exact(&f, dim(n), p, big_r, lambda * big_r).unwrap();
                assert!(t <= bound + 1e-9, "n = {n}, R = {big_r}, λ = {lambda}, {case:?}: {t} > {bound}");
            }
        }
    }
    assert!(seen.iter().all(|&s| s), "cases seen: {seen:?}");
    let (case, bound) = unitball_case_analysis(dim(30), 1.1, 1.0, 0.2).unwrap();
    assert_eq!(case, UnitBallCase::Concentric);
    assert!(bound < (PI.sqrt() * 30.0).ln());
}

#[test]
fn theorem1_chain_for_three_densities() {
    let policy = ExactPolicy::default();
    for f in [RadialDensity::Gaussian, RadialDensity::UnitBallIndicator] {
        for n in [3, 30, 300] {
            for lambda in [0.05, 0.2, 0.4] {
                let rep = theorem1_construction(&f, dim(n), 1.02, lambda, &policy).unwrap();
                assert_eq!(rep.chain_holds(1e-9), Some(true), "{} n = {n} λ = {lambda}", f.name());
            }
        }
    }
    assert!(theorem1_construction(&RadialDensity::Lebesgue, dim(3), 1.02, 0.2, &policy).is_err());
}

#[test]
fn gaussian_construction_chain() {
    for n in [50, 200] {
        for lambda in [0.1, 0.3] {
            let rep = gaussian_construction(dim(n), 1.02, lambda, &ExactPolicy::default()).unwrap();
            assert_eq!(rep.chain_holds(1e-9), Some(true), "n = {n}, λ = {lambda}");
        }
    }
}

#[test]
fn radii_grow_with_dimension() {
    let rep = verify_remark(&RadialDensity::Gaussian, &[dim(20), dim(40), dim(80), dim(160)], 0.2).unwrap();
    assert!(rep.passed());
    let rep = verify_remark(&RadialDensity::UnitBallIndicator, &[dim(10), dim(100), dim(1000)], 0.2).unwrap();
    assert!(rep.passed());
}

#[test]
fn level_set_inclusion_examples() {
    let rep = verify_level_set_inclusion(&RadialDensity::UnitBallIndicator, dim(2), 1.0, 0.15).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    let rep = verify_level_set_inclusion(&RadialDensity::Gaussian, dim(3), 1.0, 0.2).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn empirical_constant_dominates_t() {
    let cases = [(RadialDensity::UnitBallIndicator, 2, 1.0, 0.15), (RadialDensity::Gaussian, 3, 1.0, 0.2)];
    for (f, n, big_r, r) in cases {
        let g = TestFunctionSpec::new(r).unwrap();
        let grid = ProfileGrid {
            points: 48,
            focus: big_r,
            outer: 2.5,
        };
        for p in [1.0, 1.5, 3.0] {
            let c = empirical_constant_lower_bound(&f, dim(n), g, p, &grid).unwrap();
            assert!(c >= 1.0, "{} p = {p}: {c}", f.name());
            if p > 1.0 {
                let t = t_exact(&f, dim(n), p, big_r, r).unwrap().exp();
                assert!(c >= t, "{} p = {p}: {c} < {t}", f.name());
            }
        }
    }
}

#[test]
fn monte_carlo_examples() {
    let f = RadialDensity::UnitBallIndicator;
    let all = monte_carlo_ball_measure(&f, dim(3), 0.0, 1.5, 20_000, 9).unwrap();
    assert_eq!(all.estimate, 1.0);

    let g = RadialDensity::Gaussian;
    let a = monte_carlo_ball_measure(&g, dim(3), 0.7, 1.2, 200_000, 42).unwrap();
    let b = monte_carlo_ball_measure(&g, dim(3), 0.7, 1.2, 200_000, 42).unwrap();
    assert_eq!(a, b);
    let exact = (off_center_ball_measure(&g, &GeometrySpec::new(dim(3), 0.7, 1.2).unwrap()).unwrap().ln()
        - log_total_measure(&g, dim(3)).unwrap().ln())
    .exp();
    assert!((a.estimate - exact).abs() < 3.0 * a.stderr, "{} vs {exact} ± {}", a.estimate, a.stderr);
}
