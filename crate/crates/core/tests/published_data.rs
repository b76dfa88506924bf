//! Checks against published numbers beyond the acceptance criteria.

mod common;

use std::sync::OnceLock;

use common::{norm_polynomial_52, published, r, reference_norms, units_of_16th_digit};
use euler_taylor::analysis::{default_band, fit_power_law, radius_interval, root_test_sequence, ExponentMode, RadiusKind};
use euler_taylor::euler::{bnw_datum, Extender, TaylorSeries};
use euler_taylor::exact::{ceil_significant, to_f64};
use euler_taylor::norms::{mu_and_remainder, mu_table, norm_series, squared_norms, REMAINDER_LABEL};
use euler_taylor::pade::{find_poles, pade_approximant, vieta_errors, ROOT_TOL};
use euler_taylor::symmetry::detect_symmetries;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

fn series24() -> &'static TaylorSeries {
    static CELL: OnceLock<TaylorSeries> = OnceLock::new();
    CELL.get_or_init(|| {
        let u0 = bnw_datum();
        let profile = detect_symmetries(&u0, 0);
        Extender::new(24).profile(Some(&profile)).run(TaylorSeries::new(u0)).unwrap()
    })
}

#[test]
fn nu_series_matches_published_polynomial_through_order_24() {
    let nu = norm_series(series24(), 3, true);
    let mut worst = 0.0f64;
    for (power, reference) in norm_polynomial_52().into_iter().filter(|(p, _)| *p <= 24) {
        let units = units_of_16th_digit(&nu.coeffs[power], &reference);
        assert!(units <= 1.0, "t^{power}: {} units", units);
        worst = worst.max(units);
    }
    assert!(worst <= 1.0);
}

#[test]
fn mu_values_round_up_to_published_figures() {
    let norms = squared_norms(series24(), 3);
    let radius = r(8, 25);
    let mu = mu_table(&norms, &radius);
    for (j, expected) in [(5, 11.7), (10, 5.99), (20, 3.39)] {
        assert_eq!(ceil_significant(mu.mu(j), 3), expected, "mu_{j} = {}", mu.mu(j));
    }
    assert!(mu.monotone_decreasing);

    // Higher orders from the published squared norms.
    let published: Vec<(usize, BigRational)> = reference_norms().into_iter().map(|(j, p)| (j, p.value)).collect();
    for (j, expected) in [(30, 2.61), (40, 2.20), (52, 1.88)] {
        let x = &published[j - 1].1;
        let mu_j = to_f64(&(num_traits::pow(radius.clone(), 2 * j) * x)).sqrt();
        assert_eq!(ceil_significant(mu_j, 3), expected, "mu_{j} = {mu_j}");
    }

    let rep = mu_and_remainder(&norms, 20, &r(1, 10), &radius).unwrap();
    assert_eq!(rep.label, REMAINDER_LABEL);
    let q: f64 = 0.1 / 0.32;
    let expected = mu.mu(20) * q.powi(21) / (1.0 - q);
    assert!((rep.bound - expected).abs() <= 1e-12 * expected);
}

#[test]
fn twelfth_diagonal_matches_published_coefficients_and_poles() {
    let nu = norm_series(series24(), 3, true);
    let approx = pade_approximant(&nu.coeffs, 12, 12).unwrap().approximant().unwrap().clone();
    let b0 = approx.denominator[0].clone();
    let num: Vec<f64> = approx.numerator.iter().map(|a| to_f64(&(a / &b0))).collect();
    let den: Vec<f64> = approx.denominator.iter().map(|b| to_f64(&(b / &b0))).collect();
    let n12 = [
        "96",
        "6.680481407149543e3",
        "3.08095009988031e4",
        "2.3462351635051233e5",
        "2.407391215430808e5",
        "2.5575522886490226e6",
        "3.094974424148063e6",
    ];
    let d12 = [
        "1",
        "0.255014657807743",
        "4.288322833232482",
        "-5.985294148961588",
        "8.973150435320479",
        "66.29326162173366",
        "-612.1107629833056",
    ];
    for (i, (a, b)) in n12.iter().zip(d12).enumerate() {
        let a = to_f64(&published(a).value);
        let b = to_f64(&published(b).value);
        assert!((num[2 * i] - a).abs() <= 1e-14 * a.abs(), "N t^{}: {} vs {a}", 2 * i, num[2 * i]);
        assert!((den[2 * i] - b).abs() <= 1e-14 * b.abs(), "D t^{}: {} vs {b}", 2 * i, den[2 * i]);
    }
    assert!(num.iter().skip(1).step_by(2).all(|&x| x == 0.0));

    let poles = find_poles(&approx, ROOT_TOL).unwrap();
    assert_eq!(poles.len(), 12);
    let listed = [(0.294020, 0.464361), (0.511609, 0.301416), (0.0, 0.606004), (0.626199, 0.0)];
    for (re, im) in listed {
        for z in [Complex64::new(re, im), Complex64::new(-re, im), Complex64::new(re, -im), Complex64::new(-re, -im)] {
            assert!(poles.iter().any(|w| (w - z).norm() < 1e-5), "{z} missing from {poles:?}");
        }
    }
    let (sum_err, prod_err) = vieta_errors(&approx.denominator, &poles);
    assert!(sum_err < 1e-10 && prod_err < 1e-10);
}

#[test]
fn theta_fit_on_published_coefficients() {
    let points: Vec<(usize, f64)> = norm_polynomial_52()
        .into_iter()
        .filter(|(p, _)| (36..=52).contains(p))
        .map(|(p, c)| (p, root_test_sequence(&[c.value.abs()], p, ExponentMode::Norm).unwrap()[0]))
        .collect();
    let fit = fit_power_law(&points, 36..=52).unwrap();
    assert!((fit.a - 0.484).abs() < 2e-2, "{fit:?}");
    assert!(fit.rms_error < 0.01, "{fit:?}");
    let est = radius_interval(&fit, 0.01f64.max(default_band(fit.rms_error)), 2, RadiusKind::Theta, 3).unwrap();
    assert!(est.lower < 0.484 && est.upper > 0.484);
}

#[test]
fn root_test_of_table_entry() {
    let x = published("2.825486371143428e11").value;
    let y = root_test_sequence(&[x], 10, ExponentMode::SquaredNorm).unwrap()[0];
    // 50-digit evaluation of the same power.
    assert!((y - 0.267_574_879_895_558).abs() < 1e-15, "{y}");
}
