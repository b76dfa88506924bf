//! Exact Padé approximants, their poles and D-log exponents.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{ceil_decimal, ceil_significant, floor_decimal, to_f64};
use crate::roots::{even_polynomial_roots, eval_with_derivative, polynomial_roots, RootError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PadeError {
    #[error("[{p}/{q}] needs {needed} coefficients, got {got}")]
    InsufficientCoefficients { p: usize, q: usize, needed: usize, got: usize },
    #[error("series has a zero constant term")]
    ZeroLeadingCoefficient,
    #[error("denominator derivative vanishes at the pole")]
    MultipleRoot,
    #[error("approximant has no poles")]
    NoPoles,
    #[error("need at least two pole reports")]
    TooFewReports,
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// `N(t)/D(t)` with `deg N ≤ p`, `deg D ≤ q`, `D(0) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadeApproximant {
    pub p: usize,
    pub q: usize,
    pub numerator: Vec<BigRational>,
    pub denominator: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PadeResult {
    Exists(PadeApproximant),
    NonExistence,
}

impl PadeResult {
    pub fn exists(&self) -> bool {
        matches!(self, PadeResult::Exists(_))
    }

    pub fn approximant(&self) -> Option<&PadeApproximant> {
        match self {
            PadeResult::Exists(a) => Some(a),
            PadeResult::NonExistence => None,
        }
    }
}

/// Integer row from rationals: every entry times the lcm of the row's
/// denominators.
fn integer_row(row: &[BigRational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Fraction-free (Bareiss) elimination of an `n × (n+1)` augmented system.
/// Returns the unique solution, or `None` when the matrix is singular.
fn bareiss_solve(mut m: Vec<Vec<BigInt>>) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= &x[j] * &m[i][j];
        }
        x[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Some(x)
}

fn coeff(c: &[BigRational], k: isize) -> BigRational {
    if k < 0 {
        BigRational::zero()
    } else {
        c[k as usize].clone()
    }
}

/// The `[p/q]` approximant of `c_0 + c_1 t + …`. The denominator solves the
/// Toeplitz system that cancels orders `p+1..=p+q`; the approximant exists
/// exactly when that system is nonsingular.
pub fn pade_approximant(c: &[BigRational], p: usize, q: usize) -> Result<PadeResult, PadeError> {
    let needed = p + q + 1;
    if c.len() < needed {
        return Err(PadeError::InsufficientCoefficients { p, q, needed, got: c.len() });
    }
    let mut b = vec![BigRational::one()];
    if q > 0 {
        let rows: Vec<Vec<BigInt>> = (1..=q)
            .map(|r| {
                let k = (p + r) as isize;
                let mut row: Vec<BigRational> = (1..=q).map(|i| coeff(c, k - i as isize)).collect();
                row.push(-coeff(c, k));
                integer_row(&row)
            })
            .collect();
        match bareiss_solve(rows) {
            Some(x) => b.extend(x),
            None => return Ok(PadeResult::NonExistence),
        }
    }
    let a: Vec<BigRational> = (0..=p)
        .map(|k| (0..=k.min(q)).fold(BigRational::zero(), |acc, i| acc + &b[i] * &c[k - i]))
        .collect();
    let approx = PadeApproximant {
        p,
        q,
        numerator: a,
        denominator: b,
    };
    if !order_of_contact_holds(&approx, c) {
        return Ok(PadeResult::NonExistence);
    }
    Ok(PadeResult::Exists(approx))
}

/// `D·c - N` vanishes through `t^{p+q}`.
pub fn order_of_contact_holds(approx: &PadeApproximant, c: &[BigRational]) -> bool {
    let b = &approx.denominator;
    (0..=approx.p + approx.q).all(|k| {
        let dc = (0..=k.min(b.len() - 1)).fold(BigRational::zero(), |acc, i| acc + &b[i] * &c[k - i]);
        let n = approx.numerator.get(k).cloned().unwrap_or_else(BigRational::zero);
        dc == n
    })
}

fn to_f64_vec(x: &[BigRational]) -> Vec<f64> {
    x.iter().map(to_f64).collect()
}

fn is_even(x: &[BigRational]) -> bool {
    x.iter().skip(1).step_by(2).all(Zero::is_zero)
}

/// Roots of the denominator. Even denominators are solved in `s = t²`.
pub fn find_poles(approx: &PadeApproximant, tol: f64) -> Result<Vec<Complex64>, PadeError> {
    let d = to_f64_vec(&approx.denominator);
    let poles = if is_even(&approx.denominator) {
        even_polynomial_roots(&d, tol)?
    } else {
        polynomial_roots(&d, tol)?
    };
    Ok(poles)
}

pub const DEFAULT_IM_TOL: f64 = 0.05;
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PoleReport {
    pub poles: Vec<Complex64>,
    /// Minimum-modulus pole.
    pub t_min: Complex64,
    /// Minimum-modulus pole among those with `|Im| ≤ im_tol`.
    pub t_real: Option<Complex64>,
    pub im_tol: f64,
}

/// Orders poles by modulus; moduli within 1e-9 relative tie, and ties go
/// to the larger real part, then the larger imaginary part.
fn preferred(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > 1e-9 * ma.max(mb) {
        return ma.total_cmp(&mb);
    }
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub fn classify_poles(poles: &[Complex64], im_tol: f64) -> Result<PoleReport, PadeError> {
    let t_min = *poles.iter().min_by(|a, b| preferred(a, b)).ok_or(PadeError::NoPoles)?;
    let t_real = poles.iter().filter(|z| z.im.abs() <= im_tol).min_by(|a, b| preferred(a, b)).copied();
    Ok(PoleReport {
        poles: poles.to_vec(),
        t_min,
        t_real,
        im_tol,
    })
}

pub const STATISTICS_LABEL: &str = "conjectural";

#[derive(Clone, Debug, PartialEq)]
pub struct PoleStatistics {
    pub mean_t_min: f64,
    pub rms_t_min: f64,
    pub mean_t_real: f64,
    pub rms_t_real: f64,
    /// Band applied around the mean `|T★|`: its rms rounded up to one
    /// significant digit.
    pub band: f64,
    pub interval: (f64, f64),
    pub label: &'static str,
}

fn mean_rms(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let rms = (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    (mean, rms)
}

/// Means and rms deviations of `|T∘|` and `|T★|` over a family of
/// approximants, with the interval `mean |T★| ± band` rounded outward to
/// two decimals.
pub fn pole_statistics(reports: &[PoleReport]) -> Result<PoleStatistics, PadeError> {
    if reports.len() < 2 {
        return Err(PadeError::TooFewReports);
    }
    let t_min: Vec<f64> = reports.iter().map(|r| r.t_min.norm()).collect();
    let t_real: Vec<f64> = reports.iter().filter_map(|r| r.t_real.map(|z| z.norm())).collect();
    if t_real.len() < 2 {
        return Err(PadeError::TooFewReports);
    }
    let (mean_t_min, rms_t_min) = mean_rms(&t_min);
    let (mean_t_real, rms_t_real) = mean_rms(&t_real);
    let band = ceil_significant(rms_t_real, 1);
    Ok(PoleStatistics {
        mean_t_min,
        rms_t_min,
        mean_t_real,
        rms_t_real,
        band,
        interval: (floor_decimal(mean_t_real - band, 2), ceil_decimal(mean_t_real + band, 2)),
        label: STATISTICS_LABEL,
    })
}

/// Coefficients of `f'/f` from those of `f`, one fewer than the input.
pub fn dlog_series(c: &[BigRational]) -> Result<Vec<BigRational>, PadeError> {
    let c0 = c.first().ok_or(PadeError::ZeroLeadingCoefficient)?;
    if c0.is_zero() {
        return Err(PadeError::ZeroLeadingCoefficient);
    }
    let mut g: Vec<BigRational> = Vec::with_capacity(c.len().saturating_sub(1));
    for n in 0..c.len().saturating_sub(1) {
        let mut acc = &c[n + 1] * BigRational::from_integer((n + 1).into());
        for i in 1..=n {
            acc -= &c[i] * &g[n - i];
        }
        g.push(acc / c0);
    }
    Ok(g)
}

/// Inverse of [`dlog_series`]: rebuilds `f` from `f(0)` and `f'/f`.
pub fn integrate_dlog(c0: &BigRational, g: &[BigRational]) -> Vec<BigRational> {
    let mut c = vec![c0.clone()];
    for n in 0..g.len() {
        let acc = (0..=n).fold(BigRational::zero(), |acc, i| acc + &c[i] * &g[n - i]);
        c.push(acc / BigRational::from_integer((n + 1).into()));
    }
    c
}

/// D-log approximant of order `p` for the series `c` of `f`.
///
/// For an even `f(t) = F(t²)` and odd `p`, this is `2t` times the
/// `[(p-1)/2 / (p-1)/2]` approximant of `F'/F` in `s = t²`, expressed in `t`
/// (numerator degree `p`, denominator degree `p - 1`). Otherwise it is the
/// plain `[p/p]` approximant of `f'/f`.
pub fn dlog_approximant(c: &[BigRational], p: usize) -> Result<PadeResult, PadeError> {
    if is_even(c) && p % 2 == 1 {
        let big_f: Vec<BigRational> = c.iter().step_by(2).cloned().collect();
        let g = dlog_series(&big_f)?;
        let r = (p - 1) / 2;
        let reduced = match pade_approximant(&g, r, r)? {
            PadeResult::Exists(a) => a,
            PadeResult::NonExistence => return Ok(PadeResult::NonExistence),
        };
        let two = BigRational::from_integer(2.into());
        let mut numerator = vec![BigRational::zero(); p + 1];
        for (i, a) in reduced.numerator.iter().enumerate() {
            numerator[2 * i + 1] = a * &two;
        }
        let mut denominator = vec![BigRational::zero(); p];
        for (i, b) in reduced.denominator.iter().enumerate() {
            denominator[2 * i] = b.clone();
        }
        return Ok(PadeResult::Exists(PadeApproximant {
            p,
            q: p - 1,
            numerator,
            denominator,
        }));
    }
    let g = dlog_series(c)?;
    pade_approximant(&g, p, p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DlogReport {
    pub pole: Complex64,
    /// Residue reading `λ★ = -N(T)/D'(T)`.
    pub lambda_star: Complex64,
    /// `λ★ / 2`, the exponent for the square root of `f`.
    pub alpha_star: Complex64,
}

pub fn dlog_exponent(approx: &PadeApproximant, pole: Complex64) -> Result<DlogReport, PadeError> {
    let n = to_f64_vec(&approx.numerator);
    let d = to_f64_vec(&approx.denominator);
    let (nv, _) = eval_with_derivative(&n, pole);
    let (_, dd) = eval_with_derivative(&d, pole);
    let r = pole.norm();
    let scale: f64 = d.iter().enumerate().skip(1).map(|(i, b)| i as f64 * b.abs() * r.powi(i as i32 - 1)).sum();
    if dd.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(PadeError::MultipleRoot);
    }
    let lambda_star = -nv / dd;
    Ok(DlogReport {
        pole,
        lambda_star,
        alpha_star: lambda_star / 2.0,
    })
}

/// `Σ z` and `Π z` of the roots against the values implied by the
/// coefficients, as relative errors.
pub fn vieta_errors(denominator: &[BigRational], roots: &[Complex64]) -> (f64, f64) {
    let d = to_f64_vec(denominator);
    let end = d.iter().rposition(|&x| x != 0.0).expect("nonzero polynomial");
    let n = end;
    let sum: Complex64 = roots.iter().sum();
    let prod: Complex64 = roots.iter().product();
    let expected_sum = -d[n - 1] / d[n];
    let expected_prod = if n % 2 == 0 { d[0] / d[n] } else { -d[0] / d[n] };
    let sum_scale = roots.iter().map(|z| z.norm()).sum::<f64>().max(expected_sum.abs()).max(f64::MIN_POSITIVE);
    let prod_scale = expected_prod.abs().max(f64::MIN_POSITIVE);
    (
        (sum - expected_sum).norm() / sum_scale,
        (prod - expected_prod).norm() / prod_scale,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn series_of(num: &[BigRational], den: &[BigRational], len: usize) -> Vec<BigRational> {
        // c = N / D by long division, D(0) = 1.
        let mut c: Vec<BigRational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = num.get(k).cloned().unwrap_or_else(BigRational::zero);
            for i in 1..=k.min(den.len() - 1) {
                acc -= &den[i] * &c[k - i];
            }
            c.push(acc);
        }
        c
    }

    #[test]
    fn trivial_and_geometric() {
        let c = vec![q(3, 1), q(1, 2), q(1, 3)];
        let a = pade_approximant(&c, 0, 0).unwrap();
        assert_eq!(a.approximant().unwrap().numerator, vec![q(3, 1)]);
        let ones = vec![q(1, 1); 4];
        let a = pade_approximant(&ones, 0, 1).unwrap();
        let a = a.approximant().unwrap();
        assert_eq!(a.numerator, vec![q(1, 1)]);
        assert_eq!(a.denominator, vec![q(1, 1), q(-1, 1)]);
        assert!(matches!(
            pade_approximant(&ones, 3, 3),
            Err(PadeError::InsufficientCoefficients { .. })
        ));
    }

    #[test]
    fn singular_systems_do_not_exist() {
        // even series: odd diagonal orders are singular
        let c = vec![q(1, 1), q(0, 1), q(2, 1), q(0, 1), q(7, 1), q(0, 1), q(5, 1), q(0, 1), q(3, 1)];
        assert_eq!(pade_approximant(&c, 1, 1).unwrap(), PadeResult::NonExistence);
        assert_eq!(pade_approximant(&c, 3, 3).unwrap(), PadeResult::NonExistence);
        assert!(pade_approximant(&c, 2, 2).unwrap().exists());
    }

    #[test]
    fn poles_of_one_minus_t_squared() {
        let approx = PadeApproximant {
            p: 0,
            q: 2,
            numerator: vec![q(1, 1)],
            denominator: vec![q(1, 1), q(0, 1), q(-1, 1)],
        };
        let poles = find_poles(&approx, ROOT_TOL).unwrap();
        assert_eq!(poles.len(), 2);
        let report = classify_poles(&poles, DEFAULT_IM_TOL).unwrap();
        assert_eq!(report.t_min, Complex64::new(1.0, 0.0));
        assert_eq!(report.t_real, Some(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn dlog_examples() {
        let geometric = vec![q(1, 1); 6];
        assert_eq!(dlog_series(&geometric).unwrap(), vec![q(1, 1); 5]);
        assert!(dlog_series(&[q(4, 1), q(0, 1), q(0, 1)]).unwrap().iter().all(Zero::is_zero));
        assert_eq!(dlog_series(&[q(0, 1), q(1, 1)]), Err(PadeError::ZeroLeadingCoefficient));
    }

    #[test]
    fn dlog_recovers_power_law_exponent() {
        // (1 - t)^{-5/2}: c_{n+1} = c_n (n + 5/2)/(n + 1)
        let lambda = q(5, 2);
        let mut c = vec![q(1, 1)];
        for n in 0..12 {
            let next = &c[n] * (BigRational::from_integer(n.into()) + &lambda) / BigRational::from_integer((n + 1).into());
            c.push(next);
        }
        let approx = dlog_approximant(&c, 1).unwrap();
        assert!(!dlog_approximant(&c, 2).unwrap().exists());
        let approx = approx.approximant().unwrap();
        let poles = find_poles(approx, ROOT_TOL).unwrap();
        let pole = *poles.iter().min_by(|a, b| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm())).unwrap();
        assert!((pole - 1.0).norm() < 1e-6);
        let report = dlog_exponent(approx, pole).unwrap();
        assert!((report.lambda_star.re - 2.5).abs() < 1e-6);
        assert!((report.alpha_star.re - 1.25).abs() < 1e-6);
    }

    #[test]
    fn even_dlog_uses_reduced_variable() {
        // f(t) = (1 - t^2)^{-3}: F(s) = (1 - s)^{-3}, F'/F = 3/(1-s), f'/f = 6t/(1 - t^2)
        let mut big_f = vec![q(1, 1)];
        for n in 0..6 {
            let next = &big_f[n] * BigRational::from_integer((n + 3).into()) / BigRational::from_integer((n + 1).into());
            big_f.push(next);
        }
        let mut c = Vec::new();
        for x in &big_f {
            c.push(x.clone());
            c.push(q(0, 1));
        }
        let approx = dlog_approximant(&c, 3).unwrap();
        let approx = approx.approximant().unwrap();
        assert_eq!(approx.numerator[..2], [q(0, 1), q(6, 1)]);
        assert_eq!(approx.denominator[..3], [q(1, 1), q(0, 1), q(-1, 1)]);
        let pole = Complex64::new(1.0, 0.0);
        assert!((dlog_exponent(approx, pole).unwrap().lambda_star.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn construct_then_recover_poles() {
        // D(t) = (1 - t/r1)(1 - t/r2)(1 - t/r3)(1 - t/r4) with rational roots
        let roots = [q(1, 2), q(-3, 4), q(5, 3), q(7, 5)];
        let mut den = vec![q(1, 1)];
        for r in &roots {
            let mut next = vec![q(0, 1); den.len() + 1];
            for (i, d) in den.iter().enumerate() {
                next[i] += d;
                next[i + 1] -= d / r;
            }
            den = next;
        }
        let num = vec![q(2, 1), q(-1, 3), q(1, 7)];
        let c = series_of(&num, &den, 12);
        let approx = pade_approximant(&c, 2, 4).unwrap();
        let approx = approx.approximant().unwrap();
        assert_eq!(approx.denominator, den);
        let poles = find_poles(approx, ROOT_TOL).unwrap();
        for r in &roots {
            let rf = to_f64(r);
            assert!(poles.iter().any(|z| (z - rf).norm() < 1e-10), "{rf} not in {poles:?}");
        }
        let (es, ep) = vieta_errors(&approx.denominator, &poles);
        assert!(es < 1e-10 && ep < 1e-10);
    }

    #[test]
    fn statistics_of_identical_reports() {
        let r = classify_poles(&[Complex64::new(0.6, 0.0), Complex64::new(0.5, 0.2)], DEFAULT_IM_TOL).unwrap();
        let s = pole_statistics(&[r.clone(), r.clone(), r]).unwrap();
        assert_eq!(s.rms_t_min, 0.0);
        assert_eq!(s.rms_t_real, 0.0);
        assert!(pole_statistics(&[]).is_err());
    }

    fn arb_series() -> impl Strategy<Value = Vec<BigRational>> {
        proptest::collection::vec((-20i64..20, 1i64..9), 9..14).prop_map(|v| {
            let mut c: Vec<BigRational> = v.into_iter().map(|(n, d)| q(n, d)).collect();
            if c[0].is_zero() {
                c[0] = q(1, 1);
            }
            c
        })
    }

    proptest! {
        #[test]
        fn approximants_have_the_order_of_contact(c in arb_series(), p in 0usize..4, qq in 0usize..4) {
            if let PadeResult::Exists(a) = pade_approximant(&c, p, qq).unwrap() {
                prop_assert!(order_of_contact_holds(&a, &c));
                prop_assert_eq!(a.denominator[0].clone(), q(1, 1));
            }
        }

        #[test]
        fn dlog_round_trips(c in arb_series()) {
            let g = dlog_series(&c).unwrap();
            prop_assert_eq!(integrate_dlog(&c[0], &g), c);
        }

        #[test]
        fn vieta_holds(c in arb_series(), qq in 1usize..5) {
            if let PadeResult::Exists(a) = pade_approximant(&c, 2, qq).unwrap() {
                if a.denominator.iter().skip(1).any(|x| !x.is_zero()) {
                    if let Ok(poles) = find_poles(&a, ROOT_TOL) {
                        let (es, ep) = vieta_errors(&a.denominator, &poles);
                        prop_assert!(es < 1e-10 && ep < 1e-10, "{} {}", es, ep);
                    }
                }
            }
        }
    }
}
