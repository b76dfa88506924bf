//! Complex roots of real polynomials by Aberth–Ehrlich simultaneous
//! iteration.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("root iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("polynomial has a non-finite coefficient")]
    NonFinite,
}

pub const MAX_SWEEPS: usize = 1000;

/// Value and derivative by Horner; coefficients in ascending powers.
pub fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// `|p(z)| / Σ |a_i| |z|^i`, the relative backward error of `z` as a root.
pub fn relative_residual(coeffs: &[f64], z: Complex64) -> f64 {
    let (p, _) = eval_with_derivative(coeffs, z);
    let r = z.norm();
    let scale = coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.abs());
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

fn trim(coeffs: &[f64]) -> &[f64] {
    let end = coeffs.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1);
    &coeffs[..end]
}

/// All roots of a real polynomial (ascending coefficients), refined until
/// every relative residual is at most `tol`, then polished by one Newton
/// step. Conjugate pairs are made exactly conjugate; roots without a
/// partner are real. Output is sorted by modulus, then argument.
pub fn polynomial_roots(coeffs: &[f64], tol: f64) -> Result<Vec<Complex64>, RootError> {
    if coeffs.iter().any(|a| !a.is_finite()) {
        return Err(RootError::NonFinite);
    }
    let coeffs = trim(coeffs);
    // Roots at zero.
    let zeros = coeffs.iter().position(|&a| a != 0.0).unwrap_or(0);
    let poly = &coeffs[zeros..];
    let n = poly.len().saturating_sub(1);
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n == 0 {
        return Ok(finish(roots));
    }
    let lead = poly[n];
    let radius = (poly[0] / lead).abs().powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if z.iter().all(|&zk| relative_residual(poly, zk) <= tol) {
            converged = true;
            break;
        }
        for k in 0..n {
            let (p, dp) = eval_with_derivative(poly, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
            }
        }
    }
    if !converged {
        return Err(RootError::NoConvergence(MAX_SWEEPS));
    }
    for zk in z.iter_mut() {
        let (p, dp) = eval_with_derivative(poly, *zk);
        let step = p / dp;
        if step.is_finite() && relative_residual(poly, *zk - step) <= relative_residual(poly, *zk) {
            *zk -= step;
        }
    }
    roots.extend(pair_conjugates(z));
    Ok(finish(roots))
}

fn pair_conjugates(mut z: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(z.len());
    z.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut used = vec![false; z.len()];
    for i in 0..z.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let zi = z[i];
        let scale = zi.norm().max(1e-300);
        // Nearest unused root to the conjugate.
        let partner = (0..z.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (z[a] - zi.conj()).norm().total_cmp(&(z[b] - zi.conj()).norm()));
        match partner {
            Some(j) if zi.im.abs() > 1e-12 * scale && (z[j] - zi.conj()).norm() <= 1e-6 * scale => {
                used[j] = true;
                let re = (zi.re + z[j].re) / 2.0;
                let im = (zi.im - z[j].im) / 2.0;
                out.push(Complex64::new(re, im));
                out.push(Complex64::new(re, -im));
            }
            _ => out.push(Complex64::new(zi.re, 0.0)),
        }
    }
    out
}

fn finish(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    roots
}

/// Roots of an even polynomial `P(t) = Q(t²)`: roots of `Q` in `s`, then
/// both square roots.
pub fn even_polynomial_roots(coeffs: &[f64], tol: f64) -> Result<Vec<Complex64>, RootError> {
    let reduced: Vec<f64> = coeffs.iter().step_by(2).copied().collect();
    let s_roots = polynomial_roots(&reduced, tol)?;
    let mut out = Vec::with_capacity(2 * s_roots.len());
    for s in s_roots {
        let r = s.sqrt();
        out.push(r);
        out.push(-r);
    }
    Ok(finish(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_factorizations() {
        let r = polynomial_roots(&[1.0, 0.0, -1.0], 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14 || (r[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        let r = polynomial_roots(&[1.0, 0.0, 1.0], 1e-12).unwrap();
        assert!(r.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14));
        assert_eq!(r[0], r[1].conj());
        assert!(polynomial_roots(&[3.0], 1e-12).unwrap().is_empty());
        let r = polynomial_roots(&[0.0, 0.0, 2.0, 1.0], 1e-12).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }

    #[test]
    fn even_roots_come_in_sign_pairs() {
        // (1 - 4 t^2)(1 + t^2)
        let r = even_polynomial_roots(&[1.0, 0.0, -3.0, 0.0, -4.0], 1e-12).unwrap();
        assert_eq!(r.len(), 4);
        for z in &r {
            assert!(r.iter().any(|w| (*w + *z).norm() < 1e-14));
        }
    }
}
