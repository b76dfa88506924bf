//! Exact Sobolev inner products, the series `ν_{n,j}` of squared norms and
//! the conjectural remainder estimate built on it.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::euler::TaylorSeries;
use crate::exact::{horner, sqrt_to_f64, to_f64};
use crate::field::{FourierField, ScaledField};

pub type ComplexRational = Complex<BigRational>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NormError {
    #[error("|t| = {t} is not below the radius lower bound {radius}")]
    DomainError { t: f64, radius: f64 },
    #[error("order {requested} exceeds the computed order {available}")]
    OrderUnavailable { requested: usize, available: usize },
    #[error("order must be at least 1")]
    OrderTooSmall,
}

fn weight(norm_sq: i64, n: u32) -> BigInt {
    num_traits::pow(BigInt::from(norm_sq), n as usize)
}

/// `Σ_k |k|^{2n} conj(v_k)·w_k` on scaled operands, returned as integer
/// (real, imaginary) parts over `denom_v · denom_w`.
fn scaled_inner(v: &ScaledField, w: &ScaledField, n: u32) -> (BigInt, BigInt) {
    let mut re = BigInt::zero();
    let mut im = BigInt::zero();
    let (mut a, mut b) = (0, 0);
    let dot = |x: &[BigInt; 3], y: &[BigInt; 3]| -> BigInt { (0..3).map(|i| &x[i] * &y[i]).sum() };
    while a < v.modes.len() && b < w.modes.len() {
        match v.modes[a].cmp(&w.modes[b]) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                let wt = weight(v.modes[a].norm_sq(), n);
                // conj(vr + i vi)·(wr + i wi) = vr·wr + vi·wi + i (vr·wi - vi·wr)
                let mut r = BigInt::zero();
                let mut i = BigInt::zero();
                if let (Some(vr), Some(wr)) = (&v.re, &w.re) {
                    r += dot(&vr[a], &wr[b]);
                }
                if let (Some(vi), Some(wi)) = (&v.im, &w.im) {
                    r += dot(&vi[a], &wi[b]);
                }
                if let (Some(vr), Some(wi)) = (&v.re, &w.im) {
                    i += dot(&vr[a], &wi[b]);
                }
                if let (Some(vi), Some(wr)) = (&v.im, &w.re) {
                    i -= dot(&vi[a], &wr[b]);
                }
                re += &wt * r;
                im += &wt * i;
                a += 1;
                b += 1;
            }
        }
    }
    (re, im)
}

fn scaled_inner_rational(v: &ScaledField, w: &ScaledField, n: u32) -> ComplexRational {
    let (re, im) = scaled_inner(v, w, n);
    let den = &v.denom * &w.denom;
    Complex::new(BigRational::new(re, den.clone()), BigRational::new(im, den))
}

pub fn sobolev_inner(v: &FourierField, w: &FourierField, n: u32) -> ComplexRational {
    scaled_inner_rational(&ScaledField::from_field(v), &ScaledField::from_field(w), n)
}

pub fn sobolev_norm_sq(v: &FourierField, n: u32) -> BigRational {
    let z = sobolev_inner(v, v, n);
    assert!(z.im.is_zero() && !z.re.is_negative(), "squared norm must be real and nonnegative");
    z.re
}

/// All inner products `⟨u_ℓ|u_m⟩_n` for `ℓ, m ≤ N`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub n: u32,
    entries: Vec<Vec<ComplexRational>>,
}

impl GramMatrix {
    pub fn new(series: &TaylorSeries, order: usize, n: u32) -> Result<Self, NormError> {
        if order > series.highest_order() {
            return Err(NormError::OrderUnavailable {
                requested: order,
                available: series.highest_order(),
            });
        }
        let scaled: Vec<ScaledField> = series.coefficients()[..=order]
            .par_iter()
            .map(ScaledField::from_field)
            .collect();
        let pairs: Vec<(usize, usize)> = (0..=order).flat_map(|l| (l..=order).map(move |m| (l, m))).collect();
        let values: Vec<ComplexRational> = pairs
            .par_iter()
            .map(|&(l, m)| scaled_inner_rational(&scaled[l], &scaled[m], n))
            .collect();
        let zero = Complex::new(BigRational::zero(), BigRational::zero());
        let mut entries = vec![vec![zero; order + 1]; order + 1];
        for ((l, m), z) in pairs.into_iter().zip(values) {
            // ⟨u_m|u_ℓ⟩ = conj ⟨u_ℓ|u_m⟩
            entries[m][l] = z.conj();
            entries[l][m] = z;
        }
        Ok(GramMatrix { n, entries })
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, l: usize, m: usize) -> &ComplexRational {
        &self.entries[l][m]
    }

    pub fn squared_norm(&self, j: usize) -> BigRational {
        self.entries[j][j].re.clone()
    }

    /// `ν_{n,j} = Σ_{ℓ=0}^{j} ⟨u_ℓ|u_{j-ℓ}⟩_n` for `j ≤ order`.
    pub fn nu(&self, j: usize) -> BigRational {
        real_sum((0..=j).map(|l| &self.entries[l][j - l]))
    }

    /// Coefficients of `‖Σ_{j≤N} u_j t^j‖²_n`, ascending powers `0..=2N`.
    pub fn partial_sum_polynomial(&self, big_n: usize) -> Vec<BigRational> {
        assert!(big_n <= self.order());
        (0..=2 * big_n)
            .map(|j| {
                let lo = j.saturating_sub(big_n);
                let hi = j.min(big_n);
                real_sum((lo..=hi).map(|l| &self.entries[l][j - l]))
            })
            .collect()
    }
}

fn real_sum<'a>(terms: impl Iterator<Item = &'a ComplexRational>) -> BigRational {
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    for z in terms {
        re += &z.re;
        im += &z.im;
    }
    assert!(im.is_zero(), "norm coefficient has an imaginary part");
    re
}

/// Squared norms `‖u_j‖²_n` for every computed order.
pub fn squared_norms(series: &TaylorSeries, n: u32) -> Vec<BigRational> {
    series
        .coefficients()
        .par_iter()
        .map(|u| sobolev_norm_sq(u, n))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormSeries {
    pub n: u32,
    /// `ν_{n,0..=validated_order}`.
    pub coeffs: Vec<BigRational>,
    pub validated_order: usize,
}

/// `ν_{n,j}` for `j ≤ N`. When the datum is odd under some symmetry
/// (nonempty minus set) the odd coefficients are asserted to vanish.
pub fn norm_series(series: &TaylorSeries, n: u32, minus_set_nonempty: bool) -> NormSeries {
    let order = series.highest_order();
    let gram = GramMatrix::new(series, order, n).expect("order is available");
    let coeffs: Vec<BigRational> = (0..=order).map(|j| gram.nu(j)).collect();
    if minus_set_nonempty {
        for (j, c) in coeffs.iter().enumerate().skip(1).step_by(2) {
            assert!(c.is_zero(), "odd coefficient {j} does not vanish");
        }
    }
    NormSeries {
        n,
        coeffs,
        validated_order: order,
    }
}

pub fn partial_sum_norm_polynomial(series: &TaylorSeries, big_n: usize, n: u32) -> Result<Vec<BigRational>, NormError> {
    Ok(GramMatrix::new(series, big_n, n)?.partial_sum_polynomial(big_n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub big_n: usize,
    pub t: BigRational,
    pub exact: BigRational,
    pub value: f64,
}

/// `‖u^{(N)}(t)‖²_n` for each `N` in the range and each `t`, evaluated
/// exactly and rounded once.
pub fn partial_sum_scan(
    series: &TaylorSeries,
    n: u32,
    t_values: &[BigRational],
    n_range: std::ops::RangeInclusive<usize>,
) -> Result<Vec<ScanRow>, NormError> {
    let max_n = *n_range.end();
    let gram = GramMatrix::new(series, max_n, n)?;
    let mut rows = Vec::new();
    for big_n in n_range {
        let poly = gram.partial_sum_polynomial(big_n);
        for t in t_values {
            let exact = horner(&poly, t);
            rows.push(ScanRow {
                big_n,
                t: t.clone(),
                value: to_f64(&exact),
                exact,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuTable {
    pub radius_lower: BigRational,
    /// `μ_{n,j}` for `j = 1..=N`, index `j - 1`.
    pub entries: Vec<f64>,
    pub monotone_decreasing: bool,
}

impl MuTable {
    pub fn mu(&self, j: usize) -> f64 {
        self.entries[j - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemainderReport {
    pub order: usize,
    pub t: f64,
    pub mu: MuTable,
    pub bound: f64,
    pub label: &'static str,
}

pub const REMAINDER_LABEL: &str = "conjectural (extrapolated monotonicity)";

/// `μ_{n,j} = r^j ‖u_j‖_n` from the exact squared norms `norms[j]`.
pub fn mu_table(norms: &[BigRational], radius_lower: &BigRational) -> MuTable {
    let entries: Vec<f64> = (1..norms.len())
        .map(|j| {
            let r2j = num_traits::pow(radius_lower * radius_lower, j);
            sqrt_to_f64(&(&norms[j] * r2j))
        })
        .collect();
    let monotone_decreasing = entries.windows(2).all(|w| w[1] <= w[0]);
    MuTable {
        radius_lower: radius_lower.clone(),
        entries,
        monotone_decreasing,
    }
}

/// μ through order `N` and the tail bound `μ_N q^{N+1} / (1 - q)` with
/// `q = |t| / radius_lower`.
pub fn mu_and_remainder(
    norms: &[BigRational],
    big_n: usize,
    t: &BigRational,
    radius_lower: &BigRational,
) -> Result<RemainderReport, NormError> {
    if big_n == 0 {
        return Err(NormError::OrderTooSmall);
    }
    if big_n >= norms.len() {
        return Err(NormError::OrderUnavailable {
            requested: big_n,
            available: norms.len().saturating_sub(1),
        });
    }
    if t.abs() >= *radius_lower {
        return Err(NormError::DomainError {
            t: to_f64(t),
            radius: to_f64(radius_lower),
        });
    }
    let mu = mu_table(&norms[..=big_n], radius_lower);
    let q = t.abs() / radius_lower;
    let factor = num_traits::pow(q.clone(), big_n + 1) / (BigRational::one() - q);
    let bound = mu.mu(big_n) * to_f64(&factor);
    Ok(RemainderReport {
        order: big_n,
        t: to_f64(t),
        mu,
        bound,
        label: REMAINDER_LABEL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{bnw_datum, taylor_extend};
    use crate::exact::parse_decimal;
    use crate::field::{make_field, ComplexVec3, WaveVector};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_pair_norm() {
        let k = WaveVector::new(1, 1, 0);
        let c = ComplexVec3::from_real([q(1, 1), q(-1, 1), q(0, 1)]);
        let f = make_field([(k, c.clone()), (-k, c)]).unwrap();
        assert_eq!(sobolev_norm_sq(&f, 3), q(32, 1));
        assert_eq!(sobolev_norm_sq(&bnw_datum(), 3), q(96, 1));
        assert_eq!(sobolev_norm_sq(&FourierField::zero(), 3), q(0, 1));
        assert!(sobolev_inner(&FourierField::zero(), &f, 2).re.is_zero());
    }

    #[test]
    fn inner_product_matches_direct_sum() {
        let series = taylor_extend(crate::euler::TaylorSeries::new(bnw_datum()), 3, None, None).unwrap();
        let (v, w) = (&series.coefficients()[1], &series.coefficients()[3]);
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for (k, c) in v.iter() {
            if let Some(d) = w.get(k) {
                let wt = BigRational::from_integer(weight(k.norm_sq(), 3));
                for i in 0..3 {
                    re += &wt * (&c.re[i] * &d.re[i] + &c.im[i] * &d.im[i]);
                    im += &wt * (&c.re[i] * &d.im[i] - &c.im[i] * &d.re[i]);
                }
            }
        }
        assert_eq!(sobolev_inner(v, w, 3), Complex::new(re, im));
    }

    #[test]
    fn remainder_domain_and_zero() {
        let norms = vec![q(96, 1), q(6912, 1)];
        let r = parse_decimal("0.32").unwrap();
        let rep = mu_and_remainder(&norms, 1, &q(0, 1), &r).unwrap();
        assert_eq!(rep.bound, 0.0);
        assert_eq!(rep.label, REMAINDER_LABEL);
        assert!(matches!(mu_and_remainder(&norms, 1, &r, &r), Err(NormError::DomainError { .. })));
        assert!(matches!(mu_and_remainder(&norms, 0, &q(0, 1), &r), Err(NormError::OrderTooSmall)));
    }
}
