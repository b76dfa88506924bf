//! Integer convolution kernel behind the bilinear map.
//!
//! Each operand is held as integer numerators over one shared denominator,
//! so the inner loop multiplies and adds integers only. A bucket's sums are
//! rescaled, projected and reduced to lowest terms once at the end.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::field::{reduced, ComplexVec3, FourierField, ScaledField, WaveVector};

/// A scaled field plus a dense lookup grid over its bounding cube.
pub(crate) struct IndexedField {
    pub scaled: ScaledField,
    radius: i64,
    side: i64,
    grid: Vec<u32>,
}

impl IndexedField {
    pub fn new(field: &FourierField) -> Self {
        let scaled = ScaledField::from_field(field);
        let radius = crate::field::support_radius(field);
        let side = 2 * radius + 1;
        let mut grid = vec![0u32; (side * side * side) as usize];
        for (idx, k) in scaled.modes.iter().enumerate() {
            let slot = Self::slot(radius, side, k).expect("inside own cube");
            grid[slot] = idx as u32 + 1;
        }
        IndexedField {
            scaled,
            radius,
            side,
            grid,
        }
    }

    fn slot(radius: i64, side: i64, k: &WaveVector) -> Option<usize> {
        let [a, b, c] = k.0;
        if a.abs() > radius || b.abs() > radius || c.abs() > radius {
            return None;
        }
        Some((((a + radius) * side + (b + radius)) * side + (c + radius)) as usize)
    }

    #[inline]
    pub fn lookup(&self, k: &WaveVector) -> Option<usize> {
        let slot = Self::slot(self.radius, self.side, k)?;
        match self.grid[slot] {
            0 => None,
            i => Some(i as usize - 1),
        }
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }
}

/// Weighted sum of bilinear terms `Σ_p P(v_p, w_p)`, divided by `divisor`.
pub(crate) struct ProductPlan<'a> {
    pairs: Vec<(&'a IndexedField, &'a IndexedField)>,
    weights: Vec<BigInt>,
    common: BigInt,
    divisor: BigInt,
}

impl<'a> ProductPlan<'a> {
    pub fn new(pairs: Vec<(&'a IndexedField, &'a IndexedField)>, divisor: u64) -> Self {
        let products: Vec<BigInt> = pairs
            .iter()
            .map(|(v, w)| &v.scaled.denom * &w.scaled.denom)
            .collect();
        let common = products.iter().fold(BigInt::one(), |acc, p| acc.lcm(p));
        let weights = products.iter().map(|p| &common / p).collect();
        ProductPlan {
            pairs,
            weights,
            common,
            divisor: BigInt::from(divisor),
        }
    }

    /// Every nonzero wavevector that can receive a contribution.
    pub fn candidate_buckets(&self) -> Vec<WaveVector> {
        let radius = self
            .pairs
            .iter()
            .map(|(v, w)| v.radius() + w.radius())
            .max()
            .unwrap_or(0);
        let side = 2 * radius + 1;
        let mut hit = vec![false; (side * side * side) as usize];
        for (v, w) in &self.pairs {
            if v.scaled.is_empty() || w.scaled.is_empty() {
                continue;
            }
            for h in &v.scaled.modes {
                for m in &w.scaled.modes {
                    let k = *h + *m;
                    let slot = (((k.0[0] + radius) * side + (k.0[1] + radius)) * side + (k.0[2] + radius)) as usize;
                    hit[slot] = true;
                }
            }
        }
        let mut out = Vec::new();
        for (slot, &flag) in hit.iter().enumerate() {
            if !flag {
                continue;
            }
            let s = slot as i64;
            let k = WaveVector::new(s / (side * side) - radius, (s / side) % side - radius, s % side - radius);
            if !k.is_zero() {
                out.push(k);
            }
        }
        // Slots enumerate in lexicographic order already.
        out
    }

    /// Raw integer sums `T = Σ_p weight_p Σ_h (v_h·(k-h)) w_{k-h}` as
    /// (real, imaginary) triples over the common denominator.
    fn accumulate(&self, k: &WaveVector) -> ([BigInt; 3], [BigInt; 3]) {
        let mut total_re: [BigInt; 3] = Default::default();
        let mut total_im: [BigInt; 3] = Default::default();
        for ((v, w), weight) in self.pairs.iter().zip(&self.weights) {
            let mut s_re: [BigInt; 3] = Default::default();
            let mut s_im: [BigInt; 3] = Default::default();
            let mut touched = false;
            for (hi, h) in v.scaled.modes.iter().enumerate() {
                let m = *k - *h;
                let Some(mi) = w.lookup(&m) else { continue };
                let dr = v.scaled.re.as_ref().map(|re| dot(&re[hi], &m));
                let di = v.scaled.im.as_ref().map(|im| dot(&im[hi], &m));
                let wr = w.scaled.re.as_ref().map(|re| &re[mi]);
                let wi = w.scaled.im.as_ref().map(|im| &im[mi]);
                // (dr + i di)(wr + i wi)
                if let Some(dr) = dr.as_ref().filter(|x| !x.is_zero()) {
                    if let Some(wr) = wr {
                        for i in 0..3 {
                            s_re[i] += dr * &wr[i];
                        }
                    }
                    if let Some(wi) = wi {
                        for i in 0..3 {
                            s_im[i] += dr * &wi[i];
                        }
                    }
                    touched = true;
                }
                if let Some(di) = di.as_ref().filter(|x| !x.is_zero()) {
                    if let Some(wi) = wi {
                        for i in 0..3 {
                            s_re[i] -= di * &wi[i];
                        }
                    }
                    if let Some(wr) = wr {
                        for i in 0..3 {
                            s_im[i] += di * &wr[i];
                        }
                    }
                    touched = true;
                }
            }
            if !touched {
                continue;
            }
            for i in 0..3 {
                if !s_re[i].is_zero() {
                    total_re[i] += &s_re[i] * weight;
                }
                if !s_im[i].is_zero() {
                    total_im[i] += &s_im[i] * weight;
                }
            }
        }
        (total_re, total_im)
    }

    /// Exact coefficient at `k`: `-i L_k T / (divisor · common)`.
    pub fn evaluate(&self, k: &WaveVector) -> ComplexVec3 {
        let (t_re, t_im) = self.accumulate(k);
        let k2 = BigInt::from(k.norm_sq());
        let den = &self.divisor * &self.common * &k2;
        // -i (Tr + i Ti) = Ti - i Tr
        let re = project(k, &k2, &t_im).map(|x| reduced(x, &den));
        let im = project(k, &k2, &t_re).map(|x| reduced(-x, &den));
        ComplexVec3::new(re, im)
    }

    /// The zero bucket vanishes term by term for divergence-free operands.
    pub fn zero_bucket_vanishes(&self) -> bool {
        let (re, im) = self.accumulate(&WaveVector::ZERO);
        re.iter().chain(im.iter()).all(Zero::is_zero)
    }

    /// Evaluates the listed buckets in parallel; results keep input order and
    /// zero coefficients are dropped.
    pub fn evaluate_all(&self, buckets: &[WaveVector]) -> Vec<(WaveVector, ComplexVec3)> {
        buckets
            .par_iter()
            .map(|k| (*k, self.evaluate(k)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

#[inline]
fn dot(n: &[BigInt; 3], m: &WaveVector) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..3 {
        match m.0[i] {
            0 => {}
            1 => acc += &n[i],
            -1 => acc -= &n[i],
            c => acc += &n[i] * c,
        }
    }
    acc
}

/// `|k|² X - (k·X) k`, the Leray projection scaled by `|k|²`.
fn project(k: &WaveVector, k2: &BigInt, x: &[BigInt; 3]) -> [BigInt; 3] {
    let kx = dot(x, k);
    std::array::from_fn(|i| k2 * &x[i] - &kx * k.0[i])
}
