//! Root tests, the interpolant `A - (B/j)^c` and radius intervals.

use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::exact::{ceil_decimal, floor_decimal, ln_rational, rational_from_f64, to_f64};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("root test input at index {index} is not positive")]
    DomainError { index: usize },
    #[error("fit needs at least 4 points in range, got {0}")]
    TooFewPoints(usize),
    #[error("fit input at j = {0} is not finite")]
    NonFinite(usize),
    #[error("no start of the fit reached a finite optimum")]
    FitDiverged,
    #[error("band {band} must be positive and at least the fit rms {rms}")]
    BandTooSmall { band: f64, rms: f64 },
}

/// Whether root-test inputs are norms (`x^{-1/j}`) or squared norms
/// (`x^{-1/(2j)}`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentMode {
    Norm,
    SquaredNorm,
}

impl ExponentMode {
    fn root(&self, j: usize) -> usize {
        match self {
            ExponentMode::Norm => j,
            ExponentMode::SquaredNorm => 2 * j,
        }
    }
}

/// `x^{-1/m}` accurate to the last bit: a float guess refined by one exact
/// Newton step on `x y^m = 1`.
fn inverse_root(x: &BigRational, m: usize) -> f64 {
    let guess = (-ln_rational(x) / m as f64).exp();
    let y = rational_from_f64(guess).expect("finite guess");
    let residual = x * num_traits::pow(y.clone(), m) - BigRational::one();
    let step = BigRational::one() - residual / BigRational::from_integer(m.into());
    to_f64(&(y * step))
}

/// `x_j^{-1/j}` (or `^{-1/(2j)}`) for `x_j = values[i]`, `j = first_index + i`.
pub fn root_test_sequence(
    values: &[BigRational],
    first_index: usize,
    mode: ExponentMode,
) -> Result<Vec<f64>, AnalysisError> {
    values
        .iter()
        .enumerate()
        .map(|(i, x)| {
            if !x.is_positive() {
                return Err(AnalysisError::DomainError { index: i });
            }
            let j = first_index + i;
            assert!(j >= 1, "root test index must start at 1 or later");
            Ok(inverse_root(x, mode.root(j)))
        })
        .collect()
}

/// Float-input variant; each float is taken at its exact binary value.
pub fn root_test_sequence_f64(values: &[f64], first_index: usize, mode: ExponentMode) -> Result<Vec<f64>, AnalysisError> {
    let exact: Vec<BigRational> = values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            rational_from_f64(x)
                .filter(|q| q.is_positive())
                .ok_or(AnalysisError::DomainError { index: i })
        })
        .collect::<Result<_, _>>()?;
    root_test_sequence(&exact, first_index, mode)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rms_error: f64,
    pub j_min: usize,
    pub j_max: usize,
}

impl FitResult {
    pub fn predict(&self, j: f64) -> f64 {
        self.a - (self.b / j).powf(self.c)
    }
}

/// Starting values of `c`: 0.5, 0.75, …, 4.0.
const C_STARTS: usize = 15;
/// Starting values of `B`: 0.5, 1, 2, 4, 8, 16.
const B_STARTS: usize = 6;
const PARAM_TOL: f64 = 1e-10;
/// `|ln B|` and `|ln c|` beyond this mean the fit has degenerated.
const LOG_PARAM_BOUND: f64 = 30.0;

struct Problem {
    j: Vec<f64>,
    y: Vec<f64>,
}

impl Problem {
    /// For fixed `(ln B, ln c)` the optimal `A` is the mean of
    /// `y + (B/j)^c`; returns `(A, sum of squared residuals)`.
    fn profile(&self, p: [f64; 2]) -> (f64, f64) {
        let (b, c) = (p[0].exp(), p[1].exp());
        let shifted: Vec<f64> = self.j.iter().zip(&self.y).map(|(j, y)| y + (b / j).powf(c)).collect();
        let a = shifted.iter().sum::<f64>() / shifted.len() as f64;
        let sse = shifted.iter().map(|s| (s - a) * (s - a)).sum::<f64>();
        (a, if sse.is_finite() { sse } else { f64::INFINITY })
    }

    fn sse(&self, p: [f64; 2]) -> f64 {
        if p.iter().any(|x| x.abs() > LOG_PARAM_BOUND) {
            return f64::INFINITY;
        }
        self.profile(p).1
    }
}

/// Nelder–Mead on two parameters until the simplex is smaller than the
/// tolerance in every coordinate.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: f64) -> ([f64; 2], f64) {
    let mut simplex = [start, [start[0] + step, start[1]], [start[0], start[1] + step]];
    let mut values = simplex.map(&f);
    for _ in 0..20_000 {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let spread = (0..2)
            .map(|d| simplex.iter().map(|p| p[d]).fold(f64::MIN, f64::max) - simplex.iter().map(|p| p[d]).fold(f64::MAX, f64::min))
            .fold(0.0, f64::max);
        if spread < PARAM_TOL {
            break;
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| [centroid[0] + t * (simplex[2][0] - centroid[0]), centroid[1] + t * (simplex[2][1] - centroid[1])];
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let p = along(-0.5);
                (p, f(p))
            } else {
                let p = along(0.5);
                (p, f(p))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("three vertices");
    (simplex[best], values[best])
}

/// Least-squares fit of `y ≈ A - (B/j)^c` over points with `j` in range.
///
/// `A` is eliminated in closed form; `(ln B, ln c)` is searched from a fixed
/// grid of starts, each refined by Nelder–Mead and restarted from its own
/// optimum until it stops improving. The lowest residual wins, ties going to
/// the earliest start.
pub fn fit_power_law(points: &[(usize, f64)], j_range: std::ops::RangeInclusive<usize>) -> Result<FitResult, AnalysisError> {
    let selected: Vec<(usize, f64)> = points.iter().copied().filter(|(j, _)| j_range.contains(j)).collect();
    if selected.len() < 4 {
        return Err(AnalysisError::TooFewPoints(selected.len()));
    }
    if let Some((j, _)) = selected.iter().find(|(_, y)| !y.is_finite()) {
        return Err(AnalysisError::NonFinite(*j));
    }
    let problem = Problem {
        j: selected.iter().map(|(j, _)| *j as f64).collect(),
        y: selected.iter().map(|(_, y)| *y).collect(),
    };
    let starts: Vec<[f64; 2]> = (0..C_STARTS)
        .flat_map(|ci| {
            (0..B_STARTS).map(move |bi| {
                let c = 0.5 + 0.25 * ci as f64;
                let b = 0.5 * 2f64.powi(bi as i32);
                [b.ln(), c.ln()]
            })
        })
        .collect();
    let results: Vec<([f64; 2], f64)> = starts
        .par_iter()
        .map(|&s| {
            let mut best = nelder_mead(|p| problem.sse(p), s, 0.1);
            for _ in 0..8 {
                let next = nelder_mead(|p| problem.sse(p), best.0, 1e-3);
                if next.1 < best.1 {
                    best = next;
                } else {
                    break;
                }
            }
            best
        })
        .collect();
    let (params, sse) = results
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |acc: Option<([f64; 2], f64)>, r| match acc {
            Some(a) if a.1 <= r.1 => Some(a),
            _ => Some(r),
        })
        .ok_or(AnalysisError::FitDiverged)?;
    let (a, _) = problem.profile(params);
    if !a.is_finite() || params.iter().any(|x| x.abs() >= LOG_PARAM_BOUND - 1.0) {
        return Err(AnalysisError::FitDiverged);
    }
    Ok(FitResult {
        a,
        b: params[0].exp(),
        c: params[1].exp(),
        rms_error: (sse / selected.len() as f64).sqrt(),
        j_min: selected.iter().map(|p| p.0).min().expect("nonempty"),
        j_max: selected.iter().map(|p| p.0).max().expect("nonempty"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusKind {
    Tau,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusMethod {
    FitBand,
    PartialSumScan,
    PadePoles,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub which: RadiusKind,
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub method: RadiusMethod,
}

/// `[A - band, A + band]` rounded outward to `digits` decimals.
pub fn radius_interval(
    fit: &FitResult,
    band: f64,
    digits: u32,
    which: RadiusKind,
    n: u32,
) -> Result<RadiusEstimate, AnalysisError> {
    if band.is_nan() || band <= 0.0 || band < fit.rms_error {
        return Err(AnalysisError::BandTooSmall {
            band,
            rms: fit.rms_error,
        });
    }
    Ok(RadiusEstimate {
        which,
        n,
        lower: floor_decimal(fit.a - band, digits),
        upper: ceil_decimal(fit.a + band, digits),
        method: RadiusMethod::FitBand,
    })
}

/// The band implied by a fit: its rms rounded up to one significant digit.
pub fn default_band(rms: f64) -> f64 {
    crate::exact::ceil_significant(rms, 1)
}
