//! Exact Taylor coefficients in time of the incompressible Euler flow.
//!
//! With `P(v, w)_k = -i Σ_h (v_h·(k-h)) L_k w_{k-h}` the coefficients obey
//! `u_j = (1/j) Σ_{ℓ<j} P(u_ℓ, u_{j-1-ℓ})`.

mod checkpoint;
mod kernel;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::{One, Zero};

pub use checkpoint::{
    checkpoint_path, format_checkpoint, parse_checkpoint, read_checkpoint, write_checkpoint, Checkpoint,
    CheckpointError, CheckpointLock, Parity,
};

use crate::field::{linear_combine, ComplexVec3, FieldError, FourierField, WaveVector};
use crate::symmetry::{push_forward, transform_coefficient, SymmetryProfile};
use kernel::{IndexedField, ProductPlan};

#[derive(Debug, thiserror::Error)]
pub enum EulerError {
    #[error("symmetry fill disagrees with a computed coefficient at order {order}, wavevector {k:?}")]
    SymmetryInconsistent { order: usize, k: WaveVector },
    #[error("symmetry profile does not fix the datum")]
    ProfileMismatch,
    #[error("coefficient at order {order} breaks the real/imaginary parity of a real datum")]
    ParityViolation { order: usize },
    #[error("coefficient at order {order} violates a field invariant: {source}")]
    Invariant {
        order: usize,
        #[source]
        source: FieldError,
    },
    #[error("checkpoint {path} does not match the datum")]
    DatumMismatch { path: PathBuf },
    #[error("no checkpoint for order {order} in {dir}")]
    MissingCheckpoint { order: usize, dir: PathBuf },
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
}

/// `u_0, …, u_N` for one datum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaylorSeries {
    coefficients: Vec<FourierField>,
}

impl TaylorSeries {
    pub fn new(datum: FourierField) -> Self {
        TaylorSeries {
            coefficients: vec![datum],
        }
    }

    pub fn datum(&self) -> &FourierField {
        &self.coefficients[0]
    }

    pub fn highest_order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficient(&self, j: usize) -> Option<&FourierField> {
        self.coefficients.get(j)
    }

    pub fn coefficients(&self) -> &[FourierField] {
        &self.coefficients
    }

    /// Keeps `u_0..=u_order`.
    pub fn truncated(&self, order: usize) -> TaylorSeries {
        TaylorSeries {
            coefficients: self.coefficients[..=order.min(self.highest_order())].to_vec(),
        }
    }

    fn real_datum(&self) -> bool {
        self.datum().is_real()
    }
}

/// The real trigonometric datum on wavevectors `±(1,1,0)`, `±(1,0,1)`,
/// `±(0,1,1)`.
pub fn bnw_datum() -> FourierField {
    let q = |n: i64| BigRational::from_integer(n.into());
    let entries = [
        ([1, 1, 0], [1, -1, 0]),
        ([1, 0, 1], [1, 0, -1]),
        ([0, 1, 1], [0, 1, -1]),
    ];
    let mut modes = Vec::new();
    for (k, c) in entries {
        let c = ComplexVec3::from_real(c.map(q));
        let k = WaveVector(k);
        modes.push((k, c.clone()));
        modes.push((-k, c));
    }
    crate::field::make_field(modes).expect("datum is valid")
}

/// One application of the bilinear map to a pair of fields.
pub fn bilinear_p(v: &FourierField, w: &FourierField) -> FourierField {
    let vi = IndexedField::new(v);
    let wi = IndexedField::new(w);
    let plan = ProductPlan::new(vec![(&vi, &wi)], 1);
    debug_assert!(plan.zero_bucket_vanishes());
    let buckets = plan.candidate_buckets();
    FourierField::from_trusted(plan.evaluate_all(&buckets).into_iter().collect())
}

/// Progress of one computed order.
#[derive(Clone, Debug)]
pub struct OrderReport {
    pub order: usize,
    pub modes: usize,
    pub computed_buckets: usize,
    pub elapsed: Duration,
    pub checkpoint: Option<PathBuf>,
}

type OrderCallback<'a> = Box<dyn FnMut(&OrderReport) + Send + 'a>;

/// Configurable extension of a series to a target order.
pub struct Extender<'a> {
    target: usize,
    profile: Option<&'a SymmetryProfile>,
    checkpoint_dir: Option<&'a Path>,
    threads: Option<usize>,
    on_order: Option<OrderCallback<'a>>,
}

impl<'a> Extender<'a> {
    pub fn new(target: usize) -> Self {
        Extender {
            target,
            profile: None,
            checkpoint_dir: None,
            threads: None,
            on_order: None,
        }
    }

    pub fn profile(mut self, profile: Option<&'a SymmetryProfile>) -> Self {
        self.profile = profile;
        self
    }

    pub fn checkpoint_dir(mut self, dir: Option<&'a Path>) -> Self {
        self.checkpoint_dir = dir;
        self
    }

    /// Worker threads; `None` uses the ambient rayon pool.
    pub fn threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    pub fn on_order(mut self, callback: impl FnMut(&OrderReport) + Send + 'a) -> Self {
        self.on_order = Some(Box::new(callback));
        self
    }

    pub fn run(self, series: TaylorSeries) -> Result<TaylorSeries, EulerError> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| EulerError::ThreadPool(e.to_string()))?;
                pool.install(move || self.run_inner(series))
            }
            None => self.run_inner(series),
        }
    }

    fn run_inner(mut self, mut series: TaylorSeries) -> Result<TaylorSeries, EulerError> {
        if let Some(profile) = self.profile {
            verify_profile(profile, series.datum())?;
        }
        let real = series.real_datum();
        let _lock = match self.checkpoint_dir {
            Some(dir) => {
                let lock = CheckpointLock::acquire(dir)?;
                series = resume(dir, series, self.target)?;
                for j in 0..=series.highest_order() {
                    if !checkpoint_path(dir, j).exists() {
                        write_checkpoint(dir, j, Parity::for_order(j, real), &series.coefficients[j])?;
                    }
                }
                Some(lock)
            }
            None => None,
        };

        let mut indexed: Vec<IndexedField> = series.coefficients.iter().map(IndexedField::new).collect();
        while series.highest_order() < self.target {
            let j = series.highest_order() + 1;
            let start = Instant::now();
            let (next, computed) = next_order(&indexed, j, self.profile)?;
            next.check_invariants()
                .map_err(|source| EulerError::Invariant { order: j, source })?;
            if !Parity::for_order(j, real).holds(&next) {
                return Err(EulerError::ParityViolation { order: j });
            }
            let checkpoint = match self.checkpoint_dir {
                Some(dir) => Some(write_checkpoint(dir, j, Parity::for_order(j, real), &next)?),
                None => None,
            };
            indexed.push(IndexedField::new(&next));
            series.coefficients.push(next);
            if let Some(cb) = self.on_order.as_mut() {
                cb(&OrderReport {
                    order: j,
                    modes: series.coefficients[j].len(),
                    computed_buckets: computed,
                    elapsed: start.elapsed(),
                    checkpoint,
                });
            }
        }
        Ok(series)
    }
}

/// Extends `series` to `target_order`, optionally exploiting a symmetry
/// profile of the datum and persisting each order to `checkpoint_dir`.
pub fn taylor_extend(
    series: TaylorSeries,
    target_order: usize,
    profile: Option<&SymmetryProfile>,
    checkpoint_dir: Option<&Path>,
) -> Result<TaylorSeries, EulerError> {
    Extender::new(target_order)
        .profile(profile)
        .checkpoint_dir(checkpoint_dir)
        .run(series)
}

fn verify_profile(profile: &SymmetryProfile, u0: &FourierField) -> Result<(), EulerError> {
    let negated = linear_combine(&-BigRational::one(), u0, &BigRational::zero(), u0);
    let plus_ok = profile.plus_group.iter().all(|g| push_forward(g, u0) == *u0);
    let minus_ok = profile.minus_set.iter().all(|g| push_forward(g, u0) == negated);
    if plus_ok && minus_ok {
        Ok(())
    } else {
        Err(EulerError::ProfileMismatch)
    }
}

/// Reads `u_0..=u_order` from checkpoints only, never computing. `None`
/// loads every consecutive order present. Each checkpoint is revalidated and
/// `u_0` must equal `datum`.
pub fn load_series(dir: &Path, datum: FourierField, order: Option<usize>) -> Result<TaylorSeries, EulerError> {
    if !checkpoint_path(dir, 0).exists() {
        return Err(EulerError::MissingCheckpoint {
            order: 0,
            dir: dir.to_path_buf(),
        });
    }
    let series = resume(dir, TaylorSeries::new(datum), order.unwrap_or(usize::MAX))?;
    match order {
        Some(n) if series.highest_order() < n => Err(EulerError::MissingCheckpoint {
            order: series.highest_order() + 1,
            dir: dir.to_path_buf(),
        }),
        _ => Ok(series),
    }
}

/// Loads consecutive checkpoints `u_1, u_2, …` beyond what `series` holds.
fn resume(dir: &Path, mut series: TaylorSeries, target: usize) -> Result<TaylorSeries, EulerError> {
    let real = series.real_datum();
    let u0_path = checkpoint_path(dir, 0);
    if u0_path.exists() {
        let cp = read_checkpoint(dir, 0)?;
        if cp.field != *series.datum() {
            return Err(EulerError::DatumMismatch { path: u0_path });
        }
    }
    let mut j = 1;
    while j <= target && checkpoint_path(dir, j).exists() {
        let cp = read_checkpoint(dir, j)?;
        if cp.parity != Parity::for_order(j, real) {
            return Err(CheckpointError::Corrupt {
                path: checkpoint_path(dir, j),
                reason: format!("parity tag {} does not match the datum", cp.parity),
            }
            .into());
        }
        if j <= series.highest_order() {
            if cp.field != series.coefficients[j] {
                return Err(EulerError::DatumMismatch {
                    path: checkpoint_path(dir, j),
                });
            }
        } else {
            series.coefficients.push(cp.field);
        }
        j += 1;
    }
    Ok(series)
}

/// Computes `u_j` from `u_0..u_{j-1}`; returns the field and the number of
/// buckets evaluated directly.
fn next_order(
    indexed: &[IndexedField],
    j: usize,
    profile: Option<&SymmetryProfile>,
) -> Result<(FourierField, usize), EulerError> {
    let pairs = (0..j).map(|l| (&indexed[l], &indexed[j - 1 - l])).collect();
    let plan = ProductPlan::new(pairs, j as u64);
    debug_assert!(plan.zero_bucket_vanishes());
    let mut buckets = plan.candidate_buckets();
    let profile = profile.filter(|p| !p.is_trivial());
    if let Some(p) = profile {
        buckets.retain(|k| p.representative(k) == *k);
    }
    let computed = buckets.len();
    let values = plan.evaluate_all(&buckets);
    let Some(profile) = profile else {
        return Ok((FourierField::from_trusted(values.into_iter().collect()), computed));
    };
    let minus_sign = if j % 2 == 1 { 1 } else { -1 };
    let mut filled: BTreeMap<WaveVector, ComplexVec3> = BTreeMap::new();
    for (rep, c) in &values {
        for member in profile.images(rep) {
            let sign = if member.minus { minus_sign } else { 1 };
            let value = transform_coefficient(&member.element, &member.k, c, sign);
            match filled.get(&member.k) {
                Some(existing) if *existing != value => {
                    return Err(EulerError::SymmetryInconsistent { order: j, k: member.k });
                }
                Some(_) => {}
                None => {
                    filled.insert(member.k, value);
                }
            }
        }
    }
    Ok((FourierField::from_trusted(filled), computed))
}
