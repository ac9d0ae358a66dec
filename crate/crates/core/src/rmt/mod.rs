//! Random-matrix baselines: GOE, GUE, Ginibre (class A) and complex
//! symmetric (class AI†) ensembles.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::stats::{
    mean_and_stderr, nn_spacings, spacing_ratios, Histogram, PointSet, SourceKind, UnfoldedPoints,
    DEFAULT_BINS, DEFAULT_S_MAX,
};
use crate::{linalg, Error, Result, C64};

pub const DEFAULT_BULK_FRACTION: f64 = 0.8;
pub const MIN_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EnsembleKind {
    #[serde(rename = "GOE")]
    Goe,
    #[serde(rename = "GUE")]
    Gue,
    #[serde(rename = "GinibreA")]
    GinibreA,
    #[serde(rename = "AIdagger")]
    AiDagger,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 4] = [Self::Goe, Self::Gue, Self::GinibreA, Self::AiDagger];

    pub fn is_hermitian(self) -> bool {
        matches!(self, Self::Goe | Self::Gue)
    }

    fn tag(self) -> u8 {
        match self {
            Self::Goe => 1,
            Self::Gue => 2,
            Self::GinibreA => 3,
            Self::AiDagger => 4,
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Goe => "GOE",
            Self::Gue => "GUE",
            Self::GinibreA => "GinibreA",
            Self::AiDagger => "AIdagger",
        })
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "goe" => Ok(Self::Goe),
            "gue" => Ok(Self::Gue),
            "ginibrea" | "ginibre" | "a" => Ok(Self::GinibreA),
            "aidagger" | "ai†" | "ai_dagger" => Ok(Self::AiDagger),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub bulk_fraction: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, count: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            count,
            seed,
            bulk_fraction: DEFAULT_BULK_FRACTION,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_DIM {
            return Err(Error::InvalidParams(format!("n = {} < {MIN_DIM}", self.n)));
        }
        if self.count == 0 {
            return Err(Error::InvalidParams("count must be at least 1".into()));
        }
        if !(self.bulk_fraction > 0.0 && self.bulk_fraction <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "bulk_fraction = {} outside (0, 1]",
                self.bulk_fraction
            )));
        }
        Ok(())
    }
}

/// Generator for matrix `index`, keyed by `SHA-256(seed, kind, index)` so
/// each matrix is reproducible on its own.
fn matrix_rng(spec: &EnsembleSpec, index: usize) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(spec.seed.to_le_bytes());
    h.update([spec.kind.tag()]);
    h.update((index as u64).to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(normal(rng) * s, normal(rng) * s)
}

/// Matrix `index` of the ensemble.
///
/// GOE: real symmetric, off-diagonal variance 1 and diagonal variance 2.
/// GUE: Hermitian, off-diagonal `E|z|² = 1`, real diagonal of variance 1.
/// Ginibre: independent complex Gaussians with `E|z|² = 1`.
/// AI†: complex symmetric, independent complex Gaussians on and above the
/// diagonal.
pub fn sample_matrix(spec: &EnsembleSpec, index: usize) -> Mat<C64> {
    let n = spec.n;
    let mut rng = matrix_rng(spec, index);
    let mut m = Mat::<C64>::zeros(n, n);
    match spec.kind {
        EnsembleKind::GinibreA => {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = complex_normal(&mut rng);
                }
            }
        }
        kind => {
            for i in 0..n {
                for j in i..n {
                    let z = match kind {
                        EnsembleKind::Goe if i == j => {
                            C64::new(normal(&mut rng) * 2f64.sqrt(), 0.0)
                        }
                        EnsembleKind::Goe => C64::new(normal(&mut rng), 0.0),
                        EnsembleKind::Gue if i == j => C64::new(normal(&mut rng), 0.0),
                        _ => complex_normal(&mut rng),
                    };
                    m[(i, j)] = z;
                    m[(j, i)] = if kind == EnsembleKind::Gue {
                        z.conj()
                    } else {
                        z
                    };
                }
            }
        }
    }
    m
}

/// Baseline spacing and ratio statistics of one ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleBaseline {
    pub spec: EnsembleSpec,
    /// Density histogram of the unit-mean spacings, 50 bins on `[0, 4]`.
    pub histogram: Histogram,
    #[serde(skip)]
    pub spacings: Vec<f64>,
    pub r_mean: f64,
    /// Standard error from the spread of per-matrix means.
    pub r_stderr: f64,
    pub n_ratios: usize,
    pub n: usize,
    pub count: usize,
}

enum Eigs {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

fn eigs_of(spec: &EnsembleSpec, index: usize) -> Result<Eigs> {
    let m = sample_matrix(spec, index);
    if spec.kind.is_hermitian() {
        let mut ev = linalg::hermitian_eigenvalues(&m)?;
        ev.sort_by(f64::total_cmp);
        Ok(Eigs::Real(ev))
    } else {
        Ok(Eigs::Complex(linalg::eigenvalues(&m)?))
    }
}

/// Index range of the central `fraction` of `n` sorted eigenvalues.
fn central(n: usize, fraction: f64) -> std::ops::Range<usize> {
    let keep = ((n as f64 * fraction).round() as usize).clamp(3.min(n), n);
    let lo = (n - keep) / 2;
    lo..lo + keep
}

/// Diagonalizes every matrix and collects bulk statistics.
///
/// Hermitian ensembles keep the central `bulk_fraction` of each spectrum and
/// unfold it through the staircase of the whole pooled ensemble. Non-Hermitian
/// ensembles keep eigenvalues with `|z| <= bulk_fraction·√n`, where the
/// circular-law density is flat. Neighbours are searched among all
/// eigenvalues of the same matrix in both cases.
pub fn baseline_statistics(spec: &EnsembleSpec) -> Result<EnsembleBaseline> {
    spec.validate()?;
    let eigs: Vec<Eigs> = (0..spec.count)
        .into_par_iter()
        .map(|i| eigs_of(spec, i))
        .collect::<Result<_>>()?;

    let radius = spec.bulk_fraction * (spec.n as f64).sqrt();
    let (kind, sets) = match &eigs[0] {
        Eigs::Real(_) => {
            let mut pooled: Vec<f64> = eigs
                .iter()
                .flat_map(|e| match e {
                    Eigs::Real(v) => v.clone(),
                    Eigs::Complex(_) => unreachable!("ensemble mixes kinds"),
                })
                .collect();
            pooled.sort_by(f64::total_cmp);
            let total = pooled.len() as f64;
            let sets = eigs
                .iter()
                .enumerate()
                .map(|(label, e)| {
                    let Eigs::Real(v) = e else { unreachable!() };
                    let unfolded: Vec<f64> = v
                        .iter()
                        .map(|x| spec.n as f64 * pooled.partition_point(|p| p <= x) as f64 / total)
                        .collect();
                    let mut set = PointSet::from_line(&unfolded, None, label as u32);
                    let bulk = central(v.len(), spec.bulk_fraction);
                    set.active = Some((0..v.len()).map(|i| bulk.contains(&i)).collect());
                    set
                })
                .collect();
            (SourceKind::RealAxis, sets)
        }
        Eigs::Complex(_) => {
            let sets = eigs
                .iter()
                .enumerate()
                .map(|(label, e)| {
                    let Eigs::Complex(v) = e else { unreachable!() };
                    let mut set = PointSet::from_quasi_energies(v, label as u32);
                    set.x_period = None;
                    set.active = Some(v.iter().map(|z| z.norm() <= radius).collect());
                    set
                })
                .collect();
            (SourceKind::ComplexPlane, sets)
        }
    };

    let mut per_matrix = Vec::with_capacity(spec.count);
    let mut all_z = Vec::new();
    for set in &sets {
        let r = spacing_ratios(std::slice::from_ref(set))?;
        per_matrix.push(r.r_mean);
        all_z.extend(r.z);
    }
    let ratios = crate::stats::RatioSample::from_z(all_z);
    let (_, r_stderr) = mean_and_stderr(&per_matrix);

    let spacings = nn_spacings(&UnfoldedPoints { kind, groups: sets })?;
    let histogram = Histogram::from_values(&spacings.s, DEFAULT_BINS, 0.0, DEFAULT_S_MAX)?;
    Ok(EnsembleBaseline {
        spec: *spec,
        histogram,
        spacings: spacings.s,
        r_mean: ratios.r_mean,
        r_stderr,
        n_ratios: ratios.len(),
        n: spec.n,
        count: spec.count,
    })
}
