//! Parameter sweeps: phase diagrams of the real fraction, Bloch and k-window
//! ensembles, and `⟨r⟩` transition curves.
//!
//! Every work item is one matrix build plus diagonalization. Items run on a
//! bounded rayon pool and land in preallocated slots by index, so results do
//! not depend on the worker count or on scheduling.

mod cache;
mod pooled;

pub use cache::{CacheKey, SpectrumCache, CACHE_VERSION};
pub use pooled::{pooled_ratios, pooled_spacings, PooledRatios, QeSubset};

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use crate::model::{build_reduced_floquet, ResonanceParams};
use crate::spectrum::{classify_real, diagonalize, QESpectrum, DEFAULT_TOL_REAL};
use crate::{Error, Result, C64};

/// Default midpoint of `⟨r⟩` between the GOE and class AI† values.
pub const DEFAULT_R_MIDPOINT: f64 = 0.6425;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    Localized,
    Delocalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Regime {
    pub kind: RegimeKind,
    /// Localization length `ξ = k²/2`.
    pub xi: f64,
}

/// Localized iff `k²/2 < M`; the boundary itself counts as delocalized.
pub fn localization_regime(k: f64, period: u32) -> Regime {
    let xi = k * k / 2.0;
    let kind = if xi < period as f64 {
        RegimeKind::Localized
    } else {
        RegimeKind::Delocalized
    };
    Regime { kind, xi }
}

/// Kick strength where `k²/2 = M`.
pub fn regime_boundary(period: u32) -> f64 {
    (2.0 * period as f64).sqrt()
}

/// Bloch numbers `q_j = (j + ½)·π/(D·count)`, `j = 0..count`, inside
/// `(0, π/D)`.
pub fn bloch_grid(dim: usize, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| (j as f64 + 0.5) * PI / (dim as f64 * count as f64))
        .collect()
}

/// `center − half_width, …, center + half_width` in steps of `step`.
pub fn k_window(center: f64, half_width: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && half_width >= 0.0 && center.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "k window needs step > 0 and half_width >= 0, got step = {step}, half_width = {half_width}"
        )));
    }
    let n = (2.0 * half_width / step + 1e-9).floor() as usize;
    let ks: Vec<f64> = (0..=n)
        .map(|i| center - half_width + i as f64 * step)
        .collect();
    if ks[0] < 0.0 {
        return Err(Error::InvalidParams(format!(
            "k window starts at {} < 0",
            ks[0]
        )));
    }
    Ok(ks)
}

/// How the spectra behind one data point are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsemblePolicy {
    /// The template's own `q`.
    Fixed,
    /// `count` Bloch numbers from [`bloch_grid`].
    Bloch { count: usize },
    /// Kick strengths around the point's `k`.
    KWindow { half_width: f64, step: f64 },
}

impl EnsemblePolicy {
    /// Parameter sets of the ensemble around `template`.
    pub fn members(&self, template: &ResonanceParams) -> Result<Vec<ResonanceParams>> {
        match *self {
            EnsemblePolicy::Fixed => Ok(vec![*template]),
            EnsemblePolicy::Bloch { count } => {
                if count == 0 {
                    return Err(Error::InvalidParams(
                        "Bloch ensemble needs count >= 1".into(),
                    ));
                }
                Ok(bloch_grid(template.dim(), count)
                    .into_iter()
                    .map(|q| template.with_q(q))
                    .collect())
            }
            EnsemblePolicy::KWindow { half_width, step } => {
                Ok(k_window(template.kick, half_width, step)?
                    .into_iter()
                    .map(|k| template.with_kick(k))
                    .collect())
            }
        }
    }
}

/// Diagonalizes batches of parameter sets on a bounded pool, through an
/// optional cache.
#[derive(Debug)]
pub struct SweepEngine {
    pool: rayon::ThreadPool,
    cache: Option<SpectrumCache>,
    pub tol_real: f64,
    diagonalizations: AtomicUsize,
}

impl SweepEngine {
    pub fn new(workers: usize, cache: Option<SpectrumCache>, tol_real: f64) -> Result<Self> {
        if !(tol_real > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tol_real = {tol_real} must be positive"
            )));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        Ok(Self {
            pool,
            cache,
            tol_real,
            diagonalizations: AtomicUsize::new(0),
        })
    }

    /// One worker, no cache, default threshold.
    pub fn serial() -> Self {
        Self::new(1, None, DEFAULT_TOL_REAL).expect("default engine")
    }

    pub fn cache(&self) -> Option<&SpectrumCache> {
        self.cache.as_ref()
    }

    /// Matrix diagonalizations performed by this engine.
    pub fn diagonalizations(&self) -> usize {
        self.diagonalizations.load(Ordering::SeqCst)
    }

    fn fresh(&self, params: &ResonanceParams) -> Result<Vec<C64>> {
        let s = build_reduced_floquet(params)?;
        self.diagonalizations.fetch_add(1, Ordering::SeqCst);
        Ok(diagonalize(&s)?.eps)
    }

    /// Spectrum of one parameter set. Cached and fresh results carry the
    /// same quasi-energies bit for bit; `mu` is rebuilt from them.
    pub fn spectrum(&self, params: &ResonanceParams) -> Result<QESpectrum> {
        params.validate()?;
        let eps = match &self.cache {
            Some(c) => c.run_cached(params, self.tol_real, || self.fresh(params))?,
            None => self.fresh(params)?,
        };
        Ok(QESpectrum::from_eps(*params, eps))
    }

    /// Spectra of all parameter sets, in input order.
    pub fn spectra(&self, params: &[ResonanceParams]) -> Vec<Result<QESpectrum>> {
        use rayon::prelude::*;
        let done = AtomicUsize::new(0);
        let total = params.len();
        self.pool.install(|| {
            params
                .par_iter()
                .map(|p| {
                    let r = self.spectrum(p);
                    let n = done.fetch_add(1, Ordering::SeqCst) + 1;
                    log::info!(
                        "spectrum {n}/{total} (k = {}, lambda = {}, q = {})",
                        p.kick,
                        p.lambda,
                        p.bloch_q
                    );
                    r
                })
                .collect()
        })
    }

    /// All spectra of the ensemble, or the first error.
    pub fn ensemble(
        &self,
        template: &ResonanceParams,
        policy: EnsemblePolicy,
    ) -> Result<Vec<QESpectrum>> {
        self.spectra(&policy.members(template)?)
            .into_iter()
            .collect()
    }

    pub fn bloch_ensemble(
        &self,
        template: &ResonanceParams,
        count: usize,
    ) -> Result<Vec<QESpectrum>> {
        self.ensemble(template, EnsemblePolicy::Bloch { count })
    }

    pub fn k_window_ensemble(
        &self,
        center: f64,
        half_width: f64,
        step: f64,
        template: &ResonanceParams,
    ) -> Result<Vec<QESpectrum>> {
        self.ensemble(
            &template.with_kick(center),
            EnsemblePolicy::KWindow { half_width, step },
        )
    }

    /// Real fraction over a `(k, λ)` grid. Failing cells keep their error
    /// message and the sweep continues.
    pub fn real_fraction_phase_diagram(&self, grid: &SweepGrid) -> Result<PhaseDiagram> {
        grid.validate()?;
        // flatten every (cell, member) pair into one batch
        let mut jobs = Vec::new();
        let mut owner = Vec::new();
        let mut cell_errors: Vec<Option<String>> = Vec::new();
        for (ci, (k, lambda)) in grid.cells().enumerate() {
            let template = grid.template.with_kick(k).with_lambda(lambda);
            match grid.policy.members(&template) {
                Ok(members) => {
                    for m in members {
                        jobs.push(m);
                        owner.push(ci);
                    }
                    cell_errors.push(None);
                }
                Err(e) => cell_errors.push(Some(e.to_string())),
            }
        }
        let results = self.spectra(&jobs);
        let n_cells = cell_errors.len();
        let mut n_real = vec![0usize; n_cells];
        let mut n_total = vec![0usize; n_cells];
        for (r, &ci) in results.iter().zip(&owner) {
            match r {
                Ok(spec) => {
                    let part = classify_real(spec, self.tol_real);
                    n_real[ci] += part.real_eps.len();
                    n_total[ci] += spec.dim();
                }
                Err(e) => {
                    cell_errors[ci].get_or_insert_with(|| e.to_string());
                }
            }
        }
        let cells = grid
            .cells()
            .enumerate()
            .map(|(ci, (k, lambda))| {
                let error = cell_errors[ci].clone();
                PhaseCell {
                    k,
                    lambda,
                    fraction: if error.is_none() {
                        Some(n_real[ci] as f64 / n_total[ci] as f64)
                    } else {
                        None
                    },
                    n_real: n_real[ci],
                    n_total: n_total[ci],
                    error,
                }
            })
            .collect();
        Ok(PhaseDiagram {
            grid: grid.clone(),
            cells,
            tol_real: self.tol_real,
            boundary_k: regime_boundary(grid.template.period),
        })
    }

    /// `⟨r⟩` against `λ` with the midpoint crossing `λ₀`.
    pub fn r_transition_curve(
        &self,
        lambdas: &[f64],
        template: &ResonanceParams,
        policy: EnsemblePolicy,
        subset: QeSubset,
        target: f64,
    ) -> Result<TransitionCurve> {
        check_increasing(lambdas, "lambda")?;
        let mut points = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            let spectra = self.ensemble(&template.with_lambda(lambda), policy)?;
            let r = pooled_ratios(&spectra, subset, self.tol_real)?;
            points.push(TransitionPoint {
                lambda,
                r_mean: r.sample.r_mean,
                r_stderr: r.stderr,
                n_ratios: r.sample.len(),
            });
        }
        let lambda_0 = midpoint_crossing(&points, target);
        Ok(TransitionCurve {
            points,
            lambda_0,
            target,
            period: template.period,
        })
    }
}

fn check_increasing(values: &[f64], name: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParams(format!("{name} grid is empty")));
    }
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams(format!(
            "{name} grid is not strictly increasing"
        )));
    }
    Ok(())
}

/// `(k, λ)` grid around a parameter template.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub k_values: Vec<f64>,
    pub lambda_values: Vec<f64>,
    pub template: ResonanceParams,
    pub policy: EnsemblePolicy,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        check_increasing(&self.k_values, "k")?;
        check_increasing(&self.lambda_values, "lambda")
    }

    /// Cells in `k`-major order.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.k_values
            .iter()
            .flat_map(move |&k| self.lambda_values.iter().map(move |&l| (k, l)))
    }
}

/// `n` values log-spaced over `[10^lo, 10^hi]`.
pub fn log_space(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo_exp)],
        _ => (0..n)
            .map(|i| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCell {
    pub k: f64,
    pub lambda: f64,
    /// Real fraction `P`; absent when the cell failed.
    pub fraction: Option<f64>,
    pub n_real: usize,
    pub n_total: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub grid: SweepGrid,
    /// `k`-major, matching [`SweepGrid::cells`].
    pub cells: Vec<PhaseCell>,
    pub tol_real: f64,
    /// `k` where the localization length equals `M`.
    pub boundary_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionPoint {
    pub lambda: f64,
    pub r_mean: f64,
    pub r_stderr: f64,
    pub n_ratios: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionCurve {
    pub points: Vec<TransitionPoint>,
    /// First upward crossing of `target`, interpolated linearly in `log10 λ`.
    pub lambda_0: Option<f64>,
    pub target: f64,
    pub period: u32,
}

impl TransitionCurve {
    pub fn midpoint(&self) -> Result<f64> {
        self.lambda_0.ok_or(Error::MidpointNotCrossed(self.target))
    }
}

/// First segment where `⟨r⟩` rises through `target`, interpolated in
/// `log10 λ` (`λ ≤ 0` endpoints interpolate linearly in `λ`).
pub fn midpoint_crossing(points: &[TransitionPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        if !(a.r_mean <= target && b.r_mean >= target && b.r_mean > a.r_mean) {
            return None;
        }
        let t = (target - a.r_mean) / (b.r_mean - a.r_mean);
        Some(if a.lambda > 0.0 {
            10f64.powf(a.lambda.log10() + t * (b.lambda.log10() - a.lambda.log10()))
        } else {
            a.lambda + t * (b.lambda - a.lambda)
        })
    })
}
