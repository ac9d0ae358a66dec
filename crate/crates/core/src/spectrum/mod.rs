//! Quasi-energy spectra of the reduced Floquet matrix and their symmetries.

mod matching;

pub use matching::{matching_distance, min_cost_assignment, qe_distance, GREEDY_ACCEPT};

use std::f64::consts::PI;

use faer::Mat;

use crate::model::{FloquetMatrix, ResonanceParams};
use crate::stats::Histogram;
use crate::{linalg, Error, Result, C64};

/// Default absolute threshold on `|Im ε|` below which a quasi-energy is real.
pub const DEFAULT_TOL_REAL: f64 = 1e-10;

/// Quasi-energies `ε` and eigenvalues `μ = e^{-iε}` of one `S(q)`.
#[derive(Debug, Clone)]
pub struct QESpectrum {
    pub params: ResonanceParams,
    /// `Re ε ∈ (-π, π]`.
    pub eps: Vec<C64>,
    pub mu: Vec<C64>,
    /// Bound on `‖Sv − μv‖ / ‖S‖_F`: measured when eigenvectors are present,
    /// otherwise the a-priori backward error `D·ε_mach`.
    pub residual_bound: f64,
    /// Unit-norm right eigenvectors as columns, aligned with `mu`.
    pub eigenvectors: Option<Mat<C64>>,
}

impl QESpectrum {
    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    /// Builds a spectrum from quasi-energies alone (synthetic input, cache
    /// reload). `μ` is recomputed as `e^{-iε}`.
    pub fn from_eps(params: ResonanceParams, eps: Vec<C64>) -> Self {
        let mu = eps.iter().map(|e| (-C64::i() * e).exp()).collect();
        Self {
            params,
            eps,
            mu,
            residual_bound: 0.0,
            eigenvectors: None,
        }
    }
}

/// All eigenvalues of `S`, eigenvectors off.
pub fn diagonalize(s: &FloquetMatrix) -> Result<QESpectrum> {
    let mu = linalg::eigenvalues(&s.entries)?;
    let eps = quasi_energies(&mu)?;
    Ok(QESpectrum {
        params: s.params,
        residual_bound: s.dim() as f64 * f64::EPSILON,
        eps,
        mu,
        eigenvectors: None,
    })
}

/// Eigenvalues with eigenvectors; `residual_bound` is the measured worst
/// relative residual.
pub fn diagonalize_with_vectors(s: &FloquetMatrix) -> Result<QESpectrum> {
    let (mu, vecs) = linalg::eigen(&s.entries)?;
    let eps = quasi_energies(&mu)?;
    let sv = &s.entries * &vecs;
    let mut worst = 0.0_f64;
    for (j, m) in mu.iter().enumerate() {
        let mut r2 = 0.0;
        for i in 0..s.dim() {
            r2 += (sv[(i, j)] - m * vecs[(i, j)]).norm_sqr();
        }
        worst = worst.max(r2.sqrt());
    }
    Ok(QESpectrum {
        params: s.params,
        residual_bound: worst / s.frobenius_norm(),
        eps,
        mu,
        eigenvectors: Some(vecs),
    })
}

/// `ε = i·Log μ` on the principal branch, with `Re ε = -π` folded to `π`.
pub fn quasi_energies(mu: &[C64]) -> Result<Vec<C64>> {
    mu.iter()
        .enumerate()
        .map(|(index, &m)| {
            let r = m.norm();
            if r == 0.0 || !r.is_finite() {
                return Err(Error::ZeroEigenvalue { index });
            }
            let mut re = -m.arg();
            if re <= -PI {
                re += 2.0 * PI;
            }
            Ok(C64::new(re, r.ln()))
        })
        .collect()
}

/// Real/complex split of a spectrum.
#[derive(Debug, Clone)]
pub struct RealComplexPartition {
    pub real_eps: Vec<C64>,
    pub complex_eps: Vec<C64>,
    pub tol_real: f64,
    /// `|real_eps| / D`.
    pub fraction: f64,
    /// Quasi-energies with `tol_real/2 < |Im ε| ≤ 2·tol_real`, whose class
    /// is sensitive to the threshold.
    pub boundary_stragglers: usize,
}

pub fn classify_real(spec: &QESpectrum, tol_real: f64) -> RealComplexPartition {
    assert!(tol_real > 0.0, "tol_real must be positive");
    let (real_eps, complex_eps): (Vec<C64>, Vec<C64>) =
        spec.eps.iter().partition(|e| e.im.abs() <= tol_real);
    let boundary_stragglers = spec
        .eps
        .iter()
        .filter(|e| e.im.abs() > tol_real / 2.0 && e.im.abs() <= 2.0 * tol_real)
        .count();
    if boundary_stragglers > 0 {
        log::debug!("{boundary_stragglers} quasi-energies lie within a factor 2 of tol_real");
    }
    let fraction = if spec.eps.is_empty() {
        1.0
    } else {
        real_eps.len() as f64 / spec.eps.len() as f64
    };
    RealComplexPartition {
        real_eps,
        complex_eps,
        tol_real,
        fraction,
        boundary_stragglers,
    }
}

fn is_time_reversal_point(p: &ResonanceParams) -> bool {
    let zone = p.bloch_zone();
    p.bloch_q == 0.0 || (p.bloch_q.abs() - zone).abs() <= 1e-12 * zone
}

/// Matching distance between `{ε}` and `{ε*}`.
///
/// Only meaningful at `q = 0` or `q = π/D`, where the spectrum is closed
/// under conjugation.
pub fn conjugation_pairing_residual(spec: &QESpectrum) -> Result<f64> {
    if !is_time_reversal_point(&spec.params) {
        return Err(Error::PreconditionViolation(format!(
            "q = {} is neither 0 nor pi/D; use cross_q_conjugation",
            spec.params.bloch_q
        )));
    }
    let conj: Vec<C64> = spec.eps.iter().map(|e| e.conj()).collect();
    Ok(matching_distance(&spec.eps, &conj))
}

/// Matching distance between `{ε(-q)}` and `{ε(q)*}`.
pub fn cross_q_conjugation(plus: &QESpectrum, minus: &QESpectrum) -> Result<f64> {
    let (a, b) = (&plus.params, &minus.params);
    let same_rest = a.with_q(0.0) == b.with_q(0.0);
    let mirrored = (a.bloch_q + b.bloch_q).abs() <= 1e-15 * (1.0 + a.bloch_q.abs());
    if !same_rest || !mirrored || plus.eps.len() != minus.eps.len() {
        return Err(Error::ParamMismatch(format!(
            "spectra are not a q / -q pair: {a:?} vs {b:?}"
        )));
    }
    let conj: Vec<C64> = plus.eps.iter().map(|e| e.conj()).collect();
    Ok(matching_distance(&minus.eps, &conj))
}

/// Density histogram of `Re ε` over `(-π, π]` pooled over `spectra`.
pub fn real_part_density(spectra: &[QESpectrum], bins: usize) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::InvalidParams(format!("bins = {bins} < 10")));
    }
    let values: Vec<f64> = spectra
        .iter()
        .flat_map(|s| s.eps.iter().map(|e| e.re))
        .collect();
    Histogram::from_values(&values, bins, -PI, PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_reduced_floquet;

    fn synthetic(eps: &[C64]) -> QESpectrum {
        QESpectrum::from_eps(ResonanceParams::new(1, 3, 1.0, 0.0, 0.0), eps.to_vec())
    }

    #[test]
    fn quasi_energy_branches() {
        let eps = quasi_energies(&[
            C64::new(1.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.3f64.exp(), 0.0),
            C64::new(-1.0, 0.0),
            C64::new(-1.0, -0.0),
        ])
        .unwrap();
        assert!(eps[0].norm() < 1e-15);
        assert!((eps[1] - C64::new(PI / 2.0, 0.0)).norm() < 1e-15);
        assert!((eps[2] - C64::new(0.0, 0.3)).norm() < 1e-15);
        assert_eq!(eps[3].re, PI);
        assert_eq!(eps[4].re, PI);
        assert_eq!(
            quasi_energies(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            Err(Error::ZeroEigenvalue { index: 1 })
        );
    }

    #[test]
    fn diagonal_matrix_spectrum() {
        let p = ResonanceParams::new(3, 11, 0.0, 0.0, 0.0).with_gamma(2, 1);
        let s = build_reduced_floquet(&p).unwrap();
        let spec = diagonalize(&s).unwrap();
        let mut expect: Vec<C64> = (0..11).map(|l| s.get(l, l)).collect();
        for mu in &spec.mu {
            let (i, d) = expect
                .iter()
                .enumerate()
                .map(|(i, e)| (i, (e - mu).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-14, "{d:e}");
            expect.remove(i);
        }
    }

    #[test]
    fn eigenpair_residuals() {
        let p = ResonanceParams::new(1, 6, 3.0, 0.02, 0.05);
        let s = build_reduced_floquet(&p).unwrap();
        let spec = diagonalize_with_vectors(&s).unwrap();
        assert!(spec.residual_bound < 1e-10, "{}", spec.residual_bound);
        for (m, e) in spec.mu.iter().zip(&spec.eps) {
            assert!((m - (-C64::i() * e).exp()).norm() < 1e-12);
        }
    }

    #[test]
    fn threshold_arithmetic() {
        let spec = synthetic(&[C64::new(0.1, 0.0), C64::new(0.2, 1e-15), C64::new(0.3, 0.5)]);
        let part = classify_real(&spec, 1e-10);
        assert!((part.fraction - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(part.complex_eps.len(), 1);
    }

    #[test]
    fn unitary_limit_is_fully_real() {
        let p = ResonanceParams::new(1, 31, 20.0, 0.0, 0.0);
        let spec = diagonalize(&build_reduced_floquet(&p).unwrap()).unwrap();
        assert_eq!(classify_real(&spec, DEFAULT_TOL_REAL).fraction, 1.0);
        assert!(conjugation_pairing_residual(&spec).unwrap() < 1e-12);
    }

    #[test]
    fn conjugation_needs_symmetric_q() {
        let p = ResonanceParams::new(1, 5, 2.0, 0.1, 0.001);
        let spec = diagonalize(&build_reduced_floquet(&p).unwrap()).unwrap();
        assert!(matches!(
            conjugation_pairing_residual(&spec),
            Err(Error::PreconditionViolation(_))
        ));
        let edge = diagonalize(&build_reduced_floquet(&p.with_q(PI / 5.0)).unwrap()).unwrap();
        assert!(conjugation_pairing_residual(&edge).unwrap() < 1e-9);
    }

    #[test]
    fn cross_q_rejects_mismatch() {
        let p = ResonanceParams::new(1, 5, 2.0, 0.1, 0.01);
        let a = diagonalize(&build_reduced_floquet(&p).unwrap()).unwrap();
        let b =
            diagonalize(&build_reduced_floquet(&p.with_q(-0.01).with_kick(2.5)).unwrap()).unwrap();
        assert!(matches!(
            cross_q_conjugation(&a, &b),
            Err(Error::ParamMismatch(_))
        ));
        let c = diagonalize(&build_reduced_floquet(&p.with_q(-0.01)).unwrap()).unwrap();
        assert!(cross_q_conjugation(&a, &c).unwrap() < 1e-10);
    }

    #[test]
    fn product_rule() {
        let p = ResonanceParams::new(2, 23, 4.0, 0.05, 0.03).with_gamma(3, 2);
        let s = build_reduced_floquet(&p).unwrap();
        let spec = diagonalize(&s).unwrap();
        let prod: C64 = spec.mu.iter().product();
        let det = s.entries.determinant();
        assert!((prod - det).norm() <= 1e-8 * det.norm(), "{prod} vs {det}");
    }

    #[test]
    fn density_of_uniform_grid() {
        let n = 4000;
        // offset by half a step so no point sits on a bin edge
        let eps: Vec<C64> = (0..n)
            .map(|j| C64::new(-PI + 2.0 * PI * (j as f64 + 0.5) / n as f64, 0.0))
            .collect();
        let h = real_part_density(&[synthetic(&eps)], 40).unwrap();
        for d in h.densities() {
            assert!((d - 1.0 / (2.0 * PI)).abs() < 1e-12);
        }
        let one = real_part_density(&[synthetic(&[C64::new(0.3, 0.0)])], 10).unwrap();
        assert_eq!(one.counts.iter().filter(|&&c| c > 0.0).count(), 1);
        assert_eq!(real_part_density(&[], 10).unwrap_err(), Error::EmptyInput);
    }
}
