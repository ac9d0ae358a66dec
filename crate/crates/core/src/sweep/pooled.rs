//! Spacing and ratio statistics pooled over an ensemble of spectra.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::spectrum::QESpectrum;
use crate::stats::{
    mean_and_stderr, nn_spacings, spacing_ratios, unfold_complex, unfold_real, PointSet,
    RatioSample, SpacingSample, MIN_PER_SPECTRUM,
};
use crate::{Error, Result, C64};

/// Which quasi-energies of each spectrum enter the statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QeSubset {
    /// Real quasi-energies, on the circle `(-π, π]`.
    Real,
    /// `Re ε` of every quasi-energy, on the circle.
    RealParts,
    /// Complex quasi-energies in the plane.
    Complex,
    /// Every quasi-energy in the plane.
    All,
}

impl QeSubset {
    fn is_planar(self) -> bool {
        matches!(self, QeSubset::Complex | QeSubset::All)
    }

    fn select(self, spec: &QESpectrum, tol_real: f64) -> Vec<C64> {
        spec.eps
            .iter()
            .copied()
            .filter(|e| match self {
                QeSubset::Real => e.im.abs() <= tol_real,
                QeSubset::Complex => e.im.abs() > tol_real,
                QeSubset::RealParts | QeSubset::All => true,
            })
            .collect()
    }
}

impl std::str::FromStr for QeSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(QeSubset::Real),
            "real_parts" | "real-parts" => Ok(QeSubset::RealParts),
            "complex" => Ok(QeSubset::Complex),
            "all" => Ok(QeSubset::All),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// Unit-mean spacings pooled over spectra, each unfolded on its own.
/// Spectra contributing fewer than [`MIN_PER_SPECTRUM`] values are skipped.
pub fn pooled_spacings(
    spectra: &[QESpectrum],
    subset: QeSubset,
    tol_real: f64,
) -> Result<SpacingSample> {
    let selected: Vec<Vec<C64>> = spectra
        .iter()
        .map(|s| subset.select(s, tol_real))
        .filter(|v| v.len() >= MIN_PER_SPECTRUM)
        .collect();
    if selected.len() < spectra.len() {
        log::warn!(
            "{} of {} spectra have fewer than {MIN_PER_SPECTRUM} {subset:?} quasi-energies and were skipped",
            spectra.len() - selected.len(),
            spectra.len()
        );
    }
    if selected.is_empty() {
        return Err(Error::TooFewPoints {
            got: 0,
            needed: MIN_PER_SPECTRUM,
        });
    }
    let unfolded = if subset.is_planar() {
        unfold_complex(&selected)?
    } else {
        let re: Vec<Vec<f64>> = selected
            .iter()
            .map(|v| v.iter().map(|e| e.re).collect())
            .collect();
        unfold_real(&re, Some(TAU))?
    };
    nn_spacings(&unfolded)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledRatios {
    pub sample: RatioSample,
    /// `⟨r⟩` of each contributing spectrum.
    pub per_spectrum: Vec<f64>,
    /// Standard error from the spread of per-spectrum means; the naive
    /// estimate when a single spectrum contributes.
    pub stderr: f64,
}

/// Spacing ratios of the raw quasi-energies, neighbours searched within each
/// spectrum. Spectra with fewer than 3 selected values are skipped.
pub fn pooled_ratios(
    spectra: &[QESpectrum],
    subset: QeSubset,
    tol_real: f64,
) -> Result<PooledRatios> {
    let mut z = Vec::new();
    let mut per_spectrum = Vec::new();
    for (label, spec) in spectra.iter().enumerate() {
        let values = subset.select(spec, tol_real);
        if values.len() < 3 {
            continue;
        }
        let set = if subset.is_planar() {
            PointSet::from_quasi_energies(&values, label as u32)
        } else {
            let re: Vec<f64> = values.iter().map(|e| e.re).collect();
            PointSet::from_line(&re, Some(TAU), label as u32)
        };
        let r = spacing_ratios(std::slice::from_ref(&set))?;
        per_spectrum.push(r.r_mean);
        z.extend(r.z);
    }
    if z.is_empty() {
        return Err(Error::TooFewPoints { got: 0, needed: 3 });
    }
    let sample = RatioSample::from_z(z);
    let stderr = if per_spectrum.len() >= 2 {
        mean_and_stderr(&per_spectrum).1
    } else {
        sample.r_stderr
    };
    Ok(PooledRatios {
        sample,
        per_spectrum,
        stderr,
    })
}
