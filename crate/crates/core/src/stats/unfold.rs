//! Unfolding to unit mean density, spacing samples and spacing ratios.

use std::f64::consts::TAU;

use super::neighbors::{nn_distances, ratios_of_set, NeighborSearch, PointSet};
use crate::{Error, Result, C64};

/// Fewest values one spectrum may contribute to an unfolding.
pub const MIN_PER_SPECTRUM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Points on a line; spacings are gaps between consecutive sorted values.
    RealAxis,
    /// Points in the plane; spacings are nearest-neighbour distances.
    ComplexPlane,
}

/// Unfolded points, one [`PointSet`] per contributing spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldedPoints {
    pub kind: SourceKind,
    pub groups: Vec<PointSet>,
}

impl UnfoldedPoints {
    pub fn len(&self) -> usize {
        self.groups.iter().map(PointSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Staircase `y ↦ #{values ≤ y} / n`.
fn staircase(values: &[f64]) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .map(|y| sorted.partition_point(|v| v <= y) as f64 / n)
        .collect()
}

/// Unfolds complex quasi-energies spectrum by spectrum.
///
/// `Re ε` is kept and `Im ε` goes through its empirical staircase, which maps
/// one spectrum onto the strip `(-π, π] x (0, 1]`. Both axes are then scaled
/// by `√(n/2π)` for unit area density, and finally by one pooled factor that
/// sets the mean nearest-neighbour distance to 1.
pub fn unfold_complex(spectra: &[Vec<C64>]) -> Result<UnfoldedPoints> {
    let mut groups = Vec::with_capacity(spectra.len());
    for (label, eps) in spectra.iter().enumerate() {
        if eps.len() < MIN_PER_SPECTRUM {
            return Err(Error::TooFewPoints {
                got: eps.len(),
                needed: MIN_PER_SPECTRUM,
            });
        }
        let imag: Vec<f64> = eps.iter().map(|e| e.im).collect();
        let stair = staircase(&imag);
        let scale = (eps.len() as f64 / TAU).sqrt();
        let points = eps
            .iter()
            .zip(&stair)
            .map(|(e, y)| [e.re * scale, y * scale])
            .collect();
        groups.push(PointSet::new(points, Some(TAU * scale), label as u32));
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = UnfoldedPoints {
        kind: SourceKind::ComplexPlane,
        groups,
    };
    let (sum, count) = out.groups.iter().fold((0.0, 0usize), |(s, c), g| {
        let d = nn_distances(g, NeighborSearch::Auto);
        (s + d.iter().sum::<f64>(), c + d.len())
    });
    let mean = sum / count as f64;
    if mean > 0.0 {
        rescale(&mut out, 1.0 / mean);
    }
    Ok(out)
}

fn rescale(u: &mut UnfoldedPoints, factor: f64) {
    for g in &mut u.groups {
        for p in &mut g.points {
            p[0] *= factor;
            p[1] *= factor;
        }
        if let Some(period) = &mut g.x_period {
            *period *= factor;
        }
    }
}

/// Unfolds real spectra to unit mean spacing, spectrum by spectrum.
///
/// With a period the values live on a circle of that length and are mapped
/// to a circle of length `n`; without one the sorted values are mapped
/// affinely onto `[0, n-1]`.
pub fn unfold_real(spectra: &[Vec<f64>], period: Option<f64>) -> Result<UnfoldedPoints> {
    let mut groups = Vec::with_capacity(spectra.len());
    for (label, values) in spectra.iter().enumerate() {
        if values.len() < MIN_PER_SPECTRUM {
            return Err(Error::TooFewPoints {
                got: values.len(),
                needed: MIN_PER_SPECTRUM,
            });
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let lo = sorted[0];
        let (scale, new_period) = match period {
            Some(p) => (n / p, Some(n)),
            None => {
                let span = sorted[sorted.len() - 1] - lo;
                if span <= 0.0 {
                    return Err(Error::DegenerateSpectrum {
                        multiplicity: sorted.len(),
                    });
                }
                ((n - 1.0) / span, None)
            }
        };
        let unfolded: Vec<f64> = sorted.iter().map(|x| (x - lo) * scale).collect();
        groups.push(PointSet::from_line(&unfolded, new_period, label as u32));
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(UnfoldedPoints {
        kind: SourceKind::RealAxis,
        groups,
    })
}

/// Nearest-neighbour spacings normalized to unit mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSample {
    pub s: Vec<f64>,
    /// Mean of the spacings before normalization.
    pub raw_mean: f64,
}

impl SpacingSample {
    /// Normalizes `raw` to unit mean.
    pub fn from_raw(raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        let raw_mean = raw.iter().sum::<f64>() / raw.len() as f64;
        if !(raw_mean > 0.0) {
            return Err(Error::DegenerateSpectrum {
                multiplicity: raw.len(),
            });
        }
        let s = raw.into_iter().map(|x| x / raw_mean).collect();
        Ok(Self { s, raw_mean })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.s.iter().sum::<f64>() / self.s.len() as f64
    }
}

/// Gaps between consecutive sorted values of active points; wraps around
/// when the set is periodic.
fn consecutive_gaps(set: &PointSet) -> Vec<f64> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&i, &j| {
        set.points[i][0]
            .total_cmp(&set.points[j][0])
            .then(i.cmp(&j))
    });
    let n = order.len();
    let mut gaps = Vec::with_capacity(n);
    for w in order.windows(2) {
        if set.is_active(w[0]) && set.is_active(w[1]) {
            gaps.push(set.points[w[1]][0] - set.points[w[0]][0]);
        }
    }
    if let (Some(p), true) = (set.x_period, n >= 2) {
        let (first, last) = (order[0], order[n - 1]);
        if set.is_active(first) && set.is_active(last) {
            gaps.push(set.points[first][0] + p - set.points[last][0]);
        }
    }
    gaps
}

/// Pooled spacing sample, normalized to `⟨s⟩ = 1`.
///
/// Points on the real axis contribute consecutive gaps; points in the plane
/// contribute their nearest-neighbour distance. Neighbours are searched only
/// within the point's own spectrum.
pub fn nn_spacings(u: &UnfoldedPoints) -> Result<SpacingSample> {
    nn_spacings_with(u, NeighborSearch::Auto)
}

pub fn nn_spacings_with(u: &UnfoldedPoints, how: NeighborSearch) -> Result<SpacingSample> {
    if u.len() < 3 {
        return Err(Error::TooFewPoints {
            got: u.len(),
            needed: 3,
        });
    }
    let mut raw = Vec::with_capacity(u.len());
    for g in &u.groups {
        match u.kind {
            SourceKind::RealAxis => raw.extend(consecutive_gaps(g)),
            SourceKind::ComplexPlane => raw.extend(nn_distances(g, how)),
        }
    }
    SpacingSample::from_raw(raw)
}

/// Complex spacing ratios `z`, their moduli `r` and the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub z: Vec<C64>,
    pub r: Vec<f64>,
    pub r_mean: f64,
    /// Naive standard error `σ(r)/√n`.
    pub r_stderr: f64,
}

impl RatioSample {
    pub fn from_z(z: Vec<C64>) -> Self {
        let r: Vec<f64> = z.iter().map(|z| z.norm()).collect();
        let (r_mean, r_stderr) = mean_and_stderr(&r);
        Self {
            z,
            r,
            r_mean,
            r_stderr,
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Mean and standard error of the mean; `(NaN, NaN)` for empty input.
pub fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ratios `z = (ε_NN − ε)/(ε_NNN − ε)` pooled over point sets, ties broken
/// by `(distance, index)`. Ratios are scale- and shift-invariant, so the sets
/// may hold raw or unfolded coordinates.
pub fn spacing_ratios(sets: &[PointSet]) -> Result<RatioSample> {
    spacing_ratios_with(sets, NeighborSearch::Auto)
}

pub fn spacing_ratios_with(sets: &[PointSet], how: NeighborSearch) -> Result<RatioSample> {
    let total: usize = sets.iter().map(PointSet::len).sum();
    if total < 3 {
        return Err(Error::TooFewPoints {
            got: total,
            needed: 3,
        });
    }
    let mut z = Vec::with_capacity(total);
    for set in sets {
        z.extend(ratios_of_set(set, how)?);
    }
    Ok(RatioSample::from_z(z))
}
