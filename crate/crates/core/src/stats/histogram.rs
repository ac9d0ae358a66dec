use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Fixed-width histogram over `[lo, hi]`; the top edge belongs to the last
/// bin. Weights are counts unless built from a density curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<f64>,
    /// Weight that fell outside `[lo, hi]`.
    pub n_outside: f64,
}

impl Histogram {
    pub fn empty(bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if bins == 0 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParams(format!(
                "histogram needs bins >= 1 and lo < hi, got {bins} on [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0.0; bins],
            n_outside: 0.0,
        })
    }

    /// Counts `values`. All values outside the range give an all-zero
    /// histogram and a warning.
    pub fn from_values(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut h = Self::empty(bins, lo, hi)?;
        for &v in values {
            h.add(v);
        }
        if h.total() == 0.0 {
            log::warn!("all {} values fall outside [{lo}, {hi}]", values.len());
        }
        Ok(h)
    }

    /// Histogram whose bins hold the given densities, weighted as if
    /// `total` samples had been counted.
    pub fn from_densities(densities: &[f64], lo: f64, hi: f64, total: f64) -> Result<Self> {
        let mut h = Self::empty(densities.len(), lo, hi)?;
        let w = h.bin_width();
        h.counts = densities.iter().map(|d| d * w * total).collect();
        Ok(h)
    }

    pub fn add(&mut self, v: f64) {
        match self.bin_of(v) {
            Some(b) => self.counts[b] += 1.0,
            None => self.n_outside += 1.0,
        }
    }

    pub fn bin_of(&self, v: f64) -> Option<usize> {
        if !(v >= self.lo && v <= self.hi) {
            return None;
        }
        let b = ((v - self.lo) / self.bin_width()) as usize;
        Some(b.min(self.bins() - 1))
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, b: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + b as f64 * w, self.lo + (b + 1) as f64 * w)
    }

    /// Weight inside the range.
    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Bin densities integrating to 1 over the range (all zero when empty).
    pub fn densities(&self) -> Vec<f64> {
        let norm = self.total() * self.bin_width();
        self.counts
            .iter()
            .map(|c| if norm > 0.0 { c / norm } else { 0.0 })
            .collect()
    }

    /// Bin-wise sum; the binning must agree exactly.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.bins() != other.bins() {
            return Err(Error::ParamMismatch(
                "histograms with different binning cannot be merged".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_outside += other.n_outside;
        Ok(())
    }

    /// p-value of Pearson's chi-square test against a flat density.
    pub fn uniformity_p_value(&self) -> f64 {
        let n = self.total();
        let expect = n / self.bins() as f64;
        if expect <= 0.0 || self.bins() < 2 {
            return f64::NAN;
        }
        let stat: f64 = self
            .counts
            .iter()
            .map(|c| (c - expect).powi(2) / expect)
            .sum();
        let dist = ChiSquared::new((self.bins() - 1) as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(stat)
    }
}

/// Density histogram of `values` with `bin_count >= 2` bins on `range`.
pub fn histogram_density(values: &[f64], bin_count: usize, range: (f64, f64)) -> Result<Histogram> {
    if bin_count < 2 {
        return Err(Error::InvalidParams(format!("bin_count = {bin_count} < 2")));
    }
    Histogram::from_values(values, bin_count, range.0, range.1)
}
