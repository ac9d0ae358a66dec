//! Brody and GOE/Poisson mixture fits to spacing data.

use serde::Serialize;
use statrs::function::gamma::{digamma, ln_gamma};

use super::histogram::Histogram;
use super::reference::{brody_c1, brody_c2, ks_distance, Reference};
use super::unfold::SpacingSample;
use crate::{Error, Result};

/// Smallest sample accepted by the maximum-likelihood fit.
pub const MIN_MLE_SAMPLES: usize = 500;
/// Default binning of spacing histograms.
pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_S_MAX: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Mle,
    HistogramLsq,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrodyFit {
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub method: FitMethod,
    /// KS distance between the sample and the fitted density.
    pub goodness: f64,
    /// Set when the unconstrained optimum lies outside `[0, 1]` and `beta`
    /// was clamped to the boundary.
    pub clamped: bool,
    pub n_samples: usize,
}

/// `d ln C₂ / dβ = ln Γ(x) − ψ(x)/(β+1)`, `x = (β+2)/(β+1)`.
fn dln_c2(beta: f64) -> f64 {
    let x = (beta + 2.0) / (beta + 1.0);
    ln_gamma(x) - digamma(x) / (beta + 1.0)
}

/// Derivative of the Brody log-likelihood in `β`.
fn score(s: &[f64], ln_s: &[f64], beta: f64) -> f64 {
    let n = s.len() as f64;
    let c2 = brody_c2(beta);
    let d = dln_c2(beta);
    let mut sum_ln = 0.0;
    let mut sum_pow = 0.0;
    for (&x, &lx) in s.iter().zip(ln_s) {
        sum_ln += lx;
        sum_pow += x.powf(beta + 1.0) * (d + lx);
    }
    n * (1.0 / (beta + 1.0) + d) + sum_ln - c2 * sum_pow
}

fn finish(sample: &SpacingSample, beta: f64, method: FitMethod, clamped: bool) -> Result<BrodyFit> {
    let goodness = ks_distance(&sample.s, |x| Reference::Brody(beta).cdf(x))?;
    Ok(BrodyFit {
        beta,
        c1: brody_c1(beta),
        c2: brody_c2(beta),
        method,
        goodness,
        clamped,
        n_samples: sample.len(),
    })
}

/// Maximum-likelihood Brody fit: bisection on the score over `β ∈ [0, 1]`
/// to a bracket width of `1e-6`.
pub fn brody_fit(sample: &SpacingSample) -> Result<BrodyFit> {
    if sample.len() < MIN_MLE_SAMPLES {
        return Err(Error::TooFewPoints {
            got: sample.len(),
            needed: MIN_MLE_SAMPLES,
        });
    }
    // a zero spacing has zero likelihood for every β > 0
    let s: Vec<f64> = sample.s.iter().map(|&x| x.max(f64::MIN_POSITIVE)).collect();
    let ln_s: Vec<f64> = s.iter().map(|x| x.ln()).collect();
    let (lo_score, hi_score) = (score(&s, &ln_s, 0.0), score(&s, &ln_s, 1.0));
    if lo_score <= 0.0 {
        return finish(sample, 0.0, FitMethod::Mle, lo_score < 0.0);
    }
    if hi_score >= 0.0 {
        return finish(sample, 1.0, FitMethod::Mle, hi_score > 0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if score(&s, &ln_s, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    finish(sample, 0.5 * (lo + hi), FitMethod::Mle, false)
}

fn brody_lsq_objective(dens: &[f64], h: &Histogram, beta: f64) -> f64 {
    let r = Reference::Brody(beta);
    dens.iter()
        .enumerate()
        .map(|(b, d)| {
            let (a, c) = h.edges(b);
            (d - r.bin_average(a, c)).powi(2)
        })
        .sum()
}

/// Least-squares Brody fit to the spacing histogram (50 bins on `[0, 4]`),
/// comparing bin densities against bin-averaged model densities.
pub fn brody_fit_histogram(sample: &SpacingSample) -> Result<BrodyFit> {
    let h = Histogram::from_values(&sample.s, DEFAULT_BINS, 0.0, DEFAULT_S_MAX)?;
    let dens = h.densities();
    // densities relative to the whole sample, like the model's
    let inside = h.total() / sample.len() as f64;
    let dens: Vec<f64> = dens.iter().map(|d| d * inside).collect();
    let f = |b: f64| brody_lsq_objective(&dens, &h, b);

    let grid = 200;
    let best = (0..=grid)
        .map(|i| i as f64 / grid as f64)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("nonempty grid");
    // golden-section refinement inside the neighbouring grid cells
    let (mut a, mut b) = (
        (best - 1.0 / grid as f64).max(0.0),
        (best + 1.0 / grid as f64).min(1.0),
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > 1e-7 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if f(x1) <= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let beta = 0.5 * (a + b);
    let clamped =
        (beta < 1e-6 && f(0.0) < f(1e-3)) || (beta > 1.0 - 1e-6 && f(1.0) < f(1.0 - 1e-3));
    finish(sample, beta, FitMethod::HistogramLsq, clamped)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureFit {
    /// Weight of the GOE component, clipped to `[0, 1]`.
    pub alpha: f64,
    /// Least-squares objective at `alpha`.
    pub residual: f64,
}

/// Least-squares fit of `α·P_GOE + (1−α)·P_Poisson` to a density histogram,
/// using bin-averaged model densities. The objective is quadratic in `α`, so
/// the optimum is closed-form before clipping.
pub fn mixture_fit(h: &Histogram) -> MixtureFit {
    if h.hi < 3.0 {
        log::warn!("mixture fit on a histogram ending at s = {} < 3", h.hi);
    }
    let dens = h.densities();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut parts = Vec::with_capacity(dens.len());
    for (b, d) in dens.iter().enumerate() {
        let (lo, hi) = h.edges(b);
        let g = Reference::GoeWigner.bin_average(lo, hi);
        let p = Reference::Poisson.bin_average(lo, hi);
        num += (d - p) * (g - p);
        den += (g - p) * (g - p);
        parts.push((d, g, p));
    }
    let alpha = if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let residual = parts
        .iter()
        .map(|(d, g, p)| (*d - alpha * g - (1.0 - alpha) * p).powi(2))
        .sum();
    MixtureFit { alpha, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve_histogram(r: Reference) -> Histogram {
        let h = Histogram::empty(DEFAULT_BINS, 0.0, DEFAULT_S_MAX).unwrap();
        let dens: Vec<f64> = (0..DEFAULT_BINS)
            .map(|b| {
                let (lo, hi) = h.edges(b);
                r.bin_average(lo, hi)
            })
            .collect();
        Histogram::from_densities(&dens, 0.0, DEFAULT_S_MAX, 1e4).unwrap()
    }

    #[test]
    fn mixture_recovers_pure_curves() {
        assert!((mixture_fit(&curve_histogram(Reference::GoeWigner)).alpha - 1.0).abs() < 0.01);
        assert!(
            mixture_fit(&curve_histogram(Reference::Poisson))
                .alpha
                .abs()
                < 0.01
        );
    }

    #[test]
    fn score_matches_numerical_derivative() {
        let s: Vec<f64> = (0..2000)
            .map(|i| 0.01 + 3.0 * ((i * 7919) % 2000) as f64 / 2000.0)
            .collect();
        let sample = SpacingSample::from_raw(s).unwrap();
        let ln_s: Vec<f64> = sample.s.iter().map(|x| x.ln()).collect();
        let ll = |b: f64| -> f64 {
            let c1 = brody_c1(b).ln();
            let c2 = brody_c2(b);
            sample
                .s
                .iter()
                .zip(&ln_s)
                .map(|(x, lx)| c1 + b * lx - c2 * x.powf(b + 1.0))
                .sum()
        };
        for b in [0.2, 0.5, 0.8] {
            let h = 1e-5;
            let numeric = (ll(b + h) - ll(b - h)) / (2.0 * h);
            let analytic = score(&sample.s, &ln_s, b);
            assert!(
                (numeric - analytic).abs() < 1e-4 * (1.0 + analytic.abs()),
                "{b}"
            );
        }
    }

    #[test]
    fn mle_needs_enough_samples() {
        let sample = SpacingSample::from_raw(vec![1.0; 10]).unwrap();
        assert!(matches!(
            brody_fit(&sample),
            Err(Error::TooFewPoints { .. })
        ));
    }
}
