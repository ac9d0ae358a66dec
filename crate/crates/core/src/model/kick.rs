use std::f64::consts::TAU;

use rustfft::FftPlanner;

use super::MAX_KICK_LAMBDA;
use crate::{Error, Result, C64};

pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Largest DFT grid tried before giving up on the tail bound.
const MAX_GRID: usize = 1 << 24;

/// Number of outermost coefficients on each side that define the tail bound.
const TAIL_WIDTH: usize = 16;

/// Multiple of the sampling roundoff estimate below which a tail counts as
/// converged.
const ROUNDOFF_MARGIN: f64 = 8.0;

/// Fourier coefficients `W_n`, `|n| <= n_max`, of the complex kick factor
/// `exp{-ik[cos x + iλ sin x]} = Σ_n W_n e^{inx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KickTable {
    pub kick: f64,
    pub lambda: f64,
    pub n_max: usize,
    /// `coeffs[n + n_max] = W_n`.
    pub coeffs: Vec<C64>,
    /// Largest `|W_n|` over the outermost 16 indices on each side.
    pub tail_bound: f64,
    /// Number of sampling nodes used for the DFT.
    pub grid_size: usize,
    /// Coefficient noise expected from rounding the sampled phase `k cos x`:
    /// `k(1+λ)·ε_mach·rms|f| / sqrt(grid_size)`.
    pub roundoff_floor: f64,
}

impl KickTable {
    /// `W_n`, zero outside the stored range.
    pub fn coeff(&self, n: i64) -> C64 {
        let idx = n + self.n_max as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `(n, W_n)` for `n = -n_max ..= n_max`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let off = self.n_max as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, w)| (i as i64 - off, *w))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|w| w.norm()).fold(0.0, f64::max)
    }

    /// Truncated series `Σ_n W_n e^{inx}` at `x`.
    pub fn evaluate(&self, x: f64) -> C64 {
        self.iter()
            .map(|(n, w)| w * C64::from_polar(1.0, n as f64 * x))
            .sum()
    }
}

/// The kick factor `exp{-ik[cos x + iλ sin x]}`.
pub(crate) fn kick_factor(kick: f64, lambda: f64, x: f64) -> C64 {
    let (s, c) = x.sin_cos();
    C64::from_polar((kick * lambda * s).exp(), -kick * c)
}

fn initial_n_max(kick: f64, lambda: f64) -> usize {
    let turning = (kick * (1.0 + lambda)).ceil() as usize;
    let airy = (10.0 * kick.cbrt()).ceil() as usize;
    turning + airy.max(64)
}

/// Fourier table of the kick factor by uniform sampling and a DFT.
///
/// `n_max = ceil(k(1+λ)) + max(64, ceil(10·k^{1/3}))` and the grid is the
/// smallest power of two above `2·n_max + 1`. Both are doubled until the tail
/// bound drops below `tail_tol·max(1, max|W_n|)`, or below the sampling
/// roundoff floor when that is larger (large `k`, where doubling the grid
/// cannot help).
pub fn kick_fourier_table(kick: f64, lambda: f64, tail_tol: f64) -> Result<KickTable> {
    if !(kick.is_finite() && kick >= 0.0 && lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "k = {kick}, lambda = {lambda} must be finite and non-negative"
        )));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParams(format!(
            "tail_tol = {tail_tol} must be positive"
        )));
    }
    if kick * lambda > MAX_KICK_LAMBDA {
        return Err(Error::OverflowRisk(kick * lambda));
    }

    let mut n_max = initial_n_max(kick, lambda);
    if kick == 0.0 {
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n_max + 1];
        coeffs[n_max] = C64::new(1.0, 0.0);
        return Ok(KickTable {
            kick,
            lambda,
            n_max,
            coeffs,
            tail_bound: 0.0,
            grid_size: 1,
            roundoff_floor: 0.0,
        });
    }

    let mut planner = FftPlanner::<f64>::new();
    loop {
        let grid = (2 * n_max + 1).next_power_of_two();
        if grid > MAX_GRID {
            return Err(Error::NonConvergedTail {
                tail: f64::INFINITY,
                tol: tail_tol,
            });
        }
        let mut buf: Vec<C64> = (0..grid)
            .map(|j| kick_factor(kick, lambda, TAU * j as f64 / grid as f64))
            .collect();
        let rms = (buf.iter().map(|f| f.norm_sqr()).sum::<f64>() / grid as f64).sqrt();
        let roundoff_floor = kick * (1.0 + lambda) * f64::EPSILON * rms / (grid as f64).sqrt();
        planner.plan_fft_forward(grid).process(&mut buf);
        let norm = 1.0 / grid as f64;
        let coeffs: Vec<C64> = (-(n_max as i64)..=n_max as i64)
            .map(|n| buf[n.rem_euclid(grid as i64) as usize] * norm)
            .collect();

        let width = TAIL_WIDTH.min(n_max + 1);
        let tail_bound = coeffs[..width]
            .iter()
            .chain(&coeffs[coeffs.len() - width..])
            .map(|w| w.norm())
            .fold(0.0, f64::max);
        let peak = coeffs.iter().map(|w| w.norm()).fold(0.0, f64::max);

        let bound = (tail_tol * peak.max(1.0)).max(ROUNDOFF_MARGIN * roundoff_floor);
        if tail_bound < bound {
            if peak > 1e12 {
                log::warn!(
                    "kick table ill-conditioned: max|W_n| = {peak:e} at k = {kick}, lambda = {lambda}"
                );
            }
            return Ok(KickTable {
                kick,
                lambda,
                n_max,
                coeffs,
                tail_bound,
                grid_size: grid,
                roundoff_floor,
            });
        }
        if grid == MAX_GRID {
            return Err(Error::NonConvergedTail {
                tail: tail_bound,
                tol: tail_tol,
            });
        }
        n_max *= 2;
    }
}

/// Folded coefficients `Ŵ_d(q) = Σ_j W_{d-jD} e^{-iq(d-jD)}` for
/// `d = 0..D`, summing every `j` with `|d - jD| <= n_max`.
pub fn fold_kick_coefficients(table: &KickTable, dim: usize, bloch_q: f64) -> Vec<C64> {
    assert!(dim >= 1, "fold dimension must be positive");
    let mut folded = vec![C64::new(0.0, 0.0); dim];
    for (n, w) in table.iter() {
        folded[n.rem_euclid(dim as i64) as usize] += w * C64::from_polar(1.0, -bloch_q * n as f64);
    }
    folded
}
