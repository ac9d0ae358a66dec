//! Resonant kicked-rotor model: parameters, kick Fourier table, the reduced
//! Floquet matrix and its symmetry diagnostics.

mod floquet;
mod kick;
mod symmetry;

pub use floquet::{bloch_consistency_residual, build_reduced_floquet, FloquetMatrix};
pub use kick::{fold_kick_coefficients, kick_fourier_table, KickTable, DEFAULT_TAIL_TOL};
pub use symmetry::{time_reversal_residual, SymmetryKind, SymmetryReport};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Largest `k·λ` accepted; the kick factor is bounded by `e^{kλ}`.
pub const MAX_KICK_LAMBDA: f64 = 700.0;

/// Dimensionless parameters of the resonant PT-symmetric kicked rotor.
///
/// `hbar_eff = 4π·hbar_num/period`, `gamma_eff = 2π·gamma_num/(cell_mult·period)`
/// and the reduced matrix dimension is `cell_mult·period`. The magnetic term is
/// specified through integers so the coprimality conditions can be checked
/// exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceParams {
    /// Resonance numerator `N`.
    #[serde(rename = "N")]
    pub hbar_num: u32,
    /// Resonance period `M`.
    #[serde(rename = "M")]
    pub period: u32,
    /// Period multiplier `b` introduced by a non-zero magnetic term.
    #[serde(rename = "b")]
    pub cell_mult: u32,
    /// Magnetic-term numerator `a`.
    #[serde(rename = "a")]
    pub gamma_num: u32,
    /// Kick strength `k`.
    #[serde(rename = "k")]
    pub kick: f64,
    /// Strength of the imaginary part of the kick potential.
    pub lambda: f64,
    /// Bloch number `q`.
    #[serde(rename = "q")]
    pub bloch_q: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl ResonanceParams {
    /// Time-reversal-symmetric template: `b = 1`, `a = 0`.
    pub fn new(hbar_num: u32, period: u32, kick: f64, lambda: f64, bloch_q: f64) -> Self {
        Self {
            hbar_num,
            period,
            cell_mult: 1,
            gamma_num: 0,
            kick,
            lambda,
            bloch_q,
        }
    }

    pub fn with_gamma(mut self, gamma_num: u32, cell_mult: u32) -> Self {
        self.gamma_num = gamma_num;
        self.cell_mult = cell_mult;
        self
    }

    pub fn with_kick(mut self, kick: f64) -> Self {
        self.kick = kick;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_q(mut self, bloch_q: f64) -> Self {
        self.bloch_q = bloch_q;
        self
    }

    /// Reduced matrix dimension `D = b·M`.
    pub fn dim(&self) -> usize {
        self.cell_mult as usize * self.period as usize
    }

    pub fn hbar_eff(&self) -> f64 {
        4.0 * PI * self.hbar_num as f64 / self.period as f64
    }

    pub fn gamma_eff(&self) -> f64 {
        2.0 * PI * self.gamma_num as f64 / self.dim() as f64
    }

    /// Half-width of the Bloch zone, `π/D`.
    pub fn bloch_zone(&self) -> f64 {
        PI / self.dim() as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.hbar_num == 0 || self.period == 0 || self.cell_mult == 0 {
            return bad("N, M and b must be positive".into());
        }
        if gcd(self.hbar_num as u64, self.period as u64) != 1 {
            return bad(format!(
                "N = {} and M = {} are not coprime",
                self.hbar_num, self.period
            ));
        }
        if self.gamma_num == 0 {
            if self.cell_mult != 1 {
                return bad("b must be 1 when a = 0".into());
            }
        } else if gcd(self.gamma_num as u64, self.dim() as u64) != 1 {
            return bad(format!(
                "a = {} and bM = {} are not coprime",
                self.gamma_num,
                self.dim()
            ));
        }
        if !(self.kick.is_finite() && self.kick >= 0.0) {
            return bad(format!("k = {} must be finite and non-negative", self.kick));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad(format!(
                "lambda = {} must be finite and non-negative",
                self.lambda
            ));
        }
        if self.kick * self.lambda > MAX_KICK_LAMBDA {
            return Err(Error::OverflowRisk(self.kick * self.lambda));
        }
        let zone = self.bloch_zone();
        if !self.bloch_q.is_finite() || self.bloch_q <= -zone || self.bloch_q > zone * (1.0 + 1e-12)
        {
            return bad(format!("q = {} outside (-pi/D, pi/D]", self.bloch_q));
        }
        Ok(())
    }

    /// Half-step free propagation factor
    /// `g_m = exp(-i·hbar_eff/4·m² + i·gamma_eff/2·m)` on the full momentum
    /// lattice.
    ///
    /// The exponent is `π·t/(bM)` with integer `t = -bN·m² + a·m`, reduced
    /// modulo `2bM` in exact arithmetic so large `m` loses no accuracy.
    pub fn free_phase(&self, m: i64) -> C64 {
        let d = self.dim() as i128;
        let m = m as i128;
        let t = -(self.cell_mult as i128) * (self.hbar_num as i128) * m * m
            + (self.gamma_num as i128) * m;
        let t = t.rem_euclid(2 * d);
        C64::from_polar(1.0, PI * t as f64 / d as f64)
    }
}
