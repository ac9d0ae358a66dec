use serde::Serialize;

use super::FloquetMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryKind {
    TimeReversal,
    PtSpectral,
}

/// Outcome of a symmetry check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub kind: SymmetryKind,
    /// Normalized Frobenius or matching distance, `>= 0`.
    pub residual: f64,
    /// Index shift `p` of the index-reversal map (time reversal only).
    pub shift: Option<i64>,
    /// `(M + 1)/N` when it is an integer.
    pub delta: Option<i64>,
}

/// Relative violation of `S_{l,n} = S_{p-n, p-l}` with `p = (L·Δ) mod M`
/// and `Δ = (M + 1)/N`.
///
/// Indices outside `0..M` are reduced mod `M` together with the factor
/// `g_i / g_{i mod M} = ±1`.
///
/// Requires `b = 1` and `gamma_eff = 2πL/M`, i.e. `a ≡ L (mod M)`. For
/// `L = 0` the shift is zero and `Δ` need not be integral.
pub fn time_reversal_residual(s: &FloquetMatrix, l_mult: u32) -> Result<SymmetryReport> {
    let p = &s.params;
    if p.cell_mult != 1 {
        return Err(Error::NotApplicable(format!(
            "b = {} > 1: the reduced system lacks time-reversal symmetry",
            p.cell_mult
        )));
    }
    let m = p.period as i64;
    if (p.gamma_num as i64).rem_euclid(m) != (l_mult as i64).rem_euclid(m) {
        return Err(Error::NotApplicable(format!(
            "gamma numerator a = {} does not match L = {l_mult} mod M",
            p.gamma_num
        )));
    }
    let delta = ((m + 1) % p.hbar_num as i64 == 0).then(|| (m + 1) / p.hbar_num as i64);
    let shift = if l_mult == 0 {
        0
    } else {
        match delta {
            Some(delta) => (l_mult as i64 * delta).rem_euclid(m),
            None => {
                return Err(Error::NotApplicable(format!(
                    "Delta = (M+1)/N = {}/{} is not an integer",
                    m + 1,
                    p.hbar_num
                )))
            }
        }
    };

    // S extended to all integer indices: S_{i+D, j} = (g_{i+D}/g_i)·S_{i,j}.
    let extended = |i: i64, j: i64| {
        let (ri, rj) = (i.rem_euclid(m), j.rem_euclid(m));
        let gauge = p.free_phase(i) / p.free_phase(ri) * (p.free_phase(j) / p.free_phase(rj));
        gauge * s.get(ri as usize, rj as usize)
    };
    let mut diff2 = 0.0;
    for l in 0..m {
        for n in 0..m {
            diff2 += (s.get(l as usize, n as usize) - extended(shift - n, shift - l)).norm_sqr();
        }
    }
    Ok(SymmetryReport {
        kind: SymmetryKind::TimeReversal,
        residual: diff2.sqrt() / s.frobenius_norm(),
        shift: Some(shift),
        delta,
    })
}
