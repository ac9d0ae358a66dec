use faer::Mat;

use super::kick::{fold_kick_coefficients, kick_fourier_table, KickTable, DEFAULT_TAIL_TOL};
use super::ResonanceParams;
use crate::{Error, Result, C64};

/// Dense reduced Floquet matrix `S(q)` with indices `l, n ∈ {0, …, D-1}`.
#[derive(Debug, Clone)]
pub struct FloquetMatrix {
    pub params: ResonanceParams,
    /// Truncation order of the kick table the matrix was built from.
    pub n_max: usize,
    pub entries: Mat<C64>,
}

impl FloquetMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, l: usize, n: usize) -> C64 {
        self.entries[(l, n)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm_l2()
    }

    /// `‖S†S − I‖_F / √D`; zero for a unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let mut gram = self.entries.adjoint() * &self.entries;
        for i in 0..d {
            gram[(i, i)] -= C64::new(1.0, 0.0);
        }
        gram.norm_l2() / (d as f64).sqrt()
    }
}

/// Builds `S_{l,n}(q) = g_l · Ŵ_{(l-n) mod D}(q) · g_n` from a fresh kick table.
pub fn build_reduced_floquet(params: &ResonanceParams) -> Result<FloquetMatrix> {
    params.validate()?;
    let table = kick_fourier_table(params.kick, params.lambda, DEFAULT_TAIL_TOL)?;
    build_reduced_floquet_with(params, &table)
}

/// As [`build_reduced_floquet`] with a precomputed table, which must match
/// `params.kick` and `params.lambda`.
pub fn build_reduced_floquet_with(
    params: &ResonanceParams,
    table: &KickTable,
) -> Result<FloquetMatrix> {
    params.validate()?;
    if table.kick != params.kick || table.lambda != params.lambda {
        return Err(Error::ParamMismatch(format!(
            "table built for (k={}, lambda={}), params have (k={}, lambda={})",
            table.kick, table.lambda, params.kick, params.lambda
        )));
    }
    let d = params.dim();
    let folded = fold_kick_coefficients(table, d, params.bloch_q);
    let phase: Vec<C64> = (0..d as i64).map(|m| params.free_phase(m)).collect();
    let entries = Mat::from_fn(d, d, |l, n| {
        let diff = if l >= n { l - n } else { l + d - n };
        phase[l] * folded[diff] * phase[n]
    });
    Ok(FloquetMatrix {
        params: *params,
        n_max: table.n_max,
        entries,
    })
}

/// Checks a reduced eigenpair `(μ, c)` against the full momentum-lattice
/// operator `U_{l,n} = g_l W_{l-n} g_n`.
///
/// The eigenvector is lifted to `φ_l = (g_{l mod D} / g_l) · c_{l mod D} · e^{iql}`
/// on `l ∈ [-L, L]`. The prefactor is `±1`: the half-step phase `g_m` is
/// antiperiodic in `m` with period `D` whenever `N·b²·M + a` is odd, while the
/// reduced matrix uses its values on `0..D`. Returns the largest
/// `|Σ_n U_{l,n} φ_n − μ φ_l|` over the central half of the window.
pub fn bloch_consistency_residual(
    params: &ResonanceParams,
    table: &KickTable,
    mu: C64,
    vector: &[C64],
    l_trunc: usize,
) -> Result<f64> {
    let d = params.dim();
    if vector.len() != d {
        return Err(Error::PreconditionViolation(format!(
            "eigenvector has length {}, expected {d}",
            vector.len()
        )));
    }
    let needed = 4 * (table.n_max + d);
    if l_trunc < needed {
        return Err(Error::WindowTooSmall {
            got: l_trunc,
            needed,
        });
    }
    let half = l_trunc as i64;
    let di = d as i64;
    let lifted: Vec<C64> = (-half..=half)
        .map(|l| {
            let r = l.rem_euclid(di);
            let sign = params.free_phase(r) / params.free_phase(l);
            sign * vector[r as usize] * C64::from_polar(1.0, params.bloch_q * l as f64)
        })
        .collect();
    let phase: Vec<C64> = (-half..=half).map(|l| params.free_phase(l)).collect();
    let at = |l: i64| (l + half) as usize;

    let nm = table.n_max as i64;
    let mut worst = 0.0_f64;
    for l in -half / 2..=half / 2 {
        let mut acc = C64::new(0.0, 0.0);
        for n in l - nm..=l + nm {
            acc += table.coeff(l - n) * phase[at(n)] * lifted[at(n)];
        }
        let res = (phase[at(l)] * acc - mu * lifted[at(l)]).norm();
        worst = worst.max(res);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kick_is_diagonal() {
        let p = ResonanceParams::new(3, 7, 0.0, 0.2, 0.1).with_gamma(2, 1);
        let s = build_reduced_floquet(&p).unwrap();
        for l in 0..7 {
            for n in 0..7 {
                let expect = if l == n {
                    let lf = l as f64;
                    C64::from_polar(1.0, -p.hbar_eff() / 2.0 * lf * lf + p.gamma_eff() * lf)
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((s.get(l, n) - expect).norm() < 1e-13, "({l},{n})");
            }
        }
    }

    #[test]
    fn hermitian_limit_is_unitary() {
        let p = ResonanceParams::new(1, 7, 5.0, 0.0, 0.1);
        let s = build_reduced_floquet(&p).unwrap();
        assert!(s.unitarity_defect() < 1e-10);
        let sv = s.entries.singular_values().unwrap();
        assert!(sv.iter().all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn circulant_after_removing_phases() {
        let p = ResonanceParams::new(2, 5, 7.5, 0.05, -0.2).with_gamma(4, 3);
        let s = build_reduced_floquet(&p).unwrap();
        let d = p.dim();
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % d as u64) as usize
        };
        for _ in 0..200 {
            let (l, n) = (next(), next());
            let shift = next();
            let (l2, n2) = ((l + shift) % d, (n + shift) % d);
            let a = s.get(l, n) / (p.free_phase(l as i64) * p.free_phase(n as i64));
            let b = s.get(l2, n2) / (p.free_phase(l2 as i64) * p.free_phase(n2 as i64));
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_reduction_matches_float_formula() {
        let p = ResonanceParams::new(5, 399, 1.0, 0.0, 0.0).with_gamma(5, 3);
        for m in [-7i64, 0, 1, 2, 11, 398] {
            let mf = m as f64;
            let direct = C64::from_polar(
                1.0,
                -p.hbar_eff() / 4.0 * mf * mf + p.gamma_eff() / 2.0 * mf,
            );
            assert!((p.free_phase(m) - direct).norm() < 1e-12);
        }
        // antiperiodic case: N·M odd
        let odd = ResonanceParams::new(1, 5, 1.0, 0.0, 0.0);
        assert!((odd.free_phase(7) + odd.free_phase(2)).norm() < 1e-15);
    }

    #[test]
    fn window_too_small() {
        let p = ResonanceParams::new(1, 5, 2.0, 0.05, 0.1);
        let table = kick_fourier_table(2.0, 0.05, DEFAULT_TAIL_TOL).unwrap();
        let v = vec![C64::new(1.0, 0.0); 5];
        assert!(matches!(
            bloch_consistency_residual(&p, &table, C64::new(1.0, 0.0), &v, 5),
            Err(Error::WindowTooSmall { .. })
        ));
    }
}
