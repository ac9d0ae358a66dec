//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use ptqkr::{ResonanceParams, C64};

/// `J_0(x) … J_{n_max}(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 Σ_m J_{2m} = 1`. Valid for real `x >= 0`.
pub fn bessel_j(n_max: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut j = vec![0.0; n_max + 1];
        j[0] = 1.0;
        return j;
    }
    let start = 2 * ((n_max.max(x as usize) + 40 + (x.sqrt() * 10.0) as usize) / 2);
    let mut vals = vec![0.0; start + 2];
    vals[start + 1] = 0.0;
    vals[start] = 1e-300;
    for n in (1..=start).rev() {
        vals[n - 1] = 2.0 * n as f64 / x * vals[n] - vals[n + 1];
        if vals[n - 1].abs() > 1e250 {
            for v in &mut vals[n - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.truncate(n_max + 1);
    vals.iter().map(|v| v / norm).collect()
}

/// Closed form `W_n = J_n(k√(1−λ²)) · (−i)^n · ((1+λ)/(1−λ))^{n/2}` of the
/// kick coefficients for `0 <= λ < 1`, for `|n| <= n_max`; index `n + n_max`.
pub fn kick_closed_form(k: f64, lambda: f64, n_max: usize) -> Vec<C64> {
    assert!(lambda < 1.0);
    let z = k * (1.0 - lambda * lambda).sqrt();
    let j = bessel_j(n_max, z);
    let ratio = ((1.0 + lambda) / (1.0 - lambda)).sqrt();
    (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let m = n.unsigned_abs() as usize;
            let jn = if n < 0 && m % 2 == 1 { -j[m] } else { j[m] };
            let minus_i = C64::new(0.0, -1.0).powi(n as i32);
            minus_i * jn * ratio.powi(n as i32)
        })
        .collect()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    (1..=order)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (order as f64 + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=order {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                deriv = order as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / deriv;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * deriv * deriv))
        })
        .collect()
}

/// `W_n = (1/2π) ∫_0^{2π} exp{−ik[cos x + iλ sin x]} e^{−inx} dx` by
/// composite Gauss–Legendre quadrature.
pub fn kick_quadrature(k: f64, lambda: f64, n: i64, panels: usize) -> C64 {
    let rule = gauss_legendre(32);
    let h = TAU / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(t, w) in &rule {
            let x = mid + 0.5 * h * t;
            let f = (C64::new(0.0, -k) * C64::new(x.cos(), lambda * x.sin())).exp();
            acc += f * C64::from_polar(1.0, -(n as f64) * x) * (0.5 * h * w);
        }
    }
    acc / TAU
}

/// Literal evaluation of the reduced matrix: for each `(l, n)` the sum over
/// `j` of `W_{l−jD−n} exp[iq(jD+n−l)]`, with the half-step phases computed
/// directly from `hbar_eff` and `gamma_eff`.
pub fn literal_floquet(p: &ResonanceParams, w: &dyn Fn(i64) -> C64, n_max: i64) -> Vec<Vec<C64>> {
    let d = p.dim() as i64;
    let hbar = p.hbar_eff();
    let gamma = p.gamma_eff();
    let g = |m: i64| {
        let m = m as f64;
        C64::from_polar(1.0, -hbar / 4.0 * m * m + gamma / 2.0 * m)
    };
    let j_max = n_max / d + 2;
    (0..d)
        .map(|l| {
            (0..d)
                .map(|n| {
                    let mut sum = C64::new(0.0, 0.0);
                    for j in -j_max..=j_max {
                        let idx = l - j * d - n;
                        if idx.abs() > n_max {
                            continue;
                        }
                        sum += w(idx) * C64::from_polar(1.0, p.bloch_q * (j * d + n - l) as f64);
                    }
                    g(l) * sum * g(n)
                })
                .collect()
        })
        .collect()
}

/// Inverse-CDF sample of the Wigner surmise `(πs/2) e^{−πs²/4}`.
pub fn wigner_goe_sample(u: f64) -> f64 {
    (-4.0 / PI * (1.0 - u).ln()).sqrt()
}

/// Midpoint-rule integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    (0..steps).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}
