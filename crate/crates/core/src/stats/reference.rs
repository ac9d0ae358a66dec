//! Reference nearest-neighbour spacing distributions (unit mean) and
//! Kolmogorov–Smirnov distances.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use statrs::function::erf::erf;
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// `e^{-s}`.
    Poisson,
    /// `(π/2) s e^{-πs²/4}`.
    GoeWigner,
    /// `(32/π²) s² e^{-4s²/π}`.
    GueWigner,
    /// `C₁ s^β e^{-C₂ s^{β+1}}`.
    Brody(f64),
}

/// `C₂ = Γ((β+2)/(β+1))^{β+1}`.
pub fn brody_c2(beta: f64) -> f64 {
    ((beta + 1.0) * ln_gamma((beta + 2.0) / (beta + 1.0))).exp()
}

/// `C₁ = (β+1)·C₂`.
pub fn brody_c1(beta: f64) -> f64 {
    (beta + 1.0) * brody_c2(beta)
}

impl Reference {
    pub fn pdf(&self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match *self {
            Reference::Poisson => (-s).exp(),
            Reference::GoeWigner => PI / 2.0 * s * (-PI * s * s / 4.0).exp(),
            Reference::GueWigner => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
            Reference::Brody(b) => {
                let c2 = brody_c2(b);
                (b + 1.0) * c2 * s.powf(b) * (-c2 * s.powf(b + 1.0)).exp()
            }
        }
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match *self {
            Reference::Poisson => -(-s).exp_m1(),
            Reference::GoeWigner => -(-PI * s * s / 4.0).exp_m1(),
            Reference::GueWigner => {
                // ∫₀ˢ t² e^{-at²} dt with a = 4/π
                let a = 4.0 / PI;
                let prim = -s * (-a * s * s).exp() / (2.0 * a)
                    + PI.sqrt() / (4.0 * a.powf(1.5)) * erf(a.sqrt() * s);
                32.0 / (PI * PI) * prim
            }
            Reference::Brody(b) => -(-brody_c2(b) * s.powf(b + 1.0)).exp_m1(),
        }
    }

    /// Average density over `[a, b]`.
    pub fn bin_average(&self, a: f64, b: f64) -> f64 {
        (self.cdf(b) - self.cdf(a)) / (b - a)
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Poisson => write!(f, "poisson"),
            Reference::GoeWigner => write!(f, "goe_wigner"),
            Reference::GueWigner => write!(f, "gue_wigner"),
            Reference::Brody(b) => write!(f, "brody({b})"),
        }
    }
}

impl FromStr for Reference {
    type Err = Error;

    /// Accepts `poisson`, `goe_wigner`, `gue_wigner` and `brody(β)`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "poisson" => return Ok(Reference::Poisson),
            "goe_wigner" | "goe" => return Ok(Reference::GoeWigner),
            "gue_wigner" | "gue" => return Ok(Reference::GueWigner),
            _ => {}
        }
        if let Some(arg) = t.strip_prefix("brody(").and_then(|r| r.strip_suffix(')')) {
            if let Ok(b) = arg.trim().parse::<f64>() {
                if (0.0..=1.0).contains(&b) {
                    return Ok(Reference::Brody(b));
                }
            }
        }
        Err(Error::UnknownKind(s.to_string()))
    }
}

/// `sup |F_n − F|` between the empirical CDF of `sample` and `cdf`.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0_f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    Ok(d)
}
