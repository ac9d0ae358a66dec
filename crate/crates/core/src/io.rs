//! CSV and JSON output schemas.
//!
//! Every CSV starts with `#` comment lines carrying the canonical parameter
//! record and seed, followed by exactly one header row. Floats are written in
//! shortest round-trip scientific notation, so equal inputs give equal bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::rmt::EnsembleBaseline;
use crate::spectrum::QESpectrum;
use crate::stats::{BrodyFit, FitMethod, Histogram, MixtureFit, Reference};
use crate::sweep::{PhaseDiagram, TransitionCurve};
use crate::Result;

/// Self-description embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub record: Value,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, record: Value, seed: Option<u64>) -> Self {
        Self {
            tool: "ptqkr".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            record,
            seed,
        }
    }

    fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {} {}", self.tool, self.version);
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# params: {}", self.record);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "# seed: {seed}");
            }
            None => s.push_str("# seed: none\n"),
        }
        s
    }
}

/// Shortest round-trip scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn spectrum_csv(spec: &QESpectrum, tol_real: f64, prov: &Provenance) -> String {
    let mut s = prov.header();
    let _ = writeln!(s, "# tol_real: {}", fmt_f64(tol_real));
    s.push_str("index,re_eps,im_eps,is_real\n");
    for (i, e) in spec.eps.iter().enumerate() {
        let real = u8::from(e.im.abs() <= tol_real);
        let _ = writeln!(s, "{i},{},{},{real}", fmt_f64(e.re), fmt_f64(e.im));
    }
    s
}

pub fn phase_csv(diagram: &PhaseDiagram, prov: &Provenance) -> String {
    let mut s = prov.header();
    let _ = writeln!(s, "# regime_boundary_k: {}", fmt_f64(diagram.boundary_k));
    for c in diagram.cells.iter().filter(|c| c.error.is_some()) {
        let _ = writeln!(
            s,
            "# error at k = {}, lambda = {}: {}",
            fmt_f64(c.k),
            fmt_f64(c.lambda),
            c.error.as_deref().unwrap_or_default()
        );
    }
    s.push_str("k,lambda,P,n_real,D,tol_real\n");
    let d = diagram.grid.template.dim();
    for c in &diagram.cells {
        let _ = writeln!(
            s,
            "{},{},{},{},{d},{}",
            fmt_f64(c.k),
            fmt_f64(c.lambda),
            fmt_f64(c.fraction.unwrap_or(f64::NAN)),
            c.n_real,
            fmt_f64(diagram.tol_real)
        );
    }
    s
}

pub fn transition_csv(curve: &TransitionCurve, prov: &Provenance) -> String {
    let mut s = prov.header();
    let _ = writeln!(s, "# target: {}", fmt_f64(curve.target));
    match curve.lambda_0 {
        Some(l) => {
            let _ = writeln!(s, "# lambda_0: {}", fmt_f64(l));
        }
        None => s.push_str("# lambda_0: not crossed\n"),
    }
    s.push_str("lambda,r_mean,r_stderr,n_ratios\n");
    for p in &curve.points {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(p.lambda),
            fmt_f64(p.r_mean),
            fmt_f64(p.r_stderr),
            p.n_ratios
        );
    }
    s
}

pub fn histogram_csv(h: &Histogram, prov: &Provenance) -> String {
    let mut s = prov.header();
    s.push_str("bin_left,bin_right,density\n");
    for (b, d) in h.densities().iter().enumerate() {
        let (lo, hi) = h.edges(b);
        let _ = writeln!(s, "{},{},{}", fmt_f64(lo), fmt_f64(hi), fmt_f64(*d));
    }
    s
}

/// Reference densities at the bin centres of `h`.
pub fn reference_curves_csv(h: &Histogram, refs: &[Reference], prov: &Provenance) -> String {
    let mut s = prov.header();
    s.push('s');
    for r in refs {
        let _ = write!(s, ",{r}");
    }
    s.push('\n');
    for b in 0..h.bins() {
        let (lo, hi) = h.edges(b);
        let x = 0.5 * (lo + hi);
        s.push_str(&fmt_f64(x));
        for r in refs {
            let _ = write!(s, ",{}", fmt_f64(r.pdf(x)));
        }
        s.push('\n');
    }
    s
}

pub fn baseline_csv(rows: &[EnsembleBaseline], prov: &Provenance) -> String {
    let mut s = prov.header();
    s.push_str("kind,n,count,r_mean,r_stderr\n");
    for b in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            b.spec.kind,
            b.n,
            b.count,
            fmt_f64(b.r_mean),
            fmt_f64(b.r_stderr)
        );
    }
    s
}

pub fn brody_json(fit: &BrodyFit, prov: &Provenance) -> Value {
    json!({
        "method": match fit.method {
            FitMethod::Mle => "brody_mle",
            FitMethod::HistogramLsq => "brody_histogram_lsq",
        },
        "beta": fit.beta,
        "goodness": fit.goodness,
        "n_samples": fit.n_samples,
        "clamped": fit.clamped,
        "provenance": prov,
    })
}

pub fn mixture_json(fit: &MixtureFit, n_samples: usize, prov: &Provenance) -> Value {
    json!({
        "method": "goe_poisson_mixture_lsq",
        "alpha": fit.alpha,
        "goodness": fit.residual,
        "n_samples": n_samples,
        "provenance": prov,
    })
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| crate::Error::Io(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}
