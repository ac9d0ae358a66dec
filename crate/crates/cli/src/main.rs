//! `ptqkr`: spectra, phase diagrams and level statistics of the resonant
//! PT-symmetric kicked rotor.
//!
//! Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure.

mod config;

use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::json;

use config::{CliError, Common, CommonArgs, ConfigFile, Result};
use ptqkr::io::{self, Provenance};
use ptqkr::model::{build_reduced_floquet, time_reversal_residual};
use ptqkr::rmt::{baseline_statistics, EnsembleKind, EnsembleSpec, DEFAULT_BULK_FRACTION};
use ptqkr::spectrum::{classify_real, conjugation_pairing_residual, real_part_density};
use ptqkr::stats::{
    brody_fit, brody_fit_histogram, mixture_fit, Histogram, Reference, DEFAULT_BINS, DEFAULT_S_MAX,
};
use ptqkr::sweep::{
    log_space, pooled_ratios, pooled_spacings, EnsemblePolicy, QeSubset, SpectrumCache,
    SweepEngine, SweepGrid, DEFAULT_R_MIDPOINT,
};
use ptqkr::{Error, ResonanceParams};

#[derive(Debug, Parser)]
#[command(
    name = "ptqkr",
    version,
    about = "Resonant PT-symmetric kicked rotor: spectra and level statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quasi-energy spectrum of one reduced Floquet matrix.
    Spectrum(SpectrumArgs),
    /// Real fraction P over a (k, lambda) grid.
    Phase(PhaseArgs),
    /// Spacing and ratio statistics of an ensemble, with Brody and mixture fits.
    Stats(StatsArgs),
    /// Random-matrix baselines.
    Baseline(BaselineArgs),
    /// Mean spacing ratio against lambda.
    Transition(TransitionArgs),
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
}

/// Ensemble around each data point.
#[derive(Debug, Clone, Args)]
struct EnsembleArgs {
    /// fixed, bloch or kwindow.
    #[arg(long)]
    ensemble: Option<String>,
    /// Bloch numbers in a Bloch ensemble.
    #[arg(long)]
    bloch_count: Option<usize>,
    /// Half-width of a k window.
    #[arg(long)]
    k_half_width: Option<f64>,
    /// Step of a k window.
    #[arg(long)]
    k_step: Option<f64>,
}

impl EnsembleArgs {
    fn policy(&self, cfg: &ConfigFile) -> Result<EnsemblePolicy> {
        let kind: String = cfg.or(self.ensemble.clone(), "ensemble", "fixed".into())?;
        Ok(match kind.as_str() {
            "fixed" => EnsemblePolicy::Fixed,
            "bloch" => EnsemblePolicy::Bloch {
                count: cfg.or(self.bloch_count, "bloch_count", 200)?,
            },
            "kwindow" => EnsemblePolicy::KWindow {
                half_width: cfg.or(self.k_half_width, "k_half_width", 50.0)?,
                step: cfg.or(self.k_step, "k_step", 1.0)?,
            },
            other => return Err(CliError::Usage(format!("unknown ensemble {other:?}"))),
        })
    }
}

#[derive(Debug, Args)]
struct PhaseArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, allow_hyphen_values = true)]
    k_min_exp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k_max_exp: Option<f64>,
    #[arg(long)]
    k_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_min_exp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max_exp: Option<f64>,
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Prepend a lambda = 0 column.
    #[arg(long)]
    with_zero_lambda: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// real, real_parts, complex or all.
    #[arg(long)]
    subset: Option<String>,
    /// Also pool the spectra at -q.
    #[arg(long)]
    mirror_q: bool,
    /// Spacing histogram bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Upper edge of the spacing histogram.
    #[arg(long)]
    s_max: Option<f64>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// GOE, GUE, GinibreA or AIdagger; repeatable. All four by default.
    #[arg(long = "class")]
    class: Vec<String>,
    /// Matrix size.
    #[arg(long = "n")]
    size: Option<usize>,
    /// Matrices per class.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    bulk: Option<f64>,
}

#[derive(Debug, Args)]
struct TransitionArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long, allow_hyphen_values = true)]
    lambda_min_exp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_max_exp: Option<f64>,
    #[arg(long)]
    lambda_points: Option<usize>,
    /// Quasi-energies entering the ratios; complex when q != 0, real otherwise.
    #[arg(long)]
    subset: Option<String>,
    /// Midpoint value of <r> defining lambda_0.
    #[arg(long)]
    target: Option<f64>,
}

fn engine(c: &Common) -> Result<SweepEngine> {
    let cache = c.cache.as_ref().map(SpectrumCache::new).transpose()?;
    Ok(SweepEngine::new(c.workers, cache, c.tol_real)?)
}

fn params_record(p: &ResonanceParams) -> serde_json::Value {
    serde_json::to_value(p).expect("params serialize")
}

fn parse_subset(s: &str) -> Result<QeSubset> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("unknown subset {s:?}")))
}

fn finite_range(values: &[f64], pad: f64) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - pad, hi + pad)
    }
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<()> {
    let c = a.common.resolve()?;
    let p = a.common.params(&c.cfg)?;
    let eng = engine(&c)?;
    let spec = eng.spectrum(&p)?;
    let part = classify_real(&spec, c.tol_real);
    let prov = Provenance::new(
        "spectrum",
        json!({"params": params_record(&p), "tol_real": c.tol_real}),
        None,
    );

    let re_hist = real_part_density(std::slice::from_ref(&spec), DEFAULT_BINS)?;
    let im: Vec<f64> = spec.eps.iter().map(|e| e.im).collect();
    let (lo, hi) = finite_range(&im, c.tol_real);
    let im_hist = Histogram::from_values(&im, DEFAULT_BINS, lo, hi)?;

    let time_reversal = if p.cell_mult == 1 {
        let s = build_reduced_floquet(&p)?;
        match time_reversal_residual(&s, p.gamma_num) {
            Ok(r) => json!(r.residual),
            Err(Error::NotApplicable(why)) => json!({"not_applicable": why}),
            Err(e) => return Err(e.into()),
        }
    } else {
        json!({"not_applicable": "b > 1"})
    };
    let pairing = match conjugation_pairing_residual(&spec) {
        Ok(r) => json!(r),
        Err(Error::PreconditionViolation(why)) => json!({"not_applicable": why}),
        Err(e) => return Err(e.into()),
    };

    io::write_text(
        &c.out.join("spectrum.csv"),
        &io::spectrum_csv(&spec, c.tol_real, &prov),
    )?;
    io::write_text(
        &c.out.join("re_density.csv"),
        &io::histogram_csv(&re_hist, &prov),
    )?;
    io::write_text(
        &c.out.join("im_density.csv"),
        &io::histogram_csv(&im_hist, &prov),
    )?;
    let summary = json!({
        "P": part.fraction,
        "n_real": part.real_eps.len(),
        "n_complex": part.complex_eps.len(),
        "D": spec.dim(),
        "tol_real": c.tol_real,
        "boundary_stragglers": part.boundary_stragglers,
        "re_uniformity_p_value": re_hist.uniformity_p_value(),
        "time_reversal_residual": time_reversal,
        "conjugation_pairing_residual": pairing,
        "provenance": prov,
    });
    io::write_json(&c.out.join("summary.json"), &summary)?;
    println!(
        "P = {} ({} of {} real)",
        part.fraction,
        part.real_eps.len(),
        spec.dim()
    );
    Ok(())
}

/// Template whose `k` is optional (grids supply it).
fn template(common: &CommonArgs, cfg: &ConfigFile) -> Result<ResonanceParams> {
    let mut args = common.clone();
    if cfg.pick(args.k, "k")?.is_none() {
        args.k = Some(1.0);
    }
    args.params(cfg)
}

fn cmd_phase(a: &PhaseArgs) -> Result<()> {
    let c = a.common.resolve()?;
    let cfg = &c.cfg;
    let tpl = template(&a.common, cfg)?;
    let k_values = log_space(
        cfg.or(a.k_min_exp, "k_min_exp", 0.0)?,
        cfg.or(a.k_max_exp, "k_max_exp", 6.0)?,
        cfg.or(a.k_points, "k_points", 25)?,
    );
    let mut lambda_values = log_space(
        cfg.or(a.lambda_min_exp, "lambda_min_exp", -12.0)?,
        cfg.or(a.lambda_max_exp, "lambda_max_exp", -1.0)?,
        cfg.or(a.lambda_points, "lambda_points", 25)?,
    );
    if a.with_zero_lambda || cfg.or(None, "with_zero_lambda", false)? {
        lambda_values.insert(0, 0.0);
    }
    let grid = SweepGrid {
        k_values,
        lambda_values,
        template: tpl,
        policy: a.ensemble.policy(cfg)?,
    };
    let eng = engine(&c)?;
    let diagram = eng.real_fraction_phase_diagram(&grid)?;
    let prov = Provenance::new("phase", json!({"grid": grid, "tol_real": c.tol_real}), None);
    io::write_text(&c.out.join("phase.csv"), &io::phase_csv(&diagram, &prov))?;
    let failed = diagram.cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} cells failed; see comments in phase.csv",
            diagram.cells.len()
        );
    }
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> Result<()> {
    let c = a.common.resolve()?;
    let cfg = &c.cfg;
    let tpl = a.common.params(cfg)?;
    let policy = a.ensemble.policy(cfg)?;
    let subset = parse_subset(&cfg.or(a.subset.clone(), "subset", "real".to_string())?)?;
    let mirror = a.mirror_q || cfg.or(None, "mirror_q", false)?;
    let bins = cfg.or(a.bins, "bins", DEFAULT_BINS)?;
    let s_max = cfg.or(a.s_max, "s_max", DEFAULT_S_MAX)?;

    let eng = engine(&c)?;
    let mut spectra = eng.ensemble(&tpl, policy)?;
    if mirror {
        let members: Vec<ResonanceParams> = policy
            .members(&tpl)?
            .iter()
            .map(|p| p.with_q(-p.bloch_q))
            .collect();
        for r in eng.spectra(&members) {
            spectra.push(r?);
        }
    }

    let spacings = pooled_spacings(&spectra, subset, c.tol_real)?;
    let ratios = pooled_ratios(&spectra, subset, c.tol_real)?;
    let hist = Histogram::from_values(&spacings.s, bins, 0.0, s_max)?;
    let mle = brody_fit(&spacings)?;
    let lsq = brody_fit_histogram(&spacings)?;
    let mixture = mixture_fit(&hist);

    let prov = Provenance::new(
        "stats",
        json!({
            "params": params_record(&tpl),
            "ensemble": policy,
            "subset": subset,
            "mirror_q": mirror,
            "bins": bins,
            "s_max": s_max,
            "tol_real": c.tol_real,
        }),
        None,
    );
    let refs = [
        Reference::Poisson,
        Reference::GoeWigner,
        Reference::GueWigner,
        Reference::Brody(mle.beta),
    ];
    io::write_text(
        &c.out.join("spacing_hist.csv"),
        &io::histogram_csv(&hist, &prov),
    )?;
    io::write_text(
        &c.out.join("reference_curves.csv"),
        &io::reference_curves_csv(&hist, &refs, &prov),
    )?;
    io::write_json(&c.out.join("fit_brody.json"), &io::brody_json(&mle, &prov))?;
    io::write_json(
        &c.out.join("fit_brody_lsq.json"),
        &io::brody_json(&lsq, &prov),
    )?;
    io::write_json(
        &c.out.join("fit_mixture.json"),
        &io::mixture_json(&mixture, spacings.len(), &prov),
    )?;
    io::write_json(
        &c.out.join("ratios.json"),
        &json!({
            "r_mean": ratios.sample.r_mean,
            "r_stderr": ratios.stderr,
            "n_ratios": ratios.sample.len(),
            "n_spectra": ratios.per_spectrum.len(),
            "provenance": prov,
        }),
    )?;
    println!(
        "spacings: {} | beta (mle) = {:.4} | beta (lsq) = {:.4} | alpha = {:.4} | <r> = {:.4} ± {:.4}",
        spacings.len(),
        mle.beta,
        lsq.beta,
        mixture.alpha,
        ratios.sample.r_mean,
        ratios.stderr
    );
    Ok(())
}

fn cmd_baseline(a: &BaselineArgs) -> Result<()> {
    let c = a.common.resolve()?;
    let cfg = &c.cfg;
    let names: Vec<String> = if a.class.is_empty() {
        cfg.or(
            None,
            "class",
            EnsembleKind::ALL.iter().map(|k| k.to_string()).collect(),
        )?
    } else {
        a.class.clone()
    };
    let kinds = names
        .iter()
        .map(|s| s.parse::<EnsembleKind>())
        .collect::<ptqkr::Result<Vec<_>>>()?;
    let n = cfg.or(a.size, "n", 1000)?;
    let count = cfg.or(a.count, "count", 50)?;
    let bulk = cfg.or(a.bulk, "bulk", DEFAULT_BULK_FRACTION)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.workers.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;

    let mut rows = Vec::new();
    for kind in kinds {
        let spec = EnsembleSpec {
            kind,
            n,
            count,
            seed: c.seed,
            bulk_fraction: bulk,
        };
        log::info!("baseline {kind}: {count} matrices of size {n}");
        rows.push(pool.install(|| baseline_statistics(&spec))?);
    }
    let prov = Provenance::new(
        "baseline",
        json!({"classes": names, "n": n, "count": count, "bulk": bulk}),
        Some(c.seed),
    );
    io::write_text(&c.out.join("baseline.csv"), &io::baseline_csv(&rows, &prov))?;
    for b in &rows {
        let path = c.out.join(format!("baseline_hist_{}.csv", b.spec.kind));
        io::write_text(&path, &io::histogram_csv(&b.histogram, &prov))?;
        println!("{}: <r> = {:.4} ± {:.4}", b.spec.kind, b.r_mean, b.r_stderr);
    }
    Ok(())
}

fn cmd_transition(a: &TransitionArgs) -> Result<()> {
    let c = a.common.resolve()?;
    let cfg = &c.cfg;
    let tpl = a.common.params(cfg)?;
    let policy = a.ensemble.policy(cfg)?;
    let default_subset = if tpl.bloch_q == 0.0 {
        "real"
    } else {
        "complex"
    };
    let subset = parse_subset(&cfg.or(a.subset.clone(), "subset", default_subset.to_string())?)?;
    let target = cfg.or(a.target, "target", DEFAULT_R_MIDPOINT)?;
    let lambdas = log_space(
        cfg.or(a.lambda_min_exp, "lambda_min_exp", -9.0)?,
        cfg.or(a.lambda_max_exp, "lambda_max_exp", -4.5)?,
        cfg.or(a.lambda_points, "lambda_points", 10)?,
    );
    let eng = engine(&c)?;
    let curve = eng.r_transition_curve(&lambdas, &tpl, policy, subset, target)?;
    let prov = Provenance::new(
        "transition",
        json!({
            "params": params_record(&tpl),
            "ensemble": policy,
            "subset": subset,
            "lambdas": lambdas,
            "target": target,
            "tol_real": c.tol_real,
        }),
        None,
    );
    io::write_text(
        &c.out.join("transition.csv"),
        &io::transition_csv(&curve, &prov),
    )?;
    match curve.midpoint() {
        Ok(l0) => println!("lambda_0 = {l0:e}"),
        Err(e) => log::warn!("{e}"),
    }
    Ok(())
}

fn usage_for(command: &Command) -> String {
    let name = match command {
        Command::Spectrum(_) => "spectrum",
        Command::Phase(_) => "phase",
        Command::Stats(_) => "stats",
        Command::Baseline(_) => "baseline",
        Command::Transition(_) => "transition",
    };
    let mut cmd = Cli::command();
    cmd.find_subcommand_mut(name)
        .map(|c| c.render_usage().to_string())
        .unwrap_or_default()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Phase(a) => cmd_phase(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Transition(a) => cmd_transition(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{}", usage_for(&cli.command));
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
