use std::fs;

use ptqkr::spectrum::DEFAULT_TOL_REAL;
use ptqkr::sweep::{
    log_space, pooled_ratios, pooled_spacings, CacheKey, EnsemblePolicy, QeSubset, SpectrumCache,
    SweepEngine, SweepGrid,
};
use ptqkr::{Error, ResonanceParams};

fn bits(spectra: &[ptqkr::spectrum::QESpectrum]) -> Vec<(u64, u64)> {
    spectra
        .iter()
        .flat_map(|s| s.eps.iter().map(|e| (e.re.to_bits(), e.im.to_bits())))
        .collect()
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let template = ResonanceParams::new(1, 31, 60.0, 1e-3, 0.0);
    let policy = EnsemblePolicy::Bloch { count: 9 };
    let one = SweepEngine::new(1, None, DEFAULT_TOL_REAL).unwrap();
    let four = SweepEngine::new(4, None, DEFAULT_TOL_REAL).unwrap();
    let a = one.ensemble(&template, policy).unwrap();
    let b = four.ensemble(&template, policy).unwrap();
    assert_eq!(bits(&a), bits(&b));
    let qs: Vec<f64> = b.iter().map(|s| s.params.bloch_q).collect();
    assert!(qs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn warm_cache_skips_diagonalization() {
    let dir = tempfile::tempdir().unwrap();
    let template = ResonanceParams::new(1, 23, 40.0, 1e-2, 0.0);
    let policy = EnsemblePolicy::KWindow {
        half_width: 2.0,
        step: 1.0,
    };

    let cold = SweepEngine::new(
        2,
        Some(SpectrumCache::new(dir.path()).unwrap()),
        DEFAULT_TOL_REAL,
    )
    .unwrap();
    let a = cold.ensemble(&template, policy).unwrap();
    assert_eq!(cold.diagonalizations(), 5);

    let warm = SweepEngine::new(
        3,
        Some(SpectrumCache::new(dir.path()).unwrap()),
        DEFAULT_TOL_REAL,
    )
    .unwrap();
    let b = warm.ensemble(&template, policy).unwrap();
    assert_eq!(warm.diagonalizations(), 0);
    assert_eq!(bits(&a), bits(&b));

    let fresh = SweepEngine::serial().ensemble(&template, policy).unwrap();
    assert_eq!(bits(&a), bits(&fresh));
}

#[test]
fn corrupt_cache_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let p = ResonanceParams::new(1, 11, 5.0, 0.0, 0.0);
    let engine = SweepEngine::new(
        1,
        Some(SpectrumCache::new(dir.path()).unwrap()),
        DEFAULT_TOL_REAL,
    )
    .unwrap();
    let a = engine.spectrum(&p).unwrap();
    let path = engine
        .cache()
        .unwrap()
        .path_of(&CacheKey::new(&p, DEFAULT_TOL_REAL));
    fs::write(&path, b"garbage").unwrap();
    let b = engine.spectrum(&p).unwrap();
    assert_eq!(engine.diagonalizations(), 2);
    assert_eq!(bits(&[a]), bits(&[b]));
}

#[test]
fn cache_key_separates_thresholds() {
    let p = ResonanceParams::new(1, 11, 5.0, 0.0, 0.0);
    assert_eq!(CacheKey::new(&p, 1e-10), CacheKey::new(&p, 1e-10));
    assert_ne!(CacheKey::new(&p, 1e-10), CacheKey::new(&p, 1e-9));
    assert_ne!(
        CacheKey::new(&p, 1e-10),
        CacheKey::new(&p.with_q(1e-3), 1e-10)
    );
}

#[test]
fn phase_diagram_cells() {
    let mut lambdas = vec![0.0];
    lambdas.extend(log_space(-8.0, -1.0, 3));
    let grid = SweepGrid {
        k_values: vec![2.0, 50.0, 1e4],
        lambda_values: lambdas,
        template: ResonanceParams::new(1, 41, 1.0, 0.0, 0.0),
        policy: EnsemblePolicy::Fixed,
    };
    let engine = SweepEngine::new(2, None, DEFAULT_TOL_REAL).unwrap();
    let d = engine.real_fraction_phase_diagram(&grid).unwrap();
    assert_eq!(d.cells.len(), 12);
    assert!((d.boundary_k - 82f64.sqrt()).abs() < 1e-12);
    for c in &d.cells {
        if c.lambda == 0.0 {
            assert_eq!(c.fraction, Some(1.0));
        }
        if let Some(p) = c.fraction {
            assert!((0.0..=1.0).contains(&p));
        }
    }
    // k·λ = 1000 exceeds the cap; recorded in place
    let last = d.cells.last().unwrap();
    assert_eq!((last.k, last.lambda), (1e4, 1e-1));
    assert!(last.fraction.is_none() && last.error.as_deref().unwrap().contains("overflow"));
    let again = SweepEngine::serial()
        .real_fraction_phase_diagram(&grid)
        .unwrap();
    assert_eq!(again.cells, d.cells);
}

#[test]
fn localized_cells_are_unbroken_and_delocalized_ones_break() {
    let engine = SweepEngine::serial();
    let localized = engine
        .spectrum(&ResonanceParams::new(1, 399, 10.0, 1e-8, 0.001))
        .unwrap();
    let part = ptqkr::spectrum::classify_real(&localized, DEFAULT_TOL_REAL);
    assert_eq!(part.fraction, 1.0);
    let delocalized = engine
        .spectrum(&ResonanceParams::new(1, 399, 1e4, 1e-6, 0.001))
        .unwrap();
    assert!(ptqkr::spectrum::classify_real(&delocalized, DEFAULT_TOL_REAL).fraction < 1.0);
}

#[test]
fn pooled_statistics_need_enough_levels() {
    let engine = SweepEngine::serial();
    let spectra = engine
        .ensemble(
            &ResonanceParams::new(1, 61, 300.0, 1e-2, 0.001),
            EnsemblePolicy::KWindow {
                half_width: 3.0,
                step: 1.0,
            },
        )
        .unwrap();
    let s = pooled_spacings(&spectra, QeSubset::All, DEFAULT_TOL_REAL).unwrap();
    assert!((s.mean() - 1.0).abs() < 1e-12);
    assert_eq!(s.len(), 7 * 61);
    let r = pooled_ratios(&spectra, QeSubset::All, DEFAULT_TOL_REAL).unwrap();
    assert_eq!(r.per_spectrum.len(), 7);
    assert!(r.stderr > 0.0);
    // unitary spectra have no complex quasi-energies
    let unitary = engine
        .ensemble(
            &ResonanceParams::new(1, 61, 300.0, 0.0, 0.0),
            EnsemblePolicy::Fixed,
        )
        .unwrap();
    assert!(matches!(
        pooled_spacings(&unitary, QeSubset::Complex, DEFAULT_TOL_REAL),
        Err(Error::TooFewPoints { .. })
    ));
}

#[test]
fn transition_curve_rises_with_lambda() {
    let engine = SweepEngine::new(2, None, DEFAULT_TOL_REAL).unwrap();
    let template = ResonanceParams::new(1, 61, 400.0, 0.0, 0.001);
    let curve = engine
        .r_transition_curve(
            &[1e-8, 1e-2],
            &template,
            EnsemblePolicy::KWindow {
                half_width: 5.0,
                step: 1.0,
            },
            QeSubset::All,
            0.6425,
        )
        .unwrap();
    assert_eq!(curve.points.len(), 2);
    assert!(curve.points[1].r_mean > curve.points[0].r_mean);
    if let Some(l0) = curve.lambda_0 {
        assert!((1e-8..=1e-2).contains(&l0));
    }
    assert!(engine
        .r_transition_curve(
            &[1e-2, 1e-3],
            &template,
            EnsemblePolicy::Fixed,
            QeSubset::All,
            0.6425
        )
        .is_err());
}
