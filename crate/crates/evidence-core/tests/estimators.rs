//! End-to-end runs of every estimator through the crate's public surface:
//! build a benchmark model, draw exact posterior samples, estimate the log
//! evidence, and compare against the closed-form truth. Complements the unit
//! tests (which pin individual formulas) by exercising the full pipeline the
//! way a downstream harness does, plus structural invariances of the hybrid
//! estimator that only make sense across module boundaries.

use evidence_core::baselines::{bridge_sampling, came, harmonic_mean, BridgeConfig, CameConfig};
use evidence_core::hybrid::{hybrid_log_ml, HybridConfig};
use evidence_core::logmath::log_sum_exp;
use evidence_core::models::{ConjugateNormal, Model, MvnIg};
use evidence_core::partition::LabeledSample;
use evidence_core::rng::RngStream;
use rand::RngCore;

/// Posterior draws labeled with their negative log posterior values.
fn labeled(model: &dyn Model, rng: &mut RngStream, count: usize) -> Vec<LabeledSample> {
    model
        .sample_posterior(rng, count)
        .expect("posterior sampling succeeds")
        .into_iter()
        .map(|point| {
            let psi = model.psi(&point);
            LabeledSample { point, psi }
        })
        .collect()
}

fn conjugate_fixture(seed: u64) -> ConjugateNormal {
    let mut rng = RngStream::new(seed, 0);
    ConjugateNormal::new(&ConjugateNormal::generate_data(&mut rng, 50)).unwrap()
}

fn regression_fixture(seed: u64, n: usize, p: usize) -> MvnIg {
    let mut rng = RngStream::new(seed, 0);
    let (x, y) = MvnIg::generate_data(&mut rng, n, p);
    MvnIg::new(x, y).unwrap()
}

/// Uniform in [0, 1) from the top 53 bits of the stream.
fn unif(rng: &mut RngStream) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Synthetic quadratic-bowl samples on [−2, 2]²; the closed integrand keeps
/// everything deterministic and cheap.
fn synthetic_samples(seed: u64, count: usize) -> Vec<LabeledSample> {
    let mut rng = RngStream::new(seed, 0);
    (0..count)
        .map(|_| {
            let x = [4.0 * unif(&mut rng) - 2.0, 4.0 * unif(&mut rng) - 2.0];
            let psi = 2.0 + 0.7 * x[0] * x[0] + 1.3 * x[1] * x[1] - 0.4 * x[0] * x[1];
            LabeledSample {
                point: x.to_vec(),
                psi,
            }
        })
        .collect()
}

#[test]
fn hybrid_tracks_truth_where_harmonic_mean_collapses() {
    let model = conjugate_fixture(501);
    let truth = model.truth(&mut RngStream::new(501, 2)).unwrap().log_z;
    let samples = labeled(&model, &mut RngStream::new(501, 1), 1000);

    let hybrid = hybrid_log_ml(&samples, &HybridConfig::default(), None).unwrap();
    assert!(
        (truth - hybrid.log_ml).abs() <= 0.5,
        "hybrid error {} exceeds 0.5",
        truth - hybrid.log_ml
    );

    let log_liks: Vec<f64> = samples
        .iter()
        .map(|s| model.log_likelihood(&s.point))
        .collect();
    let hme = harmonic_mean(&log_liks).unwrap();
    // The harmonic mean famously overshoots the evidence by many nats.
    assert!(
        truth - hme < -3.0,
        "harmonic mean error {} is not the expected gross overestimate",
        truth - hme
    );
}

#[test]
fn bridge_sampling_is_sharp_with_plentiful_draws() {
    let model = regression_fixture(502, 60, 3);
    let truth = model.truth(&mut RngStream::new(502, 2)).unwrap().log_z;
    let samples = labeled(&model, &mut RngStream::new(502, 1), 1000);

    let out = bridge_sampling(
        &mut RngStream::new(502, 3),
        &samples,
        |u| -model.psi(u),
        &BridgeConfig::default(),
    )
    .unwrap();
    assert!(
        (truth - out.log_ml).abs() <= 0.2,
        "bridge error {} exceeds 0.2",
        truth - out.log_ml
    );
    assert!(out.iterations >= 1 && out.iterations <= 500);

    // The warp variant symmetrizes the target; on an already nearly Gaussian
    // posterior it must land essentially in the same place.
    let warp = bridge_sampling(
        &mut RngStream::new(502, 4),
        &samples,
        |u| -model.psi(u),
        &BridgeConfig {
            warp: true,
            ..BridgeConfig::default()
        },
    )
    .unwrap();
    assert!(
        (out.log_ml - warp.log_ml).abs() <= 0.2,
        "plain and warp bridge disagree: {} vs {}",
        out.log_ml,
        warp.log_ml
    );
}

#[test]
fn corrected_arithmetic_mean_reports_its_correction() {
    let model = conjugate_fixture(503);
    let truth = model.truth(&mut RngStream::new(503, 2)).unwrap().log_z;
    let samples = labeled(&model, &mut RngStream::new(503, 1), 1000);

    let out = came(
        &mut RngStream::new(503, 3),
        &samples,
        &model.support(),
        |u| -model.psi(u),
        &CameConfig::default(),
    )
    .unwrap();
    assert!(
        (truth - out.log_ml).abs() <= 0.5,
        "came error {} exceeds 0.5",
        truth - out.log_ml
    );
    // The 0.5%-per-side quantile box keeps nearly all posterior draws.
    assert!(out.box_posterior_fraction > 0.9 && out.box_posterior_fraction <= 1.0);
    assert!(out.support_acceptance > 0.0 && out.support_acceptance <= 1.0);
    assert!(out.inside_importance_count > 0);
    assert!(out.ess > CameConfig::default().ess_warn_threshold);
    assert!(!out.low_ess);
}

#[test]
fn hybrid_scaling_equivariance_is_exact_for_power_of_two_scales() {
    // Doubling every coordinate is exact in floating point: thresholds,
    // memberships, and representatives are preserved bit for bit, so the
    // estimate must shift by exactly the log volume factor 2·ln 2.
    let base = synthetic_samples(504, 500);
    let scaled: Vec<LabeledSample> = base
        .iter()
        .map(|s| LabeledSample {
            point: s.point.iter().map(|&v| 2.0 * v).collect(),
            psi: s.psi,
        })
        .collect();
    let cfg = HybridConfig::default();
    let a = hybrid_log_ml(&base, &cfg, None).unwrap();
    let b = hybrid_log_ml(&scaled, &cfg, None).unwrap();
    let expected = 2.0 * std::f64::consts::LN_2;
    assert!(
        ((b.log_ml - a.log_ml) - expected).abs() <= 1e-12,
        "scaling shifted the estimate by {} instead of {}",
        b.log_ml - a.log_ml,
        expected
    );
    assert_eq!(a.cells.len(), b.cells.len());
}

#[test]
fn hybrid_translation_invariance() {
    let base = synthetic_samples(505, 500);
    let moved: Vec<LabeledSample> = base
        .iter()
        .map(|s| LabeledSample {
            point: s.point.iter().map(|&v| v + 0.5).collect(),
            psi: s.psi,
        })
        .collect();
    let cfg = HybridConfig::default();
    let a = hybrid_log_ml(&base, &cfg, None).unwrap();
    let b = hybrid_log_ml(&moved, &cfg, None).unwrap();
    assert!(
        (a.log_ml - b.log_ml).abs() <= 1e-9,
        "translation moved the estimate from {} to {}",
        a.log_ml,
        b.log_ml
    );
}

#[test]
fn hybrid_estimate_is_internally_consistent() {
    let model = regression_fixture(506, 50, 2);
    let mut rng = RngStream::new(506, 1);
    let fit = labeled(&model, &mut rng, 300);
    let held = labeled(&model, &mut rng, 300);

    let est = hybrid_log_ml(&fit, &HybridConfig::default(), Some(&held)).unwrap();

    // The headline number is exactly the log-sum-exp of the cell masses.
    let masses: Vec<f64> = est.cells.iter().map(|c| c.log_mass).collect();
    assert!((est.log_ml - log_sum_exp(&masses).unwrap()).abs() <= 1e-12);

    // Every fitting draw is accounted for exactly once.
    let member_total: usize = est.cells.iter().map(|c| c.member_count).sum();
    assert_eq!(member_total, fit.len());

    // Held-out diagnostics are populated and sane.
    let d = est.diagnostics.expect("held-out draws produce diagnostics");
    assert_eq!(d.fresh_total, held.len());
    assert!(d.fresh_inside <= d.fresh_total);
    assert!(d.sup_residual.is_finite() && d.sup_residual >= 0.0);
    assert!((0.0..=1.0).contains(&d.outside_fraction));
    assert!(d.coverage_log_penalty >= 0.0);
}
