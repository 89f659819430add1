//! The replication engine: build a fresh dataset per replication, compute
//! the reference evidence, draw one shared set of posterior samples, and run
//! every requested estimator on those same samples.
//!
//! Determinism contract: each (replication, purpose) pair owns RNG stream
//! `rep * 16 + purpose` of the experiment seed — data 0, posterior draws 1,
//! reference oracle 2, estimators 3..=8 in canonical order. Replications run
//! under rayon, results are sorted afterwards, so output is byte-identical
//! regardless of thread count.
//!
//! An estimator that fails numerically yields a `converged = false` row —
//! bridge non-convergence records its last iterate as the estimate, other
//! failures record NaN — while failures in data generation, sampling, or
//! the reference value abort the run (exit code 2).

use rayon::prelude::*;

use evidence_core::baselines::{
    bridge_sampling, came, harmonic_mean, BridgeConfig, CameConfig,
};
use evidence_core::graph::DecomposableGraph;
use evidence_core::hybrid::{
    hybrid_log_ml, interpolation_bound_report, HybridConfig, RepresentativeRule,
};
use evidence_core::linalg::DenseMatrix;
use evidence_core::models::{
    ConjugateNormal, HiwGraphical, IwCovariance, MeanFieldMvnIg, Model, MvnIg, TruncatedMvn,
};
use evidence_core::partition::LabeledSample;
use evidence_core::rng::RngStream;
use evidence_core::Error as CoreError;

use crate::config::{ExperimentConfig, ModelSettings};
use crate::registry::{estimator_index, model_defaults, purpose};
use crate::{BenchError, Result};

/// One CSV row: a single estimator on a single replication.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub model: String,
    pub rep: usize,
    pub estimator: String,
    pub estimate: f64,
    pub truth: f64,
    /// truth − estimate; NaN when the estimator failed outright.
    pub error: f64,
    pub converged: bool,
    pub n_mcmc: usize,
    pub n_obs: usize,
    pub seed: u64,
    /// Milliseconds spent in the estimator; 0 unless timing was requested.
    pub wall_ms: u64,
    /// Standard error of the reference value when it is itself Monte Carlo.
    pub truth_se: Option<f64>,
}

/// Fully resolved per-model settings (config over registry defaults).
#[derive(Clone, Debug)]
struct Resolved {
    n_obs: usize,
    n_mcmc: usize,
    dim: usize,
    delta: f64,
    block: usize,
    graph: Option<DecomposableGraph>,
}

fn resolve(name: &str, settings: Option<&ModelSettings>) -> Result<Resolved> {
    let defaults = model_defaults(name)
        .ok_or_else(|| BenchError::Config(format!("unknown model {name:?}")))?;
    let empty = ModelSettings::default();
    let s = settings.unwrap_or(&empty);
    if s.dim.is_some() && defaults.dim.is_none() {
        return Err(BenchError::Config(format!(
            "model {name:?} has a fixed dimension; remove the dim key"
        )));
    }
    let graph = match (name, &s.graph) {
        ("hiw_graphical", Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                BenchError::Config(format!("cannot read graph file {path:?}: {e}"))
            })?;
            Some(
                DecomposableGraph::from_edge_list_str(&text)
                    .map_err(|e| BenchError::Config(format!("graph file {path:?}: {e}")))?,
            )
        }
        ("hiw_graphical", None) => Some(DecomposableGraph::default_benchmark()),
        (_, Some(_)) => {
            return Err(BenchError::Config(format!(
                "model {name:?} does not take a graph key"
            )))
        }
        _ => None,
    };
    Ok(Resolved {
        n_obs: s.n_obs.unwrap_or(defaults.n_obs),
        n_mcmc: s.n_mcmc.unwrap_or(defaults.n_mcmc),
        dim: s.dim.or(defaults.dim).unwrap_or(0),
        delta: s.delta.unwrap_or(3.0),
        block: s.block.unwrap_or(3),
        graph,
    })
}

fn build_model(name: &str, r: &Resolved, rng: &mut RngStream) -> Result<Box<dyn Model>> {
    match name {
        "conjugate_normal" => {
            let data = ConjugateNormal::generate_data(rng, r.n_obs);
            Ok(Box::new(ConjugateNormal::new(&data)?))
        }
        "mvn_ig" => {
            let (x, y) = MvnIg::generate_data(rng, r.n_obs, r.dim);
            Ok(Box::new(MvnIg::new(x, y)?))
        }
        "mvn_ig_meanfield" => {
            let (x, y) = MvnIg::generate_data(rng, r.n_obs, r.dim);
            let base = MvnIg::new(x, y)?;
            Ok(Box::new(MeanFieldMvnIg::new(base, r.block)?))
        }
        "truncated_mvn" => {
            let (x, y) = TruncatedMvn::generate_data(rng, r.n_obs, r.dim);
            Ok(Box::new(TruncatedMvn::new(x, y)?))
        }
        "iw_covariance" => {
            let cov = IwCovariance::default_true_covariance();
            let data = IwCovariance::generate_data(rng, r.n_obs, &cov)?;
            Ok(Box::new(IwCovariance::new(&data)?))
        }
        "hiw_graphical" => {
            let graph = r.graph.clone().expect("resolved above");
            let data = HiwGraphical::generate_data(rng, &graph, r.n_obs)?;
            let d = graph.dim();
            Ok(Box::new(HiwGraphical::new(
                graph,
                r.delta,
                &DenseMatrix::identity(d),
                &data,
            )?))
        }
        other => Err(BenchError::Config(format!("unknown model {other:?}"))),
    }
}

/// The outcome of one estimator invocation.
struct EstimateOutcome {
    estimate: f64,
    converged: bool,
}

fn invoke_estimator(
    estimator: &str,
    model: &dyn Model,
    labeled: &[LabeledSample],
    log_liks: &[f64],
    rng: &mut RngStream,
    context: &str,
) -> EstimateOutcome {
    let log_q = |u: &[f64]| -model.psi(u);
    let outcome = match estimator {
        "hybrid" => hybrid_log_ml(labeled, &HybridConfig::default(), None)
            .map(|est| est.log_ml),
        "hybrid_leafmean" => {
            let cfg = HybridConfig {
                representative: RepresentativeRule::LeafMean,
                ..HybridConfig::default()
            };
            hybrid_log_ml(labeled, &cfg, None).map(|est| est.log_ml)
        }
        "hme" => harmonic_mean(log_liks),
        "came" => {
            let cfg = CameConfig::default();
            came(rng, labeled, &model.support(), log_q, &cfg).map(|out| {
                if out.low_ess {
                    eprintln!(
                        "warning: {context}: importance effective sample size {:.1} is low",
                        out.ess
                    );
                }
                out.log_ml
            })
        }
        "bse" | "wbse" => {
            let cfg = BridgeConfig {
                warp: estimator == "wbse",
                ..BridgeConfig::default()
            };
            match bridge_sampling(rng, labeled, log_q, &cfg) {
                Ok(out) => Ok(out.log_ml),
                Err(CoreError::BridgeNonConvergence { last_estimate, .. }) => {
                    return EstimateOutcome {
                        estimate: last_estimate,
                        converged: false,
                    }
                }
                Err(e) => Err(e),
            }
        }
        other => unreachable!("estimator {other} validated at configuration time"),
    };
    match outcome {
        Ok(estimate) => EstimateOutcome {
            estimate,
            converged: estimate.is_finite(),
        },
        Err(e) => {
            eprintln!("warning: {context}: {estimator} failed: {e}");
            EstimateOutcome {
                estimate: f64::NAN,
                converged: false,
            }
        }
    }
}

fn run_rep(
    model_name: &str,
    resolved: &Resolved,
    estimators: &[String],
    seed: u64,
    rep: usize,
    timing: bool,
) -> Result<Vec<RunRecord>> {
    let base = (rep as u64) * 16;
    let mut data_rng = RngStream::new(seed, base + purpose::DATA);
    let model = build_model(model_name, resolved, &mut data_rng)?;

    let mut oracle_rng = RngStream::new(seed, base + purpose::ORACLE);
    let truth = model.truth(&mut oracle_rng)?;

    let mut posterior_rng = RngStream::new(seed, base + purpose::POSTERIOR);
    let samples = model.sample_posterior(&mut posterior_rng, resolved.n_mcmc)?;

    let labeled: Vec<LabeledSample> = samples
        .iter()
        .map(|u| LabeledSample {
            point: u.clone(),
            psi: model.psi(u),
        })
        .collect();
    let log_liks: Vec<f64> = samples.iter().map(|u| model.log_likelihood(u)).collect();

    let mut records = Vec::with_capacity(estimators.len());
    for est in estimators {
        let idx = estimator_index(est).expect("validated at configuration time") as u64;
        let mut est_rng = RngStream::new(seed, base + purpose::ESTIMATOR_BASE + idx);
        let context = format!("{model_name} rep {rep}");
        let started = std::time::Instant::now();
        let outcome = invoke_estimator(
            est,
            model.as_ref(),
            &labeled,
            &log_liks,
            &mut est_rng,
            &context,
        );
        let wall_ms = if timing {
            started.elapsed().as_millis() as u64
        } else {
            0
        };
        records.push(RunRecord {
            model: model_name.to_string(),
            rep,
            estimator: est.clone(),
            estimate: outcome.estimate,
            truth: truth.log_z,
            error: truth.log_z - outcome.estimate,
            converged: outcome.converged,
            n_mcmc: resolved.n_mcmc,
            n_obs: resolved.n_obs,
            seed,
            wall_ms,
            truth_se: truth.se,
        });
    }
    Ok(records)
}

/// Runs the whole experiment; rows come back sorted by model (in config
/// order), then replication, then canonical estimator order.
pub fn run_experiment(cfg: &ExperimentConfig, timing: bool) -> Result<Vec<RunRecord>> {
    let mut all = Vec::new();
    for model_name in &cfg.models {
        let resolved = resolve(model_name, cfg.model_settings.get(model_name))?;
        let mut rows: Vec<(usize, Vec<RunRecord>)> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                run_rep(model_name, &resolved, &cfg.estimators, cfg.seed, rep, timing)
                    .map(|r| (rep, r))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.sort_by_key(|(rep, _)| *rep);
        for (_, mut r) in rows {
            all.append(&mut r);
        }
    }
    Ok(all)
}

/// Runs one replication of `model_name` (registry defaults overlaid with
/// `settings`), fits the hybrid estimator on the usual draw budget, holds a
/// second batch of the same size out, and renders the interpolation
/// diagnostic preceded by the reference evidence.
pub fn diagnostic_report(
    model_name: &str,
    settings: Option<&ModelSettings>,
    seed: u64,
) -> Result<String> {
    let resolved = resolve(model_name, settings)?;
    let mut data_rng = RngStream::new(seed, purpose::DATA);
    let model = build_model(model_name, &resolved, &mut data_rng)?;
    let mut oracle_rng = RngStream::new(seed, purpose::ORACLE);
    let truth = model.truth(&mut oracle_rng)?;
    let mut posterior_rng = RngStream::new(seed, purpose::POSTERIOR);
    let draws = model.sample_posterior(&mut posterior_rng, 2 * resolved.n_mcmc)?;
    let label = |u: &Vec<f64>| LabeledSample {
        point: u.clone(),
        psi: model.psi(u),
    };
    let fit: Vec<LabeledSample> = draws[..resolved.n_mcmc].iter().map(label).collect();
    let held_out: Vec<LabeledSample> = draws[resolved.n_mcmc..].iter().map(label).collect();
    let estimate = hybrid_log_ml(&fit, &HybridConfig::default(), Some(&held_out))?;

    let mut out = String::new();
    out.push_str(&format!(
        "model: {model_name} (n_obs = {}, J = {}, seed = {seed})\n",
        resolved.n_obs, resolved.n_mcmc
    ));
    match truth.se {
        Some(se) => out.push_str(&format!(
            "reference log evidence: {:.6} (Monte Carlo, se {:.4})\n",
            truth.log_z, se
        )),
        None => out.push_str(&format!("reference log evidence: {:.6}\n", truth.log_z)),
    }
    out.push_str(&interpolation_bound_report(&estimate));
    Ok(out)
}
