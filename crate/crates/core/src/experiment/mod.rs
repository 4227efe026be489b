//! Config-driven experiments: build a catalog, generate or load traces,
//! score bounds and policies over cache-size sweeps with paired
//! replications, and write result and summary CSVs.

mod config;
mod real_trace;
mod results;

pub use config::{ExperimentConfig, ExperimentSection, Method, SizesSection, TrafficSection};
pub use real_trace::{fit_real_trace, FitStatus, DUPLICATE_GAP, ObjectFit, RealTraceFit};
pub use results::{
    load_results_csv, mean_of, render_summary, summarize, write_plot_csv, write_results_csv, write_summary_csv,
    ResultRow, SummaryRow, Verdict,
};

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::analytic::{mmpp_hr, onoff_hr_recursive, poisson_hr};
use crate::bounds::{belady_score, score_hazard_rules, BoundScore, RuleSweeps};
use crate::hazard_models::{zipf_rates, IrtDistribution, IrtFamily, RateVector};
use crate::policies::{simulate_policy, PolicySpec};
use crate::traffic_gen::{
    derive_seed, domain, generate, generate_requests, sample_sizes_bounded_pareto, substream, Catalog, Modulation,
    MmppParams, OnOffParams, RequestTrace, SnmParams, TrafficSpec,
};
use crate::{Error, Result};

/// Seed of replication `rep` under a master seed.
pub fn replication_seed(master: u64, rep: usize) -> u64 {
    derive_seed(master, domain::REPLICATION, rep as u64)
}

/// The catalog an experiment runs on, shared by all its replications.
#[derive(Clone, Debug)]
pub struct Setup {
    pub catalog: Catalog,
    pub model: String,
    /// Fixed trace for recorded-trace experiments.
    pub trace: Option<RequestTrace>,
}

fn renewal_family(family: &str, shape: Option<f64>, scv: Option<f64>) -> Result<IrtFamily> {
    Ok(match family {
        "exponential" => IrtFamily::Exponential,
        "gpd" => IrtFamily::GeneralizedPareto {
            shape: shape.unwrap_or(0.48),
        },
        "uniform" => IrtFamily::Uniform,
        "hyperexponential" => IrtFamily::Hyperexponential {
            scv: scv.unwrap_or(2.0),
        },
        "gamma" => IrtFamily::Gamma {
            shape: shape.unwrap_or(0.5),
        },
        "erlang" => {
            let k = shape.unwrap_or(2.0);
            if k < 1.0 || k.fract() != 0.0 || k > u32::MAX as f64 {
                return Err(Error::Config(format!("traffic.shape: Erlang shape must be a positive integer, got {k}")));
            }
            IrtFamily::Erlang { shape: k as u32 }
        }
        other => return Err(Error::Config(format!("traffic.family: unknown family {other:?}"))),
    })
}

/// Pareto request volumes `V = V_min U^(-1/shape)` with the given mean.
fn pareto_volumes(n: usize, mean: f64, shape: f64, seed: u64) -> Result<Vec<f64>> {
    if !(shape > 1.0 && mean > 0.0) {
        return Err(Error::Config("traffic: volume_shape must be > 1 and volume_mean > 0".into()));
    }
    let v_min = mean * (shape - 1.0) / shape;
    let mut rng = substream(seed, domain::VOLUME, 0);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>();
            v_min * (1.0 - u).powf(-1.0 / shape)
        })
        .collect())
}

/// Builds the catalog (and, for recorded traces, the fitted trace).
pub fn build_setup(cfg: &ExperimentConfig) -> Result<Setup> {
    let seed = cfg.experiment.seed;
    let (traffic, model, trace, trace_sizes) = match &cfg.traffic {
        TrafficSection::Renewal {
            n,
            family,
            shape,
            scv,
            zipf_exponent,
            total_rate,
        } => {
            let fam = renewal_family(family, *shape, *scv)?;
            let rates = zipf_rates(*n, *zipf_exponent, *total_rate)?;
            let dists = rates
                .as_slice()
                .iter()
                .map(|&r| IrtDistribution::from_rate(fam, r))
                .collect::<Result<Vec<_>>>()?;
            (Some(TrafficSpec::Renewal(dists)), format!("renewal-{family}"), None, None)
        }
        TrafficSection::Onoff {
            n,
            t_on,
            t_off,
            volume_mean,
            volume_shape,
        } => {
            let on_rate = pareto_volumes(*n, *volume_mean, *volume_shape, seed)?
                .into_iter()
                .map(|v| v / t_on)
                .collect();
            let p = OnOffParams::with_periods(*t_on, *t_off, on_rate)?;
            (Some(TrafficSpec::OnOff(p)), "onoff".into(), None, None)
        }
        TrafficSection::Mmpp {
            n,
            alpha,
            beta,
            zipf_exponent,
            total_rate,
        } => {
            let r1 = zipf_rates(*n, *zipf_exponent, *total_rate)?.into_vec();
            let r2 = r1.iter().rev().copied().collect();
            let p = MmppParams::two_state(*alpha, *beta, r1, r2)?;
            (Some(TrafficSpec::Mmpp(p)), "mmpp".into(), None, None)
        }
        TrafficSection::Snm { n } => {
            let p = SnmParams::measured_mix(*n)?;
            (Some(TrafficSpec::Snm(p)), "snm".into(), None, None)
        }
        TrafficSection::Trace { path, min_requests } => {
            let fit = fit_real_trace(path, *min_requests)?;
            let sizes = fit.catalog.sizes().to_vec();
            (fit.catalog.traffic().cloned(), "trace".into(), Some(fit.trace), Some(sizes))
        }
    };
    let n = traffic.as_ref().map_or(0, TrafficSpec::n);
    let sizes = match &cfg.sizes {
        SizesSection::Unit => vec![1.0; n],
        SizesSection::BoundedPareto { shape, min, max } => sample_sizes_bounded_pareto(n, *shape, *min, *max, seed)?,
        SizesSection::Trace => trace_sizes.unwrap_or_else(|| vec![1.0; n]),
    };
    if cfg.unit_sizes() {
        if let Some(&b) = cfg.experiment.cache_sizes.iter().find(|&&b| b > n as f64) {
            return Err(Error::Config(format!(
                "experiment.cache_sizes: {b} exceeds the {n} objects kept from the trace"
            )));
        }
    }
    Ok(Setup {
        catalog: Catalog::new(sizes, traffic)?,
        model,
        trace,
    })
}

/// The trace of one replication.
pub fn replication_trace(cfg: &ExperimentConfig, setup: &Setup, rep: usize) -> Result<RequestTrace> {
    if let Some(t) = &setup.trace {
        let mut t = t.clone();
        if let Some(k) = cfg.experiment.requests {
            t.truncate_requests(k);
        }
        return Ok(t);
    }
    let seed = replication_seed(cfg.experiment.seed, rep);
    match (cfg.experiment.requests, cfg.experiment.horizon) {
        (Some(k), _) => generate_requests(&setup.catalog, k, seed),
        (None, Some(h)) => generate(&setup.catalog, h, seed),
        (None, None) => Err(Error::Config("experiment: one of requests or horizon is required".into())),
    }
}

/// Rates the STATIC policy ranks by: model mean rates, realized shot
/// volumes, or empirical counts for recorded traces.
fn static_rates(setup: &Setup, trace: &RequestTrace) -> Vec<f64> {
    let n = setup.catalog.n();
    if setup.trace.is_some() {
        return trace.counts(n).into_iter().map(|c| c as f64).collect();
    }
    match (&trace.modulation, setup.catalog.traffic()) {
        (Some(Modulation::Shots { volume, .. }), _) => volume.clone(),
        (_, Some(t)) => t.mean_rates(),
        _ => trace.counts(n).into_iter().map(|c| c as f64).collect(),
    }
}

fn analytic_score(catalog: &Catalog, b: usize, scored: usize) -> Result<BoundScore> {
    let res = match catalog.traffic() {
        Some(TrafficSpec::Renewal(d)) => {
            if d.iter().any(|d| !matches!(d, IrtDistribution::Exponential { .. })) {
                return Err(Error::Config("ANALYTIC needs exponential renewal traffic".into()));
            }
            let rates = d.iter().map(|d| d.rate()).collect::<Result<Vec<_>>>()?;
            poisson_hr(&RateVector::new(rates)?, b)
        }
        Some(TrafficSpec::OnOff(p)) => onoff_hr_recursive(p, b),
        Some(TrafficSpec::Mmpp(p)) => mmpp_hr(p, b),
        _ => return Err(Error::Config("ANALYTIC has no closed form for this traffic".into())),
    };
    let h = res.hit_probability;
    Ok(BoundScore {
        requests: scored,
        expected_hits: h * scored as f64,
        hit_probability: h,
        bytes_requested: scored as f64,
        expected_bytes_hit: h * scored as f64,
        byte_hit_probability: h,
    })
}

fn policy_spec(m: Method, rates: &[f64]) -> PolicySpec {
    match m {
        Method::Lru => PolicySpec::Lru,
        Method::Fifo => PolicySpec::Fifo,
        Method::Random => PolicySpec::Random,
        Method::Static => PolicySpec::Static { rates: rates.to_vec() },
        Method::Lfu => PolicySpec::Lfu,
        Method::Gdsf => PolicySpec::Gdsf,
        _ => unreachable!("not a policy"),
    }
}

/// Scores every configured method on one replication's trace.
pub fn run_replication(cfg: &ExperimentConfig, setup: &Setup, rep: usize) -> Result<Vec<ResultRow>> {
    let e = &cfg.experiment;
    let methods = cfg.methods()?;
    let seed = replication_seed(e.seed, rep);
    let trace = replication_trace(cfg, setup, rep)?;
    if trace.is_empty() {
        return Err(Error::arg(format!("replication {rep} produced no requests")));
    }
    let catalog = &setup.catalog;
    let sizes_b = &e.cache_sizes;
    let timed = |f: &dyn Fn() -> Result<Vec<BoundScore>>| -> Result<(Vec<BoundScore>, u64)> {
        let t0 = Instant::now();
        let s = f()?;
        let ms = if e.timing { t0.elapsed().as_millis() as u64 } else { 0 };
        Ok((s, ms))
    };

    let mut cells: Vec<(Method, usize, BoundScore, u64)> = Vec::new();
    let has = |m| methods.contains(&m);
    if has(Method::HrE) || has(Method::HrVb) || has(Method::HrVc) {
        let sweeps = RuleSweeps {
            equal: if has(Method::HrE) { sizes_b.iter().map(|&b| b as usize).collect() } else { vec![] },
            byte: if has(Method::HrVb) { sizes_b.clone() } else { vec![] },
            object: if has(Method::HrVc) { sizes_b.clone() } else { vec![] },
        };
        let t0 = Instant::now();
        let (eq, by, ob) = score_hazard_rules(&trace, catalog, &sweeps, e.warmup)?;
        let ms = if e.timing { t0.elapsed().as_millis() as u64 } else { 0 };
        for (m, scores) in [(Method::HrE, eq), (Method::HrVb, by), (Method::HrVc, ob)] {
            for (bi, s) in scores.into_iter().enumerate() {
                cells.push((m, bi, s, ms));
            }
        }
    }
    let scored = trace.len() - crate::bounds::warmup_count(trace.len(), e.warmup);
    if has(Method::Belady) {
        let (s, ms) = timed(&|| {
            sizes_b
                .iter()
                .map(|&b| belady_score(&trace, catalog, b as usize, e.warmup))
                .collect()
        })?;
        cells.extend(s.into_iter().enumerate().map(|(bi, s)| (Method::Belady, bi, s, ms)));
    }
    if has(Method::Analytic) {
        let (s, ms) = timed(&|| {
            sizes_b
                .iter()
                .map(|&b| analytic_score(catalog, b as usize, scored))
                .collect()
        })?;
        cells.extend(s.into_iter().enumerate().map(|(bi, s)| (Method::Analytic, bi, s, ms)));
    }
    let rates = static_rates(setup, &trace);
    let policy_cells: Vec<(Method, usize)> = methods
        .iter()
        .filter(|m| m.is_policy())
        .flat_map(|&m| (0..sizes_b.len()).map(move |bi| (m, bi)))
        .collect();
    let simulated = policy_cells
        .par_iter()
        .map(|&(m, bi)| {
            let t0 = Instant::now();
            let pseed = derive_seed(seed, domain::POLICY, ((m as u64) << 32) | bi as u64);
            let s = simulate_policy(&trace, catalog, policy_spec(m, &rates), sizes_b[bi], pseed, e.warmup)?;
            let ms = if e.timing { t0.elapsed().as_millis() as u64 } else { 0 };
            Ok((m, bi, s, ms))
        })
        .collect::<Result<Vec<_>>>()?;
    cells.extend(simulated);

    Ok(cells
        .into_iter()
        .map(|(m, bi, s, ms)| ResultRow {
            experiment: e.id.clone(),
            model: setup.model.clone(),
            n: catalog.n(),
            b: sizes_b[bi],
            method: m.name().to_string(),
            rep,
            hit_prob: s.hit_probability,
            byte_hit_prob: s.byte_hit_probability,
            expected_hits: s.expected_hits,
            k: s.requests,
            seed,
            wall_ms: ms,
        })
        .collect())
}

/// Runs all replications (concurrently) and returns rows sorted by cache
/// size, method and replication.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let setup = build_setup(cfg)?;
    run_with_setup(cfg, &setup)
}

pub fn run_with_setup(cfg: &ExperimentConfig, setup: &Setup) -> Result<Vec<ResultRow>> {
    let per_rep = (0..cfg.experiment.replications)
        .into_par_iter()
        .map(|rep| run_replication(cfg, setup, rep))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ResultRow> = per_rep.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.b.total_cmp(&b.b)
            .then(Method::parse(&a.method).cmp(&Method::parse(&b.method)))
            .then(a.rep.cmp(&b.rep))
    });
    Ok(rows)
}

/// Writes `results.csv`, `summary.csv`, `summary.txt` and `plot.csv` into `dir`.
pub fn write_outputs(rows: &[ResultRow], dir: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_results_csv(rows, dir.join("results.csv"))?;
    let summary = summarize(rows);
    write_summary_csv(&summary, dir.join("summary.csv"))?;
    write_plot_csv(&summary, dir.join("plot.csv"))?;
    std::fs::write(dir.join("summary.txt"), render_summary(&summary))?;
    Ok(summary)
}
