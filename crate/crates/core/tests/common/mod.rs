//! Independent oracles shared by the integration and acceptance tests.
//! Nothing here calls the ranking or knapsack code under test.
#![allow(dead_code)]

use hrbound::hazard_models::{zipf_rates, IrtDistribution, IrtFamily};
use hrbound::traffic_gen::{Catalog, RequestTrace, TrafficSpec};

/// Hazard label of an IRT law: constant, decreasing or increasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    Constant,
    Decreasing,
    Increasing,
}

/// The six renewal families used throughout, at mean rate 1.
pub fn families() -> Vec<(&'static str, IrtFamily, Trend)> {
    vec![
        ("exponential", IrtFamily::Exponential, Trend::Constant),
        ("gpd", IrtFamily::GeneralizedPareto { shape: 0.48 }, Trend::Decreasing),
        ("uniform", IrtFamily::Uniform, Trend::Increasing),
        ("hyperexponential", IrtFamily::Hyperexponential { scv: 2.0 }, Trend::Decreasing),
        ("gamma", IrtFamily::Gamma { shape: 0.5 }, Trend::Decreasing),
        ("erlang", IrtFamily::Erlang { shape: 2 }, Trend::Increasing),
    ]
}

pub fn zipf_catalog(family: IrtFamily, n: usize) -> Catalog {
    let rates = zipf_rates(n, 0.8, 1.0).unwrap();
    let d = rates
        .as_slice()
        .iter()
        .map(|&r| IrtDistribution::from_rate(family, r).unwrap())
        .collect();
    Catalog::unit(TrafficSpec::Renewal(d)).unwrap()
}

/// Central difference of the survival function over the survival.
pub fn fd_hazard(d: &IrtDistribution, t: f64, eps: f64) -> f64 {
    let s = d.survival(t).unwrap();
    (d.survival(t - eps).unwrap() - d.survival(t + eps).unwrap()) / (2.0 * eps * s)
}

/// Renewal hazards recomputed from scratch: age since last request (or the
/// trace origin), then a full sort with ties to the lower id.
pub fn naive_top_b_hits(trace: &RequestTrace, dists: &[IrtDistribution], b: usize, skip: usize) -> Vec<bool> {
    let n = dists.len();
    let mut last = vec![trace.origin; n];
    let mut out = Vec::new();
    for (k, e) in trace.events.iter().enumerate() {
        if k >= skip {
            let mut keyed: Vec<(f64, usize)> = (0..n)
                .map(|i| {
                    let h = dists[i].hazard_rate(e.time - last[i]).unwrap_or(f64::INFINITY);
                    (h.min(1e15), i)
                })
                .collect();
            keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            out.push(keyed[..b].iter().any(|&(_, i)| i == e.object));
        }
        last[e.object] = e.time;
    }
    out
}

/// Optimal vertex of the fractional knapsack by enumeration: every subset
/// taken whole plus at most one further item taken partly.
pub fn lp_vertex_optimum(values: &[f64], sizes: &[f64], cap: f64) -> (f64, Vec<f64>) {
    let n = values.len();
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for mask in 0u32..(1 << n) {
        let used: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| sizes[i]).sum();
        if used > cap + 1e-12 {
            continue;
        }
        let base: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| values[i]).sum();
        let mut x: Vec<f64> = (0..n).map(|i| (mask >> i & 1) as f64).collect();
        if base > best.0 + 1e-12 {
            best = (base, x.clone());
        }
        for j in (0..n).filter(|&j| mask >> j & 1 == 0) {
            let f = ((cap - used) / sizes[j]).min(1.0);
            x[j] = f;
            let v = base + f * values[j];
            if v > best.0 + 1e-12 {
                best = (v, x.clone());
            }
            x[j] = 0.0;
        }
    }
    best
}
