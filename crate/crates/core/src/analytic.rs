//! Closed-form hit probabilities of the hazard-rate rule for Poisson,
//! on-off and Markov-modulated traffic with equal-size objects.

use crate::hazard_models::special::ln_gamma;
use crate::hazard_models::RateVector;
use crate::traffic_gen::{MmppParams, OnOffParams};
use crate::{Error, Result};

/// Largest catalog for which subsets are enumerated explicitly.
pub const ONOFF_EXACT_MAX_OBJECTS: usize = 25;

const LOG_BINOMIAL_ABOVE: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticResult {
    pub hit_probability: f64,
    /// Hits per unit time.
    pub hit_rate: f64,
}

/// Indices by decreasing rate, ties to the lower index.
fn rank_desc(rates: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rates.len()).collect();
    idx.sort_by(|&a, &b| rates[b].total_cmp(&rates[a]).then(a.cmp(&b)));
    idx
}

/// Poisson traffic: the `b` highest-rate objects are always cached.
pub fn poisson_hr(rates: &RateVector, b: usize) -> AnalyticResult {
    let r = rates.as_slice();
    let top: f64 = rank_desc(r).iter().take(b).map(|&i| r[i]).sum();
    let total = rates.total();
    AnalyticResult {
        hit_probability: if b >= r.len() { 1.0 } else { top / total },
        hit_rate: if b >= r.len() { total } else { top },
    }
}

/// Rates and on-probabilities reordered by decreasing on-rate.
fn onoff_ranked(params: &OnOffParams) -> (Vec<f64>, Vec<f64>) {
    let order = rank_desc(&params.on_rate);
    let lambda = order.iter().map(|&i| params.on_rate[i]).collect();
    let pi = order.iter().map(|&i| params.pi_on(i)).collect();
    (lambda, pi)
}

fn combine(lambda: &[f64], pi: &[f64], per_object: &[f64]) -> AnalyticResult {
    let offered: f64 = lambda.iter().zip(pi).map(|(l, p)| l * p).sum();
    let hit_rate: f64 = lambda
        .iter()
        .zip(pi)
        .zip(per_object)
        .map(|((l, p), h)| l * p * h)
        .sum();
    AnalyticResult {
        hit_probability: hit_rate / offered,
        hit_rate,
    }
}

/// On-off traffic by enumerating the on/off configurations of the more
/// popular objects. Object `i` hits iff fewer than `b` of the objects ranked
/// ahead of it are on.
pub fn onoff_hr_exact(params: &OnOffParams, b: usize) -> Result<AnalyticResult> {
    let n = params.n();
    if n > ONOFF_EXACT_MAX_OBJECTS {
        return Err(Error::TooLarge(format!(
            "exact on-off form enumerates subsets of up to {ONOFF_EXACT_MAX_OBJECTS} objects, got {n}; \
             use the recursive form"
        )));
    }
    let (lambda, pi) = onoff_ranked(params);
    let mut h = vec![0.0; n];

    // depth d: states of objects 0..d fixed, `on` of them on, with probability `prob`
    fn walk(d: usize, on: usize, prob: f64, b: usize, pi: &[f64], h: &mut [f64]) {
        if d == h.len() || prob == 0.0 {
            return;
        }
        if on < b {
            h[d] += prob;
        } else {
            // object d and every later one miss in all extensions
            return;
        }
        walk(d + 1, on + 1, prob * pi[d], b, pi, h);
        walk(d + 1, on, prob * (1.0 - pi[d]), b, pi, h);
    }
    walk(0, 0, 1.0, b, &pi, &mut h);
    Ok(combine(&lambda, &pi, &h))
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |c, j| c * (n - j) as f64 / (j + 1) as f64)
}

/// On-off traffic where every object has the same on-probability `rho`.
pub fn onoff_hr_common_rho(rates: &RateVector, rho: f64, b: usize) -> Result<AnalyticResult> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::arg(format!("rho must lie in (0, 1), got {rho}")));
    }
    let order = rank_desc(rates.as_slice());
    let lambda: Vec<f64> = order.iter().map(|&i| rates.as_slice()[i]).collect();
    let n = lambda.len();
    let total = rates.total();
    let log_space = n > LOG_BINOMIAL_ABOVE;
    let (ln_rho, ln_off) = (rho.ln(), (-rho).ln_1p());
    let mut hits = 0.0;
    for (i, &l) in lambda.iter().enumerate() {
        // i objects rank ahead of this one
        let hi = if i < b {
            1.0
        } else {
            (0..b)
                .map(|k| {
                    if log_space {
                        (ln_binomial(i, k) + k as f64 * ln_rho + (i - k) as f64 * ln_off).exp()
                    } else {
                        binomial(i, k) * rho.powi(k as i32) * (1.0 - rho).powi((i - k) as i32)
                    }
                })
                .sum()
        };
        hits += l * hi;
    }
    let h = hits / total;
    Ok(AnalyticResult {
        hit_probability: h,
        hit_rate: rho * total * h,
    })
}

/// Occupancy probabilities `p[l][k]` and conditional hit rates `r[l][k]` of
/// the catalog restricted to its `l` most popular objects (row 0 is the empty
/// catalog), for `k = 0..=min(l, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OnOffRecursionTable {
    pub p: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

impl OnOffRecursionTable {
    pub fn build(lambda: &[f64], pi_on: &[f64], b: usize) -> Self {
        let n = lambda.len();
        let mut p = vec![vec![1.0]];
        let mut r = vec![vec![0.0]];
        for l in 1..=n {
            let (lam, on) = (lambda[l - 1], pi_on[l - 1]);
            let off = 1.0 - on;
            let (pp, rp) = (&p[l - 1], &r[l - 1]);
            let top = l.min(b);
            let mut pl = vec![0.0; top + 1];
            let mut rl = vec![0.0; top + 1];
            pl[0] = pp[0] * off;
            for k in 1..=top {
                let up = pp[k - 1] * on;
                let (stay, weight) = if k < l && k < b {
                    (pp[k] * off, pp[k] * off)
                } else if k == l {
                    (0.0, 0.0)
                } else {
                    // k == b < l: a full cache stays full whether or not l is on
                    (pp[k], pp[k])
                };
                pl[k] = up + stay;
                let denom = up + weight;
                rl[k] = if denom > 0.0 {
                    (up * (rp[k - 1] + lam) + if k < l { weight * rp[k] } else { 0.0 }) / denom
                } else {
                    0.0
                };
            }
            p.push(pl);
            r.push(rl);
        }
        Self { p, r }
    }
}

/// On-off traffic through the occupancy recursion, O(n·b).
pub fn onoff_hr_recursive(params: &OnOffParams, b: usize) -> AnalyticResult {
    let (lambda, pi) = onoff_ranked(params);
    let table = OnOffRecursionTable::build(&lambda, &pi, b);
    let last = table.p.len() - 1;
    let hit_rate: f64 = table.p[last]
        .iter()
        .zip(&table.r[last])
        .map(|(p, r)| p * r)
        .sum();
    let offered: f64 = lambda.iter().zip(&pi).map(|(l, p)| l * p).sum();
    AnalyticResult {
        hit_probability: hit_rate / offered,
        hit_rate,
    }
}

/// Markov-modulated Poisson traffic: in each environment state the `b`
/// highest-rate objects of that state are cached.
pub fn mmpp_hr(params: &MmppParams, b: usize) -> AnalyticResult {
    let gamma = params.stationary();
    let mut h = 0.0;
    let mut rate = 0.0;
    for (x, &g) in gamma.iter().enumerate() {
        let lam = params.rates(x);
        let top: f64 = rank_desc(lam).iter().take(b).map(|&i| lam[i]).sum();
        let total: f64 = lam.iter().sum();
        let (hx, rx) = if b >= lam.len() { (1.0, total) } else { (top / total, top) };
        h += g * hx;
        rate += g * rx;
    }
    AnalyticResult {
        hit_probability: h,
        hit_rate: rate,
    }
}
