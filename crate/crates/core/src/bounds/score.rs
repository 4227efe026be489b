use super::HazardTracker;
use crate::traffic_gen::{Catalog, RequestTrace};
use crate::{Error, Result};

/// Hit accounting of one method over the post-warm-up requests of a trace.
///
/// `expected_hits` is real-valued: the variable-size rules credit fractional
/// hits for the marginal object.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundScore {
    pub requests: usize,
    pub expected_hits: f64,
    pub hit_probability: f64,
    pub bytes_requested: f64,
    pub expected_bytes_hit: f64,
    pub byte_hit_probability: f64,
}

impl BoundScore {
    pub(crate) fn add(&mut self, credit: f64, size: f64) {
        self.requests += 1;
        self.expected_hits += credit;
        self.bytes_requested += size;
        self.expected_bytes_hit += credit * size;
    }

    pub(crate) fn finish(mut self) -> Self {
        if self.requests > 0 {
            self.hit_probability = self.expected_hits / self.requests as f64;
        }
        if self.bytes_requested > 0.0 {
            self.byte_hit_probability = self.expected_bytes_hit / self.bytes_requested;
        }
        self
    }
}

/// Number of leading requests excluded from hit accounting.
pub fn warmup_count(requests: usize, fraction: f64) -> usize {
    (requests as f64 * fraction.clamp(0.0, 1.0)).floor() as usize
}

/// Cache sizes to score in one pass over a trace.
#[derive(Clone, Debug, Default)]
pub struct RuleSweeps {
    /// HR-E cache sizes, in objects.
    pub equal: Vec<usize>,
    /// HR-VB capacities, in bytes.
    pub byte: Vec<f64>,
    /// HR-VC capacities, in bytes.
    pub object: Vec<f64>,
}

/// Credit of the requested object under the greedy knapsack fill, given the
/// total size of the objects ranked ahead of it.
#[inline]
fn knapsack_credit(bytes_ahead: f64, size: f64, capacity: f64) -> f64 {
    if bytes_ahead + size <= capacity {
        1.0
    } else if bytes_ahead <= capacity {
        (capacity - bytes_ahead) / size
    } else {
        0.0
    }
}

/// Scores HR-E, HR-VB and HR-VC for several cache sizes in a single pass.
///
/// At each request the hazards of all objects are evaluated on the history
/// strictly before the request. Objects rank by hazard (HR-E, HR-VB) or by
/// hazard over size (HR-VC), ties going to the lower object id. Only the
/// position of the requested object matters, so the rank (HR-E) or the bytes
/// ranked ahead of it (knapsack rules) are counted in O(n) without sorting.
pub fn score_hazard_rules(
    trace: &RequestTrace,
    catalog: &Catalog,
    sweeps: &RuleSweeps,
    warmup: f64,
) -> Result<(Vec<BoundScore>, Vec<BoundScore>, Vec<BoundScore>)> {
    let n = catalog.n();
    if let Some(&b) = sweeps.equal.iter().find(|&&b| b > n) {
        return Err(Error::CacheTooLarge { capacity: b, n });
    }
    if !sweeps.equal.is_empty() && catalog.equal_size().is_none() {
        return Err(Error::arg("HR-E needs equal object sizes; use HR-VB/HR-VC"));
    }
    for &c in sweeps.byte.iter().chain(&sweeps.object) {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::arg(format!("capacity must be finite and >= 0, got {c}")));
        }
    }
    if let Some(e) = trace.events.iter().find(|e| e.object >= n) {
        return Err(Error::arg(format!("trace requests object {} outside catalog", e.object)));
    }

    let sizes = catalog.sizes();
    let mut tracker = HazardTracker::new(catalog, trace)?;
    let skip = warmup_count(trace.len(), warmup);
    let mut equal = vec![BoundScore::default(); sweeps.equal.len()];
    let mut byte = vec![BoundScore::default(); sweeps.byte.len()];
    let mut object = vec![BoundScore::default(); sweeps.object.len()];
    let need_ratio = !sweeps.object.is_empty();
    let need_hazard_rank = !sweeps.equal.is_empty() || !sweeps.byte.is_empty();
    let mut hazards = vec![0.0; n];

    for (k, ev) in trace.events.iter().enumerate() {
        let (t, r) = (ev.time, ev.object);
        if k >= skip {
            tracker.advance_to(t);
            tracker.hazards(t, &mut hazards);
            let size_r = sizes[r];
            if need_hazard_rank {
                let hr = hazards[r];
                let mut rank = 0usize;
                let mut bytes_ahead = 0.0;
                for (j, &h) in hazards.iter().enumerate() {
                    if h > hr || (h == hr && j < r) {
                        rank += 1;
                        bytes_ahead += sizes[j];
                    }
                }
                for (score, &b) in equal.iter_mut().zip(&sweeps.equal) {
                    score.add(if rank < b { 1.0 } else { 0.0 }, size_r);
                }
                for (score, &c) in byte.iter_mut().zip(&sweeps.byte) {
                    score.add(knapsack_credit(bytes_ahead, size_r, c), size_r);
                }
            }
            if need_ratio {
                let kr = hazards[r] / size_r;
                let mut bytes_ahead = 0.0;
                for (j, &h) in hazards.iter().enumerate() {
                    let kj = h / sizes[j];
                    if kj > kr || (kj == kr && j < r) {
                        bytes_ahead += sizes[j];
                    }
                }
                for (score, &c) in object.iter_mut().zip(&sweeps.object) {
                    score.add(knapsack_credit(bytes_ahead, size_r, c), size_r);
                }
            }
        }
        tracker.observe(r, t);
    }
    let finish = |v: Vec<BoundScore>| v.into_iter().map(BoundScore::finish).collect();
    Ok((finish(equal), finish(byte), finish(object)))
}

/// Per-request HR-E hit indicators (0 or 1) of the post-warm-up requests,
/// for variance estimates that need the raw sequence.
pub fn hr_e_indicators(trace: &RequestTrace, catalog: &Catalog, b: usize, warmup: f64) -> Result<Vec<f64>> {
    hr_e_score(trace, catalog, b, warmup)?;
    let n = catalog.n();
    let mut tracker = HazardTracker::new(catalog, trace)?;
    let skip = warmup_count(trace.len(), warmup);
    let mut hazards = vec![0.0; n];
    let mut out = Vec::with_capacity(trace.len() - skip);
    for (k, ev) in trace.events.iter().enumerate() {
        if k >= skip {
            tracker.advance_to(ev.time);
            tracker.hazards(ev.time, &mut hazards);
            let hr = hazards[ev.object];
            let ahead = hazards
                .iter()
                .enumerate()
                .filter(|&(j, &h)| h > hr || (h == hr && j < ev.object))
                .count();
            out.push(if ahead < b { 1.0 } else { 0.0 });
        }
        tracker.observe(ev.object, ev.time);
    }
    Ok(out)
}

/// HR-E: a request is a hit iff its object's hazard is among the top `b`.
pub fn hr_e_score(trace: &RequestTrace, catalog: &Catalog, b: usize, warmup: f64) -> Result<BoundScore> {
    Ok(hr_e_sweep(trace, catalog, &[b], warmup)?[0])
}

pub fn hr_e_sweep(
    trace: &RequestTrace,
    catalog: &Catalog,
    sizes: &[usize],
    warmup: f64,
) -> Result<Vec<BoundScore>> {
    let sweeps = RuleSweeps {
        equal: sizes.to_vec(),
        ..Default::default()
    };
    Ok(score_hazard_rules(trace, catalog, &sweeps, warmup)?.0)
}

/// HR-VB byte-hit bound: fractional knapsack with objects ranked by hazard.
pub fn hr_vb_score(trace: &RequestTrace, catalog: &Catalog, capacity: f64, warmup: f64) -> Result<BoundScore> {
    Ok(hr_vb_sweep(trace, catalog, &[capacity], warmup)?[0])
}

pub fn hr_vb_sweep(
    trace: &RequestTrace,
    catalog: &Catalog,
    capacities: &[f64],
    warmup: f64,
) -> Result<Vec<BoundScore>> {
    let sweeps = RuleSweeps {
        byte: capacities.to_vec(),
        ..Default::default()
    };
    Ok(score_hazard_rules(trace, catalog, &sweeps, warmup)?.1)
}

/// HR-VC object-hit bound: objects ranked by hazard over size; the marginal
/// object is credited its expected caching probability.
pub fn hr_vc_score(trace: &RequestTrace, catalog: &Catalog, capacity: f64, warmup: f64) -> Result<BoundScore> {
    Ok(hr_vc_sweep(trace, catalog, &[capacity], warmup)?[0])
}

pub fn hr_vc_sweep(
    trace: &RequestTrace,
    catalog: &Catalog,
    capacities: &[f64],
    warmup: f64,
) -> Result<Vec<BoundScore>> {
    let sweeps = RuleSweeps {
        object: capacities.to_vec(),
        ..Default::default()
    };
    Ok(score_hazard_rules(trace, catalog, &sweeps, warmup)?.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard_models::IrtDistribution;
    use crate::traffic_gen::{gen_renewal, RequestEvent, TrafficSpec};

    fn poisson_catalog(rates: &[f64]) -> Catalog {
        let d = rates
            .iter()
            .map(|&r| IrtDistribution::exponential(r).unwrap())
            .collect();
        Catalog::unit(TrafficSpec::Renewal(d)).unwrap()
    }

    #[test]
    fn constant_hazards_rank_statically() {
        let cat = poisson_catalog(&[2.0, 1.0]);
        let TrafficSpec::Renewal(d) = cat.traffic().unwrap() else { unreachable!() };
        let trace = gen_renewal(d, 5_000.0, 3).unwrap();
        let s = hr_e_score(&trace, &cat, 1, 0.0).unwrap();
        let ones = trace.events.iter().filter(|e| e.object == 0).count();
        assert_eq!(s.expected_hits, ones as f64);
        assert!((s.hit_probability - 2.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn full_cache_hits_everything() {
        let cat = poisson_catalog(&[3.0, 2.0, 1.0]);
        let TrafficSpec::Renewal(d) = cat.traffic().unwrap() else { unreachable!() };
        let trace = gen_renewal(d, 100.0, 1).unwrap();
        assert_eq!(hr_e_score(&trace, &cat, 3, 0.1).unwrap().hit_probability, 1.0);
        assert_eq!(hr_e_score(&trace, &cat, 0, 0.1).unwrap().expected_hits, 0.0);
        assert!(matches!(
            hr_e_score(&trace, &cat, 4, 0.1),
            Err(Error::CacheTooLarge { capacity: 4, n: 3 })
        ));
        let vb = hr_vb_score(&trace, &cat, 3.0, 0.1).unwrap();
        assert_eq!(vb.byte_hit_probability, 1.0);
    }

    #[test]
    fn hr_vc_marginal_credit() {
        // rates (4, 1), sizes (1, 3), B = 2: ratios 4 > 1/3
        let cat = poisson_catalog(&[4.0, 1.0]).with_sizes(vec![1.0, 3.0]).unwrap();
        let trace = RequestTrace {
            events: vec![
                RequestEvent { time: 1.0, object: 0 },
                RequestEvent { time: 2.0, object: 1 },
            ],
            origin: 0.0,
            horizon: 3.0,
            modulation: None,
        };
        let s = hr_vc_score(&trace, &cat, 2.0, 0.0).unwrap();
        assert!((s.expected_hits - (1.0 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn hr_e_rejects_unequal_sizes() {
        let cat = poisson_catalog(&[4.0, 1.0]).with_sizes(vec![1.0, 3.0]).unwrap();
        let trace = RequestTrace {
            events: vec![RequestEvent { time: 1.0, object: 0 }],
            origin: 0.0,
            horizon: 1.0,
            modulation: None,
        };
        assert!(hr_e_score(&trace, &cat, 1, 0.0).is_err());
    }

    #[test]
    fn knapsack_credit_cases() {
        assert_eq!(knapsack_credit(0.0, 1.0, 2.0), 1.0);
        assert_eq!(knapsack_credit(1.0, 3.0, 2.0), 1.0 / 3.0);
        assert_eq!(knapsack_credit(3.0, 1.0, 2.0), 0.0);
        // unit sizes at integer capacity never give a fractional credit
        assert_eq!(knapsack_credit(2.0, 1.0, 2.0), 0.0);
    }
}
