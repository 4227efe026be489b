use rayon::prelude::*;

use super::{check_horizon, domain, merge_streams, substream, RequestTrace};
use crate::hazard_models::IrtDistribution;
use crate::Result;

/// Independent renewal processes, one per object, started at t = 0 with the
/// first gap drawn from the plain inter-request law.
pub fn gen_renewal(dists: &[IrtDistribution], horizon: f64, seed: u64) -> Result<RequestTrace> {
    check_horizon(horizon)?;
    let per_object: Vec<Vec<f64>> = dists
        .par_iter()
        .enumerate()
        .map(|(i, dist)| {
            let mut rng = substream(seed, domain::OBJECT, i as u64);
            let mut times = Vec::new();
            let mut t = dist.sample(&mut rng);
            while t < horizon {
                times.push(t);
                t += dist.sample(&mut rng);
            }
            times
        })
        .collect();
    Ok(merge_streams(per_object, horizon, None))
}
