use rand_distr::{Distribution, Open01};

use super::{domain, substream};
use crate::{Error, Result};

/// CDF of the bounded Pareto law on `[min, max]` with tail index `shape`.
pub fn bounded_pareto_cdf(x: f64, shape: f64, min: f64, max: f64) -> f64 {
    if x <= min {
        return 0.0;
    }
    if x >= max {
        return 1.0;
    }
    (1.0 - (min / x).powf(shape)) / (1.0 - (min / max).powf(shape))
}

/// I.i.d. bounded-Pareto object sizes by inverse-CDF sampling.
pub fn sample_sizes_bounded_pareto(
    n: usize,
    shape: f64,
    min: f64,
    max: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(min > 0.0 && min < max && max.is_finite()) {
        return Err(Error::arg(format!("bounded Pareto needs 0 < min < max, got [{min}, {max}]")));
    }
    if !(shape > 0.0) {
        return Err(Error::arg(format!("Pareto shape must be > 0, got {shape}")));
    }
    let mut rng = substream(seed, domain::SIZES, 0);
    let tail = (min / max).powf(shape);
    Ok((0..n)
        .map(|_| {
            let u: f64 = Open01.sample(&mut rng);
            let x = min * (1.0 - u * (1.0 - tail)).powf(-1.0 / shape);
            x.clamp(min, max)
        })
        .collect())
}
