use super::IrtDistribution;
use crate::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 10;

const SHAPE_MAX: f64 = 5.0;
const SCALE_MIN: f64 = 1e-9;
const SCALE_MAX: f64 = 1e9;

/// Maximum-likelihood Generalized-Pareto fit of positive inter-request times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GpdFit {
    pub shape: f64,
    pub scale: f64,
    pub log_likelihood: f64,
    pub samples: usize,
    /// False when the estimate is the method-of-moments fallback.
    pub converged: bool,
}

impl GpdFit {
    /// Renewal law implied by the fit. A zero shape is the exponential limit.
    pub fn to_distribution(&self) -> Result<IrtDistribution> {
        if self.shape <= 0.0 {
            IrtDistribution::exponential(1.0 / self.scale)
        } else {
            IrtDistribution::generalized_pareto(self.shape, self.scale)
        }
    }
}

fn log_likelihood(xs: &[f64], shape: f64, scale: f64) -> f64 {
    let n = xs.len() as f64;
    if shape < 1e-12 {
        return -n * scale.ln() - xs.iter().sum::<f64>() / scale;
    }
    let s: f64 = xs.iter().map(|&x| (shape * x / scale).ln_1p()).sum();
    -n * scale.ln() - (1.0 + 1.0 / shape) * s
}

/// Scale maximising the likelihood at fixed shape: root of
/// mean(k x / (sigma + k x)) = k / (1 + k), decreasing in sigma.
fn profile_scale(xs: &[f64], shape: f64, mean: f64, guess: f64) -> Option<f64> {
    if shape < 1e-12 {
        return Some(mean);
    }
    let target = shape / (1.0 + shape);
    let n = xs.len() as f64;
    let score = |log_s: f64| -> (f64, f64) {
        let s = log_s.exp();
        let (mut g, mut dg) = (0.0, 0.0);
        for &x in xs {
            let kx = shape * x;
            let r = kx / (s + kx);
            g += r;
            dg -= r * s / (s + kx);
        }
        (g / n - target, dg / n)
    };
    let (mut lo, mut hi) = (SCALE_MIN.ln(), SCALE_MAX.ln());
    if score(lo).0 < 0.0 || score(hi).0 > 0.0 {
        return None;
    }
    let mut x = guess.clamp(SCALE_MIN, SCALE_MAX).ln();
    for _ in 0..200 {
        let (g, dg) = score(x);
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if g.abs() < 1e-14 || hi - lo < 1e-13 {
            break;
        }
        let newton = x - g / dg;
        x = if dg < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Some(x.exp())
}

fn moments_estimate(xs: &[f64], mean: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let shape = if var > 0.0 {
        (0.5 * (1.0 - mean * mean / var)).clamp(0.0, 0.499)
    } else {
        0.0
    };
    (shape, (mean * (1.0 - shape)).clamp(SCALE_MIN, SCALE_MAX))
}

/// Fits a GPD by profile likelihood: a one-dimensional search over the shape
/// on `[0, 5]` with the scale solved exactly at each trial shape.
pub fn fit_gpd_mle(samples: &[f64]) -> Result<GpdFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: samples.len(),
        });
    }
    if let Some(bad) = samples.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::arg(format!("GPD samples must be finite and > 0, got {bad}")));
    }
    let xs = samples;
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;

    let mut last_scale = mean;
    let mut profile = |shape: f64| -> Option<(f64, f64)> {
        let scale = profile_scale(xs, shape, mean, last_scale)?;
        last_scale = scale;
        let ll = log_likelihood(xs, shape, scale);
        ll.is_finite().then_some((ll, scale))
    };

    // coarse grid, denser near the exponential boundary
    let grid: Vec<f64> = (0..=40)
        .map(|i| SHAPE_MAX * (i as f64 / 40.0).powi(2))
        .collect();
    let mut evals = Vec::with_capacity(grid.len());
    for &k in &grid {
        evals.push(profile(k));
    }
    let best = evals
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.map(|(ll, _)| (i, ll)))
        .max_by(|a, b| a.1.total_cmp(&b.1));

    let fallback = || {
        let (shape, scale) = moments_estimate(xs, mean);
        log::warn!("GPD likelihood search failed; using method-of-moments estimate");
        GpdFit {
            shape,
            scale,
            log_likelihood: log_likelihood(xs, shape, scale),
            samples: xs.len(),
            converged: false,
        }
    };
    let Some((i_best, _)) = best else {
        return Ok(fallback());
    };

    // golden-section refinement on the bracketing grid cell pair
    let mut a = grid[i_best.saturating_sub(1)];
    let mut b = grid[(i_best + 1).min(grid.len() - 1)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let neg = |e: Option<(f64, f64)>| e.map_or(f64::INFINITY, |(ll, _)| -ll);
    let mut fc = neg(profile(c));
    let mut fd = neg(profile(d));
    while b - a > 1e-9 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = neg(profile(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = neg(profile(d));
        }
    }
    let shape = 0.5 * (a + b);
    let Some((ll, scale)) = profile(shape) else {
        return Ok(fallback());
    };
    // the refined point must not lose to the grid optimum
    let (grid_ll, grid_scale) = evals[i_best].expect("best grid point evaluated");
    let (shape, scale, ll) = if ll >= grid_ll {
        (shape, scale, ll)
    } else {
        (grid[i_best], grid_scale, grid_ll)
    };
    Ok(GpdFit {
        shape,
        scale,
        log_likelihood: ll,
        samples: xs.len(),
        converged: true,
    })
}
