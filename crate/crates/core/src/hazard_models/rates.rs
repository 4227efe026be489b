use crate::{Error, Result};

/// Per-object mean arrival rates.
#[derive(Clone, Debug, PartialEq)]
pub struct RateVector {
    rates: Vec<f64>,
    sorted_desc: bool,
}

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::arg("rate vector must be non-empty"));
        }
        if let Some(bad) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::arg(format!("rates must be finite and > 0, got {bad}")));
        }
        let sorted_desc = rates.windows(2).all(|w| w[0] >= w[1]);
        Ok(Self { rates, sorted_desc })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.sorted_desc
    }

    pub fn total(&self) -> f64 {
        self.rates.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.rates
    }
}

/// Zipf popularity: rate of object `i` (1-based) proportional to `i^-exponent`,
/// scaled so the rates sum to `total_rate`.
pub fn zipf_rates(n: usize, exponent: f64, total_rate: f64) -> Result<RateVector> {
    if n == 0 {
        return Err(Error::arg("zipf_rates needs n >= 1"));
    }
    if !(exponent.is_finite() && exponent >= 0.0) {
        return Err(Error::arg(format!("Zipf exponent must be >= 0, got {exponent}")));
    }
    if !(total_rate.is_finite() && total_rate > 0.0) {
        return Err(Error::arg(format!("total rate must be > 0, got {total_rate}")));
    }
    let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-exponent)).collect();
    let norm: f64 = weights.iter().sum();
    let rates = weights.into_iter().map(|w| total_rate * w / norm).collect();
    Ok(RateVector { rates, sorted_desc: true })
}
