//! Inter-request-time laws, popularity profiles and hazard estimation.

mod fit;
mod irt;
mod rates;
pub(crate) mod special;

pub use fit::{fit_gpd_mle, GpdFit, MIN_FIT_SAMPLES};
pub use irt::{IrtDistribution, IrtFamily, HAZARD_CAP};
pub use rates::{zipf_rates, RateVector};
