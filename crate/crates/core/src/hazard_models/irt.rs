use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Open01};

use super::special::{gamma_p, ln_gamma, ln_upper_gamma_q};
use crate::{Error, Result};

/// Value returned where the hazard diverges (Gamma with shape < 1 at age 0).
///
/// Rankings only compare the sentinel against finite competitors, so an
/// object whose hazard is capped simply ranks first.
pub const HAZARD_CAP: f64 = 1e15;

/// Inter-request-time distribution of a renewal request process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IrtDistribution {
    Exponential { rate: f64 },
    GeneralizedPareto { shape: f64, scale: f64 },
    Uniform { upper: f64 },
    /// Two-phase hyperexponential; `p1 + p2 == 1`.
    Hyperexponential { p1: f64, p2: f64, rate1: f64, rate2: f64 },
    Gamma { shape: f64, scale: f64 },
    Erlang { shape: u32, rate: f64 },
}

/// A distribution family with its shape held fixed; the scale follows from
/// the target arrival rate in [`IrtDistribution::from_rate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IrtFamily {
    Exponential,
    GeneralizedPareto { shape: f64 },
    Uniform,
    /// Balanced-means hyperexponential with the given squared coefficient of variation.
    Hyperexponential { scv: f64 },
    Gamma { shape: f64 },
    Erlang { shape: u32 },
}

impl IrtFamily {
    pub fn name(&self) -> &'static str {
        match self {
            IrtFamily::Exponential => "exponential",
            IrtFamily::GeneralizedPareto { .. } => "gpd",
            IrtFamily::Uniform => "uniform",
            IrtFamily::Hyperexponential { .. } => "hyperexponential",
            IrtFamily::Gamma { .. } => "gamma",
            IrtFamily::Erlang { .. } => "erlang",
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn finite_nonneg(what: &str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("{what} must be finite and >= 0, got {t}")))
    }
}

impl IrtDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn generalized_pareto(shape: f64, scale: f64) -> Result<Self> {
        Self::GeneralizedPareto { shape, scale }.validated()
    }

    pub fn uniform(upper: f64) -> Result<Self> {
        Self::Uniform { upper }.validated()
    }

    pub fn hyperexponential(p1: f64, p2: f64, rate1: f64, rate2: f64) -> Result<Self> {
        Self::Hyperexponential { p1, p2, rate1, rate2 }.validated()
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::Gamma { shape, scale }.validated()
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        Self::Erlang { shape, rate }.validated()
    }

    /// Checks the parameter invariants, including a finite positive mean.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Exponential { rate } => positive("rate", rate)?,
            Self::GeneralizedPareto { shape, scale } => {
                positive("GPD shape", shape)?;
                positive("GPD scale", scale)?;
            }
            Self::Uniform { upper } => positive("uniform upper bound", upper)?,
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                positive("p1", p1)?;
                positive("p2", p2)?;
                positive("rate1", rate1)?;
                positive("rate2", rate2)?;
                if (p1 + p2 - 1.0).abs() > 1e-12 {
                    return Err(Error::arg(format!("p1 + p2 must equal 1, got {}", p1 + p2)));
                }
            }
            Self::Gamma { shape, scale } => {
                positive("gamma shape", shape)?;
                positive("gamma scale", scale)?;
            }
            Self::Erlang { shape, rate } => {
                if shape == 0 {
                    return Err(Error::arg("Erlang shape must be a positive integer"));
                }
                positive("Erlang rate", rate)?;
            }
        }
        self.mean_irt()?;
        Ok(self)
    }

    /// Builds the member of `family` whose mean inter-request time is `1 / rate`.
    pub fn from_rate(family: IrtFamily, rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        let mean = 1.0 / rate;
        match family {
            IrtFamily::Exponential => Self::exponential(rate),
            IrtFamily::GeneralizedPareto { shape } => {
                if !(shape > 0.0 && shape < 1.0) {
                    return Err(Error::arg(format!(
                        "GPD shape must lie in (0, 1) for a finite mean, got {shape}"
                    )));
                }
                Self::generalized_pareto(shape, mean * (1.0 - shape))
            }
            IrtFamily::Uniform => Self::uniform(2.0 * mean),
            IrtFamily::Hyperexponential { scv } => {
                if !(scv.is_finite() && scv > 1.0) {
                    return Err(Error::arg(format!(
                        "hyperexponential needs SCV > 1, got {scv}"
                    )));
                }
                let p1 = (1.0 - ((scv - 1.0) / (scv + 1.0)).sqrt()) / 2.0;
                let p2 = 1.0 - p1;
                // balanced means: p1 / rate1 = p2 / rate2 = mean / 2
                let nu = mean / 2.0;
                Self::hyperexponential(p1, p2, p1 / nu, p2 / nu)
            }
            IrtFamily::Gamma { shape } => {
                positive("gamma shape", shape)?;
                Self::gamma(shape, mean / shape)
            }
            IrtFamily::Erlang { shape } => {
                if shape == 0 {
                    return Err(Error::arg("Erlang shape must be a positive integer"));
                }
                Self::erlang(shape, shape as f64 / mean)
            }
        }
    }

    pub fn family(&self) -> IrtFamily {
        match *self {
            Self::Exponential { .. } => IrtFamily::Exponential,
            Self::GeneralizedPareto { shape, .. } => IrtFamily::GeneralizedPareto { shape },
            Self::Uniform { .. } => IrtFamily::Uniform,
            Self::Hyperexponential { .. } => IrtFamily::Hyperexponential { scv: self.scv() },
            Self::Gamma { shape, .. } => IrtFamily::Gamma { shape },
            Self::Erlang { shape, .. } => IrtFamily::Erlang { shape },
        }
    }

    /// A characteristic time scale, used to size finite-difference steps and grids.
    pub fn time_scale(&self) -> f64 {
        match *self {
            Self::GeneralizedPareto { scale, .. } => scale,
            Self::Uniform { upper } => upper,
            _ => self.mean_irt().unwrap_or(1.0),
        }
    }

    pub fn mean_irt(&self) -> Result<f64> {
        Ok(match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::GeneralizedPareto { shape, scale } => {
                if shape >= 1.0 {
                    return Err(Error::InfiniteMean(shape));
                }
                scale / (1.0 - shape)
            }
            Self::Uniform { upper } => upper / 2.0,
            Self::Hyperexponential { p1, p2, rate1, rate2 } => p1 / rate1 + p2 / rate2,
            Self::Gamma { shape, scale } => shape * scale,
            Self::Erlang { shape, rate } => shape as f64 / rate,
        })
    }

    pub fn rate(&self) -> Result<f64> {
        Ok(1.0 / self.mean_irt()?)
    }

    /// Squared coefficient of variation, var / mean^2.
    pub fn scv(&self) -> f64 {
        match *self {
            Self::Exponential { .. } => 1.0,
            Self::GeneralizedPareto { shape, .. } => {
                if shape < 0.5 {
                    1.0 / (1.0 - 2.0 * shape)
                } else {
                    f64::INFINITY
                }
            }
            Self::Uniform { .. } => 1.0 / 3.0,
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                let m = p1 / rate1 + p2 / rate2;
                let m2 = 2.0 * (p1 / (rate1 * rate1) + p2 / (rate2 * rate2));
                m2 / (m * m) - 1.0
            }
            Self::Gamma { shape, .. } => 1.0 / shape,
            Self::Erlang { shape, .. } => 1.0 / shape as f64,
        }
    }

    /// P(IRT < t).
    pub fn cdf(&self, t: f64) -> Result<f64> {
        finite_nonneg("t", t)?;
        Ok(match *self {
            Self::Exponential { rate } => -(-rate * t).exp_m1(),
            Self::GeneralizedPareto { shape, scale } => {
                -((-1.0 / shape) * (shape * t / scale).ln_1p()).exp_m1()
            }
            Self::Uniform { upper } => (t / upper).min(1.0),
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                1.0 - p1 * (-rate1 * t).exp() - p2 * (-rate2 * t).exp()
            }
            Self::Gamma { shape, scale } => gamma_p(shape, t / scale),
            Self::Erlang { shape, rate } => gamma_p(shape as f64, rate * t),
        })
    }

    /// P(IRT > t).
    pub fn survival(&self, t: f64) -> Result<f64> {
        finite_nonneg("t", t)?;
        Ok(match *self {
            Self::Exponential { rate } => (-rate * t).exp(),
            Self::GeneralizedPareto { shape, scale } => {
                ((-1.0 / shape) * (shape * t / scale).ln_1p()).exp()
            }
            Self::Uniform { upper } => (1.0 - t / upper).max(0.0),
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                p1 * (-rate1 * t).exp() + p2 * (-rate2 * t).exp()
            }
            Self::Gamma { shape, scale } => ln_upper_gamma_q(shape, t / scale).exp(),
            Self::Erlang { shape, rate } => ln_upper_gamma_q(shape as f64, rate * t).exp(),
        })
    }

    /// Density at `t > 0`.
    pub fn pdf(&self, t: f64) -> Result<f64> {
        finite_nonneg("t", t)?;
        Ok(match *self {
            Self::Exponential { rate } => rate * (-rate * t).exp(),
            Self::GeneralizedPareto { shape, scale } => {
                ((-1.0 / shape - 1.0) * (shape * t / scale).ln_1p()).exp() / scale
            }
            Self::Uniform { upper } => {
                if t < upper {
                    1.0 / upper
                } else {
                    0.0
                }
            }
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                p1 * rate1 * (-rate1 * t).exp() + p2 * rate2 * (-rate2 * t).exp()
            }
            Self::Gamma { shape, scale } => gamma_log_pdf(shape, t / scale).exp() / scale,
            Self::Erlang { shape, rate } => gamma_log_pdf(shape as f64, rate * t).exp() * rate,
        })
    }

    /// Hazard rate f(age) / (1 - F(age)) of the inter-request time.
    pub fn hazard_rate(&self, age: f64) -> Result<f64> {
        finite_nonneg("age", age)?;
        Ok(match *self {
            Self::Exponential { rate } => rate,
            Self::GeneralizedPareto { shape, scale } => 1.0 / (scale + shape * age),
            Self::Uniform { upper } => {
                if age >= upper {
                    return Err(Error::OutsideSupport { age, upper });
                }
                1.0 / (upper - age)
            }
            Self::Hyperexponential { p1, p2, rate1, rate2 } => {
                // factor out the slower-decaying exponential to avoid 0/0
                let (pa, ra, pb, rb) = if rate1 <= rate2 {
                    (p1, rate1, p2, rate2)
                } else {
                    (p2, rate2, p1, rate1)
                };
                let w = (pb / pa) * (-(rb - ra) * age).exp();
                (ra + rb * w) / (1.0 + w)
            }
            Self::Gamma { shape, scale } => (gamma_hazard(shape, age / scale) / scale).min(HAZARD_CAP),
            Self::Erlang { shape, rate } => (gamma_hazard(shape as f64, rate * age) * rate).min(HAZARD_CAP),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(rng),
            Self::GeneralizedPareto { shape, scale } => {
                let u: f64 = Open01.sample(rng);
                scale / shape * (-shape * u.ln()).exp_m1()
            }
            Self::Uniform { upper } => {
                let u: f64 = Open01.sample(rng);
                upper * u
            }
            Self::Hyperexponential { p1, rate1, rate2, .. } => {
                let u: f64 = rng.random();
                let rate = if u < p1 { rate1 } else { rate2 };
                Exp::new(rate).expect("validated rate").sample(rng)
            }
            Self::Gamma { shape, scale } => Gamma::new(shape, scale)
                .expect("validated gamma")
                .sample(rng),
            Self::Erlang { shape, rate } => Gamma::new(shape as f64, 1.0 / rate)
                .expect("validated erlang")
                .sample(rng),
        }
    }
}

/// Log density of the unit-scale Gamma(shape) law at x.
fn gamma_log_pdf(shape: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        };
    }
    (shape - 1.0) * x.ln() - x - ln_gamma(shape)
}

/// Hazard of the unit-scale Gamma(shape) law at x.
fn gamma_hazard(shape: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            1.0
        } else {
            0.0
        };
    }
    (gamma_log_pdf(shape, x) - ln_upper_gamma_q(shape, x)).exp()
}
