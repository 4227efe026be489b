use rand_distr::{Distribution, Exp};
use rand::Rng;
use rayon::prelude::*;

use super::{check_horizon, domain, merge_streams, substream, Modulation, RequestTrace, Switch};
use crate::{Error, Result};

/// Per-object on-off modulation.
///
/// `activation` is the off→on rate and `deactivation` the on→off rate, so the
/// stationary on-probability is `activation / (activation + deactivation)`.
/// While on, object `i` is requested as a Poisson process of rate `on_rate[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OnOffParams {
    pub activation: Vec<f64>,
    pub deactivation: Vec<f64>,
    pub on_rate: Vec<f64>,
}

impl OnOffParams {
    pub fn new(activation: Vec<f64>, deactivation: Vec<f64>, on_rate: Vec<f64>) -> Result<Self> {
        let n = on_rate.len();
        if n == 0 || activation.len() != n || deactivation.len() != n {
            return Err(Error::arg("on-off parameter vectors must be non-empty and equally long"));
        }
        for v in activation.iter().chain(&deactivation).chain(&on_rate) {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::arg(format!("on-off rates must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            activation,
            deactivation,
            on_rate,
        })
    }

    /// On-periods of mean `t_on`, off-periods of mean `t_off`, for every object.
    pub fn with_periods(t_on: f64, t_off: f64, on_rate: Vec<f64>) -> Result<Self> {
        let n = on_rate.len();
        Self::new(vec![1.0 / t_off; n], vec![1.0 / t_on; n], on_rate)
    }

    pub fn n(&self) -> usize {
        self.on_rate.len()
    }

    pub fn pi_on(&self, i: usize) -> f64 {
        self.activation[i] / (self.activation[i] + self.deactivation[i])
    }

    pub fn pi_off(&self, i: usize) -> f64 {
        self.deactivation[i] / (self.activation[i] + self.deactivation[i])
    }
}

/// Independent on-off modulated Poisson processes. Each object starts in its
/// stationary on/off state; every state change is recorded in the trace.
pub fn gen_onoff(params: &OnOffParams, horizon: f64, seed: u64) -> Result<RequestTrace> {
    check_horizon(horizon)?;
    let per_object: Vec<(bool, Vec<f64>, Vec<Switch>)> = (0..params.n())
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, domain::OBJECT, i as u64);
            let on_period = Exp::new(params.deactivation[i]).expect("validated");
            let off_period = Exp::new(params.activation[i]).expect("validated");
            let gap = Exp::new(params.on_rate[i]).expect("validated");
            let initial_on = rng.random::<f64>() < params.pi_on(i);
            let mut on = initial_on;
            let mut times = Vec::new();
            let mut switches = Vec::new();
            let mut t = 0.0;
            while t < horizon {
                if on {
                    let end = t + on_period.sample(&mut rng);
                    let stop = end.min(horizon);
                    let mut s = t + gap.sample(&mut rng);
                    while s < stop {
                        times.push(s);
                        s += gap.sample(&mut rng);
                    }
                    t = end;
                } else {
                    t += off_period.sample(&mut rng);
                }
                on = !on;
                if t < horizon {
                    switches.push(Switch { time: t, object: i, on });
                }
            }
            (initial_on, times, switches)
        })
        .collect();

    let mut initial_on = Vec::with_capacity(params.n());
    let mut streams = Vec::with_capacity(params.n());
    let mut switches = Vec::new();
    for (init, times, sw) in per_object {
        initial_on.push(init);
        streams.push(times);
        switches.extend(sw);
    }
    switches.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.object.cmp(&b.object)));
    Ok(merge_streams(
        streams,
        horizon,
        Some(Modulation::OnOff {
            initial_on,
            switches,
        }),
    ))
}

/// On/off state of every object at time `t`, replayed from the switch record.
pub fn states_at(initial_on: &[bool], switches: &[Switch], t: f64) -> Vec<bool> {
    let mut on = initial_on.to_vec();
    for s in switches.iter().take_while(|s| s.time <= t) {
        on[s.object] = s.on;
    }
    on
}
