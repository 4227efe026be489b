use crate::hazard_models::{IrtDistribution, HAZARD_CAP};
use crate::traffic_gen::{Catalog, Modulation, MmppParams, RequestTrace, Switch, TrafficSpec};
use crate::{Error, Result};

/// Run-time state needed to evaluate every object's hazard rate just before
/// each request of a trace.
///
/// Evaluation uses the history strictly before the query time: call
/// [`advance_to`](Self::advance_to) and read hazards, then
/// [`observe`](Self::observe) the request itself.
#[derive(Clone, Debug)]
pub struct HazardTracker<'a> {
    state: State<'a>,
}

#[derive(Clone, Debug)]
enum State<'a> {
    Renewal {
        dists: &'a [IrtDistribution],
        /// Last request time; never-requested objects age from the origin.
        last: Vec<f64>,
    },
    OnOff {
        on_rate: &'a [f64],
        on: Vec<bool>,
        switches: &'a [Switch],
        cursor: usize,
    },
    Mmpp {
        params: &'a MmppParams,
        state: usize,
        jumps: &'a [(f64, usize)],
        cursor: usize,
    },
    Shots {
        birth: &'a [f64],
        volume: &'a [f64],
        decay: Vec<f64>,
    },
}

impl<'a> HazardTracker<'a> {
    /// Tracker for the catalog's traffic model, reading the hidden-state
    /// annotations the generator attached to the trace.
    pub fn new(catalog: &'a Catalog, trace: &'a RequestTrace) -> Result<Self> {
        let missing = |what: &str| {
            Error::arg(format!("trace lacks the {what} annotations this traffic model needs"))
        };
        let state = match catalog.traffic() {
            Some(TrafficSpec::Renewal(dists)) => {
                State::Renewal {
                    dists,
                    last: vec![trace.origin; dists.len()],
                }
            }
            Some(TrafficSpec::OnOff(p)) => match &trace.modulation {
                Some(Modulation::OnOff { initial_on, switches }) => State::OnOff {
                    on_rate: &p.on_rate,
                    on: initial_on.clone(),
                    switches,
                    cursor: 0,
                },
                _ => return Err(missing("on/off switch")),
            },
            Some(TrafficSpec::Mmpp(p)) => match &trace.modulation {
                Some(Modulation::Mmpp { initial_state, jumps }) => State::Mmpp {
                    params: p,
                    state: *initial_state,
                    jumps,
                    cursor: 0,
                },
                _ => return Err(missing("environment state path")),
            },
            Some(TrafficSpec::Snm(p)) => match &trace.modulation {
                Some(Modulation::Shots { birth, volume }) => State::Shots {
                    birth,
                    volume,
                    decay: p.decays(),
                },
                _ => return Err(missing("shot birth/volume")),
            },
            None => {
                return Err(Error::Unsupported(
                    "catalog has no traffic model; fit one (e.g. per-object GPD) first".into(),
                ))
            }
        };
        Ok(Self { state })
    }

    /// Renewal tracker with every object's age measured from `origin`.
    pub fn renewal(dists: &'a [IrtDistribution], origin: f64) -> Self {
        Self {
            state: State::Renewal {
                dists,
                last: vec![origin; dists.len()],
            },
        }
    }

    pub fn n(&self) -> usize {
        match &self.state {
            State::Renewal { dists, .. } => dists.len(),
            State::OnOff { on_rate, .. } => on_rate.len(),
            State::Mmpp { params, .. } => params.n(),
            State::Shots { birth, .. } => birth.len(),
        }
    }

    /// Applies modulation changes that happened strictly before `t`.
    pub fn advance_to(&mut self, t: f64) {
        match &mut self.state {
            State::OnOff {
                on,
                switches,
                cursor,
                ..
            } => {
                while *cursor < switches.len() && switches[*cursor].time < t {
                    let s = switches[*cursor];
                    on[s.object] = s.on;
                    *cursor += 1;
                }
            }
            State::Mmpp {
                state,
                jumps,
                cursor,
                ..
            } => {
                while *cursor < jumps.len() && jumps[*cursor].0 < t {
                    *state = jumps[*cursor].1;
                    *cursor += 1;
                }
            }
            State::Renewal { .. } | State::Shots { .. } => {}
        }
    }

    /// Hazard rate of object `i` at time `t` (after `advance_to(t)`).
    #[inline]
    pub fn hazard(&self, i: usize, t: f64) -> f64 {
        match &self.state {
            State::Renewal { dists, last } => {
                let age = (t - last[i]).max(0.0);
                // ages past a bounded support mean the request is overdue
                dists[i].hazard_rate(age).unwrap_or(HAZARD_CAP)
            }
            State::OnOff { on_rate, on, .. } => {
                if on[i] {
                    on_rate[i]
                } else {
                    0.0
                }
            }
            State::Mmpp { params, state, .. } => params.rates(*state)[i],
            State::Shots {
                birth,
                volume,
                decay,
            } => {
                if t < birth[i] {
                    0.0
                } else {
                    volume[i] / decay[i] * (-(t - birth[i]) / decay[i]).exp()
                }
            }
        }
    }

    /// Fills `out` with every object's hazard at `t`.
    pub fn hazards(&self, t: f64, out: &mut [f64]) {
        match &self.state {
            State::Mmpp { params, state, .. } => out.copy_from_slice(params.rates(*state)),
            _ => {
                for (i, h) in out.iter_mut().enumerate() {
                    *h = self.hazard(i, t);
                }
            }
        }
    }

    /// Records a request for object `i` at time `t`.
    pub fn observe(&mut self, i: usize, t: f64) {
        if let State::Renewal { last, .. } = &mut self.state {
            last[i] = t;
        }
    }
}
