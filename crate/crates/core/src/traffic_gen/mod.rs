//! Seeded synthetic request traces and the canonical trace CSV format.
//!
//! Every generator is a pure function of `(catalog, horizon, seed)`. Each
//! object draws from its own random substream derived from `(seed, object)`,
//! so adding objects never perturbs the requests of existing ones, and
//! extending the horizon only appends events.

mod csv_io;
mod mmpp;
mod onoff;
mod renewal;
mod sizes;
mod snm;
mod streams;

pub use csv_io::{load_trace_csv, write_id_mapping_csv, write_trace_csv, IdMapping, LoadedTrace};
pub use mmpp::{gen_mmpp, MmppParams};
pub use onoff::{gen_onoff, states_at, OnOffParams};
pub use renewal::gen_renewal;
pub use sizes::{bounded_pareto_cdf, sample_sizes_bounded_pareto};
pub use snm::{expected_counts, gen_snm, SnmClass, SnmParams};
pub(crate) use streams::{derive_seed, domain, substream};

use crate::hazard_models::IrtDistribution;
use crate::{Error, Result};

/// Minimum spacing enforced between consecutive request times.
pub const TIE_JITTER: f64 = 1e-12;

/// One request: `object` is a dense 0-based index into the catalog.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RequestEvent {
    pub time: f64,
    pub object: usize,
}

/// An on/off transition of one object's modulating process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Switch {
    pub time: f64,
    pub object: usize,
    pub on: bool,
}

/// Hidden-state annotations recorded by the generators. Hazard trackers for
/// the modulated models read them; renewal traces carry none.
#[derive(Clone, Debug, PartialEq)]
pub enum Modulation {
    OnOff {
        initial_on: Vec<bool>,
        switches: Vec<Switch>,
    },
    Mmpp {
        initial_state: usize,
        /// `(time, new state)` pairs in time order.
        jumps: Vec<(f64, usize)>,
    },
    Shots {
        /// Time each object enters the system (may exceed the horizon).
        birth: Vec<f64>,
        /// Expected total request count of each object.
        volume: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RequestTrace {
    pub events: Vec<RequestEvent>,
    /// Time the observation window opens; objects not yet requested age from here.
    pub origin: f64,
    pub horizon: f64,
    pub modulation: Option<Modulation>,
}

/// Traffic model attached to a catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum TrafficSpec {
    Renewal(Vec<IrtDistribution>),
    OnOff(OnOffParams),
    Mmpp(MmppParams),
    Snm(SnmParams),
}

impl TrafficSpec {
    pub fn n(&self) -> usize {
        match self {
            TrafficSpec::Renewal(d) => d.len(),
            TrafficSpec::OnOff(p) => p.n(),
            TrafficSpec::Mmpp(p) => p.n(),
            TrafficSpec::Snm(p) => p.n(),
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            TrafficSpec::Renewal(_) => "renewal",
            TrafficSpec::OnOff(_) => "onoff",
            TrafficSpec::Mmpp(_) => "mmpp",
            TrafficSpec::Snm(_) => "snm",
        }
    }

    /// Long-run mean request rate of each object. Shot-noise objects have no
    /// stationary rate; their expected lifetime request volume over the class
    /// lifespan is returned instead.
    pub fn mean_rates(&self) -> Vec<f64> {
        match self {
            TrafficSpec::Renewal(d) => d
                .iter()
                .map(|d| d.rate().expect("validated distribution"))
                .collect(),
            TrafficSpec::OnOff(p) => (0..p.n()).map(|i| p.on_rate[i] * p.pi_on(i)).collect(),
            TrafficSpec::Mmpp(p) => p.mean_rates(),
            TrafficSpec::Snm(p) => p
                .object_classes()
                .map(|c| c.mean_volume / c.mean_lifespan)
                .collect(),
        }
    }
}

/// Objects, their sizes, and (for synthetic traffic) the request model.
#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    sizes: Vec<f64>,
    traffic: Option<TrafficSpec>,
}

impl Catalog {
    pub fn new(sizes: Vec<f64>, traffic: Option<TrafficSpec>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::arg("catalog must contain at least one object"));
        }
        if let Some(bad) = sizes.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::arg(format!("object sizes must be > 0, got {bad}")));
        }
        if let Some(t) = &traffic {
            if t.n() != sizes.len() {
                return Err(Error::arg(format!(
                    "traffic model describes {} objects but catalog has {}",
                    t.n(),
                    sizes.len()
                )));
            }
        }
        Ok(Self { sizes, traffic })
    }

    pub fn unit(traffic: TrafficSpec) -> Result<Self> {
        Self::new(vec![1.0; traffic.n()], Some(traffic))
    }

    pub fn n(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn traffic(&self) -> Option<&TrafficSpec> {
        self.traffic.as_ref()
    }

    pub fn with_sizes(mut self, sizes: Vec<f64>) -> Result<Self> {
        if sizes.len() != self.n() {
            return Err(Error::arg("size vector length does not match catalog"));
        }
        self.sizes = sizes;
        Self::new(self.sizes, self.traffic)
    }

    /// Common object size, if every object has the same size.
    pub fn equal_size(&self) -> Option<f64> {
        let s0 = self.sizes[0];
        self.sizes.iter().all(|&s| s == s0).then_some(s0)
    }
}

impl RequestTrace {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Sorts by `(time, object)` and separates coincident times so the
    /// sequence is strictly increasing; ties keep object-id order.
    pub fn canonicalize(&mut self) {
        self.events
            .sort_by(|a, b| a.time.total_cmp(&b.time).then(a.object.cmp(&b.object)));
        let mut prev = f64::NEG_INFINITY;
        for e in &mut self.events {
            if e.time <= prev {
                e.time = (prev + TIE_JITTER).max(prev.next_up());
            }
            prev = e.time;
        }
        if let Some(last) = self.events.last() {
            self.horizon = self.horizon.max(last.time);
        }
    }

    pub fn is_strictly_ordered(&self) -> bool {
        self.events.windows(2).all(|w| w[0].time < w[1].time)
    }

    /// Per-object request counts.
    pub fn counts(&self, n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for e in &self.events {
            c[e.object] += 1;
        }
        c
    }

    /// Keeps the first `k` requests; the horizon becomes the last kept time
    /// and modulation annotations past it are dropped.
    pub fn truncate_requests(&mut self, k: usize) {
        if self.events.len() <= k {
            return;
        }
        self.events.truncate(k);
        self.horizon = self.events.last().map_or(0.0, |e| e.time);
        let h = self.horizon;
        match &mut self.modulation {
            Some(Modulation::OnOff { switches, .. }) => switches.retain(|s| s.time <= h),
            Some(Modulation::Mmpp { jumps, .. }) => jumps.retain(|j| j.0 <= h),
            _ => {}
        }
    }
}

/// Merges per-object event lists into one canonical trace.
pub(crate) fn merge_streams(
    per_object: Vec<Vec<f64>>,
    horizon: f64,
    modulation: Option<Modulation>,
) -> RequestTrace {
    let total = per_object.iter().map(Vec::len).sum();
    let mut events = Vec::with_capacity(total);
    for (object, times) in per_object.into_iter().enumerate() {
        events.extend(times.into_iter().map(|time| RequestEvent { time, object }));
    }
    let mut trace = RequestTrace {
        events,
        origin: 0.0,
        horizon,
        modulation,
    };
    trace.canonicalize();
    trace
}

pub(crate) fn check_horizon(horizon: f64) -> Result<()> {
    if horizon.is_finite() && horizon > 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("horizon must be finite and > 0, got {horizon}")))
    }
}

/// Generates the catalog's traffic model up to `horizon`.
pub fn generate(catalog: &Catalog, horizon: f64, seed: u64) -> Result<RequestTrace> {
    match catalog.traffic() {
        Some(TrafficSpec::Renewal(d)) => gen_renewal(d, horizon, seed),
        Some(TrafficSpec::OnOff(p)) => gen_onoff(p, horizon, seed),
        Some(TrafficSpec::Mmpp(p)) => gen_mmpp(p, horizon, seed),
        Some(TrafficSpec::Snm(p)) => gen_snm(p, horizon, seed),
        None => Err(Error::Unsupported(
            "catalog has no traffic model to generate from".into(),
        )),
    }
}

/// Generates exactly `k` requests: the horizon starts at `k` over the aggregate
/// rate and doubles until enough requests exist, then the trace is trimmed.
pub fn generate_requests(catalog: &Catalog, k: usize, seed: u64) -> Result<RequestTrace> {
    if k == 0 {
        return Err(Error::arg("request target must be >= 1"));
    }
    let traffic = catalog
        .traffic()
        .ok_or_else(|| Error::Unsupported("catalog has no traffic model".into()))?;
    let mut horizon = match traffic {
        TrafficSpec::Snm(p) => p.nominal_horizon(),
        _ => 1.05 * k as f64 / traffic.mean_rates().iter().sum::<f64>(),
    };
    for _ in 0..64 {
        let mut trace = generate(catalog, horizon, seed)?;
        if trace.len() >= k {
            trace.truncate_requests(k);
            return Ok(trace);
        }
        horizon *= 2.0;
    }
    Err(Error::arg(format!(
        "could not reach {k} requests; traffic model produces too few"
    )))
}
