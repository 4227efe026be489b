use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{Error, Result};

/// Methods an experiment can score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    HrE,
    HrVb,
    HrVc,
    Belady,
    Analytic,
    Lru,
    Fifo,
    Random,
    Static,
    Lfu,
    Gdsf,
}

impl Method {
    pub const ALL: [Method; 11] = [
        Method::HrE,
        Method::HrVb,
        Method::HrVc,
        Method::Belady,
        Method::Analytic,
        Method::Lru,
        Method::Fifo,
        Method::Random,
        Method::Static,
        Method::Lfu,
        Method::Gdsf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::HrE => "HR-E",
            Method::HrVb => "HR-VB",
            Method::HrVc => "HR-VC",
            Method::Belady => "BELADY",
            Method::Analytic => "ANALYTIC",
            Method::Lru => "LRU",
            Method::Fifo => "FIFO",
            Method::Random => "RANDOM",
            Method::Static => "STATIC",
            Method::Lfu => "LFU",
            Method::Gdsf => "GDSF",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s))
    }

    /// Online policies, as opposed to bounds.
    pub fn is_policy(self) -> bool {
        self >= Method::Lru
    }

    /// Methods defined only for equal object sizes.
    pub fn needs_equal_sizes(self) -> bool {
        matches!(self, Method::HrE | Method::Belady | Method::Analytic)
    }
}

fn default_replications() -> usize {
    1
}

fn default_warmup() -> f64 {
    0.1
}

fn default_zipf() -> f64 {
    0.8
}

fn default_total_rate() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Exact number of requests per replication.
    pub requests: Option<usize>,
    /// Simulated time per replication, when `requests` is not given.
    pub horizon: Option<f64>,
    #[serde(default = "default_warmup")]
    pub warmup: f64,
    /// Cache capacities: object counts for unit sizes, bytes otherwise.
    pub cache_sizes: Vec<f64>,
    pub methods: Vec<String>,
    pub output: Option<PathBuf>,
    /// Record wall-clock time per cell; off keeps outputs byte-reproducible.
    #[serde(default)]
    pub timing: bool,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum TrafficSection {
    /// Independent renewal processes with Zipf-distributed rates.
    Renewal {
        n: usize,
        /// exponential | gpd | uniform | hyperexponential | gamma | erlang
        family: String,
        /// GPD k, Gamma or Erlang shape; defaults 0.48, 0.5, 2.
        shape: Option<f64>,
        /// Hyperexponential squared coefficient of variation; default 2.
        scv: Option<f64>,
        #[serde(default = "default_zipf")]
        zipf_exponent: f64,
        #[serde(default = "default_total_rate")]
        total_rate: f64,
    },
    /// On-off modulated Poisson objects with Pareto request volumes.
    Onoff {
        n: usize,
        #[serde(default = "OnOffDefaults::t_on")]
        t_on: f64,
        #[serde(default = "OnOffDefaults::t_off")]
        t_off: f64,
        #[serde(default = "OnOffDefaults::volume_mean")]
        volume_mean: f64,
        #[serde(default = "OnOffDefaults::volume_shape")]
        volume_shape: f64,
    },
    /// Two-state MMPP: Zipf rates in state 1, reversed in state 2.
    Mmpp {
        n: usize,
        #[serde(default = "MmppDefaults::alpha")]
        alpha: f64,
        #[serde(default = "MmppDefaults::beta")]
        beta: f64,
        #[serde(default = "default_zipf")]
        zipf_exponent: f64,
        #[serde(default = "default_total_rate")]
        total_rate: f64,
    },
    /// Shot-noise objects with the measured four-class mix scaled to `n`.
    Snm { n: usize },
    /// A recorded trace; per-object GPD renewal hazards are fitted to it.
    Trace {
        path: PathBuf,
        #[serde(default = "TraceDefaults::min_requests")]
        min_requests: usize,
    },
}

struct OnOffDefaults;
impl OnOffDefaults {
    fn t_on() -> f64 {
        7.0
    }
    fn t_off() -> f64 {
        63.0
    }
    fn volume_mean() -> f64 {
        10.0
    }
    fn volume_shape() -> f64 {
        2.0
    }
}

struct MmppDefaults;
impl MmppDefaults {
    fn alpha() -> f64 {
        2e-3
    }
    fn beta() -> f64 {
        1.6e-3
    }
}

struct TraceDefaults;
impl TraceDefaults {
    fn min_requests() -> usize {
        100
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SizesSection {
    #[default]
    Unit,
    BoundedPareto {
        #[serde(default = "ParetoDefaults::shape")]
        shape: f64,
        #[serde(default = "ParetoDefaults::min")]
        min: f64,
        #[serde(default = "ParetoDefaults::max")]
        max: f64,
    },
    /// Sizes from the trace's third column.
    Trace,
}

struct ParetoDefaults;
impl ParetoDefaults {
    fn shape() -> f64 {
        1.8
    }
    fn min() -> f64 {
        5.0
    }
    fn max() -> f64 {
        15.0
    }
}

/// A parsed and validated experiment description.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub traffic: TrafficSection,
    #[serde(default)]
    pub sizes: SizesSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; a relative trace path resolves against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })?;
        if let TrafficSection::Trace { path: p, .. } = &mut cfg.traffic {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for m in &self.experiment.methods {
            let method = Method::parse(m).ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                Error::Config(format!("experiment.methods: unknown method {m:?}; known: {}", known.join(", ")))
            })?;
            if !out.contains(&method) {
                out.push(method);
            }
        }
        Ok(out)
    }

    pub fn unit_sizes(&self) -> bool {
        matches!(self.sizes, SizesSection::Unit)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        let e = &self.experiment;
        if e.id.is_empty() || e.id.contains([',', '"', '\n']) {
            return cfg("experiment.id must be non-empty without commas or quotes".into());
        }
        if e.replications == 0 {
            return cfg("experiment.replications must be >= 1".into());
        }
        if !(0.0..=0.5).contains(&e.warmup) {
            return cfg(format!("experiment.warmup must lie in [0, 0.5], got {}", e.warmup));
        }
        match (e.requests, e.horizon) {
            (Some(0), _) => return cfg("experiment.requests must be >= 1".into()),
            (Some(_), Some(_)) => return cfg("experiment: give requests or horizon, not both".into()),
            (None, Some(h)) if !(h.is_finite() && h > 0.0) => {
                return cfg(format!("experiment.horizon must be > 0, got {h}"))
            }
            (None, None) if !matches!(self.traffic, TrafficSection::Trace { .. }) => {
                return cfg("experiment: one of requests or horizon is required".into())
            }
            _ => {}
        }
        if e.cache_sizes.is_empty() {
            return cfg("experiment.cache_sizes must not be empty".into());
        }
        for &b in &e.cache_sizes {
            if !(b.is_finite() && b > 0.0) {
                return cfg(format!("experiment.cache_sizes: values must be > 0, got {b}"));
            }
            if self.unit_sizes() && b.fract() != 0.0 {
                return cfg(format!("experiment.cache_sizes: unit-size caches hold whole objects, got {b}"));
            }
        }
        let methods = self.methods()?;
        if methods.is_empty() {
            return cfg("experiment.methods must not be empty".into());
        }
        if !self.unit_sizes() {
            if let Some(m) = methods.iter().find(|m| m.needs_equal_sizes()) {
                return cfg(format!(
                    "experiment.methods: {} needs unit sizes; use HR-VB/HR-VC for variable sizes",
                    m.name()
                ));
            }
        }
        let n = match &self.traffic {
            TrafficSection::Renewal { n, family, shape, scv, zipf_exponent, total_rate } => {
                if !matches!(
                    family.as_str(),
                    "exponential" | "gpd" | "uniform" | "hyperexponential" | "gamma" | "erlang"
                ) {
                    return cfg(format!("traffic.family: unknown family {family:?}"));
                }
                if scv.is_some() && family != "hyperexponential" {
                    return cfg("traffic.scv applies to the hyperexponential family only".into());
                }
                if shape.is_some() && !matches!(family.as_str(), "gpd" | "gamma" | "erlang") {
                    return cfg(format!("traffic.shape does not apply to the {family} family"));
                }
                if !(zipf_exponent.is_finite() && *zipf_exponent >= 0.0) || !(total_rate.is_finite() && *total_rate > 0.0) {
                    return cfg("traffic: zipf_exponent must be >= 0 and total_rate > 0".into());
                }
                if methods.contains(&Method::Analytic) && family != "exponential" {
                    return cfg(format!("ANALYTIC has no closed form for {family} renewal traffic"));
                }
                Some(*n)
            }
            TrafficSection::Onoff { n, .. } | TrafficSection::Mmpp { n, .. } => Some(*n),
            TrafficSection::Snm { n } => {
                if methods.contains(&Method::Analytic) {
                    return cfg("ANALYTIC has no closed form for shot-noise traffic".into());
                }
                Some(*n)
            }
            TrafficSection::Trace { min_requests, .. } => {
                if methods.contains(&Method::Analytic) {
                    return cfg("ANALYTIC is unavailable for recorded traces".into());
                }
                if *min_requests == 0 {
                    return cfg("traffic.min_requests must be >= 1".into());
                }
                None
            }
        };
        if n == Some(0) {
            return cfg("traffic.n must be >= 1".into());
        }
        if let Some(n) = n {
            if self.unit_sizes() {
                if let Some(&b) = e.cache_sizes.iter().find(|&&b| b > n as f64) {
                    return cfg(format!("experiment.cache_sizes: {b} exceeds the catalog size {n}"));
                }
            }
        }
        match &self.sizes {
            SizesSection::BoundedPareto { shape, min, max } => {
                if !(*shape > 0.0 && *min > 0.0 && min < max && max.is_finite()) {
                    return cfg("sizes: need shape > 0 and 0 < min < max".into());
                }
            }
            SizesSection::Trace if !matches!(self.traffic, TrafficSection::Trace { .. }) => {
                return cfg("sizes.model = \"trace\" needs traffic.model = \"trace\"".into());
            }
            _ => {}
        }
        Ok(())
    }
}
