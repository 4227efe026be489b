use std::path::Path;

use log::warn;

use crate::hazard_models::{fit_gpd_mle, GpdFit, MIN_FIT_SAMPLES};
use crate::traffic_gen::{load_trace_csv, Catalog, RequestEvent, RequestTrace, TrafficSpec};
use crate::{Error, Result};

/// Gaps at or below this are duplicate timestamps separated only by the
/// loader's tie-breaking jitter.
pub const DUPLICATE_GAP: f64 = 1e-9;

/// Why an object of a recorded trace was left out of the fitted catalog.
#[derive(Clone, Debug, PartialEq)]
pub enum FitStatus {
    Fitted,
    TooFewRequests,
    /// Fewer positive inter-request gaps than a fit needs.
    Unfittable,
    /// Fitted tail too heavy for a finite mean request rate.
    InfiniteMean,
}

impl FitStatus {
    pub fn label(&self) -> &'static str {
        match self {
            FitStatus::Fitted => "fitted",
            FitStatus::TooFewRequests => "too_few_requests",
            FitStatus::Unfittable => "unfittable",
            FitStatus::InfiniteMean => "infinite_mean",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectFit {
    pub original_id: String,
    pub requests: usize,
    pub fit: Option<GpdFit>,
    pub status: FitStatus,
}

/// A recorded trace restricted to the objects with a usable GPD fit.
#[derive(Clone, Debug)]
pub struct RealTraceFit {
    /// Catalog of kept objects with fitted renewal hazards.
    pub catalog: Catalog,
    /// Requests to kept objects, ids remapped densely.
    pub trace: RequestTrace,
    /// Original id of each kept object.
    pub kept: Vec<String>,
    /// Diagnostics for every object of the input trace.
    pub objects: Vec<ObjectFit>,
}

/// Loads a trace CSV and fits a GPD to each sufficiently requested object's
/// inter-request times. Gaps between duplicate timestamps are dropped.
pub fn fit_real_trace(path: impl AsRef<Path>, min_requests: usize) -> Result<RealTraceFit> {
    let loaded = load_trace_csv(path)?;
    let n = loaded.catalog.n();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); n];
    for e in &loaded.trace.events {
        times[e.object].push(e.time);
    }
    let mut objects = Vec::with_capacity(n);
    let mut dists = Vec::new();
    let mut kept = Vec::new();
    let mut remap = vec![usize::MAX; n];
    for (i, t) in times.iter().enumerate() {
        let original_id = loaded.mapping.originals[i].clone();
        let requests = t.len();
        let (fit, status) = if requests < min_requests {
            (None, FitStatus::TooFewRequests)
        } else {
            let gaps: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).filter(|&g| g > DUPLICATE_GAP).collect();
            if gaps.len() < MIN_FIT_SAMPLES {
                warn!("object {original_id}: only {} positive gaps, excluded", gaps.len());
                (None, FitStatus::Unfittable)
            } else {
                let fit = fit_gpd_mle(&gaps)?;
                match fit.to_distribution() {
                    Ok(d) if d.mean_irt().is_ok() => {
                        remap[i] = dists.len();
                        dists.push(d);
                        kept.push(original_id.clone());
                        (Some(fit), FitStatus::Fitted)
                    }
                    _ => {
                        warn!("object {original_id}: fitted shape {:.3} has no finite mean, excluded", fit.shape);
                        (Some(fit), FitStatus::InfiniteMean)
                    }
                }
            }
        };
        objects.push(ObjectFit {
            original_id,
            requests,
            fit,
            status,
        });
    }
    if dists.is_empty() {
        return Err(Error::InsufficientData {
            needed: min_requests,
            got: times.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    let sizes = (0..n)
        .filter(|&i| remap[i] != usize::MAX)
        .map(|i| loaded.catalog.sizes()[i])
        .collect();
    let catalog = Catalog::new(sizes, Some(TrafficSpec::Renewal(dists)))?;
    let events = loaded
        .trace
        .events
        .iter()
        .filter(|e| remap[e.object] != usize::MAX)
        .map(|e| RequestEvent {
            time: e.time,
            object: remap[e.object],
        })
        .collect();
    let trace = RequestTrace {
        events,
        origin: loaded.trace.origin,
        horizon: loaded.trace.horizon,
        modulation: None,
    };
    Ok(RealTraceFit {
        catalog,
        trace,
        kept,
        objects,
    })
}
