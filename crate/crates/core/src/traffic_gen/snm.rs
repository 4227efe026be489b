use rand_distr::{Distribution, Exp, Exp1, Poisson};
use rayon::prelude::*;

use super::{check_horizon, domain, merge_streams, substream, Modulation, RequestTrace};
use crate::{Error, Result};

/// One shot-noise content class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnmClass {
    /// Expected lifespan E[L].
    pub mean_lifespan: f64,
    /// Expected number of requests per object E[V].
    pub mean_volume: f64,
    /// Number of objects in the class.
    pub count: usize,
}

impl SnmClass {
    /// Rate of the Poisson process of object arrivals, E[V] / E[L].
    pub fn birth_rate(&self) -> f64 {
        self.mean_volume / self.mean_lifespan
    }

    /// Time constant of the exponentially decaying popularity profile.
    pub fn decay(&self) -> f64 {
        0.5 / 0.8 * self.mean_lifespan
    }
}

/// Shot-noise traffic: object ids are assigned class by class, in class order.
#[derive(Clone, Debug, PartialEq)]
pub struct SnmParams {
    classes: Vec<SnmClass>,
}

/// (E[L], E[V], n_c) of the four measured VoD classes.
const MEASURED_CLASSES: [(f64, f64, usize); 4] = [
    (1.14, 86.4, 29_481),
    (3.36, 41.9, 45_570),
    (6.40, 59.5, 27_435),
    (10.53, 36.9, 41_385),
];

impl SnmParams {
    pub fn new(classes: Vec<SnmClass>) -> Result<Self> {
        if classes.iter().map(|c| c.count).sum::<usize>() == 0 {
            return Err(Error::arg("shot-noise model needs at least one object"));
        }
        for c in &classes {
            if !(c.mean_lifespan.is_finite() && c.mean_lifespan > 0.0)
                || !(c.mean_volume.is_finite() && c.mean_volume > 0.0)
            {
                return Err(Error::arg(format!("shot-noise class parameters must be > 0: {c:?}")));
            }
        }
        Ok(Self { classes })
    }

    /// The four measured classes with catalog sizes scaled to `n` objects in
    /// total (largest-remainder rounding).
    pub fn measured_mix(n: usize) -> Result<Self> {
        let full: usize = MEASURED_CLASSES.iter().map(|c| c.2).sum();
        let exact: Vec<f64> = MEASURED_CLASSES
            .iter()
            .map(|c| c.2 as f64 * n as f64 / full as f64)
            .collect();
        let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())));
        let missing = n - counts.iter().sum::<usize>();
        for &c in order.iter().take(missing) {
            counts[c] += 1;
        }
        Self::new(
            MEASURED_CLASSES
                .iter()
                .zip(counts)
                .map(|(&(l, v, _), count)| SnmClass {
                    mean_lifespan: l,
                    mean_volume: v,
                    count,
                })
                .collect(),
        )
    }

    pub fn classes(&self) -> &[SnmClass] {
        &self.classes
    }

    pub fn n(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    /// Class of each object, in object-id order.
    pub fn object_classes(&self) -> impl Iterator<Item = &SnmClass> + '_ {
        self.classes
            .iter()
            .flat_map(|c| std::iter::repeat_n(c, c.count))
    }

    /// Decay time constant of each object.
    pub fn decays(&self) -> Vec<f64> {
        self.object_classes().map(SnmClass::decay).collect()
    }

    /// Time by which every class has typically released its objects, plus a
    /// few decay constants.
    pub fn nominal_horizon(&self) -> f64 {
        self.classes
            .iter()
            .filter(|c| c.count > 0)
            .map(|c| c.count as f64 / c.birth_rate() + 5.0 * c.decay())
            .fold(0.0, f64::max)
    }
}

/// Shot-noise traces. Object arrival times come from a homogeneous Poisson
/// process per class; each object draws V ~ Poisson(E[V]) and is requested
/// as an inhomogeneous Poisson process of intensity (V/a) exp(-(t - tau)/a),
/// generated by inverting the integrated intensity. Objects born after the
/// horizon never request; intensities are truncated at the horizon.
pub fn gen_snm(params: &SnmParams, horizon: f64, seed: u64) -> Result<RequestTrace> {
    check_horizon(horizon)?;
    let mut births = Vec::with_capacity(params.n());
    for (ci, class) in params.classes.iter().enumerate() {
        let mut rng = substream(seed, domain::CLASS, ci as u64);
        let gap = Exp::new(class.birth_rate()).expect("validated");
        let mut t = 0.0;
        for _ in 0..class.count {
            t += gap.sample(&mut rng);
            births.push(t);
        }
    }
    let classes: Vec<&SnmClass> = params.object_classes().collect();
    let per_object: Vec<(f64, Vec<f64>)> = (0..params.n())
        .into_par_iter()
        .map(|i| {
            let class = classes[i];
            let mut rng = substream(seed, domain::OBJECT, i as u64);
            let volume: f64 = Poisson::new(class.mean_volume)
                .expect("validated")
                .sample(&mut rng);
            let decay = class.decay();
            let tau = births[i];
            let mut times = Vec::new();
            // unit-rate arrivals mapped through the inverse integrated intensity
            let mut e: f64 = Exp1.sample(&mut rng);
            while e < volume {
                let t = tau - decay * (-e / volume).ln_1p();
                if t >= horizon {
                    break;
                }
                times.push(t);
                e += Distribution::<f64>::sample(&Exp1, &mut rng);
            }
            (volume, times)
        })
        .collect();
    let (volume, streams): (Vec<f64>, Vec<Vec<f64>>) = per_object.into_iter().unzip();
    Ok(merge_streams(
        streams,
        horizon,
        Some(Modulation::Shots {
            birth: births,
            volume,
        }),
    ))
}

/// Expected number of requests of each object within `[0, horizon)`, given the
/// realised births and volumes.
pub fn expected_counts(params: &SnmParams, birth: &[f64], volume: &[f64], horizon: f64) -> Vec<f64> {
    params
        .object_classes()
        .enumerate()
        .map(|(i, c)| {
            if birth[i] >= horizon {
                0.0
            } else {
                volume[i] * -(-(horizon - birth[i]) / c.decay()).exp_m1()
            }
        })
        .collect()
}
