//! Online on-demand replacement policies simulated request by request.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{warmup_count, BoundScore};
use crate::traffic_gen::{Catalog, RequestTrace};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum PolicySpec {
    Lru,
    Fifo,
    Random,
    /// Keeps the highest-rate objects forever; `rates` covers every object.
    Static { rates: Vec<f64> },
    Lfu,
    Gdsf,
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Lru => "LRU",
            PolicySpec::Fifo => "FIFO",
            PolicySpec::Random => "RANDOM",
            PolicySpec::Static { .. } => "STATIC",
            PolicySpec::Lfu => "LFU",
            PolicySpec::Gdsf => "GDSF",
        }
    }
}

/// GDSF priority of an object: `clock + frequency / size`.
pub fn gdsf_priority(frequency: u64, size: f64, clock: f64) -> f64 {
    clock + frequency as f64 / size
}

/// Whether `size` more bytes fit, forgiving summation-order rounding.
fn fits(used: f64, size: f64, capacity: f64) -> bool {
    used + size <= capacity * (1.0 + 1e-12)
}

/// Nonnegative floats compare like their bit patterns.
fn ordered(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    x.to_bits()
}

#[derive(Clone, Debug)]
enum Order {
    /// Eviction by smallest key; keys are (primary, secondary) per object.
    Keyed(BTreeSet<(u64, u64, usize)>),
    Random { slots: Vec<usize>, rng: ChaCha8Rng },
    Frozen,
}

/// Cache contents plus the metadata the policy needs to pick victims.
#[derive(Clone, Debug)]
pub struct CacheState {
    kind: PolicySpec,
    capacity: f64,
    sizes: Vec<f64>,
    used: f64,
    count: usize,
    cached: Vec<bool>,
    slot: Vec<usize>,
    key: Vec<(u64, u64)>,
    freq: Vec<u64>,
    clock: f64,
    tick: u64,
    order: Order,
}

impl CacheState {
    pub fn new(catalog: &Catalog, spec: PolicySpec, capacity: f64, seed: u64) -> Result<Self> {
        if !(capacity.is_finite() && capacity >= 0.0) {
            return Err(Error::arg(format!("capacity must be finite and >= 0, got {capacity}")));
        }
        let n = catalog.n();
        let sizes = catalog.sizes().to_vec();
        let order = match &spec {
            PolicySpec::Random => Order::Random {
                slots: Vec::new(),
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
            PolicySpec::Static { .. } => Order::Frozen,
            _ => Order::Keyed(BTreeSet::new()),
        };
        let mut state = CacheState {
            kind: spec,
            capacity,
            sizes,
            used: 0.0,
            count: 0,
            cached: vec![false; n],
            slot: vec![usize::MAX; n],
            key: vec![(0, 0); n],
            freq: vec![0; n],
            clock: 0.0,
            tick: 0,
            order,
        };
        if let PolicySpec::Static { rates } = &state.kind {
            if rates.len() != n {
                return Err(Error::arg(format!("STATIC needs {n} rates, got {}", rates.len())));
            }
            let mut by_rate: Vec<usize> = (0..n).collect();
            by_rate.sort_by(|&a, &b| rates[b].total_cmp(&rates[a]).then(a.cmp(&b)));
            for i in by_rate {
                if !fits(state.used, state.sizes[i], capacity) {
                    break;
                }
                state.used += state.sizes[i];
                state.count += 1;
                state.cached[i] = true;
            }
        }
        Ok(state)
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn used(&self) -> f64 {
        self.used
    }

    pub fn contains(&self, object: usize) -> bool {
        self.cached[object]
    }

    /// Cached object ids in increasing order.
    pub fn contents(&self) -> Vec<usize> {
        (0..self.cached.len()).filter(|&i| self.cached[i]).collect()
    }

    pub fn gdsf_clock(&self) -> f64 {
        self.clock
    }

    /// Serves one request; returns whether it was a hit against the state
    /// just before the request.
    pub fn request(&mut self, object: usize) -> bool {
        self.tick += 1;
        self.freq[object] += 1;
        let hit = self.cached[object];
        if hit {
            self.touch(object);
        } else {
            self.admit(object);
        }
        hit
    }

    fn new_key(&self, object: usize) -> (u64, u64) {
        match self.kind {
            PolicySpec::Lru | PolicySpec::Fifo => (self.tick, 0),
            PolicySpec::Lfu => (self.freq[object], self.tick),
            PolicySpec::Gdsf => (ordered(gdsf_priority(self.freq[object], self.sizes[object], self.clock)), self.tick),
            _ => (0, 0),
        }
    }

    fn touch(&mut self, object: usize) {
        if matches!(self.kind, PolicySpec::Fifo) {
            return;
        }
        let key = self.new_key(object);
        if let Order::Keyed(set) = &mut self.order {
            let (a, b) = self.key[object];
            set.remove(&(a, b, object));
            set.insert((key.0, key.1, object));
            self.key[object] = key;
        }
    }

    fn admit(&mut self, object: usize) {
        let size = self.sizes[object];
        if matches!(self.order, Order::Frozen) || !fits(0.0, size, self.capacity) {
            return;
        }
        while !fits(self.used, size, self.capacity) {
            self.evict_one();
        }
        if matches!(self.kind, PolicySpec::Gdsf) {
            // frequency counts only the current residency
            self.freq[object] = 1;
        }
        self.cached[object] = true;
        self.used += size;
        self.count += 1;
        let key = self.new_key(object);
        match &mut self.order {
            Order::Keyed(set) => {
                set.insert((key.0, key.1, object));
                self.key[object] = key;
            }
            Order::Random { slots, .. } => {
                self.slot[object] = slots.len();
                slots.push(object);
            }
            Order::Frozen => unreachable!(),
        }
    }

    fn evict_one(&mut self) {
        let victim = match &mut self.order {
            Order::Keyed(set) => {
                let (a, _, v) = set.pop_first().expect("evicting from an empty cache");
                if matches!(self.kind, PolicySpec::Gdsf) {
                    self.clock = f64::from_bits(a);
                }
                v
            }
            Order::Random { slots, rng } => {
                let idx = rng.random_range(0..slots.len());
                let v = slots.swap_remove(idx);
                if idx < slots.len() {
                    self.slot[slots[idx]] = idx;
                }
                v
            }
            Order::Frozen => unreachable!(),
        };
        self.cached[victim] = false;
        self.used -= self.sizes[victim];
        self.count -= 1;
        if self.count == 0 {
            // drop rounding drift so an object of exactly the capacity fits
            self.used = 0.0;
        }
        if matches!(self.kind, PolicySpec::Gdsf) {
            self.freq[victim] = 0;
        }
    }
}

/// Simulates a policy over a trace and scores the post-warm-up requests.
///
/// `capacity` is in the same unit as object sizes; with unit sizes it is the
/// number of objects. Objects larger than the cache are never admitted.
pub fn simulate_policy(
    trace: &RequestTrace,
    catalog: &Catalog,
    spec: PolicySpec,
    capacity: f64,
    seed: u64,
    warmup: f64,
) -> Result<BoundScore> {
    let n = catalog.n();
    if let Some(e) = trace.events.iter().find(|e| e.object >= n) {
        return Err(Error::arg(format!("trace requests object {} outside catalog", e.object)));
    }
    let mut cache = CacheState::new(catalog, spec, capacity, seed)?;
    let skip = warmup_count(trace.len(), warmup);
    let sizes = catalog.sizes();
    let mut score = BoundScore::default();
    for (k, e) in trace.events.iter().enumerate() {
        let hit = cache.request(e.object);
        if k >= skip {
            score.add(if hit { 1.0 } else { 0.0 }, sizes[e.object]);
        }
    }
    Ok(score.finish())
}
