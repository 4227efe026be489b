use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use super::score::{warmup_count, BoundScore};
use crate::traffic_gen::{Catalog, RequestTrace};
use crate::{Error, Result};

pub const BRUTE_FORCE_MAX_OBJECTS: usize = 6;
pub const BRUTE_FORCE_MAX_REQUESTS: usize = 16;

fn next_uses(objects: &[usize], n: usize) -> Vec<usize> {
    let mut next = vec![usize::MAX; objects.len()];
    let mut seen = vec![usize::MAX; n];
    for (k, &o) in objects.iter().enumerate().rev() {
        next[k] = seen[o];
        seen[o] = k;
    }
    next
}

/// Hit indicators of Bélády's MIN with bypass on an object sequence.
///
/// On a miss the requested object is admitted if there is room; otherwise
/// the cached object used farthest in the future is evicted, unless the
/// requested object itself is used later than all of them, in which case
/// it is not admitted. Ties evict the lowest id.
pub(crate) fn belady_hits(objects: &[usize], n: usize, b: usize) -> Vec<bool> {
    let next = next_uses(objects, n);
    let mut hits = Vec::with_capacity(objects.len());
    if b == 0 {
        hits.resize(objects.len(), false);
        return hits;
    }
    // cached objects keyed by (next use, Reverse(id)); last = eviction victim
    let mut cached: BTreeSet<(usize, Reverse<usize>)> = BTreeSet::new();
    let mut key_of: Vec<Option<usize>> = vec![None; n];
    for (k, &o) in objects.iter().enumerate() {
        let nu = next[k];
        if let Some(old) = key_of[o] {
            hits.push(true);
            cached.remove(&(old, Reverse(o)));
            cached.insert((nu, Reverse(o)));
            key_of[o] = Some(nu);
            continue;
        }
        hits.push(false);
        if cached.len() < b {
            cached.insert((nu, Reverse(o)));
            key_of[o] = Some(nu);
            continue;
        }
        let &(far, Reverse(victim)) = cached.last().expect("cache full");
        if far > nu {
            cached.pop_last();
            key_of[victim] = None;
            cached.insert((nu, Reverse(o)));
            key_of[o] = Some(nu);
        }
    }
    hits
}

/// Offline optimal hit count for equal-size objects on a full trace.
pub fn belady_score(trace: &RequestTrace, catalog: &Catalog, b: usize, warmup: f64) -> Result<BoundScore> {
    let n = catalog.n();
    let Some(size) = catalog.equal_size() else {
        return Err(Error::Unsupported(
            "Bélády's bound is only defined here for equal object sizes".into(),
        ));
    };
    if b > n {
        return Err(Error::CacheTooLarge { capacity: b, n });
    }
    let objects: Vec<usize> = trace.events.iter().map(|e| e.object).collect();
    if let Some(&o) = objects.iter().find(|&&o| o >= n) {
        return Err(Error::arg(format!("trace requests object {o} outside catalog")));
    }
    let hits = belady_hits(&objects, n, b);
    let skip = warmup_count(objects.len(), warmup);
    let mut score = BoundScore::default();
    for &h in &hits[skip..] {
        score.add(if h { 1.0 } else { 0.0 }, size);
    }
    Ok(score.finish())
}

/// Maximum hits over every admission and eviction sequence, by exhaustive
/// search with memoization on (position, cache content).
pub fn brute_force_offline_optimal(objects: &[usize], n: usize, b: usize) -> Result<usize> {
    if n > BRUTE_FORCE_MAX_OBJECTS || objects.len() > BRUTE_FORCE_MAX_REQUESTS {
        return Err(Error::TooLarge(format!(
            "brute force limited to {BRUTE_FORCE_MAX_OBJECTS} objects and \
             {BRUTE_FORCE_MAX_REQUESTS} requests, got {n} and {}",
            objects.len()
        )));
    }
    if let Some(&o) = objects.iter().find(|&&o| o >= n) {
        return Err(Error::arg(format!("object {o} outside catalog of {n}")));
    }
    fn go(objects: &[usize], k: usize, cache: u32, b: usize, memo: &mut HashMap<(usize, u32), usize>) -> usize {
        if k == objects.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, cache)) {
            return v;
        }
        let bit = 1u32 << objects[k];
        let best = if cache & bit != 0 {
            1 + go(objects, k + 1, cache, b, memo)
        } else {
            let mut best = go(objects, k + 1, cache, b, memo);
            if (cache.count_ones() as usize) < b {
                best = best.max(go(objects, k + 1, cache | bit, b, memo));
            } else if b > 0 {
                let mut rest = cache;
                while rest != 0 {
                    let victim = rest & rest.wrapping_neg();
                    rest &= rest - 1;
                    best = best.max(go(objects, k + 1, (cache & !victim) | bit, b, memo));
                }
            }
            best
        };
        memo.insert((k, cache), best);
        best
    }
    Ok(go(objects, 0, 0, b, &mut HashMap::new()))
}
