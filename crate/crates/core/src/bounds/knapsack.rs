use crate::{Error, Result};

pub const KNAPSACK01_MAX_ITEMS: usize = 20;

/// Greedy solution of a fractional knapsack.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackSolution {
    /// Item indices by decreasing value/size ratio, ties to the lower index.
    pub order: Vec<usize>,
    /// Fraction of each item (indexed by item, not by rank) placed.
    pub fractions: Vec<f64>,
    /// Number of items placed entirely.
    pub last_full: usize,
    /// Item partly placed, if any.
    pub marginal: Option<usize>,
    pub marginal_fraction: f64,
    pub objective: f64,
}

/// Solves max Σ v_i x_i subject to Σ s_i x_i ≤ B, 0 ≤ x ≤ 1 greedily.
pub fn solve_fractional_knapsack(values: &[f64], sizes: &[f64], capacity: f64) -> Result<KnapsackSolution> {
    check_items(values, sizes, capacity)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (values[a] / sizes[a], values[b] / sizes[b]);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut fractions = vec![0.0; n];
    let mut used = 0.0;
    let mut last_full = 0;
    let mut marginal = None;
    let mut marginal_fraction = 0.0;
    for &i in &order {
        if used + sizes[i] <= capacity {
            fractions[i] = 1.0;
            used += sizes[i];
            last_full += 1;
        } else {
            let x = (capacity - used) / sizes[i];
            if x > 0.0 {
                fractions[i] = x;
                marginal = Some(i);
                marginal_fraction = x;
            }
            break;
        }
    }
    let objective = values.iter().zip(&fractions).map(|(v, x)| v * x).sum();
    Ok(KnapsackSolution {
        order,
        fractions,
        last_full,
        marginal,
        marginal_fraction,
        objective,
    })
}

/// Exact 0-1 knapsack optimum by subset enumeration.
pub fn brute_force_knapsack01(values: &[f64], sizes: &[f64], capacity: f64) -> Result<f64> {
    check_items(values, sizes, capacity)?;
    let n = values.len();
    if n > KNAPSACK01_MAX_ITEMS {
        return Err(Error::TooLarge(format!(
            "0-1 knapsack enumeration limited to {KNAPSACK01_MAX_ITEMS} items, got {n}"
        )));
    }
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        let (mut s, mut v) = (0.0, 0.0);
        for i in 0..n {
            if mask >> i & 1 == 1 {
                s += sizes[i];
                v += values[i];
            }
        }
        if s <= capacity {
            best = best.max(v);
        }
    }
    Ok(best)
}

fn check_items(values: &[f64], sizes: &[f64], capacity: f64) -> Result<()> {
    if values.len() != sizes.len() {
        return Err(Error::arg("values and sizes differ in length"));
    }
    if sizes.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::arg("sizes must be finite and positive"));
    }
    if values.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
        return Err(Error::arg("values must be finite and nonnegative"));
    }
    if !(capacity.is_finite() && capacity >= 0.0) {
        return Err(Error::arg(format!("capacity must be finite and >= 0, got {capacity}")));
    }
    Ok(())
}
