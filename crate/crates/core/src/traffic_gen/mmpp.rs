use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use super::{check_horizon, domain, merge_streams, substream, Modulation, RequestTrace};
use crate::{Error, Result};

/// Markov-modulated Poisson traffic. In environment state `x` object `i` is
/// requested at rate `rates[x][i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MmppParams {
    transitions: Vec<Vec<f64>>,
    rates: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MmppParams {
    /// `transitions[x][y]` is the jump rate from `x` to `y` (diagonal ignored).
    pub fn new(transitions: Vec<Vec<f64>>, rates: Vec<Vec<f64>>) -> Result<Self> {
        let m = rates.len();
        if m == 0 || transitions.len() != m || transitions.iter().any(|r| r.len() != m) {
            return Err(Error::arg("MMPP needs a square transition matrix matching the state count"));
        }
        let n = rates[0].len();
        if n == 0 || rates.iter().any(|r| r.len() != n) {
            return Err(Error::arg("every MMPP state needs one rate per object"));
        }
        for r in rates.iter().flatten() {
            if !(r.is_finite() && *r > 0.0) {
                return Err(Error::arg(format!("MMPP request rates must be > 0, got {r}")));
            }
        }
        for (x, row) in transitions.iter().enumerate() {
            for (y, q) in row.iter().enumerate() {
                if x != y && !(q.is_finite() && *q >= 0.0) {
                    return Err(Error::arg(format!("transition rate {x}->{y} must be >= 0, got {q}")));
                }
            }
        }
        let stationary = stationary_distribution(&transitions)?;
        Ok(Self {
            transitions,
            rates,
            stationary,
        })
    }

    /// Two states with jump rates `alpha` (1→2) and `beta` (2→1).
    pub fn two_state(alpha: f64, beta: f64, rates1: Vec<f64>, rates2: Vec<f64>) -> Result<Self> {
        Self::new(vec![vec![0.0, alpha], vec![beta, 0.0]], vec![rates1, rates2])
    }

    pub fn single_state(rates: Vec<f64>) -> Result<Self> {
        Self::new(vec![vec![0.0]], vec![rates])
    }

    pub fn n(&self) -> usize {
        self.rates[0].len()
    }

    pub fn states(&self) -> usize {
        self.rates.len()
    }

    pub fn rates(&self, state: usize) -> &[f64] {
        &self.rates[state]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn exit_rate(&self, state: usize) -> f64 {
        self.transitions[state]
            .iter()
            .enumerate()
            .filter(|(y, _)| *y != state)
            .map(|(_, q)| q)
            .sum()
    }

    /// Time-average request rate of each object.
    pub fn mean_rates(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                self.stationary
                    .iter()
                    .zip(&self.rates)
                    .map(|(g, r)| g * r[i])
                    .sum()
            })
            .collect()
    }
}

/// Solves gamma Q = 0 with sum(gamma) = 1 by Gaussian elimination.
fn stationary_distribution(transitions: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = transitions.len();
    if m == 1 {
        return Ok(vec![1.0]);
    }
    // rows = equations: sum_x gamma_x Q[x][y] = 0 for y < m-1, then normalisation
    let mut a = vec![vec![0.0; m + 1]; m];
    for y in 0..m - 1 {
        for x in 0..m {
            a[y][x] = if x == y {
                -transitions[x]
                    .iter()
                    .enumerate()
                    .filter(|(z, _)| *z != x)
                    .map(|(_, q)| q)
                    .sum::<f64>()
            } else {
                transitions[x][y]
            };
        }
    }
    for x in 0..m {
        a[m - 1][x] = 1.0;
    }
    a[m - 1][m] = 1.0;

    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::arg("MMPP environment chain is not irreducible"));
        }
        a.swap(col, pivot);
        for row in 0..m {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..=m {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    let gamma: Vec<f64> = (0..m).map(|x| a[x][m] / a[x][x]).collect();
    if gamma.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::arg("MMPP environment chain is not irreducible"));
    }
    let total: f64 = gamma.iter().sum();
    Ok(gamma.into_iter().map(|g| g / total).collect())
}

/// Simulates the environment chain (started from its stationary law), then
/// generates each object's piecewise-constant-rate Poisson stream over the
/// state intervals. The state path is attached to the trace.
pub fn gen_mmpp(params: &MmppParams, horizon: f64, seed: u64) -> Result<RequestTrace> {
    check_horizon(horizon)?;
    let mut chain = substream(seed, domain::CHAIN, 0);
    let u: f64 = chain.random();
    let mut acc = 0.0;
    let mut state = params.states() - 1;
    for (x, g) in params.stationary.iter().enumerate() {
        acc += g;
        if u < acc {
            state = x;
            break;
        }
    }
    let initial_state = state;
    let mut jumps = Vec::new();
    if params.states() > 1 {
        let mut t = 0.0;
        loop {
            let exit = params.exit_rate(state);
            if exit <= 0.0 {
                break;
            }
            t += Exp::new(exit).expect("positive exit rate").sample(&mut chain);
            if t >= horizon {
                break;
            }
            let mut target = chain.random::<f64>() * exit;
            let mut next = state;
            for (y, q) in params.transitions[state].iter().enumerate() {
                if y == state {
                    continue;
                }
                next = y;
                if target < *q {
                    break;
                }
                target -= q;
            }
            state = next;
            jumps.push((t, state));
        }
    }

    // state intervals [start, end)
    let mut intervals = Vec::with_capacity(jumps.len() + 1);
    let mut start = 0.0;
    let mut cur = initial_state;
    for &(t, s) in &jumps {
        intervals.push((start, t, cur));
        start = t;
        cur = s;
    }
    intervals.push((start, horizon, cur));

    let per_object: Vec<Vec<f64>> = (0..params.n())
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, domain::OBJECT, i as u64);
            let mut times = Vec::new();
            for &(a, b, x) in &intervals {
                let gap = Exp::new(params.rates[x][i]).expect("validated rate");
                let mut s = a + gap.sample(&mut rng);
                while s < b {
                    times.push(s);
                    s += gap.sample(&mut rng);
                }
            }
            times
        })
        .collect();

    Ok(merge_streams(
        per_object,
        horizon,
        Some(Modulation::Mmpp {
            initial_state,
            jumps,
        }),
    ))
}
