use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Method;
use crate::stats::{ci95, mean, paired_difference, sample_sd};
use crate::Result;

/// One scored (replication, cache size, method) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub model: String,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: f64,
    pub method: String,
    pub rep: usize,
    pub hit_prob: f64,
    pub byte_hit_prob: f64,
    pub expected_hits: f64,
    /// Requests scored after warm-up.
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
    pub wall_ms: u64,
}

pub fn write_results_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}

/// How a method's replications compare with the hazard-rate bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The method is the bound itself.
    Reference,
    /// Mean paired difference to the bound is within two standard errors.
    Bounded,
    /// The method exceeds the bound by more than two standard errors.
    Exceeds,
    /// No bound in the run, or too few paired replications.
    NotApplicable,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Reference => "reference",
            Verdict::Bounded => "bounded",
            Verdict::Exceeds => "exceeds-bound",
            Verdict::NotApplicable => "n/a",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub method: String,
    pub b: f64,
    pub reps: usize,
    pub mean: f64,
    pub sd: Option<f64>,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub verdict: Verdict,
}

/// Per (experiment, method, B): mean hit probability across replications,
/// sample standard deviation, a 95% interval, and a paired comparison with
/// the HR-E bound (HR-VC when object sizes vary).
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    // (experiment, B bits, method) -> rep -> hit probability
    let mut cells: BTreeMap<(String, u64, String), BTreeMap<usize, f64>> = BTreeMap::new();
    for r in rows {
        cells
            .entry((r.experiment.clone(), r.b.to_bits(), r.method.clone()))
            .or_default()
            .insert(r.rep, r.hit_prob);
    }
    let bound_for = |exp: &str, b: u64| {
        [Method::HrE, Method::HrVc]
            .into_iter()
            .find_map(|m| cells.get(&(exp.to_string(), b, m.name().to_string())).map(|c| (m, c)))
    };
    let mut out = Vec::new();
    for ((exp, b, method), reps) in &cells {
        let values: Vec<f64> = reps.values().copied().collect();
        let (m, lo, hi) = ci95(&values);
        let verdict = match bound_for(exp, *b) {
            None => Verdict::NotApplicable,
            Some((bm, _)) if bm.name() == method => Verdict::Reference,
            Some((_, bound)) => {
                let (a, p): (Vec<f64>, Vec<f64>) = reps
                    .iter()
                    .filter_map(|(rep, v)| bound.get(rep).map(|bv| (*bv, *v)))
                    .unzip();
                match paired_difference(&a, &p) {
                    Some((d, se)) if d >= -2.0 * se => Verdict::Bounded,
                    Some(_) => Verdict::Exceeds,
                    None if a.len() == 1 => {
                        if a[0] >= p[0] {
                            Verdict::Bounded
                        } else {
                            Verdict::Exceeds
                        }
                    }
                    None => Verdict::NotApplicable,
                }
            }
        };
        out.push(SummaryRow {
            experiment: exp.clone(),
            method: method.clone(),
            b: f64::from_bits(*b),
            reps: values.len(),
            mean: m,
            sd: sample_sd(&values),
            ci_lo: lo,
            ci_hi: hi,
            verdict,
        });
    }
    out.sort_by(|x, y| {
        x.experiment
            .cmp(&y.experiment)
            .then(x.b.total_cmp(&y.b))
            .then(method_rank(&x.method).cmp(&method_rank(&y.method)))
    });
    out
}

fn method_rank(name: &str) -> (usize, String) {
    let idx = Method::parse(name).map_or(usize::MAX, |m| m as usize);
    (idx, name.to_string())
}

/// Mean hit probability of one method at one cache size.
pub fn mean_of(rows: &[ResultRow], method: &str, b: f64) -> Option<f64> {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == method && r.b == b)
        .map(|r| r.hit_prob)
        .collect();
    (!v.is_empty()).then(|| mean(&v))
}

pub fn write_summary_csv(summary: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["experiment", "method", "B", "reps", "mean", "sd", "ci_lo", "ci_hi", "verdict"])?;
    for s in summary {
        w.write_record([
            s.experiment.clone(),
            s.method.clone(),
            s.b.to_string(),
            s.reps.to_string(),
            s.mean.to_string(),
            s.sd.map_or_else(|| "n/a".to_string(), |v| v.to_string()),
            s.ci_lo.to_string(),
            s.ci_hi.to_string(),
            s.verdict.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format CSV for external plotting: `method,B,mean,ci_lo,ci_hi`.
pub fn write_plot_csv(summary: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["method", "B", "mean", "ci_lo", "ci_hi"])?;
    for s in summary {
        w.write_record([
            s.method.clone(),
            s.b.to_string(),
            s.mean.to_string(),
            s.ci_lo.to_string(),
            s.ci_hi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width text table of a summary.
pub fn render_summary(summary: &[SummaryRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<9} {:>10} {:>5} {:>9} {:>9} {:>9} {:>9}  verdict",
        "experiment", "method", "B", "reps", "mean", "sd", "ci_lo", "ci_hi"
    );
    for r in summary {
        let sd = r.sd.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"));
        let _ = writeln!(
            s,
            "{:<14} {:<9} {:>10} {:>5} {:>9.6} {:>9} {:>9.6} {:>9.6}  {}",
            r.experiment,
            r.method,
            r.b,
            r.reps,
            r.mean,
            sd,
            r.ci_lo,
            r.ci_hi,
            r.verdict.label()
        );
    }
    s
}
