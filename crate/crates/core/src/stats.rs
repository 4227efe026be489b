//! Small sample statistics used by the experiment summaries and the
//! Monte-Carlo checks.

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; `None` below two observations.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> Option<f64> {
    sample_sd(xs).map(|s| s / (xs.len() as f64).sqrt())
}

/// Mean with a normal-approximation 95% interval (degenerate for one value).
pub fn ci95(xs: &[f64]) -> (f64, f64, f64) {
    let m = mean(xs);
    let half = std_error(xs).map_or(0.0, |se| Z95 * se);
    (m, m - half, m + half)
}

/// Mean and standard error of a correlated sequence from `batches`
/// contiguous batch means. Any remainder is dropped from the tail.
pub fn batch_means(xs: &[f64], batches: usize) -> Option<(f64, f64)> {
    if batches < 2 || xs.len() < batches {
        return None;
    }
    let len = xs.len() / batches;
    let means: Vec<f64> = xs.chunks_exact(len).take(batches).map(mean).collect();
    Some((mean(&means), std_error(&means)?))
}

/// Mean and standard error of the paired differences `a - b`.
pub fn paired_difference(a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    if a.len() != b.len() {
        return None;
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Some((mean(&d), std_error(&d)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((sample_sd(&xs).unwrap() - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(sample_sd(&[1.0]), None);
        assert_eq!(ci95(&[0.3]), (0.3, 0.3, 0.3));
    }

    #[test]
    fn ci_half_width() {
        let xs: Vec<f64> = (0..20).map(|i| (i % 2) as f64).collect();
        let (m, lo, hi) = ci95(&xs);
        let sd = sample_sd(&xs).unwrap();
        assert_eq!(m, 0.5);
        assert!(((hi - lo) / 2.0 - 1.96 * sd / 20f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn batches_and_pairs() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (m, se) = batch_means(&xs, 4).unwrap();
        assert_eq!(m, 49.5);
        assert!(se > 0.0);
        assert!(batch_means(&xs, 1).is_none());
        let (d, _) = paired_difference(&[2.0, 3.0, 5.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((d - 7.0 / 3.0).abs() < 1e-15);
    }
}
