//! Batch bootstrap: resample whole batches, rerun the full estimator per resample.

use rand::Rng;

use crate::error::{Error, Result};

/// Pool resampled batches into one mean vector, weighting each batch by its count.
fn pooled_mean(batch_means: &[Vec<f64>], counts: &[u64], picks: &[usize]) -> Vec<f64> {
    let width = batch_means[0].len();
    let mut acc = vec![0.0; width];
    let mut total = 0.0;
    for &b in picks {
        let w = counts[b] as f64;
        total += w;
        for (a, x) in acc.iter_mut().zip(&batch_means[b]) {
            *a += w * x;
        }
    }
    for a in acc.iter_mut() {
        *a /= total;
    }
    acc
}

/// Standard deviation of `estimator` over `resamples` bootstrap replicates.
///
/// Each replicate draws `K` batches with replacement and hands the pooled mean of
/// every column to `estimator`, which returns the derived quantities (for example
/// raw and symmetry-adjusted energies). Batches with zero samples are ignored.
///
/// Non-finite replicate values are skipped per quantity; a quantity with fewer than
/// two finite replicates gets `NaN`.
pub fn bootstrap_sigma<R, F>(
    batch_means: &[Vec<f64>],
    counts: &[u64],
    resamples: usize,
    rng: &mut R,
    estimator: F,
) -> Result<Vec<f64>>
where
    R: Rng + ?Sized,
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if batch_means.len() != counts.len() {
        return Err(Error::invalid("batch means and counts differ in length"));
    }
    let live: Vec<usize> = (0..counts.len()).filter(|&b| counts[b] > 0).collect();
    if live.len() < 2 {
        return Err(Error::invalid(format!(
            "bootstrap needs at least 2 nonempty batches (got {})",
            live.len()
        )));
    }
    if resamples == 0 {
        return Err(Error::invalid("bootstrap needs at least one resample"));
    }
    let k = live.len();
    let mut picks = vec![0usize; k];
    let mut sum: Vec<f64> = Vec::new();
    let mut sum_sq: Vec<f64> = Vec::new();
    let mut finite: Vec<usize> = Vec::new();
    for _ in 0..resamples {
        for p in picks.iter_mut() {
            *p = live[rng.gen_range(0..k)];
        }
        let est = estimator(&pooled_mean(batch_means, counts, &picks))?;
        if sum.is_empty() {
            sum = vec![0.0; est.len()];
            sum_sq = vec![0.0; est.len()];
            finite = vec![0; est.len()];
        }
        for (j, x) in est.iter().enumerate().filter(|(_, x)| x.is_finite()) {
            sum[j] += x;
            sum_sq[j] += x * x;
            finite[j] += 1;
        }
    }
    Ok(sum
        .iter()
        .zip(&sum_sq)
        .zip(&finite)
        .map(|((s, q), &c)| {
            if resamples < 2 {
                return 0.0;
            }
            if c < 2 {
                return f64::NAN;
            }
            let b = c as f64;
            let mean = s / b;
            ((q - b * mean * mean) / (b - 1.0)).max(0.0).sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn constant_batches_give_zero() {
        let means = vec![vec![1.5, -2.0]; 10];
        let counts = vec![7; 10];
        let mut rng = stream_rng(3, &[]);
        let s = bootstrap_sigma(&means, &counts, 200, &mut rng, |m| Ok(m.to_vec())).unwrap();
        assert!(s.iter().all(|x| x.abs() < 1e-6), "{s:?}");
    }

    #[test]
    fn rejects_single_batch() {
        let mut rng = stream_rng(3, &[]);
        assert!(bootstrap_sigma(&[vec![1.0]], &[4], 10, &mut rng, |m| Ok(m.to_vec())).is_err());
        assert!(bootstrap_sigma(&[vec![1.0], vec![2.0]], &[4, 0], 10, &mut rng, |m| Ok(m.to_vec()))
            .is_err());
    }

    #[test]
    fn non_finite_replicates_are_skipped() {
        let means: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let counts = vec![1; 10];
        let mut rng = stream_rng(3, &[]);
        let s = bootstrap_sigma(&means, &counts, 100, &mut rng, |m| Ok(vec![m[0], f64::NAN])).unwrap();
        assert!(s[0].is_finite() && s[0] > 0.0);
        assert!(s[1].is_nan());
    }
}
