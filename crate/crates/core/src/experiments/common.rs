use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RunSettings;
use crate::error::Result;
use crate::gaussian::GaussianState;
use crate::noise::ReadoutChannel;
use crate::rng::{run_sharded, stream_rng};
use crate::shadows::{
    matchgate_estimate_into, measure_matchgate, sample_b2n, sample_spin_adapted, BatchPlan,
    DegreeWeights, EstimateTable, MajoranaColumns, SignedPermutation,
};

/// Stream labels; the first element of every random-stream path.
pub(crate) mod tags {
    pub const SLATER_STATE: u64 = 1;
    pub const SLATER_DATA: u64 = 2;
    pub const CALIBRATION_DATA: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
    pub const HUBBARD_DATA: u64 = 5;
    pub const XXZ_DATA: u64 = 6;
    pub const COMPILE: u64 = 7;
    pub const CALIBRATION_STATE: u64 = 8;
}

/// Point estimate with its bootstrap standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub sigma: f64,
}

/// Fill an [`EstimateTable`] of `width` columns with `total` samples drawn by
/// `per_sample`, sharded over contiguous index ranges; shard `s` uses the stream
/// `path ++ [s]` and shard tables merge in index order.
pub(crate) fn collect<F>(
    settings: &RunSettings,
    path: &[u64],
    total: u64,
    width: usize,
    per_sample: F,
) -> Result<EstimateTable>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) -> Result<()> + Sync,
{
    let plan = BatchPlan::new(total, settings.batches)?;
    let parts = run_sharded(total, settings.shards, |shard, start, end| -> Result<EstimateTable> {
        let mut full_path = path.to_vec();
        full_path.push(shard as u64);
        let mut rng = stream_rng(settings.seed, &full_path);
        let mut table = EstimateTable::starting_at(width, plan, start);
        for _ in start..end {
            let mut failure = None;
            table.record(|row| {
                if let Err(e) = per_sample(&mut rng, row) {
                    failure = Some(e);
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        Ok(table)
    });
    let mut merged = EstimateTable::new(width, plan);
    for part in parts {
        merged.merge(&part?)?;
    }
    Ok(merged)
}

/// How the signed permutation of each shot is drawn.
#[derive(Clone, Copy, Debug)]
pub(crate) enum MatchgateEnsemble {
    Plain { n: usize },
    Spin { n_up: usize, n_down: usize },
}

impl MatchgateEnsemble {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> SignedPermutation {
        match *self {
            MatchgateEnsemble::Plain { n } => sample_b2n(n, rng),
            MatchgateEnsemble::Spin { n_up, n_down } => {
                let (up, down) = sample_spin_adapted(n_up, n_down, rng);
                up.direct_sum(&down)
            }
        }
    }
}

/// Matchgate shadow data of one state: the first `columns.width()` entries of a row
/// hold the clean-outcome estimates, the next ones the estimates from the same
/// outcomes passed through `noise`.
pub(crate) struct MatchgateData<'a> {
    pub state: &'a GaussianState,
    pub ensemble: MatchgateEnsemble,
    pub weights: &'a DegreeWeights,
    pub columns: &'a MajoranaColumns,
    pub k_max: usize,
    pub noise: Option<&'a ReadoutChannel>,
}

impl MatchgateData<'_> {
    pub fn width(&self) -> usize {
        2 * self.columns.width()
    }

    pub fn collect(&self, settings: &RunSettings, path: &[u64], total: u64) -> Result<EstimateTable> {
        let w = self.columns.width();
        collect(settings, path, total, self.width(), |rng, row| {
            let q = self.ensemble.sample(rng);
            let bits = measure_matchgate(self.state, &q, rng)?;
            let (clean, noisy) = row.split_at_mut(w);
            matchgate_estimate_into(&q, &bits, self.k_max, self.weights, self.columns, clean);
            match self.noise {
                Some(ch) => {
                    let flipped = ch.apply(&bits, rng);
                    matchgate_estimate_into(&q, &flipped, self.k_max, self.weights, self.columns, noisy);
                }
                None => noisy.copy_from_slice(clean),
            }
            Ok(())
        })
    }
}

/// Per-batch means of several tables with the same batch plan, concatenated
/// column-wise, with the batch counts of the first table.
pub(crate) fn joined_batches(tables: &[&EstimateTable]) -> (Vec<Vec<f64>>, Vec<u64>) {
    let first = tables[0];
    let k = first.plan().batches();
    let mut means = Vec::with_capacity(k);
    let mut counts = Vec::with_capacity(k);
    for b in 0..k {
        let c = first.batch_counts()[b];
        if c == 0 {
            continue;
        }
        let mut row = Vec::new();
        for t in tables {
            let cb = t.batch_counts()[b].max(1) as f64;
            row.extend(t.batch_sums(b).iter().map(|s| s / cb));
        }
        means.push(row);
        counts.push(c);
    }
    (means, counts)
}

/// Column-wise concatenation of the overall means of several tables.
pub(crate) fn joined_means(tables: &[&EstimateTable]) -> Vec<f64> {
    tables.iter().flat_map(|t| t.means()).collect()
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
