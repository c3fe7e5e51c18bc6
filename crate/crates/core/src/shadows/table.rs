use crate::error::{Error, Result};

/// Contiguous partition of `total` samples into `batches` groups whose sizes differ
/// by at most one; sample `i` lands in batch `⌊i·K/T⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchPlan {
    total: u64,
    batches: usize,
}

impl BatchPlan {
    pub fn new(total: u64, batches: usize) -> Result<Self> {
        if batches == 0 {
            return Err(Error::invalid("batch count must be positive"));
        }
        if batches as u64 > total {
            return Err(Error::invalid(format!(
                "{batches} batches requested for only {total} samples"
            )));
        }
        Ok(BatchPlan { total, batches })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn batches(&self) -> usize {
        self.batches
    }

    #[inline]
    pub fn batch_of(&self, sample: u64) -> usize {
        let b = (sample as u128 * self.batches as u128 / self.total as u128) as usize;
        b.min(self.batches - 1)
    }
}

/// Running sums of per-sample estimates, kept per batch.
///
/// A table covers the global sample indices starting at `start`; tables for
/// consecutive shards of the same plan merge by adding their batch sums.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateTable {
    width: usize,
    plan: BatchPlan,
    cursor: u64,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl EstimateTable {
    pub fn new(width: usize, plan: BatchPlan) -> Self {
        Self::starting_at(width, plan, 0)
    }

    pub fn starting_at(width: usize, plan: BatchPlan, start: u64) -> Self {
        EstimateTable {
            width,
            plan,
            cursor: start,
            sums: vec![0.0; width * plan.batches()],
            counts: vec![0; plan.batches()],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn plan(&self) -> BatchPlan {
        self.plan
    }

    /// Add one sample: `fill` accumulates its estimates into the row it is handed.
    #[inline]
    pub fn record(&mut self, fill: impl FnOnce(&mut [f64])) {
        let b = self.plan.batch_of(self.cursor);
        fill(&mut self.sums[b * self.width..(b + 1) * self.width]);
        self.counts[b] += 1;
        self.cursor += 1;
    }

    pub fn merge(&mut self, other: &EstimateTable) -> Result<()> {
        if self.width != other.width || self.plan != other.plan {
            return Err(Error::invalid("cannot merge tables with different layouts"));
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            *a += b;
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn batch_counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn batch_sums(&self, batch: usize) -> &[f64] {
        &self.sums[batch * self.width..(batch + 1) * self.width]
    }

    pub fn totals(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.width];
        for b in 0..self.plan.batches() {
            for (o, s) in out.iter_mut().zip(self.batch_sums(b)) {
                *o += s;
            }
        }
        out
    }

    pub fn means(&self) -> Vec<f64> {
        let n = self.count().max(1) as f64;
        self.totals().into_iter().map(|s| s / n).collect()
    }

    /// Per-batch means; batches that received no samples are skipped.
    pub fn batch_means(&self) -> Vec<Vec<f64>> {
        (0..self.plan.batches())
            .filter(|&b| self.counts[b] > 0)
            .map(|b| {
                let c = self.counts[b] as f64;
                self.batch_sums(b).iter().map(|s| s / c).collect()
            })
            .collect()
    }

    /// Per-batch sample counts aligned with [`batch_means`](Self::batch_means).
    pub fn nonempty_batch_counts(&self) -> Vec<u64> {
        self.counts.iter().copied().filter(|&c| c > 0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_sizes_differ_by_at_most_one() {
        let plan = BatchPlan::new(10, 3).unwrap();
        let mut sizes = [0; 3];
        for i in 0..10 {
            sizes[plan.batch_of(i)] += 1;
        }
        assert_eq!(sizes.iter().sum::<i32>(), 10);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert!(BatchPlan::new(2, 3).is_err());
    }

    #[test]
    fn merge_of_shards_equals_single_pass() {
        let plan = BatchPlan::new(9, 3).unwrap();
        let mut whole = EstimateTable::new(2, plan);
        for i in 0..9 {
            whole.record(|row| {
                row[0] += i as f64;
                row[1] += 1.0;
            });
        }
        let mut a = EstimateTable::starting_at(2, plan, 0);
        let mut b = EstimateTable::starting_at(2, plan, 5);
        for i in 0..5 {
            a.record(|row| {
                row[0] += i as f64;
                row[1] += 1.0;
            });
        }
        for i in 5..9 {
            b.record(|row| {
                row[0] += i as f64;
                row[1] += 1.0;
            });
        }
        a.merge(&b).unwrap();
        assert_eq!(a.totals(), whole.totals());
        assert_eq!(a.batch_counts(), whole.batch_counts());
        assert_eq!(a.means(), vec![4.0, 1.0]);
    }
}
