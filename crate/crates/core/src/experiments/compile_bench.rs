//! Improved versus naive Gaussian-unitary compilation on Haar-random orthogonals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::common::tags;
use super::config::{CompileBenchParams, RunSettings};
use crate::error::Result;
use crate::fgu::{block_decompose, compile, naive_compile, verify_action, GateMetrics};
use crate::linalg::haar_orthogonal;
use crate::rng::stream_rng;

/// Largest `n` at which the dense action check runs.
pub const VERIFY_LIMIT: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileRecord {
    pub n: usize,
    pub trial: usize,
    pub det: i32,
    pub recomposition_error: f64,
    /// Worse of the two compilers; only for `n <= VERIFY_LIMIT`.
    pub verify_error: Option<f64>,
    pub improved: GateMetrics,
    pub naive: GateMetrics,
}

/// Haar-random element of `O(2n)`; odd trials get determinant `−1`.
pub fn bench_matrix(seed: u64, n: usize, trial: usize) -> nalgebra::DMatrix<f64> {
    let mut rng = stream_rng(seed, &[tags::COMPILE, n as u64, trial as u64]);
    let mut q = haar_orthogonal(2 * n, &mut rng);
    let det_negative = q.determinant() < 0.0;
    if det_negative != (trial % 2 == 1) {
        let cols = q.ncols();
        for j in 0..cols {
            q[(0, j)] = -q[(0, j)];
        }
    }
    q
}

pub fn compile_one(seed: u64, n: usize, trial: usize) -> Result<CompileRecord> {
    let q = bench_matrix(seed, n, trial);
    let dec = block_decompose(&q)?;
    let recomposition_error = (dec.recompose() - &q).amax();
    let improved = compile(&q)?;
    let naive = naive_compile(&q)?;
    let verify_error = if n <= VERIFY_LIMIT {
        Some(verify_action(&improved, &q)?.max(verify_action(&naive, &q)?))
    } else {
        None
    };
    Ok(CompileRecord {
        n,
        trial,
        det: if q.determinant() < 0.0 { -1 } else { 1 },
        recomposition_error,
        verify_error,
        improved: improved.metrics(),
        naive: naive.metrics(),
    })
}

pub fn run_compile_bench(params: &CompileBenchParams, settings: &RunSettings) -> Result<Vec<CompileRecord>> {
    let jobs: Vec<(usize, usize)> =
        params.n.to_vec().into_iter().flat_map(|n| (0..params.trials).map(move |t| (n, t))).collect();
    jobs.par_iter().map(|&(n, t)| compile_one(settings.seed, n, t)).collect()
}
