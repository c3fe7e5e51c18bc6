//! 2-RDM reconstruction of random Slater determinants under readout noise.
//!
//! Four pipelines share one stream of matchgate shadows per (state, sample count):
//! `noiseless` uses the clean outcomes, `unmitigated` the flipped ones, `mitigated`
//! rescales the flipped estimates by the symmetry ratios, and `rshadow` by
//! eigenvalues calibrated on a separate `|0…0⟩` stream.
//!
//! At small `T` an estimated ratio can fall below the floor; the affected error is
//! then reported as `NaN` instead of aborting the sweep.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::common::{joined_batches, joined_means, loglog_slope, median, tags, MatchgateData, MatchgateEnsemble};
use super::config::{RunSettings, SlaterParams};
use crate::bootstrap::bootstrap_sigma;
use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::gaussian::{slater_state, GaussianState};
use crate::linalg::{haar_unitary, hermitian_spectral_norm};
use crate::majorana::two_rdm_term;
use crate::noise::ReadoutChannel;
use crate::rng::stream_rng;
use crate::shadows::{matchgate_f, sample_b2n, DegreeWeights, EstimateTable, MajoranaColumns};
use crate::symmetry::{mitigate, rshadow_columns, rshadow_noise_estimate, Irrep, SymmetrySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Noiseless,
    Unmitigated,
    Mitigated,
    Rshadow,
}

impl Pipeline {
    pub const ALL: [Pipeline; 4] =
        [Pipeline::Noiseless, Pipeline::Unmitigated, Pipeline::Mitigated, Pipeline::Rshadow];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Noiseless => "noiseless",
            Pipeline::Unmitigated => "unmitigated",
            Pipeline::Mitigated => "mitigated",
            Pipeline::Rshadow => "rshadow",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterRecord {
    pub state_id: usize,
    pub samples: u64,
    pub pipeline: Pipeline,
    pub epsilon: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub pipeline: Pipeline,
    /// `(T, median ε over states)`; states whose ratio was degenerate at that `T`
    /// are left out of the median.
    pub medians: Vec<(u64, f64)>,
    /// Log-log slope over checkpoints with `T >= fit_min_samples`.
    pub slope: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaterOutcome {
    pub records: Vec<SlaterRecord>,
    pub summary: Vec<PipelineSummary>,
    pub fit_min_samples: u64,
    pub ancilla_added: bool,
}

impl SlaterOutcome {
    pub fn pipeline(&self, p: Pipeline) -> &PipelineSummary {
        self.summary.iter().find(|s| s.pipeline == p).expect("every pipeline is summarised")
    }
}

/// Slater determinant whose `eta` orbitals are the first columns of a Haar unitary.
pub fn random_slater<R: Rng + ?Sized>(n: usize, eta: usize, rng: &mut R) -> Result<GaussianState> {
    let u = haar_unitary(n, rng);
    slater_state(&u.columns(0, eta).into_owned())
}

/// Linear map from Majorana means to the flattened `C(n,2) × C(n,2)` 2-RDM.
pub struct TwoRdmLayout {
    dim: usize,
    /// `(column, coefficient, degree/2)` per matrix entry, row-major.
    entries: Vec<Vec<(usize, Complex64, usize)>>,
    constants: Vec<Complex64>,
}

impl TwoRdmLayout {
    pub fn new(n: usize, columns: &MajoranaColumns) -> Result<Self> {
        let pairs: Vec<Vec<usize>> = combinations(n, 2).collect();
        let dim = pairs.len();
        let mut entries = Vec::with_capacity(dim * dim);
        let mut constants = Vec::with_capacity(dim * dim);
        for a in &pairs {
            for b in &pairs {
                let poly = two_rdm_term(a[0], a[1], b[0], b[1]);
                let mut list = Vec::new();
                let mut constant = Complex64::new(0.0, 0.0);
                for (idx, &c) in poly.terms() {
                    if idx.degree() == 0 {
                        constant += c;
                        continue;
                    }
                    let col = columns.column(idx.as_slice()).ok_or_else(|| {
                        Error::invalid(format!("Majorana key {idx} missing from the estimate table"))
                    })?;
                    list.push((col, c, idx.degree() / 2));
                }
                entries.push(list);
                constants.push(constant);
            }
        }
        Ok(TwoRdmLayout { dim, entries, constants })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Assemble from per-column means, multiplying degree-`2j` terms by `scale[j]`.
    pub fn assemble(&self, means: &[f64], scale: [f64; 3]) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            let e = i * self.dim + j;
            self.entries[e]
                .iter()
                .fold(self.constants[e], |acc, &(col, c, k)| acc + c * (means[col] * scale[k]))
        })
    }
}

/// Calibration stream on the empty state: per shot the two robust-shadow values
/// for degrees 2 and 4, computed from noisy outcomes.
pub(crate) fn calibration_table(
    n: usize,
    noise: Option<&ReadoutChannel>,
    settings: &RunSettings,
    path: &[u64],
    total: u64,
) -> Result<EstimateTable> {
    let vacuum = GaussianState::vacuum(n);
    let cols = [rshadow_columns(n, 1), rshadow_columns(n, 2.min(n))];
    super::common::collect(settings, path, total, 2, |rng, row| {
        let q = sample_b2n(n, rng);
        let bits = vacuum.apply_signed_permutation(&q).sample_bits(rng)?;
        let bits = match noise {
            Some(ch) => ch.apply(&bits, rng),
            None => bits,
        };
        row[0] += rshadow_noise_estimate(&q, &bits, 1, &cols[0]);
        if n >= 2 {
            row[1] += rshadow_noise_estimate(&q, &bits, 2, &cols[1]);
        }
        Ok(())
    })
}

/// Per-degree rescaling `[1, 1/r_2, 1/r_4]`, or `None` when a ratio is degenerate.
fn scales(ratios: [f64; 2]) -> Result<Option<[f64; 3]>> {
    let mut out = [1.0; 3];
    for (k, r) in ratios.into_iter().enumerate() {
        let irrep = Irrep::Degree(2 * k + 2);
        match mitigate(1.0, r, irrep) {
            Ok(v) => out[k + 1] = v,
            Err(Error::DegenerateRatio { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

/// Everything needed to turn pooled means into the four errors.
struct SlaterEvaluator<'a> {
    spec: &'a SymmetrySpec,
    columns: &'a MajoranaColumns,
    layout: &'a TwoRdmLayout,
    truth: &'a DMatrix<Complex64>,
    n_total: usize,
}

impl SlaterEvaluator<'_> {
    fn epsilons(&self, v: &[f64]) -> Result<Vec<f64>> {
        let w = self.columns.width();
        let (clean, rest) = v.split_at(w);
        let (noisy, cal) = rest.split_at(w);
        let err = |means: &[f64], scale: [f64; 3]| {
            hermitian_spectral_norm(&(self.layout.assemble(means, scale) - self.truth))
        };
        let sym = self
            .spec
            .symmetry_expectations(|idx| self.columns.column(idx.as_slice()).map(|c| noisy[c]), |_| None)?;
        let ratios = self.spec.ratios(&sym)?;
        let mit = scales([ratios[&Irrep::Degree(2)], ratios[&Irrep::Degree(4)]])?;
        let rs = scales([cal[0] / matchgate_f(self.n_total, 1), cal[1] / matchgate_f(self.n_total, 2)])?;
        let adjusted = |scale: Option<[f64; 3]>| scale.map_or(f64::NAN, |s| err(noisy, s));
        Ok(vec![
            err(clean, [1.0; 3]),
            err(noisy, [1.0; 3]),
            adjusted(mit),
            adjusted(rs),
        ])
    }
}

pub fn run_slater_2rdm(params: &SlaterParams, settings: &RunSettings) -> Result<SlaterOutcome> {
    let noise = params.noise.resolve()?;
    let (n, eta) = (params.n, params.eta);
    let spec = SymmetrySpec::fermion(n, eta, 2)?.padded_if_needed()?;
    let n_total = spec.size();
    let columns = MajoranaColumns::all(2 * n_total, 4);
    let layout = TwoRdmLayout::new(n, &columns)?;
    let weights = DegreeWeights::inverse_eigenvalues(n_total, 2);
    let mut records = Vec::new();
    for state_id in 0..params.states {
        let mut rng = stream_rng(settings.seed, &[tags::SLATER_STATE, state_id as u64]);
        let state = random_slater(n, eta, &mut rng)?;
        let truth = state.wick_two_rdm();
        let padded = state.with_empty_modes(n_total - n);
        let data = MatchgateData {
            state: &padded,
            ensemble: MatchgateEnsemble::Plain { n: n_total },
            weights: &weights,
            columns: &columns,
            k_max: 2,
            noise: noise.as_ref(),
        };
        let eval = SlaterEvaluator { spec: &spec, columns: &columns, layout: &layout, truth: &truth, n_total };
        for (ti, &total) in params.checkpoints.iter().enumerate() {
            let path = [state_id as u64, ti as u64];
            let table = data.collect(settings, &[tags::SLATER_DATA, path[0], path[1]], total)?;
            let cal = calibration_table(
                n_total,
                noise.as_ref(),
                settings,
                &[tags::CALIBRATION_DATA, path[0], path[1]],
                total,
            )?;
            let eps = eval.epsilons(&joined_means(&[&table, &cal]))?;
            let (bm, counts) = joined_batches(&[&table, &cal]);
            let mut boot_rng = stream_rng(settings.seed, &[tags::BOOTSTRAP, path[0], path[1]]);
            let sigma = bootstrap_sigma(&bm, &counts, settings.bootstrap, &mut boot_rng, |v| eval.epsilons(v))?;
            for (k, pipeline) in Pipeline::ALL.into_iter().enumerate() {
                records.push(SlaterRecord { state_id, samples: total, pipeline, epsilon: eps[k], sigma: sigma[k] });
            }
        }
    }
    let summary = summarise(&records, &params.checkpoints, params.fit_min_samples);
    Ok(SlaterOutcome { records, summary, fit_min_samples: params.fit_min_samples, ancilla_added: spec.ancilla_added })
}

fn summarise(records: &[SlaterRecord], checkpoints: &[u64], fit_min: u64) -> Vec<PipelineSummary> {
    Pipeline::ALL
        .into_iter()
        .map(|pipeline| {
            let medians: Vec<(u64, f64)> = checkpoints
                .iter()
                .map(|&t| {
                    let mut v: Vec<f64> = records
                        .iter()
                        .filter(|r| r.pipeline == pipeline && r.samples == t && r.epsilon.is_finite())
                        .map(|r| r.epsilon)
                        .collect();
                    (t, median(&mut v))
                })
                .collect();
            let fit: Vec<(f64, f64)> =
                medians.iter().filter(|(t, _)| *t >= fit_min).map(|&(t, e)| (t as f64, e)).collect();
            PipelineSummary { pipeline, medians, slope: loglog_slope(&fit) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_reproduces_wick_two_rdm_from_exact_means() {
        let mut rng = stream_rng(5, &[]);
        let state = random_slater(4, 2, &mut rng).unwrap();
        let columns = MajoranaColumns::all(8, 4);
        let layout = TwoRdmLayout::new(4, &columns).unwrap();
        let means: Vec<f64> =
            columns.indices().iter().map(|idx| state.expectation_monomial(idx.as_slice())).collect();
        let est = layout.assemble(&means, [1.0; 3]);
        let diff = (est - state.wick_two_rdm()).map(|z| z.norm()).max();
        assert!(diff < 1e-12, "{diff}");
    }
}
