//! Noisy-eigenvalue estimates from symmetry adjustment and from a robust-shadow
//! calibration stream, side by side.

use serde::{Deserialize, Serialize};

use super::common::{joined_batches, joined_means, tags, MatchgateData, MatchgateEnsemble};
use super::config::{CalibrationParams, RunSettings};
use super::slater::{calibration_table, random_slater};
use crate::bootstrap::bootstrap_sigma;
use crate::error::Result;
use crate::majorana::MajoranaIndex;
use crate::rng::stream_rng;
use crate::shadows::{matchgate_f, DegreeWeights, MajoranaColumns};
use crate::symmetry::{Irrep, SymmetrySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    /// `ŝ_{2k}/s_{2k} · f_{2k}` from the target-state shadows.
    Symmetry,
    /// Mean robust-shadow estimate on the empty state.
    Rshadow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    /// Majorana degree `2k`.
    pub degree: usize,
    pub method: CalibrationMethod,
    pub value: f64,
    pub sigma: f64,
    /// `f_{2k} λ^k` with `λ` the `Z` attenuation of the channel.
    pub expected: f64,
}

pub fn run_calibration(params: &CalibrationParams, settings: &RunSettings) -> Result<Vec<CalibrationRecord>> {
    let noise = params.noise.resolve()?;
    let spec = SymmetrySpec::fermion(params.n, params.eta, 2)?.padded_if_needed()?;
    let n_total = spec.size();
    let mut rng = stream_rng(settings.seed, &[tags::CALIBRATION_STATE]);
    let state = random_slater(params.n, params.eta, &mut rng)?.with_empty_modes(n_total - params.n);
    let mut keys: Vec<MajoranaIndex> = Vec::new();
    for &irrep in &spec.irreps {
        keys.extend(spec.majorana_terms(irrep)?.into_iter().map(|(idx, _)| idx));
    }
    let columns = MajoranaColumns::selected(2 * n_total, 4, keys.iter())?;
    let weights = DegreeWeights::inverse_eigenvalues(n_total, 2);
    let data = MatchgateData {
        state: &state,
        ensemble: MatchgateEnsemble::Plain { n: n_total },
        weights: &weights,
        columns: &columns,
        k_max: 2,
        noise: noise.as_ref(),
    };
    let table = data.collect(settings, &[tags::SLATER_DATA, u64::MAX], params.samples)?;
    let cal = calibration_table(
        n_total,
        noise.as_ref(),
        settings,
        &[tags::CALIBRATION_DATA, u64::MAX],
        params.samples,
    )?;
    let w = columns.width();
    let evaluate = |v: &[f64]| -> Result<Vec<f64>> {
        let noisy = &v[w..2 * w];
        let sym = spec.symmetry_expectations(|idx| columns.column(idx.as_slice()).map(|c| noisy[c]), |_| None)?;
        let ratios = spec.ratios(&sym)?;
        Ok(vec![
            ratios[&Irrep::Degree(2)] * matchgate_f(n_total, 1),
            ratios[&Irrep::Degree(4)] * matchgate_f(n_total, 2),
            v[2 * w],
            v[2 * w + 1],
        ])
    };
    let point = evaluate(&joined_means(&[&table, &cal]))?;
    let (bm, counts) = joined_batches(&[&table, &cal]);
    let mut boot = stream_rng(settings.seed, &[tags::BOOTSTRAP, u64::MAX]);
    let sigma = bootstrap_sigma(&bm, &counts, settings.bootstrap, &mut boot, evaluate)?;
    let lambda = noise.as_ref().map_or(1.0, |ch| ch.z_attenuation(0));
    let mut out = Vec::new();
    for (i, method) in [CalibrationMethod::Symmetry, CalibrationMethod::Rshadow].into_iter().enumerate() {
        for k in 1..=2usize {
            let j = 2 * i + (k - 1);
            out.push(CalibrationRecord {
                degree: 2 * k,
                method,
                value: point[j],
                sigma: sigma[j],
                expected: matchgate_f(n_total, k) * lambda.powi(k as i32),
            });
        }
    }
    Ok(out)
}
