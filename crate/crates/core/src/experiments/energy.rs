//! Energy estimates with symmetry adjustment: the Fermi-Hubbard chain under
//! spin-adapted matchgate shadows and the XXZ chain under symmetrized Pauli shadows.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::common::{collect, joined_batches, joined_means, tags, Estimate, MatchgateData, MatchgateEnsemble};
use super::config::RunSettings;
use crate::bootstrap::bootstrap_sigma;
use crate::error::{Error, Result};
use crate::gaussian::{slater_state, GaussianState};
use crate::majorana::{one_body_term, MajoranaIndex, MajoranaPolynomial};
use crate::noise::ReadoutChannel;
use crate::pauli::PauliString;
use crate::qubit::{sample_pauli_frame, xxz_ground_state, xxz_terms};
use crate::shadows::{pauli_estimate_into, DegreeWeights, MajoranaColumns, PauliColumns};
use crate::symmetry::{mitigate, Irrep, SymmetrySpec, System};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub irrep: Irrep,
    pub value: f64,
    pub sigma: f64,
    /// Ratio implied by the flip law of the channel (1 without noise).
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyResult {
    pub experiment: String,
    /// Chain length `L` (Hubbard) or qubit count `n` (XXZ).
    pub size: usize,
    pub noise: Option<ReadoutChannel>,
    pub samples: u64,
    pub truth: f64,
    pub noiseless: Estimate,
    pub unmitigated: Estimate,
    pub mitigated: Estimate,
    pub ratios: Vec<RatioEstimate>,
    pub ancilla_added: bool,
}

/// Expected `ŝ/s` when every diagonal `Z` string of length `k` is attenuated by `λ^k`.
fn expected_ratio(noise: Option<&ReadoutChannel>, z_count: usize) -> f64 {
    noise.map_or(1.0, |ch| ch.z_attenuation(0).powi(z_count as i32))
}

fn irrep_z_count(irrep: Irrep) -> usize {
    match irrep {
        Irrep::Degree(d) => d / 2,
        Irrep::SpinDegree(a, b) => (a + b) / 2,
        Irrep::Weight(k) => k,
    }
}

/// Observable split by irrep: `constant + Σ_λ Σ_j c_j · mean[col_j]`.
struct IrrepSum {
    constant: f64,
    groups: Vec<(Irrep, Vec<(usize, f64)>)>,
}

impl IrrepSum {
    fn value(&self, means: &[f64], scale: impl Fn(Irrep) -> Result<f64>) -> Result<f64> {
        let mut acc = self.constant;
        for (irrep, terms) in &self.groups {
            let s = scale(*irrep)?;
            acc += s * terms.iter().map(|&(c, w)| w * means[c]).sum::<f64>();
        }
        Ok(acc)
    }
}

/// Shared post-processing: estimates for the three pipelines plus the ratios, from
/// means laid out as `[clean | noisy]`.
struct EnergyEvaluator<'a> {
    spec: &'a SymmetrySpec,
    observable: IrrepSum,
    width: usize,
    normaliser: f64,
    majorana: Option<&'a MajoranaColumns>,
    pauli: Option<&'a PauliColumns>,
}

impl EnergyEvaluator<'_> {
    fn ratios(&self, noisy: &[f64]) -> Result<BTreeMap<Irrep, f64>> {
        let sym = self.spec.symmetry_expectations(
            |idx| self.majorana.and_then(|c| c.column(idx.as_slice())).map(|c| noisy[c]),
            |p| self.pauli.and_then(|c| c.column_of(p)).map(|c| noisy[c]),
        )?;
        self.spec.ratios(&sym)
    }

    /// `[noiseless, unmitigated, mitigated, ratio per irrep…]`.
    fn evaluate(&self, v: &[f64]) -> Result<Vec<f64>> {
        let (clean, noisy) = v.split_at(self.width);
        let ratios = self.ratios(noisy)?;
        let plain = |_: Irrep| Ok(1.0);
        let mut out = vec![
            self.observable.value(clean, plain)? / self.normaliser,
            self.observable.value(noisy, plain)? / self.normaliser,
            self.observable.value(noisy, |l| {
                let r = *ratios
                    .get(&l)
                    .ok_or_else(|| Error::invalid(format!("no symmetry ratio for irrep {l}")))?;
                mitigate(1.0, r, l)
            })? / self.normaliser,
        ];
        out.extend(self.spec.irreps.iter().map(|l| ratios[l]));
        Ok(out)
    }

    fn finish(
        &self,
        experiment: &str,
        size: usize,
        noise: Option<&ReadoutChannel>,
        samples: u64,
        truth: f64,
        table: &crate::shadows::EstimateTable,
        settings: &RunSettings,
        boot_path: &[u64],
    ) -> Result<EnergyResult> {
        let point = self.evaluate(&joined_means(&[table]))?;
        let (bm, counts) = joined_batches(&[table]);
        let mut rng = crate::rng::stream_rng(settings.seed, boot_path);
        let sigma = bootstrap_sigma(&bm, &counts, settings.bootstrap, &mut rng, |v| self.evaluate(v))?;
        let est = |i: usize| Estimate { value: point[i], sigma: sigma[i] };
        let ratios = self
            .spec
            .irreps
            .iter()
            .enumerate()
            .map(|(i, &irrep)| RatioEstimate {
                irrep,
                value: point[3 + i],
                sigma: sigma[3 + i],
                expected: expected_ratio(noise, irrep_z_count(irrep)),
            })
            .collect();
        Ok(EnergyResult {
            experiment: experiment.to_string(),
            size,
            noise: noise.cloned(),
            samples,
            truth,
            noiseless: est(0),
            unmitigated: est(1),
            mitigated: est(2),
            ratios,
            ancilla_added: self.spec.ancilla_added,
        })
    }
}

fn noise_tag(noise: Option<&ReadoutChannel>) -> u64 {
    noise.map_or(0, |ch| ch.p.to_bits() ^ (ch.kind as u64 + 1))
}

/// Lowest `filled` eigenvectors of the open-chain hopping matrix `−t Σ (a_i† a_{i+1} + h.c.)`.
pub fn hopping_orbitals(sites: usize, t: f64, filled: usize) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = DMatrix::from_fn(sites, sites, |i, j| if i.abs_diff(j) == 1 { -t } else { 0.0 });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..sites).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let orbitals = DMatrix::from_fn(sites, filled, |r, c| Complex64::new(eig.eigenvectors[(r, order[c])], 0.0));
    (energies, orbitals)
}

/// Hubbard Hamiltonian on `2 × stride` modes; spin-up site `i` is mode `i`,
/// spin-down site `i` is mode `stride + i`.
pub fn hubbard_hamiltonian(sites: usize, stride: usize, t: f64, u: f64) -> MajoranaPolynomial {
    let mut h = MajoranaPolynomial::zero();
    for sector in 0..2 {
        let off = sector * stride;
        for i in 0..sites.saturating_sub(1) {
            let hop = one_body_term(off + i, off + i + 1).add(&one_body_term(off + i + 1, off + i));
            h = h.add(&hop.scale(Complex64::new(-t, 0.0)));
        }
    }
    for i in 0..sites {
        let pair = one_body_term(i, i).mul(&one_body_term(stride + i, stride + i));
        h = h.add(&pair.scale(Complex64::new(u, 0.0)));
    }
    h.pruned()
}

/// `⟨H⟩ / η` for the half-filled open Hubbard chain of `sites` sites, prepared in the
/// ground state of its hopping part, measured with spin-adapted matchgate shadows
/// (one ancilla mode per spin sector).
pub fn hubbard_energy(
    sites: usize,
    t: f64,
    u: f64,
    noise: Option<&ReadoutChannel>,
    samples: u64,
    settings: &RunSettings,
) -> Result<EnergyResult> {
    if sites < 2 || !sites.is_multiple_of(2) {
        return Err(Error::invalid("the Hubbard run needs an even number of sites"));
    }
    let filled = sites / 2;
    let spec = SymmetrySpec::fermion_spin(sites, sites, filled, filled, 2)?
        .with_irreps(vec![Irrep::SpinDegree(2, 0), Irrep::SpinDegree(0, 2), Irrep::SpinDegree(2, 2)])
        .padded_if_needed()?;
    let System::FermionSpin { n_up, n_down, .. } = spec.system else {
        return Err(Error::invalid("expected a spin-resolved symmetry spec"));
    };
    let (_, orbitals) = hopping_orbitals(sites, t, filled);
    let sector = slater_state(&orbitals)?;
    let up = sector.with_empty_modes(n_up - sites);
    let down = sector.with_empty_modes(n_down - sites);
    let state: GaussianState = up.direct_sum(&down);
    let h = hubbard_hamiltonian(sites, n_up, t, u);
    let eta = (2 * filled) as f64;
    let truth = state.expectation(&h).re / eta;

    let mut wanted: Vec<MajoranaIndex> = h.terms().map(|(idx, _)| idx.clone()).filter(|i| i.degree() > 0).collect();
    for &irrep in &spec.irreps {
        wanted.extend(spec.majorana_terms(irrep)?.into_iter().map(|(idx, _)| idx));
    }
    let n_total = n_up + n_down;
    let columns = MajoranaColumns::selected(2 * n_total, 4, wanted.iter())?;

    let mut constant = 0.0;
    let mut groups: BTreeMap<Irrep, Vec<(usize, f64)>> = BTreeMap::new();
    for (idx, c) in h.terms() {
        if c.im.abs() > 1e-12 {
            return Err(Error::Numerical(format!("non-real coefficient {c} on {idx}")));
        }
        if idx.degree() == 0 {
            constant += c.re;
            continue;
        }
        let a = idx.as_slice().iter().filter(|&&m| m < 2 * n_up).count();
        let irrep = Irrep::SpinDegree(a, idx.degree() - a);
        let col = columns.column(idx.as_slice()).expect("selected above");
        groups.entry(irrep).or_default().push((col, c.re));
    }
    for irrep in groups.keys() {
        if !spec.irreps.contains(irrep) {
            return Err(Error::invalid(format!("Hamiltonian has terms in unsupported irrep {irrep}")));
        }
    }

    let weights = DegreeWeights::spin_inverse_eigenvalues(n_up, n_down, 2);
    let data = MatchgateData {
        state: &state,
        ensemble: MatchgateEnsemble::Spin { n_up, n_down },
        weights: &weights,
        columns: &columns,
        k_max: 2,
        noise,
    };
    let path = [tags::HUBBARD_DATA, sites as u64, noise_tag(noise), samples];
    let table = data.collect(settings, &path, samples)?;
    let eval = EnergyEvaluator {
        spec: &spec,
        observable: IrrepSum { constant, groups: groups.into_iter().collect() },
        width: columns.width(),
        normaliser: eta,
        majorana: Some(&columns),
        pauli: None,
    };
    let mut boot = path.to_vec();
    boot.push(tags::BOOTSTRAP);
    eval.finish("hubbard_energy", sites, noise, samples, truth, &table, settings, &boot)
}

/// `⟨H⟩ / n` for the open XXZ chain in its zero-magnetization ground state, measured
/// with subsystem-symmetrized Pauli shadows; only the weight-2 irrep is adjusted.
pub fn xxz_energy(
    n: usize,
    delta: f64,
    noise: Option<&ReadoutChannel>,
    samples: u64,
    settings: &RunSettings,
) -> Result<EnergyResult> {
    let (e0, state) = xxz_ground_state(n, delta)?;
    let truth = e0 / n as f64;
    let spec = SymmetrySpec::qubit(n, 0, 2)?.with_irreps(vec![Irrep::Weight(2)]);
    let terms = xxz_terms(n, delta);
    let mut wanted: Vec<PauliString> = terms.iter().map(|(_, p)| p.clone()).collect();
    wanted.extend(spec.pauli_terms(Irrep::Weight(2))?.into_iter().map(|(p, _)| p));
    let columns = PauliColumns::selected(n, 2, wanted.iter())?;
    let group: Vec<(usize, f64)> =
        terms.iter().map(|(w, p)| (columns.column_of(p).expect("selected above"), *w)).collect();

    let w = columns.width();
    let path = [tags::XXZ_DATA, n as u64, noise_tag(noise), samples];
    let table = collect(settings, &path, samples, 2 * w, |rng, row| {
        let frame = sample_pauli_frame(n, rng);
        let bits = state.measure(&frame, rng);
        let (clean, noisy) = row.split_at_mut(w);
        pauli_estimate_into(&frame, &bits, 2, 3.0, &columns, clean);
        match noise {
            Some(ch) => {
                let flipped = ch.apply(&bits, rng);
                pauli_estimate_into(&frame, &flipped, 2, 3.0, &columns, noisy);
            }
            None => noisy.copy_from_slice(clean),
        }
        Ok(())
    })?;
    let eval = EnergyEvaluator {
        spec: &spec,
        observable: IrrepSum { constant: 0.0, groups: vec![(Irrep::Weight(2), group)] },
        width: w,
        normaliser: n as f64,
        majorana: None,
        pauli: Some(&columns),
    };
    let mut boot = path.to_vec();
    boot.push(tags::BOOTSTRAP);
    eval.finish("xxz_energy", n, noise, samples, truth, &table, settings, &boot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noninteracting_truth_is_orbital_sum() {
        let (sites, t) = (4, 1.0);
        let (energies, orbitals) = hopping_orbitals(sites, t, 2);
        let sector = slater_state(&orbitals).unwrap();
        let state = sector.direct_sum(&sector);
        let h = hubbard_hamiltonian(sites, sites, t, 0.0);
        let per_particle = state.expectation(&h).re / 4.0;
        let expect = 2.0 * (energies[0] + energies[1]) / 4.0;
        assert!((per_particle - expect).abs() < 1e-12);
    }

    #[test]
    fn two_site_xxz_truth() {
        let (e0, _) = xxz_ground_state(2, 1.5).unwrap();
        assert!((e0 / 2.0 + 1.75).abs() < 1e-12);
    }
}
