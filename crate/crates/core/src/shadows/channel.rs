//! Exhaustive-enumeration oracles for the measurement channel of each ensemble.
//!
//! Works with explicit `2^n × 2^n` matrices, so it is limited to `n ≤ 3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::perm::SignedPermutation;
use crate::combinatorics::{combinations, permutations};
use crate::dense::{
    apply_kraus_per_qubit, diagonal, hermitian_monomial, kron_all, monomial_from,
    pauli_string_matrix, qubit_permutation, rotated_gammas, single_qubit_cliffords, CMatrix,
};
use crate::error::{Error, Result};
use crate::noise::ReadoutChannel;
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Signed permutations `B(2n)` acting on Majoranas.
    Matchgate,
    /// `Sym(n) × Cl(1)^{⊗n}` acting on qubits.
    SymCl,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "matchgate" | "b2n" | "fermion" => Ok(Ensemble::Matchgate),
            "symcl" | "pauli" | "qubit" => Ok(Ensemble::SymCl),
            other => Err(Error::invalid(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Matchgate => "matchgate",
            Ensemble::SymCl => "symcl",
        })
    }
}

/// Operator basis of the irreps: Majorana monomials by degree, or Pauli strings by weight.
struct DenseBasis {
    mats: Vec<CMatrix>,
    labels: Vec<usize>,
    index_sets: Vec<Vec<usize>>,
}

impl DenseBasis {
    fn new(n: usize, ensemble: Ensemble) -> Self {
        let mut mats = Vec::new();
        let mut labels = Vec::new();
        let mut index_sets = Vec::new();
        match ensemble {
            Ensemble::Matchgate => {
                for d in 0..=2 * n {
                    for mu in combinations(2 * n, d) {
                        mats.push(hermitian_monomial(n, &mu));
                        labels.push(d);
                        index_sets.push(mu);
                    }
                }
            }
            Ensemble::SymCl => {
                for code in 0..4usize.pow(n as u32) {
                    let s = PauliString(
                        (0..n)
                            .map(|q| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][(code >> (2 * (n - 1 - q))) & 3])
                            .collect(),
                    );
                    mats.push(pauli_string_matrix(&s));
                    labels.push(s.weight());
                }
            }
        }
        DenseBasis { mats, labels, index_sets }
    }

    fn max_label(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }
}

fn apply_noise(m: &CMatrix, n: usize, noise: Option<&ReadoutChannel>) -> CMatrix {
    match noise {
        Some(ch) => apply_kraus_per_qubit(m, n, &ch.kraus_all(n)),
        None => m.clone(),
    }
}

fn real_diag(m: &CMatrix) -> Vec<f64> {
    diagonal(m).into_iter().map(|z| z.re).collect()
}

/// Eigenvalue of one irrep of the twirled channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepEigenvalue {
    /// Majorana degree or Pauli weight.
    pub label: usize,
    pub value: f64,
    /// Largest minus smallest diagonal element inside the irrep.
    pub spread: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpectrum {
    pub ensemble: Ensemble,
    pub n: usize,
    pub group_order: usize,
    pub irreps: Vec<IrrepEigenvalue>,
    /// Largest off-diagonal element of the twirled channel in the irrep basis.
    pub leakage: f64,
}

impl ChannelSpectrum {
    pub fn eigenvalue(&self, label: usize) -> Option<f64> {
        self.irreps.iter().find(|e| e.label == label).map(|e| e.value)
    }
}

/// Calls `visit` with the images `U_g B_μ U_g†` of the whole basis, once per group element.
fn for_each_group_image(
    n: usize,
    ensemble: Ensemble,
    basis: &DenseBasis,
    mut visit: impl FnMut(Vec<CMatrix>),
) {
    let dim = 1usize << n;
    match ensemble {
        Ensemble::Matchgate => {
            for sp in SignedPermutation::enumerate(2 * n) {
                let gens = rotated_gammas(n, &sp.to_matrix());
                visit(basis.index_sets.iter().map(|mu| monomial_from(&gens, mu, dim)).collect());
            }
        }
        Ensemble::SymCl => {
            let cliffords = single_qubit_cliffords();
            for perm in permutations(n) {
                let s = qubit_permutation(&perm);
                for code in 0..24usize.pow(n as u32) {
                    let factors: Vec<CMatrix> = (0..n)
                        .map(|q| cliffords[(code / 24usize.pow((n - 1 - q) as u32)) % 24].clone())
                        .collect();
                    let u = &s * kron_all(&factors);
                    let ud = u.adjoint();
                    visit(basis.mats.iter().map(|m| &u * m * &ud).collect());
                }
            }
        }
    }
}

/// Twirl `U_g† M_Z 𝓔 U_g` over every group element and read off its spectrum.
pub fn channel_eigenvalues_exact(
    n: usize,
    ensemble: Ensemble,
    noise: Option<&ReadoutChannel>,
) -> Result<ChannelSpectrum> {
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!("exact enumeration supports 1 <= n <= 3 (got {n})")));
    }
    let basis = DenseBasis::new(n, ensemble);
    let size = basis.mats.len();
    let dim = 1usize << n;
    let mut order = 0usize;
    let mut acc = vec![0.0f64; size * size];
    for_each_group_image(n, ensemble, &basis, |rotated| {
        order += 1;
        let clean: Vec<Vec<f64>> = rotated.iter().map(real_diag).collect();
        let noisy: Vec<Vec<f64>> = rotated.iter().map(|m| real_diag(&apply_noise(m, n, noise))).collect();
        for mu in 0..size {
            if clean[mu].iter().all(|x| x.abs() < 1e-15) {
                continue;
            }
            for nu in 0..size {
                let s: f64 = clean[mu].iter().zip(&noisy[nu]).map(|(a, b)| a * b).sum();
                acc[mu * size + nu] += s;
            }
        }
    });
    let norm = (order * dim) as f64;
    let mut leakage = 0.0f64;
    for mu in 0..size {
        for nu in 0..size {
            if mu != nu {
                leakage = leakage.max((acc[mu * size + nu] / norm).abs());
            }
        }
    }
    let irreps = (0..=basis.max_label())
        .map(|label| {
            let diag: Vec<f64> = (0..size)
                .filter(|&mu| basis.labels[mu] == label)
                .map(|mu| acc[mu * size + mu] / norm)
                .collect();
            let max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
            IrrepEigenvalue {
                label,
                value: diag.iter().sum::<f64>() / diag.len() as f64,
                spread: max - min,
                size: diag.len(),
            }
        })
        .collect();
    Ok(ChannelSpectrum { ensemble, n, group_order: order, irreps, leakage })
}

/// `tr(M_Z 𝓔 Π_λ) / tr(Π_λ)` for every irrep label, evaluated without any twirl.
pub fn noisy_eigenvalues_dense(
    n: usize,
    ensemble: Ensemble,
    noise: Option<&ReadoutChannel>,
) -> Result<Vec<(usize, f64)>> {
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!("dense evaluation supports 1 <= n <= 3 (got {n})")));
    }
    let basis = DenseBasis::new(n, ensemble);
    let dim = (1usize << n) as f64;
    let mut sums = vec![0.0; basis.max_label() + 1];
    let mut counts = vec![0usize; basis.max_label() + 1];
    for (m, &label) in basis.mats.iter().zip(&basis.labels) {
        let clean = real_diag(m);
        let noisy = real_diag(&apply_noise(m, n, noise));
        sums[label] += clean.iter().zip(&noisy).map(|(a, b)| a * b).sum::<f64>() / dim;
        counts[label] += 1;
    }
    Ok(sums.into_iter().zip(counts).enumerate().map(|(l, (s, c))| (l, s / c as f64)).collect())
}

/// `min_λ tr(𝓔 M_Z Π_λ) / tr(M_Z Π_λ)` over the nontrivial irreps with diagonal support.
pub fn noise_fidelity_exact(n: usize, ensemble: Ensemble, noise: &ReadoutChannel) -> Result<f64> {
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!("dense evaluation supports 1 <= n <= 3 (got {n})")));
    }
    let basis = DenseBasis::new(n, ensemble);
    let mut num = vec![0.0; basis.max_label() + 1];
    let mut den = vec![0.0; basis.max_label() + 1];
    for (m, &label) in basis.mats.iter().zip(&basis.labels) {
        let diag_part = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diagonal(m)));
        let img = apply_noise(&diag_part, n, Some(noise));
        num[label] += (m * img).trace().re;
        den[label] += (m * diag_part).trace().re;
    }
    let mut best = f64::INFINITY;
    for label in 1..num.len() {
        if den[label].abs() > 1e-12 {
            best = best.min(num[label] / den[label]);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseKind;

    #[test]
    fn bit_flip_fidelity_example() {
        let bf = ReadoutChannel::new(NoiseKind::BitFlip, 0.2).unwrap();
        let f = noise_fidelity_exact(2, Ensemble::SymCl, &bf).unwrap();
        assert!((f - 0.36).abs() < 1e-12);
        let f = noise_fidelity_exact(2, Ensemble::Matchgate, &bf).unwrap();
        assert!((f - 0.36).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_n() {
        assert!(channel_eigenvalues_exact(4, Ensemble::Matchgate, None).is_err());
    }
}
