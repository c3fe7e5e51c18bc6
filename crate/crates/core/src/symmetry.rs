//! Symmetry-adjusted noise calibration.
//!
//! For each irrep `λ` a conserved operator `S_λ` with a known value `s_λ` on the
//! target state is estimated from the same shadow data; `ŝ_λ / s_λ` estimates the
//! noisy-to-ideal eigenvalue ratio and rescales every observable in that irrep.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_f64, combinations};
use crate::error::{Error, Result};
use crate::majorana::MajoranaIndex;
use crate::pauli::{Pauli, PauliString};
use crate::shadows::keys::MajoranaColumns;
use crate::shadows::matchgate::{matchgate_estimate_into, DegreeWeights};
use crate::shadows::SignedPermutation;

pub use crate::shadows::channel::noise_fidelity_exact;

/// Ratios `|ŝ/s|` below this are rejected as degenerate.
pub const RATIO_FLOOR: f64 = 1e-3;

/// Conserved quantities of the prepared state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum System {
    /// `n` modes with particle number `eta`.
    Fermion { n: usize, eta: usize },
    /// Two spin sectors, each with its own mode count and particle number.
    FermionSpin { n_up: usize, n_down: usize, eta_up: usize, eta_down: usize },
    /// `n` qubits with magnetization `m = Σ_i ⟨Z_i⟩`.
    Qubit { n: usize, m: i64 },
}

/// Irrep label of the twirled measurement channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irrep {
    /// Majorana degree `2k`.
    Degree(usize),
    /// Majorana degrees `(2j, 2l)` in the two spin sectors.
    SpinDegree(usize, usize),
    /// Pauli weight `k`.
    Weight(usize),
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irrep::Degree(d) => write!(f, "deg{d}"),
            Irrep::SpinDegree(a, b) => write!(f, "deg{a}x{b}"),
            Irrep::Weight(k) => write!(f, "wt{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySpec {
    pub system: System,
    pub irreps: Vec<Irrep>,
    #[serde(default)]
    pub ancilla_added: bool,
}

/// `e_k(z)` for `n − η` entries `+1` and `η` entries `−1`.
fn elementary_symmetric(n: usize, eta: usize, k: usize) -> f64 {
    (0..=k.min(eta))
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial_f64(eta, j) * binomial_f64(n - eta, k - j)
        })
        .sum()
}

/// Normalisation `c_k` in `S_{2k} = c_k Σ_{τ ∈ D(2n,2k)} Γ_τ`.
fn fermion_coefficient(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else if k.is_multiple_of(2) {
        0.5
    } else {
        -0.5
    }
}

/// Normalisation `c_k` in `S_k = c_k Σ_{|P|=k, P ∈ {I,Z}^n} P`.
fn qubit_coefficient(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `s_{2k}` for `n` modes holding `η` particles.
pub fn fermion_symmetry_value(n: usize, eta: usize, k: usize) -> f64 {
    fermion_coefficient(k) * elementary_symmetric(n, eta, k)
}

/// `(s_2, s_4)`.
pub fn fermion_symmetry_values(n: usize, eta: usize) -> (f64, f64) {
    (fermion_symmetry_value(n, eta, 1), fermion_symmetry_value(n, eta, 2))
}

/// `s_k` for `n` qubits with magnetization `m`.
pub fn qubit_symmetry_value(n: usize, m: i64, k: usize) -> Result<f64> {
    let w = crate::qubit::sector_weight(n, m)?;
    Ok(qubit_coefficient(k) * elementary_symmetric(n, w, k))
}

/// `(s_1, s_2)`.
pub fn qubit_symmetry_values(n: usize, m: i64) -> Result<(f64, f64)> {
    Ok((qubit_symmetry_value(n, m, 1)?, qubit_symmetry_value(n, m, 2)?))
}

impl SymmetrySpec {
    /// Degrees `2, 4, …, 2 k_max`.
    pub fn fermion(n: usize, eta: usize, k_max: usize) -> Result<Self> {
        if eta > n {
            return Err(Error::invalid(format!("{eta} particles in {n} modes")));
        }
        Ok(SymmetrySpec {
            system: System::Fermion { n, eta },
            irreps: (1..=k_max).map(|k| Irrep::Degree(2 * k)).collect(),
            ancilla_added: false,
        })
    }

    /// Irreps `(2j, 2l)` with `j + l ≤ k_max`, excluding the trivial one.
    pub fn fermion_spin(
        n_up: usize,
        n_down: usize,
        eta_up: usize,
        eta_down: usize,
        k_max: usize,
    ) -> Result<Self> {
        if eta_up > n_up || eta_down > n_down {
            return Err(Error::invalid("particle number exceeds sector size"));
        }
        let mut irreps = Vec::new();
        for j in 0..=k_max {
            for l in 0..=k_max - j {
                if j + l > 0 {
                    irreps.push(Irrep::SpinDegree(2 * j, 2 * l));
                }
            }
        }
        Ok(SymmetrySpec {
            system: System::FermionSpin { n_up, n_down, eta_up, eta_down },
            irreps,
            ancilla_added: false,
        })
    }

    /// Weights `1, …, k_max`.
    pub fn qubit(n: usize, m: i64, k_max: usize) -> Result<Self> {
        crate::qubit::sector_weight(n, m)?;
        Ok(SymmetrySpec {
            system: System::Qubit { n, m },
            irreps: (1..=k_max).map(Irrep::Weight).collect(),
            ancilla_added: false,
        })
    }

    /// Keep only the listed irreps.
    pub fn with_irreps(mut self, irreps: Vec<Irrep>) -> Self {
        self.irreps = irreps;
        self
    }

    /// Total modes or qubits, including any ancilla.
    pub fn size(&self) -> usize {
        match self.system {
            System::Fermion { n, .. } | System::Qubit { n, .. } => n,
            System::FermionSpin { n_up, n_down, .. } => n_up + n_down,
        }
    }

    pub fn ideal_value(&self, irrep: Irrep) -> Result<f64> {
        match (&self.system, irrep) {
            (System::Fermion { n, eta }, Irrep::Degree(d)) if d % 2 == 0 => {
                Ok(fermion_symmetry_value(*n, *eta, d / 2))
            }
            (System::FermionSpin { n_up, n_down, eta_up, eta_down }, Irrep::SpinDegree(a, b))
                if a % 2 == 0 && b % 2 == 0 =>
            {
                Ok(fermion_symmetry_value(*n_up, *eta_up, a / 2)
                    * fermion_symmetry_value(*n_down, *eta_down, b / 2))
            }
            (System::Qubit { n, m }, Irrep::Weight(k)) => qubit_symmetry_value(*n, *m, k),
            (system, irrep) => Err(Error::invalid(format!(
                "irrep {irrep} does not belong to system {system:?}"
            ))),
        }
    }

    pub fn ideal_values(&self) -> Result<BTreeMap<Irrep, f64>> {
        self.irreps.iter().map(|&l| Ok((l, self.ideal_value(l)?))).collect()
    }

    /// True when some ideal value vanishes, so the ratio estimate is undefined.
    pub fn needs_ancilla(&self) -> Result<bool> {
        Ok(self.ideal_values()?.values().any(|v| v.abs() < 1e-12))
    }

    /// Append one empty mode (one per spin sector) or one `|0⟩` qubit.
    pub fn pad_ancilla(&self) -> SymmetrySpec {
        let system = match self.system.clone() {
            System::Fermion { n, eta } => System::Fermion { n: n + 1, eta },
            System::FermionSpin { n_up, n_down, eta_up, eta_down } => {
                System::FermionSpin { n_up: n_up + 1, n_down: n_down + 1, eta_up, eta_down }
            }
            System::Qubit { n, m } => System::Qubit { n: n + 1, m: m + 1 },
        };
        SymmetrySpec { system, irreps: self.irreps.clone(), ancilla_added: true }
    }

    /// Pad only when needed.
    pub fn padded_if_needed(&self) -> Result<SymmetrySpec> {
        if self.needs_ancilla()? {
            let padded = self.pad_ancilla();
            if padded.needs_ancilla()? {
                return Err(Error::invalid("symmetry values still vanish after ancilla padding"));
            }
            Ok(padded)
        } else {
            Ok(self.clone())
        }
    }

    /// `S_λ` as Majorana monomials with coefficients (fermionic systems).
    pub fn majorana_terms(&self, irrep: Irrep) -> Result<Vec<(MajoranaIndex, f64)>> {
        match (&self.system, irrep) {
            (System::Fermion { n, .. }, Irrep::Degree(d)) if d % 2 == 0 && d > 0 => {
                let c = fermion_coefficient(d / 2);
                Ok(combinations(*n, d / 2)
                    .map(|modes| (MajoranaIndex::from_modes(&modes).unwrap(), c))
                    .collect())
            }
            (System::FermionSpin { n_up, n_down, .. }, Irrep::SpinDegree(a, b))
                if a % 2 == 0 && b % 2 == 0 && a + b > 0 =>
            {
                let c = fermion_coefficient(a / 2) * fermion_coefficient(b / 2);
                let mut out = Vec::new();
                for up in combinations(*n_up, a / 2) {
                    for down in combinations(*n_down, b / 2) {
                        let modes: Vec<usize> =
                            up.iter().copied().chain(down.iter().map(|q| q + n_up)).collect();
                        out.push((MajoranaIndex::from_modes(&modes).unwrap(), c));
                    }
                }
                Ok(out)
            }
            (system, irrep) => Err(Error::invalid(format!(
                "no Majorana symmetry operator for {irrep} on {system:?}"
            ))),
        }
    }

    /// `S_λ` as `Z`-type Pauli strings with coefficients (qubit systems).
    pub fn pauli_terms(&self, irrep: Irrep) -> Result<Vec<(PauliString, f64)>> {
        match (&self.system, irrep) {
            (System::Qubit { n, .. }, Irrep::Weight(k)) if k > 0 => {
                let c = qubit_coefficient(k);
                Ok(combinations(*n, k)
                    .map(|support| {
                        let mut p = PauliString::identity(*n);
                        for q in support {
                            p.0[q] = Pauli::Z;
                        }
                        (p, c)
                    })
                    .collect())
            }
            (system, irrep) => Err(Error::invalid(format!(
                "no Pauli symmetry operator for {irrep} on {system:?}"
            ))),
        }
    }

    /// Estimated `ŝ_λ` for every irrep, given per-key shadow means.
    pub fn symmetry_expectations(
        &self,
        majorana_mean: impl Fn(&MajoranaIndex) -> Option<f64>,
        pauli_mean: impl Fn(&PauliString) -> Option<f64>,
    ) -> Result<BTreeMap<Irrep, f64>> {
        let mut out = BTreeMap::new();
        for &irrep in &self.irreps {
            let value = match self.system {
                System::Qubit { .. } => {
                    let mut acc = 0.0;
                    for (p, c) in self.pauli_terms(irrep)? {
                        acc += c * pauli_mean(&p)
                            .ok_or_else(|| Error::invalid(format!("no estimate stored for {p}")))?;
                    }
                    acc
                }
                _ => {
                    let mut acc = 0.0;
                    for (idx, c) in self.majorana_terms(irrep)? {
                        acc += c * majorana_mean(&idx)
                            .ok_or_else(|| Error::invalid(format!("no estimate stored for {idx}")))?;
                    }
                    acc
                }
            };
            out.insert(irrep, value);
        }
        Ok(out)
    }

    /// `ŝ_λ / s_λ` for every irrep.
    pub fn ratios(&self, estimated: &BTreeMap<Irrep, f64>) -> Result<BTreeMap<Irrep, f64>> {
        self.irreps
            .iter()
            .map(|&l| {
                let ideal = self.ideal_value(l)?;
                if ideal.abs() < 1e-12 {
                    return Err(Error::invalid(format!(
                        "ideal symmetry value for {l} vanishes; pad an ancilla"
                    )));
                }
                let est = estimated
                    .get(&l)
                    .ok_or_else(|| Error::invalid(format!("no symmetry estimate for {l}")))?;
                Ok((l, est / ideal))
            })
            .collect()
    }
}

/// Mitigated estimate `raw / (ŝ/s)`; rejects ratios below [`RATIO_FLOOR`].
pub fn mitigate(raw: f64, ratio: f64, irrep: Irrep) -> Result<f64> {
    if !ratio.is_finite() || ratio.abs() < RATIO_FLOOR {
        return Err(Error::DegenerateRatio { irrep: irrep.to_string(), ratio, floor: RATIO_FLOOR });
    }
    Ok(raw / ratio)
}

/// `⟨0^n|S_{2k}|0^n⟩` for the fermionic symmetry operator.
pub fn rshadow_reference_value(n: usize, k: usize) -> f64 {
    fermion_symmetry_value(n, 0, k)
}

/// Columns holding the diagonal keys of `S_{2k}`, used by [`rshadow_noise_estimate`].
pub fn rshadow_columns(n: usize, k: usize) -> MajoranaColumns {
    let keys = crate::shadows::keys::diagonal_indices(n, k);
    MajoranaColumns::selected(2 * n, 2 * k, keys.iter()).expect("diagonal keys are valid")
}

/// Single-shot calibration estimate `⟨b|U_Q S_{2k} U_Q†|b⟩ / ⟨0^n|S_{2k}|0^n⟩`.
pub fn rshadow_noise_estimate(
    q: &SignedPermutation,
    bits: &[u8],
    k: usize,
    columns: &MajoranaColumns,
) -> f64 {
    let n = bits.len();
    let mut row = vec![0.0; columns.width()];
    matchgate_estimate_into(q, bits, k, &DegreeWeights::unit(n, k), columns, &mut row);
    // every key of S_{2k} carries the same coefficient c_k, which cancels
    row.iter().sum::<f64>() / binomial_f64(n, k)
}
