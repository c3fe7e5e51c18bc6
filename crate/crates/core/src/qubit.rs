//! Dense statevector simulation for magnetization-sector qubit states and
//! Pauli-frame measurements.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{lanczos_lowest, lowest_eigenpair};
use crate::pauli::{Pauli, PauliString};

/// Sector dimensions above this use Lanczos instead of dense diagonalisation.
const DENSE_ED_LIMIT: usize = 1200;

#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    n: usize,
    amps: Vec<Complex64>,
}

/// Basis index of a bitstring, qubit 0 most significant.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1))
}

pub fn index_to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

/// Number of ones for magnetization `m` (`Σ_i Z_i = m`), checking parity and range.
pub fn sector_weight(n: usize, m: i64) -> Result<usize> {
    let n_i = n as i64;
    if m.abs() > n_i || (n_i - m) % 2 != 0 {
        return Err(Error::invalid(format!(
            "magnetization {m} incompatible with {n} qubits"
        )));
    }
    Ok(((n_i - m) / 2) as usize)
}

/// Basis indices of the sector with magnetization `m`, in lexicographic bitstring order.
pub fn sector_basis(n: usize, m: i64) -> Result<Vec<usize>> {
    let w = sector_weight(n, m)? as u32;
    Ok((0..1usize << n).filter(|i| i.count_ones() == w).collect())
}

impl QubitState {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::invalid("amplitude vector length is not 2^n"));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("state norm {norm} differs from 1")));
        }
        Ok(QubitState { n, amps })
    }

    pub fn basis_state(bits: &[u8]) -> Self {
        let n = bits.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[bits_to_index(bits)] = Complex64::new(1.0, 0.0);
        QubitState { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Append `extra` qubits in `|0⟩` after the existing ones.
    pub fn with_zero_qubits(&self, extra: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << (self.n + extra)];
        for (i, a) in self.amps.iter().enumerate() {
            amps[i << extra] = *a;
        }
        QubitState { n: self.n + extra, amps }
    }

    pub fn apply_single(&mut self, qubit: usize, gate: &[[Complex64; 2]; 2]) {
        let stride = 1usize << (self.n - 1 - qubit);
        for base in 0..self.amps.len() {
            if base & stride != 0 {
                continue;
            }
            let a0 = self.amps[base];
            let a1 = self.amps[base | stride];
            self.amps[base] = gate[0][0] * a0 + gate[0][1] * a1;
            self.amps[base | stride] = gate[1][0] * a0 + gate[1][1] * a1;
        }
    }

    /// `P|ψ⟩` for a Pauli string.
    pub fn apply_pauli(&self, p: &PauliString) -> Vec<Complex64> {
        let n = self.n;
        let mut flip = 0usize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (q, &s) in p.0.iter().enumerate() {
            if matches!(s, Pauli::X | Pauli::Y) {
                flip |= 1 << (n - 1 - q);
            }
        }
        for (idx, a) in self.amps.iter().enumerate() {
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, &s) in p.0.iter().enumerate() {
                let bit = (idx >> (n - 1 - q)) & 1;
                match (s, bit) {
                    (Pauli::Z, 1) => phase = -phase,
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                    (Pauli::Y, 0) => phase *= Complex64::new(0.0, 1.0),
                    (Pauli::Y, 1) => phase *= Complex64::new(0.0, -1.0),
                    _ => {}
                }
            }
            out[idx ^ flip] += phase * a;
        }
        out
    }

    pub fn pauli_expectation(&self, p: &PauliString) -> f64 {
        self.apply_pauli(p)
            .iter()
            .zip(&self.amps)
            .map(|(x, a)| (a.conj() * x).re)
            .sum()
    }

    /// Exact distribution of physical outcome bitstrings (indexed by basis index)
    /// when measuring in `frame`.
    pub fn outcome_probabilities(&self, frame: &PauliFrame) -> Vec<f64> {
        let mut rotated = self.clone();
        for (q, w) in frame.bases.iter().enumerate() {
            rotated.apply_single(q, &w.rotation_to_z());
        }
        let mut out = vec![0.0; self.amps.len()];
        for (idx, a) in rotated.amps.iter().enumerate() {
            let local = index_to_bits(idx, self.n);
            out[bits_to_index(&frame.permute_bits(&local))] += a.norm_sqr();
        }
        out
    }

    /// Draw one physical outcome bitstring for `frame`.
    pub fn measure<R: Rng + ?Sized>(&self, frame: &PauliFrame, rng: &mut R) -> Vec<u8> {
        let mut rotated = self.clone();
        for (q, w) in frame.bases.iter().enumerate() {
            rotated.apply_single(q, &w.rotation_to_z());
        }
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = rotated.amps.len() - 1;
        for (idx, a) in rotated.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                chosen = idx;
                break;
            }
        }
        frame.permute_bits(&index_to_bits(chosen, self.n))
    }
}

/// Haar-like random state supported on the magnetization-`m` sector.
pub fn random_sector_state<R: Rng + ?Sized>(n: usize, m: i64, rng: &mut R) -> Result<QubitState> {
    let basis = sector_basis(n, m)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    let mut norm = 0.0;
    for &i in &basis {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        amps[i] = Complex64::new(re, im);
        norm += re * re + im * im;
    }
    let norm = norm.sqrt();
    for a in amps.iter_mut() {
        *a /= norm;
    }
    Ok(QubitState { n, amps })
}

/// `H|x⟩` for the open-chain `Σ_i (X_iX_{i+1} + Y_iY_{i+1} + Δ Z_iZ_{i+1})` on one basis state.
fn xxz_row(n: usize, delta: f64, idx: usize, mut emit: impl FnMut(usize, f64)) {
    let mut diag = 0.0;
    for i in 0..n.saturating_sub(1) {
        let a = (idx >> (n - 1 - i)) & 1;
        let b = (idx >> (n - 2 - i)) & 1;
        if a == b {
            diag += delta;
        } else {
            diag -= delta;
            let mask = (1usize << (n - 1 - i)) | (1usize << (n - 2 - i));
            emit(idx ^ mask, 2.0);
        }
    }
    emit(idx, diag);
}

/// Ground state of the open XXZ chain in the zero-magnetization sector (even `n`).
pub fn xxz_ground_state(n: usize, delta: f64) -> Result<(f64, QubitState)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid("XXZ ground state needs an even number of qubits >= 2"));
    }
    let basis = sector_basis(n, 0)?;
    let dim = basis.len();
    let position = |idx: usize| basis.binary_search(&idx).expect("hopping stays in sector");
    let (energy, vec) = if dim <= DENSE_ED_LIMIT {
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for (col, &idx) in basis.iter().enumerate() {
            xxz_row(n, delta, idx, |target, w| h[(position(target), col)] += w);
        }
        let (e, v) = lowest_eigenpair(h);
        (e, v.as_slice().to_vec())
    } else {
        lanczos_lowest(
            dim,
            |x, y| {
                y.iter_mut().for_each(|v| *v = 0.0);
                for (col, &idx) in basis.iter().enumerate() {
                    let xc = x[col];
                    xxz_row(n, delta, idx, |target, w| y[position(target)] += w * xc);
                }
            },
            400,
            1e-12,
        )?
    };
    let sign = vec.iter().find(|v| v.abs() > 1e-12).map(|v| v.signum()).unwrap_or(1.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (pos, &idx) in basis.iter().enumerate() {
        amps[idx] = Complex64::new(sign * vec[pos], 0.0);
    }
    Ok((energy, QubitState { n, amps }))
}

/// Pauli terms of the open XXZ chain with unit exchange and anisotropy `delta`.
pub fn xxz_terms(n: usize, delta: f64) -> Vec<(f64, PauliString)> {
    let mut out = Vec::new();
    for i in 0..n.saturating_sub(1) {
        for (s, w) in [(Pauli::X, 1.0), (Pauli::Y, 1.0), (Pauli::Z, delta)] {
            let mut p = PauliString::identity(n);
            p.0[i] = s;
            p.0[i + 1] = s;
            out.push((w, p));
        }
    }
    out
}

/// Signed single-qubit Pauli `±W` with `W ∈ {X, Y, Z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPauli {
    pub negative: bool,
    pub axis: Pauli,
}

impl SignedPauli {
    pub const ALL: [SignedPauli; 6] = [
        SignedPauli { negative: false, axis: Pauli::X },
        SignedPauli { negative: true, axis: Pauli::X },
        SignedPauli { negative: false, axis: Pauli::Y },
        SignedPauli { negative: true, axis: Pauli::Y },
        SignedPauli { negative: false, axis: Pauli::Z },
        SignedPauli { negative: true, axis: Pauli::Z },
    ];

    pub fn sign(self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    /// Canonical Clifford `C` with `C W C† = Z`, so that `C† Z C = W`.
    pub fn rotation_to_z(self) -> [[Complex64; 2]; 2] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        match (self.axis, self.negative) {
            (Pauli::Z, false) | (Pauli::I, _) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            (Pauli::Z, true) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            // H
            (Pauli::X, false) => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            // H Z
            (Pauli::X, true) => [[c(r, 0.0), c(-r, 0.0)], [c(r, 0.0), c(r, 0.0)]],
            // H S†
            (Pauli::Y, false) => [[c(r, 0.0), c(0.0, -r)], [c(r, 0.0), c(0.0, r)]],
            // H S
            (Pauli::Y, true) => [[c(r, 0.0), c(0.0, r)], [c(r, 0.0), c(0.0, -r)]],
        }
    }

    pub fn label(self) -> String {
        format!("{}{}", if self.negative { '-' } else { '+' }, self.axis.as_char())
    }
}

/// Measurement setting `U = S_π C`: per-qubit bases `W_i = C_i† Z C_i` followed by
/// the qubit permutation `π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pub perm: Vec<usize>,
    pub bases: Vec<SignedPauli>,
}

impl PauliFrame {
    pub fn n_qubits(&self) -> usize {
        self.perm.len()
    }

    /// Physical bits from pre-permutation bits: `b[π(i)] = b'[i]`.
    pub fn permute_bits(&self, local: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; local.len()];
        for (i, &b) in local.iter().enumerate() {
            out[self.perm[i]] = b;
        }
        out
    }

    /// Inverse of [`permute_bits`](Self::permute_bits): `b'[i] = b[π(i)]`.
    pub fn unpermute_bits(&self, physical: &[u8]) -> Vec<u8> {
        self.perm.iter().map(|&j| physical[j]).collect()
    }
}

impl fmt::Display for PauliFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bases: Vec<String> = self.bases.iter().map(|b| b.label()).collect();
        write!(f, "{:?} {}", self.perm, bases.join(""))
    }
}

/// Uniform element of `Sym(n) × Cl(1)^{⊗n}`, reduced to its measurement frame.
pub fn sample_pauli_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliFrame {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let bases = (0..n).map(|_| SignedPauli::ALL[rng.gen_range(0..6)]).collect();
    PauliFrame { perm, bases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sector_parity_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(random_sector_state(4, 1, &mut rng).is_err());
        let s = random_sector_state(4, 2, &mut rng).unwrap();
        assert!(s.amplitudes().iter().enumerate().all(|(i, a)| a.norm() == 0.0 || (i as u32).count_ones() == 1));
    }

    #[test]
    fn two_site_xxz_energy() {
        let (e, _) = xxz_ground_state(2, 1.5).unwrap();
        assert!((e - (-2.0 - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn swap_frame_moves_bits() {
        let s = QubitState::basis_state(&[0, 1]);
        let frame = PauliFrame { perm: vec![1, 0], bases: vec![SignedPauli::ALL[4]; 2] };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(s.measure(&frame, &mut rng), vec![1, 0]);
    }

    #[test]
    fn canonical_rotations_map_basis_to_z() {
        use crate::dense::{pauli_matrix, CMatrix};
        for w in SignedPauli::ALL {
            let g = w.rotation_to_z();
            let cm = CMatrix::from_row_slice(2, 2, &[g[0][0], g[0][1], g[1][0], g[1][1]]);
            let signed = pauli_matrix(w.axis) * Complex64::new(w.sign(), 0.0);
            let lhs = &cm * signed * cm.adjoint();
            let diff = crate::dense::max_abs_diff(&lhs, &pauli_matrix(Pauli::Z));
            assert!(diff < 1e-12, "{w:?}");
        }
    }
}
