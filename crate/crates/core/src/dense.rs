//! Dense-matrix reference constructions for small systems.
//!
//! Everything here works on explicit `2^n × 2^n` matrices and is meant for
//! cross-checking the structured algorithms at `n ≤ 4` or so. Basis index of a
//! bitstring `b_0 … b_{n−1}` is `Σ b_i 2^{n−1−i}` (qubit 0 is the most significant bit).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::majorana::hermitian_phase;
use crate::pauli::{Pauli, PauliString};

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tensor product of one `2 × 2` factor per qubit, qubit 0 leftmost.
pub fn kron_all(factors: &[CMatrix]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::identity(1, 1), |acc, f| kron(&acc, f))
}

pub fn pauli_string_matrix(s: &PauliString) -> CMatrix {
    kron_all(&s.0.iter().map(|&p| pauli_matrix(p)).collect::<Vec<_>>())
}

/// Single-qubit operator embedded on `qubit` of an `n`-qubit register.
pub fn embed_single(n: usize, qubit: usize, op: &CMatrix) -> CMatrix {
    let factors: Vec<CMatrix> = (0..n)
        .map(|q| {
            if q == qubit {
                op.clone()
            } else {
                pauli_matrix(Pauli::I)
            }
        })
        .collect();
    kron_all(&factors)
}

/// Jordan–Wigner Majorana `γ_μ` on `n` modes.
pub fn jw_gamma(n: usize, mu: usize) -> CMatrix {
    let p = mu / 2;
    let mut ops = vec![Pauli::I; n];
    for q in ops.iter_mut().take(p) {
        *q = Pauli::Z;
    }
    ops[p] = if mu.is_multiple_of(2) { Pauli::X } else { Pauli::Y };
    pauli_string_matrix(&PauliString(ops))
}

/// All `2n` Majorana matrices.
pub fn jw_gammas(n: usize) -> Vec<CMatrix> {
    (0..2 * n).map(|mu| jw_gamma(n, mu)).collect()
}

/// Hermitian monomial `Γ_μ` from a list of generator matrices (any basis of images).
pub fn monomial_from(generators: &[CMatrix], mu: &[usize], dim: usize) -> CMatrix {
    let mut out = CMatrix::identity(dim, dim);
    for &m in mu {
        out *= &generators[m];
    }
    out * hermitian_phase(mu.len())
}

pub fn hermitian_monomial(n: usize, mu: &[usize]) -> CMatrix {
    monomial_from(&jw_gammas(n), mu, 1 << n)
}

/// Images `U γ_μ U† = Σ_ν Q_{νμ} γ_ν` of every generator under an orthogonal `Q`.
pub fn rotated_gammas(n: usize, q: &DMatrix<f64>) -> Vec<CMatrix> {
    let gammas = jw_gammas(n);
    let dim = 1 << n;
    (0..2 * n)
        .map(|mu| {
            let mut acc = CMatrix::zeros(dim, dim);
            for (nu, g) in gammas.iter().enumerate() {
                let w = q[(nu, mu)];
                if w != 0.0 {
                    acc += g * c(w, 0.0);
                }
            }
            acc
        })
        .collect()
}

pub fn basis_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1))
}

pub fn index_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

pub fn diagonal(m: &CMatrix) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Apply an independent single-qubit channel (given by Kraus operators) to every qubit.
pub fn apply_kraus_per_qubit(rho: &CMatrix, n: usize, kraus: &[Vec<CMatrix>]) -> CMatrix {
    let mut out = rho.clone();
    for (q, ks) in kraus.iter().enumerate().take(n) {
        let mut next = CMatrix::zeros(rho.nrows(), rho.ncols());
        for k in ks {
            let big = embed_single(n, q, k);
            next += &big * &out * big.adjoint();
        }
        out = next;
    }
    out
}

/// Unitary rotation `exp(−i θ/2 P)` for a Pauli string `P`.
pub fn pauli_rotation(p: &PauliString, theta: f64) -> CMatrix {
    let m = pauli_string_matrix(p);
    let dim = m.nrows();
    CMatrix::identity(dim, dim) * c((theta / 2.0).cos(), 0.0) - m * c(0.0, (theta / 2.0).sin())
}

/// The 24 single-qubit Cliffords modulo global phase, generated from H and S.
pub fn single_qubit_cliffords() -> Vec<CMatrix> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(2, 2, &[c(s2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-s2, 0.0)]);
    let s = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
    let mut group: Vec<CMatrix> = vec![CMatrix::identity(2, 2)];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for g in &frontier {
            for gen in [&h, &s] {
                let cand = gen * g;
                if !group.iter().any(|x| equal_up_to_phase(x, &cand)) {
                    group.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        frontier = next;
    }
    group
}

pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix) -> bool {
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    (overlap.norm() - na).abs() < 1e-9
}

/// Permutation unitary `S_π |b_0 … b_{n−1}⟩ = |b_{π⁻¹(0)} … b_{π⁻¹(n−1)}⟩`.
pub fn qubit_permutation(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let dim = 1 << n;
    let mut out = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let bits = index_bits(idx, n);
        let mut permuted = vec![0u8; n];
        for (i, &b) in bits.iter().enumerate() {
            permuted[perm[i]] = b;
        }
        out[(basis_index(&permuted), idx)] = c(1.0, 0.0);
    }
    out
}

pub fn statevector_density(psi: &[Complex64]) -> CMatrix {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}
