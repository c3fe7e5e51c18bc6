//! Matchgate-shadow estimators for the signed-permutation ensemble.

use rand::Rng;

use super::keys::MajoranaColumns;
use super::perm::SignedPermutation;
use crate::combinatorics::binomial_f64;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::majorana::{diagonal_matrix_element, is_diagonal, reorder_sign, MajoranaIndex};

/// Channel eigenvalue `f_{2k} = C(n,k)/C(2n,2k)` of the `B(2n)` ensemble.
pub fn matchgate_f(n: usize, k: usize) -> f64 {
    binomial_f64(n, k) / binomial_f64(2 * n, 2 * k)
}

/// Per-term multiplier indexed by how many modes of the term fall in the first
/// `split` modes versus the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeWeights {
    split: usize,
    weights: Vec<Vec<f64>>,
}

impl DegreeWeights {
    /// `f_{2j}^{-1}` for the plain `B(2n)` ensemble.
    pub fn inverse_eigenvalues(n: usize, k_max: usize) -> Self {
        let row: Vec<Vec<f64>> = (0..=k_max).map(|j| vec![1.0 / matchgate_f(n, j)]).collect();
        DegreeWeights { split: n, weights: row }
    }

    /// `(f^↑_{2j} f^↓_{2l})^{-1}` for the spin-adapted ensemble `B(2n_↑) × B(2n_↓)`.
    pub fn spin_inverse_eigenvalues(n_up: usize, n_down: usize, k_max: usize) -> Self {
        let weights = (0..=k_max)
            .map(|j| {
                (0..=k_max - j)
                    .map(|l| 1.0 / (matchgate_f(n_up, j) * matchgate_f(n_down, l)))
                    .collect()
            })
            .collect();
        DegreeWeights { split: n_up, weights }
    }

    /// Weight one for every term; yields bare `⟨b|U Γ U†|b⟩` values.
    pub fn unit(split: usize, k_max: usize) -> Self {
        DegreeWeights { split, weights: (0..=k_max).map(|j| vec![1.0; k_max - j + 1]).collect() }
    }

    /// Replace the plain-ensemble weights with caller-provided per-degree values.
    pub fn from_per_degree(n: usize, per_degree: Vec<f64>) -> Self {
        DegreeWeights { split: n, weights: per_degree.into_iter().map(|w| vec![w]).collect() }
    }

    #[inline]
    fn weight(&self, modes: &[usize]) -> f64 {
        let first = modes.iter().filter(|&&p| p < self.split).count();
        let row = &self.weights[first];
        row.get(modes.len() - first).copied().unwrap_or(0.0)
    }

    pub fn split(&self) -> usize {
        self.split
    }
}

/// Visit every `j`-subset of `0..n` for `j = 1..=k_max`, reusing one buffer.
#[inline]
pub(crate) fn for_each_subset(n: usize, k_max: usize, mut visit: impl FnMut(&[usize])) {
    let mut buf = Vec::with_capacity(k_max);
    for j in 1..=k_max.min(n) {
        buf.clear();
        buf.extend(0..j);
        'walk: loop {
            visit(&buf);
            let mut i = j;
            while i > 0 {
                i -= 1;
                if buf[i] < n - j + i {
                    buf[i] += 1;
                    for t in i + 1..j {
                        buf[t] = buf[t - 1] + 1;
                    }
                    continue 'walk;
                }
            }
            break;
        }
    }
}

/// Accumulate the single-shot estimates of every stored key into `row`.
///
/// For each diagonal `τ` built from `j ≤ k_max` modes the only key with a nonzero
/// estimate is the sorted image `π̃(τ)`; its value is
/// `w · (−1)^{parity} · Π s_{τ_i} · ⟨b|Γ_τ|b⟩`.
pub fn matchgate_estimate_into(
    q: &SignedPermutation,
    bits: &[u8],
    k_max: usize,
    weights: &DegreeWeights,
    columns: &MajoranaColumns,
    row: &mut [f64],
) {
    let perm = q.perm();
    let signs = q.signs();
    let n = bits.len();
    let mut image = Vec::with_capacity(2 * k_max);
    for_each_subset(n, k_max, |modes| {
        image.clear();
        let mut sign: i32 = 1;
        for &p in modes {
            if bits[p] & 1 == 1 {
                sign = -sign;
            }
            for mu in [2 * p, 2 * p + 1] {
                sign *= i32::from(signs[mu]);
                // insertion sort tracking parity
                let v = perm[mu];
                let mut pos = image.len();
                image.push(v);
                while pos > 0 && image[pos - 1] > v {
                    image[pos] = image[pos - 1];
                    pos -= 1;
                    sign = -sign;
                }
                image[pos] = v;
            }
        }
        if let Some(col) = columns.column(&image) {
            row[col] += weights.weight(modes) * f64::from(sign);
        }
    });
}

/// Reference estimator: for each stored key `μ` evaluates
/// `w · sgn · ⟨b|Γ_{π̃⁻¹(μ)}|b⟩` directly from `U γ_μ U† = s_{π⁻¹(μ)} γ_{π⁻¹(μ)}`.
pub fn matchgate_estimate_reference(
    q: &SignedPermutation,
    bits: &[u8],
    weights: &DegreeWeights,
    columns: &MajoranaColumns,
) -> Result<Vec<f64>> {
    let inv = q.inverse_perm();
    let mut out = vec![0.0; columns.width()];
    for (col, mu) in columns.indices().iter().enumerate() {
        let pre: Vec<usize> = mu.as_slice().iter().map(|&m| inv[m]).collect();
        let (sorted, parity) = reorder_sign(&pre)?;
        if !is_diagonal(sorted.as_slice()) {
            continue;
        }
        let sign: i32 = pre.iter().map(|&t| i32::from(q.signs()[t])).product::<i32>()
            * i32::from(parity);
        let modes = sorted.diagonal_modes();
        out[col] = weights.weight(&modes) * f64::from(sign) * diagonal_matrix_element(&sorted, bits)?;
    }
    Ok(out)
}

/// Measure `U_Q ρ U_Q†` in the occupation basis.
pub fn measure_matchgate<R: Rng + ?Sized>(
    state: &GaussianState,
    q: &SignedPermutation,
    rng: &mut R,
) -> Result<Vec<u8>> {
    if q.dim() != 2 * state.n_modes() {
        return Err(Error::invalid("signed permutation size differs from 2n"));
    }
    state.apply_signed_permutation(q).sample_bits(rng)
}

/// Keys of the symmetry operator sum `Σ_{τ ∈ D(2n,2k)} Γ_τ` on `n` modes.
pub fn diagonal_keys(n: usize, k: usize) -> Vec<MajoranaIndex> {
    super::keys::diagonal_indices(n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::binomial;

    #[test]
    fn eigenvalue_examples() {
        assert!((matchgate_f(2, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!((matchgate_f(2, 2) - 1.0).abs() < 1e-15);
        assert!((matchgate_f(8, 1) - 8.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn subset_walker_counts() {
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count as u64, binomial(6, 1) + binomial(6, 2) + binomial(6, 3));
    }

    #[test]
    fn identity_estimate_example() {
        // n = 2, Q = I, b = 00: Γ_(0,1) estimate is f_2^{-1} = 3
        let cols = MajoranaColumns::all(4, 4);
        let mut row = vec![0.0; cols.width()];
        let w = DegreeWeights::inverse_eigenvalues(2, 2);
        matchgate_estimate_into(&SignedPermutation::identity(4), &[0, 0], 2, &w, &cols, &mut row);
        let c01 = cols.column(&[0, 1]).unwrap();
        assert!((row[c01] - 3.0).abs() < 1e-12);
        let c02 = cols.column(&[0, 2]).unwrap();
        assert_eq!(row[c02], 0.0);
    }
}
