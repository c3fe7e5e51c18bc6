use std::fmt;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element of the hyperoctahedral group `B(2n)`: `Q_{μν} = s_μ δ_{π(μ),ν}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let dim = perm.len();
        if signs.len() != dim {
            return Err(Error::invalid("permutation and sign vector lengths differ"));
        }
        let mut seen = vec![false; dim];
        for &p in &perm {
            if p >= dim || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("signs must be +1 or -1"));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(dim: usize) -> Self {
        SignedPermutation { perm: (0..dim).collect(), signs: vec![1; dim] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut q = DMatrix::zeros(dim, dim);
        for mu in 0..dim {
            q[(mu, self.perm[mu])] = f64::from(self.signs[mu]);
        }
        q
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let signs = (0..self.dim())
            .map(|mu| self.signs[mu] * other.signs[self.perm[mu]])
            .collect();
        SignedPermutation { perm, signs }
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let off = self.dim();
        let mut perm = self.perm.clone();
        perm.extend(other.perm.iter().map(|&p| p + off));
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        SignedPermutation { perm, signs }
    }

    /// Every element of `B(dim)`, permutations in lexicographic order, signs binary-counted.
    pub fn enumerate(dim: usize) -> impl Iterator<Item = SignedPermutation> {
        crate::combinatorics::permutations(dim).into_iter().flat_map(move |perm| {
            (0..1u64 << dim).map(move |mask| SignedPermutation {
                perm: perm.clone(),
                signs: (0..dim).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect(),
            })
        })
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm: Vec<String> = self.perm.iter().map(|p| p.to_string()).collect();
        let signs: String = self.signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
        write!(f, "{};{}", perm.join(","), signs)
    }
}

/// Uniform element of `B(2n)`.
pub fn sample_b2n<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SignedPermutation {
    let dim = 2 * n;
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    let signs = (0..dim).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    SignedPermutation { perm, signs }
}

/// Uniform element of `B(2n_↑) × B(2n_↓)`, returned per sector.
pub fn sample_spin_adapted<R: Rng + ?Sized>(
    n_up: usize,
    n_down: usize,
    rng: &mut R,
) -> (SignedPermutation, SignedPermutation) {
    let up = sample_b2n(n_up, rng);
    let down = sample_b2n(n_down, rng);
    (up, down)
}
