//! Symbolic Majorana-operator algebra over `2n` Jordan–Wigner Majoranas.
//!
//! A monomial is stored in the Hermitian basis
//! `Γ_μ = (−i)^{C(|μ|,2)} γ_{μ_1} ⋯ γ_{μ_k}` with `μ` strictly ascending.
//! Mode `p` owns the pair `(2p, 2p+1)` and `Γ_{(2p,2p+1)} = Z_p`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with modulus below this are dropped from polynomials.
pub const DROP_THRESHOLD: f64 = 1e-14;

/// Strictly ascending tuple of Majorana indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MajoranaIndex(Vec<usize>);

impl MajoranaIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "Majorana index {indices:?} is not strictly ascending"
            )));
        }
        Ok(MajoranaIndex(indices))
    }

    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        MajoranaIndex(indices)
    }

    pub fn identity() -> Self {
        MajoranaIndex(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Diagonal in the occupation basis: made of whole mode pairs `(2p, 2p+1)`.
    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.0)
    }

    /// Modes `p` whose pair `(2p, 2p+1)` appears; only meaningful when diagonal.
    pub fn diagonal_modes(&self) -> Vec<usize> {
        self.0.chunks(2).map(|c| c[0] / 2).collect()
    }

    /// The index `(2p_1, 2p_1+1, …)` for ascending modes.
    pub fn from_modes(modes: &[usize]) -> Result<Self> {
        MajoranaIndex::new(modes.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect())
    }
}

impl PartialOrd for MajoranaIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MajoranaIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for MajoranaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn is_diagonal(idx: &[usize]) -> bool {
    idx.len().is_multiple_of(2) && idx.chunks(2).all(|c| c[0] % 2 == 0 && c[1] == c[0] + 1)
}

/// Sort a sequence of distinct Majorana indices, returning the sorted index and the
/// sign `±1` of the reordering permutation.
pub fn reorder_sign(seq: &[usize]) -> Result<(MajoranaIndex, i8)> {
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!(
            "repeated Majorana index in {seq:?}"
        )));
    }
    let parity = crate::combinatorics::inversion_parity(seq);
    Ok((MajoranaIndex(sorted), if parity == 0 { 1 } else { -1 }))
}

/// Reduce a raw product `γ_{s_1} ⋯ γ_{s_m}` (repeats allowed) to `sign · γ_ρ`
/// with `ρ` ascending, using `γ_a γ_b = −γ_b γ_a` and `γ_a² = 1`.
pub fn reduce_gamma_product(seq: &[usize]) -> (i8, Vec<usize>) {
    let mut work = seq.to_vec();
    let mut swaps = 0u32;
    for i in 1..work.len() {
        let mut j = i;
        while j > 0 && work[j - 1] > work[j] {
            work.swap(j - 1, j);
            swaps ^= 1;
            j -= 1;
        }
    }
    let mut out = Vec::with_capacity(work.len());
    let mut i = 0;
    while i < work.len() {
        if i + 1 < work.len() && work[i] == work[i + 1] {
            i += 2;
        } else {
            out.push(work[i]);
            i += 1;
        }
    }
    (if swaps == 0 { 1 } else { -1 }, out)
}

/// `i^k` for integer `k`.
pub(crate) fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
fn pairs(m: usize) -> i64 {
    (m * m.saturating_sub(1) / 2) as i64
}

/// Phase relating the Hermitian monomial to the ordered product: `Γ_μ = phase · γ_μ`.
pub fn hermitian_phase(degree: usize) -> Complex64 {
    i_pow(-pairs(degree))
}

/// `⟨b|Γ_τ|b⟩` for a diagonal `τ`: the product of `(−1)^{b_p}` over the modes of `τ`.
pub fn diagonal_matrix_element(tau: &MajoranaIndex, bits: &[u8]) -> Result<f64> {
    if !tau.is_diagonal() {
        return Err(Error::invalid(format!("{tau} is not a diagonal index")));
    }
    let mut sign = 1.0;
    for p in tau.diagonal_modes() {
        let b = *bits.get(p).ok_or_else(|| {
            Error::invalid(format!("mode {p} outside bitstring of length {}", bits.len()))
        })?;
        if b & 1 == 1 {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// Finite linear combination of Hermitian Majorana monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MajoranaPolynomial {
    terms: BTreeMap<MajoranaIndex, Complex64>,
}

impl MajoranaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(MajoranaIndex::identity(), c);
        p
    }

    pub fn monomial(idx: MajoranaIndex, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(idx, c);
        p
    }

    /// The single Majorana `γ_μ` (which equals `Γ_{(μ)}`).
    pub fn gamma(mu: usize) -> Self {
        Self::monomial(MajoranaIndex(vec![mu]), Complex64::new(1.0, 0.0))
    }

    /// Annihilator `a_p = (γ_{2p} + iγ_{2p+1})/2`.
    pub fn annihilation(p: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(MajoranaIndex(vec![2 * p]), Complex64::new(0.5, 0.0));
        out.add_term(MajoranaIndex(vec![2 * p + 1]), Complex64::new(0.0, 0.5));
        out
    }

    /// Creator `a_p† = (γ_{2p} − iγ_{2p+1})/2`.
    pub fn creation(p: usize) -> Self {
        let mut out = Self::zero();
        out.add_term(MajoranaIndex(vec![2 * p]), Complex64::new(0.5, 0.0));
        out.add_term(MajoranaIndex(vec![2 * p + 1]), Complex64::new(0.0, -0.5));
        out
    }

    pub fn add_term(&mut self, idx: MajoranaIndex, c: Complex64) {
        let entry = self.terms.entry(idx).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
    }

    /// Raw ordered product `c · γ_{s_1} ⋯ γ_{s_m}`, repeats allowed.
    pub fn add_gamma_product(&mut self, seq: &[usize], c: Complex64) {
        let (sign, rho) = reduce_gamma_product(seq);
        // γ_ρ = Γ_ρ / phase(|ρ|)
        let coeff = c * f64::from(sign) / hermitian_phase(rho.len());
        self.add_term(MajoranaIndex(rho), coeff);
    }

    pub fn coefficient(&self, idx: &MajoranaIndex) -> Complex64 {
        self.terms.get(idx).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MajoranaIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|k| k.degree()).max().unwrap_or(0)
    }

    /// Remove terms whose coefficient modulus is below [`DROP_THRESHOLD`].
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() >= DROP_THRESHOLD);
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        MajoranaPolynomial {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
        .pruned()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), *v);
        }
        out.pruned()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        let mut seq = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                seq.clear();
                seq.extend_from_slice(&a.0);
                seq.extend_from_slice(&b.0);
                // Γ_a Γ_b = phase(a) phase(b) γ_a γ_b
                let c = ca * cb * hermitian_phase(a.degree()) * hermitian_phase(b.degree());
                out.add_gamma_product(&seq, c);
            }
        }
        out.pruned()
    }

    /// Hermitian adjoint; every `Γ_μ` is Hermitian so only coefficients conjugate.
    pub fn adjoint(&self) -> Self {
        MajoranaPolynomial {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v.conj())).collect(),
        }
    }

    /// Split into homogeneous parts keyed by degree.
    pub fn by_degree(&self) -> BTreeMap<usize, MajoranaPolynomial> {
        let mut out: BTreeMap<usize, MajoranaPolynomial> = BTreeMap::new();
        for (k, v) in &self.terms {
            out.entry(k.degree()).or_default().add_term(k.clone(), *v);
        }
        out
    }
}

impl fmt::Display for MajoranaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i)Γ{}", v.re, v.im, k)?;
        }
        Ok(())
    }
}

/// `a_p† a_q† a_s a_r` expanded in Hermitian Majorana monomials.
pub fn two_rdm_term(p: usize, q: usize, r: usize, s: usize) -> MajoranaPolynomial {
    MajoranaPolynomial::creation(p)
        .mul(&MajoranaPolynomial::creation(q))
        .mul(&MajoranaPolynomial::annihilation(s))
        .mul(&MajoranaPolynomial::annihilation(r))
}

/// `a_p† a_q` expanded in Hermitian Majorana monomials.
pub fn one_body_term(p: usize, q: usize) -> MajoranaPolynomial {
    MajoranaPolynomial::creation(p).mul(&MajoranaPolynomial::annihilation(q))
}

/// Total number operator `Σ_p a_p† a_p = n/2 − ½ Σ_p Γ_{(2p,2p+1)}`.
pub fn number_operator_terms(n: usize) -> MajoranaPolynomial {
    let mut out = MajoranaPolynomial::constant(Complex64::new(n as f64 / 2.0, 0.0));
    for p in 0..n {
        out.add_term(
            MajoranaIndex(vec![2 * p, 2 * p + 1]),
            Complex64::new(-0.5, 0.0),
        );
    }
    out.pruned()
}
