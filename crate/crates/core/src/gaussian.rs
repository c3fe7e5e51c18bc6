//! Fermionic Gaussian states in the Majorana covariance representation.
//!
//! The covariance matrix is `M_{μν} = (i/2) tr(ρ [γ_μ, γ_ν])`; it is real and
//! antisymmetric. The vacuum has `M_{2p,2p+1} = −1` and `⟨a_p† a_p⟩ = (1 + M_{2p,2p+1})/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::majorana::{two_rdm_term, MajoranaPolynomial};
use crate::shadows::SignedPermutation;

/// Outcome probabilities below `−CLAMP_TOL` or above `1 + CLAMP_TOL` are treated as errors.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    n: usize,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(n: usize) -> Self {
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for p in 0..n {
            cov[(2 * p, 2 * p + 1)] = -1.0;
            cov[(2 * p + 1, 2 * p)] = 1.0;
        }
        GaussianState { n, cov }
    }

    /// Computational basis state `|b⟩` (occupied modes have `b_p = 1`).
    pub fn basis_state(bits: &[u8]) -> Self {
        let mut s = Self::vacuum(bits.len());
        for (p, &b) in bits.iter().enumerate() {
            if b == 1 {
                s.cov[(2 * p, 2 * p + 1)] = 1.0;
                s.cov[(2 * p + 1, 2 * p)] = -1.0;
            }
        }
        s
    }

    pub fn from_covariance(cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || !cov.nrows().is_multiple_of(2) {
            return Err(Error::invalid("covariance must be square with even dimension"));
        }
        if (&cov + cov.transpose()).iter().any(|x| x.abs() > 1e-10) {
            return Err(Error::invalid("covariance must be antisymmetric"));
        }
        Ok(GaussianState { n: cov.nrows() / 2, cov })
    }

    /// Number-conserving Gaussian state from its one-body matrix `D_{pq} = ⟨a_p† a_q⟩`.
    pub fn from_one_rdm(d: &DMatrix<Complex64>) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n {
            return Err(Error::invalid("one-body matrix must be square"));
        }
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for p in 0..n {
            for q in 0..n {
                let re = d[(p, q)].re;
                let im = d[(p, q)].im;
                let delta = if p == q { 1.0 } else { 0.0 };
                if p != q {
                    cov[(2 * p, 2 * q)] = -2.0 * im;
                    cov[(2 * p + 1, 2 * q + 1)] = -2.0 * im;
                }
                cov[(2 * p, 2 * q + 1)] = -delta + 2.0 * re;
                cov[(2 * p + 1, 2 * q)] = delta - 2.0 * re;
            }
        }
        Self::from_covariance(cov)
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// State after `U_Q`, where `U_Q γ_μ U_Q† = Σ_ν Q_{νμ} γ_ν`: covariance `Q M Qᵀ`.
    pub fn apply_orthogonal(&self, q: &DMatrix<f64>) -> Result<Self> {
        if q.nrows() != 2 * self.n || !crate::linalg::is_orthogonal(q, 1e-9) {
            return Err(Error::invalid(format!(
                "expected a {0}x{0} orthogonal matrix",
                2 * self.n
            )));
        }
        Ok(GaussianState { n: self.n, cov: q * &self.cov * q.transpose() })
    }

    /// Fast path of [`apply_orthogonal`](Self::apply_orthogonal) for signed permutations.
    pub fn apply_signed_permutation(&self, sp: &SignedPermutation) -> Self {
        let dim = 2 * self.n;
        let perm = sp.perm();
        let signs = sp.signs();
        let cov = DMatrix::from_fn(dim, dim, |a, b| {
            f64::from(signs[a] * signs[b]) * self.cov[(perm[a], perm[b])]
        });
        GaussianState { n: self.n, cov }
    }

    /// Append `extra` empty modes after the existing ones.
    pub fn with_empty_modes(&self, extra: usize) -> Self {
        let mut out = Self::vacuum(self.n + extra);
        out.cov.view_mut((0, 0), (2 * self.n, 2 * self.n)).copy_from(&self.cov);
        out
    }

    /// Direct sum of two states on disjoint mode sets (`self` first).
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::vacuum(self.n + other.n);
        out.cov.view_mut((0, 0), (2 * self.n, 2 * self.n)).copy_from(&self.cov);
        out.cov
            .view_mut((2 * self.n, 2 * self.n), (2 * other.n, 2 * other.n))
            .copy_from(&other.cov);
        out
    }

    pub fn occupation(&self, p: usize) -> f64 {
        (1.0 + self.cov[(2 * p, 2 * p + 1)]) / 2.0
    }

    /// Sample a full occupation bitstring mode by mode.
    pub fn sample_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<u8>> {
        let mut cov = self.cov.clone();
        let mut bits = Vec::with_capacity(self.n);
        for p in 0..self.n {
            let p1 = clamp_probability((1.0 + cov[(2 * p, 2 * p + 1)]) / 2.0)?;
            let b = u8::from(rng.gen::<f64>() < p1);
            condition_on(&mut cov, p, b, self.n);
            bits.push(b);
        }
        Ok(bits)
    }

    /// Exact probability of observing `bits`.
    pub fn outcome_probability(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::invalid("bitstring length differs from mode count"));
        }
        let mut cov = self.cov.clone();
        let mut prob = 1.0;
        for (p, &b) in bits.iter().enumerate() {
            let p1 = clamp_probability((1.0 + cov[(2 * p, 2 * p + 1)]) / 2.0)?;
            let pb = if b == 1 { p1 } else { 1.0 - p1 };
            if pb <= 0.0 {
                return Ok(0.0);
            }
            prob *= pb;
            condition_on(&mut cov, p, b, self.n);
        }
        Ok(prob)
    }

    /// `⟨Γ_μ⟩` by Wick contraction: `(−1)^k Pf(M_μ)` for degree `2k`, zero for odd degree.
    pub fn expectation_monomial(&self, mu: &[usize]) -> f64 {
        if mu.len() % 2 == 1 {
            return 0.0;
        }
        let k = mu.len() / 2;
        let sub = DMatrix::from_fn(mu.len(), mu.len(), |a, b| self.cov[(mu[a], mu[b])]);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * pfaffian(&sub)
    }

    pub fn expectation(&self, poly: &MajoranaPolynomial) -> Complex64 {
        poly.terms()
            .map(|(idx, c)| c * self.expectation_monomial(idx.as_slice()))
            .sum()
    }

    /// `⟨a_p† a_q† a_s a_r⟩`.
    pub fn two_rdm_element(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.expectation(&two_rdm_term(p, q, r, s))
    }

    /// Two-body matrix flattened over pairs `p < q` (rows) and `r < s` (columns),
    /// pairs in lexicographic order.
    pub fn wick_two_rdm(&self) -> DMatrix<Complex64> {
        let pairs: Vec<Vec<usize>> = combinations(self.n, 2).collect();
        let m = pairs.len();
        DMatrix::from_fn(m, m, |i, j| {
            self.two_rdm_element(pairs[i][0], pairs[i][1], pairs[j][0], pairs[j][1])
        })
    }

    /// One-body matrix `D_{pq} = ⟨a_p† a_q⟩`.
    pub fn one_rdm(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |p, q| {
            self.expectation(&crate::majorana::one_body_term(p, q))
        })
    }
}

fn clamp_probability(p: f64) -> Result<f64> {
    if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&p) || p.is_nan() {
        return Err(Error::Numerical(format!("outcome probability {p} out of range")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Condition the covariance on measuring mode `p` with outcome `b`. Only the block of
/// modes after `p` is touched.
fn condition_on(cov: &mut DMatrix<f64>, p: usize, b: u8, n: usize) {
    let x = 2 * p;
    let y = x + 1;
    let sigma = if b == 0 { 1.0 } else { -1.0 };
    let denom = 1.0 - sigma * cov[(x, y)];
    let start = y + 1;
    let dim = 2 * n;
    if denom > 0.0 {
        let xs: Vec<f64> = (start..dim).map(|a| cov[(x, a)]).collect();
        let ys: Vec<f64> = (start..dim).map(|a| cov[(y, a)]).collect();
        let scale = sigma / denom;
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let delta = scale * (xs[i] * ys[j] - xs[j] * ys[i]);
                let (a, bb) = (start + i, start + j);
                cov[(a, bb)] += delta;
                cov[(bb, a)] -= delta;
            }
        }
    }
    for a in 0..dim {
        cov[(x, a)] = 0.0;
        cov[(a, x)] = 0.0;
        cov[(y, a)] = 0.0;
        cov[(a, y)] = 0.0;
    }
    cov[(x, y)] = -sigma;
    cov[(y, x)] = sigma;
}

/// Pfaffian of a small antisymmetric matrix by expansion along the first row.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let idx: Vec<usize> = (0..a.nrows()).collect();
    pf_rec(a, &idx)
}

fn pf_rec(a: &DMatrix<f64>, idx: &[usize]) -> f64 {
    match idx.len() {
        0 => 1.0,
        n if n % 2 == 1 => 0.0,
        2 => a[(idx[0], idx[1])],
        _ => {
            let first = idx[0];
            let mut total = 0.0;
            let mut rest = Vec::with_capacity(idx.len() - 2);
            for j in 1..idx.len() {
                let w = a[(first, idx[j])];
                if w == 0.0 {
                    continue;
                }
                rest.clear();
                rest.extend(idx[1..].iter().enumerate().filter(|&(k, _)| k + 1 != j).map(|(_, &v)| v));
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                total += sign * w * pf_rec(a, &rest);
            }
            total
        }
    }
}

/// Slater determinant from `η` orthonormal orbital columns of an `n × η` matrix.
pub fn slater_state(orbitals: &DMatrix<Complex64>) -> Result<GaussianState> {
    let eta = orbitals.ncols();
    let gram = orbitals.adjoint() * orbitals;
    for i in 0..eta {
        for j in 0..eta {
            let expect = if i == j { 1.0 } else { 0.0 };
            if (gram[(i, j)] - Complex64::new(expect, 0.0)).norm() > 1e-10 {
                return Err(Error::invalid("orbital columns are not orthonormal"));
            }
        }
    }
    let d = orbitals.conjugate() * orbitals.transpose();
    GaussianState::from_one_rdm(&d)
}
