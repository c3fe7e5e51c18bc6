//! Random matrix ensembles and small eigen-solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Haar-random real orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn haar_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Haar-random unitary matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Largest absolute eigenvalue of a Hermitian matrix (its spectral norm).
pub fn hermitian_spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Lowest eigenpair of a real symmetric matrix.
pub fn lowest_eigenpair(m: DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(m);
    let (imin, emin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    (emin, eig.eigenvectors.column(imin).into_owned())
}

/// Lowest eigenpair of a large sparse symmetric operator by Lanczos with full
/// reorthogonalisation. `apply(x, y)` must overwrite `y` with `A x`.
pub fn lanczos_lowest<F>(dim: usize, apply: F, max_iter: usize, tol: f64) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let max_iter = max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alphas = Vec::with_capacity(max_iter);
    let mut betas: Vec<f64> = Vec::with_capacity(max_iter);
    // Deterministic start vector with support on every basis state.
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    normalize(&mut v);
    let mut w = vec![0.0; dim];
    let mut last_energy = f64::INFINITY;
    for it in 0..max_iter {
        apply(&v, &mut w);
        let alpha = dot(&v, &w);
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        if let Some(prev) = basis.last() {
            let beta = *betas.last().unwrap();
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= beta * pi;
            }
        }
        basis.push(v.clone());
        for b in &basis {
            let proj = dot(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
        let beta = dot(&w, &w).sqrt();
        let k = alphas.len();
        let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let (e, y) = lowest_eigenpair(t);
        let converged = (e - last_energy).abs() < tol && it > 4;
        if converged || beta < 1e-12 || it + 1 == max_iter {
            let mut out = vec![0.0; dim];
            for (coef, b) in y.iter().zip(&basis) {
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += coef * bi;
                }
            }
            normalize(&mut out);
            if !converged && beta >= 1e-12 && it + 1 == max_iter && max_iter < dim {
                return Err(Error::Numerical(format!(
                    "Lanczos did not converge in {max_iter} iterations"
                )));
            }
            return Ok((e, out));
        }
        last_energy = e;
        betas.push(beta);
        v = w.iter().map(|x| x / beta).collect();
    }
    unreachable!("loop returns on its final iteration")
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

pub fn is_orthogonal(q: &DMatrix<f64>, tol: f64) -> bool {
    if q.nrows() != q.ncols() {
        return false;
    }
    let prod = q.transpose() * q;
    let id = DMatrix::<f64>::identity(q.nrows(), q.ncols());
    (prod - id).iter().all(|x| x.abs() < tol)
}
