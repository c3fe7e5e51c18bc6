//! Cross-checks of the fast simulators and kernels against dense matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use symshadow::combinatorics::combinations;
use symshadow::dense::{
    apply_kraus_per_qubit, hermitian_monomial, jw_gammas, max_abs_diff, pauli_string_matrix, statevector_density,
    CMatrix,
};
use symshadow::experiments::slater::random_slater;
use symshadow::fgu;
use symshadow::gaussian::{slater_state, GaussianState};
use symshadow::linalg::{haar_orthogonal, haar_unitary};
use symshadow::majorana::{reduce_gamma_product, two_rdm_term, MajoranaIndex, MajoranaPolynomial};
use symshadow::noise::{NoiseKind, ReadoutChannel};
use symshadow::oracle::{matchgate_exact_means, pauli_exact_means};
use symshadow::pauli::{Pauli, PauliString};
use symshadow::qubit::{index_to_bits, random_sector_state, sample_pauli_frame, xxz_ground_state, xxz_terms, QubitState};
use symshadow::rng::stream_rng;
use symshadow::shadows::{
    matchgate_estimate_into, matchgate_estimate_reference, pauli_estimate_into, pauli_estimate_reference, sample_b2n,
    DegreeWeights, MajoranaColumns, PauliColumns,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn expectation(psi: &[Complex64], op: &CMatrix) -> Complex64 {
    let v = nalgebra::DVector::from_column_slice(psi);
    (v.adjoint() * op * &v)[(0, 0)]
}

fn poly_matrix(n: usize, poly: &MajoranaPolynomial) -> CMatrix {
    let dim = 1 << n;
    poly.terms().fold(CMatrix::zeros(dim, dim), |acc, (idx, &coef)| acc + hermitian_monomial(n, idx.as_slice()) * coef)
}

fn all_indices(n_maj: usize) -> Vec<Vec<usize>> {
    (0..=n_maj).flat_map(|k| combinations(n_maj, k).collect::<Vec<_>>()).collect()
}

#[test]
fn gamma_products_reduce_like_matrices() {
    let n = 3;
    let gammas = jw_gammas(n);
    let mut rng = stream_rng(1, &[]);
    for _ in 0..300 {
        let len = rng.gen_range(0..7);
        let seq: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2 * n)).collect();
        let dense = seq.iter().fold(CMatrix::identity(8, 8), |acc, &m| acc * &gammas[m]);
        let (sign, reduced) = reduce_gamma_product(&seq);
        let expect = reduced.iter().fold(CMatrix::identity(8, 8), |acc, &m| acc * &gammas[m]) * c(f64::from(sign));
        assert!(max_abs_diff(&dense, &expect) < 1e-12, "{seq:?}");
    }
}

#[test]
fn polynomial_algebra_matches_dense() {
    let n = 3;
    let mut rng = stream_rng(2, &[]);
    let indices = all_indices(2 * n);
    let random_poly = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut p = MajoranaPolynomial::zero();
        for _ in 0..4 {
            let idx = &indices[rng.gen_range(0..indices.len())];
            p.add_term(MajoranaIndex::new(idx.clone()).unwrap(), Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        p
    };
    for _ in 0..40 {
        let (a, b) = (random_poly(&mut rng), random_poly(&mut rng));
        let (ma, mb) = (poly_matrix(n, &a), poly_matrix(n, &b));
        assert!(max_abs_diff(&poly_matrix(n, &a.mul(&b)), &(&ma * &mb)) < 1e-10);
        assert!(max_abs_diff(&poly_matrix(n, &a.add(&b)), &(&ma + &mb)) < 1e-12);
        assert!(max_abs_diff(&poly_matrix(n, &a.adjoint()), &ma.adjoint()) < 1e-12);
    }
}

#[test]
fn rotated_gaussian_state_matches_compiled_circuit() {
    let n = 3;
    let mut rng = stream_rng(3, &[]);
    for trial in 0..6 {
        let mut q = haar_orthogonal(2 * n, &mut rng);
        if (q.determinant() < 0.0) != (trial % 2 == 1) {
            q.column_mut(0).neg_mut();
        }
        let u = fgu::compile(&q).unwrap().unitary();
        let psi: Vec<Complex64> = u.column(0).iter().copied().collect();
        let state = GaussianState::vacuum(n).apply_orthogonal(&q).unwrap();
        for mu in all_indices(2 * n) {
            let dense = expectation(&psi, &hermitian_monomial(n, &mu));
            assert!(dense.im.abs() < 1e-10);
            assert!((state.expectation_monomial(&mu) - dense.re).abs() < 1e-9, "trial {trial} mu {mu:?}");
        }
        for b in 0..1usize << n {
            let p = state.outcome_probability(&index_to_bits(b, n)).unwrap();
            assert!((p - psi[b].norm_sqr()).abs() < 1e-10, "trial {trial} outcome {b}");
        }
    }
}

#[test]
fn slater_determinant_matches_dense_fock_state() {
    let n = 4;
    let mut rng = stream_rng(4, &[]);
    let gammas = jw_gammas(n);
    let creation = |p: usize| (&gammas[2 * p] - &gammas[2 * p + 1] * Complex64::new(0.0, 1.0)) * c(0.5);
    let orbitals = haar_unitary(n, &mut rng).columns(0, 2).into_owned();
    let state = slater_state(&orbitals).unwrap();
    let dim = 1 << n;
    let mut psi = CMatrix::zeros(dim, 1);
    psi[(0, 0)] = c(1.0);
    for j in (0..2).rev() {
        let op = (0..n).fold(CMatrix::zeros(dim, dim), |acc, p| acc + creation(p) * orbitals[(p, j)]);
        psi = op * psi;
    }
    let psi: Vec<Complex64> = psi.iter().copied().collect();
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-10);
    for mu in all_indices(2 * n) {
        let dense = expectation(&psi, &hermitian_monomial(n, &mu)).re;
        assert!((state.expectation_monomial(&mu) - dense).abs() < 1e-10, "{mu:?}");
    }
    let pairs: Vec<Vec<usize>> = combinations(n, 2).collect();
    let wick = state.wick_two_rdm();
    for (i, a) in pairs.iter().enumerate() {
        for (j, b) in pairs.iter().enumerate() {
            let dense = expectation(&psi, &poly_matrix(n, &two_rdm_term(a[0], a[1], b[0], b[1])));
            assert!((wick[(i, j)] - dense).norm() < 1e-10, "{a:?} {b:?}");
        }
    }
}

#[test]
fn xxz_ground_state_matches_dense_diagonalisation() {
    let (n, delta) = (6, 1.5);
    let dim = 1 << n;
    let h = xxz_terms(n, delta)
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, (coef, p)| acc + pauli_string_matrix(p) * c(*coef));
    let real = DMatrix::from_fn(dim, dim, |i, j| h[(i, j)].re);
    assert!(h.iter().all(|z| z.im.abs() < 1e-14));
    let dense_min = real.symmetric_eigen().eigenvalues.min();
    let (energy, state) = xxz_ground_state(n, delta).unwrap();
    assert!((energy - dense_min).abs() < 1e-9, "{energy} vs {dense_min}");
    let e = expectation(state.amplitudes(), &h).re;
    assert!((e - energy).abs() < 1e-9);
}

#[test]
fn pauli_expectations_match_dense() {
    let n = 3;
    let mut rng = stream_rng(5, &[]);
    let psi: Vec<Complex64> = haar_unitary(8, &mut rng).column(0).iter().copied().collect();
    let state = QubitState::from_amplitudes(n, psi.clone()).unwrap();
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for code in 0..64 {
        let p = PauliString((0..n).map(|q| all[(code >> (2 * q)) & 3]).collect());
        let dense = expectation(&psi, &pauli_string_matrix(&p)).re;
        assert!((state.pauli_expectation(&p) - dense).abs() < 1e-12, "{p}");
    }
}

#[test]
fn frame_outcomes_reproduce_measured_correlators() {
    let n = 3;
    let mut rng = stream_rng(6, &[]);
    let state = random_sector_state(n, 1, &mut rng).unwrap();
    for _ in 0..30 {
        let frame = sample_pauli_frame(n, &mut rng);
        let probs = state.outcome_probabilities(&frame);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for support in 1..1usize << n {
            let mut ops = vec![Pauli::I; n];
            let mut sign = 1.0;
            for (q, op) in ops.iter_mut().enumerate().filter(|(q, _)| support >> q & 1 == 1) {
                *op = frame.bases[q].axis;
                sign *= frame.bases[q].sign();
            }
            let from_outcomes: f64 = probs
                .iter()
                .enumerate()
                .map(|(b, p)| {
                    let local = frame.unpermute_bits(&index_to_bits(b, n));
                    let parity = (0..n).filter(|q| support >> q & 1 == 1 && local[*q] == 1).count();
                    p * if parity % 2 == 0 { 1.0 } else { -1.0 }
                })
                .sum();
            let direct = sign * state.pauli_expectation(&PauliString(ops));
            assert!((from_outcomes - direct).abs() < 1e-10);
        }
    }
}

#[test]
fn classical_flip_law_matches_kraus_maps() {
    for kind in NoiseKind::ALL {
        for p in [0.0, 0.1, 0.35, 1.0] {
            let ch = ReadoutChannel::new(kind, p).unwrap();
            let kraus = ch.kraus_all(1);
            for from in 0..2u8 {
                let mut rho = CMatrix::zeros(2, 2);
                rho[(from as usize, from as usize)] = c(1.0);
                let out = apply_kraus_per_qubit(&rho, 1, &kraus);
                for to in 0..2u8 {
                    let dense = out[(to as usize, to as usize)].re;
                    assert!((ch.transition(0, from, to) - dense).abs() < 1e-12, "{ch} {from}->{to}");
                }
            }
            let ptm = ch.single_qubit_ptm(0);
            assert!((ptm[(3, 3)] - ch.z_attenuation(0)).abs() < 1e-12, "{ch}");
        }
    }
}

#[test]
fn dense_superoperator_matches_kraus_on_random_state() {
    let n = 2;
    let mut rng = stream_rng(7, &[]);
    let psi: Vec<Complex64> = haar_unitary(4, &mut rng).column(0).iter().copied().collect();
    let rho = statevector_density(&psi);
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let strings: Vec<CMatrix> = (0..16).map(|i| pauli_string_matrix(&PauliString(vec![all[i / 4], all[i % 4]]))).collect();
    let coords = |m: &CMatrix| nalgebra::DVector::from_iterator(16, strings.iter().map(|s| (s * m).trace().re / 4.0));
    for kind in NoiseKind::ALL {
        let ch = ReadoutChannel::new(kind, 0.3).unwrap();
        let out = apply_kraus_per_qubit(&rho, n, &ch.kraus_all(n));
        let via_ptm = ch.superoperator_dense(n).unwrap() * coords(&rho);
        assert!((via_ptm - coords(&out)).amax() < 1e-12, "{ch}");
    }
}

#[test]
fn fast_kernels_match_reference_kernels() {
    let n = 4;
    let mut rng = stream_rng(8, &[]);
    let columns = MajoranaColumns::all(2 * n, 2 * n);
    let weights = DegreeWeights::inverse_eigenvalues(n, n);
    let pcols = PauliColumns::all(n, n);
    for _ in 0..200 {
        let q = sample_b2n(n, &mut rng);
        let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut fast = vec![0.0; columns.width()];
        matchgate_estimate_into(&q, &bits, n, &weights, &columns, &mut fast);
        let reference = matchgate_estimate_reference(&q, &bits, &weights, &columns).unwrap();
        assert!(fast.iter().zip(&reference).all(|(a, b)| (a - b).abs() < 1e-9));

        let frame = sample_pauli_frame(n, &mut rng);
        let mut fast = vec![0.0; pcols.width()];
        pauli_estimate_into(&frame, &bits, n, 3.0, &pcols, &mut fast);
        let reference = pauli_estimate_reference(&frame, &bits, &pcols);
        assert!(fast.iter().zip(&reference).all(|(a, b)| (a - b).abs() < 1e-9));
    }
}

#[test]
fn exhaustive_three_mode_estimators_are_unbiased() {
    let n = 3;
    let mut rng = stream_rng(9, &[]);
    let state = random_slater(n, 1, &mut rng).unwrap();
    let columns = MajoranaColumns::all(2 * n, 2 * n);
    let weights = DegreeWeights::inverse_eigenvalues(n, n);
    let ch = ReadoutChannel::new(NoiseKind::BitFlip, 0.15).unwrap();
    let means = matchgate_exact_means(&state, Some(&ch), &columns, &weights, n).unwrap();
    let lambda = ch.z_attenuation(0);
    for (col, idx) in columns.indices().iter().enumerate() {
        let ideal = state.expectation_monomial(idx.as_slice());
        assert!((means.clean[col] - ideal).abs() < 1e-10, "{idx}");
        let attenuated = lambda.powi((idx.degree() / 2) as i32) * ideal;
        assert!((means.noisy[col] - attenuated).abs() < 1e-10, "{idx}");
    }

    let psi: Vec<Complex64> = haar_unitary(8, &mut rng).column(0).iter().copied().collect();
    let qstate = QubitState::from_amplitudes(n, psi).unwrap();
    let pcols = PauliColumns::all(n, n);
    let means = pauli_exact_means(&qstate, Some(&ch), &pcols, n).unwrap();
    for (col, p) in pcols.strings().iter().enumerate() {
        let ideal = qstate.pauli_expectation(p);
        assert!((means.clean[col] - ideal).abs() < 1e-10, "{p}");
        assert!((means.noisy[col] - lambda.powi(p.weight() as i32) * ideal).abs() < 1e-10, "{p}");
    }
}
