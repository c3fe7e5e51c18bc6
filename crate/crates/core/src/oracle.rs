//! Exhaustive-enumeration checks: exact expectations of the shot estimators over the
//! whole measurement group and every outcome, with and without readout noise.
//!
//! Group sizes grow as `2^{2n} (2n)!` (matchgate) and `6^n n!` (Pauli), so these
//! routines refuse `n > 3` and `n > 4` respectively.

use crate::combinatorics::permutations;
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::noise::{NoiseKind, ReadoutChannel};
use crate::pauli::PauliString;
use crate::qubit::{index_to_bits, random_sector_state, PauliFrame, QubitState, SignedPauli};
use crate::rng::stream_rng;
use crate::shadows::{
    channel_eigenvalues_exact, matchgate_estimate_into, matchgate_f, noisy_eigenvalues_dense,
    pauli_estimate_into, pauli_f, DegreeWeights, Ensemble, MajoranaColumns, PauliColumns,
    SignedPermutation,
};
use crate::symmetry::{mitigate, Irrep, SymmetrySpec};

/// Exact means of every stored column, from clean and from noisy outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMeans {
    pub clean: Vec<f64>,
    pub noisy: Vec<f64>,
}

/// `T[b][b']`: probability that outcome `b` is read as `b'`.
fn transition_matrix(n: usize, noise: Option<&ReadoutChannel>) -> Vec<Vec<f64>> {
    let dim = 1usize << n;
    (0..dim)
        .map(|from| {
            let fb = index_to_bits(from, n);
            (0..dim)
                .map(|to| {
                    let tb = index_to_bits(to, n);
                    match noise {
                        Some(ch) => (0..n).map(|q| ch.transition(q, fb[q], tb[q])).product(),
                        None => f64::from(u8::from(from == to)),
                    }
                })
                .collect()
        })
        .collect()
}

fn accumulate(
    probs: &[f64],
    transition: &[Vec<f64>],
    n: usize,
    weight: f64,
    mut estimate: impl FnMut(&[u8], &mut [f64]),
    scratch: &mut [f64],
    clean: &mut [f64],
    noisy: &mut [f64],
) {
    let dim = probs.len();
    for b in 0..dim {
        let noisy_p: f64 = (0..dim).map(|a| probs[a] * transition[a][b]).sum();
        if probs[b] == 0.0 && noisy_p == 0.0 {
            continue;
        }
        scratch.iter_mut().for_each(|x| *x = 0.0);
        estimate(&index_to_bits(b, n), scratch);
        for ((c, nz), s) in clean.iter_mut().zip(noisy.iter_mut()).zip(scratch.iter()) {
            *c += weight * probs[b] * s;
            *nz += weight * noisy_p * s;
        }
    }
}

/// Exact means of the matchgate estimator over all of `B(2n)`.
pub fn matchgate_exact_means(
    state: &GaussianState,
    noise: Option<&ReadoutChannel>,
    columns: &MajoranaColumns,
    weights: &DegreeWeights,
    k_max: usize,
) -> Result<ExactMeans> {
    let n = state.n_modes();
    if n == 0 || n > 3 {
        return Err(Error::Refused(format!("matchgate enumeration supports 1 <= n <= 3 (got {n})")));
    }
    let transition = transition_matrix(n, noise);
    let width = columns.width();
    let (mut clean, mut noisy, mut scratch) = (vec![0.0; width], vec![0.0; width], vec![0.0; width]);
    let group: Vec<SignedPermutation> = SignedPermutation::enumerate(2 * n).collect();
    let weight = 1.0 / group.len() as f64;
    for q in &group {
        let rotated = state.apply_signed_permutation(q);
        let probs: Vec<f64> = (0..1usize << n)
            .map(|b| rotated.outcome_probability(&index_to_bits(b, n)))
            .collect::<Result<_>>()?;
        accumulate(
            &probs,
            &transition,
            n,
            weight,
            |bits, row| matchgate_estimate_into(q, bits, k_max, weights, columns, row),
            &mut scratch,
            &mut clean,
            &mut noisy,
        );
    }
    Ok(ExactMeans { clean, noisy })
}

/// Exact means of the Pauli estimator over all of `Sym(n) × Cl(1)^{⊗n}`, reduced to
/// the `6^n n!` distinct measurement frames.
pub fn pauli_exact_means(
    state: &QubitState,
    noise: Option<&ReadoutChannel>,
    columns: &PauliColumns,
    k_max: usize,
) -> Result<ExactMeans> {
    let n = state.n_qubits();
    if n == 0 || n > 4 {
        return Err(Error::Refused(format!("Pauli enumeration supports 1 <= n <= 4 (got {n})")));
    }
    let transition = transition_matrix(n, noise);
    let width = columns.width();
    let (mut clean, mut noisy, mut scratch) = (vec![0.0; width], vec![0.0; width], vec![0.0; width]);
    let perms = permutations(n);
    let n_bases = 6usize.pow(n as u32);
    let weight = 1.0 / (perms.len() * n_bases) as f64;
    for perm in &perms {
        for code in 0..n_bases {
            let bases = (0..n).map(|q| SignedPauli::ALL[(code / 6usize.pow(q as u32)) % 6]).collect();
            let frame = PauliFrame { perm: perm.clone(), bases };
            let probs = state.outcome_probabilities(&frame);
            accumulate(
                &probs,
                &transition,
                n,
                weight,
                |bits, row| pauli_estimate_into(&frame, bits, k_max, 3.0, columns, row),
                &mut scratch,
                &mut clean,
                &mut noisy,
            );
        }
    }
    Ok(ExactMeans { clean, noisy })
}

/// Largest `|mitigated − ideal|` over every degree-2 and degree-4 Majorana monomial on
/// the first `n` modes, for a fermionic state with `eta` particles (padded with an
/// empty mode when a symmetry value vanishes).
pub fn fermion_mitigation_residual(
    state: &GaussianState,
    eta: usize,
    noise: &ReadoutChannel,
) -> Result<f64> {
    let n = state.n_modes();
    let spec = SymmetrySpec::fermion(n, eta, 2.min(n))?.padded_if_needed()?;
    let n_total = spec.size();
    let padded = state.with_empty_modes(n_total - n);
    let k_max = 2.min(n_total);
    let columns = MajoranaColumns::all(2 * n_total, 2 * k_max);
    let weights = DegreeWeights::inverse_eigenvalues(n_total, k_max);
    let means = matchgate_exact_means(&padded, Some(noise), &columns, &weights, k_max)?;
    let sym = spec.symmetry_expectations(|idx| columns.column(idx.as_slice()).map(|c| means.noisy[c]), |_| None)?;
    let ratios = spec.ratios(&sym)?;
    let mut worst = 0.0f64;
    for (c, idx) in columns.indices().iter().enumerate() {
        if idx.as_slice().iter().any(|&m| m >= 2 * n) {
            continue;
        }
        let irrep = Irrep::Degree(idx.degree());
        let mitigated = mitigate(means.noisy[c], ratios[&irrep], irrep)?;
        worst = worst.max((mitigated - state.expectation_monomial(idx.as_slice())).abs());
    }
    Ok(worst)
}

/// Qubit analogue of [`fermion_mitigation_residual`] over all Paulis of weight 1 and
/// 2 on the first `n` qubits of a magnetization-`m` state.
pub fn qubit_mitigation_residual(state: &QubitState, m: i64, noise: &ReadoutChannel) -> Result<f64> {
    let n = state.n_qubits();
    let spec = SymmetrySpec::qubit(n, m, 2.min(n))?.padded_if_needed()?;
    let n_total = spec.size();
    let padded = state.with_zero_qubits(n_total - n);
    let columns = PauliColumns::all(n_total, 2.min(n_total));
    let means = pauli_exact_means(&padded, Some(noise), &columns, 2.min(n_total))?;
    let sym = spec.symmetry_expectations(|_| None, |p| columns.column_of(p).map(|c| means.noisy[c]))?;
    let ratios = spec.ratios(&sym)?;
    let mut worst = 0.0f64;
    for (c, p) in columns.strings().iter().enumerate() {
        if p.0[n..].iter().any(|&s| s != crate::pauli::Pauli::I) {
            continue;
        }
        let irrep = Irrep::Weight(p.weight());
        let mitigated = mitigate(means.noisy[c], ratios[&irrep], irrep)?;
        let truncated = PauliString(p.0[..n].to_vec());
        worst = worst.max((mitigated - state.pauli_expectation(&truncated)).abs());
    }
    Ok(worst)
}

/// One named pass/fail line of [`selftest`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, worst: Result<f64>, tol: f64) -> OracleCheck {
    let name = name.into();
    match worst {
        Ok(w) => OracleCheck { name, passed: w < tol, detail: format!("max deviation {w:.3e} (tol {tol:.0e})") },
        Err(e) => OracleCheck { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Readout channels exercised by the exhaustive checks.
pub fn test_channels() -> Vec<ReadoutChannel> {
    let mut out = Vec::new();
    for kind in NoiseKind::ALL {
        for p in [0.1, 0.2, 0.5] {
            out.push(ReadoutChannel::new(kind, p).expect("valid strength"));
        }
    }
    out
}

/// Spectrum deviation from the ideal eigenvalues, plus leakage.
fn noiseless_spectrum_deviation(n: usize, ensemble: Ensemble) -> Result<f64> {
    let spec = channel_eigenvalues_exact(n, ensemble, None)?;
    let mut worst = spec.leakage;
    for e in &spec.irreps {
        let ideal = match ensemble {
            Ensemble::Matchgate if e.label % 2 == 1 => 0.0,
            Ensemble::Matchgate => matchgate_f(n, e.label / 2),
            Ensemble::SymCl => pauli_f(e.label),
        };
        worst = worst.max((e.value - ideal).abs()).max(e.spread);
    }
    Ok(worst)
}

fn noisy_spectrum_deviation(n: usize, ensemble: Ensemble, noise: &ReadoutChannel) -> Result<f64> {
    let spec = channel_eigenvalues_exact(n, ensemble, Some(noise))?;
    let dense = noisy_eigenvalues_dense(n, ensemble, Some(noise))?;
    let mut worst = spec.leakage;
    for (label, value) in dense {
        let e = spec.eigenvalue(label).ok_or_else(|| Error::invalid("missing irrep"))?;
        worst = worst.max((e - value).abs());
    }
    Ok(worst)
}

/// Three fixed two-mode Gaussian states: a particle-number eigenstate, the vacuum
/// rotated by a generic orthogonal, and a basis state.
pub fn fermion_test_states() -> Result<Vec<GaussianState>> {
    let mut rng = stream_rng(0x0A11, &[]);
    let u = crate::linalg::haar_unitary(2, &mut rng);
    let slater = crate::gaussian::slater_state(&u.columns(0, 1).into_owned())?;
    let q = crate::linalg::haar_orthogonal(4, &mut rng);
    let generic = GaussianState::vacuum(2).apply_orthogonal(&q)?;
    Ok(vec![slater, generic, GaussianState::basis_state(&[0, 1])])
}

/// Three fixed two-qubit states: sector states with `m = 0` and `m = 2`, and a
/// generic superposition.
pub fn qubit_test_states() -> Result<Vec<QubitState>> {
    let mut rng = stream_rng(0x0B22, &[]);
    let sector = random_sector_state(2, 0, &mut rng)?;
    let generic = QubitState::from_amplitudes(
        2,
        crate::linalg::haar_unitary(4, &mut rng).column(0).iter().copied().collect(),
    )?;
    Ok(vec![sector, QubitState::basis_state(&[0, 0]), generic])
}

fn fermion_unbiasedness(state: &GaussianState) -> Result<f64> {
    let n = state.n_modes();
    let columns = MajoranaColumns::all(2 * n, 2 * n);
    let weights = DegreeWeights::inverse_eigenvalues(n, n);
    let means = matchgate_exact_means(state, None, &columns, &weights, n)?;
    Ok(columns
        .indices()
        .iter()
        .zip(&means.clean)
        .map(|(idx, m)| (m - state.expectation_monomial(idx.as_slice())).abs())
        .fold(0.0, f64::max))
}

fn qubit_unbiasedness(state: &QubitState) -> Result<f64> {
    let n = state.n_qubits();
    let columns = PauliColumns::all(n, n);
    let means = pauli_exact_means(state, None, &columns, n)?;
    Ok(columns
        .strings()
        .iter()
        .zip(&means.clean)
        .map(|(p, m)| (m - state.pauli_expectation(p)).abs())
        .fold(0.0, f64::max))
}

/// Every exhaustive two-mode / two-qubit check.
pub fn selftest() -> Vec<OracleCheck> {
    let tol = 1e-10;
    let mut out = vec![
        check("matchgate n=2 noiseless spectrum", noiseless_spectrum_deviation(2, Ensemble::Matchgate), tol),
        check("symcl n=2 noiseless spectrum", noiseless_spectrum_deviation(2, Ensemble::SymCl), tol),
    ];
    for ch in test_channels() {
        for ens in [Ensemble::Matchgate, Ensemble::SymCl] {
            out.push(check(format!("{ens} n=2 noisy spectrum {ch}"), noisy_spectrum_deviation(2, ens, &ch), tol));
        }
    }
    match fermion_test_states() {
        Ok(states) => {
            for (i, s) in states.iter().enumerate() {
                out.push(check(format!("matchgate n=2 unbiased state {i}"), fermion_unbiasedness(s), tol));
            }
        }
        Err(e) => out.push(check("fermion test states", Err(e), tol)),
    }
    match qubit_test_states() {
        Ok(states) => {
            for (i, s) in states.iter().enumerate() {
                out.push(check(format!("symcl n=2 unbiased state {i}"), qubit_unbiasedness(s), tol));
            }
        }
        Err(e) => out.push(check("qubit test states", Err(e), tol)),
    }
    for ch in test_channels().into_iter().filter(|c| c.z_attenuation(0).abs() > 1e-12) {
        for eta in [0usize, 1] {
            let state = if eta == 0 {
                GaussianState::vacuum(2)
            } else {
                fermion_test_states().map(|v| v[0].clone()).unwrap_or_else(|_| GaussianState::basis_state(&[1, 0]))
            };
            out.push(check(
                format!("fermion n=2 eta={eta} mitigation {ch}"),
                fermion_mitigation_residual(&state, eta, &ch),
                tol,
            ));
        }
        for m in [0i64, 2] {
            let state = if m == 0 {
                random_sector_state(2, 0, &mut stream_rng(0x0C33, &[])).expect("valid sector")
            } else {
                QubitState::basis_state(&[0, 0])
            };
            out.push(check(
                format!("qubit n=2 m={m} mitigation {ch}"),
                qubit_mitigation_residual(&state, m, &ch),
                tol,
            ));
        }
    }
    out
}
