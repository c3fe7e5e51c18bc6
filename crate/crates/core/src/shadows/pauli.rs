//! Pauli-shadow estimators for the `Sym(n) × Cl(1)^{⊗n}` ensemble.

use super::keys::PauliColumns;
use super::matchgate::for_each_subset;
use crate::qubit::PauliFrame;

/// Eigenvalue `3^{-k}` of the single-qubit Clifford ensemble on weight-`k` Paulis.
pub fn pauli_f(k: usize) -> f64 {
    3f64.powi(-(k as i32))
}

/// Accumulate single-shot estimates of every stored Pauli into `row`; `bits` are the
/// physical outcome bits and `scale` multiplies each qubit factor (3 for the
/// standard inverse channel).
pub fn pauli_estimate_into(
    frame: &PauliFrame,
    bits: &[u8],
    k_max: usize,
    scale: f64,
    columns: &PauliColumns,
    row: &mut [f64],
) {
    let n = bits.len();
    let local = frame.unpermute_bits(bits);
    let factors: Vec<f64> = (0..n)
        .map(|i| {
            let w = frame.bases[i];
            let z = if local[i] == 0 { 1.0 } else { -1.0 };
            w.sign() * z * scale
        })
        .collect();
    let codes: Vec<usize> = frame.bases.iter().map(|w| w.axis.code().unwrap_or(2)).collect();
    let mut code_buf = Vec::with_capacity(k_max);
    for_each_subset(n, k_max, |support| {
        code_buf.clear();
        code_buf.extend(support.iter().map(|&q| codes[q]));
        if let Some(col) = columns.column(support, &code_buf) {
            row[col] += support.iter().map(|&q| factors[q]).product::<f64>();
        }
    });
}

/// Reference estimator: `Π_i` of the per-qubit rule for each stored Pauli string.
pub fn pauli_estimate_reference(frame: &PauliFrame, bits: &[u8], columns: &PauliColumns) -> Vec<f64> {
    let local = frame.unpermute_bits(bits);
    columns
        .strings()
        .iter()
        .map(|p| {
            p.0.iter()
                .enumerate()
                .map(|(i, &s)| {
                    if s == crate::pauli::Pauli::I {
                        1.0
                    } else if s == frame.bases[i].axis {
                        let z = if local[i] == 0 { 1.0 } else { -1.0 };
                        3.0 * frame.bases[i].sign() * z
                    } else {
                        0.0
                    }
                })
                .product()
        })
        .collect()
}
