//! Single-qubit readout channels applied before computational-basis measurement.
//!
//! Each channel is diagonal-preserving, so its effect on measured bits reduces to
//! an independent classical flip per qubit; [`ReadoutChannel::apply`] uses that
//! reduction and [`ReadoutChannel::superoperator_dense`] gives the full quantum map.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{pauli_matrix, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    AmplitudeDamping,
    BitFlip,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] =
        [NoiseKind::Depolarizing, NoiseKind::AmplitudeDamping, NoiseKind::BitFlip];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::BitFlip => "bit_flip",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "depolarizing" | "dep" | "depolarising" => Ok(NoiseKind::Depolarizing),
            "amplitude_damping" | "ad" | "amplitudedamping" => Ok(NoiseKind::AmplitudeDamping),
            "bit_flip" | "bitflip" | "bf" => Ok(NoiseKind::BitFlip),
            other => Err(Error::invalid(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// Independent readout channel on every qubit, with an optional per-qubit strength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutChannel {
    pub kind: NoiseKind,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_qubit: Option<Vec<f64>>,
}

impl fmt::Display for ReadoutChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.p)
    }
}

/// Parses `kind:p`, e.g. `bitflip:0.2`.
impl FromStr for ReadoutChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, p) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("noise spec '{s}' must look like kind:p")))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad noise strength '{p}'")))?;
        ReadoutChannel::new(kind.trim().parse()?, p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("noise strength {p} outside [0, 1]")));
    }
    Ok(())
}

impl ReadoutChannel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(ReadoutChannel { kind, p, per_qubit: None })
    }

    pub fn with_per_qubit(kind: NoiseKind, per_qubit: Vec<f64>) -> Result<Self> {
        for &p in &per_qubit {
            check_p(p)?;
        }
        let mean = if per_qubit.is_empty() {
            0.0
        } else {
            per_qubit.iter().sum::<f64>() / per_qubit.len() as f64
        };
        Ok(ReadoutChannel { kind, p: mean, per_qubit: Some(per_qubit) })
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if let Some(v) = &self.per_qubit {
            for &p in v {
                check_p(p)?;
            }
        }
        Ok(())
    }

    /// Strength on `qubit`; falls back to the uniform `p` past the per-qubit list.
    pub fn strength(&self, qubit: usize) -> f64 {
        self.per_qubit
            .as_ref()
            .and_then(|v| v.get(qubit).copied())
            .unwrap_or(self.p)
    }

    /// `(P(0→1), P(1→0))` for the measured bit of `qubit`.
    pub fn effective_flip_probabilities(&self, qubit: usize) -> (f64, f64) {
        let p = self.strength(qubit);
        match self.kind {
            NoiseKind::BitFlip => (p, p),
            NoiseKind::Depolarizing => (p / 2.0, p / 2.0),
            NoiseKind::AmplitudeDamping => (0.0, p),
        }
    }

    /// Factor `λ_q` in `⟨Z_q⟩ → λ_q ⟨Z_q⟩ + const` induced by the flip law. A
    /// diagonal `Z` string on qubits `S` is attenuated by `Π_{q∈S} λ_q`.
    pub fn z_attenuation(&self, qubit: usize) -> f64 {
        let (up, down) = self.effective_flip_probabilities(qubit);
        1.0 - up - down
    }

    /// Apply the classical flip law to a measured bitstring.
    pub fn apply<R: Rng + ?Sized>(&self, bits: &[u8], rng: &mut R) -> Vec<u8> {
        bits.iter()
            .enumerate()
            .map(|(q, &b)| {
                let (up, down) = self.effective_flip_probabilities(q);
                let flip = if b == 0 { up } else { down };
                if flip > 0.0 && rng.gen::<f64>() < flip {
                    b ^ 1
                } else {
                    b
                }
            })
            .collect()
    }

    /// Probability that a true bit `from` is read as `to` on `qubit`.
    pub fn transition(&self, qubit: usize, from: u8, to: u8) -> f64 {
        let (up, down) = self.effective_flip_probabilities(qubit);
        match (from, to) {
            (0, 0) => 1.0 - up,
            (0, _) => up,
            (_, 0) => down,
            _ => 1.0 - down,
        }
    }

    /// Kraus operators of the single-qubit channel acting on `qubit`.
    pub fn kraus(&self, qubit: usize) -> Vec<CMatrix> {
        let p = self.strength(qubit);
        let c = |x: f64| Complex64::new(x, 0.0);
        match self.kind {
            NoiseKind::BitFlip => vec![
                pauli_matrix(Pauli::I) * c((1.0 - p).sqrt()),
                pauli_matrix(Pauli::X) * c(p.sqrt()),
            ],
            NoiseKind::Depolarizing => {
                // (1−p)ρ + p I/2 = (1 − 3p/4)ρ + (p/4)(XρX + YρY + ZρZ)
                let mut ks = vec![pauli_matrix(Pauli::I) * c((1.0 - 0.75 * p).sqrt())];
                for s in Pauli::NONTRIVIAL {
                    ks.push(pauli_matrix(s) * c((p / 4.0).sqrt()));
                }
                ks
            }
            NoiseKind::AmplitudeDamping => vec![
                CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - p).sqrt())]),
                CMatrix::from_row_slice(2, 2, &[c(0.0), c(p.sqrt()), c(0.0), c(0.0)]),
            ],
        }
    }

    pub fn kraus_all(&self, n: usize) -> Vec<Vec<CMatrix>> {
        (0..n).map(|q| self.kraus(q)).collect()
    }

    /// Single-qubit Pauli transfer matrix in the order (I, X, Y, Z).
    pub fn single_qubit_ptm(&self, qubit: usize) -> DMatrix<f64> {
        let ks = self.kraus(qubit);
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z].map(pauli_matrix);
        DMatrix::from_fn(4, 4, |i, j| {
            let mut img = CMatrix::zeros(2, 2);
            for k in &ks {
                img += k * &paulis[j] * k.adjoint();
            }
            ((&paulis[i] * img).trace() * 0.5).re
        })
    }

    /// Full `4^n × 4^n` Pauli transfer matrix (Pauli strings indexed with qubit 0 most
    /// significant). Refuses `n > 3`.
    pub fn superoperator_dense(&self, n: usize) -> Result<DMatrix<f64>> {
        if n > 3 {
            return Err(Error::Refused(format!(
                "dense superoperator limited to n <= 3 (got {n})"
            )));
        }
        Ok((0..n).fold(DMatrix::identity(1, 1), |acc, q| acc.kronecker(&self.single_qubit_ptm(q))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_probability_examples() {
        let bf = ReadoutChannel::new(NoiseKind::BitFlip, 0.2).unwrap();
        assert_eq!(bf.effective_flip_probabilities(0), (0.2, 0.2));
        let ad = ReadoutChannel::new(NoiseKind::AmplitudeDamping, 0.3).unwrap();
        assert_eq!(ad.effective_flip_probabilities(0), (0.0, 0.3));
        let dep = ReadoutChannel::new(NoiseKind::Depolarizing, 0.2).unwrap();
        assert_eq!(dep.effective_flip_probabilities(1), (0.1, 0.1));
    }

    #[test]
    fn ptm_examples() {
        let bf = ReadoutChannel::new(NoiseKind::BitFlip, 0.2).unwrap();
        let ptm = bf.superoperator_dense(1).unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.6, 0.6]));
        assert!((ptm - expect).amax() < 1e-12);
        let dep = ReadoutChannel::new(NoiseKind::Depolarizing, 0.1).unwrap();
        let ptm = dep.superoperator_dense(1).unwrap();
        let expect = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.9, 0.9, 0.9]));
        assert!((ptm - expect).amax() < 1e-12);
        assert!(bf.superoperator_dense(4).is_err());
    }

    #[test]
    fn rejects_out_of_range_strength() {
        assert!(ReadoutChannel::new(NoiseKind::BitFlip, 1.5).is_err());
        assert!("bitflip:-0.1".parse::<ReadoutChannel>().is_err());
        assert_eq!(
            "bitflip:0.2".parse::<ReadoutChannel>().unwrap(),
            ReadoutChannel::new(NoiseKind::BitFlip, 0.2).unwrap()
        );
    }
}
