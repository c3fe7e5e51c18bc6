use std::fmt;

use serde::{Deserialize, Serialize};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Position in the (X, Y, Z) ordering used for key ranking; `None` for identity.
    pub fn code(self) -> Option<usize> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(0),
            Pauli::Y => Some(1),
            Pauli::Z => Some(2),
        }
    }

    pub fn from_code(code: usize) -> Pauli {
        Pauli::NONTRIVIAL[code]
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-qubit Paulis, qubit 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parse(s: &str) -> Option<Self> {
        s.chars().map(Pauli::from_char).collect::<Option<Vec<_>>>().map(PauliString)
    }

    /// Product ignoring the overall phase.
    pub fn mul_up_to_phase(&self, other: &Self) -> Self {
        PauliString(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| match (a, b) {
                    (Pauli::I, x) | (x, Pauli::I) => x,
                    (x, y) if x == y => Pauli::I,
                    (Pauli::X, Pauli::Y) | (Pauli::Y, Pauli::X) => Pauli::Z,
                    (Pauli::Y, Pauli::Z) | (Pauli::Z, Pauli::Y) => Pauli::X,
                    _ => Pauli::Y,
                })
                .collect(),
        )
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}
