//! Dense column layouts for estimate tables.
//!
//! Every even-degree Majorana index up to a maximum degree (or every Pauli string
//! up to a maximum weight) gets a rank; a column map then selects the subset of
//! ranks a table actually stores.

use crate::combinatorics::{binomial, combinations, BinomialTable};
use crate::error::{Error, Result};
use crate::majorana::MajoranaIndex;
use crate::pauli::{Pauli, PauliString};

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct MajoranaKeys {
    n_majoranas: usize,
    max_degree: usize,
    table: BinomialTable,
    offsets: Vec<usize>,
    total: usize,
}

impl MajoranaKeys {
    /// Even degrees `2, 4, …, max_degree` over `n_majoranas` generators.
    pub fn new(n_majoranas: usize, max_degree: usize) -> Self {
        let mut offsets = vec![0usize];
        let mut total = 0usize;
        for d in (2..=max_degree).step_by(2) {
            total += binomial(n_majoranas, d) as usize;
            offsets.push(total);
        }
        MajoranaKeys {
            n_majoranas,
            max_degree,
            table: BinomialTable::new(n_majoranas),
            offsets,
            total,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn n_majoranas(&self) -> usize {
        self.n_majoranas
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn rank(&self, idx: &[usize]) -> Option<usize> {
        let d = idx.len();
        if d == 0 || d % 2 == 1 || d > self.max_degree {
            return None;
        }
        Some(self.offsets[d / 2 - 1] + self.table.colex_rank(idx))
    }

    pub fn unrank(&self, rank: usize) -> MajoranaIndex {
        let slot = self.offsets.iter().rposition(|&o| o <= rank).unwrap();
        let d = 2 * (slot + 1);
        MajoranaIndex::from_sorted_unchecked(self.table.colex_unrank(rank - self.offsets[slot], d))
    }
}

/// Map from Majorana-index ranks to table columns.
#[derive(Clone, Debug)]
pub struct MajoranaColumns {
    keys: MajoranaKeys,
    lookup: Vec<u32>,
    columns: Vec<MajoranaIndex>,
}

impl MajoranaColumns {
    /// Every even-degree index up to `max_degree`.
    pub fn all(n_majoranas: usize, max_degree: usize) -> Self {
        let keys = MajoranaKeys::new(n_majoranas, max_degree);
        let columns = (0..keys.len()).map(|r| keys.unrank(r)).collect();
        let lookup = (0..keys.len() as u32).collect();
        MajoranaColumns { keys, lookup, columns }
    }

    /// Only the listed indices, in first-seen order; duplicates collapse.
    pub fn selected<'a>(
        n_majoranas: usize,
        max_degree: usize,
        wanted: impl IntoIterator<Item = &'a MajoranaIndex>,
    ) -> Result<Self> {
        let keys = MajoranaKeys::new(n_majoranas, max_degree);
        let mut lookup = vec![ABSENT; keys.len()];
        let mut columns = Vec::new();
        for idx in wanted {
            if idx.as_slice().iter().any(|&m| m >= n_majoranas) {
                return Err(Error::invalid(format!("{idx} exceeds {n_majoranas} Majoranas")));
            }
            let r = keys.rank(idx.as_slice()).ok_or_else(|| {
                Error::invalid(format!("{idx} is not an even degree in 2..={max_degree}"))
            })?;
            if lookup[r] == ABSENT {
                lookup[r] = columns.len() as u32;
                columns.push(idx.clone());
            }
        }
        Ok(MajoranaColumns { keys, lookup, columns })
    }

    pub fn keys(&self) -> &MajoranaKeys {
        &self.keys
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn column(&self, idx: &[usize]) -> Option<usize> {
        let r = self.keys.rank(idx)?;
        let c = self.lookup[r];
        (c != ABSENT).then_some(c as usize)
    }

    pub fn index(&self, col: usize) -> &MajoranaIndex {
        &self.columns[col]
    }

    pub fn indices(&self) -> &[MajoranaIndex] {
        &self.columns
    }
}

#[derive(Clone, Debug)]
pub struct PauliKeys {
    n: usize,
    max_weight: usize,
    table: BinomialTable,
    offsets: Vec<usize>,
    pow3: Vec<usize>,
    total: usize,
}

impl PauliKeys {
    pub fn new(n: usize, max_weight: usize) -> Self {
        let pow3: Vec<usize> = (0..=max_weight).map(|w| 3usize.pow(w as u32)).collect();
        let mut offsets = vec![0usize];
        let mut total = 0;
        for w in 1..=max_weight {
            total += binomial(n, w) as usize * pow3[w];
            offsets.push(total);
        }
        PauliKeys { n, max_weight, table: BinomialTable::new(n), offsets, pow3, total }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// Rank of the Pauli acting as `codes[i] ∈ {0:X, 1:Y, 2:Z}` on ascending `support[i]`.
    #[inline]
    pub fn rank(&self, support: &[usize], codes: &[usize]) -> Option<usize> {
        let w = support.len();
        if w == 0 || w > self.max_weight || codes.iter().any(|&c| c > 2) {
            return None;
        }
        let local: usize = codes.iter().enumerate().map(|(i, &c)| c * self.pow3[i]).sum();
        Some(self.offsets[w - 1] + self.table.colex_rank(support) * self.pow3[w] + local)
    }

    pub fn rank_string(&self, p: &PauliString) -> Option<usize> {
        let mut support = Vec::new();
        let mut codes = Vec::new();
        for (q, s) in p.0.iter().enumerate() {
            if let Some(c) = s.code() {
                support.push(q);
                codes.push(c);
            }
        }
        self.rank(&support, &codes)
    }

    pub fn unrank(&self, rank: usize) -> PauliString {
        let slot = self.offsets.iter().rposition(|&o| o <= rank).unwrap();
        let w = slot + 1;
        let within = rank - self.offsets[slot];
        let support = self.table.colex_unrank(within / self.pow3[w], w);
        let mut local = within % self.pow3[w];
        let mut out = PauliString::identity(self.n);
        for &q in &support {
            out.0[q] = Pauli::from_code(local % 3);
            local /= 3;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct PauliColumns {
    keys: PauliKeys,
    lookup: Vec<u32>,
    columns: Vec<PauliString>,
}

impl PauliColumns {
    pub fn all(n: usize, max_weight: usize) -> Self {
        let keys = PauliKeys::new(n, max_weight);
        let columns = (0..keys.len()).map(|r| keys.unrank(r)).collect();
        let lookup = (0..keys.len() as u32).collect();
        PauliColumns { keys, lookup, columns }
    }

    pub fn selected<'a>(
        n: usize,
        max_weight: usize,
        wanted: impl IntoIterator<Item = &'a PauliString>,
    ) -> Result<Self> {
        let keys = PauliKeys::new(n, max_weight);
        let mut lookup = vec![ABSENT; keys.len()];
        let mut columns = Vec::new();
        for p in wanted {
            if p.len() != n {
                return Err(Error::invalid(format!("Pauli string {p} is not on {n} qubits")));
            }
            let r = keys
                .rank_string(p)
                .ok_or_else(|| Error::invalid(format!("{p} has weight outside 1..={max_weight}")))?;
            if lookup[r] == ABSENT {
                lookup[r] = columns.len() as u32;
                columns.push(p.clone());
            }
        }
        Ok(PauliColumns { keys, lookup, columns })
    }

    pub fn keys(&self) -> &PauliKeys {
        &self.keys
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn column(&self, support: &[usize], codes: &[usize]) -> Option<usize> {
        let r = self.keys.rank(support, codes)?;
        let c = self.lookup[r];
        (c != ABSENT).then_some(c as usize)
    }

    pub fn column_of(&self, p: &PauliString) -> Option<usize> {
        let r = self.keys.rank_string(p)?;
        let c = self.lookup[r];
        (c != ABSENT).then_some(c as usize)
    }

    pub fn string(&self, col: usize) -> &PauliString {
        &self.columns[col]
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.columns
    }
}

/// All diagonal Majorana indices of degree `2j` on `n` modes.
pub fn diagonal_indices(n: usize, j: usize) -> Vec<MajoranaIndex> {
    combinations(n, j)
        .map(|modes| MajoranaIndex::from_modes(&modes).expect("ascending modes"))
        .collect()
}
