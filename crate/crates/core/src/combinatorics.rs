//! Binomial coefficients and colexicographic subset ranking.

/// Exact binomial coefficient; returns 0 when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

pub fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Precomputed Pascal triangle used for ranking subsets.
#[derive(Clone, Debug)]
pub struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![0u64; n + 2];
            row[0] = 1;
            for k in 1..=n {
                row[k] = rows
                    .last()
                    .map(|prev: &Vec<u64>| prev[k - 1] + prev[k])
                    .unwrap_or(0);
            }
            rows.push(row);
        }
        BinomialTable { rows }
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }

    /// Colexicographic rank of a strictly ascending subset.
    #[inline]
    pub fn colex_rank(&self, subset: &[usize]) -> usize {
        subset
            .iter()
            .enumerate()
            .map(|(i, &x)| self.get(x, i + 1) as usize)
            .sum()
    }

    /// Inverse of [`colex_rank`](Self::colex_rank) for subsets of size `k`.
    pub fn colex_unrank(&self, mut rank: usize, k: usize) -> Vec<usize> {
        let mut out = vec![0usize; k];
        for i in (0..k).rev() {
            let mut x = i;
            while self.get(x + 1, i + 1) as usize <= rank {
                x += 1;
            }
            rank -= self.get(x, i + 1) as usize;
            out[i] = x;
        }
        out
    }
}

/// Iterator over the `k`-subsets of `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations::new(n, k)
}

/// All permutations of `0..n` in lexicographic order (Heap-free, via next-permutation).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
    out
}

/// Parity (0 even, 1 odd) of the permutation that sorts `seq`, counted by inversions.
pub fn inversion_parity(seq: &[usize]) -> u32 {
    let mut inv = 0u32;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv ^= 1;
            }
        }
    }
    inv
}
