//! Compilation of fermionic Gaussian unitaries into `Z` and `XX` rotations.
//!
//! An orthogonal `Q ∈ O(2n)` is factored into Givens rotations on adjacent Majorana
//! axes plus a diagonal `±1` matrix. A Givens rotation on axes `(2p, 2p+1)` is the
//! gate `exp(−iθ/2 Z_p)`; on `(2p+1, 2p+2)` it is `exp(−iθ/2 X_p X_{p+1})`. The
//! diagonal part becomes a single terminal layer of Pauli strings.
//!
//! [`naive_compile`] zeroes the lower triangle column by column. [`compile`] first
//! splits `Q` into `4 × 4` blocks on neighbouring mode pairs, arranged in the
//! alternating left/right elimination order over the `2 × 2` block grid, and then
//! factors each block on its own.

use std::fmt;

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::dense::{jw_gammas, max_abs_diff, pauli_rotation, pauli_string_matrix, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Entries below this are treated as already zero during elimination.
const SKIP_TOL: f64 = 1e-14;

/// Wrap an angle into `(−π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
    if t <= -PI {
        t += 2.0 * PI;
    }
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Rotation by `angle` in the plane of Majorana axes `(axis, axis+1)`:
/// `[[cos, −sin], [sin, cos]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Givens {
    pub axis: usize,
    pub angle: f64,
}

impl Givens {
    pub fn matrix(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        let (s, c) = self.angle.sin_cos();
        let a = self.axis;
        m[(a, a)] = c;
        m[(a, a + 1)] = -s;
        m[(a + 1, a)] = s;
        m[(a + 1, a + 1)] = c;
        m
    }

    pub fn to_gate(self) -> Gate {
        let p = self.axis / 2;
        if self.axis.is_multiple_of(2) {
            Gate::ZRot { qubit: p, angle: self.angle }
        } else {
            Gate::XxRot { qubit: p, angle: self.angle }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    /// `exp(−iθ/2 Z_qubit)`.
    ZRot { qubit: usize, angle: f64 },
    /// `exp(−iθ/2 X_qubit X_{qubit+1})`.
    XxRot { qubit: usize, angle: f64 },
    /// Product of Pauli strings, applied together.
    PauliLayer(Vec<PauliString>),
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::ZRot { qubit, angle } => write!(f, "z,{qubit},{angle:.17e}"),
            Gate::XxRot { qubit, angle } => write!(f, "xx,{}-{},{angle:.17e}", qubit, qubit + 1),
            Gate::PauliLayer(strings) => {
                let s: Vec<String> = strings.iter().map(|p| p.to_string()).collect();
                write!(f, "pauli,{},0", s.join(" "))
            }
        }
    }
}

/// Gates in time order (first element acts first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSequence {
    pub n: usize,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateMetrics {
    pub two_qubit_count: usize,
    pub rotation_depth: usize,
    pub single_qubit_count: usize,
}

impl GateSequence {
    /// Dense unitary, up to global phase.
    pub fn unitary(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut u = CMatrix::identity(dim, dim);
        for g in &self.gates {
            let m = match g {
                Gate::ZRot { qubit, angle } => {
                    let mut p = PauliString::identity(self.n);
                    p.0[*qubit] = Pauli::Z;
                    pauli_rotation(&p, *angle)
                }
                Gate::XxRot { qubit, angle } => {
                    let mut p = PauliString::identity(self.n);
                    p.0[*qubit] = Pauli::X;
                    p.0[*qubit + 1] = Pauli::X;
                    pauli_rotation(&p, *angle)
                }
                Gate::PauliLayer(strings) => strings
                    .iter()
                    .fold(CMatrix::identity(dim, dim), |acc, s| pauli_string_matrix(s) * acc),
            };
            u = m * u;
        }
        u
    }

    /// Greedy layering: each rotation goes one layer after the latest gate on its
    /// qubits; a nonempty Pauli layer adds one more layer.
    pub fn metrics(&self) -> GateMetrics {
        let mut level = vec![0usize; self.n.max(1)];
        let mut depth = 0;
        let mut two = 0;
        let mut single = 0;
        let mut pauli = false;
        for g in &self.gates {
            match g {
                Gate::ZRot { qubit, .. } => {
                    single += 1;
                    level[*qubit] += 1;
                    depth = depth.max(level[*qubit]);
                }
                Gate::XxRot { qubit, .. } => {
                    two += 1;
                    let l = level[*qubit].max(level[qubit + 1]) + 1;
                    level[*qubit] = l;
                    level[qubit + 1] = l;
                    depth = depth.max(l);
                }
                Gate::PauliLayer(strings) => pauli |= !strings.is_empty(),
            }
        }
        GateMetrics {
            two_qubit_count: two,
            rotation_depth: depth + usize::from(pauli),
            single_qubit_count: single,
        }
    }
}

/// Pauli strings `W_p` realising a diagonal `±1` matrix, one per mode whose
/// `2 × 2` block is not the identity.
pub fn pauli_layer_for_diagonal(diag: &[i8]) -> Result<Vec<PauliString>> {
    if !diag.len().is_multiple_of(2) || diag.iter().any(|&d| d != 1 && d != -1) {
        return Err(Error::invalid("diagonal must have even length and entries ±1"));
    }
    let n = diag.len() / 2;
    let mut out = Vec::new();
    for p in 0..n {
        let mut s = PauliString::identity(n);
        match (diag[2 * p], diag[2 * p + 1]) {
            (1, 1) => continue,
            (-1, -1) => s.0[p] = Pauli::Z,
            (first, _) => {
                s.0[p] = if first == 1 { Pauli::X } else { Pauli::Y };
                for q in s.0.iter_mut().skip(p + 1) {
                    *q = Pauli::Z;
                }
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Matrix-product factor: a Givens rotation or a diagonal sign matrix.
#[derive(Clone, Debug, PartialEq)]
enum Factor {
    Rot(Givens),
    Diag(Vec<i8>),
}

/// Rewrite `F_1 ⋯ F_m` as `D · G_1 ⋯ G_k` using `Δ G = (Δ G Δ) Δ`, where
/// conjugating by a sign matrix flips the angle when the two axis signs differ.
fn push_diagonals_left(factors: Vec<Factor>, dim: usize) -> (Vec<i8>, Vec<Givens>) {
    let mut acc = vec![1i8; dim];
    let mut rots: Vec<Givens> = Vec::new();
    for f in factors {
        match f {
            Factor::Rot(g) => rots.push(g),
            Factor::Diag(d) => {
                for g in rots.iter_mut() {
                    if d[g.axis] != d[g.axis + 1] {
                        g.angle = wrap_angle(-g.angle);
                    }
                }
                for (a, b) in acc.iter_mut().zip(&d) {
                    *a *= b;
                }
            }
        }
    }
    (acc, rots)
}

fn to_sequence(n: usize, diag: &[i8], rots: &[Givens]) -> Result<GateSequence> {
    let mut gates: Vec<Gate> = rots
        .iter()
        .rev()
        .filter(|g| g.angle != 0.0)
        .map(|g| g.to_gate())
        .collect();
    let layer = pauli_layer_for_diagonal(diag)?;
    if !layer.is_empty() {
        gates.push(Gate::PauliLayer(layer));
    }
    Ok(GateSequence { n, gates })
}

fn check_orthogonal(q: &DMatrix<f64>) -> Result<usize> {
    if q.nrows() == 0 || !q.nrows().is_multiple_of(2) || !crate::linalg::is_orthogonal(q, 1e-9) {
        return Err(Error::invalid("expected an even-dimensional orthogonal matrix"));
    }
    Ok(q.nrows() / 2)
}

fn snap_diagonal(w: &DMatrix<f64>, skip: Option<usize>) -> Result<Vec<i8>> {
    let dim = w.nrows();
    for i in 0..dim {
        for j in 0..dim {
            let in_skip = skip.is_some_and(|a| (a..a + 2).contains(&i) && (a..a + 2).contains(&j));
            if i != j && !in_skip && w[(i, j)].abs() > 1e-9 {
                return Err(Error::Numerical(format!(
                    "elimination left entry ({i},{j}) = {:.3e}",
                    w[(i, j)]
                )));
            }
        }
    }
    Ok((0..dim).map(|i| if w[(i, i)] < 0.0 { -1 } else { 1 }).collect())
}

/// Column-by-column elimination `Q = G_1 ⋯ G_L D`.
fn naive_factors(q: &DMatrix<f64>) -> Result<Vec<Factor>> {
    let dim = q.nrows();
    let mut w = q.clone();
    let mut factors = Vec::new();
    for c in 0..dim.saturating_sub(1) {
        for r in (c + 1..dim).rev() {
            let (a, b) = (w[(r - 1, c)], w[(r, c)]);
            if b.abs() <= SKIP_TOL {
                continue;
            }
            let g = Givens { axis: r - 1, angle: wrap_angle(b.atan2(a)) };
            apply_rot_left_transposed(&mut w, g);
            factors.push(Factor::Rot(g));
        }
    }
    factors.push(Factor::Diag(snap_diagonal(&w, None)?));
    Ok(factors)
}

/// `W ← Gᵀ W`.
fn apply_rot_left_transposed(w: &mut DMatrix<f64>, g: Givens) {
    let (s, c) = g.angle.sin_cos();
    let (i, j) = (g.axis, g.axis + 1);
    for col in 0..w.ncols() {
        let (x, y) = (w[(i, col)], w[(j, col)]);
        w[(i, col)] = c * x + s * y;
        w[(j, col)] = -s * x + c * y;
    }
}

/// `W ← W G`.
fn apply_rot_right(w: &mut DMatrix<f64>, g: Givens) {
    let (s, c) = g.angle.sin_cos();
    let (i, j) = (g.axis, g.axis + 1);
    for row in 0..w.nrows() {
        let (x, y) = (w[(row, i)], w[(row, j)]);
        w[(row, i)] = c * x + s * y;
        w[(row, j)] = -s * x + c * y;
    }
}

/// Reck-style baseline compilation.
pub fn naive_compile(q: &DMatrix<f64>) -> Result<GateSequence> {
    let n = check_orthogonal(q)?;
    let (diag, rots) = push_diagonals_left(naive_factors(q)?, 2 * n);
    to_sequence(n, &diag, &rots)
}

/// A `4 × 4` orthogonal block acting on Majorana axes `offset .. offset+4`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub offset: usize,
    pub matrix: Matrix4<f64>,
}

impl Block {
    fn embed(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(dim, dim);
        for i in 0..4 {
            for j in 0..4 {
                m[(self.offset + i, self.offset + j)] = self.matrix[(i, j)];
            }
        }
        m
    }
}

/// `Q = B_{R+1} ⋯ B_{R+L} · D · G · B_R ⋯ B_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub n: usize,
    /// `B_{R+1}, …, B_{R+L}` in matrix-product order.
    pub left: Vec<Block>,
    pub diagonal: Vec<i8>,
    pub leftover: Givens,
    /// `B_R, …, B_1` in matrix-product order.
    pub right: Vec<Block>,
}

impl BlockDecomposition {
    pub fn recompose(&self) -> DMatrix<f64> {
        let dim = 2 * self.n;
        let mut m = DMatrix::identity(dim, dim);
        for b in &self.left {
            m *= b.embed(dim);
        }
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            self.diagonal.iter().map(|&x| f64::from(x)),
        ));
        m = m * d * self.leftover.matrix(dim);
        for b in &self.right {
            m *= b.embed(dim);
        }
        m
    }

    /// Number of blocks whose matrix is not the identity.
    pub fn block_count(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

fn rots_to_block(offset: usize, rots: &[Givens]) -> Block {
    let mut m = DMatrix::identity(4, 4);
    for g in rots {
        m *= Givens { axis: g.axis - offset, angle: g.angle }.matrix(4);
    }
    Block { offset, matrix: Matrix4::from_iterator(m.iter().copied()) }
}

/// Split `Q` into `4 × 4` blocks by alternating left and right eliminations over the
/// `n × n` grid of `2 × 2` blocks; the remaining `2 × 2` block becomes `D · G`.
pub fn block_decompose(q: &DMatrix<f64>) -> Result<BlockDecomposition> {
    let n = check_orthogonal(q)?;
    let mut w = q.clone();
    let mut left_ops: Vec<Block> = Vec::new();
    let mut right_ops: Vec<Block> = Vec::new();
    for i in 1..n {
        if i % 2 == 1 {
            for j in 0..i {
                let (p, qb) = (n - j - 1, i - j - 1);
                let rots = eliminate_right(&mut w, p, qb);
                if !rots.is_empty() {
                    // the block enters Q through Xᵀ = G(−φ_m) ⋯ G(−φ_1)
                    let inv: Vec<Givens> = rots
                        .iter()
                        .rev()
                        .map(|g| Givens { axis: g.axis, angle: wrap_angle(-g.angle) })
                        .collect();
                    right_ops.push(rots_to_block(2 * qb, &inv));
                }
            }
        } else {
            for j in 1..=i {
                let (p, qb) = (n + j - i - 1, j - 1);
                let rots = eliminate_left(&mut w, p, qb);
                if !rots.is_empty() {
                    left_ops.push(rots_to_block(2 * p - 2, &rots));
                }
            }
        }
    }
    let leftover_axis = if n % 2 == 1 { 2 * n - 2 } else { 0 };
    let mut diagonal = snap_diagonal(&w, Some(leftover_axis))?;
    let a = leftover_axis;
    let (b00, b10) = (w[(a, a)], w[(a + 1, a)]);
    let det = w[(a, a)] * w[(a + 1, a + 1)] - w[(a, a + 1)] * w[(a + 1, a)];
    let angle = if det > 0.0 {
        diagonal[a] = 1;
        diagonal[a + 1] = 1;
        wrap_angle(b10.atan2(b00))
    } else {
        diagonal[a] = 1;
        diagonal[a + 1] = -1;
        wrap_angle((-b10).atan2(b00))
    };
    right_ops.reverse();
    Ok(BlockDecomposition {
        n,
        left: left_ops,
        diagonal,
        leftover: Givens { axis: a, angle },
        right: right_ops,
    })
}

/// Zero block `(p, qb)` from the left using row blocks `(p−1, p)`; returns the
/// rotations `G` with `W ← Gᵀ W`, in application order.
fn eliminate_left(w: &mut DMatrix<f64>, p: usize, qb: usize) -> Vec<Givens> {
    let top = 2 * p - 2;
    let mut rots = Vec::new();
    for (col, rows) in [(0usize, [3usize, 2, 1]), (1, [3, 2, 0])] {
        for &r in rows.iter().filter(|&&r| r > col) {
            let (a, b) = (w[(top + r - 1, 2 * qb + col)], w[(top + r, 2 * qb + col)]);
            if b.abs() <= SKIP_TOL {
                continue;
            }
            let g = Givens { axis: top + r - 1, angle: wrap_angle(b.atan2(a)) };
            apply_rot_left_transposed(w, g);
            rots.push(g);
        }
    }
    rots
}

/// Zero block `(p, qb)` from the right using column blocks `(qb, qb+1)`, leaving the
/// lower-left entry of block `(p, qb+1)` zero too; returns rotations `X` with
/// `W ← W X`, in application order.
fn eliminate_right(w: &mut DMatrix<f64>, p: usize, qb: usize) -> Vec<Givens> {
    let left = 2 * qb;
    let mut rots = Vec::new();
    for (row, cols) in [(1usize, [0usize, 1, 2]), (0, [0, 1, 3])] {
        for &c in cols.iter().filter(|&&c| c + 2 <= 3 + row) {
            let (a, b) = (w[(2 * p + row, left + c)], w[(2 * p + row, left + c + 1)]);
            if a.abs() <= SKIP_TOL {
                continue;
            }
            let g = Givens { axis: left + c, angle: wrap_angle((-a).atan2(b)) };
            apply_rot_right(w, g);
            rots.push(g);
        }
    }
    rots
}

fn block_factors(block: &Block) -> Result<Vec<Factor>> {
    let local = DMatrix::from_iterator(4, 4, block.matrix.iter().copied());
    let mut out = Vec::new();
    for f in naive_factors(&local)? {
        out.push(match f {
            Factor::Rot(g) => Factor::Rot(Givens { axis: g.axis + block.offset, angle: g.angle }),
            Factor::Diag(d) => {
                if d.iter().all(|&x| x == 1) {
                    continue;
                }
                let mut full = vec![1i8; block.offset];
                full.extend(d);
                Factor::Diag(full)
            }
        });
    }
    Ok(out)
}

fn pad_diag(d: Vec<i8>, dim: usize) -> Vec<i8> {
    let mut d = d;
    d.resize(dim, 1);
    d
}

/// Block-based compilation with a single terminal Pauli layer.
pub fn compile(q: &DMatrix<f64>) -> Result<GateSequence> {
    let n = check_orthogonal(q)?;
    if n == 1 {
        return naive_compile(q);
    }
    let dim = 2 * n;
    let dec = block_decompose(q)?;
    let mut factors = Vec::new();
    let push_block = |b: &Block, factors: &mut Vec<Factor>| -> Result<()> {
        for f in block_factors(b)? {
            factors.push(match f {
                Factor::Diag(d) => Factor::Diag(pad_diag(d, dim)),
                other => other,
            });
        }
        Ok(())
    };
    for b in &dec.left {
        push_block(b, &mut factors)?;
    }
    factors.push(Factor::Diag(dec.diagonal.clone()));
    factors.push(Factor::Rot(dec.leftover));
    for b in &dec.right {
        push_block(b, &mut factors)?;
    }
    let (diag, rots) = push_diagonals_left(factors, dim);
    to_sequence(n, &diag, &rots)
}

/// Largest entry of `U γ_μ U† − Σ_ν Q_{νμ} γ_ν` over all `μ`, using dense matrices.
/// Refuses `n > 6`.
pub fn verify_action(seq: &GateSequence, q: &DMatrix<f64>) -> Result<f64> {
    let n = seq.n;
    if n > 6 {
        return Err(Error::Refused(format!("dense verification limited to n <= 6 (got {n})")));
    }
    if q.nrows() != 2 * n {
        return Err(Error::invalid("matrix size differs from 2n"));
    }
    let u = seq.unitary();
    let ud = u.adjoint();
    let gammas = jw_gammas(n);
    let dim = 1usize << n;
    let mut worst = 0.0f64;
    for mu in 0..2 * n {
        let lhs = &u * &gammas[mu] * &ud;
        let mut rhs = CMatrix::zeros(dim, dim);
        for (nu, g) in gammas.iter().enumerate() {
            rhs += g * num_complex::Complex64::new(q[(nu, mu)], 0.0);
        }
        worst = worst.max(max_abs_diff(&lhs, &rhs));
    }
    Ok(worst)
}

/// Parse a whitespace-separated square matrix, one row per line.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{t}'"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid("matrix must be square and nonempty"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_compiles_to_nothing() {
        let q = DMatrix::identity(6, 6);
        assert!(compile(&q).unwrap().gates.is_empty());
        assert!(naive_compile(&q).unwrap().gates.is_empty());
        assert_eq!(
            GateSequence { n: 3, gates: vec![] }.metrics(),
            GateMetrics { two_qubit_count: 0, rotation_depth: 0, single_qubit_count: 0 }
        );
    }

    #[test]
    fn single_givens_examples() {
        let theta = 0.7;
        let q = Givens { axis: 0, angle: theta }.matrix(4);
        for seq in [compile(&q).unwrap(), naive_compile(&q).unwrap()] {
            assert_eq!(seq.gates.len(), 1);
            match seq.gates[0] {
                Gate::ZRot { qubit: 0, angle } => assert!((angle - theta).abs() < 1e-12),
                ref g => panic!("unexpected {g:?}"),
            }
        }
        let q = Givens { axis: 1, angle: theta }.matrix(4);
        for seq in [compile(&q).unwrap(), naive_compile(&q).unwrap()] {
            assert_eq!(seq.gates.len(), 1, "{seq:?}");
            match seq.gates[0] {
                Gate::XxRot { qubit: 0, angle } => assert!((angle - theta).abs() < 1e-12),
                ref g => panic!("unexpected {g:?}"),
            }
        }
    }

    #[test]
    fn pauli_layer_examples() {
        let layer = pauli_layer_for_diagonal(&[1, -1, 1, 1, 1, 1]).unwrap();
        assert_eq!(layer, vec![PauliString::parse("XZZ").unwrap()]);
        let layer = pauli_layer_for_diagonal(&[-1, 1, -1, -1]).unwrap();
        assert_eq!(layer, vec![PauliString::parse("YZ").unwrap(), PauliString::parse("IZ").unwrap()]);
    }

    #[test]
    fn parallel_layer_depth() {
        let seq = GateSequence {
            n: 4,
            gates: vec![Gate::XxRot { qubit: 0, angle: 0.1 }, Gate::XxRot { qubit: 2, angle: 0.2 }],
        };
        let m = seq.metrics();
        assert_eq!(m.rotation_depth, 1);
        assert_eq!(m.two_qubit_count, 2);
    }

    #[test]
    fn wraps_angles() {
        use std::f64::consts::PI;
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
    }
}
