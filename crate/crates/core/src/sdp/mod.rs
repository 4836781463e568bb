//! Standard-form semidefinite programs over real symmetric blocks.
//!
//! ```text
//! minimize    <C, X>
//! subject to  <A_i, X> = b_i      i = 1..m
//!             X_b ⪰ 0 for PSD blocks, X_b ≥ 0 for nonnegative blocks
//! ```
//!
//! The variable is addressed by `svec` coordinates: for a PSD block of side
//! `n`, the upper triangle row by row with off-diagonal entries scaled by
//! `√2`, so `<C, X>` is the plain dot product of the two coordinate vectors.
//! Complex Hermitian variables enter through [`hermitian_embed`].

mod ipm;

use nalgebra::DMatrix;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub use ipm::solve;

/// A cone in the block structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// Real symmetric PSD matrices of the given side.
    Psd(usize),
    /// Nonnegative scalars.
    Nonneg(usize),
}

impl Cone {
    /// Number of `svec` coordinates.
    pub fn num_vars(self) -> usize {
        match self {
            Cone::Psd(n) => n * (n + 1) / 2,
            Cone::Nonneg(n) => n,
        }
    }

    pub fn side(self) -> usize {
        match self {
            Cone::Psd(n) | Cone::Nonneg(n) => n,
        }
    }
}

/// One entry `M_ij = M_ji = value` of a symmetric coefficient matrix.
///
/// Each unordered pair should be given once; repeated pairs add up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

impl Term {
    pub fn new(block: usize, row: usize, col: usize, value: f64) -> Self {
        Self { block, row, col, value }
    }
}

/// Value of one block of a primal or dual variable.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockValue {
    Psd(DMatrix<f64>),
    Nonneg(Vec<f64>),
}

impl BlockValue {
    /// Smallest eigenvalue (PSD) or entry (nonnegative).
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            BlockValue::Psd(m) if m.nrows() > 0 => {
                m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
            }
            BlockValue::Nonneg(v) if !v.is_empty() => v.iter().copied().fold(f64::INFINITY, f64::min),
            _ => 0.0,
        }
    }

    /// Largest eigenvalue (PSD) or entry (nonnegative).
    pub fn max_eigenvalue(&self) -> f64 {
        match self {
            BlockValue::Psd(m) if m.nrows() > 0 => {
                m.clone().symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
            BlockValue::Nonneg(v) if !v.is_empty() => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            _ => 0.0,
        }
    }

    /// Trace inner product.
    pub fn dot(&self, other: &BlockValue) -> f64 {
        match (self, other) {
            (BlockValue::Psd(a), BlockValue::Psd(b)) => a.dot(b),
            (BlockValue::Nonneg(a), BlockValue::Nonneg(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            _ => panic!("block kinds differ"),
        }
    }

    pub fn as_psd(&self) -> Option<&DMatrix<f64>> {
        match self {
            BlockValue::Psd(m) => Some(m),
            BlockValue::Nonneg(_) => None,
        }
    }

    pub fn as_nonneg(&self) -> Option<&[f64]> {
        match self {
            BlockValue::Nonneg(v) => Some(v),
            BlockValue::Psd(_) => None,
        }
    }
}

/// A standard-form problem; build it with [`SdpBuilder`].
#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    blocks: Vec<Cone>,
    offsets: Vec<usize>,
    objective: Vec<f64>,
    /// Sparse rows of `A` over `svec` coordinates, sorted by column.
    rows: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
}

fn svec_offset(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * i.saturating_sub(1) / 2 + j - i
}

impl SdpProblem {
    pub fn blocks(&self) -> &[Cone] {
        &self.blocks
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Coordinate index of entry `(i, j)` of block `block`.
    pub fn var_index(&self, block: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        match self.blocks[block] {
            Cone::Psd(n) => {
                assert!(j < n, "entry ({i},{j}) outside block of side {n}");
                self.offsets[block] + svec_offset(n, i, j)
            }
            Cone::Nonneg(n) => {
                assert!(i == j && j < n, "nonnegative blocks are diagonal");
                self.offsets[block] + i
            }
        }
    }

    /// `(block, i, j)` for every coordinate.
    pub(crate) fn coordinate_table(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.num_vars());
        for (b, cone) in self.blocks.iter().enumerate() {
            match *cone {
                Cone::Psd(n) => {
                    for i in 0..n {
                        for j in i..n {
                            out.push((b, i, j));
                        }
                    }
                }
                Cone::Nonneg(n) => out.extend((0..n).map(|i| (b, i, i))),
            }
        }
        out
    }

    /// Converts a coordinate vector to block values.
    pub fn unpack(&self, x: &[f64]) -> Vec<BlockValue> {
        assert_eq!(x.len(), self.num_vars());
        let mut out: Vec<BlockValue> = self
            .blocks
            .iter()
            .map(|c| match *c {
                Cone::Psd(n) => BlockValue::Psd(DMatrix::zeros(n, n)),
                Cone::Nonneg(n) => BlockValue::Nonneg(vec![0.0; n]),
            })
            .collect();
        for (k, (b, i, j)) in self.coordinate_table().into_iter().enumerate() {
            match &mut out[b] {
                BlockValue::Psd(m) => {
                    let v = if i == j { x[k] } else { x[k] / std::f64::consts::SQRT_2 };
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
                BlockValue::Nonneg(v) => v[i] = x[k],
            }
        }
        out
    }

    /// Converts block values to a coordinate vector.
    pub fn pack(&self, blocks: &[BlockValue]) -> Vec<f64> {
        self.coordinate_table()
            .into_iter()
            .map(|(b, i, j)| match &blocks[b] {
                BlockValue::Psd(m) => {
                    if i == j {
                        m[(i, i)]
                    } else {
                        std::f64::consts::SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)])
                    }
                }
                BlockValue::Nonneg(v) => v[i],
            })
            .collect()
    }

    /// `A(X)`.
    pub fn apply(&self, x: &[BlockValue]) -> Vec<f64> {
        let v = self.pack(x);
        self.rows.iter().map(|r| r.iter().map(|&(k, a)| a * v[k]).sum()).collect()
    }

    /// `Σ_i y_i A_i` as block values.
    pub fn apply_adjoint(&self, y: &[f64]) -> Vec<BlockValue> {
        assert_eq!(y.len(), self.rows.len());
        let mut v = vec![0.0; self.num_vars()];
        for (row, &yi) in self.rows.iter().zip(y) {
            for &(k, a) in row {
                v[k] += yi * a;
            }
        }
        self.unpack(&v)
    }

    /// `<C, X>`.
    pub fn objective_value(&self, x: &[BlockValue]) -> f64 {
        self.pack(x).iter().zip(&self.objective).map(|(a, b)| a * b).sum()
    }

    /// Checks a Farkas ray for primal infeasibility: returns `(b·y, λ_max(Σ y_i A_i))`.
    pub fn farkas_primal(&self, y: &[f64]) -> (f64, f64) {
        let by = self.rhs.iter().zip(y).map(|(a, b)| a * b).sum();
        let viol = self
            .apply_adjoint(y)
            .iter()
            .map(BlockValue::max_eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max);
        (by, viol)
    }
}

/// Incremental construction of an [`SdpProblem`].
#[derive(Debug, Clone)]
pub struct SdpBuilder {
    problem: SdpProblem,
}

impl SdpBuilder {
    pub fn new(blocks: Vec<Cone>) -> Result<Self> {
        if blocks.iter().any(|c| c.side() == 0) {
            return Err(Error::InvalidArgument("block sizes must be at least 1".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut total = 0;
        for c in &blocks {
            offsets.push(total);
            total += c.num_vars();
        }
        Ok(Self {
            problem: SdpProblem {
                blocks,
                offsets,
                objective: vec![0.0; total],
                rows: Vec::new(),
                rhs: Vec::new(),
            },
        })
    }

    fn coefficient(&self, t: &Term) -> (usize, f64) {
        let k = self.problem.var_index(t.block, t.row, t.col);
        let scale = if t.row == t.col { 1.0 } else { std::f64::consts::SQRT_2 };
        (k, t.value * scale)
    }

    /// Adds `terms` to the objective matrix `C`.
    pub fn add_objective(&mut self, terms: impl IntoIterator<Item = Term>) {
        for t in terms {
            let (k, v) = self.coefficient(&t);
            self.problem.objective[k] += v;
        }
    }

    /// Adds the constraint `<A, X> = rhs` with `A` given by `terms`; returns its row index.
    pub fn add_constraint(&mut self, terms: impl IntoIterator<Item = Term>, rhs: f64) -> usize {
        let mut row: Vec<(usize, f64)> = terms.into_iter().map(|t| self.coefficient(&t)).collect();
        row.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
        for (k, v) in row {
            match merged.last_mut() {
                Some((lk, lv)) if *lk == k => *lv += v,
                _ => merged.push((k, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        self.problem.rows.push(merged);
        self.problem.rhs.push(rhs);
        self.problem.rows.len() - 1
    }

    pub fn num_constraints(&self) -> usize {
        self.problem.rows.len()
    }

    pub fn build(self) -> SdpProblem {
        self.problem
    }
}

/// `[[Re H, -Im H], [Im H, Re H]]`, a real symmetric matrix with the spectrum of `H` doubled.
pub fn hermitian_embed(h: &CMatrix) -> Result<DMatrix<f64>> {
    h.check_hermitian(crate::linalg::HERMITIAN_TOL)?;
    let n = h.rows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let z = h[(r, c)];
            out[(r, c)] = z.re;
            out[(r + n, c + n)] = z.re;
            out[(r, c + n)] = -z.im;
            out[(r + n, c)] = z.im;
        }
    }
    Ok(out)
}

/// Terms of `weight · embed(H) / 2` on a PSD block of side `2n`.
///
/// For a block holding `embed(X)`, the resulting row reads `weight · tr(H X)`.
/// Entries with magnitude at most `1e-15` are dropped.
pub fn complex_terms(block: usize, h: &CMatrix, weight: f64) -> Vec<Term> {
    let n = h.rows();
    let entries: Vec<(usize, usize, Complex64)> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| (r, c, h[(r, c)]))
        .collect();
    complex_terms_sparse(block, n, &entries, weight)
}

/// [`complex_terms`] for a Hermitian matrix of side `n` given as `(row, col, value)`
/// entries; both triangles must be listed.
pub fn complex_terms_sparse(block: usize, n: usize, entries: &[(usize, usize, Complex64)], weight: f64) -> Vec<Term> {
    let mut out = Vec::new();
    let half = 0.5 * weight;
    let keep = |v: f64| v.abs() > 1e-15;
    for &(r, c, z) in entries {
        let re = half * z.re;
        if r <= c && keep(re) {
            out.push(Term::new(block, r, c, re));
            out.push(Term::new(block, r + n, c + n, re));
        }
        let im = -half * z.im;
        if keep(im) {
            out.push(Term::new(block, r, c + n, im));
        }
    }
    out
}

/// Recovers the complex Hermitian matrix represented by a real block of side `2n`.
///
/// The block need not have the exact embedding structure; it is averaged onto it.
pub fn complex_block(y: &DMatrix<f64>) -> CMatrix {
    let n = y.nrows() / 2;
    CMatrix::from_fn(n, n, |r, c| {
        Complex64::new(
            0.5 * (y[(r, c)] + y[(r + n, c + n)]),
            0.5 * (y[(r + n, c)] - y[(r, c + n)]),
        )
    })
}

/// Solution status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
}

/// Solver tolerances and caps.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Stop when the relative primal, dual and gap residuals are all below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Change in the normalised ray between iterations below which it counts as converged.
    pub ray_tol: f64,
    /// Allowed violation when re-verifying an infeasibility certificate.
    pub certificate_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            ray_tol: 1e-7,
            certificate_tol: 1e-8,
        }
    }
}

/// Relative KKT residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals {
    /// `||b - A(X)|| / (1 + ||b||)`
    pub primal: f64,
    /// `||C - A*(y) - S|| / (1 + ||C||)`
    pub dual: f64,
    /// `max(|<C,X> - b·y|, <X,S>) / (1 + |<C,X>| + |b·y|)`
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

/// Result of [`solve`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: Status,
    pub primal: Vec<BlockValue>,
    /// Multipliers `y`, one per constraint. For [`Status::PrimalInfeasible`]
    /// this is the certificate ray, normalised to `b·y = 1`.
    pub dual: Vec<f64>,
    /// Dual slack `S = C - A*(y)`.
    pub slack: Vec<BlockValue>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    /// Re-verified violation of the infeasibility certificate, when one is reported.
    pub certificate_violation: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svec_layout() {
        let b = SdpBuilder::new(vec![Cone::Psd(3), Cone::Nonneg(2)]).unwrap().build();
        let idx: Vec<usize> = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
            .iter()
            .map(|&(i, j)| b.var_index(0, i, j))
            .collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(b.var_index(0, 2, 1), 4);
        assert_eq!(b.var_index(1, 1, 1), 7);
        assert_eq!(b.num_vars(), 8);
    }

    #[test]
    fn pack_unpack_and_inner_products() {
        let mut b = SdpBuilder::new(vec![Cone::Psd(2)]).unwrap();
        b.add_objective([Term::new(0, 0, 1, 3.0)]);
        let p = b.build();
        let x = BlockValue::Psd(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 5.0]));
        let v = p.pack(std::slice::from_ref(&x));
        assert_eq!(p.unpack(&v)[0], x);
        // <C, X> with C = [[0,3],[3,0]]
        assert!((p.objective_value(&[x]) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_of_real_and_pauli_y() {
        let h = CMatrix::from_real_diag(&[1.0, 2.0]);
        let e = hermitian_embed(&h).unwrap();
        assert_eq!(e, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 1.0, 2.0])));
        let y = CMatrix::from_vec(
            2,
            2,
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        let mut ev: Vec<f64> = hermitian_embed(&y).unwrap().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let bad = CMatrix::from_vec(2, 2, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        assert!(hermitian_embed(&bad).is_err());
    }

    #[test]
    fn complex_terms_read_trace_products() {
        let basis = crate::linalg::hermitian_basis(3);
        let x = {
            let mut m = CMatrix::identity(3);
            m[(0, 2)] = Complex64::new(0.3, -0.4);
            m[(2, 0)] = Complex64::new(0.3, 0.4);
            m[(1, 2)] = Complex64::new(0.0, 0.25);
            m[(2, 1)] = Complex64::new(0.0, -0.25);
            m
        };
        let embedded = BlockValue::Psd(hermitian_embed(&x).unwrap());
        for h in &basis {
            let mut b = SdpBuilder::new(vec![Cone::Psd(6)]).unwrap();
            b.add_constraint(complex_terms(0, h, 2.0), 0.0);
            let p = b.build();
            let got = p.apply(std::slice::from_ref(&embedded))[0];
            assert!((got - 2.0 * h.trace_product_re(&x)).abs() < 1e-12);
        }
        assert!(complex_block(embedded.as_psd().unwrap()).max_abs_diff(&x) < 1e-15);
    }
}
