//! Dense complex matrices and the multipartite operations built on them.
//!
//! Tensor indices are big-endian throughout: for subsystem dimensions
//! `(d_1, ..., d_m)` the basis state `|i_1 ... i_m>` has flat index
//! `((i_1 * d_2 + i_2) * d_3 + ...) + i_m`, so the first factor is the most
//! significant digit.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used by [`eig_hermitian`] to accept an input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// The projector `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &CMatrix, s: Complex64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M[i,j] - conj(M[j,i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Hermitian within `rel_tol * max|M_ij|`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= rel_tol * self.max_abs()
    }

    pub fn check_hermitian(&self, rel_tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let deviation = self.hermitian_deviation();
        let allowed = rel_tol * self.max_abs();
        if deviation > allowed {
            return Err(Error::NotHermitian { deviation, allowed });
        }
        Ok(())
    }

    /// `Re tr(self * other)`, the Hilbert-Schmidt pairing for Hermitian operands.
    pub fn trace_product_re(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] * other[(c, r)]).re;
            }
        }
        acc
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, Complex64::new(1.0, 0.0));
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, Complex64::new(-1.0, 0.0));
        out
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let s = a[(ar, ac)];
            if s == Complex64::new(0.0, 0.0) {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                for bc in 0..b.cols {
                    out[(row, ac * b.cols + bc)] = s * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let mut acc = CMatrix::identity(1);
    for f in factors {
        acc = kron(&acc, f);
    }
    acc
}

fn check_dims(m: &CMatrix, dims: &[usize]) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!("invalid subsystem dimensions {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != m.rows {
        return Err(Error::Dimension(format!(
            "subsystem dimensions {dims:?} multiply to {total}, matrix side is {}",
            m.rows
        )));
    }
    Ok(total)
}

/// Splits a flat big-endian index into its digits.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn flat_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

fn index_set(set: &[usize], n: usize, what: &str) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::Dimension(format!(
                "{what} index {i} out of range for {n} subsystems"
            )));
        }
        mask[i] = true;
    }
    Ok(mask)
}

/// Conjugates `m` by the subsystem permutation `U_perm`.
///
/// `perm[q]` is the output position of input factor `q`, so the basis state
/// `|i_1 ... i_m>` is sent to `|i_{perm^-1(1)} ... i_{perm^-1(m)}>`.
pub fn permute_systems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let n = check_dims(m, dims)?;
    if perm.len() != dims.len() {
        return Err(Error::Dimension(format!(
            "permutation of length {} for {} subsystems",
            perm.len(),
            dims.len()
        )));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    let mut out_dims = vec![0; dims.len()];
    for (q, &p) in perm.iter().enumerate() {
        out_dims[p] = dims[q];
    }
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let d = digits(i, dims);
            let mut out = vec![0; d.len()];
            for (q, &p) in perm.iter().enumerate() {
                out[p] = d[q];
            }
            flat_index(&out, &out_dims)
        })
        .collect();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Traces out every factor not listed in `keep`; kept factors stay in their original order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let n = check_dims(m, dims)?;
    let mask = index_set(keep, dims.len(), "kept")?;
    if !mask.iter().any(|&k| k) {
        return Err(Error::InvalidArgument("partial trace must keep at least one factor".into()));
    }
    let kept_dims: Vec<usize> = dims.iter().zip(&mask).filter(|(_, &k)| k).map(|(&d, _)| d).collect();
    let traced_dims: Vec<usize> =
        dims.iter().zip(&mask).filter(|(_, &k)| !k).map(|(&d, _)| d).collect();
    let n_kept: usize = kept_dims.iter().product();
    let n_traced: usize = traced_dims.iter().product();

    // full index for each (kept, traced) pair
    let mut compose = vec![0usize; n_kept * n_traced];
    let mut split = vec![(0usize, 0usize); n];
    for i in 0..n {
        let d = digits(i, dims);
        let mut kd = Vec::with_capacity(kept_dims.len());
        let mut td = Vec::with_capacity(traced_dims.len());
        for (digit, &k) in d.iter().zip(&mask) {
            if k {
                kd.push(*digit);
            } else {
                td.push(*digit);
            }
        }
        let (ki, ti) = (flat_index(&kd, &kept_dims), flat_index(&td, &traced_dims));
        split[i] = (ki, ti);
        compose[ki * n_traced + ti] = i;
    }

    let mut out = CMatrix::zeros(n_kept, n_kept);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for kc in 0..n_kept {
            let j = compose[kc * n_traced + ti];
            out[(ki, kc)] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Transposes the listed factors in the computational basis.
pub fn partial_transpose(m: &CMatrix, dims: &[usize], transposed: &[usize]) -> Result<CMatrix> {
    let n = check_dims(m, dims)?;
    let mask = index_set(transposed, dims.len(), "transposed")?;
    let all_digits: Vec<Vec<usize>> = (0..n).map(|i| digits(i, dims)).collect();
    let mut out = CMatrix::zeros(n, n);
    let mut rd = vec![0; dims.len()];
    let mut cd = vec![0; dims.len()];
    for r in 0..n {
        for c in 0..n {
            for f in 0..dims.len() {
                if mask[f] {
                    rd[f] = all_digits[c][f];
                    cd[f] = all_digits[r][f];
                } else {
                    rd[f] = all_digits[r][f];
                    cd[f] = all_digits[c][f];
                }
            }
            out[(flat_index(&rd, dims), flat_index(&cd, dims))] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are the
/// matching eigenvectors. Inputs that are not Hermitian within
/// [`HERMITIAN_TOL`] (relative) are rejected.
pub fn eig_hermitian(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    m.check_hermitian(HERMITIAN_TOL)?;
    let n = m.rows;
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let eig = nalgebra::SymmetricEigen::new(m.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    m.check_hermitian(HERMITIAN_TOL)?;
    if m.rows == 0 {
        return Ok(Vec::new());
    }
    let mut v: Vec<f64> = m.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(m)?.first().copied().unwrap_or(0.0))
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    let svd = m.to_nalgebra().svd(false, false);
    svd.singular_values.iter().sum()
}

/// Root of the sum of squared entry magnitudes.
pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    let svd = m.to_nalgebra().svd(false, false);
    svd.singular_values.iter().copied().fold(0.0, f64::max)
}

/// Orthonormal basis of the Hermitian operators on `C^d` under `<A,B> = tr(AB)`.
///
/// Order: `E_jj` for each `j`, then for each pair `j < k` the symmetric
/// element `(E_jk + E_kj)/√2` followed by the antisymmetric `i(E_jk - E_kj)/√2`.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        out.push(m);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut s = CMatrix::zeros(d, d);
            s[(j, k)] = Complex64::new(h, 0.0);
            s[(k, j)] = Complex64::new(h, 0.0);
            out.push(s);
            let mut a = CMatrix::zeros(d, d);
            a[(j, k)] = Complex64::new(0.0, h);
            a[(k, j)] = Complex64::new(0.0, -h);
            out.push(a);
        }
    }
    out
}
