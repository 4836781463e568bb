//! The symmetric subspace `S^k(C^d)` and its real isometry into `(C^d)^{⊗k}`.
//!
//! Basis vectors are labelled by occupation vectors `(n_1, ..., n_d)` with
//! `Σ n_j = k`. The canonical order lists them by their sorted word
//! ascending: for `d = 2, k = 2` that is `|00>`, `(|01> + |10>)/√2`, `|11>`,
//! i.e. occupations `(2,0), (1,1), (0,2)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default cap on `d^k`, the number of amplitudes of one isometry column space.
pub const DEFAULT_AMPLITUDE_CAP: u128 = 1 << 20;

/// `binom(k + d - 1, d - 1)`, saturating at `u128::MAX`.
pub fn sym_dim(d: usize, k: usize) -> u128 {
    assert!(d >= 1, "local dimension must be positive");
    let mut r: u128 = 1;
    for i in 1..d as u128 {
        // r = binom(k + i - 1, i - 1) on entry; the product below is exact
        match r.checked_mul(k as u128 + i) {
            Some(v) => r = v / i,
            None => return u128::MAX,
        }
    }
    r
}

/// `log2 binom(k + d - 1, d - 1)`, usable where [`sym_dim`] would overflow.
pub fn log2_sym_dim(d: usize, k: f64) -> f64 {
    (1..d).map(|i| ((k + i as f64) / i as f64).log2()).sum()
}

/// Symmetric subspace of `k` copies of `C^d` with its isometry.
#[derive(Debug, Clone)]
pub struct SymmetricSpace {
    local_dim: usize,
    copies: usize,
    basis: Vec<Vec<usize>>,
    /// Per column: (row index in `(C^d)^{⊗k}`, amplitude).
    columns: Vec<Vec<(usize, f64)>>,
}

impl SymmetricSpace {
    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Dimension of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Dimension of the ambient tensor power, `d^k`.
    pub fn ambient_dim(&self) -> usize {
        self.local_dim.pow(self.copies as u32)
    }

    /// Occupation vectors in canonical order.
    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    /// Sparse isometry columns.
    pub fn columns(&self) -> &[Vec<(usize, f64)>] {
        &self.columns
    }

    /// Dense isometry `V`, `d^k × dim`.
    pub fn isometry(&self) -> Vec<Vec<f64>> {
        let mut v = vec![vec![0.0; self.dim()]; self.ambient_dim()];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                v[r][c] = a;
            }
        }
        v
    }

    /// `V† (g ⊗ I) V` for `g` acting on one copy (any copy gives the same result).
    pub fn compress_single_copy(&self, g: &CMatrix) -> CMatrix {
        assert_eq!(g.rows(), self.local_dim);
        let rest = self.local_dim.pow(self.copies as u32 - 1);
        let s = self.dim();
        let mut out = CMatrix::zeros(s, s);
        for (a, col_a) in self.columns.iter().enumerate() {
            for (b, col_b) in self.columns.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &(r, va) in col_a {
                    for &(c, vb) in col_b {
                        if r % rest == c % rest {
                            acc += g[(r / rest, c / rest)] * (va * vb);
                        }
                    }
                }
                out[(a, b)] = acc;
            }
        }
        out
    }
}

/// Sorted words `w_1 <= ... <= w_k` over `0..d`, ascending lexicographic.
fn sorted_words(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..d {
            cur.push(s);
            rec(d, k, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Distinct rearrangements of a sorted word.
fn multiset_permutations(word: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = word.to_vec();
    let mut out = vec![cur.clone()];
    // next lexicographic permutation until exhausted
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

/// Builds `S^k(C^d)` with the default amplitude cap.
pub fn sym_isometry(d: usize, k: usize) -> Result<SymmetricSpace> {
    sym_isometry_capped(d, k, DEFAULT_AMPLITUDE_CAP)
}

/// Builds `S^k(C^d)`, refusing when `d^k` exceeds `cap`.
pub fn sym_isometry_capped(d: usize, k: usize, cap: u128) -> Result<SymmetricSpace> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "symmetric subspace needs d >= 1 and k >= 1, got d={d}, k={k}"
        )));
    }
    let needed = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::SizeCap {
            what: "symmetric isometry",
            needed,
            cap,
        });
    }
    let words = sorted_words(d, k);
    let mut basis = Vec::with_capacity(words.len());
    let mut columns = Vec::with_capacity(words.len());
    for w in &words {
        let mut occ = vec![0; d];
        for &s in w {
            occ[s] += 1;
        }
        basis.push(occ);
        let perms = multiset_permutations(w);
        let amp = 1.0 / (perms.len() as f64).sqrt();
        let mut col: Vec<(usize, f64)> = perms
            .iter()
            .map(|p| (p.iter().fold(0, |acc, &s| acc * d + s), amp))
            .collect();
        col.sort_by_key(|&(r, _)| r);
        columns.push(col);
    }
    Ok(SymmetricSpace {
        local_dim: d,
        copies: k,
        basis,
        columns,
    })
}

/// Maps an operator on `⊗_i S^{k_i}(A_i)` to `⊗_i A_i^{⊗k_i}` via `V x V†`, `V = ⊗_i V_i`.
///
/// Copies of each factor come out contiguous, in factor order.
pub fn lift(x: &CMatrix, dims: &[usize], levels: &[usize]) -> Result<CMatrix> {
    if dims.len() != levels.len() {
        return Err(Error::Dimension(format!(
            "{} subsystem dimensions but {} levels",
            dims.len(),
            levels.len()
        )));
    }
    let spaces = dims
        .iter()
        .zip(levels)
        .map(|(&d, &k)| sym_isometry(d, k))
        .collect::<Result<Vec<_>>>()?;
    lift_with(x, &spaces)
}

/// [`lift`] with prebuilt spaces.
pub fn lift_with(x: &CMatrix, spaces: &[SymmetricSpace]) -> Result<CMatrix> {
    let compressed: usize = spaces.iter().map(SymmetricSpace::dim).product();
    if x.rows() != compressed || x.cols() != compressed {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, compressed space has dimension {compressed}",
            x.rows(),
            x.cols()
        )));
    }
    let full: usize = spaces.iter().map(SymmetricSpace::ambient_dim).product();
    // columns of ⊗ V_i
    let mut cols: Vec<Vec<(usize, f64)>> = vec![vec![(0, 1.0)]];
    for s in spaces {
        let amb = s.ambient_dim();
        let mut next = Vec::with_capacity(cols.len() * s.dim());
        for c in &cols {
            for sc in s.columns() {
                let mut col = Vec::with_capacity(c.len() * sc.len());
                for &(r1, v1) in c {
                    for &(r2, v2) in sc {
                        col.push((r1 * amb + r2, v1 * v2));
                    }
                }
                next.push(col);
            }
        }
        cols = next;
    }
    let mut out = CMatrix::zeros(full, full);
    for (a, ca) in cols.iter().enumerate() {
        for (b, cb) in cols.iter().enumerate() {
            let xab = x[(a, b)];
            if xab == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(r, va) in ca {
                for &(c, vb) in cb {
                    out[(r, c)] += xab * (va * vb);
                }
            }
        }
    }
    Ok(out)
}
