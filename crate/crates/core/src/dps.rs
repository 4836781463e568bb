//! The symmetric-extension program.
//!
//! For levels `k = (k_1, ..., k_N)` the variable `X` lives on the compressed
//! space `⊗_i S^{k_i}(A_i)`. With `V = ⊗_i V_i` the real isometry onto the
//! symmetric subspaces, the one-copy marginal is
//! `L(X) = tr_{extra copies}(V X V†)`. We solve the noise-robustness program
//!
//! ```text
//! minimize    λ
//! subject to  tr X = 1
//!             L(X) + λ (ρ - I/D) = ρ
//!             X ⪰ 0,  λ ≥ 0,  PT_c(X) ⪰ 0 for each requested cut c
//! ```
//!
//! so `λ*` is the least white-noise weight that makes `ρ` extendible. The
//! marginal equation is imposed in the product basis `G_a = ⊗_i g_{a_i}` of
//! Hermitian operators, where `L†(G_a) = ⊗_i V_i†(g_{a_i} ⊗ I)V_i`.
//!
//! The dual multipliers give the witness `W = -(y_0 I + Σ_a y_a G_a)` with
//! `tr(Wρ) = -λ*`, and `L†(W) - Σ_c PT_c(M_c) ⪰ 0` where `M_c ⪰ 0` is the
//! multiplier of cut `c`. Hence `tr(Wσ) ≥ 0` for every `σ` in the extendible
//! set, separable states included.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{digits, flat_index, hermitian_basis, kron_all, operator_norm, partial_transpose, CMatrix};
use crate::sdp::{self, complex_terms, complex_terms_sparse, Cone, Residuals, SdpBuilder, SdpProblem, SdpSolution, SolverOptions, Status, Term};
use crate::states::{make_family, DensityMatrix, Family, FamilyParams};
use crate::symmetric::{sym_dim, sym_isometry, SymmetricSpace};

pub const DEFAULT_VERDICT_TOL: f64 = 1e-5;
/// Largest compressed dimension `∏ sym_dim(d_i, k_i)` accepted by default.
pub const DEFAULT_MAX_DIM: usize = 256;
/// Slack allowed on the witness positivity check.
pub const WITNESS_TOL: f64 = 1e-7;
/// Slack allowed when checking that `λ*` grows along a threshold scan.
pub const MONOTONE_TOL: f64 = 1e-6;

/// A bipartition of the parties; the first side is partially transposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PptCut {
    transposed: Vec<usize>,
    rest: Vec<usize>,
}

impl PptCut {
    /// Cut with the 0-based parties `transposed` on one side and everything else on the other.
    pub fn new(transposed: &[usize], parties: usize) -> Result<Self> {
        let rest = (0..parties).filter(|p| !transposed.contains(p)).collect();
        let cut = Self {
            transposed: transposed.to_vec(),
            rest,
        };
        cut.validate(parties)?;
        Ok(cut)
    }

    /// 0-based parties on the transposed side.
    pub fn transposed(&self) -> &[usize] {
        &self.transposed
    }

    pub fn validate(&self, parties: usize) -> Result<()> {
        let mut all: Vec<usize> = self.transposed.iter().chain(&self.rest).copied().collect();
        all.sort_unstable();
        let proper = !self.transposed.is_empty()
            && !self.rest.is_empty()
            && all.iter().copied().eq(0..parties);
        if proper {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "cut {self} is not a bipartition of {parties} parties"
            )))
        }
    }
}

fn parse_side(side: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("invalid cut side `{side}`"));
    let items: Vec<&str> = if side.contains(',') {
        side.split(',').map(str::trim).collect()
    } else {
        side.trim().matches(|_: char| true).collect()
    };
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        let p: usize = it.parse().map_err(|_| bad())?;
        if p == 0 || out.contains(&(p - 1)) {
            return Err(bad());
        }
        out.push(p - 1);
    }
    if out.is_empty() {
        return Err(bad());
    }
    out.sort_unstable();
    Ok(out)
}

/// `"1:23"` (single-digit parties) or `"1:2,3"`; parties are 1-based.
impl FromStr for PptCut {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("cut `{s}` needs the form `1:23`")))?;
        let transposed = parse_side(a)?;
        let rest = parse_side(b)?;
        if transposed.iter().any(|p| rest.contains(p)) {
            return Err(Error::InvalidArgument(format!("cut `{s}` lists a party on both sides")));
        }
        Ok(Self { transposed, rest })
    }
}

impl fmt::Display for PptCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.transposed.iter().chain(&self.rest).any(|&p| p >= 9);
        let side = |v: &[usize]| {
            let parts: Vec<String> = v.iter().map(|p| (p + 1).to_string()).collect();
            parts.join(if wide { "," } else { "" })
        };
        write!(f, "{}:{}", side(&self.transposed), side(&self.rest))
    }
}

/// What to test: levels, PPT cuts and tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionSpec {
    pub levels: Vec<usize>,
    pub ppt_cuts: Vec<PptCut>,
    pub solver: SolverOptions,
    /// `λ*` at or below this counts as extendible.
    pub verdict_tol: f64,
    /// Cap on the compressed dimension.
    pub max_dim: usize,
}

impl ExtensionSpec {
    pub fn new(levels: Vec<usize>) -> Self {
        Self {
            levels,
            ppt_cuts: Vec::new(),
            solver: SolverOptions::default(),
            verdict_tol: DEFAULT_VERDICT_TOL,
            max_dim: DEFAULT_MAX_DIM,
        }
    }

    pub fn with_ppt(mut self, cut: PptCut) -> Self {
        self.ppt_cuts.push(cut);
        self
    }

    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        if self.levels.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} levels given for {} parties",
                self.levels.len(),
                dims.len()
            )));
        }
        if self.levels.contains(&0) {
            return Err(Error::InvalidArgument(format!("levels must be positive, got {:?}", self.levels)));
        }
        for cut in &self.ppt_cuts {
            cut.validate(dims.len())?;
        }
        if !(self.verdict_tol > 0.0) {
            return Err(Error::InvalidArgument("verdict tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// The assembled program together with what is needed to read its dual.
#[derive(Debug, Clone)]
pub struct ExtensionSdp {
    pub problem: SdpProblem,
    dims: Vec<usize>,
    compressed_dims: Vec<usize>,
    /// `G_a` on `⊗ A_i`.
    basis: Vec<CMatrix>,
    /// `L†(G_a)` on the compressed space.
    lifted: Vec<CMatrix>,
    trace_row: usize,
    marginal_rows: Vec<usize>,
    cuts: Vec<PptCut>,
    /// Rows of each cut, one per element of the compressed Hermitian basis.
    cut_rows: Vec<Vec<usize>>,
}

impl ExtensionSdp {
    /// Side of the complex extension variable.
    pub fn compressed_dim(&self) -> usize {
        self.compressed_dims.iter().product()
    }

    pub fn compressed_dims(&self) -> &[usize] {
        &self.compressed_dims
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `L†(H)` for a Hermitian `H` on `⊗ A_i`.
    pub fn lift_adjoint(&self, h: &CMatrix) -> CMatrix {
        let n = self.compressed_dim();
        let mut out = CMatrix::zeros(n, n);
        for (g, l) in self.basis.iter().zip(&self.lifted) {
            let coef = g.trace_product_re(h);
            if coef != 0.0 {
                out.add_scaled(l, Complex64::new(coef, 0.0));
            }
        }
        out
    }
}

/// Elements of the orthonormal Hermitian basis of side `n`, as sparse entries,
/// in the order of [`hermitian_basis`].
fn sparse_hermitian_basis(n: usize) -> Vec<Vec<(usize, usize, Complex64)>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<Vec<(usize, usize, Complex64)>> = (0..n).map(|j| vec![(j, j, Complex64::new(1.0, 0.0))]).collect();
    for j in 0..n {
        for k in j + 1..n {
            out.push(vec![(j, k, Complex64::new(h, 0.0)), (k, j, Complex64::new(h, 0.0))]);
            out.push(vec![(j, k, Complex64::new(0.0, h)), (k, j, Complex64::new(0.0, -h))]);
        }
    }
    out
}

/// Image of a matrix-unit entry under the partial transpose of the listed factors.
fn transpose_entry(r: usize, c: usize, dims: &[usize], factors: &[usize]) -> (usize, usize) {
    let mut rd = digits(r, dims);
    let mut cd = digits(c, dims);
    for &f in factors {
        std::mem::swap(&mut rd[f], &mut cd[f]);
    }
    (flat_index(&rd, dims), flat_index(&cd, dims))
}

/// Builds the extension program for `rho` at `spec`.
pub fn build_extension_sdp(rho: &DensityMatrix, spec: &ExtensionSpec) -> Result<ExtensionSdp> {
    let dims = rho.dims().to_vec();
    spec.validate(&dims)?;
    let needed = dims
        .iter()
        .zip(&spec.levels)
        .fold(1u128, |acc, (&d, &k)| acc.saturating_mul(sym_dim(d, k)));
    if needed > spec.max_dim as u128 {
        return Err(Error::SizeCap {
            what: "compressed extension space",
            needed,
            cap: spec.max_dim as u128,
        });
    }
    let spaces: Vec<SymmetricSpace> = dims
        .iter()
        .zip(&spec.levels)
        .map(|(&d, &k)| sym_isometry(d, k))
        .collect::<Result<_>>()?;
    let compressed_dims: Vec<usize> = spaces.iter().map(SymmetricSpace::dim).collect();
    let n: usize = compressed_dims.iter().product();
    let total: usize = rho.dim();

    // per-party local bases and their compressions
    let local: Vec<Vec<CMatrix>> = dims.iter().map(|&d| hermitian_basis(d)).collect();
    let compressed: Vec<Vec<CMatrix>> = local
        .iter()
        .zip(&spaces)
        .map(|(gs, sp)| gs.iter().map(|g| sp.compress_single_copy(g)).collect())
        .collect();

    let mut blocks = vec![Cone::Psd(2 * n), Cone::Nonneg(1)];
    blocks.extend(spec.ppt_cuts.iter().map(|_| Cone::Psd(2 * n)));
    let mut b = SdpBuilder::new(blocks)?;
    b.add_objective([Term::new(1, 0, 0, 1.0)]);

    let id = CMatrix::identity(n);
    let trace_row = b.add_constraint(complex_terms(0, &id, 1.0), 1.0);

    let shifted = {
        let mut m = rho.matrix().clone();
        m.add_scaled(&CMatrix::identity(total), Complex64::new(-1.0 / total as f64, 0.0));
        m
    };
    let count = local.iter().map(Vec::len).product::<usize>();
    let mut basis = Vec::with_capacity(count);
    let mut lifted = Vec::with_capacity(count);
    let mut marginal_rows = Vec::with_capacity(count);
    let local_dims: Vec<usize> = local.iter().map(Vec::len).collect();
    for a in 0..count {
        let idx = digits(a, &local_dims);
        let g = kron_all(idx.iter().enumerate().map(|(p, &i)| &local[p][i]));
        let lg = kron_all(idx.iter().enumerate().map(|(p, &i)| &compressed[p][i]));
        let mut terms = complex_terms(0, &lg, 1.0);
        let r = g.trace_product_re(&shifted);
        if r != 0.0 {
            terms.push(Term::new(1, 0, 0, r));
        }
        marginal_rows.push(b.add_constraint(terms, g.trace_product_re(rho.matrix())));
        basis.push(g);
        lifted.push(lg);
    }

    // Z_c = PT_c(X), imposed coordinate-wise in the compressed Hermitian basis
    let mut cut_rows = Vec::with_capacity(spec.ppt_cuts.len());
    if !spec.ppt_cuts.is_empty() {
        let hb = sparse_hermitian_basis(n);
        for (c, cut) in spec.ppt_cuts.iter().enumerate() {
            let block = 2 + c;
            let mut rows = Vec::with_capacity(hb.len());
            for h in &hb {
                let pt: Vec<(usize, usize, Complex64)> = h
                    .iter()
                    .map(|&(r, col, z)| {
                        let (r2, c2) = transpose_entry(r, col, &compressed_dims, cut.transposed());
                        (r2, c2, z)
                    })
                    .collect();
                let mut terms = complex_terms_sparse(0, n, &pt, 1.0);
                terms.extend(complex_terms_sparse(block, n, h, -1.0));
                rows.push(b.add_constraint(terms, 0.0));
            }
            cut_rows.push(rows);
        }
    }

    Ok(ExtensionSdp {
        problem: b.build(),
        dims,
        compressed_dims,
        basis,
        lifted,
        trace_row,
        marginal_rows,
        cuts: spec.ppt_cuts.clone(),
        cut_rows,
    })
}

/// Certificate that a state lies outside the tested extendible set.
#[derive(Debug, Clone)]
pub struct Witness {
    /// `W` on `⊗ A_i`, normalised to operator norm 1.
    pub operator: CMatrix,
    pub dims: Vec<usize>,
    /// `tr(W ρ)`.
    pub value_on_state: f64,
    /// Smallest eigenvalue over the lifted operator `L†(W) - Σ_c PT_c(M_c)` and each `M_c`.
    pub lifted_min_eig: f64,
    /// The cut multipliers `M_c` on the compressed space, scaled like `W`.
    pub cut_operators: Vec<CMatrix>,
}

impl Witness {
    /// Both certificate conditions: negative on the state, nonnegative on the extendible set.
    pub fn is_valid(&self) -> bool {
        self.value_on_state < 0.0 && self.lifted_min_eig >= -WITNESS_TOL
    }

    /// Why the certificate fails, if it does.
    pub fn rejection(&self) -> Option<String> {
        if self.value_on_state >= 0.0 {
            Some(format!("tr(W rho) = {:.3e} is not negative", self.value_on_state))
        } else if self.lifted_min_eig < -WITNESS_TOL {
            Some(format!("lifted operator has eigenvalue {:.3e}", self.lifted_min_eig))
        } else {
            None
        }
    }
}

fn min_eig_hermitized(m: &CMatrix) -> f64 {
    let h = (m + &m.adjoint()).scale_real(0.5);
    crate::linalg::min_eigenvalue(&h).unwrap_or(f64::NEG_INFINITY)
}

/// Reads the witness off the equality multipliers of a solved program.
pub fn extract_witness(ext: &ExtensionSdp, solution: &SdpSolution, rho: &DensityMatrix) -> Result<Witness> {
    let y = &solution.dual;
    if y.len() != ext.problem.num_constraints() {
        return Err(Error::Dimension(format!(
            "{} multipliers for {} constraints",
            y.len(),
            ext.problem.num_constraints()
        )));
    }
    let total = rho.dim();
    let n = ext.compressed_dim();
    let y0 = y[ext.trace_row];
    let mut w = CMatrix::identity(total).scale_real(-y0);
    let mut lifted = CMatrix::identity(n).scale_real(-y0);
    for ((g, lg), &row) in ext.basis.iter().zip(&ext.lifted).zip(&ext.marginal_rows) {
        let ya = y[row];
        if ya != 0.0 {
            w.add_scaled(g, Complex64::new(-ya, 0.0));
            lifted.add_scaled(lg, Complex64::new(-ya, 0.0));
        }
    }

    let hb = if ext.cuts.is_empty() { Vec::new() } else { sparse_hermitian_basis(n) };
    let mut cut_ops = Vec::with_capacity(ext.cuts.len());
    for (cut, rows) in ext.cuts.iter().zip(&ext.cut_rows) {
        let mut m = CMatrix::zeros(n, n);
        for (h, &row) in hb.iter().zip(rows) {
            for &(r, c, z) in h {
                m[(r, c)] += z * y[row];
            }
        }
        let pt = partial_transpose(&m, &ext.compressed_dims, cut.transposed())?;
        lifted = &lifted - &pt;
        cut_ops.push(m);
    }

    let norm = operator_norm(&w);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument("dual solution gives a zero witness".into()));
    }
    let s = 1.0 / norm;
    let w = w.scale_real(s);
    let cut_operators: Vec<CMatrix> = cut_ops.iter().map(|m| m.scale_real(s)).collect();
    let mut lifted_min_eig = min_eig_hermitized(&lifted) * s;
    for m in &cut_operators {
        lifted_min_eig = lifted_min_eig.min(min_eig_hermitized(m));
    }
    Ok(Witness {
        value_on_state: rho.expectation(&w),
        operator: w,
        dims: ext.dims.clone(),
        lifted_min_eig,
        cut_operators,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    Extendible,
    NotExtendible,
    Inconclusive,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Extendible => "EXTENDIBLE",
            VerdictStatus::NotExtendible => "NOT_EXTENDIBLE",
            VerdictStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub solver_status: Status,
    pub residuals: Residuals,
    pub iterations: usize,
    pub wall_time: Duration,
    /// Side of the complex extension variable.
    pub compressed_dim: usize,
    pub constraints: usize,
    /// Set when a witness was computed but failed validation.
    pub witness_rejection: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub lambda_star: f64,
    pub witness: Option<Witness>,
    pub diagnostics: Diagnostics,
}

/// Solves the extension program and classifies `rho`.
pub fn check_extendible(rho: &DensityMatrix, spec: &ExtensionSpec) -> Result<Verdict> {
    let start = Instant::now();
    let ext = build_extension_sdp(rho, spec)?;
    let sol = sdp::solve(&ext.problem, &spec.solver);
    let lambda_raw = sol.primal[1].as_nonneg().map_or(f64::NAN, |v| v[0]);
    let lambda_star = lambda_raw.clamp(0.0, 1.0);

    let mut witness = None;
    let mut rejection = None;
    let status = if sol.status != Status::Optimal {
        VerdictStatus::Inconclusive
    } else if lambda_star <= spec.verdict_tol {
        VerdictStatus::Extendible
    } else if lambda_star <= 10.0 * spec.verdict_tol {
        VerdictStatus::Inconclusive
    } else {
        match extract_witness(&ext, &sol, rho) {
            Ok(w) => {
                rejection = w.rejection();
                let ok = w.is_valid();
                witness = Some(w);
                if ok {
                    VerdictStatus::NotExtendible
                } else {
                    VerdictStatus::Inconclusive
                }
            }
            Err(e) => {
                rejection = Some(e.to_string());
                VerdictStatus::Inconclusive
            }
        }
    };
    Ok(Verdict {
        status,
        lambda_star,
        witness,
        diagnostics: Diagnostics {
            solver_status: sol.status,
            residuals: sol.residuals,
            iterations: sol.iterations,
            wall_time: start.elapsed(),
            compressed_dim: ext.compressed_dim(),
            constraints: ext.problem.num_constraints(),
            witness_rejection: rejection,
        },
    })
}

/// `λ*` alone, failing when the solver does not converge.
pub fn lambda_star(rho: &DensityMatrix, spec: &ExtensionSpec) -> Result<f64> {
    let ext = build_extension_sdp(rho, spec)?;
    let sol = sdp::solve(&ext.problem, &spec.solver);
    if sol.status != Status::Optimal {
        return Err(Error::NotConverged(format!(
            "solver stopped with {:?} after {} iterations",
            sol.status, sol.iterations
        )));
    }
    Ok(sol.primal[1].as_nonneg().map_or(f64::NAN, |v| v[0]).clamp(0.0, 1.0))
}

/// Outcome of a bisection along a one-parameter family.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    /// Midpoint of the final bracket.
    pub value: f64,
    /// Last extendible and first non-extendible parameter.
    pub bracket: (f64, f64),
    /// Every `(parameter, λ*)` evaluated, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
}

pub const DEFAULT_SCAN_WIDTH: f64 = 1e-3;

/// Bisects on the parameter until the extendible / non-extendible flip is
/// bracketed to within `width`.
///
/// The family must become less extendible as the parameter grows. If the
/// whole range is extendible the threshold is `hi`; if none of it is, `lo`.
/// Evaluations whose `λ*` decreases with the parameter are reported as
/// [`Error::NonMonotone`].
pub fn bisect_threshold(
    range: (f64, f64),
    width: f64,
    tol: f64,
    mut eval: impl FnMut(f64) -> Result<f64>,
) -> Result<Threshold> {
    let (mut lo, mut hi) = range;
    if !(lo < hi) || !(width > 0.0) {
        return Err(Error::InvalidArgument(format!("bad scan range [{lo}, {hi}] or width {width}")));
    }
    let mut evals = Vec::new();
    let mut run = |p: f64, evals: &mut Vec<(f64, f64)>| -> Result<bool> {
        let l = eval(p)?;
        evals.push((p, l));
        Ok(l <= tol)
    };
    let lo_ok = run(lo, &mut evals)?;
    let hi_ok = run(hi, &mut evals)?;
    let bracket = match (lo_ok, hi_ok) {
        (_, true) => {
            if !lo_ok {
                return Err(Error::NonMonotone(format!(
                    "extendible at {hi} but not at {lo}"
                )));
            }
            (hi, hi)
        }
        (false, false) => (lo, lo),
        (true, false) => {
            while hi - lo > width {
                let mid = 0.5 * (lo + hi);
                if run(mid, &mut evals)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        }
    };
    let mut sorted = evals.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = sorted.windows(2).find(|w| w[1].1 < w[0].1 - MONOTONE_TOL) {
        return Err(Error::NonMonotone(format!(
            "lambda {:.3e} at {} exceeds lambda {:.3e} at {}",
            w[0].1, w[0].0, w[1].1, w[1].0
        )));
    }
    Ok(Threshold {
        value: 0.5 * (bracket.0 + bracket.1),
        bracket,
        evaluations: evals,
    })
}

/// Extendibility threshold of a parametric family over `range`.
pub fn threshold_scan(
    family: Family,
    range: (f64, f64),
    dims: Option<&[usize]>,
    spec: &ExtensionSpec,
    width: f64,
) -> Result<Threshold> {
    if !family.is_parametric() {
        return Err(Error::InvalidArgument(format!("{family} has no parameter to scan")));
    }
    let make = |p: f64| {
        let mut params = FamilyParams::with_param(p);
        params.dims = dims.map(<[usize]>::to_vec);
        make_family(family, &params)
    };
    spec.validate(make(range.0)?.dims())?;
    bisect_threshold(range, width, spec.verdict_tol, |p| lambda_star(&make(p)?, spec))
}
