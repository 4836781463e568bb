//! Multipartite density matrices, standard state families and random sampling.
//!
//! Werner convention: `W(p) = p · 2P_anti / (d(d-1)) + (1-p) · I/d²`, where
//! `P_anti` projects onto the antisymmetric subspace of `C^d ⊗ C^d`. For
//! `d = 2` this is `p |Ψ⁻><Ψ⁻| + (1-p) I/4`.
//!
//! Isotropic convention: `ρ(F) = F |Φ+><Φ+| + (1-F)(I - |Φ+><Φ+|)/(d² - 1)`,
//! which has fidelity `F` with the maximally entangled state.

mod file;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{kron, kron_all, min_eigenvalue, permute_systems, CMatrix};

pub use file::{
    load_state, load_witness, parse_state, parse_witness, save_state, save_witness,
    write_state, write_witness, LoadOptions,
};

/// Tolerance for the density-matrix invariants (Hermiticity is relative).
pub const STATE_TOL: f64 = 1e-9;

/// A state on `A_1 ⊗ ... ⊗ A_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_shape(&dims, &matrix)?;
        let herm = matrix.hermitian_deviation();
        if herm > STATE_TOL * matrix.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Invariant {
                invariant: "hermitian",
                amount: herm,
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Invariant {
                invariant: "trace",
                amount: (tr - 1.0).norm(),
            });
        }
        let sym = hermitian_part(&matrix);
        let min = min_eigenvalue(&sym)?;
        if min < -STATE_TOL {
            return Err(Error::Invariant {
                invariant: "positivity",
                amount: -min,
            });
        }
        Ok(Self { dims, matrix: sym })
    }

    /// Projects onto the state space: Hermitian part, negative eigenvalues clipped, trace renormalised.
    pub fn repaired(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        check_shape(&dims, &matrix)?;
        let sym = hermitian_part(&matrix);
        let (vals, vecs) = crate::linalg::eig_hermitian(&sym)?;
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(Error::Invariant {
                invariant: "positivity",
                amount: -vals.first().copied().unwrap_or(0.0),
            });
        }
        let scaled: Vec<f64> = clipped.iter().map(|v| v / total).collect();
        let m = vecs.matmul(&CMatrix::from_real_diag(&scaled)).matmul(&vecs.adjoint());
        Self::new(dims, hermitian_part(&m))
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: CMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Total dimension `Π |A_i|`.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// `(1-λ) ρ + λ I/D`.
    pub fn with_white_noise(&self, lambda: f64) -> Self {
        let d = self.dim();
        let mut m = self.matrix.scale_real(1.0 - lambda);
        m.add_scaled(&CMatrix::identity(d), Complex64::new(lambda / d as f64, 0.0));
        Self::from_parts_unchecked(self.dims.clone(), m)
    }

    /// `tr(W ρ)` for Hermitian `W`.
    pub fn expectation(&self, w: &CMatrix) -> f64 {
        w.trace_product_re(&self.matrix)
    }
}

fn check_shape(dims: &[usize], matrix: &CMatrix) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!("invalid subsystem dimensions {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if matrix.rows() != total || matrix.cols() != total {
        return Err(Error::Dimension(format!(
            "dims {dims:?} require a {total}x{total} matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok(())
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}

/// A separable state given as an explicit mixture of pure product states.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    /// `terms[t][i]` is the unit vector on subsystem `i` in term `t`.
    pub terms: Vec<Vec<Vec<Complex64>>>,
}

impl SeparableDecomposition {
    pub fn validate(&self) -> Result<()> {
        if self.weights.len() != self.terms.len() || self.terms.is_empty() {
            return Err(Error::InvalidArgument(
                "decomposition needs one weight per term and at least one term".into(),
            ));
        }
        if self.weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative mixture weight".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, expected 1")));
        }
        for term in &self.terms {
            if term.len() != self.dims.len() {
                return Err(Error::Dimension("term has the wrong number of factors".into()));
            }
            for (v, &d) in term.iter().zip(&self.dims) {
                if v.len() != d {
                    return Err(Error::Dimension("local vector has the wrong dimension".into()));
                }
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "local vector has squared norm {norm}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `Σ_t p_t ⊗_i |φ_{t,i}><φ_{t,i}|`.
pub fn assemble_separable(decomp: &SeparableDecomposition) -> Result<DensityMatrix> {
    decomp.validate()?;
    let d: usize = decomp.dims.iter().product();
    let mut m = CMatrix::zeros(d, d);
    for (w, term) in decomp.weights.iter().zip(&decomp.terms) {
        let locals: Vec<CMatrix> = term.iter().map(|v| CMatrix::projector(v)).collect();
        m.add_scaled(&kron_all(&locals), Complex64::new(*w, 0.0));
    }
    DensityMatrix::new(decomp.dims.clone(), m)
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random unit vector on `C^d`.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let v = gaussian_vector(rng, d);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random mixture of `terms` Haar-random product states with Dirichlet(1) weights.
pub fn random_separable(
    dims: &[usize],
    terms: usize,
    seed: u64,
) -> Result<(DensityMatrix, SeparableDecomposition)> {
    if terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let tsum: f64 = weights.iter().sum();
    weights[0] += 1.0 - tsum;
    let terms: Vec<Vec<Vec<Complex64>>> = (0..terms)
        .map(|_| dims.iter().map(|&d| random_unit_vector(&mut rng, d)).collect())
        .collect();
    let decomp = SeparableDecomposition {
        dims: dims.to_vec(),
        weights,
        terms,
    };
    Ok((assemble_separable(&decomp)?, decomp))
}

/// `G G† / tr(G G†)` with `G` filled by seeded complex Gaussians (Hilbert-Schmidt measure).
pub fn random_density(dims: &[usize], seed: u64) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if dims.is_empty() || d == 0 {
        return Err(Error::Dimension(format!("invalid subsystem dimensions {dims:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let gg = g.matmul(&g.adjoint());
    let tr = gg.trace().re;
    let m = hermitian_part(&gg.scale_real(1.0 / tr));
    Ok(DensityMatrix::from_parts_unchecked(dims.to_vec(), m))
}

/// Whether `U_π ρ U_π† = ρ` for every permutation of the (equal-dimension) factors.
pub fn is_permutation_invariant(rho: &DensityMatrix, tolerance: f64) -> Result<bool> {
    let dims = rho.dims();
    if dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Dimension(format!(
            "permutation invariance needs equal subsystem dimensions, got {dims:?}"
        )));
    }
    for t in 0..dims.len().saturating_sub(1) {
        let mut perm: Vec<usize> = (0..dims.len()).collect();
        perm.swap(t, t + 1);
        let p = permute_systems(rho.matrix(), dims, &perm)?;
        if p.max_abs_diff(rho.matrix()) > tolerance {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Named state families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Bell,
    Ghz,
    W,
    Isotropic,
    Werner,
    Tiles,
    Product,
    MaxMixed,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Bell,
        Family::Ghz,
        Family::W,
        Family::Isotropic,
        Family::Werner,
        Family::Tiles,
        Family::Product,
        Family::MaxMixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Bell => "bell",
            Family::Ghz => "ghz",
            Family::W => "w",
            Family::Isotropic => "isotropic",
            Family::Werner => "werner",
            Family::Tiles => "tiles",
            Family::Product => "product",
            Family::MaxMixed => "max_mixed",
        }
    }

    /// Dimensions used when none are given.
    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Family::Bell | Family::Isotropic | Family::Werner | Family::Product | Family::MaxMixed => {
                vec![2, 2]
            }
            Family::Ghz | Family::W => vec![2, 2, 2],
            Family::Tiles => vec![3, 3],
        }
    }

    /// Whether the family takes a real parameter.
    pub fn is_parametric(self) -> bool {
        matches!(self, Family::Isotropic | Family::Werner)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Parameters for [`make_family`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyParams {
    /// Fidelity `F` for isotropic states, mixing weight `p` for Werner states.
    pub param: Option<f64>,
    /// Subsystem dimensions; family default when absent.
    pub dims: Option<Vec<usize>>,
}

impl FamilyParams {
    pub fn with_param(param: f64) -> Self {
        Self {
            param: Some(param),
            dims: None,
        }
    }

    pub fn dims(mut self, dims: Vec<usize>) -> Self {
        self.dims = Some(dims);
        self
    }
}

fn basis_vector(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

fn max_entangled(d: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = Complex64::new(a, 0.0);
    }
    v
}

fn bipartite_dim(family: Family, dims: &[usize]) -> Result<usize> {
    match dims {
        [a, b] if a == b && *a >= 2 => Ok(*a),
        _ => Err(Error::InvalidArgument(format!(
            "{family} states need two equal subsystem dimensions >= 2, got {dims:?}"
        ))),
    }
}

fn param_in(family: Family, params: &FamilyParams, lo: f64, hi: f64) -> Result<f64> {
    let p = params
        .param
        .ok_or_else(|| Error::InvalidArgument(format!("{family} needs a parameter")))?;
    if !(lo..=hi).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "{family} parameter {p} outside [{lo}, {hi}]"
        )));
    }
    Ok(p)
}

/// Builds a state from one of the named families.
pub fn make_family(family: Family, params: &FamilyParams) -> Result<DensityMatrix> {
    let dims = params.dims.clone().unwrap_or_else(|| family.default_dims());
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("invalid dimensions {dims:?}")));
    }
    let total: usize = dims.iter().product();
    let c = |x: f64| Complex64::new(x, 0.0);
    let matrix = match family {
        Family::Bell => {
            if dims != [2, 2] {
                return Err(Error::InvalidArgument("bell state lives on dims 2,2".into()));
            }
            CMatrix::projector(&max_entangled(2))
        }
        Family::Ghz | Family::W => {
            if dims.len() < 2 || dims.iter().any(|&d| d != 2) {
                return Err(Error::InvalidArgument(format!(
                    "{family} state needs two or more qubits, got dims {dims:?}"
                )));
            }
            let n = dims.len();
            let mut v = vec![c(0.0); total];
            if family == Family::Ghz {
                v[0] = c(std::f64::consts::FRAC_1_SQRT_2);
                v[total - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
            } else {
                let a = 1.0 / (n as f64).sqrt();
                for q in 0..n {
                    v[1 << (n - 1 - q)] = c(a);
                }
            }
            CMatrix::projector(&v)
        }
        Family::Isotropic => {
            let d = bipartite_dim(family, &dims)?;
            let f = param_in(family, params, 0.0, 1.0)?;
            let phi = CMatrix::projector(&max_entangled(d));
            let mut rest = &CMatrix::identity(d * d) - &phi;
            rest = rest.scale_real((1.0 - f) / (d * d - 1) as f64);
            &phi.scale_real(f) + &rest
        }
        Family::Werner => {
            let d = bipartite_dim(family, &dims)?;
            let p = param_in(family, params, 0.0, 1.0)?;
            let id = CMatrix::identity(d * d);
            // U|ij> = |ji>
            let swap_op = CMatrix::from_fn(d * d, d * d, |r, col| {
                let (i, j) = (col / d, col % d);
                if r == j * d + i {
                    c(1.0)
                } else {
                    c(0.0)
                }
            });
            let anti = (&id - &swap_op).scale_real(0.5);
            let mut m = anti.scale_real(p * 2.0 / (d * (d - 1)) as f64);
            m.add_scaled(&id, c((1.0 - p) / (d * d) as f64));
            m
        }
        Family::Tiles => {
            if dims != [3, 3] {
                return Err(Error::InvalidArgument("tiles state lives on dims 3,3".into()));
            }
            tiles_matrix()
        }
        Family::Product => {
            let locals: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::projector(&basis_vector(d, 0))).collect();
            kron_all(&locals)
        }
        Family::MaxMixed => CMatrix::identity(total).scale_real(1.0 / total as f64),
    };
    DensityMatrix::new(dims, matrix)
}

/// `(I - Σ_i |ψ_i><ψ_i|)/4` for the five-vector unextendible product basis "tiles".
fn tiles_matrix() -> CMatrix {
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = |i: usize| basis_vector(3, i);
    let comb = |a: &[(usize, f64)]| {
        let mut v = vec![c(0.0); 3];
        for &(i, w) in a {
            v[i] += c(w);
        }
        v
    };
    let third = 1.0 / 3f64.sqrt();
    let pairs: [(Vec<Complex64>, Vec<Complex64>); 5] = [
        (e(0), comb(&[(0, h), (1, -h)])),
        (comb(&[(0, h), (1, -h)]), e(2)),
        (e(2), comb(&[(1, h), (2, -h)])),
        (comb(&[(1, h), (2, -h)]), e(0)),
        (comb(&[(0, third), (1, third), (2, third)]), comb(&[(0, third), (1, third), (2, third)])),
    ];
    let mut m = CMatrix::identity(9);
    for (a, b) in &pairs {
        let p = kron(&CMatrix::projector(a), &CMatrix::projector(b));
        m.add_scaled(&p, c(-1.0));
    }
    m.scale_real(0.25)
}
