//! Brute-force checks for small systems, built without the compressed
//! machinery so they can validate it.
//!
//! - [`ppt_exact_separability`]: the partial-transpose test, which decides
//!   separability for 2×2 and 2×3 systems.
//! - [`uncompressed_extendibility`]: the extension program with the variable
//!   on the full tensor power, symmetry imposed by explicit equalities
//!   `X_{π(i), j} = X_{i, j}` and the marginal written entry by entry.
//! - [`nearest_separable_estimate`]: Frank-Wolfe with away steps over
//!   mixtures of product states, giving an upper bound on the distance to
//!   the separable set.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dps::{ExtensionSpec, PptCut};
use crate::error::{Error, Result};
use crate::linalg::{digits, eig_hermitian, flat_index, frobenius_norm, partial_transpose, trace_norm, CMatrix};
use crate::sdp::{solve, Cone, SdpBuilder, Status, Term};
use crate::states::{random_unit_vector, DensityMatrix, SeparableDecomposition};

/// Default cap on the full extension dimension `∏ d_i^{k_i}`.
pub const UNCOMPRESSED_CAP: usize = 1 << 12;
/// Smallest partial-transpose eigenvalue still counted as PPT.
pub const PPT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Separable,
    Entangled,
    Extendible,
    NotExtendible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PptExact,
    Uncompressed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub verdict: OracleVerdict,
    /// Minimum partial-transpose eigenvalue, or `λ*`.
    pub margin: f64,
    pub method: Method,
}

/// Separability by the partial-transpose criterion, for dims 2×2, 2×3 and 3×2 only.
pub fn ppt_exact_separability(rho: &DensityMatrix) -> Result<OracleResult> {
    let dims = rho.dims();
    if !matches!(dims, [2, 2] | [2, 3] | [3, 2]) {
        return Err(Error::Dimension(format!(
            "the PPT criterion decides separability only for 2x2 and 2x3 systems, got {dims:?}"
        )));
    }
    let pt = partial_transpose(rho.matrix(), dims, &[1])?;
    let (vals, _) = eig_hermitian(&pt)?;
    let margin = vals[0];
    Ok(OracleResult {
        verdict: if margin >= -PPT_TOL {
            OracleVerdict::Separable
        } else {
            OracleVerdict::Entangled
        },
        margin,
        method: Method::PptExact,
    })
}

/// Real coordinate of a Hermitian matrix: `Re X_ij` (`i ≤ j`) or `Im X_ij` (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    Re(usize, usize),
    Im(usize, usize),
    /// `Im X_ii`, identically zero.
    Zero,
}

/// `Re X_ij` and `Im X_ij` for arbitrary `(i, j)` as signed canonical coordinates.
fn entry_coords(i: usize, j: usize) -> [(Coord, f64); 2] {
    if i < j {
        [(Coord::Re(i, j), 1.0), (Coord::Im(i, j), 1.0)]
    } else if i > j {
        [(Coord::Re(j, i), 1.0), (Coord::Im(j, i), -1.0)]
    } else {
        [(Coord::Re(i, i), 1.0), (Coord::Zero, 1.0)]
    }
}

/// Terms reading `weight · coord` on a block holding the real embedding
/// `[[Re X, -Im X], [Im X, Re X]]` of an `n × n` Hermitian `X`.
///
/// A symmetric term `(r, c)` with `r ≠ c` reads `Y_rc + Y_cr`.
fn coord_terms(block: usize, n: usize, coord: Coord, weight: f64) -> Vec<Term> {
    match coord {
        Coord::Re(i, j) if i == j => vec![
            Term::new(block, i, i, 0.5 * weight),
            Term::new(block, n + i, n + i, 0.5 * weight),
        ],
        Coord::Re(i, j) => vec![
            Term::new(block, i, j, 0.25 * weight),
            Term::new(block, n + i, n + j, 0.25 * weight),
        ],
        Coord::Im(i, j) => vec![
            Term::new(block, n + i, j, 0.25 * weight),
            Term::new(block, i, n + j, -0.25 * weight),
        ],
        Coord::Zero => Vec::new(),
    }
}

/// Union-find over coordinates with a sign per edge: `x_a = s · x_parent(a)`.
struct SignedUnionFind {
    parent: Vec<usize>,
    sign: Vec<f64>,
    /// Set when a component contains a cycle forcing it to zero.
    forced_zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            sign: vec![1.0; n],
            forced_zero: vec![false; n],
        }
    }

    /// Root and the sign `s` with `x_a = s · x_root`.
    fn find(&mut self, a: usize) -> (usize, f64) {
        let p = self.parent[a];
        if p == a {
            return (a, 1.0);
        }
        let (root, s) = self.find(p);
        self.parent[a] = root;
        self.sign[a] *= s;
        (root, self.sign[a])
    }

    /// Records `x_a = s · x_b`; returns whether it joined two components.
    fn union(&mut self, a: usize, b: usize, s: f64) -> bool {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            // x_ra = sa·s·sb · x_ra
            if sa * s * sb < 0.0 {
                self.forced_zero[ra] = true;
            }
            return false;
        }
        // x_ra = sa · x_a = sa · s · sb · x_rb
        self.parent[ra] = rb;
        self.sign[ra] = sa * s * sb;
        let z = self.forced_zero[ra];
        self.forced_zero[rb] |= z;
        true
    }
}

/// `λ*` from an extension program on the full tensor power.
pub fn uncompressed_extendibility(rho: &DensityMatrix, spec: &ExtensionSpec) -> Result<OracleResult> {
    uncompressed_extendibility_capped(rho, spec, UNCOMPRESSED_CAP)
}

pub fn uncompressed_extendibility_capped(rho: &DensityMatrix, spec: &ExtensionSpec, cap: usize) -> Result<OracleResult> {
    let dims = rho.dims().to_vec();
    spec.validate(&dims)?;
    let needed = dims
        .iter()
        .zip(&spec.levels)
        .fold(1u128, |acc, (&d, &k)| acc.saturating_mul((d as u128).saturating_pow(k as u32)));
    if needed > cap as u128 {
        return Err(Error::SizeCap {
            what: "uncompressed extension space",
            needed,
            cap: cap as u128,
        });
    }

    // one factor per copy, parties in order, copy 0 first
    let mut full_dims = Vec::new();
    let mut first_copy = Vec::new();
    for (&d, &k) in dims.iter().zip(&spec.levels) {
        first_copy.push(full_dims.len());
        full_dims.extend(std::iter::repeat_n(d, k));
    }
    let n: usize = full_dims.iter().product();
    let total = rho.dim();

    // adjacent transpositions of copies within each party, as index maps
    let mut generators: Vec<Vec<usize>> = Vec::new();
    for (p, &k) in spec.levels.iter().enumerate() {
        for c in 0..k.saturating_sub(1) {
            let (f1, f2) = (first_copy[p] + c, first_copy[p] + c + 1);
            let map = (0..n)
                .map(|i| {
                    let mut dg = digits(i, &full_dims);
                    dg.swap(f1, f2);
                    flat_index(&dg, &full_dims)
                })
                .collect();
            generators.push(map);
        }
    }

    // coordinate numbering; node 0 is the constant zero
    let re_id = |i: usize, j: usize| 1 + i * n + j;
    let im_id = |i: usize, j: usize| 1 + n * n + i * n + j;
    let node = |c: Coord| match c {
        Coord::Re(i, j) => re_id(i, j),
        Coord::Im(i, j) => im_id(i, j),
        Coord::Zero => 0,
    };
    let coord_of = |id: usize| -> Coord {
        if id == 0 {
            Coord::Zero
        } else if id <= n * n {
            Coord::Re((id - 1) / n, (id - 1) % n)
        } else {
            let r = id - 1 - n * n;
            Coord::Im(r / n, r % n)
        }
    };

    // X_{π(i), j} = X_{i, j}: support on the symmetric subspace
    let mut uf = SignedUnionFind::new(1 + 2 * n * n);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for map in &generators {
        for i in 0..n {
            let pi = map[i];
            if pi == i {
                continue;
            }
            for j in 0..n {
                let lhs = entry_coords(pi, j);
                let rhs = entry_coords(i, j);
                for t in 0..2 {
                    let (ca, sa) = lhs[t];
                    let (cb, sb) = rhs[t];
                    let (a, b) = (node(ca), node(cb));
                    // sa · x_a = sb · x_b
                    let s = sa * sb;
                    if uf.union(a, b, s) {
                        edges.push((a, b, s));
                    }
                }
            }
        }
    }

    let mut blocks = vec![Cone::Psd(2 * n), Cone::Nonneg(1)];
    blocks.extend(spec.ppt_cuts.iter().map(|_| Cone::Psd(2 * n)));
    let mut b = SdpBuilder::new(blocks)?;
    b.add_objective([Term::new(1, 0, 0, 1.0)]);

    for &(a, bn, s) in &edges {
        let mut terms = coord_terms(0, n, coord_of(a), 1.0);
        terms.extend(coord_terms(0, n, coord_of(bn), -s));
        if !terms.is_empty() {
            b.add_constraint(terms, 0.0);
        }
    }
    let mut zero_roots: Vec<usize> = (1..uf.parent.len())
        .filter_map(|a| {
            let (r, _) = uf.find(a);
            (uf.forced_zero[r] && r != 0).then_some(r)
        })
        .collect();
    zero_roots.sort_unstable();
    zero_roots.dedup();
    for r in zero_roots {
        b.add_constraint(coord_terms(0, n, coord_of(r), 1.0), 0.0);
    }

    // tr X = 1
    let trace_terms: Vec<Term> = (0..n).flat_map(|i| coord_terms(0, n, Coord::Re(i, i), 1.0)).collect();
    b.add_constraint(trace_terms, 1.0);

    // marginal on copy 0 of every party: Σ_e X_{(a,e),(b,e)} + λ (ρ - I/D)_ab = ρ_ab
    let env_dims: Vec<usize> = full_dims
        .iter()
        .enumerate()
        .filter(|(f, _)| !first_copy.contains(f))
        .map(|(_, &d)| d)
        .collect();
    let env: usize = env_dims.iter().product();
    let full_index = |a: usize, e: usize| {
        let ad = digits(a, &dims);
        let ed = digits(e, &env_dims);
        let mut dg = Vec::with_capacity(full_dims.len());
        let mut next_env = 0;
        for f in 0..full_dims.len() {
            if let Some(p) = first_copy.iter().position(|&x| x == f) {
                dg.push(ad[p]);
            } else {
                dg.push(ed[next_env]);
                next_env += 1;
            }
        }
        flat_index(&dg, &full_dims)
    };
    let m = rho.matrix();
    let inv_d = 1.0 / total as f64;
    for a in 0..total {
        for bb in a..total {
            let shift_re = m[(a, bb)].re - if a == bb { inv_d } else { 0.0 };
            let mut re_terms = Vec::new();
            let mut im_terms = Vec::new();
            for e in 0..env {
                let [(re, sre), (im, sim)] = entry_coords(full_index(a, e), full_index(bb, e));
                re_terms.extend(coord_terms(0, n, re, sre));
                im_terms.extend(coord_terms(0, n, im, sim));
            }
            re_terms.push(Term::new(1, 0, 0, shift_re));
            b.add_constraint(re_terms, m[(a, bb)].re);
            if a != bb {
                im_terms.push(Term::new(1, 0, 0, m[(a, bb)].im));
                b.add_constraint(im_terms, m[(a, bb)].im);
            }
        }
    }

    // Z_c = PT_c(X) on the full space, coordinate by coordinate
    for (c, cut) in spec.ppt_cuts.iter().enumerate() {
        let block = 2 + c;
        let factors = transposed_factors(cut, &spec.levels, &first_copy);
        for i in 0..n {
            for j in i..n {
                let mut id = digits(i, &full_dims);
                let mut jd = digits(j, &full_dims);
                for &f in &factors {
                    std::mem::swap(&mut id[f], &mut jd[f]);
                }
                let (pi, pj) = (flat_index(&id, &full_dims), flat_index(&jd, &full_dims));
                let z = entry_coords(i, j);
                let x = entry_coords(pi, pj);
                for t in 0..2 {
                    if z[t].0 == Coord::Zero {
                        continue;
                    }
                    let mut terms = coord_terms(block, n, z[t].0, 1.0);
                    terms.extend(coord_terms(0, n, x[t].0, -x[t].1));
                    b.add_constraint(terms, 0.0);
                }
            }
        }
    }

    let problem = b.build();
    let sol = solve(&problem, &spec.solver);
    if sol.status != Status::Optimal {
        return Err(Error::NotConverged(format!(
            "uncompressed program stopped with {:?} after {} iterations",
            sol.status, sol.iterations
        )));
    }
    let lambda = sol.primal[1].as_nonneg().map_or(f64::NAN, |v| v[0]).clamp(0.0, 1.0);
    Ok(OracleResult {
        verdict: if lambda <= spec.verdict_tol {
            OracleVerdict::Extendible
        } else {
            OracleVerdict::NotExtendible
        },
        margin: lambda,
        method: Method::Uncompressed,
    })
}

fn transposed_factors(cut: &PptCut, levels: &[usize], first_copy: &[usize]) -> Vec<usize> {
    cut.transposed()
        .iter()
        .flat_map(|&p| first_copy[p]..first_copy[p] + levels[p])
        .collect()
}

/// Budget for [`nearest_separable_estimate_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct NearestOptions {
    /// Random product states screened per linear minimisation.
    pub samples: usize,
    pub seed: u64,
    /// Best screened candidates refined by alternating eigenvector updates.
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once the Frank-Wolfe gap falls below this.
    pub gap_tol: f64,
}

impl Default for NearestOptions {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 0,
            restarts: 8,
            max_iter: 5000,
            gap_tol: 1e-10,
        }
    }
}

/// Best separable approximation found, with its distances to the input.
#[derive(Debug, Clone)]
pub struct NearestSeparable {
    pub frobenius: f64,
    /// `||ρ - σ||_1`.
    pub trace_norm: f64,
    pub decomposition: SeparableDecomposition,
    pub iterations: usize,
    /// Estimated Frank-Wolfe gap at exit.
    pub gap: f64,
}

pub fn nearest_separable_estimate(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<NearestSeparable> {
    nearest_separable_estimate_with(
        rho,
        &NearestOptions {
            samples,
            seed,
            ..NearestOptions::default()
        },
    )
}

type Product = Vec<Vec<Complex64>>;

fn product_vector(p: &Product) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(1.0, 0.0)];
    for f in p {
        v = v.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    v
}

fn quad(g: &CMatrix, v: &[Complex64]) -> f64 {
    let gv = g.apply(v);
    v.iter().zip(&gv).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Minimises `<ψ|G|ψ>` over product `ψ` by cycling through the parties.
fn see_saw(g: &CMatrix, dims: &[usize], mut p: Product) -> (Product, f64) {
    let mut best = quad(g, &product_vector(&p));
    for _ in 0..100 {
        for party in 0..dims.len() {
            let d = dims[party];
            let basis_vecs: Vec<Vec<Complex64>> = (0..d)
                .map(|a| {
                    let mut q = p.clone();
                    q[party] = (0..d).map(|t| Complex64::new(if t == a { 1.0 } else { 0.0 }, 0.0)).collect();
                    product_vector(&q)
                })
                .collect();
            let gu: Vec<Vec<Complex64>> = basis_vecs.iter().map(|u| g.apply(u)).collect();
            let local = CMatrix::from_fn(d, d, |a, b2| {
                basis_vecs[a].iter().zip(&gu[b2]).map(|(x, y)| x.conj() * y).sum()
            });
            let local = (&local + &local.adjoint()).scale_real(0.5);
            if let Ok((_, vecs)) = eig_hermitian(&local) {
                p[party] = (0..d).map(|r| vecs[(r, 0)]).collect();
            }
        }
        let val = quad(g, &product_vector(&p));
        let done = best - val <= 1e-15 * (1.0 + best.abs());
        best = best.min(val);
        if done {
            break;
        }
    }
    (p, best)
}

struct Oracle<'a> {
    dims: &'a [usize],
    pool: Vec<Product>,
    pool_vecs: Vec<Vec<Complex64>>,
    restarts: usize,
}

impl Oracle<'_> {
    /// Approximate `argmin_{product ψ} <ψ|G|ψ>`.
    fn minimise(&self, g: &CMatrix) -> (Product, f64) {
        let mut scored: Vec<(f64, usize)> = self.pool_vecs.iter().enumerate().map(|(i, v)| (quad(g, v), i)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut best: Option<(Product, f64)> = None;
        for &(_, i) in scored.iter().take(self.restarts.max(1)) {
            let (p, v) = see_saw(g, self.dims, self.pool[i].clone());
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((p, v));
            }
        }
        best.expect("candidate pool is non-empty")
    }
}

/// Frank-Wolfe with away steps on `½||σ - ρ||_F²` over mixtures of pure product states.
pub fn nearest_separable_estimate_with(rho: &DensityMatrix, opts: &NearestOptions) -> Result<NearestSeparable> {
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let dims = rho.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let pool: Vec<Product> = (0..opts.samples)
        .map(|_| dims.iter().map(|&d| random_unit_vector(&mut rng, d)).collect())
        .collect();
    let pool_vecs = pool.iter().map(product_vector).collect();
    let lmo = Oracle {
        dims,
        pool,
        pool_vecs,
        restarts: opts.restarts,
    };
    let r = rho.matrix();

    let (first, _) = lmo.minimise(&r.scale_real(-1.0));
    let proj = |p: &Product| CMatrix::projector(&product_vector(p));
    let mut atoms: Vec<(Product, CMatrix)> = vec![(first.clone(), proj(&first))];
    let mut weights = vec![1.0];
    let mut sigma = atoms[0].1.clone();
    let mut iterations = 0;
    let mut gap = f64::INFINITY;

    while iterations < opts.max_iter {
        let g = &sigma - r;
        let g_sigma = g.trace_product_re(&sigma);
        let (s, s_val) = lmo.minimise(&g);
        gap = g_sigma - s_val;
        if gap <= opts.gap_tol {
            break;
        }
        iterations += 1;
        let (away, away_val) = atoms
            .iter()
            .enumerate()
            .map(|(i, (_, a))| (i, g.trace_product_re(a)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("active set is non-empty");
        let away_gap = away_val - g_sigma;

        if gap >= away_gap {
            let sp = proj(&s);
            let d = &sp - &sigma;
            let dd = frobenius_norm(&d).powi(2);
            let step = if dd > 0.0 { (gap / dd).clamp(0.0, 1.0) } else { 0.0 };
            if step == 0.0 {
                break;
            }
            weights.iter_mut().for_each(|w| *w *= 1.0 - step);
            sigma = &sigma.scale_real(1.0 - step) + &sp.scale_real(step);
            if step == 1.0 {
                atoms.clear();
                weights.clear();
            }
            atoms.push((s, sp));
            weights.push(step);
        } else {
            let wa = weights[away];
            let max_step = wa / (1.0 - wa);
            let d = &sigma - &atoms[away].1;
            let dd = frobenius_norm(&d).powi(2);
            let step = if dd > 0.0 { (away_gap / dd).clamp(0.0, max_step) } else { 0.0 };
            if step == 0.0 {
                break;
            }
            weights.iter_mut().for_each(|w| *w *= 1.0 + step);
            weights[away] -= step;
            sigma = &sigma.scale_real(1.0 + step) - &atoms[away].1.scale_real(step);
            if step >= max_step || weights[away] <= 0.0 {
                atoms.remove(away);
                weights.remove(away);
            }
        }
        // keep σ exactly the mixture it claims to be
        if iterations % 64 == 0 {
            sigma = CMatrix::zeros(r.rows(), r.cols());
            for ((_, a), &w) in atoms.iter().zip(&weights) {
                sigma.add_scaled(a, Complex64::new(w, 0.0));
            }
        }
    }

    let total: f64 = weights.iter().sum();
    let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut sigma = CMatrix::zeros(r.rows(), r.cols());
    for ((_, a), &w) in atoms.iter().zip(&weights) {
        sigma.add_scaled(a, Complex64::new(w, 0.0));
    }
    let diff = &sigma - r;
    Ok(NearestSeparable {
        frobenius: frobenius_norm(&diff),
        trace_norm: trace_norm(&diff),
        decomposition: SeparableDecomposition {
            dims: dims.to_vec(),
            weights,
            terms: atoms.into_iter().map(|(p, _)| p).collect(),
        },
        iterations,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dps::{check_extendible, lambda_star, VerdictStatus};
    use crate::states::{assemble_separable, make_family, random_density, random_separable, Family, FamilyParams};

    fn bell() -> DensityMatrix {
        make_family(Family::Bell, &FamilyParams::default()).unwrap()
    }

    #[test]
    fn ppt_examples() {
        let r = ppt_exact_separability(&bell()).unwrap();
        assert_eq!(r.verdict, OracleVerdict::Entangled);
        assert!((r.margin + 0.5).abs() < 1e-12);
        let mm = make_family(Family::MaxMixed, &FamilyParams::default()).unwrap();
        let r = ppt_exact_separability(&mm).unwrap();
        assert_eq!(r.verdict, OracleVerdict::Separable);
        assert!((r.margin - 0.25).abs() < 1e-12);
        let big = random_density(&[3, 3], 1).unwrap();
        assert!(ppt_exact_separability(&big).is_err());
        assert!(ppt_exact_separability(&random_density(&[2, 3], 1).unwrap()).is_ok());
    }

    #[test]
    fn werner_margin_is_linear() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let w = make_family(Family::Werner, &FamilyParams::with_param(p)).unwrap();
            let r = ppt_exact_separability(&w).unwrap();
            assert!((r.margin - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12, "p = {p}");
            let entangled = p > 1.0 / 3.0 + 1e-9;
            assert_eq!(r.verdict == OracleVerdict::Entangled, entangled, "p = {p}");
        }
    }

    #[test]
    fn signed_union_find_tracks_parity() {
        let mut uf = SignedUnionFind::new(4);
        assert!(uf.union(1, 2, -1.0));
        assert!(uf.union(2, 3, 1.0));
        let (r1, s1) = uf.find(1);
        let (r3, s3) = uf.find(3);
        assert_eq!(r1, r3);
        assert_eq!(s1 * s3, -1.0);
        assert!(!uf.union(1, 3, 1.0));
        let root = uf.find(1).0;
        assert!(uf.forced_zero[root]);
    }

    #[test]
    fn bell_and_product_values() {
        let spec = ExtensionSpec::new(vec![2, 1]);
        let r = uncompressed_extendibility(&bell(), &spec).unwrap();
        assert_eq!(r.verdict, OracleVerdict::NotExtendible);
        assert!((r.margin - 1.0 / 3.0).abs() < 0.02);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        let product = DensityMatrix::new(vec![2, 2], m).unwrap();
        assert!(uncompressed_extendibility(&product, &spec).unwrap().margin <= 1e-6);
        let (sep, _) = random_separable(&[2, 2], 3, 7).unwrap();
        let r = uncompressed_extendibility(&sep, &ExtensionSpec::new(vec![3, 1])).unwrap();
        assert!(r.margin <= 1e-6);
    }

    #[test]
    fn cap_is_enforced() {
        let spec = ExtensionSpec::new(vec![12, 1]);
        assert!(matches!(
            uncompressed_extendibility(&bell(), &spec),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn agrees_with_compressed_with_ppt_cut() {
        let spec = ExtensionSpec::new(vec![2, 1]).with_ppt("1:2".parse().unwrap());
        for seed in 0..4 {
            let rho = random_density(&[2, 2], seed).unwrap();
            let a = uncompressed_extendibility(&rho, &spec).unwrap().margin;
            let b = lambda_star(&rho, &spec).unwrap();
            assert!((a - b).abs() <= 1e-6, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn agrees_with_compressed_on_three_parties() {
        let spec = ExtensionSpec::new(vec![2, 2, 1]);
        for seed in 0..2 {
            let rho = random_density(&[2, 2, 2], seed).unwrap();
            let a = uncompressed_extendibility(&rho, &spec).unwrap().margin;
            let b = lambda_star(&rho, &spec).unwrap();
            assert!((a - b).abs() <= 1e-6, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn agreement_on_random_two_qubit_states() {
        let spec = ExtensionSpec::new(vec![2, 1]);
        let mut not_ext = 0;
        let mut npt_among = 0;
        for seed in 0..200 {
            let rho = random_density(&[2, 2], 1000 + seed).unwrap();
            let v = check_extendible(&rho, &spec).unwrap();
            let o = uncompressed_extendibility(&rho, &spec).unwrap();
            let ppt = ppt_exact_separability(&rho).unwrap();
            assert_ne!(v.status, VerdictStatus::Inconclusive, "seed {seed}");
            let compressed_ext = v.status == VerdictStatus::Extendible;
            assert_eq!(compressed_ext, o.verdict == OracleVerdict::Extendible, "seed {seed}");
            if !compressed_ext {
                not_ext += 1;
                if ppt.verdict == OracleVerdict::Entangled {
                    npt_among += 1;
                }
            }
            if ppt.verdict == OracleVerdict::Separable {
                assert!(compressed_ext, "seed {seed}: PPT state not extendible");
            }
        }
        // two-qubit entanglement is always NPT
        assert_eq!(not_ext, npt_among);
    }

    #[test]
    fn nearest_estimate_on_separable_input() {
        let (rho, _) = random_separable(&[2, 2], 6, 3).unwrap();
        let est = nearest_separable_estimate(&rho, 200, 1).unwrap();
        assert!(est.trace_norm <= 1e-3, "{}", est.trace_norm);
        assert!(est.frobenius <= est.trace_norm + 1e-15);
        let back = assemble_separable(&est.decomposition).unwrap();
        assert!(frobenius_norm(&(back.matrix() - rho.matrix())) <= est.frobenius + 1e-9);
    }

    #[test]
    fn nearest_estimate_respects_witness_bound() {
        let rho = bell();
        let est = nearest_separable_estimate(&rho, 200, 2).unwrap();
        let w = check_extendible(&rho, &ExtensionSpec::new(vec![2, 1])).unwrap().witness.unwrap();
        // ||ρ - σ||_1 ≥ -tr(Wρ) / ||W||_∞ for separable σ
        let lower = -w.value_on_state;
        assert!(est.trace_norm >= lower - 1e-9);
        assert!(est.trace_norm >= 0.4);
        // the optimum is the isotropic state with fidelity 1/2, at distance 1/sqrt(3)
        assert!((est.frobenius - 3f64.sqrt().recip()).abs() < 1e-3, "{}", est.frobenius);
    }
}
