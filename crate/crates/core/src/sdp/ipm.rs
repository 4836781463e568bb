//! Infeasible primal-dual path following with the HKM direction and a
//! Mehrotra predictor-corrector.
//!
//! Linearly dependent equality rows are removed up front (pivoted Cholesky on
//! `A Aᵀ`); an inconsistent dependency is reported as primal infeasibility
//! with the exact Farkas combination. Otherwise infeasibility is detected by
//! normalising the diverging iterate and checking that the ray has settled
//! and satisfies the certificate inequalities.

use nalgebra::{DMatrix, DVector};

use super::{BlockValue, Cone, Residuals, SdpProblem, SdpSolution, SolverOptions, Status};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Symmetric coefficient matrix restricted to one block, upper-triangle entries.
struct BlockCoef {
    con: usize,
    entries: Vec<(usize, usize, f64)>,
    dense: Option<DMatrix<f64>>,
}

enum Kind {
    Psd,
    Lp,
}

struct BlockData {
    kind: Kind,
    n: usize,
    coefs: Vec<BlockCoef>,
    c: DMatrix<f64>,
}

/// Block iterate: full symmetric matrix for PSD, column vector for LP.
type Blk = DMatrix<f64>;

struct Data {
    blocks: Vec<BlockData>,
    b: DVector<f64>,
    m: usize,
}

fn sym_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn inner(a: &Blk, b: &Blk) -> f64 {
    a.dot(b)
}

/// Independent subset of rows, or a Farkas combination proving inconsistency.
enum Presolve {
    Keep(Vec<usize>),
    Inconsistent(Vec<f64>),
}

fn presolve(p: &SdpProblem) -> Presolve {
    let m = p.num_constraints();
    let nv = p.num_vars();
    let rows = p.rows();
    let b = p.rhs();

    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (i, r) in rows.iter().enumerate() {
        for &(k, a) in r {
            by_col[k].push((i, a));
        }
    }
    let mut gram = DMatrix::<f64>::zeros(m, m);
    for col in &by_col {
        for &(i, a) in col {
            for &(j, c) in col {
                gram[(i, j)] += a * c;
            }
        }
    }

    let norms: Vec<f64> = (0..m).map(|i| gram[(i, i)]).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut is_chosen = vec![false; m];
    let mut l = DMatrix::<f64>::zeros(m, m);
    let mut resid = norms.clone();
    loop {
        let best = (0..m)
            .filter(|&j| !is_chosen[j] && norms[j] > 0.0)
            .filter(|&j| resid[j] > 1e-14 * norms[j])
            .max_by(|&a, &c| (resid[a] / norms[a]).total_cmp(&(resid[c] / norms[c])));
        let Some(p) = best else { break };
        let k = chosen.len();
        let lp = resid[p].sqrt();
        l[(p, k)] = lp;
        for j in 0..m {
            if is_chosen[j] || j == p {
                continue;
            }
            let mut v = gram[(j, p)];
            for t in 0..k {
                v -= l[(j, t)] * l[(p, t)];
            }
            let v = v / lp;
            l[(j, k)] = v;
            resid[j] -= v * v;
        }
        chosen.push(p);
        is_chosen[p] = true;
    }

    // consistency of the dropped rows
    let r = chosen.len();
    let mut lii = DMatrix::<f64>::zeros(r, r);
    for (a, &i) in chosen.iter().enumerate() {
        for t in 0..r {
            lii[(a, t)] = l[(i, t)];
        }
    }
    let b_chosen = DVector::from_iterator(r, chosen.iter().map(|&i| b[i]));
    for j in 0..m {
        if is_chosen[j] {
            continue;
        }
        let coeffs = if r == 0 {
            DVector::zeros(0)
        } else {
            let lj = DVector::from_iterator(r, (0..r).map(|t| l[(j, t)]));
            lii.transpose().solve_upper_triangular(&lj).unwrap_or_else(|| DVector::zeros(r))
        };
        let implied = coeffs.dot(&b_chosen);
        let scale = 1.0 + b[j].abs() + coeffs.iter().zip(b_chosen.iter()).map(|(c, v)| (c * v).abs()).sum::<f64>();
        let gap = b[j] - implied;
        if gap.abs() > 1e-9 * scale {
            let mut y = vec![0.0; m];
            y[j] = 1.0 / gap;
            for (a, &i) in chosen.iter().enumerate() {
                y[i] = -coeffs[a] / gap;
            }
            return Presolve::Inconsistent(y);
        }
    }
    chosen.sort_unstable();
    Presolve::Keep(chosen)
}

fn build_data(p: &SdpProblem, keep: &[usize]) -> Data {
    let table = p.coordinate_table();
    let mut blocks: Vec<BlockData> = p
        .blocks()
        .iter()
        .map(|c| match *c {
            Cone::Psd(n) => BlockData {
                kind: Kind::Psd,
                n,
                coefs: Vec::new(),
                c: DMatrix::zeros(n, n),
            },
            Cone::Nonneg(n) => BlockData {
                kind: Kind::Lp,
                n,
                coefs: Vec::new(),
                c: DMatrix::zeros(n, 1),
            },
        })
        .collect();

    for (k, &v) in p.objective().iter().enumerate() {
        let (b, i, j) = table[k];
        let blk = &mut blocks[b];
        match blk.kind {
            Kind::Psd => {
                let val = if i == j { v } else { v / SQRT2 };
                blk.c[(i, j)] = val;
                blk.c[(j, i)] = val;
            }
            Kind::Lp => blk.c[(i, 0)] = v,
        }
    }

    for (new_i, &orig) in keep.iter().enumerate() {
        let mut per_block: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); blocks.len()];
        for &(k, v) in &p.rows()[orig] {
            let (b, i, j) = table[k];
            let val = if i == j { v } else { v / SQRT2 };
            per_block[b].push((i, j, val));
        }
        for (b, entries) in per_block.into_iter().enumerate() {
            if entries.is_empty() {
                continue;
            }
            let blk = &mut blocks[b];
            let dense = match blk.kind {
                Kind::Psd if entries.len() > blk.n => {
                    let mut d = DMatrix::zeros(blk.n, blk.n);
                    for &(i, j, v) in &entries {
                        d[(i, j)] = v;
                        d[(j, i)] = v;
                    }
                    Some(d)
                }
                _ => None,
            };
            blk.coefs.push(BlockCoef {
                con: new_i,
                entries,
                dense,
            });
        }
    }
    let b = DVector::from_iterator(keep.len(), keep.iter().map(|&i| p.rhs()[i]));
    Data {
        blocks,
        b,
        m: keep.len(),
    }
}

impl Data {
    fn nu(&self) -> f64 {
        self.blocks.iter().map(|b| b.n).sum::<usize>() as f64
    }

    /// `<A_i, G>` summed into `out` for every constraint touching the block.
    fn accumulate_a(&self, block: usize, g: &Blk, out: &mut DVector<f64>) {
        let blk = &self.blocks[block];
        for coef in &blk.coefs {
            let mut acc = 0.0;
            match blk.kind {
                Kind::Psd => {
                    for &(i, j, v) in &coef.entries {
                        acc += if i == j { v * g[(i, i)] } else { v * (g[(i, j)] + g[(j, i)]) };
                    }
                }
                Kind::Lp => {
                    for &(i, _, v) in &coef.entries {
                        acc += v * g[(i, 0)];
                    }
                }
            }
            out[coef.con] += acc;
        }
    }

    fn a_op(&self, x: &[Blk]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (b, xb) in x.iter().enumerate() {
            self.accumulate_a(b, xb, &mut out);
        }
        out
    }

    fn at_op(&self, y: &DVector<f64>) -> Vec<Blk> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut out = match blk.kind {
                    Kind::Psd => DMatrix::zeros(blk.n, blk.n),
                    Kind::Lp => DMatrix::zeros(blk.n, 1),
                };
                for coef in &blk.coefs {
                    let yi = y[coef.con];
                    if yi == 0.0 {
                        continue;
                    }
                    for &(i, j, v) in &coef.entries {
                        match blk.kind {
                            Kind::Psd => {
                                out[(i, j)] += yi * v;
                                if i != j {
                                    out[(j, i)] += yi * v;
                                }
                            }
                            Kind::Lp => out[(i, 0)] += yi * v,
                        }
                    }
                }
                out
            })
            .collect()
    }

    /// Schur complement `M_ij = Σ_b tr(A_i X A_j S⁻¹)`.
    fn schur(&self, x: &[Blk], sinv: &[Blk]) -> DMatrix<f64> {
        let mut m = DMatrix::<f64>::zeros(self.m, self.m);
        for (b, blk) in self.blocks.iter().enumerate() {
            let (xb, si) = (&x[b], &sinv[b]);
            match blk.kind {
                Kind::Psd => {
                    let n = blk.n;
                    let mut t = DMatrix::<f64>::zeros(n, n);
                    for cj in &blk.coefs {
                        if let Some(d) = &cj.dense {
                            t = xb * d * si;
                        } else {
                            t.fill(0.0);
                            for &(r, c, v) in &cj.entries {
                                t.ger(v, &xb.column(r), &si.row(c).transpose(), 1.0);
                                if r != c {
                                    t.ger(v, &xb.column(c), &si.row(r).transpose(), 1.0);
                                }
                            }
                        }
                        for ci in &blk.coefs {
                            let mut acc = 0.0;
                            for &(p, q, a) in &ci.entries {
                                acc += if p == q { a * t[(p, p)] } else { a * (t[(q, p)] + t[(p, q)]) };
                            }
                            m[(ci.con, cj.con)] += acc;
                        }
                    }
                }
                Kind::Lp => {
                    let w: Vec<f64> = (0..blk.n).map(|k| xb[(k, 0)] * si[(k, 0)]).collect();
                    for cj in &blk.coefs {
                        let mut dense_j = vec![0.0; blk.n];
                        for &(k, _, v) in &cj.entries {
                            dense_j[k] += v * w[k];
                        }
                        for ci in &blk.coefs {
                            let acc: f64 = ci.entries.iter().map(|&(k, _, a)| a * dense_j[k]).sum();
                            m[(ci.con, cj.con)] += acc;
                        }
                    }
                }
            }
        }
        sym_part(&m)
    }

    fn objective(&self, x: &[Blk]) -> f64 {
        self.blocks.iter().zip(x).map(|(blk, xb)| inner(&blk.c, xb)).sum()
    }
}

fn chol_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    nalgebra::Cholesky::new(m.clone()).map(|c| c.inverse())
}

/// Largest `α` with `X + α dX` in the cone (infinite if unbounded).
fn max_step(kind: &Kind, x: &Blk, dx: &Blk) -> f64 {
    match kind {
        Kind::Psd => {
            let Some(chol) = nalgebra::Cholesky::new(x.clone()) else {
                return 0.0;
            };
            let l = chol.l();
            let Some(a) = l.solve_lower_triangular(dx) else {
                return 0.0;
            };
            let Some(w) = l.solve_lower_triangular(&a.transpose()) else {
                return 0.0;
            };
            let w = sym_part(&w);
            let lmin = w.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
            if lmin >= 0.0 {
                f64::INFINITY
            } else {
                -1.0 / lmin
            }
        }
        Kind::Lp => {
            let mut step = f64::INFINITY;
            for k in 0..x.nrows() {
                if dx[(k, 0)] < 0.0 {
                    step = step.min(-x[(k, 0)] / dx[(k, 0)]);
                }
            }
            step
        }
    }
}

struct Direction {
    dx: Vec<Blk>,
    dy: DVector<f64>,
    ds: Vec<Blk>,
}

struct Iterate {
    x: Vec<Blk>,
    y: DVector<f64>,
    s: Vec<Blk>,
}

impl Data {
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
        it: &Iterate,
        sinv: &[Blk],
        rp: &DVector<f64>,
        rd: &[Blk],
        target: f64,
        corr: Option<&Direction>,
    ) -> Direction {
        let mut rhs = rp.clone();
        let mut k_terms = Vec::with_capacity(self.blocks.len());
        for (b, blk) in self.blocks.iter().enumerate() {
            let (x, si) = (&it.x[b], &sinv[b]);
            match blk.kind {
                Kind::Psd => {
                    let mut k = si * target - x;
                    if let Some(c) = corr {
                        k -= sym_part(&(&c.dx[b] * &c.ds[b] * si));
                    }
                    let xrs = x * &rd[b] * si;
                    let mut tmp = DVector::zeros(self.m);
                    self.accumulate_a(b, &(xrs - &k), &mut tmp);
                    rhs += tmp;
                    k_terms.push(k);
                }
                Kind::Lp => {
                    let mut k = DMatrix::zeros(blk.n, 1);
                    for i in 0..blk.n {
                        k[(i, 0)] = target * si[(i, 0)] - x[(i, 0)];
                        if let Some(c) = corr {
                            k[(i, 0)] -= c.dx[b][(i, 0)] * c.ds[b][(i, 0)] * si[(i, 0)];
                        }
                    }
                    let mut g = DMatrix::zeros(blk.n, 1);
                    for i in 0..blk.n {
                        g[(i, 0)] = x[(i, 0)] * rd[b][(i, 0)] * si[(i, 0)] - k[(i, 0)];
                    }
                    let mut tmp = DVector::zeros(self.m);
                    self.accumulate_a(b, &g, &mut tmp);
                    rhs += tmp;
                    k_terms.push(k);
                }
            }
        }
        let dy = chol.solve(&rhs);
        let aty = self.at_op(&dy);
        let mut dx = Vec::with_capacity(self.blocks.len());
        let mut ds = Vec::with_capacity(self.blocks.len());
        for (b, blk) in self.blocks.iter().enumerate() {
            let dsb = &rd[b] - &aty[b];
            let dxb = match blk.kind {
                Kind::Psd => &k_terms[b] - sym_part(&(&it.x[b] * &dsb * &sinv[b])),
                Kind::Lp => {
                    let mut d = k_terms[b].clone();
                    for i in 0..blk.n {
                        d[(i, 0)] -= it.x[b][(i, 0)] * dsb[(i, 0)] * sinv[b][(i, 0)];
                    }
                    d
                }
            };
            dx.push(dxb);
            ds.push(dsb);
        }
        Direction { dx, dy, ds }
    }

    fn step_lengths(&self, it: &Iterate, d: &Direction) -> (f64, f64) {
        let mut ap = f64::INFINITY;
        let mut ad = f64::INFINITY;
        for (b, blk) in self.blocks.iter().enumerate() {
            ap = ap.min(max_step(&blk.kind, &it.x[b], &d.dx[b]));
            ad = ad.min(max_step(&blk.kind, &it.s[b], &d.ds[b]));
        }
        (ap, ad)
    }

    fn initial_point(&self) -> Iterate {
        let mut x = Vec::with_capacity(self.blocks.len());
        let mut s = Vec::with_capacity(self.blocks.len());
        for blk in &self.blocks {
            let n = blk.n as f64;
            let mut xi: f64 = 10f64.max(n.sqrt());
            let mut eta: f64 = 10f64.max(n.sqrt()).max(blk.c.norm());
            for coef in &blk.coefs {
                let norm = coef
                    .entries
                    .iter()
                    .map(|&(i, j, v)| if i == j { v * v } else { 2.0 * v * v })
                    .sum::<f64>()
                    .sqrt();
                xi = xi.max(n * (1.0 + self.b[coef.con].abs()) / (1.0 + norm));
                eta = eta.max(norm);
            }
            match blk.kind {
                Kind::Psd => {
                    x.push(DMatrix::identity(blk.n, blk.n) * xi);
                    s.push(DMatrix::identity(blk.n, blk.n) * eta);
                }
                Kind::Lp => {
                    x.push(DMatrix::from_element(blk.n, 1, xi));
                    s.push(DMatrix::from_element(blk.n, 1, eta));
                }
            }
        }
        Iterate {
            x,
            y: DVector::zeros(self.m),
            s,
        }
    }

    fn inverses(&self, s: &[Blk]) -> Option<Vec<Blk>> {
        self.blocks
            .iter()
            .zip(s)
            .map(|(blk, sb)| match blk.kind {
                Kind::Psd => chol_inverse(sb),
                Kind::Lp => {
                    if sb.iter().all(|&v| v > 0.0) {
                        Some(sb.map(|v| 1.0 / v))
                    } else {
                        None
                    }
                }
            })
            .collect()
    }
}

fn factor_schur(m: &DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = nalgebra::Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = (0..m.nrows()).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut ridge = 1e-14 * scale;
    for _ in 0..8 {
        let mut r = m.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += ridge;
        }
        if let Some(c) = nalgebra::Cholesky::new(r) {
            return Some(c);
        }
        ridge *= 100.0;
    }
    None
}

/// Solves `p` to the tolerances in `opts`.
pub fn solve(p: &SdpProblem, opts: &SolverOptions) -> SdpSolution {
    let m_full = p.num_constraints();
    let zero_blocks = || -> Vec<BlockValue> {
        p.blocks()
            .iter()
            .map(|c| match *c {
                Cone::Psd(n) => BlockValue::Psd(DMatrix::zeros(n, n)),
                Cone::Nonneg(n) => BlockValue::Nonneg(vec![0.0; n]),
            })
            .collect()
    };

    let keep = match presolve(p) {
        Presolve::Keep(k) => k,
        Presolve::Inconsistent(y) => {
            let (by, viol) = p.farkas_primal(&y);
            let verified = by > 0.0 && viol.abs() <= opts.certificate_tol;
            let slack = p.apply_adjoint(&y);
            return SdpSolution {
                status: if verified { Status::PrimalInfeasible } else { Status::MaxIter },
                primal: zero_blocks(),
                dual: y,
                slack,
                primal_objective: f64::NAN,
                dual_objective: by,
                residuals: Residuals::default(),
                iterations: 0,
                certificate_violation: verified.then_some(viol.max(0.0)),
            };
        }
    };

    let data = build_data(p, &keep);
    let nu = data.nu();
    let bnorm = data.b.norm();
    let cnorm = data.blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();

    let mut it = data.initial_point();
    let mut status = Status::MaxIter;
    let mut iterations = 0;
    let mut residuals;
    let mut prev_yray: Option<DVector<f64>> = None;
    let mut prev_xray: Option<Vec<Blk>> = None;
    let mut certificate_violation = None;
    let mut primal_ray: Option<Vec<f64>> = None;
    let mut dual_ray: Option<Vec<Blk>> = None;

    loop {
        let ax = data.a_op(&it.x);
        let rp = &data.b - &ax;
        let aty = data.at_op(&it.y);
        let rd: Vec<Blk> = data
            .blocks
            .iter()
            .enumerate()
            .map(|(b, blk)| &blk.c - &aty[b] - &it.s[b])
            .collect();
        let pobj = data.objective(&it.x);
        let dobj = data.b.dot(&it.y);
        let xs: f64 = it.x.iter().zip(&it.s).map(|(a, b)| inner(a, b)).sum();
        let mu = xs / nu;
        residuals = Residuals {
            primal: rp.norm() / (1.0 + bnorm),
            dual: rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / (1.0 + cnorm),
            gap: (pobj - dobj).abs().max(xs) / (1.0 + pobj.abs() + dobj.abs()),
        };
        if residuals.max() <= opts.tol {
            status = Status::Optimal;
            break;
        }

        // primal infeasibility: b·y → ∞ along a ray with A*(y) ⪯ 0
        if dobj > 0.0 {
            let yray = &it.y / dobj;
            let viol = data
                .blocks
                .iter()
                .zip(data.at_op(&yray))
                .map(|(blk, a)| match blk.kind {
                    Kind::Psd => a.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    Kind::Lp => a.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if let Some(prev) = &prev_yray {
                let change = (&yray - prev).amax() / yray.amax().max(1.0);
                if change <= opts.ray_tol && viol <= opts.certificate_tol {
                    let mut y = vec![0.0; m_full];
                    for (k, &orig) in keep.iter().enumerate() {
                        y[orig] = yray[k];
                    }
                    let (by, v) = p.farkas_primal(&y);
                    if by > 0.0 && v <= opts.certificate_tol * by {
                        let y: Vec<f64> = y.iter().map(|v| v / by).collect();
                        certificate_violation = Some((v / by).max(0.0));
                        primal_ray = Some(y);
                        status = Status::PrimalInfeasible;
                        break;
                    }
                }
            }
            prev_yray = Some(yray);
        } else {
            prev_yray = None;
        }

        // dual infeasibility: <C,X> → -∞ along a ray with A(X) = 0
        if pobj < 0.0 {
            let xray: Vec<Blk> = it.x.iter().map(|x| x / (-pobj)).collect();
            let viol = data.a_op(&xray).norm();
            if let Some(prev) = &prev_xray {
                let change = xray
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).amax())
                    .fold(0.0, f64::max)
                    / xray.iter().map(|a| a.amax()).fold(1.0, f64::max);
                if change <= opts.ray_tol && viol <= opts.certificate_tol {
                    certificate_violation = Some(viol);
                    dual_ray = Some(xray.clone());
                    status = Status::DualInfeasible;
                    break;
                }
            }
            prev_xray = Some(xray);
        } else {
            prev_xray = None;
        }

        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let Some(sinv) = data.inverses(&it.s) else { break };
        let schur = data.schur(&it.x, &sinv);
        let Some(chol) = factor_schur(&schur) else { break };

        let pred = data.direction(&chol, &it, &sinv, &rp, &rd, 0.0, None);
        let (ap_max, ad_max) = data.step_lengths(&it, &pred);
        let ap = ap_max.min(1.0);
        let ad = ad_max.min(1.0);
        let mu_aff: f64 = it
            .x
            .iter()
            .zip(&pred.dx)
            .zip(it.s.iter().zip(&pred.ds))
            .map(|((x, dx), (s, ds))| inner(&(x + dx * ap), &(s + ds * ad)))
            .sum::<f64>()
            / nu;
        let expon = (3.0 * ap.min(ad).powi(2)).max(1.0);
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powf(expon).min(1.0) } else { 0.0 };

        let corr = data.direction(&chol, &it, &sinv, &rp, &rd, sigma * mu, Some(&pred));
        let gamma = 0.9 + 0.09 * ap.min(ad);
        let (ap_max, ad_max) = data.step_lengths(&it, &corr);
        let ap = (gamma * ap_max).min(1.0);
        let ad = (gamma * ad_max).min(1.0);
        if !(ap > 0.0 && ad > 0.0) || !ap.is_finite() || !ad.is_finite() {
            break;
        }
        for (b, blk) in data.blocks.iter().enumerate() {
            it.x[b] += &corr.dx[b] * ap;
            it.s[b] += &corr.ds[b] * ad;
            if matches!(blk.kind, Kind::Psd) {
                it.x[b] = sym_part(&it.x[b]);
                it.s[b] = sym_part(&it.s[b]);
            }
        }
        it.y += &corr.dy * ad;
        if it.y.iter().any(|v| !v.is_finite()) {
            break;
        }
    }

    let to_values = |blocks: &[Blk]| -> Vec<BlockValue> {
        data.blocks
            .iter()
            .zip(blocks)
            .map(|(blk, v)| match blk.kind {
                Kind::Psd => BlockValue::Psd(v.clone()),
                Kind::Lp => BlockValue::Nonneg(v.iter().copied().collect()),
            })
            .collect()
    };
    let mut y_full = vec![0.0; m_full];
    for (k, &orig) in keep.iter().enumerate() {
        y_full[orig] = it.y[k];
    }
    let primal = match &dual_ray {
        Some(ray) => to_values(ray),
        None => to_values(&it.x),
    };
    SdpSolution {
        status,
        primal_objective: data.objective(&it.x),
        dual_objective: data.b.dot(&it.y),
        primal,
        dual: primal_ray.unwrap_or(y_full),
        slack: to_values(&it.s),
        residuals,
        iterations,
        certificate_violation,
    }
}
