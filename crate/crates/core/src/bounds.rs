//! Closed-form distance bounds between extendible and separable states, and
//! search-space sizes.
//!
//! A two-particle bound `δ(|A|, |B|, k)` limits how far a state with a
//! `k`-copy symmetric extension on `A` can be from the separable set. The
//! multiparty bounds chain these along the parties. A dimension given as
//! `None` stands for an unbounded system.
//!
//! All logarithms are base 2.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::symmetric::{log2_sym_dim, sym_dim};

/// `1 / (8 ln 2)`.
pub fn locc_prefactor() -> f64 {
    1.0 / (8.0 * std::f64::consts::LN_2)
}

pub const LOG_BASE_CAVEAT: &str = "logarithms are base 2";
pub const PPT_CAVEAT: &str = "constant unspecified: value is sum (|A_i|/k_i)^2 without the hidden O(.) factor";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Trace,
    /// Trace norm for extensions that are also PPT.
    TracePpt,
    Locc,
    Frobenius,
}

impl NormKind {
    pub const ALL: [NormKind; 4] = [NormKind::Trace, NormKind::TracePpt, NormKind::Locc, NormKind::Frobenius];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Trace => "trace",
            NormKind::TracePpt => "trace-ppt",
            NormKind::Locc => "locc",
            NormKind::Frobenius => "frobenius",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        NormKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown norm `{s}`")))
    }
}

/// Which dimension enters the log in the ℓ-schedule bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogIndex {
    /// Term `i` uses `|A_{i+1}|`.
    #[default]
    Next,
    /// Term `i` uses `|A_i|`.
    Same,
}

/// `δ(|A|, |B|, k)` for the given norm.
pub fn two_particle_delta(kind: NormKind, dim_a: Option<usize>, dim_b: Option<usize>, k: f64) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("extension level must be positive and finite, got {k}")));
    }
    let need = |d: Option<usize>, what| match d {
        Some(0) => Err(Error::InvalidArgument("dimensions must be positive".into())),
        Some(d) => Ok(d as f64),
        None => Err(Error::MissingDimension(what)),
    };
    Ok(match kind {
        NormKind::Trace => 4.0 * need(dim_a, "the trace bound needs |A|")? / k,
        NormKind::TracePpt => (need(dim_a, "the PPT trace bound needs |A|")? / k).powi(2),
        NormKind::Locc => locc_prefactor() * (need(dim_b, "the LOCC bound needs |B|")?.log2() / k).sqrt(),
        NormKind::Frobenius => {
            153f64.sqrt() * locc_prefactor() * (need(dim_b, "the Frobenius bound needs |B|")?.log2() / k).sqrt()
        }
    })
}

/// A summed multiparty bound with the data behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub norm: NormKind,
    /// Sum of `terms`.
    pub value: f64,
    /// One two-particle bound per party `i < N`.
    pub terms: Vec<f64>,
    /// Extension levels `k_1..k_N` the bound applies to.
    pub levels: Vec<u128>,
    pub search: SearchSpace,
    /// Value of the asymptotic runtime exponent at this error, without its hidden constant.
    pub runtime_exponent: Option<f64>,
    pub caveats: Vec<String>,
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least two parties, got {}", dims.len())));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("dimensions must be positive, got {dims:?}")));
    }
    Ok(())
}

fn caveats_for(kind: NormKind) -> Vec<String> {
    let mut c = vec![LOG_BASE_CAVEAT.to_string()];
    if kind == NormKind::TracePpt {
        c.push(PPT_CAVEAT.to_string());
    }
    c
}

/// `Σ_{i<N} δ(|A_i|, ∞, k_i)`.
///
/// Only the norms whose bound depends on `|A|` apply: `Trace`, and
/// `TracePpt` for extensions that are also PPT across the party cuts.
pub fn multiparty_bound_thm1(kind: NormKind, dims: &[usize], levels: &[u128]) -> Result<BoundReport> {
    check_dims(dims)?;
    if levels.len() != dims.len() || levels.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "need {} positive levels, got {levels:?}",
            dims.len()
        )));
    }
    let n = dims.len();
    let terms = (0..n - 1)
        .map(|i| two_particle_delta(kind, Some(dims[i]), None, levels[i] as f64))
        .collect::<Result<Vec<f64>>>()?;
    let value = terms.iter().sum::<f64>();
    let search = search_space(dims, levels)?;
    // d N ln(dN/ε) with d the largest local dimension
    let d = *dims.iter().max().unwrap_or(&1) as f64;
    let dn = d * n as f64;
    let runtime_exponent = (value > 0.0).then(|| dn * (dn / value).ln());
    Ok(BoundReport {
        norm: kind,
        value,
        terms,
        levels: levels.to_vec(),
        search,
        runtime_exponent,
        caveats: caveats_for(kind),
    })
}

/// `k_i = ∏_{j≥i} ℓ_j` for `i < N`, and `k_N = 1`.
pub fn levels_from_schedule(ells: &[u64]) -> Result<Vec<u128>> {
    if ells.contains(&0) {
        return Err(Error::InvalidArgument(format!("schedule entries must be positive, got {ells:?}")));
    }
    let mut out = vec![1u128; ells.len() + 1];
    for i in (0..ells.len()).rev() {
        out[i] = out[i + 1]
            .checked_mul(ells[i] as u128)
            .ok_or_else(|| Error::InvalidArgument(format!("levels for schedule {ells:?} overflow")))?;
    }
    Ok(out)
}

/// `Σ_{i<N} δ(∞, |A_{i+1}|, ℓ_i)` at the levels implied by the schedule.
///
/// With [`LogIndex::Same`] term `i` uses `|A_i|` instead.
pub fn multiparty_bound_thm2(kind: NormKind, dims: &[usize], ells: &[u64], index: LogIndex) -> Result<BoundReport> {
    check_dims(dims)?;
    let n = dims.len();
    if ells.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "{} parties need a schedule of length {}, got {}",
            n,
            n - 1,
            ells.len()
        )));
    }
    let levels = levels_from_schedule(ells)?;
    let terms = (0..n - 1)
        .map(|i| {
            let b = match index {
                LogIndex::Next => dims[i + 1],
                LogIndex::Same => dims[i],
            };
            two_particle_delta(kind, None, Some(b), ells[i] as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let value = terms.iter().sum::<f64>();
    let search = search_space(dims, &levels)?;
    // ε^{-2(N-1)} N^{2N-1} ∏ log|A_i|
    let logs: f64 = dims.iter().map(|&d| (d as f64).log2()).product();
    let nn = n as f64;
    let runtime_exponent =
        (value > 0.0).then(|| value.powf(-2.0 * (nn - 1.0)) * nn.powf(2.0 * nn - 1.0) * logs);
    let mut caveats = caveats_for(kind);
    if index == LogIndex::Same {
        caveats.push("term i uses log|A_i| instead of log|A_{i+1}|".into());
    }
    Ok(BoundReport {
        norm: kind,
        value,
        terms,
        levels,
        search,
        runtime_exponent,
        caveats,
    })
}

/// De Finetti-type bound for `k`-partite permutation-invariant states.
///
/// For the LOCC norm this is `(N-1) √(log|A|) / k^{1/(2N)} + 2n²/N`; for
/// other norms `(N-1) δ(∞, |A|, k^{1/N}) + 2n²/N`, which needs a bound
/// depending on `|B|` only.
pub fn definetti_bound(kind: NormKind, dim_a: usize, n: u64, big_n: u64, k: f64) -> Result<f64> {
    if dim_a == 0 || n == 0 {
        return Err(Error::InvalidArgument("dimension and n must be positive".into()));
    }
    if !(n <= big_n && (big_n as f64) <= k) {
        return Err(Error::InvalidArgument(format!("need n <= N <= k, got n={n}, N={big_n}, k={k}")));
    }
    let (nf, bn) = (n as f64, big_n as f64);
    let tail = 2.0 * nf * nf / bn;
    let head = match kind {
        NormKind::Locc => (bn - 1.0) * (dim_a as f64).log2().sqrt() / k.powf(1.0 / (2.0 * bn)),
        NormKind::Frobenius => (bn - 1.0) * two_particle_delta(kind, None, Some(dim_a), k.powf(1.0 / bn))?,
        NormKind::Trace | NormKind::TracePpt => {
            return Err(Error::MissingDimension("the de Finetti bound needs a two-particle bound free of |A|"))
        }
    };
    Ok(head + tail)
}

/// Schedule `ℓ_i = ⌈(N-1)² ε⁻² log|A_{i+1}| / (8 ln 2)²⌉` (at least 1) making the
/// LOCC bound at most `ε`; the Frobenius variant targets `ε / √153`.
pub fn ell_for_error(kind: NormKind, dims: &[usize], big_n: usize, eps: f64) -> Result<Vec<u64>> {
    check_dims(dims)?;
    if dims.len() != big_n {
        return Err(Error::InvalidArgument(format!("N = {big_n} but {} dimensions given", dims.len())));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("error target must be positive, got {eps}")));
    }
    let eps = match kind {
        NormKind::Locc => eps,
        NormKind::Frobenius => eps / 153f64.sqrt(),
        _ => return Err(Error::InvalidArgument(format!("no schedule formula for the {kind} norm"))),
    };
    let pre = locc_prefactor().powi(2);
    let m = (big_n - 1) as f64;
    (1..big_n)
        .map(|i| {
            let raw = pre * m * m * (dims[i] as f64).log2() / (eps * eps);
            if raw > u64::MAX as f64 {
                return Err(Error::InvalidArgument(format!("schedule entry {raw:.3e} overflows")));
            }
            Ok((raw.ceil() as u64).max(1))
        })
        .collect()
}

/// Size of the extension search space.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    /// `∏_i sym_dim(|A_i|, k_i)`, saturating at `u128::MAX`.
    pub variable_dim: u128,
    pub log2_variable_dim: f64,
    /// `log2` of the number of real parameters of a Hermitian operator on that space.
    pub log2_real_variables: f64,
    /// `log2 ∏_i b_i` with `b_i = (k_i+1)^{|A_i|-1}`, or `|A_i|` where `k_i = 1`.
    pub log2_dimension_bound: f64,
}

impl SearchSpace {
    /// The dimension bound itself, when it fits.
    pub fn dimension_bound(&self) -> Option<u128> {
        (self.log2_dimension_bound < 127.0).then(|| self.log2_dimension_bound.exp2().round() as u128)
    }
}

pub fn search_space(dims: &[usize], levels: &[u128]) -> Result<SearchSpace> {
    if dims.is_empty() || dims.len() != levels.len() || dims.contains(&0) || levels.contains(&0) {
        return Err(Error::InvalidArgument(format!("bad dims {dims:?} or levels {levels:?}")));
    }
    let mut variable_dim = 1u128;
    let mut log2_dim = 0.0;
    let mut log2_bound = 0.0;
    for (&d, &k) in dims.iter().zip(levels) {
        let s = usize::try_from(k).map(|k| sym_dim(d, k)).unwrap_or(u128::MAX);
        variable_dim = variable_dim.saturating_mul(s);
        log2_dim += log2_sym_dim(d, k as f64);
        log2_bound += if k == 1 {
            (d as f64).log2()
        } else {
            (d as f64 - 1.0) * (k as f64 + 1.0).log2()
        };
    }
    Ok(SearchSpace {
        variable_dim,
        log2_variable_dim: log2_dim,
        log2_real_variables: 2.0 * log2_dim,
        log2_dimension_bound: log2_bound,
    })
}
