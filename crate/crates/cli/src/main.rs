//! `symext`: extendibility checks, threshold scans and bound calculators.
//!
//! Results go to stdout as `key: value` lines (or a short human summary with
//! `--format text`); errors and timing go to stderr. Exit codes: 0 for a
//! conclusive run, 2 for bad input, 3 when the solver does not converge or the
//! verdict is inconclusive.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use symext::bounds::{self, BoundReport, LogIndex, NormKind};
use symext::dps::{self, ExtensionSpec, PptCut, VerdictStatus};
use symext::states::{self, LoadOptions};
use symext::{DensityMatrix, Error, Family, FamilyParams};

#[derive(Parser)]
#[command(name = "symext", version, about = "Separability tests by symmetric extension")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Kv, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// `key: value` lines.
    Kv,
    /// Human-readable summary.
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named or random state to a QSTATE file.
    MakeState {
        /// bell, ghz, w, isotropic, werner, tiles, product, max_mixed, random or random_separable.
        #[arg(long)]
        family: String,
        #[arg(long)]
        param: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Seed for the random families.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of product terms for random_separable.
        #[arg(long, default_value_t = 4)]
        terms: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test a state for a symmetric extension.
    #[command(group(ArgGroup::new("input").required(true).args(["state", "state_pos"])))]
    Check {
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(value_name = "STATE")]
        state_pos: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        /// PPT cuts such as `1:23` (parties are 1-based).
        #[arg(long, num_args = 1..)]
        ppt: Vec<PptCut>,
        #[arg(long, default_value_t = dps::DEFAULT_VERDICT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = dps::DEFAULT_MAX_DIM)]
        max_dim: usize,
        /// Project an invalid input onto the state space instead of rejecting it.
        #[arg(long)]
        repair: bool,
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Bisect the extendibility threshold of a parametric family.
    Threshold {
        #[arg(long)]
        family: Family,
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, num_args = 1..)]
        ppt: Vec<PptCut>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 1.0])]
        range: Vec<f64>,
        #[arg(long, default_value_t = dps::DEFAULT_SCAN_WIDTH)]
        width: f64,
        #[arg(long, default_value_t = dps::DEFAULT_VERDICT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = dps::DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Distance bound from the separable set for given levels or an ℓ-schedule.
    #[command(group(ArgGroup::new("schedule").required(true).args(["levels", "ells"])))]
    Bound {
        #[arg(long)]
        norm: NormKind,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u128>>,
        #[arg(long, value_delimiter = ',')]
        ells: Option<Vec<u64>>,
        /// Dimension under the log of term i in the ℓ-schedule bound.
        #[arg(long, value_enum, default_value_t = LogIndexArg::Next)]
        log_index: LogIndexArg,
    },
    /// de Finetti-type bound for `n` of `N` exchangeable copies.
    Definetti {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        n: u64,
        #[arg(long = "bigN")]
        big_n: u64,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        norm: NormKind,
    },
    /// Smallest ℓ-schedule meeting a target error.
    EllForError {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long = "bigN")]
        big_n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = NormKind::Locc)]
        norm: NormKind,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogIndexArg {
    Next,
    Same,
}

impl From<LogIndexArg> for LogIndex {
    fn from(a: LogIndexArg) -> Self {
        match a {
            LogIndexArg::Next => LogIndex::Next,
            LogIndexArg::Same => LogIndex::Same,
        }
    }
}

/// Collected output lines.
struct Report {
    format: Format,
    lines: Vec<(&'static str, String)>,
}

impl Report {
    fn new(format: Format) -> Self {
        Self { format, lines: Vec::new() }
    }

    fn put(&mut self, key: &'static str, value: impl Display) {
        self.lines.push((key, value.to_string()));
    }

    fn float(&mut self, key: &'static str, value: f64) {
        self.put(key, fmt_f64(value));
    }

    /// Writes the lines; a closed stdout (e.g. piped into `head`) is not an error.
    fn print(&self) {
        let mut out = io::stdout().lock();
        for (k, v) in &self.lines {
            let written = match self.format {
                Format::Kv => writeln!(out, "{k}: {v}"),
                Format::Text => writeln!(out, "{:<24} {v}", k.replace('_', " ")),
            };
            if written.is_err() {
                return;
            }
        }
    }
}

/// Shortest round-trip form, always with a decimal point or exponent.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn join<T: Display>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

enum Failure {
    Input(String),
    NotConverged(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotConverged(m) => Failure::NotConverged(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn check_output_path(path: &Path) -> Result<(), Failure> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(Failure::Input(format!("output directory {} does not exist", parent.display())));
    }
    Ok(())
}

fn spec_for(levels: Vec<usize>, ppt: Vec<PptCut>, tol: f64, max_dim: usize) -> Result<ExtensionSpec, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::Input(format!("tolerance must be positive, got {tol}")));
    }
    let mut spec = ExtensionSpec::new(levels);
    spec.ppt_cuts = ppt;
    spec.verdict_tol = tol;
    spec.max_dim = max_dim;
    Ok(spec)
}

fn make_state(family: &str, param: Option<f64>, dims: Option<Vec<usize>>, seed: u64, terms: usize) -> Result<DensityMatrix, Failure> {
    let norm = family.to_ascii_lowercase().replace('-', "_");
    let dims_or = |d: Vec<usize>| dims.clone().unwrap_or(d);
    Ok(match norm.as_str() {
        "random" => states::random_density(&dims_or(vec![2, 2]), seed)?,
        "random_separable" => states::random_separable(&dims_or(vec![2, 2]), terms, seed)?.0,
        _ => {
            let family: Family = family.parse()?;
            states::make_family(family, &FamilyParams { param, dims })?
        }
    })
}

fn bound_report(r: &mut Report, b: &BoundReport) {
    r.put("norm", b.norm);
    r.float("value", b.value);
    r.put("terms", b.terms.iter().map(|&t| fmt_f64(t)).collect::<Vec<_>>().join(","));
    r.put("levels", join(&b.levels));
    r.put("variable_dim", b.search.variable_dim);
    r.float("log2_variable_dim", b.search.log2_variable_dim);
    r.float("log2_real_variables", b.search.log2_real_variables);
    r.put(
        "dimension_bound",
        b.search.dimension_bound().map_or("overflow".to_string(), |d| d.to_string()),
    );
    r.float("log2_dimension_bound", b.search.log2_dimension_bound);
    if let Some(e) = b.runtime_exponent {
        r.float("runtime_exponent", e);
    }
    for c in &b.caveats {
        r.put("caveat", c);
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let mut r = Report::new(cli.format);
    let mut conclusive = true;
    match cli.command {
        Command::MakeState {
            family,
            param,
            dims,
            seed,
            terms,
            out,
        } => {
            check_output_path(&out)?;
            let rho = make_state(&family, param, dims, seed, terms)?;
            states::save_state(&rho, &out)?;
            r.put("dims", join(rho.dims()));
            r.put("out", out.display());
        }
        Command::Check {
            state,
            state_pos,
            levels,
            ppt,
            tol,
            max_dim,
            repair,
            witness_out,
        } => {
            let path = state.or(state_pos).expect("clap enforces one input");
            if let Some(w) = &witness_out {
                check_output_path(w)?;
            }
            let rho = states::load_state(&path, LoadOptions { repair })?;
            let spec = spec_for(levels, ppt, tol, max_dim)?;
            spec.validate(rho.dims())?;
            let v = dps::check_extendible(&rho, &spec)?;
            conclusive = v.status != VerdictStatus::Inconclusive;
            r.put("verdict", v.status);
            r.float("lambda", v.lambda_star);
            r.put("solver_status", format!("{:?}", v.diagnostics.solver_status));
            r.put("iterations", v.diagnostics.iterations);
            r.put("compressed_dim", v.diagnostics.compressed_dim);
            r.put("constraints", v.diagnostics.constraints);
            r.put("residual", format!("{:.3e}", v.diagnostics.residuals.max()));
            if let Some(w) = &v.witness {
                r.put("witness_value", format!("{:.9}", w.value_on_state));
                r.put("witness_lifted_min_eig", format!("{:.3e}", w.lifted_min_eig));
                r.put("witness_valid", w.is_valid());
                if let (Some(p), true) = (&witness_out, w.is_valid()) {
                    states::save_witness(&w.dims, &w.operator, p)?;
                    r.put("witness_out", p.display());
                }
            }
            if let Some(why) = &v.diagnostics.witness_rejection {
                r.put("witness_rejection", why);
            }
            if !conclusive && v.diagnostics.solver_status != symext::sdp::Status::Optimal {
                eprintln!("solver did not converge: {:?}", v.diagnostics.solver_status);
            }
        }
        Command::Threshold {
            family,
            dims,
            levels,
            ppt,
            range,
            width,
            tol,
            max_dim,
        } => {
            if !(width > 0.0) {
                return Err(Failure::Input(format!("width must be positive, got {width}")));
            }
            let spec = spec_for(levels, ppt, tol, max_dim)?;
            let t = dps::threshold_scan(family, (range[0], range[1]), dims.as_deref(), &spec, width)?;
            r.put("family", family);
            r.float("threshold", t.value);
            r.float("bracket_lo", t.bracket.0);
            r.float("bracket_hi", t.bracket.1);
            r.put("evaluations", t.evaluations.len());
        }
        Command::Bound {
            norm,
            dims,
            levels,
            ells,
            log_index,
        } => {
            let b = match (levels, ells) {
                (Some(levels), _) => bounds::multiparty_bound_thm1(norm, &dims, &levels)?,
                (None, Some(ells)) => bounds::multiparty_bound_thm2(norm, &dims, &ells, log_index.into())?,
                (None, None) => unreachable!("clap enforces a schedule"),
            };
            bound_report(&mut r, &b);
        }
        Command::Definetti { dim, n, big_n, k, norm } => {
            let v = bounds::definetti_bound(norm, dim, n, big_n, k)?;
            r.put("norm", norm);
            r.float("value", v);
            r.put("caveat", bounds::LOG_BASE_CAVEAT);
        }
        Command::EllForError { dims, big_n, eps, norm } => {
            let ells = bounds::ell_for_error(norm, &dims, big_n, eps)?;
            let b = bounds::multiparty_bound_thm2(norm, &dims, &ells, LogIndex::Next)?;
            r.put("ells", join(&ells));
            r.float("eps", eps);
            bound_report(&mut r, &b);
        }
    }
    r.print();
    Ok(conclusive)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let outcome = run(cli);
    eprintln!("wall_time: {:.3}s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::NotConverged(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
