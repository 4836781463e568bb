//! Separability testing with the symmetric-extension hierarchy.
//!
//! A state `ρ` on `A_1 ⊗ ... ⊗ A_N` is tested for an extension to
//! `⊗_i S^{k_i}(A_i)` whose one-copy marginal is `ρ`. Failure proves
//! entanglement; the dual of the search yields a witness. The crate bundles
//! the pieces needed for that:
//!
//! - [`linalg`]: dense complex matrices, tensor products, partial traces and transposes.
//! - [`symmetric`]: the symmetric subspace and its real isometry.
//! - [`states`]: density matrices, standard families, random sampling and the state file format.
//! - [`sdp`]: a primal-dual interior-point solver for small dense semidefinite programs.
//! - [`dps`]: the extension program, verdicts, witnesses and threshold scans.
//! - [`bounds`]: closed-form distance bounds and search-space estimates.
//! - [`oracle`]: independent checks used to validate the main pipeline.

pub mod error;
pub mod linalg;
pub mod symmetric;
pub mod states;
pub mod sdp;
pub mod dps;
pub mod bounds;
pub mod oracle;

pub use bounds::NormKind;
pub use dps::{check_extendible, ExtensionSpec, PptCut, Verdict, VerdictStatus, Witness};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use states::{DensityMatrix, Family, FamilyParams};
pub use num_complex::Complex64;
pub use sdp::SolverOptions;
