//! Fixtures shared by the benchmarks under `benches/`.

use symext::dps::ExtensionSpec;
use symext::states::random_density;
use symext::{DensityMatrix, Family, FamilyParams};

/// Seeded full-rank state, so every run solves the same program.
pub fn random_state(dims: &[usize]) -> DensityMatrix {
    random_density(dims, 7).expect("valid dimensions")
}

pub fn named(family: Family, param: Option<f64>) -> DensityMatrix {
    symext::states::make_family(family, &FamilyParams { param, dims: None }).expect("valid family")
}

/// Levels `(k, 1, ..., 1)` for `parties` parties.
pub fn first_party(k: usize, parties: usize) -> ExtensionSpec {
    let mut levels = vec![1; parties];
    levels[0] = k;
    ExtensionSpec::new(levels)
}
