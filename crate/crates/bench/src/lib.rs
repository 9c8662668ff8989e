//! Shared input builders for the criterion benchmarks.

use std::sync::Arc;

use ghyp::dual::{enumerate_dual, DualIndex, GroupId};
use ghyp::fourier::{random_coefficients, synthesize, FourierCoefficients, GridFunction};
use ghyp::quadrature::{build_grid, QuadratureGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn su2_band(two_ell_max: u32) -> f64 {
    DualIndex::su2(two_ell_max).eigenvalue() + 1e-9
}

pub fn su2_setup(two_ell_max: u32) -> (Arc<QuadratureGrid>, Vec<DualIndex>, FourierCoefficients, GridFunction) {
    let band = su2_band(two_ell_max);
    let grid = Arc::new(build_grid(GroupId::Su2, band));
    let duals = enumerate_dual(GroupId::Su2, band);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let coeffs = random_coefficients(&duals, &mut rng);
    let f = synthesize(&coeffs, &grid).expect("band-limited synthesis");
    (grid, duals, coeffs, f)
}
