//! Noncommutative Fourier analysis on compact groups, with global
//! hypoellipticity diagnostics for invariant operators.
//!
//! The library works on the Fourier side of a compact group `G` (the
//! `d`-torus or SU(2)): functions are expanded over the unitary dual into
//! matrix-valued coefficients, invariant operators are represented by
//! matrix-valued symbols `sigma(xi)`, and hypoellipticity evidence is
//! collected from the growth of the smallest singular values
//! `lambda_min[sigma(xi)]` across the dual. Homogeneous-space and
//! vector-bundle variants replace `lambda_min` by the stacked-block
//! quantity `m_xi`.
//!
//! Module map:
//! - [`dual`]: truncated unitary duals and irreducible representation
//!   matrices (Wigner-d based for SU(2)).
//! - [`quadrature`]: sampling grids on which Haar integrals of
//!   band-limited functions are exact.
//! - [`fourier`]: forward/inverse group Fourier transform, Plancherel and
//!   Sobolev norms, Weyl partial sums.
//! - [`symbols`]: invariant symbols, built-in operator families, symbol
//!   extraction from black-box multipliers.
//! - [`bundles`]: the sphere `S^2 = SU(2)/T^1`, projection/lifting, and
//!   block symbols for homogeneous vector bundles.
//! - [`analyzer`]: singular-value profiles, growth fitting, verdicts, and
//!   counterexample construction.
//! - [`subelliptic`]: symbol lower bounds implied by a subelliptic
//!   a-priori estimate.
//! - [`selftest`]: the acceptance battery behind `ghyp selftest`.

pub mod analyzer;
pub mod bundles;
pub mod dual;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod selftest;
pub mod subelliptic;
pub mod symbols;

pub use analyzer::{
    build_counterexample, check_lemma34, fit_and_judge, hs_norm, lambda_min, profile_bundle,
    profile_group, profile_homogeneous, AnalysisReport, AnalyzerOptions, Profile, ProfileKind,
    Verdict,
};
pub use bundles::{dual_of_m, homogeneous_block, lift, m_xi, project_pm, BundleSymbol};
pub use dual::{enumerate_dual, rep_eval, DualIndex, GroupId, GroupPoint, RepMatrix};
pub use error::{Error, Result};
pub use fourier::{
    forward, inverse, plancherel_norm, sobolev_partial_norm, weyl_partial_sum, FourierCoefficients,
    GridFunction,
};
pub use quadrature::{build_grid, integrate, QuadratureGrid};
pub use symbols::{apply_multiplier, builtin_symbol, compose, extract_symbol, InvariantSymbol, OperatorSpec};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix used for coefficients, symbols, and representations.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
