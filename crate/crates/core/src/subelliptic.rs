//! Symbol lower bounds implied by a subelliptic a-priori estimate.
//!
//! Given constants `C > 0`, `r >= 1` of an estimate
//! `||u||_{H^{2/r}} <= C (||L u||_{L^2} + ||u||_{L^2})`, plugging in the
//! unit-mass coefficient at a single frequency forces
//! `lambda_min[sigma_L(xi)] >= sqrt(<xi>^{2/r} / C - 1)` wherever the
//! radicand is nonnegative. The estimate itself is an input; this module
//! only propagates it to a per-frequency bound.

use serde::{Deserialize, Serialize};

use crate::dual::DualIndex;
use crate::error::Result;

/// Per-frequency lower bound derived from the estimate constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubellipticBound {
    pub xi_display: String,
    pub eig: f64,
    /// `sqrt(<xi>^{2/r} / C - 1)`, or `None` below the crossover
    /// `<xi>^{2/r} < C` where the estimate gives no information.
    pub bound: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubellipticBoundResult {
    pub c: f64,
    pub r: f64,
    pub bounds: Vec<SubellipticBound>,
}

/// Evaluate the derived bound on a list of dual points.
pub fn bound_from_estimate(c: f64, r: f64, duals: &[DualIndex]) -> Result<SubellipticBoundResult> {
    if !(c > 0.0) {
        return Err(crate::Error::InvalidSpec("estimate constant C must be positive".into()));
    }
    if !(r >= 1.0) {
        return Err(crate::Error::InvalidSpec("estimate order r must be >= 1".into()));
    }
    let bounds = duals
        .iter()
        .map(|xi| {
            let eig = xi.eigenvalue();
            // <xi>^{2/r} = (1 + nu)^{1/r}; the r = 1 case stays exact
            let power = if r == 1.0 { 1.0 + xi.nu() } else { (1.0 + xi.nu()).powf(1.0 / r) };
            let radicand = power / c - 1.0;
            SubellipticBound {
                xi_display: xi.to_string(),
                eig,
                bound: (radicand >= 0.0).then(|| radicand.sqrt()),
            }
        })
        .collect();
    Ok(SubellipticBoundResult { c, r, bounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::profile_group;
    use crate::dual::{enumerate_dual, GroupId};
    use crate::symbols::su2_sublaplacian_model;
    use approx::assert_relative_eq;

    #[test]
    fn direct_substitution() {
        // C = 1, r = 1, <xi> = sqrt(3) gives sqrt(3 - 1)
        let xi = DualIndex::su2(2);
        let res = bound_from_estimate(1.0, 1.0, &[xi]).unwrap();
        assert_relative_eq!(res.bounds[0].bound.unwrap(), 2.0f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn boundary_and_undefined_entries() {
        // at <xi>^2 = C the bound is exactly zero
        let xi = DualIndex::su2(2); // <xi>^2 = 3
        let res = bound_from_estimate(3.0, 1.0, &[xi.clone()]).unwrap();
        assert_eq!(res.bounds[0].bound, Some(0.0));
        // below the crossover the entry is flagged undefined
        let res = bound_from_estimate(4.0, 1.0, &[DualIndex::su2(0), xi]).unwrap();
        assert_eq!(res.bounds[0].bound, None);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(bound_from_estimate(0.0, 1.0, &[]).is_err());
        assert!(bound_from_estimate(1.0, 0.5, &[]).is_err());
    }

    #[test]
    fn model_profile_dominates_the_derived_bound() {
        // with kappa = r and C >= 1 the model's lambda_min = <xi>^{1/kappa}
        // sits above sqrt(<xi>^{2/r}/C - 1) everywhere past the crossover
        for (c, r) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (2.0, 3.0)] {
            let cutoff = DualIndex::su2(80).eigenvalue();
            let duals = enumerate_dual(GroupId::Su2, cutoff);
            let profile = profile_group(&su2_sublaplacian_model(r), cutoff).unwrap();
            let bounds = bound_from_estimate(c, r, &duals).unwrap();
            let threshold = (2.0 * c).powf(r / 2.0);
            for (entry, b) in profile.entries.iter().zip(&bounds.bounds) {
                if entry.eig < threshold {
                    continue;
                }
                let bound = b.bound.expect("defined past the crossover");
                assert!(
                    entry.value >= bound - 1e-12,
                    "C={c} r={r} xi={}: {} < {}",
                    entry.xi,
                    entry.value,
                    bound
                );
            }
        }
    }
}
