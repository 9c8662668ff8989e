//! Homogeneous-space machinery for the sphere `S^2 = SU(2)/T^1` and the
//! block-symbol data model for operators between homogeneous vector
//! bundles.
//!
//! Sections of a bundle with fiber dimension `d_tau` are handled through
//! their equivariant lifts: tuples of scalar functions on the group, one
//! per fiber basis vector. An operator into a bundle with fiber dimension
//! `d_omega` then carries a block symbol `sigma(i, r, xi)`, an
//! `d_xi x d_xi` matrix per block index, and its hypoellipticity
//! diagnostics go through the smallest singular value `m_xi` of the
//! stacked block matrix.
//!
//! The subgroup is always the `psi`-circle of the Euler coordinates; its
//! averaging operator kills every half-integer spin and, at integer spin,
//! everything except the zero-weight column.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dual::{DualIndex, GroupId};
use crate::error::{Error, Result};
use crate::fourier::GridFunction;
use crate::linalg::{lambda_min, rows_to_mat, mat_to_rows};
use crate::quadrature::{GridShape, QuadratureGrid};
use crate::symbols::{parse_group, parse_xi, xi_to_json, InvariantSymbol};
use crate::{C64, CMat};

/// Sampling grid on the sphere: the `(phi, theta)` marginal of an SU(2)
/// tensor grid, with the `psi` factor integrated out.
#[derive(Clone, Debug)]
pub struct S2Grid {
    /// `(phi, theta)` per node, phi-major order.
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    pub n_phi: usize,
    pub thetas: Vec<f64>,
    pub band_limit: f64,
}

impl S2Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The sphere marginal of an SU(2) grid.
    pub fn from_su2_grid(grid: &QuadratureGrid) -> Result<Self> {
        match &grid.shape {
            GridShape::Su2 { n_phi, thetas, theta_weights, .. } => {
                let mut nodes = Vec::with_capacity(n_phi * thetas.len());
                let mut weights = Vec::with_capacity(nodes.capacity());
                for i in 0..*n_phi {
                    let phi = 2.0 * std::f64::consts::PI * i as f64 / *n_phi as f64;
                    for (j, &theta) in thetas.iter().enumerate() {
                        nodes.push((phi, theta));
                        weights.push(theta_weights[j] / *n_phi as f64);
                    }
                }
                Ok(S2Grid {
                    nodes,
                    weights,
                    n_phi: *n_phi,
                    thetas: thetas.clone(),
                    band_limit: grid.band_limit,
                })
            }
            GridShape::Torus { .. } => Err(Error::NonFactorizingGrid),
        }
    }
}

/// Scalar samples on an [`S2Grid`].
#[derive(Clone, Debug)]
pub struct S2Function {
    pub grid: Arc<S2Grid>,
    pub values: Vec<C64>,
}

impl S2Function {
    pub fn from_fn<F: Fn(f64, f64) -> C64>(grid: Arc<S2Grid>, f: F) -> Self {
        let values = grid.nodes.iter().map(|&(phi, theta)| f(phi, theta)).collect();
        S2Function { grid, values }
    }
}

/// Average a function on SU(2) over the subgroup circle, landing on the
/// sphere: `(P f)(phi, theta) = mean over psi of f(phi, theta, psi)`.
pub fn project_pm(f: &GridFunction) -> Result<S2Function> {
    if f.fiber_dim != 1 {
        return Err(Error::Unsupported("scalar samples expected".into()));
    }
    let (n_phi, n_theta, n_psi) = match &f.grid.shape {
        GridShape::Su2 { n_phi, thetas, n_psi, .. } => (*n_phi, thetas.len(), *n_psi),
        GridShape::Torus { .. } => return Err(Error::NonFactorizingGrid),
    };
    let s2 = Arc::new(S2Grid::from_su2_grid(&f.grid)?);
    let mut values = Vec::with_capacity(n_phi * n_theta);
    for i in 0..n_phi {
        for j in 0..n_theta {
            let base = (i * n_theta + j) * n_psi;
            let terms: Vec<C64> = (0..n_psi).map(|k| f.values[base + k]).collect();
            values.push(crate::linalg::pairwise_sum_c64(&terms) / C64::new(n_psi as f64, 0.0));
        }
    }
    Ok(S2Function { grid: s2, values })
}

/// Lift a sphere function to the group, constant along `psi`. The target
/// grid must have the matching `(phi, theta)` marginal.
pub fn lift(f: &S2Function, target: &Arc<QuadratureGrid>) -> Result<GridFunction> {
    let (n_phi, thetas, n_psi) = match &target.shape {
        GridShape::Su2 { n_phi, thetas, n_psi, .. } => (*n_phi, thetas, *n_psi),
        GridShape::Torus { .. } => return Err(Error::NonFactorizingGrid),
    };
    if f.grid.n_phi != n_phi || f.grid.thetas.len() != thetas.len() {
        return Err(Error::GridMismatch(format!(
            "sphere grid is {}x{}, target marginal is {}x{}",
            f.grid.n_phi,
            f.grid.thetas.len(),
            n_phi,
            thetas.len()
        )));
    }
    for (a, b) in f.grid.thetas.iter().zip(thetas) {
        if (a - b).abs() > 1e-12 {
            return Err(Error::GridMismatch("theta nodes differ".into()));
        }
    }
    let n_theta = thetas.len();
    let mut values = Vec::with_capacity(target.len());
    for i in 0..n_phi {
        for j in 0..n_theta {
            let v = f.values[i * n_theta + j];
            for _ in 0..n_psi {
                values.push(v);
            }
        }
    }
    GridFunction::from_values(target.clone(), values)
}

/// The dual of the sphere: integer spins up to the cutoff, each carrying
/// one invariant column (`d_xi^K = 1`).
pub fn dual_of_m(cutoff: f64) -> Vec<(DualIndex, usize)> {
    assert!(cutoff >= 1.0);
    let mut out = Vec::new();
    let mut ell = 0u32;
    loop {
        let xi = DualIndex::su2(2 * ell);
        if xi.eigenvalue() > cutoff + 1e-12 {
            break;
        }
        out.push((xi, 1));
        ell += 1;
    }
    out
}

/// Column indices of `xi` that survive subgroup averaging: the zero-weight
/// column at integer spin, nothing at half-integer spin.
pub fn invariant_columns(xi: &DualIndex) -> Result<Vec<usize>> {
    match xi {
        DualIndex::Su2 { two_ell } => {
            if two_ell % 2 == 0 {
                Ok(vec![*two_ell as usize / 2])
            } else {
                Ok(vec![])
            }
        }
        DualIndex::Torus(_) => Err(Error::GroupMismatch {
            expected: GroupId::Su2.to_string(),
            got: xi.group().to_string(),
        }),
    }
}

/// Numeric cross-check of [`invariant_columns`]: averages each coefficient
/// function over the subgroup circle on a grid and keeps columns whose
/// averaged entries have norm above `1e-9`.
pub fn detect_invariant_columns(xi: &DualIndex, grid: &Arc<QuadratureGrid>) -> Result<Vec<usize>> {
    let d = xi.dim();
    let mut cols = Vec::new();
    for n in 0..d {
        let mut col_norm = 0.0f64;
        for m in 0..d {
            let f = GridFunction::from_fn(grid.clone(), |x| {
                crate::dual::rep_eval(xi, x).expect("valid node").entries[(m, n)]
            });
            let averaged = project_pm(&f)?;
            let norm_sq: f64 = averaged
                .values
                .iter()
                .zip(&averaged.grid.weights)
                .map(|(v, w)| v.norm_sqr() * w)
                .sum();
            col_norm = col_norm.max(norm_sq.sqrt());
        }
        if col_norm > 1e-9 {
            cols.push(n);
        }
    }
    Ok(cols)
}

/// Block symbol of an operator between homogeneous vector bundles with
/// fiber dimensions `d_tau` (source) and `d_omega` (target).
///
/// `support`, when present, declares the dual points actually carrying
/// Fourier content of sections; `None` means unrestricted.
#[derive(Clone)]
pub struct BundleSymbol {
    pub group: GroupId,
    pub d_tau: usize,
    pub d_omega: usize,
    pub name: String,
    pub support: Option<BTreeSet<DualIndex>>,
    rule: BundleRule,
}

#[derive(Clone)]
enum BundleRule {
    Explicit(Arc<BTreeMap<(usize, usize, DualIndex), CMat>>),
    Scalar(Arc<InvariantSymbol>),
    Custom(Arc<dyn Fn(usize, usize, &DualIndex) -> Result<CMat> + Send + Sync>),
}

impl std::fmt::Debug for BundleSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BundleSymbol")
            .field("group", &self.group)
            .field("d_tau", &self.d_tau)
            .field("d_omega", &self.d_omega)
            .field("name", &self.name)
            .finish()
    }
}

impl BundleSymbol {
    /// Wrap a scalar invariant symbol as the `d_tau = d_omega = 1` case.
    pub fn from_invariant(sym: InvariantSymbol) -> Self {
        BundleSymbol {
            group: sym.group,
            d_tau: 1,
            d_omega: 1,
            name: sym.name.clone(),
            support: None,
            rule: BundleRule::Scalar(Arc::new(sym)),
        }
    }

    /// Explicit per-block matrices; missing blocks evaluate to zero.
    pub fn from_blocks(
        group: GroupId,
        d_tau: usize,
        d_omega: usize,
        name: impl Into<String>,
        blocks: BTreeMap<(usize, usize, DualIndex), CMat>,
        support: Option<BTreeSet<DualIndex>>,
    ) -> Result<Self> {
        if d_tau == 0 || d_omega == 0 {
            return Err(Error::InvalidSpec("fiber dimensions must be positive".into()));
        }
        for ((i, r, xi), m) in &blocks {
            if *i >= d_tau || *r >= d_omega {
                return Err(Error::InvalidSpec(format!(
                    "block index (i={i}, r={r}) outside fibers {d_tau}x{d_omega}"
                )));
            }
            let d = xi.dim();
            if xi.group() != group {
                return Err(Error::GroupMismatch {
                    expected: group.to_string(),
                    got: xi.group().to_string(),
                });
            }
            if m.shape() != (d, d) {
                return Err(Error::ShapeMismatch(format!(
                    "block at {xi} must be {d}x{d}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(BundleSymbol {
            group,
            d_tau,
            d_omega,
            name: name.into(),
            support,
            rule: BundleRule::Explicit(Arc::new(blocks)),
        })
    }

    pub fn from_rule<F>(
        group: GroupId,
        d_tau: usize,
        d_omega: usize,
        name: impl Into<String>,
        f: F,
    ) -> Self
    where
        F: Fn(usize, usize, &DualIndex) -> Result<CMat> + Send + Sync + 'static,
    {
        BundleSymbol {
            group,
            d_tau,
            d_omega,
            name: name.into(),
            support: None,
            rule: BundleRule::Custom(Arc::new(f)),
        }
    }

    pub fn in_support(&self, xi: &DualIndex) -> bool {
        self.support.as_ref().map_or(true, |s| s.contains(xi))
    }

    /// Evaluate the block `sigma(i, r, xi)`; `i`, `r` are 0-based.
    pub fn eval(&self, i: usize, r: usize, xi: &DualIndex) -> Result<CMat> {
        if i >= self.d_tau || r >= self.d_omega {
            return Err(Error::ShapeMismatch(format!(
                "block index (i={i}, r={r}) outside fibers {}x{}",
                self.d_tau, self.d_omega
            )));
        }
        if xi.group() != self.group {
            return Err(Error::GroupMismatch {
                expected: self.group.to_string(),
                got: xi.group().to_string(),
            });
        }
        let d = xi.dim();
        match &self.rule {
            BundleRule::Explicit(map) => Ok(map
                .get(&(i, r, xi.clone()))
                .cloned()
                .unwrap_or_else(|| CMat::zeros(d, d))),
            BundleRule::Scalar(sym) => sym.eval(xi),
            BundleRule::Custom(f) => {
                let m = f(i, r, xi)?;
                if m.shape() != (d, d) {
                    return Err(Error::ShapeMismatch(format!(
                        "bundle rule returned {}x{} at {xi}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                Ok(m)
            }
        }
    }

    /// The stacked block matrix `M` with block `(r, i)` equal to
    /// `sigma(i, r, xi)`, of shape `(d_omega d_xi) x (d_tau d_xi)`.
    pub fn stacked_matrix(&self, xi: &DualIndex) -> Result<CMat> {
        let d = xi.dim();
        let mut m = CMat::zeros(self.d_omega * d, self.d_tau * d);
        for r in 0..self.d_omega {
            for i in 0..self.d_tau {
                let block = self.eval(i, r, xi)?;
                m.view_mut((r * d, i * d), (d, d)).copy_from(&block);
            }
        }
        Ok(m)
    }
}

/// The bundle analogue of the smallest singular value: the minimum of
/// `sqrt(sum_r ||sum_i sigma(i,r,xi) v(i)||^2)` over stacked unit vectors,
/// computed as the smallest singular value of the stacked block matrix.
pub fn m_xi(sym: &BundleSymbol, xi: &DualIndex) -> Result<f64> {
    if !sym.in_support(xi) {
        return Err(Error::OutsideSupport(xi.to_string()));
    }
    Ok(lambda_min(&sym.stacked_matrix(xi)?))
}

/// Restriction of a lifted-operator symbol on SU(2) to the invariant
/// columns: the `d_xi x d_k` matrix whose columns are the subgroup-fixed
/// weight columns, ordered first. For the sphere this is the single
/// zero-weight (middle) column.
pub fn homogeneous_block(sym: &InvariantSymbol, xi: &DualIndex, d_k: usize) -> Result<CMat> {
    if sym.group != GroupId::Su2 {
        return Err(Error::GroupMismatch {
            expected: GroupId::Su2.to_string(),
            got: sym.group.to_string(),
        });
    }
    let cols = invariant_columns(xi)?;
    if d_k > cols.len() {
        return Err(Error::ShapeMismatch(format!(
            "requested {d_k} invariant columns at xi = {xi}, only {} available",
            cols.len()
        )));
    }
    let full = sym.eval(xi)?;
    let d = xi.dim();
    let mut out = CMat::zeros(d, d_k);
    for (j, &col) in cols.iter().take(d_k).enumerate() {
        out.column_mut(j).copy_from(&full.column(col));
    }
    Ok(out)
}

/// Serialized bundle symbol.
///
/// Block indices `i`, `r` are 1-based in the file (matching the usual
/// fiber numbering); the in-memory API is 0-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleSpec {
    pub group: String,
    pub d_tau: usize,
    pub d_omega: usize,
    pub blocks: Vec<BundleBlockEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleBlockEntry {
    pub xi: serde_json::Value,
    pub i: usize,
    pub r: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Build a bundle symbol from its serialized description.
pub fn bundle_symbol(spec: &BundleSpec) -> Result<BundleSymbol> {
    let group = parse_group(&spec.group)?;
    let mut blocks = BTreeMap::new();
    for entry in &spec.blocks {
        if entry.i == 0 || entry.r == 0 {
            return Err(Error::InvalidSpec("block indices i, r are 1-based".into()));
        }
        let xi = parse_xi(group, &entry.xi)?;
        let m = rows_to_mat(&entry.matrix)?;
        blocks.insert((entry.i - 1, entry.r - 1, xi), m);
    }
    let support = match &spec.support {
        None => None,
        Some(list) => {
            let mut set = BTreeSet::new();
            for v in list {
                set.insert(parse_xi(group, v)?);
            }
            Some(set)
        }
    };
    BundleSymbol::from_blocks(
        group,
        spec.d_tau,
        spec.d_omega,
        spec.name.clone().unwrap_or_else(|| "bundle".into()),
        blocks,
        support,
    )
}

/// Serialize explicit blocks back to a [`BundleSpec`].
pub fn bundle_spec_of(sym: &BundleSymbol, duals: &[DualIndex]) -> Result<BundleSpec> {
    let mut blocks = Vec::new();
    for xi in duals {
        for i in 0..sym.d_tau {
            for r in 0..sym.d_omega {
                let m = sym.eval(i, r, xi)?;
                blocks.push(BundleBlockEntry {
                    xi: xi_to_json(xi),
                    i: i + 1,
                    r: r + 1,
                    matrix: mat_to_rows(&m),
                });
            }
        }
    }
    Ok(BundleSpec {
        group: sym.group.to_string(),
        d_tau: sym.d_tau,
        d_omega: sym.d_omega,
        blocks,
        support: sym
            .support
            .as_ref()
            .map(|s| s.iter().map(xi_to_json).collect()),
        name: Some(sym.name.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::rep_eval;
    use crate::fourier::forward;
    use crate::linalg::hs_norm;
    use crate::quadrature::build_grid;
    use crate::symbols::{neutral_plus_c, s2_laplacian_lift};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn su2_grid(two_ell_max: u32) -> Arc<QuadratureGrid> {
        Arc::new(build_grid(
            GroupId::Su2,
            DualIndex::su2(two_ell_max).eigenvalue() + 1e-9,
        ))
    }

    #[test]
    fn projection_of_constant_is_constant() {
        let grid = su2_grid(2);
        let f = GridFunction::from_fn(grid, |_| C64::new(1.0, 0.0));
        let p = project_pm(&f).unwrap();
        for v in &p.values {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-14);
        }
        let total: f64 = p.grid.weights.iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_kills_half_integer_spins() {
        let grid = su2_grid(3);
        let xi = DualIndex::su2(1);
        for m in 0..2 {
            for n in 0..2 {
                let f = GridFunction::from_fn(grid.clone(), |x| {
                    rep_eval(&xi, x).unwrap().entries[(m, n)]
                });
                let p = project_pm(&f).unwrap();
                let worst = p.values.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
                assert!(worst < 1e-12, "t^(1/2)_{m}{n} survived: {worst:.3e}");
            }
        }
    }

    #[test]
    fn zero_weight_column_is_psi_independent() {
        let grid = su2_grid(2);
        let xi = DualIndex::su2(2);
        for m in 0..3 {
            let f = GridFunction::from_fn(grid.clone(), |x| {
                rep_eval(&xi, x).unwrap().entries[(m, 1)]
            });
            let p = project_pm(&f).unwrap();
            let back = lift(&p, &grid).unwrap();
            let worst = f
                .values
                .iter()
                .zip(&back.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-10, "column 0 entry changed by {worst:.3e}");
        }
    }

    #[test]
    fn project_after_lift_is_identity() {
        let grid = su2_grid(2);
        let s2 = Arc::new(S2Grid::from_su2_grid(&grid).unwrap());
        let f = S2Function::from_fn(s2, |phi, theta| {
            C64::new(theta.cos() + 0.3 * phi.sin(), phi.cos())
        });
        let lifted = lift(&f, &grid).unwrap();
        let back = project_pm(&lifted).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-12);
        }
        // lift . project is the psi-averaging, idempotent
        let averaged = lift(&back, &grid).unwrap();
        let twice = lift(&project_pm(&averaged).unwrap(), &grid).unwrap();
        for (a, b) in averaged.values.iter().zip(&twice.values) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn lift_of_y10_has_single_middle_entry() {
        let grid = su2_grid(4);
        let s2 = Arc::new(S2Grid::from_su2_grid(&grid).unwrap());
        // Y_10 up to normalization is cos(theta)
        let f = S2Function::from_fn(s2, |_, theta| C64::new(theta.cos(), 0.0));
        let lifted = lift(&f, &grid).unwrap();
        let duals = crate::dual::enumerate_dual(GroupId::Su2, grid.band_limit);
        let coeffs = forward(&lifted, &duals).unwrap();
        for xi in &duals {
            let m = coeffs.get(xi).unwrap();
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    let expect = if *xi == DualIndex::su2(2) && (a, b) == (1, 1) {
                        1.0 / 3.0
                    } else {
                        0.0
                    };
                    assert!(
                        (m[(a, b)] - C64::new(expect, 0.0)).norm() < 1e-12,
                        "{xi} entry ({a},{b}) = {}",
                        m[(a, b)]
                    );
                }
            }
        }
    }

    #[test]
    fn dual_of_m_integer_spins_only() {
        let d = dual_of_m(2.0);
        assert_eq!(d, vec![(DualIndex::su2(0), 1), (DualIndex::su2(2), 1)]);
        for (xi, dk) in dual_of_m(9.0) {
            assert_eq!(dk, 1);
            match xi {
                DualIndex::Su2 { two_ell } => assert_eq!(two_ell % 2, 0),
                _ => panic!(),
            }
        }
    }

    #[test]
    fn numeric_invariant_detection_matches_analytic() {
        let grid = su2_grid(6);
        for two_ell in 0..=6u32 {
            let xi = DualIndex::su2(two_ell);
            let detected = detect_invariant_columns(&xi, &grid).unwrap();
            assert_eq!(detected, invariant_columns(&xi).unwrap(), "l = {xi}");
        }
    }

    #[test]
    fn m_xi_reduces_to_lambda_min() {
        let sym = BundleSymbol::from_invariant(neutral_plus_c(C64::new(0.25, 0.0)));
        for two_ell in 0..=5u32 {
            let xi = DualIndex::su2(two_ell);
            let got = m_xi(&sym, &xi).unwrap();
            let expect = lambda_min(&neutral_plus_c(C64::new(0.25, 0.0)).eval(&xi).unwrap());
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn m_xi_sees_the_kernel_of_a_zero_block() {
        // d_tau = 2, d_omega = 1, blocks [I, 0]: minimizing over the second
        // fiber slot gives zero
        let xi = DualIndex::su2(2);
        let d = xi.dim();
        let mut blocks = BTreeMap::new();
        blocks.insert((0usize, 0usize, xi.clone()), CMat::identity(d, d));
        blocks.insert((1usize, 0usize, xi.clone()), CMat::zeros(d, d));
        let sym =
            BundleSymbol::from_blocks(GroupId::Su2, 2, 1, "kernel", blocks, None).unwrap();
        assert_eq!(m_xi(&sym, &xi).unwrap(), 0.0);
    }

    #[test]
    fn m_xi_matches_both_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let xi3 = DualIndex::su2(2);
        for _ in 0..10 {
            // d_tau = 1, d_omega = 2: two stacked 3x3 blocks
            let sym = BundleSymbol::from_rule(GroupId::Su2, 1, 2, "rand", {
                let seeds: Vec<CMat> = (0..2)
                    .map(|_| {
                        CMat::from_fn(3, 3, |_, _| {
                            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        })
                    })
                    .collect();
                move |_i, r, xi| {
                    let d = xi.dim();
                    if d != 3 {
                        return Ok(CMat::zeros(d, d));
                    }
                    Ok(seeds[r].clone())
                }
            });
            let got = m_xi(&sym, &xi3).unwrap();
            let stacked = sym.stacked_matrix(&xi3).unwrap();
            let eig_oracle = crate::oracle::min_singular_by_eigen(&stacked);
            assert!((got - eig_oracle).abs() < 1e-10);
            // the sampled minimum is an upper bound the true value never exceeds
            let mut rng2 = ChaCha8Rng::seed_from_u64(99);
            let sampled = crate::oracle::sampled_min_direction(&stacked, 2000, &mut rng2);
            assert!(got <= sampled + 1e-12);
        }
    }

    #[test]
    fn m_xi_invariant_under_fiber_basis_change() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let xi = DualIndex::su2(2);
        let d = xi.dim();
        let (d_tau, d_omega) = (2usize, 2usize);
        let mut blocks = BTreeMap::new();
        for i in 0..d_tau {
            for r in 0..d_omega {
                blocks.insert(
                    (i, r, xi.clone()),
                    CMat::from_fn(d, d, |_, _| {
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    }),
                );
            }
        }
        let sym = BundleSymbol::from_blocks(GroupId::Su2, d_tau, d_omega, "rand", blocks.clone(), None)
            .unwrap();

        // random unitaries from QR
        let qr_unitary = |rng: &mut ChaCha8Rng, n: usize| {
            let g = CMat::from_fn(n, n, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            g.qr().q()
        };
        let u_e = qr_unitary(&mut rng, d_tau);
        let u_f = qr_unitary(&mut rng, d_omega);
        let mut conj_blocks = BTreeMap::new();
        for i in 0..d_tau {
            for r in 0..d_omega {
                let mut acc = CMat::zeros(d, d);
                for ip in 0..d_tau {
                    for rp in 0..d_omega {
                        acc += blocks.get(&(ip, rp, xi.clone())).unwrap()
                            * (u_f[(r, rp)] * u_e[(i, ip)].conj());
                    }
                }
                conj_blocks.insert((i, r, xi.clone()), acc);
            }
        }
        let conj =
            BundleSymbol::from_blocks(GroupId::Su2, d_tau, d_omega, "conj", conj_blocks, None)
                .unwrap();
        let a = m_xi(&sym, &xi).unwrap();
        let b = m_xi(&conj, &xi).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        // and bounded by the largest singular value of the stack
        let stacked = sym.stacked_matrix(&xi).unwrap();
        let svd = stacked.clone().svd(false, false);
        let top = svd.singular_values.iter().fold(0.0f64, |acc, &s| acc.max(s));
        assert!(a >= 0.0 && a <= top + 1e-12);
    }

    #[test]
    fn m_xi_respects_declared_support() {
        let mut support = BTreeSet::new();
        support.insert(DualIndex::su2(2));
        let sym = BundleSymbol {
            support: Some(support),
            ..BundleSymbol::from_invariant(neutral_plus_c(C64::new(0.0, 0.0)))
        };
        assert!(m_xi(&sym, &DualIndex::su2(2)).is_ok());
        assert!(matches!(
            m_xi(&sym, &DualIndex::su2(4)),
            Err(Error::OutsideSupport(_))
        ));
    }

    #[test]
    fn homogeneous_block_of_the_sphere_laplacian() {
        let sym = s2_laplacian_lift();
        let b = homogeneous_block(&sym, &DualIndex::su2(4), 1).unwrap();
        assert_eq!(b.shape(), (5, 1));
        for i in 0..5 {
            let expect = if i == 2 { 6.0 } else { 0.0 };
            assert_eq!(b[(i, 0)], C64::new(expect, 0.0));
        }
        assert_eq!(lambda_min(&b), 6.0);
        // l = 0: the single exceptional frequency
        let b0 = homogeneous_block(&sym, &DualIndex::su2(0), 1).unwrap();
        assert_eq!(lambda_min(&b0), 0.0);
        // identity symbol: the middle basis column, norm exactly 1
        let id = InvariantSymbol::identity(GroupId::Su2);
        let bi = homogeneous_block(&id, &DualIndex::su2(6), 1).unwrap();
        assert_eq!(lambda_min(&bi), 1.0);
    }

    #[test]
    fn homogeneous_block_rejects_half_integers_and_overwide_requests() {
        let sym = s2_laplacian_lift();
        assert!(homogeneous_block(&sym, &DualIndex::su2(3), 1).is_err());
        assert!(homogeneous_block(&sym, &DualIndex::su2(4), 2).is_err());
    }

    #[test]
    fn bundle_spec_round_trip() {
        let xi = DualIndex::su2(1);
        let mut blocks = BTreeMap::new();
        blocks.insert((0usize, 0usize, xi.clone()), CMat::identity(2, 2));
        blocks.insert(
            (0usize, 1usize, xi.clone()),
            CMat::from_fn(2, 2, |i, j| C64::new((i + j) as f64, 1.0)),
        );
        let mut support = BTreeSet::new();
        support.insert(xi.clone());
        let sym = BundleSymbol::from_blocks(GroupId::Su2, 1, 2, "rt", blocks, Some(support))
            .unwrap();
        let spec = bundle_spec_of(&sym, &[xi.clone()]).unwrap();
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back: BundleSpec = serde_json::from_str(&text).unwrap();
        let sym2 = bundle_symbol(&back).unwrap();
        assert_eq!(sym2.d_tau, 1);
        assert_eq!(sym2.d_omega, 2);
        for r in 0..2 {
            assert_eq!(
                hs_norm(&(sym.eval(0, r, &xi).unwrap() - sym2.eval(0, r, &xi).unwrap())),
                0.0
            );
        }
        assert!(!sym2.in_support(&DualIndex::su2(2)));
    }
}
