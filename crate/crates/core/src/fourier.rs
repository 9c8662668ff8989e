//! Forward/inverse group Fourier transform, Plancherel and Sobolev norms,
//! and Weyl partial sums.
//!
//! The forward transform of `f` is the matrix `fhat(xi) = sum_j w_j f(x_j)
//! xi(x_j)*` over a quadrature grid; inversion is the Peter-Weyl sum
//! `f(x) = sum_xi d_xi Tr(xi(x) fhat(xi))`. Both are exact on band-limited
//! data. Distribution-like data never touches a grid: it lives purely as
//! coefficient maps, possibly generated by a rule per dual point.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::Rng;

use crate::dual::{enumerate_dual, rep_eval, DualIndex, GroupId, GroupPoint};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, pairwise_sum_c64, pairwise_sum_f64, pairwise_sum_mat};
use crate::quadrature::QuadratureGrid;
use crate::{C64, CMat};

/// Samples of a function on a quadrature grid. `fiber_dim = 1` is the
/// scalar case; larger fibers hold vector-valued samples row-major as
/// `values[node * fiber_dim + component]`.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: Arc<QuadratureGrid>,
    pub values: Vec<C64>,
    pub fiber_dim: usize,
}

impl GridFunction {
    pub fn from_values(grid: Arc<QuadratureGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        Ok(GridFunction { grid, values, fiber_dim: 1 })
    }

    pub fn from_fn<F: Fn(&GroupPoint) -> C64>(grid: Arc<QuadratureGrid>, f: F) -> Self {
        let values = grid.nodes.iter().map(f).collect();
        GridFunction { grid, values, fiber_dim: 1 }
    }

    pub fn from_vector_values(
        grid: Arc<QuadratureGrid>,
        values: Vec<C64>,
        fiber_dim: usize,
    ) -> Result<Self> {
        if fiber_dim == 0 || values.len() != grid.len() * fiber_dim {
            return Err(Error::LengthMismatch {
                expected: grid.len() * fiber_dim.max(1),
                got: values.len(),
            });
        }
        Ok(GridFunction { grid, values, fiber_dim })
    }

    pub fn value(&self, node: usize, component: usize) -> C64 {
        self.values[node * self.fiber_dim + component]
    }

    /// `L^2(G)` norm of the samples (all fiber components combined).
    pub fn l2_norm(&self) -> f64 {
        let terms: Vec<f64> = (0..self.grid.len())
            .map(|j| {
                let w = self.grid.weights[j];
                (0..self.fiber_dim).map(|i| self.value(j, i).norm_sqr()).sum::<f64>() * w
            })
            .collect();
        pairwise_sum_f64(&terms).sqrt()
    }
}

/// Matrix-valued Fourier coefficients, one `d_xi x d_xi` block per dual
/// point; absent keys are zero. `fiber_index` tags the component of
/// vector-valued data (1-based, matching the basis of the fiber).
#[derive(Clone, Debug, Default)]
pub struct FourierCoefficients {
    pub group: Option<GroupId>,
    pub coeffs: BTreeMap<DualIndex, CMat>,
    pub fiber_index: Option<usize>,
}

impl FourierCoefficients {
    pub fn new(group: GroupId) -> Self {
        FourierCoefficients { group: Some(group), coeffs: BTreeMap::new(), fiber_index: None }
    }

    pub fn insert(&mut self, xi: DualIndex, m: CMat) -> Result<()> {
        let d = xi.dim();
        if m.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "coefficient at {xi} must be {d}x{d}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some(g) = self.group {
            if g != xi.group() {
                return Err(Error::GroupMismatch {
                    expected: g.to_string(),
                    got: xi.group().to_string(),
                });
            }
        } else {
            self.group = Some(xi.group());
        }
        self.coeffs.insert(xi, m);
        Ok(())
    }

    pub fn get(&self, xi: &DualIndex) -> Option<&CMat> {
        self.coeffs.get(xi)
    }
}

/// Forward transform of scalar samples against the listed dual points.
///
/// Errors if any requested `<xi>` exceeds the grid band limit: silent
/// aliasing is not an option here.
pub fn forward(f: &GridFunction, duals: &[DualIndex]) -> Result<FourierCoefficients> {
    if f.fiber_dim != 1 {
        return Err(Error::Unsupported(
            "forward expects scalar samples; use forward_component for fibers".into(),
        ));
    }
    forward_impl(f, 0, duals)
}

/// Forward transform of one fiber component (`component` is 0-based; the
/// resulting coefficients carry the 1-based fiber index).
pub fn forward_component(
    f: &GridFunction,
    component: usize,
    duals: &[DualIndex],
) -> Result<FourierCoefficients> {
    if component >= f.fiber_dim {
        return Err(Error::LengthMismatch { expected: f.fiber_dim, got: component });
    }
    let mut out = forward_impl(f, component, duals)?;
    out.fiber_index = Some(component + 1);
    Ok(out)
}

fn forward_impl(
    f: &GridFunction,
    component: usize,
    duals: &[DualIndex],
) -> Result<FourierCoefficients> {
    let grid = &f.grid;
    let mut out = FourierCoefficients::new(grid.group);
    for xi in duals {
        if xi.group() != grid.group {
            return Err(Error::GroupMismatch {
                expected: grid.group.to_string(),
                got: xi.group().to_string(),
            });
        }
        if xi.eigenvalue() > grid.band_limit + 1e-9 {
            return Err(Error::BandLimitExceeded {
                band_limit: grid.band_limit,
                requested: xi.eigenvalue(),
            });
        }
        let reps = grid.rep_table(xi)?;
        let coeff = pairwise_sum_mat(grid.len(), &|j| {
            reps[j].adjoint() * (f.value(j, component) * C64::new(grid.weights[j], 0.0))
        });
        out.coeffs.insert(xi.clone(), coeff);
    }
    Ok(out)
}

fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Peter-Weyl inversion `sum_xi d_xi Tr(xi(x) fhat(xi))` at a point.
pub fn inverse(coeffs: &FourierCoefficients, x: &GroupPoint) -> Result<C64> {
    let mut terms = Vec::with_capacity(coeffs.coeffs.len());
    for (xi, m) in &coeffs.coeffs {
        let rep = rep_eval(xi, x)?;
        terms.push(trace_product(&rep.entries, m) * C64::new(xi.dim() as f64, 0.0));
    }
    Ok(pairwise_sum_c64(&terms))
}

/// Evaluate the inversion on every node of a grid (cached representation
/// tables make this much cheaper than per-point inversion).
pub fn synthesize(coeffs: &FourierCoefficients, grid: &Arc<QuadratureGrid>) -> Result<GridFunction> {
    let mut per_xi: Vec<Vec<C64>> = Vec::with_capacity(coeffs.coeffs.len());
    for (xi, m) in &coeffs.coeffs {
        if let Some(g) = coeffs.group {
            if g != grid.group {
                return Err(Error::GroupMismatch {
                    expected: grid.group.to_string(),
                    got: g.to_string(),
                });
            }
        }
        let reps = grid.rep_table(xi)?;
        let d = C64::new(xi.dim() as f64, 0.0);
        per_xi.push((0..grid.len()).map(|j| trace_product(&reps[j], m) * d).collect());
    }
    let values: Vec<C64> = (0..grid.len())
        .map(|j| {
            let terms: Vec<C64> = per_xi.iter().map(|v| v[j]).collect();
            pairwise_sum_c64(&terms)
        })
        .collect();
    GridFunction::from_values(grid.clone(), values)
}

/// Fourier-side `L^2` norm `sqrt(sum_xi d_xi ||fhat(xi)||_HS^2)`.
pub fn plancherel_norm(coeffs: &FourierCoefficients) -> f64 {
    let terms: Vec<f64> = coeffs
        .coeffs
        .iter()
        .map(|(xi, m)| xi.dim() as f64 * hs_norm(m).powi(2))
        .collect();
    pairwise_sum_f64(&terms).sqrt()
}

/// Truncated Sobolev norm
/// `sqrt(sum_{<xi> <= cutoff} d_xi <xi>^{2s} ||fhat(xi)||_HS^2)`.
pub fn sobolev_partial_norm(coeffs: &FourierCoefficients, s: f64, cutoff: f64) -> f64 {
    sobolev_partial_norm_components(std::slice::from_ref(coeffs), s, cutoff)
}

/// Sobolev norm of vector-valued data: the fiber components enter as
/// `sum_i ||fhat(i, xi)||_HS^2` under one weight.
pub fn sobolev_partial_norm_components(
    components: &[FourierCoefficients],
    s: f64,
    cutoff: f64,
) -> f64 {
    let mut keys: Vec<&DualIndex> = components
        .iter()
        .flat_map(|c| c.coeffs.keys())
        .filter(|xi| xi.eigenvalue() <= cutoff + 1e-12)
        .collect();
    keys.sort();
    keys.dedup();
    let terms: Vec<f64> = keys
        .iter()
        .map(|xi| {
            let block: f64 = components
                .iter()
                .filter_map(|c| c.coeffs.get(xi))
                .map(|m| hs_norm(m).powi(2))
                .sum();
            xi.dim() as f64 * xi.eigenvalue().powf(2.0 * s) * block
        })
        .collect();
    pairwise_sum_f64(&terms).sqrt()
}

/// Weyl counting partial sum `sum_{<xi> <= cutoff} d_xi^2 <xi>^{-2t}`;
/// bounded as the cutoff grows iff `t > dim(G)/2`.
pub fn weyl_partial_sum(group: GroupId, t: f64, cutoff: f64) -> f64 {
    let terms: Vec<f64> = enumerate_dual(group, cutoff)
        .iter()
        .map(|xi| (xi.dim() as f64).powi(2) * xi.eigenvalue().powf(-2.0 * t))
        .collect();
    pairwise_sum_f64(&terms)
}

/// Random coefficients supported on the given dual points, entries with
/// independent uniform real and imaginary parts in `[-1, 1)`.
pub fn random_coefficients<R: Rng + ?Sized>(
    duals: &[DualIndex],
    rng: &mut R,
) -> FourierCoefficients {
    let mut out = FourierCoefficients::default();
    for xi in duals {
        let d = xi.dim();
        let m = CMat::from_fn(d, d, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        out.insert(xi.clone(), m).expect("shape correct by construction");
    }
    out
}

/// Write grid samples as CSV. Columns: node coordinates (torus `x1..xd`,
/// SU(2) `phi,theta,psi`) followed by `re,im`. One row per node, in grid
/// node order; scalar functions only.
pub fn export_csv<W: Write>(f: &GridFunction, out: &mut W) -> std::io::Result<()> {
    if f.fiber_dim != 1 {
        return Err(std::io::Error::other("scalar grid functions only"));
    }
    match f.grid.group {
        GroupId::Torus(d) => {
            let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
            writeln!(out, "{},re,im", header.join(","))?;
        }
        GroupId::Su2 => writeln!(out, "phi,theta,psi,re,im")?,
    }
    for (j, node) in f.grid.nodes.iter().enumerate() {
        let coords: Vec<String> = match node {
            GroupPoint::Torus(xs) => xs.iter().map(|x| format!("{x}")).collect(),
            GroupPoint::Su2 { phi, theta, psi } => {
                vec![format!("{phi}"), format!("{theta}"), format!("{psi}")]
            }
        };
        writeln!(out, "{},{},{}", coords.join(","), f.values[j].re, f.values[j].im)?;
    }
    Ok(())
}

/// Read grid samples from CSV written by [`export_csv`] (or produced
/// externally with the same column order). Row order must match the grid;
/// node coordinates are checked against the grid to `1e-9`.
pub fn import_csv<R: BufRead>(grid: Arc<QuadratureGrid>, reader: R) -> Result<GridFunction> {
    let n_coords = match grid.group {
        GroupId::Torus(d) => d,
        GroupId::Su2 => 3,
    };
    let mut values = Vec::with_capacity(grid.len());
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv { line: 1, msg: "empty file".into() })?;
    let header = header.map_err(|e| Error::Csv { line: 1, msg: e.to_string() })?;
    let expected_cols = n_coords + 2;
    if header.split(',').count() != expected_cols {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected {expected_cols} columns, got {}", header.split(',').count()),
        });
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Csv { line: line_no, msg: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_cols {
            return Err(Error::Csv {
                line: line_no,
                msg: format!("expected {expected_cols} fields, got {}", fields.len()),
            });
        }
        let nums: Vec<f64> = fields
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.trim().parse::<f64>().map_err(|e| Error::Csv {
                    line: line_no,
                    msg: format!("field {} ({s:?}): {e}", i + 1),
                })
            })
            .collect::<Result<_>>()?;
        let node_idx = values.len();
        if node_idx >= grid.len() {
            return Err(Error::Csv { line: line_no, msg: "more rows than grid nodes".into() });
        }
        let expect: Vec<f64> = match &grid.nodes[node_idx] {
            GroupPoint::Torus(xs) => xs.clone(),
            GroupPoint::Su2 { phi, theta, psi } => vec![*phi, *theta, *psi],
        };
        for (k, &e) in expect.iter().enumerate() {
            if (nums[k] - e).abs() > 1e-9 {
                return Err(Error::Csv {
                    line: line_no,
                    msg: format!("coordinate {} is {}, grid node has {e}", k + 1, nums[k]),
                });
            }
        }
        values.push(C64::new(nums[n_coords], nums[n_coords + 1]));
    }
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
    }
    GridFunction::from_values(grid, values)
}
