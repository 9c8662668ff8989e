//! Sampling grids on which Haar integrals of band-limited functions are
//! exact.
//!
//! Torus grids are uniform tensor products. SU(2) grids are tensor
//! products of a uniform `phi` circle, Gauss-Legendre nodes in
//! `cos(theta)`, and a uniform `psi` circle over `[0, 4*pi)` whose spacing
//! resolves half-integer frequencies. Weights are normalized so the grid
//! integrates the constant `1` to `1` (Haar probability measure).

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::dual::{rep_eval, DualIndex, GroupId, GroupPoint};
use crate::error::{Error, Result};
use crate::linalg::pairwise_sum_c64;
use crate::{C64, CMat};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Tensor structure of a grid, kept so that projections along the
/// subgroup circle can reuse the factorization.
#[derive(Clone, Debug, PartialEq)]
pub enum GridShape {
    /// `points` nodes per axis, `d` axes, row-major node order.
    Torus { d: usize, points: usize },
    /// Node order: `phi` outermost, then `theta`, then `psi`.
    Su2 {
        n_phi: usize,
        thetas: Vec<f64>,
        theta_weights: Vec<f64>,
        n_psi: usize,
    },
}

/// A quadrature grid over a compact group.
#[derive(Debug)]
pub struct QuadratureGrid {
    pub group: GroupId,
    pub nodes: Vec<GroupPoint>,
    pub weights: Vec<f64>,
    pub band_limit: f64,
    pub shape: GridShape,
    /// Memoized representation matrices per dual point, one per node.
    rep_cache: Mutex<BTreeMap<DualIndex, Arc<Vec<CMat>>>>,
}

impl Clone for QuadratureGrid {
    fn clone(&self) -> Self {
        QuadratureGrid {
            group: self.group,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            band_limit: self.band_limit,
            shape: self.shape.clone(),
            rep_cache: Mutex::new(BTreeMap::new()),
        }
    }
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Representation matrices of `xi` at every node, computed once and
    /// shared. Values are pure functions of the grid, so the cache never
    /// changes observable behavior.
    pub fn rep_table(&self, xi: &DualIndex) -> Result<Arc<Vec<CMat>>> {
        if let Some(t) = self.rep_cache.lock().unwrap().get(xi) {
            return Ok(t.clone());
        }
        let table: Vec<CMat> = self
            .nodes
            .iter()
            .map(|x| rep_eval(xi, x).map(|r| r.entries))
            .collect::<Result<_>>()?;
        let arc = Arc::new(table);
        Ok(self
            .rep_cache
            .lock()
            .unwrap()
            .entry(xi.clone())
            .or_insert(arc)
            .clone())
    }

    /// Largest `2l` (SU(2)) or largest per-axis `|n|` (torus) the grid is
    /// exact for, derived from the band limit.
    pub fn max_index(&self) -> usize {
        max_index_for(self.group, self.band_limit)
    }
}

fn max_index_for(group: GroupId, band_limit: f64) -> usize {
    let max_nu = band_limit * band_limit - 1.0;
    match group {
        GroupId::Torus(_) => (max_nu.max(0.0).sqrt() + 1e-12).floor() as usize,
        GroupId::Su2 => {
            // largest t with t(t+2)/4 <= max_nu
            let mut t = 0usize;
            while DualIndex::su2(t as u32 + 1).nu() <= max_nu + 1e-12 {
                t += 1;
            }
            t
        }
    }
}

/// Build a grid exact for products `t^l conj(t^{l'})` with
/// `<l>, <l'> <= band_limit`.
pub fn build_grid(group: GroupId, band_limit: f64) -> QuadratureGrid {
    assert!(band_limit >= 1.0, "band_limit must be >= 1");
    let max_idx = max_index_for(group, band_limit);
    match group {
        GroupId::Torus(d) => {
            let points = 2 * max_idx + 1;
            let mut nodes = Vec::with_capacity(points.pow(d as u32));
            let mut idx = vec![0usize; d];
            'outer: loop {
                nodes.push(GroupPoint::Torus(
                    idx.iter().map(|&i| TAU * i as f64 / points as f64).collect(),
                ));
                let mut axis = d;
                loop {
                    if axis == 0 {
                        break 'outer;
                    }
                    axis -= 1;
                    idx[axis] += 1;
                    if idx[axis] < points {
                        break;
                    }
                    idx[axis] = 0;
                }
            }
            let w = 1.0 / nodes.len() as f64;
            let weights = vec![w; nodes.len()];
            QuadratureGrid {
                group,
                nodes,
                weights,
                band_limit,
                shape: GridShape::Torus { d, points },
                rep_cache: Mutex::new(BTreeMap::new()),
            }
        }
        GroupId::Su2 => {
            // frequency content of products: integer phi-frequencies up to
            // 2*l_max = max_idx, half-integer psi-frequencies up to max_idx.
            let n_phi = 2 * max_idx + 1;
            let n_theta = max_idx + 1;
            let n_psi = 2 * max_idx + 1;
            let (us, wus) = gauss_legendre(n_theta);
            let thetas: Vec<f64> = us.iter().map(|&u| u.clamp(-1.0, 1.0).acos()).collect();
            let theta_weights: Vec<f64> = wus.iter().map(|&w| w / 2.0).collect();
            let mut nodes = Vec::with_capacity(n_phi * n_theta * n_psi);
            let mut weights = Vec::with_capacity(nodes.capacity());
            for i in 0..n_phi {
                let phi = TAU * i as f64 / n_phi as f64;
                for (j, &theta) in thetas.iter().enumerate() {
                    for k in 0..n_psi {
                        let psi = 2.0 * TAU * k as f64 / n_psi as f64;
                        nodes.push(GroupPoint::Su2 { phi, theta, psi });
                        weights.push(theta_weights[j] / (n_phi as f64 * n_psi as f64));
                    }
                }
            }
            QuadratureGrid {
                group,
                nodes,
                weights,
                band_limit,
                shape: GridShape::Su2 { n_phi, thetas, theta_weights, n_psi },
                rep_cache: Mutex::new(BTreeMap::new()),
            }
        }
    }
}

/// Weighted sum of samples against the grid, with a fixed pairwise
/// reduction tree for run-to-run reproducibility.
pub fn integrate(grid: &QuadratureGrid, samples: &[C64]) -> Result<C64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), got: samples.len() });
    }
    let terms: Vec<C64> = samples
        .iter()
        .zip(&grid.weights)
        .map(|(&s, &w)| s * C64::new(w, 0.0))
        .collect();
    Ok(pairwise_sum_c64(&terms))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence. Nodes are returned in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (p2, d2) = legendre_and_derivative(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
