//! Truncated unitary duals and irreducible representation matrices.
//!
//! Supported groups are the `d`-torus and SU(2). A point of the unitary
//! dual is an integer frequency vector for the torus, or a half-integer
//! spin `l` (stored exactly as `2l`) for SU(2). SU(2) representation
//! matrices are evaluated in z-y-z Euler coordinates `(phi, theta, psi)`
//! with `psi` ranging over `[0, 4*pi)` so that half-integer spins are
//! single-valued. Rows and columns are indexed by the weights
//! `m, n in {-l, ..., l}` in increasing order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::{C64, CMat};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Compact group identifier: the `d`-torus or SU(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    /// `T^d` with `d >= 1`.
    Torus(usize),
    Su2,
}

impl GroupId {
    /// Manifold dimension of the group.
    pub fn dim(&self) -> usize {
        match self {
            GroupId::Torus(d) => *d,
            GroupId::Su2 => 3,
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Torus(d) => write!(f, "torus:{d}"),
            GroupId::Su2 => write!(f, "su2"),
        }
    }
}

/// A point of the unitary dual.
///
/// Ordering is by `(eigenvalue, lexicographic index)`, realized through
/// exact integer keys so that sorted containers iterate in the canonical
/// summation order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DualIndex {
    /// Frequency vector `n` of `T^d`.
    Torus(Vec<i64>),
    /// Spin of SU(2), stored as `2l` to keep half-integers exact.
    Su2 { two_ell: u32 },
}

impl DualIndex {
    pub fn torus(n: Vec<i64>) -> Self {
        DualIndex::Torus(n)
    }

    /// SU(2) dual point with spin `l = two_ell / 2`.
    pub fn su2(two_ell: u32) -> Self {
        DualIndex::Su2 { two_ell }
    }

    pub fn group(&self) -> GroupId {
        match self {
            DualIndex::Torus(n) => GroupId::Torus(n.len()),
            DualIndex::Su2 { .. } => GroupId::Su2,
        }
    }

    /// Dimension `d_xi` of the representation.
    pub fn dim(&self) -> usize {
        match self {
            DualIndex::Torus(_) => 1,
            DualIndex::Su2 { two_ell } => *two_ell as usize + 1,
        }
    }

    /// Laplace-Beltrami eigenvalue `nu` on the coefficient functions:
    /// `|n|^2` on the torus, `l(l+1)` on SU(2).
    pub fn nu(&self) -> f64 {
        match self {
            DualIndex::Torus(n) => n.iter().map(|&k| (k * k) as f64).sum(),
            DualIndex::Su2 { two_ell } => {
                let t = *two_ell as f64;
                t * (t + 2.0) / 4.0
            }
        }
    }

    /// The weight `<xi> = sqrt(1 + nu)`, always `>= 1`.
    pub fn eigenvalue(&self) -> f64 {
        (1.0 + self.nu()).sqrt()
    }

    fn norm2_key(&self) -> u128 {
        match self {
            DualIndex::Torus(n) => n.iter().map(|&k| (k as i128 * k as i128) as u128).sum(),
            DualIndex::Su2 { two_ell } => *two_ell as u128,
        }
    }
}

impl Ord for DualIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DualIndex::Torus(a), DualIndex::Torus(b)) => self
                .norm2_key()
                .cmp(&other.norm2_key())
                .then_with(|| a.cmp(b)),
            (DualIndex::Su2 { two_ell: a }, DualIndex::Su2 { two_ell: b }) => a.cmp(b),
            (DualIndex::Torus(_), DualIndex::Su2 { .. }) => Ordering::Less,
            (DualIndex::Su2 { .. }, DualIndex::Torus(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for DualIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DualIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualIndex::Torus(n) => {
                if n.len() == 1 {
                    write!(f, "{}", n[0])
                } else {
                    let parts: Vec<String> = n.iter().map(|k| k.to_string()).collect();
                    write!(f, "({})", parts.join(";"))
                }
            }
            DualIndex::Su2 { two_ell } => {
                if two_ell % 2 == 0 {
                    write!(f, "{}", two_ell / 2)
                } else {
                    write!(f, "{two_ell}/2")
                }
            }
        }
    }
}

/// A group element in coordinates: angles in `[0, 2*pi)^d` for the torus,
/// z-y-z Euler angles `(phi, theta, psi)` in `[0,2*pi) x [0,pi] x [0,4*pi)`
/// for SU(2).
#[derive(Clone, Debug, PartialEq)]
pub enum GroupPoint {
    Torus(Vec<f64>),
    Su2 { phi: f64, theta: f64, psi: f64 },
}

impl GroupPoint {
    pub fn torus(angles: Vec<f64>) -> Result<Self> {
        for &a in &angles {
            if !(0.0..TAU).contains(&a) {
                return Err(Error::AngleOutOfRange(format!(
                    "torus angle {a} outside [0, 2*pi)"
                )));
            }
        }
        Ok(GroupPoint::Torus(angles))
    }

    pub fn su2(phi: f64, theta: f64, psi: f64) -> Result<Self> {
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::AngleOutOfRange(format!("phi = {phi} outside [0, 2*pi)")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::AngleOutOfRange(format!("theta = {theta} outside [0, pi]")));
        }
        if !(0.0..2.0 * TAU).contains(&psi) {
            return Err(Error::AngleOutOfRange(format!("psi = {psi} outside [0, 4*pi)")));
        }
        Ok(GroupPoint::Su2 { phi, theta, psi })
    }

    pub fn group(&self) -> GroupId {
        match self {
            GroupPoint::Torus(x) => GroupId::Torus(x.len()),
            GroupPoint::Su2 { .. } => GroupId::Su2,
        }
    }

    /// Group identity in coordinates.
    pub fn identity(group: GroupId) -> Self {
        match group {
            GroupId::Torus(d) => GroupPoint::Torus(vec![0.0; d]),
            GroupId::Su2 => GroupPoint::Su2 { phi: 0.0, theta: 0.0, psi: 0.0 },
        }
    }

    /// Group law in coordinates. Torus angles add mod `2*pi`; SU(2)
    /// elements are multiplied as 2x2 unitaries and converted back to
    /// Euler angles.
    pub fn compose(&self, other: &GroupPoint) -> Result<GroupPoint> {
        match (self, other) {
            (GroupPoint::Torus(a), GroupPoint::Torus(b)) if a.len() == b.len() => {
                let sum = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x + y).rem_euclid(TAU))
                    .collect();
                Ok(GroupPoint::Torus(sum))
            }
            (GroupPoint::Su2 { .. }, GroupPoint::Su2 { .. }) => {
                let u = su2_defining(self).ok_or_else(|| Error::ShapeMismatch("su2".into()))?
                    * su2_defining(other).unwrap();
                let (phi, theta, psi) = euler_from_su2(&u);
                GroupPoint::su2(phi, theta, psi)
            }
            _ => Err(Error::GroupMismatch {
                expected: self.group().to_string(),
                got: other.group().to_string(),
            }),
        }
    }

    /// Haar-uniform random element.
    pub fn sample<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> Self {
        match group {
            GroupId::Torus(d) => {
                GroupPoint::Torus((0..d).map(|_| rng.gen_range(0.0..TAU)).collect())
            }
            GroupId::Su2 => {
                // Haar measure is uniform in (phi, cos(theta), psi).
                let phi = rng.gen_range(0.0..TAU);
                let u: f64 = rng.gen_range(-1.0..1.0);
                let theta = u.clamp(-1.0, 1.0).acos();
                let psi = rng.gen_range(0.0..2.0 * TAU);
                GroupPoint::Su2 { phi, theta, psi }
            }
        }
    }
}

/// An evaluated representation matrix `xi(x)`.
#[derive(Clone, Debug)]
pub struct RepMatrix {
    pub xi: DualIndex,
    pub entries: CMat,
}

/// All dual points with `<xi> <= cutoff`, sorted by `(eigenvalue, index)`.
///
/// The enumeration is deterministic and monotone in the cutoff: a smaller
/// cutoff yields a prefix of the longer list.
pub fn enumerate_dual(group: GroupId, cutoff: f64) -> Vec<DualIndex> {
    assert!(cutoff >= 1.0, "cutoff must be >= 1");
    let max_nu = cutoff * cutoff - 1.0;
    let mut out = Vec::new();
    match group {
        GroupId::Torus(d) => {
            let bound = max_nu.sqrt().floor() as i64;
            let mut current = vec![0i64; d];
            collect_torus(&mut current, 0, bound, max_nu, &mut out);
            out.sort();
        }
        GroupId::Su2 => {
            let mut two_ell = 0u32;
            loop {
                let xi = DualIndex::su2(two_ell);
                if xi.nu() > max_nu + 1e-12 {
                    break;
                }
                out.push(xi);
                two_ell += 1;
            }
        }
    }
    out
}

fn collect_torus(current: &mut Vec<i64>, axis: usize, bound: i64, max_nu: f64, out: &mut Vec<DualIndex>) {
    if axis == current.len() {
        let xi = DualIndex::Torus(current.clone());
        if xi.nu() <= max_nu + 1e-12 {
            out.push(xi);
        }
        return;
    }
    for n in -bound..=bound {
        current[axis] = n;
        collect_torus(current, axis + 1, bound, max_nu, out);
    }
}

/// Representation dimension `d_xi`.
pub fn rep_dim(xi: &DualIndex) -> usize {
    xi.dim()
}

/// The weight `<xi>`.
pub fn eigenvalue(xi: &DualIndex) -> f64 {
    xi.eigenvalue()
}

/// Evaluate the representation matrix `xi(x)`.
///
/// Torus: the 1x1 matrix `[exp(i n.x)]`. SU(2): the spin-`l` matrix
/// `t^l(phi,theta,psi) = exp(-i m phi) d^l_{mn}(theta) exp(-i n psi)`,
/// with the real Wigner matrix `d^l` normalized by `d^l(0) = I` and
/// `d^{1/2}(theta) = [[cos(theta/2), -sin(theta/2)], [sin..., cos...]]`.
pub fn rep_eval(xi: &DualIndex, x: &GroupPoint) -> Result<RepMatrix> {
    match (xi, x) {
        (DualIndex::Torus(n), GroupPoint::Torus(angles)) if n.len() == angles.len() => {
            for &a in angles {
                if !(0.0..TAU).contains(&a) {
                    return Err(Error::AngleOutOfRange(format!("{a} outside [0, 2*pi)")));
                }
            }
            let phase: f64 = n.iter().zip(angles).map(|(&k, &a)| k as f64 * a).sum();
            let entries = CMat::from_element(1, 1, C64::from_polar(1.0, phase));
            Ok(RepMatrix { xi: xi.clone(), entries })
        }
        (DualIndex::Su2 { two_ell }, GroupPoint::Su2 { phi, theta, psi }) => {
            // Revalidate: points may come from user input.
            GroupPoint::su2(*phi, *theta, *psi)?;
            let t = *two_ell as usize;
            let ell = t as f64 / 2.0;
            let d = wigner_d(t, *theta);
            let dim = t + 1;
            let mut entries = CMat::zeros(dim, dim);
            for a in 0..dim {
                let m = a as f64 - ell;
                let row_phase = C64::from_polar(1.0, -m * phi);
                for b in 0..dim {
                    let n = b as f64 - ell;
                    let col_phase = C64::from_polar(1.0, -n * psi);
                    entries[(a, b)] = row_phase * col_phase * d[(a, b)];
                }
            }
            Ok(RepMatrix { xi: xi.clone(), entries })
        }
        _ => Err(Error::GroupMismatch {
            expected: xi.group().to_string(),
            got: x.group().to_string(),
        }),
    }
}

/// Real Wigner matrix `d^l(theta)` for `l = two_ell / 2`, indices
/// `m, n in {-l..l}` increasing.
///
/// Evaluated by the alternating factorial sum. Factorials are exact f64
/// table lookups for `2l <= 30`; beyond that the terms are assembled in
/// log space to avoid overflow.
pub fn wigner_d(two_ell: usize, theta: f64) -> nalgebra::DMatrix<f64> {
    let dim = two_ell + 1;
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let mut d = nalgebra::DMatrix::zeros(dim, dim);
    let direct = two_ell <= 30;
    for a in 0..dim {
        for b in 0..dim {
            let lo = a.saturating_sub(b);
            let hi = a.min(two_ell - b);
            let mut acc = 0.0;
            for k in lo..=hi {
                let p_c = (two_ell + a) as i32 - b as i32 - 2 * k as i32;
                let p_s = (b + 2 * k) as i32 - a as i32;
                let sign = if (b + k - a) % 2 == 0 { 1.0 } else { -1.0 };
                let term = if direct {
                    let num = (factorial(b) * factorial(two_ell - b) * factorial(a)
                        * factorial(two_ell - a))
                    .sqrt();
                    let den = factorial(a - k)
                        * factorial(k)
                        * factorial(b + k - a)
                        * factorial(two_ell - b - k);
                    sign * (num / den) * powi_nonneg(c, p_c) * powi_nonneg(s, p_s)
                } else {
                    // log-space assembly; cos/sin powers folded in so large
                    // l stays finite.
                    if (c == 0.0 && p_c > 0) || (s == 0.0 && p_s > 0) {
                        0.0
                    } else {
                        let ln = 0.5
                            * (ln_factorial(b)
                                + ln_factorial(two_ell - b)
                                + ln_factorial(a)
                                + ln_factorial(two_ell - a))
                            - (ln_factorial(a - k)
                                + ln_factorial(k)
                                + ln_factorial(b + k - a)
                                + ln_factorial(two_ell - b - k))
                            + p_c as f64 * c.ln()
                            + p_s as f64 * s.ln();
                        sign * ln.exp()
                    }
                };
                acc += term;
            }
            d[(a, b)] = acc;
        }
    }
    d
}

fn powi_nonneg(x: f64, p: i32) -> f64 {
    debug_assert!(p >= 0);
    if p == 0 {
        1.0
    } else {
        x.powi(p)
    }
}

fn factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![1.0f64; 171];
        for i in 1..v.len() {
            v[i] = v[i - 1] * i as f64;
        }
        v
    });
    t[n]
}

fn ln_factorial(n: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0f64; 4096];
        for i in 1..v.len() {
            v[i] = v[i - 1] + (i as f64).ln();
        }
        v
    });
    t[n]
}

/// The defining 2x2 matrix of an SU(2) element, i.e. `t^{1/2}(x)`.
pub fn su2_defining(x: &GroupPoint) -> Option<nalgebra::Matrix2<Complex64>> {
    if let GroupPoint::Su2 { phi, theta, psi } = x {
        let c = (theta / 2.0).cos();
        let s = (theta / 2.0).sin();
        Some(nalgebra::Matrix2::new(
            C64::from_polar(c, (phi + psi) / 2.0),
            -C64::from_polar(s, (phi - psi) / 2.0),
            C64::from_polar(s, -(phi - psi) / 2.0),
            C64::from_polar(c, -(phi + psi) / 2.0),
        ))
    } else {
        None
    }
}

/// Euler angles of a 2x2 special unitary, inverse to [`su2_defining`].
pub fn euler_from_su2(u: &nalgebra::Matrix2<Complex64>) -> (f64, f64, f64) {
    let c2 = u[(0, 0)].norm();
    let s2 = u[(1, 0)].norm();
    let theta = 2.0 * s2.atan2(c2);
    if s2 < 1e-14 {
        let psi = (2.0 * u[(0, 0)].arg()).rem_euclid(2.0 * TAU);
        return (0.0, 0.0, psi);
    }
    if c2 < 1e-14 {
        let psi = (2.0 * u[(1, 0)].arg()).rem_euclid(2.0 * TAU);
        return (0.0, std::f64::consts::PI, psi);
    }
    let a = u[(0, 0)].arg();
    let b = u[(1, 0)].arg();
    let phi = (a - b).rem_euclid(TAU);
    // psi is determined mod 2*pi by the phases; the 4*pi sheet is fixed by
    // reproducing the phase of u00.
    let psi0 = (a + b).rem_euclid(TAU);
    let pick = |psi: f64| (C64::from_polar(c2, (phi + psi) / 2.0) - u[(0, 0)]).norm();
    let psi = if pick(psi0) <= pick(psi0 + TAU) { psi0 } else { psi0 + TAU };
    (phi, theta.clamp(0.0, std::f64::consts::PI), psi.rem_euclid(2.0 * TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hs_dist(a: &CMat, b: &CMat) -> f64 {
        (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn enumerate_su2_trivial_cutoff() {
        let duals = enumerate_dual(GroupId::Su2, 1.0);
        assert_eq!(duals, vec![DualIndex::su2(0)]);
    }

    #[test]
    fn enumerate_su2_cutoff_two() {
        // <1/2> = sqrt(7/4) ~ 1.32, <1> = sqrt(3) ~ 1.73, <3/2> ~ 2.18.
        let duals = enumerate_dual(GroupId::Su2, 2.0);
        assert_eq!(duals, vec![DualIndex::su2(0), DualIndex::su2(1), DualIndex::su2(2)]);
    }

    #[test]
    fn enumerate_torus_cutoff() {
        let duals = enumerate_dual(GroupId::Torus(1), 2.5);
        let expect: Vec<DualIndex> = vec![
            DualIndex::torus(vec![0]),
            DualIndex::torus(vec![-1]),
            DualIndex::torus(vec![1]),
            DualIndex::torus(vec![-2]),
            DualIndex::torus(vec![2]),
        ];
        assert_eq!(duals, expect);
    }

    #[test]
    fn enumerate_is_monotone_in_cutoff() {
        for group in [GroupId::Su2, GroupId::Torus(2)] {
            let short = enumerate_dual(group, 3.0);
            let long = enumerate_dual(group, 6.5);
            assert!(long.len() > short.len());
            assert_eq!(&long[..short.len()], &short[..]);
        }
    }

    #[test]
    fn dims_and_eigenvalues() {
        assert_eq!(DualIndex::torus(vec![7]).dim(), 1);
        assert_eq!(DualIndex::su2(0).dim(), 1);
        assert_eq!(DualIndex::su2(3).dim(), 4); // l = 3/2
        assert_relative_eq!(DualIndex::torus(vec![0]).eigenvalue(), 1.0);
        assert_relative_eq!(DualIndex::su2(2).eigenvalue(), 3.0f64.sqrt());
        assert_relative_eq!(DualIndex::torus(vec![3, 4]).eigenvalue(), 26.0f64.sqrt());
    }

    #[test]
    fn display_forms() {
        assert_eq!(DualIndex::su2(3).to_string(), "3/2");
        assert_eq!(DualIndex::su2(4).to_string(), "2");
        assert_eq!(DualIndex::torus(vec![-5]).to_string(), "-5");
        assert_eq!(DualIndex::torus(vec![1, -2]).to_string(), "(1;-2)");
    }

    #[test]
    fn rep_trivial_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x = GroupPoint::sample(GroupId::Su2, &mut rng);
            let r = rep_eval(&DualIndex::su2(0), &x).unwrap();
            assert_relative_eq!(r.entries[(0, 0)].re, 1.0, epsilon = 1e-14);
            assert!(r.entries[(0, 0)].im.abs() < 1e-14);
        }
    }

    #[test]
    fn rep_half_spin_closed_form() {
        let theta = 0.83;
        let x = GroupPoint::su2(0.0, theta, 0.0).unwrap();
        let r = rep_eval(&DualIndex::su2(1), &x).unwrap();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        assert_relative_eq!(r.entries[(0, 0)].re, c, epsilon = 1e-14);
        assert_relative_eq!(r.entries[(0, 1)].re, -s, epsilon = 1e-14);
        assert_relative_eq!(r.entries[(1, 0)].re, s, epsilon = 1e-14);
        assert_relative_eq!(r.entries[(1, 1)].re, c, epsilon = 1e-14);
    }

    #[test]
    fn rep_torus_phase() {
        let x = GroupPoint::torus(vec![std::f64::consts::FRAC_PI_2]).unwrap();
        let r = rep_eval(&DualIndex::torus(vec![2]), &x).unwrap();
        assert_relative_eq!(r.entries[(0, 0)].re, -1.0, epsilon = 1e-14);
        assert!(r.entries[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn wigner_identity_at_zero() {
        for two_ell in 0..=20 {
            let d = wigner_d(two_ell, 0.0);
            for a in 0..=two_ell {
                for b in 0..=two_ell {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((d[(a, b)] - expect).abs() < 1e-13, "l={}/2", two_ell);
                }
            }
        }
    }

    #[test]
    fn rep_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let duals = enumerate_dual(GroupId::Su2, 15.0);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let xi = &duals[rng.gen_range(0..duals.len())];
            let x = GroupPoint::sample(GroupId::Su2, &mut rng);
            let r = rep_eval(xi, &x).unwrap().entries;
            let dim = xi.dim();
            let gram = &r * r.adjoint();
            worst = worst.max(hs_dist(&gram, &CMat::identity(dim, dim)));
        }
        assert!(worst < 1e-10, "worst unitarity defect {worst:.3e}");
    }

    #[test]
    fn rep_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..60 {
            let x = GroupPoint::sample(GroupId::Su2, &mut rng);
            let y = GroupPoint::sample(GroupId::Su2, &mut rng);
            let xy = x.compose(&y).unwrap();
            for two_ell in [0u32, 1, 2, 3, 5, 8] {
                let xi = DualIndex::su2(two_ell);
                let lhs = rep_eval(&xi, &xy).unwrap().entries;
                let rhs = rep_eval(&xi, &x).unwrap().entries * rep_eval(&xi, &y).unwrap().entries;
                worst = worst.max(hs_dist(&lhs, &rhs));
            }
        }
        assert!(worst < 1e-9, "worst homomorphism defect {worst:.3e}");
    }

    #[test]
    fn torus_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let x = GroupPoint::sample(GroupId::Torus(2), &mut rng);
            let y = GroupPoint::sample(GroupId::Torus(2), &mut rng);
            let xy = x.compose(&y).unwrap();
            let xi = DualIndex::torus(vec![3, -2]);
            let lhs = rep_eval(&xi, &xy).unwrap().entries[(0, 0)];
            let rhs = rep_eval(&xi, &x).unwrap().entries[(0, 0)]
                * rep_eval(&xi, &y).unwrap().entries[(0, 0)];
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn euler_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let x = GroupPoint::sample(GroupId::Su2, &mut rng);
            let u = su2_defining(&x).unwrap();
            let (phi, theta, psi) = euler_from_su2(&u);
            let y = GroupPoint::su2(phi, theta, psi).unwrap();
            let v = su2_defining(&y).unwrap();
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range_angles() {
        assert!(GroupPoint::su2(0.0, 4.0, 0.0).is_err());
        assert!(GroupPoint::su2(-0.1, 1.0, 0.0).is_err());
        assert!(GroupPoint::torus(vec![7.0]).is_err());
        let x = GroupPoint::Su2 { phi: 0.0, theta: 97.0, psi: 0.0 };
        assert!(rep_eval(&DualIndex::su2(2), &x).is_err());
    }

    #[test]
    fn rejects_group_mismatch() {
        let x = GroupPoint::identity(GroupId::Torus(1));
        assert!(rep_eval(&DualIndex::su2(2), &x).is_err());
    }
}
