//! Self-contained reference routines used by the selftest battery and the
//! test suite.
//!
//! These deliberately avoid the code paths they are checked against: the
//! eigensolver is a hand-rolled cyclic Jacobi iteration (not the SVD used
//! by [`crate::linalg::lambda_min`]), and the dense integrator is a plain
//! Riemann product rule (not the Gauss-Legendre grids of
//! [`crate::quadrature`]).

use num_complex::Complex64;
use rand::Rng;

use crate::dual::{GroupId, GroupPoint};
use crate::{C64, CMat};

/// Standard normal sample via Box-Muller.
fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Eigenvalues of a Hermitian matrix in ascending order, computed by a
/// cyclic complex Jacobi iteration.
pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "square matrix required");
    let mut a = h.clone();
    let scale = a.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Zero out the (p, q) entry of a Hermitian matrix with a unitary
/// two-sided rotation.
fn jacobi_rotate(a: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b; // apq = b * phase, |phase| = 1
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // real Jacobi angle for [[app, b], [b, aqq]]
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // unitary columns: u_p = c e_p - s conj(phase) e_q, u_q = s phase e_p + c e_q
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * phase.conj() * s;
        a[(k, q)] = akp * phase * s + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * phase.conj() * s + aqk * c;
    }
    // clean up the rotated pair to keep the matrix Hermitian to rounding
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// Smallest singular value via the eigenvalues of `A* A`.
pub fn min_singular_by_eigen(a: &CMat) -> f64 {
    let gram = a.adjoint() * a;
    hermitian_eigenvalues(&gram)[0].max(0.0).sqrt()
}

/// Uniform random unit vector in complex `n`-space.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> nalgebra::DVector<Complex64> {
    loop {
        let v = nalgebra::DVector::from_fn(n, |_, _| C64::new(normal(rng), normal(rng)));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v / C64::new(norm, 0.0);
        }
    }
}

/// Minimum of `||A v||_2` over random unit vectors; an upper bound on the
/// smallest singular value that tightens with the sample count.
pub fn sampled_min_direction<R: Rng + ?Sized>(a: &CMat, samples: usize, rng: &mut R) -> f64 {
    let n = a.ncols();
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let v = random_unit_vector(rng, n);
        let av = a * &v;
        best = best.min(av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    best
}

/// Haar integral by a dense Riemann product rule, independent of the
/// Gauss-Legendre grids. `level` controls the number of points per axis.
pub fn dense_integrate<F>(group: GroupId, level: usize, f: F) -> C64
where
    F: Fn(&GroupPoint) -> C64,
{
    match group {
        GroupId::Torus(d) => {
            let n = level;
            let mut total = C64::new(0.0, 0.0);
            let mut idx = vec![0usize; d];
            loop {
                let x = GroupPoint::Torus(
                    idx.iter()
                        .map(|&i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
                        .collect(),
                );
                total += f(&x);
                let mut axis = 0;
                loop {
                    if axis == d {
                        return total / C64::new((n as f64).powi(d as i32), 0.0);
                    }
                    idx[axis] += 1;
                    if idx[axis] < n {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
        }
        GroupId::Su2 => {
            // uniform sums in phi and psi (spectrally exact for trig
            // polynomials), composite Simpson in u = cos(theta)
            let np = level;
            let ns = 2 * level;
            let nu_panels = if level % 2 == 0 { level } else { level + 1 };
            let pi = std::f64::consts::PI;
            let mut total = C64::new(0.0, 0.0);
            for j in 0..=nu_panels {
                let u = -1.0 + 2.0 * j as f64 / nu_panels as f64;
                let simpson = if j == 0 || j == nu_panels {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                // d(u)/2 over [-1, 1]: total u-weight 1
                let w_u = simpson * (2.0 / nu_panels as f64) / 3.0 / 2.0;
                let theta = u.clamp(-1.0, 1.0).acos();
                for i in 0..np {
                    let phi = 2.0 * pi * i as f64 / np as f64;
                    for k in 0..ns {
                        let psi = 4.0 * pi * k as f64 / ns as f64;
                        let x = GroupPoint::Su2 { phi, theta, psi };
                        total += f(&x) * C64::new(w_u / (np as f64 * ns as f64), 0.0);
                    }
                }
            }
            total
        }
    }
}
