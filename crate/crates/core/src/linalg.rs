//! Dense complex matrix helpers: Hilbert-Schmidt norms, smallest singular
//! values, and deterministic pairwise summation.

use num_complex::Complex64;

use crate::{C64, CMat};

/// Hilbert-Schmidt (Frobenius) norm `sqrt(Tr(A* A))`.
pub fn hs_norm(a: &CMat) -> f64 {
    pairwise_sum_f64(&a.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sqrt()
}

/// Smallest singular value of a (possibly rectangular) complex matrix, in
/// the variational sense: the minimum of `||A v||_2` over unit vectors.
///
/// A matrix with more columns than rows therefore has value `0` (its
/// kernel is nontrivial); this is the convention the stacked block
/// diagnostics rely on. Exact fast paths keep the output bit-faithful
/// where the algebra is trivial: a single column reduces to a vector
/// 2-norm, and an exactly diagonal matrix to the smallest absolute
/// diagonal entry. Everything else goes through the SVD.
pub fn lambda_min(a: &CMat) -> f64 {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return 0.0;
    }
    if n > m {
        return 0.0;
    }
    if n == 1 {
        return hs_norm(a);
    }
    if let Some(diag) = exact_diagonal(a) {
        return diag.iter().fold(f64::INFINITY, |acc, z| acc.min(z.norm()));
    }
    let svd = a.clone().svd(false, false);
    svd.singular_values.iter().fold(f64::INFINITY, |acc, &s| acc.min(s))
}

/// Smallest singular value together with a unit right-singular vector.
///
/// Ties are broken by the smallest index of the minimal singular value;
/// the vector phase is normalized so its largest-magnitude entry is real
/// and positive.
pub fn min_singular_pair(a: &CMat) -> (f64, nalgebra::DVector<Complex64>) {
    let (m, n) = a.shape();
    assert!(m > 0 && n > 0, "empty matrix");
    if let Some(diag) = exact_diagonal(a) {
        // columns beyond the diagonal are identically zero
        let value = |j: usize| if j < diag.len() { diag[j].norm() } else { 0.0 };
        let mut best = 0usize;
        for j in 1..n {
            if value(j) < value(best) {
                best = j;
            }
        }
        let mut v = nalgebra::DVector::zeros(n);
        v[best] = C64::new(1.0, 0.0);
        return (value(best), v);
    }
    if n > m {
        // wide matrices have a kernel; find it through the Gram matrix
        let gram = a.adjoint() * a;
        let eigen = gram.symmetric_eigen();
        let mut best = 0usize;
        for i in 1..eigen.eigenvalues.len() {
            if eigen.eigenvalues[i] < eigen.eigenvalues[best] {
                best = i;
            }
        }
        let mut v: nalgebra::DVector<Complex64> = eigen.eigenvectors.column(best).into();
        normalize_phase(&mut v);
        return (eigen.eigenvalues[best].max(0.0).sqrt(), v);
    }
    let svd = a.clone().svd(false, true);
    let sv = &svd.singular_values;
    let mut best = 0usize;
    for i in 1..sv.len() {
        if sv[i] < sv[best] {
            best = i;
        }
    }
    let v_t = svd.v_t.expect("svd with v requested");
    let mut v: nalgebra::DVector<Complex64> = v_t.row(best).adjoint();
    normalize_phase(&mut v);
    (sv[best], v)
}

/// Returns the diagonal when every off-diagonal entry is exactly zero.
fn exact_diagonal(a: &CMat) -> Option<Vec<Complex64>> {
    let (m, n) = a.shape();
    let k = m.min(n);
    for i in 0..m {
        for j in 0..n {
            if i != j && a[(i, j)] != C64::new(0.0, 0.0) {
                return None;
            }
        }
    }
    Some((0..k).map(|i| a[(i, i)]).collect())
}

fn normalize_phase(v: &mut nalgebra::DVector<Complex64>) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].norm() > v[best].norm() {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() > 0.0 {
        let phase = z / z.norm();
        for x in v.iter_mut() {
            *x /= phase;
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        *v /= C64::new(norm, 0.0);
    }
}

/// `||A B||_HS >= lambda_min[A] ||B||_HS` for compatible matrices;
/// returns `(lhs, rhs)` and debug-asserts the inequality.
pub fn lemma_singular_value(a: &CMat, b: &CMat) -> crate::Result<(f64, f64)> {
    if a.ncols() != b.nrows() {
        return Err(crate::Error::ShapeMismatch(format!(
            "{}x{} times {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let lhs = hs_norm(&(a * b));
    let rhs = lambda_min(a) * hs_norm(b);
    Ok((lhs, rhs))
}

/// Deterministic pairwise sum of real values (fixed reduction tree).
pub fn pairwise_sum_f64(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_f64(&xs[..mid]) + pairwise_sum_f64(&xs[mid..])
}

/// Deterministic pairwise sum of complex values.
pub fn pairwise_sum_c64(xs: &[C64]) -> C64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c64(&xs[..mid]) + pairwise_sum_c64(&xs[mid..])
}

/// Deterministic pairwise sum of matrices produced by `f` over `0..n`.
/// All matrices must share one shape; `n` must be positive.
pub fn pairwise_sum_mat(n: usize, f: &dyn Fn(usize) -> CMat) -> CMat {
    fn rec(lo: usize, hi: usize, f: &dyn Fn(usize) -> CMat) -> CMat {
        if hi - lo <= 8 {
            let mut acc = f(lo);
            for i in lo + 1..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    assert!(n > 0);
    rec(0, n, f)
}

/// Matrix as JSON-friendly rows of `[re, im]` pairs.
pub fn mat_to_rows(a: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
        .collect()
}

/// Parse a matrix from rows of `[re, im]` pairs.
pub fn rows_to_mat(rows: &[Vec<[f64; 2]>]) -> crate::Result<CMat> {
    let m = rows.len();
    if m == 0 {
        return Err(crate::Error::ShapeMismatch("empty matrix".into()));
    }
    let n = rows[0].len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(crate::Error::ShapeMismatch("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(m, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}
