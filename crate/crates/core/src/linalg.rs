//! Dense matrix helpers: singular values, raw Schatten norms and Hermitian
//! functional calculus.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn singular_values(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    m.singular_values()
        .map_err(|e| Error::Linalg(format!("svd: {e:?}")))
}

/// Eigenvalues of the Hermitian part's lower triangle, ascending.
pub fn hermitian_eigenvalues(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigenvalues: {e:?}")))
}

/// `(Σ σ_j^p)^{1/p}` of a list of singular values; `p = ∞` gives the max.
pub fn schatten_from_singular(sv: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return sv.iter().copied().fold(0.0, f64::max);
    }
    let top = sv.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    // Normalizing by the top value keeps large p from overflowing.
    let sum: f64 = sv.iter().map(|&s| (s / top).powf(p)).sum();
    top * sum.powf(1.0 / p)
}

/// Unscaled Schatten `p`-norm of a matrix.
pub fn schatten(m: MatRef<'_, Complex64>, p: f64) -> Result<f64> {
    if p == 2.0 {
        return Ok(m.norm_l2());
    }
    Ok(schatten_from_singular(&singular_values(m)?, p))
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn hermitian_function(h: MatRef<'_, Complex64>, f: impl Fn(f64) -> f64) -> Result<Mat<Complex64>> {
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigendecomposition: {e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = h.nrows();
    let mut scaled = u.to_owned();
    for k in 0..n {
        let w = Complex64::new(f(s[k].re), 0.0);
        for i in 0..n {
            scaled[(i, k)] *= w;
        }
    }
    Ok(&scaled * u.adjoint())
}

/// `H^α` for positive semidefinite `H`, negative eigenvalues clamped to 0.
pub fn psd_power(h: MatRef<'_, Complex64>, alpha: f64) -> Result<Mat<Complex64>> {
    hermitian_function(h, |t| if t > 0.0 { t.powf(alpha) } else { 0.0 })
}

/// `|A|^r = (A* A)^{r/2}`.
pub fn abs_power(a: MatRef<'_, Complex64>, r: f64) -> Result<Mat<Complex64>> {
    let gram = a.adjoint() * a;
    psd_power(gram.as_ref(), r / 2.0)
}

/// Trace of `|A|^p` for positive semidefinite `A`, via its eigenvalues.
pub fn psd_trace_power(h: MatRef<'_, Complex64>, p: f64) -> Result<f64> {
    Ok(hermitian_eigenvalues(h)?
        .into_iter()
        .map(|t| if t > 0.0 { t.powf(p) } else { 0.0 })
        .sum())
}

/// The `k` eigenpairs of a Hermitian matrix with the largest `|λ|`, as
/// `(λ, U)` with orthonormal columns in `U`.
pub fn top_eigenpairs(h: MatRef<'_, Complex64>, k: usize) -> Result<(Vec<f64>, Mat<Complex64>)> {
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigendecomposition: {e:?}")))?;
    let s = evd.S().column_vector();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| s[b].re.abs().total_cmp(&s[a].re.abs()).then(a.cmp(&b)));
    order.truncate(k.min(h.nrows()));
    let u = evd.U();
    let vecs = Mat::from_fn(h.nrows(), order.len(), |i, c| u[(i, order[c])]);
    Ok((order.iter().map(|&i| s[i].re).collect(), vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> Mat<Complex64> {
        let mut state = seed;
        Mat::from_fn(n, n, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    #[test]
    fn frobenius_is_schatten_two() {
        let m = sample(7, 3);
        let sv = singular_values(m.as_ref()).unwrap();
        let via_sv = schatten_from_singular(&sv, 2.0);
        assert!((via_sv - m.norm_l2()).abs() < 1e-12 * via_sv);
    }

    #[test]
    fn diagonal_singular_values() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new(0.0, (i + 1) as f64 * if i == 1 { -1.0 } else { 1.0 })
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let sv = singular_values(m.as_ref()).unwrap();
        assert!((schatten_from_singular(&sv, 1.0) - 6.0).abs() < 1e-12);
        assert!((schatten_from_singular(&sv, f64::INFINITY) - 3.0).abs() < 1e-12);
        assert!((schatten_from_singular(&sv, 3.0) - 36f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn square_root_squares_back() {
        let a = sample(5, 9);
        let gram = a.adjoint() * &a;
        let root = psd_power(gram.as_ref(), 0.5).unwrap();
        let back = &root * &root;
        assert!((&back - &gram).norm_l2() < 1e-10 * gram.norm_l2());
    }

    #[test]
    fn abs_power_trace_matches_singular_values() {
        let a = sample(6, 1);
        let p = 3.0;
        let abs_p = abs_power(a.as_ref(), p).unwrap();
        let tr: f64 = (0..6).map(|i| abs_p[(i, i)].re).sum();
        let sv = singular_values(a.as_ref()).unwrap();
        let want: f64 = sv.iter().map(|s| s.powf(p)).sum();
        assert!((tr - want).abs() < 1e-10 * want);
    }

    #[test]
    fn top_eigenpairs_reconstruct_low_rank() {
        let b = sample(6, 4);
        let h = &b * b.adjoint();
        let (lambda, u) = top_eigenpairs(h.as_ref(), 6).unwrap();
        assert!(lambda.windows(2).all(|w| w[0].abs() >= w[1].abs()));
        let diag = Mat::from_fn(6, 6, |i, j| if i == j { Complex64::new(lambda[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        let back = &u * &diag * u.adjoint();
        assert!((&back - &h).norm_l2() < 1e-10 * h.norm_l2());
        let (top, v) = top_eigenpairs(h.as_ref(), 2).unwrap();
        assert_eq!((top.len(), v.ncols()), (2, 2));
        assert_eq!(top[0], lambda[0]);
    }
}
