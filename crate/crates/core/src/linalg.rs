//! Dense symmetric eigendecomposition and small-matrix SVD.
//!
//! The eigensolver is the classic EISPACK pair `tred2`/`tql2` (Householder
//! tridiagonalization followed by implicit-shift QL), which is exact enough at
//! the matrix sizes this crate targets (n up to a few thousand). The SVD is a
//! one-sided Jacobi iteration; it is only ever applied to small `d x d`
//! cross-product matrices, where robustness under rank deficiency matters more
//! than speed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Full eigendecomposition of a symmetric matrix.
///
/// `values[j]` pairs with column `j` of `vectors`; values are sorted
/// non-increasing and the columns are orthonormal.
#[derive(Debug, Clone)]
pub struct SymEigen<S: Scalar = f64> {
    pub values: Vec<S>,
    pub vectors: DenseMatrix<S>,
}

/// Eigendecomposition of a symmetric matrix, eigenvalues non-increasing.
///
/// The input is symmetrized as `(M + Mᵀ)/2` before factorization; callers that
/// must reject asymmetry do so beforehand.
pub fn sym_eigen<S: Scalar>(m: &DenseMatrix<S>) -> Result<SymEigen<S>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }

    let half = S::cst(0.5);
    let mut v = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] = (m[(i, j)] + m[(j, i)]) * half;
        }
    }
    let mut d = vec![S::zero(); n];
    let mut e = vec![S::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;

    // Sort eigenpairs by eigenvalue, largest first; stable so ties keep the
    // factorization order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<S> = order.iter().map(|&j| d[j]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Householder reduction to tridiagonal form (EISPACK `tred2`).
fn tred2<S: Scalar>(v: &mut DenseMatrix<S>, d: &mut [S], e: &mut [S]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = S::zero();
        let mut h = S::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == S::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = S::zero();
                v[(j, i)] = S::zero();
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h += d[k] * d[k];
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > S::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = S::zero();
            }

            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = S::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let upd = v[(k, j)] - (f * e[k] + g * d[k]);
                    v[(k, j)] = upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = S::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate the Householder transformations.
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = S::one();
        let h = d[i + 1];
        if h != S::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = S::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = v[(k, j)] - g * d[k];
                    v[(k, j)] = upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = S::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = S::zero();
    }
    v[(n - 1, n - 1)] = S::one();
    e[0] = S::zero();
}

/// Tridiagonal QL with implicit shifts (EISPACK `tql2`).
fn tql2<S: Scalar>(v: &mut DenseMatrix<S>, d: &mut [S], e: &mut [S]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = S::zero();

    let mut f = S::zero();
    let mut tst1 = S::zero();
    let eps = S::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        // e[n-1] is zero, so this always stops.
        while e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > 64 {
                    return Err(Error::InvalidArgument(
                        "symmetric QL iteration failed to converge".into(),
                    ));
                }

                let g = d[l];
                let two = S::cst(2.0);
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(S::one());
                if p < S::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item = *item - h;
                }
                f = f + h;

                p = d[m];
                let mut c = S::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = S::zero();
                let mut s2 = S::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = S::zero();
    }
    Ok(())
}

/// Singular value decomposition `A = U Σ Vᵀ` of a square matrix.
#[derive(Debug, Clone)]
pub struct Svd<S: Scalar = f64> {
    pub u: DenseMatrix<S>,
    pub singular_values: Vec<S>,
    pub v: DenseMatrix<S>,
}

/// One-sided Jacobi SVD for small square matrices.
///
/// Rank-deficient inputs are handled by completing the null-space columns of
/// `U` to an orthonormal basis, so `U` and `V` are always fully orthogonal.
pub fn svd_square<S: Scalar>(a: &DenseMatrix<S>) -> Result<Svd<S>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "svd_square needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut b = a.clone();
    let mut v = DenseMatrix::identity(n);
    let eps = S::epsilon() * S::cst(16.0);

    for _sweep in 0..60 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = S::zero();
                let mut beta = S::zero();
                let mut gamma = S::zero();
                for k in 0..n {
                    alpha += b[(k, p)] * b[(k, p)];
                    beta += b[(k, q)] * b[(k, q)];
                    gamma += b[(k, p)] * b[(k, q)];
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == S::zero() {
                    continue;
                }
                off = off.max(gamma.abs() / (alpha * beta).sqrt().max(S::min_positive_value()));

                let zeta = (beta - alpha) / (S::cst(2.0) * gamma);
                let t = {
                    let sign = if zeta >= S::zero() { S::one() } else { -S::one() };
                    sign / (zeta.abs() + (S::one() + zeta * zeta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let bp = b[(k, p)];
                    let bq = b[(k, q)];
                    b[(k, p)] = c * bp - s * bq;
                    b[(k, q)] = s * bp + c * bq;
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = c * vp - s * vq;
                    v[(k, q)] = s * vp + c * vq;
                }
            }
        }
        if off <= eps {
            break;
        }
    }

    // Column norms are the singular values; normalize what is nonzero.
    let mut sigma: Vec<S> = (0..n)
        .map(|j| {
            let mut s = S::zero();
            for k in 0..n {
                s += b[(k, j)] * b[(k, j)];
            }
            s.sqrt()
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| sigma[y].partial_cmp(&sigma[x]).unwrap_or(std::cmp::Ordering::Equal));
    let mut u = DenseMatrix::zeros(n, n);
    let mut v_sorted = DenseMatrix::zeros(n, n);
    let scale = sigma.iter().fold(S::zero(), |acc, &s| acc.max(s));
    let rank_tol = scale * S::epsilon() * S::cst(n as f64).sqrt() * S::cst(8.0);
    let mut sorted_sigma = vec![S::zero(); n];
    for (new_j, &old_j) in order.iter().enumerate() {
        sorted_sigma[new_j] = sigma[old_j];
        for k in 0..n {
            v_sorted[(k, new_j)] = v[(k, old_j)];
        }
        if sigma[old_j] > rank_tol {
            for k in 0..n {
                u[(k, new_j)] = b[(k, old_j)] / sigma[old_j];
            }
        }
    }
    sigma = sorted_sigma;

    // Complete U where columns vanished (rank-deficient input).
    for j in 0..n {
        if sigma[j] > rank_tol {
            continue;
        }
        sigma[j] = S::zero();
        'candidates: for cand in 0..n {
            let mut col = vec![S::zero(); n];
            col[cand] = S::one();
            for prev in 0..n {
                if prev == j || (sigma[prev] == S::zero() && prev > j) {
                    continue;
                }
                let mut proj = S::zero();
                for k in 0..n {
                    proj += u[(k, prev)] * col[k];
                }
                for k in 0..n {
                    col[k] = col[k] - proj * u[(k, prev)];
                }
            }
            let norm = dot(&col, &col).sqrt();
            if norm > S::cst(1e-6) {
                for k in 0..n {
                    u[(k, j)] = col[k] / norm;
                }
                break 'candidates;
            }
        }
    }

    Ok(Svd { u, singular_values: sigma, v: v_sorted })
}

/// Haar-like random orthogonal matrix (Gram-Schmidt of a Gaussian matrix).
pub fn random_orthogonal<S: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> DenseMatrix<S> {
    let mut q = DenseMatrix::zeros(d, d);
    for j in 0..d {
        loop {
            let mut col: Vec<S> = (0..d).map(|_| S::standard_normal(rng)).collect();
            for prev in 0..j {
                let mut proj = S::zero();
                for k in 0..d {
                    proj += q[(k, prev)] * col[k];
                }
                for k in 0..d {
                    col[k] = col[k] - proj * q[(k, prev)];
                }
            }
            let norm = dot(&col, &col).sqrt();
            if norm > S::cst(1e-8) {
                for k in 0..d {
                    q[(k, j)] = col[k] / norm;
                }
                break;
            }
        }
    }
    q
}
