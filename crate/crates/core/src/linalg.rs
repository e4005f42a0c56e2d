//! Small dense symmetric eigenproblems (dimension 2 or 3 in practice).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances::Tolerances;

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is signed so that its
/// largest-magnitude component is positive.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> SymmetricEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigen needs a square matrix");
    let mut m = a.clone();
    // Symmetrise away rounding noise from the caller.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| m[(i, i)] * m[(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut vec = v.column(i).clone_owned();
        fix_sign(&mut vec);
        vectors.set_column(col, &vec);
    }
    SymmetricEigen { values, vectors }
}

fn fix_sign(v: &mut DVector<f64>) {
    let lead = v
        .iter()
        .copied()
        .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if lead < 0.0 {
        v.neg_mut();
    }
}

/// Rejects asymmetric, non-finite or (near-)singular metrics.
pub fn check_metric(g: &DMatrix<f64>, tol: &Tolerances) -> Result<()> {
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("metric"));
    }
    let scale = g.amax().max(f64::MIN_POSITIVE);
    let asym = (g - g.transpose()).amax();
    if asym > tol.symmetry * scale {
        return Err(Error::AsymmetricMetric(asym));
    }
    let eig = jacobi_eigen(g);
    let min = eig.values[0];
    let max = *eig.values.last().expect("non-empty matrix");
    if max <= 0.0 || min <= tol.degenerate_eig_ratio * max {
        return Err(Error::DegenerateMetric {
            min_eig: min,
            max_eig: max,
        });
    }
    if g.determinant() < tol.min_determinant {
        return Err(Error::DegenerateMetric {
            min_eig: min,
            max_eig: max,
        });
    }
    Ok(())
}

/// Generalized symmetric-definite problem `A x = lambda B x`.
///
/// Reduces through the Cholesky factor `B = L L^T` to the standard problem for
/// `L^-1 A L^-T`. Returned eigenvectors are `B`-orthonormal, sorted ascending.
pub fn generalized_eigen(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<SymmetricEigen> {
    check_metric(b, tol)?;
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.nrows(),
        });
    }
    let chol = b.clone().cholesky().ok_or(Error::DegenerateMetric {
        min_eig: 0.0,
        max_eig: 0.0,
    })?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().ok_or(Error::DegenerateMetric {
        min_eig: 0.0,
        max_eig: 0.0,
    })?;
    let reduced = &l_inv * a * l_inv.transpose();
    let std = jacobi_eigen(&reduced);
    let mut vectors = l_inv.transpose() * std.vectors;
    for mut col in vectors.column_iter_mut() {
        let lead = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if lead < 0.0 {
            col.neg_mut();
        }
    }
    Ok(SymmetricEigen {
        values: std.values,
        vectors,
    })
}
