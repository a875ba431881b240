//! Dense symmetric eigensolver and determinant helpers.
//!
//! Matrices that commute with the reversal permutation `p <-> N-1-p` (every ring and
//! chain built in [`crate::model`]) are first split into even and odd blocks. For the
//! hopping matrices those blocks are already tridiagonal, so the Householder stage
//! is skipped and only implicit-shift QL runs on each block. Anything else goes
//! through Householder tridiagonalization first.

use nalgebra::DMatrix;

use crate::{Error, Result};

const QL_MAX_SWEEPS: usize = 60;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending, eigenvectors in
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn is_symmetric(a: &DMatrix<f64>) -> bool {
    if !a.is_square() {
        return false;
    }
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|k| a[(i, k)] == a[(k, i)]))
}

pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    if !is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let (values, vectors) = if n >= 4 && is_reversal_symmetric(a) {
        reversal_split_eigen(a)?
    } else {
        let (v, z) = block_eigen(a)?;
        (v, z)
    };
    Ok(sorted(values, vectors))
}

fn is_reversal_symmetric(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (0..=i).all(|k| a[(i, k)] == a[(n - 1 - i, n - 1 - k)]))
}

/// Eigen-decomposition through the even/odd blocks of the reversal symmetry.
fn reversal_split_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let half = n / 2;
    let centre = n % 2 == 1;
    let ne = half + usize::from(centre);
    let r = |p: usize| n - 1 - p;

    let mut even = DMatrix::zeros(ne, ne);
    let mut odd = DMatrix::zeros(half, half);
    for p in 0..half {
        for q in 0..half {
            even[(p, q)] = a[(p, q)] + a[(p, r(q))];
            odd[(p, q)] = a[(p, q)] - a[(p, r(q))];
        }
    }
    if centre {
        let c = half;
        for p in 0..half {
            let v = std::f64::consts::SQRT_2 * a[(p, c)];
            even[(p, c)] = v;
            even[(c, p)] = v;
        }
        even[(c, c)] = a[(c, c)];
    }
    // Symmetrize away rounding in the sums above; the blocks are symmetric in exact
    // arithmetic.
    symmetrize(&mut even);
    symmetrize(&mut odd);

    let (ev, ez) = block_eigen(&even)?;
    let (ov, oz) = block_eigen(&odd)?;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut values = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &lambda) in ev.iter().enumerate() {
        values.push(lambda);
        let k = values.len() - 1;
        for p in 0..half {
            vectors[(p, k)] = s * ez[(p, col)];
            vectors[(r(p), k)] = s * ez[(p, col)];
        }
        if centre {
            vectors[(half, k)] = ez[(half, col)];
        }
    }
    for (col, &lambda) in ov.iter().enumerate() {
        values.push(lambda);
        let k = values.len() - 1;
        for p in 0..half {
            vectors[(p, k)] = s * oz[(p, col)];
            vectors[(r(p), k)] = -s * oz[(p, col)];
        }
    }
    Ok((values, vectors))
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for k in 0..i {
            let v = 0.5 * (a[(i, k)] + a[(k, i)]);
            a[(i, k)] = v;
            a[(k, i)] = v;
        }
    }
}

fn is_tridiagonal(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    (0..n).all(|i| (0..n).all(|k| i.abs_diff(k) <= 1 || a[(i, k)] == 0.0))
}

/// Unsorted eigenpairs of one symmetric block.
fn block_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], DMatrix::zeros(0, 0)));
    }
    if is_tridiagonal(a) {
        let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let mut e: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { a[(i, i + 1)] } else { 0.0 })
            .collect();
        let mut z = DMatrix::identity(n, n);
        tridiagonal_ql(&mut d, &mut e, &mut z)?;
        Ok((d, z))
    } else {
        let (mut d, mut e, mut z) = householder_tridiagonalize(a);
        tridiagonal_ql(&mut d, &mut e, &mut z)?;
        Ok((d, z))
    }
}

fn sorted(values: Vec<f64>, vectors: DMatrix<f64>) -> SymmetricEigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut out = DMatrix::zeros(vectors.nrows(), n);
    for (k, &src) in order.iter().enumerate() {
        out.column_mut(k).copy_from(&vectors.column(src));
    }
    SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors: out,
    }
}

/// Householder reduction of a symmetric matrix to tridiagonal form.
///
/// Returns the diagonal `d`, the off-diagonal `e` with `e[i]` coupling `i` and
/// `i+1` (`e[n-1] = 0`), and the orthogonal `Q` with `Q^T A Q` tridiagonal.
pub fn householder_tridiagonalize(a: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    // Row-major working copy: v[i][j] = a[(i, j)].
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut d: Vec<f64> = v[n - 1].clone();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;

    // e[i] currently couples i-1 and i; shift to the i, i+1 convention.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let q = DMatrix::from_fn(n, n, |i, j| v[i][j]);
    (d, e, q)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and `e[i]` the coupling between `i` and `i+1`; on return
/// `d` holds the (unsorted) eigenvalues and the columns of `z` have been rotated
/// so that, if `z` started as the matrix reducing some `A` to this tridiagonal
/// form, they are the eigenvectors of `A`.
pub fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut DMatrix<f64>) -> Result<()> {
    let n = d.len();
    if e.len() != n {
        return Err(Error::DimensionMismatch(e.len(), n));
    }
    if z.ncols() != n {
        return Err(Error::DimensionMismatch(z.ncols(), n));
    }
    let rows = z.nrows();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let zs = z.as_mut_slice();

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::NoConvergence {
                        index: l,
                        iterations: QL_MAX_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
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

                    let (left, right) = zs.split_at_mut((i + 1) * rows);
                    let zi = &mut left[i * rows..];
                    let zi1 = &mut right[..rows];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
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
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Determinant through LU factorization with partial pivoting.
pub fn determinant(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    a.clone().lu().determinant()
}
