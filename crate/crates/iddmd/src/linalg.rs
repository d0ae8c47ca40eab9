//! Dense linear algebra kernels used by the identification pipeline.
//!
//! Thin wrappers over LAPACK (reference netlib, linked from the system) for
//! the three operations everything else is built on: thin SVD, dense
//! eigendecomposition of a real general matrix, and complex least squares.
//! All wrappers convert between ndarray's row-major layout and LAPACK's
//! column-major expectation and fix deterministic sign/phase conventions so
//! repeated runs produce identical output.

use ndarray::{Array1, Array2, ShapeBuilder};
use num_complex::Complex64;

use crate::error::{Error, Result};

// Links the system BLAS/LAPACK; nothing is used from the crate itself.
extern crate netlib_src as _;

fn to_col_major(a: &Array2<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len());
    for col in a.columns() {
        v.extend(col.iter());
    }
    v
}

fn from_col_major(rows: usize, cols: usize, v: Vec<f64>) -> Array2<f64> {
    Array2::from_shape_vec((rows, cols).f(), v).expect("shape/buffer mismatch")
}

/// Thin SVD `a = u * diag(sigma) * v^T` with `min(m, n)` factors.
///
/// The sign of each left singular vector is fixed so its largest-magnitude
/// entry is positive; the matching right vector is negated in step.
pub fn thin_svd(a: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("svd of an empty matrix".into()));
    }
    let k = m.min(n);
    let mut buf = to_col_major(a);
    let mut s = vec![0.0; k];
    let mut u = vec![0.0; m * k];
    let mut vt = vec![0.0; k * n];
    let mut iwork = vec![0i32; 8 * k];
    let mut info = 0;
    // Workspace query, then the real call.
    let mut work = vec![0.0; 1];
    unsafe {
        lapack::dgesdd(
            b'S', m as i32, n as i32, &mut buf, m as i32, &mut s, &mut u, m as i32, &mut vt,
            k as i32, &mut work, -1, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgesdd", info });
    }
    let lwork = work[0] as usize;
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dgesdd(
            b'S', m as i32, n as i32, &mut buf, m as i32, &mut s, &mut u, m as i32, &mut vt,
            k as i32, &mut work, lwork as i32, &mut iwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgesdd", info });
    }

    let mut u = from_col_major(m, k, u);
    // vt arrives k x n column-major; transpose into v (n x k).
    let vt = from_col_major(k, n, vt);
    let mut v = vt.t().to_owned();
    for j in 0..k {
        let col = u.column(j);
        let mut imax = 0;
        let mut amax = 0.0;
        for (i, &x) in col.iter().enumerate() {
            if x.abs() > amax {
                amax = x.abs();
                imax = i;
            }
        }
        if u[(imax, j)] < 0.0 {
            u.column_mut(j).mapv_inplace(|x| -x);
            v.column_mut(j).mapv_inplace(|x| -x);
        }
    }
    Ok((u, Array1::from(s), v))
}

/// Eigenvalues and right eigenvectors of a real general square matrix.
///
/// Conjugate pairs are assembled into complex vectors; every eigenvector is
/// rescaled so its largest-magnitude entry is real and positive.
pub fn eig(a: &Array2<f64>) -> Result<(Vec<Complex64>, Array2<Complex64>)> {
    let (m, n) = a.dim();
    if m != n {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {m}x{n}"
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    let mut buf = to_col_major(a);
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut vl = vec![0.0; 1];
    let mut vr = vec![0.0; n * n];
    let mut info = 0;
    let mut work = vec![0.0; 1];
    unsafe {
        lapack::dgeev(
            b'N', b'V', n as i32, &mut buf, n as i32, &mut wr, &mut wi, &mut vl, 1, &mut vr,
            n as i32, &mut work, -1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgeev", info });
    }
    let lwork = work[0] as usize;
    let mut work = vec![0.0; lwork];
    unsafe {
        lapack::dgeev(
            b'N', b'V', n as i32, &mut buf, n as i32, &mut wr, &mut wi, &mut vl, 1, &mut vr,
            n as i32, &mut work, lwork as i32, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "dgeev", info });
    }

    let vr = from_col_major(n, n, vr);
    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::<Complex64>::zeros((n, n));
    let mut j = 0;
    while j < n {
        if wi[j] == 0.0 {
            values.push(Complex64::new(wr[j], 0.0));
            for i in 0..n {
                vectors[(i, j)] = Complex64::new(vr[(i, j)], 0.0);
            }
            j += 1;
        } else {
            // LAPACK stores the pair as vr[:,j] +/- i*vr[:,j+1].
            values.push(Complex64::new(wr[j], wi[j]));
            values.push(Complex64::new(wr[j + 1], wi[j + 1]));
            for i in 0..n {
                let re = vr[(i, j)];
                let im = vr[(i, j + 1)];
                vectors[(i, j)] = Complex64::new(re, im);
                vectors[(i, j + 1)] = Complex64::new(re, -im);
            }
            j += 2;
        }
    }
    for j in 0..n {
        let col = vectors.column(j);
        let mut imax = 0;
        let mut amax = 0.0;
        for (i, z) in col.iter().enumerate() {
            if z.norm() > amax {
                amax = z.norm();
                imax = i;
            }
        }
        if amax > 0.0 {
            let phase = vectors[(imax, j)].conj() / amax;
            vectors.column_mut(j).mapv_inplace(|z| z * phase);
        }
    }
    Ok((values, vectors))
}

/// Minimum-norm least-squares solution of `a x = b` for complex matrices.
///
/// Returns the solution and the effective rank LAPACK used; a rank below
/// `a.ncols()` signals a rank-deficient system.
pub fn lstsq_complex(a: &Array2<Complex64>, b: &[Complex64]) -> Result<(Array1<Complex64>, usize)> {
    let (m, n) = a.dim();
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "least squares: matrix has {m} rows but rhs has {}",
            b.len()
        )));
    }
    let mut abuf = Vec::with_capacity(m * n);
    for col in a.columns() {
        abuf.extend(col.iter().copied());
    }
    let ldb = m.max(n);
    let mut bbuf = vec![Complex64::new(0.0, 0.0); ldb];
    bbuf[..m].copy_from_slice(b);
    let k = m.min(n);
    let mut s = vec![0.0; k];
    let mut rank = 0;
    let mut rwork = vec![0.0; 5 * k.max(1)];
    let mut info = 0;
    let mut work = vec![Complex64::new(0.0, 0.0); 1];
    unsafe {
        lapack::zgelss(
            m as i32, n as i32, 1, &mut abuf, m as i32, &mut bbuf, ldb as i32, &mut s, -1.0,
            &mut rank, &mut work, -1, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgelss", info });
    }
    let lwork = work[0].re as usize;
    let mut work = vec![Complex64::new(0.0, 0.0); lwork];
    unsafe {
        lapack::zgelss(
            m as i32, n as i32, 1, &mut abuf, m as i32, &mut bbuf, ldb as i32, &mut s, -1.0,
            &mut rank, &mut work, lwork as i32, &mut rwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Lapack { routine: "zgelss", info });
    }
    Ok((Array1::from(bbuf[..n].to_vec()), rank as usize))
}

/// Frobenius norm.
pub fn fro_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
