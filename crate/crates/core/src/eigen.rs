//! Dense eigensolvers.
//!
//! General complex matrices go through a Householder Hessenberg reduction and
//! a single-shift complex QR iteration (the LAPACK `zlahqr` scheme with
//! Wilkinson shifts, exceptional shifts every ten stalled sweeps and the
//! Ahues–Tisseur deflation test). Eigenvectors come from back substitution
//! on the triangular Schur factor.

use nalgebra::{DMatrix, DVector, Hessenberg, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

/// Eigenvalues with unit-norm right eigenvectors in matching columns.
///
/// Pairs are sorted by real part, then imaginary part; real parts within
/// `1e-12 * scale` of each other count as equal.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: DMatrix<C64>,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.vectors.column(k).into_owned()
    }
}

pub fn eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Structural(format!("eig needs a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let (mut t, mut z) = if n > 2 {
        let hess = Hessenberg::new(m.as_matrix().clone());
        let (q, h) = hess.unpack();
        (h, q)
    } else {
        (m.as_matrix().clone(), DMatrix::identity(n, n))
    };
    // Entries below the first subdiagonal are rounding noise after unpacking.
    for j in 0..n {
        for i in (j + 2)..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    schur_in_place(&mut t, &mut z)?;
    let x = triangular_eigenvectors(&t);
    let mut vectors = &z * x;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    order.sort_by(|&a, &b| diag[a].re.total_cmp(&diag[b].re).then(diag[a].im.total_cmp(&diag[b].im)));
    // Real parts that agree to rounding (conjugate pairs, say) are ordered
    // by imaginary part.
    let cluster_tol = 1e-12 * m.scale();
    let mut start = 0;
    for end in 1..=n {
        if end == n || diag[order[end]].re - diag[order[end - 1]].re > cluster_tol {
            order[start..end].sort_by(|&a, &b| diag[a].im.total_cmp(&diag[b].im));
            start = end;
        }
    }
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    if vectors.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::EigenNonConvergence(0));
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only; same algorithm as [`eig`].
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<C64>> {
    Ok(eig(m)?.values)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues and matching orthonormal eigenvectors of a
/// Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let se = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn smallest_singular_value(m: &DMatrix<C64>) -> f64 {
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with real `c`, mapping
/// `(f, g)` to `(r, 0)`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: C64,
}

impl Rotation {
    fn new(f: C64, g: C64) -> (Self, C64) {
        let g_norm = g.norm();
        if g_norm == 0.0 {
            return (Self { c: 1.0, s: C64::new(0.0, 0.0) }, f);
        }
        let f_norm = f.norm();
        if f_norm == 0.0 {
            return (Self { c: 0.0, s: g.conj() / g_norm }, C64::new(g_norm, 0.0));
        }
        let r_norm = f_norm.hypot(g_norm);
        let phase = f / f_norm;
        let c = f_norm / r_norm;
        let s = phase * g.conj() / r_norm;
        (Self { c, s }, phase * r_norm)
    }

    /// Rows `i`, `i + 1`, columns `cols`.
    fn apply_left(&self, a: &mut DMatrix<C64>, i: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = a[(i, j)];
            let y = a[(i + 1, j)];
            a[(i, j)] = x * self.c + self.s * y;
            a[(i + 1, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Multiplies columns `i`, `i + 1` by the adjoint from the right.
    fn apply_right_adjoint(&self, a: &mut DMatrix<C64>, i: usize, rows: std::ops::Range<usize>) {
        for k in rows {
            let x = a[(k, i)];
            let y = a[(k, i + 1)];
            a[(k, i)] = x * self.c + y * self.s.conj();
            a[(k, i + 1)] = -x * self.s + y * self.c;
        }
    }
}

fn eig22(a00: C64, a01: C64, a10: C64, a11: C64) -> (C64, C64) {
    let s = abs1(a00) + abs1(a01) + abs1(a10) + abs1(a11);
    if s == 0.0 {
        return (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    }
    let (a00, a01, a10, a11) = (a00 / s, a01 / s, a10 / s, a11 / s);
    let tr = (a00 + a11) * 0.5;
    let det = (a00 - tr) * (a00 - tr) + a01 * a10;
    let rt = det.sqrt();
    ((tr + rt) * s, (tr - rt) * s)
}

/// Reduces upper Hessenberg `t` to upper triangular form, accumulating the
/// unitary factor into `z`.
fn schur_in_place(t: &mut DMatrix<C64>, z: &mut DMatrix<C64>) -> Result<()> {
    let n = t.nrows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE / eps;
    let itmax = 30 * n.max(10) * n;
    let mut k_defl = 0usize;
    let mut istop = n;
    let mut istart = 0usize;

    for _ in 0..itmax {
        if istart + 1 >= istop {
            if istop <= 1 {
                return Ok(());
            }
            // One eigenvalue converged at `istart`; move to the block above.
            istop = istart;
            istart = 0;
            if istop <= 1 {
                return Ok(());
            }
            continue;
        }

        for i in (istart + 1..istop).rev() {
            if abs1(t[(i, i - 1)]) < smlnum {
                t[(i, i - 1)] = C64::new(0.0, 0.0);
                istart = i;
                break;
            }
            let mut tst = abs1(t[(i - 1, i - 1)]) + abs1(t[(i, i)]);
            if tst == 0.0 {
                if i >= 2 {
                    tst += abs1(t[(i - 1, i - 2)]);
                }
                if i + 1 < n {
                    tst += abs1(t[(i + 1, i)]);
                }
            }
            if abs1(t[(i, i - 1)]) <= eps * tst {
                let ab = abs1(t[(i, i - 1)]).max(abs1(t[(i - 1, i)]));
                let ba = abs1(t[(i, i - 1)]).min(abs1(t[(i - 1, i)]));
                let diff = abs1(t[(i, i)] - t[(i - 1, i - 1)]);
                let aa = abs1(t[(i, i)]).max(diff);
                let bb = abs1(t[(i, i)]).min(diff);
                let s = aa + ab;
                if ba * (ab / s) <= (eps * (bb * (aa / s))).max(smlnum) {
                    t[(i, i - 1)] = C64::new(0.0, 0.0);
                    istart = i;
                    break;
                }
            }
        }

        if istart + 1 >= istop {
            k_defl = 0;
            continue;
        }

        k_defl += 1;
        let (a00, a01, a10, a11) = if k_defl % 10 == 0 {
            let mut s = t[(istop - 1, istop - 2)].norm();
            if istop > 2 {
                s += t[(istop - 2, istop - 3)].norm();
            }
            let a00 = C64::new(0.75 * s, 0.0) + t[(istop - 1, istop - 1)];
            (a00, C64::new(s, 0.0), C64::new(-0.4375 * s, 0.0), a00)
        } else {
            (
                t[(istop - 2, istop - 2)],
                t[(istop - 2, istop - 1)],
                t[(istop - 1, istop - 2)],
                t[(istop - 1, istop - 1)],
            )
        };
        let (s1, s2) = eig22(a00, a01, a10, a11);
        let corner = t[(istop - 1, istop - 1)];
        let shift = if abs1(s1 - corner) > abs1(s2 - corner) { s2 } else { s1 };

        // Look for two consecutive small subdiagonals to start the bulge lower.
        let mut istart2 = istart;
        if istart + 2 < istop {
            for i in (istart + 1..istop - 1).rev() {
                let (rot, _) = Rotation::new(t[(i, i)] - shift, t[(i + 1, i)]);
                if abs1(rot.s.conj() * t[(i, i - 1)]) <= eps * (abs1(t[(i, i - 1)]) + abs1(t[(i, i + 1)])) {
                    istart2 = i;
                    break;
                }
            }
        }

        for i in istart2..istop - 1 {
            let rot = if i == istart2 {
                let (rot, _) = Rotation::new(t[(i, i)] - shift, t[(i + 1, i)]);
                if i > istart {
                    t[(i, i - 1)] *= rot.c;
                }
                rot
            } else {
                let (rot, r) = Rotation::new(t[(i, i - 1)], t[(i + 1, i - 1)]);
                t[(i, i - 1)] = r;
                t[(i + 1, i - 1)] = C64::new(0.0, 0.0);
                rot
            };
            rot.apply_left(t, i, i..n);
            rot.apply_right_adjoint(t, i, 0..(i + 3).min(istop));
            rot.apply_right_adjoint(z, i, 0..n);
        }
    }
    Err(Error::EigenNonConvergence(itmax))
}

/// Columns `x_k` with `T x_k = T_kk x_k`, `x_k[k] = 1`, zero below `k`.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let norm = t.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let smin_floor = (f64::EPSILON * norm).max(f64::MIN_POSITIVE * 1e3);
    let mut x = DMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let smin = (f64::EPSILON * lambda.norm()).max(smin_floor);
        let mut col = vec![C64::new(0.0, 0.0); k + 1];
        col[k] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut sum = C64::new(0.0, 0.0);
            for (l, &cl) in col.iter().enumerate().skip(j + 1) {
                sum += t[(j, l)] * cl;
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            // Scaled division: `d` may be tiny enough for |d|² to underflow.
            let s = abs1(d);
            col[j] = -(sum / s) / (d / s);
            let big = col[j].norm();
            if big > 1e100 {
                for c in col.iter_mut() {
                    *c /= big;
                }
            }
        }
        for (i, c) in col.into_iter().enumerate() {
            x[(i, k)] = c;
        }
    }
    x
}
