//! Eigenvalues of small dense matrices.
//!
//! Real input goes through balancing, Gaussian-elimination Hessenberg
//! reduction and the Francis double-shift QR iteration, which keeps complex
//! eigenvalues in exact conjugate pairs. Complex input uses the same
//! reduction followed by a single-shift (Wilkinson) QR iteration with Givens
//! rotations.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{DabError, Result};

/// Largest matrix dimension accepted by [`eigenvalues`].
pub const MAX_EIGEN_DIM: usize = 16;

/// QR sweeps allowed per unit of dimension.
pub const QR_SWEEPS_PER_DIM: usize = 100;

/// Eigenvalues sorted by descending real part, ties broken by descending
/// imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(compare_eigenvalues);
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalue with the largest real part.
    pub fn dominant(&self) -> Option<Complex64> {
        self.eigenvalues.first().copied()
    }

    pub fn max_real(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_hurwitz(&self) -> bool {
        self.eigenvalues.iter().all(|z| z.re < 0.0)
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn product(&self) -> Complex64 {
        self.eigenvalues.iter().product()
    }
}

fn compare_eigenvalues(a: &Complex64, b: &Complex64) -> Ordering {
    b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal).then(b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal))
}

/// All eigenvalues of a square matrix of dimension at most
/// [`MAX_EIGEN_DIM`].
pub fn eigenvalues(m: &DenseMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(DabError::Dimension(format!("eigenvalues of a {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > MAX_EIGEN_DIM {
        return Err(DabError::Dimension(format!("dimension {n} exceeds {MAX_EIGEN_DIM}")));
    }
    if !m.is_finite() {
        return Err(DabError::Domain { what: "matrix entry", value: f64::NAN, domain: "finite" });
    }
    if n == 0 {
        return Ok(Spectrum::new(Vec::new()));
    }
    let values = if m.is_real() {
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        balance_real(&mut a);
        hessenberg_real(&mut a);
        hqr(&mut a)?
    } else {
        let mut a: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
        balance_complex(&mut a);
        hessenberg_complex(&mut a);
        complex_qr(&mut a)?
    };
    Ok(Spectrum::new(values))
}

const RADIX: f64 = 2.0;

fn balance_real(a: &mut [Vec<f64>]) {
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn balance_complex(a: &mut [Vec<Complex64>]) {
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let abs1 = |z: Complex64| z.re.abs() + z.im.abs();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[j][i]);
                    r += abs1(a[i][j]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transforms. Entries below the subdiagonal are zeroed on exit.
fn hessenberg_real(a: &mut [Vec<f64>]) {
    let n = a.len();
    for m in 1..n.saturating_sub(1) {
        let mut x = 0.0f64;
        let mut piv = m;
        for (j, row) in a.iter().enumerate().skip(m) {
            if row[m - 1].abs() > x.abs() {
                x = row[m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != 0.0 {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        let amj = a[m][j];
                        a[i][j] -= y * amj;
                    }
                    for row in a.iter_mut() {
                        let ri = row[i];
                        row[m] += y * ri;
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = 0.0;
        }
    }
}

fn hessenberg_complex(a: &mut [Vec<Complex64>]) {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    for m in 1..n.saturating_sub(1) {
        let mut x = zero;
        let mut piv = m;
        for (j, row) in a.iter().enumerate().skip(m) {
            if row[m - 1].norm() > x.norm() {
                x = row[m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != zero {
            for i in m + 1..n {
                let mut y = a[i][m - 1];
                if y != zero {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..n {
                        let amj = a[m][j];
                        a[i][j] -= y * amj;
                    }
                    for row in a.iter_mut() {
                        let ri = row[i];
                        row[m] += y * ri;
                    }
                }
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = zero;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let cap = QR_SWEEPS_PER_DIM * n;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for (i, row) in a.iter().enumerate() {
        for v in row.iter().skip(i.saturating_sub(1)) {
            anorm += v.abs();
        }
    }
    let mut total = 0usize;
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    let (mut p, mut q, mut r): (f64, f64, f64);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[nu - 1][nu - 1];
            let mut w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nu - 1 {
                p = 0.5 * (y - x);
                q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != 0.0 {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if total >= cap {
                return Err(DabError::NoConvergence { iterations: total });
            }
            if its > 0 && its % 10 == 0 {
                // exceptional shift
                t += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            let mut m = nu - 2;
            let mut z;
            loop {
                z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = 0.0;
                    if k != nu - 1 {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k != nu - 1 {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for row in a.iter_mut().take(mmin + 1).skip(l) {
                        p = x * row[k] + y * row[k + 1];
                        if k != nu - 1 {
                            p += z * row[k + 2];
                            row[k + 2] -= p * r;
                        }
                        row[k + 1] -= p * q;
                        row[k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

/// Single-shift QR with Wilkinson shifts on a complex Hessenberg matrix.
fn complex_qr(a: &mut [Vec<Complex64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let cap = QR_SWEEPS_PER_DIM * n;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; n];
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    loop {
        if hi == 0 {
            out[0] = a[0][0];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = a[l - 1][l - 1].norm() + a[l][l].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if a[l][l - 1].norm() <= f64::EPSILON * s {
                a[l][l - 1] = zero;
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = a[hi][hi];
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= cap {
            return Err(DabError::NoConvergence { iterations: total });
        }
        total += 1;
        its += 1;

        let aa = a[hi - 1][hi - 1];
        let bb = a[hi - 1][hi];
        let cc = a[hi][hi - 1];
        let dd = a[hi][hi];
        let mu = if its.is_multiple_of(11) {
            dd + Complex64::new(a[hi][hi - 1].norm(), 0.0)
        } else {
            let half = (aa - dd) * 0.5;
            let disc = (half * half + bb * cc).sqrt();
            let m1 = (aa + dd) * 0.5 + disc;
            let m2 = (aa + dd) * 0.5 - disc;
            if (m1 - dd).norm() < (m2 - dd).norm() {
                m1
            } else {
                m2
            }
        };

        for (k, row) in a.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[k] -= mu;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - l);
        for k in l..hi {
            let x = a[k][k];
            let y = a[k + 1][k];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, zero)
            } else if x.norm() == 0.0 {
                (0.0, y.conj() / y.norm())
            } else {
                let c = x.norm() / r;
                (c, (x / x.norm()) * y.conj() / r)
            };
            for j in k..=hi {
                let u = a[k][j];
                let v = a[k + 1][j];
                a[k][j] = u * c + s * v;
                a[k + 1][j] = -s.conj() * u + v * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            let top = (k + 2).min(hi);
            for row in a.iter_mut().take(top + 1).skip(l) {
                let u = row[k];
                let v = row[k + 1];
                row[k] = u * c + s.conj() * v;
                row[k + 1] = -s * u + v * c;
            }
        }
        for (k, row) in a.iter_mut().enumerate().take(hi + 1).skip(l) {
            row[k] += mu;
        }
    }
    Ok(out)
}
