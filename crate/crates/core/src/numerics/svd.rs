use num_complex::Complex64;

use super::DenseMatrix;

/// Default relative tolerance for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    // orthogonalize the shorter side's columns
    let work = if m.cols() > m.rows() { m.conj_transpose() } else { m.clone() };
    let rows = work.rows();
    let n = work.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..rows).map(|i| work[(i, j)]).collect()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = *b * phase.conj();
                    let ap = *a;
                    *a = ap * c - bq * s;
                    *b = ap * s + bq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `tol_rel * sigma_max`.
pub fn numerical_rank(m: &DenseMatrix, tol_rel: f64) -> usize {
    rank_from_singular_values(&singular_values(m), tol_rel)
}

pub fn rank_from_singular_values(sv: &[f64], tol_rel: f64) -> usize {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol_rel * smax).count()
}
