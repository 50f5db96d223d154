use super::DenseMatrix;

/// Default relative step for [`jacobian_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Central-difference Jacobian of `f` at `x0`. The step for component `k` is
/// `h_rel * max(|x0[k]|, 1)`.
pub fn jacobian_fd<F>(f: F, x0: &[f64], h_rel: f64) -> DenseMatrix
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let m = f(x0).len();
    let mut jac = DenseMatrix::zeros(m, n);
    let mut x = x0.to_vec();
    for k in 0..n {
        let h = h_rel * x0[k].abs().max(1.0);
        x[k] = x0[k] + h;
        let fp = f(&x);
        x[k] = x0[k] - h;
        let fm = f(&x);
        x[k] = x0[k];
        for i in 0..m {
            jac[(i, k)].re = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_is_recovered() {
        let a = [[1.0, -2.0, 0.5], [3.0, 0.0, 4.0]];
        let f = |x: &[f64]| -> Vec<f64> { a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect() };
        let j = jacobian_fd(f, &[0.3, -1.0, 2.0], DEFAULT_FD_STEP);
        for i in 0..2 {
            for k in 0..3 {
                assert!((j[(i, k)].re - a[i][k]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn hand_derivative() {
        let f = |x: &[f64]| vec![x[0] * x[0], x[0] * x[1]];
        let j = jacobian_fd(f, &[1.0, 1.0], DEFAULT_FD_STEP);
        let expected = [[2.0, 0.0], [1.0, 1.0]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[(i, k)].re - expected[i][k]).abs() < 1e-6);
            }
        }
    }
}
