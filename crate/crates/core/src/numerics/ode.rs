use crate::error::{DabError, Result};

/// One classical fourth-order Runge-Kutta step of `dx/dt = rhs(t, x)`.
pub fn rk4_step<const N: usize, F>(mut rhs: F, x: &[f64; N], t: f64, dt: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0) {
        return Err(DabError::Domain { what: "dt", value: dt, domain: "(0, inf)" });
    }
    let check = |k: &[f64; N]| -> Result<()> {
        if k.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(DabError::IntegrationBlowup { t })
        }
    };
    let axpy = |a: f64, k: &[f64; N]| -> [f64; N] {
        let mut y = *x;
        for (yi, ki) in y.iter_mut().zip(k) {
            *yi += a * ki;
        }
        y
    };
    let k1 = rhs(t, x);
    check(&k1)?;
    let k2 = rhs(t + 0.5 * dt, &axpy(0.5 * dt, &k1));
    check(&k2)?;
    let k3 = rhs(t + 0.5 * dt, &axpy(0.5 * dt, &k2));
    check(&k3)?;
    let k4 = rhs(t + dt, &axpy(dt, &k3));
    check(&k4)?;
    let mut out = *x;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(DabError::IntegrationBlowup { t: t + dt })
    }
}
