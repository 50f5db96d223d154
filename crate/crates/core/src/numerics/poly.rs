use num_complex::Complex64;

use crate::error::{DabError, Result};

/// Roots of `a0*z^2 + a1*z + a2` with complex coefficients.
///
/// The larger-magnitude root comes from the branch of the square root that
/// adds to `a1` constructively; the other follows from Vieta's product, so
/// neither root suffers cancellation.
pub fn quadratic_roots_complex(a0: Complex64, a1: Complex64, a2: Complex64) -> Result<(Complex64, Complex64)> {
    if a0.norm() == 0.0 {
        return Err(DabError::DegeneratePolynomial);
    }
    let disc = (a1 * a1 - a0 * a2 * 4.0).sqrt();
    let sq = if (a1.conj() * disc).re >= 0.0 { disc } else { -disc };
    let q = -(a1 + sq) * 0.5;
    if q.norm() == 0.0 {
        // a1 = 0 and a2 = 0
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    Ok((q / a0, a2 / q))
}
