//! Small dense numerical kernels: eigenvalues, singular values and rank,
//! RK4 stepping, finite-difference Jacobians and complex quadratic roots.

mod eigen;
mod fd;
mod matrix;
mod ode;
mod poly;
mod svd;

pub use eigen::{eigenvalues, Spectrum, MAX_EIGEN_DIM, QR_SWEEPS_PER_DIM};
pub use fd::{jacobian_fd, DEFAULT_FD_STEP};
pub use matrix::DenseMatrix;
pub use ode::rk4_step;
pub use poly::quadratic_roots_complex;
pub use svd::{numerical_rank, rank_from_singular_values, singular_values, DEFAULT_RANK_TOL};
