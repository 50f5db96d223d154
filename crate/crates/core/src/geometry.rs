//! Geometric control analysis of the switched model written as
//! `x' = f(x) + g1(x) s1 + g2(x) s2` with outputs `Vc1`, `Vc2`.
//!
//! Every field of this model is affine, so Jacobians are exact constants and
//! brackets of affine fields stay affine.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{to_time_frame, FullState};
use crate::numerics::{rank_from_singular_values, singular_values, DenseMatrix, DEFAULT_RANK_TOL};
use crate::optsolve::OperatingPoint;
use crate::params::ConverterParams;
use crate::zvs::instantaneous_current;

pub const STATE_DIM: usize = 5;
type Vec5 = [f64; STATE_DIM];
type Mat5 = [[f64; STATE_DIM]; STATE_DIM];

pub trait VectorField {
    fn eval(&self, x: &Vec5) -> Vec5;
    fn jacobian(&self, x: &Vec5) -> Mat5;
}

fn mat_vec(a: &Mat5, x: &Vec5) -> Vec5 {
    let mut y = [0.0; STATE_DIM];
    for (yi, row) in y.iter_mut().zip(a) {
        *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    y
}

fn mat_mul(a: &Mat5, b: &Mat5) -> Mat5 {
    let mut c = [[0.0; STATE_DIM]; STATE_DIM];
    for i in 0..STATE_DIM {
        for k in 0..STATE_DIM {
            for j in 0..STATE_DIM {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `v(x) = A x + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineField {
    pub a: Mat5,
    pub b: Vec5,
}

impl AffineField {
    pub fn zero() -> Self {
        Self { a: [[0.0; STATE_DIM]; STATE_DIM], b: [0.0; STATE_DIM] }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { a: self.a.map(|r| r.map(|v| v * s)), b: self.b.map(|v| v * s) }
    }

    /// `[self, other] = (A_o A_s - A_s A_o) x + (A_o b_s - A_s b_o)`.
    pub fn bracket(&self, other: &AffineField) -> AffineField {
        let p = mat_mul(&other.a, &self.a);
        let q = mat_mul(&self.a, &other.a);
        let u = mat_vec(&other.a, &self.b);
        let w = mat_vec(&self.a, &other.b);
        let mut out = AffineField::zero();
        for i in 0..STATE_DIM {
            for j in 0..STATE_DIM {
                out.a[i][j] = p[i][j] - q[i][j];
            }
            out.b[i] = u[i] - w[i];
        }
        out
    }
}

impl VectorField for AffineField {
    fn eval(&self, x: &Vec5) -> Vec5 {
        let mut y = mat_vec(&self.a, x);
        for (yi, bi) in y.iter_mut().zip(&self.b) {
            *yi += bi;
        }
        y
    }

    fn jacobian(&self, _x: &Vec5) -> Mat5 {
        self.a
    }
}

/// `[v, w](x0) = Jw(x0) v(x0) - Jv(x0) w(x0)`.
pub fn lie_bracket<V: VectorField + ?Sized, W: VectorField + ?Sized>(v: &V, w: &W, x0: &Vec5) -> Vec5 {
    let a = mat_vec(&w.jacobian(x0), &v.eval(x0));
    let b = mat_vec(&v.jacobian(x0), &w.eval(x0));
    [0, 1, 2, 3, 4].map(|i| a[i] - b[i])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineSystem {
    pub f: AffineField,
    pub g: [AffineField; 2],
    /// Indices of the measured states (`Vc1`, `Vc2`).
    pub outputs: [usize; 2],
}

impl AffineSystem {
    /// Switched model with a fixed load current `io`.
    pub fn from_params(p: &ConverterParams, io: f64) -> Self {
        let a = p.winding_matrix();
        let b = p.drive_matrix();
        let mut f = AffineField::zero();
        f.a[0][0] = -p.r / p.ld;
        f.a[0][1] = -1.0 / p.ld;
        f.b[0] = p.v1 / p.ld;
        f.a[1][0] = 1.0 / p.c1;
        f.a[2][2] = a[0][0];
        f.a[2][3] = a[0][1];
        f.a[3][2] = a[1][0];
        f.a[3][3] = a[1][1];
        f.b[4] = -io / p.c2;
        let mut g1 = AffineField::zero();
        g1.a[1][2] = -1.0 / p.c1;
        g1.a[2][1] = b[0][0];
        g1.a[3][1] = b[1][0];
        let mut g2 = AffineField::zero();
        g2.a[2][4] = b[0][1];
        g2.a[3][4] = b[1][1];
        g2.a[4][3] = p.n / p.c2;
        Self { f, g: [g1, g2], outputs: [1, 4] }
    }

    /// `ad_f^k g_j` as affine fields.
    pub fn ad_f(&self, j: usize, k: usize) -> AffineField {
        (0..k).fold(self.g[j], |acc, _| self.f.bracket(&acc))
    }
}

/// Switched-model state standing in for an envelope point: dc states as
/// solved, winding currents reconstructed at `theta`.
pub fn representative_state(op: &OperatingPoint, theta: f64) -> FullState {
    let x = &op.state;
    FullState {
        id: x.id,
        vc1: x.vc1,
        i1: instantaneous_current(to_time_frame(x.i_qd1()), theta),
        i2: instantaneous_current(to_time_frame(x.i_qd2()), theta),
        vc2: x.vc2,
    }
}

pub const DEFAULT_REPRESENTATIVE_ANGLE: f64 = FRAC_PI_4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    /// Singular values of the column-normalized matrix, descending.
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
}

fn rank_report(columns: &[Vec5], tol: f64) -> RankReport {
    // column scaling leaves the rank unchanged and equalizes bracket depths
    let normed: Vec<Vec5> = columns
        .iter()
        .map(|c| {
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                c.map(|v| v / n)
            } else {
                *c
            }
        })
        .collect();
    let m = DenseMatrix::from_fn(STATE_DIM, normed.len(), |i, j| Complex64::from(normed[j][i]));
    let sv = singular_values(&m);
    RankReport { rank: rank_from_singular_values(&sv, tol), singular_values: sv, tolerance: tol }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controllability {
    /// 5 x 10 matrix with columns `ad_f^i g_j(x0)`, `i = 0..4`, `j = 1, 2`.
    pub matrix: DenseMatrix,
    pub rank: RankReport,
    /// Rank using bracket depths `0..=k`, for `k = 0..4`.
    pub rank_by_depth: Vec<usize>,
}

pub fn controllability_matrix(x0: &Vec5, sys: &AffineSystem) -> Controllability {
    let mut cols = Vec::with_capacity(2 * STATE_DIM);
    let mut rank_by_depth = Vec::with_capacity(STATE_DIM);
    for depth in 0..STATE_DIM {
        for j in 0..2 {
            cols.push(sys.ad_f(j, depth).eval(x0));
        }
        rank_by_depth.push(rank_report(&cols, DEFAULT_RANK_TOL).rank);
    }
    let matrix = DenseMatrix::from_fn(STATE_DIM, cols.len(), |i, j| Complex64::from(cols[j][i]));
    Controllability { matrix, rank: rank_report(&cols, DEFAULT_RANK_TOL), rank_by_depth }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observability {
    /// 10 x 5 stack of `d(L_f^i h_j)`, `i = 0..4`.
    pub matrix: DenseMatrix,
    pub rank: RankReport,
    pub fully_observable: bool,
}

/// For affine drift `f = F x + c`, `d(L_f^i h) = e_h^T F^i`.
pub fn observability_matrix(_x0: &Vec5, sys: &AffineSystem) -> Observability {
    let mut rows = Vec::with_capacity(2 * STATE_DIM);
    for &out in &sys.outputs {
        let mut row = [0.0; STATE_DIM];
        row[out] = 1.0;
        for _ in 0..STATE_DIM {
            rows.push(row);
            let mut next = [0.0; STATE_DIM];
            for (k, rk) in row.iter().enumerate() {
                for (j, nj) in next.iter_mut().enumerate() {
                    *nj += rk * sys.f.a[k][j];
                }
            }
            row = next;
        }
    }
    let matrix = DenseMatrix::from_fn(rows.len(), STATE_DIM, |i, j| Complex64::from(rows[i][j]));
    let rank = rank_report(&rows, DEFAULT_RANK_TOL);
    Observability { matrix, fully_observable: rank.rank == STATE_DIM, rank }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeDegree {
    /// `None` where the control coefficient vanishes at `x0`.
    pub r1: Option<usize>,
    pub r2: Option<usize>,
    pub r_total: Option<usize>,
    pub zero_dim: Option<usize>,
    /// Decoupling matrix `L_gj h_i` at `x0`.
    pub decoupling: [[f64; 2]; 2],
    /// Outputs whose relative degree is ill defined at `x0`.
    pub ill_defined: Vec<String>,
}

fn lie_derivative(row: &Vec5, field: &AffineField, x0: &Vec5) -> f64 {
    row.iter().zip(field.eval(x0)).map(|(a, b)| a * b).sum()
}

/// Differentiates each output until a control coefficient is nonzero.
pub fn relative_degree(sys: &AffineSystem, x0: &Vec5) -> RelativeDegree {
    let names = ["Vc1", "Vc2"];
    let scale = x0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut degrees = [None, None];
    let mut decoupling = [[0.0; 2]; 2];
    let mut ill_defined = Vec::new();
    for (i, &out) in sys.outputs.iter().enumerate() {
        let mut row = [0.0; STATE_DIM];
        row[out] = 1.0;
        for k in 1..=STATE_DIM {
            let coeff = [0, 1].map(|j| lie_derivative(&row, &sys.g[j], x0));
            // a control coefficient structurally present but zero at x0
            let structural = [0, 1].map(|j| {
                let mut acc = [0.0; STATE_DIM];
                for (r, &w) in row.iter().enumerate() {
                    for (c, a) in acc.iter_mut().enumerate() {
                        *a += w * sys.g[j].a[r][c];
                    }
                }
                acc.iter().any(|v| *v != 0.0) || row.iter().zip(&sys.g[j].b).any(|(a, b)| a * b != 0.0)
            });
            let tiny = 1e-12 * scale * row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if coeff.iter().any(|c| c.abs() > tiny) {
                degrees[i] = Some(k);
                if k == 1 {
                    decoupling[i] = coeff;
                }
                break;
            }
            if structural.iter().any(|&s| s) {
                ill_defined.push(names[i].to_string());
                break;
            }
            let mut next = [0.0; STATE_DIM];
            for (kk, rk) in row.iter().enumerate() {
                for (j, nj) in next.iter_mut().enumerate() {
                    *nj += rk * sys.f.a[kk][j];
                }
            }
            row = next;
        }
    }
    let r_total = match degrees {
        [Some(a), Some(b)] => Some(a + b),
        _ => None,
    };
    RelativeDegree {
        r1: degrees[0],
        r2: degrees[1],
        r_total,
        zero_dim: r_total.map(|r| STATE_DIM - r),
        decoupling,
        ill_defined,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub state_names: Vec<String>,
    pub x0: Vec5,
    pub controllability_rank: usize,
    pub controllability_rank_by_depth: Vec<usize>,
    pub controllability_singular_values: Vec<f64>,
    pub observability_rank: usize,
    pub observability_singular_values: Vec<f64>,
    pub fully_observable: bool,
    pub relative_degree: RelativeDegree,
    pub zero_dynamics_states: Vec<String>,
}

pub fn geometry_report(sys: &AffineSystem, x0: &Vec5) -> GeometryReport {
    let c = controllability_matrix(x0, sys);
    let o = observability_matrix(x0, sys);
    let rd = relative_degree(sys, x0);
    let zero_dynamics_states = FullState::NAMES
        .iter()
        .enumerate()
        .filter(|(i, _)| !sys.outputs.contains(i))
        .map(|(_, n)| n.to_string())
        .collect();
    GeometryReport {
        state_names: FullState::NAMES.iter().map(|s| s.to_string()).collect(),
        x0: *x0,
        controllability_rank: c.rank.rank,
        controllability_rank_by_depth: c.rank_by_depth,
        controllability_singular_values: c.rank.singular_values,
        observability_rank: o.rank.rank,
        observability_singular_values: o.rank.singular_values,
        fully_observable: o.fully_observable,
        relative_degree: rd,
        zero_dynamics_states,
    }
}

/// Report at the representative state of a solved operating point.
pub fn geometry_at(op: &OperatingPoint, p: &ConverterParams, theta: f64) -> Result<GeometryReport> {
    let sys = AffineSystem::from_params(p, op.io);
    let x0 = representative_state(op, theta).to_array();
    Ok(geometry_report(&sys, &x0))
}
