//! Matrix-model surface algebra: timelike frames, left and right Gauss
//! maps, pull-back metrics, and the dictionary between the shape-operator
//! eigenvalue and the Beltrami coefficient.
//!
//! A spacelike frame is a pair `(M, N)` with `det M = 1`,
//! `<N, N>_mat = -1` and `<M, N>_mat = 0`: a point of the unit timelike
//! tangent bundle. Its Gauss maps `G_l = M^{-1} N` and `G_r = N M^{-1}`
//! land on the quadric `X^2 = -Id` of trace-free unit-timelike matrices,
//! whose component containing `J` is a copy of the hyperbolic plane.

use crate::mobius::{mat_inner, Mat2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaussError {
    #[error("frame invariants fail: det M - 1 = {det_defect:.3e}, <N,N>+1 = {nn_defect:.3e}, <M,N> = {mn_defect:.3e}")]
    FrameInvalid { det_defect: f64, nn_defect: f64, mn_defect: f64 },
    #[error("shape eigenvalue {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Pair `(M, N)` of unit-timelike matrix data on a spacelike surface.
#[derive(Clone, Copy, Debug)]
pub struct SpacelikeFrame {
    pub m: Mat2,
    pub n: Mat2,
}

const FRAME_TOL: f64 = 1e-10;

impl SpacelikeFrame {
    pub fn new(m: Mat2, n: Mat2) -> Result<Self, GaussError> {
        let det_defect = m.det() - 1.0;
        let nn_defect = mat_inner(&n, &n) + 1.0;
        let mn_defect = mat_inner(&m, &n);
        if det_defect.abs() > FRAME_TOL
            || nn_defect.abs() > FRAME_TOL
            || mn_defect.abs() > FRAME_TOL
        {
            return Err(GaussError::FrameInvalid { det_defect, nn_defect, mn_defect });
        }
        Ok(SpacelikeFrame { m, n })
    }

    /// Geodesic-flow translate `(cos t M + sin t N, -sin t M + cos t N)`.
    pub fn flow(&self, t: f64) -> SpacelikeFrame {
        let (s, c) = t.sin_cos();
        SpacelikeFrame {
            m: self.m.scale(c).add(&self.n.scale(s)),
            n: self.m.scale(-s).add(&self.n.scale(c)),
        }
    }

    /// Isometry translate `(A M B^{-1}, A N B^{-1})`.
    pub fn translate(&self, a: &Mat2, b: &Mat2) -> SpacelikeFrame {
        let b_inv = b.inverse().expect("B invertible");
        SpacelikeFrame {
            m: a.mul(&self.m).mul(&b_inv),
            n: a.mul(&self.n).mul(&b_inv),
        }
    }
}

/// Whether a point of the quadric `X^2 = -Id` lies in the component of `J`
/// (lower-left entry positive).
pub fn in_plus_component(x: &Mat2) -> bool {
    x.0[1][0] > 0.0
}

/// Left and right Gauss maps `(M^{-1} N, N M^{-1})`. Both satisfy
/// `X^2 = -Id` when the frame invariants hold.
pub fn gauss_maps(f: &SpacelikeFrame) -> (Mat2, Mat2) {
    let m_inv = f.m.inverse().expect("det M = 1");
    (m_inv.mul(&f.n), f.n.mul(&m_inv))
}

/// Pull-back metrics `g((A ± J) ., (A ± J) .)` of the hyperbolic metric
/// through the Gauss maps, as 2x2 symmetric matrices in the frame of `g`.
#[derive(Clone, Copy, Debug)]
pub struct PullbackMetrics {
    pub left: Mat2,
    pub right: Mat2,
    /// a null direction appears at lambda = 1
    pub degenerate: bool,
}

pub fn pullback_metrics(g: &Mat2, j: &Mat2, a: &Mat2) -> PullbackMetrics {
    debug_assert!(j.mul(j).add(&Mat2::identity()).frobenius_dist(&Mat2([[0.0; 2]; 2])) < 1e-9);
    debug_assert!((a.trace()).abs() < 1e-9, "shape operator must be trace free");
    let form = |op: &Mat2| -> Mat2 {
        // g(op u, op v) = op^t G op
        op.transpose().mul(g).mul(op)
    };
    let left = form(&a.add(j));
    let right = form(&a.sub(j));
    let degenerate = left.det().abs() < 1e-12 || right.det().abs() < 1e-12;
    PullbackMetrics { left, right, degenerate }
}

/// `||mu||^2 = 4 lambda^2 / (1 + lambda^2)^2`.
pub fn mu_from_lambda(lambda: f64) -> Result<f64, GaussError> {
    check_lambda(lambda)?;
    let l2 = lambda * lambda;
    Ok(4.0 * l2 / ((1.0 + l2) * (1.0 + l2)))
}

/// `mu~^2 = 4 lambda^2 (1 - lambda^2) / (1 + lambda^2)^2`.
pub fn mu_tilde_sq(lambda: f64) -> Result<f64, GaussError> {
    let m = mu_from_lambda(lambda)?;
    Ok(m * (1.0 - lambda * lambda))
}

/// Monotone inverse of [`mu_from_lambda`] on `[0, 1]`, evaluated through
/// the cancellation-free root `u = m / (2 - m + 2 sqrt(1 - m))`.
pub fn lambda_from_mu(mu_sq: f64) -> Result<f64, GaussError> {
    if !(0.0..=1.0 + 1e-12).contains(&mu_sq) {
        return Err(GaussError::OutOfRange(mu_sq));
    }
    let m = mu_sq.min(1.0);
    if m == 0.0 {
        return Ok(0.0);
    }
    let u = m / ((2.0 - m) + 2.0 * (1.0 - m).max(0.0).sqrt());
    Ok(u.sqrt())
}

fn check_lambda(lambda: f64) -> Result<(), GaussError> {
    if !(0.0..=1.0 + 1e-12).contains(&lambda) {
        return Err(GaussError::OutOfRange(lambda));
    }
    Ok(())
}

/// Shape data on a maximal surface: eigenvalues `±lambda` with
/// `0 <= lambda <= 1` (inputs beyond the bound are rejected).
#[derive(Clone, Copy, Debug)]
pub struct ShapeData {
    lambda: f64,
}

impl ShapeData {
    pub fn new(lambda: f64) -> Result<Self, GaussError> {
        check_lambda(lambda)?;
        Ok(ShapeData { lambda: lambda.min(1.0) })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Symmetric trace-free representative `diag(lambda, -lambda)` in an
    /// orthonormal eigenframe.
    pub fn operator(&self) -> Mat2 {
        Mat2([[self.lambda, 0.0], [0.0, -self.lambda]])
    }
}

/// `(||A||^2, K_int) = (2 lambda^2, lambda^2 - 1)`.
pub fn curvature_densities(lambda: f64) -> Result<(f64, f64), GaussError> {
    check_lambda(lambda)?;
    Ok((2.0 * lambda * lambda, lambda * lambda - 1.0))
}

/// Quadrature of the renormalized-area and total-curvature densities over
/// a sampled field of `(lambda, weight)` pairs.
pub fn integrate_densities(field: &[(f64, f64)]) -> Result<(f64, f64), GaussError> {
    let mut area = 0.0;
    let mut curv = 0.0;
    for &(lambda, w) in field {
        let (a2, k) = curvature_densities(lambda)?;
        area += w * a2;
        curv += w * k.abs();
    }
    Ok((area, curv))
}
