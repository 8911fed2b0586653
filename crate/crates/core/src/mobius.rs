//! The group `PSL(2,R)` acting on `RP^1`, together with the 2x2 matrix
//! algebra of the anti-de Sitter matrix model.
//!
//! A [`MobiusMap`] is stored through its affine-chart coefficients
//! `f(t) = (a t + b) / (c t + d)` with `ad - bc = 1` and a canonical sign
//! (first entry of `(a, b, c, d)` of significant size is positive). The same
//! element acts on lines through the origin of `R^2`, and [`MobiusMap::lift`]
//! evaluates the unique continuous increasing lift normalized to take a value
//! in `[0, pi)` at `x = 0`. Lifts satisfy `f(x + pi) = f(x) + pi`.

use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MobiusError {
    #[error("matrix has non-positive determinant {0}")]
    NonPositiveDeterminant(f64),
    #[error("affine chart is singular at the basepoint (|c t + d| = {0:.3e})")]
    PoleAtBasepoint(f64),
    #[error("interval [{0}, {1}] is degenerate")]
    DegenerateInterval(f64, f64),
}

/// Plain 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[1.0, 0.0], [0.0, 1.0]])
    }

    /// The standard complex structure `J = (0 -1; 1 0)`.
    pub fn j() -> Self {
        Mat2([[0.0, -1.0], [1.0, 0.0]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2([
            [self.0[0][0] * s, self.0[0][1] * s],
            [self.0[1][0] * s, self.0[1][1] * s],
        ])
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        Mat2([
            [self.0[0][0] + rhs.0[0][0], self.0[0][1] + rhs.0[0][1]],
            [self.0[1][0] + rhs.0[1][0], self.0[1][1] + rhs.0[1][1]],
        ])
    }

    pub fn sub(&self, rhs: &Mat2) -> Mat2 {
        self.add(&rhs.scale(-1.0))
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        Some(
            Mat2([[self.0[1][1], -self.0[0][1]], [-self.0[1][0], self.0[0][0]]])
                .scale(1.0 / d),
        )
    }

    pub fn apply(&self, v: (f64, f64)) -> (f64, f64) {
        (
            self.0[0][0] * v.0 + self.0[0][1] * v.1,
            self.0[1][0] * v.0 + self.0[1][1] * v.1,
        )
    }

    pub fn frobenius_dist(&self, rhs: &Mat2) -> f64 {
        let d = self.sub(rhs);
        d.0.iter()
            .flatten()
            .map(|e| e * e)
            .sum::<f64>()
            .sqrt()
    }
}

/// The bilinear form `<M, N> = Tr(M J N^t J) / 2` of signature (2,2) on 2x2
/// matrices. Satisfies `det(M) = -<M, M>`.
pub fn mat_inner(m: &Mat2, n: &Mat2) -> f64 {
    let j = Mat2::j();
    0.5 * m.mul(&j).mul(&n.transpose()).mul(&j).trace()
}

/// Vector in `R^{2,2}`: coordinates `(x1, x2, x3, x4)` with the quadratic
/// form `x1^2 + x2^2 - x3^2 - x4^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatVector22(pub [f64; 4]);

/// `<x, y>_{2,2} = x1 y1 + x2 y2 - x3 y3 - x4 y4`.
pub fn inner22(x: &MatVector22, y: &MatVector22) -> f64 {
    x.0[0] * y.0[0] + x.0[1] * y.0[1] - x.0[2] * y.0[2] - x.0[3] * y.0[3]
}

/// Isometric embedding of `R^{2,2}` into the matrix model:
/// `M(x) = (x3 - x1, x2 - x4; x2 + x4, x3 + x1)`.
pub fn quad_embed(x: &MatVector22) -> Mat2 {
    let [x1, x2, x3, x4] = x.0;
    Mat2([[x3 - x1, x2 - x4], [x2 + x4, x3 + x1]])
}

/// Inverse of [`quad_embed`].
pub fn quad_unembed(m: &Mat2) -> MatVector22 {
    let e = &m.0;
    MatVector22([
        0.5 * (e[1][1] - e[0][0]),
        0.5 * (e[0][1] + e[1][0]),
        0.5 * (e[0][0] + e[1][1]),
        0.5 * (e[1][0] - e[0][1]),
    ])
}

/// Isometry action of `PSL(2,R) x PSL(2,R)` on the matrix model:
/// `alpha(M, N) . A = M A N^{-1}`. Requires `det M = det N = 1`.
pub fn isom_action(m: &Mat2, n: &Mat2, a: &Mat2) -> Mat2 {
    let n_inv = n.inverse().expect("N must be invertible");
    m.mul(a).mul(&n_inv)
}

/// Classification of an element of `PSL(2,R)` by its trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MobiusClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Trace band treated as parabolic; traces within this distance of 2 cannot
/// be reliably separated from 2 after a handful of compositions.
const TRACE_TOL: f64 = 1e-10;

/// Element of `PSL(2,R)`, det-1 normalized, sign canonicalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusMap {
    /// Build from affine-chart coefficients of `f(t) = (a t + b)/(c t + d)`.
    /// The determinant must be positive (orientation preserving).
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MobiusError> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(MobiusError::NonPositiveDeterminant(det));
        }
        let s = det.sqrt().recip();
        Ok(Self::canonicalized(a * s, b * s, c * s, d * s))
    }

    fn canonicalized(a: f64, b: f64, c: f64, d: f64) -> Self {
        let max = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        let thresh = 1e-9 * max;
        let lead = [a, b, c, d]
            .into_iter()
            .find(|e| e.abs() > thresh)
            .unwrap_or(a);
        if lead < 0.0 {
            MobiusMap { a: -a, b: -b, c: -c, d: -d }
        } else {
            MobiusMap { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        MobiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    /// Rotation of the quotient model: lift `x -> x + theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::canonicalized(c, s, -s, c)
    }

    /// Hyperbolic scaling of the affine chart: `t -> s t`, `s > 0`.
    pub fn scaling(s: f64) -> Self {
        assert!(s > 0.0, "scaling factor must be positive");
        let r = s.sqrt();
        MobiusMap { a: r, b: 0.0, c: 0.0, d: 1.0 / r }
    }

    /// Parabolic translation of the affine chart: `t -> t + b`.
    pub fn translation(b: f64) -> Self {
        Self::canonicalized(1.0, b, 0.0, 1.0)
    }

    /// Affine-chart coefficients `(a, b, c, d)`.
    pub fn coeffs(&self) -> (f64, f64, f64, f64) {
        (self.a, self.b, self.c, self.d)
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let det = a * d - b * c;
        let s = det.sqrt().recip();
        Self::canonicalized(a * s, b * s, c * s, d * s)
    }

    pub fn inverse(&self) -> MobiusMap {
        Self::canonicalized(self.d, -self.b, -self.c, self.a)
    }

    /// Affine-chart evaluation; the pole maps to `f64::INFINITY`.
    pub fn affine(&self, t: f64) -> f64 {
        let den = self.c * t + self.d;
        if den == 0.0 {
            return f64::INFINITY;
        }
        (self.a * t + self.b) / den
    }

    /// Matrix acting on line directions `(cos x, sin x)`; its projective
    /// action matches the affine action through `t = tan(x)`.
    pub fn line_matrix(&self) -> Mat2 {
        Mat2([[self.d, self.c], [self.b, self.a]])
    }

    /// Build from a line matrix (must have positive determinant).
    pub fn from_line_matrix(m: &Mat2) -> Result<Self, MobiusError> {
        let e = &m.0;
        MobiusMap::new(e[1][1], e[1][0], e[0][1], e[0][0])
    }

    fn line_image(&self, x: f64) -> (f64, f64) {
        let (sx, cx) = x.sin_cos();
        (self.d * cx + self.c * sx, self.b * cx + self.a * sx)
    }

    /// Canonical continuous increasing lift with value in `[0, pi)` at 0.
    ///
    /// Computed branch-free: the image angle at `x = r + n pi` is the angle
    /// at `r in [0, pi)` plus `n pi`, and the angle at `r` is the base angle
    /// at 0 plus the rotation from the image direction at 0 to the image
    /// direction at `r`, which lies in `[0, pi)`.
    pub fn lift(&self, x: f64) -> f64 {
        let n = (x / PI).floor();
        let mut r = x - n * PI;
        if r >= PI {
            r = 0.0;
        }
        let w0 = self.line_image(0.0);
        let wr = self.line_image(r);
        let base = w0.1.atan2(w0.0).rem_euclid(PI);
        let cross = w0.0 * wr.1 - w0.1 * wr.0;
        let dot = w0.0 * wr.0 + w0.1 * wr.1;
        // the true rotation lies in [0, pi); rounding in `cross` can flip
        // the sign near 0 (angle ~ 0) and near -pi (angle ~ pi)
        let raw = cross.atan2(dot);
        let q = if raw >= 0.0 {
            raw
        } else if raw >= -FRAC_PI_2 {
            0.0
        } else {
            (raw + 2.0 * PI).min(PI)
        };
        base + q + n * PI
    }

    /// Derivative of the lift: `1 / |M (cos x, sin x)|^2` for the det-1 line
    /// matrix.
    pub fn lift_deriv(&self, x: f64) -> f64 {
        let w = self.line_image(x);
        1.0 / (w.0 * w.0 + w.1 * w.1)
    }

    /// Second derivative of the lift.
    pub fn lift_deriv2(&self, x: f64) -> f64 {
        let (sx, cx) = x.sin_cos();
        let w = (self.d * cx + self.c * sx, self.b * cx + self.a * sx);
        let wp = (-self.d * sx + self.c * cx, -self.b * sx + self.a * cx);
        let n = w.0 * w.0 + w.1 * w.1;
        -2.0 * (w.0 * wp.0 + w.1 * wp.1) / (n * n)
    }

    /// Supremum of the lift derivative over a period (`sigma_max^2` of the
    /// line matrix); a Lipschitz constant for the lift.
    pub fn lipschitz(&self) -> f64 {
        let m = self.line_matrix();
        let g = m.transpose().mul(&m);
        let tr = g.trace();
        let diff = g.0[0][0] - g.0[1][1];
        let disc = (diff * diff + 4.0 * g.0[0][1] * g.0[0][1]).sqrt();
        // larger eigenvalue of M^t M; with det M = 1 the lift derivative
        // 1/|M v|^2 peaks at sigma_max^2.
        0.5 * (tr + disc)
    }

    pub fn trace_abs(&self) -> f64 {
        (self.a + self.d).abs()
    }

    /// Classification by `|trace|` against 2, with a `1e-10` band treated as
    /// parabolic.
    pub fn classify(&self) -> MobiusClass {
        let off = self.b.abs().max(self.c.abs()).max((self.a - self.d).abs());
        if off < 1e-12 {
            return MobiusClass::Identity;
        }
        let t = self.trace_abs();
        if (t - 2.0).abs() <= TRACE_TOL {
            MobiusClass::Parabolic
        } else if t < 2.0 {
            MobiusClass::Elliptic
        } else {
            MobiusClass::Hyperbolic
        }
    }

    /// Affine-chart 2-jet at `t0`: `(h(t0), h'(t0), h''(t0))`.
    pub fn jet_at(&self, t0: f64) -> Result<(f64, f64, f64), MobiusError> {
        let den = self.c * t0 + self.d;
        if den.abs() < 1e-9 {
            return Err(MobiusError::PoleAtBasepoint(den.abs()));
        }
        let v = (self.a * t0 + self.b) / den;
        let d1 = 1.0 / (den * den);
        let d2 = -2.0 * self.c / (den * den * den);
        Ok((v, d1, d2))
    }

    /// Affine-chart 2-jet at 0.
    pub fn jet_at_zero(&self) -> Result<(f64, f64, f64), MobiusError> {
        self.jet_at(0.0)
    }

    /// `|h(0)| + |h'(0) - 1| + |h''(0)|`, comparable to a Riemannian
    /// distance to the identity near the identity.
    pub fn dist_to_identity_estimate(&self) -> Result<f64, MobiusError> {
        let (v, d1, d2) = self.jet_at_zero()?;
        Ok(v.abs() + (d1 - 1.0).abs() + d2.abs())
    }

    /// Unique element whose lift has the prescribed 2-jet
    /// `(value, d1, d2)` at the lift point `x`; requires `d1 > 0`.
    ///
    /// Built by conjugating with rotations so the jet sits at 0, where the
    /// lift and the affine chart agree to second order.
    pub fn from_lift_jet(x: f64, value: f64, d1: f64, d2: f64) -> MobiusMap {
        assert!(d1 > 0.0, "lift derivative must be positive");
        let sq = d1.sqrt();
        let g = MobiusMap::new(sq, 0.0, -d2 / (2.0 * d1 * sq), 1.0 / sq)
            .expect("jet matrix has unit determinant");
        MobiusMap::rotation(value)
            .compose(&g)
            .compose(&MobiusMap::rotation(-x))
    }

    /// Unique element through three lift-graph points `(x_i, y_i)` with
    /// `x_i` pairwise distinct mod pi. Returns `None` when the interpolant
    /// is orientation reversing or degenerate.
    pub fn through_three_points(pts: [(f64, f64); 3]) -> Option<MobiusMap> {
        // Work on line directions to stay clear of tan poles.
        let dir = |x: f64| -> (f64, f64) {
            let (s, c) = x.sin_cos();
            (c, s)
        };
        // Matrix sending three directions to (1,0), (1,1)-ish, (0,1): the
        // classical cross-ratio construction on RP^1.
        let std_map = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| -> Option<Mat2> {
            // Solve [p q] diag(l, m) = r up to scale: l p + m q = r.
            let det = p.0 * q.1 - p.1 * q.0;
            if det.abs() < 1e-14 {
                return None;
            }
            let l = (r.0 * q.1 - r.1 * q.0) / det;
            let m = (p.0 * r.1 - p.1 * r.0) / det;
            // Map with columns (l p, m q): sends p->e1, q->e2 scaled so r -> e1+e2.
            let fwd = Mat2([[l * p.0, m * q.0], [l * p.1, m * q.1]]);
            fwd.inverse()
        };
        let a = std_map(dir(pts[0].0), dir(pts[2].0), dir(pts[1].0))?;
        let b = std_map(dir(pts[0].1), dir(pts[2].1), dir(pts[1].1))?;
        let b_inv = b.inverse()?;
        let line = b_inv.mul(&a);
        if line.det() <= 0.0 {
            return None;
        }
        let n = line.det().sqrt();
        MobiusMap::from_line_matrix(&line.scale(1.0 / n)).ok()
    }
}

/// Mobius map together with a chosen lift: `lift(x) + offset * pi`.
#[derive(Clone, Copy, Debug)]
pub struct MobiusLift {
    pub map: MobiusMap,
    pub offset: i64,
}

impl MobiusLift {
    pub fn new(map: MobiusMap, offset: i64) -> Self {
        MobiusLift { map, offset }
    }

    /// Lift of `map` whose value at `x` equals `value` (which must be a lift
    /// of the image point; panics if it is not within `1e-6` of one).
    pub fn matching(map: MobiusMap, x: f64, value: f64) -> Self {
        let canon = map.lift(x);
        let k = ((value - canon) / PI).round();
        debug_assert!(
            (value - canon - k * PI).abs() < 1e-6,
            "requested value is not a lift of the image point"
        );
        MobiusLift { map, offset: k as i64 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.map.lift(x) + self.offset as f64 * PI
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.map.lift_deriv(x)
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        self.map.lift_deriv2(x)
    }
}

/// Normalization factors of an affine-chart interval: `(P, H)` with
/// `H: t -> 2t/lambda` (`lambda` the length) and `P: t -> t - 2m/lambda`
/// (`m` the midpoint), so `(P . H)` maps `[lo, hi]` onto `[-1, 1]`.
pub fn phe_factors(lo: f64, hi: f64) -> Result<(MobiusMap, MobiusMap), MobiusError> {
    if !(hi - lo >= 1e-14) {
        return Err(MobiusError::DegenerateInterval(lo, hi));
    }
    let lambda = hi - lo;
    let m = 0.5 * (lo + hi);
    let h = MobiusMap::scaling(2.0 / lambda);
    let p = MobiusMap::translation(-2.0 * m / lambda);
    Ok((p, h))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_mobius(rng: &mut impl Rng) -> MobiusMap {
        let theta1 = rng.gen_range(0.0..PI);
        let s = rng.gen_range(-0.8f64..0.8).exp();
        let theta2 = rng.gen_range(0.0..PI);
        MobiusMap::rotation(theta1)
            .compose(&MobiusMap::scaling(s))
            .compose(&MobiusMap::rotation(theta2))
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identity_apply() {
        let id = MobiusMap::identity();
        assert!(close(id.lift(0.3), 0.3, 1e-15));
        assert!(close(id.affine(0.7), 0.7, 1e-15));
    }

    #[test]
    fn rotation_lift_is_translation() {
        let m = MobiusMap::rotation(0.5);
        for &x in &[-3.7, -0.2, 0.0, 0.9, 2.0, 7.3] {
            assert!(close(m.lift(x), x + 0.5, 1e-12), "x = {x}");
        }
    }

    #[test]
    fn hyperbola_affine_form() {
        // f(t) = P/(Q - t) - R with (P, Q, R) = (1, 1, 1): f(t) = 1/(1-t) - 1.
        let f = MobiusMap::new(1.0, 0.0, -1.0, 1.0).unwrap();
        assert!(close(f.affine(0.0), 0.0, 1e-15));
        assert!(f.affine(1.0).is_infinite());
        assert!(close(f.affine(0.5), 1.0, 1e-15));
    }

    #[test]
    fn compose_matches_matrix_product() {
        // H: t -> 2t and P: t -> t - 1, composed both ways; oracle is the
        // direct 2x2 product of the affine coefficient matrices.
        let h = MobiusMap::scaling(2.0);
        let p = MobiusMap::translation(-1.0);
        let hp = h.compose(&p);
        let ph = p.compose(&h);
        for &t in &[-2.0, -0.5, 0.0, 0.3, 1.7] {
            assert!(close(hp.affine(t), 2.0 * (t - 1.0), 1e-12));
            assert!(close(ph.affine(t), 2.0 * t - 1.0, 1e-12));
        }
        let (a, b, c, d) = hp.coeffs();
        // sqrt(2)*(t-1) matrix normalized: a/d = 2, b = -a.
        assert!(close(a / d, 2.0, 1e-12));
        assert!(close(b, -a, 1e-12));
        assert!(close(c, 0.0, 1e-15));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(MobiusMap::identity().classify(), MobiusClass::Identity);
        assert_eq!(MobiusMap::scaling(2.0).classify(), MobiusClass::Hyperbolic);
        assert_eq!(MobiusMap::translation(1.0).classify(), MobiusClass::Parabolic);
        assert_eq!(MobiusMap::rotation(0.4).classify(), MobiusClass::Elliptic);
    }

    #[test]
    fn jets_examples() {
        let id = MobiusMap::identity();
        assert_eq!(id.jet_at_zero().unwrap(), (0.0, 1.0, 0.0));
        assert!(close(id.dist_to_identity_estimate().unwrap(), 0.0, 1e-15));

        let s = 0.37;
        let shift = MobiusMap::translation(s);
        let (v, d1, d2) = shift.jet_at_zero().unwrap();
        assert!(close(v, s, 1e-15) && close(d1, 1.0, 1e-15) && close(d2, 0.0, 1e-15));

        // h(t) = t / (1 - t s / 2): jet (0, 1, s). Second derivative checked
        // against a central-difference series oracle.
        let h = MobiusMap::new(1.0, 0.0, -s / 2.0, 1.0).unwrap();
        let (v, d1, d2) = h.jet_at_zero().unwrap();
        assert!(close(v, 0.0, 1e-15) && close(d1, 1.0, 1e-12));
        let eps = 1e-5;
        let dd = (h.affine(eps) - 2.0 * h.affine(0.0) + h.affine(-eps)) / (eps * eps);
        assert!(close(d2, s, 1e-12));
        assert!(close(dd, s, 1e-6));
    }

    #[test]
    fn jet_pole_error() {
        let m = MobiusMap::new(0.0, 1.0, -1.0, 0.0).unwrap(); // t -> -1/t
        assert!(matches!(m.jet_at_zero(), Err(MobiusError::PoleAtBasepoint(_))));
    }

    #[test]
    fn phe_examples() {
        let (p, h) = phe_factors(-1.0, 1.0).unwrap();
        assert_eq!(p.classify(), MobiusClass::Identity);
        assert_eq!(h.classify(), MobiusClass::Identity);

        let (p, h) = phe_factors(1.0, 3.0).unwrap();
        assert_eq!(h.classify(), MobiusClass::Identity); // lambda = 2: t -> t
        assert!(close(p.affine(0.0), -2.0, 1e-12)); // t -> t - 2
        let ph = p.compose(&h);
        assert!(close(ph.affine(1.0), -1.0, 1e-12));
        assert!(close(ph.affine(3.0), 1.0, 1e-12));

        let (p, h) = phe_factors(0.0, 4.0).unwrap();
        assert!(close(h.affine(2.0), 1.0, 1e-12)); // t -> t/2
        assert!(close(p.affine(0.0), -1.0, 1e-12)); // t -> t - 1
        let ph = p.compose(&h);
        assert!(close(ph.affine(0.0), -1.0, 1e-12));
        assert!(close(ph.affine(4.0), 1.0, 1e-12));

        assert!(matches!(
            phe_factors(1.0, 1.0),
            Err(MobiusError::DegenerateInterval(_, _))
        ));
    }

    #[test]
    fn phe_normalization_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let lo = rng.gen_range(-4.0..4.0);
            let hi = lo + rng.gen_range(1e-6f64..5.0);
            let (p, h) = phe_factors(lo, hi).unwrap();
            let ph = p.compose(&h);
            assert!(close(ph.affine(lo), -1.0, 1e-11));
            assert!(close(ph.affine(hi), 1.0, 1e-11));
        }
    }

    #[test]
    fn mat_inner_examples() {
        let id = Mat2::identity();
        assert!(close(mat_inner(&id, &id), -1.0, 1e-15));
        assert!(close(id.det(), -mat_inner(&id, &id), 1e-15));

        let x = MatVector22([0.0, 0.0, 1.0, 0.0]);
        assert_eq!(quad_embed(&x), Mat2::identity());
        assert!(close(inner22(&x, &x), -1.0, 1e-15));
    }

    #[test]
    fn quad_embed_isometry_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = MatVector22(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            let y = MatVector22(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            let lhs = inner22(&x, &y);
            let rhs = mat_inner(&quad_embed(&x), &quad_embed(&y));
            assert!(close(lhs, rhs, 1e-12 * (1.0 + lhs.abs())));
        }
    }

    #[test]
    fn isom_action_examples() {
        let a = Mat2([[1.3, 0.2], [-0.4, 0.9]]);
        assert_eq!(isom_action(&Mat2::identity(), &Mat2::identity(), &a), a);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let m = random_mobius(&mut rng).line_matrix();
            let n = random_mobius(&mut rng).line_matrix();
            let x = Mat2(std::array::from_fn(|_| {
                std::array::from_fn(|_| rng.gen_range(-2.0..2.0))
            }));
            let y = Mat2(std::array::from_fn(|_| {
                std::array::from_fn(|_| rng.gen_range(-2.0..2.0))
            }));
            let xi = isom_action(&m, &n, &x);
            let yi = isom_action(&m, &n, &y);
            let lhs = mat_inner(&xi, &yi);
            let rhs = mat_inner(&x, &y);
            assert!(close(lhs, rhs, 1e-10 * (1.0 + rhs.abs())));
            assert!(close(xi.det(), x.det(), 1e-10 * (1.0 + x.det().abs())));
        }
    }

    #[test]
    fn group_axioms_on_random_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let m = random_mobius(&mut rng);
            let n = random_mobius(&mut rng);
            let k = random_mobius(&mut rng);
            let lhs = m.compose(&n).compose(&k);
            let rhs = m.compose(&n.compose(&k));
            let (a1, b1, c1, d1) = lhs.coeffs();
            let (a2, b2, c2, d2) = rhs.coeffs();
            for (p, q) in [(a1, a2), (b1, b2), (c1, c2), (d1, d2)] {
                assert!(close(p, q, 1e-12));
            }
            let inv = m.compose(&m.inverse());
            assert_eq!(inv.classify(), MobiusClass::Identity);
            // determinant invariant after composition
            let (a, b, c, d) = lhs.coeffs();
            assert!(close(a * d - b * c, 1.0, 1e-12));
        }
    }

    #[test]
    fn canonical_sign_stable_under_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..500 {
            let m = random_mobius(&mut rng);
            let n = random_mobius(&mut rng);
            let back = m.compose(&n).compose(&n.inverse());
            let (a1, b1, c1, d1) = m.coeffs();
            let (a2, b2, c2, d2) = back.coeffs();
            for (p, q) in [(a1, a2), (b1, b2), (c1, c2), (d1, d2)] {
                assert!(close(p, q, 1e-11), "{m:?} vs {back:?}");
            }
        }
    }

    #[test]
    fn jet_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 300 {
            let m1 = random_mobius(&mut rng);
            let m2 = random_mobius(&mut rng);
            let comp = m1.compose(&m2);
            let (Ok((v2, d2, s2)), Ok(jc)) = (m2.jet_at_zero(), comp.jet_at_zero()) else {
                continue;
            };
            let Ok((_, d1, s1)) = m1.jet_at(v2) else {
                continue;
            };
            let v = m1.affine(v2);
            let dd = d1 * d2;
            let ss = s1 * d2 * d2 + d1 * s2;
            let scale = 1.0 + jc.0.abs() + jc.1.abs() + jc.2.abs();
            assert!(close(jc.0, v, 1e-9 * scale));
            assert!(close(jc.1, dd, 1e-9 * scale));
            assert!(close(jc.2, ss, 1e-9 * scale));
            checked += 1;
        }
    }

    #[test]
    fn lift_equivariance_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let m = random_mobius(&mut rng);
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=400 {
                let x = -2.0 * PI + 4.0 * PI * (i as f64) / 400.0;
                let l = m.lift(x);
                assert!(l > prev, "lift must increase");
                prev = l;
                assert!(close(m.lift(x + PI), l + PI, 1e-10));
            }
        }
    }

    #[test]
    fn lift_derivative_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let m = random_mobius(&mut rng);
            let x = rng.gen_range(-3.0..3.0);
            let h = 1e-6;
            let fd = (m.lift(x + h) - m.lift(x - h)) / (2.0 * h);
            assert!(close(fd, m.lift_deriv(x), 1e-6 * (1.0 + fd.abs())));
            // second differences carry ~4 eps / h^2 of rounding noise
            let h = 1e-5;
            let fd2 = (m.lift(x + h) - 2.0 * m.lift(x) + m.lift(x - h)) / (h * h);
            assert!(close(fd2, m.lift_deriv2(x), 1e-4 * (1.0 + fd2.abs())));
        }
    }

    #[test]
    fn from_lift_jet_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let x = rng.gen_range(-2.0..2.0);
            let v = rng.gen_range(-2.0..2.0);
            let d1 = rng.gen_range(0.2..4.0);
            let d2 = rng.gen_range(-3.0..3.0);
            let m = MobiusMap::from_lift_jet(x, v, d1, d2);
            let lift = MobiusLift::matching(m, x, v);
            assert!(close(lift.eval(x), v, 1e-9));
            assert!(close(lift.deriv(x), d1, 1e-8 * (1.0 + d1)));
            assert!(close(lift.deriv2(x), d2, 1e-6 * (1.0 + d2.abs())));
        }
    }

    #[test]
    fn three_point_interpolation() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let m = random_mobius(&mut rng);
            let x0 = rng.gen_range(-1.0..1.0);
            let pts = [x0, x0 + 0.9, x0 + 1.9].map(|x| (x, m.lift(x)));
            let fit = MobiusMap::through_three_points(pts).expect("interpolant exists");
            for i in 0..=20 {
                let x = x0 + 2.5 * (i as f64) / 20.0 - 0.3;
                let want = m.lift(x).rem_euclid(PI);
                let got = fit.lift(x).rem_euclid(PI);
                let diff = (want - got).abs().min(PI - (want - got).abs());
                assert!(diff < 1e-9, "interpolant must reproduce the map");
            }
        }
    }

    proptest! {
        #[test]
        fn prop_lift_equivariance(seed in 0u64..5000, x in -10.0f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_mobius(&mut rng);
            prop_assert!((m.lift(x + PI) - m.lift(x) - PI).abs() < 1e-9);
        }

        #[test]
        fn prop_compose_inverse_is_identity(seed in 0u64..5000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_mobius(&mut rng);
            let e = m.compose(&m.inverse());
            prop_assert_eq!(e.classify(), MobiusClass::Identity);
        }
    }
}
