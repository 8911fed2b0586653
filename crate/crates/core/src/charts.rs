//! Coordinate models of `RP^1`, `AdS^{2,1}` and `Ein^{1,1}` and the
//! conversions among them.
//!
//! `RP^1` is carried by the quotient model `R / pi Z` through
//! `P(x) = [cos x : sin x]`; the affine chart is `A([x1 : x2]) = x2 / x1`,
//! so `A(P(x)) = tan(x)` and `[0 : 1]` is the point at infinity. Einstein
//! space is parametrized by matrix angles `(x1, x2)` with period lattice
//! `(pi, 0), (0, pi)`, and the Kleinian chart of `AdS^{2,1}` divides the
//! first three `R^{2,2}` coordinates by the fourth.

use crate::mobius::{inner22, Mat2, MatVector22, MobiusMap};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChartError {
    #[error("chart is singular at argument {0}")]
    ChartSingularity(f64),
    #[error("point lies on the excluded plane x4 = 0 (|x4| = {0:.3e})")]
    OnExcludedPlane(f64),
    #[error("vector has norm-squared {0}, not an AdS point")]
    NotAdsPoint(f64),
    #[error("zero tangent vector has no causal type")]
    ZeroVector,
    #[error("corner points are not time related")]
    NotTimeRelated,
    #[error("point lies outside the Kleinian domain (<y,y> = {0})")]
    OutsideKleinDomain(f64),
}

/// Point of `RP^1` as an angle, canonical representative in `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RP1Point {
    angle: f64,
}

impl RP1Point {
    pub fn new(x: f64) -> Self {
        let mut a = x.rem_euclid(PI);
        if a >= PI {
            a = 0.0;
        }
        RP1Point { angle: a }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Direction vector `(cos x, sin x)` of the line.
    pub fn direction(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }

    /// Canonical angle of a line direction.
    pub fn from_direction(v: (f64, f64)) -> Self {
        RP1Point::new(v.1.atan2(v.0))
    }
}

/// One-point compactification of the affine chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(t) => Some(t),
            ExtReal::Infinity => None,
        }
    }
}

/// Affine chart of the quotient model: `tan(x)`, with `x = pi/2` at infinity.
pub fn quotient_affine(p: RP1Point) -> ExtReal {
    let (c, s) = (p.angle().cos(), p.angle().sin());
    if c.abs() < 1e-15 {
        ExtReal::Infinity
    } else {
        ExtReal::Finite(s / c)
    }
}

/// Inverse of [`quotient_affine`].
pub fn affine_quotient(t: ExtReal) -> RP1Point {
    match t {
        ExtReal::Finite(t) => RP1Point::new(t.atan()),
        ExtReal::Infinity => RP1Point::new(PI / 2.0),
    }
}

/// Affine action of a Mobius map on the compactified chart; poles are
/// permuted projectively.
pub fn affine_apply(m: &MobiusMap, t: ExtReal) -> ExtReal {
    let (a, b, c, d) = m.coeffs();
    match t {
        ExtReal::Finite(t) => {
            let den = c * t + d;
            if den.abs() < 1e-300 * (a * t + b).abs().max(1.0) {
                ExtReal::Infinity
            } else {
                ExtReal::Finite((a * t + b) / den)
            }
        }
        ExtReal::Infinity => {
            if c.abs() < 1e-300 {
                ExtReal::Infinity
            } else {
                ExtReal::Finite(a / c)
            }
        }
    }
}

/// Point of `Ein^{1,1}` in matrix-angle coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EinPoint {
    pub x1: RP1Point,
    pub x2: RP1Point,
}

impl EinPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        EinPoint { x1: RP1Point::new(x1), x2: RP1Point::new(x2) }
    }
}

/// Rank-1 representative `N(x1, x2) = (cos x1; sin x1) (cos x2, sin x2)`.
pub fn matrix_angle(x1: f64, x2: f64) -> Mat2 {
    let (s1, c1) = x1.sin_cos();
    let (s2, c2) = x2.sin_cos();
    Mat2([[c1 * c2, c1 * s2], [s1 * c2, s1 * s2]])
}

/// Reduction of matrix-angle coordinates modulo the period lattice
/// `(pi, 0), (0, pi)` to the fundamental domain `[0, pi) x [0, pi)`.
pub fn ein_reduce(x1: f64, x2: f64) -> (f64, f64) {
    (RP1Point::new(x1).angle(), RP1Point::new(x2).angle())
}

/// Rotated Penrose chart: componentwise affine chart `(tan x1, tan x2)`.
pub fn penrose_rot(x1: f64, x2: f64) -> Result<(f64, f64), ChartError> {
    let t1 = quotient_affine(RP1Point::new(x1))
        .finite()
        .ok_or(ChartError::ChartSingularity(x1))?;
    let t2 = quotient_affine(RP1Point::new(x2))
        .finite()
        .ok_or(ChartError::ChartSingularity(x2))?;
    Ok((t1, t2))
}

/// Penrose chart in matrix coordinates:
/// `(tan x1 + tan x2, -tan x1 + tan x2) / 2`.
pub fn penrose_mat(x1: f64, x2: f64) -> Result<(f64, f64), ChartError> {
    let (t1, t2) = penrose_rot(x1, x2)?;
    Ok((0.5 * (t1 + t2), 0.5 * (-t1 + t2)))
}

/// Point in the Kleinian chart, coordinates in `R^{2,1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KleinPoint {
    pub y: [f64; 3],
}

impl KleinPoint {
    pub fn new(y1: f64, y2: f64, y3: f64) -> Self {
        KleinPoint { y: [y1, y2, y3] }
    }

    /// `<y, y>_{2,1} = y1^2 + y2^2 - y3^2`; the chart image is `< 1`.
    pub fn norm21(&self) -> f64 {
        self.y[0] * self.y[0] + self.y[1] * self.y[1] - self.y[2] * self.y[2]
    }
}

/// `<u, v>_{2,1}` on chart coordinates.
pub fn inner21(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] - u[2] * v[2]
}

/// Kleinian chart `[x] -> (x1, x2, x3) / x4` on AdS vectors
/// (`<x, x> = -1`) off the plane `x4 = 0`.
pub fn kleinian(x: &MatVector22) -> Result<KleinPoint, ChartError> {
    let n = inner22(x, x);
    if n >= 0.0 {
        return Err(ChartError::NotAdsPoint(n));
    }
    let s = (-n).sqrt().recip();
    let x4 = x.0[3] * s;
    if x4.abs() < 1e-14 {
        return Err(ChartError::OnExcludedPlane(x4.abs()));
    }
    Ok(KleinPoint::new(x.0[0] / x.0[3], x.0[1] / x.0[3], x.0[2] / x.0[3]))
}

/// Inverse chart: the normalized representative with `<x, x> = -1, x4 > 0`.
pub fn kleinian_inverse(y: &KleinPoint) -> Result<MatVector22, ChartError> {
    let n = y.norm21();
    if n >= 1.0 {
        return Err(ChartError::OutsideKleinDomain(n));
    }
    let s = (1.0 - n).sqrt().recip();
    Ok(MatVector22([y.y[0] * s, y.y[1] * s, y.y[2] * s, s]))
}

/// Causal character of a matrix-angle tangent vector `(dx1, dx2)`: the
/// conformal metric is `dx1 dx2`, so the sign of the product decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalType {
    Spacelike,
    Timelike,
    Lightlike,
}

pub fn causal_type(v: (f64, f64)) -> Result<CausalType, ChartError> {
    if v.0 == 0.0 && v.1 == 0.0 {
        return Err(ChartError::ZeroVector);
    }
    let q = v.0 * v.1;
    Ok(if q > 0.0 {
        CausalType::Spacelike
    } else if q < 0.0 {
        CausalType::Timelike
    } else {
        CausalType::Lightlike
    })
}

/// Graph of a Mobius map in the rotated Penrose chart: a line of positive
/// slope, or a euclidean hyperbola `t -> P/(Q - t) - R` with center `(Q, -R)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AcausalCurve {
    Line { slope: f64, intercept: f64 },
    Hyperbola { p: f64, q: f64, r: f64 },
}

pub fn acausal_circle_of(f: &MobiusMap) -> AcausalCurve {
    let (a, b, c, d) = f.coeffs();
    if c.abs() < 1e-13 {
        AcausalCurve::Line { slope: a / d, intercept: b / d }
    } else {
        // (a t + b)/(c t + d) = (1/c^2) / (-d/c - t) + a/c
        AcausalCurve::Hyperbola { p: 1.0 / (c * c), q: -d / c, r: -a / c }
    }
}

/// Action of `PSL(2,R) x PSL(2,R)` on `Ein^{1,1} = RP^1 x RP^1`:
/// `beta(M, N) . (L1, L2) = (M L1, N^t L2)` on line directions.
/// Requires `det M = det N = 1`.
pub fn ein_action(m: &Mat2, n: &Mat2, l: (RP1Point, RP1Point)) -> (RP1Point, RP1Point) {
    let v1 = m.apply(l.0.direction());
    let v2 = n.transpose().apply(l.1.direction());
    (RP1Point::from_direction(v1), RP1Point::from_direction(v2))
}

/// Samples of the curve described by an [`AcausalCurve`] in the rotated
/// Penrose chart, for figure emission. Hyperbola branches are sampled on
/// both sides of the vertical asymptote within `[-span, span]`.
pub fn sample_acausal_curve(curve: &AcausalCurve, span: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    match *curve {
        AcausalCurve::Line { slope, intercept } => {
            for i in 0..n {
                let t = -span + 2.0 * span * (i as f64) / (n.max(2) - 1) as f64;
                out.push((t, slope * t + intercept));
            }
        }
        AcausalCurve::Hyperbola { p, q, r } => {
            for i in 0..n {
                let t = -span + 2.0 * span * (i as f64) / (n.max(2) - 1) as f64;
                if (q - t).abs() > 1e-3 {
                    out.push((t, p / (q - t) - r));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::mat_inner;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn quotient_affine_examples() {
        assert_eq!(quotient_affine(RP1Point::new(0.0)), ExtReal::Finite(0.0));
        match quotient_affine(RP1Point::new(PI / 4.0)) {
            ExtReal::Finite(t) => assert!(close(t, 1.0, 1e-12)),
            _ => panic!("expected finite"),
        }
        assert_eq!(quotient_affine(RP1Point::new(PI / 2.0)), ExtReal::Infinity);
        // mutual inverse
        for &x in &[0.0, 0.3, 1.2, PI / 2.0, 2.9] {
            let t = quotient_affine(RP1Point::new(x));
            let back = affine_quotient(t);
            assert!(close(back.angle(), RP1Point::new(x).angle(), 1e-12));
        }
    }

    #[test]
    fn matrix_angle_examples() {
        let m = matrix_angle(0.0, 0.0);
        assert_eq!(m, Mat2([[1.0, 0.0], [0.0, 0.0]]));
        let m = matrix_angle(PI / 2.0, 0.0);
        for (i, j, want) in [(0, 0, 0.0), (0, 1, 0.0), (1, 0, 1.0), (1, 1, 0.0)] {
            assert!(close(m.0[i][j], want, 1e-15));
        }
        let (r1, r2) = ein_reduce(PI + 0.1, -PI + 0.2);
        assert!(close(r1, 0.1, 1e-12) && close(r2, 0.2, 1e-12));
        // rank 1: determinant vanishes
        let m = matrix_angle(0.7, 2.1);
        assert!(m.det().abs() < 1e-15);
    }

    #[test]
    fn penrose_examples() {
        assert_eq!(penrose_rot(0.0, 0.0).unwrap(), (0.0, 0.0));
        let (t1, t2) = penrose_rot(PI / 4.0, PI / 4.0).unwrap();
        assert!(close(t1, 1.0, 1e-12) && close(t2, 1.0, 1e-12));
        let (u, v) = penrose_mat(PI / 4.0, PI / 4.0).unwrap();
        assert!(close(u, 1.0, 1e-12) && close(v, 0.0, 1e-12));
        assert!(penrose_rot(PI / 2.0, 0.0).is_err());
    }

    #[test]
    fn kleinian_examples() {
        let p = kleinian(&MatVector22([0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.y, [0.0, 0.0, 0.0]);

        let x = MatVector22([1.0, 0.0, 1.0, 1.0]);
        assert!(close(inner22(&x, &x), -1.0, 1e-15));
        let p = kleinian(&x).unwrap();
        assert_eq!(p.y, [1.0, 0.0, 1.0]);
        assert!(p.norm21() < 1.0);

        assert!(matches!(
            kleinian(&MatVector22([0.3, 0.1, 1.2, 0.0])),
            Err(ChartError::OnExcludedPlane(_))
        ));
    }

    #[test]
    fn kleinian_roundtrip_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..1000 {
            // random point of the chart domain
            let y3: f64 = rng.gen_range(-2.0..2.0);
            let rad = (1.0 + y3 * y3).sqrt() * rng.gen_range(0.0..0.999f64);
            let th = rng.gen_range(0.0..2.0 * PI);
            let y = KleinPoint::new(rad * th.cos(), rad * th.sin(), y3);
            let x = kleinian_inverse(&y).unwrap();
            assert!(close(inner22(&x, &x), -1.0, 1e-10));
            let back = kleinian(&x).unwrap();
            for i in 0..3 {
                assert!(close(back.y[i], y.y[i], 1e-10 * (1.0 + y.y[i].abs())));
            }
        }
    }

    #[test]
    fn causal_quadrants() {
        assert_eq!(causal_type((1.0, 1.0)).unwrap(), CausalType::Spacelike);
        assert_eq!(causal_type((-1.0, -1.0)).unwrap(), CausalType::Spacelike);
        assert_eq!(causal_type((1.0, -1.0)).unwrap(), CausalType::Timelike);
        assert_eq!(causal_type((-1.0, 1.0)).unwrap(), CausalType::Timelike);
        assert_eq!(causal_type((1.0, 0.0)).unwrap(), CausalType::Lightlike);
        assert_eq!(causal_type((0.0, 1.0)).unwrap(), CausalType::Lightlike);
        assert!(matches!(causal_type((0.0, 0.0)), Err(ChartError::ZeroVector)));
    }

    #[test]
    fn acausal_circle_examples() {
        match acausal_circle_of(&MobiusMap::identity()) {
            AcausalCurve::Line { slope, intercept } => {
                assert!(close(slope, 1.0, 1e-15) && close(intercept, 0.0, 1e-15));
            }
            _ => panic!("expected line"),
        }
        let f = MobiusMap::new(2.0, 1.0, 0.0, 1.0).unwrap();
        match acausal_circle_of(&f) {
            AcausalCurve::Line { slope, intercept } => {
                assert!(close(slope, 2.0, 1e-12) && close(intercept, 1.0, 1e-12));
            }
            _ => panic!("expected line"),
        }
        // f(t) = 1/(1-t) - 1
        let f = MobiusMap::new(1.0, 0.0, -1.0, 1.0).unwrap();
        match acausal_circle_of(&f) {
            AcausalCurve::Hyperbola { p, q, r } => {
                assert!(close(p, 1.0, 1e-12));
                assert!(close(q, 1.0, 1e-12));
                assert!(close(r, 1.0, 1e-12));
            }
            _ => panic!("expected hyperbola"),
        }
    }

    #[test]
    fn pullback_metric_finite_difference() {
        // N^* <.,.>_mat = dx1 dx2 as a quadratic form, checked by central
        // differences with Richardson extrapolation.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..1000 {
            let x1 = rng.gen_range(0.0..PI);
            let x2 = rng.gen_range(0.0..PI);
            let v = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let quad = |h: f64| {
                let p = matrix_angle(x1 + h * v.0, x2 + h * v.1);
                let m = matrix_angle(x1 - h * v.0, x2 - h * v.1);
                let d = p.sub(&m).scale(1.0 / (2.0 * h));
                mat_inner(&d, &d)
            };
            let g1 = quad(1e-4);
            let g2 = quad(5e-5);
            let rich = (4.0 * g2 - g1) / 3.0;
            assert!(close(rich, v.0 * v.1, 1e-9 * (1.0 + (v.0 * v.1).abs())));
        }
    }

    #[test]
    fn ein_action_identity_and_closure() {
        let l = (RP1Point::new(0.4), RP1Point::new(1.3));
        let out = ein_action(&Mat2::identity(), &Mat2::identity(), l);
        assert!(close(out.0.angle(), 0.4, 1e-12));
        assert!(close(out.1.angle(), 1.3, 1e-12));

        // image of an acausal circle under the isometry action is again the
        // graph of a Mobius map: sample, interpolate, compare.
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..50 {
            let f = crate::mobius::tests::random_mobius(&mut rng);
            let m = crate::mobius::tests::random_mobius(&mut rng).line_matrix();
            let n = crate::mobius::tests::random_mobius(&mut rng).line_matrix();
            let img = |x: f64| {
                ein_action(&m, &n, (RP1Point::new(x), RP1Point::new(f.lift(x))))
            };
            // fit a Mobius map through three image points
            let xs = [0.1, 0.9, 1.7];
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .map(|&x| {
                    let (p1, p2) = img(x);
                    (p1.angle(), p2.angle())
                })
                .collect();
            let g = MobiusMap::through_three_points([pts[0], pts[1], pts[2]])
                .expect("image graph is a Mobius graph");
            for i in 0..=30 {
                let x = -1.0 + 4.0 * (i as f64) / 30.0;
                let (p1, p2) = img(x);
                let want = p2.angle();
                let got = g.lift(p1.angle()).rem_euclid(PI);
                let diff = (want - got).abs().min(PI - (want - got).abs());
                assert!(diff < 1e-8, "closure under the Ein action");
            }
        }
    }
}
