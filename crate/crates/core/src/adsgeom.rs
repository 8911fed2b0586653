//! Diamond geometry in `Ein^{1,1}` and the Kleinian chart, the canonical
//! normalization of a dyadic interval, corner limits, and the limiting
//! domain with its bounding radius.
//!
//! Graph coordinates `(x, y)` of `Ein^{1,1} = RP^1 x RP^1` embed into
//! `R^{2,2}` through the null vector
//!
//! ```text
//! w(x, y) = (cos(x+y), -sin(x+y), -sin(x-y), cos(x-y)) / 2,
//! ```
//!
//! fixed so that the diagonal graph maps onto the unit circle of the plane
//! `{y3 = 0}` in the Kleinian chart and the corners `(-pi/4, pi/4)` and
//! `(pi/4, -pi/4)` of the normalized square map to the lightlike rays
//! `(1, 0, 1)` and `(1, 0, -1)`. A diamond is then the intersection of two
//! half-spaces cut by the corner planes `<y, w123> >= w4`.

use crate::charts::{inner21, ChartError, KleinPoint};
use crate::dyadic::{DyadicInterval, Interval};
use crate::epsilon::EpsilonWitness;
use crate::homeo::CircleHomeo;
use crate::mobius::{phe_factors, MatVector22, MobiusError, MobiusMap};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdsGeomError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error("triple or its image does not fit the affine chart window (half-width {0:.3})")]
    ChartWindow(f64),
    #[error("canonical normalization needs depth >= 2, got {0}")]
    TooShallow(u32),
    #[error("basepoint {0} outside the interval")]
    BasepointOutside(f64),
}

/// Null vector of the graph point `(x, y)`.
pub fn graph_klein_vec(x: f64, y: f64) -> MatVector22 {
    let (ss, cs) = (x + y).sin_cos();
    let (sd, cd) = (x - y).sin_cos();
    MatVector22([0.5 * cs, -0.5 * ss, -0.5 * sd, 0.5 * cd])
}

/// Kleinian image of a graph point (`x4` must not vanish).
pub fn graph_klein_point(x: f64, y: f64) -> Result<KleinPoint, ChartError> {
    let w = graph_klein_vec(x, y);
    if w.0[3].abs() < 1e-14 {
        return Err(ChartError::OnExcludedPlane(w.0[3].abs()));
    }
    Ok(KleinPoint::new(w.0[0] / w.0[3], w.0[1] / w.0[3], w.0[2] / w.0[3]))
}

/// Half-space datum of a corner point: coordinates `(n1, n2, n3, c)` with
/// containment `<y, n>_{2,1} >= c`, sign-normalized to `c >= 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CornerPlane {
    pub n: [f64; 3],
    pub c: f64,
}

impl CornerPlane {
    pub fn of(x: f64, y: f64) -> Self {
        let w = graph_klein_vec(x, y);
        let s = if w.0[3] < 0.0 { -1.0 } else { 1.0 };
        CornerPlane { n: [s * w.0[0], s * w.0[1], s * w.0[2]], c: s * w.0[3] }
    }

    pub fn side(&self, q: &KleinPoint) -> f64 {
        inner21(&q.y, &self.n) - self.c
    }
}

/// Diamond of two time-related points in matrix-angle coordinates:
/// the product rectangle `[x11, x21] x [x22, x12]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EinDiamond {
    pub horizontal: (f64, f64),
    pub vertical: (f64, f64),
}

/// `p1 = (x11, x12)`, `p2 = (x21, x22)` with `x11 < x21`, `x12 > x22`.
pub fn diamond_ein(p1: (f64, f64), p2: (f64, f64)) -> Result<EinDiamond, ChartError> {
    if !(p1.0 < p2.0 && p1.1 > p2.1) {
        return Err(ChartError::NotTimeRelated);
    }
    Ok(EinDiamond { horizontal: (p1.0, p2.0), vertical: (p2.1, p1.1) })
}

/// `partial_infinity D_I = 3I x phi(3I)` for a dyadic interval of depth >= 2.
pub fn boundary_diamond(phi: &CircleHomeo, i: &DyadicInterval) -> EinDiamond {
    let t = i.triple();
    EinDiamond {
        horizontal: (t.lo, t.hi),
        vertical: (phi.lift(t.lo), phi.lift(t.hi)),
    }
}

/// Membership in the AdS diamond of two boundary corner points, via the
/// half-space sandwich of the corner planes. `q` must lie in the chart
/// domain `<q, q>_{2,1} < 1`.
pub fn diamond_ads_contains(
    p1: (f64, f64),
    p2: (f64, f64),
    q: &KleinPoint,
) -> Result<bool, ChartError> {
    if q.norm21() >= 1.0 {
        return Err(ChartError::OutsideKleinDomain(q.norm21()));
    }
    let a = CornerPlane::of(p1.0, p1.1);
    let b = CornerPlane::of(p2.0, p2.1);
    Ok(a.side(q) >= -1e-12 && b.side(q) >= -1e-12)
}

/// Membership in the ideal diamond of two lightlike rays of the chart.
pub fn ideal_diamond_contains(
    r1: [f64; 3],
    r2: [f64; 3],
    q: &KleinPoint,
) -> Result<bool, ChartError> {
    if q.norm21() >= 1.0 {
        return Err(ChartError::OutsideKleinDomain(q.norm21()));
    }
    Ok(inner21(&q.y, &r1) >= -1e-12 && inner21(&q.y, &r2) >= -1e-12)
}

/// One factor of the canonical transformation, `P . H . E`.
#[derive(Clone, Copy, Debug)]
pub struct PheTriple {
    pub parabolic: MobiusMap,
    pub hyperbolic: MobiusMap,
    pub elliptic: MobiusMap,
    pub composed: MobiusMap,
}

fn phe_normalize(center: f64, lo: f64, hi: f64) -> Result<PheTriple, AdsGeomError> {
    let half = (hi - center).max(center - lo);
    if half >= PI / 2.0 - 1e-9 {
        return Err(AdsGeomError::ChartWindow(half));
    }
    let e = MobiusMap::rotation(-center);
    let (p, h) = phe_factors((lo - center).tan(), (hi - center).tan())?;
    Ok(PheTriple { parabolic: p, hyperbolic: h, elliptic: e, composed: p.compose(&h).compose(&e) })
}

/// Canonical transformation `T_I = (T1, T2)` sending `3I` and `phi(3I)` to
/// arcs of length `pi/2` centered on 0.
#[derive(Clone, Copy, Debug)]
pub struct CanonicalTransform {
    pub t1: PheTriple,
    pub t2: PheTriple,
}

impl CanonicalTransform {
    /// Defects of the normalization contract for one side:
    /// `(|length - pi/2|, |center|)` of the image arc.
    pub fn contract_defect(t: &MobiusMap, iv: Interval) -> (f64, f64) {
        let a = t.lift(iv.lo);
        let b = t.lift(iv.hi);
        let len = (b - a - PI / 2.0).abs();
        let mid = 0.5 * (a + b);
        let center = (mid - PI * (mid / PI).round()).abs();
        (len, center)
    }
}

/// Build `T_I` with the given basepoint `x` in `I` (the epsilon witness
/// basepoint when available, the interval center otherwise).
pub fn canonical_transform(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    x: f64,
) -> Result<CanonicalTransform, AdsGeomError> {
    if i.depth < 2 {
        return Err(AdsGeomError::TooShallow(i.depth));
    }
    if !i.interval().contains(x) {
        return Err(AdsGeomError::BasepointOutside(x));
    }
    let t = i.triple();
    let t1 = phe_normalize(x, t.lo, t.hi)?;
    let fx = phi.lift(x);
    let t2 = phe_normalize(fx, phi.lift(t.lo), phi.lift(t.hi))?;
    Ok(CanonicalTransform { t1, t2 })
}

/// Normalized data of an interval: `y_I = T1 x_I`, `psi_I = T2 phi T1^{-1}`
/// and, when a witness is supplied, `g± = T2 f± T1^{-1}`.
pub struct NormalizedData {
    pub transform: CanonicalTransform,
    pub y_i: f64,
    pub psi: CircleHomeo,
    pub g_plus: Option<MobiusMap>,
    pub g_minus: Option<MobiusMap>,
}

pub fn normalized_data(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    witness: Option<&EpsilonWitness>,
) -> Result<NormalizedData, AdsGeomError> {
    let x = witness.map_or(i.interval().mid(), |w| w.x);
    let transform = canonical_transform(phi, i, x)?;
    let t1 = transform.t1.composed;
    let t2 = transform.t2.composed;
    let psi = CircleHomeo::compose(
        &CircleHomeo::from_mobius(t2),
        &CircleHomeo::compose(phi, &CircleHomeo::from_mobius(t1.inverse())),
    );
    let (g_plus, g_minus) = match witness {
        Some(w) => (
            Some(t2.compose(&w.f_plus.map).compose(&t1.inverse())),
            Some(t2.compose(&w.f_minus.map).compose(&t1.inverse())),
        ),
        None => (None, None),
    };
    let mut y_i = t1.lift(x);
    y_i -= PI * (y_i / PI).round();
    Ok(NormalizedData { transform, y_i, psi, g_plus, g_minus })
}

/// Predicted-vs-actual corner positions of a child interval under the
/// canonical transformation.
#[derive(Clone, Debug, Serialize)]
pub struct CornerReport {
    pub k: i64,
    /// `arctan(k/3)` and `arctan((k+1)/3)`
    pub predicted: (f64, f64),
    /// worst deviation over the four corner values
    pub deviation: f64,
}

fn principal(v: f64) -> f64 {
    v - PI * (v / PI).round()
}

/// For a child `J` of `3I` with `l(J) = l(I)/2`, locate the integer `k`
/// minimizing the deviation of `(T1 J)±` and `(T2 phi(J))±` from
/// `arctan(k/3), arctan((k+1)/3)`.
pub fn corner_positions(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    j: &DyadicInterval,
    x: f64,
) -> Result<CornerReport, AdsGeomError> {
    let t = canonical_transform(phi, i, x)?;
    let jv = j.interval();
    let a1 = principal(t.t1.composed.lift(jv.lo));
    let b1 = principal(t.t1.composed.lift(jv.hi));
    let a2 = principal(t.t2.composed.lift(phi.lift(jv.lo)));
    let b2 = principal(t.t2.composed.lift(phi.lift(jv.hi)));
    let mut best = CornerReport { k: 0, predicted: (0.0, 0.0), deviation: f64::INFINITY };
    for k in -3i64..=2 {
        let lo = (k as f64 / 3.0).atan();
        let hi = ((k + 1) as f64 / 3.0).atan();
        let dev = (a1 - lo)
            .abs()
            .max((b1 - hi).abs())
            .max((a2 - lo).abs())
            .max((b2 - hi).abs());
        if dev < best.deviation {
            best = CornerReport { k, predicted: (lo, hi), deviation: dev };
        }
    }
    Ok(best)
}

/// The limiting domain: the `y3 = 0` slice of the ambient ideal diamond
/// minus the six child diamonds over the corner angles `arctan(j/3)`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitingDomain {
    /// chord distance and inward normal of each child diamond's slice
    pub caps: Vec<CornerPlane>,
    pub boundary: Vec<[f64; 2]>,
    /// supremum of the radius over the boundary sample
    pub r: f64,
    pub interior_samples: usize,
}

impl LimitingDomain {
    pub fn contains(&self, y1: f64, y2: f64) -> bool {
        if y1 < 0.0 || y1 * y1 + y2 * y2 >= 1.0 {
            return false;
        }
        let q = KleinPoint::new(y1, y2, 0.0);
        self.caps.chunks(2).all(|pair| {
            !(pair[0].side(&q) > 1e-12 && pair[1].side(&q) > 1e-12)
        })
    }
}

/// Corner angle `x_j = arctan(j/3)`.
pub fn corner_angle(j: i64) -> f64 {
    (j as f64 / 3.0).atan()
}

pub fn limiting_domain(samples: usize) -> LimitingDomain {
    // six diamonds D_i over corner pairs (x_{i-1}, x_{i+2}), (x_{i+2}, x_{i-1})
    let mut caps = Vec::with_capacity(12);
    for i in -3i64..=2 {
        let a = corner_angle(i - 1);
        let b = corner_angle(i + 2);
        caps.push(CornerPlane::of(a, b));
        caps.push(CornerPlane::of(b, a));
    }
    let domain = LimitingDomain { caps, boundary: Vec::new(), r: 0.0, interior_samples: 0 };

    let mut boundary: Vec<[f64; 2]> = Vec::new();
    let per_line = (samples / 14).max(32);
    // candidate boundary curves: each cap chord, the y1 = 0 diameter, and a
    // probe ring just inside the unit circle (catches uncovered arcs)
    let push_if_boundary = |y1: f64, y2: f64, boundary: &mut Vec<[f64; 2]>| {
        if y1 < -1e-9 || y1 * y1 + y2 * y2 >= 1.0 {
            return;
        }
        // on the closure of the region: not strictly inside any cap
        let q = KleinPoint::new(y1, y2, 0.0);
        let inside_cap = domain.caps.chunks(2).any(|pair| {
            pair[0].side(&q) > 1e-9 && pair[1].side(&q) > 1e-9
        });
        if !inside_cap {
            boundary.push([y1, y2]);
        }
    };
    for pair in domain.caps.chunks(2) {
        for plane in pair {
            // line {y . n = c} within the disk
            let n = [plane.n[0], plane.n[1]];
            let nn = (n[0] * n[0] + n[1] * n[1]).sqrt();
            let (u1, u2) = (n[0] / nn, n[1] / nn);
            let d = plane.c / nn;
            if d >= 1.0 {
                continue;
            }
            let half = (1.0 - d * d).sqrt();
            for s in 0..per_line {
                let t = -half + 2.0 * half * (s as f64 + 0.5) / per_line as f64;
                // base point + tangential offset
                let y1 = d * u1 - t * u2;
                let y2 = d * u2 + t * u1;
                push_if_boundary(y1, y2, &mut boundary);
            }
        }
    }
    for s in 0..per_line {
        let y2 = -1.0 + 2.0 * (s as f64 + 0.5) / per_line as f64;
        push_if_boundary(0.0, y2, &mut boundary);
    }
    let ring = 1.0 - 1e-9;
    for s in 0..per_line * 2 {
        let th = -PI / 2.0 + PI * (s as f64 + 0.5) / (per_line * 2) as f64;
        push_if_boundary(ring * th.cos(), ring * th.sin(), &mut boundary);
    }

    let r = boundary
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .fold(0.0, f64::max);

    // interior count on a coarse grid, for the nonemptiness diagnostic
    let mut interior = 0usize;
    let g = 64;
    for a in 0..g {
        for b in 0..g {
            let y1 = (a as f64 + 0.5) / g as f64;
            let y2 = -1.0 + 2.0 * (b as f64 + 0.5) / g as f64;
            if domain.contains(y1, y2) {
                interior += 1;
            }
        }
    }
    LimitingDomain { caps: domain.caps, boundary, r, interior_samples: interior }
}

/// Slab `{y1^2 + y2^2 < 1 + y3^2, |y3| < c_eps}` membership.
pub fn slab_contains(c_eps: f64, q: &KleinPoint) -> bool {
    q.norm21() < 1.0 && q.y[2].abs() < c_eps
}

/// `|y3|` of the graph point `(x, y)` in the Kleinian chart: the graph of a
/// map `g` has `y3 = tan(g(x) - x)` up to the period.
pub fn graph_y3(x: f64, y: f64) -> f64 {
    principal(y - x).tan()
}

/// Worst `|y3|` over a sampled graph of a homeomorphism.
pub fn worst_y3_of_homeo(g: &CircleHomeo, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let x = PI * (k as f64 + 0.5) / n as f64;
            graph_y3(x, g.lift(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Worst `|y3|` over a sampled graph of a Mobius map.
pub fn worst_y3_of_mobius(m: &MobiusMap, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let x = PI * (k as f64 + 0.5) / n as f64;
            graph_y3(x, m.lift(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Slab data of the normalized graph of one interval: worst `|y3|` over
/// samples of `graph(psi_I)` and, when a witness is supplied, over the
/// witness graphs `g±` (the curves pinching the normalized surface).
pub struct SlabReport {
    pub psi_worst_y3: f64,
    pub witness_worst_y3: Option<f64>,
}

pub fn homeo_graph_in_slab(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    witness: Option<&EpsilonWitness>,
    n: usize,
) -> Result<SlabReport, AdsGeomError> {
    let nd = normalized_data(phi, i, witness)?;
    let psi_worst_y3 = worst_y3_of_homeo(&nd.psi, n);
    let witness_worst_y3 = match (nd.g_plus, nd.g_minus) {
        (Some(p), Some(m)) => {
            Some(worst_y3_of_mobius(&p, n).max(worst_y3_of_mobius(&m, n)))
        }
        _ => None,
    };
    Ok(SlabReport { psi_worst_y3, witness_worst_y3 })
}
