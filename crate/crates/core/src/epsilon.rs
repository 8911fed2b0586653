//! Epsilon numbers: the smallest normalized 2-jet defect of a pair of
//! Mobius maps pinching the homeomorphism from both sides.
//!
//! A witness for `eps(I)` is a basepoint `x` in `I` and lifts `f-, f+` with
//! `f- <= phi <= f+` everywhere (checked over one period with
//! Lipschitz slack) whose jets at `x` are within `eps` of the mean-slope
//! linear jet, in the scalings of the triple `3I`:
//!
//! ```text
//! |f(x) - phi(x)|          <= eps * l(phi 3I)
//! |f'(x) - l(phi 3I)/l(3I)| <= eps * l(phi 3I)/l(3I)
//! |f''(x)|                 <= eps * l(phi 3I)/l(3I)^2
//! ```
//!
//! Upper bounds come from the constructive quadratic-then-fractional
//! majorants (`P, Q, R` data), refined by coordinate descent on the jets;
//! lower bounds from a pointwise necessary condition on the jet box. When
//! no pinching pair is found the value is 1 by convention.

use crate::beta::{sum_verdict, DepthSum, SumReport, TripleTable};
use crate::dyadic::DyadicInterval;
use crate::homeo::CircleHomeo;
use crate::mobius::{MobiusLift, MobiusMap};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EpsilonError {
    #[error("witness lifts are inconsistent with the equivariance convention (gap {0:.3e})")]
    LiftMismatch(f64),
    #[error("interval length {len:.3e} is not below delta^4 = {delta4:.3e}")]
    ScaleTooCoarse { len: f64, delta4: f64 },
    #[error("pinching fails at x = {point} (violation {violation:.3e})")]
    PinchFailure { point: f64, violation: f64 },
}

/// Pinching pair with its basepoint and realized defect.
#[derive(Clone, Debug)]
pub struct EpsilonWitness {
    /// basepoint lift
    pub x: f64,
    pub f_minus: MobiusLift,
    pub f_plus: MobiusLift,
    /// max of the three normalized jet defects over both maps
    pub realized: f64,
}

/// Outcome of a feasibility check.
#[derive(Clone, Copy, Debug)]
pub enum Feasibility {
    /// worst raw margin over the pinching grid
    Feasible { margin: f64 },
    /// first violating point and the (negative) margin there
    Infeasible { point: f64, violation: f64 },
}

#[derive(Clone, Copy, Debug)]
pub enum DeltaPolicy {
    /// the smallness scale of the majorant hypothesis, found by scanning
    /// triple betas down to `max_scan_depth`
    Scan { max_scan_depth: u32 },
    /// explicit smallness scale
    Fixed(f64),
    /// ancestor sums run while the triple beta stays under the eta
    /// threshold; no hypothesis enforced (working-depth mode)
    ThresholdChain,
}

#[derive(Clone, Debug)]
pub struct EpsilonConfig {
    pub eta: f64,
    pub delta: DeltaPolicy,
    /// basepoints tried inside `I`
    pub basepoints: usize,
    /// coordinate-descent sweeps over the six jet parameters
    pub descent_iters: usize,
    /// pinching grid cells over one period
    pub pinch_grid: usize,
    /// probes of `3I` for the lower bound
    pub lo_probes: usize,
    /// bisection steps for the lower bound
    pub lo_bisect: usize,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        EpsilonConfig {
            eta: 0.5,
            delta: DeltaPolicy::ThresholdChain,
            basepoints: 3,
            descent_iters: 16,
            pinch_grid: 512,
            lo_probes: 17,
            lo_bisect: 22,
        }
    }
}

/// Scalings of Def-style conditions for one interval.
#[derive(Clone, Copy, Debug)]
pub struct TripleScales {
    /// `l(3I)`
    pub len3: f64,
    /// `l(phi(3I))`
    pub img3: f64,
}

impl TripleScales {
    pub fn of(phi: &CircleHomeo, i: &DyadicInterval) -> Self {
        let t = i.triple();
        TripleScales { len3: t.len(), img3: phi.image_length(t) }
    }
}

fn jet_defects(phi: &CircleHomeo, xhat: f64, f: &MobiusLift, sc: &TripleScales) -> [f64; 3] {
    let mean = sc.img3 / sc.len3;
    let d0 = (f.eval(xhat) - phi.lift(xhat)).abs() / sc.img3;
    let d1 = (f.deriv(xhat) - mean).abs() / mean;
    let d2 = f.deriv2(xhat).abs() * sc.len3 * sc.len3 / sc.img3;
    [d0, d1, d2]
}

/// Realized defect of a witness pair.
pub fn realized_epsilon(
    phi: &CircleHomeo,
    xhat: f64,
    f_minus: &MobiusLift,
    f_plus: &MobiusLift,
    sc: &TripleScales,
) -> f64 {
    let a = jet_defects(phi, xhat, f_minus, sc);
    let b = jet_defects(phi, xhat, f_plus, sc);
    a.into_iter().chain(b).fold(0.0, f64::max)
}

/// Cached lift values of `phi` over one period `[xhat, xhat + pi]`.
struct PinchChecker<'a> {
    phi: &'a CircleHomeo,
    xs: Vec<f64>,
    vals: Vec<f64>,
}

const EQ_TOL: f64 = 1e-9;

impl<'a> PinchChecker<'a> {
    fn new(phi: &'a CircleHomeo, xhat: f64, n: usize) -> Self {
        let xs: Vec<f64> = (0..=n).map(|i| xhat + PI * (i as f64) / (n as f64)).collect();
        let vals = xs.iter().map(|&x| phi.lift(x)).collect();
        PinchChecker { phi, xs, vals }
    }

    /// Certified check of `side * (f - phi) >= 0` over the period.
    /// Returns the worst raw margin, or the violating point.
    ///
    /// Both lifts are increasing, so a cell `[a, b]` is certified for the
    /// upper check by `f(a) >= phi(b)` alone (and for the lower check by
    /// `f(b) <= phi(a)`); no modulus of either map enters. Uncertified
    /// cells subdivide; touching regions bottom out at the equality
    /// tolerance.
    fn check_side(&self, f: &MobiusLift, side: f64) -> Result<f64, (f64, f64)> {
        let mut worst = f64::INFINITY;
        let n = self.xs.len();
        let fvals: Vec<f64> = self.xs.iter().map(|&x| f.eval(x)).collect();
        for i in 0..n {
            let m = side * (fvals[i] - self.vals[i]);
            if m < -EQ_TOL {
                return Err((self.xs[i], m));
            }
            worst = worst.min(m);
        }
        for i in 0..n - 1 {
            let certified = if side > 0.0 {
                fvals[i] - self.vals[i + 1] >= -EQ_TOL
            } else {
                self.vals[i] - fvals[i + 1] >= -EQ_TOL
            };
            if !certified {
                let w = self.subdivide(
                    f,
                    side,
                    (self.xs[i], fvals[i], self.vals[i]),
                    (self.xs[i + 1], fvals[i + 1], self.vals[i + 1]),
                    12,
                )?;
                worst = worst.min(w);
            }
        }
        Ok(worst)
    }

    /// `lo`/`hi` carry `(x, f(x), phi(x))`.
    fn subdivide(
        &self,
        f: &MobiusLift,
        side: f64,
        lo: (f64, f64, f64),
        hi: (f64, f64, f64),
        depth: u32,
    ) -> Result<f64, (f64, f64)> {
        let x = 0.5 * (lo.0 + hi.0);
        let fx = f.eval(x);
        let px = self.phi.lift(x);
        let m = side * (fx - px);
        if m < -EQ_TOL {
            return Err((x, m));
        }
        if depth == 0 {
            return Ok(m);
        }
        let mid = (x, fx, px);
        let mut worst = m;
        for (a, b) in [(lo, mid), (mid, hi)] {
            let certified = if side > 0.0 {
                a.1 - b.2 >= -EQ_TOL
            } else {
                a.2 - b.1 >= -EQ_TOL
            };
            if !certified {
                worst = worst.min(self.subdivide(f, side, a, b, depth - 1)?);
            }
        }
        Ok(worst)
    }

    fn check_pair(&self, f_minus: &MobiusLift, f_plus: &MobiusLift) -> Feasibility {
        match (self.check_side(f_plus, 1.0), self.check_side(f_minus, -1.0)) {
            (Ok(a), Ok(b)) => Feasibility::Feasible { margin: a.min(b) },
            (Err((p, v)), _) | (_, Err((p, v))) => Feasibility::Infeasible { point: p, violation: v },
        }
    }
}

/// Feasibility of a witness at defect level `eps`: the three jet conditions
/// at the basepoint exactly, global pinching on a certified grid.
pub fn witness_feasible(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    w: &EpsilonWitness,
    eps: f64,
    cfg: &EpsilonConfig,
) -> Result<Feasibility, EpsilonError> {
    let sc = TripleScales::of(phi, i);
    let gap = (w.f_plus.eval(w.x) - phi.lift(w.x))
        .abs()
        .max((w.f_minus.eval(w.x) - phi.lift(w.x)).abs());
    if gap >= PI / 2.0 {
        return Err(EpsilonError::LiftMismatch(gap));
    }
    // exact two-sided pinching (f- = f+ = phi on the whole grid) realizes
    // the limit defect 0: the pair is a witness for every eps >= 0
    let checker = PinchChecker::new(phi, w.x, cfg.pinch_grid);
    let exact = checker
        .xs
        .iter()
        .zip(checker.vals.iter())
        .all(|(&x, &v)| {
            (w.f_plus.eval(x) - v).abs() <= EQ_TOL && (w.f_minus.eval(x) - v).abs() <= EQ_TOL
        });
    if exact {
        return Ok(Feasibility::Feasible { margin: 0.0 });
    }
    let slack = 1e-12;
    for f in [&w.f_minus, &w.f_plus] {
        let d = jet_defects(phi, w.x, f, &sc);
        for v in d {
            if v > eps + slack {
                return Ok(Feasibility::Infeasible { point: w.x, violation: eps - v });
            }
        }
    }
    Ok(checker.check_pair(&w.f_minus, &w.f_plus))
}

/// Majorant data: the `P, Q, R` of the quadratic construction on `3I`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MajorantData {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub eta: f64,
    /// smallness scale in force (`0` in working-depth mode)
    pub delta: f64,
    /// the constructed constant `256 * 76 * 2^-eta / (1 - 2^(eta-1))`
    pub c_const: f64,
    pub gamma3: f64,
    pub beta3: f64,
    pub img3: f64,
}

impl MajorantData {
    /// `p(y) = phi(x) + 2 beta(3I) l(phi 3I) + gamma(3I)(y - x)
    ///        + (gamma(3I)/(16 Q))(y - x)^2`
    pub fn quadratic(&self, phi_x: f64, x: f64) -> impl Fn(f64) -> f64 {
        let c0 = phi_x + 2.0 * self.beta3 * self.img3;
        let c1 = self.gamma3;
        let c2 = self.gamma3 / (16.0 * self.q);
        move |y: f64| c0 + c1 * (y - x) + c2 * (y - x) * (y - x)
    }
}

/// The eta-threshold `(2^eta - 1)/32` under which the discrete Gronwall
/// machinery applies.
pub fn beta_threshold(eta: f64) -> f64 {
    ((2f64).powf(eta) - 1.0) / 32.0
}

fn c_const(eta: f64) -> f64 {
    assert!(eta > 0.0 && eta < 1.0, "the constructed constant needs eta in (0,1)");
    let c1 = 76.0 * (2f64).powf(-eta);
    256.0 * c1 / (1.0 - (2f64).powf(eta - 1.0))
}

/// Ancestor sum `sum_J beta(3J) (l(I)/l(J))^(1-eta)` over the dyadic chain
/// above (and including) `I`, cut per the delta policy.
fn ancestor_sum(
    i: &DyadicInterval,
    table: &TripleTable,
    eta: f64,
    policy: &DeltaPolicy,
) -> Result<(f64, f64), EpsilonError> {
    let li = i.len();
    let thresh = beta_threshold(eta);
    let mut chain = vec![*i];
    chain.extend(i.chain());
    let mut sum = 0.0;
    let mut delta = 0.0;
    match policy {
        DeltaPolicy::ThresholdChain => {
            for j in &chain {
                let b = table.get(j).beta;
                if b >= thresh {
                    break;
                }
                sum += b * (li / j.len()).powf(1.0 - eta);
                delta = j.len() / 24.0;
            }
        }
        DeltaPolicy::Fixed(d) => {
            delta = *d;
            let d4 = d.powi(4);
            if li >= d4 {
                return Err(EpsilonError::ScaleTooCoarse { len: li, delta4: d4 });
            }
            for j in &chain {
                if j.len() < 24.0 * d {
                    sum += table.get(j).beta * (li / j.len()).powf(1.0 - eta);
                }
            }
        }
        DeltaPolicy::Scan { max_scan_depth } => {
            let scan_to = (*max_scan_depth).min(table.max_depth());
            // smallest depth from which every scanned depth satisfies the
            // threshold on all of its triples
            let mut mstar = None;
            for m in (0..=scan_to).rev() {
                let all_ok = (0..(1u64 << m))
                    .all(|k| table.get(&DyadicInterval::new(table.base, m, k)).beta < thresh);
                if all_ok {
                    mstar = Some(m);
                } else {
                    break;
                }
            }
            let Some(mstar) = mstar else {
                return Err(EpsilonError::ScaleTooCoarse { len: li, delta4: 0.0 });
            };
            delta = PI * (2f64).powi(1 - mstar as i32) / 24.0;
            let d4 = delta.powi(4);
            if li >= d4 {
                return Err(EpsilonError::ScaleTooCoarse { len: li, delta4: d4 });
            }
            for j in &chain {
                if j.depth >= mstar {
                    sum += table.get(j).beta * (li / j.len()).powf(1.0 - eta);
                }
            }
        }
    }
    Ok((sum, delta))
}

/// Quadratic majorant data per the `P, Q, R` construction:
/// `1/Q = l(I)^(-1/4) + (C/l(I)) * ancestor sum`, `P/Q^2 = gamma(3I)`,
/// `P/Q - R = 2 beta(3I) l(phi 3I)`.
pub fn quadratic_majorant(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    table: &TripleTable,
    cfg: &EpsilonConfig,
) -> Result<MajorantData, EpsilonError> {
    quadratic_majorant_scaled(phi, i, table, cfg, 1.0)
}

fn quadratic_majorant_scaled(
    _phi: &CircleHomeo,
    i: &DyadicInterval,
    table: &TripleTable,
    cfg: &EpsilonConfig,
    c_scale: f64,
) -> Result<MajorantData, EpsilonError> {
    let c = c_const(cfg.eta) * c_scale;
    let (sum, delta) = ancestor_sum(i, table, cfg.eta, &cfg.delta)?;
    let li = i.len();
    let q_inv = li.powf(-0.25) + (c / li) * sum;
    let q = 1.0 / q_inv;
    let td = table.get(i);
    let p = td.gamma * q * q;
    let r = p / q - 2.0 * td.beta * td.image_len;
    Ok(MajorantData {
        p,
        q,
        r,
        eta: cfg.eta,
        delta,
        c_const: c,
        gamma3: td.gamma,
        beta3: td.beta,
        img3: td.image_len,
    })
}

/// Grid verification of `p >= phi` over `[x - 5Q, x + 3Q]` with Lipschitz
/// slack between nodes; returns the worst margin.
pub fn verify_quadratic(
    phi: &CircleHomeo,
    m: &MajorantData,
    x: f64,
    n: usize,
) -> Result<f64, EpsilonError> {
    let p = m.quadratic(phi.lift(x), x);
    let lo = x - 5.0 * m.q;
    let hi = x + 3.0 * m.q;
    let h = (hi - lo) / n as f64;
    // slope bound for p - phi over the window
    let lip = phi.lipschitz() + m.gamma3 * (1.0 + 8.0 * 5.0 / 16.0);
    let mut worst = f64::INFINITY;
    let mut prev = p(lo) - phi.lift(lo);
    for k in 1..=n {
        let y = lo + h * k as f64;
        let cur = p(y) - phi.lift(y);
        if cur < -EQ_TOL {
            return Err(EpsilonError::PinchFailure { point: y, violation: cur });
        }
        if prev + cur < lip * h {
            // resolve the dip directly
            for j in 1..8 {
                let z = y - h + h * j as f64 / 8.0;
                let mz = p(z) - phi.lift(z);
                if mz < -EQ_TOL {
                    return Err(EpsilonError::PinchFailure { point: z, violation: mz });
                }
                worst = worst.min(mz);
            }
        }
        worst = worst.min(cur);
        prev = cur;
    }
    Ok(worst)
}

/// The unique Mobius maps with the prescribed jets at `x`
/// (`f+` above, `f-` mirrored below), pinching verified over one period.
pub fn fractional_majorant(
    phi: &CircleHomeo,
    m: &MajorantData,
    x: f64,
    cfg: &EpsilonConfig,
) -> Result<(MobiusLift, MobiusLift), EpsilonError> {
    let (fp, fm) = fractional_pair(phi, m, x);
    let checker = PinchChecker::new(phi, x, cfg.pinch_grid);
    match checker.check_pair(&fm, &fp) {
        Feasibility::Feasible { .. } => Ok((fp, fm)),
        Feasibility::Infeasible { point, violation } => {
            Err(EpsilonError::PinchFailure { point, violation })
        }
    }
}

fn fractional_pair(phi: &CircleHomeo, m: &MajorantData, x: f64) -> (MobiusLift, MobiusLift) {
    let v = phi.lift(x);
    let off = m.p / m.q - m.r;
    let d1 = m.p / (m.q * m.q);
    let d2 = 2.0 * m.p / (m.q * m.q * m.q);
    let up = MobiusMap::from_lift_jet(x, v + off, d1, d2);
    let dn = MobiusMap::from_lift_jet(x, v - off, d1, -d2);
    (
        MobiusLift::matching(up, x, v + off),
        MobiusLift::matching(dn, x, v - off),
    )
}

/// Certified bracket for the epsilon number of one interval.
#[derive(Clone, Debug)]
pub struct EpsilonBracket {
    pub lo: f64,
    pub hi: f64,
    pub witness: Option<EpsilonWitness>,
}

/// Detect an exactly Mobius homeomorphism: fit through three graph points
/// and verify on a grid. An exact two-sided pinching witness realizes 0.
fn mobius_exact_fit(phi: &CircleHomeo) -> Option<MobiusMap> {
    let m = MobiusMap::through_three_points([
        (0.1, phi.lift(0.1)),
        (1.1, phi.lift(1.1)),
        (2.1, phi.lift(2.1)),
    ])?;
    let lift = MobiusLift::matching(m, 0.1, phi.lift(0.1));
    for i in 0..=512 {
        let x = PI * i as f64 / 512.0;
        if (lift.eval(x) - phi.lift(x)).abs() > 1e-11 {
            return None;
        }
    }
    Some(m)
}

/// Lower bound at one basepoint: smallest `eps` whose jet box can reach
/// above and below `phi` at every probe of `3I` (a necessary condition for
/// a pinching pair, global pinching ignored).
fn lower_bound_at(
    phi: &CircleHomeo,
    xhat: f64,
    sc: &TripleScales,
    triple: crate::dyadic::Interval,
    cfg: &EpsilonConfig,
) -> f64 {
    let mean = sc.img3 / sc.len3;
    let phix = phi.lift(xhat);
    let probes: Vec<(f64, f64)> = (0..cfg.lo_probes)
        .map(|j| {
            let y = triple.lo + triple.len() * (j as f64 + 0.5) / cfg.lo_probes as f64;
            (y, phi.lift(y))
        })
        .collect();
    let feasible = |eps: f64| -> bool {
        let vs = [phix - eps * sc.img3, phix + eps * sc.img3];
        // the slope corner is floored at 5% of the mean slope: slopes nearer
        // zero produce matrices too skewed to evaluate, and the regime only
        // occurs for eps near 1 where the bound is saturated anyway
        let ds = [mean * (1.0 - eps).max(0.05), mean * (1.0 + eps)];
        let ss = [-eps * sc.img3 / (sc.len3 * sc.len3), eps * sc.img3 / (sc.len3 * sc.len3)];
        for &(y, py) in &probes {
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for &v in &vs {
                for &d in &ds {
                    for &s in &ss {
                        let f = MobiusMap::from_lift_jet(xhat, v, d, s);
                        let val = MobiusLift::matching(f, xhat, v).eval(y);
                        hi = hi.max(val);
                        lo = lo.min(val);
                    }
                }
            }
            if hi < py - 1e-13 || lo > py + 1e-13 {
                return false;
            }
        }
        true
    };
    if feasible(0.0) {
        return 0.0;
    }
    if !feasible(1.0) {
        return 1.0;
    }
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..cfg.lo_bisect {
        let mid = 0.5 * (a + b);
        if feasible(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

/// Constructive upper bound and witness via the majorant ladder plus
/// coordinate descent on the six jet parameters.
fn upper_bound(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    table: &TripleTable,
    cfg: &EpsilonConfig,
) -> Option<EpsilonWitness> {
    let sc = TripleScales::of(phi, i);
    let iv = i.interval();
    let mut best: Option<EpsilonWitness> = None;

    let chain_cfg = EpsilonConfig { delta: DeltaPolicy::ThresholdChain, ..cfg.clone() };
    for j in 0..cfg.basepoints {
        let x = iv.lo + iv.len() * (j as f64 + 0.5) / cfg.basepoints as f64;
        let checker = PinchChecker::new(phi, x, cfg.pinch_grid);
        for c_scale in [0.0, 1e-3, 3e-2, 1.0] {
            let Ok(m) = quadratic_majorant_scaled(phi, i, table, &chain_cfg, c_scale) else {
                continue;
            };
            let (fp, fm) = fractional_pair(phi, &m, x);
            if let Feasibility::Feasible { .. } = checker.check_pair(&fm, &fp) {
                let realized = realized_epsilon(phi, x, &fm, &fp, &sc);
                if best.as_ref().map_or(true, |b| realized < b.realized) {
                    best = Some(EpsilonWitness { x, f_minus: fm, f_plus: fp, realized });
                }
                break; // smaller c_scale realizes a smaller defect
            }
        }
    }
    let seed = best?;
    Some(descend(phi, &seed, &sc, cfg))
}

/// Deterministic coordinate descent over the jet parameters of the pair,
/// with feasibility as a hard constraint.
fn descend(
    phi: &CircleHomeo,
    seed: &EpsilonWitness,
    sc: &TripleScales,
    cfg: &EpsilonConfig,
) -> EpsilonWitness {
    let x = seed.x;
    let checker = PinchChecker::new(phi, x, cfg.pinch_grid);
    let mean = sc.img3 / sc.len3;
    let mut params = [
        seed.f_minus.eval(x),
        seed.f_minus.deriv(x),
        seed.f_minus.deriv2(x),
        seed.f_plus.eval(x),
        seed.f_plus.deriv(x),
        seed.f_plus.deriv2(x),
    ];
    let rebuild = |p: &[f64; 6]| -> Option<(MobiusLift, MobiusLift)> {
        if p[1] <= 0.0 || p[4] <= 0.0 {
            return None;
        }
        let fm = MobiusMap::from_lift_jet(x, p[0], p[1], p[2]);
        let fp = MobiusMap::from_lift_jet(x, p[3], p[4], p[5]);
        Some((
            MobiusLift::matching(fm, x, p[0]),
            MobiusLift::matching(fp, x, p[3]),
        ))
    };
    let score = |fm: &MobiusLift, fp: &MobiusLift| realized_epsilon(phi, x, fm, fp, sc);

    let mut cur = seed.clone();
    let mut step = 0.35 * cur.realized.min(1.0).max(1e-6);
    for _ in 0..cfg.descent_iters {
        let scales = [
            sc.img3,              // value-
            mean,                 // slope-
            sc.img3 / (sc.len3 * sc.len3), // curvature-
            sc.img3,
            mean,
            sc.img3 / (sc.len3 * sc.len3),
        ];
        let mut improved = false;
        for k in 0..6 {
            for dir in [-1.0, 1.0] {
                let mut cand = params;
                cand[k] += dir * step * scales[k];
                let Some((fm, fp)) = rebuild(&cand) else { continue };
                let r = score(&fm, &fp);
                if r >= cur.realized {
                    continue;
                }
                if let Feasibility::Feasible { .. } = checker.check_pair(&fm, &fp) {
                    params = cand;
                    cur = EpsilonWitness { x, f_minus: fm, f_plus: fp, realized: r };
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    cur
}

/// The realized defect of the best pinching pair found (1 when none
/// exists): the upper end of [`epsilon_number`]'s bracket.
pub fn epsilon_upper(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    table: &TripleTable,
    cfg: &EpsilonConfig,
) -> f64 {
    epsilon_number(phi, i, table, cfg).hi
}

/// Certified bracket `[lo, hi]` for `eps(I)`. Mobius inputs short-circuit
/// to `[0, 0]` with the exact witness; otherwise `hi` is the realized
/// defect of the best pinching pair found (1 when none exists) and `lo` a
/// pointwise necessary bound.
pub fn epsilon_number(
    phi: &CircleHomeo,
    i: &DyadicInterval,
    table: &TripleTable,
    cfg: &EpsilonConfig,
) -> EpsilonBracket {
    if let Some(m) = mobius_exact_fit(phi) {
        let x = i.interval().mid();
        let lift = MobiusLift::matching(m, x, phi.lift(x));
        return EpsilonBracket {
            lo: 0.0,
            hi: 0.0,
            witness: Some(EpsilonWitness { x, f_minus: lift, f_plus: lift, realized: 0.0 }),
        };
    }
    let witness = upper_bound(phi, i, table, cfg);
    let hi = witness.as_ref().map_or(1.0, |w| w.realized.min(1.0));
    let sc = TripleScales::of(phi, i);
    let triple = i.triple();
    let iv = i.interval();
    let mut lo = f64::INFINITY;
    for j in 0..cfg.basepoints {
        let x = iv.lo + iv.len() * (j as f64 + 0.5) / cfg.basepoints as f64;
        lo = lo.min(lower_bound_at(phi, x, &sc, triple, cfg));
    }
    let lo = lo.min(hi);
    EpsilonBracket { lo, hi, witness }
}

/// Per-interval epsilon rows for reports.
#[derive(Clone, Debug, Serialize)]
pub struct EpsilonRow {
    pub depth: u32,
    pub index: u64,
    pub lo: f64,
    pub hi: f64,
    pub basepoint: f64,
    /// jets `(value, first, second)` of the pinching pair at the basepoint
    pub plus_jet: (f64, f64, f64),
    pub minus_jet: (f64, f64, f64),
}

/// `sum over I in D_m of eps_hi(I)^2` per depth, with verdict.
pub fn epsilon_sum(
    phi: &CircleHomeo,
    base: f64,
    max_depth: u32,
    cfg: &EpsilonConfig,
) -> (SumReport, Vec<EpsilonRow>) {
    let table = TripleTable::build(phi, base, max_depth);
    let mut per_depth = Vec::with_capacity(max_depth as usize + 1);
    let mut rows = Vec::new();
    let mut cumulative = 0.0;
    for depth in 0..=max_depth {
        let depth_rows: Vec<EpsilonRow> = DyadicInterval::partition(base, depth)
            .par_iter()
            .map(|i| {
                let b = epsilon_number(phi, i, &table, cfg);
                let (x, pj, mj) = match &b.witness {
                    Some(w) => (
                        w.x,
                        (w.f_plus.eval(w.x), w.f_plus.deriv(w.x), w.f_plus.deriv2(w.x)),
                        (w.f_minus.eval(w.x), w.f_minus.deriv(w.x), w.f_minus.deriv2(w.x)),
                    ),
                    None => (f64::NAN, (f64::NAN, f64::NAN, f64::NAN), (f64::NAN, f64::NAN, f64::NAN)),
                };
                EpsilonRow {
                    depth,
                    index: i.index,
                    lo: b.lo,
                    hi: b.hi,
                    basepoint: x,
                    plus_jet: pj,
                    minus_jet: mj,
                }
            })
            .collect();
        let sum: f64 = depth_rows.iter().map(|r| r.hi * r.hi).sum();
        cumulative += sum;
        per_depth.push(DepthSum { depth, sum, cumulative });
        rows.extend(depth_rows);
    }
    let sums: Vec<f64> = per_depth.iter().map(|d| d.sum).collect();
    (
        SumReport { base, multiplier: 1.0, per_depth, verdict: sum_verdict(&sums, 0.9) },
        rows,
    )
}

/// Fit report for `beta(I) <= K (eps_hi(I) + l(I)^2 + l(phi I)^2)`.
#[derive(Clone, Debug, Serialize)]
pub struct BetaEpsilonFit {
    pub k: f64,
    pub argmax_depth: u32,
    pub argmax_index: u64,
    pub intervals_used: usize,
}

pub fn beta_epsilon_inequality(
    phi: &CircleHomeo,
    base: f64,
    depths: std::ops::RangeInclusive<u32>,
    cfg: &EpsilonConfig,
) -> BetaEpsilonFit {
    let table = TripleTable::build(phi, base, *depths.end());
    let mut k = 0.0;
    let mut arg = (0u32, 0u64);
    let mut used = 0usize;
    for depth in depths {
        let results: Vec<(u64, f64, f64)> = DyadicInterval::partition(base, depth)
            .par_iter()
            .map(|i| {
                let iv = i.interval();
                let beta = crate::beta::beta_number(phi, iv);
                let hi = epsilon_number(phi, i, &table, cfg).hi;
                let denom = hi + iv.len().powi(2) + phi.image_length(iv).powi(2);
                (i.index, beta, denom)
            })
            .collect();
        for (index, beta, denom) in results {
            if beta < 1e-14 && denom < 1e-14 {
                continue; // 0-over-0 skipped
            }
            used += 1;
            let ratio = beta / denom;
            if ratio > k {
                k = ratio;
                arg = (depth, index);
            }
        }
    }
    BetaEpsilonFit { k, argmax_depth: arg.0, argmax_index: arg.1, intervals_used: used }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homeo::default_pwl_base;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mobius_witness_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let m = crate::mobius::tests::random_mobius(&mut rng);
        let phi = CircleHomeo::from_mobius(m);
        let table = TripleTable::build(&phi, 0.0, 4);
        let cfg = EpsilonConfig::default();
        let i = DyadicInterval::new(0.0, 4, 5);
        let b = epsilon_number(&phi, &i, &table, &cfg);
        assert_eq!(b.lo, 0.0);
        assert!(b.hi < 1e-9);

        // the exact pair is feasible at eps = 0
        let w = b.witness.unwrap();
        match witness_feasible(&phi, &i, &w, 0.0, &cfg).unwrap() {
            Feasibility::Feasible { margin } => assert!(margin.abs() < 1e-9),
            _ => panic!("exact witness must be feasible at eps = 0"),
        }
    }

    #[test]
    fn rotation_shifted_pair() {
        let phi = CircleHomeo::rotation(0.3);
        let i = DyadicInterval::new(0.0, 4, 2);
        let cfg = EpsilonConfig::default();
        let shift = 1e-3;
        let up = MobiusLift::matching(MobiusMap::rotation(0.3 + shift), i.interval().mid(), {
            phi.lift(i.interval().mid()) + shift
        });
        let dn = MobiusLift::matching(MobiusMap::rotation(0.3 - shift), i.interval().mid(), {
            phi.lift(i.interval().mid()) - shift
        });
        let w = EpsilonWitness { x: i.interval().mid(), f_minus: dn, f_plus: up, realized: 0.0 };
        // infeasible at eps = 0: the value defect is shift / l(phi 3I)
        match witness_feasible(&phi, &i, &w, 0.0, &cfg).unwrap() {
            Feasibility::Infeasible { .. } => {}
            _ => panic!("shifted pair cannot have zero defect"),
        }
        let sc = TripleScales::of(&phi, &i);
        let eps = shift / sc.img3;
        match witness_feasible(&phi, &i, &w, eps + 1e-9, &cfg).unwrap() {
            Feasibility::Feasible { margin } => assert!(margin >= 0.0),
            _ => panic!("pair is feasible at the shift defect"),
        }
    }

    #[test]
    fn quadratic_majorant_on_linear_input() {
        // beta(3I) = 0 for a rotation, so p touches phi at x and dominates
        // through the quadratic term everywhere on the window.
        let phi = CircleHomeo::rotation(0.2);
        let table = TripleTable::build(&phi, 0.0, 8);
        let cfg = EpsilonConfig::default();
        let i = DyadicInterval::new(0.0, 8, 100);
        let m = quadratic_majorant(&phi, &i, &table, &cfg).unwrap();
        assert!(m.q <= i.len().powf(0.25) + 1e-12);
        let x = i.interval().mid();
        let worst = verify_quadratic(&phi, &m, x, 512).unwrap();
        assert!(worst >= -1e-10, "margin {worst}");
    }

    #[test]
    fn quadratic_majorant_trig_deep() {
        let phi = CircleHomeo::trig(0.3).unwrap();
        let table = TripleTable::build(&phi, 0.0, 10);
        let cfg = EpsilonConfig::default();
        for depth in 8..=10u32 {
            let i = DyadicInterval::new(0.0, depth, (1u64 << depth) / 3);
            let m = quadratic_majorant(&phi, &i, &table, &cfg).unwrap();
            assert!(m.q <= i.len().powf(0.25) + 1e-12);
            assert!(m.p > 0.0 && m.q > 0.0);
            // invariant identities of the majorant data
            assert!(close(m.p / (m.q * m.q), m.gamma3, 1e-9 * m.gamma3));
            assert!(close(m.p / m.q - m.r, 2.0 * m.beta3 * m.img3, 1e-9));
            for frac in [0.2, 0.5, 0.8] {
                let x = i.interval().lo + frac * i.len();
                let worst = verify_quadratic(&phi, &m, x, 512).unwrap();
                assert!(worst >= -1e-10, "depth {depth} margin {worst}");
            }
        }
    }

    #[test]
    fn fractional_jet_example() {
        // jet (0, P/Q^2, 2P/Q^3) at 0 with (P, Q) = (1, 1): the affine form
        // is t/(1 - t) = 1/(1 - t) - 1.
        let f = MobiusMap::from_lift_jet(0.0, 0.0, 1.0, 2.0);
        for &t in &[-0.5, -0.2, 0.0, 0.3, 0.7] {
            assert!(close(f.affine(t), t / (1.0 - t), 1e-10));
        }
    }

    #[test]
    fn fractional_identity_random() {
        // f~(t) - g~(t) = P t^2 (t + 7Q) / (8 Q^3 (Q - t)) on [-7Q, Q)
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..1000 {
            let p: f64 = rng.gen_range(0.05..3.0);
            let q: f64 = rng.gen_range(0.05..2.0);
            let t = rng.gen_range(-7.0 * q..0.999 * q);
            let ft = p / (q - t) - p / q;
            let gt = p / (q * q) * t + p / (8.0 * q * q * q) * t * t;
            let identity = p * t * t * (t + 7.0 * q) / (8.0 * q * q * q * (q - t));
            assert!(close(ft - gt, identity, 1e-10 * (1.0 + identity.abs())));
            assert!(ft - gt >= -1e-12);
        }
    }

    #[test]
    fn fractional_majorant_linear_input() {
        let phi = CircleHomeo::rotation(0.15);
        let table = TripleTable::build(&phi, 0.0, 8);
        let cfg = EpsilonConfig::default();
        let i = DyadicInterval::new(0.0, 8, 40);
        let m = quadratic_majorant(&phi, &i, &table, &cfg).unwrap();
        let x = i.interval().mid();
        let (fp, fm) = fractional_majorant(&phi, &m, x, &cfg).unwrap();
        for k in 0..=200 {
            let y = x + PI * k as f64 / 200.0;
            assert!(fp.eval(y) >= phi.lift(y) - 1e-10);
            assert!(fm.eval(y) <= phi.lift(y) + 1e-10);
        }
    }

    #[test]
    fn trig_brackets_shrink_with_depth() {
        let phi = CircleHomeo::trig(0.3).unwrap();
        let cfg = EpsilonConfig::default();
        let table = TripleTable::build(&phi, 0.0, 9);
        let mut his = Vec::new();
        for depth in 5..=9u32 {
            let i = DyadicInterval::new(0.0, depth, (1u64 << depth) / 5);
            let b = epsilon_number(&phi, &i, &table, &cfg);
            assert!(b.lo <= b.hi + 1e-12, "lo {} hi {}", b.lo, b.hi);
            assert!(b.hi > 0.0 && b.hi < 1.0);
            his.push(b.hi);
        }
        // decreasing trend over the chain
        assert!(his.last().unwrap() < &(0.8 * his[0]), "his {his:?}");
        // hi / beta(3I) stays bounded
        for (j, depth) in (5..=9u32).enumerate() {
            let i = DyadicInterval::new(0.0, depth, (1u64 << depth) / 5);
            let beta3 = table.get(&i).beta;
            assert!(his[j] / beta3 < 500.0, "ratio {}", his[j] / beta3);
        }
    }

    #[test]
    fn epsilon_sum_examples() {
        let cfg = EpsilonConfig { basepoints: 2, descent_iters: 6, ..Default::default() };

        let (rot, _) = epsilon_sum(&CircleHomeo::rotation(0.5), 0.0, 6, &cfg);
        assert!(matches!(rot.verdict, crate::beta::SumVerdict::Converging { .. }));
        assert!(rot.per_depth.iter().all(|d| d.sum < 1e-15));

        let (trig, _) = epsilon_sum(&CircleHomeo::trig(0.3).unwrap(), 0.0, 9, &cfg);
        match trig.verdict {
            crate::beta::SumVerdict::Converging { tail_ratio } => {
                assert!(tail_ratio < 0.9, "ratio {tail_ratio}");
            }
            v => panic!("trig epsilon sum must converge, got {v:?}"),
        }

        let pwl = CircleHomeo::piecewise_equal(default_pwl_base(), &[1.5, 0.5]).unwrap();
        let (kink, rows) = epsilon_sum(&pwl, 0.0, 9, &cfg);
        assert!(matches!(kink.verdict, crate::beta::SumVerdict::Diverging { .. }));
        // straddling intervals keep a positive lower bound
        let floor: f64 = kink.per_depth[6..].iter().map(|d| d.sum).fold(f64::INFINITY, f64::min);
        assert!(floor > 1e-4, "floor {floor}");
        // rows carry consistent brackets
        assert!(rows.iter().all(|r| r.lo <= r.hi + 1e-12));
    }

    #[test]
    fn rotation_equivariance_of_epsilon() {
        // eps_phi(I) = eps_{rho . phi . rho'}(rho'^{-1} I), computed with the
        // purely constructive pipeline (no descent) on both sides.
        let cfg = EpsilonConfig { descent_iters: 0, ..Default::default() };
        let phi = CircleHomeo::trig(0.3).unwrap();
        let rho = 0.4;
        let rho_p = -0.25;
        let conj = CircleHomeo::compose(
            &CircleHomeo::rotation(rho),
            &CircleHomeo::compose(&phi, &CircleHomeo::rotation(rho_p)),
        );
        for depth in 5..=7u32 {
            let i1 = DyadicInterval::new(0.0, depth, 3);
            let i2 = DyadicInterval::new(-rho_p, depth, 3);
            let t1 = TripleTable::build(&phi, 0.0, depth);
            let t2 = TripleTable::build(&conj, -rho_p, depth);
            let b1 = epsilon_number(&phi, &i1, &t1, &cfg);
            let b2 = epsilon_number(&conj, &i2, &t2, &cfg);
            assert!(
                close(b1.hi, b2.hi, 1e-9 * (1.0 + b1.hi)),
                "depth {depth}: {} vs {}",
                b1.hi,
                b2.hi
            );
        }
    }

    #[test]
    fn gronwall_chain_bounds() {
        // discrete Gronwall estimates along successive chains with
        // beta(3I_k) <= (2^eta - 1)/32, eta = 1/2
        let eta = 0.5;
        let phi = CircleHomeo::trig(0.3).unwrap();
        let max_depth = 9;
        let table = TripleTable::build(&phi, 0.0, max_depth);
        let thresh = beta_threshold(eta);
        let mut chains_checked = 0;
        for k in 0..(1u64 << max_depth) {
            let leaf = DyadicInterval::new(0.0, max_depth, k);
            let mut chain = vec![leaf];
            chain.extend(leaf.chain());
            // longest admissible prefix
            let adm: Vec<_> = chain
                .iter()
                .take_while(|i| table.get(i).beta <= thresh)
                .cloned()
                .collect();
            if adm.len() < 2 {
                continue;
            }
            chains_checked += 1;
            let g0 = table.get(&adm[0]).gamma;
            let mut beta_sum = table.get(&adm[0]).beta;
            for (kk, ik) in adm.iter().enumerate().skip(1) {
                beta_sum += table.get(ik).beta;
                let gk = table.get(ik).gamma;
                let bound = 32.0 * g0 * (2f64).powf(eta * (kk as f64 - 1.0)) * beta_sum;
                assert!(
                    (gk - g0).abs() <= bound + 1e-11,
                    "gradient drift {} vs bound {bound}",
                    (gk - g0).abs()
                );
                // second discrete integral on samples
                let i0 = adm[0].interval();
                for xf in [0.25, 0.75] {
                    let x = i0.lo + xf * i0.len();
                    let ikx = ik.interval().translated_to(x);
                    for yf in [0.1, 0.6, 0.95] {
                        let y = ikx.lo + yf * ikx.len();
                        let lhs = (phi.lift(y) - phi.lift(x) - g0 * (y - x)).abs();
                        let rhs = 76.0
                            * g0
                            * ik.len()
                            * (2f64).powf(eta * (kk as f64 - 1.0))
                            * beta_sum;
                        assert!(lhs <= rhs + 1e-11, "second integral {lhs} vs {rhs}");
                    }
                }
            }
        }
        assert!(chains_checked > 100, "checked {chains_checked}");
    }
}
