//! Beta numbers: scale-invariant `L^inf` deviation from the best linear
//! estimator, the gradients and qs-numbers derived from it, and dyadic
//! beta sums with a finite-depth convergence verdict.
//!
//! The best line is found by a three-point exchange (the minimax problem
//! for an affine fit has an alternation set of size three) over an adaptive
//! grid, followed by continuum refinement of the active points. Derivative
//! breaks of the homeomorphism are always part of the grid, so corner maps
//! are resolved exactly.

use crate::dyadic::{DyadicInterval, Interval};
use crate::homeo::CircleHomeo;
use rayon::prelude::*;
use serde::Serialize;

/// Best affine approximation data on an interval.
#[derive(Clone, Debug)]
pub struct BestLine {
    pub gradient: f64,
    pub intercept: f64,
    /// minimax error `E0`
    pub error: f64,
    /// at least three points where the residual attains `±E0` with
    /// alternating signs, as `(x, signed residual)`
    pub witnesses: Vec<(f64, f64)>,
}

impl BestLine {
    pub fn eval(&self, x: f64) -> f64 {
        self.gradient * x + self.intercept
    }
}

/// Exchange solve for the best line through a value table, in centered
/// coordinates supplied by the caller.
fn exchange(us: &[f64], vs: &[f64]) -> (f64, f64, f64, [usize; 3]) {
    let n = us.len();
    let mut tri = [0usize, n / 2, n - 1];
    let mut gamma = 0.0;
    let mut delta = 0.0;
    let mut h = 0.0;
    for _ in 0..200 {
        let [i1, i2, i3] = tri;
        let (u1, u2, u3) = (us[i1], us[i2], us[i3]);
        let (v1, v2, v3) = (vs[i1], vs[i2], vs[i3]);
        gamma = (v3 - v1) / (u3 - u1);
        h = 0.5 * (gamma * (u2 - u1) - (v2 - v1));
        delta = v1 - gamma * u1 - h;
        // find worst violator
        let mut j = 0usize;
        let mut worst = -1.0;
        for i in 0..n {
            let r = (vs[i] - gamma * us[i] - delta).abs();
            if r > worst {
                worst = r;
                j = i;
            }
        }
        let habs = h.abs();
        if worst <= habs * (1.0 + 1e-12) + 1e-300 {
            break;
        }
        let r_j = vs[j] - gamma * us[j] - delta;
        let s_j = r_j >= 0.0;
        let sign_at = |i: usize| (vs[i] - gamma * us[i] - delta) >= 0.0;
        if j < tri[0] {
            if s_j == sign_at(tri[0]) {
                tri[0] = j;
            } else {
                tri = [j, tri[0], tri[1]];
            }
        } else if j < tri[1] {
            if j == tri[0] {
                break;
            }
            if s_j == sign_at(tri[0]) {
                tri[0] = j;
            } else {
                tri[1] = j;
            }
        } else if j < tri[2] {
            if j == tri[1] {
                break;
            }
            if s_j == sign_at(tri[1]) {
                tri[1] = j;
            } else {
                tri[2] = j;
            }
        } else if j > tri[2] {
            if s_j == sign_at(tri[2]) {
                tri[2] = j;
            } else {
                tri = [tri[1], tri[2], j];
            }
        } else {
            break;
        }
    }
    (gamma, delta, h, tri)
}

/// Golden-section maximization of `g` on `[a, b]`.
fn golden_max(g: &dyn Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..iters {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        c
    } else {
        d
    }
}

/// Best `L^inf` affine approximation of an arbitrary continuous function.
/// `breaks` are abscissae that must appear in the grid (corner points).
pub fn chebyshev_line_fn(
    f: &dyn Fn(f64) -> f64,
    iv: Interval,
    breaks: &[f64],
) -> BestLine {
    let mid = iv.mid();
    let fmid = f(mid);
    let centered = |x: f64| f(x) - fmid;

    let mut n = 128usize;
    let mut prev_e0 = f64::INFINITY;
    let mut stable = 0;
    loop {
        // base grid plus required break points
        let mut xs: Vec<f64> = (0..=n)
            .map(|i| iv.lo + iv.len() * (i as f64) / (n as f64))
            .collect();
        for &b in breaks {
            if iv.lo < b && b < iv.hi {
                xs.push(b);
                // one-sided neighbors so corner residuals alternate cleanly
                let eps = iv.len() * 1e-9;
                xs.push((b - eps).max(iv.lo));
                xs.push((b + eps).min(iv.hi));
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let mut us: Vec<f64> = xs.iter().map(|x| x - mid).collect();
        let mut vs: Vec<f64> = xs.iter().map(|&x| centered(x)).collect();

        let (mut gamma, mut delta, mut h, mut tri) = exchange(&us, &vs);

        // continuum refinement of the active points
        for _ in 0..6 {
            let res = |x: f64| (centered(x) - gamma * (x - mid) - delta).abs();
            let mut added = false;
            for &t in &tri {
                let a = if t == 0 { us[0] } else { us[t - 1] } + mid;
                let b = if t + 1 == us.len() { us[us.len() - 1] } else { us[t + 1] } + mid;
                if b - a < 1e-15 * iv.len().max(1.0) {
                    continue;
                }
                let star = golden_max(&res, a, b, 60);
                let u = star - mid;
                let idx = us.partition_point(|&p| p < u);
                if idx < us.len() && (us[idx] - u).abs() < 1e-15 {
                    continue;
                }
                us.insert(idx, u);
                vs.insert(idx, centered(star));
                added = true;
            }
            if !added {
                break;
            }
            let out = exchange(&us, &vs);
            gamma = out.0;
            delta = out.1;
            h = out.2;
            tri = out.3;
        }

        let e0 = h.abs();
        if (e0 - prev_e0).abs() <= 1e-10 * e0.max(1e-13) {
            stable += 1;
        } else {
            stable = 0;
        }
        prev_e0 = e0;
        if stable >= 1 && n >= 256 || n >= (1 << 14) {
            let witnesses: Vec<(f64, f64)> = tri
                .iter()
                .map(|&i| {
                    let x = us[i] + mid;
                    (x, vs[i] - gamma * us[i] - delta)
                })
                .collect();
            return BestLine {
                gradient: gamma,
                intercept: fmid + delta - gamma * mid,
                error: e0,
                witnesses,
            };
        }
        n *= 2;
    }
}

/// Best `L^inf` affine approximation of the lift of `phi` over `iv`.
pub fn best_linear_linf(phi: &CircleHomeo, iv: Interval) -> BestLine {
    let breaks = all_breaks_in(phi, iv);
    chebyshev_line_fn(&|x| phi.lift(x), iv, &breaks)
}

/// All lift representatives of derivative breaks falling inside `iv`.
fn all_breaks_in(phi: &CircleHomeo, iv: Interval) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut out = Vec::new();
    for b in phi.deriv_breaks() {
        let first = b + ((iv.lo - b) / PI).floor() * PI;
        let mut x = first;
        while x <= iv.hi {
            if x >= iv.lo {
                out.push(x);
            }
            x += PI;
        }
    }
    out
}

/// `beta(I) = E0 / l(phi(I))`, in `[0, 1/2)`.
pub fn beta_number(phi: &CircleHomeo, iv: Interval) -> f64 {
    best_linear_linf(phi, iv).error / phi.image_length(iv)
}

/// Gradient of the best line; positive, and within the two-sided mean-slope
/// bounds `(1 -+ 2 beta) l(phi I)/l(I)`.
pub fn gamma(phi: &CircleHomeo, iv: Interval) -> f64 {
    let line = best_linear_linf(phi, iv);
    let g = line.gradient;
    debug_assert!({
        let mean = phi.image_length(iv) / iv.len();
        let beta = line.error / phi.image_length(iv);
        let slack = 1e-9 * mean;
        (1.0 - 2.0 * beta) * mean - slack <= g && g <= (1.0 + 2.0 * beta) * mean + slack
    });
    g
}

/// `qs(I) = |phi(m_I) - m_{phi(I)}| / l(phi(I))`.
pub fn qs_number(phi: &CircleHomeo, iv: Interval) -> f64 {
    let m_img = 0.5 * (phi.lift(iv.lo) + phi.lift(iv.hi));
    (phi.lift(iv.mid()) - m_img).abs() / phi.image_length(iv)
}

/// Per-interval row of a diagnostic run.
#[derive(Clone, Debug, Serialize)]
pub struct BetaRow {
    pub depth: u32,
    pub index: u64,
    pub len: f64,
    pub image_len: f64,
    pub beta: f64,
    pub gamma: f64,
    pub qs: f64,
}

/// Finite-depth convergence verdict for a dyadic square sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SumVerdict {
    /// per-depth ratios below the threshold on the final depths
    Converging { tail_ratio: f64 },
    /// per-depth sums stayed bounded below
    Diverging { depth_floor: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthSum {
    pub depth: u32,
    pub sum: f64,
    pub cumulative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumReport {
    pub base: f64,
    pub multiplier: f64,
    pub per_depth: Vec<DepthSum>,
    pub verdict: SumVerdict,
}

/// Verdict from per-depth sums: geometric tail (three consecutive final
/// ratios under `theta`) means converging, otherwise the sums are treated
/// as bounded below.
pub fn sum_verdict(per_depth: &[f64], theta: f64) -> SumVerdict {
    let total: f64 = per_depth.iter().sum();
    if total < 1e-15 {
        return SumVerdict::Converging { tail_ratio: 0.0 };
    }
    let tail = &per_depth[per_depth.len().saturating_sub(4)..];
    let mut ratios = Vec::new();
    for w in tail.windows(2) {
        ratios.push(if w[0] > 0.0 { w[1] / w[0] } else { 0.0 });
    }
    if ratios.len() >= 3 && ratios.iter().all(|r| *r < theta) {
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        SumVerdict::Converging { tail_ratio: max }
    } else {
        let floor = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        SumVerdict::Diverging { depth_floor: floor }
    }
}

/// Cost guard: sums run to depth at most 24 unless explicitly overridden.
pub const MAX_SUM_DEPTH: u32 = 24;

/// `sum over I in D_m of beta(lambda I)^2` per depth, with verdict.
pub fn beta_sum(
    phi: &CircleHomeo,
    base: f64,
    multiplier: f64,
    max_depth: u32,
) -> SumReport {
    assert!(multiplier >= 1.0);
    assert!(max_depth <= MAX_SUM_DEPTH, "depth guard (raise MAX_SUM_DEPTH consciously)");
    let mut per_depth = Vec::with_capacity(max_depth as usize + 1);
    let mut cumulative = 0.0;
    for depth in 0..=max_depth {
        // collect in interval order, then sum sequentially: parallel
        // reductions group differently per thread count and float addition
        // is not associative
        let squares: Vec<f64> = DyadicInterval::partition(base, depth)
            .par_iter()
            .map(|i| {
                let b = beta_number(phi, i.interval().scaled(multiplier));
                b * b
            })
            .collect();
        let sum: f64 = squares.iter().sum();
        cumulative += sum;
        per_depth.push(DepthSum { depth, sum, cumulative });
    }
    let sums: Vec<f64> = per_depth.iter().map(|d| d.sum).collect();
    SumReport {
        base,
        multiplier,
        per_depth,
        verdict: sum_verdict(&sums, 0.9),
    }
}

/// Rows (beta, gamma, qs) for every interval of every depth; used by the
/// CLI reports and by the inequality suites.
pub fn beta_rows(phi: &CircleHomeo, base: f64, max_depth: u32) -> Vec<BetaRow> {
    (0..=max_depth)
        .flat_map(|depth| {
            DyadicInterval::partition(base, depth)
                .par_iter()
                .map(|i| {
                    let iv = i.interval();
                    let line = best_linear_linf(phi, iv);
                    let il = phi.image_length(iv);
                    BetaRow {
                        depth,
                        index: i.index,
                        len: iv.len(),
                        image_len: il,
                        beta: line.error / il,
                        gamma: line.gradient,
                        qs: qs_number(phi, iv),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Cached per-triple quantities `(beta(3I), gamma(3I), l(phi(3I)))` for all
/// dyadic intervals up to a depth; the epsilon module reads ancestor chains
/// out of this table.
pub struct TripleTable {
    pub base: f64,
    rows: Vec<Vec<TripleData>>,
}

#[derive(Clone, Copy, Debug)]
pub struct TripleData {
    pub beta: f64,
    pub gamma: f64,
    pub image_len: f64,
}

impl TripleTable {
    pub fn build(phi: &CircleHomeo, base: f64, max_depth: u32) -> Self {
        let rows = (0..=max_depth)
            .map(|depth| {
                DyadicInterval::partition(base, depth)
                    .par_iter()
                    .map(|i| {
                        let t = i.triple();
                        let line = best_linear_linf(phi, t);
                        let il = phi.image_length(t);
                        TripleData {
                            beta: line.error / il,
                            gamma: line.gradient,
                            image_len: il,
                        }
                    })
                    .collect()
            })
            .collect();
        TripleTable { base, rows }
    }

    pub fn max_depth(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    pub fn get(&self, i: &DyadicInterval) -> TripleData {
        self.rows[i.depth as usize][i.index as usize]
    }
}
