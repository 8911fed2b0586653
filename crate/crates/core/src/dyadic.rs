//! Base-pointed dyadic decompositions of `RP^1 = R / pi Z`.
//!
//! Depth `m` partitions the circle into `2^m` arcs
//! `I_{m,k} = x0 + [k pi / 2^m, (k+1) pi / 2^m]`. Interval arithmetic is
//! done on lift representatives, so endpoints are exact in `f64` up to the
//! single rounding of `x0 + k pi / 2^m`.

use std::f64::consts::PI;

/// Interval on the lift line, `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo < hi, "interval must be nondegenerate");
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Concentric interval of `lambda` times the length (`lambda >= 1`).
    pub fn scaled(&self, lambda: f64) -> Interval {
        debug_assert!(lambda >= 1.0);
        let half = 0.5 * lambda * self.len();
        let m = self.mid();
        Interval::new(m - half, m + half)
    }

    /// Translate of the interval centered on `x`; for `x` in the interval
    /// the translate stays inside the triple.
    pub fn translated_to(&self, x: f64) -> Interval {
        debug_assert!(self.contains(x), "center must lie in the interval");
        let half = 0.5 * self.len();
        Interval::new(x - half, x + half)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Dyadic interval `I_{m,k}` of the `base`-pointed decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    pub base_bits: u64,
    pub depth: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub fn new(base: f64, depth: u32, index: u64) -> Self {
        assert!(depth <= 40, "depth guard");
        DyadicInterval {
            base_bits: base.to_bits(),
            depth,
            index: index & ((1u64 << depth) - 1),
        }
    }

    pub fn base(&self) -> f64 {
        f64::from_bits(self.base_bits)
    }

    pub fn len(&self) -> f64 {
        PI / (1u64 << self.depth) as f64
    }

    pub fn interval(&self) -> Interval {
        let l = self.len();
        let lo = self.base() + self.index as f64 * l;
        Interval::new(lo, lo + l)
    }

    /// The concentric triple `3I`.
    pub fn triple(&self) -> Interval {
        self.interval().scaled(3.0)
    }

    /// Parent at depth `m - 1` (contains `self`, double the length).
    pub fn parent(&self) -> Option<DyadicInterval> {
        if self.depth == 0 {
            return None;
        }
        Some(DyadicInterval {
            base_bits: self.base_bits,
            depth: self.depth - 1,
            index: self.index / 2,
        })
    }

    /// Chain of successive ancestors up to depth 0, nearest first.
    pub fn chain(&self) -> Vec<DyadicInterval> {
        let mut out = Vec::with_capacity(self.depth as usize);
        let mut cur = *self;
        while let Some(p) = cur.parent() {
            out.push(p);
            cur = p;
        }
        out
    }

    /// The six depth-`m+1` dyadic intervals contained in `3I`.
    pub fn children_of_triple(&self) -> [DyadicInterval; 6] {
        let m = 1u64 << (self.depth + 1);
        let first = (2 * self.index + m - 2) % m; // 2k - 2 mod 2^{m+1}
        std::array::from_fn(|j| DyadicInterval {
            base_bits: self.base_bits,
            depth: self.depth + 1,
            index: (first + j as u64) % m,
        })
    }

    /// All intervals of the depth-`m` partition.
    pub fn partition(base: f64, depth: u32) -> Vec<DyadicInterval> {
        (0..(1u64 << depth))
            .map(|k| DyadicInterval::new(base, depth, k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn interval_example() {
        // x0 = 0, m = 1, k = 1 -> [pi/2, pi]
        let i = DyadicInterval::new(0.0, 1, 1).interval();
        assert!(close(i.lo, PI / 2.0, 1e-15));
        assert!(close(i.hi, PI, 1e-15));
    }

    #[test]
    fn triple_example() {
        // rI is concentric with length r l(I): 3 * [pi/4, pi/2] = [0, 3 pi/4]
        let i = DyadicInterval::new(0.0, 2, 1);
        let t = i.triple();
        assert!(close(t.lo, 0.0, 1e-15));
        assert!(close(t.hi, 3.0 * PI / 4.0, 1e-15));
        assert!(close(t.len(), 3.0 * i.len(), 1e-15));
    }

    #[test]
    fn chain_doubles_lengths() {
        let i = DyadicInterval::new(0.3, 3, 5);
        let chain = i.chain();
        assert_eq!(chain.len(), 3);
        let mut len = i.len();
        let mut inner = i.interval();
        for a in &chain {
            let iv = a.interval();
            assert!(close(a.len(), 2.0 * len, 1e-15));
            assert!(iv.lo <= inner.lo + 1e-15 && inner.hi <= iv.hi + 1e-15);
            len = a.len();
            inner = iv;
        }
        assert_eq!(chain.last().unwrap().depth, 0);
    }

    #[test]
    fn translate_stays_in_triple() {
        let i = DyadicInterval::new(0.1, 4, 7);
        let iv = i.interval();
        for j in 0..=10 {
            let x = iv.lo + iv.len() * (j as f64) / 10.0;
            let t = iv.translated_to(x);
            let triple = i.triple();
            assert!(t.lo >= triple.lo - 1e-14 && t.hi <= triple.hi + 1e-14);
        }
    }

    #[test]
    fn children_of_triple_cover_it() {
        let i = DyadicInterval::new(0.0, 4, 3);
        let kids = i.children_of_triple();
        let t = i.triple();
        // unwrapped endpoints walk across [lo - l, hi + l] in steps of l/2
        let l = i.len();
        for (j, k) in kids.iter().enumerate() {
            assert_eq!(k.depth, i.depth + 1);
            let lo = t.lo + 0.5 * l * j as f64;
            let got = k.interval().lo.rem_euclid(PI);
            assert!(close(got, lo.rem_euclid(PI), 1e-12));
        }
    }
}
