//! Orientation-preserving circle homeomorphisms carried by lifts.
//!
//! Every [`CircleHomeo`] evaluates a strictly increasing lift with
//! `lift(x + pi) = lift(x) + pi`, a lift derivative (one-sided at corner
//! points), a Lipschitz bound used as modulus of continuity, and the list
//! of derivative discontinuities. Constructors validate monotonicity and
//! equivariance and reject bad data.
//!
//! Spec strings (used by the CLI and the examples):
//! `rot:c`, `mobius:a,b,c,d`, `trig:a`, `pwl:b;s1,s2,...`,
//! `compose:spec|spec` (right map applied first). Angles accept plain
//! floats and `k*pi/d` forms such as `pi/3` or `-2pi/5`.

use crate::dyadic::Interval;
use crate::mobius::MobiusMap;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

pub use crate::hhalf::{h_half_seminorm, H12Config, H12Report, H12Verdict};

#[derive(Debug, Error)]
pub enum HomeoError {
    #[error("lift is not strictly increasing near x = {0}")]
    NotMonotone(f64),
    #[error("lift violates phi(x + pi) = phi(x) + pi at x = {0} (defect {1:.3e})")]
    NotEquivariant(f64, f64),
    #[error("trig amplitude {0} outside (-1/2, 1/2)")]
    TrigAmplitude(f64),
    #[error("piecewise slopes must be positive, got {0}")]
    NonPositiveSlope(f64),
    #[error("piecewise slopes rise {0}, expected pi over one period")]
    WrongTotalRise(f64),
    #[error("sample table needs at least 2 rows")]
    TooFewSamples,
    #[error("cannot parse homeomorphism spec: {0}")]
    BadSpec(String),
    #[error("cannot parse number: {0}")]
    BadNumber(String),
    #[error(transparent)]
    Mobius(#[from] crate::mobius::MobiusError),
}

/// Piecewise-linear lift data over one period `[base, base + pi]`:
/// breakpoints (offsets from `base`, starting at 0) and positive slopes.
#[derive(Clone, Debug)]
struct PwlLift {
    base: f64,
    /// image of `base` under the lift
    value0: f64,
    /// segment start offsets in `[0, pi)`, first is 0
    offsets: Vec<f64>,
    slopes: Vec<f64>,
    /// cumulative lift increments at each offset
    cum: Vec<f64>,
}

impl PwlLift {
    fn new(base: f64, value0: f64, offsets: Vec<f64>, slopes: Vec<f64>) -> Result<Self, HomeoError> {
        assert_eq!(offsets.len(), slopes.len());
        for &s in &slopes {
            if !(s > 0.0) {
                return Err(HomeoError::NonPositiveSlope(s));
            }
        }
        let mut cum = Vec::with_capacity(offsets.len());
        let mut acc = 0.0;
        for i in 0..offsets.len() {
            cum.push(acc);
            let end = if i + 1 < offsets.len() { offsets[i + 1] } else { PI };
            acc += slopes[i] * (end - offsets[i]);
        }
        if (acc - PI).abs() > 1e-9 {
            return Err(HomeoError::WrongTotalRise(acc));
        }
        // absorb the residual rounding into the last slope so the lift is
        // exactly equivariant
        let mut slopes = slopes;
        let last = slopes.len() - 1;
        let last_len = PI - offsets[last];
        if last_len > 0.0 {
            slopes[last] += (PI - acc) / last_len;
        }
        Ok(PwlLift { base, value0, offsets, slopes, cum })
    }

    fn eval(&self, x: f64) -> f64 {
        let rel = x - self.base;
        let n = (rel / PI).floor();
        let r = (rel - n * PI).clamp(0.0, PI);
        let i = match self
            .offsets
            .binary_search_by(|o| o.partial_cmp(&r).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        self.value0 + n * PI + self.cum[i] + self.slopes[i] * (r - self.offsets[i])
    }

    fn deriv(&self, x: f64) -> f64 {
        let rel = x - self.base;
        let r = rel.rem_euclid(PI);
        let i = match self
            .offsets
            .binary_search_by(|o| o.partial_cmp(&r).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        self.slopes[i]
    }

    fn breaks(&self) -> Vec<f64> {
        self.offsets.iter().map(|o| self.base + o).collect()
    }

    fn max_slope(&self) -> f64 {
        self.slopes.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Clone)]
enum HomeoKind {
    Rotation(f64),
    Mobius(MobiusMap),
    Trig { a: f64 },
    Pwl(PwlLift),
    Samples(PwlLift),
    Compose(Arc<CircleHomeo>, Arc<CircleHomeo>),
}

/// Orientation-preserving homeomorphism of `RP^1` carried by a strictly
/// increasing equivariant lift.
#[derive(Clone)]
pub struct CircleHomeo {
    kind: HomeoKind,
    lipschitz: f64,
    tag: String,
}

impl std::fmt::Debug for CircleHomeo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CircleHomeo({})", self.tag)
    }
}

impl CircleHomeo {
    /// Rotation `x -> x + c`.
    pub fn rotation(c: f64) -> Self {
        CircleHomeo {
            kind: HomeoKind::Rotation(c),
            lipschitz: 1.0,
            tag: format!("rot:{c}"),
        }
    }

    /// The homeomorphism induced by a Mobius map.
    pub fn from_mobius(m: MobiusMap) -> Self {
        let (a, b, c, d) = m.coeffs();
        CircleHomeo {
            kind: HomeoKind::Mobius(m),
            lipschitz: m.lipschitz(),
            tag: format!("mobius:{a},{b},{c},{d}"),
        }
    }

    /// Lift `x -> x + a sin(2x)`; requires `|a| < 1/2`.
    pub fn trig(a: f64) -> Result<Self, HomeoError> {
        if !(a.abs() < 0.5) {
            return Err(HomeoError::TrigAmplitude(a));
        }
        Ok(CircleHomeo {
            kind: HomeoKind::Trig { a },
            lipschitz: 1.0 + 2.0 * a.abs(),
            tag: format!("trig:{a}"),
        })
    }

    /// Piecewise-linear lift on `n` equal subintervals of `[base, base + pi]`
    /// with the given positive slopes (mean must be 1).
    pub fn piecewise_equal(base: f64, slopes: &[f64]) -> Result<Self, HomeoError> {
        if slopes.is_empty() {
            return Err(HomeoError::TooFewSamples);
        }
        let n = slopes.len();
        let offsets = (0..n).map(|i| PI * i as f64 / n as f64).collect();
        let pwl = PwlLift::new(base, base, offsets, slopes.to_vec())?;
        let lip = pwl.max_slope();
        let s: Vec<String> = slopes.iter().map(|v| v.to_string()).collect();
        Ok(CircleHomeo {
            kind: HomeoKind::Pwl(pwl),
            lipschitz: lip,
            tag: format!("pwl:{base};{}", s.join(",")),
        })
    }

    /// Piecewise-linear lift with explicit breakpoints (lift points) and
    /// slopes; `breaks[0]` is the period base.
    pub fn piecewise_linear(breaks: &[f64], slopes: &[f64]) -> Result<Self, HomeoError> {
        if breaks.is_empty() || breaks.len() != slopes.len() {
            return Err(HomeoError::TooFewSamples);
        }
        let base = breaks[0];
        let mut offsets = Vec::with_capacity(breaks.len());
        for (i, &b) in breaks.iter().enumerate() {
            let o = b - base;
            if !(0.0..PI).contains(&o) || (i > 0 && o <= offsets[i - 1]) {
                return Err(HomeoError::NotMonotone(b));
            }
            offsets.push(o);
        }
        let pwl = PwlLift::new(base, base, offsets, slopes.to_vec())?;
        let lip = pwl.max_slope();
        Ok(CircleHomeo {
            kind: HomeoKind::Pwl(pwl),
            lipschitz: lip,
            tag: "pwl:explicit".into(),
        })
    }

    /// Monotone sample table `(x_i, y_i)` over one period, interpolated
    /// linearly. The table must satisfy `y_n = y_0 + pi` at `x_n = x_0 + pi`
    /// up to `1e-9`.
    pub fn from_samples(table: &[(f64, f64)]) -> Result<Self, HomeoError> {
        if table.len() < 2 {
            return Err(HomeoError::TooFewSamples);
        }
        let base = table[0].0;
        let span = table.last().unwrap().0 - base;
        if (span - PI).abs() > 1e-9 {
            return Err(HomeoError::NotEquivariant(base, span - PI));
        }
        let rise = table.last().unwrap().1 - table[0].1;
        if (rise - PI).abs() > 1e-9 {
            return Err(HomeoError::NotEquivariant(base, rise - PI));
        }
        let mut offsets = Vec::new();
        let mut slopes = Vec::new();
        for w in table.windows(2) {
            let dx = w[1].0 - w[0].0;
            let dy = w[1].1 - w[0].1;
            if !(dx > 0.0) {
                return Err(HomeoError::NotMonotone(w[1].0));
            }
            if !(dy > 0.0) {
                return Err(HomeoError::NotMonotone(w[1].0));
            }
            offsets.push(w[0].0 - base);
            slopes.push(dy / dx);
        }
        let pwl = PwlLift::new(base, table[0].1, offsets, slopes)?;
        let lip = pwl.max_slope();
        Ok(CircleHomeo {
            kind: HomeoKind::Samples(pwl),
            lipschitz: lip,
            tag: format!("samples:{}", table.len()),
        })
    }

    /// `outer . inner` (apply `inner` first).
    pub fn compose(outer: &CircleHomeo, inner: &CircleHomeo) -> Self {
        let tag = format!("compose:{}|{}", outer.tag, inner.tag);
        CircleHomeo {
            lipschitz: outer.lipschitz * inner.lipschitz,
            kind: HomeoKind::Compose(Arc::new(outer.clone()), Arc::new(inner.clone())),
            tag,
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Strictly increasing equivariant lift.
    pub fn lift(&self, x: f64) -> f64 {
        match &self.kind {
            HomeoKind::Rotation(c) => x + c,
            HomeoKind::Mobius(m) => m.lift(x),
            HomeoKind::Trig { a } => x + a * (2.0 * x).sin(),
            HomeoKind::Pwl(p) | HomeoKind::Samples(p) => p.eval(x),
            HomeoKind::Compose(f, g) => f.lift(g.lift(x)),
        }
    }

    /// Derivative of the lift (right derivative at corner points).
    pub fn lift_deriv(&self, x: f64) -> f64 {
        match &self.kind {
            HomeoKind::Rotation(_) => 1.0,
            HomeoKind::Mobius(m) => m.lift_deriv(x),
            HomeoKind::Trig { a } => 1.0 + 2.0 * a * (2.0 * x).cos(),
            HomeoKind::Pwl(p) | HomeoKind::Samples(p) => p.deriv(x),
            HomeoKind::Compose(f, g) => f.lift_deriv(g.lift(x)) * g.lift_deriv(x),
        }
    }

    /// Lipschitz bound for the lift; `omega(h) = lipschitz * h` is the
    /// modulus of continuity used by grid certificates.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Representatives (one period) of the points where the lift derivative
    /// jumps; empty for smooth constructions.
    pub fn deriv_breaks(&self) -> Vec<f64> {
        match &self.kind {
            HomeoKind::Rotation(_) | HomeoKind::Mobius(_) | HomeoKind::Trig { .. } => vec![],
            HomeoKind::Pwl(p) | HomeoKind::Samples(p) => p.breaks(),
            HomeoKind::Compose(f, g) => {
                let mut out = g.deriv_breaks();
                for b in f.deriv_breaks() {
                    out.push(self.invert_inner(g, b));
                }
                out
            }
        }
    }

    /// Whether the derivative data comes from a sample table (difference
    /// quotients) rather than an exact evaluator.
    pub fn is_sampled(&self) -> bool {
        match &self.kind {
            HomeoKind::Samples(_) => true,
            HomeoKind::Compose(f, g) => f.is_sampled() || g.is_sampled(),
            _ => false,
        }
    }

    /// Sub-sampled variant (every other node) of a sampled homeomorphism,
    /// used for refinement-consistency checks.
    pub(crate) fn coarsened(&self) -> Option<CircleHomeo> {
        if let HomeoKind::Samples(p) = &self.kind {
            if p.offsets.len() < 4 {
                return None;
            }
            let mut table: Vec<(f64, f64)> = p
                .offsets
                .iter()
                .step_by(2)
                .map(|&o| (p.base + o, p.eval(p.base + o)))
                .collect();
            table.push((p.base + PI, p.value0 + PI));
            CircleHomeo::from_samples(&table).ok()
        } else {
            None
        }
    }

    /// Monotone inverse of `g`'s lift at `y`, by bisection.
    fn invert_inner(&self, g: &CircleHomeo, y: f64) -> f64 {
        let mut lo = y - g.lipschitz * PI - PI;
        let mut hi = y + g.lipschitz * PI + PI;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if g.lift(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Length of the image `phi(I)` computed on the lift:
    /// `lift(hi) - lift(lo)`.
    pub fn image_length(&self, iv: Interval) -> f64 {
        self.lift(iv.hi) - self.lift(iv.lo)
    }

    /// Validates monotonicity and equivariance on a sampled grid; all public
    /// constructors guarantee this, the check is for externally supplied data.
    pub fn validate(&self, n: usize) -> Result<(), HomeoError> {
        let mut prev = self.lift(0.0);
        for i in 1..=n {
            let x = PI * (i as f64) / (n as f64);
            let v = self.lift(x);
            if !(v > prev) {
                return Err(HomeoError::NotMonotone(x));
            }
            prev = v;
            let d = self.lift(x + PI) - v - PI;
            if d.abs() > 1e-10 {
                return Err(HomeoError::NotEquivariant(x, d));
            }
        }
        Ok(())
    }
}

/// Parse an angle expression: plain float or `[-][k]pi[/d]`.
pub fn parse_angle(s: &str) -> Result<f64, HomeoError> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (sign, rest) = if let Some(r) = t.strip_prefix('-') {
        (-1.0, r)
    } else {
        (1.0, t)
    };
    if let Some(pos) = rest.find("pi") {
        let head = &rest[..pos];
        let tail = &rest[pos + 2..];
        let k = if head.is_empty() {
            1.0
        } else {
            head.trim_end_matches('*')
                .parse::<f64>()
                .map_err(|_| HomeoError::BadNumber(s.into()))?
        };
        let d = if tail.is_empty() {
            1.0
        } else if let Some(dd) = tail.strip_prefix('/') {
            dd.parse::<f64>().map_err(|_| HomeoError::BadNumber(s.into()))?
        } else {
            return Err(HomeoError::BadNumber(s.into()));
        };
        return Ok(sign * k * PI / d);
    }
    Err(HomeoError::BadNumber(s.into()))
}

/// Parse a homeomorphism spec string (see module docs).
pub fn parse_spec(spec: &str) -> Result<CircleHomeo, HomeoError> {
    let s = spec.trim();
    if let Some(rest) = s.strip_prefix("compose:") {
        let mut depth = 0usize;
        let mut split = None;
        for (i, ch) in rest.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                '|' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let i = split.ok_or_else(|| HomeoError::BadSpec(s.into()))?;
        let outer = parse_spec(&rest[..i])?;
        let inner = parse_spec(&rest[i + 1..])?;
        return Ok(CircleHomeo::compose(&outer, &inner));
    }
    if let Some(rest) = s.strip_prefix("rot:") {
        return Ok(CircleHomeo::rotation(parse_angle(rest)?));
    }
    if let Some(rest) = s.strip_prefix("trig:") {
        return CircleHomeo::trig(parse_angle(rest)?);
    }
    if let Some(rest) = s.strip_prefix("mobius:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(HomeoError::BadSpec(s.into()));
        }
        let v: Result<Vec<f64>, _> = parts.iter().map(|p| parse_angle(p)).collect();
        let v = v?;
        let m = MobiusMap::new(v[0], v[1], v[2], v[3])?;
        return Ok(CircleHomeo::from_mobius(m));
    }
    if let Some(rest) = s.strip_prefix("pwl:") {
        let (b, slopes) = rest
            .split_once(';')
            .ok_or_else(|| HomeoError::BadSpec(s.into()))?;
        let base = parse_angle(b)?;
        let sl: Result<Vec<f64>, _> = slopes.split(',').map(parse_angle).collect();
        return CircleHomeo::piecewise_equal(base, &sl?);
    }
    Err(HomeoError::BadSpec(s.into()))
}

/// Default break for the piecewise zoo member: an irrational multiple of pi,
/// so dyadic triples straddle the corner at every depth.
pub fn default_pwl_base() -> f64 {
    PI * (2.0f64.sqrt() - 1.0)
}
