//! Nonincreasing profiles on `(0, ℓ]` with exact piecewise algebra.
//!
//! A profile is an optional initial power piece `((p-1)/p) t^{-1/p}` followed
//! by constant plateaus. Every extremizer the crate builds has this shape, so
//! integrals, L^q masses and the weak norm are all available in closed form.

use serde::{Deserialize, Serialize};

use crate::domain::Exponents;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Absolute tolerance used when validating profiles.
pub const PROFILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    /// Density `((p-1)/p) t^{-1/p}` on `(0, length]`.
    Power { length: f64 },
    Constant { length: f64, value: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Power { length } | Segment::Constant { length, .. } => length,
        }
    }
}

/// A nonincreasing nonnegative function on `(0, domain_length]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    segments: Vec<Segment>,
    p: f64,
    #[serde(skip)]
    starts: Vec<f64>,
    #[serde(skip)]
    mass_before: Vec<f64>,
}

/// `((p-1)/p) t^{-1/p}`
pub fn power_density(p: f64, t: f64) -> f64 {
    (p - 1.0) / p * t.powf(-1.0 / p)
}

impl Profile {
    /// Validates and indexes the segments. Zero-length segments are dropped.
    pub fn new(p: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Constraint(format!("profile exponent p > 1 (got {p})")));
        }
        let segments: Vec<Segment> = segments.into_iter().filter(|s| s.length() != 0.0).collect();
        let mut prev_end_value = f64::INFINITY;
        let mut total = 0.0;
        for (i, s) in segments.iter().enumerate() {
            let len = s.length();
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::Constraint(format!("segment {i} length must be positive (got {len})")));
            }
            let (head, tail) = match *s {
                Segment::Power { length } => {
                    if i != 0 {
                        return Err(Error::Constraint("a power segment may only come first".into()));
                    }
                    (f64::INFINITY, power_density(p, length))
                }
                Segment::Constant { value, .. } => {
                    if !(value.is_finite() && value >= 0.0) {
                        return Err(Error::Constraint(format!("segment {i} value must be ≥ 0 (got {value})")));
                    }
                    (value, value)
                }
            };
            if head > prev_end_value + PROFILE_TOL * prev_end_value.max(1.0) {
                return Err(Error::Constraint(format!(
                    "profile must be nonincreasing: segment {i} starts at {head} after {prev_end_value}"
                )));
            }
            prev_end_value = tail;
            total += len;
        }
        if total > 1.0 + PROFILE_TOL {
            return Err(Error::Constraint(format!("profile domain exceeds [0,1] (length {total})")));
        }

        let mut starts = Vec::with_capacity(segments.len());
        let mut mass_before = Vec::with_capacity(segments.len());
        let (mut t, mut m) = (0.0, 0.0);
        for s in &segments {
            starts.push(t);
            mass_before.push(m);
            m += segment_mass(p, s);
            t += s.length();
        }
        Ok(Self { segments, p, starts, mass_before })
    }

    pub fn constant(p: f64, value: f64, length: f64) -> Result<Self> {
        Self::new(p, vec![Segment::Constant { length, value }])
    }

    /// Rebuilds the index after deserialization.
    pub fn reindexed(self) -> Result<Self> {
        Self::new(self.p, self.segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn domain_length(&self) -> f64 {
        match (self.starts.last(), self.segments.last()) {
            (Some(t), Some(s)) => t + s.length(),
            _ => 0.0,
        }
    }

    pub fn has_power_piece(&self) -> bool {
        matches!(self.segments.first(), Some(Segment::Power { .. }))
    }

    /// The same function extended by zero to `(0, 1]`.
    pub fn padded_to_unit(&self) -> Self {
        let rest = 1.0 - self.domain_length();
        if rest <= PROFILE_TOL {
            return self.clone();
        }
        let mut segments = self.segments.clone();
        segments.push(Segment::Constant { length: rest, value: 0.0 });
        Self::new(self.p, segments).expect("zero tail keeps a valid profile valid")
    }

    /// Value at `t ∈ (0, domain_length]`, right-continuous from the left end
    /// of each plateau.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.segment_index(t);
        match self.segments.get(i) {
            Some(Segment::Power { .. }) => power_density(self.p, t),
            Some(Segment::Constant { value, .. }) => *value,
            None => 0.0,
        }
    }

    /// Closed-form `∫ g`.
    pub fn integral(&self) -> f64 {
        match (self.mass_before.last(), self.segments.last()) {
            (Some(m), Some(s)) => m + segment_mass(self.p, s),
            _ => 0.0,
        }
    }

    /// Closed-form `∫ g^q`; the power piece contributes `Γ c^{1-q/p}`.
    pub fn lq_mass(&self, q: f64) -> Result<f64> {
        let p = self.p;
        let mut total = 0.0;
        for s in &self.segments {
            total += match *s {
                Segment::Power { length } => {
                    if q >= p {
                        return Err(Error::Divergent(format!(
                            "power piece is not q-integrable for q = {q} ≥ p = {p}"
                        )));
                    }
                    ((p - 1.0) / p).powf(q) * p / (p - q) * length.powf(1.0 - q / p)
                }
                Segment::Constant { length, value } => value.powf(q) * length,
            };
        }
        Ok(total)
    }

    /// Convenience for `lq_mass(exp.q())`.
    pub fn lq_mass_for(&self, exp: &Exponents) -> f64 {
        self.lq_mass(exp.q()).expect("q < p by the exponent invariant")
    }

    /// `∫_0^t g` for `0 ≤ t ≤ domain_length`.
    pub fn running_integral(&self, t: f64) -> Result<f64> {
        let len = self.domain_length();
        if !(t >= 0.0 && t <= len + PROFILE_TOL) {
            return Err(Error::OutOfRange(format!("t = {t} outside [0, {len}]")));
        }
        Ok(self.running_integral_clamped(t))
    }

    /// `∫_0^t g` with `g` extended by zero outside its domain.
    pub fn running_integral_clamped(&self, t: f64) -> f64 {
        if t <= 0.0 || self.segments.is_empty() {
            return 0.0;
        }
        let i = self.segment_index(t);
        if i >= self.segments.len() {
            return self.integral();
        }
        let offset = t - self.starts[i];
        self.mass_before[i]
            + match self.segments[i] {
                Segment::Power { .. } => t.powf(1.0 - 1.0 / self.p),
                Segment::Constant { value, .. } => value * offset,
            }
    }

    /// `sup_t t^{-1+1/p} ∫_0^t g`.
    ///
    /// On a plateau the ratio has the form `t^{-1+1/p}(a + bt)` with `a, b ≥ 0`,
    /// whose only critical point is a minimum, so the supremum is attained at
    /// a plateau endpoint. On the power piece the ratio is identically one.
    pub fn weak_norm(&self) -> f64 {
        let expo = -1.0 + 1.0 / self.p;
        let mut best: f64 = if self.has_power_piece() { 1.0 } else { 0.0 };
        for (i, s) in self.segments.iter().enumerate() {
            let end = self.starts[i] + s.length();
            let ratio = end.powf(expo) * (self.mass_before[i] + segment_mass(self.p, s));
            best = best.max(ratio);
        }
        best
    }

    /// Largest `t` with `∫_0^t g ≥ t λ`, i.e. the reach of the level `λ`
    /// by initial averages. Zero when even the first cell average is below.
    pub fn level_reach(&self, lambda: f64) -> f64 {
        let len = self.domain_length();
        if len == 0.0 {
            return 0.0;
        }
        let h = |t: f64| self.running_integral_clamped(t) - t * lambda;
        if h(len) >= 0.0 {
            return len;
        }
        // Initial averages are nonincreasing in t; find the crossing.
        let (mut lo, mut hi) = (0.0, len);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Cell averages on `2^level` equal cells of `[0, 1]`.
    pub fn discretize(&self, level: u32) -> GridFunction {
        self.discretize_cells(1usize << level)
    }

    /// Cell averages on `cells` equal cells of `[0, 1]`; beyond the domain the
    /// profile counts as zero. Averages telescope, so `∫` is preserved.
    pub fn discretize_cells(&self, cells: usize) -> GridFunction {
        let n = cells as f64;
        let mut values = Vec::with_capacity(cells);
        let mut left_mass = 0.0;
        for i in 0..cells {
            let a = i as f64 / n;
            let b = (i + 1) as f64 / n;
            let right_mass = self.running_integral_clamped(b);
            // A cell inside a single plateau keeps the plateau value exactly.
            let ia = self.segment_index_right(a);
            let ib = self.segment_index(b);
            let v = match (ia == ib, self.segments.get(ia)) {
                (true, Some(Segment::Constant { value, .. })) => *value,
                (true, None) => 0.0,
                _ => ((right_mass - left_mass) * n).max(0.0),
            };
            values.push(v);
            left_mass = right_mass;
        }
        GridFunction::new(values).expect("cell averages of a valid profile are finite and nonnegative")
    }

    /// Index of the segment containing `t` in the half-open sense `(start, end]`;
    /// `segments.len()` past the end.
    fn segment_index(&self, t: f64) -> usize {
        // First segment whose end is ≥ t.
        let idx = self.starts.partition_point(|&s| s < t);
        let i = idx.saturating_sub(1);
        if i < self.segments.len() && t <= self.starts[i] + self.segments[i].length() {
            i
        } else {
            self.segments.len()
        }
    }

    /// Index of the segment containing `t` in the sense `[start, end)`.
    fn segment_index_right(&self, t: f64) -> usize {
        let idx = self.starts.partition_point(|&s| s <= t);
        let i = idx.saturating_sub(1);
        if i < self.segments.len() && t < self.starts[i] + self.segments[i].length() {
            i
        } else {
            self.segments.len()
        }
    }
}

fn segment_mass(p: f64, s: &Segment) -> f64 {
    match *s {
        Segment::Power { length } => length.powf(1.0 - 1.0 / p),
        Segment::Constant { length, value } => value * length,
    }
}
