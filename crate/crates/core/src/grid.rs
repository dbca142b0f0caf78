//! Functions on `n` equal cells of `[0, 1]` and their rearrangements.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative values on equal cells; cell `i` covers `[i/n, (i+1)/n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Constraint("grid function needs at least one cell".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Constraint(format!("cell {i} must be finite and ≥ 0 (got {v})")));
        }
        Ok(Self { values })
    }

    pub fn constant(value: f64, cells: usize) -> Result<Self> {
        Self::new(vec![value; cells])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// `log2` of the cell count when it is a power of two.
    pub fn dyadic_level(&self) -> Option<u32> {
        let n = self.values.len();
        n.is_power_of_two().then(|| n.trailing_zeros())
    }

    pub fn integral(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.cell_width()
    }

    pub fn lq_mass(&self, q: f64) -> f64 {
        compensated_sum(self.values.iter().map(|v| v.powf(q))) * self.cell_width()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        self.lq_mass(p).powf(1.0 / p)
    }

    /// `|||u|||_{p,∞}`, computed on the decreasing rearrangement.
    pub fn weak_norm(&self, p: f64) -> f64 {
        weak_norm_sorted(&sorted_desc(&self.values), p)
    }

    /// `‖u‖_{p,∞} = sup_λ λ |{u ≥ λ}|^{1/p}`.
    pub fn quasi_norm(&self, p: f64) -> f64 {
        quasi_norm_sorted(&sorted_desc(&self.values), p)
    }

    pub fn decreasing_rearrangement(&self) -> GridFunction {
        GridFunction { values: sorted_desc(&self.values) }
    }
}

/// Neumaier summation: the error stays at one rounding regardless of length.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

pub(crate) fn sorted_desc(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// Weak norm of a function given by its nonincreasing cell values.
///
/// Prefix integrals are linear between cell boundaries, and the ratio
/// `t^{-1+1/p}(a + bt)` has no interior maximum, so boundaries suffice.
pub fn weak_norm_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len() as f64;
    let expo = -1.0 + 1.0 / p;
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        acc += v;
        let t = (i + 1) as f64 / n;
        best = best.max(t.powf(expo) * acc / n);
    }
    best
}

/// Distributional quasi-norm of a function given by its nonincreasing values.
pub fn quasi_norm_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, v)| v * ((i + 1) as f64 / n).powf(1.0 / p))
        .fold(0.0, f64::max)
}

/// Locates a window of `width` consecutive entries of a nonincreasing list
/// whose average matches `target`.
///
/// Window averages are nonincreasing in the start index `r`. The returned `r`
/// is the last start whose average is still `≥ target`; among starts sharing
/// that average the first one is taken. The bracketing condition is that the
/// first window averages at least `target` and the last at most `target`.
pub fn extract_equal_average_block(sorted: &[f64], width: usize, target: f64) -> Result<usize> {
    let n = sorted.len();
    if width == 0 || width > n {
        return Err(Error::Infeasible(format!("window width {width} not within 1..={n}")));
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in sorted {
        acc += v;
        prefix.push(acc);
    }
    let avg = |r: usize| (prefix[r + width] - prefix[r]) / width as f64;
    let tol = 1e-12 * target.abs().max(1.0);
    let last = n - width;
    if avg(0) < target - tol || avg(last) > target + tol {
        return Err(Error::Infeasible(format!(
            "target average {target} outside window range [{}, {}]",
            avg(last),
            avg(0)
        )));
    }
    // Largest r with avg(r) ≥ target - tol.
    let (mut lo, mut hi) = (0usize, last);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if avg(mid) >= target - tol {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    let reached = avg(lo);
    // First r sharing that average.
    let (mut a, mut b) = (0usize, lo);
    while a < b {
        let mid = (a + b) / 2;
        if avg(mid) <= reached + tol {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    Ok(a)
}
