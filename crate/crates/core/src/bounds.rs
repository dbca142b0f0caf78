//! Closed-form sharp bounds for the level-set measure of `M_T φ`.
//!
//! * `G_{f,A}(λ)`: the sharp bound under L¹ and L^q constraints only,
//!   with its root branch `k`.
//! * `T^{(1)}_{f,A}(λ) = min{1, G_{f,A}(λ), λ^{-p}}` at unit weak norm.
//! * The scaled bound `min{1, G_{f,A}(λ), (F/λ)^p}` for general `F`.

use serde::{Deserialize, Serialize};

use crate::domain::{approx_le, domain_check, normalize, require_domain, ConstraintTriple, Exponents};
use crate::error::{Error, Result};
use crate::roots::{bisect, Root};

/// Keeps the `k` bracket off the `(1-α)^{q-1}` singularity.
pub const K_BRACKET_GUARD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundBranch {
    One,
    FOverLambda,
    KRoot,
    WeakCap,
}

impl BoundBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundBranch::One => "one",
            BoundBranch::FOverLambda => "f_over_lambda",
            BoundBranch::KRoot => "k_root",
            BoundBranch::WeakCap => "weak_cap",
        }
    }
}

impl std::fmt::Display for BoundBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundBranch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(BoundBranch::One),
            "f_over_lambda" => Ok(BoundBranch::FOverLambda),
            "k_root" => Ok(BoundBranch::KRoot),
            "weak_cap" => Ok(BoundBranch::WeakCap),
            other => Err(Error::Constraint(format!("unknown branch tag {other:?}"))),
        }
    }
}

/// One evaluation of the bound. All three candidates are always computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub g_value: f64,
    /// Root of the `k` equation when `G` is on its root branch.
    pub k: Option<f64>,
    pub weak_cap: f64,
    pub branch: BoundBranch,
    pub t_value: f64,
    /// `|residual|` of the `k` equation, zero when no root was needed.
    pub root_residual: f64,
}

/// Which formula `G_{f,A}(λ)` used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum GPiece {
    One,
    FOverLambda,
    Root(Root),
}

/// `(A/f)^{1/(q-1)}`, where `G` switches from `f/λ` to the root branch.
pub fn root_threshold(f: f64, a: f64, q: f64) -> f64 {
    (a / f).powf(1.0 / (q - 1.0))
}

/// Left side minus right side of `(f-αλ)^q/(1-α)^{q-1} + αλ^q = A`.
pub(crate) fn k_residual(f: f64, a: f64, lambda: f64, q: f64, alpha: f64) -> f64 {
    let head = (f - alpha * lambda).max(0.0);
    head.powf(q) / (1.0 - alpha).powf(q - 1.0) + alpha * lambda.powf(q) - a
}

/// Root of the `k` equation under the Hölder condition `f^q ≤ A` only.
/// This is what the scale-invariance check uses on unnormalized data.
pub(crate) fn solve_k_unchecked(f: f64, a: f64, lambda: f64, q: f64) -> Result<Root> {
    let threshold = root_threshold(f, a, q);
    if !approx_le(threshold, lambda) {
        return Err(Error::WrongBranch(format!(
            "λ = {lambda} is below (A/f)^(1/(q-1)) = {threshold}"
        )));
    }
    let h = |alpha: f64| k_residual(f, a, lambda, q, alpha);
    let lo_val = h(0.0);
    if lo_val >= 0.0 {
        // A = f^q up to rounding: the constant function, k = 0. This also
        // covers λ = f, where every α solves the equation.
        return Ok(Root { x: 0.0, residual: lo_val.abs(), iterations: 0 });
    }
    let hi = (f / lambda).min(1.0 - K_BRACKET_GUARD);
    let hi_val = h(hi);
    if hi_val <= 0.0 {
        // λ sits on the threshold up to rounding.
        if hi_val.abs() <= 1e-12 * a.max(1.0) {
            return Ok(Root { x: hi, residual: hi_val.abs(), iterations: 0 });
        }
        return Err(Error::Bracket(format!("k equation: h({hi}) = {hi_val} ≤ 0")));
    }
    bisect(h, 0.0, hi, "k equation")
}

/// Unique `α ∈ [0, f/λ]` with `(f-αλ)^q/(1-α)^{q-1} + αλ^q = A`.
///
/// The left side is increasing in `α`, running from `f^q` to `fλ^{q-1}`, so
/// a root exists exactly when `λ ≥ (A/f)^{1/(q-1)}`.
pub fn solve_k(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<Root> {
    require_domain(exp, f, a)?;
    solve_k_unchecked(f, a, lambda, exp.q())
}

pub(crate) fn g_piece(f: f64, a: f64, lambda: f64, q: f64) -> Result<(f64, GPiece)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Constraint(format!("λ > 0 (got {lambda})")));
    }
    if lambda <= f {
        return Ok((1.0, GPiece::One));
    }
    if lambda < root_threshold(f, a, q) {
        return Ok((f / lambda, GPiece::FOverLambda));
    }
    let root = solve_k_unchecked(f, a, lambda, q)?;
    Ok((root.x, GPiece::Root(root)))
}

/// `G_{f,A}(λ)`: 1 for `λ ≤ f`, `f/λ` below the threshold, `k` above.
pub fn g_fa(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<f64> {
    require_domain(exp, f, a)?;
    g_piece(f, a, lambda, exp.q()).map(|(g, _)| g)
}

fn assemble(lambda: f64, g: f64, piece: GPiece, weak_cap: f64) -> BoundReport {
    let (k, root_residual) = match piece {
        GPiece::Root(r) => (Some(r.x), r.residual),
        _ => (None, 0.0),
    };
    let (t_value, branch) = if 1.0 <= g && 1.0 <= weak_cap {
        (1.0, BoundBranch::One)
    } else if g <= weak_cap {
        let b = match piece {
            GPiece::Root(_) => BoundBranch::KRoot,
            // G = 1 only when λ ≤ f, and then the cap is ≥ 1 as well.
            GPiece::FOverLambda | GPiece::One => BoundBranch::FOverLambda,
        };
        (g, b)
    } else {
        (weak_cap, BoundBranch::WeakCap)
    };
    BoundReport { lambda, g_value: g, k, weak_cap, branch, t_value, root_residual }
}

/// `T^{(1)}_{f,A}(λ) = min{1, G_{f,A}(λ), λ^{-p}}` for `(f, A)` in the domain.
pub fn t1(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<BoundReport> {
    require_domain(exp, f, a)?;
    let (g, piece) = g_piece(f, a, lambda, exp.q())?;
    Ok(assemble(lambda, g, piece, lambda.powf(-exp.p())))
}

fn require_equality_feasible(exp: &Exponents, c: &ConstraintTriple) -> Result<()> {
    let verdict = domain_check(exp, c);
    if !verdict.member {
        let (n, _) = normalize(exp, c);
        require_domain(exp, n.l1, n.lq)?;
        return Err(Error::Constraint("triple outside the domain".into()));
    }
    if !verdict.equality_feasible {
        return Err(Error::Infeasible(
            "A = f^q with f < F: only the constant function has these moments and its weak norm is f < F".into(),
        ));
    }
    Ok(())
}

/// The sharp bound with `|||φ|||_{p,∞} = F`, evaluated on the normalized
/// triple at `λ/F`. The report carries the caller's `λ`.
pub fn t_scaled(exp: &Exponents, c: &ConstraintTriple, lambda: f64) -> Result<BoundReport> {
    require_equality_feasible(exp, c)?;
    let (n, scale) = normalize(exp, c);
    let mut report = t1(n.l1, n.lq, lambda / scale, exp)?;
    report.lambda = lambda;
    Ok(report)
}

/// The same bound computed from the unnormalized moments,
/// `min{1, G_{f,A}(λ), F^p/λ^p}`. Agrees with [`t_scaled`] because the `k`
/// equation is invariant under `(f, A, λ) ↦ (cf, c^q A, cλ)`.
pub fn t_scaled_direct(exp: &Exponents, c: &ConstraintTriple, lambda: f64) -> Result<BoundReport> {
    require_equality_feasible(exp, c)?;
    let (g, piece) = g_piece(c.l1, c.lq, lambda, exp.q())?;
    Ok(assemble(lambda, g, piece, (c.weak / lambda).powf(exp.p())))
}

/// `sup ‖M_T φ‖_{p,∞}` over the constraint set, which equals `F`.
pub fn weak_norm_sup(exp: &Exponents, c: &ConstraintTriple) -> Result<f64> {
    require_equality_feasible(exp, c)?;
    Ok(c.weak)
}

/// Numerical version of [`weak_norm_sup`]: the largest `λ · T(λ)^{1/p}` over
/// `points` log-spaced levels. The upper end of the grid is pushed out until
/// the bound sits on its weak-cap branch.
pub fn weak_norm_sup_sweep(exp: &Exponents, c: &ConstraintTriple, points: usize) -> Result<f64> {
    require_equality_feasible(exp, c)?;
    let points = points.max(2);
    let lo = 1e-2 * c.weak;
    let mut hi = 2.0 * c.weak;
    while t_scaled(exp, c, hi)?.branch != BoundBranch::WeakCap {
        hi *= 2.0;
        if hi > 1e12 * c.weak {
            return Err(Error::Infeasible("weak-cap branch not reached".into()));
        }
    }
    let ratio = (hi / lo).ln();
    let mut best: f64 = 0.0;
    for i in 0..points {
        let lambda = lo * (ratio * i as f64 / (points - 1) as f64).exp();
        let t = t_scaled(exp, c, lambda)?.t_value;
        best = best.max(lambda * t.powf(1.0 / exp.p()));
    }
    Ok(best)
}

/// Evaluates [`t1`] at every level, in order. Runs in parallel when the
/// `parallel` feature is enabled.
pub fn sweep(f: f64, a: f64, lambdas: &[f64], exp: &Exponents) -> Result<Vec<BoundReport>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        lambdas.par_iter().map(|&l| t1(f, a, l, exp)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        lambdas.iter().map(|&l| t1(f, a, l, exp)).collect()
    }
}
