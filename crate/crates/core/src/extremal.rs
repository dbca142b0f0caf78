//! Extremal profiles attaining the sharp bounds.
//!
//! Every construction returns a nonincreasing profile `g` on `(0, 1]` (or on
//! `(0, α]` for [`construct_two_piece`]) with `∫ g = f`, `∫ g^q = A` and
//! `sup_t t^{-1+1/p} ∫_0^t g ≤ 1`, whose initial average over `(0, α]` is
//! `λ` for the measure `α` the bound predicts.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, root_threshold, solve_k, BoundBranch};
use crate::domain::{approx_eq, approx_le, require_domain, Exponents};
use crate::error::{Error, Result};
use crate::profile::{Profile, Segment};
use crate::roots::bisect;

/// Plateaus shorter than this fraction of their interval are dropped.
const NEGLIGIBLE_LENGTH: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalBranch {
    /// `λ ≤ f`: the whole space.
    Trivial,
    /// `G = f/λ`: power head plus plateau on `(0, f/λ]`.
    GMid,
    /// `G = k`: two steps `λ` and `(f-kλ)/(1-k)`.
    GRoot,
    /// Weak cap with `θ_λ > A`: power, plateau, plateau.
    #[serde(rename = "weak_case_i")]
    WeakCaseI,
    /// Weak cap with `θ_λ ≤ A`: power head reaching past `λ^{-p}`, plateau.
    #[serde(rename = "weak_case_ii")]
    WeakCaseII,
}

impl ExtremalBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremalBranch::Trivial => "trivial",
            ExtremalBranch::GMid => "g_mid",
            ExtremalBranch::GRoot => "g_root",
            ExtremalBranch::WeakCaseI => "weak_case_i",
            ExtremalBranch::WeakCaseII => "weak_case_ii",
        }
    }
}

/// Parameters of a construction, for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalRecipe {
    pub branch: ExtremalBranch,
    pub lambda: f64,
    /// Attained measure, equal to the bound.
    pub alpha: f64,
    pub c1: Option<f64>,
    pub mu2: Option<f64>,
    pub mu3: Option<f64>,
    pub k: Option<f64>,
    pub theta: Option<f64>,
    /// Set when `A = f^q` and `f < 1`: the norm constraint can only hold as
    /// an inequality, and the reported bound is the `≤` problem's.
    pub norm_below_one: bool,
}

impl ExtremalRecipe {
    fn new(branch: ExtremalBranch, lambda: f64, alpha: f64) -> Self {
        Self { branch, lambda, alpha, c1: None, mu2: None, mu3: None, k: None, theta: None, norm_below_one: false }
    }
}

/// Extreme points of the `2^{-n}`-step functions with `∫ = f` and weak
/// norm at most one.
///
/// Steps are `2^{n/p}(i^{1-1/p} - (i-1)^{1-1/p})` for `i ≤ k`, then
/// `2^n f - 2^{n/p} k^{1-1/p}`, then zeros, where `k` is the largest `i` with
/// `(i/2^n)^{1-1/p} ≤ f`.
pub fn extreme_point_profile(n: u32, f: f64, exp: &Exponents) -> Result<Profile> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::Constraint(format!("0 < f ≤ 1 (got {f})")));
    }
    let steps = extreme_point_steps(n, f, exp.p());
    let width = 1.0 / (1u64 << n) as f64;
    let segments = steps
        .into_iter()
        .map(|value| Segment::Constant { length: width, value })
        .collect();
    Profile::new(exp.p(), segments)
}

/// The step values `α_1, …, α_{2^n}` of [`extreme_point_profile`].
pub fn extreme_point_steps(n: u32, f: f64, p: f64) -> Vec<f64> {
    let cells = 1usize << n;
    let scale = (cells as f64).powf(1.0 / p);
    let e = 1.0 - 1.0 / p;
    let k = extreme_point_k(n, f, p);
    let mut steps = vec![0.0; cells];
    for (i, s) in steps.iter_mut().enumerate().take(k) {
        let i = (i + 1) as f64;
        *s = scale * (i.powf(e) - (i - 1.0).powf(e));
    }
    if k < cells {
        steps[k] = (cells as f64 * f - scale * (k as f64).powf(e)).max(0.0);
    }
    steps
}

/// `max{i ≤ 2^n : (i/2^n)^{1-1/p} ≤ f}`.
pub fn extreme_point_k(n: u32, f: f64, p: f64) -> usize {
    let cells = 1usize << n;
    let e = 1.0 - 1.0 / p;
    // Initial guess from the inverse, then fix rounding either way.
    let mut k = ((f.powf(1.0 / e) * cells as f64).floor() as usize).min(cells);
    while k > 0 && (k as f64 / cells as f64).powf(e) > f {
        k -= 1;
    }
    while k < cells && ((k + 1) as f64 / cells as f64).powf(e) <= f {
        k += 1;
    }
    k
}

/// `ℰ_n(f) = α_{k+1}^q / 2^n`, the correction in the L^q bound for the
/// extreme points.
pub fn extreme_point_excess(n: u32, f: f64, exp: &Exponents) -> f64 {
    let cells = 1usize << n;
    let k = extreme_point_k(n, f, exp.p());
    if k >= cells {
        return 0.0;
    }
    let steps = extreme_point_steps(n, f, exp.p());
    steps[k].powf(exp.q()) / cells as f64
}

/// `Γ t^{1-q/p} + (m - t^{1-1/p})^q / (L - t)^{q-1}`: the L^q mass of a power
/// head on `(0, t]` followed by the plateau that brings the mass on `(0, L]`
/// to `m`. The plateau term vanishes continuously as `t → L`.
fn head_plateau_lq(exp: &Exponents, mass: f64, len: f64, t: f64) -> f64 {
    let (p, q) = (exp.p(), exp.q());
    let head = exp.gamma() * t.powf(1.0 - q / p);
    let rest = len - t;
    if rest <= NEGLIGIBLE_LENGTH * len {
        return head;
    }
    let plateau_mass = (mass - t.powf(1.0 - 1.0 / p)).max(0.0);
    head + plateau_mass.powf(q) / rest.powf(q - 1.0)
}

/// Solves `head_plateau_lq(t) + offset = target` on `[lo, hi]` and returns the
/// cutoff with its plateau value.
fn head_plateau_root(
    exp: &Exponents,
    mass: f64,
    len: f64,
    lo: f64,
    hi: f64,
    target: f64,
    offset: f64,
    context: &str,
) -> Result<(f64, f64)> {
    let h = |t: f64| head_plateau_lq(exp, mass, len, t) + offset - target;
    let hi_val = h(hi);
    let c1 = if hi_val.abs() <= 1e-13 * target.max(1.0) {
        hi
    } else {
        let lo_val = h(lo);
        if lo_val.abs() <= 1e-13 * target.max(1.0) {
            lo
        } else {
            bisect(h, lo, hi, context)?.x
        }
    };
    let rest = len - c1;
    let mu = if rest <= NEGLIGIBLE_LENGTH * len {
        0.0
    } else {
        ((mass - c1.powf(1.0 - 1.0 / exp.p())) / rest).max(0.0)
    };
    Ok((c1, mu))
}

fn head_plateau_segments(c1: f64, mu: f64, len: f64) -> Vec<Segment> {
    let mut segments = vec![Segment::Power { length: c1 }];
    let rest = len - c1;
    if rest > NEGLIGIBLE_LENGTH * len {
        segments.push(Segment::Constant { length: rest, value: mu });
    }
    segments
}

/// Power head `((p-1)/p) t^{-1/p}` on `(0, c₁]` followed by a plateau on
/// `(c₁, α]`, with `∫ = f`, `∫ g^q = A` and weak norm exactly one.
///
/// Requires `f ≤ α^{1-1/p}`, `f^q < α^{q-1} A` and `A ≤ Γ f^{(p-q)/(p-1)}`.
/// The cutoff solves
/// `Γ t^{1-q/p} + (f - t^{1-1/p})^q / (α - t)^{q-1} = A` on `(0, f^{p/(p-1)}]`,
/// where the left side runs from `f^q/α^{q-1}` to `Γ f^{(p-q)/(p-1)}`.
pub fn construct_two_piece(f: f64, a: f64, alpha: f64, exp: &Exponents) -> Result<Profile> {
    let p = exp.p();
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Infeasible(format!("α ∈ (0, 1] (got {alpha})")));
    }
    if !(f > 0.0) {
        return Err(Error::Infeasible(format!("f > 0 (got {f})")));
    }
    let head_cap = alpha.powf(1.0 - 1.0 / p);
    if !approx_le(f, head_cap) {
        return Err(Error::Infeasible(format!("f ≤ α^(1-1/p) fails: f = {f}, α^(1-1/p) = {head_cap}")));
    }
    let spread = alpha.powf(exp.q() - 1.0) * a;
    if f.powf(exp.q()) >= spread {
        return Err(Error::Infeasible(format!(
            "f^q < α^(q-1) A fails: f^q = {}, α^(q-1) A = {spread}",
            f.powf(exp.q())
        )));
    }
    let upper = exp.max_lq_mass(f);
    if !approx_le(a, upper) {
        return Err(Error::Infeasible(format!("A ≤ Γ f^((p-q)/(p-1)) fails: A = {a}, bound = {upper}")));
    }
    let c_max = f.powf(p / (p - 1.0)).min(alpha);
    let (c1, mu2) = head_plateau_root(exp, f, alpha, 0.0, c_max, a.min(upper), 0.0, "two-piece cutoff")?;
    Profile::new(p, head_plateau_segments(c1, mu2, alpha))
}

/// Two steps: `λ` on `(0, k]` and `(f - kλ)/(1 - k)` on `(k, 1]`, where `k`
/// solves the root-branch equation. Returns the profile and `k`.
pub fn construct_prop43(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<(Profile, f64)> {
    require_domain(exp, f, a)?;
    let threshold = root_threshold(f, a, exp.q());
    if !approx_le(threshold, lambda) {
        return Err(Error::WrongBranch(format!("λ = {lambda} below (A/f)^(1/(q-1)) = {threshold}")));
    }
    let k = solve_k(f, a, lambda, exp)?.x;
    if k > 0.0 && !approx_le(k * lambda, k.powf(1.0 - 1.0 / exp.p())) {
        return Err(Error::WrongBranch(format!(
            "kλ ≤ k^(1-1/p) fails (k = {k}, λ = {lambda}); use the weak-cap construction"
        )));
    }
    let tail = ((f - k * lambda) / (1.0 - k)).max(0.0);
    let profile = Profile::new(
        exp.p(),
        vec![Segment::Constant { length: k, value: lambda }, Segment::Constant { length: 1.0 - k, value: tail }],
    )?;
    Ok((profile, k))
}

/// `θ_λ = Γ/λ^{p-q} + (f - λ^{1-p})^q / (1 - λ^{-p})^{q-1}`, the L^q mass of
/// the weak-cap profile whose power head ends exactly at `λ^{-p}`.
pub fn theta(f: f64, lambda: f64, exp: &Exponents) -> f64 {
    let (p, q) = (exp.p(), exp.q());
    let cap = lambda.powf(-p);
    let rest = (f - lambda.powf(1.0 - p)).max(0.0);
    exp.gamma() * lambda.powf(q - p) + rest.powf(q) / (1.0 - cap).powf(q - 1.0)
}

/// Profile for the weak-cap branch: `∫_0^{λ^{-p}} g = λ^{1-p}`.
///
/// When `θ_λ > A` the head is a power piece on `(0, c₁]` with `c₁ < λ^{-p}`
/// and a plateau `μ₂` up to `λ^{-p}`, followed by `μ₃ = (f - λ^{1-p})/(1 - λ^{-p})`.
/// Otherwise the power piece reaches past `λ^{-p}` and one plateau follows.
pub fn construct_prop44(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<(Profile, ExtremalRecipe)> {
    require_domain(exp, f, a)?;
    let (p, q) = (exp.p(), exp.q());
    if !(lambda > f) {
        return Err(Error::WrongBranch(format!("weak-cap construction needs λ > f (λ = {lambda}, f = {f})")));
    }
    let cap = lambda.powf(-p);
    let g = bounds::g_fa(f, a, lambda, exp)?;
    if !approx_le(cap, g) || cap > 1.0 {
        return Err(Error::WrongBranch(format!("λ^-p = {cap} is not the minimum (G = {g})")));
    }
    let head_mass = lambda.powf(1.0 - p);
    let th = theta(f, lambda, exp);

    let mut recipe = ExtremalRecipe::new(ExtremalBranch::WeakCaseII, lambda, cap);
    recipe.theta = Some(th);

    if th > a && !approx_eq(th, a) {
        let mu3 = ((f - head_mass) / (1.0 - cap)).max(0.0);
        let tail_lq = mu3.powf(q) * (1.0 - cap);
        let t0 = head_plateau_lq(exp, head_mass, cap, 0.0) + tail_lq;
        if !approx_le(t0, a) {
            return Err(Error::Bracket(format!("weak case i: T(0) = {t0} exceeds A = {a}")));
        }
        let (c1, mu2) = head_plateau_root(exp, head_mass, cap, 0.0, cap, a, tail_lq, "weak case i cutoff")?;
        let mut segments = head_plateau_segments(c1, mu2, cap);
        segments.push(Segment::Constant { length: 1.0 - cap, value: mu3 });
        recipe.branch = ExtremalBranch::WeakCaseI;
        recipe.c1 = Some(c1);
        recipe.mu2 = Some(mu2);
        recipe.mu3 = Some(mu3);
        return Ok((Profile::new(p, segments)?, recipe));
    }

    let c_max = f.powf(p / (p - 1.0)).min(1.0);
    let upper = exp.max_lq_mass(f);
    let lo = cap.min(c_max);
    let (c1, mu2) = head_plateau_root(exp, f, 1.0, lo, c_max, a.min(upper), 0.0, "weak case ii cutoff")?;
    recipe.c1 = Some(c1);
    recipe.mu2 = Some(mu2);
    Ok((Profile::new(p, head_plateau_segments(c1, mu2, 1.0))?, recipe))
}

/// Picks the construction matching the argmin of `min{1, G, λ^{-p}}` and
/// returns a profile on `(0, 1]` attaining it.
pub fn extremizer_for(f: f64, a: f64, lambda: f64, exp: &Exponents) -> Result<(Profile, ExtremalRecipe)> {
    let report = bounds::t1(f, a, lambda, exp)?;
    let p = exp.p();
    let lower = approx_eq(a, f.powf(exp.q()));
    let alpha = report.t_value;

    let (profile, mut recipe) = match report.branch {
        BoundBranch::One => {
            let mut recipe = ExtremalRecipe::new(ExtremalBranch::Trivial, lambda, 1.0);
            // Measure one only needs ∫ g = f ≥ λ; any admissible g will do.
            let profile = if lower {
                Profile::constant(p, f, 1.0)?
            } else {
                let g = construct_two_piece(f, a, 1.0, exp)?;
                if let Some(Segment::Power { length }) = g.segments().first() {
                    recipe.c1 = Some(*length);
                }
                recipe.mu2 = plateau_after_head(&g);
                g
            };
            (profile, recipe)
        }
        BoundBranch::FOverLambda => {
            let mut recipe = ExtremalRecipe::new(ExtremalBranch::GMid, lambda, f / lambda);
            let g = construct_two_piece(f, a, f / lambda, exp)?;
            if let Some(Segment::Power { length }) = g.segments().first() {
                recipe.c1 = Some(*length);
            }
            recipe.mu2 = plateau_after_head(&g);
            (g.padded_to_unit(), recipe)
        }
        BoundBranch::KRoot => {
            let (g, k) = construct_prop43(f, a, lambda, exp)?;
            let mut recipe = ExtremalRecipe::new(ExtremalBranch::GRoot, lambda, k);
            recipe.k = Some(k);
            recipe.mu2 = Some(((f - k * lambda) / (1.0 - k)).max(0.0));
            (g, recipe)
        }
        BoundBranch::WeakCap => construct_prop44(f, a, lambda, exp)?,
    };
    recipe.alpha = alpha;
    recipe.norm_below_one = lower && !approx_eq(f, 1.0);
    Ok((profile, recipe))
}

fn plateau_after_head(g: &Profile) -> Option<f64> {
    g.segments().iter().find_map(|s| match *s {
        Segment::Constant { value, .. } => Some(value),
        Segment::Power { .. } => None,
    })
}
