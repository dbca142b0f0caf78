//! Exponents, constraint triples and the feasible domain of the extremal
//! problem.
//!
//! A triple `(f, A, F)` records the L¹ mass, the L^q mass and the weak-L^p
//! norm of a nonnegative function on a probability space. Everything else in
//! the crate works with the normalized case `F = 1`; [`normalize`] maps a
//! general triple there by the homogeneity `φ ↦ φ / F`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for boundary comparisons.
pub const BOUNDARY_TOL: f64 = 1e-12;

pub(crate) fn approx_le(a: f64, b: f64) -> bool {
    a <= b + BOUNDARY_TOL * b.abs().max(1.0)
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= BOUNDARY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// The exponent pair `(p, q)` with `1 < q < p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    p: f64,
    q: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if p.is_finite() && q.is_finite() && 1.0 < q && q < p {
            Ok(Self { p, q })
        } else {
            Err(Error::InvalidExponents { p, q })
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `((p-1)/p)^q · p/(p-q)`, the largest L^q mass per unit of
    /// `f^{(p-q)/(p-1)}`.
    pub fn gamma(&self) -> f64 {
        let (p, q) = (self.p, self.q);
        ((p - 1.0) / p).powf(q) * p / (p - q)
    }

    /// `(p-q)/(p-1)`, the power of `f` in the upper domain boundary.
    pub fn upper_power(&self) -> f64 {
        (self.p - self.q) / (self.p - 1.0)
    }

    /// Upper end `Γ f^{(p-q)/(p-1)}` of the admissible L^q masses at `F = 1`.
    pub fn max_lq_mass(&self, f: f64) -> f64 {
        self.gamma() * f.powf(self.upper_power())
    }
}

/// Free-function form of [`Exponents::gamma`].
pub fn gamma(exp: &Exponents) -> f64 {
    exp.gamma()
}

/// `(f, A, F)`: L¹ mass, L^q mass and weak-L^p norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintTriple {
    pub l1: f64,
    pub lq: f64,
    pub weak: f64,
}

impl ConstraintTriple {
    pub fn new(l1: f64, lq: f64, weak: f64) -> Result<Self> {
        for (name, v) in [("f", l1), ("A", lq), ("F", weak)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Constraint(format!("{name} > 0 (got {v})")));
            }
        }
        Ok(Self { l1, lq, weak })
    }

    /// Shorthand for a normalized triple `(f, A, 1)`.
    pub fn unit(l1: f64, lq: f64) -> Result<Self> {
        Self::new(l1, lq, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Interior,
    /// `A = f^q`: only the constant function has these moments.
    Lower,
    /// `A = Γ f^{(p-q)/(p-1)}`.
    Upper,
    /// Normalized `f = 1`.
    FEqualsF,
    /// Not in the domain.
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainVerdict {
    pub member: bool,
    pub boundary: Boundary,
    /// Whether the norm constraint can hold with equality `|||φ||| = F`.
    pub equality_feasible: bool,
}

/// Maps `(f, A, F)` to `(f/F, A/F^q, 1)` and returns the scale `F`.
pub fn normalize(exp: &Exponents, c: &ConstraintTriple) -> (ConstraintTriple, f64) {
    let scale = c.weak;
    if scale == 1.0 {
        return (*c, 1.0);
    }
    let normalized = ConstraintTriple {
        l1: c.l1 / scale,
        lq: c.lq / scale.powf(exp.q()),
        weak: 1.0,
    };
    (normalized, scale)
}

/// Classifies a triple against the domain `0 < f ≤ F`,
/// `f^q ≤ A ≤ Γ f^{(p-q)/(p-1)} F^{p(q-1)/(p-1)}`.
pub fn domain_check(exp: &Exponents, c: &ConstraintTriple) -> DomainVerdict {
    let (n, _) = normalize(exp, c);
    let (f, a) = (n.l1, n.lq);
    let lower = f.powf(exp.q());
    let upper = exp.max_lq_mass(f);

    let member = f > 0.0 && approx_le(f, 1.0) && approx_le(lower, a) && approx_le(a, upper);
    if !member {
        return DomainVerdict { member, boundary: Boundary::Exterior, equality_feasible: false };
    }
    let on_lower = approx_eq(a, lower);
    let f_is_one = approx_eq(f, 1.0);
    let boundary = if on_lower {
        Boundary::Lower
    } else if approx_eq(a, upper) {
        Boundary::Upper
    } else if f_is_one {
        Boundary::FEqualsF
    } else {
        Boundary::Interior
    };
    DomainVerdict { member, boundary, equality_feasible: !on_lower || f_is_one }
}

/// `Ok` when the normalized pair `(f, A)` lies in the domain; otherwise a
/// constraint error naming the failed inequality.
pub fn require_domain(exp: &Exponents, f: f64, a: f64) -> Result<()> {
    if !(f.is_finite() && f > 0.0) {
        return Err(Error::Constraint(format!("0 < f (got f = {f})")));
    }
    if !approx_le(f, 1.0) {
        return Err(Error::Constraint(format!("f ≤ 1 (got f = {f})")));
    }
    let lower = f.powf(exp.q());
    if !approx_le(lower, a) {
        return Err(Error::Constraint(format!("f^q ≤ A (f^q = {lower}, A = {a})")));
    }
    let upper = exp.max_lq_mass(f);
    if !approx_le(a, upper) {
        return Err(Error::Constraint(format!(
            "A ≤ Γ f^((p-q)/(p-1)) (bound = {upper}, A = {a})"
        )));
    }
    Ok(())
}
