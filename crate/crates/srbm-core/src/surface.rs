//! Rational parametrization of the genus-zero surface `γ = 0`.
//!
//! With `s` on the Riemann sphere,
//! `θ1(s) = m1 + (ρ1/2)(s + 1/s)` and `θ2(s) = m2 + (ρ2/2)(s e^{−iβ} + e^{iβ}/s)`
//! where `mi` and `ρi` are the midpoint and half-width of `[θi⁻, θi⁺]` and
//! `β = arccos(−σ12/√(σ11σ22))`. The unit circle maps onto the real ellipse:
//! `s = e^{it}` gives `θ1 = m1 + ρ1 cos t`, `θ2 = m2 + ρ2 cos(t − β)`.
//!
//! The Galois automorphisms are `ζ(s) = 1/s` (fixes `θ1`) and `η(s) = e^{2iβ}/s`
//! (fixes `θ2`); `ηζ` and `ζη` are rotations by `+2β` and `−2β`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{self, EllipsePoint};
use crate::model::ModelParams;

type C = Complex64;

/// Angular tolerance (radians) for arc membership.
pub const ARC_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("point ({theta1}, {theta2}) is not on the ellipse (residual {residual:e})")]
    NotOnEllipse { theta1: f64, theta2: f64, residual: f64 },
    #[error("arc end points coincide")]
    DegenerateArc,
}

/// A point of the parametrizing sphere. `s = 0` and `s = ∞` are the two points
/// at infinity of the curve; `Infinity` is kept distinct from every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfacePoint {
    Finite(C),
    Infinity,
}

impl SurfacePoint {
    pub fn on_circle(t: f64) -> Self {
        SurfacePoint::Finite(C::from_polar(1.0, t))
    }

    pub fn finite(&self) -> Option<C> {
        match self {
            SurfacePoint::Finite(z) => Some(*z),
            SurfacePoint::Infinity => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, SurfacePoint::Finite(z) if *z == C::new(0.0, 0.0))
    }

    /// Argument in `(−π, π]`, `None` for `0` and `∞`.
    pub fn arg(&self) -> Option<f64> {
        match self {
            SurfacePoint::Finite(z) if !self.is_zero() => Some(z.arg()),
            _ => None,
        }
    }
}

/// Parametrization data derived from a model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceGeometry {
    pub beta: f64,
    pub m1: f64,
    pub rho1: f64,
    pub m2: f64,
    pub rho2: f64,
    params: ModelParams,
}

impl SurfaceGeometry {
    pub fn new(params: &ModelParams) -> Self {
        let bp = kernel::branch_points(params);
        let beta = (-params.s12() / (params.s11() * params.s22()).sqrt()).clamp(-1.0, 1.0).acos();
        Self {
            beta,
            m1: 0.5 * (bp.theta1_plus + bp.theta1_minus),
            rho1: 0.5 * (bp.theta1_plus - bp.theta1_minus),
            m2: 0.5 * (bp.theta2_plus + bp.theta2_minus),
            rho2: 0.5 * (bp.theta2_plus - bp.theta2_minus),
            params: *params,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Images of the branch points: `s1⁺ = 1`, `s1⁻ = −1`, `s2⁺ = e^{iβ}`, `s2⁻ = −e^{iβ}`.
    pub fn branch_images(&self) -> [SurfacePoint; 4] {
        [
            SurfacePoint::Finite(C::new(1.0, 0.0)),
            SurfacePoint::Finite(C::new(-1.0, 0.0)),
            SurfacePoint::on_circle(self.beta),
            SurfacePoint::on_circle(self.beta + PI),
        ]
    }

    /// `θ1(s)`; `None` at `s ∈ {0, ∞}`.
    pub fn h_theta1(&self, s: SurfacePoint) -> Option<C> {
        match s {
            SurfacePoint::Finite(z) if !s.is_zero() => Some(self.m1 + 0.5 * self.rho1 * (z + z.inv())),
            _ => None,
        }
    }

    /// `θ2(s)`; `None` at `s ∈ {0, ∞}`.
    pub fn h_theta2(&self, s: SurfacePoint) -> Option<C> {
        match s {
            SurfacePoint::Finite(z) if !s.is_zero() => {
                let e = C::from_polar(1.0, self.beta);
                Some(self.m2 + 0.5 * self.rho2 * (z / e + e / z))
            }
            _ => None,
        }
    }

    pub fn coords(&self, s: SurfacePoint) -> Option<(C, C)> {
        Some((self.h_theta1(s)?, self.h_theta2(s)?))
    }

    /// Real coordinates of the circle point `e^{it}`.
    pub fn circle_point(&self, t: f64) -> EllipsePoint {
        EllipsePoint::new(self.m1 + self.rho1 * t.cos(), self.m2 + self.rho2 * (t - self.beta).cos())
    }

    pub fn zeta(&self, s: SurfacePoint) -> SurfacePoint {
        match s {
            SurfacePoint::Infinity => SurfacePoint::Finite(C::new(0.0, 0.0)),
            SurfacePoint::Finite(_) if s.is_zero() => SurfacePoint::Infinity,
            SurfacePoint::Finite(z) => SurfacePoint::Finite(z.inv()),
        }
    }

    pub fn eta(&self, s: SurfacePoint) -> SurfacePoint {
        match s {
            SurfacePoint::Infinity => SurfacePoint::Finite(C::new(0.0, 0.0)),
            SurfacePoint::Finite(_) if s.is_zero() => SurfacePoint::Infinity,
            SurfacePoint::Finite(z) => SurfacePoint::Finite(C::from_polar(1.0, 2.0 * self.beta) / z),
        }
    }

    /// Angle of `ζ(e^{it})`.
    pub fn zeta_angle(&self, t: f64) -> f64 {
        wrap(-t)
    }

    /// Angle of `η(e^{it})`.
    pub fn eta_angle(&self, t: f64) -> f64 {
        wrap(2.0 * self.beta - t)
    }

    /// Circle angle of a real ellipse point, by `atan2` on the parametrized circle.
    pub fn ellipse_angle(&self, p: &EllipsePoint) -> Result<f64, SurfaceError> {
        let c1 = (p.theta1 - self.m1) / self.rho1;
        let c2 = (p.theta2 - self.m2) / self.rho2;
        let (sb, cb) = self.beta.sin_cos();
        let sin_t = (c2 - c1 * cb) / sb;
        let t = sin_t.atan2(c1);
        let back = self.circle_point(t);
        let residual = back.dist(p);
        let scale = 1.0 + self.rho1.max(self.rho2) + p.theta1.abs().max(p.theta2.abs());
        if !(residual <= 1e-9 * scale) {
            return Err(SurfaceError::NotOnEllipse { theta1: p.theta1, theta2: p.theta2, residual });
        }
        Ok(t)
    }

    /// Inverse of the covering restricted to the unit circle.
    pub fn ellipse_to_s(&self, p: &EllipsePoint) -> Result<SurfacePoint, SurfaceError> {
        Ok(SurfacePoint::on_circle(self.ellipse_angle(p)?))
    }

    /// Circle angle of `s0 = (0, 0)`.
    pub fn origin_angle(&self) -> f64 {
        self.ellipse_angle(&EllipsePoint::new(0.0, 0.0)).unwrap_or_else(|_| {
            // The origin is always on the curve; fall back to the θ1 preimage on the lower half.
            -(-self.m1 / self.rho1).clamp(-1.0, 1.0).acos()
        })
    }

    /// Whether a circle angle lies on the half containing `s0'`, where the branch `Θ2⁺` is taken.
    pub fn in_phi2_half(&self, t: f64) -> bool {
        t.sin() > 0.0
    }

    /// Whether a circle angle lies on the half containing `s0''`, where the branch `Θ1⁺` is taken.
    pub fn in_phi1_half(&self, t: f64) -> bool {
        (self.beta - t).sin() > 0.0
    }

    /// Equality of two circle angles up to [`ARC_TOL`].
    pub fn same_angle(a: f64, b: f64) -> bool {
        angular_distance(a, b) < ARC_TOL
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap(t: f64) -> f64 {
    let mut r = t.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// How an arc end is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Closed,
    Open,
}

/// An arc of the unit circle given by its end angles.
///
/// Unless `not_through_origin` is set the arc runs anticlockwise from `a` to `b`.
/// With `not_through_origin` it is whichever of the two arcs joining `a` and `b` avoids
/// the origin angle; end inclusions stay attached to their points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub a: f64,
    pub b: f64,
    pub end_a: End,
    pub end_b: End,
    pub not_through_origin: Option<f64>,
}

impl Arc {
    pub fn anticlockwise(a: f64, b: f64, end_a: End, end_b: End) -> Self {
        Self { a, b, end_a, end_b, not_through_origin: None }
    }

    /// Arc joining `a` and `b` that does not contain `origin`.
    pub fn avoiding(a: f64, b: f64, end_a: End, end_b: End, origin: f64) -> Self {
        Self { a, b, end_a, end_b, not_through_origin: Some(origin) }
    }

    fn oriented(&self) -> (f64, f64, End, End) {
        match self.not_through_origin {
            None => (self.a, self.b, self.end_a, self.end_b),
            Some(o) => {
                let len = (self.b - self.a).rem_euclid(TAU);
                let x = (o - self.a).rem_euclid(TAU);
                if x > 0.0 && x < len {
                    (self.b, self.a, self.end_b, self.end_a)
                } else {
                    (self.a, self.b, self.end_a, self.end_b)
                }
            }
        }
    }

    /// Membership of a circle angle.
    pub fn contains_angle(&self, t: f64) -> Result<bool, SurfaceError> {
        if angular_distance(self.a, self.b) < ARC_TOL {
            return Err(SurfaceError::DegenerateArc);
        }
        let (a, b, end_a, end_b) = self.oriented();
        if angular_distance(t, a) < ARC_TOL {
            return Ok(end_a == End::Closed);
        }
        if angular_distance(t, b) < ARC_TOL {
            return Ok(end_b == End::Closed);
        }
        if let Some(o) = self.not_through_origin {
            if angular_distance(t, o) < ARC_TOL {
                return Ok(false);
            }
        }
        let len = (b - a).rem_euclid(TAU);
        let x = (t - a).rem_euclid(TAU);
        Ok(x < len)
    }
}

/// Membership of a sphere point in an arc. The point must be on the unit circle.
pub fn in_arc(p: SurfacePoint, arc: &Arc) -> Result<bool, SurfaceError> {
    match p {
        SurfacePoint::Finite(z) if (z.norm() - 1.0).abs() <= 1e-9 => arc.contains_angle(z.arg()),
        _ => Ok(false),
    }
}
