//! The kernel `γ(θ) = ½⟨θ|Σθ⟩ + ⟨θ|μ⟩`, the boundary forms `γ1`, `γ2`, and the
//! branch structure of the curve `γ = 0`.
//!
//! Writing `γ = a θ2² + b(θ1) θ2 + c(θ1)` gives the two branches
//! `Θ2±(θ1) = (−b ± √d)/(2a)` with discriminant `d = b² − 4ac`; the roles of the
//! coordinates swap for `Θ1±(θ2)` with `ã`, `b̃`, `c̃`, `d̃`.

use num_complex::Complex64;

use crate::model::ModelParams;

type C = Complex64;

pub fn gamma(p: &ModelParams, t1: C, t2: C) -> C {
    0.5 * (p.s11() * t1 * t1 + p.s22() * t2 * t2 + 2.0 * p.s12() * t1 * t2) + p.mu1() * t1 + p.mu2() * t2
}

/// `γ1(θ) = r11 θ1 + r21 θ2`, the pairing with the first reflection column.
pub fn gamma1(p: &ModelParams, t1: C, t2: C) -> C {
    p.r11() * t1 + p.r21() * t2
}

/// `γ2(θ) = r12 θ1 + r22 θ2`, the pairing with the second reflection column.
pub fn gamma2(p: &ModelParams, t1: C, t2: C) -> C {
    p.r12() * t1 + p.r22() * t2
}

pub fn gamma_re(p: &ModelParams, t1: f64, t2: f64) -> f64 {
    0.5 * (p.s11() * t1 * t1 + p.s22() * t2 * t2 + 2.0 * p.s12() * t1 * t2) + p.mu1() * t1 + p.mu2() * t2
}

pub fn gamma1_re(p: &ModelParams, t1: f64, t2: f64) -> f64 {
    p.r11() * t1 + p.r21() * t2
}

pub fn gamma2_re(p: &ModelParams, t1: f64, t2: f64) -> f64 {
    p.r12() * t1 + p.r22() * t2
}

/// Magnitude of the terms of `γ` at a point, used to scale residual tolerances.
pub fn gamma_scale(p: &ModelParams, t1: C, t2: C) -> f64 {
    let (a1, a2) = (t1.norm(), t2.norm());
    0.5 * (p.s11() * a1 * a1 + p.s22() * a2 * a2 + 2.0 * p.s12().abs() * a1 * a2)
        + p.mu1().abs() * a1
        + p.mu2().abs() * a2
}

/// Leading coefficient `a = σ22/2` of `γ` as a polynomial in `θ2`.
pub fn coef_a(p: &ModelParams) -> f64 {
    0.5 * p.s22()
}

pub fn coef_b(p: &ModelParams, t1: C) -> C {
    p.s12() * t1 + p.mu2()
}

pub fn coef_c(p: &ModelParams, t1: C) -> C {
    0.5 * p.s11() * t1 * t1 + p.mu1() * t1
}

/// Leading coefficient `ã = σ11/2` of `γ` as a polynomial in `θ1`.
pub fn coef_a_tilde(p: &ModelParams) -> f64 {
    0.5 * p.s11()
}

pub fn coef_b_tilde(p: &ModelParams, t2: C) -> C {
    p.s12() * t2 + p.mu1()
}

pub fn coef_c_tilde(p: &ModelParams, t2: C) -> C {
    0.5 * p.s22() * t2 * t2 + p.mu2() * t2
}

/// `d(θ1) = b² − 4ac = θ1²(σ12² − σ11σ22) + 2θ1(μ2σ12 − μ1σ22) + μ2²`.
pub fn disc(p: &ModelParams, t1: C) -> C {
    let b = coef_b(p, t1);
    b * b - 4.0 * coef_a(p) * coef_c(p, t1)
}

/// `d̃(θ2)`, the discriminant in `θ1`.
pub fn disc_tilde(p: &ModelParams, t2: C) -> C {
    let b = coef_b_tilde(p, t2);
    b * b - 4.0 * coef_a_tilde(p) * coef_c_tilde(p, t2)
}

pub fn disc_re(p: &ModelParams, t1: f64) -> f64 {
    disc(p, C::new(t1, 0.0)).re
}

pub fn disc_tilde_re(p: &ModelParams, t2: f64) -> f64 {
    disc_tilde(p, C::new(t2, 0.0)).re
}

/// Zeros of the two discriminants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoints {
    pub theta1_minus: f64,
    pub theta1_plus: f64,
    pub theta2_minus: f64,
    pub theta2_plus: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn branch_points(p: &ModelParams) -> BranchPoints {
    let det = p.det_sigma();
    let h1 = p.mu2() * p.s12() - p.mu1() * p.s22();
    let h2 = p.mu1() * p.s12() - p.mu2() * p.s11();
    let d1 = h1 * h1 + p.mu2() * p.mu2() * det;
    let d2 = h2 * h2 + p.mu1() * p.mu1() * det;
    let (q1, q2) = (d1.sqrt(), d2.sqrt());
    // The minus root is evaluated as a product quotient to avoid cancellation.
    BranchPoints {
        theta1_plus: (h1 + q1) / det,
        theta1_minus: -p.mu2() * p.mu2() / (h1 + q1),
        theta2_plus: (h2 + q2) / det,
        theta2_minus: -p.mu1() * p.mu1() / (h2 + q2),
        d1,
        d2,
    }
}

fn order_roots(r1: C, r2: C) -> (C, C) {
    // Returned as (plus, minus); minus has the smaller real part, then the smaller imaginary part.
    let r1_is_minus = r1.re < r2.re || (r1.re == r2.re && r1.im <= r2.im);
    if r1_is_minus {
        (r2, r1)
    } else {
        (r1, r2)
    }
}

/// Roots `(Θ2⁺, Θ2⁻)` of `γ(θ1, ·) = 0`.
pub fn theta2_branches(p: &ModelParams, t1: C) -> (C, C) {
    let a = coef_a(p);
    let b = coef_b(p, t1);
    let sq = disc(p, t1).sqrt();
    quadratic_roots(a, b, coef_c(p, t1), sq)
}

/// Roots `(Θ1⁺, Θ1⁻)` of `γ(·, θ2) = 0`.
pub fn theta1_branches(p: &ModelParams, t2: C) -> (C, C) {
    let a = coef_a_tilde(p);
    let b = coef_b_tilde(p, t2);
    let sq = disc_tilde(p, t2).sqrt();
    quadratic_roots(a, b, coef_c_tilde(p, t2), sq)
}

fn quadratic_roots(a: f64, b: C, c: C, sq: C) -> (C, C) {
    // Pick the sign that avoids cancellation, recover the other root from the product.
    let q = if (b.conj() * sq).re >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    if q.norm() == 0.0 {
        let r = -b / (2.0 * a);
        return (r, r);
    }
    order_roots(q / a, c / q)
}

/// A real point of the ellipse `γ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsePoint {
    pub theta1: f64,
    pub theta2: f64,
}

impl EllipsePoint {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    /// `⟨θ | e_α⟩` with `e_α = (cos α, sin α)`.
    pub fn dot_dir(&self, alpha: f64) -> f64 {
        self.theta1 * alpha.cos() + self.theta2 * alpha.sin()
    }

    pub fn dist(&self, other: &EllipsePoint) -> f64 {
        (self.theta1 - other.theta1).hypot(self.theta2 - other.theta2)
    }

    pub fn to_complex(&self) -> (C, C) {
        (C::new(self.theta1, 0.0), C::new(self.theta2, 0.0))
    }
}

/// The named points of the ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPoints {
    pub s0: EllipsePoint,
    pub s0_prime: EllipsePoint,
    pub s0_second: EllipsePoint,
    pub s1_minus: EllipsePoint,
    pub s1_plus: EllipsePoint,
    pub s2_minus: EllipsePoint,
    pub s2_plus: EllipsePoint,
}

impl SpecialPoints {
    pub fn all(&self) -> [EllipsePoint; 7] {
        [self.s0, self.s0_prime, self.s0_second, self.s1_minus, self.s1_plus, self.s2_minus, self.s2_plus]
    }
}

pub fn special_points(p: &ModelParams) -> SpecialPoints {
    let bp = branch_points(p);
    let at1 = |t1: f64| EllipsePoint::new(t1, -(p.s12() * t1 + p.mu2()) / p.s22());
    let at2 = |t2: f64| EllipsePoint::new(-(p.s12() * t2 + p.mu1()) / p.s11(), t2);
    SpecialPoints {
        s0: EllipsePoint::new(0.0, 0.0),
        s0_prime: EllipsePoint::new(0.0, -2.0 * p.mu2() / p.s22()),
        s0_second: EllipsePoint::new(-2.0 * p.mu1() / p.s11(), 0.0),
        s1_minus: at1(bp.theta1_minus),
        s1_plus: at1(bp.theta1_plus),
        s2_minus: at2(bp.theta2_minus),
        s2_plus: at2(bp.theta2_plus),
    }
}

/// Slope `dθ2/dθ1` of the curve `γ = 0` at a real point, `None` where the tangent is vertical.
pub fn implicit_slope(p: &ModelParams, pt: &EllipsePoint) -> Option<f64> {
    let num = p.s11() * pt.theta1 + p.s12() * pt.theta2 + p.mu1();
    let den = p.s22() * pt.theta2 + p.s12() * pt.theta1 + p.mu2();
    let scale = p.s22() * pt.theta2.abs() + p.s12().abs() * pt.theta1.abs() + p.mu2().abs();
    if den.abs() <= 1e-12 * scale {
        None
    } else {
        Some(-num / den)
    }
}
