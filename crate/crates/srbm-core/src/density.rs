//! Stationary density by numerical Laplace inversion, and the constants of the
//! leading asymptotic terms.
//!
//! The density splits as `π(x) = I1(x) + I2(x)` with
//!
//! ```text
//! I1(x) = (1/2π) ∫ φ2(θ1) γ2(θ1, Θ2⁺(θ1)) e^{−x1θ1 − x2Θ2⁺(θ1)} / √d(θ1) dy,   θ1 = u1 + iy,
//! ```
//!
//! and `I2` the mirror image with the roles of the coordinates exchanged.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::asymptotics::{self, AsymptoticsError, PoleCandidate, Regime};
use crate::boundary_transforms::{
    owned_coord, phi_at_real, residue_at, BoundaryTransform, ProductFormModel, TransformError, Which,
};
use crate::kernel;
use crate::model::ModelParams;
use crate::surface::SurfaceGeometry;

type C = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("point ({0}, {1}) is not in the open quadrant")]
    InvalidPoint(f64, f64),
    #[error("square root branch is discontinuous on the contour at y = {0}")]
    BranchDiscontinuity(f64),
    #[error("imaginary part {imag:e} of the inversion exceeds the tolerance (real part {real:e})")]
    QuadratureInconsistent { imag: f64, real: f64 },
    #[error("quadrature did not converge with {panels} panels (relative change {change:e})")]
    NotConverged { panels: usize, change: f64 },
    #[error("negative density {0:e}")]
    NegativeDensity(f64),
    #[error("contour abscissa {0} is outside the strip between the branch points")]
    AbscissaOutOfStrip(f64),
    #[error("leading constant needs the saddle regime, found {0}")]
    WrongRegime(Regime),
    #[error("boundary transforms are not available for this model")]
    ConstantUnavailable,
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Real parts of the two inversion contours.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Abscissa {
    /// `Re θ1 = Re θ2 = 0`.
    #[default]
    Axis,
    Fixed(f64, f64),
    /// Shifted towards the saddle point of the ray through `x`, kept left of the
    /// abscissae of the evaluators.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Half-length of the contours; `None` picks it from the decay of the integrands.
    pub truncation: Option<f64>,
    pub nodes_per_panel: usize,
    pub initial_panels: usize,
    pub max_panels: usize,
    /// Relative change between successive panel doublings at which refinement stops.
    pub tolerance: f64,
    pub abscissa: Abscissa,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            truncation: None,
            nodes_per_panel: 64,
            initial_panels: 8,
            max_panels: 1 << 15,
            tolerance: 1e-10,
            abscissa: Abscissa::Axis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    pub imag_residual: f64,
    pub panels: (usize, usize),
    pub abscissa: (f64, f64),
    pub truncation: (f64, f64),
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

struct LineIntegral {
    value: C,
    panels: usize,
    abs_mass: f64,
}

/// Composite Gauss–Legendre on `[−t, t]`, doubling the panel count until successive
/// estimates agree.
fn integrate_line<F>(f: F, t: f64, spec: &QuadratureSpec) -> Result<LineIntegral, DensityError>
where
    F: Fn(f64) -> Result<C, DensityError>,
{
    let (gx, gw) = gauss_legendre(spec.nodes_per_panel);
    let eval = |panels: usize| -> Result<(C, f64), DensityError> {
        let h = 2.0 * t / panels as f64;
        let mut sum = C::new(0.0, 0.0);
        let mut mass = 0.0;
        for k in 0..panels {
            let mid = -t + (k as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                let v = f(mid + 0.5 * h * x)? * (0.5 * h * w);
                mass += v.norm();
                sum += v;
            }
        }
        Ok((sum, mass))
    };
    let mut panels = spec.initial_panels.max(1);
    let (mut prev, _) = eval(panels)?;
    loop {
        let next_panels = panels * 2;
        let (cur, mass) = eval(next_panels)?;
        let change = (cur - prev).norm();
        let floor = 64.0 * f64::EPSILON * mass;
        if change <= spec.tolerance * cur.norm() + floor {
            return Ok(LineIntegral { value: cur, panels: next_panels, abs_mass: mass });
        }
        if next_panels >= spec.max_panels {
            return Err(DensityError::NotConverged {
                panels: next_panels,
                change: change / cur.norm().max(f64::MIN_POSITIVE),
            });
        }
        prev = cur;
        panels = next_panels;
    }
}

fn strip_margin(lo: f64, hi: f64) -> f64 {
    0.05 * (hi - lo)
}

/// Abscissae used by [`Abscissa::Auto`] for the ray through `x`.
pub fn auto_abscissa(p: &ModelParams, x: [f64; 2], bt: &dyn BoundaryTransform) -> Result<(f64, f64), DensityError> {
    let bp = kernel::branch_points(p);
    let alpha = x[1].atan2(x[0]);
    let sad = asymptotics::saddle_point(p, alpha)?;
    let m1 = strip_margin(bp.theta1_minus, bp.theta1_plus);
    let m2 = strip_margin(bp.theta2_minus, bp.theta2_plus);
    let u1 = sad.point.theta1.min(bt.phi2_abscissa() - m1).clamp(bp.theta1_minus + m1, bp.theta1_plus - m1);
    let u2 = sad.point.theta2.min(bt.phi1_abscissa() - m2).clamp(bp.theta2_minus + m2, bp.theta2_plus - m2);
    Ok((u1, u2))
}

pub fn density_eval(
    p: &ModelParams,
    x: [f64; 2],
    bt: &dyn BoundaryTransform,
    spec: &QuadratureSpec,
) -> Result<DensityValue, DensityError> {
    if !(x[0] > 0.0 && x[1] > 0.0 && x[0].is_finite() && x[1].is_finite()) {
        return Err(DensityError::InvalidPoint(x[0], x[1]));
    }
    let bp = kernel::branch_points(p);
    let (u1, u2) = match spec.abscissa {
        Abscissa::Axis => (0.0, 0.0),
        Abscissa::Fixed(a, b) => (a, b),
        Abscissa::Auto => auto_abscissa(p, x, bt)?,
    };
    if !(u1 > bp.theta1_minus && u1 < bp.theta1_plus) {
        return Err(DensityError::AbscissaOutOfStrip(u1));
    }
    if !(u2 > bp.theta2_minus && u2 < bp.theta2_plus) {
        return Err(DensityError::AbscissaOutOfStrip(u2));
    }
    let det = p.det_sigma();
    let base = 40.0 * (1.0 / x[0]).max(1.0 / x[1]);
    let (t1, t2) = match spec.truncation {
        Some(t) => (t, t),
        None => (base.max(36.0 * p.s22() / (det.sqrt() * x[1])), base.max(36.0 * p.s11() / (det.sqrt() * x[0]))),
    };

    let f1 = |y: f64| -> Result<C, DensityError> {
        let th1 = C::new(u1, y);
        let d = kernel::disc(p, th1);
        if !(d.re > 0.0) {
            return Err(DensityError::BranchDiscontinuity(y));
        }
        let (th2, _) = kernel::theta2_branches(p, th1);
        let e = (-x[0] * th1 - x[1] * th2).exp();
        Ok(bt.phi2(th1) * kernel::gamma2(p, th1, th2) * e / d.sqrt())
    };
    let f2 = |y: f64| -> Result<C, DensityError> {
        let th2 = C::new(u2, y);
        let d = kernel::disc_tilde(p, th2);
        if !(d.re > 0.0) {
            return Err(DensityError::BranchDiscontinuity(y));
        }
        let (th1, _) = kernel::theta1_branches(p, th2);
        let e = (-x[0] * th1 - x[1] * th2).exp();
        Ok(bt.phi1(th2) * kernel::gamma1(p, th1, th2) * e / d.sqrt())
    };
    let i1 = integrate_line(f1, t1, spec)?;
    let i2 = integrate_line(f2, t2, spec)?;
    let total = (i1.value + i2.value) / (2.0 * PI);
    let floor = 64.0 * f64::EPSILON * (i1.abs_mass + i2.abs_mass) / (2.0 * PI);
    let allowed = 100.0 * (spec.tolerance * total.re.abs() + floor);
    if total.im.abs() > allowed {
        return Err(DensityError::QuadratureInconsistent { imag: total.im, real: total.re });
    }
    let value = if total.re < 0.0 {
        if total.re > -1e-12 {
            0.0
        } else {
            return Err(DensityError::NegativeDensity(total.re));
        }
    } else {
        total.re
    };
    Ok(DensityValue {
        value,
        imag_residual: total.im,
        panels: (i1.panels, i2.panels),
        abscissa: (u1, u2),
        truncation: (t1, t2),
    })
}

/// The two terms of the saddle-point constant, from `φ2` and from `φ1`.
pub fn leading_coefficient_parts(
    p: &ModelParams,
    alpha: f64,
    bt: Option<&dyn BoundaryTransform>,
) -> Result<(f64, f64), DensityError> {
    let report = asymptotics::classify(p, alpha)?;
    if report.regime != Regime::SaddleDominated {
        return Err(DensityError::WrongRegime(report.regime));
    }
    let bt = bt.ok_or(DensityError::ConstantUnavailable)?;
    let g = SurfaceGeometry::new(p);
    let s = report.saddle;
    let pt = s.point;
    let f2 = phi_at_real(&g, pt.theta1, bt, Which::Phi2)?.re;
    let f1 = phi_at_real(&g, pt.theta2, bt, Which::Phi1)?.re;
    let norm = (2.0 * PI * p.det_sigma()).sqrt() * s.fpp.sqrt();
    let a = f2 * kernel::gamma2_re(p, pt.theta1, pt.theta2) / norm;
    let b = f1 * kernel::gamma1_re(p, pt.theta1, pt.theta2) / norm;
    Ok((a, b))
}

/// Constant `c⁰` with `π(r e_α) ~ c⁰ r^{−1/2} e^{−r·rate}` in the saddle regime.
pub fn leading_coefficient(
    p: &ModelParams,
    alpha: f64,
    bt: Option<&dyn BoundaryTransform>,
) -> Result<f64, DensityError> {
    let (a, b) = leading_coefficient_parts(p, alpha, bt)?;
    Ok(a + b)
}

/// Pole contribution `−res · γ(p) / √d · e^{−r⟨p | e_α⟩}` of one candidate.
pub fn residue_term(
    p: &ModelParams,
    cand: &PoleCandidate,
    alpha: f64,
    r: f64,
    bt: &dyn BoundaryTransform,
) -> Result<f64, DensityError> {
    let g = SurfaceGeometry::new(p);
    let coord = owned_coord(&cand.point, cand.owner);
    let res = residue_at(&g, coord, bt, cand.owner)?;
    let pt = cand.point;
    let (gam, d) = match cand.owner {
        Which::Phi2 => (kernel::gamma2_re(p, pt.theta1, pt.theta2), kernel::disc_re(p, pt.theta1)),
        Which::Phi1 => (kernel::gamma1_re(p, pt.theta1, pt.theta2), kernel::disc_tilde_re(p, pt.theta2)),
    };
    Ok(-res.re * gam / d.sqrt() * (-r * cand.rate(alpha)).exp())
}

/// Residual of `γφ + γ1φ1 + γ2φ2 = 0` at a point, with the size of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalResidual {
    pub residual: f64,
    pub scale: f64,
}

pub fn functional_equation_residual(p: &ModelParams, t1: C, t2: C, pf: &ProductFormModel) -> FunctionalResidual {
    let a = kernel::gamma(p, t1, t2) * pf.phi(t1, t2);
    let b = kernel::gamma1(p, t1, t2) * pf.phi1(t2);
    let c = kernel::gamma2(p, t1, t2) * pf.phi2(t1);
    FunctionalResidual { residual: (a + b + c).norm(), scale: a.norm() + b.norm() + c.norm() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_transforms::fit_product_form;

    fn unit() -> ModelParams {
        ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(64);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for k in [2usize, 10, 60, 126] {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            assert!((s - 2.0 / (k as f64 + 1.0)).abs() < 1e-13, "k={k}");
        }
        let (x5, _) = gauss_legendre(5);
        assert!((x5[4] - 0.906_179_845_938_664).abs() < 1e-14);
    }

    #[test]
    fn product_form_density() {
        let p = unit();
        let pf = fit_product_form(&p).unwrap();
        for x in [[0.5, 0.5], [1.0, 0.3], [0.8, 2.0]] {
            let v = density_eval(&p, x, &pf, &QuadratureSpec::default()).unwrap();
            let exact = pf.density(x[0], x[1]);
            assert!((v.value - exact).abs() < 1e-8 * exact, "{x:?}: {} vs {exact}", v.value);
        }
    }

    #[test]
    fn shifted_contour_agrees() {
        let p = ModelParams::from_entries(1.0, 0.5, 2.0, -1.0, -1.5, 1.0, 0.25, 0.5, 1.0).unwrap();
        let pf = fit_product_form(&p).unwrap();
        let x = [3.0, 2.0];
        let spec = QuadratureSpec { abscissa: Abscissa::Auto, ..Default::default() };
        let v = density_eval(&p, x, &pf, &spec).unwrap();
        let exact = pf.density(x[0], x[1]);
        assert!((v.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let p = unit();
        let pf = fit_product_form(&p).unwrap();
        let err = density_eval(&p, [0.0, 1.0], &pf, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, DensityError::InvalidPoint(..)));
    }

    #[test]
    fn functional_equation_holds() {
        let p = unit();
        let pf = fit_product_form(&p).unwrap();
        let r = functional_equation_residual(&p, C::new(-0.3, 0.4), C::new(-1.1, -0.2), &pf);
        assert!(r.residual < 1e-12 * r.scale);
        let r0 = functional_equation_residual(&p, C::new(0.0, 0.0), C::new(0.0, 0.0), &pf);
        assert_eq!(r0.residual, 0.0);
    }
}
