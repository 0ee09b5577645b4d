//! Boundary Laplace transforms `φ1(θ2)`, `φ2(θ1)` and their meromorphic continuation.
//!
//! On the surface `γ = 0` the transforms satisfy `γ1(s)φ1(s) + γ2(s)φ2(s) = 0`, with
//! `φ2` invariant under `ζ` and `φ1` invariant under `η`. Chaining the two relations gives
//!
//! ```text
//! φ2(s) = ρ(ζs) / ρ(ηζs) · φ2(ηζs),     φ1(s) = ρ(ζηs) / ρ(ηs) · φ1(ζηs),
//! ```
//!
//! where `ρ = γ1/γ2`. Iterating pulls a point back until it reaches the initial
//! domain `{Re θ1 ≤ 0} ∪ {Re θ2 ≤ 0}`, where the given evaluator applies.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{self, EllipsePoint};
use crate::model::ModelParams;
use crate::surface::{SurfaceGeometry, SurfacePoint};

type C = Complex64;

/// Slack on the initial-domain test `Re θ ≤ 0`.
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Maximal number of rotations in a continuation chain.
pub const MAX_ROTATIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("continuation did not reach the initial domain within {0} rotations")]
    ContinuationDiverged(usize),
    #[error("evaluation at a pole: {0}")]
    PoleHit(String),
    #[error("residue extrapolation unstable (relative spread {0:e})")]
    ResidueUnstable(f64),
    #[error("point at infinity of the surface")]
    AtInfinity,
}

/// Which boundary transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Phi1,
    Phi2,
}

/// Evaluator pair for the boundary transforms.
///
/// `phi2` must be valid for `Re θ1 ≤ 0` and `phi1` for `Re θ2 ≤ 0`. The abscissae bound
/// the half-planes `Re θ < abscissa` on which each evaluator is analytic.
pub trait BoundaryTransform: Send + Sync {
    fn phi1(&self, theta2: C) -> C;
    fn phi2(&self, theta1: C) -> C;
    fn phi1_abscissa(&self) -> f64;
    fn phi2_abscissa(&self) -> f64;
    /// True when the evaluators are closed forms valid as meromorphic functions on
    /// the whole plane, so that no continuation is needed.
    fn is_global(&self) -> bool {
        false
    }
}

/// Rational pair `φ1(θ2) = c1/(κ2 − θ2)`, `φ2(θ1) = c2/(κ1 − θ1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTransform {
    pub kappa: [f64; 2],
    pub c1: f64,
    pub c2: f64,
}

impl BoundaryTransform for RationalTransform {
    fn phi1(&self, theta2: C) -> C {
        self.c1 / (self.kappa[1] - theta2)
    }

    fn phi2(&self, theta1: C) -> C {
        self.c2 / (self.kappa[0] - theta1)
    }

    fn phi1_abscissa(&self) -> f64 {
        self.kappa[1]
    }

    fn phi2_abscissa(&self) -> f64 {
        self.kappa[0]
    }

    fn is_global(&self) -> bool {
        true
    }
}

/// Constant pair `φ1 ≡ c1`, `φ2 ≡ c2`: entire, with no singularity of its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantTransform {
    pub c1: f64,
    pub c2: f64,
}

impl BoundaryTransform for ConstantTransform {
    fn phi1(&self, _theta2: C) -> C {
        C::new(self.c1, 0.0)
    }

    fn phi2(&self, _theta1: C) -> C {
        C::new(self.c2, 0.0)
    }

    fn phi1_abscissa(&self) -> f64 {
        f64::INFINITY
    }

    fn phi2_abscissa(&self) -> f64 {
        f64::INFINITY
    }

    fn is_global(&self) -> bool {
        true
    }
}

/// Exponential product-form solution: density `η1η2 e^{−⟨η,x⟩}`, transform
/// `φ(θ) = C/((η1−θ1)(η2−θ2))`, `φ1(θ2) = c1/(η2−θ2)`, `φ2(θ1) = c2/(η1−θ1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductFormModel {
    pub eta: [f64; 2],
    pub cap_c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ProductFormModel {
    pub fn phi(&self, t1: C, t2: C) -> C {
        self.cap_c / ((self.eta[0] - t1) * (self.eta[1] - t2))
    }

    /// The stationary density `η1η2 e^{−η1x1−η2x2}`.
    pub fn density(&self, x1: f64, x2: f64) -> f64 {
        self.eta[0] * self.eta[1] * (-self.eta[0] * x1 - self.eta[1] * x2).exp()
    }

    pub fn as_rational(&self) -> RationalTransform {
        RationalTransform { kappa: self.eta, c1: self.c1, c2: self.c2 }
    }
}

impl BoundaryTransform for ProductFormModel {
    fn phi1(&self, theta2: C) -> C {
        self.c1 / (self.eta[1] - theta2)
    }

    fn phi2(&self, theta1: C) -> C {
        self.c2 / (self.eta[0] - theta1)
    }

    fn phi1_abscissa(&self) -> f64 {
        self.eta[1]
    }

    fn phi2_abscissa(&self) -> f64 {
        self.eta[0]
    }

    fn is_global(&self) -> bool {
        true
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
#[error("parameters are not of product form (coefficient residual {residual:e})")]
pub struct NotProductForm {
    pub residual: f64,
}

/// Solves the coefficient identity
/// `−C·γ(θ) = c1 γ1(θ)(η1 − θ1) + c2 γ2(θ)(η2 − θ2)` for `(η, c1, c2)` with `C = η1η2`.
pub fn fit_product_form(p: &ModelParams) -> Result<ProductFormModel, NotProductForm> {
    // Solve with C = 1, then rescale; the c's are linear in C and η does not depend on it.
    let c1 = p.s11() / (2.0 * p.r11());
    let c2 = p.s22() / (2.0 * p.r22());
    let m = [[c1 * p.r11(), c2 * p.r12()], [c1 * p.r21(), c2 * p.r22()]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let fail = NotProductForm { residual: f64::INFINITY };
    if !c1.is_finite() || !c2.is_finite() || det == 0.0 || !det.is_finite() {
        return Err(fail);
    }
    let rhs = [-p.mu1(), -p.mu2()];
    let eta1 = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let eta2 = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
    let eqs = [
        c1 * p.r11() - 0.5 * p.s11(),
        c2 * p.r22() - 0.5 * p.s22(),
        c1 * p.r21() + c2 * p.r12() - p.s12(),
        c1 * p.r11() * eta1 + c2 * p.r12() * eta2 + p.mu1(),
        c1 * p.r21() * eta1 + c2 * p.r22() * eta2 + p.mu2(),
    ];
    let scale = [p.s11(), p.s22(), p.s12().abs(), p.mu1().abs(), p.mu2().abs()].into_iter().fold(0.0f64, f64::max);
    let residual = eqs.iter().fold(0.0f64, |acc, e| acc.max(e.abs())) / scale;
    if !(residual < 1e-9) || !(eta1 > 0.0) || !(eta2 > 0.0) {
        return Err(NotProductForm { residual });
    }
    let cap_c = eta1 * eta2;
    Ok(ProductFormModel { eta: [eta1, eta2], cap_c, c1: c1 * cap_c, c2: c2 * cap_c })
}

/// One factor `ρ(x)^exponent` of a continuation product, with `ρ = γ1/γ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioFactor {
    pub at: SurfacePoint,
    pub exponent: i32,
}

/// Symbolic continuation of one boundary transform at a point:
/// `sign · Π ρ(x)^e · base`, where `base` is an evaluator call inside the initial domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationChain {
    pub factors: Vec<RatioFactor>,
    pub sign: f64,
    pub base_which: Which,
    pub base_at: SurfacePoint,
    pub rotations: usize,
}

fn in_domain(geom: &SurfaceGeometry, s: SurfacePoint, which: Which) -> Result<bool, TransformError> {
    let (t1, t2) = geom.coords(s).ok_or(TransformError::AtInfinity)?;
    Ok(match which {
        Which::Phi1 => t1.re <= DOMAIN_SLACK,
        Which::Phi2 => t2.re <= DOMAIN_SLACK,
    })
}

/// Builds the continuation chain for `which` at `s`.
pub fn continuation_chain(
    geom: &SurfaceGeometry,
    s: SurfacePoint,
    which: Which,
) -> Result<ContinuationChain, TransformError> {
    let mut factors = Vec::new();
    let mut cur = s;
    for rotations in 0..=MAX_ROTATIONS {
        let (t1, t2) = geom.coords(cur).ok_or(TransformError::AtInfinity)?;
        let (own, other) = match which {
            Which::Phi2 => (t1.re, t2.re),
            Which::Phi1 => (t2.re, t1.re),
        };
        let base = |factors: Vec<RatioFactor>, sign, base_which, base_at| ContinuationChain {
            factors,
            sign,
            base_which,
            base_at,
            rotations,
        };
        if own <= DOMAIN_SLACK {
            return Ok(base(factors, 1.0, which, cur));
        }
        // Swap to the other transform through γ1φ1 + γ2φ2 = 0.
        let (mirror, e, other_which) = match which {
            Which::Phi2 => (geom.zeta(cur), 1, Which::Phi1),
            Which::Phi1 => (geom.eta(cur), -1, Which::Phi2),
        };
        if other <= DOMAIN_SLACK {
            factors.push(RatioFactor { at: cur, exponent: e });
            return Ok(base(factors, -1.0, other_which, cur));
        }
        if in_domain(geom, mirror, which)? {
            factors.push(RatioFactor { at: mirror, exponent: e });
            return Ok(base(factors, -1.0, other_which, mirror));
        }
        if rotations == MAX_ROTATIONS {
            break;
        }
        let next = match which {
            Which::Phi2 => geom.eta(geom.zeta(cur)),
            Which::Phi1 => geom.zeta(geom.eta(cur)),
        };
        factors.push(RatioFactor { at: mirror, exponent: e });
        factors.push(RatioFactor { at: next, exponent: -e });
        cur = next;
    }
    Err(TransformError::ContinuationDiverged(MAX_ROTATIONS))
}

/// Value of `γ1/γ2` at the origin of the curve, taken along the tangent there.
pub fn ratio_at_origin(p: &ModelParams) -> f64 {
    (p.r11() * p.mu2() - p.r21() * p.mu1()) / (p.r12() * p.mu2() - p.r22() * p.mu1())
}

/// True when a surface point is the origin `θ = (0, 0)` of the curve.
pub fn is_origin(geom: &SurfaceGeometry, s: SurfacePoint) -> bool {
    match geom.coords(s) {
        Some((t1, t2)) => {
            let scale = 1.0 + geom.rho1.max(geom.rho2);
            t1.norm() < 1e-9 * scale && t2.norm() < 1e-9 * scale
        }
        None => false,
    }
}

/// Orders of vanishing of `γ1` and `γ2` at a point: 1 when the form is zero there.
fn zero_flags(geom: &SurfaceGeometry, s: SurfacePoint) -> (bool, bool, C, C) {
    let p = geom.params();
    let (t1, t2) = geom.coords(s).expect("finite chain point");
    let g1 = kernel::gamma1(p, t1, t2);
    let g2 = kernel::gamma2(p, t1, t2);
    let scale =
        (1.0 + t1.norm() + t2.norm()) * [p.r11(), p.r12(), p.r21(), p.r22()].iter().fold(0.0f64, |a, r| a.max(r.abs()));
    (g1.norm() < 1e-9 * scale, g2.norm() < 1e-9 * scale, g1, g2)
}

/// Net pole order of a chain and the number of vanishing denominators, ignoring origin pairs.
pub fn chain_pole_order(geom: &SurfaceGeometry, chain: &ContinuationChain) -> (i32, usize) {
    let mut order = 0;
    let mut vanishing_den = 0;
    for f in &chain.factors {
        if is_origin(geom, f.at) {
            continue;
        }
        let (z1, z2, _, _) = zero_flags(geom, f.at);
        // ρ^e with ρ = γ1/γ2: a zero of γ1 is a zero of order e, a zero of γ2 a pole of order e.
        let (num_zero, den_zero) = if f.exponent > 0 { (z1, z2) } else { (z2, z1) };
        if den_zero {
            order += 1;
            vanishing_den += 1;
        }
        if num_zero {
            order -= 1;
        }
    }
    (order, vanishing_den)
}

fn eval_chain(
    geom: &SurfaceGeometry,
    chain: &ContinuationChain,
    bt: &dyn BoundaryTransform,
) -> Result<C, TransformError> {
    let p = geom.params();
    let mut value = C::new(chain.sign, 0.0);
    for f in &chain.factors {
        let ratio = if is_origin(geom, f.at) {
            C::new(ratio_at_origin(p), 0.0)
        } else {
            let (_, _, g1, g2) = zero_flags(geom, f.at);
            let (num, den) = if f.exponent > 0 { (g1, g2) } else { (g2, g1) };
            if den.norm() == 0.0 {
                return Err(TransformError::PoleHit(format!(
                    "{} vanishes at s = {:?}",
                    if f.exponent > 0 { "gamma2" } else { "gamma1" },
                    f.at
                )));
            }
            return_ratio(num, den)
        };
        value *= ratio;
    }
    let (t1, t2) = geom.coords(chain.base_at).ok_or(TransformError::AtInfinity)?;
    let base = match chain.base_which {
        Which::Phi1 => bt.phi1(t2),
        Which::Phi2 => bt.phi2(t1),
    };
    let v = value * base;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(TransformError::PoleHit(format!("non-finite value at s = {:?}", chain.base_at)));
    }
    Ok(v)
}

fn return_ratio(num: C, den: C) -> C {
    num / den
}

/// `φ1` or `φ2` at a surface point, continued meromorphically from the initial domain.
pub fn continuation_value(
    geom: &SurfaceGeometry,
    s: SurfacePoint,
    bt: &dyn BoundaryTransform,
    which: Which,
) -> Result<C, TransformError> {
    let chain = continuation_chain(geom, s, which)?;
    eval_chain(geom, &chain, bt)
}

/// `φ2` as a function of `θ1` (or `φ1` of `θ2`) at a real point of `[θ⁻, θ⁺]`, using the
/// closed form of a global evaluator and continuation otherwise.
pub fn phi_at_real(
    geom: &SurfaceGeometry,
    coord: f64,
    bt: &dyn BoundaryTransform,
    which: Which,
) -> Result<C, TransformError> {
    if bt.is_global() {
        let z = C::new(coord, 0.0);
        return Ok(match which {
            Which::Phi1 => bt.phi1(z),
            Which::Phi2 => bt.phi2(z),
        });
    }
    let t = match which {
        Which::Phi2 => ((coord - geom.m1) / geom.rho1).clamp(-1.0, 1.0).acos(),
        Which::Phi1 => geom.beta - ((coord - geom.m2) / geom.rho2).clamp(-1.0, 1.0).acos(),
    };
    continuation_value(geom, SurfacePoint::on_circle(t), bt, which)
}

/// First-order residue of `φ2(θ1)` (or `φ1(θ2)`) at the coordinate `coord`, by
/// Richardson extrapolation of `(θ − coord)φ(θ)` over four halving offsets.
pub fn residue_at(
    geom: &SurfaceGeometry,
    coord: f64,
    bt: &dyn BoundaryTransform,
    which: Which,
) -> Result<C, TransformError> {
    let (lo, hi) = match which {
        Which::Phi2 => (geom.m1 - geom.rho1, geom.m1 + geom.rho1),
        Which::Phi1 => (geom.m2 - geom.rho2, geom.m2 + geom.rho2),
    };
    let room = (coord - lo).min(hi - coord);
    let h0 = (1e-2 * (hi - lo)).min(0.25 * room);
    if !(h0 > 0.0) {
        return Err(TransformError::ResidueUnstable(f64::INFINITY));
    }
    let g = |h: f64| -> Result<C, TransformError> {
        let up = phi_at_real(geom, coord + h, bt, which)? * h;
        let down = phi_at_real(geom, coord - h, bt, which)? * (-h);
        Ok(0.5 * (up + down))
    };
    let levels = 4;
    let mut table: Vec<Vec<C>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let mut row = vec![g(h0 / f64::powi(2.0, k as i32))?];
        for j in 1..=k {
            let f = f64::powi(4.0, j as i32);
            let prev = table[k - 1][j - 1];
            let v = row[j - 1] + (row[j - 1] - prev) / (f - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    let best = table[levels - 1][levels - 1];
    let second = table[levels - 1][levels - 2];
    let spread = if best.norm() > 0.0 { (best - second).norm() / best.norm() } else { (best - second).norm() };
    if !(spread < 1e-6) {
        return Err(TransformError::ResidueUnstable(spread));
    }
    Ok(best)
}

/// `γ1(s)φ1(s) + γ2(s)φ2(s)` at a surface point, zero for a consistent pair.
pub fn boundary_relation(
    geom: &SurfaceGeometry,
    s: SurfacePoint,
    bt: &dyn BoundaryTransform,
) -> Result<C, TransformError> {
    let p = geom.params();
    let (t1, t2) = geom.coords(s).ok_or(TransformError::AtInfinity)?;
    let f1 = continuation_value(geom, s, bt, Which::Phi1)?;
    let f2 = continuation_value(geom, s, bt, Which::Phi2)?;
    Ok(kernel::gamma1(p, t1, t2) * f1 + kernel::gamma2(p, t1, t2) * f2)
}

/// Coordinate of an ellipse point relevant to a transform: `θ1` for `φ2`, `θ2` for `φ1`.
pub fn owned_coord(pt: &EllipsePoint, which: Which) -> f64 {
    match which {
        Which::Phi2 => pt.theta1,
        Which::Phi1 => pt.theta2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> ModelParams {
        ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap()
    }

    fn skew_pf() -> ModelParams {
        ModelParams::from_entries(1.0, 0.5, 2.0, -1.0, -1.5, 1.0, 0.25, 0.5, 1.0).unwrap()
    }

    #[test]
    fn fit_identity_model() {
        let pf = fit_product_form(&unit()).unwrap();
        assert!((pf.eta[0] - 2.0).abs() < 1e-14 && (pf.eta[1] - 2.0).abs() < 1e-14);
        assert!((pf.cap_c - 4.0).abs() < 1e-13);
        assert!((pf.c1 - 2.0).abs() < 1e-13 && (pf.c2 - 2.0).abs() < 1e-13);
        assert!((pf.phi(C::new(0.0, 0.0), C::new(0.0, 0.0)).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fit_rejects_mixed_reflection() {
        let p = ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, -0.5, -0.5, 1.0).unwrap();
        let err = fit_product_form(&p).unwrap_err();
        assert!(err.residual > 1e-3);
    }

    #[test]
    fn orthogonal_reflection_rates() {
        let p = ModelParams::from_entries(2.5, 0.0, 0.7, -0.8, -0.3, 1.3, 0.0, 0.0, 0.6).unwrap();
        let pf = fit_product_form(&p).unwrap();
        assert!((pf.eta[0] - 2.0 * 0.8 / 2.5).abs() < 1e-14);
        assert!((pf.eta[1] - 2.0 * 0.3 / 0.7).abs() < 1e-14);
    }

    #[test]
    fn identity_inside_domain() {
        let p = unit();
        let g = SurfaceGeometry::new(&p);
        let pf = fit_product_form(&p).unwrap();
        // θ1 = −0.2 on the circle.
        let t = ((-0.2 - g.m1) / g.rho1).acos();
        let s = SurfacePoint::on_circle(t);
        let chain = continuation_chain(&g, s, Which::Phi2).unwrap();
        assert!(chain.factors.is_empty());
        let v = continuation_value(&g, s, &pf, Which::Phi2).unwrap();
        assert!((v - pf.phi2(C::new(-0.2, 0.0))).norm() < 1e-14);
    }

    #[test]
    fn continuation_matches_closed_form() {
        for p in [unit(), skew_pf()] {
            let g = SurfaceGeometry::new(&p);
            let pf = fit_product_form(&p).unwrap();
            for k in 0..100 {
                let t = -PI + 2.0 * PI * (k as f64 + 0.5) / 100.0;
                let s = SurfacePoint::on_circle(t);
                let (t1, t2) = g.coords(s).unwrap();
                for which in [Which::Phi1, Which::Phi2] {
                    let exact = match which {
                        Which::Phi1 => pf.phi1(t2),
                        Which::Phi2 => pf.phi2(t1),
                    };
                    if !exact.norm().is_finite() || exact.norm() > 1e6 {
                        continue;
                    }
                    let v = continuation_value(&g, s, &pf, which).unwrap();
                    assert!((v - exact).norm() < 1e-8 * (1.0 + exact.norm()), "t={t} {which:?}: {v} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn continuation_off_circle() {
        let p = skew_pf();
        let g = SurfaceGeometry::new(&p);
        let pf = fit_product_form(&p).unwrap();
        for k in 0..40 {
            let z = C::from_polar(0.7 + 0.02 * k as f64, 0.3 + 0.13 * k as f64);
            let s = SurfacePoint::Finite(z);
            let (t1, t2) = g.coords(s).unwrap();
            let v2 = continuation_value(&g, s, &pf, Which::Phi2).unwrap();
            let v1 = continuation_value(&g, s, &pf, Which::Phi1).unwrap();
            assert!((v2 - pf.phi2(t1)).norm() < 1e-8 * (1.0 + v2.norm()));
            assert!((v1 - pf.phi1(t2)).norm() < 1e-8 * (1.0 + v1.norm()));
        }
    }

    #[test]
    fn boundary_relation_vanishes() {
        let p = skew_pf();
        let g = SurfaceGeometry::new(&p);
        let pf = fit_product_form(&p).unwrap();
        for k in 0..50 {
            let s = SurfacePoint::on_circle(-3.0 + 0.12 * k as f64);
            let r = boundary_relation(&g, s, &pf).unwrap();
            assert!(r.norm() < 1e-8, "{r}");
        }
    }

    #[test]
    fn residue_examples() {
        let p = unit();
        let g = SurfaceGeometry::new(&p);
        let pf = fit_product_form(&p).unwrap();
        let r = residue_at(&g, 2.0, &pf, Which::Phi2).unwrap();
        assert!((r.re + pf.c2).abs() < 1e-10 && r.im.abs() < 1e-12);

        let scaled = RationalTransform { kappa: pf.eta, c1: 3.0 * pf.c1, c2: 3.0 * pf.c2 };
        let r3 = residue_at(&g, 2.0, &scaled, Which::Phi2).unwrap();
        assert!((r3 - 3.0 * r).norm() < 1e-10);
    }

    #[test]
    fn residue_through_continuation() {
        // A non-global wrapper forces the continuation route.
        struct Local(ProductFormModel);
        impl BoundaryTransform for Local {
            fn phi1(&self, t: C) -> C {
                self.0.phi1(t)
            }
            fn phi2(&self, t: C) -> C {
                self.0.phi2(t)
            }
            fn phi1_abscissa(&self) -> f64 {
                self.0.eta[1]
            }
            fn phi2_abscissa(&self) -> f64 {
                self.0.eta[0]
            }
        }
        let p = unit();
        let g = SurfaceGeometry::new(&p);
        let pf = fit_product_form(&p).unwrap();
        let r = residue_at(&g, 2.0, &Local(pf), Which::Phi2).unwrap();
        assert!((r.re + pf.c2).abs() < 1e-8);
    }
}
