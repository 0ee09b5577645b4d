//! Decay regimes of the stationary density along rays.
//!
//! Along the direction `e_α = (cos α, sin α)` the density decays like
//! `e^{−r·rate}` times either `r^{−1/2}` (saddle point) or a constant (a simple pole of
//! a boundary transform). The candidates are the saddle `θ(α)`, which maximizes
//! `⟨θ | e_α⟩` on the ellipse, and the poles generated from the zeros `θ*` of `γ1` and
//! `θ**` of `γ2` by the Galois automorphisms.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::boundary_transforms::{chain_pole_order, continuation_chain, TransformError, Which};
use crate::kernel::{self, EllipsePoint};
use crate::model::{inverse, validate_stability, ModelParams, StabilityReport};
use crate::surface::{angular_distance, wrap, Arc, End, SurfaceError, SurfaceGeometry, SurfacePoint};

/// Angular distance below which the saddle is taken to coincide with a pole.
pub const COINCIDENCE_TOL: f64 = 1e-7;
/// Default number of Galois rotations explored when enumerating poles.
pub const DEFAULT_MAX_DEPTH: usize = 16;
/// Number of ellipse samples used to cross-check the saddle point.
pub const SADDLE_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("direction angle {0} is outside (0, pi/2)")]
    AngleOutOfRange(f64),
    #[error("drift has a non-negative coordinate")]
    UnsupportedDrift,
    #[error("model is not stable: {0}")]
    UnstableModel(StabilityReport),
    #[error("saddle point coincides with the pole {0}")]
    SaddleIsPole(PoleSource),
    #[error("tangent is vertical at the branch point used by a threshold")]
    DerivativeAtBranchPoint,
    #[error("saddle point is not the maximizer (sampled {sampled}, computed {computed})")]
    InconsistentSaddle { sampled: f64, computed: f64 },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

fn check_model(p: &ModelParams) -> Result<(), AsymptoticsError> {
    if !p.is_supported() {
        return Err(AsymptoticsError::UnsupportedDrift);
    }
    let rep = validate_stability(p);
    if !rep.stable {
        return Err(AsymptoticsError::UnstableModel(rep));
    }
    Ok(())
}

fn check_angle(alpha: f64) -> Result<(), AsymptoticsError> {
    if alpha > 0.0 && alpha < FRAC_PI_2 {
        Ok(())
    } else {
        Err(AsymptoticsError::AngleOutOfRange(alpha))
    }
}

/// The saddle point `θ(α)` and the data of its Laplace expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleInfo {
    pub alpha: f64,
    pub point: EllipsePoint,
    /// Circle angle of the saddle's preimage.
    pub angle: f64,
    pub rate: f64,
    /// `|g''|` at the saddle, where `g(τ) = ⟨θ(e^{iτ}) | e_α⟩`.
    pub fpp: f64,
}

impl SaddleInfo {
    pub fn s(&self) -> SurfacePoint {
        SurfacePoint::on_circle(self.angle)
    }
}

/// Closed-form maximizer `Σ⁻¹(λe_α − μ)` with `λ = √(⟨μ,Σ⁻¹μ⟩ / ⟨e_α,Σ⁻¹e_α⟩)`.
fn lagrange_point(p: &ModelParams, alpha: f64) -> EllipsePoint {
    let si = inverse(p.sigma()).expect("covariance is invertible");
    let e = [alpha.cos(), alpha.sin()];
    let mu = p.mu();
    let quad = |v: &[f64; 2]| v[0] * (si[0][0] * v[0] + si[0][1] * v[1]) + v[1] * (si[1][0] * v[0] + si[1][1] * v[1]);
    let lambda = (quad(mu) / quad(&e)).sqrt();
    let w = [lambda * e[0] - mu[0], lambda * e[1] - mu[1]];
    EllipsePoint::new(si[0][0] * w[0] + si[0][1] * w[1], si[1][0] * w[0] + si[1][1] * w[1])
}

/// Maximizer of `⟨θ | e_α⟩` found by sampling `n` circle angles and refining the best
/// bracket by golden-section search.
pub fn brute_force_saddle(p: &ModelParams, alpha: f64, n: usize) -> EllipsePoint {
    let g = SurfaceGeometry::new(p);
    let f = |t: f64| g.circle_point(t).dot_dir(alpha);
    let step = TAU / n as f64;
    let best = (0..n).map(|k| k as f64 * step).max_by(|a, b| f(*a).total_cmp(&f(*b))).expect("n > 0");
    let (mut lo, mut hi) = (best - step, best + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    while hi - lo > 1e-13 {
        if f(x1) < f(x2) {
            lo = x1;
            x1 = x2;
            x2 = lo + ratio * (hi - lo);
        } else {
            hi = x2;
            x2 = x1;
            x1 = hi - ratio * (hi - lo);
        }
    }
    g.circle_point(0.5 * (lo + hi))
}

pub fn saddle_point(p: &ModelParams, alpha: f64) -> Result<SaddleInfo, AsymptoticsError> {
    check_angle(alpha)?;
    let g = SurfaceGeometry::new(p);
    let point = lagrange_point(p, alpha);
    let angle = g.ellipse_angle(&point)?;
    let rate = point.dot_dir(alpha);
    let centre = EllipsePoint::new(g.m1, g.m2).dot_dir(alpha);
    let fpp = (rate - centre).abs();

    let step = TAU / SADDLE_SAMPLES as f64;
    let sampled =
        (0..SADDLE_SAMPLES).map(|k| g.circle_point(k as f64 * step).dot_dir(alpha)).fold(f64::NEG_INFINITY, f64::max);
    if sampled > rate + 1e-9 * (1.0 + rate.abs()) {
        return Err(AsymptoticsError::InconsistentSaddle { sampled, computed: rate });
    }
    Ok(SaddleInfo { alpha, point, angle, rate, fpp })
}

/// Second intersection of the line through the origin along `v` with the ellipse.
fn ray_intersection(p: &ModelParams, v: [f64; 2]) -> EllipsePoint {
    let q = p.s11() * v[0] * v[0] + 2.0 * p.s12() * v[0] * v[1] + p.s22() * v[1] * v[1];
    let k = -2.0 * (p.mu1() * v[0] + p.mu2() * v[1]) / q;
    EllipsePoint::new(k * v[0], k * v[1])
}

/// Non-zero points `θ*` (zero of `γ1`) and `θ**` (zero of `γ2`) of the ellipse.
pub fn pole_zeros(p: &ModelParams) -> (EllipsePoint, EllipsePoint) {
    let star = ray_intersection(p, [p.r21(), -p.r11()]);
    let star2 = ray_intersection(p, [p.r22(), -p.r12()]);
    (star, star2)
}

/// `ηθ*` (same `θ2` as `θ*`) and `ζθ**` (same `θ1` as `θ**`), via root sums.
pub fn galois_images(p: &ModelParams, star: &EllipsePoint, star2: &EllipsePoint) -> (EllipsePoint, EllipsePoint) {
    let eta_star = EllipsePoint::new(-2.0 * (p.s12() * star.theta2 + p.mu1()) / p.s11() - star.theta1, star.theta2);
    let zeta_star2 =
        EllipsePoint::new(star2.theta1, -2.0 * (p.s12() * star2.theta1 + p.mu2()) / p.s22() - star2.theta2);
    (eta_star, zeta_star2)
}

/// Which zero a pole candidate descends from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleSource {
    ThetaStar,
    ThetaStarStar,
}

impl fmt::Display for PoleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoleSource::ThetaStar => "theta*",
            PoleSource::ThetaStarStar => "theta**",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleCandidate {
    pub point: EllipsePoint,
    pub angle: f64,
    pub source: PoleSource,
    pub orbit_depth: usize,
    pub owner: Which,
    /// Pole order; `None` when several denominators vanish and the order is not resolved.
    pub order: Option<u32>,
}

impl PoleCandidate {
    pub fn rate(&self, alpha: f64) -> f64 {
        self.point.dot_dir(alpha)
    }

    pub fn s(&self) -> SurfacePoint {
        SurfacePoint::on_circle(self.angle)
    }
}

/// Named points on the circle used by the classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleGeometry {
    pub star: EllipsePoint,
    pub star2: EllipsePoint,
    pub eta_star: EllipsePoint,
    pub zeta_star2: EllipsePoint,
    pub t_star: f64,
    pub t_star2: f64,
    pub t_eta_star: f64,
    pub t_zeta_star2: f64,
    pub t_origin: f64,
    pub t_s0_prime: f64,
    pub t_s0_second: f64,
}

pub fn pole_geometry(p: &ModelParams) -> Result<PoleGeometry, AsymptoticsError> {
    let g = SurfaceGeometry::new(p);
    let (star, star2) = pole_zeros(p);
    let (eta_star, zeta_star2) = galois_images(p, &star, &star2);
    let sp = kernel::special_points(p);
    Ok(PoleGeometry {
        star,
        star2,
        eta_star,
        zeta_star2,
        t_star: g.ellipse_angle(&star)?,
        t_star2: g.ellipse_angle(&star2)?,
        t_eta_star: g.ellipse_angle(&eta_star)?,
        t_zeta_star2: g.ellipse_angle(&zeta_star2)?,
        t_origin: g.origin_angle(),
        t_s0_prime: g.ellipse_angle(&sp.s0_prime)?,
        t_s0_second: g.ellipse_angle(&sp.s0_second)?,
    })
}

/// Pole candidates of `φ2` (first list) and `φ1` (second list) strictly between the
/// saddle and `s0'` (resp. `s0''`) on the arc avoiding the origin.
pub fn enumerate_poles(
    p: &ModelParams,
    alpha: f64,
    max_depth: usize,
) -> Result<(Vec<PoleCandidate>, Vec<PoleCandidate>), AsymptoticsError> {
    check_model(p)?;
    let saddle = saddle_point(p, alpha)?;
    let pg = pole_geometry(p)?;
    if angular_distance(saddle.angle, pg.t_zeta_star2) < COINCIDENCE_TOL {
        return Err(AsymptoticsError::SaddleIsPole(PoleSource::ThetaStarStar));
    }
    if angular_distance(saddle.angle, pg.t_eta_star) < COINCIDENCE_TOL {
        return Err(AsymptoticsError::SaddleIsPole(PoleSource::ThetaStar));
    }
    let g = SurfaceGeometry::new(p);
    let rot = 2.0 * g.beta;

    let mut phi2 = Vec::new();
    walk(&g, pg.t_zeta_star2, -rot, 0, max_depth, Which::Phi2, PoleSource::ThetaStarStar, &mut phi2)?;
    walk(&g, wrap(pg.t_star - rot), -rot, 1, max_depth, Which::Phi2, PoleSource::ThetaStar, &mut phi2)?;
    let mut phi1 = Vec::new();
    walk(&g, pg.t_eta_star, rot, 0, max_depth, Which::Phi1, PoleSource::ThetaStar, &mut phi1)?;
    walk(&g, wrap(pg.t_star2 + rot), rot, 1, max_depth, Which::Phi1, PoleSource::ThetaStarStar, &mut phi1)?;

    let arc2 = Arc::avoiding(saddle.angle, pg.t_s0_prime, End::Open, End::Open, pg.t_origin);
    let arc1 = Arc::avoiding(saddle.angle, pg.t_s0_second, End::Open, End::Open, pg.t_origin);
    let mut keep2 = Vec::new();
    for c in phi2 {
        if arc2.contains_angle(c.angle)? {
            keep2.push(c);
        }
    }
    let mut keep1 = Vec::new();
    for c in phi1 {
        if arc1.contains_angle(c.angle)? {
            keep1.push(c);
        }
    }
    Ok((keep2, keep1))
}

#[allow(clippy::too_many_arguments)]
fn walk(
    g: &SurfaceGeometry,
    start: f64,
    rot: f64,
    first_depth: usize,
    max_depth: usize,
    owner: Which,
    source: PoleSource,
    out: &mut Vec<PoleCandidate>,
) -> Result<(), AsymptoticsError> {
    let mut t = start;
    for depth in first_depth..=max_depth {
        let on_half = match owner {
            Which::Phi2 => g.in_phi2_half(t),
            Which::Phi1 => g.in_phi1_half(t),
        };
        if !on_half {
            break;
        }
        let point = g.circle_point(t);
        let analytic = match owner {
            Which::Phi2 => point.theta1 <= 0.0,
            Which::Phi1 => point.theta2 <= 0.0,
        };
        if analytic {
            break;
        }
        let chain = continuation_chain(g, SurfacePoint::on_circle(t), owner)?;
        let (net, dens) = chain_pole_order(g, &chain);
        if net > 0 {
            let order = if dens <= 1 { Some(net as u32) } else { None };
            out.push(PoleCandidate { point, angle: t, source, orbit_depth: depth, owner, order });
        }
        t = wrap(t + rot);
    }
    Ok(())
}

fn is_pole(g: &SurfaceGeometry, t: f64, owner: Which) -> Result<bool, AsymptoticsError> {
    let chain = continuation_chain(g, SurfacePoint::on_circle(t), owner)?;
    Ok(chain_pole_order(g, &chain).0 > 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SaddleDominated,
    PoleZetaThetaStarStar,
    PoleEtaThetaStar,
    TwoPoles,
    Untreated,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::SaddleDominated => "SaddleDominated",
            Regime::PoleZetaThetaStarStar => "PoleZetaThetaStarStar",
            Regime::PoleEtaThetaStar => "PoleEtaThetaStar",
            Regime::TwoPoles => "TwoPoles",
            Regime::Untreated => "Untreated",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Critical angles where the regime changes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Thresholds {
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta0: Option<f64>,
}

impl Thresholds {
    pub fn all(&self) -> Vec<(&'static str, f64)> {
        [("alpha1", self.alpha1), ("alpha2", self.alpha2), ("beta0", self.beta0)]
            .into_iter()
            .filter_map(|(n, v)| v.map(|x| (n, x)))
            .collect()
    }
}

/// Threshold angles from the signs of `γ2(s1⁺)`, `γ1(s2⁺)`, the relative position of
/// `ζθ**` and `ηθ*`, and the tangent slopes of the ellipse at those points.
pub fn angle_thresholds(p: &ModelParams) -> Result<Thresholds, AsymptoticsError> {
    check_model(p)?;
    let sp = kernel::special_points(p);
    let g21 = kernel::gamma2_re(p, sp.s1_plus.theta1, sp.s1_plus.theta2);
    let g12 = kernel::gamma1_re(p, sp.s2_plus.theta1, sp.s2_plus.theta2);
    let (star, star2) = pole_zeros(p);
    let (b, a) = galois_images(p, &star, &star2);

    // Tangent slopes at the upper-branch points over θ1** and θ2*.
    let a_starstar = || -> Result<f64, AsymptoticsError> {
        let pt = if star2.theta2 >= a.theta2 { star2 } else { a };
        kernel::implicit_slope(p, &pt).ok_or(AsymptoticsError::DerivativeAtBranchPoint)
    };
    let a_star = || -> Result<f64, AsymptoticsError> {
        let pt = if star.theta1 >= b.theta1 { star } else { b };
        let num = p.s22() * pt.theta2 + p.s12() * pt.theta1 + p.mu2();
        let den = p.s11() * pt.theta1 + p.s12() * pt.theta2 + p.mu1();
        let scale = p.s11() * pt.theta1.abs() + p.s12().abs() * pt.theta2.abs() + p.mu1().abs();
        if den.abs() <= 1e-12 * scale {
            Err(AsymptoticsError::DerivativeAtBranchPoint)
        } else {
            Ok(-num / den)
        }
    };
    let alpha1_from = |s: f64| (s < 0.0).then(|| (-1.0 / s).atan());
    let alpha2_from = |s: f64| (s < 0.0).then(|| (-s).atan());

    let mut th = Thresholds::default();
    if g21 > 0.0 && g12 <= 0.0 {
        th.alpha1 = alpha1_from(a_starstar()?);
    } else if g21 < 0.0 && g12 >= 0.0 {
        th.alpha2 = alpha2_from(a_star()?);
    } else if g21 > 0.0 && g12 > 0.0 {
        let (da1, da2) = (a.theta1 - b.theta1, a.theta2 - b.theta2);
        let eps = 1e-12 * (1.0 + a.theta1.abs().max(a.theta2.abs()));
        let le = |x: f64| x <= eps;
        let ge = |x: f64| x >= -eps;
        let same = da1.abs() <= eps && da2.abs() <= eps;
        if same || (ge(da1) && le(da2)) {
            th.alpha1 = alpha1_from(a_starstar()?);
            th.alpha2 = alpha2_from(a_star()?);
        } else if le(da1) && ge(da2) {
            th.beta0 = Some((b.theta1 - a.theta1).atan2(a.theta2 - b.theta2));
        }
    }
    Ok(th)
}

/// Outcome of the classification at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub alpha: f64,
    pub regime: Regime,
    pub rate: f64,
    /// Exponent of the power of `r` in front of the exponential; `None` when untreated.
    pub prefactor_exponent: Option<f64>,
    pub dominant_points: Vec<EllipsePoint>,
    pub saddle: SaddleInfo,
    pub thresholds: Option<Thresholds>,
    pub candidates_phi2: Vec<PoleCandidate>,
    pub candidates_phi1: Vec<PoleCandidate>,
    pub diagnostics: Vec<String>,
}

pub fn classify(p: &ModelParams, alpha: f64) -> Result<DecayReport, AsymptoticsError> {
    classify_with_depth(p, alpha, DEFAULT_MAX_DEPTH)
}

pub fn classify_with_depth(p: &ModelParams, alpha: f64, max_depth: usize) -> Result<DecayReport, AsymptoticsError> {
    check_model(p)?;
    check_angle(alpha)?;
    let saddle = saddle_point(p, alpha)?;
    let pg = pole_geometry(p)?;
    let thresholds = angle_thresholds(p).ok();
    let mut diagnostics = Vec::new();

    let (cand2, cand1) = match enumerate_poles(p, alpha, max_depth) {
        Ok(c) => c,
        Err(AsymptoticsError::SaddleIsPole(src)) => {
            diagnostics.push(format!("saddle coincides with the pole from {src}"));
            let dominant = match src {
                PoleSource::ThetaStarStar => pg.zeta_star2,
                PoleSource::ThetaStar => pg.eta_star,
            };
            return Ok(DecayReport {
                alpha,
                regime: Regime::Untreated,
                rate: saddle.rate,
                prefactor_exponent: None,
                dominant_points: vec![dominant],
                saddle,
                thresholds,
                candidates_phi2: Vec::new(),
                candidates_phi1: Vec::new(),
                diagnostics,
            });
        }
        Err(e) => return Err(e),
    };

    let arc_a = Arc::avoiding(saddle.angle, pg.t_s0_prime, End::Open, End::Closed, pg.t_origin);
    let arc_b = Arc::avoiding(pg.t_s0_second, saddle.angle, End::Closed, End::Open, pg.t_origin);
    // A point on the arc only counts when the continued transform really has a pole there.
    let g = SurfaceGeometry::new(p);
    let in_a = arc_a.contains_angle(pg.t_zeta_star2)? && is_pole(&g, pg.t_zeta_star2, Which::Phi2)?;
    let in_b = arc_b.contains_angle(pg.t_eta_star)? && is_pole(&g, pg.t_eta_star, Which::Phi1)?;
    let rate_a = pg.zeta_star2.dot_dir(alpha);
    let rate_b = pg.eta_star.dot_dir(alpha);

    let (regime, theorem_rate, dominant) = match (in_a, in_b) {
        (false, false) => (Regime::SaddleDominated, saddle.rate, vec![saddle.point]),
        (true, false) => (Regime::PoleZetaThetaStarStar, rate_a, vec![pg.zeta_star2]),
        (false, true) => (Regime::PoleEtaThetaStar, rate_b, vec![pg.eta_star]),
        (true, true) => {
            let tie = (rate_a - rate_b).abs() <= 1e-9 * rate_a.abs().max(rate_b.abs());
            if tie {
                (Regime::TwoPoles, rate_a.min(rate_b), vec![pg.zeta_star2, pg.eta_star])
            } else if rate_a < rate_b {
                (Regime::PoleZetaThetaStarStar, rate_a, vec![pg.zeta_star2])
            } else {
                (Regime::PoleEtaThetaStar, rate_b, vec![pg.eta_star])
            }
        }
    };

    let candidate_min = cand2.iter().chain(cand1.iter()).map(|c| c.rate(alpha)).fold(saddle.rate, f64::min);
    if (candidate_min - theorem_rate).abs() > 1e-9 * theorem_rate.abs().max(1.0) {
        diagnostics.push(format!("candidate minimum {candidate_min} differs from the predicted rate {theorem_rate}"));
    }
    let prefactor_exponent = Some(if regime == Regime::SaddleDominated { -0.5 } else { 0.0 });

    Ok(DecayReport {
        alpha,
        regime,
        rate: candidate_min.min(theorem_rate),
        prefactor_exponent,
        dominant_points: dominant,
        saddle,
        thresholds,
        candidates_phi2: cand2,
        candidates_phi1: cand1,
        diagnostics,
    })
}

/// Sweep grid `α_k = kπ/(2(n+1))`, `k = 1..=n`, strictly inside `(0, π/2)`.
pub fn sweep_angles(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 * FRAC_PI_2 / (n as f64 + 1.0)).collect()
}

/// Classification at every sweep angle, computed in parallel.
pub fn sweep(p: &ModelParams, n: usize) -> Result<Vec<DecayReport>, AsymptoticsError> {
    check_model(p)?;
    sweep_angles(n).into_par_iter().map(|a| classify(p, a)).collect()
}
