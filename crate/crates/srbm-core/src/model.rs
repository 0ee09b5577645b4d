//! SRBM parameters, existence and stability tests, and the cone-to-quadrant map.
//!
//! A semimartingale reflecting Brownian motion in the quarter plane is fixed by
//! a covariance `Σ`, a drift `μ` and a reflection matrix `R` whose columns
//! `R¹ = (r11, r21)` and `R² = (r12, r22)` are the push directions on the axes
//! `{x1 = 0}` and `{x2 = 0}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// 2×2 real matrix stored row-major: `m[i][j]` is the entry in row `i`, column `j`.
pub type Mat2 = [[f64; 2]; 2];

/// Real 2-vector.
pub type Vec2 = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("covariance is not symmetric: sigma12 = {0}, sigma21 = {1}")]
    NonSymmetric(f64, f64),
    #[error("covariance diagonal must be positive: sigma11 = {0}, sigma22 = {1}")]
    NonPositiveVariance(f64, f64),
    #[error("covariance is singular or indefinite: det = {0}")]
    SingularCovariance(f64),
    #[error("transform matrix is singular: det = {0}")]
    SingularTransform(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
}

/// Parameter triple `(Σ, μ, R)` of an SRBM in the quarter plane.
///
/// Construction enforces a symmetric positive-definite covariance. Drifts with a
/// non-negative coordinate are accepted; [`ModelParams::is_supported`] reports
/// whether the asymptotic analysis applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    sigma: Mat2,
    mu: Vec2,
    refl: Mat2,
}

impl ModelParams {
    pub fn new(sigma: Mat2, mu: Vec2, refl: Mat2) -> Result<Self, ModelError> {
        let names = [
            ("sigma11", sigma[0][0]),
            ("sigma12", sigma[0][1]),
            ("sigma21", sigma[1][0]),
            ("sigma22", sigma[1][1]),
            ("mu1", mu[0]),
            ("mu2", mu[1]),
            ("r11", refl[0][0]),
            ("r12", refl[0][1]),
            ("r21", refl[1][0]),
            ("r22", refl[1][1]),
        ];
        for (name, v) in names {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if sigma[0][1] != sigma[1][0] {
            return Err(ModelError::NonSymmetric(sigma[0][1], sigma[1][0]));
        }
        if sigma[0][0] <= 0.0 || sigma[1][1] <= 0.0 {
            return Err(ModelError::NonPositiveVariance(sigma[0][0], sigma[1][1]));
        }
        let det = det2(&sigma);
        if det <= 0.0 {
            return Err(ModelError::SingularCovariance(det));
        }
        Ok(Self { sigma, mu, refl })
    }

    /// Convenience constructor from the nine scalar entries.
    #[allow(clippy::too_many_arguments)]
    pub fn from_entries(
        sigma11: f64,
        sigma12: f64,
        sigma22: f64,
        mu1: f64,
        mu2: f64,
        r11: f64,
        r12: f64,
        r21: f64,
        r22: f64,
    ) -> Result<Self, ModelError> {
        Self::new([[sigma11, sigma12], [sigma12, sigma22]], [mu1, mu2], [[r11, r12], [r21, r22]])
    }

    pub fn sigma(&self) -> &Mat2 {
        &self.sigma
    }

    pub fn mu(&self) -> &Vec2 {
        &self.mu
    }

    pub fn refl(&self) -> &Mat2 {
        &self.refl
    }

    pub fn s11(&self) -> f64 {
        self.sigma[0][0]
    }

    pub fn s12(&self) -> f64 {
        self.sigma[0][1]
    }

    pub fn s22(&self) -> f64 {
        self.sigma[1][1]
    }

    pub fn mu1(&self) -> f64 {
        self.mu[0]
    }

    pub fn mu2(&self) -> f64 {
        self.mu[1]
    }

    pub fn r11(&self) -> f64 {
        self.refl[0][0]
    }

    pub fn r12(&self) -> f64 {
        self.refl[0][1]
    }

    pub fn r21(&self) -> f64 {
        self.refl[1][0]
    }

    pub fn r22(&self) -> f64 {
        self.refl[1][1]
    }

    pub fn det_sigma(&self) -> f64 {
        det2(&self.sigma)
    }

    pub fn det_refl(&self) -> f64 {
        det2(&self.refl)
    }

    /// Both drift coordinates strictly negative, the regime covered by the asymptotics.
    pub fn is_supported(&self) -> bool {
        self.mu[0] < 0.0 && self.mu[1] < 0.0
    }

    /// Parses the `key = value` parameter file format. See [`PARAM_KEYS`].
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut seen: BTreeMap<&'static str, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ModelError::Parse { line, msg: format!("expected `key = value`, found `{content}`") })?;
            let key = key.trim();
            let value = value.trim();
            let known = PARAM_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| ModelError::UnknownKey { line, key: key.to_string() })?;
            let v: f64 = value
                .parse()
                .map_err(|_| ModelError::Parse { line, msg: format!("`{value}` is not a decimal number") })?;
            if seen.insert(known, v).is_some() {
                return Err(ModelError::DuplicateKey { line, key: key.to_string() });
            }
        }
        let get = |k: &'static str| seen.get(k).copied().ok_or(ModelError::MissingKey(k));
        Self::from_entries(
            get("sigma11")?,
            get("sigma12")?,
            get("sigma22")?,
            get("mu1")?,
            get("mu2")?,
            get("r11")?,
            get("r12")?,
            get("r21")?,
            get("r22")?,
        )
    }

    /// Renders the parameters in the format accepted by [`ModelParams::parse`].
    pub fn to_param_file(&self) -> String {
        let v = [
            self.s11(),
            self.s12(),
            self.s22(),
            self.mu1(),
            self.mu2(),
            self.r11(),
            self.r12(),
            self.r21(),
            self.r22(),
        ];
        PARAM_KEYS.iter().zip(v).map(|(k, x)| format!("{k} = {x:?}\n")).collect()
    }
}

impl FromStr for ModelParams {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

/// Keys of the parameter file, each required exactly once.
pub const PARAM_KEYS: [&str; 9] = ["sigma11", "sigma12", "sigma22", "mu1", "mu2", "r11", "r12", "r21", "r22"];

/// Identifier of a clause in the existence and stability criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// `r11 > 0`
    R11Pos,
    /// `r22 > 0`
    R22Pos,
    /// `r11 r22 − r12 r21 > 0`
    DetRPos,
    /// `r22 μ1 − r12 μ2 < 0`
    DriftCond1,
    /// `r11 μ2 − r21 μ1 < 0`
    DriftCond2,
    /// `(r12 > 0 and r21 > 0)` or `det R > 0`
    ExistenceAlt,
}

impl Condition {
    pub fn id(&self) -> &'static str {
        match self {
            Condition::R11Pos => "r11_pos",
            Condition::R22Pos => "r22_pos",
            Condition::DetRPos => "detR_pos",
            Condition::DriftCond1 => "drift_cond_1",
            Condition::DriftCond2 => "drift_cond_2",
            Condition::ExistenceAlt => "existence_alt",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub exists: bool,
    pub stable: bool,
    pub violated: Vec<Condition>,
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exists={} stable={} violated=", self.exists, self.stable)?;
        if self.violated.is_empty() {
            return f.write_str("none");
        }
        let ids: Vec<&str> = self.violated.iter().map(Condition::id).collect();
        f.write_str(&ids.join(","))
    }
}

fn existence_clauses(p: &ModelParams) -> Vec<Condition> {
    let mut violated = Vec::new();
    if p.r11() <= 0.0 {
        violated.push(Condition::R11Pos);
    }
    if p.r22() <= 0.0 {
        violated.push(Condition::R22Pos);
    }
    let alt = (p.r12() > 0.0 && p.r21() > 0.0) || p.det_refl() > 0.0;
    if !alt {
        violated.push(Condition::ExistenceAlt);
    }
    violated
}

/// Existence of the process: `r11 > 0`, `r22 > 0` and either `r12, r21 > 0` or `det R > 0`.
/// The `stable` flag of the result is always `false`.
pub fn validate_existence(p: &ModelParams) -> StabilityReport {
    let violated = existence_clauses(p);
    StabilityReport { exists: violated.is_empty(), stable: false, violated }
}

/// Existence plus the five strict stability inequalities. `violated` lists every
/// failing clause, existence clauses included.
pub fn validate_stability(p: &ModelParams) -> StabilityReport {
    let existence = existence_clauses(p);
    let exists = existence.is_empty();
    let mut violated = existence;
    let det_ok = p.det_refl() > 0.0;
    let drift1 = p.r22() * p.mu1() - p.r12() * p.mu2() < 0.0;
    let drift2 = p.r11() * p.mu2() - p.r21() * p.mu1() < 0.0;
    if !det_ok {
        violated.push(Condition::DetRPos);
    }
    if !drift1 {
        violated.push(Condition::DriftCond1);
    }
    if !drift2 {
        violated.push(Condition::DriftCond2);
    }
    violated.sort();
    violated.dedup();
    let stable = p.r11() > 0.0 && p.r22() > 0.0 && det_ok && drift1 && drift2;
    StabilityReport { exists, stable: stable && exists, violated }
}

/// Maps an SRBM living in the cone `T⁻¹ ℝ₊²` to the quarter plane: `(TΣTᵀ, Tμ, TR)`.
pub fn transform_cone_to_quadrant(p: &ModelParams, t: &Mat2) -> Result<ModelParams, ModelError> {
    let det = det2(t);
    if det == 0.0 || !det.is_finite() {
        return Err(ModelError::SingularTransform(det));
    }
    let ts = matmul(t, &p.sigma);
    let mut sigma = matmul(&ts, &transpose(t));
    // Round-off can break exact symmetry.
    let off = 0.5 * (sigma[0][1] + sigma[1][0]);
    sigma[0][1] = off;
    sigma[1][0] = off;
    let mu = matvec(t, &p.mu);
    let refl = matmul(t, &p.refl);
    ModelParams::new(sigma, mu, refl)
}

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn matvec(a: &Mat2, v: &Vec2) -> Vec2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Inverse of a 2×2 matrix, `None` when singular.
pub fn inverse(a: &Mat2) -> Option<Mat2> {
    let d = det2(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some([[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]])
}
