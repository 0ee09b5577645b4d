//! Euler simulation of the reflected process with an exact complementarity projection.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{validate_existence, validate_stability, Mat2, ModelParams, StabilityReport, Vec2};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("model is not stable: {0}")]
    UnstableModel(StabilityReport),
    #[error("reflection matrix admits no complementarity solution for Y = ({0}, {1})")]
    ReflectionInfeasible(f64, f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    /// Recorded time summed over all replicas, burn-in excluded.
    pub total_time: f64,
    /// Discarded time at the start of each replica, on top of `total_time`.
    pub burn_in: f64,
    pub seed: u64,
    pub cell: f64,
    pub extent: f64,
    pub replicas: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { dt: 1e-3, total_time: 1e4, burn_in: 10.0, seed: 20_240_601, cell: 0.05, extent: 8.0, replicas: 4 }
    }
}

impl SimConfig {
    fn validate(&self, p: &ModelParams) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return bad("total time must be positive");
        }
        if !(self.burn_in >= 0.0 && self.burn_in.is_finite()) {
            return bad("burn-in must be non-negative");
        }
        if !(self.cell > 0.0 && self.extent > self.cell) {
            return bad("grid needs a positive cell width below the extent");
        }
        if self.replicas == 0 {
            return bad("at least one replica is needed");
        }
        if self.total_time < self.dt * self.replicas as f64 {
            return bad("total time must cover at least one step per replica");
        }
        let scale = [p.s11() / (p.mu1() * p.mu1()), p.s22() / (p.mu2() * p.mu2())]
            .into_iter()
            .filter(|s| s.is_finite())
            .fold(f64::INFINITY, f64::min);
        if scale.is_finite() && self.dt > 1e-2 * scale {
            return bad("step exceeds 1% of the model time scale");
        }
        Ok(())
    }
}

/// Projects `y` onto the quadrant along the reflection columns: `z = y + R·dl`,
/// `z, dl ≥ 0`, `z_i·dl_i = 0`. Among feasible cases the smallest `dl1 + dl2` wins.
pub fn reflect_step(y: Vec2, r: &Mat2) -> Result<(Vec2, Vec2), SimError> {
    if y[0] >= 0.0 && y[1] >= 0.0 {
        return Ok((y, [0.0, 0.0]));
    }
    let mut best: Option<(Vec2, Vec2)> = None;
    let mut consider = |z: Vec2, dl: Vec2| {
        if z[0] >= 0.0 && z[1] >= 0.0 && dl[0] >= 0.0 && dl[1] >= 0.0 {
            let better = match &best {
                None => true,
                Some((_, b)) => dl[0] + dl[1] < b[0] + b[1],
            };
            if better {
                best = Some((z, dl));
            }
        }
    };
    // Face 1: z1 = 0, push along the first column.
    let l1 = -y[0] / r[0][0];
    consider([0.0, y[1] + r[1][0] * l1], [l1, 0.0]);
    // Face 2: z2 = 0, push along the second column.
    let l2 = -y[1] / r[1][1];
    consider([y[0] + r[0][1] * l2, 0.0], [0.0, l2]);
    // Corner: R·dl = −y.
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    if det != 0.0 {
        let c1 = (-y[0] * r[1][1] + y[1] * r[0][1]) / det;
        let c2 = (-y[1] * r[0][0] + y[0] * r[1][0]) / det;
        consider([0.0, 0.0], [c1, c2]);
    }
    best.ok_or(SimError::ReflectionInfeasible(y[0], y[1]))
}

/// Occupation counts on a square grid `[0, extent)²`, with local-time totals.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationHistogram {
    pub cell: f64,
    pub n: usize,
    pub dt: f64,
    pub counts: Vec<u64>,
    pub overflow: u64,
    pub samples: u64,
    /// Accumulated `dL` on each face.
    pub local_time: [f64; 2],
    /// Time integral of each coordinate, for empirical means.
    pub coord_sum: [f64; 2],
}

impl OccupationHistogram {
    fn empty(cell: f64, extent: f64, dt: f64) -> Self {
        let n = (extent / cell).ceil() as usize;
        Self { cell, n, dt, counts: vec![0; n * n], overflow: 0, samples: 0, local_time: [0.0; 2], coord_sum: [0.0; 2] }
    }

    fn merge(mut self, other: &Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        self.samples += other.samples;
        for k in 0..2 {
            self.local_time[k] += other.local_time[k];
            self.coord_sum[k] += other.coord_sum[k];
        }
        self
    }

    pub fn total_time(&self) -> f64 {
        self.samples as f64 * self.dt
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n + j]
    }

    /// Empirical density in cell `(i, j)`: occupation fraction over cell area.
    pub fn density(&self, i: usize, j: usize) -> f64 {
        self.count(i, j) as f64 / (self.samples as f64 * self.cell * self.cell)
    }

    pub fn cell_of(&self, x: Vec2) -> Option<(usize, usize)> {
        let i = (x[0] / self.cell).floor();
        let j = (x[1] / self.cell).floor();
        (i >= 0.0 && j >= 0.0 && (i as usize) < self.n && (j as usize) < self.n).then_some((i as usize, j as usize))
    }

    pub fn mean(&self) -> Vec2 {
        let n = self.samples as f64;
        [self.coord_sum[0] / n, self.coord_sum[1] / n]
    }

    /// Local time per unit time on each face.
    pub fn local_time_rate(&self) -> Vec2 {
        let t = self.total_time();
        [self.local_time[0] / t, self.local_time[1] / t]
    }

    /// Fraction of time with `x1 > a`, from whole cells (exact when `a` is a cell edge).
    pub fn tail_fraction_x1(&self, a: f64) -> f64 {
        let start = (a / self.cell).round() as usize;
        let mut c = 0u64;
        for i in start.min(self.n)..self.n {
            for j in 0..self.n {
                c += self.count(i, j);
            }
        }
        c as f64 / self.samples as f64
    }

    /// Columns `x1_center,x2_center,density`, one row per non-empty cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x1_center,x2_center,density")?;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.count(i, j) > 0 {
                    let c = |k: usize| (k as f64 + 0.5) * self.cell;
                    writeln!(w, "{},{},{:e}", c(i), c(j), self.density(i, j))?;
                }
            }
        }
        Ok(())
    }

    /// Columns `face,local_time,rate` for the two faces.
    pub fn write_local_time_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "face,local_time,rate")?;
        let rate = self.local_time_rate();
        for (k, (l, r)) in self.local_time.iter().zip(rate).enumerate() {
            writeln!(w, "{},{l:e},{r:e}", k + 1)?;
        }
        Ok(())
    }
}

fn cholesky(s: &Mat2) -> Mat2 {
    let l11 = s[0][0].sqrt();
    let l21 = s[1][0] / l11;
    let l22 = (s[1][1] - l21 * l21).sqrt();
    [[l11, 0.0], [l21, l22]]
}

fn run_replica(
    p: &ModelParams,
    cfg: &SimConfig,
    index: usize,
    steps: u64,
    burn: u64,
) -> Result<OccupationHistogram, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let l = cholesky(p.sigma());
    let sq = cfg.dt.sqrt();
    let drift = [p.mu1() * cfg.dt, p.mu2() * cfg.dt];
    let r = *p.refl();
    let mut hist = OccupationHistogram::empty(cfg.cell, cfg.extent, cfg.dt);
    let inv_cell = 1.0 / cfg.cell;
    let n = hist.n;
    let mut z = [0.0f64; 2];
    for step in 0..burn + steps {
        let n1: f64 = rng.sample(StandardNormal);
        let n2: f64 = rng.sample(StandardNormal);
        let y = [z[0] + drift[0] + sq * l[0][0] * n1, z[1] + drift[1] + sq * (l[1][0] * n1 + l[1][1] * n2)];
        let (nz, dl) = reflect_step(y, &r)?;
        z = nz;
        if step < burn {
            continue;
        }
        hist.local_time[0] += dl[0];
        hist.local_time[1] += dl[1];
        hist.coord_sum[0] += z[0];
        hist.coord_sum[1] += z[1];
        hist.samples += 1;
        let i = (z[0] * inv_cell) as usize;
        let j = (z[1] * inv_cell) as usize;
        if i < n && j < n {
            hist.counts[i * n + j] += 1;
        } else {
            hist.overflow += 1;
        }
    }
    Ok(hist)
}

/// Runs `replicas` independent paths on disjoint streams of one seed and merges them.
pub fn run(p: &ModelParams, cfg: &SimConfig) -> Result<OccupationHistogram, SimError> {
    if !validate_existence(p).exists {
        return Err(SimError::UnstableModel(validate_existence(p)));
    }
    let rep = validate_stability(p);
    if !rep.stable {
        return Err(SimError::UnstableModel(rep));
    }
    cfg.validate(p)?;
    let steps = (cfg.total_time / cfg.dt / cfg.replicas as f64).round() as u64;
    let burn = (cfg.burn_in / cfg.dt).round() as u64;
    let parts: Vec<OccupationHistogram> =
        (0..cfg.replicas).into_par_iter().map(|k| run_replica(p, cfg, k, steps, burn)).collect::<Result<_, _>>()?;
    // Sequential merge in replica order keeps the float accumulators bit-reproducible.
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one replica");
    Ok(it.fold(first, |acc, h| acc.merge(&h)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayRate {
    pub rate: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares slope of `−log density` against `r` along `e_α` over `[r_lo, r_hi]`.
pub fn estimate_ray_rate(hist: &OccupationHistogram, alpha: f64, window: [f64; 2]) -> Result<RayRate, SimError> {
    estimate_ray_rate_corrected(hist, alpha, window, 0.0)
}

/// As [`estimate_ray_rate`], fitting `−log density + κ log r` to remove a power prefactor
/// `r^κ` (use `κ = −1/2` in the saddle regime).
pub fn estimate_ray_rate_corrected(
    hist: &OccupationHistogram,
    alpha: f64,
    window: [f64; 2],
    kappa: f64,
) -> Result<RayRate, SimError> {
    let [lo, hi] = window;
    let extent = hist.n as f64 * hist.cell;
    if !(lo > 0.0 && hi > lo && hi < extent) {
        return Err(SimError::InsufficientData(format!("window [{lo}, {hi}] is not inside (0, {extent})")));
    }
    let dir = [alpha.cos(), alpha.sin()];
    let at = |r: f64| [r * dir[0], r * dir[1]];
    match hist.cell_of(at(lo)) {
        Some((i, j)) if hist.count(i, j) >= 30 => {}
        _ => return Err(SimError::InsufficientData(format!("fewer than 30 counts at r = {lo}"))),
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut r = lo;
    while r <= hi + 1e-12 {
        if let Some(logd) = log_density_bilinear(hist, at(r)) {
            xs.push(r);
            ys.push(-logd + kappa * r.ln());
        }
        r += hist.cell;
    }
    if xs.len() < 3 {
        return Err(SimError::InsufficientData(format!("{} usable points in the window", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(RayRate { rate: slope, stderr, points: xs.len() })
}

/// Bilinear interpolation of `log density` between the four surrounding cell centres.
fn log_density_bilinear(hist: &OccupationHistogram, x: Vec2) -> Option<f64> {
    let fi = (x[0] / hist.cell - 0.5).max(0.0);
    let fj = (x[1] / hist.cell - 0.5).max(0.0);
    let (i0, j0) = (fi.floor() as usize, fj.floor() as usize);
    if i0 + 1 >= hist.n || j0 + 1 >= hist.n {
        return None;
    }
    let (tx, ty) = (fi - i0 as f64, fj - j0 as f64);
    let mut acc = 0.0;
    for (di, wi) in [(0, 1.0 - tx), (1, tx)] {
        for (dj, wj) in [(0, 1.0 - ty), (1, ty)] {
            let c = hist.count(i0 + di, j0 + dj);
            if c == 0 {
                return None;
            }
            acc += wi * wj * hist.density(i0 + di, j0 + dj).ln();
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ID: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

    #[test]
    fn interior_point_is_unchanged() {
        let (z, dl) = reflect_step([0.4, 0.7], &[[1.0, 0.3], [-0.2, 1.0]]).unwrap();
        assert_eq!(z, [0.4, 0.7]);
        assert_eq!(dl, [0.0, 0.0]);
    }

    #[test]
    fn face_push() {
        let (z, dl) = reflect_step([-0.3, 0.5], &ID).unwrap();
        assert_eq!(z, [0.0, 0.5]);
        assert_eq!(dl, [0.3, 0.0]);
    }

    #[test]
    fn corner_solve() {
        let r = [[1.0, -0.5], [-0.5, 1.0]];
        let (z, dl) = reflect_step([-0.2, -0.1], &r).unwrap();
        assert_eq!(z, [0.0, 0.0]);
        // Oracle: (R⁻¹)(0.2, 0.1) with R⁻¹ = (4/3)[[1, 0.5], [0.5, 1]].
        assert!((dl[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((dl[1] - 4.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn small_run_is_deterministic() {
        let p = ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let cfg = SimConfig { total_time: 50.0, burn_in: 1.0, ..Default::default() };
        let a = run(&p, &cfg).unwrap();
        let b = run(&p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples, 4 * 12_500);
    }

    #[test]
    fn unstable_model_is_refused() {
        let p = ModelParams::from_entries(1.0, 0.0, 1.0, 1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert!(matches!(run(&p, &SimConfig::default()), Err(SimError::UnstableModel(_))));
    }

    #[test]
    fn single_cell_window_is_rejected() {
        let p = ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let cfg = SimConfig { total_time: 200.0, burn_in: 1.0, ..Default::default() };
        let h = run(&p, &cfg).unwrap();
        let err = estimate_ray_rate(&h, 0.6, [0.3, 0.32]).unwrap_err();
        assert!(matches!(err, SimError::InsufficientData(_)));
    }
}
