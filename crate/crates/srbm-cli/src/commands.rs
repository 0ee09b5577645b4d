use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use srbm_core::asymptotics::{self, AsymptoticsError, DecayReport, PoleCandidate, PoleSource, Regime};
use srbm_core::boundary_transforms::{
    fit_product_form, BoundaryTransform, ConstantTransform, RationalTransform, TransformError, Which,
};
use srbm_core::density::{self, Abscissa, DensityError, QuadratureSpec};
use srbm_core::kernel::EllipsePoint;
use srbm_core::model::{validate_stability, ModelParams, StabilityReport};
use srbm_core::simulator::{self, SimConfig, SimError};

use crate::args::{
    AbscissaKind, ClassifyArgs, Command, CompareArgs, DensityArgs, ModelArg, SimArgs, SimulateArgs, SweepArgs,
    TransformKind,
};
use crate::render::{angle, sig6};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("model is not stable: {0}")]
    Unstable(StabilityReport),
    #[error("drift has a non-negative coordinate; the asymptotic analysis needs mu1 < 0 and mu2 < 0")]
    UnsupportedDrift,
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Negative(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl Failure {
    pub const USAGE: u8 = 64;

    pub fn code(&self) -> u8 {
        match self {
            Failure::Negative(_) => 1,
            Failure::Unstable(_) => 2,
            Failure::UnsupportedDrift => 3,
            Failure::Usage(_) => Self::USAGE,
            Failure::Numeric(_) => 70,
            Failure::Io(_) => 74,
        }
    }
}

impl From<AsymptoticsError> for Failure {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::AngleOutOfRange(_) => Failure::Usage(e.to_string()),
            AsymptoticsError::UnsupportedDrift => Failure::UnsupportedDrift,
            AsymptoticsError::UnstableModel(r) => Failure::Unstable(r),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::Asymptotics(a) => a.into(),
            DensityError::InvalidPoint(..) | DensityError::AbscissaOutOfStrip(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(m) => Failure::Usage(m),
            SimError::UnstableModel(r) => Failure::Unstable(r),
            SimError::Io(io) => Failure::Io(io),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate(a) => validate(&a),
        Command::Classify(a) => classify(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Poles(a) => poles(&a),
        Command::ProductForm(a) => product_form(&a),
        Command::Density(a) => density_cmd(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Compare(a) => compare(&a),
    }
}

fn load(path: &Path) -> Result<ModelParams, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ModelParams::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn require_stable(p: &ModelParams) -> Result<(), Failure> {
    let rep = validate_stability(p);
    if rep.stable {
        Ok(())
    } else {
        Err(Failure::Unstable(rep))
    }
}

/// Stability first, then the sign of the drift.
fn load_analyzable(path: &Path) -> Result<ModelParams, Failure> {
    let p = load(path)?;
    require_stable(&p)?;
    if !p.is_supported() {
        return Err(Failure::UnsupportedDrift);
    }
    Ok(p)
}

fn out_stream(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn point(pt: &EllipsePoint) -> String {
    format!("({}, {})", sig6(pt.theta1), sig6(pt.theta2))
}

fn prefactor_field(e: Option<f64>) -> String {
    match e {
        Some(x) => format!("{x}"),
        None => "na".to_string(),
    }
}

fn validate(a: &ModelArg) -> Outcome {
    let p = load(&a.params)?;
    let rep = validate_stability(&p);
    println!("{rep}");
    Ok(if rep.stable { 0 } else { 2 })
}

fn headline(r: &DecayReport) -> String {
    match r.regime {
        Regime::SaddleDominated => format!("SaddleDominated rate={} prefactor=r^-1/2", sig6(r.rate)),
        Regime::Untreated => format!("Untreated (saddle coincides with pole) rate={}", sig6(r.rate)),
        other => format!("{other} rate={}", sig6(r.rate)),
    }
}

fn machine_line(r: &DecayReport) -> String {
    let pts: Vec<String> =
        r.dominant_points.iter().map(|pt| format!("{};{}", sig6(pt.theta1), sig6(pt.theta2))).collect();
    format!("machine,{},{},{},{}", r.regime, sig6(r.rate), prefactor_field(r.prefactor_exponent), pts.join("|"))
}

fn classify(a: &ClassifyArgs) -> Outcome {
    let p = load_analyzable(&a.params)?;
    let r = asymptotics::classify_with_depth(&p, a.alpha, a.depth)?;
    for d in &r.diagnostics {
        eprintln!("warning: {d}");
    }
    println!("{}", headline(&r));
    println!("  direction      {}", angle(r.alpha));
    let dom: Vec<String> = r.dominant_points.iter().map(point).collect();
    println!("  dominant       {}", dom.join(" and "));
    println!("  saddle         {} rate={}", point(&r.saddle.point), sig6(r.saddle.rate));
    println!("  candidates     phi2: {}, phi1: {}", r.candidates_phi2.len(), r.candidates_phi1.len());
    if let Some(th) = &r.thresholds {
        for (name, v) in th.all() {
            println!("  {name:<14} {}", angle(v));
        }
    }
    println!("{}", machine_line(&r));
    Ok(0)
}

fn sweep(a: &SweepArgs) -> Outcome {
    if a.n < 2 {
        return Err(Failure::Usage(format!("--n must be at least 2, got {}", a.n)));
    }
    let p = load_analyzable(&a.params)?;
    let rows = asymptotics::sweep(&p, a.n)?;
    let th = asymptotics::angle_thresholds(&p).ok().unwrap_or_default().all();
    let mut w = out_stream(None)?;
    for (name, v) in &th {
        writeln!(w, "# {name}={}", sig6(*v))?;
    }
    writeln!(w, "alpha,regime,rate,threshold_markers")?;
    let mut prev = 0.0;
    for r in &rows {
        let marks: Vec<&str> = th.iter().filter(|(_, v)| *v > prev && *v <= r.alpha).map(|(n, _)| *n).collect();
        writeln!(w, "{},{},{},{}", sig6(r.alpha), r.regime, sig6(r.rate), marks.join(";"))?;
        prev = r.alpha;
    }
    w.flush()?;
    Ok(0)
}

fn source_name(s: PoleSource) -> &'static str {
    match s {
        PoleSource::ThetaStar => "theta_star",
        PoleSource::ThetaStarStar => "theta_star_star",
    }
}

fn candidate_row(c: &PoleCandidate, alpha: f64) -> String {
    let owner = match c.owner {
        Which::Phi1 => "phi1",
        Which::Phi2 => "phi2",
    };
    let order = c.order.map_or("na".to_string(), |o| o.to_string());
    format!(
        "{owner},{},{},{},{},{},{order}",
        source_name(c.source),
        c.orbit_depth,
        sig6(c.point.theta1),
        sig6(c.point.theta2),
        sig6(c.rate(alpha))
    )
}

fn poles(a: &ClassifyArgs) -> Outcome {
    let p = load_analyzable(&a.params)?;
    let (c2, c1) = match asymptotics::enumerate_poles(&p, a.alpha, a.depth) {
        Err(AsymptoticsError::SaddleIsPole(src)) => {
            return Err(Failure::Numeric(format!(
                "the saddle point coincides with the pole from {}; candidates are not separated",
                source_name(src)
            )))
        }
        other => other?,
    };
    let mut w = out_stream(None)?;
    writeln!(w, "owner,source,orbit_depth,theta1,theta2,rate,order")?;
    for c in c2.iter().chain(&c1) {
        writeln!(w, "{}", candidate_row(c, a.alpha))?;
    }
    w.flush()?;
    Ok(0)
}

fn product_form(a: &ModelArg) -> Outcome {
    let p = load(&a.params)?;
    require_stable(&p)?;
    let pf = fit_product_form(&p).map_err(|e| Failure::Negative(e.to_string()))?;
    println!("product form: density = eta1 eta2 exp(-eta1 x1 - eta2 x2)");
    println!("  eta1 {}", sig6(pf.eta[0]));
    println!("  eta2 {}", sig6(pf.eta[1]));
    println!("  C    {}", sig6(pf.cap_c));
    println!("  c1   {}", sig6(pf.c1));
    println!("  c2   {}", sig6(pf.c2));
    Ok(0)
}

fn pair(v: &Option<Vec<f64>>, flag: &str) -> Result<[f64; 2], Failure> {
    match v.as_deref() {
        Some([a, b]) => Ok([*a, *b]),
        _ => Err(Failure::Usage(format!("{flag} takes two comma-separated values"))),
    }
}

fn transform(p: &ModelParams, a: &DensityArgs) -> Result<Box<dyn BoundaryTransform>, Failure> {
    Ok(match a.transform {
        TransformKind::ProductForm => Box::new(fit_product_form(p).map_err(|e| {
            Failure::Negative(format!("{e}; pass --transform constant or rational with explicit constants"))
        })?),
        TransformKind::Constant => {
            let [c1, c2] = pair(&a.c, "--c")?;
            Box::new(ConstantTransform { c1, c2 })
        }
        TransformKind::Rational => {
            let [c1, c2] = pair(&a.c, "--c")?;
            Box::new(RationalTransform { kappa: pair(&a.kappa, "--kappa")?, c1, c2 })
        }
    })
}

fn density_cmd(a: &DensityArgs) -> Outcome {
    let p = load_analyzable(&a.params)?;
    let bt = transform(&p, a)?;
    let spec = QuadratureSpec {
        abscissa: match a.abscissa {
            AbscissaKind::Axis => Abscissa::Axis,
            AbscissaKind::Auto => Abscissa::Auto,
        },
        ..QuadratureSpec::default()
    };
    let points: Vec<[f64; 2]> = match (&a.at, a.grid) {
        (Some(_), _) => vec![pair(&a.at, "--at")?],
        (None, Some(n)) => {
            if n == 0 || a.max <= 0.0 {
                return Err(Failure::Usage("--grid and --max must be positive".to_string()));
            }
            let h = a.max / n as f64;
            let c = |k: usize| (k as f64 + 0.5) * h;
            (0..n).flat_map(|i| (0..n).map(move |j| [c(i), c(j)])).collect()
        }
        (None, None) => return Err(Failure::Usage("pass --at or --grid".to_string())),
    };
    let mut w = out_stream(a.out.as_deref())?;
    writeln!(w, "x1,x2,density,imag_residual,panels")?;
    for x in points {
        let v = density::density_eval(&p, x, bt.as_ref(), &spec)?;
        let (n1, n2) = v.panels;
        writeln!(w, "{},{},{},{},{n1};{n2}", sig6(x[0]), sig6(x[1]), sig6(v.value), sig6(v.imag_residual))?;
    }
    w.flush()?;
    Ok(0)
}

fn sim_config(s: &SimArgs, total_time: f64) -> SimConfig {
    SimConfig {
        dt: s.dt,
        total_time,
        burn_in: s.burn_in,
        seed: s.seed,
        cell: s.cell,
        extent: s.extent,
        replicas: s.replicas,
    }
}

fn simulate(a: &SimulateArgs) -> Outcome {
    let p = load(&a.params)?;
    require_stable(&p)?;
    let h = simulator::run(&p, &sim_config(&a.sim, a.total_time))?;
    let m = h.mean();
    let l = h.local_time_rate();
    println!("recorded time  {}", sig6(h.total_time()));
    println!("samples        {}", h.samples);
    println!("mean           ({}, {})", sig6(m[0]), sig6(m[1]));
    println!("local time     ({}, {}) per unit time", sig6(l[0]), sig6(l[1]));
    println!("outside grid   {}", sig6(h.overflow as f64 / h.samples as f64));
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(File::create(path)?);
        h.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(path) = &a.local_time {
        let mut w = BufWriter::new(File::create(path)?);
        h.write_local_time_csv(&mut w)?;
        w.flush()?;
    }
    Ok(0)
}

/// Radii at which the quadrature slope is measured.
const QUAD_RADII: [f64; 2] = [8.0, 12.0];
const QUAD_TOLERANCE: f64 = 0.01;

fn rel(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}

fn percent(x: f64) -> String {
    format!("{}%", sig6(100.0 * x))
}

fn compare(a: &CompareArgs) -> Outcome {
    let p = load_analyzable(&a.params)?;
    if a.tolerance <= 0.0 {
        return Err(Failure::Usage("--tolerance must be positive".to_string()));
    }
    let report = asymptotics::classify(&p, a.alpha)?;
    let analytic = report.rate;
    // Remove the r^-1/2 prefactor before fitting when the saddle governs the tail.
    let kappa = if report.regime == Regime::SaddleDominated { -0.5 } else { 0.0 };

    let quadrature = match fit_product_form(&p) {
        Ok(pf) => {
            let spec = QuadratureSpec { abscissa: Abscissa::Auto, ..QuadratureSpec::default() };
            let dir = [a.alpha.cos(), a.alpha.sin()];
            let mut y = [0.0; 2];
            for (k, r) in QUAD_RADII.iter().enumerate() {
                let v = density::density_eval(&p, [r * dir[0], r * dir[1]], &pf, &spec)?;
                if v.value <= 0.0 {
                    return Err(Failure::Numeric(format!("density underflows at r = {r}")));
                }
                y[k] = -v.value.ln() + kappa * r.ln();
            }
            Some((y[1] - y[0]) / (QUAD_RADII[1] - QUAD_RADII[0]))
        }
        Err(_) => None,
    };

    let window = pair(&Some(a.window.clone()), "--window")?;
    let h = simulator::run(&p, &sim_config(&a.sim, a.sim_budget))?;
    let sim = simulator::estimate_ray_rate_corrected(&h, a.alpha, window, kappa)?;

    let sim_ok = rel(sim.rate, analytic) <= a.tolerance;
    let quad_ok = quadrature.map_or(true, |q| rel(q, analytic) <= QUAD_TOLERANCE);
    let pass = sim_ok && quad_ok;

    println!("direction        {}", angle(a.alpha));
    println!("regime           {}", report.regime);
    println!("analytic rate    {}", sig6(analytic));
    println!(
        "simulated rate   {} +- {} (rel. error {}, tolerance {})",
        sig6(sim.rate),
        sig6(sim.stderr),
        percent(rel(sim.rate, analytic)),
        percent(a.tolerance)
    );
    match quadrature {
        Some(q) => println!(
            "quadrature rate  {} (rel. error {}, tolerance {})",
            sig6(q),
            percent(rel(q, analytic)),
            percent(QUAD_TOLERANCE)
        ),
        None => println!("quadrature rate  n/a (not product form)"),
    }
    println!("verdict          {}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}
