use srbm_core::model::ModelParams;
use srbm_core::simulator::{self, SimConfig, SimError};

fn unit() -> ModelParams {
    ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 0.0, 0.0, 1.0).unwrap()
}

fn cfg(dt: f64, seed: u64) -> SimConfig {
    SimConfig { dt, total_time: 4000.0, seed, ..SimConfig::default() }
}

// Stationary law is a product of Exp(2), so each marginal mean is 1/2.
#[test]
fn euler_bias_shrinks_with_step() {
    let err = |dt: f64| {
        let h = simulator::run(&unit(), &cfg(dt, 7)).unwrap();
        let m = h.mean();
        ((m[0] - 0.5).abs() + (m[1] - 0.5).abs()) / 2.0
    };
    let coarse = err(1e-2);
    let fine = err(1e-3);
    eprintln!("mean error: dt=1e-2 {coarse:.4}, dt=1e-3 {fine:.4}");
    assert!(fine < coarse);
    assert!(fine < 0.03);
}

/// Mean of the first coordinate and its standard error from independent seeds
/// splitting the default budget.
fn batch_mean(dt: f64) -> (f64, f64) {
    let budget = SimConfig::default().total_time;
    let means: Vec<f64> = (0..8u64)
        .map(|k| {
            let c = SimConfig { dt, total_time: budget / 8.0, seed: 100 + k, ..SimConfig::default() };
            simulator::run(&unit(), &c).unwrap().mean()[0]
        })
        .collect();
    let n = means.len() as f64;
    let m = means.iter().sum::<f64>() / n;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn halving_the_step_stays_within_noise() {
    let (a, sa) = batch_mean(1e-3);
    let (b, sb) = batch_mean(5e-4);
    let se = (sa * sa + sb * sb).sqrt();
    eprintln!("means {a:.5} +- {sa:.5} and {b:.5} +- {sb:.5}");
    assert!((a - b).abs() < se, "difference {} exceeds {se}", (a - b).abs());
}

// Stationarity forces the face local-time rates to balance the drift: R l = -mu.
#[test]
fn local_time_balances_drift() {
    let p = ModelParams::from_entries(1.0, 0.3, 1.5, -1.0, -0.8, 1.0, 0.4, -0.2, 1.0).unwrap();
    let h = simulator::run(&p, &cfg(1e-3, 11)).unwrap();
    let l = h.local_time_rate();
    let r = p.refl();
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    let want = [(r[1][1] * 1.0 - r[0][1] * 0.8) / det, (r[0][0] * 0.8 - r[1][0] * 1.0) / det];
    eprintln!("local time rates {l:?}, expected {want:?}");
    for k in 0..2 {
        assert!((l[k] - want[k]).abs() < 0.03 * want[k], "face {k}");
    }
}

#[test]
fn same_seed_is_reproducible() {
    let c = SimConfig { total_time: 50.0, ..cfg(1e-3, 3) };
    let a = simulator::run(&unit(), &c).unwrap();
    let b = simulator::run(&unit(), &c).unwrap();
    assert_eq!(a.counts, b.counts);
    assert_eq!(a.local_time, b.local_time);
}

#[test]
fn unstable_model_is_refused() {
    let p = ModelParams::from_entries(1.0, 0.0, 1.0, -1.0, -1.0, 1.0, 2.0, 2.0, 1.0).unwrap();
    assert!(matches!(simulator::run(&p, &cfg(1e-3, 1)), Err(SimError::UnstableModel(_))));
}
