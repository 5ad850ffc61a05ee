use frailhaz_core::exec::Executor;
use frailhaz_core::iv::instrument_strength;
use frailhaz_core::rng::stream_rng;
use frailhaz_core::sim::{
    coverage_study, estimate_survival, estimate_trr, sample_event_time, sample_frailty_gamma,
    simulate_survey, simulate_twin_pairs, ScenarioConfig,
};
use frailhaz_core::{CumulativeHazard, PvfFamily, PvfParams, Sequential};
use rand::Rng;
use rand_distr::StandardNormal;

/// Runs indices back to front, standing in for an out-of-order thread pool.
struct Reversed;

impl Executor for Reversed {
    fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(&self, n: usize, f: F) -> Vec<T> {
        let mut out: Vec<T> = (0..n).rev().map(f).collect();
        out.reverse();
        out
    }
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

#[test]
fn frailty_moments() {
    let mut rng = stream_rng(1, 0);
    let (_, var) = mean_var(&sample_frailty_gamma(1.0 / 9.0, 1_000_000, &mut rng).unwrap());
    assert!((var - 9.0).abs() < 0.1, "{var}");
    let (mean, _) = mean_var(&sample_frailty_gamma(1.0, 1_000_000, &mut rng).unwrap());
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
}

#[test]
fn event_times_are_exponential() {
    let mut rng = stream_rng(2, 0);
    let n = 1_000_000;
    let alive = (0..n)
        .filter(|_| sample_event_time(1.0, 0.002, 1.0, &mut rng) > 50.0)
        .count();
    assert!((alive as f64 / n as f64 - (-0.1f64).exp()).abs() < 0.002);
}

#[test]
fn pooled_survival_matches_closed_form() {
    let mut rng = stream_rng(3, 0);
    let s =
        estimate_survival(&simulate_survey(1_000_000, 1.0 / 9.0, 0.002, 50.0, &mut rng).unwrap())
            .unwrap();
    assert!((s.value - 0.931).abs() < 0.001, "{}", s.value);
}

#[test]
fn twin_recurrence_risk_matches_closed_form() {
    let mut rng = stream_rng(4, 0);
    let trr =
        estimate_trr(&simulate_twin_pairs(1_000_000, 1.0 / 9.0, 0.002, 50.0, &mut rng).unwrap())
            .unwrap();
    assert!((trr.value - 1.029).abs() < 0.003, "{}", trr.value);
}

#[test]
fn no_shared_frailty_gives_unit_trr() {
    let mut rng = stream_rng(5, 0);
    let trr =
        estimate_trr(&simulate_twin_pairs(200_000, 1e9, 0.01, 50.0, &mut rng).unwrap()).unwrap();
    assert!(trr.lo < 1.0 && 1.0 < trr.hi);
}

/// Simulated `S(t1)` and `TRR(t1)` agree with the closed forms within three
/// Monte-Carlo standard errors for each scenario.
#[test]
fn scenario_summaries_agree_with_closed_forms() {
    for (k, cfg) in [
        ScenarioConfig::scenario1(),
        ScenarioConfig::scenario2(),
        ScenarioConfig::scenario3(),
    ]
    .into_iter()
    .enumerate()
    {
        let p = PvfParams::new(PvfFamily::Gamma, cfg.nu).unwrap();
        let h = CumulativeHazard::new(cfg.h0 * cfg.t1).unwrap();
        let n = 1_000_000;
        let mut rng = stream_rng(10 + k as u64, 0);
        let s = estimate_survival(&simulate_survey(n, cfg.nu, cfg.h0, cfg.t1, &mut rng).unwrap())
            .unwrap();
        let se_s = (s.value * (1.0 - s.value) / n as f64).sqrt();
        assert!(
            (s.value - p.survival(h)).abs() < 3.0 * se_s,
            "scenario {}: S {}",
            k + 1,
            s.value
        );

        let trr = estimate_trr(&simulate_twin_pairs(n, cfg.nu, cfg.h0, cfg.t1, &mut rng).unwrap())
            .unwrap();
        let se_ln = trr.sd();
        assert!(
            (trr.value.ln() - p.trr(h).ln()).abs() < 3.0 * se_ln,
            "scenario {}: TRR {}",
            k + 1,
            trr.value
        );
    }
}

fn small_study(r_cau: f64) -> ScenarioConfig {
    ScenarioConfig {
        n_per_arm: 3000,
        n_twin_pairs: 20_000,
        n_survey: 3000,
        h0: 0.01,
        nu: 2.0,
        r_cau,
        t1: 30.0,
        delta: 2.0,
        seed: 0,
        n_draws: 400,
    }
}

#[test]
fn null_effect_is_calibrated() {
    let report = coverage_study(&Sequential, &small_study(1.0), 400).unwrap();
    assert_eq!(report.n_failed, 0, "{report:?}");
    assert!(
        (report.coverage_marginal - 0.95).abs() <= 0.03,
        "{report:?}"
    );
    assert!(
        (report.coverage_adjusted - 0.95).abs() <= 0.03,
        "{report:?}"
    );
}

#[test]
fn coverage_study_is_executor_independent() {
    let cfg = small_study(0.6);
    let a = coverage_study(&Sequential, &cfg, 100).unwrap();
    let b = coverage_study(&Reversed, &cfg, 100).unwrap();
    assert_eq!(a, b);
    assert!(a.median_r_mar > 0.6, "{a:?}");
    assert!(a.median_r_adjusted < a.median_r_mar);
}

#[test]
fn instrument_slope_on_synthetic_data() {
    let mut rng = stream_rng(8, 0);
    let data: Vec<(f64, f64)> = (0..10_000)
        .map(|i| {
            let g = (i % 3) as f64;
            let noise: f64 = rng.sample(StandardNormal);
            (g, 3.0 + 0.5 * g + noise)
        })
        .collect();
    let (slope, se) = instrument_strength(&data).unwrap();
    assert!((slope - 0.5).abs() < 0.02, "{slope}");
    assert!(se > 0.0 && se < 0.02);
}

/// The published coverage table at 10^6 subjects per arm. Takes several
/// minutes per scenario.
#[test]
#[ignore]
fn full_scale_table() {
    let large = |cfg: ScenarioConfig| ScenarioConfig {
        n_per_arm: 1_000_000,
        n_survey: 1_000_000,
        ..cfg
    };
    let s1 = coverage_study(&Sequential, &large(ScenarioConfig::scenario1()), 500).unwrap();
    println!("scenario 1: {s1:?}");
    assert!((s1.median_r_mar - 0.89).abs() <= 0.02);
    assert!((s1.median_r_adjusted - 0.81).abs() <= 0.02);
    assert!((s1.coverage_adjusted - 0.964).abs() <= 0.03);
    assert!((s1.coverage_marginal - 0.406).abs() <= 0.05);
    for (cfg, adjusted, marginal) in [
        (ScenarioConfig::scenario2(), 0.70, 0.05),
        (ScenarioConfig::scenario3(), 0.71, 0.02),
    ] {
        let r = coverage_study(&Sequential, &large(cfg), 500).unwrap();
        println!("h0 = {}: {r:?}", cfg.h0);
        assert!((r.median_r_adjusted - adjusted).abs() <= 0.02);
        assert!(r.coverage_adjusted >= 0.93);
        assert!(r.coverage_marginal <= marginal);
    }
}
