use astars_core::analytic::{MetricKind, SicMode};
use astars_core::model::*;
use astars_core::montecarlo::*;
use proptest::prelude::*;

const FIXTURE: &str = include_str!("fixtures/mc_reference.csv");

fn ps_at(q_dbm: f64, cfg: &NetworkConfig) -> f64 {
    budget_to_ps(dbm_to_watts(q_dbm), cfg, true).unwrap()
}

#[test]
fn seed_regression_against_fixture() {
    let cfg = NetworkConfig::table_one();
    let set = simulate(
        &cfg,
        Scheme::AstarsNoma,
        ps_at(20.0, &cfg),
        10_000,
        0x5EED_A57A,
    )
    .unwrap();
    let mut checked = 0;
    for line in FIXTURE.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let kind = MetricKind::from_tag(f[0]).unwrap();
        let mode = SicMode::from_tag(f[1]).unwrap();
        let want: f64 = f[2].parse().unwrap();
        let got = set.get(kind, mode).unwrap().mean;
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{line}: got {got}"
        );
        checked += 1;
    }
    assert_eq!(checked, 12);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = NetworkConfig::table_one();
    let ps = ps_at(25.0, &cfg);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate(&cfg, Scheme::AstarsNoma, ps, 20_000, 99).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    assert_eq!(
        one,
        simulate_sequential(&cfg, Scheme::AstarsNoma, ps, 20_000, 99).unwrap()
    );
}

#[test]
fn baselines_deterministic_and_reject_noma() {
    let cfg = NetworkConfig::table_one();
    for scheme in [Scheme::AstarsOma, Scheme::PstarsNoma] {
        let a = baseline_estimate(&cfg, scheme, 0.5, 5_000, 4).unwrap();
        assert_eq!(a, baseline_estimate(&cfg, scheme, 0.5, 5_000, 4).unwrap());
    }
    assert!(baseline_estimate(&cfg, Scheme::AstarsNoma, 0.5, 5_000, 4).is_err());
    assert!(Scheme::from_tag("aris_noma").is_err());
}

#[test]
fn transmission_rate_below_ceiling() {
    let cfg = NetworkConfig {
        a_r: 0.2,
        a_t: 0.8,
        ..NetworkConfig::table_one()
    };
    let r = estimate_ergodic(&cfg, SicMode::Perfect, 1e3, 100_000, 8).unwrap();
    assert!(r.t.mean <= (1.0 + cfg.a_t / cfg.a_r).log2() + r.t.ci95_halfwidth);
}

#[test]
fn confidence_interval_formulas() {
    let cfg = NetworkConfig::table_one();
    let set = simulate(&cfg, Scheme::AstarsNoma, ps_at(15.0, &cfg), 4_000, 1).unwrap();
    for e in set.iter() {
        assert_eq!(e.trials, 4_000);
        if e.kind.is_probability() {
            let want = 1.96 * (e.mean * (1.0 - e.mean) / 4_000.0).sqrt();
            assert!((e.ci95_halfwidth - want).abs() <= 1e-15);
        } else {
            assert!(e.ci95_halfwidth > 0.0);
        }
    }
}

#[test]
fn empirical_cascade_matches_fit() {
    let kappa = NetworkConfig::table_one().rician_kappa;
    let g = gamma_fit(kappa, 10).unwrap();
    let mut xs = cascade_gain_samples(kappa, 10, 200_000, 2);
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let ks = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cascade_cdf(g, x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    assert!(ks < 0.02, "KS distance {ks}");
}

#[test]
fn budget_round_trip_at_30_dbm() {
    let cfg = NetworkConfig::table_one();
    let q = dbm_to_watts(30.0);
    for active in [true, false] {
        let ps = budget_to_ps(q, &cfg, active).unwrap();
        assert!(ps > 0.0);
        assert!((ps_to_budget(ps, &cfg, active) - q).abs() <= 1e-12 * q);
    }
    assert!(budget_to_ps(1e-9, &cfg, true).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn estimates_in_range(ps_dbm in -20.0f64..60.0, seed in any::<u64>(), l in 1usize..12) {
        let cfg = NetworkConfig { num_elements: l, ..NetworkConfig::table_one() };
        let set = simulate(&cfg, Scheme::AstarsNoma, dbm_to_watts(ps_dbm), 1_000, seed).unwrap();
        for e in set.iter() {
            if e.kind.is_probability() {
                prop_assert!((0.0..=1.0).contains(&e.mean));
            } else {
                prop_assert!(e.mean >= 0.0);
            }
        }
        let sys = set.get(MetricKind::OutageSystem, SicMode::Perfect).unwrap().mean;
        let r = set.get(MetricKind::OutageR, SicMode::Perfect).unwrap().mean;
        prop_assert!(sys >= r);
    }

    #[test]
    fn budget_inverse(q_dbm in 0.0f64..60.0, active in any::<bool>()) {
        let cfg = NetworkConfig::table_one();
        let q = dbm_to_watts(q_dbm);
        if let Ok(ps) = budget_to_ps(q, &cfg, active) {
            prop_assert!((ps_to_budget(ps, &cfg, active) - q).abs() <= 1e-12 * q);
        }
    }
}
