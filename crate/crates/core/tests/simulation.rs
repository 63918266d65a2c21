use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relay_secrecy::selection::{Phase, Policy};
use relay_secrecy::simulation::{
    run_episode, run_episode_traced, run_slot, sweep_with, trial_rng, EpisodeState, Execution,
    ScenarioConfig,
};

fn short(mut config: ScenarioConfig) -> ScenarioConfig {
    config.warmup_slots = 10;
    config.episode_slots = 60;
    config.trials = 8;
    config
}

const RELAYED: [Policy; 4] = [
    Policy::MaxRatio,
    Policy::MaxLink,
    Policy::MlRs,
    Policy::MlSrs,
];

#[test]
fn first_slot_receives() {
    for config in [ScenarioConfig::fig2(), ScenarioConfig::fig3()] {
        for policy in RELAYED {
            let mut state = EpisodeState::new(&config, 10.0);
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let out = run_slot(&mut state, policy, &mut rng).unwrap();
            assert_eq!(out.decision.unwrap().phase, Phase::Receive);
            assert!(out.rate.is_none());
        }
    }
}

#[test]
fn direct_never_touches_buffers() {
    let config = short(ScenarioConfig::fig2());
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (summary, trace) = run_episode_traced(&config, Policy::Direct, 10.0, &mut rng).unwrap();
    assert_eq!(trace.len(), 60);
    assert!(trace
        .iter()
        .all(|o| o.rate.is_some() && o.decision.is_none()));
    assert!(trace
        .iter()
        .all(|o| o.buffer_occupancies.iter().all(|&b| b == 0)));
    assert_eq!(summary.final_occupancy, 0);
}

#[test]
fn episodes_are_reproducible() {
    let config = short(ScenarioConfig::fig3());
    for policy in Policy::ALL {
        let a = run_episode_traced(&config, policy, 5.0, &mut trial_rng(3, policy, 0, 0)).unwrap();
        let b = run_episode_traced(&config, policy, 5.0, &mut trial_rng(3, policy, 0, 0)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn outcomes_respect_half_duplex_and_conservation() {
    for config in [short(ScenarioConfig::fig2()), short(ScenarioConfig::fig3())] {
        for policy in RELAYED {
            for seed in 0..4 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (summary, trace) = run_episode_traced(&config, policy, 10.0, &mut rng).unwrap();
                for o in &trace {
                    let d = o.decision.as_ref().unwrap();
                    assert!(!d.relay_set.is_empty());
                    assert_eq!(o.rate.is_some(), d.phase == Phase::Transmit);
                    if let Some(r) = o.rate {
                        assert!(r.r_secrecy_clipped >= 0.0);
                        assert_eq!(r.r_secrecy_clipped, r.r_secrecy.max(0.0));
                    }
                    assert!(o
                        .buffer_occupancies
                        .iter()
                        .all(|&b| b <= config.buffer_capacity));
                }
                assert_eq!(
                    summary.pushed_symbols - summary.popped_symbols,
                    summary.final_occupancy
                );
                assert_eq!(
                    trace
                        .last()
                        .unwrap()
                        .buffer_occupancies
                        .iter()
                        .sum::<usize>(),
                    summary.final_occupancy
                );
            }
        }
    }
}

#[test]
fn ml_rs_and_max_link_fill_the_episode() {
    let mut config = ScenarioConfig::fig2();
    config.warmup_slots = 50;
    config.episode_slots = 200;
    for policy in [Policy::MlRs, Policy::MaxLink] {
        let mut rng = trial_rng(4, Policy::MlRs, 0, 0);
        let (summary, trace) = run_episode_traced(&config, policy, 10.0, &mut rng).unwrap();
        assert_eq!(trace.len(), 200);
        assert_eq!(summary.measured_slots, 200);
        assert!(summary.delivering_slots > 0 && summary.delivering_slots < 200);
    }
}

#[test]
fn vanishing_snr_gives_zero_rate() {
    let config = short(ScenarioConfig::fig2());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let summary = run_episode(&config, Policy::Direct, -80.0, &mut rng).unwrap();
    assert!(
        summary.mean_secrecy_rate < 1e-6,
        "{}",
        summary.mean_secrecy_rate
    );
}

#[test]
fn single_row_sweep() {
    let mut config = short(ScenarioConfig::fig2());
    config.trials = 1;
    config.snr_db_grid = vec![10.0];
    let table = sweep_with(&config, &[Policy::MlRs], Execution::Sequential).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].std_err, 0.0);
    assert_eq!(table.rows[0].trials, 1);
}

#[test]
fn policy_order_does_not_change_rows() {
    let mut config = short(ScenarioConfig::fig2());
    config.snr_db_grid = vec![0.0, 10.0];
    let forward = sweep_with(
        &config,
        &[Policy::Direct, Policy::MlRs, Policy::MaxLink],
        Execution::Sequential,
    )
    .unwrap();
    let backward = sweep_with(
        &config,
        &[Policy::MaxLink, Policy::MlRs, Policy::Direct],
        Execution::Sequential,
    )
    .unwrap();
    assert_eq!(forward.sorted(), backward.sorted());
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_matches_sequential() {
    let config = short(ScenarioConfig::fig3());
    let seq = sweep_with(&config, &Policy::ALL, Execution::Sequential).unwrap();
    let par = sweep_with(&config, &Policy::ALL, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn rates_do_not_fall_with_snr() {
    let mut config = ScenarioConfig::fig2();
    config.trials = 150;
    config.warmup_slots = 20;
    config.episode_slots = 100;
    config.snr_db_grid = vec![0.0, 5.0, 10.0, 15.0, 20.0];
    let table = sweep_with(&config, &Policy::ALL, Execution::default()).unwrap();
    for policy in Policy::ALL {
        for w in config.snr_db_grid.windows(2) {
            let (lo, hi) = (
                table.row(policy, w[0]).unwrap(),
                table.row(policy, w[1]).unwrap(),
            );
            let se = (lo.std_err.powi(2) + hi.std_err.powi(2)).sqrt();
            assert!(
                hi.mean_secrecy_rate - lo.mean_secrecy_rate > -1.645 * se,
                "{policy}: {} dB {} -> {} dB {}",
                w[0],
                lo.mean_secrecy_rate,
                w[1],
                hi.mean_secrecy_rate
            );
        }
    }
}
