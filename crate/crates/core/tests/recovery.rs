//! End-to-end recovery scenarios and Monte-Carlo checks of the signal model.

use std::sync::Arc;

use multistatic_fmcw::dictionary::{CompleteDictionary, FactorizedDictionary, SensingModel};
use multistatic_fmcw::experiment::{
    draw_scene, missrate_point, run_experiment, run_trials, ExperimentConfig, ExperimentKind, TrialContext,
    TrialSpec,
};
use multistatic_fmcw::geometry::{build_grids, default_pairs, JointIndex, RadarConfig, Target, Vec2};
use multistatic_fmcw::pursuit::{bmp_run, fbmp_run, ifbmp_run, ifbmp_select_traced, Algorithm, ResidualSet};
use multistatic_fmcw::rng::{seed_stream, StreamRole};
use multistatic_fmcw::signal::{noise_cube, sigma2_for_snr, synthesize, ModelKind, NoiseSpec};
use multistatic_fmcw::Complex64;
use rand::Rng;

fn model(xi: usize) -> Arc<SensingModel> {
    let cfg = RadarConfig::k_band();
    let grids = build_grids(&cfg, Vec2::new(5.0, -5.0), xi, xi).unwrap();
    Arc::new(SensingModel::new(cfg, default_pairs(), grids).unwrap())
}

fn unit(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); n]
}

#[test]
fn empirical_snr_matches_request() {
    let m = model(4);
    let snr = 4.0;
    let sigma2 = sigma2_for_snr(snr).unwrap();
    let (mut signal, mut noise, mut targets) = (0.0, 0.0, 0usize);
    for trial in 0..10_000u64 {
        let k = 1 + seed_stream(3, trial, StreamRole::Noise).random_range(0..3);
        let scene = draw_scene(&m.grids, m.n_pairs(), k, 3, trial);
        let clean = synthesize(&m.pairs, &scene, &m.cfg, &NoiseSpec::noiseless(), ModelKind::Complete).unwrap();
        signal += clean.energy();
        let spec = NoiseSpec { sigma2, seed: trial };
        noise += (0..m.n_pairs()).map(|q| noise_cube(&m.cfg, &spec, q).energy()).sum::<f64>();
        targets += k;
    }
    // per-target signal energy over per-draw noise energy
    let measured = (signal / targets as f64) / (noise / 10_000.0);
    assert!((measured / snr - 1.0).abs() < 0.05, "measured SNR {measured}");
}

#[test]
fn moving_target_shift_and_correction() {
    let m = model(32);
    let fdict = FactorizedDictionary::new(m.clone());
    let dict = CompleteDictionary::lazy(m.clone());
    let x = Vec2::new(8.5, -1.7);
    let v = Vec2::new(6.0, 6.0);
    let meas = synthesize(&m.pairs, &[Target::new(x, v, unit(4))], &m.cfg, &NoiseSpec::noiseless(), ModelKind::Complete)
        .unwrap();
    let gamma = m.cfg.gamma();
    assert!((gamma - 0.03072).abs() < 1e-12);

    let res = ResidualSet::new(&meas);
    let (_, trace) = ifbmp_select_traced(&res, &fdict, 3);
    let fbmp_loc = m.grids.location(trace[0].loc);
    let toward = x - gamma * v;
    let away = x + gamma * v;
    assert!((toward - Vec2::new(8.316, -1.884)).norm() < 1e-3);
    assert!((fbmp_loc - toward).amax() <= m.grids.loc_pitch(), "FBMP at {fbmp_loc:?}");
    assert!((fbmp_loc - away).norm() > 0.4);
    assert_ne!(Some(trace[0].loc), m.grids.location_cell(&x));
    assert_eq!(Some(trace[1].loc), m.grids.location_cell(&x));

    let f = fbmp_run(&meas, &fdict, &dict, 1).unwrap();
    let i = ifbmp_run(&meas, &fdict, &dict, 1, 3).unwrap();
    assert_ne!(Some(f.support[0].loc), m.grids.location_cell(&x));
    assert_eq!(Some(i.support[0].loc), m.grids.location_cell(&x));
    let v_hat = m.grids.velocity(i.support[0].vel);
    assert!((v_hat - v).amax() <= m.grids.vel_pitch(), "v = {v_hat:?}");
}

#[test]
fn static_target_is_fixed_point() {
    let m = model(5);
    let fdict = FactorizedDictionary::new(m.clone());
    let zero = m.grids.zero_velocity_index().unwrap();
    for n in [0, 7, 12, 24] {
        let t = Target::new(m.grids.location(n), Vec2::zeros(), unit(4));
        let meas = synthesize(&m.pairs, &[t], &m.cfg, &NoiseSpec::noiseless(), ModelKind::Complete).unwrap();
        for n_it in [0, 1, 4] {
            let (sel, trace) = ifbmp_select_traced(&ResidualSet::new(&meas), &fdict, n_it);
            assert_eq!(sel.index, JointIndex::new(n, zero));
            assert!(trace.iter().all(|j| *j == sel.index));
            assert!(trace.len() <= 2);
        }
    }
}

#[test]
fn three_targets_recovered_at_xi_8() {
    let m = model(8);
    let dict = CompleteDictionary::materialized(m.clone());
    let mut tested = 0;
    for trial in 0..10u64 {
        let scene = draw_scene(&m.grids, m.n_pairs(), 3, 21, trial);
        let mut truth: Vec<JointIndex> = scene
            .iter()
            .map(|t| {
                JointIndex::new(
                    m.grids.location_cell(&t.position).unwrap(),
                    m.grids.velocity_cell(&t.velocity).unwrap(),
                )
            })
            .collect();
        let well_separated = truth.iter().enumerate().all(|(a, ja)| {
            truth[a + 1..].iter().all(|jb| {
                (m.grids.location(ja.loc) - m.grids.location(jb.loc)).norm() > 2.0 * m.grids.loc_pitch()
            })
        });
        if !well_separated {
            continue;
        }
        let meas = synthesize(&m.pairs, &scene, &m.cfg, &NoiseSpec::noiseless(), ModelKind::Complete).unwrap();
        let sol = bmp_run(&meas, &dict, 3).unwrap();
        let mut got = sol.support.clone();
        got.sort();
        truth.sort();
        assert_eq!(got, truth, "trial {trial}");
        tested += 1;
    }
    assert!(tested >= 3, "only {tested} separated scenes");
}

#[test]
fn ghost_targets_keep_ifbmp_above_bmp() {
    let cfg = ExperimentConfig {
        trials: 40,
        k: 3,
        parallel: false,
        ..Default::default()
    };
    let ctx = TrialContext::new(&cfg, 16, usize::MAX).unwrap();
    let (b, brows) = missrate_point(&ctx, &cfg, Algorithm::Bmp, 0).unwrap();
    let (i, irows) = missrate_point(&ctx, &cfg, Algorithm::Ifbmp, 3).unwrap();
    assert!(i.lee > b.lee, "IFBMP {} BMP {}", i.lee, b.lee);
    assert!(i.miss_rate > b.miss_rate);
    assert_eq!(brows.len(), irows.len());
}

#[test]
fn hits_carry_no_location_error() {
    let cfg = ExperimentConfig {
        trials: 200,
        parallel: false,
        ..Default::default()
    };
    let ctx = TrialContext::new(&cfg, 24, 0).unwrap();
    let (_, rows) = missrate_point(&ctx, &cfg, Algorithm::Fbmp, 0).unwrap();
    assert!(rows.iter().any(|r| r.misses > 0));
    for r in rows.iter().filter(|r| r.misses == 0) {
        assert_eq!(r.lee, 0.0);
    }
}

#[test]
fn metrics_reproducible_except_timing() {
    let strip = |text: String| -> Vec<String> {
        let mut lines = text.lines();
        let head: Vec<&str> = lines.next().unwrap().split(',').collect();
        let keep: Vec<usize> = (0..head.len())
            .filter(|&c| !matches!(head[c], "wall_time_select" | "mean_select_seconds"))
            .collect();
        std::iter::once(lines.clone().count().to_string())
            .chain(text.lines().map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                keep.iter().map(|&c| f[c]).collect::<Vec<_>>().join(",")
            }))
            .collect()
    };
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            trials: 30,
            xi: vec![8],
            n_it: vec![1, 2],
            algorithms: vec![Algorithm::Fbmp, Algorithm::Ifbmp],
            out: dir.path().to_path_buf(),
            ..Default::default()
        };
        run_experiment(ExperimentKind::Missrate, &cfg).unwrap();
        let read = |name: &str| strip(std::fs::read_to_string(dir.path().join(name)).unwrap());
        (read("missrate_fbmp_trials.csv"), read("missrate_ifbmp.csv"))
    };
    let a = run();
    let b = run();
    assert_eq!(a.0.len(), 32);
    assert_eq!(a, b);
}

#[test]
fn noisy_trials_are_seed_deterministic() {
    let cfg = ExperimentConfig::default();
    let ctx = TrialContext::new(&cfg, 8, 0).unwrap();
    let spec = TrialSpec {
        algorithm: Algorithm::Ifbmp,
        k: 2,
        n_it: 2,
        snr: Some(0.5),
        seed: 99,
        trial: 0,
    };
    let a = run_trials(&ctx, spec, 12, ModelKind::Complete, true).unwrap();
    let b = run_trials(&ctx, spec, 12, ModelKind::Complete, false).unwrap();
    let key = |r: &multistatic_fmcw::analysis::TrialMetrics| (r.trial, r.lee.to_bits(), r.vee.to_bits(), r.misses);
    assert_eq!(a.iter().map(key).collect::<Vec<_>>(), b.iter().map(key).collect::<Vec<_>>());
}
