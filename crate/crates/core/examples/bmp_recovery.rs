//! Exhaustive block matching pursuit on a three-target noiseless scene.

use std::sync::Arc;

use multistatic_fmcw::dictionary::{CompleteDictionary, SensingModel};
use multistatic_fmcw::geometry::{build_grids, default_pairs, JointIndex, RadarConfig, Target, Vec2};
use multistatic_fmcw::pursuit::bmp_run;
use multistatic_fmcw::signal::{synthesize, ModelKind, NoiseSpec};
use multistatic_fmcw::Complex64;

fn main() -> multistatic_fmcw::Result<()> {
    let cfg = RadarConfig::k_band();
    let grids = build_grids(&cfg, Vec2::new(5.0, -5.0), 8, 8)?;
    let model = Arc::new(SensingModel::new(cfg, default_pairs(), grids)?);
    let dict = CompleteDictionary::materialized(model.clone());
    println!("complete dictionary: {:.1} MiB", dict.storage_bytes() as f64 / (1 << 20) as f64);

    let truth = [JointIndex::new(9, 40), JointIndex::new(35, 3), JointIndex::new(60, 27)];
    let alphas = [Complex64::new(1.0, 0.5), Complex64::new(-0.7, 0.2), Complex64::new(0.3, -1.1)];
    let targets: Vec<Target> = truth
        .iter()
        .zip(alphas)
        .map(|(j, a)| Target::new(model.grids.location(j.loc), model.grids.velocity(j.vel), vec![a; 4]))
        .collect();
    let meas = synthesize(&model.pairs, &targets, &model.cfg, &NoiseSpec::noiseless(), ModelKind::Complete)?;

    let sol = bmp_run(&meas, &dict, 3)?;
    for (round, rec) in sol.rounds.iter().enumerate() {
        let x = model.grids.location(rec.index.loc);
        let v = model.grids.velocity(rec.index.vel);
        println!(
            "round {}: n = {:>2}, n_dot = {:>2}, x = ({:.3}, {:.3}), v = ({:+.3}, {:+.3}), alpha_1 = {:.3}, residual = {:.3e}",
            round + 1,
            rec.index.loc,
            rec.index.vel,
            x.x,
            x.y,
            v.x,
            v.y,
            rec.increments[0],
            rec.residual_energy
        );
    }
    let mut found = sol.support.clone();
    found.sort();
    let mut want = truth.to_vec();
    want.sort();
    println!("support recovered: {}", found == want);
    Ok(())
}
