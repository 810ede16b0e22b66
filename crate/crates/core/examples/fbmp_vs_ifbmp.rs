//! The location bias of factorized pursuit on a moving target and its
//! correction by velocity-conditioned refinements.

use std::sync::Arc;

use multistatic_fmcw::dictionary::{FactorizedDictionary, SensingModel};
use multistatic_fmcw::geometry::{build_grids, default_pairs, RadarConfig, Target, Vec2};
use multistatic_fmcw::pursuit::{ifbmp_select_traced, ResidualSet};
use multistatic_fmcw::signal::{synthesize, ModelKind, NoiseSpec};
use multistatic_fmcw::Complex64;

fn main() -> multistatic_fmcw::Result<()> {
    let cfg = RadarConfig::k_band();
    let grids = build_grids(&cfg, Vec2::new(5.0, -5.0), 32, 32)?;
    let model = Arc::new(SensingModel::new(cfg, default_pairs(), grids)?);
    let fdict = FactorizedDictionary::new(model.clone());

    let x = Vec2::new(8.5, -1.7);
    let v = Vec2::new(6.0, 6.0);
    let target = Target::new(x, v, vec![Complex64::new(1.0, 0.0); 4]);
    let meas = synthesize(&model.pairs, &[target], &cfg, &NoiseSpec::noiseless(), ModelKind::Complete)?;
    let residuals = ResidualSet::new(&meas);

    let shifted = x - cfg.gamma() * v;
    println!("true x = ({:.3}, {:.3}), cell {:?}", x.x, x.y, model.grids.location_cell(&x));
    println!("x - gamma v = ({:.3}, {:.3}), cell {:?}", shifted.x, shifted.y, model.grids.location_cell(&shifted));

    let (_, trace) = ifbmp_select_traced(&residuals, &fdict, 3);
    for (i, j) in trace.iter().enumerate() {
        let p = model.grids.location(j.loc);
        let u = model.grids.velocity(j.vel);
        let err = (p - x).norm() / model.grids.loc_length;
        println!(
            "step {i}: cell {:>4} x = ({:.3}, {:.3}) v = ({:.2}, {:.2}) location error {:.2}% of L_x",
            j.loc,
            p.x,
            p.y,
            u.x,
            u.y,
            100.0 * err
        );
    }
    Ok(())
}
