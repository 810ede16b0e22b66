//! Location and velocity errors against SNR for the three algorithms on a
//! small grid.

use multistatic_fmcw::experiment::{snr_sweep, ExperimentConfig, TrialContext};

fn main() -> multistatic_fmcw::Result<()> {
    let cfg = ExperimentConfig {
        trials: 200,
        snr_xi: 8,
        snr_db: vec![-20.0, -10.0, 0.0, 10.0, 20.0],
        n_it: vec![3],
        ..Default::default()
    };
    let ctx = TrialContext::for_algorithms(&cfg, cfg.snr_xi, &cfg.algorithms)?;
    for k in [1, 3] {
        println!("K = {k}");
        for &algo in &cfg.algorithms {
            for (p, _) in snr_sweep(&ctx, &cfg, algo, k)? {
                println!(
                    "  {algo:>5} snr {:>5.0} dB: miss {:.3} LEE {:.4} VEE {:.4}",
                    p.snr_db, p.miss_rate, p.lee, p.vee
                );
            }
        }
    }
    Ok(())
}
