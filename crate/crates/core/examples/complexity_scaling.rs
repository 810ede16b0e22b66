//! Selection time against grid resolution with a log-log exponent fit.
//! Pass a comma-separated resolution list to override the default sweep.

use multistatic_fmcw::experiment::{timing_sweep, ExperimentConfig};
use multistatic_fmcw::pursuit::Algorithm;

fn main() -> multistatic_fmcw::Result<()> {
    let xi: Vec<usize> = std::env::args()
        .nth(1)
        .map(|s| s.split(',').map(|v| v.trim().parse().expect("integer resolution")).collect())
        .unwrap_or_else(|| vec![4, 8, 12, 16]);
    let cfg = ExperimentConfig {
        xi,
        timing_reps: 3,
        timing_min_seconds: 0.2,
        ..Default::default()
    };
    for algo in [Algorithm::Bmp, Algorithm::Fbmp, Algorithm::Ifbmp] {
        let (points, exponent) = timing_sweep(&cfg, algo)?;
        print!("{algo:>5}: exponent {exponent:.2} |");
        for p in &points {
            print!(" xi={} {:.2e}s", p.xi, p.mean_seconds);
        }
        println!();
    }
    Ok(())
}
