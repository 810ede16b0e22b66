//! Renders the IFBMP location decision variable before and after the first
//! velocity-conditioned refinement as ASCII heat maps.

use multistatic_fmcw::experiment::{decision_map, ExperimentConfig};

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() -> multistatic_fmcw::Result<()> {
    let cfg = ExperimentConfig {
        map_xi: 24,
        ..Default::default()
    };
    let map = decision_map(&cfg)?;
    let xi = map.grids.xi_x;
    for (step, field) in map.fields.iter().enumerate() {
        let max = field.iter().cloned().fold(0.0, f64::max);
        let p = map.grids.location(map.argmax[step]);
        println!("step i = {step}: argmax cell {} at ({:.3}, {:.3})", map.argmax[step], p.x, p.y);
        // top row is the largest y
        for j in (0..xi).rev() {
            let row: String = (0..xi)
                .map(|i| {
                    let n = map.grids.loc_index(i, j);
                    let level = (field[n] / max * (SHADES.len() - 1) as f64).round() as usize;
                    if n == map.argmax[step] { 'X' } else { SHADES[level] as char }
                })
                .collect();
            println!("  |{row}|");
        }
    }
    println!("true cell {:?}, predicted shifted cell {:?}", map.true_cell, map.predicted_cell);
    Ok(())
}
