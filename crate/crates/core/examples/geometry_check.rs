//! Grid construction and the geometric conditions behind the factorized
//! model, for the default four-pair K-band setup.

use multistatic_fmcw::geometry::{build_grids, check_geometry_conditions, default_pairs, RadarConfig, Vec2};

fn main() -> multistatic_fmcw::Result<()> {
    let cfg = RadarConfig::k_band();
    println!("ramp duration T      = {:.1} us", cfg.ramp_duration() * 1e6);
    println!("fractional bandwidth = {:.4} (narrowband: {})", cfg.fractional_bandwidth(), cfg.is_narrowband());
    println!("max unambiguous |v|  = {:.3} m/s", cfg.max_unambiguous_speed());
    println!("gamma = f0 Ms Ts / B = {:.5} s", cfg.gamma());

    let pairs = default_pairs();
    for xi in [4, 16, 32] {
        let grids = build_grids(&cfg, Vec2::new(5.0, -5.0), xi, xi)?;
        println!(
            "\nxi = {xi}: L_x = {:.4} m (pitch {:.4}), L_v = {:.4} m/s (pitch {:.4})",
            grids.loc_length,
            grids.loc_pitch(),
            grids.vel_length,
            grids.vel_pitch()
        );
        for lambda in [5.0, 10.0, 20.0] {
            let r = check_geometry_conditions(&grids, &pairs, &cfg, lambda);
            println!(
                "  lambda {lambda:>4}: velocity {} antenna distance {} ({:.3} m vs {:.3} m) range {}",
                r.velocity_bound.passed, r.antenna_distance.passed, r.antenna_distance.measured,
                r.antenna_distance.limit, r.range_bound.passed
            );
        }
    }
    Ok(())
}
