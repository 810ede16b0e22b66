//! Radar configuration, bistatic geometry and the location/velocity grids.
//!
//! All positions and velocities live in the 2-D plane. Grid points are cell
//! centers of square regions, indexed row-major: location index
//! `n = i * xi_x + j` where `i` runs along the first axis and `j` along the
//! second. The joint (location, velocity) index is `n * N_v + n_dot`.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Points closer than this to an antenna are treated as coincident with it.
const ANTENNA_EPS: f64 = 1e-12;

fn default_c() -> f64 {
    SPEED_OF_LIGHT
}

/// Chirp waveform and sampling parameters.
///
/// The ramp duration is always derived as `ms * ts`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    /// Lower carrier frequency, Hz.
    pub f0: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
    /// Fast-time sample period, s.
    pub ts: f64,
    /// Samples per ramp.
    pub ms: usize,
    /// Ramps per frame.
    pub mr: usize,
    /// Wave speed, m/s.
    #[serde(default = "default_c")]
    pub c: f64,
}

impl RadarConfig {
    pub fn new(f0: f64, bandwidth: f64, ts: f64, ms: usize, mr: usize) -> Result<Self> {
        let cfg = Self {
            f0,
            bandwidth,
            ts,
            ms,
            mr,
            c: SPEED_OF_LIGHT,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 24 GHz K-band chirp, 250 MHz sweep, 50 kHz sampling, 16 x 16 samples.
    pub fn k_band() -> Self {
        Self {
            f0: 24e9,
            bandwidth: 250e6,
            ts: 20e-6,
            ms: 16,
            mr: 16,
            c: SPEED_OF_LIGHT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.f0) {
            return Err(Error::InvalidConfig(format!("f0 must be > 0, got {}", self.f0)));
        }
        if !positive(self.bandwidth) {
            return Err(Error::InvalidConfig(format!(
                "bandwidth must be > 0, got {}",
                self.bandwidth
            )));
        }
        if !positive(self.ts) {
            return Err(Error::InvalidConfig(format!("ts must be > 0, got {}", self.ts)));
        }
        if !positive(self.c) {
            return Err(Error::InvalidConfig(format!("c must be > 0, got {}", self.c)));
        }
        if self.ms == 0 || self.mr == 0 {
            return Err(Error::InvalidConfig(format!(
                "ms and mr must be >= 1, got ms={} mr={}",
                self.ms, self.mr
            )));
        }
        Ok(())
    }

    /// Ramp duration `T = Ms * Ts`.
    pub fn ramp_duration(&self) -> f64 {
        self.ms as f64 * self.ts
    }

    pub fn fractional_bandwidth(&self) -> f64 {
        self.bandwidth / self.f0
    }

    /// False when `B / f0 > 0.1`.
    pub fn is_narrowband(&self) -> bool {
        self.fractional_bandwidth() <= 0.1
    }

    /// Largest unambiguous value of `2 |v|`: `c / (2 f0 T)`.
    pub fn max_unambiguous_speed(&self) -> f64 {
        self.c / (2.0 * self.f0 * self.ramp_duration())
    }

    /// Location shift factor `f0 Ms Ts / B`, in seconds.
    pub fn gamma(&self) -> f64 {
        self.f0 * self.ms as f64 * self.ts / self.bandwidth
    }

    /// Side of the default location square, `Ms c / (2 sqrt(2) B)`.
    pub fn default_loc_length(&self) -> f64 {
        self.ms as f64 * self.c / (2.0 * std::f64::consts::SQRT_2 * self.bandwidth)
    }

    /// Side of the default velocity square, `c / (2 sqrt(2) f0 T)`.
    pub fn default_vel_length(&self) -> f64 {
        self.c / (2.0 * std::f64::consts::SQRT_2 * self.f0 * self.ramp_duration())
    }

    pub fn samples_per_cube(&self) -> usize {
        self.ms * self.mr
    }
}

/// One TX/RX measurement channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BistaticPair {
    pub tx: Vec2,
    pub rx: Vec2,
}

impl BistaticPair {
    pub fn new(tx: Vec2, rx: Vec2) -> Self {
        Self { tx, rx }
    }

    pub fn is_monostatic(&self) -> bool {
        self.tx == self.rx
    }

    /// Distance from `x` to the closer of the two antennas.
    pub fn min_antenna_distance(&self, x: &Vec2) -> f64 {
        (self.tx - x).norm().min((self.rx - x).norm())
    }
}

/// Every TX paired with every RX, TX-major.
pub fn all_pairs(tx: &[Vec2], rx: &[Vec2]) -> Vec<BistaticPair> {
    tx.iter()
        .flat_map(|t| rx.iter().map(move |r| BistaticPair::new(*t, *r)))
        .collect()
}

/// Two TX at (0,-2.5), (7.5,-10) and two RX at (0,2.5), (12.5,-10).
pub fn default_pairs() -> Vec<BistaticPair> {
    all_pairs(
        &[Vec2::new(0.0, -2.5), Vec2::new(7.5, -10.0)],
        &[Vec2::new(0.0, 2.5), Vec2::new(12.5, -10.0)],
    )
}

/// A point scatterer with one complex reflectivity per bistatic pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub position: Vec2,
    pub velocity: Vec2,
    pub alphas: Vec<num_complex::Complex64>,
}

impl Target {
    pub fn new(position: Vec2, velocity: Vec2, alphas: Vec<num_complex::Complex64>) -> Self {
        Self {
            position,
            velocity,
            alphas,
        }
    }
}

/// `|x_t - x| + |x_r - x|`.
pub fn bistatic_range(x: &Vec2, pair: &BistaticPair) -> f64 {
    (pair.tx - x).norm() + (pair.rx - x).norm()
}

/// Sum of the unit vectors pointing from `x` towards the TX and the RX.
pub fn unit_sum(x: &Vec2, pair: &BistaticPair) -> Result<Vec2> {
    let to_tx = pair.tx - x;
    let to_rx = pair.rx - x;
    let (dt, dr) = (to_tx.norm(), to_rx.norm());
    if dt < ANTENNA_EPS || dr < ANTENNA_EPS {
        return Err(Error::DegenerateGeometry(format!(
            "point ({}, {}) coincides with an antenna",
            x.x, x.y
        )));
    }
    Ok(to_tx / dt + to_rx / dr)
}

/// Projection of `v` on the sum of unit vectors towards TX and RX.
pub fn bistatic_speed(x: &Vec2, v: &Vec2, pair: &BistaticPair) -> Result<f64> {
    Ok(unit_sum(x, pair)?.dot(v))
}

/// `(r(x) + v(x, v) t) / c`.
pub fn delay_doppler(x: &Vec2, v: &Vec2, pair: &BistaticPair, t: f64, cfg: &RadarConfig) -> Result<f64> {
    let speed = bistatic_speed(x, v, pair)?;
    Ok((bistatic_range(x, pair) + speed * t) / cfg.c)
}

/// Joint (location, velocity) grid cell, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointIndex {
    pub loc: usize,
    pub vel: usize,
}

impl JointIndex {
    pub fn new(loc: usize, vel: usize) -> Self {
        Self { loc, vel }
    }

    pub fn flat(&self, n_vel: usize) -> usize {
        self.loc * n_vel + self.vel
    }

    pub fn from_flat(flat: usize, n_vel: usize) -> Self {
        Self {
            loc: flat / n_vel,
            vel: flat % n_vel,
        }
    }
}

/// Square location grid and square velocity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPair {
    pub loc_corner: Vec2,
    pub loc_length: f64,
    pub vel_center: Vec2,
    pub vel_length: f64,
    pub xi_x: usize,
    pub xi_v: usize,
    pub loc_points: Vec<Vec2>,
    pub vel_points: Vec<Vec2>,
}

fn square_points(corner: Vec2, length: f64, xi: usize) -> Vec<Vec2> {
    let pitch = length / xi as f64;
    let coord = |k: usize| (k as f64 + 0.5) * pitch;
    (0..xi)
        .flat_map(|i| (0..xi).map(move |j| corner + Vec2::new(coord(i), coord(j))))
        .collect()
}

/// Default grids: `L_x = Ms c / (2 sqrt2 B)` with bottom-left at `corner`,
/// `L_v = c / (2 sqrt2 f0 T)` centered on zero velocity.
pub fn build_grids(cfg: &RadarConfig, corner: Vec2, xi_x: usize, xi_v: usize) -> Result<GridPair> {
    GridPair::with_lengths(
        cfg,
        corner,
        cfg.default_loc_length(),
        Vec2::zeros(),
        cfg.default_vel_length(),
        xi_x,
        xi_v,
    )
}

impl GridPair {
    pub fn with_lengths(
        cfg: &RadarConfig,
        loc_corner: Vec2,
        loc_length: f64,
        vel_center: Vec2,
        vel_length: f64,
        xi_x: usize,
        xi_v: usize,
    ) -> Result<Self> {
        if xi_x == 0 || xi_v == 0 {
            return Err(Error::InvalidConfig(format!(
                "grid resolutions must be >= 1, got xi_x={xi_x} xi_v={xi_v}"
            )));
        }
        if !(loc_length > 0.0 && vel_length > 0.0) {
            return Err(Error::InvalidConfig("grid lengths must be > 0".into()));
        }
        let vel_corner = vel_center - Vec2::repeat(vel_length / 2.0);
        let grids = Self {
            loc_corner,
            loc_length,
            vel_center,
            vel_length,
            xi_x,
            xi_v,
            loc_points: square_points(loc_corner, loc_length, xi_x),
            vel_points: square_points(vel_corner, vel_length, xi_v),
        };
        let limit = cfg.max_unambiguous_speed();
        let max_speed = 2.0 * grids.max_grid_speed();
        if max_speed > limit * (1.0 + 1e-12) {
            return Err(Error::AmbiguousGrid { max_speed, limit });
        }
        Ok(grids)
    }

    pub fn n_loc(&self) -> usize {
        self.xi_x * self.xi_x
    }

    pub fn n_vel(&self) -> usize {
        self.xi_v * self.xi_v
    }

    pub fn n_joint(&self) -> usize {
        self.n_loc() * self.n_vel()
    }

    pub fn loc_pitch(&self) -> f64 {
        self.loc_length / self.xi_x as f64
    }

    pub fn vel_pitch(&self) -> f64 {
        self.vel_length / self.xi_v as f64
    }

    pub fn loc_index(&self, i: usize, j: usize) -> usize {
        i * self.xi_x + j
    }

    pub fn loc_axes(&self, n: usize) -> (usize, usize) {
        (n / self.xi_x, n % self.xi_x)
    }

    pub fn vel_index(&self, i: usize, j: usize) -> usize {
        i * self.xi_v + j
    }

    pub fn vel_axes(&self, n_dot: usize) -> (usize, usize) {
        (n_dot / self.xi_v, n_dot % self.xi_v)
    }

    pub fn location(&self, n: usize) -> Vec2 {
        self.loc_points[n]
    }

    pub fn velocity(&self, n_dot: usize) -> Vec2 {
        self.vel_points[n_dot]
    }

    /// Max `|v|` over the velocity grid points.
    pub fn max_grid_speed(&self) -> f64 {
        self.vel_points.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Index of the velocity point equal to zero, if the grid has one.
    pub fn zero_velocity_index(&self) -> Option<usize> {
        self.vel_points.iter().position(|v| v.norm() < 1e-12)
    }

    fn cell_of(coord: f64, start: f64, pitch: f64, xi: usize) -> Option<usize> {
        let k = ((coord - start) / pitch).floor();
        (k >= 0.0 && (k as usize) < xi).then_some(k as usize)
    }

    /// Location cell containing `x`, or `None` outside the square.
    pub fn location_cell(&self, x: &Vec2) -> Option<usize> {
        let p = self.loc_pitch();
        let i = Self::cell_of(x.x, self.loc_corner.x, p, self.xi_x)?;
        let j = Self::cell_of(x.y, self.loc_corner.y, p, self.xi_x)?;
        Some(self.loc_index(i, j))
    }

    pub fn velocity_cell(&self, v: &Vec2) -> Option<usize> {
        let p = self.vel_pitch();
        let start = self.vel_center - Vec2::repeat(self.vel_length / 2.0);
        let i = Self::cell_of(v.x, start.x, p, self.xi_v)?;
        let j = Self::cell_of(v.y, start.y, p, self.xi_v)?;
        Some(self.vel_index(i, j))
    }

    pub fn contains_location(&self, x: &Vec2) -> bool {
        self.location_cell(x).is_some()
    }
}

/// Outcome of one geometric condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    /// Positive when the condition holds with room to spare.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub lambda: f64,
    /// `max 2|v| <= c / (2 f0 T)` over the velocity grid.
    pub velocity_bound: Condition,
    /// Minimum antenna-to-grid distance `> lambda c / (4B)`.
    pub antenna_distance: Condition,
    /// `max r(x) < c Ts` over the location grid, for every pair.
    pub range_bound: Condition,
}

impl GeometryReport {
    pub fn all_passed(&self) -> bool {
        self.velocity_bound.passed && self.antenna_distance.passed && self.range_bound.passed
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.velocity_bound.passed {
            out.push("velocity bound");
        }
        if !self.antenna_distance.passed {
            out.push("antenna distance");
        }
        if !self.range_bound.passed {
            out.push("range bound");
        }
        out
    }
}

/// Checks the unambiguous-velocity, antenna-distance and short-range
/// conditions. Never fails: violations are reported through the flags.
pub fn check_geometry_conditions(
    grids: &GridPair,
    pairs: &[BistaticPair],
    cfg: &RadarConfig,
    lambda: f64,
) -> GeometryReport {
    let vel_limit = cfg.max_unambiguous_speed();
    let vel_measured = 2.0 * grids.max_grid_speed();
    let velocity_bound = Condition {
        passed: vel_measured <= vel_limit * (1.0 + 1e-12),
        measured: vel_measured,
        limit: vel_limit,
        margin: vel_limit - vel_measured,
    };

    let dist_limit = lambda * cfg.c / (4.0 * cfg.bandwidth);
    let dist_measured = pairs
        .iter()
        .flat_map(|p| grids.loc_points.iter().map(move |x| p.min_antenna_distance(x)))
        .fold(f64::INFINITY, f64::min);
    let antenna_distance = Condition {
        passed: dist_measured > dist_limit,
        measured: dist_measured,
        limit: dist_limit,
        margin: dist_measured - dist_limit,
    };

    let range_limit = cfg.c * cfg.ts;
    let range_measured = pairs
        .iter()
        .flat_map(|p| grids.loc_points.iter().map(move |x| bistatic_range(x, p)))
        .fold(0.0, f64::max);
    let range_bound = Condition {
        passed: range_measured < range_limit,
        measured: range_measured,
        limit: range_limit,
        margin: range_limit - range_measured,
    };

    GeometryReport {
        lambda,
        velocity_bound,
        antenna_distance,
        range_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pair(tx: (f64, f64), rx: (f64, f64)) -> BistaticPair {
        BistaticPair::new(Vec2::new(tx.0, tx.1), Vec2::new(rx.0, rx.1))
    }

    #[test]
    fn range_monostatic() {
        let p = pair((0.0, 0.0), (0.0, 0.0));
        assert_eq!(bistatic_range(&Vec2::new(3.0, 4.0), &p), 10.0);
    }

    #[test]
    fn range_first_pair() {
        let p = pair((0.0, -2.5), (0.0, 2.5));
        let expected = 31.25f64.sqrt() + 81.25f64.sqrt();
        assert_relative_eq!(bistatic_range(&Vec2::new(5.0, -5.0), &p), expected, epsilon = 1e-12);
        assert_relative_eq!(expected, 14.6041, epsilon = 1e-4);
    }

    #[test]
    fn range_at_tx_is_baseline() {
        let p = pair((1.0, 2.0), (-3.0, 7.0));
        assert_eq!(bistatic_range(&p.tx, &p), (p.tx - p.rx).norm());
    }

    #[test]
    fn speed_cases() {
        let p = pair((0.0, 0.0), (0.0, 0.0));
        let x = Vec2::new(10.0, 0.0);
        assert_eq!(bistatic_speed(&x, &Vec2::zeros(), &p).unwrap(), 0.0);
        assert_relative_eq!(bistatic_speed(&x, &Vec2::new(-1.0, 0.0), &p).unwrap(), 2.0);
        assert_eq!(bistatic_speed(&x, &Vec2::new(0.0, 3.0), &p).unwrap(), 0.0);
    }

    #[test]
    fn speed_at_antenna_is_degenerate() {
        let p = pair((1.0, 1.0), (4.0, 1.0));
        let err = bistatic_speed(&Vec2::new(4.0, 1.0), &Vec2::new(1.0, 0.0), &p).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
    }

    #[test]
    fn delay_doppler_cases() {
        let cfg = RadarConfig::k_band();
        let p = pair((0.0, 0.0), (0.0, 0.0));
        let x = Vec2::new(15.0, 0.0);
        let tau = delay_doppler(&x, &Vec2::zeros(), &p, 0.37, &cfg).unwrap();
        assert_relative_eq!(tau, 30.0 / SPEED_OF_LIGHT, max_relative = 1e-15);
        assert_relative_eq!(tau, 1.0007e-7, max_relative = 1e-4);
        let v = Vec2::new(3.0, -2.0);
        assert_eq!(
            delay_doppler(&x, &v, &p, 0.0, &cfg).unwrap(),
            bistatic_range(&x, &p) / cfg.c
        );
    }

    #[test]
    fn default_grid_lengths() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::new(5.0, -5.0), 16, 16).unwrap();
        let c = SPEED_OF_LIGHT;
        assert_relative_eq!(g.loc_length, 16.0 * c / (2.0 * 2f64.sqrt() * 250e6), max_relative = 1e-12);
        assert_relative_eq!(g.vel_length, c / (2.0 * 2f64.sqrt() * 24e9 * 320e-6), max_relative = 1e-12);
        assert_relative_eq!(g.loc_length, 6.7835, epsilon = 1e-4);
        assert_relative_eq!(g.vel_length, 13.80, epsilon = 1e-2);
        // the rounded figures 6.788 and 13.81 follow from c = 3e8
        let mut round_c = cfg;
        round_c.c = 3e8;
        let g3 = build_grids(&round_c, Vec2::new(5.0, -5.0), 16, 16).unwrap();
        assert_relative_eq!(g3.loc_length, 6.788, epsilon = 1e-3);
        assert_relative_eq!(g3.vel_length, 13.81, epsilon = 1e-2);
        assert_eq!(g.loc_points.len(), 256);
        assert_eq!(g.vel_points.len(), 256);
    }

    #[test]
    fn single_point_grid_is_center() {
        let cfg = RadarConfig::k_band();
        let corner = Vec2::new(5.0, -5.0);
        let g = build_grids(&cfg, corner, 1, 1).unwrap();
        let expect = corner + Vec2::repeat(g.loc_length / 2.0);
        assert_relative_eq!((g.loc_points[0] - expect).norm(), 0.0, epsilon = 1e-12);
        assert_eq!(g.vel_points[0], Vec2::zeros());
        assert_eq!(g.zero_velocity_index(), Some(0));
    }

    #[test]
    fn two_by_two_velocity_grid() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::zeros(), 3, 2).unwrap();
        let q = g.vel_length / 4.0;
        let expected = [(-q, -q), (-q, q), (q, -q), (q, q)];
        for (p, e) in g.vel_points.iter().zip(expected) {
            assert_relative_eq!(p.x, e.0, epsilon = 1e-12);
            assert_relative_eq!(p.y, e.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn default_velocity_square_meets_bound_with_equality() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::zeros(), 4, 8).unwrap();
        // half-diagonal of the square, not of the cell centers
        let square_max = std::f64::consts::SQRT_2 * g.vel_length;
        assert_relative_eq!(square_max, cfg.max_unambiguous_speed(), max_relative = 1e-12);
        assert!(2.0 * g.max_grid_speed() < cfg.max_unambiguous_speed());
    }

    #[test]
    fn oversized_velocity_grid_is_ambiguous() {
        let cfg = RadarConfig::k_band();
        let err = GridPair::with_lengths(&cfg, Vec2::zeros(), 5.0, Vec2::zeros(), 40.0, 4, 4)
            .unwrap_err();
        assert!(matches!(err, Error::AmbiguousGrid { .. }));
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(RadarConfig::new(0.0, 1.0, 1.0, 1, 1).is_err());
        assert!(RadarConfig::new(1.0, 1.0, 1.0, 0, 1).is_err());
        assert!(RadarConfig::new(24e9, 250e6, 20e-6, 16, 16).is_ok());
        let wide = RadarConfig {
            bandwidth: 5e9,
            ..RadarConfig::k_band()
        };
        assert!(!wide.is_narrowband());
        assert!(RadarConfig::k_band().is_narrowband());
    }

    #[test]
    fn default_geometry_report() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::new(5.0, -5.0), 16, 16).unwrap();
        let pairs = default_pairs();
        let report = check_geometry_conditions(&g, &pairs, &cfg, 10.0);
        assert_relative_eq!(report.antenna_distance.limit, 2.99792458, epsilon = 1e-9);
        let brute = g
            .loc_points
            .iter()
            .flat_map(|x| {
                [
                    Vec2::new(0.0, -2.5),
                    Vec2::new(7.5, -10.0),
                    Vec2::new(0.0, 2.5),
                    Vec2::new(12.5, -10.0),
                ]
                .map(|a| (a - x).norm())
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(report.antenna_distance.measured, brute);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn grid_point_on_antenna_fails_distance() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::zeros(), 4, 4).unwrap();
        let on = BistaticPair::new(g.loc_points[5], Vec2::new(-50.0, 0.0));
        for lambda in [3.01, 10.0, 100.0] {
            let r = check_geometry_conditions(&g, &[on], &cfg, lambda);
            assert!(!r.antenna_distance.passed);
            assert_eq!(r.antenna_distance.measured, 0.0);
        }
    }

    #[test]
    fn cell_lookup() {
        let cfg = RadarConfig::k_band();
        let g = build_grids(&cfg, Vec2::new(5.0, -5.0), 8, 8).unwrap();
        for n in 0..g.n_loc() {
            assert_eq!(g.location_cell(&g.location(n)), Some(n));
        }
        for n in 0..g.n_vel() {
            assert_eq!(g.velocity_cell(&g.velocity(n)), Some(n));
        }
        assert_eq!(g.location_cell(&Vec2::new(0.0, 0.0)), None);
    }

    proptest! {
        #[test]
        fn range_triangle_bound(
            tx in prop::array::uniform2(-50.0f64..50.0),
            rx in prop::array::uniform2(-50.0f64..50.0),
            x in prop::array::uniform2(-50.0f64..50.0),
        ) {
            let p = pair((tx[0], tx[1]), (rx[0], rx[1]));
            let r = bistatic_range(&Vec2::new(x[0], x[1]), &p);
            prop_assert!(r >= (p.tx - p.rx).norm() - 1e-12);
            prop_assert!(r >= 0.0);
        }

        #[test]
        fn speed_bounded(
            tx in prop::array::uniform2(-50.0f64..50.0),
            rx in prop::array::uniform2(-50.0f64..50.0),
            x in prop::array::uniform2(-50.0f64..50.0),
            v in prop::array::uniform2(-20.0f64..20.0),
        ) {
            let p = pair((tx[0], tx[1]), (rx[0], rx[1]));
            let v = Vec2::new(v[0], v[1]);
            if let Ok(s) = bistatic_speed(&Vec2::new(x[0], x[1]), &v, &p) {
                prop_assert!(s.abs() <= 2.0 * v.norm() + 1e-12);
            }
        }

        #[test]
        fn index_round_trip(xi in 1usize..40, seed in 0usize..10_000) {
            let cfg = RadarConfig::k_band();
            let g = build_grids(&cfg, Vec2::zeros(), xi, 2).unwrap();
            let n = seed % g.n_loc();
            let (i, j) = g.loc_axes(n);
            prop_assert_eq!(g.loc_index(i, j), n);
            let joint = JointIndex::new(n, seed % 4);
            prop_assert_eq!(JointIndex::from_flat(joint.flat(4), 4), joint);
        }
    }
}
