//! Estimation metrics, numerical check of the Doppler-induced location shift
//! of the inner atoms, and log-log complexity fits.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{BistaticPair, GridPair, JointIndex, RadarConfig, Target, Vec2};
use crate::pursuit::Algorithm;
use crate::signal::inner_signal;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials). Returns `assignment[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays, column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let i0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let cur = cost[i0 - 1][col - 1] - u[i0] - v[col];
                if cur < minv[col] {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if minv[col] < delta {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for col in 1..=n {
        if owner[col] > 0 {
            assignment[owner[col] - 1] = col - 1;
        }
    }
    assignment
}

/// Pairs each true target with one estimate by minimum total location
/// error. Returns `matched[k]` = estimate index for target `k`.
pub fn match_targets(estimates: &[Vec2], truth: &[Vec2]) -> Result<Vec<usize>> {
    if estimates.len() != truth.len() {
        return Err(Error::CountMismatch {
            estimates: estimates.len(),
            truth: truth.len(),
        });
    }
    let cost: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| estimates.iter().map(|e| (e - t).norm()).collect())
        .collect();
    Ok(min_cost_assignment(&cost))
}

/// Location and velocity errors normalized by the grid side lengths,
/// averaged over targets. Each item is `(position, velocity)`.
pub fn lee_vee(estimates: &[(Vec2, Vec2)], truth: &[(Vec2, Vec2)], grids: &GridPair) -> Result<(f64, f64)> {
    let est_loc: Vec<Vec2> = estimates.iter().map(|e| e.0).collect();
    let true_loc: Vec<Vec2> = truth.iter().map(|t| t.0).collect();
    let matched = match_targets(&est_loc, &true_loc)?;
    if truth.is_empty() {
        return Ok((0.0, 0.0));
    }
    let k = truth.len() as f64;
    let (mut lee, mut vee) = (0.0, 0.0);
    for (t, &e) in truth.iter().zip(&matched) {
        lee += (estimates[e].0 - t.0).norm() / grids.loc_length;
        vee += (estimates[e].1 - t.1).norm() / grids.vel_length;
    }
    Ok((lee / k, vee / k))
}

/// Errors of one recovery against the true scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub lee: f64,
    pub vee: f64,
    /// Per true target: the matched estimate lies in another location cell.
    pub misses: Vec<bool>,
}

impl Evaluation {
    pub fn miss_count(&self) -> usize {
        self.misses.iter().filter(|m| **m).count()
    }
}

pub fn evaluate(selections: &[JointIndex], truth: &[Target], grids: &GridPair) -> Result<Evaluation> {
    let est: Vec<(Vec2, Vec2)> = selections
        .iter()
        .map(|s| (grids.location(s.loc), grids.velocity(s.vel)))
        .collect();
    let tru: Vec<(Vec2, Vec2)> = truth.iter().map(|t| (t.position, t.velocity)).collect();
    let (lee, vee) = lee_vee(&est, &tru, grids)?;
    let est_loc: Vec<Vec2> = est.iter().map(|e| e.0).collect();
    let true_loc: Vec<Vec2> = tru.iter().map(|t| t.0).collect();
    let matched = match_targets(&est_loc, &true_loc)?;
    let misses = truth
        .iter()
        .zip(&matched)
        .map(|(t, &e)| grids.location_cell(&t.position) != Some(selections[e].loc))
        .collect();
    Ok(Evaluation { lee, vee, misses })
}

/// One Monte-Carlo trial, as written to the per-trial metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub trial: u64,
    pub algorithm: Algorithm,
    pub xi: usize,
    pub iterations: usize,
    pub k: usize,
    /// Linear SNR; infinite for noiseless trials.
    pub snr: f64,
    pub seed: u64,
    pub lee: f64,
    pub vee: f64,
    pub misses: usize,
    pub wall_time_select: f64,
}

/// Outcome of comparing velocity-dependent inner atoms with zero-velocity
/// inner atoms at the shifted location.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub lambda: f64,
    pub gamma: f64,
    /// Shifted location minus true location.
    pub shift: Vec2,
    pub shifted: Vec2,
    /// Unit-modulus factor aligning the two atoms.
    pub aligning_phase: Complex64,
    /// `max_ms |psi_{x,v}[ms] - A psi_{x~,0}[ms]|`.
    pub residual: f64,
    /// Same quantity without the shift, for comparison.
    pub unshifted_residual: f64,
    /// `|shift|_inf <= c / (4 sqrt2 B)`.
    pub bound_ok: bool,
}

impl TheoremCheck {
    /// `None` outside the grid, where the comparison is not applicable.
    pub fn shifted_cell(&self, grids: &GridPair) -> Option<usize> {
        grids.location_cell(&self.shifted)
    }
}

/// Best unit-modulus alignment residual between two equally long signals.
fn aligned_residual(target: &[Complex64], reference: &[Complex64]) -> (Complex64, f64) {
    let ip: Complex64 = reference.iter().zip(target).map(|(r, t)| r.conj() * t).sum();
    let a = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let residual = target
        .iter()
        .zip(reference)
        .map(|(t, r)| (t - a * r).norm())
        .fold(0.0, f64::max);
    (a, residual)
}

/// Checks that the fast-time atom of a moving target matches, up to a
/// constant phase, the static atom at the location shifted by `-gamma v`.
///
/// With the bistatic speed projected on unit vectors pointing towards the
/// antennas, `r(x - gamma v) ~ r(x) + gamma v(x, v)`, which is the range
/// that cancels the Doppler term in the inner phase.
pub fn theorem1_check(x: &Vec2, v: &Vec2, pair: &BistaticPair, cfg: &RadarConfig, lambda: f64) -> Result<TheoremCheck> {
    if !(lambda > 3.0) {
        return Err(Error::HypothesisViolated(format!("lambda = {lambda} must exceed 3")));
    }
    let speed_limit = cfg.max_unambiguous_speed();
    if 2.0 * v.norm() > speed_limit * (1.0 + 1e-12) {
        return Err(Error::HypothesisViolated(format!(
            "velocity bound: 2|v| = {} > {}",
            2.0 * v.norm(),
            speed_limit
        )));
    }
    let dist_limit = lambda * cfg.c / (4.0 * cfg.bandwidth);
    let dist = pair.min_antenna_distance(x);
    if !(dist > dist_limit) {
        return Err(Error::HypothesisViolated(format!(
            "antenna distance: {dist} <= lambda c / 4B = {dist_limit}"
        )));
    }
    let gamma = cfg.gamma();
    let shift = -gamma * v;
    let shifted = x + shift;
    let zero = Vec2::zeros();
    let moving: Vec<Complex64> = (1..=cfg.ms)
        .map(|ms| inner_signal(x, v, pair, ms, cfg))
        .collect::<Result<_>>()?;
    let reference: Vec<Complex64> = (1..=cfg.ms)
        .map(|ms| inner_signal(&shifted, &zero, pair, ms, cfg))
        .collect::<Result<_>>()?;
    let unshifted: Vec<Complex64> = (1..=cfg.ms)
        .map(|ms| inner_signal(x, &zero, pair, ms, cfg))
        .collect::<Result<_>>()?;
    let (aligning_phase, residual) = aligned_residual(&moving, &reference);
    let (_, unshifted_residual) = aligned_residual(&moving, &unshifted);
    let inf_bound = cfg.c / (4.0 * std::f64::consts::SQRT_2 * cfg.bandwidth);
    Ok(TheoremCheck {
        lambda,
        gamma,
        shift,
        shifted,
        aligning_phase,
        residual,
        unshifted_residual,
        bound_ok: shift.amax() <= inf_bound * (1.0 + 1e-12),
    })
}

/// Least-squares slope of `log(time)` against `log(xi)`.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!("need >= 3 points, got {}", points.len())));
    }
    if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InsufficientData("resolutions must be strictly increasing".into()));
    }
    if points.iter().any(|&(xi, t)| !(xi > 0.0 && t > 0.0 && t.is_finite())) {
        return Err(Error::InsufficientData("resolutions and times must be > 0".into()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grids, default_pairs};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grids(xi: usize) -> GridPair {
        build_grids(&RadarConfig::k_band(), Vec2::new(5.0, -5.0), xi, xi).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn perfect_recovery_zero_error() {
        let g = grids(8);
        let items: Vec<(Vec2, Vec2)> = (0..3).map(|k| (g.location(k * 5), g.velocity(k))).collect();
        assert_eq!(lee_vee(&items, &items, &g).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn one_cell_axis_aligned_miss() {
        let g = grids(16);
        let truth = [(g.location(g.loc_index(3, 4)), g.velocity(0))];
        let est = [(g.location(g.loc_index(4, 4)), g.velocity(0))];
        let (lee, vee) = lee_vee(&est, &truth, &g).unwrap();
        assert_relative_eq!(lee, 0.0625, epsilon = 1e-12);
        assert_eq!(vee, 0.0);
    }

    #[test]
    fn count_mismatch() {
        let g = grids(4);
        let e = [(g.location(0), g.velocity(0))];
        assert!(matches!(lee_vee(&e, &[], &g), Err(Error::CountMismatch { .. })));
    }

    #[test]
    fn evaluate_flags_wrong_cells() {
        let g = grids(8);
        let truth = vec![
            Target::new(g.location(10), g.velocity(3), vec![]),
            Target::new(g.location(40), g.velocity(5), vec![]),
        ];
        let est = [JointIndex::new(40, 5), JointIndex::new(11, 3)];
        let ev = evaluate(&est, &truth, &g).unwrap();
        assert_eq!(ev.misses, vec![true, false]);
        assert!(ev.lee > 0.0);
        assert_relative_eq!(ev.vee, 0.0);
    }

    #[test]
    fn theorem_static_target() {
        let cfg = RadarConfig::k_band();
        let p = default_pairs()[0];
        let chk = theorem1_check(&Vec2::new(8.0, -1.0), &Vec2::zeros(), &p, &cfg, 5.0).unwrap();
        assert_eq!(chk.shift, Vec2::zeros());
        assert!(chk.residual < 1e-12);
        assert!((chk.aligning_phase - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(chk.bound_ok);
    }

    #[test]
    fn theorem_shift_magnitudes() {
        let cfg = RadarConfig::k_band();
        assert_relative_eq!(cfg.gamma(), 0.03072, max_relative = 1e-12);
        let l_v = cfg.default_vel_length();
        let v_max = l_v / std::f64::consts::SQRT_2;
        assert_relative_eq!(cfg.gamma() * v_max, cfg.c / (4.0 * cfg.bandwidth), max_relative = 1e-12);
        assert_relative_eq!(cfg.c / (4.0 * cfg.bandwidth), 0.29979, epsilon = 1e-5);
        // corner of the velocity square
        let v = Vec2::repeat(l_v / 2.0);
        let far = crate::geometry::BistaticPair::new(Vec2::new(-40.0, 0.0), Vec2::new(0.0, 40.0));
        let chk = theorem1_check(&Vec2::zeros(), &v, &far, &cfg, 10.0).unwrap();
        let bound = cfg.c / (4.0 * std::f64::consts::SQRT_2 * cfg.bandwidth);
        assert_relative_eq!(chk.shift.amax(), bound, max_relative = 1e-12);
        // 0.2121 m with c rounded to 3e8
        assert_relative_eq!(3e8 / (4.0 * std::f64::consts::SQRT_2 * 250e6), 0.2121, epsilon = 1e-4);
        assert!(chk.bound_ok);
    }

    #[test]
    fn theorem_residual_decays_and_shift_direction() {
        let cfg = RadarConfig::k_band();
        let v = Vec2::new(3.0, -2.5);
        let dir_t = Vec2::new(-1.0, 0.2).normalize();
        let dir_r = Vec2::new(0.3, 1.0).normalize();
        let quarter = cfg.c / (4.0 * cfg.bandwidth);
        let mut prev = f64::INFINITY;
        let mut scaled = Vec::new();
        for lambda in [5.0, 10.0, 20.0, 40.0] {
            let d = 1.5 * lambda * quarter;
            let pair = BistaticPair::new(dir_t * d, dir_r * d);
            let chk = theorem1_check(&Vec2::zeros(), &v, &pair, &cfg, lambda).unwrap();
            assert!(chk.residual < prev);
            assert!(chk.residual < chk.unshifted_residual);
            prev = chk.residual;
            scaled.push(chk.residual * lambda);
        }
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 3.0, "{scaled:?}");
    }

    #[test]
    fn shift_points_against_velocity() {
        let cfg = RadarConfig::k_band();
        let pairs = default_pairs();
        let x = Vec2::new(8.5, -1.7);
        let v = Vec2::new(6.0, 6.0);
        let inner = |p: &Vec2, vel: &Vec2, q: usize| -> Vec<Complex64> {
            (1..=cfg.ms).map(|ms| inner_signal(p, vel, &pairs[q], ms, &cfg).unwrap()).collect()
        };
        for q in 0..pairs.len() {
            let moving = inner(&x, &v, q);
            let minus = aligned_residual(&moving, &inner(&(x - cfg.gamma() * v), &Vec2::zeros(), q)).1;
            let plus = aligned_residual(&moving, &inner(&(x + cfg.gamma() * v), &Vec2::zeros(), q)).1;
            assert!(minus < 0.25 * plus, "q={q}: {minus} vs {plus}");
        }
    }

    #[test]
    fn theorem_hypotheses_enforced() {
        let cfg = RadarConfig::k_band();
        let p = default_pairs()[0];
        let x = Vec2::new(8.0, -1.0);
        assert!(matches!(
            theorem1_check(&x, &Vec2::zeros(), &p, &cfg, 3.0),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(theorem1_check(&x, &Vec2::new(50.0, 0.0), &p, &cfg, 5.0).is_err());
        assert!(theorem1_check(&Vec2::new(0.5, -2.0), &Vec2::zeros(), &p, &cfg, 5.0).is_err());
    }

    #[test]
    fn theorem_phase_invariance() {
        let cfg = RadarConfig::k_band();
        let p = default_pairs()[3];
        let x = Vec2::new(9.0, -1.0);
        let v = Vec2::new(4.0, 2.0);
        let moving: Vec<Complex64> = (1..=16).map(|ms| inner_signal(&x, &v, &p, ms, &cfg).unwrap()).collect();
        let chk = theorem1_check(&x, &v, &p, &cfg, 5.0).unwrap();
        let reference: Vec<Complex64> =
            (1..=16).map(|ms| inner_signal(&chk.shifted, &Vec2::zeros(), &p, ms, &cfg).unwrap()).collect();
        let rotated: Vec<Complex64> = moving.iter().map(|z| z * Complex64::from_polar(1.0, 1.234)).collect();
        let (_, r1) = aligned_residual(&moving, &reference);
        let (_, r2) = aligned_residual(&rotated, &reference);
        assert_relative_eq!(r1, chk.residual, epsilon = 1e-15);
        assert_relative_eq!(r1, r2, epsilon = 1e-12);
    }

    #[test]
    fn fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = [8.0f64, 16.0, 24.0, 32.0].iter().map(|&x| (x, 3e-7 * x.powi(4))).collect();
        assert_relative_eq!(fit_scaling(&pts).unwrap(), 4.0, epsilon = 1e-6);
    }

    #[test]
    fn fit_jittered_square_law() {
        let jitter = [1.05, 0.95, 1.03, 0.97, 1.0];
        let pts: Vec<(f64, f64)> = [8.0, 12.0, 16.0, 24.0, 32.0]
            .iter()
            .zip(jitter)
            .map(|(&x, j)| (x, 4e-7 * x * x * j))
            .collect();
        let e = fit_scaling(&pts).unwrap();
        assert!((1.9..=2.1).contains(&e), "{e}");
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::InsufficientData(_))));
        assert!(fit_scaling(&[(1.0, 1.0), (1.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0)]).is_err());
    }

    proptest! {
        #[test]
        fn hungarian_matches_brute_force(
            n in 1usize..6,
            vals in prop::collection::vec(0.0f64..10.0, 36),
        ) {
            let cost: Vec<Vec<f64>> = (0..n).map(|i| vals[i * 6..i * 6 + n].to_vec()).collect();
            let a = min_cost_assignment(&cost);
            let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>();
            let best = permutations(n).iter().map(|p| total(p)).fold(f64::INFINITY, f64::min);
            let mut seen = a.clone();
            seen.sort();
            prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
            prop_assert!((total(&a) - best).abs() < 1e-9);
        }

        #[test]
        fn lee_vee_permutation_invariant(seed in 0usize..1000, rot in 0usize..3) {
            let g = grids(8);
            let truth: Vec<(Vec2, Vec2)> =
                (0..3).map(|k| (g.location((seed + 17 * k) % 64), g.velocity((seed + 5 * k) % 64))).collect();
            let est: Vec<(Vec2, Vec2)> =
                (0..3).map(|k| (g.location((seed + 17 * k + 1) % 64), g.velocity((seed + 5 * k + 2) % 64))).collect();
            let mut shuffled = est.clone();
            shuffled.rotate_left(rot);
            let a = lee_vee(&est, &truth, &g).unwrap();
            let b = lee_vee(&shuffled, &truth, &g).unwrap();
            prop_assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }

        #[test]
        fn fit_is_time_scale_invariant(scale in 1e-6f64..1e6, p in 1.0f64..5.0) {
            let pts: Vec<(f64, f64)> = [4.0f64, 8.0, 16.0].iter().map(|&x| (x, x.powf(p))).collect();
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, t)| (x, t * scale)).collect();
            prop_assert!((fit_scaling(&pts).unwrap() - fit_scaling(&scaled).unwrap()).abs() < 1e-9);
        }
    }
}
