//! Monte-Carlo experiments: selection timing, miss rate against grid
//! resolution, noise robustness, decision-variable maps and the location
//! shift check.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{evaluate, fit_scaling, theorem1_check, TheoremCheck, TrialMetrics};
use crate::dictionary::{CompleteDictionary, FactorizedDictionary, SensingModel, DEFAULT_MATERIALIZE_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{
    build_grids, check_geometry_conditions, default_pairs, BistaticPair, GeometryReport, GridPair, JointIndex,
    RadarConfig, Target, Vec2,
};
use crate::io::{draw_alphas, write_field_csv, write_metrics_csv, write_rows, write_theorem_csv};
use crate::pursuit::{
    bmp_select, fbmp_select, ifbmp_select, ifbmp_select_traced, location_decision_field, recover, Algorithm,
    ResidualSet,
};
use crate::rng::{seed_stream, StreamRole};
use crate::signal::{sigma2_for_snr, db_to_linear, synthesize, ModelKind, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub tx: [f64; 2],
    pub rx: [f64; 2],
}

impl From<&PairSpec> for BistaticPair {
    fn from(p: &PairSpec) -> Self {
        BistaticPair::new(Vec2::new(p.tx[0], p.tx[1]), Vec2::new(p.rx[0], p.rx[1]))
    }
}

/// Every experiment parameter. Missing TOML keys take the defaults below,
/// which reproduce the K-band four-pair setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub radar: RadarConfig,
    pub pairs: Vec<PairSpec>,
    /// Bottom-left corner of the location grid, m.
    pub corner: [f64; 2],
    /// Grid resolutions swept by `timing` and `missrate`.
    pub xi: Vec<usize>,
    /// Targets per scene for `missrate`.
    pub k: usize,
    /// Targets per scene for `snr`, one sweep per value.
    pub snr_k: Vec<usize>,
    pub snr_db: Vec<f64>,
    /// Grid resolution used by `snr`.
    pub snr_xi: usize,
    /// Reuse each trial's scene and unit noise at every SNR point.
    pub snr_common_draws: bool,
    /// Monte-Carlo trials per sweep point (draws per lambda for `theorem`).
    pub trials: usize,
    /// IFBMP refinement counts; `snr` uses the largest.
    pub n_it: Vec<usize>,
    pub seed: u64,
    /// Antenna-distance factor for the geometry check.
    pub lambda: f64,
    /// Sweep for `theorem`.
    pub lambdas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub model: ModelKind,
    /// Timed selections per (algorithm, xi) point, at least.
    pub timing_reps: usize,
    /// Untimed selections before each timing point.
    pub timing_warmup: usize,
    /// Keep timing a point until this much selection time accumulated.
    pub timing_min_seconds: f64,
    pub map_xi: usize,
    pub map_position: [f64; 2],
    pub map_velocity: [f64; 2],
    /// Parallel trials (never used for timing).
    pub parallel: bool,
    /// Largest complete dictionary stored in memory, MiB.
    pub materialize_budget_mib: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            radar: RadarConfig::k_band(),
            pairs: default_pairs()
                .iter()
                .map(|p| PairSpec {
                    tx: [p.tx.x, p.tx.y],
                    rx: [p.rx.x, p.rx.y],
                })
                .collect(),
            corner: [5.0, -5.0],
            xi: vec![8, 16, 24, 32],
            k: 1,
            snr_k: vec![1, 3],
            snr_db: vec![-10.0, 0.0, 10.0, 20.0, 30.0],
            snr_xi: 16,
            snr_common_draws: true,
            trials: 1000,
            n_it: vec![1, 2, 3],
            seed: 1,
            lambda: 10.0,
            lambdas: vec![5.0, 10.0, 20.0, 40.0],
            algorithms: vec![Algorithm::Bmp, Algorithm::Fbmp, Algorithm::Ifbmp],
            model: ModelKind::Complete,
            timing_reps: 5,
            timing_warmup: 1,
            timing_min_seconds: 0.5,
            map_xi: 32,
            map_position: [8.5, -1.7],
            map_velocity: [6.0, 6.0],
            parallel: true,
            materialize_budget_mib: DEFAULT_MATERIALIZE_BUDGET >> 20,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = crate::io::parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = crate::io::read_toml(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn bistatic_pairs(&self) -> Vec<BistaticPair> {
        self.pairs.iter().map(BistaticPair::from).collect()
    }

    pub fn corner(&self) -> Vec2 {
        Vec2::new(self.corner[0], self.corner[1])
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate().map_err(|e| Error::Config(e.to_string()))?;
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if self.trials == 0 {
            return bad("trials must be >= 1");
        }
        if self.pairs.is_empty() {
            return bad("at least one antenna pair is required");
        }
        if self.xi.is_empty() || self.snr_db.is_empty() || self.snr_k.is_empty() || self.lambdas.is_empty() {
            return bad("sweeps must be nonempty");
        }
        if self.n_it.is_empty() || self.algorithms.is_empty() {
            return bad("n_it and algorithms must be nonempty");
        }
        if self.xi.iter().chain([&self.snr_xi, &self.map_xi]).any(|&x| x == 0) {
            return bad("grid resolutions must be >= 1");
        }
        if self.k == 0 || self.snr_k.contains(&0) {
            return bad("K must be >= 1");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("SNR values must be finite");
        }
        if !(self.lambda > 0.0) || self.lambdas.iter().any(|l| !(*l > 0.0)) {
            return bad("lambda must be > 0");
        }
        if self.timing_reps == 0 {
            return bad("timing_reps must be >= 1");
        }
        Ok(())
    }

    fn budget_bytes(&self) -> usize {
        self.materialize_budget_mib << 20
    }
}

/// Dictionaries and grids for one resolution, shared by all trials.
pub struct TrialContext {
    pub xi: usize,
    pub model: Arc<SensingModel>,
    pub dict: CompleteDictionary,
    pub fdict: FactorizedDictionary,
    pub report: GeometryReport,
}

impl TrialContext {
    /// Builds the grids and checks the geometry. The complete dictionary is
    /// stored in memory when `materialize_budget` allows it.
    pub fn new(cfg: &ExperimentConfig, xi: usize, materialize_budget: usize) -> Result<Self> {
        let grids = build_grids(&cfg.radar, cfg.corner(), xi, xi).map_err(|e| Error::Config(e.to_string()))?;
        let pairs = cfg.bistatic_pairs();
        let report = check_geometry_conditions(&grids, &pairs, &cfg.radar, cfg.lambda);
        if !report.all_passed() {
            return Err(Error::Geometry(format!(
                "xi = {xi}, lambda = {}: {}",
                cfg.lambda,
                report.failures().join(", ")
            )));
        }
        let model = Arc::new(SensingModel::new(cfg.radar, pairs, grids).map_err(|e| Error::Geometry(e.to_string()))?);
        Ok(Self {
            xi,
            dict: CompleteDictionary::auto(model.clone(), materialize_budget),
            fdict: FactorizedDictionary::new(model.clone()),
            model,
            report,
        })
    }

    /// Context sized for the algorithms that will run on it.
    pub fn for_algorithms(cfg: &ExperimentConfig, xi: usize, algorithms: &[Algorithm]) -> Result<Self> {
        let budget = if algorithms.contains(&Algorithm::Bmp) {
            cfg.budget_bytes()
        } else {
            0
        };
        Self::new(cfg, xi, budget)
    }

    pub fn grids(&self) -> &GridPair {
        &self.model.grids
    }
}

/// `k` targets on distinct location cells with uniform velocity cells and
/// CN(0, 1) scattering coefficients.
pub fn draw_scene(grids: &GridPair, n_pairs: usize, k: usize, seed: u64, trial: u64) -> Vec<Target> {
    let mut trng = seed_stream(seed, trial, StreamRole::Targets);
    let mut arng = seed_stream(seed, trial, StreamRole::Alphas);
    let locs = sample(&mut trng, grids.n_loc(), k.min(grids.n_loc()));
    locs.iter()
        .map(|n| {
            let nd = trng.random_range(0..grids.n_vel());
            Target::new(grids.location(n), grids.velocity(nd), draw_alphas(&mut arng, n_pairs))
        })
        .collect()
}

fn noise_seed(seed: u64, trial: u64) -> u64 {
    seed_stream(seed, trial, StreamRole::Noise).random()
}

/// One trial specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub algorithm: Algorithm,
    pub k: usize,
    pub n_it: usize,
    /// Linear SNR; `None` is noiseless.
    pub snr: Option<f64>,
    pub seed: u64,
    pub trial: u64,
}

/// Draws a scene, synthesizes it, recovers it and scores the estimate.
pub fn run_trial(ctx: &TrialContext, spec: &TrialSpec, model: ModelKind) -> Result<TrialMetrics> {
    let m = &ctx.model;
    let targets = draw_scene(&m.grids, m.n_pairs(), spec.k, spec.seed, spec.trial);
    let noise = NoiseSpec {
        sigma2: match spec.snr {
            Some(snr) => sigma2_for_snr(snr)?,
            None => 0.0,
        },
        seed: noise_seed(spec.seed, spec.trial),
    };
    let meas = synthesize(&m.pairs, &targets, &m.cfg, &noise, model)?;
    let sol = recover(spec.algorithm, &meas, &ctx.dict, &ctx.fdict, spec.k, spec.n_it)?;
    let ev = evaluate(&sol.selections(), &targets, &m.grids)?;
    Ok(TrialMetrics {
        trial: spec.trial,
        algorithm: spec.algorithm,
        xi: ctx.xi,
        iterations: if spec.algorithm == Algorithm::Ifbmp { spec.n_it } else { 0 },
        k: spec.k,
        snr: spec.snr.unwrap_or(f64::INFINITY),
        seed: spec.seed,
        lee: ev.lee,
        vee: ev.vee,
        misses: ev.miss_count(),
        wall_time_select: sol.mean_select_seconds(),
    })
}

/// Runs trials `0..trials`, in parallel when asked; rows stay in trial order.
pub fn run_trials(
    ctx: &TrialContext,
    base: TrialSpec,
    trials: usize,
    model: ModelKind,
    parallel: bool,
) -> Result<Vec<TrialMetrics>> {
    let one = |t: usize| run_trial(ctx, &TrialSpec { trial: t as u64, ..base }, model);
    if parallel {
        (0..trials).into_par_iter().map(one).collect()
    } else {
        (0..trials).map(one).collect()
    }
}

/// Aggregate of a sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint {
    pub algorithm: Algorithm,
    pub xi: usize,
    pub n_it: usize,
    pub k: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub miss_rate: f64,
    pub lee: f64,
    pub vee: f64,
    pub mean_select_seconds: f64,
}

impl RatePoint {
    pub fn from_metrics(rows: &[TrialMetrics], snr_db: f64) -> Self {
        let n = rows.len() as f64;
        let first = &rows[0];
        let targets: usize = rows.iter().map(|r| r.k).sum();
        Self {
            algorithm: first.algorithm,
            xi: first.xi,
            n_it: first.iterations,
            k: first.k,
            snr_db,
            trials: rows.len(),
            miss_rate: rows.iter().map(|r| r.misses).sum::<usize>() as f64 / targets as f64,
            lee: rows.iter().map(|r| r.lee).sum::<f64>() / n,
            vee: rows.iter().map(|r| r.vee).sum::<f64>() / n,
            mean_select_seconds: rows.iter().map(|r| r.wall_time_select).sum::<f64>() / n,
        }
    }
}

/// Noiseless miss rate and errors at one resolution.
pub fn missrate_point(
    ctx: &TrialContext,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    n_it: usize,
) -> Result<(RatePoint, Vec<TrialMetrics>)> {
    let base = TrialSpec {
        algorithm,
        k: cfg.k,
        n_it,
        snr: None,
        seed: cfg.seed,
        trial: 0,
    };
    let rows = run_trials(ctx, base, cfg.trials, cfg.model, cfg.parallel)?;
    Ok((RatePoint::from_metrics(&rows, f64::INFINITY), rows))
}

/// One SNR sweep for one algorithm and K. With common draws every SNR
/// point sees the same scenes and the same unit noise, scaled.
pub fn snr_sweep(
    ctx: &TrialContext,
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    k: usize,
) -> Result<Vec<(RatePoint, Vec<TrialMetrics>)>> {
    let n_it = cfg.n_it.iter().copied().max().unwrap_or(0);
    cfg.snr_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            let seed = if cfg.snr_common_draws {
                cfg.seed
            } else {
                cfg.seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
            };
            let base = TrialSpec {
                algorithm,
                k,
                n_it,
                snr: Some(db_to_linear(db)),
                seed,
                trial: 0,
            };
            let rows = run_trials(ctx, base, cfg.trials, cfg.model, cfg.parallel)?;
            Ok((RatePoint::from_metrics(&rows, db), rows))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingPoint {
    pub algorithm: Algorithm,
    pub xi: usize,
    pub reps: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Times the selection step alone on fresh noiseless single-target scenes,
/// on the calling thread.
pub fn timing_point(ctx: &TrialContext, cfg: &ExperimentConfig, algorithm: Algorithm) -> Result<TimingPoint> {
    let n_it = cfg.n_it.iter().copied().max().unwrap_or(0);
    let m = &ctx.model;
    let mut times = Vec::new();
    let mut total = 0.0;
    let mut trial = 0u64;
    while times.len() < cfg.timing_reps || (total < cfg.timing_min_seconds && times.len() < 10_000) {
        let targets = draw_scene(&m.grids, m.n_pairs(), 1, cfg.seed, trial);
        let meas = synthesize(&m.pairs, &targets, &m.cfg, &NoiseSpec::noiseless(), cfg.model)?;
        let res = ResidualSet::new(&meas);
        let start = Instant::now();
        let sel = match algorithm {
            Algorithm::Bmp => bmp_select(&res, &ctx.dict),
            Algorithm::Fbmp => fbmp_select(&res, &ctx.fdict),
            Algorithm::Ifbmp => ifbmp_select(&res, &ctx.fdict, n_it),
        };
        let dt = start.elapsed().as_secs_f64();
        std::hint::black_box(sel);
        if trial >= cfg.timing_warmup as u64 {
            times.push(dt);
            total += dt;
        }
        trial += 1;
    }
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(TimingPoint {
        algorithm,
        xi: ctx.xi,
        reps: times.len(),
        mean_seconds: mean,
        std_seconds: var.sqrt(),
    })
}

/// Timing sweep and fitted log-log exponent for one algorithm. Complete
/// atoms are generated on the fly at every resolution.
pub fn timing_sweep(cfg: &ExperimentConfig, algorithm: Algorithm) -> Result<(Vec<TimingPoint>, f64)> {
    let points = cfg
        .xi
        .iter()
        .map(|&xi| {
            let ctx = TrialContext::new(cfg, xi, 0)?;
            timing_point(&ctx, cfg, algorithm)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit: Vec<(f64, f64)> = points.iter().map(|p| (p.xi as f64, p.mean_seconds)).collect();
    Ok((points, fit_scaling(&fit)?))
}

/// Location decision fields of IFBMP before and after the first refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct MapResult {
    pub grids: GridPair,
    /// `fields[i]` is the field used at refinement step `i`.
    pub fields: Vec<Vec<f64>>,
    pub argmax: Vec<usize>,
    /// Velocity cell the step-1 field is conditioned on.
    pub conditioning_velocity: usize,
    pub true_cell: Option<usize>,
    /// Location predicted by the Doppler-induced shift.
    pub predicted: Vec2,
    pub predicted_cell: Option<usize>,
}

pub fn decision_map(cfg: &ExperimentConfig) -> Result<MapResult> {
    let ctx = TrialContext::new(cfg, cfg.map_xi, 0)?;
    let m = &ctx.model;
    let x = Vec2::new(cfg.map_position[0], cfg.map_position[1]);
    let v = Vec2::new(cfg.map_velocity[0], cfg.map_velocity[1]);
    let target = Target::new(x, v, vec![num_complex::Complex64::new(1.0, 0.0); m.n_pairs()]);
    let meas = synthesize(&m.pairs, &[target], &m.cfg, &NoiseSpec::noiseless(), cfg.model)?;
    let res = ResidualSet::new(&meas);
    let (_, trace) = ifbmp_select_traced(&res, &ctx.fdict, 1);
    let first: JointIndex = trace[0];
    let fields = vec![
        location_decision_field(&res, &ctx.fdict, None)?,
        location_decision_field(&res, &ctx.fdict, Some(first.vel))?,
    ];
    let argmax = fields
        .iter()
        .map(|f| {
            f.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (i, &y)| if y > b.1 { (i, y) } else { b })
                .0
        })
        .collect();
    let predicted = x - m.cfg.gamma() * v;
    Ok(MapResult {
        true_cell: m.grids.location_cell(&x),
        predicted_cell: m.grids.location_cell(&predicted),
        grids: m.grids.clone(),
        fields,
        argmax,
        conditioning_velocity: first.vel,
        predicted,
    })
}

/// Random draws satisfying the theorem hypotheses at each lambda: `x` in
/// the location grid, `v` in the velocity grid, each antenna at a random
/// bearing and a distance in `[1, 2]` times `lambda c / (4B)`.
pub fn theorem_sweep(cfg: &ExperimentConfig) -> Result<Vec<TheoremCheck>> {
    let grids = build_grids(&cfg.radar, cfg.corner(), 1, 1)?;
    let quarter = cfg.radar.c / (4.0 * cfg.radar.bandwidth);
    let mut out = Vec::with_capacity(cfg.lambdas.len() * cfg.trials);
    for (li, &lambda) in cfg.lambdas.iter().enumerate() {
        for t in 0..cfg.trials {
            let mut rng = seed_stream(cfg.seed, (li * cfg.trials + t) as u64, StreamRole::Targets);
            let x = grids.loc_corner + Vec2::new(rng.random::<f64>(), rng.random::<f64>()) * grids.loc_length;
            let v = grids.vel_center + Vec2::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * grids.vel_length;
            let mut antenna = || {
                let bearing = rng.random::<f64>() * std::f64::consts::TAU;
                let d = lambda * quarter * (1.0 + rng.random::<f64>());
                x + Vec2::new(bearing.cos(), bearing.sin()) * d
            };
            let pair = BistaticPair::new(antenna(), antenna());
            out.push(theorem1_check(&x, &v, &pair, &cfg.radar, lambda)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Timing,
    Missrate,
    Snr,
    Map,
    Theorem,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Timing => "timing",
            ExperimentKind::Missrate => "missrate",
            ExperimentKind::Snr => "snr",
            ExperimentKind::Map => "map",
            ExperimentKind::Theorem => "theorem",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timing" => Ok(ExperimentKind::Timing),
            "missrate" => Ok(ExperimentKind::Missrate),
            "snr" => Ok(ExperimentKind::Snr),
            "map" => Ok(ExperimentKind::Map),
            "theorem" => Ok(ExperimentKind::Theorem),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }
}

#[derive(Serialize)]
struct TimingRow {
    algorithm: Algorithm,
    xi: usize,
    reps: usize,
    mean_seconds: f64,
    std_seconds: f64,
    exponent: f64,
}

#[derive(Serialize)]
struct MapSummaryRow {
    step: usize,
    argmax_n: usize,
    argmax_x: f64,
    argmax_y: f64,
    value: f64,
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

/// Writes the resolved configuration next to the results.
pub fn write_resolved_config(cfg: &ExperimentConfig, dir: &Path, header: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let (path, mut w) = create(dir, "config.resolved.txt")?;
    writeln!(w, "# {header}")?;
    write!(w, "{}", cfg.to_toml())?;
    w.flush()?;
    Ok(path)
}

/// Runs one experiment and writes `<kind>_<algo>.csv` files plus
/// `config.resolved.txt` into `cfg.out`. Returns the written paths.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let dir = cfg.out.clone();
    let mut files = vec![write_resolved_config(cfg, &dir, &format!("exp {}", kind.as_str()))?];
    let tag = |algo: Algorithm, suffix: &str| format!("{}_{}{}.csv", kind.as_str(), algo, suffix);
    match kind {
        ExperimentKind::Timing => {
            for &algo in &cfg.algorithms {
                let (points, exponent) = timing_sweep(cfg, algo)?;
                let rows: Vec<TimingRow> = points
                    .iter()
                    .map(|p| TimingRow {
                        algorithm: p.algorithm,
                        xi: p.xi,
                        reps: p.reps,
                        mean_seconds: p.mean_seconds,
                        std_seconds: p.std_seconds,
                        exponent,
                    })
                    .collect();
                let (path, w) = create(&dir, &tag(algo, ""))?;
                write_rows(w, &rows)?;
                files.push(path);
            }
        }
        ExperimentKind::Missrate => {
            for &algo in &cfg.algorithms {
                let mut points = Vec::new();
                let mut trials = Vec::new();
                for &xi in &cfg.xi {
                    let ctx = TrialContext::for_algorithms(cfg, xi, &[algo])?;
                    let iters: Vec<usize> = if algo == Algorithm::Ifbmp { cfg.n_it.clone() } else { vec![0] };
                    for n_it in iters {
                        let (p, rows) = missrate_point(&ctx, cfg, algo, n_it)?;
                        points.push(p);
                        trials.extend(rows);
                    }
                }
                let (path, w) = create(&dir, &tag(algo, ""))?;
                write_rows(w, &points)?;
                files.push(path);
                let (path, w) = create(&dir, &tag(algo, "_trials"))?;
                write_metrics_csv(w, &trials)?;
                files.push(path);
            }
        }
        ExperimentKind::Snr => {
            let ctx = TrialContext::for_algorithms(cfg, cfg.snr_xi, &cfg.algorithms)?;
            for &algo in &cfg.algorithms {
                let mut points = Vec::new();
                let mut trials = Vec::new();
                for &k in &cfg.snr_k {
                    for (p, rows) in snr_sweep(&ctx, cfg, algo, k)? {
                        points.push(p);
                        trials.extend(rows);
                    }
                }
                let (path, w) = create(&dir, &tag(algo, ""))?;
                write_rows(w, &points)?;
                files.push(path);
                let (path, w) = create(&dir, &tag(algo, "_trials"))?;
                write_metrics_csv(w, &trials)?;
                files.push(path);
            }
        }
        ExperimentKind::Map => {
            let map = decision_map(cfg)?;
            for (step, field) in map.fields.iter().enumerate() {
                let (path, w) = create(&dir, &tag(Algorithm::Ifbmp, &format!("_i{step}")))?;
                write_field_csv(w, field, &map.grids)?;
                files.push(path);
            }
            let rows: Vec<MapSummaryRow> = map
                .argmax
                .iter()
                .enumerate()
                .map(|(step, &n)| {
                    let p = map.grids.location(n);
                    MapSummaryRow {
                        step,
                        argmax_n: n,
                        argmax_x: p.x,
                        argmax_y: p.y,
                        value: map.fields[step][n],
                    }
                })
                .collect();
            let (path, w) = create(&dir, &tag(Algorithm::Ifbmp, ""))?;
            write_rows(w, &rows)?;
            files.push(path);
        }
        ExperimentKind::Theorem => {
            let checks = theorem_sweep(cfg)?;
            let (path, w) = create(&dir, "theorem.csv")?;
            write_theorem_csv(w, &checks)?;
            files.push(path);
        }
    }
    Ok(files)
}
