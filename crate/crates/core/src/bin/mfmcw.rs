use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use multistatic_fmcw::dictionary::{CompleteDictionary, FactorizedDictionary, SensingModel};
use multistatic_fmcw::experiment::{draw_scene, run_experiment, write_resolved_config, ExperimentConfig, ExperimentKind};
use multistatic_fmcw::geometry::{build_grids, check_geometry_conditions};
use multistatic_fmcw::io::{load_cubes, read_toml, save_measurements, write_solution_csv, SceneFile, TargetSpec};
use multistatic_fmcw::pursuit::{recover, Algorithm};
use multistatic_fmcw::signal::{db_to_linear, sigma2_for_snr, synthesize, MeasurementSet, NoiseSpec};
use multistatic_fmcw::{Error, Result};
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "mfmcw", version, about = "Multistatic FMCW simulation and sparse recovery")]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Overrides {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Grid resolution(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    xi: Vec<usize>,
    /// SNR value(s) in dB, comma separated.
    #[arg(long = "snr-db", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    /// IFBMP refinement count(s), comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    nit: Vec<usize>,
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    algo: Vec<AlgoArg>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Bmp,
    Fbmp,
    Ifbmp,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Bmp => Algorithm::Bmp,
            AlgoArg::Fbmp => Algorithm::Fbmp,
            AlgoArg::Ifbmp => Algorithm::Ifbmp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Timing,
    Missrate,
    Snr,
    Map,
    Theorem,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize measurement cubes from a scene file or random on-grid targets.
    Synth {
        /// TOML scene; random targets when absent.
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Write the binary cube format instead of CSV.
        #[arg(long)]
        binary: bool,
    },
    /// Recover targets from a cube dump.
    Recover {
        /// Cube dump (CSV or binary); defaults to <out>/cubes.csv.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run an experiment.
    Exp {
        #[arg(value_enum)]
        kind: KindArg,
    },
    /// Check the geometric conditions for every configured resolution.
    CheckGeometry,
}

fn resolve(opts: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match &opts.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(t) = opts.trials {
        cfg.trials = t;
    }
    if !opts.xi.is_empty() {
        cfg.xi = opts.xi.clone();
        cfg.snr_xi = opts.xi[0];
        cfg.map_xi = opts.xi[0];
    }
    if !opts.snr_db.is_empty() {
        cfg.snr_db = opts.snr_db.clone();
    }
    if let Some(k) = opts.k {
        cfg.k = k;
        cfg.snr_k = vec![k];
    }
    if !opts.nit.is_empty() {
        cfg.n_it = opts.nit.clone();
    }
    if !opts.algo.is_empty() {
        cfg.algorithms = opts.algo.iter().map(|&a| a.into()).collect();
    }
    if let Some(out) = &opts.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sensing_model(cfg: &ExperimentConfig) -> Result<Arc<SensingModel>> {
    let xi = cfg.xi[0];
    let grids = build_grids(&cfg.radar, cfg.corner(), xi, xi)?;
    Ok(Arc::new(SensingModel::new(cfg.radar, cfg.bistatic_pairs(), grids)?))
}

/// Noise is added only when an SNR is given on the command line.
fn synth(cfg: &ExperimentConfig, scene: Option<PathBuf>, binary: bool, snr_db: Option<f64>) -> Result<()> {
    let model = sensing_model(cfg)?;
    let scene = match scene {
        Some(path) => read_toml::<SceneFile>(&path)?,
        None => {
            let targets = draw_scene(&model.grids, model.n_pairs(), cfg.k, cfg.seed, 0);
            let sigma2 = match snr_db {
                Some(db) => sigma2_for_snr(db_to_linear(db))?,
                None => 0.0,
            };
            SceneFile {
                model: cfg.model,
                noise: NoiseSpec { sigma2, seed: cfg.seed },
                targets: targets
                    .iter()
                    .map(|t| TargetSpec {
                        position: [t.position.x, t.position.y],
                        velocity: [t.velocity.x, t.velocity.y],
                        alphas: Some(t.alphas.iter().map(|a| [a.re, a.im]).collect()),
                    })
                    .collect(),
            }
        }
    };
    let targets = scene.targets(model.n_pairs())?;
    let meas = synthesize(&model.pairs, &targets, &model.cfg, &scene.noise, scene.model)?;
    write_resolved_config(cfg, &cfg.out, "synth")?;
    let name = if binary { "cubes.bin" } else { "cubes.csv" };
    save_measurements(&cfg.out.join(name), &meas)?;
    let text = toml::to_string(&scene).map_err(|e| Error::Format(e.to_string()))?;
    std::fs::write(cfg.out.join("scene.toml"), text)?;
    println!("wrote {} cubes of {}x{} to {}", meas.n_pairs(), cfg.radar.ms, cfg.radar.mr, cfg.out.join(name).display());
    Ok(())
}

fn recover_cmd(cfg: &ExperimentConfig, input: Option<PathBuf>) -> Result<()> {
    let input = input.unwrap_or_else(|| cfg.out.join("cubes.csv"));
    let (header, cubes) = load_cubes(&input)?;
    if header.ms != cfg.radar.ms || header.mr != cfg.radar.mr || header.q != cfg.pairs.len() {
        return Err(Error::Config(format!(
            "cube dump is {}x{}x{}, configuration expects {}x{}x{}",
            header.ms,
            header.mr,
            header.q,
            cfg.radar.ms,
            cfg.radar.mr,
            cfg.pairs.len()
        )));
    }
    let model = sensing_model(cfg)?;
    let report = check_geometry_conditions(&model.grids, &model.pairs, &model.cfg, cfg.lambda);
    if !report.all_passed() {
        return Err(Error::Geometry(report.failures().join(", ")));
    }
    let meas = MeasurementSet {
        cubes,
        cfg: cfg.radar,
        model: header.model,
        seed: header.seed,
    };
    let dict = CompleteDictionary::auto(model.clone(), cfg.materialize_budget_mib << 20);
    let fdict = FactorizedDictionary::new(model.clone());
    write_resolved_config(cfg, &cfg.out, "recover")?;
    let n_it = cfg.n_it.iter().copied().max().unwrap_or(0);
    for &algo in &cfg.algorithms {
        let sol = recover(algo, &meas, &dict, &fdict, cfg.k, n_it)?;
        let path = cfg.out.join(format!("recover_{algo}.csv"));
        write_solution_csv(std::io::BufWriter::new(std::fs::File::create(&path)?), &sol, &model.grids)?;
        for rec in &sol.rounds {
            let x = model.grids.location(rec.index.loc);
            let v = model.grids.velocity(rec.index.vel);
            println!("{algo}: x = ({:.3}, {:.3}) m, v = ({:.3}, {:.3}) m/s", x.x, x.y, v.x, v.y);
        }
    }
    Ok(())
}

fn check_geometry(cfg: &ExperimentConfig) -> Result<()> {
    let pairs = cfg.bistatic_pairs();
    let mut failed = Vec::new();
    for &xi in &cfg.xi {
        let grids = build_grids(&cfg.radar, cfg.corner(), xi, xi)?;
        let r = check_geometry_conditions(&grids, &pairs, &cfg.radar, cfg.lambda);
        for (name, c) in [
            ("velocity bound", r.velocity_bound),
            ("antenna distance", r.antenna_distance),
            ("range bound", r.range_bound),
        ] {
            println!(
                "xi={xi:<3} {name:<17} {} measured {:.6} limit {:.6}",
                if c.passed { "ok  " } else { "FAIL" },
                c.measured,
                c.limit
            );
        }
        if !r.all_passed() {
            failed.push(format!("xi={xi}: {}", r.failures().join(", ")));
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Geometry(failed.join("; ")))
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve(&cli.opts)?;
    match cli.cmd {
        Command::Synth { scene, binary } => {
            std::fs::create_dir_all(&cfg.out)?;
            synth(&cfg, scene, binary, cli.opts.snr_db.first().copied())
        }
        Command::Recover { input } => recover_cmd(&cfg, input),
        Command::Exp { kind } => {
            let kind = match kind {
                KindArg::Timing => ExperimentKind::Timing,
                KindArg::Missrate => ExperimentKind::Missrate,
                KindArg::Snr => ExperimentKind::Snr,
                KindArg::Map => ExperimentKind::Map,
                KindArg::Theorem => ExperimentKind::Theorem,
            };
            for path in run_experiment(kind, &cfg)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::CheckGeometry => check_geometry(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
