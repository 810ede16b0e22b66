//! Runs an experiment from a TOML configuration, as the command-line tool
//! does, and lists the files it wrote.

use multistatic_fmcw::experiment::{run_experiment, ExperimentConfig, ExperimentKind};

const CONFIG: &str = r#"
seed = 5
trials = 25
lambdas = [5.0, 10.0, 20.0]

[radar]
f0 = 24e9
bandwidth = 250e6
ts = 20e-6
ms = 16
mr = 16
"#;

fn main() -> multistatic_fmcw::Result<()> {
    let mut cfg = ExperimentConfig::from_toml(CONFIG)?;
    cfg.out = std::env::temp_dir().join("mfmcw-theorem-example");
    for path in run_experiment(ExperimentKind::Theorem, &cfg)? {
        println!("{}", path.display());
    }
    let csv = std::fs::read_to_string(cfg.out.join("theorem.csv"))?;
    for line in csv.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
