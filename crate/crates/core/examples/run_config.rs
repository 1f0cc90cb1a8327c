//! Drive the experiment runner from Rust instead of the command line.
//!
//!     cargo run --release --example run_config -- examples/configs/suite.toml

use polymerlab::experiment::{self, ExperimentConfig, RunOptions};

fn main() -> polymerlab::Result<()> {
    let opts = RunOptions {
        out: std::env::temp_dir().join("polymerlab-example"),
        ..RunOptions::default()
    };
    match std::env::args().nth(1) {
        Some(manifest) => {
            let configs = experiment::load_manifest(&manifest)?;
            let suite = experiment::suite(&configs, &opts)?;
            for item in &suite.items {
                println!("{:<14} {}", item.name, if item.pass { "pass" } else { "FAIL" });
            }
        }
        None => {
            let cfg = ExperimentConfig::from_toml_str("kind = \"dlr\"\nfixture = \"hand\"\n")?;
            let report = experiment::run(&cfg, &opts)?;
            print!("{}", report.to_toml_string());
        }
    }
    println!("artifacts under {}", opts.out.display());
    Ok(())
}
