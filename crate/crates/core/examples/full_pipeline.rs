//! Runs ingest and analyze on the bundled synthetic corpus and prints the
//! ADF and Granger tables.
//!
//! ```text
//! cargo run --example full_pipeline -- [output_dir]
//! ```

use std::path::{Path, PathBuf};

use emolag::pipeline::{cmd_analyze, cmd_ingest, Overrides, RunConfig};
use emolag::report::{render_adf_table, render_granger_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic/config.toml");
    let mut cfg = RunConfig::load(&config)?;
    if let Some(out) = std::env::args().nth(1) {
        cfg.apply(&Overrides {
            output_dir: Some(PathBuf::from(out)),
            ..Default::default()
        });
    }

    let ingest = cmd_ingest(&cfg)?;
    println!(
        "ingested {} documents into {}",
        ingest.documents,
        ingest.store_dir.display()
    );
    let run = cmd_analyze(&cfg)?;
    println!(
        "wrote {} files to {}\n",
        run.files.len(),
        run.analysis_dir.display()
    );
    print!(
        "{}\n{}",
        render_adf_table(&run.output.adf).text,
        render_granger_table(&run.output.granger).text
    );
    println!("\nconfig sha256 {}", cfg.sha256());
    Ok(())
}
