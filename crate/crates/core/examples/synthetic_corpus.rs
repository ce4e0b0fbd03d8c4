//! Writes a seeded lead-lag corpus (tweets as JSONL, bulletins as one text
//! file per day) that the pipeline can ingest.
//!
//! ```text
//! cargo run --example synthetic_corpus -- [out_dir] [seed]
//! ```
//!
//! Without arguments this regenerates the bundled corpus in `data/synthetic`.

use std::path::PathBuf;

use emolag::synth::{lead_lag_corpus, write_bulletin_dir, write_jsonl, LeadLagSpec, BUNDLED_SEED};

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic"));
    let seed = args
        .next()
        .map(|s| s.parse().expect("integer seed"))
        .unwrap_or(BUNDLED_SEED);

    let spec = LeadLagSpec::bundled(seed);
    let corpus = lead_lag_corpus(&spec);
    std::fs::create_dir_all(&out)?;
    write_jsonl(&out.join("tweets.jsonl"), &corpus.tweets)?;
    let bulletin_dir = out.join("bulletins");
    if bulletin_dir.exists() {
        std::fs::remove_dir_all(&bulletin_dir)?;
    }
    write_bulletin_dir(&bulletin_dir, &corpus.bulletins, spec.utc_offset)?;
    println!(
        "wrote {} tweets and {} bulletins to {}",
        corpus.tweets.len(),
        corpus.bulletins.len(),
        out.display()
    );
    Ok(())
}
