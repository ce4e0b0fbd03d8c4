//! Exports the most frequent tweet words with their polarity, ready for a
//! frequency-by-sentiment scatter.
//!
//! ```text
//! cargo run --example chatterplot -- [top_n]
//! ```

use std::path::Path;

use emolag::lexicon::SentimentLexicon;
use emolag::report::{chatterplot_export, render_chatterplot_csv};
use emolag::synth::{lead_lag_corpus, LeadLagSpec, BUNDLED_SEED};
use emolag::textprep::{preprocess, PrepConfig, TokenList};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let top_n = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("integer"))
        .unwrap_or(15);
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let prep = PrepConfig::from_files(
        &[data.join("stopwords/english.txt")],
        Some(&data.join("lemmas/english.tsv")),
        true,
    )?;
    let slex = SentimentLexicon::load(&data.join("sentiment/bing_sample.tsv"))?;

    let corpus = lead_lag_corpus(&LeadLagSpec::bundled(BUNDLED_SEED));
    let tokens: Vec<TokenList> = corpus
        .tweets
        .iter()
        .map(|d| preprocess(&d.text, &prep))
        .collect();
    let records = chatterplot_export(&tokens, &slex, top_n, &["india".to_string()]);
    print!("{}", render_chatterplot_csv(&records));
    Ok(())
}
