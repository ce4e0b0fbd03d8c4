//! Scores a synthetic corpus and aggregates one category into daily series
//! per source, then prints the aligned pair.
//!
//! ```text
//! cargo run --example daily_series -- [category]
//! ```

use std::path::Path;

use emolag::corpus::{Document, Source};
use emolag::lexicon::{
    apply_modifications, covid_modifications, load_lexicon, score, CategoryScores,
};
use emolag::series::{aggregate, align, difference, AggregateOptions, AggregationMode};
use emolag::synth::{lead_lag_corpus, LeadLagSpec};
use emolag::textprep::{preprocess, PrepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let category = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "medical_emergency".into());
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let prep = PrepConfig::from_files(
        &[data.join("stopwords/english.txt")],
        Some(&data.join("lemmas/english.tsv")),
        true,
    )?;
    let lex = apply_modifications(
        &load_lexicon(&data.join("lexicon/categories.tsv"))?,
        &covid_modifications(),
    )?;

    let spec = LeadLagSpec::default();
    let corpus = lead_lag_corpus(&spec);
    let docs: Vec<Document> = corpus.tweets.into_iter().chain(corpus.bulletins).collect();
    let scores: Vec<CategoryScores> = docs
        .iter()
        .map(|d| score(&preprocess(&d.text, &prep), &lex))
        .collect();

    let opts = AggregateOptions {
        mode: AggregationMode::MeanNormalized,
        utc_offset: spec.utc_offset,
        ..Default::default()
    };
    let build = |source| {
        aggregate(
            docs.iter().zip(&scores),
            &category,
            &spec.region,
            source,
            &opts,
        )
    };
    let tweets = build(Source::Tweet)?;
    let bulletins = build(Source::Bulletin)?;
    let pair = align(&tweets, &bulletins, false)?;

    println!(
        "{:<12} {:>10} {:>10} {:>10}",
        "date", "tweet", "bulletin", "d(tweet)"
    );
    let dt = difference(&tweets)?;
    for (i, d) in pair.y.dates().enumerate() {
        let change = if i == 0 {
            String::from("-")
        } else {
            format!("{:.5}", dt.values[i - 1])
        };
        println!(
            "{d:<12} {:>10.5} {:>10.5} {change:>10}",
            pair.y.values[i], pair.x.values[i]
        );
    }
    Ok(())
}
