//! Preprocesses a few sentences and scores them against the bundled lexicon
//! with and without the COVID-19 modifications.
//!
//! ```text
//! cargo run --example score_text -- "Lockdown extended as cases spread"
//! ```

use std::path::Path;

use emolag::lexicon::{apply_modifications, covid_modifications, load_lexicon, score};
use emolag::textprep::{preprocess, PrepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let prep = PrepConfig::from_files(
        &[data.join("stopwords/english.txt")],
        Some(&data.join("lemmas/english.tsv")),
        true,
    )?;
    let base = load_lexicon(&data.join("lexicon/categories.tsv"))?;
    let modified = apply_modifications(&base, &covid_modifications())?;

    let args: Vec<String> = std::env::args().skip(1).collect();
    let texts = if args.is_empty() {
        vec![
            "Studies and studying!".to_string(),
            "Positive cases rising, the lockdown continues. #StayHome @cmo".to_string(),
            "Pray for the families, we will recover together https://t.co/x".to_string(),
        ]
    } else {
        args
    };

    for text in &texts {
        let tokens = preprocess(text, &prep);
        println!("{text}\n  tokens: {}", tokens.join());
        for (label, lex) in [("base", &base), ("modified", &modified)] {
            let s = score(&tokens, lex);
            let hits: Vec<String> = s
                .raw
                .iter()
                .filter(|(_, &n)| n > 0)
                .map(|(c, n)| format!("{c}={n} ({:.3})", s.normalized_of(c)))
                .collect();
            println!(
                "  {label:>8}: {}",
                if hits.is_empty() {
                    "-".into()
                } else {
                    hits.join(", ")
                }
            );
        }
    }
    Ok(())
}
