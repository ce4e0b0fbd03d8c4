//! Pairwise Granger tests between two sources on a synthetic lead-lag pair,
//! comparing own-lag and joint AIC lag selection.
//!
//! ```text
//! cargo run --example granger_pairs -- [seed]
//! ```

use std::collections::BTreeMap;

use chrono::NaiveDate;

use emolag::corpus::Source;
use emolag::econ::{granger_pairwise, LagSelection, PairwiseOptions};
use emolag::report::render_granger_table;
use emolag::series::EmotionSeries;
use emolag::synth::{lead_lag_corpus, LeadLagSpec};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("integer seed"))
        .unwrap_or(11);
    // The generator's latent series stand in for category scores here.
    let c = lead_lag_corpus(&LeadLagSpec {
        seed,
        ..Default::default()
    });
    let start = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
    let one = |source, values: &[f64]| {
        let s = EmotionSeries {
            region: "demo".into(),
            source,
            category: "medical_emergency".into(),
            start_date: start,
            values: values.to_vec(),
        };
        BTreeMap::from([(s.category.clone(), s)])
    };
    let bulletins = one(Source::Bulletin, &c.driver);
    let tweets = one(Source::Tweet, &c.response);

    for lag_selection in [LagSelection::OwnLags, LagSelection::Joint] {
        let opts = PairwiseOptions {
            max_p: 4,
            lag_selection,
        };
        let records = granger_pairwise(&bulletins, &tweets, &opts);
        println!("lag selection: {lag_selection:?}");
        print!("{}", render_granger_table(&records).text);
        println!();
    }
}
