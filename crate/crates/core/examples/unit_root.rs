//! Augmented Dickey-Fuller tests on a random walk, on white noise and on a
//! constant series, at levels and after differencing.
//!
//! ```text
//! cargo run --example unit_root -- [seed]
//! ```

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use emolag::corpus::Source;
use emolag::econ::{adf_test, LagRule, Stage, ADF_CRITICAL_1, ADF_CRITICAL_5};
use emolag::series::EmotionSeries;

fn main() {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("integer seed"))
        .unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..45).map(|_| StandardNormal.sample(&mut rng)).collect();
    let walk: Vec<f64> = noise
        .iter()
        .scan(0.0, |acc, e| {
            *acc += e;
            Some(*acc)
        })
        .collect();

    let series = |category: &str, values: Vec<f64>| EmotionSeries {
        region: "demo".into(),
        source: Source::Tweet,
        category: category.into(),
        start_date: NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(),
        values,
    };
    let rule = LagRule::MinAic { max_lag: 4 };
    println!("critical values: 1% {ADF_CRITICAL_1}, 5% {ADF_CRITICAL_5}");
    for s in [
        series("random_walk", walk),
        series("white_noise", noise),
        series("constant", vec![0.2; 45]),
    ] {
        for stage in [Stage::AtLevels, Stage::FirstDifferenced] {
            match adf_test(&s, stage, rule) {
                Ok(r) => println!(
                    "{:<12} {:<18} tau={:>8.4} m={} {:<3} stationary={}",
                    s.category,
                    stage.to_string(),
                    r.tau,
                    r.lag_m,
                    r.significance.marker(),
                    r.stationary
                ),
                Err(e) => println!("{:<12} {:<18} NC ({e})", s.category, stage.to_string()),
            }
        }
    }
}
