//! Seeded synthetic corpora with a known lead-lag structure.
//!
//! A driver series `x_t ~ N(0, 1)` sets the daily share of one word in the
//! bulletins; the tweets carry the same word at a share driven by
//! `y_t = coupling * x_{t-1} + noise_sd * e_t`. Optional background words
//! follow independent noise in each source.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use chrono::{Days, FixedOffset, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{Document, Source};

#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundWord {
    pub word: String,
    pub in_bulletins: bool,
    pub in_tweets: bool,
}

impl BackgroundWord {
    pub fn both(word: &str) -> Self {
        Self {
            word: word.into(),
            in_bulletins: true,
            in_tweets: true,
        }
    }

    pub fn tweets_only(word: &str) -> Self {
        Self {
            word: word.into(),
            in_bulletins: false,
            in_tweets: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagSpec {
    pub seed: u64,
    pub days: usize,
    pub start: NaiveDate,
    pub region: String,
    pub utc_offset: FixedOffset,
    pub coupling: f64,
    pub noise_sd: f64,
    /// Share of the driven word at x = 0.
    pub base_rate: f64,
    /// Change in share per unit of the driver.
    pub amplitude: f64,
    pub bulletin_tokens: usize,
    pub tweets_per_day: usize,
    pub tweet_tokens: usize,
    pub driven_word: String,
    pub background: Vec<BackgroundWord>,
    pub background_rate: f64,
    pub background_amplitude: f64,
    /// Words that match no category and survive preprocessing unchanged.
    pub filler: Vec<String>,
}

impl Default for LeadLagSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            days: 45,
            start: NaiveDate::from_ymd_opt(2020, 3, 1).expect("valid date"),
            region: "delhi".into(),
            utc_offset: FixedOffset::east_opt(5 * 3600 + 1800).expect("valid offset"),
            coupling: 0.8,
            noise_sd: 0.5,
            base_rate: 0.25,
            amplitude: 0.04,
            bulletin_tokens: 400,
            tweets_per_day: 8,
            tweet_tokens: 50,
            driven_word: "lockdown".into(),
            background: Vec::new(),
            background_rate: 0.05,
            background_amplitude: 0.01,
            filler: [
                "district", "update", "report", "ward", "number", "zone", "area", "count", "city",
                "data", "today", "total", "sample", "daily", "week",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

/// Seed of the corpus shipped in `data/synthetic`.
pub const BUNDLED_SEED: u64 = 2020;

impl LeadLagSpec {
    /// The bundled corpus: the driven word plus six background words in both
    /// sources and one that only tweets use.
    pub fn bundled(seed: u64) -> Self {
        Self {
            seed,
            background: ["mask", "fear", "government", "family", "job", "recover"]
                .into_iter()
                .map(BackgroundWord::both)
                .chain([BackgroundWord::tweets_only("prayer")])
                .collect(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub tweets: Vec<Document>,
    pub bulletins: Vec<Document>,
    /// `x_t` per day.
    pub driver: Vec<f64>,
    /// `y_t` per day.
    pub response: Vec<f64>,
}

fn share_to_count(share: f64, tokens: usize) -> usize {
    (share * tokens as f64).round().clamp(0.0, tokens as f64) as usize
}

/// Splits `total` hits as evenly as possible over `parts` documents.
fn spread(total: usize, parts: usize) -> impl Iterator<Item = usize> {
    (0..parts).map(move |j| total / parts + usize::from(j < total % parts))
}

fn compose(rng: &mut ChaCha8Rng, hits: &[(&str, usize)], len: usize, filler: &[String]) -> String {
    let mut tokens: Vec<&str> = Vec::with_capacity(len);
    for &(word, n) in hits {
        tokens.extend(std::iter::repeat_n(word, n));
    }
    tokens.truncate(len);
    let mut i = 0;
    while tokens.len() < len {
        tokens.push(&filler[i % filler.len()]);
        i += 1;
    }
    tokens.shuffle(rng);
    tokens.join(" ")
}

pub fn lead_lag_corpus(spec: &LeadLagSpec) -> SyntheticCorpus {
    assert!(!spec.filler.is_empty(), "filler words required");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = |rng: &mut ChaCha8Rng, n: usize| -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(rng)).collect()
    };

    // one extra leading draw supplies x_{-1}
    let x_full = normal(&mut rng, spec.days + 1);
    let eta = normal(&mut rng, spec.days);
    let driver = x_full[1..].to_vec();
    let response: Vec<f64> = (0..spec.days)
        .map(|t| spec.coupling * x_full[t] + spec.noise_sd * eta[t])
        .collect();
    let background: Vec<(Vec<f64>, Vec<f64>)> = spec
        .background
        .iter()
        .map(|_| (normal(&mut rng, spec.days), normal(&mut rng, spec.days)))
        .collect();

    let tweet_day_tokens = spec.tweets_per_day * spec.tweet_tokens;
    let mut tweets = Vec::with_capacity(spec.days * spec.tweets_per_day);
    let mut bulletins = Vec::with_capacity(spec.days);
    for t in 0..spec.days {
        let date = spec.start + Days::new(t as u64);
        let at = |hour: u32| {
            let local = date.and_hms_opt(hour, 0, 0).expect("valid time");
            spec.utc_offset
                .from_local_datetime(&local)
                .single()
                .expect("fixed offset")
                .with_timezone(&Utc)
        };

        let mut b_hits = vec![(
            spec.driven_word.as_str(),
            share_to_count(
                spec.base_rate + spec.amplitude * driver[t],
                spec.bulletin_tokens,
            ),
        )];
        let mut t_hits = vec![(
            spec.driven_word.as_str(),
            share_to_count(
                spec.base_rate + spec.amplitude * response[t],
                tweet_day_tokens,
            ),
        )];
        for (bg, (bn, tn)) in spec.background.iter().zip(&background) {
            let b_share = spec.background_rate + spec.background_amplitude * bn[t];
            let t_share = spec.background_rate + spec.background_amplitude * tn[t];
            if bg.in_bulletins {
                b_hits.push((
                    bg.word.as_str(),
                    share_to_count(b_share, spec.bulletin_tokens),
                ));
            }
            if bg.in_tweets {
                t_hits.push((bg.word.as_str(), share_to_count(t_share, tweet_day_tokens)));
            }
        }

        bulletins.push(Document {
            id: format!("{date}_{}", spec.region),
            timestamp: at(12),
            region: spec.region.clone(),
            source: Source::Bulletin,
            text: compose(&mut rng, &b_hits, spec.bulletin_tokens, &spec.filler),
            user_location: None,
        });

        let per_tweet: Vec<Vec<usize>> = t_hits
            .iter()
            .map(|&(_, n)| spread(n, spec.tweets_per_day).collect())
            .collect();
        for j in 0..spec.tweets_per_day {
            let hits: Vec<(&str, usize)> = t_hits
                .iter()
                .zip(&per_tweet)
                .map(|(&(w, _), counts)| (w, counts[j]))
                .collect();
            tweets.push(Document {
                id: format!("t-{date}-{j}"),
                timestamp: at(9 + j as u32 % 12),
                region: spec.region.clone(),
                source: Source::Tweet,
                text: compose(&mut rng, &hits, spec.tweet_tokens, &spec.filler),
                user_location: None,
            });
        }
    }
    SyntheticCorpus {
        tweets,
        bulletins,
        driver,
        response,
    }
}

/// One JSON object per line in the tweet input format.
pub fn write_jsonl(path: &Path, docs: &[Document]) -> io::Result<()> {
    let mut out = io::BufWriter::new(fs::File::create(path)?);
    for d in docs {
        serde_json::to_writer(&mut out, d)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Writes bulletins as `<date>_<region>.txt` files.
pub fn write_bulletin_dir(dir: &Path, docs: &[Document], offset: FixedOffset) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for d in docs {
        let name = format!("{}_{}.txt", d.local_date(offset), d.region);
        fs::write(dir.join(name), format!("{}\n", d.text))?;
    }
    Ok(())
}
