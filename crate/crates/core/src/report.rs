//! Result tables, corpus statistics and chatterplot data.
//!
//! Every table comes as aligned plain text plus a CSV twin. CSV numbers use
//! six significant digits.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Source};
use crate::econ::{AdfResult, GrangerSignificance, PairwiseRecord};
use crate::lexicon::{sentiment_of, SentimentLexicon};
use crate::textprep::TokenList;

pub const DEFAULT_TOP_N: usize = 200;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed CSV: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SignificanceCode {
    Sig01,
    Sig1,
    Sig5,
    NotSignificant,
    NotComputable,
}

impl SignificanceCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sig01 => "***",
            Self::Sig1 => "**",
            Self::Sig5 => "*",
            Self::NotSignificant => "NS",
            Self::NotComputable => "NC",
        }
    }
}

impl fmt::Display for SignificanceCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignificanceCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "***" => Ok(Self::Sig01),
            "**" => Ok(Self::Sig1),
            "*" => Ok(Self::Sig5),
            "NS" => Ok(Self::NotSignificant),
            "NC" => Ok(Self::NotComputable),
            other => Err(format!("unknown significance code `{other}`")),
        }
    }
}

impl From<GrangerSignificance> for SignificanceCode {
    fn from(s: GrangerSignificance) -> Self {
        match s {
            GrangerSignificance::Sig01 => Self::Sig01,
            GrangerSignificance::Sig1 => Self::Sig1,
            GrangerSignificance::Sig5 => Self::Sig5,
            GrangerSignificance::NotSignificant => Self::NotSignificant,
        }
    }
}

pub fn significance_code(p: f64) -> SignificanceCode {
    GrangerSignificance::from_p_value(p).into()
}

/// `%g`-style formatting with six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to the value that [`fmt_sig6`] prints.
pub fn round_sig6(x: f64) -> f64 {
    fmt_sig6(x).parse().unwrap_or(x)
}

/// Text-table label for a category key: `medical_emergency` -> `Medical Emergency`.
pub fn display_name(category: &str) -> String {
    category
        .split('_')
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(first) => first.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<String>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedTable {
    pub text: String,
    pub csv: String,
}

fn align_columns(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Outcome of one ADF cell; the error text is shown as a note for NC cells.
pub type AdfOutcome = Result<AdfResult, String>;

#[derive(Debug, Clone)]
pub struct AdfRow {
    pub variable: String,
    pub bulletin_levels: AdfOutcome,
    pub bulletin_differenced: AdfOutcome,
    pub tweet_levels: AdfOutcome,
    pub tweet_differenced: AdfOutcome,
}

impl AdfRow {
    fn cells(&self) -> [&AdfOutcome; 4] {
        [
            &self.bulletin_levels,
            &self.bulletin_differenced,
            &self.tweet_levels,
            &self.tweet_differenced,
        ]
    }
}

const ADF_CSV_HEADER: [&str; 13] = [
    "variable",
    "bulletin_level_tau",
    "bulletin_level_sig",
    "bulletin_level_lag",
    "bulletin_diff_tau",
    "bulletin_diff_sig",
    "bulletin_diff_lag",
    "tweet_level_tau",
    "tweet_level_sig",
    "tweet_level_lag",
    "tweet_diff_tau",
    "tweet_diff_sig",
    "tweet_diff_lag",
];

/// Wide table: tau and significance at levels and first difference, per source.
pub fn render_adf_table(rows: &[AdfRow]) -> RenderedTable {
    let mut text_rows = vec![
        vec![
            String::new(),
            "Bulletin".into(),
            String::new(),
            String::new(),
            String::new(),
            "Tweet".into(),
        ],
        vec![
            "Variable".into(),
            "Levels tau".into(),
            "Sig".into(),
            "1st diff tau".into(),
            "Sig".into(),
            "Levels tau".into(),
            "Sig".into(),
            "1st diff tau".into(),
            "Sig".into(),
        ],
    ];
    let mut csv_rows = Vec::with_capacity(rows.len());
    let mut notes = Vec::new();
    for row in rows {
        let mut text = vec![display_name(&row.variable)];
        let mut csv = vec![row.variable.clone()];
        for (cell, label) in row.cells().into_iter().zip([
            "bulletin levels",
            "bulletin differenced",
            "tweet levels",
            "tweet differenced",
        ]) {
            match cell {
                Ok(r) => {
                    text.push(format!("{:.4}", r.tau));
                    text.push(r.significance.marker().into());
                    csv.push(fmt_sig6(r.tau));
                    csv.push(r.significance.marker().into());
                    csv.push(r.lag_m.to_string());
                }
                Err(reason) => {
                    text.extend(["NC".to_string(), "NC".to_string()]);
                    csv.extend(["NC".to_string(), "NC".to_string(), String::new()]);
                    notes.push(format!(
                        "{} ({label}): {reason}",
                        display_name(&row.variable)
                    ));
                }
            }
        }
        text_rows.push(text);
        csv_rows.push(csv);
    }
    let mut text = align_columns(&text_rows);
    text.push_str("Critical values of tau: -1.951 at 5%, -2.623 at 1%. **: 1%; *: 5%; NS: not significant; NC: not computable; UC: sample size outside the tabulated range.\n");
    for n in notes {
        text.push_str(&format!("NC {n}\n"));
    }
    RenderedTable {
        text,
        csv: csv_string(&ADF_CSV_HEADER, &csv_rows),
    }
}

/// One rendered row of the Granger table. Numbers are already rounded to six
/// significant digits, so a CSV round trip reproduces the row exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerRow {
    pub variable: String,
    #[serde(with = "display_serde")]
    pub caused_set: Source,
    #[serde(with = "display_serde")]
    pub causal_set: Source,
    pub lag_p: Option<usize>,
    pub f_value: Option<f64>,
    pub df_num: Option<usize>,
    pub df_den: Option<usize>,
    pub p_value: Option<f64>,
    #[serde(with = "display_serde")]
    pub significance: SignificanceCode,
}

/// Fields written with `Display` and read back with `FromStr`.
mod display_serde {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub fn granger_rows(records: &[PairwiseRecord]) -> Vec<GrangerRow> {
    records
        .iter()
        .map(|rec| match &rec.outcome {
            Ok(r) => GrangerRow {
                variable: rec.variable.clone(),
                caused_set: rec.caused,
                causal_set: rec.causal,
                lag_p: Some(r.lag_p),
                f_value: Some(round_sig6(r.f_value)),
                df_num: Some(r.df_num),
                df_den: Some(r.df_den),
                p_value: Some(round_sig6(r.p_value)),
                significance: r.significance.into(),
            },
            Err(_) => GrangerRow {
                variable: rec.variable.clone(),
                caused_set: rec.caused,
                causal_set: rec.causal,
                lag_p: None,
                f_value: None,
                df_num: None,
                df_den: None,
                p_value: None,
                significance: SignificanceCode::NotComputable,
            },
        })
        .collect()
}

const GRANGER_CSV_HEADER: [&str; 9] = [
    "variable",
    "caused_set",
    "causal_set",
    "lag_p",
    "f_value",
    "df_num",
    "df_den",
    "p_value",
    "significance",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Two rows per variable, caused set first. Skipped pairs are marked NC and
/// their reasons listed under the text table.
pub fn render_granger_table(records: &[PairwiseRecord]) -> RenderedTable {
    let rows = granger_rows(records);
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.variable.clone(),
                r.caused_set.label().into(),
                r.causal_set.label().into(),
                opt(r.lag_p),
                r.f_value.map(fmt_sig6).unwrap_or_default(),
                opt(r.df_num),
                opt(r.df_den),
                r.p_value.map(fmt_sig6).unwrap_or_default(),
                r.significance.to_string(),
            ]
        })
        .collect();

    let mut text_rows = vec![vec![
        "Variable".to_string(),
        "Caused set (Y)".into(),
        "Causal set (X)".into(),
        "p".into(),
        "F".into(),
        "d.f.".into(),
        "p-value".into(),
        "Remark".into(),
    ]];
    let mut last_variable = None;
    for r in &rows {
        let name = if last_variable == Some(&r.variable) {
            String::new()
        } else {
            display_name(&r.variable)
        };
        last_variable = Some(&r.variable);
        text_rows.push(vec![
            name,
            r.caused_set.label().into(),
            r.causal_set.label().into(),
            opt(r.lag_p),
            r.f_value
                .map(|f| format!("{f:.3}"))
                .unwrap_or_else(|| "NC".into()),
            match (r.df_num, r.df_den) {
                (Some(a), Some(b)) => format!("{a} & {b}"),
                _ => String::new(),
            },
            r.p_value
                .map(|p| format!("{p:.4}"))
                .unwrap_or_else(|| "NC".into()),
            r.significance.to_string(),
        ]);
    }
    let mut text = align_columns(&text_rows);
    text.push_str("***: 0.1%; **: 1%; *: 5%; NS: not significant; NC: not computable.\n");
    for rec in records {
        if let Err(reason) = &rec.outcome {
            text.push_str(&format!(
                "NC {} ({} caused by {}): {reason}\n",
                display_name(&rec.variable),
                rec.caused.label(),
                rec.causal.label()
            ));
        }
    }
    RenderedTable {
        text,
        csv: csv_string(&GRANGER_CSV_HEADER, &csv_rows),
    }
}

/// Parses the CSV written by [`render_granger_table`]; `#` lines are ignored.
pub fn parse_granger_csv(csv: &str) -> Result<Vec<GrangerRow>, ReportError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(csv.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ReportError::Csv(e.to_string()))?;
    if headers.iter().ne(GRANGER_CSV_HEADER) {
        return Err(ReportError::Csv(format!("unexpected header {headers:?}")));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(|e| ReportError::Csv(e.to_string())))
        .collect()
}

/// Document count per region.
pub fn corpus_stats(docs: &[Document]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for d in docs {
        *out.entry(d.region.clone()).or_insert(0) += 1;
    }
    out
}

/// Per-region tweet and bulletin counts with a closing total row.
pub fn render_corpus_stats(docs: &[Document]) -> RenderedTable {
    let mut by_region: BTreeMap<&str, [usize; 2]> = BTreeMap::new();
    for d in docs {
        let slot = match d.source {
            Source::Tweet => 0,
            Source::Bulletin => 1,
        };
        by_region.entry(d.region.as_str()).or_default()[slot] += 1;
    }
    let mut rows: Vec<Vec<String>> = by_region
        .iter()
        .map(|(region, [t, b])| {
            vec![
                region.to_string(),
                t.to_string(),
                b.to_string(),
                (t + b).to_string(),
            ]
        })
        .collect();
    let tweets: usize = by_region.values().map(|c| c[0]).sum();
    let bulletins: usize = by_region.values().map(|c| c[1]).sum();
    rows.push(vec![
        "total".into(),
        tweets.to_string(),
        bulletins.to_string(),
        docs.len().to_string(),
    ]);
    let header = ["region", "tweets", "bulletins", "documents"];
    let mut text_rows = vec![header.iter().map(|s| s.to_string()).collect()];
    text_rows.extend(rows.iter().cloned());
    RenderedTable {
        text: align_columns(&text_rows),
        csv: csv_string(&header, &rows),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatterRecord {
    pub word: String,
    pub frequency: u64,
    pub sentiment: i8,
}

/// The `top_n` most frequent words, ties broken alphabetically, each tagged
/// with its polarity.
pub fn chatterplot_export<'a, I>(
    docs: I,
    slex: &SentimentLexicon,
    top_n: usize,
    exclude: &[String],
) -> Vec<ChatterRecord>
where
    I: IntoIterator<Item = &'a TokenList>,
{
    let exclude: HashSet<&str> = exclude.iter().map(String::as_str).collect();
    let mut freq: HashMap<&str, u64> = HashMap::new();
    for tokens in docs {
        for t in tokens.as_slice() {
            if !exclude.contains(t.as_str()) {
                *freq.entry(t.as_str()).or_insert(0) += 1;
            }
        }
    }
    let mut words: Vec<(&str, u64)> = freq.into_iter().collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    words
        .into_iter()
        .take(top_n)
        .map(|(word, frequency)| ChatterRecord {
            word: word.to_string(),
            frequency,
            sentiment: sentiment_of(word, slex),
        })
        .collect()
}

pub fn render_chatterplot_csv(records: &[ChatterRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.word.clone(),
                r.frequency.to_string(),
                r.sentiment.to_string(),
            ]
        })
        .collect();
    csv_string(&["word", "frequency", "sentiment"], &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_timestamp;
    use crate::econ::{AdfSignificance, GrangerResult, Stage};
    use proptest::prelude::*;

    fn adf(tau: f64, sig: AdfSignificance, stage: Stage) -> AdfOutcome {
        Ok(AdfResult {
            tau,
            lag_m: 0,
            stage,
            significance: sig,
            stationary: sig != AdfSignificance::NotSignificant,
            series_len: 44,
        })
    }

    fn granger(variable: &str, caused: Source, causal: Source, f: f64, p: f64) -> PairwiseRecord {
        PairwiseRecord {
            variable: variable.into(),
            caused,
            causal,
            outcome: Ok(GrangerResult {
                variable: variable.into(),
                caused: caused.label().into(),
                causal: causal.label().into(),
                lag_p: 1,
                f_value: f,
                df_num: 1,
                df_den: 30,
                p_value: p,
                significance: GrangerSignificance::from_p_value(p),
            }),
        }
    }

    #[test]
    fn significance_codes() {
        assert_eq!(significance_code(0.0003).as_str(), "***");
        assert_eq!(significance_code(0.0036).as_str(), "**");
        assert_eq!(significance_code(0.0133).as_str(), "*");
        assert_eq!(significance_code(0.05).as_str(), "NS");
        assert_eq!(significance_code(0.001).as_str(), "**");
        assert_eq!(significance_code(0.01).as_str(), "*");
        for c in ["***", "**", "*", "NS", "NC"] {
            assert_eq!(c.parse::<SignificanceCode>().unwrap().as_str(), c);
        }
    }

    proptest! {
        #[test]
        fn significance_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(significance_code(lo) <= significance_code(hi));
        }

        #[test]
        fn sig6_round_trips(x in -1e9f64..1e9) {
            let s = fmt_sig6(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(fmt_sig6(back), s);
            prop_assert!((back - x).abs() <= 5e-6 * x.abs());
        }
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig6(16.673), "16.673");
        assert_eq!(fmt_sig6(0.0003035994128711742), "0.000303599");
        assert_eq!(fmt_sig6(1.385859848558143e-06), "1.38586e-06");
        assert_eq!(fmt_sig6(-6.08114), "-6.08114");
        assert_eq!(fmt_sig6(1234567.0), "1.23457e+06");
        assert_eq!(fmt_sig6(100000.0), "100000");
        assert_eq!(fmt_sig6(0.5), "0.5");
        assert_eq!(fmt_sig6(0.0), "0");
        assert_eq!(fmt_sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn display_names() {
        assert_eq!(display_name("medical_emergency"), "Medical Emergency");
        assert_eq!(display_name("help"), "Help");
    }

    #[test]
    fn adf_table_layout() {
        let rows = vec![
            AdfRow {
                variable: "help".into(),
                bulletin_levels: adf(-1.5957, AdfSignificance::NotSignificant, Stage::AtLevels),
                bulletin_differenced: adf(-6.0811, AdfSignificance::Sig1, Stage::FirstDifferenced),
                tweet_levels: adf(-0.0196, AdfSignificance::NotSignificant, Stage::AtLevels),
                tweet_differenced: adf(-6.7529, AdfSignificance::Sig1, Stage::FirstDifferenced),
            },
            AdfRow {
                variable: "sympathy".into(),
                bulletin_levels: Err("series is constant".into()),
                bulletin_differenced: Err("series is constant".into()),
                tweet_levels: adf(-1.6691, AdfSignificance::NotSignificant, Stage::AtLevels),
                tweet_differenced: adf(-5.8757, AdfSignificance::Sig1, Stage::FirstDifferenced),
            },
        ];
        let t = render_adf_table(&rows);
        let lines: Vec<&str> = t.text.lines().collect();
        let help: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(
            help,
            ["Help", "-1.5957", "NS", "-6.0811", "**", "-0.0196", "NS", "-6.7529", "**"]
        );
        let sym: Vec<&str> = lines[3].split_whitespace().collect();
        assert_eq!(&sym[..5], ["Sympathy", "NC", "NC", "NC", "NC"]);

        let csv_lines: Vec<&str> = t.csv.lines().collect();
        assert_eq!(csv_lines[0], ADF_CSV_HEADER.join(","));
        assert!(csv_lines[1].starts_with("help,-1.5957,NS,0,-6.0811,**,0,"));
        assert!(csv_lines[2].starts_with("sympathy,NC,NC,,NC,NC,,"));
    }

    #[test]
    fn adf_table_empty() {
        let t = render_adf_table(&[]);
        assert_eq!(t.csv.lines().count(), 1);
        assert_eq!(t.text.lines().count(), 3);
    }

    #[test]
    fn granger_table_and_round_trip() {
        let records = vec![
            granger(
                "medical_emergency",
                Source::Bulletin,
                Source::Tweet,
                6.932,
                0.0133,
            ),
            granger(
                "medical_emergency",
                Source::Tweet,
                Source::Bulletin,
                16.673,
                0.0003035994128711742,
            ),
            PairwiseRecord {
                variable: "sympathy".into(),
                caused: Source::Bulletin,
                causal: Source::Tweet,
                outcome: Err("regressor series is constant".into()),
            },
        ];
        let t = render_granger_table(&records);
        let lines: Vec<&str> = t.csv.lines().collect();
        assert_eq!(
            lines[0],
            "variable,caused_set,causal_set,lag_p,f_value,df_num,df_den,p_value,significance"
        );
        assert_eq!(
            lines[1],
            "medical_emergency,Bulletin,Tweet,1,6.932,1,30,0.0133,*"
        );
        assert_eq!(
            lines[2],
            "medical_emergency,Tweet,Bulletin,1,16.673,1,30,0.000303599,***"
        );
        assert_eq!(lines[3], "sympathy,Bulletin,Tweet,,,,,,NC");
        assert!(t.text.contains("Medical Emergency"));
        assert!(t.text.contains("regressor series is constant"));

        let parsed = parse_granger_csv(&format!("{}# config_sha256=abc\n", t.csv)).unwrap();
        assert_eq!(parsed, granger_rows(&records));
    }

    #[test]
    fn granger_rows_count() {
        let mut records = Vec::new();
        for i in 0..23 {
            let v = format!("v{i}");
            records.push(granger(&v, Source::Bulletin, Source::Tweet, 1.0, 0.3));
            records.push(granger(&v, Source::Tweet, Source::Bulletin, 1.0, 0.3));
        }
        assert_eq!(render_granger_table(&records).csv.lines().count(), 47);
        assert_eq!(render_granger_table(&[]).csv.lines().count(), 1);
    }

    fn doc(id: &str, region: &str, source: Source) -> Document {
        Document {
            id: id.into(),
            timestamp: parse_timestamp("2020-03-01").unwrap(),
            region: region.into(),
            source,
            text: String::new(),
            user_location: None,
        }
    }

    #[test]
    fn stats() {
        let docs: Vec<Document> = ["A", "A", "B", "A", "B"]
            .iter()
            .enumerate()
            .map(|(i, r)| doc(&i.to_string(), r, Source::Tweet))
            .collect();
        let s = corpus_stats(&docs);
        assert_eq!(
            s,
            BTreeMap::from([("A".to_string(), 3), ("B".to_string(), 2)])
        );
        assert!(corpus_stats(&[]).is_empty());
        let t = render_corpus_stats(&docs);
        assert!(t.csv.ends_with("total,5,0,5\n"));
    }

    proptest! {
        #[test]
        fn stats_sum_to_total(regions in proptest::collection::vec(0u8..5, 0..60)) {
            let docs: Vec<Document> = regions
                .iter()
                .enumerate()
                .map(|(i, r)| doc(&i.to_string(), &format!("r{r}"), if i % 2 == 0 { Source::Tweet } else { Source::Bulletin }))
                .collect();
            prop_assert_eq!(corpus_stats(&docs).values().sum::<usize>(), docs.len());
        }
    }

    #[test]
    fn chatterplot() {
        let slex = SentimentLexicon::new(["help"], ["corona"]).unwrap();
        let docs = [TokenList::from(&["corona", "corona", "help"][..])];
        let out = chatterplot_export(&docs, &slex, DEFAULT_TOP_N, &[]);
        assert_eq!(
            out,
            vec![
                ChatterRecord {
                    word: "corona".into(),
                    frequency: 2,
                    sentiment: -1
                },
                ChatterRecord {
                    word: "help".into(),
                    frequency: 1,
                    sentiment: 1
                },
            ]
        );
        let docs = [TokenList::from(
            &["india", "india", "india", "help", "cases", "cases"][..],
        )];
        let out = chatterplot_export(&docs, &slex, 1, &["india".to_string()]);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].word, "cases");
        assert_eq!(out[0].sentiment, 0);
        assert_eq!(
            render_chatterplot_csv(&out),
            "word,frequency,sentiment\ncases,2,0\n"
        );
    }

    proptest! {
        #[test]
        fn chatterplot_bounds(words in proptest::collection::vec("[a-e]{1,2}", 0..80), top_n in 0usize..10) {
            let docs = [TokenList(words)];
            let out = chatterplot_export(&docs, &SentimentLexicon::default(), top_n, &[]);
            prop_assert!(out.len() <= top_n);
            prop_assert!(out.windows(2).all(|w| w[0].frequency >= w[1].frequency));
            let unique: HashSet<&str> = out.iter().map(|r| r.word.as_str()).collect();
            prop_assert_eq!(unique.len(), out.len());
        }
    }
}
