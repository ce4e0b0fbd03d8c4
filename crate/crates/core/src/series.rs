//! Daily emotion series: aggregation of document scores, differencing,
//! date alignment of two series, and CSV import/export.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Days, FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Source};
use crate::lexicon::CategoryScores;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("no documents for region `{region}`, source {source_kind}")]
    EmptySelection { region: String, source_kind: Source },
    #[error("series needs at least {needed} values, has {len}")]
    TooShort { needed: usize, len: usize },
    #[error("series date ranges overlap on fewer than 2 days")]
    NoOverlap,
    #[error("cannot pair category `{0}` with `{1}`")]
    CategoryMismatch(String, String),
    #[error("{0} observations cannot support lag {1} (need at least {2})")]
    NotEstimable(usize, usize, usize),
    #[error("series CSV: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    /// Mean of per-document normalized scores.
    #[default]
    MeanNormalized,
    /// Summed raw counts over summed token counts.
    Pooled,
}

impl fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregationMode::MeanNormalized => "mean_normalized",
            AggregationMode::Pooled => "pooled",
        })
    }
}

impl FromStr for AggregationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean_normalized" => Ok(Self::MeanNormalized),
            "pooled" => Ok(Self::Pooled),
            other => Err(format!("unknown aggregation mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapPolicy {
    #[default]
    Zero,
    CarryForward,
}

impl fmt::Display for GapPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapPolicy::Zero => "zero",
            GapPolicy::CarryForward => "carry-forward",
        })
    }
}

impl FromStr for GapPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(Self::Zero),
            "carry-forward" | "carry_forward" => Ok(Self::CarryForward),
            other => Err(format!("unknown gap policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AggregateOptions {
    pub mode: AggregationMode,
    pub gap_policy: GapPolicy,
    pub utc_offset: FixedOffset,
    /// When set, the series spans exactly this inclusive range.
    pub span: Option<(NaiveDate, NaiveDate)>,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        Self {
            mode: AggregationMode::default(),
            gap_policy: GapPolicy::default(),
            utc_offset: FixedOffset::east_opt(0).expect("zero offset"),
            span: None,
        }
    }
}

/// One value per consecutive calendar day.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionSeries {
    pub region: String,
    pub source: Source,
    pub category: String,
    pub start_date: NaiveDate,
    pub values: Vec<f64>,
}

impl EmotionSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Last covered date. Panics on an empty series.
    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.values.len() - 1)
    }

    pub fn date_at(&self, i: usize) -> NaiveDate {
        self.start_date + Days::new(i as u64)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.values.len()).map(|i| self.date_at(i))
    }

    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.region, self.source, self.category)
    }
}

#[derive(Default)]
struct DayAccumulator {
    normalized: Vec<f64>,
    raw: u64,
    tokens: u64,
}

/// Builds the daily series of one category for one (region, source) pair.
///
/// The day totals do not depend on document order: per-day normalized scores
/// are sorted before summing and pooled counts are integers.
pub fn aggregate<'a, I>(
    scored: I,
    category: &str,
    region: &str,
    source: Source,
    opts: &AggregateOptions,
) -> Result<EmotionSeries, SeriesError>
where
    I: IntoIterator<Item = (&'a Document, &'a CategoryScores)>,
{
    let mut days: BTreeMap<NaiveDate, DayAccumulator> = BTreeMap::new();
    for (doc, scores) in scored {
        if doc.region != region || doc.source != source {
            continue;
        }
        let day = days.entry(doc.local_date(opts.utc_offset)).or_default();
        day.normalized.push(scores.normalized_of(category));
        day.raw += scores.raw_of(category);
        day.tokens += scores.total_tokens as u64;
    }
    if let Some((start, end)) = opts.span {
        days.retain(|d, _| start <= *d && *d <= end);
    }
    let (Some(&first), Some(&last)) = (days.keys().next(), days.keys().next_back()) else {
        return Err(SeriesError::EmptySelection {
            region: region.to_string(),
            source_kind: source,
        });
    };
    let (start, end) = opts.span.unwrap_or((first, last));

    let len = (end - start).num_days() as usize + 1;
    let mut values = Vec::with_capacity(len);
    let mut gaps = 0usize;
    for i in 0..len {
        let date = start + Days::new(i as u64);
        let value = match days.get_mut(&date) {
            Some(day) => match opts.mode {
                AggregationMode::MeanNormalized => {
                    day.normalized.sort_by(f64::total_cmp);
                    day.normalized.iter().sum::<f64>() / day.normalized.len() as f64
                }
                AggregationMode::Pooled => day.raw as f64 / day.tokens.max(1) as f64,
            },
            None => {
                gaps += 1;
                match opts.gap_policy {
                    GapPolicy::Zero => 0.0,
                    GapPolicy::CarryForward => values.last().copied().unwrap_or(0.0),
                }
            }
        };
        values.push(value);
    }
    if gaps > 0 {
        log::warn!(
            "{region}/{source}/{category}: {gaps} of {len} day(s) without documents filled ({})",
            opts.gap_policy
        );
    }
    Ok(EmotionSeries {
        region: region.to_string(),
        source,
        category: category.to_string(),
        start_date: start,
        values,
    })
}

pub fn difference(s: &EmotionSeries) -> Result<EmotionSeries, SeriesError> {
    if s.values.len() < 2 {
        return Err(SeriesError::TooShort {
            needed: 2,
            len: s.values.len(),
        });
    }
    Ok(EmotionSeries {
        start_date: s.date_at(1),
        values: s.values.windows(2).map(|w| w[1] - w[0]).collect(),
        ..s.clone()
    })
}

/// Two series on an identical date range; `y` is the caused side in a
/// causality test and `x` the causal side.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSeries {
    pub y: EmotionSeries,
    pub x: EmotionSeries,
}

impl PairedSeries {
    pub fn n(&self) -> usize {
        self.y.values.len()
    }

    /// Checks that `lag` leaves enough observations (`n >= 2*lag + 5`).
    pub fn check_lag(&self, lag: usize) -> Result<(), SeriesError> {
        let needed = 2 * lag + 5;
        if self.n() < needed {
            return Err(SeriesError::NotEstimable(self.n(), lag, needed));
        }
        Ok(())
    }

    pub fn swapped(&self) -> PairedSeries {
        PairedSeries {
            y: self.x.clone(),
            x: self.y.clone(),
        }
    }
}

fn slice_between(s: &EmotionSeries, start: NaiveDate, end: NaiveDate) -> EmotionSeries {
    let from = (start - s.start_date).num_days() as usize;
    let to = (end - s.start_date).num_days() as usize;
    EmotionSeries {
        start_date: start,
        values: s.values[from..=to].to_vec(),
        ..s.clone()
    }
}

/// Truncates both series to their common dates. `a` becomes `y`, `b` becomes `x`.
pub fn align(
    a: &EmotionSeries,
    b: &EmotionSeries,
    allow_category_mismatch: bool,
) -> Result<PairedSeries, SeriesError> {
    if !allow_category_mismatch && a.category != b.category {
        return Err(SeriesError::CategoryMismatch(
            a.category.clone(),
            b.category.clone(),
        ));
    }
    if a.is_empty() || b.is_empty() {
        return Err(SeriesError::NoOverlap);
    }
    let start = a.start_date.max(b.start_date);
    let end = a.end_date().min(b.end_date());
    if end <= start {
        return Err(SeriesError::NoOverlap);
    }
    Ok(PairedSeries {
        y: slice_between(a, start, end),
        x: slice_between(b, start, end),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesRow {
    date: NaiveDate,
    region: String,
    source: Source,
    category: String,
    value: f64,
}

/// Writes `date,region,source,category,value` rows, one block per series.
pub fn write_series_csv<W: Write>(out: W, series: &[EmotionSeries]) -> Result<(), SeriesError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for s in series {
        for (date, &value) in s.dates().zip(&s.values) {
            w.serialize(SeriesRow {
                date,
                region: s.region.clone(),
                source: s.source,
                category: s.category.clone(),
                value,
            })
            .map_err(|e| SeriesError::Csv(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| SeriesError::Csv(e.to_string()))
}

/// Reads series written by [`write_series_csv`]; `#` lines are ignored.
/// Rows are grouped by (region, source, category) and must be day-contiguous.
pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<EmotionSeries>, SeriesError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let mut grouped: BTreeMap<(String, Source, String), Vec<(NaiveDate, f64)>> = BTreeMap::new();
    for row in reader.deserialize::<SeriesRow>() {
        let row = row.map_err(|e| SeriesError::Csv(e.to_string()))?;
        grouped
            .entry((row.region, row.source, row.category))
            .or_default()
            .push((row.date, row.value));
    }
    let mut out = Vec::with_capacity(grouped.len());
    for ((region, source, category), mut points) in grouped {
        points.sort_by_key(|p| p.0);
        let start_date = points[0].0;
        for (i, (date, _)) in points.iter().enumerate() {
            if *date != start_date + Days::new(i as u64) {
                return Err(SeriesError::Csv(format!(
                    "{region}/{source}/{category}: dates are not contiguous at {date}"
                )));
            }
        }
        out.push(EmotionSeries {
            region,
            source,
            category,
            start_date,
            values: points.into_iter().map(|p| p.1).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_timestamp;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn date(m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, m, d).unwrap()
    }

    fn doc(id: &str, day: &str) -> Document {
        Document {
            id: id.into(),
            timestamp: parse_timestamp(day).unwrap(),
            region: "delhi".into(),
            source: Source::Tweet,
            text: String::new(),
            user_location: None,
        }
    }

    fn scores(raw: u64, total: usize) -> CategoryScores {
        CategoryScores {
            raw: [("fear".to_string(), raw)].into(),
            normalized: [("fear".to_string(), raw as f64 / total.max(1) as f64)].into(),
            total_tokens: total,
        }
    }

    fn series(start: NaiveDate, values: Vec<f64>) -> EmotionSeries {
        EmotionSeries {
            region: "delhi".into(),
            source: Source::Tweet,
            category: "fear".into(),
            start_date: start,
            values,
        }
    }

    #[test]
    fn mean_of_normalized() {
        let docs = [
            doc("1", "2020-03-01T01:00:00Z"),
            doc("2", "2020-03-01T05:00:00Z"),
        ];
        let sc = [scores(1, 5), scores(2, 5)];
        let s = aggregate(
            docs.iter().zip(&sc),
            "fear",
            "delhi",
            Source::Tweet,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(s.values.len(), 1);
        assert!((s.values[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn gap_fill() {
        let docs = [doc("1", "2020-03-01"), doc("2", "2020-03-03")];
        let sc = [scores(1, 2), scores(1, 4)];
        let s = aggregate(
            docs.iter().zip(&sc),
            "fear",
            "delhi",
            Source::Tweet,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(s.values, vec![0.5, 0.0, 0.25]);
        assert_eq!(s.start_date, date(3, 1));

        let opts = AggregateOptions {
            gap_policy: GapPolicy::CarryForward,
            ..Default::default()
        };
        let s = aggregate(docs.iter().zip(&sc), "fear", "delhi", Source::Tweet, &opts).unwrap();
        assert_eq!(s.values, vec![0.5, 0.5, 0.25]);
    }

    #[test]
    fn pooled_mode() {
        let docs = [doc("1", "2020-03-01"), doc("2", "2020-03-01")];
        let sc = [scores(2, 10), scores(1, 5)];
        let opts = AggregateOptions {
            mode: AggregationMode::Pooled,
            ..Default::default()
        };
        let s = aggregate(docs.iter().zip(&sc), "fear", "delhi", Source::Tweet, &opts).unwrap();
        assert!((s.values[0] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_selection() {
        let docs = [doc("1", "2020-03-01")];
        let sc = [scores(1, 2)];
        let err = aggregate(
            docs.iter().zip(&sc),
            "fear",
            "punjab",
            Source::Tweet,
            &Default::default(),
        );
        assert!(matches!(err, Err(SeriesError::EmptySelection { .. })));
    }

    #[test]
    fn span_pads_both_ends() {
        let docs = [doc("1", "2020-03-02")];
        let sc = [scores(1, 2)];
        let opts = AggregateOptions {
            span: Some((date(3, 1), date(3, 4))),
            ..Default::default()
        };
        let s = aggregate(docs.iter().zip(&sc), "fear", "delhi", Source::Tweet, &opts).unwrap();
        assert_eq!(s.values, vec![0.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn aggregate_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let docs: Vec<Document> = (0..60)
            .map(|i| {
                doc(
                    &i.to_string(),
                    &format!("2020-03-{:02}T{:02}:00:00Z", 1 + i % 5, i % 24),
                )
            })
            .collect();
        let sc: Vec<CategoryScores> = (0..60)
            .map(|_| scores(rng.gen_range(0..7), rng.gen_range(7..40)))
            .collect();
        let mut pairs: Vec<(&Document, &CategoryScores)> = docs.iter().zip(&sc).collect();
        for mode in [AggregationMode::MeanNormalized, AggregationMode::Pooled] {
            let opts = AggregateOptions {
                mode,
                ..Default::default()
            };
            let reference =
                aggregate(pairs.iter().copied(), "fear", "delhi", Source::Tweet, &opts).unwrap();
            for _ in 0..5 {
                for i in (1..pairs.len()).rev() {
                    pairs.swap(i, rng.gen_range(0..=i));
                }
                let again = aggregate(pairs.iter().copied(), "fear", "delhi", Source::Tweet, &opts)
                    .unwrap();
                let bits =
                    |s: &EmotionSeries| s.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
                assert_eq!(bits(&reference), bits(&again));
            }
        }
    }

    #[test]
    fn difference_examples() {
        let d = difference(&series(date(3, 1), vec![1.0, 1.0, 1.0])).unwrap();
        assert_eq!(d.values, vec![0.0, 0.0]);
        assert_eq!(d.start_date, date(3, 2));
        assert_eq!(
            difference(&series(date(3, 1), vec![1.0, 2.0, 4.0]))
                .unwrap()
                .values,
            vec![1.0, 2.0]
        );
        assert!(matches!(
            difference(&series(date(3, 1), vec![1.0])),
            Err(SeriesError::TooShort { .. })
        ));
    }

    #[test]
    fn align_examples() {
        let a = series(date(3, 1), vec![1.0; 31]);
        let b = series(date(3, 15), vec![2.0; 32]);
        let p = align(&a, &b, false).unwrap();
        assert_eq!(p.n(), 17);
        assert_eq!(p.y.start_date, date(3, 15));
        assert_eq!(p.x.end_date(), date(3, 31));

        let c = series(date(5, 1), vec![1.0; 3]);
        assert!(matches!(align(&a, &c, false), Err(SeriesError::NoOverlap)));

        let same = align(&a, &a, false).unwrap();
        assert_eq!(same.y, a);
        assert_eq!(same.x, a);

        let mut other = b.clone();
        other.category = "help".into();
        assert!(matches!(
            align(&a, &other, false),
            Err(SeriesError::CategoryMismatch(..))
        ));
        assert!(align(&a, &other, true).is_ok());
    }

    #[test]
    fn lag_guard() {
        let p = align(
            &series(date(3, 1), vec![0.0; 9]),
            &series(date(3, 1), vec![0.0; 9]),
            false,
        )
        .unwrap();
        assert!(p.check_lag(2).is_ok());
        assert!(matches!(
            p.check_lag(3),
            Err(SeriesError::NotEstimable(9, 3, 11))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let a = series(date(3, 1), vec![0.25, 0.5, 0.125]);
        let mut b = series(date(3, 2), vec![1.0, 0.0]);
        b.category = "help".into();
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &[a.clone(), b.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text
            .starts_with("date,region,source,category,value\n2020-03-01,delhi,tweet,fear,0.25\n"));
        let back = read_series_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![a, b]);
    }

    proptest! {
        #[test]
        fn differencing_inverts_by_cumulative_sum(values in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let s = series(date(3, 1), values.clone());
            let d = difference(&s).unwrap();
            prop_assert_eq!(d.len(), s.len() - 1);
            if s.len() >= 3 {
                prop_assert_eq!(difference(&d).unwrap().len(), s.len() - 2);
            }
            let mut acc = values[0];
            for (i, step) in d.values.iter().enumerate() {
                acc += step;
                prop_assert!((acc - values[i + 1]).abs() <= 1e-9 * (1.0 + values[i + 1].abs()));
            }
        }

        #[test]
        fn align_covers_same_dates_both_ways(sa in 0u64..40, la in 2usize..40, sb in 0u64..40, lb in 2usize..40) {
            let a = series(date(3, 1) + Days::new(sa), vec![0.0; la]);
            let b = series(date(3, 1) + Days::new(sb), vec![1.0; lb]);
            match (align(&a, &b, false), align(&b, &a, false)) {
                (Ok(p), Ok(q)) => {
                    prop_assert_eq!(p.y.start_date, q.y.start_date);
                    prop_assert_eq!(p.n(), q.n());
                    prop_assert_eq!(p.y.start_date, p.x.start_date);
                    prop_assert!(p.n() >= 2);
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "align is not symmetric"),
            }
        }
    }
}
