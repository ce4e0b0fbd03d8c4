//! Document ingestion, collection-query generation and user-location filtering.
//!
//! Three on-disk shapes are understood:
//!
//! - tweet JSONL, one object per line with `id`, `created_at` (RFC3339) and `text`,
//!   plus optional `user_location` and `region`;
//! - tweet CSV with the same field names in a header row;
//! - a bulletin directory of `YYYY-MM-DD_<region>.txt` files, one bulletin each.
//!
//! Malformed records are skipped and counted rather than aborting the load.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Region key used for documents that carry no region information.
pub const NATIONAL_REGION: &str = "national";

/// Bucket for location-matched documents that matched the country but no region.
pub const UNASSIGNED_NATIONAL: &str = "unassigned-national";

/// Plain-query prefixes used for the content-based collection (`term <region>`).
pub const DEFAULT_QUERY_PREFIXES: &[&str] = &[
    "corona ",
    "lockdown ",
    "coronain ",
    "covidin ",
    "stayathome ",
    "covid ",
    "coronavirus ",
];

/// Hashtag prefixes used for the content-based collection (`#<prefix><region>`).
pub const DEFAULT_HASHTAG_PREFIXES: &[&str] = &[
    "covid",
    "corona",
    "coronavirus",
    "covidin",
    "coronain",
    "coronavirusin",
    "covid19",
    "covid2019",
];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    UnreadablePath {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing required field(s): {}", missing.join(", "))]
    SchemaError { path: PathBuf, missing: Vec<String> },
    #[error("{path}: no valid documents ({skipped} record(s) skipped)")]
    EmptyCorpus { path: PathBuf, skipped: usize },
    #[error("region spec has an empty canonical name")]
    EmptyRegionSpec,
    #[error("query generation needs at least one prefix")]
    NoPrefixes,
    #[error("region `{region}`: `{token}` is listed more than once")]
    DuplicateRegionToken { region: String, token: String },
    #[error("region spec file {path}: {message}")]
    RegionFile { path: PathBuf, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Tweet,
    Bulletin,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Tweet => "Tweet",
            Source::Bulletin => "Bulletin",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tweet" | "tweets" | "twt" => Ok(Source::Tweet),
            "bulletin" | "bulletins" | "blt" => Ok(Source::Bulletin),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

/// One time-stamped text item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(rename = "created_at")]
    pub timestamp: DateTime<Utc>,
    pub region: String,
    pub source: Source,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_location: Option<String>,
}

impl Document {
    /// Calendar date of the document in the given timezone.
    pub fn local_date(&self, offset: FixedOffset) -> NaiveDate {
        self.timestamp.with_timezone(&offset).date_naive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Jsonl,
    Csv,
    BulletinTextDir,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(InputFormat::Jsonl),
            "csv" => Ok(InputFormat::Csv),
            "bulletin_text_dir" | "bulletin-dir" | "dir" => Ok(InputFormat::BulletinTextDir),
            other => Err(format!("unknown input format `{other}`")),
        }
    }
}

/// Inclusive date range; documents outside it are skipped on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StudyWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl StudyWindow {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Timezone used to interpret bulletin filename dates and to check the window.
    pub utc_offset: FixedOffset,
    pub window: Option<StudyWindow>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            utc_offset: FixedOffset::east_opt(0).expect("zero offset"),
            window: None,
        }
    }
}

/// Documents in file order plus the number of records that were skipped.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub documents: Vec<Document>,
    pub skipped: usize,
}

impl LoadReport {
    pub fn record_count(&self) -> usize {
        self.documents.len() + self.skipped
    }
}

const REQUIRED_FIELDS: [&str; 3] = ["id", "created_at", "text"];

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    created_at: Option<String>,
    text: Option<String>,
    #[serde(default)]
    user_location: Option<String>,
    #[serde(default)]
    region: Option<String>,
}

pub fn load_documents(
    path: &Path,
    format: InputFormat,
    source: Source,
    opts: &LoadOptions,
) -> Result<LoadReport, CorpusError> {
    let report = match format {
        InputFormat::Jsonl => load_jsonl(path, source, opts)?,
        InputFormat::Csv => load_csv(path, source, opts)?,
        InputFormat::BulletinTextDir => load_bulletin_dir(path, source, opts)?,
    };
    if report.documents.is_empty() {
        return Err(CorpusError::EmptyCorpus {
            path: path.to_path_buf(),
            skipped: report.skipped,
        });
    }
    Ok(report)
}

fn unreadable(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::UnreadablePath {
        path: path.to_path_buf(),
        source,
    }
}

/// Accepts RFC3339, `YYYY-MM-DD HH:MM:SS` (taken as UTC) and bare dates.
pub fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.with_timezone(&Utc));
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S") {
        return Some(Utc.from_utc_datetime(&naive));
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|naive| Utc.from_utc_datetime(&naive))
}

struct StreamBuilder<'a> {
    opts: &'a LoadOptions,
    source: Source,
    seen: HashSet<String>,
    report: LoadReport,
}

impl<'a> StreamBuilder<'a> {
    fn new(source: Source, opts: &'a LoadOptions) -> Self {
        Self {
            opts,
            source,
            seen: HashSet::new(),
            report: LoadReport::default(),
        }
    }

    fn push(&mut self, record: Option<RawRecord>) {
        match record.and_then(|r| self.validate(r)) {
            Some(doc) => {
                self.seen.insert(doc.id.clone());
                self.report.documents.push(doc);
            }
            None => self.report.skipped += 1,
        }
    }

    fn validate(&self, r: RawRecord) -> Option<Document> {
        let id = match r.id? {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            _ => return None,
        };
        let id = id.trim().to_string();
        if id.is_empty() || self.seen.contains(&id) {
            return None;
        }
        let timestamp = parse_timestamp(r.created_at.as_deref()?)?;
        if let Some(window) = self.opts.window {
            if !window.contains(timestamp.with_timezone(&self.opts.utc_offset).date_naive()) {
                return None;
            }
        }
        let region = r
            .region
            .map(|s| s.trim().to_lowercase())
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| NATIONAL_REGION.to_string());
        Some(Document {
            id,
            timestamp,
            region,
            source: self.source,
            text: r.text?,
            user_location: r.user_location.filter(|s| !s.trim().is_empty()),
        })
    }
}

fn load_jsonl(path: &Path, source: Source, opts: &LoadOptions) -> Result<LoadReport, CorpusError> {
    let file = fs::File::open(path).map_err(unreadable(path))?;
    let mut builder = StreamBuilder::new(source, opts);
    for line in BufReader::new(file).lines() {
        let line = line.map_err(unreadable(path))?;
        if line.trim().is_empty() {
            continue;
        }
        builder.push(serde_json::from_str::<RawRecord>(&line).ok());
    }
    Ok(builder.report)
}

fn load_csv(path: &Path, source: Source, opts: &LoadOptions) -> Result<LoadReport, CorpusError> {
    let file = fs::File::open(path).map_err(unreadable(path))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::UnreadablePath {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?
        .clone();
    let missing: Vec<String> = REQUIRED_FIELDS
        .iter()
        .filter(|f| !headers.iter().any(|h| h.trim() == **f))
        .map(|f| f.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::SchemaError {
            path: path.to_path_buf(),
            missing,
        });
    }
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (id_col, ts_col, text_col) = (column("id"), column("created_at"), column("text"));
    let (loc_col, region_col) = (column("user_location"), column("region"));

    let mut builder = StreamBuilder::new(source, opts);
    for row in reader.records() {
        let record = row.ok().map(|row| {
            let get = |col: Option<usize>| {
                col.and_then(|c| row.get(c))
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
            };
            RawRecord {
                id: get(id_col).map(serde_json::Value::String),
                created_at: get(ts_col),
                text: get(text_col),
                user_location: get(loc_col),
                region: get(region_col),
            }
        });
        builder.push(record);
    }
    Ok(builder.report)
}

/// Splits `2020-04-01_delhi.txt` into its date and region parts.
pub fn parse_bulletin_filename(name: &str) -> Option<(NaiveDate, String)> {
    let stem = name.strip_suffix(".txt")?;
    let (date, region) = stem.split_once('_')?;
    let date = NaiveDate::parse_from_str(date, "%Y-%m-%d").ok()?;
    let region = region.trim().to_lowercase();
    if region.is_empty() {
        return None;
    }
    Some((date, region))
}

fn load_bulletin_dir(
    path: &Path,
    source: Source,
    opts: &LoadOptions,
) -> Result<LoadReport, CorpusError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .map_err(unreadable(path))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    entries.sort();

    let mut report = LoadReport::default();
    for file in entries {
        let name = file
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        let Some((date, region)) = parse_bulletin_filename(name) else {
            report.skipped += 1;
            continue;
        };
        if opts.window.is_some_and(|w| !w.contains(date)) {
            report.skipped += 1;
            continue;
        }
        let Ok(text) = fs::read_to_string(&file) else {
            report.skipped += 1;
            continue;
        };
        let midnight = date.and_hms_opt(0, 0, 0).expect("midnight exists");
        let timestamp = opts
            .utc_offset
            .from_local_datetime(&midnight)
            .single()
            .expect("fixed offsets are unambiguous")
            .with_timezone(&Utc);
        report.documents.push(Document {
            id: name.trim_end_matches(".txt").to_string(),
            timestamp,
            region,
            source,
            text,
            user_location: None,
        });
    }
    Ok(report)
}

/// A region with the names it goes by in queries and user locations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    #[serde(rename = "name")]
    pub canonical_name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub cities: Vec<String>,
}

fn normalize_phrase(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl RegionSpec {
    pub fn new<S: AsRef<str>>(
        canonical_name: &str,
        aliases: &[S],
        cities: &[S],
    ) -> Result<Self, CorpusError> {
        Self {
            canonical_name: canonical_name.to_string(),
            aliases: aliases.iter().map(|s| s.as_ref().to_string()).collect(),
            cities: cities.iter().map(|s| s.as_ref().to_string()).collect(),
        }
        .normalized()
    }

    /// Lowercases every entry and rejects empty names and repeated tokens.
    pub fn normalized(self) -> Result<Self, CorpusError> {
        let canonical_name = normalize_phrase(&self.canonical_name);
        if canonical_name.is_empty() {
            return Err(CorpusError::EmptyRegionSpec);
        }
        let aliases: Vec<String> = self.aliases.iter().map(|s| normalize_phrase(s)).collect();
        let cities: Vec<String> = self.cities.iter().map(|s| normalize_phrase(s)).collect();
        let mut seen = HashSet::new();
        for token in std::iter::once(&canonical_name)
            .chain(&aliases)
            .chain(&cities)
        {
            if token.is_empty() || !seen.insert(token.clone()) {
                return Err(CorpusError::DuplicateRegionToken {
                    region: canonical_name.clone(),
                    token: token.clone(),
                });
            }
        }
        Ok(Self {
            canonical_name,
            aliases,
            cities,
        })
    }

    /// Canonical name followed by aliases.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.canonical_name.as_str()).chain(self.aliases.iter().map(String::as_str))
    }

    /// Every token that identifies this region in a user location.
    pub fn location_tokens(&self) -> impl Iterator<Item = &str> {
        self.names().chain(self.cities.iter().map(String::as_str))
    }
}

#[derive(Debug, Deserialize)]
struct RegionFile {
    #[serde(default)]
    region: Vec<RegionSpec>,
}

/// Reads a TOML file of `[[region]]` tables with `name`, `aliases` and `cities`.
pub fn load_region_specs(path: &Path) -> Result<Vec<RegionSpec>, CorpusError> {
    let text = fs::read_to_string(path).map_err(unreadable(path))?;
    let file: RegionFile = toml::from_str(&text).map_err(|e| CorpusError::RegionFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    file.region
        .into_iter()
        .map(RegionSpec::normalized)
        .collect()
}

/// Maps any region name or alias onto its canonical name.
#[derive(Debug, Clone, Default)]
pub struct RegionResolver {
    lookup: BTreeMap<String, String>,
}

impl RegionResolver {
    pub fn new(specs: &[RegionSpec]) -> Self {
        let mut lookup = BTreeMap::new();
        for spec in specs {
            for name in spec.names() {
                lookup.insert(name.to_string(), spec.canonical_name.clone());
            }
        }
        Self { lookup }
    }

    /// Canonical name if known, otherwise the lowercased input.
    pub fn resolve(&self, region: &str) -> String {
        let key = normalize_phrase(region);
        self.lookup.get(&key).cloned().unwrap_or(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub region: String,
    pub plain_queries: Vec<String>,
    pub hashtags: Vec<String>,
}

pub fn generate_queries<S: AsRef<str>>(
    region: &RegionSpec,
    prefixes: &[S],
    hashtag_prefixes: &[S],
) -> Result<QuerySet, CorpusError> {
    if region.canonical_name.trim().is_empty() {
        return Err(CorpusError::EmptyRegionSpec);
    }
    if prefixes.is_empty() {
        return Err(CorpusError::NoPrefixes);
    }
    let names: Vec<String> = region.names().map(normalize_phrase).collect();

    let mut plain = BTreeSet::new();
    for prefix in prefixes {
        for name in &names {
            plain.insert(format!("{}{}", prefix.as_ref(), name).to_lowercase());
        }
    }

    let mut hashtags = BTreeSet::new();
    for name in &names {
        let compact: String = name.split_whitespace().collect();
        for prefix in hashtag_prefixes {
            let prefix = prefix.as_ref().trim_start_matches('#').to_lowercase();
            hashtags.insert(format!("#{prefix}{compact}"));
        }
        hashtags.insert(format!("#{compact}fightscorona"));
    }

    Ok(QuerySet {
        region: region.canonical_name.clone(),
        plain_queries: plain.into_iter().collect(),
        hashtags: hashtags.into_iter().collect(),
    })
}

fn words(s: &str) -> Vec<String> {
    s.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

fn contains_phrase(haystack: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && haystack.windows(phrase.len()).any(|w| w == phrase)
}

/// True when any of the region's tokens occurs in `location` on word boundaries.
pub fn location_matches(spec: &RegionSpec, location: &str) -> bool {
    let location_words = words(location);
    spec.location_tokens()
        .any(|token| contains_phrase(&location_words, &words(token)))
}

/// Keeps documents whose lowercased user location contains `country_key`, then
/// assigns each to every matching region. Documents matching no region land in
/// [`UNASSIGNED_NATIONAL`]; documents without a location are dropped.
pub fn filter_by_location(
    docs: impl IntoIterator<Item = Document>,
    country_key: &str,
    regions: &[RegionSpec],
) -> BTreeMap<String, Vec<Document>> {
    let country_key = country_key.to_lowercase();
    let mut buckets: BTreeMap<String, Vec<Document>> = BTreeMap::new();
    for doc in docs {
        let Some(location) = doc.user_location.as_deref().map(str::to_lowercase) else {
            continue;
        };
        if !location.contains(&country_key) {
            continue;
        }
        let matched: Vec<&RegionSpec> = regions
            .iter()
            .filter(|spec| location_matches(spec, &location))
            .collect();
        if matched.is_empty() {
            buckets
                .entry(UNASSIGNED_NATIONAL.to_string())
                .or_default()
                .push(doc);
            continue;
        }
        for spec in matched {
            let mut assigned = doc.clone();
            assigned.region = spec.canonical_name.clone();
            buckets
                .entry(spec.canonical_name.clone())
                .or_default()
                .push(assigned);
        }
    }
    buckets
}

/// Drops later copies of the same `(source, region, id)` triple, keeping the first.
pub fn dedup_by_id(docs: Vec<Document>) -> Vec<Document> {
    let mut seen = HashSet::new();
    docs.into_iter()
        .filter(|d| seen.insert((d.source, d.region.clone(), d.id.clone())))
        .collect()
}
