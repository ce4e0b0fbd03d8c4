//! Two-phase pipeline driven by a TOML run configuration.
//!
//! `ingest` normalizes the raw corpora into `<output>/store/`; `analyze`
//! preprocesses, scores, aggregates and tests the stored documents and writes
//! every table to `<output>/analysis/`. Each output file ends with a
//! `# config_sha256=<hex>` footer. Outputs are staged in a sibling directory
//! and only moved into place once the whole phase has succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{
    dedup_by_id, filter_by_location, load_documents, load_region_specs, Document, InputFormat,
    LoadOptions, RegionResolver, Source, StudyWindow,
};
use crate::econ::{
    adf_test, granger_pairwise, LagRule, LagSelection, PairwiseOptions, PairwiseRecord, Stage,
};
use crate::lexicon::{
    apply_modifications, covid_modifications, load_lexicon, load_modifications, score,
    CategoryScores, Lexicon, SentimentLexicon,
};
use crate::report::{
    chatterplot_export, render_adf_table, render_chatterplot_csv, render_corpus_stats,
    render_granger_table, AdfRow, ChatterRecord, RenderedTable, DEFAULT_TOP_N,
};
use crate::series::{
    aggregate, align, read_series_csv, AggregateOptions, AggregationMode, EmotionSeries, GapPolicy,
};
use crate::textprep::{preprocess, PrepConfig, TokenList};

pub const STORE_DIR: &str = "store";
pub const ANALYSIS_DIR: &str = "analysis";
pub const STORE_FILE: &str = "documents.jsonl";
pub const FOOTER_KEY: &str = "# config_sha256=";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{what} not found: {path}")]
    MissingPath { what: String, path: PathBuf },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{stage}: {message}")]
    Input {
        stage: &'static str,
        message: String,
    },
    #[error("{stage}: {message}")]
    Analysis {
        stage: &'static str,
        message: String,
    },
}

impl PipelineError {
    /// 1 for analysis failures, 2 for I/O and configuration problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Analysis { .. } => 1,
            _ => 2,
        }
    }

    fn input(stage: &'static str, e: impl ToString) -> Self {
        PipelineError::Input {
            stage,
            message: e.to_string(),
        }
    }

    fn analysis(stage: &'static str, e: impl ToString) -> Self {
        PipelineError::Analysis {
            stage,
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn default_tweet_format() -> String {
    "jsonl".into()
}

fn default_bulletin_format() -> String {
    "bulletin_text_dir".into()
}

fn default_offset() -> String {
    "+05:30".into()
}

fn default_region() -> String {
    crate::corpus::NATIONAL_REGION.into()
}

fn default_lag() -> usize {
    4
}

fn default_true() -> bool {
    true
}

fn default_top_n() -> usize {
    DEFAULT_TOP_N
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub tweets: PathBuf,
    #[serde(default = "default_tweet_format")]
    pub tweets_format: String,
    pub bulletins: PathBuf,
    #[serde(default = "default_bulletin_format")]
    pub bulletins_format: String,
    pub lexicon: PathBuf,
    /// Apply the built-in COVID-19 category edits before any file edits.
    #[serde(default)]
    pub builtin_modifications: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modifications: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<PathBuf>,
    #[serde(default)]
    pub stopwords: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<PathBuf>,
    /// Drop (source, region, id) repeats across the content and location
    /// streams; `false` keeps the plain union.
    #[serde(default = "default_true")]
    pub dedup_by_id: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Study {
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Per-source windows; default to `start..=end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tweets_start: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tweets_end: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bulletins_start: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bulletins_end: Option<NaiveDate>,
    /// `+HH:MM` or `-HH:MM`; fixes the calendar day of each document.
    #[serde(default = "default_offset")]
    pub utc_offset: String,
    /// Region whose series are tested.
    #[serde(default = "default_region")]
    pub region: String,
    /// When set, tweets whose user location contains this key also form a
    /// location stream, fanned out to every matching region and added to the
    /// content stream.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_country: Option<String>,
}

impl Study {
    pub fn window(&self, source: Source) -> StudyWindow {
        let (s, e) = match source {
            Source::Tweet => (self.tweets_start, self.tweets_end),
            Source::Bulletin => (self.bulletins_start, self.bulletins_end),
        };
        StudyWindow {
            start: s.unwrap_or(self.start),
            end: e.unwrap_or(self.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    #[serde(default)]
    pub aggregation: AggregationMode,
    #[serde(default)]
    pub gap_policy: GapPolicy,
    #[serde(default = "default_lag")]
    pub adf_max_lag: usize,
    #[serde(default = "default_lag")]
    pub granger_max_lag: usize,
    #[serde(default = "default_lag_selection")]
    pub lag_selection: LagSelection,
    #[serde(default = "default_true")]
    pub keep_hashtag_bodies: bool,
    /// Categories to analyze, in table order; all lexicon categories if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub categories: Option<Vec<String>>,
    #[serde(default = "default_top_n")]
    pub chatterplot_top_n: usize,
    #[serde(default)]
    pub chatterplot_exclude: Vec<String>,
}

fn default_lag_selection() -> LagSelection {
    LagSelection::OwnLags
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            aggregation: AggregationMode::default(),
            gap_policy: GapPolicy::default(),
            adf_max_lag: default_lag(),
            granger_max_lag: default_lag(),
            lag_selection: default_lag_selection(),
            keep_hashtag_bodies: true,
            categories: None,
            chatterplot_top_n: DEFAULT_TOP_N,
            chatterplot_exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
}

/// Everything a run depends on. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub inputs: Inputs,
    pub study: Study,
    #[serde(default)]
    pub analysis: Analysis,
    pub output: Output,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line values that replace config keys.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output_dir: Option<PathBuf>,
    pub start: Option<NaiveDate>,
    pub end: Option<NaiveDate>,
    pub region: Option<String>,
    pub aggregation: Option<AggregationMode>,
    pub gap_policy: Option<GapPolicy>,
    pub adf_max_lag: Option<usize>,
    pub granger_max_lag: Option<usize>,
    pub lag_selection: Option<LagSelection>,
    pub keep_duplicates: bool,
}

pub fn parse_utc_offset(raw: &str) -> Option<FixedOffset> {
    let raw = raw.trim();
    let (sign, rest) = match raw.as_bytes().first()? {
        b'+' => (1, &raw[1..]),
        b'-' => (-1, &raw[1..]),
        _ => (1, raw),
    };
    let (h, m) = rest.split_once(':').unwrap_or((rest, "0"));
    let (h, m): (i32, i32) = (h.parse().ok()?, m.parse().ok()?);
    if !(0..24).contains(&h) || !(0..60).contains(&m) {
        return None;
    }
    FixedOffset::east_opt(sign * (h * 3600 + m * 60))
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| PipelineError::Config {
            path: base_dir.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => PipelineError::MissingPath {
                what: "config file".into(),
                path: path.to_path_buf(),
            },
            _ => PipelineError::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base).map_err(|e| match e {
            PipelineError::Config { message, .. } => PipelineError::Config {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dir) = &o.output_dir {
            self.output.dir = std::env::current_dir()
                .map(|cwd| cwd.join(dir))
                .unwrap_or_else(|_| dir.clone());
        }
        if let Some(v) = o.start {
            self.study.start = v;
        }
        if let Some(v) = o.end {
            self.study.end = v;
        }
        if let Some(v) = &o.region {
            self.study.region = v.clone();
        }
        if let Some(v) = o.aggregation {
            self.analysis.aggregation = v;
        }
        if let Some(v) = o.gap_policy {
            self.analysis.gap_policy = v;
        }
        if let Some(v) = o.adf_max_lag {
            self.analysis.adf_max_lag = v;
        }
        if let Some(v) = o.granger_max_lag {
            self.analysis.granger_max_lag = v;
        }
        if let Some(v) = o.lag_selection {
            self.analysis.lag_selection = v;
        }
        if o.keep_duplicates {
            self.inputs.dedup_by_id = false;
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.dir)
    }

    pub fn utc_offset(&self) -> Result<FixedOffset, PipelineError> {
        parse_utc_offset(&self.study.utc_offset)
            .ok_or_else(|| self.invalid(format!("bad utc_offset `{}`", self.study.utc_offset)))
    }

    fn invalid(&self, message: String) -> PipelineError {
        PipelineError::Config {
            path: self.base_dir.clone(),
            message,
        }
    }

    /// Checks value ranges and that every referenced input exists.
    pub fn validate(&self) -> Result<(), PipelineError> {
        for source in [Source::Tweet, Source::Bulletin] {
            let w = self.study.window(source);
            if w.start > w.end {
                return Err(self.invalid(format!(
                    "{source} window starts after it ends ({} > {})",
                    w.start, w.end
                )));
            }
        }
        if self.analysis.granger_max_lag < 1 {
            return Err(self.invalid("granger_max_lag must be at least 1".into()));
        }
        if self.analysis.adf_max_lag < 1 {
            return Err(self.invalid("adf_max_lag must be at least 1".into()));
        }
        self.utc_offset()?;
        for f in [&self.inputs.tweets_format, &self.inputs.bulletins_format] {
            f.parse::<InputFormat>().map_err(|e| self.invalid(e))?;
        }
        let mut required: Vec<(&str, &PathBuf)> = vec![
            ("tweets input", &self.inputs.tweets),
            ("bulletins input", &self.inputs.bulletins),
            ("lexicon", &self.inputs.lexicon),
        ];
        let optional = [
            ("modifications file", &self.inputs.modifications),
            ("sentiment lexicon", &self.inputs.sentiment),
            ("lemma dictionary", &self.inputs.lemmas),
            ("region specs", &self.inputs.regions),
        ];
        required.extend(
            optional
                .iter()
                .filter_map(|(w, p)| p.as_ref().map(|p| (*w, p))),
        );
        required.extend(self.inputs.stopwords.iter().map(|p| ("stopword list", p)));
        for (what, p) in required {
            let path = self.resolve(p);
            if !path.exists() {
                return Err(PipelineError::MissingPath {
                    what: what.into(),
                    path,
                });
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical TOML form of the effective configuration.
    pub fn sha256(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn footer(&self) -> String {
        format!("{FOOTER_KEY}{}\n", self.sha256())
    }
}

/// Parsed lexicons and preprocessing tables.
#[derive(Debug, Clone)]
pub struct Resources {
    pub prep: PrepConfig,
    pub lexicon: Lexicon,
    pub sentiment: SentimentLexicon,
}

impl Resources {
    pub fn load(cfg: &RunConfig) -> Result<Self, PipelineError> {
        let stop: Vec<PathBuf> = cfg
            .inputs
            .stopwords
            .iter()
            .map(|p| cfg.resolve(p))
            .collect();
        let lemmas = cfg.inputs.lemmas.as_ref().map(|p| cfg.resolve(p));
        let prep =
            PrepConfig::from_files(&stop, lemmas.as_deref(), cfg.analysis.keep_hashtag_bodies)
                .map_err(|e| PipelineError::input("resources", e))?;
        let mut lexicon = load_lexicon(&cfg.resolve(&cfg.inputs.lexicon))
            .map_err(|e| PipelineError::input("resources", e))?;
        if cfg.inputs.builtin_modifications {
            lexicon = apply_modifications(&lexicon, &covid_modifications())
                .map_err(|e| PipelineError::input("resources", e))?;
        }
        if let Some(p) = &cfg.inputs.modifications {
            let mods = load_modifications(&cfg.resolve(p))
                .map_err(|e| PipelineError::input("resources", e))?;
            lexicon = apply_modifications(&lexicon, &mods)
                .map_err(|e| PipelineError::input("resources", e))?;
        }
        let sentiment = match &cfg.inputs.sentiment {
            Some(p) => SentimentLexicon::load(&cfg.resolve(p))
                .map_err(|e| PipelineError::input("resources", e))?,
            None => SentimentLexicon::default(),
        };
        Ok(Self {
            prep,
            lexicon,
            sentiment,
        })
    }
}

/// Files are written to a staging directory that replaces `target` on commit
/// and is deleted if dropped uncommitted.
struct Staging {
    dir: PathBuf,
    target: PathBuf,
    footer: String,
    committed: bool,
}

impl Staging {
    fn new(parent: &Path, name: &str, footer: String) -> Result<Self, PipelineError> {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
        let dir = parent.join(format!(".{name}.partial"));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
        }
        fs::create_dir(&dir).map_err(io_err(&dir))?;
        Ok(Self {
            dir,
            target: parent.join(name),
            footer,
            committed: false,
        })
    }

    fn write(&self, name: &str, body: &str) -> Result<(), PipelineError> {
        let path = self.dir.join(name);
        let mut f = io::BufWriter::new(fs::File::create(&path).map_err(io_err(&path))?);
        f.write_all(body.as_bytes())
            .and_then(|_| f.write_all(self.footer.as_bytes()))
            .and_then(|_| f.flush())
            .map_err(io_err(&path))
    }

    fn commit(mut self) -> Result<PathBuf, PipelineError> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(io_err(&self.target))?;
        }
        fs::rename(&self.dir, &self.target).map_err(io_err(&self.target))?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSummary {
    pub store_dir: PathBuf,
    pub documents: usize,
    pub skipped: usize,
    pub by_region: BTreeMap<String, usize>,
}

/// Loads both corpora, canonicalizes regions and writes the document store.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<IngestSummary, PipelineError> {
    cfg.validate()?;
    let offset = cfg.utc_offset()?;
    let resolver = match &cfg.inputs.regions {
        Some(p) => Some(
            load_region_specs(&cfg.resolve(p)).map_err(|e| PipelineError::input("ingest", e))?,
        ),
        None => None,
    };

    let mut docs = Vec::new();
    let mut skipped = 0;
    let mut load_lines = Vec::new();
    for (source, path, format) in [
        (Source::Tweet, &cfg.inputs.tweets, &cfg.inputs.tweets_format),
        (
            Source::Bulletin,
            &cfg.inputs.bulletins,
            &cfg.inputs.bulletins_format,
        ),
    ] {
        let opts = LoadOptions {
            utc_offset: offset,
            window: Some(cfg.study.window(source)),
        };
        let format: InputFormat = format
            .parse()
            .map_err(|e: String| PipelineError::input("ingest", e))?;
        let report = load_documents(&cfg.resolve(path), format, source, &opts)
            .map_err(|e| PipelineError::input("ingest", e))?;
        log::info!(
            "{source}: {} documents, {} skipped",
            report.documents.len(),
            report.skipped
        );
        load_lines.push(format!(
            "{source}: {} records read, {} kept, {} skipped",
            report.record_count(),
            report.documents.len(),
            report.skipped
        ));
        skipped += report.skipped;
        let mut loaded = report.documents;
        if let (Source::Tweet, Some(country), Some(specs)) =
            (source, &cfg.study.location_country, &resolver)
        {
            let located: Vec<Document> = filter_by_location(loaded.clone(), country, specs)
                .into_values()
                .flatten()
                .collect();
            load_lines.push(format!(
                "{source}: location stream {} documents after region fan-out, content stream {}",
                located.len(),
                loaded.len()
            ));
            loaded.extend(located);
        }
        docs.extend(loaded);
    }
    if let Some(specs) = &resolver {
        let r = RegionResolver::new(specs);
        for d in &mut docs {
            d.region = r.resolve(&d.region);
        }
    }
    let docs = if cfg.inputs.dedup_by_id {
        dedup_by_id(docs)
    } else {
        docs
    };

    let mut store = String::new();
    for d in &docs {
        store.push_str(&serde_json::to_string(d).expect("document serializes"));
        store.push('\n');
    }
    let stats = render_corpus_stats(&docs);
    let mut text = stats.text;
    for line in load_lines {
        text.push_str(&line);
        text.push('\n');
    }

    let out = cfg.output_dir();
    let staging = Staging::new(&out, STORE_DIR, cfg.footer())?;
    staging.write(STORE_FILE, &store)?;
    staging.write("ingest_report.csv", &stats.csv)?;
    staging.write("ingest_report.txt", &text)?;
    let store_dir = staging.commit()?;
    Ok(IngestSummary {
        store_dir,
        documents: docs.len(),
        skipped,
        by_region: crate::report::corpus_stats(&docs),
    })
}

/// Reads the document store; `#` lines are footers.
pub fn read_store(path: &Path) -> Result<Vec<Document>, PipelineError> {
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => PipelineError::MissingPath {
            what: "ingested store (run `ingest` first)".into(),
            path: path.to_path_buf(),
        },
        _ => PipelineError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let doc: Document = serde_json::from_str(&line).map_err(|e| {
            PipelineError::input("store", format!("{}:{}: {e}", path.display(), i + 1))
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn store_path(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir().join(STORE_DIR).join(STORE_FILE)
}

/// Settings for [`analyze_documents`].
#[derive(Debug, Clone)]
pub struct AnalysisSettings {
    pub region: String,
    pub tweet_window: StudyWindow,
    pub bulletin_window: StudyWindow,
    pub utc_offset: FixedOffset,
    pub analysis: Analysis,
}

impl AnalysisSettings {
    pub fn from_config(cfg: &RunConfig) -> Result<Self, PipelineError> {
        Ok(Self {
            region: cfg.study.region.clone(),
            tweet_window: cfg.study.window(Source::Tweet),
            bulletin_window: cfg.study.window(Source::Bulletin),
            utc_offset: cfg.utc_offset()?,
            analysis: cfg.analysis.clone(),
        })
    }

    fn window(&self, source: Source) -> StudyWindow {
        match source {
            Source::Tweet => self.tweet_window,
            Source::Bulletin => self.bulletin_window,
        }
    }
}

/// In-memory results of one analysis run.
#[derive(Debug, Clone)]
pub struct AnalysisOutput {
    /// Every (region, source, category) series, sorted by region then source.
    pub series: Vec<EmotionSeries>,
    pub adf: Vec<AdfRow>,
    pub granger: Vec<PairwiseRecord>,
    pub chatterplot: Vec<ChatterRecord>,
}

/// Preprocess, score, aggregate, run the unit-root tests at levels and first
/// difference, and run pairwise Granger tests for the study region.
pub fn analyze_documents(
    docs: &[Document],
    res: &Resources,
    settings: &AnalysisSettings,
) -> Result<AnalysisOutput, PipelineError> {
    let categories: Vec<String> = match &settings.analysis.categories {
        Some(list) => {
            if let Some(unknown) = list.iter().find(|c| res.lexicon.get(c).is_none()) {
                return Err(PipelineError::analysis(
                    "score",
                    format!("unknown category `{unknown}`"),
                ));
            }
            list.clone()
        }
        None => res.lexicon.category_names().to_vec(),
    };

    let tokens: Vec<TokenList> = docs
        .iter()
        .map(|d| preprocess(&d.text, &res.prep))
        .collect();
    let scores: Vec<CategoryScores> = tokens.iter().map(|t| score(t, &res.lexicon)).collect();

    let mut pairs: Vec<(String, Source)> =
        docs.iter().map(|d| (d.region.clone(), d.source)).collect();
    pairs.sort();
    pairs.dedup();

    let mut series = Vec::new();
    let mut study: BTreeMap<Source, BTreeMap<String, EmotionSeries>> = BTreeMap::new();
    for source in [Source::Tweet, Source::Bulletin] {
        if !pairs.contains(&(settings.region.clone(), source)) {
            return Err(PipelineError::analysis(
                "aggregate",
                format!("no {source} documents for region `{}`", settings.region),
            ));
        }
    }
    for (region, source) in &pairs {
        let w = settings.window(*source);
        let opts = AggregateOptions {
            mode: settings.analysis.aggregation,
            gap_policy: settings.analysis.gap_policy,
            utc_offset: settings.utc_offset,
            span: Some((w.start, w.end)),
        };
        for c in &categories {
            let s = aggregate(docs.iter().zip(&scores), c, region, *source, &opts)
                .map_err(|e| PipelineError::analysis("aggregate", e))?;
            if *region == settings.region {
                study
                    .entry(*source)
                    .or_default()
                    .insert(c.clone(), s.clone());
            }
            series.push(s);
        }
    }
    let bulletin = study.remove(&Source::Bulletin).unwrap_or_default();
    let tweets = study.remove(&Source::Tweet).unwrap_or_default();
    if let (Some(b), Some(t)) = (bulletin.values().next(), tweets.values().next()) {
        align(b, t, true).map_err(|e| PipelineError::analysis("align", e))?;
    }

    let rule = LagRule::MinAic {
        max_lag: settings.analysis.adf_max_lag,
    };
    let cell = |s: Option<&EmotionSeries>, stage: Stage| match s {
        Some(s) => adf_test(s, stage, rule).map_err(|e| e.to_string()),
        None => Err("no series".to_string()),
    };
    let adf = categories
        .iter()
        .map(|c| AdfRow {
            variable: c.clone(),
            bulletin_levels: cell(bulletin.get(c), Stage::AtLevels),
            bulletin_differenced: cell(bulletin.get(c), Stage::FirstDifferenced),
            tweet_levels: cell(tweets.get(c), Stage::AtLevels),
            tweet_differenced: cell(tweets.get(c), Stage::FirstDifferenced),
        })
        .collect();

    let granger = granger_pairwise(
        &bulletin,
        &tweets,
        &PairwiseOptions {
            max_p: settings.analysis.granger_max_lag,
            lag_selection: settings.analysis.lag_selection,
        },
    );
    // keep the configured category order rather than the map's
    let rank: BTreeMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut granger = granger;
    granger.sort_by_key(|r| {
        (
            rank.get(r.variable.as_str()).copied().unwrap_or(usize::MAX),
            r.caused != Source::Bulletin,
        )
    });

    let tweet_tokens = docs
        .iter()
        .zip(&tokens)
        .filter(|(d, _)| d.source == Source::Tweet && d.region == settings.region)
        .map(|(_, t)| t);
    let chatterplot = chatterplot_export(
        tweet_tokens,
        &res.sentiment,
        settings.analysis.chatterplot_top_n,
        &settings.analysis.chatterplot_exclude,
    );

    Ok(AnalysisOutput {
        series,
        adf,
        granger,
        chatterplot,
    })
}

fn file_token(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '-'
            }
        })
        .collect()
}

fn series_csv(series: &[EmotionSeries]) -> Result<String, PipelineError> {
    let mut buf = Vec::new();
    crate::series::write_series_csv(&mut buf, series)
        .map_err(|e| PipelineError::analysis("render", e))?;
    Ok(String::from_utf8(buf).expect("utf-8 CSV"))
}

#[derive(Debug, Clone)]
pub struct AnalyzeSummary {
    pub analysis_dir: PathBuf,
    pub files: Vec<String>,
    pub output: AnalysisOutput,
}

/// Runs the analysis on the ingested store and writes all tables.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalyzeSummary, PipelineError> {
    cfg.validate()?;
    let docs = read_store(&store_path(cfg))?;
    let res = Resources::load(cfg)?;
    let settings = AnalysisSettings::from_config(cfg)?;
    let output = analyze_documents(&docs, &res, &settings)?;

    let mut files: Vec<(String, String)> = Vec::new();
    let mut grouped: BTreeMap<(String, Source), Vec<EmotionSeries>> = BTreeMap::new();
    for s in &output.series {
        grouped
            .entry((s.region.clone(), s.source))
            .or_default()
            .push(s.clone());
    }
    for ((region, source), group) in &grouped {
        let name = format!(
            "series_{}_{}.csv",
            file_token(region),
            source.label().to_lowercase()
        );
        files.push((name, series_csv(group)?));
    }
    let adf = render_adf_table(&output.adf);
    let granger = render_granger_table(&output.granger);
    let stats = render_corpus_stats(&docs);
    files.push(("adf.txt".into(), adf.text));
    files.push(("adf.csv".into(), adf.csv));
    files.push(("granger.txt".into(), granger.text));
    files.push(("granger.csv".into(), granger.csv));
    files.push((
        "chatterplot.csv".into(),
        render_chatterplot_csv(&output.chatterplot),
    ));
    files.push(("corpus_stats.txt".into(), stats.text));
    files.push(("corpus_stats.csv".into(), stats.csv));

    let staging = Staging::new(&cfg.output_dir(), ANALYSIS_DIR, cfg.footer())?;
    for (name, body) in &files {
        staging.write(name, body)?;
    }
    let analysis_dir = staging.commit()?;
    Ok(AnalyzeSummary {
        analysis_dir,
        files: files.into_iter().map(|(n, _)| n).collect(),
        output,
    })
}

/// Category name to series.
pub type SeriesByCategory = BTreeMap<String, EmotionSeries>;

/// Per-category series from a series CSV, split by source (bulletins, tweets),
/// for one region.
pub fn load_series_by_source(
    path: &Path,
    region: Option<&str>,
) -> Result<(SeriesByCategory, SeriesByCategory), PipelineError> {
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => PipelineError::MissingPath {
            what: "series CSV".into(),
            path: path.to_path_buf(),
        },
        _ => PipelineError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let all = read_series_csv(file).map_err(|e| PipelineError::input("series", e))?;
    let mut regions: Vec<&str> = all.iter().map(|s| s.region.as_str()).collect();
    regions.dedup();
    let region = match region {
        Some(r) => r.to_string(),
        None if regions.len() <= 1 => regions.first().map(|s| s.to_string()).unwrap_or_default(),
        None => {
            return Err(PipelineError::input(
                "series",
                format!("several regions present ({}); pick one", regions.join(", ")),
            ))
        }
    };
    let (mut bulletin, mut tweets) = (BTreeMap::new(), BTreeMap::new());
    for s in all.into_iter().filter(|s| s.region == region) {
        let target = match s.source {
            Source::Bulletin => &mut bulletin,
            Source::Tweet => &mut tweets,
        };
        target.insert(s.category.clone(), s);
    }
    if bulletin.is_empty() && tweets.is_empty() {
        return Err(PipelineError::input(
            "series",
            format!("no series for region `{region}`"),
        ));
    }
    Ok((bulletin, tweets))
}

/// ADF table for series read from CSV files (one or more).
pub fn cmd_adf(
    paths: &[PathBuf],
    region: Option<&str>,
    rule: LagRule,
) -> Result<RenderedTable, PipelineError> {
    let (bulletin, tweets) = merged_series(paths, region)?;
    let mut categories: Vec<&String> = bulletin.keys().chain(tweets.keys()).collect();
    categories.sort();
    categories.dedup();
    let cell = |s: Option<&EmotionSeries>, stage: Stage| match s {
        Some(s) => adf_test(s, stage, rule).map_err(|e| e.to_string()),
        None => Err("no series".to_string()),
    };
    let rows: Vec<AdfRow> = categories
        .into_iter()
        .map(|c| AdfRow {
            variable: c.clone(),
            bulletin_levels: cell(bulletin.get(c), Stage::AtLevels),
            bulletin_differenced: cell(bulletin.get(c), Stage::FirstDifferenced),
            tweet_levels: cell(tweets.get(c), Stage::AtLevels),
            tweet_differenced: cell(tweets.get(c), Stage::FirstDifferenced),
        })
        .collect();
    Ok(render_adf_table(&rows))
}

/// Pairwise Granger table for series read from CSV files.
pub fn cmd_granger(
    paths: &[PathBuf],
    region: Option<&str>,
    opts: &PairwiseOptions,
) -> Result<RenderedTable, PipelineError> {
    let (bulletin, tweets) = merged_series(paths, region)?;
    Ok(render_granger_table(&granger_pairwise(
        &bulletin, &tweets, opts,
    )))
}

type SourceMaps = (
    BTreeMap<String, EmotionSeries>,
    BTreeMap<String, EmotionSeries>,
);

fn merged_series(paths: &[PathBuf], region: Option<&str>) -> Result<SourceMaps, PipelineError> {
    let (mut bulletin, mut tweets) = (BTreeMap::new(), BTreeMap::new());
    for p in paths {
        let (b, t) = load_series_by_source(p, region)?;
        bulletin.extend(b);
        tweets.extend(t);
    }
    Ok((bulletin, tweets))
}

/// Chatterplot CSV of the stored tweets of the study region.
pub fn cmd_chatterplot(cfg: &RunConfig) -> Result<String, PipelineError> {
    cfg.validate()?;
    let docs = read_store(&store_path(cfg))?;
    let res = Resources::load(cfg)?;
    let tokens = docs
        .iter()
        .filter(|d| d.source == Source::Tweet && d.region == cfg.study.region)
        .map(|d| preprocess(&d.text, &res.prep))
        .collect::<Vec<_>>();
    let records = chatterplot_export(
        &tokens,
        &res.sentiment,
        cfg.analysis.chatterplot_top_n,
        &cfg.analysis.chatterplot_exclude,
    );
    Ok(render_chatterplot_csv(&records))
}

/// Document counts of the stored corpus.
pub fn cmd_stats(cfg: &RunConfig) -> Result<RenderedTable, PipelineError> {
    let docs = read_store(&store_path(cfg))?;
    Ok(render_corpus_stats(&docs))
}

/// Extracts the hash from an output's footer line.
pub fn footer_hash(contents: &str) -> Option<&str> {
    contents
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix(FOOTER_KEY))
}
