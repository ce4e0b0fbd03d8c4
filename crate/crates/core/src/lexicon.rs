//! Category lexicons, their manual edits, and per-document category scoring.
//!
//! Entries are unigrams (`case`) or underscore-joined bigrams (`test_positive`).
//! Spaced phrases in input files are folded into the underscore form, so
//! `positive case` and `positive_case` name the same entry.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenList;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    ParseError {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("category `{0}` is defined twice")]
    DuplicateCategory(String),
    #[error("lexicon has no categories")]
    EmptyLexicon,
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("modification of `{category}` both adds and removes `{entry}`")]
    ConflictingModification { category: String, entry: String },
    #[error("`{0}` is listed as both positive and negative")]
    SentimentConflict(String),
    #[error("{path}: {message}")]
    ModificationFile { path: PathBuf, message: String },
}

/// Lowercases, trims and joins whitespace-separated words with `_`.
pub fn normalize_entry(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join("_")
}

/// Immutable category -> entry-set mapping with a token index for scoring.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    categories: BTreeMap<String, BTreeSet<String>>,
    names: Vec<String>,
    index: HashMap<String, Vec<usize>>,
}

impl PartialEq for Lexicon {
    fn eq(&self, other: &Self) -> bool {
        self.categories == other.categories
    }
}

impl Lexicon {
    pub fn new(categories: BTreeMap<String, BTreeSet<String>>) -> Self {
        let categories: BTreeMap<String, BTreeSet<String>> = categories
            .into_iter()
            .map(|(name, entries)| {
                let entries = entries
                    .iter()
                    .map(|e| normalize_entry(e))
                    .filter(|e| !e.is_empty())
                    .collect();
                (normalize_entry(&name), entries)
            })
            .collect();
        let names: Vec<String> = categories.keys().cloned().collect();
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, entries) in categories.values().enumerate() {
            for entry in entries {
                index.entry(entry.clone()).or_default().push(i);
            }
        }
        Self {
            categories,
            names,
            index,
        }
    }

    pub fn categories(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.categories
    }

    pub fn category_names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, category: &str) -> Option<&BTreeSet<String>> {
        self.categories.get(category)
    }

    pub fn contains(&self, category: &str, entry: &str) -> bool {
        self.categories
            .get(category)
            .is_some_and(|set| set.contains(entry))
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    fn matches(&self, entry: &str) -> &[usize] {
        self.index.get(entry).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LexiconError + '_ {
    move |source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses a lexicon file.
///
/// Two line shapes are accepted and may be mixed:
///
/// ```text
/// healing<TAB>vaccine<TAB>cure        one or more entries after the category
/// medical emergency                   a header line ...
///     positive case                   ... followed by indented entries
/// ```
///
/// Headers must be unique; tab-separated lines for the same category merge.
pub fn load_lexicon(path: &Path) -> Result<Lexicon, LexiconError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_lexicon(&text, path)
}

fn parse_lexicon(text: &str, path: &Path) -> Result<Lexicon, LexiconError> {
    let mut categories: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut headers: HashSet<String> = HashSet::new();
    let mut current: Option<String> = None;

    for (i, line) in text.lines().enumerate() {
        let parse_err = |message: &str| LexiconError::ParseError {
            path: path.to_path_buf(),
            line: i + 1,
            message: message.to_string(),
        };
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if line.starts_with([' ', '\t']) {
            let Some(category) = &current else {
                return Err(parse_err("indented entry before any category header"));
            };
            for entry in line
                .split('\t')
                .map(normalize_entry)
                .filter(|e| !e.is_empty())
            {
                categories
                    .get_mut(category)
                    .expect("header inserted")
                    .insert(entry);
            }
            continue;
        }
        if line.contains('\t') {
            let mut fields = line.split('\t');
            let category = normalize_entry(fields.next().unwrap_or_default());
            if category.is_empty() {
                return Err(parse_err("empty category name"));
            }
            let entries: Vec<String> = fields
                .map(normalize_entry)
                .filter(|e| !e.is_empty())
                .collect();
            if entries.is_empty() {
                return Err(parse_err("category line without entries"));
            }
            if headers.contains(&category) {
                return Err(LexiconError::DuplicateCategory(category));
            }
            categories.entry(category).or_default().extend(entries);
            current = None;
            continue;
        }
        let category = normalize_entry(line.trim_end_matches(':'));
        if !headers.insert(category.clone()) || categories.contains_key(&category) {
            return Err(LexiconError::DuplicateCategory(category));
        }
        categories.insert(category.clone(), BTreeSet::new());
        current = Some(category);
    }

    if categories.is_empty() {
        return Err(LexiconError::EmptyLexicon);
    }
    Ok(Lexicon::new(categories))
}

/// A manual edit to one category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconModification {
    pub category: String,
    #[serde(default)]
    pub add: Vec<String>,
    #[serde(default)]
    pub remove: Vec<String>,
    #[serde(default)]
    pub create_if_missing: bool,
}

impl LexiconModification {
    pub fn add<S: AsRef<str>>(category: &str, tokens: &[S]) -> Self {
        Self {
            category: category.to_string(),
            add: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            remove: Vec::new(),
            create_if_missing: true,
        }
    }

    pub fn remove<S: AsRef<str>>(category: &str, tokens: &[S]) -> Self {
        Self {
            category: category.to_string(),
            add: Vec::new(),
            remove: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            create_if_missing: false,
        }
    }

    fn validate(&self) -> Result<(), LexiconError> {
        let removed: HashSet<String> = self.remove.iter().map(|e| normalize_entry(e)).collect();
        match self
            .add
            .iter()
            .map(|e| normalize_entry(e))
            .find(|e| removed.contains(e))
        {
            Some(entry) => Err(LexiconError::ConflictingModification {
                category: normalize_entry(&self.category),
                entry,
            }),
            None => Ok(()),
        }
    }
}

/// The COVID-19 edits to the stock Empath categories: additions per category
/// (the fight/war row applies to both categories) and removal of `positive`
/// from `positive_emotion`, where it mostly meant a positive test result.
pub fn covid_modifications() -> Vec<LexiconModification> {
    let war_terms = ["eradicate", "contain", "overcome", "prevent"];
    vec![
        LexiconModification::add(
            "medical_emergency",
            &[
                "case",
                "positive",
                "positive case",
                "test_positive",
                "pandemic",
                "lockdown",
                "spread",
            ],
        ),
        LexiconModification::add("health", &["test_positive", "test_negative"]),
        LexiconModification::add("healing", &["vaccine"]),
        LexiconModification::add(
            "government",
            &["cm", "pm", "prime_minister", "minister", "govt"],
        ),
        LexiconModification::add(
            "movement",
            &["socialdistancing", "social_distancing", "awareness"],
        ),
        LexiconModification::add("fight", &war_terms),
        LexiconModification::add("war", &war_terms),
        LexiconModification::add("business", &["startup"]),
        LexiconModification::remove("positive_emotion", &["positive"]),
    ]
}

#[derive(Debug, Deserialize)]
struct ModificationFile {
    #[serde(default)]
    modification: Vec<LexiconModification>,
}

/// Reads `[[modification]]` tables (`category`, `add`, `remove`, `create_if_missing`).
pub fn load_modifications(path: &Path) -> Result<Vec<LexiconModification>, LexiconError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let file: ModificationFile =
        toml::from_str(&text).map_err(|e| LexiconError::ModificationFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    for m in &file.modification {
        m.validate()?;
    }
    Ok(file.modification)
}

/// Returns an edited copy; `lex` itself is untouched.
pub fn apply_modifications(
    lex: &Lexicon,
    mods: &[LexiconModification],
) -> Result<Lexicon, LexiconError> {
    let mut categories = lex.categories.clone();
    for m in mods {
        m.validate()?;
        let name = normalize_entry(&m.category);
        if !categories.contains_key(&name) && !m.create_if_missing {
            return Err(LexiconError::UnknownCategory(name));
        }
        let entries = categories.entry(name).or_default();
        for e in &m.remove {
            entries.remove(&normalize_entry(e));
        }
        entries.extend(
            m.add
                .iter()
                .map(|e| normalize_entry(e))
                .filter(|e| !e.is_empty()),
        );
    }
    Ok(Lexicon::new(categories))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScores {
    pub raw: BTreeMap<String, u64>,
    pub normalized: BTreeMap<String, f64>,
    pub total_tokens: usize,
}

impl CategoryScores {
    pub fn raw_of(&self, category: &str) -> u64 {
        self.raw.get(category).copied().unwrap_or(0)
    }

    pub fn normalized_of(&self, category: &str) -> f64 {
        self.normalized.get(category).copied().unwrap_or(0.0)
    }
}

/// Counts unigram hits per position plus adjacent-pair hits, per category.
///
/// The normalized score divides by the token count (1 for an empty document)
/// and is capped at 1, which only binds when bigram hits and their constituent
/// unigrams land in the same category.
pub fn score(tokens: &TokenList, lex: &Lexicon) -> CategoryScores {
    let toks = tokens.as_slice();
    let mut counts = vec![0u64; lex.names.len()];
    for t in toks {
        for &c in lex.matches(t) {
            counts[c] += 1;
        }
    }
    let mut bigram = String::new();
    for pair in toks.windows(2) {
        bigram.clear();
        bigram.push_str(&pair[0]);
        bigram.push('_');
        bigram.push_str(&pair[1]);
        for &c in lex.matches(&bigram) {
            counts[c] += 1;
        }
    }
    let denom = toks.len().max(1) as f64;
    let raw: BTreeMap<String, u64> = lex.names.iter().cloned().zip(counts).collect();
    let normalized = raw
        .iter()
        .map(|(k, &v)| (k.clone(), (v as f64 / denom).min(1.0)))
        .collect();
    CategoryScores {
        raw,
        normalized,
        total_tokens: toks.len(),
    }
}

/// Word polarity lists for the chatterplot.
#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl SentimentLexicon {
    pub fn new<I, J, S>(positive: I, negative: J) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let positive: HashSet<String> = positive
            .into_iter()
            .map(|s| normalize_entry(s.as_ref()))
            .collect();
        let negative: HashSet<String> = negative
            .into_iter()
            .map(|s| normalize_entry(s.as_ref()))
            .collect();
        let mut clash: Vec<&String> = positive.intersection(&negative).collect();
        clash.sort();
        if let Some(word) = clash.first() {
            return Err(LexiconError::SentimentConflict((*word).clone()));
        }
        Ok(Self { positive, negative })
    }

    /// `word<TAB>label` lines where label is `positive`/`negative` or `1`/`-1`.
    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let parse_err = |message: &str| LexiconError::ParseError {
                path: path.to_path_buf(),
                line: i + 1,
                message: message.to_string(),
            };
            let (word, label) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `word<TAB>label`"))?;
            match label.trim().to_lowercase().as_str() {
                "positive" | "pos" | "1" | "+1" => pos.push(word.to_string()),
                "negative" | "neg" | "-1" => neg.push(word.to_string()),
                other => return Err(parse_err(&format!("unknown polarity `{other}`"))),
            }
        }
        Self::new(pos, neg)
    }

    pub fn len(&self) -> usize {
        self.positive.len() + self.negative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn sentiment_of(token: &str, slex: &SentimentLexicon) -> i8 {
    if slex.positive.contains(token) {
        1
    } else if slex.negative.contains(token) {
        -1
    } else {
        0
    }
}
