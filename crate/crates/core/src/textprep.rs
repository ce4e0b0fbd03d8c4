//! Text normalization: lowercase, whitespace tokenization, link removal,
//! alphabet-only filtering, stopword removal and dictionary lemmatization,
//! applied in that order.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrepError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lemma dictionary is not idempotent: `{surface}` -> `{lemma}` -> `{next}`")]
    NonIdempotentLemma {
        surface: String,
        lemma: String,
        next: String,
    },
}

/// Clean lowercase alphabetic tokens of one document.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenList(pub Vec<String>);

impl TokenList {
    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }
}

impl From<Vec<String>> for TokenList {
    fn from(tokens: Vec<String>) -> Self {
        TokenList(tokens)
    }
}

impl<'a> From<&[&'a str]> for TokenList {
    fn from(tokens: &[&'a str]) -> Self {
        TokenList(tokens.iter().map(|t| t.to_string()).collect())
    }
}

/// Surface form to lemma. Every lemma maps to itself.
#[derive(Debug, Clone, Default)]
pub struct LemmaDict {
    map: HashMap<String, String>,
}

impl LemmaDict {
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self, PrepError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let map: HashMap<String, String> = pairs
            .into_iter()
            .map(|(a, b)| (a.into().to_lowercase(), b.into().to_lowercase()))
            .filter(|(a, b)| a != b)
            .collect();
        for (surface, lemma) in &map {
            if let Some(next) = map.get(lemma) {
                return Err(PrepError::NonIdempotentLemma {
                    surface: surface.clone(),
                    lemma: lemma.clone(),
                    next: next.clone(),
                });
            }
        }
        Ok(Self { map })
    }

    /// Two-column `surface<TAB>lemma` file. Blank lines and `#` comments are ignored.
    pub fn load(path: &Path) -> Result<Self, PrepError> {
        let text = read(path)?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: &str| PrepError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: message.to_string(),
            };
            let (surface, lemma) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `surface<TAB>lemma`"))?;
            let (surface, lemma) = (surface.trim(), lemma.trim());
            if !is_alpha_token(&surface.to_lowercase()) || !is_alpha_token(&lemma.to_lowercase()) {
                return Err(parse_err("entries must be alphabetic words"));
            }
            pairs.push((surface.to_string(), lemma.to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.map.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct PrepConfig {
    pub stopwords: HashSet<String>,
    pub lemmas: LemmaDict,
    pub keep_hashtag_bodies: bool,
}

impl Default for PrepConfig {
    fn default() -> Self {
        Self {
            stopwords: HashSet::new(),
            lemmas: LemmaDict::default(),
            keep_hashtag_bodies: true,
        }
    }
}

impl PrepConfig {
    /// Loads any number of stopword files (one word per line) and a lemma file.
    pub fn from_files(
        stopword_files: &[PathBuf],
        lemma_file: Option<&Path>,
        keep_hashtag_bodies: bool,
    ) -> Result<Self, PrepError> {
        let mut stopwords = HashSet::new();
        for path in stopword_files {
            stopwords.extend(load_stopwords(path)?);
        }
        let lemmas = match lemma_file {
            Some(path) => LemmaDict::load(path)?,
            None => LemmaDict::default(),
        };
        Ok(Self {
            stopwords,
            lemmas,
            keep_hashtag_bodies,
        })
    }
}

fn read(path: &Path) -> Result<String, PrepError> {
    fs::read_to_string(path).map_err(|source| PrepError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>, PrepError> {
    Ok(read(path)?
        .lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect())
}

fn is_alpha_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_lowercase())
}

fn bare_url() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^[a-z0-9-]+(\.[a-z0-9-]+)+/|^([a-z0-9-]+\.)+(com|org|net|in|co|ly|gov|io|edu|info|me)/?$",
        )
        .expect("valid regex")
    })
}

fn is_link(token: &str) -> bool {
    token.contains("http") || token.starts_with("www.") || bare_url().is_match(token)
}

pub fn lemmatize(token: &str, lemmas: &LemmaDict) -> String {
    lemmas.get(token).unwrap_or(token).to_string()
}

pub fn preprocess(raw: &str, cfg: &PrepConfig) -> TokenList {
    let lowered = raw.to_lowercase();
    let tokens = lowered
        .split_whitespace()
        .filter(|t| !is_link(t))
        .filter(|t| cfg.keep_hashtag_bodies || !t.starts_with('#'))
        .map(|t| {
            t.chars()
                .filter(char::is_ascii_lowercase)
                .collect::<String>()
        })
        // stripping can reassemble a link marker, e.g. `h-ttp`
        .filter(|t| !t.is_empty() && !t.contains("http"))
        .filter(|t| !cfg.stopwords.contains(t))
        .map(|t| lemmatize(&t, &cfg.lemmas))
        // a lemma may itself be a stopword
        .filter(|t| !cfg.stopwords.contains(t))
        .collect();
    TokenList(tokens)
}
