//! Canonical corpus model: language-tagged tokens grouped into utterances.

mod format;
mod stats;
mod tag;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{parse_corpus, parse_corpus_with, write_corpus, TagMapping};
pub use stats::{corpus_stats, StatsTable};
pub use tag::{LangCode, LanguagePair, NeutralKind, Tag};
pub use validate::{validate_corpus, ValidationReport, Violation};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: raw tag `{tag}` is not covered by the tag mapping")]
    Unmapped { line: usize, tag: String },
    #[error("line {line}: shared tag `{tag}` uses a code outside the language pair {pair}")]
    OutOfPair {
        line: usize,
        tag: String,
        pair: String,
    },
    #[error("mapping line {line}: {message}")]
    Mapping { line: usize, message: String },
    #[error("invalid language code `{0}` (expected 2-3 lowercase ASCII letters)")]
    InvalidCode(String),
    #[error("invalid language pair `{0}`")]
    InvalidPair(String),
    #[error("language pair needs two distinct languages, got `{0}` twice")]
    DegeneratePair(String),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("no language pair given and none declared with a `# pair = ` header")]
    MissingPair { tokens_seen: bool },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub tag: Tag,
}

impl Token {
    pub fn new(text: impl Into<String>, tag: Tag) -> Self {
        Token {
            text: text.into(),
            tag,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub turn_id: String,
    pub tokens: Vec<Token>,
}

impl Utterance {
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> Self {
        let id = id.into();
        Utterance {
            turn_id: id.clone(),
            id,
            tokens,
        }
    }

    /// Builds an utterance from parallel tag strings, using each tag as the token text.
    /// Panics on invalid tags; meant for fixtures.
    pub fn from_tags(id: impl Into<String>, tags: &[&str]) -> Self {
        let tokens = tags
            .iter()
            .enumerate()
            .map(|(i, t)| Token::new(format!("w{i}"), t.parse().expect("canonical tag")))
            .collect();
        Utterance::new(id, tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.tokens.iter().map(|t| t.tag)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub pair: LanguagePair,
    pub utterances: Vec<Utterance>,
    pub source_label: String,
}

impl Corpus {
    pub fn new(pair: LanguagePair) -> Self {
        Corpus {
            pair,
            utterances: Vec::new(),
            source_label: String::new(),
        }
    }

    pub fn token_count(&self) -> usize {
        self.utterances.iter().map(Utterance::len).sum()
    }
}
