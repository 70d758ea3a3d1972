use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{Corpus, Tag};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId {
        id: String,
    },
    EmptyUtterance {
        id: String,
    },
    EmptyToken {
        utterance_id: String,
        position: usize,
    },
    OutOfPairShared {
        utterance_id: String,
        position: usize,
        code: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Violation::EmptyUtterance { id } => write!(f, "empty utterance `{id}`"),
            Violation::EmptyToken {
                utterance_id,
                position,
            } => write!(f, "empty token text in `{utterance_id}` at {position}"),
            Violation::OutOfPairShared {
                utterance_id,
                position,
                code,
            } => write!(
                f,
                "out-of-pair shared code `{code}` in `{utterance_id}` at {position}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub utterances: usize,
    pub tokens: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut report = ValidationReport {
        utterances: corpus.utterances.len(),
        tokens: corpus.token_count(),
        violations: Vec::new(),
    };
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for utt in &corpus.utterances {
        if !seen.insert(utt.id.as_str()) && reported.insert(utt.id.as_str()) {
            report
                .violations
                .push(Violation::DuplicateId { id: utt.id.clone() });
        }
        if utt.tokens.is_empty() {
            report
                .violations
                .push(Violation::EmptyUtterance { id: utt.id.clone() });
        }
        for (position, token) in utt.tokens.iter().enumerate() {
            if token.text.is_empty() {
                report.violations.push(Violation::EmptyToken {
                    utterance_id: utt.id.clone(),
                    position,
                });
            }
            if let Tag::Shared(code) = token.tag {
                if !corpus.pair.contains(code) {
                    report.violations.push(Violation::OutOfPairShared {
                        utterance_id: utt.id.clone(),
                        position,
                        code: code.to_string(),
                    });
                }
            }
        }
    }
    report
}
