//! Reading and writing the tab-separated corpus format.
//!
//! ```text
//! # pair = en ar
//! # source = reddit
//!
//! # id = r1
//! # turn = t1
//! every	lang:en
//! ahly	shared:ar
//! fel	lang:ar
//!
//! ```
//!
//! Any line holding a TAB is a token line. Lines starting with `#` (and no
//! TAB) carry `key = value` metadata; `pair`, `pair_name` and `source` are
//! corpus-level, `id` and `turn` belong to the next utterance, other keys are
//! ignored. A blank line closes the current utterance.

// the example above needs literal tabs
#![allow(clippy::tabs_in_doc_comments)]

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use super::{Corpus, CorpusError, LanguagePair, Tag, Token, Utterance};

/// Maps raw source-scheme tags (`Eng`, `lang1`, `NE`) onto normalized tags.
///
/// Tags already written in canonical form resolve to themselves unless the
/// mapping overrides them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagMapping {
    pub entries: HashMap<String, Tag>,
}

impl TagMapping {
    pub fn identity() -> Self {
        TagMapping::default()
    }

    pub fn insert(&mut self, raw: impl Into<String>, tag: Tag) {
        self.entries.insert(raw.into(), tag);
    }

    pub fn resolve(&self, raw: &str) -> Option<Tag> {
        self.entries.get(raw).copied().or_else(|| raw.parse().ok())
    }

    /// Reads `raw<TAB>normalized-tag` lines. Blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(input: R) -> Result<Self, CorpusError> {
        let mut mapping = TagMapping::default();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (raw, normalized) = line.split_once('\t').ok_or_else(|| CorpusError::Mapping {
                line: line_no,
                message: "expected `raw<TAB>tag`".into(),
            })?;
            let tag = normalized
                .trim()
                .parse()
                .map_err(|e: CorpusError| CorpusError::Mapping {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if raw.is_empty() {
                return Err(CorpusError::Mapping {
                    line: line_no,
                    message: "empty raw tag".into(),
                });
            }
            mapping.insert(raw, tag);
        }
        Ok(mapping)
    }
}

/// Parses a corpus whose language pair is fixed by the caller. A `# pair`
/// header in the input is ignored.
pub fn parse_corpus<R: BufRead>(
    input: R,
    pair: &LanguagePair,
    mapping: &TagMapping,
) -> Result<Corpus, CorpusError> {
    Parser::new(Some(pair.clone()), true, mapping).run(input)
}

/// Parses a corpus taking the pair from `pair` if given, else from the
/// input's `# pair = l1 l2` header.
pub fn parse_corpus_with<R: BufRead>(
    input: R,
    pair: Option<&LanguagePair>,
    mapping: &TagMapping,
) -> Result<Corpus, CorpusError> {
    Parser::new(pair.cloned(), pair.is_some(), mapping).run(input)
}

struct Parser<'m> {
    pair: Option<LanguagePair>,
    pair_fixed: bool,
    pair_name: Option<String>,
    source_label: String,
    mapping: &'m TagMapping,
    utterances: Vec<Utterance>,
    pending_id: Option<String>,
    pending_turn: Option<String>,
    pending_tokens: Vec<Token>,
    tokens_seen: bool,
}

impl<'m> Parser<'m> {
    fn new(pair: Option<LanguagePair>, pair_fixed: bool, mapping: &'m TagMapping) -> Self {
        Parser {
            pair,
            pair_fixed,
            pair_name: None,
            source_label: String::new(),
            mapping,
            utterances: Vec::new(),
            pending_id: None,
            pending_turn: None,
            pending_tokens: Vec::new(),
            tokens_seen: false,
        }
    }

    fn run<R: BufRead>(mut self, input: R) -> Result<Corpus, CorpusError> {
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.contains('\t') {
                self.token_line(line, line_no)?;
            } else if line.trim().is_empty() {
                self.close_block();
            } else if let Some(meta) = line.strip_prefix('#') {
                self.metadata(meta, line_no)?;
            } else {
                return Err(CorpusError::Malformed {
                    line: line_no,
                    message: format!("expected `token<TAB>tag`, got `{line}`"),
                });
            }
        }
        self.close_block();

        let Some(mut pair) = self.pair else {
            return Err(CorpusError::MissingPair {
                tokens_seen: self.tokens_seen,
            });
        };
        if let Some(name) = self.pair_name {
            pair.name = name;
        }
        Ok(Corpus {
            pair,
            utterances: self.utterances,
            source_label: self.source_label,
        })
    }

    fn token_line(&mut self, line: &str, line_no: usize) -> Result<(), CorpusError> {
        self.tokens_seen = true;
        let mut cols = line.split('\t');
        let (text, raw_tag) = match (cols.next(), cols.next(), cols.next()) {
            (Some(text), Some(tag), None) => (text, tag),
            _ => {
                return Err(CorpusError::Malformed {
                    line: line_no,
                    message: "expected exactly two tab-separated columns".into(),
                })
            }
        };
        if text.is_empty() {
            return Err(CorpusError::Malformed {
                line: line_no,
                message: "empty token text".into(),
            });
        }
        let tag = self
            .mapping
            .resolve(raw_tag)
            .ok_or_else(|| CorpusError::Unmapped {
                line: line_no,
                tag: raw_tag.to_string(),
            })?;
        let pair = self
            .pair
            .as_ref()
            .ok_or(CorpusError::MissingPair { tokens_seen: true })?;
        if let Tag::Shared(code) = tag {
            if !pair.contains(code) {
                return Err(CorpusError::OutOfPair {
                    line: line_no,
                    tag: tag.to_string(),
                    pair: pair.name.clone(),
                });
            }
        }
        self.pending_tokens.push(Token::new(text, tag));
        Ok(())
    }

    fn metadata(&mut self, meta: &str, line_no: usize) -> Result<(), CorpusError> {
        let Some((key, value)) = meta.split_once('=') else {
            // free-form comment
            return Ok(());
        };
        let value = value.trim();
        match key.trim() {
            "id" => self.pending_id = Some(value.to_string()),
            "turn" => self.pending_turn = Some(value.to_string()),
            "source" => self.source_label = value.to_string(),
            "pair_name" => self.pair_name = Some(value.to_string()),
            "pair" => {
                let declared: LanguagePair =
                    value
                        .parse()
                        .map_err(|e: CorpusError| CorpusError::Malformed {
                            line: line_no,
                            message: e.to_string(),
                        })?;
                if !self.pair_fixed {
                    self.pair = Some(declared);
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn close_block(&mut self) {
        if self.pending_tokens.is_empty() && self.pending_id.is_none() {
            self.pending_turn = None;
            return;
        }
        let ordinal = self.utterances.len() + 1;
        let id = self
            .pending_id
            .take()
            .unwrap_or_else(|| ordinal.to_string());
        let turn_id = self.pending_turn.take().unwrap_or_else(|| id.clone());
        self.utterances.push(Utterance {
            id,
            turn_id,
            tokens: std::mem::take(&mut self.pending_tokens),
        });
    }
}

/// Writes `corpus` in canonical form. Parsing the output yields `corpus` back.
pub fn write_corpus<W: Write>(mut out: W, corpus: &Corpus) -> io::Result<()> {
    writeln!(out, "# pair = {} {}", corpus.pair.l1, corpus.pair.l2)?;
    if corpus.pair.name != corpus.pair.default_name() {
        writeln!(out, "# pair_name = {}", corpus.pair.name)?;
    }
    if !corpus.source_label.is_empty() {
        writeln!(out, "# source = {}", corpus.source_label)?;
    }
    writeln!(out)?;
    for utt in &corpus.utterances {
        writeln!(out, "# id = {}", utt.id)?;
        writeln!(out, "# turn = {}", utt.turn_id)?;
        for token in &utt.tokens {
            writeln!(out, "{}\t{}", token.text, token.tag)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
