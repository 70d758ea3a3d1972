use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::{Corpus, NeutralKind, Tag};
use crate::switching::{effective_switches, shared_spans, InsertionalPolicy, SharedClass};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SharedCounts {
    pub l1: u64,
    pub l2: u64,
    pub other: u64,
}

impl SharedCounts {
    fn bump(&mut self, class: SharedClass) {
        match class {
            SharedClass::L1 => self.l1 += 1,
            SharedClass::L2 => self.l2 += 1,
            SharedClass::Other => self.other += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.l1 + self.l2 + self.other
    }
}

/// Corpus-level counts in the layout of a per-dataset statistics table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsTable {
    pub pair: String,
    pub l1: String,
    pub l2: String,
    pub utterances: u64,
    pub tokens: u64,
    /// `lang:<code>` token counts, third languages included.
    pub lang_tokens: BTreeMap<String, u64>,
    pub shared_tokens: SharedCounts,
    /// Multi-word items count once.
    pub shared_items: SharedCounts,
    pub mix: u64,
    pub neutral: BTreeMap<NeutralKind, u64>,
    pub cs_total: u64,
    pub cs_l1_to_l2: u64,
    pub cs_l2_to_l1: u64,
}

impl StatsTable {
    pub fn neutral_total(&self) -> u64 {
        self.neutral.values().sum()
    }

    /// Sum of per-tag token counts; equals `tokens`.
    pub fn tag_token_sum(&self) -> u64 {
        self.lang_tokens.values().sum::<u64>()
            + self.shared_tokens.total()
            + self.mix
            + self.neutral_total()
    }

    /// Plain-text rendering: counts with percentages of the token (or CS) total.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let pct = |n: u64, of: u64| {
            if of == 0 {
                String::new()
            } else {
                format!("{:.1}", 100.0 * n as f64 / of as f64)
            }
        };
        let mut row = |label: &str, n: u64, pct: String| {
            let _ = writeln!(out, "{label:<18}{n:>12}{pct:>8}");
        };
        row("Utterances", self.utterances, String::new());
        row("Tokens (total)", self.tokens, String::new());
        let mut langs: Vec<(&String, &u64)> = self.lang_tokens.iter().collect();
        // pair languages first, then third languages alphabetically
        langs.sort_by_key(|(code, _)| (**code != self.l1, **code != self.l2, (*code).clone()));
        for (code, n) in langs {
            row(code, *n, pct(*n, self.tokens));
        }
        let upper = |c: &str| c.to_uppercase();
        row(
            &format!("Shared-{}", upper(&self.l1)),
            self.shared_items.l1,
            pct(self.shared_items.l1, self.tokens),
        );
        row(
            &format!("Shared-{}", upper(&self.l2)),
            self.shared_items.l2,
            pct(self.shared_items.l2, self.tokens),
        );
        row(
            "Shared-Other",
            self.shared_items.other,
            pct(self.shared_items.other, self.tokens),
        );
        row("MIX", self.mix, pct(self.mix, self.tokens));
        row(
            "Neutral",
            self.neutral_total(),
            pct(self.neutral_total(), self.tokens),
        );
        row("CS (total)", self.cs_total, String::new());
        row(
            &format!("{}->{}", upper(&self.l1), upper(&self.l2)),
            self.cs_l1_to_l2,
            pct(self.cs_l1_to_l2, self.cs_total),
        );
        row(
            &format!("{}->{}", upper(&self.l2), upper(&self.l1)),
            self.cs_l2_to_l1,
            pct(self.cs_l2_to_l1, self.cs_total),
        );
        out
    }
}

impl fmt::Display for StatsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Counts tokens by tag, shared items by subclass, and switch points by
/// direction (return legs of one-token insertions excluded).
pub fn corpus_stats(corpus: &Corpus) -> StatsTable {
    let pair = &corpus.pair;
    let mut table = StatsTable {
        pair: pair.name.clone(),
        l1: pair.l1.to_string(),
        l2: pair.l2.to_string(),
        utterances: corpus.utterances.len() as u64,
        tokens: 0,
        lang_tokens: BTreeMap::new(),
        shared_tokens: SharedCounts::default(),
        shared_items: SharedCounts::default(),
        mix: 0,
        neutral: NeutralKind::ALL.iter().map(|k| (*k, 0)).collect(),
        cs_total: 0,
        cs_l1_to_l2: 0,
        cs_l2_to_l1: 0,
    };
    let mut tags: Vec<Tag> = Vec::new();
    for utt in &corpus.utterances {
        tags.clear();
        tags.extend(utt.tags());
        table.tokens += tags.len() as u64;
        for tag in &tags {
            match tag {
                Tag::Lang(code) => *table.lang_tokens.entry(code.to_string()).or_default() += 1,
                Tag::Shared(_) | Tag::SharedOther => table
                    .shared_tokens
                    .bump(SharedClass::of(tag, pair).expect("shared tag")),
                Tag::Mix => table.mix += 1,
                Tag::Neutral(kind) => *table.neutral.entry(*kind).or_default() += 1,
            }
        }
        for (_, class) in shared_spans(&tags, pair) {
            table.shared_items.bump(class);
        }
        for s in effective_switches(&tags, pair, InsertionalPolicy::ExcludeReturn) {
            table.cs_total += 1;
            if s.from == pair.l1 {
                table.cs_l1_to_l2 += 1;
            } else {
                table.cs_l2_to_l1 += 1;
            }
        }
    }
    table
}
