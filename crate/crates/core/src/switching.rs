//! Shared-item grouping and code-switch point detection.
//!
//! A token at position `p` is a switch from `A` to `B` when it is tagged
//! `lang:B`, and the closest earlier token of the utterance tagged with either
//! pair language is tagged `lang:A` (`A != B`). Everything in between (shared
//! items, neutral tokens, mixed words, third languages) is the gap.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{LangCode, LanguagePair, Tag, Utterance};

/// Inclusive token index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn single(pos: usize) -> Self {
        Span {
            start: pos,
            end: pos,
        }
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }
}

/// Subclass of a shared item relative to the corpus' language pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharedClass {
    L1,
    L2,
    Other,
}

impl SharedClass {
    /// Class of a shared tag; `None` for non-shared tags. Shared codes that
    /// are not in the pair (invalid corpora) fall back to `Other`.
    pub fn of(tag: &Tag, pair: &LanguagePair) -> Option<SharedClass> {
        match tag {
            Tag::Shared(code) if *code == pair.l1 => Some(SharedClass::L1),
            Tag::Shared(code) if *code == pair.l2 => Some(SharedClass::L2),
            Tag::Shared(_) | Tag::SharedOther => Some(SharedClass::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedItem {
    pub utterance_id: String,
    pub span: Span,
    pub subclass: SharedClass,
}

/// Groups the shared tokens of `tags` into items.
///
/// Each maximal run of shared tokens is one item, labeled with its
/// language-specific subclass if it has one (shared-other tokens join it).
/// A run holding both L1 and L2 tokens is cut at every subclass change.
pub fn shared_spans(tags: &[Tag], pair: &LanguagePair) -> Vec<(Span, SharedClass)> {
    let mut items = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let Some(first) = SharedClass::of(&tags[i], pair) else {
            i += 1;
            continue;
        };
        let start = i;
        let mut has_l1 = first == SharedClass::L1;
        let mut has_l2 = first == SharedClass::L2;
        let mut end = i;
        while let Some(class) = tags.get(end + 1).and_then(|t| SharedClass::of(t, pair)) {
            has_l1 |= class == SharedClass::L1;
            has_l2 |= class == SharedClass::L2;
            end += 1;
        }
        if has_l1 && has_l2 {
            let mut seg_start = start;
            let mut seg_class = first;
            for (pos, tag) in tags.iter().enumerate().take(end + 1).skip(start + 1) {
                let class = SharedClass::of(tag, pair).expect("inside shared run");
                if class != seg_class {
                    items.push((Span::new(seg_start, pos - 1), seg_class));
                    seg_start = pos;
                    seg_class = class;
                }
            }
            items.push((Span::new(seg_start, end), seg_class));
        } else {
            let class = if has_l1 {
                SharedClass::L1
            } else if has_l2 {
                SharedClass::L2
            } else {
                SharedClass::Other
            };
            items.push((Span::new(start, end), class));
        }
        i = end + 1;
    }
    items
}

pub fn group_shared_items(utt: &Utterance, pair: &LanguagePair) -> Vec<SharedItem> {
    let tags: Vec<Tag> = utt.tags().collect();
    shared_spans(&tags, pair)
        .into_iter()
        .map(|(span, subclass)| SharedItem {
            utterance_id: utt.id.clone(),
            span,
            subclass,
        })
        .collect()
}

/// How the return leg of a one-token insertion (`A B A`) is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertionalPolicy {
    /// Drop the switch at `w3` of a literally adjacent `w1 w2 w3`.
    #[default]
    ExcludeReturn,
    /// Same as `ExcludeReturn`, but neutral tokens are skipped when looking for the triple.
    ExcludeReturnSkipNeutral,
    /// Insertional and alternational switches are treated alike.
    KeepAll,
}

impl InsertionalPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            InsertionalPolicy::ExcludeReturn => "exclude-return",
            InsertionalPolicy::ExcludeReturnSkipNeutral => "exclude-return-skip-neutral",
            InsertionalPolicy::KeepAll => "keep-all",
        }
    }
}

impl fmt::Display for InsertionalPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InsertionalPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exclude-return" => Ok(InsertionalPolicy::ExcludeReturn),
            "exclude-return-skip-neutral" => Ok(InsertionalPolicy::ExcludeReturnSkipNeutral),
            "keep-all" => Ok(InsertionalPolicy::KeepAll),
            _ => Err(format!(
                "unknown insertional policy `{s}` (expected exclude-return, exclude-return-skip-neutral or keep-all)"
            )),
        }
    }
}

/// A switch at a token position, without the owning utterance's id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switch {
    pub position: usize,
    pub from: LangCode,
    pub to: LangCode,
    pub gap: usize,
    pub insertional_return: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchPoint {
    pub utterance_id: String,
    pub position: usize,
    pub from_lang: LangCode,
    pub to_lang: LangCode,
    pub gap: usize,
    pub insertional_return: bool,
}

impl SwitchPoint {
    fn from_switch(utterance_id: &str, s: Switch) -> Self {
        SwitchPoint {
            utterance_id: utterance_id.to_string(),
            position: s.position,
            from_lang: s.from,
            to_lang: s.to,
            gap: s.gap,
            insertional_return: s.insertional_return,
        }
    }

    fn as_switch(&self) -> Switch {
        Switch {
            position: self.position,
            from: self.from_lang,
            to: self.to_lang,
            gap: self.gap,
            insertional_return: self.insertional_return,
        }
    }

    /// Tab-separated debug line: `utterance_id position from to gap insertional_return`.
    pub fn debug_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.utterance_id,
            self.position,
            self.from_lang,
            self.to_lang,
            self.gap,
            self.insertional_return
        )
    }
}

/// All switches of `tags`, ordered by position.
pub fn switches(tags: &[Tag], pair: &LanguagePair) -> Vec<Switch> {
    let mut out = Vec::new();
    let mut last: Option<(usize, LangCode)> = None;
    for (pos, tag) in tags.iter().enumerate() {
        let Some(lang) = pair.pair_lang(tag) else {
            continue;
        };
        if let Some((prev_pos, prev_lang)) = last {
            if prev_lang != lang {
                out.push(Switch {
                    position: pos,
                    from: prev_lang,
                    to: lang,
                    gap: pos - prev_pos - 1,
                    insertional_return: false,
                });
            }
        }
        last = Some((pos, lang));
    }
    out
}

/// Sets `insertional_return` on switches that close a one-token insertion.
///
/// The switch at `w3` of `w1 w2 w3` (tags `A B A`) is flagged only when the
/// switch at `w2` is itself unflagged, so in `A B A B A` the switches into
/// the two `B` tokens survive.
pub fn mark_insertional(switches: &mut [Switch], tags: &[Tag], policy: InsertionalPolicy) {
    if policy == InsertionalPolicy::KeepAll {
        return;
    }
    let skip_neutral = policy == InsertionalPolicy::ExcludeReturnSkipNeutral;
    let previous = |pos: usize| -> Option<usize> {
        (0..pos)
            .rev()
            .find(|&k| !(skip_neutral && tags[k].is_neutral()))
    };
    for idx in 1..switches.len() {
        let (head, tail) = switches.split_at_mut(idx);
        let prev_switch = &head[idx - 1];
        let cur = &mut tail[0];
        let Some(w2) = previous(cur.position) else {
            continue;
        };
        let Some(w1) = previous(w2) else {
            continue;
        };
        let returns = prev_switch.position == w2
            && !prev_switch.insertional_return
            && tags[w2].lang_code() == Some(cur.from)
            && tags[w1].lang_code() == Some(cur.to);
        if returns {
            cur.insertional_return = true;
        }
    }
}

pub fn detect_switch_points(utt: &Utterance, pair: &LanguagePair) -> Vec<SwitchPoint> {
    let tags: Vec<Tag> = utt.tags().collect();
    switches(&tags, pair)
        .into_iter()
        .map(|s| SwitchPoint::from_switch(&utt.id, s))
        .collect()
}

/// Switch points with `insertional_return` set according to `policy`; nothing is dropped.
pub fn mark_switch_points(
    points: &[SwitchPoint],
    utt: &Utterance,
    policy: InsertionalPolicy,
) -> Vec<SwitchPoint> {
    let tags: Vec<Tag> = utt.tags().collect();
    let mut raw: Vec<Switch> = points.iter().map(SwitchPoint::as_switch).collect();
    mark_insertional(&mut raw, &tags, policy);
    raw.into_iter()
        .map(|s| SwitchPoint::from_switch(&utt.id, s))
        .collect()
}

/// Drops the return legs of one-token insertions under `policy`.
pub fn filter_insertional(
    points: &[SwitchPoint],
    utt: &Utterance,
    policy: InsertionalPolicy,
) -> Vec<SwitchPoint> {
    mark_switch_points(points, utt, policy)
        .into_iter()
        .filter(|p| !p.insertional_return)
        .collect()
}

/// Detect, mark and filter in one step, on bare tags.
pub fn effective_switches(
    tags: &[Tag],
    pair: &LanguagePair,
    policy: InsertionalPolicy,
) -> Vec<Switch> {
    let mut all = switches(tags, pair);
    mark_insertional(&mut all, tags, policy);
    all.retain(|s| !s.insertional_return);
    all
}
