//! Shared-item / switch co-occurrence counting.
//!
//! Every utterance position except the first and last yields one item
//! occurrence: a grouped shared item counts once whatever its width, every
//! other token counts on its own. An item is "near" a switch when a switch of
//! the requested direction lies within `distance` tokens after its last token
//! (`precede`), or within `distance` tokens on either side (`neighbor`).

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LanguagePair, Tag, Utterance};
use crate::switching::{
    effective_switches, shared_spans, InsertionalPolicy, SharedClass, Span, Switch, SwitchPoint,
};

pub const DEFAULT_MAX_DISTANCE: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharedType {
    SharedL1,
    SharedL2,
    SharedOther,
    AllShared,
}

impl SharedType {
    pub const ALL: [SharedType; 4] = [
        SharedType::SharedL1,
        SharedType::SharedL2,
        SharedType::SharedOther,
        SharedType::AllShared,
    ];

    pub fn matches(self, class: SharedClass) -> bool {
        match self {
            SharedType::SharedL1 => class == SharedClass::L1,
            SharedType::SharedL2 => class == SharedClass::L2,
            SharedType::SharedOther => class == SharedClass::Other,
            SharedType::AllShared => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SharedType::SharedL1 => "shared-l1",
            SharedType::SharedL2 => "shared-l2",
            SharedType::SharedOther => "shared-other",
            SharedType::AllShared => "all-shared",
        }
    }
}

impl fmt::Display for SharedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SharedType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "shared-l1" | "l1" => Ok(SharedType::SharedL1),
            "shared-l2" | "l2" => Ok(SharedType::SharedL2),
            "shared-other" | "other" => Ok(SharedType::SharedOther),
            "all-shared" | "all" => Ok(SharedType::AllShared),
            _ => Err(format!(
                "unknown shared type `{s}` (expected shared-l1, shared-l2, shared-other or all-shared)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "l1-l2")]
    L1ToL2,
    #[serde(rename = "l2-l1")]
    L2ToL1,
    #[serde(rename = "both")]
    Both,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::L1ToL2, Direction::L2ToL1, Direction::Both];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::L1ToL2 => "l1-l2",
            Direction::L2ToL1 => "l2-l1",
            Direction::Both => "both",
        }
    }

    /// Human label with concrete codes, e.g. `en→es`.
    pub fn label(self, pair: &LanguagePair) -> String {
        match self {
            Direction::L1ToL2 => format!("{}→{}", pair.l1, pair.l2),
            Direction::L2ToL1 => format!("{}→{}", pair.l2, pair.l1),
            Direction::Both => "both".to_string(),
        }
    }

    fn admits(self, switch_dir: usize) -> bool {
        match self {
            Direction::L1ToL2 => switch_dir == 0,
            Direction::L2ToL1 => switch_dir == 1,
            Direction::Both => true,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l1-l2" | "l1->l2" | "l1l2" => Ok(Direction::L1ToL2),
            "l2-l1" | "l2->l1" | "l2l1" => Ok(Direction::L2ToL1),
            "both" => Ok(Direction::Both),
            _ => Err(format!(
                "unknown direction `{s}` (expected l1-l2, l2-l1 or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Precede,
    Neighbor,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Precede, Mode::Neighbor];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Precede => "precede",
            Mode::Neighbor => "neighbor",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "precede" => Ok(Mode::Precede),
            "neighbor" | "neighbour" => Ok(Mode::Neighbor),
            _ => Err(format!("unknown mode `{s}` (expected precede or neighbor)")),
        }
    }
}

/// One association test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestSpec {
    pub shared_type: SharedType,
    pub direction: Direction,
    pub mode: Mode,
    pub distance: u32,
    #[serde(default)]
    pub insertional_policy: InsertionalPolicy,
    /// Leave punctuation, emoji, hashtags and `other` tokens out of the
    /// non-shared column. They still take up distance.
    #[serde(default)]
    pub skip_neutral_items: bool,
}

impl TestSpec {
    pub fn new(shared_type: SharedType, direction: Direction, mode: Mode, distance: u32) -> Self {
        TestSpec {
            shared_type,
            direction,
            mode,
            distance,
            insertional_policy: InsertionalPolicy::default(),
            skip_neutral_items: false,
        }
    }

    pub fn validate(&self, max_distance: u32) -> Result<(), String> {
        if self.distance == 0 || self.distance > max_distance {
            return Err(format!(
                "distance {} outside 1..={max_distance}",
                self.distance
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemOccurrence {
    pub utterance_id: String,
    pub span: Span,
    pub is_shared: bool,
}

/// 2×2 counts. Rows: near a switch or not; columns: shared or not.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContingencyTable {
    /// shared, near a switch
    pub a: u64,
    /// non-shared, near a switch
    pub b: u64,
    /// shared, no switch nearby
    pub c: u64,
    /// non-shared, no switch nearby
    pub d: u64,
}

impl ContingencyTable {
    pub fn new(a: u64, b: u64, c: u64, d: u64) -> Self {
        ContingencyTable { a, b, c, d }
    }

    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }

    pub fn shared_total(&self) -> u64 {
        self.a + self.c
    }

    pub fn nonshared_total(&self) -> u64 {
        self.b + self.d
    }

    /// `a<TAB>b<TAB>c<TAB>d`
    pub fn dump_line(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.a, self.b, self.c, self.d)
    }
}

impl Add for ContingencyTable {
    type Output = ContingencyTable;

    fn add(self, rhs: Self) -> Self {
        ContingencyTable {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            c: self.c + rhs.c,
            d: self.d + rhs.d,
        }
    }
}

impl AddAssign for ContingencyTable {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// JSON form of a single test: the spec with its table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub spec: TestSpec,
    pub table: ContingencyTable,
}

/// Item spans of one utterance and whether each counts as shared.
fn occurrences(
    tags: &[Tag],
    pair: &LanguagePair,
    shared_type: SharedType,
    skip_neutral_items: bool,
) -> Vec<(Span, bool)> {
    let n = tags.len();
    if n < 3 {
        return Vec::new();
    }
    let last = n - 1;
    let mut out = Vec::with_capacity(n);
    let mut items = shared_spans(tags, pair).into_iter().peekable();
    let mut pos = 0;
    while pos < n {
        if let Some(&(span, class)) = items.peek() {
            if span.start == pos {
                items.next();
                if span.start > 0 && span.end < last {
                    out.push((span, shared_type.matches(class)));
                }
                pos = span.end + 1;
                continue;
            }
        }
        if pos > 0 && pos < last && !(skip_neutral_items && tags[pos].is_neutral()) {
            out.push((Span::single(pos), false));
        }
        pos += 1;
    }
    out
}

pub fn enumerate_items(
    utt: &Utterance,
    pair: &LanguagePair,
    spec: &TestSpec,
) -> Vec<ItemOccurrence> {
    let tags: Vec<Tag> = utt.tags().collect();
    occurrences(&tags, pair, spec.shared_type, spec.skip_neutral_items)
        .into_iter()
        .map(|(span, is_shared)| ItemOccurrence {
            utterance_id: utt.id.clone(),
            span,
            is_shared,
        })
        .collect()
}

fn direction_matches(
    direction: Direction,
    from: crate::corpus::LangCode,
    pair: &LanguagePair,
) -> bool {
    direction.admits(if from == pair.l1 { 0 } else { 1 })
}

/// Whether some switch in `points` falls in the item's window.
pub fn near_switch(
    item: &ItemOccurrence,
    points: &[SwitchPoint],
    pair: &LanguagePair,
    spec: &TestSpec,
) -> bool {
    let d = spec.distance as usize;
    points
        .iter()
        .filter(|p| direction_matches(spec.direction, p.from_lang, pair))
        .any(|p| {
            let after = p.position > item.span.end && p.position - item.span.end <= d;
            let before = p.position < item.span.start && item.span.start - p.position <= d;
            match spec.mode {
                Mode::Precede => after,
                Mode::Neighbor => after || before,
            }
        })
}

/// Per-item nearest-switch distances, binned up to `max_distance`.
///
/// `shared[dir][mode][k]` counts shared items whose closest admissible switch
/// is exactly `k` tokens away (k ≥ 1); items with none within reach are only
/// in the totals. Tables for any distance ≤ `max_distance` are prefix sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityHistogram {
    pub max_distance: u32,
    shared: [[Vec<u64>; 2]; 3],
    nonshared: [[Vec<u64>; 2]; 3],
    pub shared_total: u64,
    pub nonshared_total: u64,
}

impl ProximityHistogram {
    pub fn new(max_distance: u32) -> Self {
        let bins = || vec![0u64; max_distance as usize + 1];
        let grid = || [[bins(), bins()], [bins(), bins()], [bins(), bins()]];
        ProximityHistogram {
            max_distance,
            shared: grid(),
            nonshared: grid(),
            shared_total: 0,
            nonshared_total: 0,
        }
    }

    pub fn table(&self, direction: Direction, mode: Mode, distance: u32) -> ContingencyTable {
        assert!(
            distance <= self.max_distance,
            "distance {distance} beyond histogram reach {}",
            self.max_distance
        );
        let upto = distance as usize;
        let a: u64 = self.shared[direction.index()][mode.index()][..=upto]
            .iter()
            .sum();
        let b: u64 = self.nonshared[direction.index()][mode.index()][..=upto]
            .iter()
            .sum();
        ContingencyTable {
            a,
            b,
            c: self.shared_total - a,
            d: self.nonshared_total - b,
        }
    }

    fn merge(mut self, other: &ProximityHistogram) -> Self {
        debug_assert_eq!(self.max_distance, other.max_distance);
        for (mine, theirs) in [
            (&mut self.shared, &other.shared),
            (&mut self.nonshared, &other.nonshared),
        ] {
            for (row_m, row_t) in mine.iter_mut().zip(theirs.iter()) {
                for (bins_m, bins_t) in row_m.iter_mut().zip(row_t.iter()) {
                    for (x, y) in bins_m.iter_mut().zip(bins_t.iter()) {
                        *x += *y;
                    }
                }
            }
        }
        self.shared_total += other.shared_total;
        self.nonshared_total += other.nonshared_total;
        self
    }

    /// Adds one utterance's items.
    pub fn add_utterance(&mut self, tags: &[Tag], pair: &LanguagePair, options: &CountOptions) {
        let items = occurrences(tags, pair, options.shared_type, options.skip_neutral_items);
        if items.is_empty() {
            return;
        }
        let switches = effective_switches(tags, pair, options.insertional_policy);
        let reach = self.max_distance as usize;
        for (span, is_shared) in items {
            if is_shared {
                self.shared_total += 1;
            } else {
                self.nonshared_total += 1;
            }
            if switches.is_empty() {
                continue;
            }
            let (after, before) = nearest_by_direction(&switches, pair, span, reach);
            let bins = if is_shared {
                &mut self.shared
            } else {
                &mut self.nonshared
            };
            for direction in Direction::ALL {
                let pick = |dists: &[Option<usize>; 2]| -> Option<usize> {
                    (0..2)
                        .filter(|&k| direction.admits(k))
                        .filter_map(|k| dists[k])
                        .min()
                };
                let fwd = pick(&after);
                let back = pick(&before);
                if let Some(d) = fwd {
                    bins[direction.index()][Mode::Precede.index()][d] += 1;
                }
                let either = match (fwd, back) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                if let Some(d) = either {
                    bins[direction.index()][Mode::Neighbor.index()][d] += 1;
                }
            }
        }
    }
}

/// Distance to the closest switch after / before `span`, per switch
/// direction (0: l1→l2, 1: l2→l1), ignoring anything beyond `reach`.
fn nearest_by_direction(
    switches: &[Switch],
    pair: &LanguagePair,
    span: Span,
    reach: usize,
) -> ([Option<usize>; 2], [Option<usize>; 2]) {
    let dir_of = |s: &Switch| if s.from == pair.l1 { 0 } else { 1 };
    let mut after = [None, None];
    let mut before = [None, None];
    let first_after = switches.partition_point(|s| s.position <= span.end);
    for s in &switches[first_after..] {
        let d = s.position - span.end;
        if d > reach {
            break;
        }
        let slot = &mut after[dir_of(s)];
        if slot.is_none() {
            *slot = Some(d);
        }
        if after[0].is_some() && after[1].is_some() {
            break;
        }
    }
    let first_not_before = switches.partition_point(|s| s.position < span.start);
    for s in switches[..first_not_before].iter().rev() {
        let d = span.start - s.position;
        if d > reach {
            break;
        }
        let slot = &mut before[dir_of(s)];
        if slot.is_none() {
            *slot = Some(d);
        }
        if before[0].is_some() && before[1].is_some() {
            break;
        }
    }
    (after, before)
}

/// Knobs shared by every test of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    pub shared_type: SharedType,
    pub insertional_policy: InsertionalPolicy,
    pub skip_neutral_items: bool,
}

impl From<&TestSpec> for CountOptions {
    fn from(spec: &TestSpec) -> Self {
        CountOptions {
            shared_type: spec.shared_type,
            insertional_policy: spec.insertional_policy,
            skip_neutral_items: spec.skip_neutral_items,
        }
    }
}

/// Histogram over the whole corpus. Utterances are processed in parallel on
/// the current rayon pool; integer sums make the result order-independent.
pub fn proximity_histogram(
    corpus: &Corpus,
    options: &CountOptions,
    max_distance: u32,
) -> ProximityHistogram {
    let pair = &corpus.pair;
    corpus
        .utterances
        .par_iter()
        .with_min_len(256)
        .fold(
            || (ProximityHistogram::new(max_distance), Vec::<Tag>::new()),
            |(mut hist, mut tags), utt| {
                tags.clear();
                tags.extend(utt.tags());
                hist.add_utterance(&tags, pair, options);
                (hist, tags)
            },
        )
        .map(|(hist, _)| hist)
        .reduce(
            || ProximityHistogram::new(max_distance),
            |acc, h| acc.merge(&h),
        )
}

pub fn build_contingency(corpus: &Corpus, spec: &TestSpec) -> ContingencyTable {
    proximity_histogram(corpus, &CountOptions::from(spec), spec.distance).table(
        spec.direction,
        spec.mode,
        spec.distance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switching::{detect_switch_points, filter_insertional};

    fn en_ar() -> LanguagePair {
        LanguagePair::new("en", "ar").unwrap()
    }

    fn ahly() -> Utterance {
        let mut tags = vec!["lang:en"; 5];
        tags.push("shared:ar");
        tags.extend(["lang:en"; 4]);
        tags.extend(["lang:ar"; 3]);
        tags.push("other");
        Utterance::from_tags("5", &tags)
    }

    fn spec(shared_type: SharedType, direction: Direction, mode: Mode, distance: u32) -> TestSpec {
        TestSpec::new(shared_type, direction, mode, distance)
    }

    #[test]
    fn ahly_items() {
        let pair = en_ar();
        let items = enumerate_items(
            &ahly(),
            &pair,
            &spec(SharedType::SharedL2, Direction::Both, Mode::Precede, 1),
        );
        assert_eq!(items.len(), 12);
        let shared: Vec<_> = items.iter().filter(|i| i.is_shared).collect();
        assert_eq!(shared.len(), 1);
        assert_eq!(shared[0].span, Span::single(5));
        let positions: Vec<usize> = items.iter().map(|i| i.span.start).collect();
        assert_eq!(positions, (1..=12).collect::<Vec<_>>());

        let other_type = enumerate_items(
            &ahly(),
            &pair,
            &spec(SharedType::SharedL1, Direction::Both, Mode::Precede, 1),
        );
        assert_eq!(other_type.len(), 12);
        assert!(other_type.iter().all(|i| !i.is_shared));
    }

    #[test]
    fn two_token_utterance_has_no_items() {
        let utt = Utterance::from_tags("x", &["lang:en", "shared:ar"]);
        let items = enumerate_items(
            &utt,
            &en_ar(),
            &spec(SharedType::AllShared, Direction::Both, Mode::Precede, 1),
        );
        assert!(items.is_empty());
    }

    #[test]
    fn items_touching_edges_are_dropped() {
        let utt = Utterance::from_tags("x", &["shared:ar", "shared:ar", "lang:en", "shared:en"]);
        let items = enumerate_items(
            &utt,
            &en_ar(),
            &spec(SharedType::AllShared, Direction::Both, Mode::Precede, 1),
        );
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].span, Span::single(2));
    }

    #[test]
    fn ahly_window() {
        let pair = en_ar();
        let utt = ahly();
        let points = filter_insertional(
            &detect_switch_points(&utt, &pair),
            &utt,
            InsertionalPolicy::ExcludeReturn,
        );
        let item = ItemOccurrence {
            utterance_id: "5".into(),
            span: Span::single(5),
            is_shared: true,
        };
        let at5 = spec(SharedType::SharedL2, Direction::L1ToL2, Mode::Precede, 5);
        assert!(near_switch(&item, &points, &pair, &at5));
        let at4 = TestSpec { distance: 4, ..at5 };
        assert!(!near_switch(&item, &points, &pair, &at4));
        let wrong_dir = TestSpec {
            direction: Direction::L2ToL1,
            ..at5
        };
        assert!(!near_switch(&item, &points, &pair, &wrong_dir));
        assert!(!near_switch(&item, &[], &pair, &at5));
    }

    #[test]
    fn neighbor_window_looks_back() {
        let pair = en_ar();
        let point = SwitchPoint {
            utterance_id: "u".into(),
            position: 2,
            from_lang: pair.l1,
            to_lang: pair.l2,
            gap: 0,
            insertional_return: false,
        };
        let item = ItemOccurrence {
            utterance_id: "u".into(),
            span: Span::single(4),
            is_shared: true,
        };
        let neighbor = spec(SharedType::AllShared, Direction::Both, Mode::Neighbor, 2);
        assert!(near_switch(
            &item,
            std::slice::from_ref(&point),
            &pair,
            &neighbor
        ));
        let precede = TestSpec {
            mode: Mode::Precede,
            ..neighbor
        };
        assert!(!near_switch(&item, &[point], &pair, &precede));
    }

    #[test]
    fn ahly_table() {
        let mut corpus = Corpus::new(en_ar());
        corpus.utterances.push(ahly());
        let t = build_contingency(
            &corpus,
            &spec(SharedType::SharedL2, Direction::L1ToL2, Mode::Precede, 5),
        );
        // shared item at 5 sees the switch at 10; non-shared tokens 6..=9 do too
        assert_eq!(t, ContingencyTable::new(1, 4, 0, 7));
    }

    #[test]
    fn empty_corpus_table_is_zero() {
        let corpus = Corpus::new(en_ar());
        let t = build_contingency(
            &corpus,
            &spec(SharedType::AllShared, Direction::Both, Mode::Neighbor, 6),
        );
        assert_eq!(t, ContingencyTable::default());
    }

    #[test]
    fn skip_neutral_items_drops_them_from_counts() {
        let mut corpus = Corpus::new(en_ar());
        corpus.utterances.push(Utterance::from_tags(
            "u",
            &[
                "lang:en",
                "punct",
                "emoji",
                "shared:ar",
                "lang:ar",
                "lang:ar",
            ],
        ));
        let base = spec(SharedType::SharedL2, Direction::Both, Mode::Precede, 1);
        let with = build_contingency(&corpus, &base);
        let without = build_contingency(
            &corpus,
            &TestSpec {
                skip_neutral_items: true,
                ..base
            },
        );
        assert_eq!(with.nonshared_total(), 3);
        assert_eq!(without.nonshared_total(), 1);
        assert_eq!(with.a, 1);
        assert_eq!(without.a, 1);
    }

    #[test]
    fn parse_enums() {
        assert_eq!("shared-l1".parse::<SharedType>(), Ok(SharedType::SharedL1));
        assert_eq!("all".parse::<SharedType>(), Ok(SharedType::AllShared));
        assert_eq!("l2-l1".parse::<Direction>(), Ok(Direction::L2ToL1));
        assert_eq!("neighbor".parse::<Mode>(), Ok(Mode::Neighbor));
        assert!("sideways".parse::<Mode>().is_err());
        let json = serde_json::to_string(&spec(
            SharedType::SharedOther,
            Direction::L1ToL2,
            Mode::Precede,
            3,
        ))
        .unwrap();
        assert_eq!(
            json,
            r#"{"shared_type":"shared-other","direction":"l1-l2","mode":"precede","distance":3,"insertional_policy":"exclude-return","skip_neutral_items":false}"#
        );
    }

    #[test]
    fn distance_bounds() {
        let s = spec(SharedType::AllShared, Direction::Both, Mode::Precede, 7);
        assert!(s.validate(DEFAULT_MAX_DISTANCE).is_err());
        assert!(s.validate(10).is_ok());
        assert!(TestSpec { distance: 0, ..s }.validate(10).is_err());
    }
}
