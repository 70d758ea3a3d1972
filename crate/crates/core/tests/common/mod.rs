//! Slow reference implementations shared by the integration tests and the
//! acceptance harness. Everything here is written straight from the
//! definitions, quadratic where that is simplest.

#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use cstrigger::association::{Direction, Mode, SharedType};
use cstrigger::corpus::{Corpus, LanguagePair, Tag};
use cstrigger::switching::InsertionalPolicy;
use cstrigger::{ContingencyTable, TestSpec};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    L1,
    L2,
    Other,
}

pub fn class_of(tag: &Tag, pair: &LanguagePair) -> Option<Class> {
    match tag {
        Tag::Shared(c) if *c == pair.l1 => Some(Class::L1),
        Tag::Shared(c) if *c == pair.l2 => Some(Class::L2),
        Tag::Shared(_) | Tag::SharedOther => Some(Class::Other),
        _ => None,
    }
}

/// (start, end, class) of every shared item.
pub fn oracle_items(tags: &[Tag], pair: &LanguagePair) -> Vec<(usize, usize, Class)> {
    let classes: Vec<Option<Class>> = tags.iter().map(|t| class_of(t, pair)).collect();
    let mut runs = Vec::new();
    let mut start = None;
    for i in 0..=tags.len() {
        let shared = i < tags.len() && classes[i].is_some();
        match (shared, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    for (s, e) in runs {
        let run: Vec<Class> = (s..=e).map(|i| classes[i].unwrap()).collect();
        let l1 = run.contains(&Class::L1);
        let l2 = run.contains(&Class::L2);
        if l1 && l2 {
            let mut seg = s;
            for i in s + 1..=e {
                if classes[i] != classes[i - 1] {
                    out.push((seg, i - 1, classes[seg].unwrap()));
                    seg = i;
                }
            }
            out.push((seg, e, classes[seg].unwrap()));
        } else {
            let class = if l1 {
                Class::L1
            } else if l2 {
                Class::L2
            } else {
                Class::Other
            };
            out.push((s, e, class));
        }
    }
    out
}

fn pair_lang(tag: &Tag, pair: &LanguagePair) -> Option<usize> {
    match tag {
        Tag::Lang(c) if *c == pair.l1 => Some(0),
        Tag::Lang(c) if *c == pair.l2 => Some(1),
        _ => None,
    }
}

/// (position, from index, gap) of every switch kept under `policy`.
pub fn oracle_switches(
    tags: &[Tag],
    pair: &LanguagePair,
    policy: InsertionalPolicy,
) -> Vec<(usize, usize, usize)> {
    let mut all = Vec::new();
    for i in 0..tags.len() {
        let Some(b) = pair_lang(&tags[i], pair) else {
            continue;
        };
        let prev = (0..i).rev().find(|&j| pair_lang(&tags[j], pair).is_some());
        if let Some(j) = prev {
            let a = pair_lang(&tags[j], pair).unwrap();
            if a != b {
                all.push((i, a, i - j - 1));
            }
        }
    }
    if policy == InsertionalPolicy::KeepAll {
        return all;
    }
    let skip = policy == InsertionalPolicy::ExcludeReturnSkipNeutral;
    let visible: Vec<usize> = (0..tags.len())
        .filter(|&k| !(skip && tags[k].is_neutral()))
        .collect();
    let mut flagged = vec![false; all.len()];
    for n in 1..all.len() {
        let (pos, from, _) = all[n];
        let Some(at) = visible.iter().position(|&k| k == pos) else {
            continue;
        };
        if at < 2 {
            continue;
        }
        let (w1, w2) = (visible[at - 2], visible[at - 1]);
        let prev = all[n - 1];
        if prev.0 == w2
            && !flagged[n - 1]
            && pair_lang(&tags[w2], pair) == Some(from)
            && pair_lang(&tags[w1], pair) == Some(1 - from)
        {
            flagged[n] = true;
        }
    }
    all.into_iter()
        .zip(flagged)
        .filter(|(_, f)| !f)
        .map(|(s, _)| s)
        .collect()
}

fn type_matches(shared_type: SharedType, class: Class) -> bool {
    matches!(
        (shared_type, class),
        (SharedType::AllShared, _)
            | (SharedType::SharedL1, Class::L1)
            | (SharedType::SharedL2, Class::L2)
            | (SharedType::SharedOther, Class::Other)
    )
}

pub fn oracle_table(corpus: &Corpus, spec: &TestSpec) -> ContingencyTable {
    let pair = &corpus.pair;
    let mut t = ContingencyTable::default();
    for utt in &corpus.utterances {
        let tags: Vec<Tag> = utt.tags().collect();
        let n = tags.len();
        let shared = oracle_items(&tags, pair);
        let mut items: Vec<(usize, usize, bool)> = Vec::new();
        for i in 0..n {
            if let Some(&(s, e, c)) = shared.iter().find(|(s, e, _)| *s <= i && i <= *e) {
                if s == i {
                    items.push((s, e, type_matches(spec.shared_type, c)));
                }
            } else if !(spec.skip_neutral_items && tags[i].is_neutral()) {
                items.push((i, i, false));
            }
        }
        let switches = oracle_switches(&tags, pair, spec.insertional_policy);
        let d = spec.distance as usize;
        for (s, e, is_shared) in items {
            if s == 0 || e + 1 >= n {
                continue;
            }
            let near = switches.iter().any(|&(p, from, _)| {
                let dir_ok = match spec.direction {
                    Direction::L1ToL2 => from == 0,
                    Direction::L2ToL1 => from == 1,
                    Direction::Both => true,
                };
                let after = p > e && p - e <= d;
                let before = p < s && s - p <= d;
                dir_ok
                    && match spec.mode {
                        Mode::Precede => after,
                        Mode::Neighbor => after || before,
                    }
            });
            match (near, is_shared) {
                (true, true) => t.a += 1,
                (true, false) => t.b += 1,
                (false, true) => t.c += 1,
                (false, false) => t.d += 1,
            }
        }
    }
    t
}

/// Two-sided Fisher p by exact integer enumeration (u128 binomials).
pub fn brute_fisher(t: &ContingencyTable) -> f64 {
    fn binom(n: u64, k: u64) -> u128 {
        let k = k.min(n - k);
        let mut r: u128 = 1;
        for i in 0..k {
            r = r * (n - i) as u128 / (i + 1) as u128;
        }
        r
    }
    let (r1, c1, n) = (t.a + t.b, t.a + t.c, t.total());
    let r2 = n - r1;
    let lo = c1.saturating_sub(r2);
    let hi = r1.min(c1);
    let weight = |k: u64| binom(r1, k) * binom(r2, c1 - k);
    let observed = weight(t.a);
    let total: u128 = (lo..=hi).map(weight).sum();
    let mut extreme: u128 = 0;
    for k in lo..=hi {
        let w = weight(k);
        // ties count as extreme; relative slack 1e-7 as in the library
        if (w as f64) <= (observed as f64) * (1.0 + 1e-7) {
            extreme += w;
        }
    }
    (extreme as f64 / total as f64).min(1.0)
}

pub fn all_specs(policy: InsertionalPolicy, skip_neutral: bool) -> Vec<TestSpec> {
    let mut out = Vec::new();
    for st in SharedType::ALL {
        for dir in Direction::ALL {
            for mode in Mode::ALL {
                for d in 1..=6 {
                    let mut spec = TestSpec::new(st, dir, mode, d);
                    spec.insertional_policy = policy;
                    spec.skip_neutral_items = skip_neutral;
                    out.push(spec);
                }
            }
        }
    }
    out
}

/// A grid whose cells carry the given (rsp, p) values; tables are left empty.
pub fn synthetic_grid(
    shared_type: SharedType,
    value: impl Fn(Direction, Mode, u32) -> (Option<f64>, f64),
) -> cstrigger::GridResult {
    use cstrigger::grid::GridCell;
    let pair = LanguagePair::new("en", "es").unwrap();
    let spec = cstrigger::GridSpec::new("synthetic", pair, shared_type);
    let mut cells = Vec::new();
    for &direction in &spec.directions {
        for &mode in &spec.modes {
            for &distance in &spec.distances {
                let (rsp, p_value) = value(direction, mode, distance);
                let result = cstrigger::TestResult {
                    table: ContingencyTable::new(1, 1, 1, 1),
                    shared_rate: None,
                    nonshared_rate: None,
                    rsp,
                    rsp_undefined: None,
                    p_value,
                };
                cells.push(GridCell {
                    direction,
                    mode,
                    distance,
                    significant: p_value < spec.alpha,
                    result,
                });
            }
        }
    }
    cstrigger::GridResult::from_cells(spec, cells)
}
