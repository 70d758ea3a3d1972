//! Seeded synthetic corpora for testing and benchmarking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, LanguagePair, NeutralKind, Tag, Token, Utterance};

/// Corpus drawn uniformly over the whole tag alphabet (both pair languages,
/// a third language, every shared subclass, `mix` and all neutral kinds).
pub fn random_corpus(
    seed: u64,
    pair: &LanguagePair,
    max_utterances: usize,
    max_len: usize,
) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let third = if pair.l1.as_str() != "fr" && pair.l2.as_str() != "fr" {
        Tag::lang("fr")
    } else {
        Tag::lang("it")
    };
    let mut alphabet = vec![
        Tag::Lang(pair.l1),
        Tag::Lang(pair.l2),
        third,
        Tag::Shared(pair.l1),
        Tag::Shared(pair.l2),
        Tag::SharedOther,
        Tag::Mix,
    ];
    alphabet.extend(NeutralKind::ALL.iter().map(|k| Tag::Neutral(*k)));
    // language tokens dominate real data; weight them up so switches are common
    alphabet.extend([Tag::Lang(pair.l1), Tag::Lang(pair.l2)].repeat(3));

    let n_utts = rng.gen_range(0..=max_utterances);
    let mut corpus = Corpus::new(pair.clone());
    corpus.source_label = format!("random-{seed}");
    for u in 0..n_utts {
        let len = rng.gen_range(1..=max_len.max(1));
        let tokens = (0..len)
            .map(|i| {
                let tag = *alphabet.choose(&mut rng).expect("non-empty alphabet");
                Token::new(format!("t{i}"), tag)
            })
            .collect();
        corpus
            .utterances
            .push(Utterance::new(format!("u{u}"), tokens));
    }
    corpus
}

/// Parameters for a corpus with a known trigger effect.
///
/// Each language token switches language with probability
/// `baseline × multiplier(k)`, where `k` is the distance to the end of the
/// closest preceding shared item. The multiplier is `peak` at `k = 1`, falls
/// linearly to 1 at `k = reach` and stays 1 beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedEffect {
    pub baseline: f64,
    pub peak: f64,
    pub reach: u32,
    /// Chance that a position (other than the first) starts a shared item.
    pub shared_rate: f64,
    /// Chance that a shared item spans two tokens.
    pub two_token_items: f64,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for PlantedEffect {
    fn default() -> Self {
        PlantedEffect {
            baseline: 0.1,
            peak: 2.0,
            reach: 6,
            shared_rate: 0.03,
            two_token_items: 0.1,
            min_len: 8,
            max_len: 24,
        }
    }
}

impl PlantedEffect {
    pub fn multiplier(&self, distance: Option<usize>) -> f64 {
        match distance {
            Some(k) if k >= 1 && (k as u32) < self.reach => {
                let slope = (self.peak - 1.0) / (self.reach - 1) as f64;
                self.peak - slope * (k - 1) as f64
            }
            _ => 1.0,
        }
    }

    pub fn generate(&self, seed: u64, pair: &LanguagePair, utterances: usize) -> Corpus {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut corpus = Corpus::new(pair.clone());
        corpus.source_label = format!("planted-{seed}");
        corpus.utterances.reserve(utterances);
        let shared_tags = [Tag::Shared(pair.l1), Tag::Shared(pair.l2), Tag::SharedOther];
        for u in 0..utterances {
            let len = rng.gen_range(self.min_len..=self.max_len);
            let mut lang = if rng.gen_bool(0.5) { pair.l1 } else { pair.l2 };
            let mut tokens = Vec::with_capacity(len);
            tokens.push(Token::new("w", Tag::Lang(lang)));
            let mut last_shared_end: Option<usize> = None;
            let mut pos = 1;
            while pos < len {
                if pos + 1 < len && rng.gen_bool(self.shared_rate) {
                    let tag = *shared_tags.choose(&mut rng).expect("three shared tags");
                    let width = if pos + 2 < len && rng.gen_bool(self.two_token_items) {
                        2
                    } else {
                        1
                    };
                    for _ in 0..width {
                        tokens.push(Token::new("s", tag));
                    }
                    pos += width;
                    last_shared_end = Some(pos - 1);
                    continue;
                }
                let factor = self.multiplier(last_shared_end.map(|e| pos - e));
                if rng.gen_bool((self.baseline * factor).min(1.0)) {
                    lang = if lang == pair.l1 { pair.l2 } else { pair.l1 };
                }
                tokens.push(Token::new("w", Tag::Lang(lang)));
                pos += 1;
            }
            corpus
                .utterances
                .push(Utterance::new(format!("p{u}"), tokens));
        }
        corpus
    }
}
