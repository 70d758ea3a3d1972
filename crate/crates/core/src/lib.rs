//! Code-switch detection and shared-item trigger statistics for
//! token-level language-tagged bilingual corpora.
//!
//! The pipeline: [`corpus`] parses and validates tagged text,
//! [`switching`] groups shared items and finds switch points,
//! [`association`] counts items near switches into 2×2 tables,
//! [`exact`] computes Fisher p-values and relative switching propensities,
//! [`grid`] runs full test grids and the aggregate checks, and [`plot`]
//! draws them.

pub mod association;
pub mod cli;
pub mod corpus;
pub mod exact;
pub mod grid;
pub mod plot;
pub mod switching;
pub mod synth;

pub use association::{
    build_contingency, enumerate_items, near_switch, ContingencyTable, Direction, ItemOccurrence,
    Mode, SharedType, TestSpec,
};
pub use corpus::{
    corpus_stats, parse_corpus, validate_corpus, write_corpus, Corpus, LanguagePair, Tag,
    TagMapping, Token, Utterance,
};
pub use exact::{fisher_exact_two_sided, relative_switching_propensity, TestResult};
pub use grid::{evaluate_hypotheses, run_grid, GridResult, GridSpec, HypothesisReport};
pub use plot::{render_multitest_svg, PlotStyle};
pub use switching::{
    detect_switch_points, filter_insertional, group_shared_items, InsertionalPolicy, SharedItem,
    SwitchPoint,
};
