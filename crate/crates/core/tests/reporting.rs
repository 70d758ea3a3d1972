mod common;

use common::synthetic_grid;
use cstrigger::association::{Direction, Mode, SharedType};
use cstrigger::corpus::LanguagePair;
use cstrigger::synth::random_corpus;
use cstrigger::{
    evaluate_hypotheses, render_multitest_svg, run_grid, GridResult, GridSpec, PlotStyle,
};

fn flat(_: Direction, _: Mode, _: u32) -> (Option<f64>, f64) {
    (Some(1.5), 0.01)
}

#[test]
fn constant_grid_passes_h2_and_h3() {
    let r = evaluate_hypotheses(&[synthetic_grid(SharedType::AllShared, flat)], 0.05);
    assert_eq!((r.h1.tests, r.h1.non_significant), (36, 0));
    assert_eq!((r.h2.lines, r.h2.monotone), (6, 6));
    assert_eq!(
        (r.h3.pairs_compared, r.h3.points_total, r.h3.violations),
        (18, 36, 0)
    );
    assert!(r.h4.comparisons.is_empty());
}

#[test]
fn single_rise_is_located() {
    let grid = synthetic_grid(SharedType::AllShared, |dir, mode, d| {
        let base = 3.0 - 0.2 * d as f64;
        let bump = if (dir, mode, d) == (Direction::Both, Mode::Precede, 3) {
            1.0
        } else {
            0.0
        };
        (Some(base + bump), if d == 6 { 0.2 } else { 0.001 })
    });
    let r = evaluate_hypotheses(&[grid], 0.05);
    assert_eq!(r.h1.non_significant, 6);
    assert_eq!(r.h2.monotone, 5);
    let bad: Vec<_> = r.h2.checks.iter().filter(|c| !c.monotone).collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(
        (bad[0].direction, bad[0].mode, bad[0].violations.clone()),
        (Direction::Both, Mode::Precede, vec![3])
    );
    assert_eq!(r.h3.violations, 0);
}

#[test]
fn neighbor_above_precede_counts_for_h3() {
    let grid = synthetic_grid(SharedType::AllShared, |dir, mode, d| {
        let v = match (dir, mode, d) {
            (Direction::L1ToL2, Mode::Neighbor, 1 | 2) | (Direction::L2ToL1, Mode::Neighbor, 5) => {
                2.0
            }
            _ => 1.5,
        };
        (Some(v), 0.01)
    });
    let r = evaluate_hypotheses(&[grid], 0.05);
    assert_eq!(r.h3.violations, 3);
}

#[test]
fn undefined_points_are_skipped() {
    let grid = synthetic_grid(SharedType::SharedL1, |_, mode, d| {
        if d == 2 {
            (None, 1.0)
        } else {
            (Some(if mode == Mode::Precede { 2.0 } else { 1.0 }), 0.01)
        }
    });
    let r = evaluate_hypotheses(&[grid], 0.05);
    assert_eq!(r.undefined_cells.len(), 6);
    assert_eq!(r.h3.pairs_compared, 15);
    assert_eq!(r.h2.monotone, 6);
    // shared-l1: origin is en, to-origin is es->en
    assert_eq!(r.h4.comparisons.len(), 12);
    assert_eq!(r.h4.ties, 10);
}

fn style() -> PlotStyle {
    PlotStyle::default()
}

#[test]
fn plot_marks_nonsignificant_points() {
    let grid = synthetic_grid(SharedType::AllShared, |dir, mode, d| {
        let p = if dir == Direction::Both && mode == Mode::Neighbor && d > 3 {
            0.3
        } else {
            0.001
        };
        (Some(2.0 / d as f64), p)
    });
    let svg = render_multitest_svg(&grid, &style());
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("class=\"nonsig\"").count(), 3);
    assert_eq!(svg.matches("class=\"point\"").count(), 36);
    assert_eq!(svg, render_multitest_svg(&grid, &style()));
    assert!(svg.contains("stroke-dasharray=\"7,5\""));
    for color in ["#e8b100", "#d62728", "#2ca02c"] {
        assert!(svg.contains(color));
    }
}

fn attr(tag: &str, name: &str) -> f64 {
    let key = format!(" {name}=\"");
    let start = tag.find(&key).unwrap() + key.len();
    let end = start + tag[start..].find('"').unwrap();
    tag[start..end].parse().unwrap()
}

#[test]
fn points_stay_inside_the_canvas() {
    let pair = LanguagePair::new("en", "es").unwrap();
    for seed in 0..20 {
        let corpus = random_corpus(seed, &pair, 40, 30);
        let grid = run_grid(
            &corpus,
            &GridSpec::new("r", pair.clone(), SharedType::AllShared),
        );
        for log_y in [false, true] {
            let st = PlotStyle { log_y, ..style() };
            let svg = render_multitest_svg(&grid, &st);
            for tag in svg.split('<').filter(|t| t.starts_with("circle")) {
                let (x, y) = (attr(tag, "cx"), attr(tag, "cy"));
                assert!(x.is_finite() && y.is_finite());
                assert!(
                    (0.0..=st.width).contains(&x) && (0.0..=st.height).contains(&y),
                    "{tag}"
                );
            }
        }
    }
}

#[test]
fn degenerate_grid_plots_placeholder() {
    let pair = LanguagePair::new("en", "es").unwrap();
    let mut corpus = random_corpus(0, &pair, 0, 1);
    corpus.utterances.clear();
    let grid = run_grid(
        &corpus,
        &GridSpec::new("empty", pair, SharedType::SharedOther),
    );
    let svg = render_multitest_svg(&grid, &style());
    assert!(svg.contains("no data"));
}

#[test]
fn grid_json_round_trip() {
    let pair = LanguagePair::new("en", "es").unwrap();
    let corpus = random_corpus(11, &pair, 30, 30);
    let grid = run_grid(&corpus, &GridSpec::new("r", pair, SharedType::SharedL2));
    let json = grid.to_json();
    let back = GridResult::from_json(&json).unwrap();
    assert_eq!(back.to_json(), json);
    let mut csv = Vec::new();
    grid.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert_eq!(csv.lines().count(), 37);
    assert!(csv.starts_with("direction,mode,distance,a,b,c,d,"));
}
