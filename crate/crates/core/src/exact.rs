//! Exact inference on 2×2 tables: hypergeometric point probabilities,
//! two-sided Fisher p-values and the relative switching propensity.
//!
//! Point probabilities use the saddle-point expansion of Loader (2000): every
//! binomial term is written as a Stirling remainder plus a deviance, both of
//! which stay O(1) in size. Plain log-factorial differences at N ≈ 10⁶ cancel
//! terms around 10⁷ and lose about nine digits, which is not enough to keep a
//! full-support sum within 1e-12 of one.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::association::ContingencyTable;

/// Relative slack when deciding whether a support point is "no more likely"
/// than the observed table.
pub const TIE_SLACK: f64 = 1e-7;

/// Conventional significance threshold.
pub const DEFAULT_ALPHA: f64 = 0.05;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error(
        "cell value {k} is outside the support [{lo}, {hi}] for margins ({row1}, {col1}, {n})"
    )]
    OutOfSupport {
        k: u64,
        lo: u64,
        hi: u64,
        row1: u64,
        col1: u64,
        n: u64,
    },
    #[error("margins ({row1}, {col1}) exceed the table total {n}")]
    BadMargins { row1: u64, col1: u64, n: u64 },
}

/// ln(n!) for small n by direct summation.
fn small_log_factorials() -> &'static [f64; 16] {
    static TABLE: OnceLock<[f64; 16]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; 16];
        for n in 2..16 {
            t[n] = t[n - 1] + (n as f64).ln();
        }
        t
    })
}

/// ln(n!) - ln(sqrt(2πn) (n/e)^n), the error of Stirling's formula.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;

    if n <= 15.0 {
        if n == 0.0 {
            return 0.0;
        }
        let lf = small_log_factorials()[n as usize];
        return lf - (n + 0.5) * n.ln() + n - 0.5 * LN_2PI;
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term x·ln(x/np) + np − x, evaluated without cancellation near x = np.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
    }
    x * (x / np).ln() + np - x
}

/// ln P(X = x) for X ~ Binomial(n, p), with q = 1 − p passed separately.
fn log_binom_raw(x: f64, n: f64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if x == 0.0 {
        if n == 0.0 {
            return 0.0;
        }
        return if p < 0.1 {
            -bd0(n, n * q) - n * p
        } else {
            n * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -bd0(n, n * p) - n * q
        } else {
            n * p.ln()
        };
    }
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(x, n * p) - bd0(n - x, n * q);
    // n - x is exact, unlike 1 - x/n when x is close to n
    let lf = LN_2PI + x.ln() + (n - x).ln() - n.ln();
    lc - 0.5 * lf
}

/// Support of the (1,1) cell given margins.
pub fn hypergeometric_support(row1: u64, col1: u64, n: u64) -> (u64, u64) {
    ((row1 + col1).saturating_sub(n), row1.min(col1))
}

/// Precomputed pieces for repeated point evaluations at fixed margins.
struct Hypergeometric {
    row1: f64,
    rest: f64,
    col1: f64,
    p: f64,
    q: f64,
    log_total: f64,
}

impl Hypergeometric {
    fn new(row1: u64, col1: u64, n: u64) -> Self {
        let nf = n as f64;
        let col1f = col1 as f64;
        let p = col1f / nf;
        let q = (nf - col1f) / nf;
        Hypergeometric {
            row1: row1 as f64,
            rest: (n - row1) as f64,
            col1: col1f,
            p,
            q,
            log_total: log_binom_raw(col1f, nf, p, q),
        }
    }

    fn log_pmf(&self, k: u64) -> f64 {
        let k = k as f64;
        log_binom_raw(k, self.row1, self.p, self.q)
            + log_binom_raw(self.col1 - k, self.rest, self.p, self.q)
            - self.log_total
    }
}

/// Natural log of the hypergeometric probability that the (1,1) cell of a
/// 2×2 table equals `k` when the first row sums to `row1`, the first column
/// to `col1` and the table to `n`.
pub fn log_hypergeometric_pmf(k: u64, row1: u64, col1: u64, n: u64) -> Result<f64, StatsError> {
    if row1 > n || col1 > n {
        return Err(StatsError::BadMargins { row1, col1, n });
    }
    let (lo, hi) = hypergeometric_support(row1, col1, n);
    if k < lo || k > hi {
        return Err(StatsError::OutOfSupport {
            k,
            lo,
            hi,
            row1,
            col1,
            n,
        });
    }
    if lo == hi {
        return Ok(0.0);
    }
    Ok(Hypergeometric::new(row1, col1, n).log_pmf(k))
}

/// ln of the two-sided Fisher p-value. Zero (p = 1) for tables with an empty
/// or full margin.
pub fn fisher_exact_two_sided_ln(t: &ContingencyTable) -> f64 {
    let n = t.total();
    let row1 = t.a + t.b;
    let col1 = t.a + t.c;
    if n == 0 || row1 == 0 || col1 == 0 || row1 == n || col1 == n {
        return 0.0;
    }
    let (lo, hi) = hypergeometric_support(row1, col1, n);
    let dist = Hypergeometric::new(row1, col1, n);
    let cutoff = dist.log_pmf(t.a) + TIE_SLACK.ln_1p();

    let mut max = f64::NEG_INFINITY;
    let logs: Vec<f64> = (lo..=hi)
        .map(|k| dist.log_pmf(k))
        .filter(|&l| l <= cutoff)
        .inspect(|&l| max = max.max(l))
        .collect();
    let scaled: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    (max + scaled.ln()).min(0.0)
}

/// Two-sided Fisher exact test (minimum-likelihood rule).
pub fn fisher_exact_two_sided(t: &ContingencyTable) -> f64 {
    fisher_exact_two_sided_ln(t).exp()
}

/// Reason a relative switching propensity cannot be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RspUndefined {
    /// a + c = 0
    NoSharedItems,
    /// b + d = 0
    NoNonSharedItems,
    /// b = 0
    NoNonSharedSwitches,
}

impl fmt::Display for RspUndefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RspUndefined::NoSharedItems => "no shared items",
            RspUndefined::NoNonSharedItems => "no non-shared items",
            RspUndefined::NoNonSharedSwitches => "no switches near non-shared items",
        })
    }
}

/// (a/(a+c)) / (b/(b+d)).
pub fn relative_switching_propensity(t: &ContingencyTable) -> Result<f64, RspUndefined> {
    if t.a + t.c == 0 {
        return Err(RspUndefined::NoSharedItems);
    }
    if t.b + t.d == 0 {
        return Err(RspUndefined::NoNonSharedItems);
    }
    if t.b == 0 {
        return Err(RspUndefined::NoNonSharedSwitches);
    }
    let shared = t.a as f64 / (t.a + t.c) as f64;
    let nonshared = t.b as f64 / (t.b + t.d) as f64;
    Ok(shared / nonshared)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub table: ContingencyTable,
    pub shared_rate: Option<f64>,
    pub nonshared_rate: Option<f64>,
    pub rsp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rsp_undefined: Option<RspUndefined>,
    pub p_value: f64,
}

impl TestResult {
    pub fn from_table(table: ContingencyTable) -> Self {
        let shared_rate =
            (table.a + table.c > 0).then(|| table.a as f64 / (table.a + table.c) as f64);
        let nonshared_rate =
            (table.b + table.d > 0).then(|| table.b as f64 / (table.b + table.d) as f64);
        let rsp = relative_switching_propensity(&table);
        TestResult {
            shared_rate,
            nonshared_rate,
            rsp: rsp.ok(),
            rsp_undefined: rsp.err(),
            p_value: fisher_exact_two_sided(&table),
            table,
        }
    }

    pub fn is_significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn table(a: u64, b: u64, c: u64, d: u64) -> ContingencyTable {
        ContingencyTable { a, b, c, d }
    }

    fn binom(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    /// Exhaustive two-sided p over all tables with the observed margins, in exact integers.
    fn brute_force_p(t: &ContingencyTable) -> f64 {
        let n = t.total();
        let row1 = t.a + t.b;
        let col1 = t.a + t.c;
        let weight = |k: u64| binom(row1, k) * binom(n - row1, col1 - k);
        let denom = binom(n, col1);
        let observed = weight(t.a);
        let (lo, hi) = hypergeometric_support(row1, col1, n);
        let num: u128 = (lo..=hi).map(weight).filter(|w| *w <= observed).sum();
        num as f64 / denom as f64
    }

    #[test]
    fn pmf_small_example() {
        let got = log_hypergeometric_pmf(1, 2, 2, 4).unwrap();
        assert!((got - (2.0f64 / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn pmf_degenerate_margin() {
        assert_eq!(log_hypergeometric_pmf(0, 0, 7, 10).unwrap(), 0.0);
    }

    #[test]
    fn pmf_out_of_support() {
        assert!(matches!(
            log_hypergeometric_pmf(3, 2, 2, 4),
            Err(StatsError::OutOfSupport { .. })
        ));
        // k below row1 + col1 - n
        assert!(log_hypergeometric_pmf(0, 3, 3, 4).is_err());
    }

    #[test]
    fn stirlerr_matches_asymptotic_series() {
        for n in [16.0, 40.0, 100.0, 1000.0] {
            let direct: f64 =
                (2..=n as u64).map(|k| (k as f64).ln()).sum::<f64>() - (n + 0.5) * f64::ln(n) + n
                    - 0.5 * (2.0 * PI).ln();
            assert!((stirlerr(n) - direct).abs() < 1e-11, "n={n}");
        }
        assert!((stirlerr(1.0) - 0.081_061_466_795_327_26).abs() < 1e-15);
    }

    #[test]
    fn normalization_at_corpus_scale() {
        for &(row1, col1, n) in &[
            (17_731u64, 875u64, 161_689u64),
            (500_000, 300_000, 1_000_000),
            (3, 999_990, 1_000_000),
            (123_456, 654_321, 999_999),
        ] {
            let (lo, hi) = hypergeometric_support(row1, col1, n);
            let total: f64 = (lo..=hi)
                .map(|k| log_hypergeometric_pmf(k, row1, col1, n).unwrap().exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "{row1} {col1} {n}: {total}");
        }
    }

    #[test]
    fn balanced_table_has_p_one() {
        assert!((fisher_exact_two_sided(&table(5, 5, 5, 5)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_margin_is_p_one() {
        assert_eq!(fisher_exact_two_sided(&table(0, 0, 3, 4)), 1.0);
        assert_eq!(fisher_exact_two_sided(&table(0, 0, 0, 0)), 1.0);
        assert_eq!(fisher_exact_two_sided(&table(0, 3, 0, 4)), 1.0);
    }

    #[test]
    fn rsp_values() {
        assert!((relative_switching_propensity(&table(3, 1, 7, 9)).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(
            relative_switching_propensity(&table(4, 9, 4, 9)).unwrap(),
            1.0
        );
        assert_eq!(
            relative_switching_propensity(&table(0, 1, 0, 2)),
            Err(RspUndefined::NoSharedItems)
        );
        assert_eq!(
            relative_switching_propensity(&table(1, 0, 1, 0)),
            Err(RspUndefined::NoNonSharedItems)
        );
        assert_eq!(
            relative_switching_propensity(&table(1, 0, 1, 5)),
            Err(RspUndefined::NoNonSharedSwitches)
        );
        assert_eq!(relative_switching_propensity(&table(0, 2, 3, 5)), Ok(0.0));
    }

    #[test]
    fn test_result_fields() {
        let r = TestResult::from_table(table(216, 17515, 659, 143299));
        assert!((r.shared_rate.unwrap() - 216.0 / 875.0).abs() < 1e-15);
        assert!((r.rsp.unwrap() - 2.266).abs() < 1e-3);
        assert!(r.is_significant(DEFAULT_ALPHA));
        let empty = TestResult::from_table(table(0, 0, 0, 0));
        assert_eq!(empty.rsp, None);
        assert_eq!(empty.rsp_undefined, Some(RspUndefined::NoSharedItems));
        assert_eq!(empty.p_value, 1.0);
    }

    fn arb_table(max: u64) -> impl Strategy<Value = ContingencyTable> {
        (0..=max, 0..=max, 0..=max, 0..=max)
            .prop_filter("N >= 1", |(a, b, c, d)| a + b + c + d >= 1)
            .prop_map(|(a, b, c, d)| table(a, b, c, d))
    }

    proptest! {
        #[test]
        fn fisher_matches_enumeration(t in arb_table(15)) {
            let got = fisher_exact_two_sided(&t);
            let want = brute_force_p(&t);
            prop_assert!((got - want).abs() <= 1e-10, "{t:?}: {got} vs {want}");
        }

        #[test]
        fn fisher_symmetries(t in arb_table(40)) {
            let p = fisher_exact_two_sided(&t);
            prop_assert!(p > 0.0 && p <= 1.0);
            let transposed = table(t.a, t.c, t.b, t.d);
            let rows_swapped = table(t.c, t.d, t.a, t.b);
            let cols_swapped = table(t.b, t.a, t.d, t.c);
            for other in [transposed, rows_swapped, cols_swapped] {
                let q = fisher_exact_two_sided(&other);
                prop_assert!((p - q).abs() <= 1e-12 * p.max(1e-300) + 1e-15, "{t:?} {p} {q}");
            }
        }

        #[test]
        fn rsp_direction_matches_rates(t in arb_table(50)) {
            if let Ok(rsp) = relative_switching_propensity(&t) {
                let shared = t.a as f64 / (t.a + t.c) as f64;
                let nonshared = t.b as f64 / (t.b + t.d) as f64;
                prop_assert_eq!(rsp > 1.0, shared > nonshared);
            }
        }

        #[test]
        fn pmf_normalizes(row1 in 0u64..2000, col1 in 0u64..2000, extra in 0u64..4000) {
            let n = row1.max(col1) + extra;
            prop_assume!(n >= 1);
            let (lo, hi) = hypergeometric_support(row1, col1, n);
            let total: f64 = (lo..=hi)
                .map(|k| log_hypergeometric_pmf(k, row1, col1, n).unwrap().exp())
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "{total}");
        }
    }
}
