//! `cstrigger` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input (unreadable file, parse error,
//! validation failure), 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::association::{Direction, Mode, SharedType, DEFAULT_MAX_DISTANCE};
use crate::corpus::{
    corpus_stats, parse_corpus_with, validate_corpus, Corpus, CorpusError, LanguagePair, TagMapping,
};
use crate::exact::DEFAULT_ALPHA;
use crate::grid::{evaluate_hypotheses, run_grid, GridResult, GridSpec};
use crate::plot::{render_multitest_svg, PlotStyle};
use crate::switching::{detect_switch_points, mark_switch_points, InsertionalPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cstrigger",
    version,
    about = "Code-switch detection and shared-item trigger statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Corpus file in the tab-separated token/tag format
    corpus: PathBuf,
    /// Language pair, e.g. `en-es` (defaults to the file's `# pair` header)
    #[arg(long, env = "CSTRIGGER_PAIR")]
    pair: Option<LanguagePair>,
    /// Tag mapping file (`raw<TAB>tag` per line)
    #[arg(long)]
    mapping: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus against the model's invariants
    Validate {
        #[command(flatten)]
        input: CorpusArgs,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Token, shared-item and switch counts
    Stats {
        #[command(flatten)]
        input: CorpusArgs,
        #[arg(long)]
        json: bool,
    },
    /// Dump switch points, one tab-separated line each
    Switches {
        #[command(flatten)]
        input: CorpusArgs,
        /// exclude-return, exclude-return-skip-neutral or keep-all
        #[arg(long, default_value = "exclude-return")]
        policy: InsertionalPolicy,
        /// Also list the return legs that the policy drops
        #[arg(long)]
        all: bool,
    },
    /// Run a multi-test grid for one shared-item type
    Analyze {
        #[command(flatten)]
        input: CorpusArgs,
        /// shared-l1, shared-l2, shared-other or all-shared
        #[arg(long)]
        shared_type: SharedType,
        /// Comma-separated subset of l1-l2,l2-l1,both
        #[arg(long, value_delimiter = ',', default_values = ["l1-l2", "l2-l1", "both"])]
        directions: Vec<Direction>,
        /// Comma-separated subset of precede,neighbor
        #[arg(long, value_delimiter = ',', default_values = ["precede", "neighbor"])]
        modes: Vec<Mode>,
        /// Distances as a list (`1,2,4`) or range (`1-6`)
        #[arg(long, default_value = "1-6")]
        distances: String,
        /// Largest distance accepted in `--distances`
        #[arg(long, default_value_t = DEFAULT_MAX_DISTANCE)]
        max_distance: u32,
        /// exclude-return, exclude-return-skip-neutral or keep-all
        #[arg(long, default_value = "exclude-return")]
        policy: InsertionalPolicy,
        /// Leave neutral tokens out of the non-shared column
        #[arg(long)]
        skip_neutral_items: bool,
        /// Significance level
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Corpus name recorded in the result (defaults to the file name)
        #[arg(long)]
        label: Option<String>,
        /// Worker threads
        #[arg(long, env = "CSTRIGGER_JOBS")]
        jobs: Option<usize>,
        /// Write the grid JSON here instead of stdout
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the cells as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render a grid JSON file as an SVG multi-test plot
    Plot {
        /// Grid JSON written by `analyze`
        grid: PathBuf,
        /// Output file (defaults to stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Logarithmic RSP axis
        #[arg(long)]
        log_y: bool,
        /// Points with p at or above this get a diamond
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Three colours for l1-l2, l2-l1 and both
        #[arg(long, value_delimiter = ',', num_args = 3)]
        colors: Option<Vec<String>>,
    },
    /// Evaluate the aggregate hypotheses over grid JSON files
    Hypotheses {
        /// Grid JSON files written by `analyze`
        #[arg(required = true)]
        grids: Vec<PathBuf>,
        /// Significance level
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Output file (defaults to stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print a short text summary instead of JSON
        #[arg(long)]
        summary: bool,
    },
}

/// Error carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn io_failure(path: &Path, err: io::Error) -> Failure {
    Failure::invalid(format!("{}: {err}", path.display()))
}

/// Parses `1-6` or `1,2,4`.
pub fn parse_distances(spec: &str, max: u32) -> Result<Vec<u32>, String> {
    let bad = || format!("invalid distance list `{spec}`");
    let mut out: Vec<u32> = if let Some((lo, hi)) = spec.split_once('-') {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        (lo..=hi).collect()
    } else {
        spec.split(',')
            .map(|d| d.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out[0] == 0 || *out.last().unwrap() > max {
        return Err(format!("distances must lie in 1..={max}, got `{spec}`"));
    }
    Ok(out)
}

/// Reads a corpus. `Ok(None)` means the file holds no tokens and names no
/// language pair.
fn load_corpus(args: &CorpusArgs) -> Result<Option<Corpus>, Failure> {
    let mapping = match &args.mapping {
        Some(path) => {
            let file = File::open(path).map_err(|e| io_failure(path, e))?;
            TagMapping::read(BufReader::new(file))
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?
        }
        None => TagMapping::identity(),
    };
    let file = File::open(&args.corpus).map_err(|e| io_failure(&args.corpus, e))?;
    match parse_corpus_with(BufReader::new(file), args.pair.as_ref(), &mapping) {
        Ok(corpus) => Ok(Some(corpus)),
        Err(CorpusError::MissingPair { tokens_seen: false }) => Ok(None),
        Err(e @ CorpusError::MissingPair { .. }) => Err(Failure::usage(format!(
            "{}: {e}; pass --pair",
            args.corpus.display()
        ))),
        Err(e) => Err(Failure::invalid(format!("{}: {e}", args.corpus.display()))),
    }
}

fn require_corpus(args: &CorpusArgs) -> Result<Corpus, Failure> {
    load_corpus(args)?.ok_or_else(|| {
        Failure::usage(format!(
            "{}: no tokens and no language pair; pass --pair",
            args.corpus.display()
        ))
    })
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::invalid(format!("stdout: {e}"))),
    }
}

fn read_grid(path: &Path) -> Result<GridResult, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    GridResult::from_json(&text)
        .map_err(|e| Failure::invalid(format!("{}: not a grid result: {e}", path.display())))
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let out_err = |e: io::Error| Failure::invalid(format!("stdout: {e}"));
    match command {
        Command::Validate { input, json } => {
            let report = match load_corpus(&input)? {
                Some(corpus) => validate_corpus(&corpus),
                None => Default::default(),
            };
            if json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                writeln!(stdout, "{text}").map_err(out_err)?;
            } else {
                writeln!(
                    stdout,
                    "{}: {} utterances, {} tokens, {} violations",
                    input.corpus.display(),
                    report.utterances,
                    report.tokens,
                    report.violations.len()
                )
                .map_err(out_err)?;
                for v in &report.violations {
                    writeln!(stdout, "  {v}").map_err(out_err)?;
                }
            }
            Ok(if report.is_valid() {
                EXIT_OK
            } else {
                EXIT_INVALID
            })
        }
        Command::Stats { input, json } => {
            let corpus = match load_corpus(&input)? {
                Some(corpus) => corpus,
                None => {
                    let pair = LanguagePair::new("l1", "l2").expect("placeholder codes");
                    Corpus::new(pair)
                }
            };
            let stats = corpus_stats(&corpus);
            if json {
                let text = serde_json::to_string_pretty(&stats).expect("stats serialize");
                writeln!(stdout, "{text}").map_err(out_err)?;
            } else {
                write!(stdout, "{}", stats.render()).map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Switches { input, policy, all } => {
            let Some(corpus) = load_corpus(&input)? else {
                return Ok(EXIT_OK);
            };
            for utt in &corpus.utterances {
                let points = detect_switch_points(utt, &corpus.pair);
                for p in mark_switch_points(&points, utt, policy) {
                    if all || !p.insertional_return {
                        writeln!(stdout, "{}", p.debug_line()).map_err(out_err)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Analyze {
            input,
            shared_type,
            directions,
            modes,
            distances,
            max_distance,
            policy,
            skip_neutral_items,
            alpha,
            label,
            jobs,
            json,
            csv,
        } => {
            let distances = parse_distances(&distances, max_distance).map_err(Failure::usage)?;
            let corpus = require_corpus(&input)?;
            let label = label.unwrap_or_else(|| {
                input
                    .corpus
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let mut spec = GridSpec::new(label, corpus.pair.clone(), shared_type);
            spec.directions = dedup(directions);
            spec.modes = dedup(modes);
            spec.distances = distances;
            spec.insertional_policy = policy;
            spec.skip_neutral_items = skip_neutral_items;
            spec.alpha = alpha;
            spec.check().map_err(Failure::usage)?;

            let grid = match jobs {
                Some(0) => return Err(Failure::usage("--jobs must be at least 1")),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::invalid(format!("thread pool: {e}")))?
                    .install(|| run_grid(&corpus, &spec)),
                None => run_grid(&corpus, &spec),
            };
            if let Some(path) = &csv {
                let file = File::create(path).map_err(|e| io_failure(path, e))?;
                grid.write_csv(file)
                    .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            }
            emit(json.as_deref(), &grid.to_json(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Plot {
            grid,
            output,
            log_y,
            alpha,
            colors,
        } => {
            let result = read_grid(&grid)?;
            let mut style = PlotStyle {
                log_y,
                alpha,
                ..PlotStyle::default()
            };
            if let Some(colors) = colors {
                let [a, b, c]: [String; 3] = colors
                    .try_into()
                    .map_err(|_| Failure::usage("--colors takes exactly three values"))?;
                style.colors = [a, b, c];
            }
            emit(
                output.as_deref(),
                &render_multitest_svg(&result, &style),
                stdout,
            )?;
            Ok(EXIT_OK)
        }
        Command::Hypotheses {
            grids,
            alpha,
            output,
            summary,
        } => {
            let results = grids
                .iter()
                .map(|p| read_grid(p))
                .collect::<Result<Vec<_>, _>>()?;
            let report = evaluate_hypotheses(&results, alpha);
            let text = if summary {
                report.summary()
            } else {
                report.to_json()
            };
            emit(output.as_deref(), &text, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn dedup<T: PartialEq + Copy>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            };
            let rendered = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "cstrigger: {}", failure.message);
            failure.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_specs() {
        assert_eq!(parse_distances("1-6", 6).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse_distances("4,2,2", 6).unwrap(), vec![2, 4]);
        assert!(parse_distances("0-3", 6).is_err());
        assert!(parse_distances("1-7", 6).is_err());
        assert!(parse_distances("1-7", 10).is_ok());
        assert!(parse_distances("a", 6).is_err());
        assert!(parse_distances("5-2", 6).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(
            cli_main(["cstrigger", "frobnicate"], &mut out, &mut err),
            EXIT_USAGE
        );
        assert_eq!(
            cli_main(
                ["cstrigger", "validate", "x.tsv", "--bogus"],
                &mut out,
                &mut err
            ),
            EXIT_USAGE
        );
        assert_eq!(
            cli_main(["cstrigger", "--help"], &mut out, &mut err),
            EXIT_OK
        );
    }

    #[test]
    fn unreadable_file_exits_one_with_path() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli_main(
            ["cstrigger", "validate", "/nonexistent/corpus.tsv"],
            &mut out,
            &mut err,
        );
        assert_eq!(code, EXIT_INVALID);
        assert!(String::from_utf8(err)
            .unwrap()
            .contains("/nonexistent/corpus.tsv"));
    }
}
