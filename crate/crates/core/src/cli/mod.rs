//! Command-line front end: argument parsing, dispatch, report emission and
//! preset reproductions.

mod presets;
mod report;

pub use presets::{preset_names, reproduce_preset, PresetOutcome};
pub use report::{line_diff, Expect, Format, Report, Table, SCHEMA_VERSION};

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dynamics::{
    check_a_transitive, check_delta_a_transitive, check_transitive, closed_form_spacing_witness,
    point_diagnostic, verify_delta_product, verify_nuv, verify_orbit_closure_prop, SweepReport,
    TransitivityMode,
};
use crate::error::{Error, Result};
use crate::families::{FamilyQuery, GridParams, DEFAULT_CELL_CAP};
use crate::parse::{parse_vector, Cursor};
use crate::points::{build_transitive_point, champernowne, periodic, GeneratedPoint, PointRecord};
use crate::subshift::{ShiftRule, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "famtrans", version, about = "Windowed checkers for family transitivity of binary subshifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Worker threads; output is identical for any value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for reusable point prefixes.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "any")]
    pub expect: Expect,
    /// Record wall-clock time in the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Sweep all cylinder tuples for a transitivity notion.
    Check(CheckArgs),
    /// Apply a family query to the entering windows of a point.
    Diagnose(DiagnoseArgs),
    /// Check an identity between hitting sets.
    Verify(VerifyArgs),
    /// Run a fixed parameter bundle and compare it with its golden report.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub rule: String,
    /// Time multipliers `a1,a2,...`.
    #[arg(long)]
    pub vector: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub wordlen: usize,
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
    /// `plain`, `thick(L)`, `cofinite`, `multi` or `delta`; defaults to
    /// `multi` when a vector is given and `plain` otherwise.
    #[arg(long)]
    pub mode: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    /// `champernowne`, `greedy` or `periodic(<word>)`.
    #[arg(long, default_value = "champernowne")]
    pub point: String,
    /// Minimum prefix length.
    #[arg(long)]
    pub pointlen: Option<usize>,
    /// Largest spacer tried by the greedy constructor.
    #[arg(long, default_value_t = 4096)]
    pub spacer_max: u64,
    /// Word length up to which the greedy constructor covers the language.
    #[arg(long)]
    pub scale: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub rule: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub point: PointArgs,
    #[arg(long, default_value_t = 1)]
    pub wordlen: usize,
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
    /// Family literal such as `nabla(thick(16))` or `fa(1,2;3,2000)`; bare
    /// `fa`/`fsa` take `--vector` and `--grid`.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub vector: Option<String>,
    /// `Nmax,Kmax[,g]`.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub what: VerifyWhat,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "identity")]
pub enum VerifyWhat {
    /// Hitting times against differences of entering times; sweeps all word
    /// pairs up to `--wordlen` unless `--u` and `--v` are given.
    Nuv {
        #[arg(long)]
        rule: String,
        #[command(flatten)]
        #[serde(flatten)]
        point: PointArgs,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value_t = 1)]
        wordlen: usize,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        hcmp: Option<u64>,
    },
    /// Diagonal orbit closure against diagonal transitivity for the reduced vector.
    OrbitClosure {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 1)]
        wordlen: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Diagonal transitivity of a product system.
    DeltaProduct {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        vector: String,
        #[arg(long, default_value_t = 2)]
        depth: u64,
        #[arg(long, default_value_t = 1)]
        wordlen: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// The explicit spacer witness for spacing rules.
    ClosedForm {
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = "2,3")]
        vector: String,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ReproduceArgs {
    pub preset: String,
    /// Preset parameter (e.g. `p` for `example-delta-p`).
    pub param: Option<u64>,
    /// Overwrite the golden report instead of comparing.
    #[arg(long)]
    #[serde(skip)]
    pub bless: bool,
}

/// Run a parsed command line; returns the process exit status.
pub fn run(cli: &Cli, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32 {
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be >= 1");
            return EXIT_USAGE;
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let result = match &cli.command {
        Command::Reproduce(args) => run_reproduce(args),
        other => run_config(other, cli.cache_dir.as_deref()).map(|r| (r, None)),
    };
    let (mut report, golden) = match result {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Markdown => report.to_markdown(),
    };
    let _ = out.write_all(text.as_bytes());
    if let Some(g) = golden {
        if let Some(diff) = g {
            let _ = writeln!(err, "golden report mismatch:\n{diff}");
            return EXIT_MISMATCH;
        }
        if !report.positive() {
            let _ = writeln!(err, "preset did not reproduce its expected outcome");
            return EXIT_MISMATCH;
        }
    }
    if report.matches(cli.expect) {
        EXIT_OK
    } else {
        let _ = writeln!(err, "expectation {:?} not met: verdict {}", cli.expect, report.verdict);
        EXIT_MISMATCH
    }
}

type Golden = Option<Option<String>>;

fn run_reproduce(args: &ReproduceArgs) -> Result<(Report, Golden)> {
    let outcome = reproduce_preset(&args.preset, args.param)?;
    let json = outcome.report.to_json();
    let golden = if args.bless {
        let path = presets::golden_path(&outcome.golden_name);
        std::fs::write(&path, &json)?;
        None
    } else {
        match outcome.golden {
            Some(g) if g == json => None,
            Some(g) => Some(line_diff(g, &json)),
            None => None,
        }
    };
    Ok((outcome.report, Some(golden)))
}

pub(crate) fn parse_rule(text: &str) -> Result<ShiftRule> {
    text.parse()
}

fn parse_word(text: &str) -> Result<Word> {
    let w: Word = text.parse()?;
    if w.is_empty() {
        return Err(Error::parse(text, 0, "empty word"));
    }
    Ok(w)
}

fn parse_mode(text: &str) -> Result<String> {
    let mut c = Cursor::new(text);
    let name = c.ident()?;
    let mode = match name.as_str() {
        "plain" | "cofinite" | "multi" | "delta" => name,
        "thick" => {
            c.expect('(')?;
            let l = c.uint()?;
            c.expect(')')?;
            format!("thick({l})")
        }
        _ => return Err(Error::parse(text, 0, "mode is plain, thick(L), cofinite, multi or delta")),
    };
    c.finish()?;
    Ok(mode)
}

fn parse_grid(text: &str) -> Result<GridParams> {
    let v = parse_vector(text)?;
    let (n_max, k_max, gap) = match v.as_slice() {
        [n, k] => (*n, *k, 1),
        [n, k, g] => (*n, *k, *g),
        _ => return Err(Error::parse(text, 0, "grid is Nmax,Kmax[,g]")),
    };
    Ok(GridParams { n_max, k_max, gap, cell_cap: DEFAULT_CELL_CAP })
}

fn parse_family(args: &DiagnoseArgs) -> Result<FamilyQuery> {
    let bare = args.family.trim().to_ascii_lowercase();
    if bare == "fa" || bare == "fsa" {
        let a = parse_vector(args.vector.as_deref().ok_or_else(|| Error::Config(format!("--family {bare} needs --vector")))?)?;
        let grid = parse_grid(args.grid.as_deref().ok_or_else(|| Error::Config(format!("--family {bare} needs --grid")))?)?;
        return Ok(if bare == "fa" {
            FamilyQuery::Fa { a, grid }
        } else {
            FamilyQuery::Fsa { a, grid }
        });
    }
    args.family.parse()
}

fn cache_file(dir: &Path, rec_key: &str) -> PathBuf {
    let name: String = rec_key
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    dir.join(format!("point-{name}.json"))
}

/// Build (or load from cache) the point requested on the command line.
pub(crate) fn make_point(
    rule: &ShiftRule,
    args: &PointArgs,
    min_len: usize,
    cache: Option<&Path>,
) -> Result<GeneratedPoint> {
    let min_len = args.pointlen.unwrap_or(0).max(min_len);
    let spec = args.point.trim();
    let scale = args.scale.map_or("auto".to_string(), |s| s.to_string());
    let key = format!("{spec}-{rule}-{min_len}-{}-{scale}", args.spacer_max);
    if let Some(dir) = cache {
        let path = cache_file(dir, &key);
        if let Ok(text) = std::fs::read_to_string(&path) {
            let rec: PointRecord = serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))?;
            return GeneratedPoint::from_record(rec);
        }
    }
    let point = if spec == "champernowne" {
        let mut scale = 1;
        while champernowne_len(scale) < min_len {
            scale += 1;
        }
        champernowne(scale.max(args.scale.unwrap_or(1)))?
    } else if spec == "greedy" {
        build_transitive_point(rule, args.scale.unwrap_or(4), args.spacer_max, min_len)?
    } else if let Some(inner) = spec.strip_prefix("periodic(").and_then(|s| s.strip_suffix(')')) {
        periodic(&parse_word(inner)?, min_len.max(2 * inner.len() + 2))?
    } else {
        return Err(Error::parse(spec, 0, "point is champernowne, greedy or periodic(<word>)"));
    };
    if let Some(dir) = cache {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string(&point.to_record()).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(cache_file(dir, &key), text)?;
    }
    Ok(point)
}

fn champernowne_len(scale: usize) -> usize {
    (1..=scale).map(|l| l << l).sum()
}

fn echo<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("config serializes")
}

fn sweep_report(config: Value, r: SweepReport) -> Report {
    let mut rep = Report::new(config, report::sweep_verdict(&r), Value::Null);
    rep.certificates = r.certificates.iter().map(echo).collect();
    rep.tuples_checked = r.tuples_checked;
    rep.table = Some(report::sweep_table(&r));
    rep.witnesses = echo(&r);
    rep
}

/// Dispatch a non-preset command.
pub fn run_config(cmd: &Command, cache: Option<&Path>) -> Result<Report> {
    let config = echo(cmd);
    match cmd {
        Command::Check(args) => {
            let rule = parse_rule(&args.rule)?;
            let vector = args.vector.as_deref().map(parse_vector).transpose()?;
            let mode = match &args.mode {
                Some(m) => parse_mode(m)?,
                None if vector.is_some() => "multi".into(),
                None => "plain".into(),
            };
            let r = match (mode.as_str(), vector) {
                ("multi", Some(a)) => check_a_transitive(&rule, &a, args.wordlen, args.horizon)?,
                ("delta", Some(a)) => check_delta_a_transitive(&rule, &a, args.wordlen, args.horizon)?,
                ("multi" | "delta", None) => return Err(Error::Config(format!("mode {mode} needs --vector"))),
                (_, Some(_)) => return Err(Error::Config(format!("mode {mode} takes no --vector"))),
                ("plain", None) => check_transitive(&rule, args.wordlen, args.horizon, TransitivityMode::Plain)?,
                ("cofinite", None) => check_transitive(&rule, args.wordlen, args.horizon, TransitivityMode::CofiniteFrom)?,
                (thick, None) => {
                    let l = thick[6..thick.len() - 1].parse().expect("validated by parse_mode");
                    check_transitive(&rule, args.wordlen, args.horizon, TransitivityMode::Thick(l))?
                }
            };
            Ok(sweep_report(config, r))
        }
        Command::Diagnose(args) => {
            let rule = parse_rule(&args.rule)?;
            let query = parse_family(args)?;
            let needed = args.horizon as usize + args.wordlen + 1;
            let point = make_point(&rule, &args.point, needed, cache)?;
            let r = point_diagnostic(&rule, &point, args.wordlen, args.horizon, &query)?;
            let mut rep = Report::new(config, report::family_verdict(r.verdict), Value::Null);
            rep.certificates = r
                .cylinders
                .iter()
                .filter_map(|c| c.report.certificate().map(|cert| json!({ "cylinder": c.word, "name": cert.name(), "certificate": cert })))
                .collect();
            rep.tuples_checked = r.cylinders.len() as u64;
            rep.table = Some(report::diagnostic_table(&r));
            rep.witnesses = echo(&r);
            Ok(rep)
        }
        Command::Verify(v) => run_verify(&v.what, config, cache),
        Command::Reproduce(_) => Err(Error::Config("reproduce is dispatched separately".into())),
    }
}

fn run_verify(what: &VerifyWhat, config: Value, cache: Option<&Path>) -> Result<Report> {
    match what {
        VerifyWhat::Nuv { rule, point, u, v, wordlen, horizon, hcmp } => {
            let rule = parse_rule(rule)?;
            let pairs: Vec<(Word, Word)> = match (u, v) {
                (Some(u), Some(v)) => vec![(parse_word(u)?, parse_word(v)?)],
                (None, None) => {
                    let mut words = Vec::new();
                    for l in 1..=*wordlen {
                        words.extend(rule.enumerate_words(l)?);
                    }
                    words.iter().flat_map(|a| words.iter().map(move |b| (a.clone(), b.clone()))).collect()
                }
                _ => return Err(Error::Config("give both --u and --v, or neither".into())),
            };
            let longest = pairs.iter().map(|(a, b)| a.len().max(b.len())).max().unwrap_or(1);
            let needed = horizon.map_or(0, |h| h as usize + longest);
            let x = make_point(&rule, point, needed, cache)?;
            let reports = pairs
                .iter()
                .map(|(a, b)| verify_nuv(&rule, &x, a, b, *horizon, *hcmp))
                .collect::<Result<Vec<_>>>()?;
            let equal = reports.iter().all(|r| r.equal);
            let inclusion = reports.iter().all(|r| r.inclusion_holds());
            let verdict = if equal { "equal" } else if inclusion { "undetermined" } else { "disagree" };
            let mut rep = Report::new(config, verdict, echo(&reports));
            rep.tuples_checked = reports.len() as u64;
            rep.table = Some(Table {
                header: ["u", "v", "hits", "differences", "violations", "misses"].map(String::from).to_vec(),
                rows: reports
                    .iter()
                    .map(|r| {
                        vec![
                            r.u.to_string(),
                            r.v.to_string(),
                            r.hitting_count.to_string(),
                            r.difference_count.to_string(),
                            r.violations.len().to_string(),
                            r.misses.len().to_string(),
                        ]
                    })
                    .collect(),
            });
            Ok(rep)
        }
        VerifyWhat::OrbitClosure { rule, vector, wordlen, horizon } => {
            let r = verify_orbit_closure_prop(&parse_rule(rule)?, &parse_vector(vector)?, *wordlen, *horizon)?;
            let mut rep = Report::new(config, if r.agree { "agree" } else { "disagree" }, Value::Null);
            rep.tuples_checked = r.tuples_checked;
            rep.table = Some(Table {
                header: ["tuple", "orbit side", "hitting side", "agree"].map(String::from).to_vec(),
                rows: r
                    .rows
                    .iter()
                    .map(|row| {
                        let show = |x: Option<u64>| x.map_or("none".to_string(), |n| n.to_string());
                        vec![
                            row.tuple.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" "),
                            show(row.lhs),
                            show(row.rhs),
                            row.agree.to_string(),
                        ]
                    })
                    .collect(),
            });
            rep.witnesses = echo(&r);
            Ok(rep)
        }
        VerifyWhat::DeltaProduct { rule, vector, depth, wordlen, horizon } => {
            let r = verify_delta_product(&parse_rule(rule)?, &parse_vector(vector)?, *depth, *wordlen, *horizon)?;
            Ok(sweep_report(config, r))
        }
        VerifyWhat::ClosedForm { rule, k, vector } => {
            let r = closed_form_spacing_witness(&parse_rule(rule)?, *k, &parse_vector(vector)?)?;
            let mut rep = Report::new(config, if r.holds() { "witnessed" } else { "fails-on-window" }, echo(&r));
            rep.tuples_checked = r.words_checked;
            Ok(rep)
        }
    }
}
