//! Command-line front end: one subcommand per capability of the core crate,
//! one JSON document (or CSV table) on standard output, diagnostics on
//! standard error. Exit codes: 0 success, 1 domain error, 2 usage error.
//!
//! Arguments that take structured input (`--poly`, `--table`, `--f`, `--g`)
//! accept an inline JSON literal, `@path` to read a file, or `@-` to read
//! standard input.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncpoly::{
    decay_curve, extract_classical_correlate, find_monochromatic, gowers, make_counterexample,
    max_correlation, quasisym_poly, restrict_decompose, run_battery, zero_prob_experiment,
    ClassicalPoly, Composition, Fp, FpVector, NonClassicalPoly, PhaseTable,
    SearchMode, SearchReport,
};
use std::fmt::Write as _;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ncpoly",
    version,
    about = "Exact toolkit for polynomial phase functions over F_p^n",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized step; omitted, an entropy seed is drawn and
    /// echoed on standard error.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cap on enumeration sizes and sample counts.
    #[arg(long, global = true, default_value_t = 1 << 28)]
    budget: u64,
    /// Suppress diagnostics on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for the parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
    Auto,
}

impl From<Mode> for SearchMode {
    fn from(m: Mode) -> SearchMode {
        match m {
            Mode::Exhaustive => SearchMode::Exhaustive,
            Mode::Sampled => SearchMode::Sampled,
            Mode::Auto => SearchMode::Auto,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a phase polynomial at one point.
    Eval(EvalArgs),
    /// Recover the canonical polynomial from a dense phase table.
    Canonicalize(CanonicalizeArgs),
    /// Apply iterated additive derivatives to a polynomial.
    Derive(DeriveArgs),
    /// Uniformity norm of a phase polynomial or phase table.
    Gowers(GowersArgs),
    /// Correlation magnitude between two phases.
    Correlate(CorrelateArgs),
    /// Fourier coefficients of a phase, with the dominant one singled out.
    Fourier(FourierArgs),
    /// The power-sum phase family member at a given order and dimension.
    Counterexample(CounterexampleArgs),
    /// Quasisymmetric polynomial attached to a composition.
    Quasisym(QuasisymArgs),
    /// Monochromatic subset search, or restriction onto a chosen subset.
    Symmetrize(SymmetrizeArgs),
    /// Split along a hyperplane and extract a classical correlate.
    HyperplaneExtract(HyperplaneArgs),
    /// Maximize correlation against low-degree classical phases.
    SearchMax(SearchMaxArgs),
    /// Vanishing probability of a multiaffine form.
    ZeroProb(ZeroProbArgs),
    /// Best-correlation decay across dimensions for the power-sum family.
    DecayCurve(DecayCurveArgs),
    /// Run the module invariant battery.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Phase polynomial (JSON literal, @file, or @-).
    #[arg(long)]
    poly: String,
    /// Comma-separated residues, one per variable.
    #[arg(long)]
    point: String,
}

#[derive(Args)]
struct CanonicalizeArgs {
    /// Phase table (JSON literal, @file, or @-).
    #[arg(long)]
    table: String,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    poly: String,
    /// Shift vector; repeat the flag to iterate derivatives in order.
    #[arg(long, required = true)]
    shift: Vec<String>,
}

#[derive(Args)]
struct GowersArgs {
    /// Norm order.
    #[arg(long)]
    d: u32,
    #[arg(long, conflicts_with = "table")]
    poly: Option<String>,
    #[arg(long)]
    table: Option<String>,
    /// Optional cross-checks against the declared shape.
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct CorrelateArgs {
    /// First phase: polynomial or phase-table JSON.
    #[arg(long)]
    f: String,
    /// Second phase: polynomial or phase-table JSON.
    #[arg(long)]
    g: String,
}

#[derive(Args)]
struct FourierArgs {
    #[arg(long, conflicts_with = "table")]
    poly: Option<String>,
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[arg(long)]
    p: u32,
    /// Uniformity order whose norm stays one.
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct QuasisymArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    n: usize,
    /// Composition, e.g. [2,1].
    #[arg(long)]
    alpha: String,
}

#[derive(Args)]
struct SymmetrizeArgs {
    /// Classical polynomial (JSON literal, @file, or @-).
    #[arg(long)]
    poly: String,
    /// Color degree.
    #[arg(long)]
    d: u32,
    /// Desired subset size for the search.
    #[arg(long, conflicts_with_all = ["subset", "y"])]
    target: Option<usize>,
    /// Known subset (comma-separated 1-based labels): restrict and decompose.
    #[arg(long, requires = "y")]
    subset: Option<String>,
    /// Residues for the variables outside the subset, in increasing label order.
    #[arg(long, requires = "subset")]
    y: Option<String>,
}

#[derive(Args)]
struct HyperplaneArgs {
    /// Non-classical polynomial of degree at most p.
    #[arg(long)]
    poly: String,
    /// Phase table to extract from; defaults to the phase of the polynomial.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Args)]
struct SearchMaxArgs {
    /// Candidate degree bound.
    #[arg(long)]
    d: u32,
    #[arg(long, conflicts_with = "table")]
    poly: Option<String>,
    #[arg(long)]
    table: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
}

#[derive(Args)]
struct ZeroProbArgs {
    /// Multiaffine classical polynomial; every exponent must be 0 or 1.
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Sample count when not exhaustive.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
}

#[derive(Args)]
struct DecayCurveArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which invariants to run; only the full battery is defined.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long)]
    p: u32,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    n: usize,
}

enum Failure {
    /// Semantically invalid input or an operation error: exit 1.
    Domain(String),
    /// Malformed usage not caught by the parser: exit 2.
    Usage(String),
}

impl From<ncpoly::Error> for Failure {
    fn from(e: ncpoly::Error) -> Failure {
        Failure::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure::Domain(format!("invalid JSON input: {e}"))
    }
}

struct Report {
    json: serde_json::Value,
    /// CSV rendering for the subcommands that define one.
    csv: Option<String>,
    /// Nonzero exit requested by a successful run (verify failures).
    exit_domain_error: bool,
}

impl Report {
    fn json(value: serde_json::Value) -> Report {
        Report { json: value, csv: None, exit_domain_error: false }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<serde_json::Value, Failure> {
    Ok(serde_json::to_value(value)?)
}

/// Inline literal, `@path`, or `@-` for standard input.
fn read_input(arg: &str) -> Result<String, Failure> {
    if let Some(path) = arg.strip_prefix('@') {
        if path == "-" {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Domain(format!("reading standard input: {e}")))?;
            Ok(buf)
        } else {
            std::fs::read_to_string(path)
                .map_err(|e| Failure::Domain(format!("reading {path}: {e}")))
        }
    } else {
        Ok(arg.to_string())
    }
}

fn parse_poly(arg: &str) -> Result<NonClassicalPoly, Failure> {
    Ok(serde_json::from_str(&read_input(arg)?)?)
}

fn parse_classical(arg: &str) -> Result<ClassicalPoly, Failure> {
    Ok(serde_json::from_str(&read_input(arg)?)?)
}

fn parse_table(arg: &str) -> Result<PhaseTable, Failure> {
    Ok(serde_json::from_str(&read_input(arg)?)?)
}

/// Polynomial or phase-table JSON, normalized to a phase table.
fn parse_phase(arg: &str) -> Result<PhaseTable, Failure> {
    let text = read_input(arg)?;
    if let Ok(poly) = serde_json::from_str::<NonClassicalPoly>(&text) {
        return Ok(poly.eval_table()?);
    }
    serde_json::from_str::<PhaseTable>(&text)
        .map_err(|e| Failure::Domain(format!("input is neither a polynomial nor a table: {e}")))
}

fn parse_residues(fp: Fp, arg: &str) -> Result<FpVector, Failure> {
    let coords = arg
        .split(',')
        .map(|part| {
            let v: u64 = part
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("'{part}' is not a residue")))?;
            fp.check(v).map_err(Failure::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FpVector::from_elems(coords))
}

fn parse_labels(arg: &str) -> Result<Vec<usize>, Failure> {
    arg.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Usage(format!("'{part}' is not a label")))
        })
        .collect()
}

fn check_declared_shape(
    p: Option<u32>,
    n: Option<usize>,
    actual_p: u32,
    actual_n: usize,
) -> Result<(), Failure> {
    if let Some(p) = p {
        if p != actual_p {
            return Err(Failure::Domain(format!("--p {p} but the input lives over F_{actual_p}")));
        }
    }
    if let Some(n) = n {
        if n != actual_n {
            return Err(Failure::Domain(format!("--n {n} but the input has {actual_n} variables")));
        }
    }
    Ok(())
}

fn search_report_csv(r: &SearchReport) -> String {
    let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
    format!(
        "n,p,d,mode,best_value,candidates,seed\n{},{},{},{},{},{},{}\n",
        r.n, r.p, r.d, r.mode, r.best_value, r.candidates, seed
    )
}

fn dispatch(cli: &Cli, seed: u64) -> Result<Report, Failure> {
    match &cli.cmd {
        Cmd::Eval(args) => {
            let poly = parse_poly(&args.poly)?;
            let fp = poly.fp();
            let point = parse_residues(fp, &args.point)?;
            let value = poly.eval(&point)?;
            let z = fp.phase_complex(value);
            Ok(Report::json(serde_json::json!({
                "point": point.coords().iter().map(|c| c.val()).collect::<Vec<_>>(),
                "value": fp.phase_string(value),
                "re": z.re,
                "im": z.im,
            })))
        }
        Cmd::Canonicalize(args) => {
            let table = parse_table(&args.table)?;
            let poly = NonClassicalPoly::canonicalize(&table)?;
            Ok(Report::json(to_json(&poly)?))
        }
        Cmd::Derive(args) => {
            let mut poly = parse_poly(&args.poly)?;
            let fp = poly.fp();
            for shift in &args.shift {
                let h = parse_residues(fp, shift)?;
                poly = poly.derivative(&h)?;
            }
            Ok(Report::json(to_json(&poly)?))
        }
        Cmd::Gowers(args) => {
            let result = match (&args.poly, &args.table) {
                (Some(poly), None) => {
                    let poly = parse_poly(poly)?;
                    check_declared_shape(args.p, args.n, poly.fp().p(), poly.n())?;
                    gowers::gowers_norm_poly(&poly, args.d, cli.budget)?
                }
                (None, Some(table)) => {
                    let table = parse_table(table)?;
                    check_declared_shape(args.p, args.n, table.fp().p(), table.n())?;
                    gowers::gowers_norm_exact(&table, args.d, cli.budget)?
                }
                _ => return Err(Failure::Usage("provide exactly one of --poly or --table".into())),
            };
            Ok(Report::json(to_json(&result)?))
        }
        Cmd::Correlate(args) => {
            let f = parse_phase(&args.f)?;
            let g = parse_phase(&args.g)?;
            let value = gowers::correlation(&f, &g)?;
            Ok(Report::json(serde_json::json!({ "correlation": value })))
        }
        Cmd::Fourier(args) => {
            let table = match (&args.poly, &args.table) {
                (Some(poly), None) => parse_poly(poly)?.eval_table()?,
                (None, Some(table)) => parse_table(table)?,
                _ => return Err(Failure::Usage("provide exactly one of --poly or --table".into())),
            };
            let coeffs = gowers::fourier(&table.to_complex());
            let (argmax, max) = coeffs
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
            Ok(Report::json(serde_json::json!({
                "p": coeffs.fp().p(),
                "n": coeffs.n(),
                "values": coeffs.values().iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
                "argmax": argmax,
                "max": max,
            })))
        }
        Cmd::Counterexample(args) => {
            let fp = Fp::new(args.p)?;
            let family = make_counterexample(fp, args.k, args.n)?;
            Ok(Report::json(to_json(&family)?))
        }
        Cmd::Quasisym(args) => {
            let fp = Fp::new(args.p)?;
            let alpha = Composition::parse(&args.alpha, fp)?;
            let poly = quasisym_poly(fp, args.n, &alpha);
            Ok(Report::json(to_json(&poly)?))
        }
        Cmd::Symmetrize(args) => {
            let poly = parse_classical(&args.poly)?;
            match (&args.subset, &args.y) {
                (Some(subset), Some(y)) => {
                    let subset = parse_labels(subset)?;
                    let y = parse_residues(poly.fp(), y)?;
                    let result = restrict_decompose(&poly, args.d, &subset, y.coords())?;
                    Ok(Report::json(to_json(&result)?))
                }
                _ => {
                    let target = args.target.ok_or(Failure::Usage(
                        "provide --target for the search, or --subset with --y".into(),
                    ))?;
                    let result = find_monochromatic(&poly, args.d, target, cli.budget)?;
                    Ok(Report::json(to_json(&result)?))
                }
            }
        }
        Cmd::HyperplaneExtract(args) => {
            let poly = parse_poly(&args.poly)?;
            let f = match &args.table {
                Some(table) => parse_table(table)?.to_complex(),
                None => poly.eval_table()?.to_complex(),
            };
            let result = extract_classical_correlate(&f, &poly)?;
            Ok(Report::json(to_json(&result)?))
        }
        Cmd::SearchMax(args) => {
            let f = match (&args.poly, &args.table) {
                (Some(poly), None) => parse_poly(poly)?.eval_table()?.to_complex(),
                (None, Some(table)) => parse_table(table)?.to_complex(),
                _ => return Err(Failure::Usage("provide exactly one of --poly or --table".into())),
            };
            let report = max_correlation(&f, args.d, args.mode.into(), cli.budget, seed)?;
            let csv = search_report_csv(&report);
            Ok(Report { json: to_json(&report)?, csv: Some(csv), exit_domain_error: false })
        }
        Cmd::ZeroProb(args) => {
            let poly = parse_classical(&args.poly)?;
            if poly.terms().any(|(exps, _)| exps.iter().any(|&e| e > 1)) {
                return Err(Failure::Domain(
                    "the form must be multiaffine: every exponent 0 or 1".into(),
                ));
            }
            let fp = poly.fp();
            let r = poly.n();
            let oracle = |x: &[ncpoly::FpElem]| {
                poly.eval(&FpVector::from_elems(x.to_vec())).expect("dimension fixed by r")
            };
            let report =
                zero_prob_experiment(fp, r, oracle, args.mode.into(), args.samples, seed)?;
            let mut csv = String::from("p,r,mode,probability,zeros,total,bound,std_error,seed\n");
            writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                report.p,
                report.r,
                report.mode,
                report.probability,
                report.zeros,
                report.total,
                report.bound,
                report.std_error.map(|s| s.to_string()).unwrap_or_default(),
                report.seed.map(|s| s.to_string()).unwrap_or_default(),
            )
            .expect("writing to a string cannot fail");
            Ok(Report { json: to_json(&report)?, csv: Some(csv), exit_domain_error: false })
        }
        Cmd::DecayCurve(args) => {
            let fp = Fp::new(args.p)?;
            if args.n_max < args.n_min {
                return Err(Failure::Usage("--n-max must be at least --n-min".into()));
            }
            let curve = decay_curve(fp, args.k, args.n_min..=args.n_max, cli.budget, seed)?;
            let csv = curve.to_csv();
            Ok(Report { json: to_json(&curve)?, csv: Some(csv), exit_domain_error: false })
        }
        Cmd::Verify(args) => {
            if args.suite != "all" {
                return Err(Failure::Usage(format!(
                    "unknown suite '{}'; only 'all' is defined",
                    args.suite
                )));
            }
            let fp = Fp::new(args.p)?;
            let report = run_battery(fp, args.k, args.n, seed, cli.budget);
            if !cli.quiet {
                for check in &report.checks {
                    let mark = if check.passed { "ok" } else { "FAILED" };
                    eprintln!("{mark:>6}  {} ({})", check.name, check.detail);
                }
            }
            let passed = report.passed();
            Ok(Report {
                json: to_json(&report)?,
                csv: None,
                exit_domain_error: !passed,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // a pool may already exist in unusual embeddings; the flag is then moot
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let seed = cli.seed.unwrap_or_else(rand::random);
    if cli.seed.is_none() && !cli.quiet {
        eprintln!("seed: {seed}");
    }
    match dispatch(&cli, seed) {
        Ok(report) => {
            match cli.format {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&report.json).expect("valid JSON"))
                }
                Format::Csv => match report.csv {
                    Some(csv) => print!("{csv}"),
                    None => {
                        eprintln!("error: this subcommand has no CSV form; use --format json");
                        return ExitCode::from(2);
                    }
                },
            }
            if report.exit_domain_error {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
