//! The `m3` command line.

use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{InputError, InvariantError};
use crate::families::AnyLink;
use crate::invariants::{self, audit, good_link_check, p1, r_poly, Evaluator, Link};
use crate::io::{self, Cell, OutputFormat, Record};
use crate::oracle::{self, CheckLine, Status};
use crate::poly::IntPolynomial;
use crate::rational::Rational;
use crate::skein::{Memo, SkeinEngine};

#[derive(Debug, Parser)]
#[command(name = "m3", version, about = "Conway-polynomial invariants of three-component links")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Base seed for randomized crossing orders.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute invariants of one link.
    Compute(ComputeArgs),
    /// Recompute the worked examples and compare with the reference values.
    PaperTable,
    /// Check the cabling scaling law on a base link.
    SweepAsymptotic(SweepArgs),
    /// Compare the skein engine with the brute-force oracle and run the closed-form checks.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Named family: hopf2, hopf2_op, hopf3, hopf_fibers, l0, figure.
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated family parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<i64>,
    /// Braid JSON, e.g. '{"strands":2,"word":[1,1]}'.
    #[arg(long)]
    pub braid: Option<String>,
    /// Diagram JSON, inline or a path to a file.
    #[arg(long)]
    pub diagram: Option<String>,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated subset of: components, crossings, lk, conway, c1, beta,
    /// gamma, betas, m_tilde, p1, r, m_av, m, m_norm.
    #[arg(long, value_delimiter = ',')]
    pub invariants: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Semicolon-separated multiplicity triples, e.g. "2,1,1;2,2,1".
    #[arg(long, value_delimiter = ';')]
    pub lambdas: Vec<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 12)]
    pub max_crossings: usize,
    /// Number of random crossing orders, seeded from --seed.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// Test fixture: perturb every engine result.
    #[arg(long, hide = true)]
    pub corrupt_engine: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("{0} check(s) failed")]
    OracleFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(InvariantError::Diagram(_)) => 2,
            CliError::Invariant(
                InvariantError::WrongComponentCount { .. }
                | InvariantError::ZeroLinking
                | InvariantError::NotGood
                | InvariantError::TooLarge { .. }
                | InvariantError::BadFigure(_),
            ) => 3,
            CliError::Invariant(_) => 1,
            CliError::OracleFailed(_) => 4,
        }
    }
}

pub const INVARIANTS: &[&str] =
    &["components", "crossings", "lk", "conway", "c1", "beta", "gamma", "betas", "m_tilde", "p1", "r", "m_av", "m", "m_norm"];

/// Multiplicity triples swept when none are given.
pub const DEFAULT_LAMBDAS: &[[i64; 3]] = &[[1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2], [2, 2, 1], [3, 1, 1]];

struct Session {
    evaluator: Evaluator,
    cache: Option<(PathBuf, Arc<Mutex<Memo>>)>,
}

impl Session {
    fn open() -> Result<Self, CliError> {
        let Some(dir) = std::env::var_os("M3_CACHE_DIR") else {
            return Ok(Self { evaluator: Evaluator::default(), cache: None });
        };
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)
            .map_err(|source| InputError::File { path: dir.display().to_string(), source })?;
        let path = dir.join(io::CACHE_FILE);
        let memo = Arc::new(Mutex::new(io::load_memo(&path)?));
        let evaluator = Evaluator::new(SkeinEngine::with_shared_cache(memo.clone()));
        Ok(Self { evaluator, cache: Some((path, memo)) })
    }

    fn close(self) -> Result<(), CliError> {
        if let Some((path, memo)) = self.cache {
            io::save_memo(&path, &memo.lock().expect("memo lock"))?;
        }
        Ok(())
    }
}

fn read_input(args: &InputArgs) -> Result<AnyLink, CliError> {
    let given = [args.family.is_some(), args.braid.is_some(), args.diagram.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(InputError::field("input", "give exactly one of --family, --braid, --diagram").into());
    }
    if let Some(family) = &args.family {
        let spec = io::family_spec(family, args.params.clone())?;
        return Ok(io::build_family(&spec)?);
    }
    if let Some(b) = &args.braid {
        let v: serde_json::Value = serde_json::from_str(b).map_err(InputError::from)?;
        return Ok(AnyLink::Slices(io::braid_from_value(&v)?.to_slices()));
    }
    let text = args.diagram.as_deref().unwrap_or_default();
    let text = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|source| InputError::File { path: text.to_string(), source })?
    };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(InputError::from)?;
    Ok(AnyLink::Plain(io::diagram_from_value(&v)?))
}

fn lk_cell(d: &AnyLink) -> Cell {
    let lk = d.linking_matrix();
    match lk.size() {
        2 => Cell::Int(lk.get(1, 2) as i128),
        3 => {
            let (a, b, c) = lk.triple();
            Cell::Triple(a, b, c)
        }
        n => Cell::Json(json!((1..=n).map(|i| (1..=n).map(|j| lk.get(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>())),
    }
}

fn default_invariants(components: usize) -> Vec<String> {
    let names: &[&str] = match components {
        3 => &["lk", "gamma", "betas", "m_tilde", "p1", "r", "m_av", "m"],
        2 => &["lk", "conway", "c1", "beta"],
        _ => &["conway"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

fn compute(session: &Session, args: &ComputeArgs, format: OutputFormat) -> Result<String, CliError> {
    let d = read_input(&args.input)?;
    let names = if args.invariants.is_empty() { default_invariants(d.component_count()) } else { args.invariants.clone() };
    for n in &names {
        if !INVARIANTS.contains(&n.as_str()) {
            return Err(InputError::field("invariants", format!("unknown invariant {n:?}")).into());
        }
    }
    let ev = &session.evaluator;
    let mut tower = None;
    let mut get_tower = || -> Result<invariants::Tower, InvariantError> {
        if tower.is_none() {
            tower = Some(ev.tower(&d)?);
        }
        Ok(tower.clone().expect("tower"))
    };
    let mut rec = Record::default();
    if format == OutputFormat::Json {
        rec.push("diagram", Cell::Json(io::diagram_to_value(&d.to_link_diagram().renumber())));
    }
    for n in &names {
        let cell = match n.as_str() {
            "components" => Cell::Int(d.component_count() as i128),
            "crossings" => Cell::Int(d.crossing_count() as i128),
            "lk" => lk_cell(&d),
            "conway" => {
                let deg = d.crossing_count() + d.component_count();
                Cell::Poly(invariants::checked_conway(&ev.engine, &d, deg)?)
            }
            "c1" => Cell::Int(invariants::c1_with(&ev.engine, &d)?),
            "beta" => Cell::Int(invariants::beta(&d)?),
            "gamma" => Cell::Int(get_tower()?.gamma),
            "betas" => {
                let b = get_tower()?.betas;
                Cell::Json(json!([b[0] as i64, b[1] as i64, b[2] as i64]))
            }
            "m_tilde" => Cell::Rational(get_tower()?.m_tilde()),
            "p1" => {
                expect_three(&d)?;
                Cell::Rational(p1(&d.linking_matrix()))
            }
            "r" => {
                expect_three(&d)?;
                Cell::Rational(r_poly(&d.linking_matrix()))
            }
            "m_av" => Cell::Rational(ev.m_av(&d)?),
            "m" => Cell::Rational(ev.m_invariant(&d)?),
            "m_norm" => {
                expect_three(&d)?;
                let cert = good_link_check(&d.linking_matrix())?.ok_or(InvariantError::NotGood)?;
                Cell::Rational(ev.m_via_normalization(&d, &cert)?)
            }
            _ => unreachable!("checked above"),
        };
        rec.push(n, cell);
    }
    Ok(io::render(&[rec], format))
}

fn expect_three(d: &AnyLink) -> Result<(), InvariantError> {
    match d.component_count() {
        3 => Ok(()),
        found => Err(InvariantError::WrongComponentCount { expected: 3, found }),
    }
}

/// Published values of one worked example; `None` where nothing is printed.
struct Reference {
    label: &'static str,
    figure: u32,
    gamma: i128,
    betas: Option<[i128; 3]>,
    m_tilde: Rational,
    p1: Rational,
    r: Option<Rational>,
    m_av: Rational,
    m: Rational,
}

fn references() -> Vec<Reference> {
    let q = Rational::new;
    let i = Rational::int;
    vec![
        Reference { label: "fig6", figure: 6, gamma: 1, betas: Some([0; 3]), m_tilde: i(-1), p1: q(3, 4), r: Some(i(0)), m_av: q(-1, 4), m: q(-1, 4) },
        Reference { label: "fig7", figure: 7, gamma: 0, betas: Some([0; 3]), m_tilde: i(0), p1: q(1, 4), r: Some(i(0)), m_av: q(1, 4), m: q(1, 4) },
        Reference { label: "fig8", figure: 8, gamma: 6, betas: Some([0; 3]), m_tilde: i(-24), p1: i(16), r: Some(i(4)), m_av: i(-8), m: i(-4) },
        Reference { label: "fig9", figure: 9, gamma: 50, betas: Some([0; 3]), m_tilde: i(-800), p1: i(416), r: Some(i(320)), m_av: i(-384), m: i(64) },
        Reference { label: "fig10", figure: 10, gamma: 6, betas: Some([0, -1, 0]), m_tilde: i(-4), p1: i(-4), r: None, m_av: i(-8), m: i(-4) },
        Reference { label: "hopf(2,2,2)", figure: 11, gamma: 31, betas: None, m_tilde: i(-104), p1: i(72), r: Some(i(48)), m_av: i(-32), m: i(16) },
    ]
}

/// Compares computed and reference values. Returns the status and the
/// mismatching fields as `name=computed(ref)`.
fn compare(reference: &Reference, report: &invariants::InvariantReport) -> (Status, Vec<String>) {
    let t = &report.tower;
    let mut exact = Vec::new();
    let mut negated = true;
    let mut check = |name: &str, got: Rational, want: Rational| {
        if got != want {
            negated &= got == -want;
            exact.push(format!("{name}={got}({want})"));
        }
    };
    check("gamma", Rational::int(t.gamma), Rational::int(reference.gamma));
    if let Some(b) = reference.betas {
        for (k, name) in ["beta23", "beta31", "beta12"].iter().enumerate() {
            check(name, Rational::int(t.betas[k]), Rational::int(b[k]));
        }
    }
    check("m_tilde", report.m_tilde, reference.m_tilde);
    check("p1", report.p1, reference.p1);
    if let Some(r) = reference.r {
        check("r", report.r, r);
    }
    check("m_av", report.m_av, reference.m_av);
    let m_matches = report.m == reference.m;
    check("m", report.m, reference.m);
    let status = if exact.is_empty() {
        Status::Pass
    } else if negated && m_matches {
        Status::SignFlagged
    } else {
        Status::Fail
    };
    (status, exact)
}

/// Rows of the worked-example table with their comparison against the reference values.
pub fn paper_rows(ev: &Evaluator) -> Result<Vec<(Record, Status)>, CliError> {
    let mut rows = Vec::new();
    for reference in references() {
        let d = crate::families::paper_figure_slices(reference.figure)?;
        let report = ev.report(&d)?;
        let (status, mismatches) = compare(&reference, &report);
        let (a, b, c) = report.tower.lk;
        let betas = report.tower.betas;
        let mut rec = Record::default();
        rec.push("example", Cell::Text(reference.label.to_string()));
        rec.push("lk", Cell::Triple(a, b, c));
        rec.push("gamma", Cell::Int(report.tower.gamma));
        rec.push("betas", Cell::Json(json!([betas[0] as i64, betas[1] as i64, betas[2] as i64])));
        rec.push("m_tilde", Cell::Rational(report.m_tilde));
        rec.push("p1", Cell::Rational(report.p1));
        rec.push("r", Cell::Rational(report.r));
        rec.push("m_av", Cell::Rational(report.m_av));
        rec.push("m", Cell::Rational(report.m));
        rec.push("status", Cell::Text(status.to_string()));
        rec.push("mismatches", Cell::Text(mismatches.join(" ")));
        rows.push((rec, status));
    }
    Ok(rows)
}

fn parse_lambda(s: &str) -> Result<[i64; 3], InputError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || InputError::field("lambdas", format!("expected three positive integers, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = [0i64; 3];
    for (k, p) in parts.iter().enumerate() {
        out[k] = p.parse().ok().filter(|&v: &i64| v > 0).ok_or_else(bad)?;
    }
    Ok(out)
}

/// One row per multiplicity triple: `M` of the cable against `(λ1λ2λ3)^4 M(base)`.
pub fn sweep_rows(ev: &Evaluator, base: &AnyLink, lambdas: &[[i64; 3]]) -> Result<Vec<(Record, Status)>, CliError> {
    expect_three(base)?;
    let m_base = ev.m_invariant(base)?;
    let mut rows = Vec::new();
    for lam in lambdas {
        let cabled = base.cable(lam, true).map_err(InvariantError::from)?;
        let m = ev.m_invariant(&cabled)?;
        let scale = Rational::int(((lam[0] * lam[1] * lam[2]) as i128).pow(4));
        let expected = scale * m_base;
        let status = if m == expected { Status::Pass } else { Status::Fail };
        let mut rec = Record::default();
        rec.push("lambda", Cell::Triple(lam[0], lam[1], lam[2]));
        rec.push("m", Cell::Rational(m));
        rec.push("expected", Cell::Rational(expected));
        let ratio = if m_base.is_zero() { Cell::Text("-".into()) } else { Cell::Rational(m / m_base) };
        rec.push("ratio", ratio);
        rec.push("status", Cell::Text(status.to_string()));
        rows.push((rec, status));
    }
    Ok(rows)
}

/// Engine-vs-oracle lines, closed-form lines and the structural-check tally.
pub fn oracle_lines(args: &OracleArgs, seed: u64) -> Vec<CheckLine> {
    let seeds: Vec<u64> = (0..args.seeds).map(|k| seed.wrapping_add(k)).collect();
    let mut lines = if args.corrupt_engine {
        oracle::engine_check(args.max_crossings, &seeds, |d| {
            Ok(&oracle::engine_conway(d)? + &IntPolynomial::one())
        })
    } else {
        oracle::engine_check(args.max_crossings, &seeds, oracle::engine_conway)
    };
    lines.extend(oracle::closed_form_suite());
    let a = audit();
    let violations = (a.parity_violations + a.lowest_coeff_violations) as usize;
    lines.push(CheckLine {
        identity: "structural_checks".into(),
        status: if violations == 0 { Status::Pass } else { Status::Fail },
        passed: a.evaluations as usize - violations,
        total: a.evaluations as usize,
        mismatches: Vec::new(),
    });
    lines
}

fn check_records(lines: &[CheckLine]) -> Vec<Record> {
    lines
        .iter()
        .map(|l| {
            let mut r = Record::default();
            r.push("identity", Cell::Text(l.identity.clone()));
            r.push("status", Cell::Text(l.status.to_string()));
            r.push("passed", Cell::Int(l.passed as i128));
            r.push("total", Cell::Int(l.total as i128));
            r
        })
        .collect()
}

/// Runs one parsed command, writing its output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let format = OutputFormat::from(cli.format);
    let session = Session::open()?;
    let text = match &cli.command {
        Command::Compute(args) => compute(&session, args, format)?,
        Command::PaperTable => {
            let rows = paper_rows(&session.evaluator)?;
            io::render(&rows.into_iter().map(|(r, _)| r).collect::<Vec<_>>(), format)
        }
        Command::SweepAsymptotic(args) => {
            let base = read_input(&args.input)?;
            let lambdas = if args.lambdas.is_empty() {
                DEFAULT_LAMBDAS.to_vec()
            } else {
                args.lambdas.iter().map(|s| parse_lambda(s)).collect::<Result<_, _>>()?
            };
            let rows = sweep_rows(&session.evaluator, &base, &lambdas)?;
            io::render(&rows.into_iter().map(|(r, _)| r).collect::<Vec<_>>(), format)
        }
        Command::OracleCheck(args) => {
            let lines = oracle_lines(args, cli.seed);
            let text = match format {
                OutputFormat::Json => lines.iter().map(|l| l.to_json() + "\n").collect(),
                _ => io::render(&check_records(&lines), format),
            };
            let failed = lines.iter().filter(|l| l.status == Status::Fail).count();
            let _ = out.write_all(text.as_bytes());
            session.close()?;
            return if failed > 0 { Err(CliError::OracleFailed(failed)) } else { Ok(()) };
        }
    };
    let _ = out.write_all(text.as_bytes());
    session.close()
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("m3: {e}");
            return 1;
        }
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("m3: {e}");
            e.exit_code()
        }
    }
}
