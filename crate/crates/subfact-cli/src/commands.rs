//! Argument definitions and subcommand handlers.

use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use subfact::acceptance::{self, AcceptanceOptions};
use subfact::diophantine::{solve_prime_power, solve_q_factorial, two_solution_q, DioFamily};
use subfact::divisibility::{characterize, lcm_propagation_check, LcmOutcome};
use subfact::hensel::{make_decomposition, valuation_profile, zero_classes, DecompositionKind, NodeStatus};
use subfact::periodicity::period_report;
use subfact::polyring::{build_fd, fd_derivative_at_one, root_report, FdSign, IntPoly};
use subfact::primescan::store::{scan_with_store, ScanStore, DEFAULT_CHUNK};
use subfact::primescan::{degenerate_detail, kurepa_scan, scan_range, PrimeRecord, ScanSummary};
use subfact::sequences::{residues, term_table, SeqSpec};

use crate::output::{Cell, Format, Table};
use crate::CliError;

type CliResult = Result<(), CliError>;

#[derive(Debug, Parser)]
#[command(name = "subfact", version, about = "Exact arithmetic of derangement-type recurrences")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print exact terms, or residues with --modulus.
    Seq(SeqArgs),
    /// Proven eventual period of a sequence modulo d, reduced to the basic period.
    Period(PeriodArgs),
    /// Depth-k valuation profiles from the lifting engine.
    Lift(LiftArgs),
    /// Classify primes into A (divides no E_n) and B, with degeneracy flags.
    Classify(ClassifyArgs),
    /// Primes p <= bound dividing 1! + 2! + ... + (p-1)!.
    Kurepa(KurepaArgs),
    /// Solve D_n = q·m!, D_n = p^k and related equations.
    Dioph(DiophArgs),
    /// Decide n - b - 1 | a_n for a(X - b, h1, h2).
    Shiftdiv(ShiftdivArgs),
    /// Real-root count and rational roots of a polynomial or of f_d.
    Roots(RootsArgs),
    /// Run the acceptance suite; exit 0 iff every criterion passes.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Derangement,
    EvenDerangement,
    OddDerangement,
    E,
    EEven,
    EOdd,
    /// a_n = f(n)a_{n-1} + h1(n)h2(n)^n; needs --f, --h1, --h2.
    Rclass,
    /// Sum of n!/j!·h(n)^j; needs --h.
    Schenker,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// f for --family rclass.
    #[arg(long)]
    pub f: Option<IntPoly>,
    /// h1 for --family rclass.
    #[arg(long, allow_hyphen_values = true)]
    pub h1: Option<IntPoly>,
    /// h2 for --family rclass.
    #[arg(long, allow_hyphen_values = true)]
    pub h2: Option<IntPoly>,
    /// h for --family schenker.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<IntPoly>,
}

impl FamilyArgs {
    fn spec(&self) -> Result<SeqSpec, CliError> {
        let need = |p: &Option<IntPoly>, flag: &str| {
            p.clone().ok_or_else(|| CliError::Usage(format!("--family {:?} needs {flag}", self.family)))
        };
        Ok(match self.family {
            FamilyName::Derangement => SeqSpec::Derangement,
            FamilyName::EvenDerangement => SeqSpec::EvenDerangement,
            FamilyName::OddDerangement => SeqSpec::OddDerangement,
            FamilyName::E => SeqSpec::EPlain,
            FamilyName::EEven => SeqSpec::EEven,
            FamilyName::EOdd => SeqSpec::EOdd,
            FamilyName::Rclass => SeqSpec::rclass(need(&self.f, "--f")?, need(&self.h1, "--h1")?, need(&self.h2, "--h2")?),
            FamilyName::Schenker => SeqSpec::HSchenker(need(&self.h, "--h")?),
        })
    }
}

/// An index range: `a..b` is half-open, `a..=b` inclusive, `a` a single index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for IndexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad bound {t:?}: {e}"));
        let (lo, hi) = if let Some((a, b)) = s.split_once("..=") {
            (num(a)?, num(b)?)
        } else if let Some((a, b)) = s.split_once("..") {
            let b = num(b)?;
            if b == 0 {
                return Err(format!("range {s} is empty"));
            }
            (num(a)?, b - 1)
        } else {
            let a = num(s)?;
            (a, a)
        };
        if lo > hi {
            return Err(format!("range {s} is empty"));
        }
        Ok(IndexRange { lo, hi })
    }
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Last index printed.
    #[arg(long)]
    pub upto: u64,
    /// Print residues modulo this number instead of exact terms.
    #[arg(long)]
    pub modulus: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// The modulus d >= 2.
    #[arg(long)]
    pub modulus: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LiftKind {
    /// (-1)^n E_n.
    E,
    EEven,
    EOdd,
    /// a(f, h1, 1) at a prime dividing some f(n0); needs --f and --h1.
    Rprime,
    /// h-Schenker sums on n = n1 mod p; needs --h and --n1.
    Schenker,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    #[arg(long, value_enum)]
    pub kind: LiftKind,
    /// The prime p.
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub f: Option<IntPoly>,
    #[arg(long, allow_hyphen_values = true)]
    pub h1: Option<IntPoly>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<IntPoly>,
    /// Residue class of the admissible set for --kind schenker.
    #[arg(long)]
    pub n1: Option<u64>,
    /// Profile depth.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    /// Root residue mod p; defaults to every zero class.
    #[arg(long)]
    pub root: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Range of integers to scan, e.g. 2..30 or 2..=29.
    #[arg(long, required_unless_present = "prime")]
    pub range: Option<IndexRange>,
    /// Show per-residue lifting detail for one degenerate prime.
    #[arg(long, conflicts_with_all = ["range", "resume"])]
    pub prime: Option<u64>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Reuse completed ranges from the cache and persist new ones.
    #[arg(long)]
    pub resume: bool,
    /// Cache directory used by --resume.
    #[arg(long, env = "SUBFACT_CACHE_DIR", default_value = ".subfact-cache")]
    pub cache_dir: PathBuf,
    /// Integers per persisted chunk.
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    pub chunk: u64,
}

#[derive(Debug, Args)]
pub struct KurepaArgs {
    /// Largest prime considered.
    #[arg(long)]
    pub bound: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DioFamilyArg {
    #[value(alias = "d")]
    All,
    #[value(alias = "d-odd")]
    Odd,
    #[value(alias = "d-even")]
    Even,
}

impl From<DioFamilyArg> for DioFamily {
    fn from(f: DioFamilyArg) -> Self {
        match f {
            DioFamilyArg::All => DioFamily::D,
            DioFamilyArg::Odd => DioFamily::DOdd,
            DioFamilyArg::Even => DioFamily::DEven,
        }
    }
}

#[derive(Debug, Args)]
pub struct DiophArgs {
    #[command(subcommand)]
    pub equation: DiophEquation,
}

#[derive(Debug, Subcommand)]
pub enum DiophEquation {
    /// F_n = q·m! for a positive rational q (default 1).
    Factorial {
        #[arg(long, value_enum, default_value_t = DioFamilyArg::All)]
        family: DioFamilyArg,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        q: BigRational,
    },
    /// F_n = p^k with k >= 1.
    PrimePower {
        #[arg(long, value_enum, default_value_t = DioFamilyArg::All)]
        family: DioFamilyArg,
        #[arg(long)]
        p: u64,
    },
    /// The rational q with D_n0 = q·m0! and D_n1 = q·(m0+1)!.
    TwoSolution {
        #[arg(long)]
        n0: u64,
        #[arg(long)]
        n1: u64,
    },
}

#[derive(Debug, Args)]
pub struct ShiftdivArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub h1: IntPoly,
    #[arg(long, allow_hyphen_values = true)]
    pub h2: IntPoly,
    /// Indices n to test (n >= 1).
    #[arg(long, required_unless_present = "lcm")]
    pub range: Option<IndexRange>,
    /// Check lcm propagation for indices n1,n2,n3 instead.
    #[arg(long, value_delimiter = ',')]
    pub lcm: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Polynomial to analyse.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "fd", conflicts_with = "fd")]
    pub poly: Option<IntPoly>,
    /// Analyse f_d built from --f and --h1 (default the derangement f_d).
    #[arg(long)]
    pub fd: Option<usize>,
    #[arg(long, default_value = "X")]
    pub f: IntPoly,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub h1: IntPoly,
    /// Use the non-alternating sum (h2 = 1).
    #[arg(long)]
    pub plain: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Include the long scan of primes below 10^6.
    #[arg(long)]
    pub extended: bool,
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn default_jobs(jobs: Option<usize>) -> usize {
    jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let format = cli.format;
    match cli.command {
        Command::Seq(a) => seq(a, format, &mut out),
        Command::Period(a) => period(a, format, &mut out),
        Command::Lift(a) => lift(a, format, &mut out),
        Command::Classify(a) => classify(a, format, &mut out),
        Command::Kurepa(a) => kurepa(a, format, &mut out),
        Command::Dioph(a) => dioph(a.equation, format, &mut out),
        Command::Shiftdiv(a) => shiftdiv(a, format, &mut out),
        Command::Roots(a) => roots(a, format, &mut out),
        Command::Verify(a) => verify(a, format, &mut out),
    }
}

fn seq(a: SeqArgs, format: Format, out: &mut impl Write) -> CliResult {
    let spec = a.family.spec()?;
    let first = spec.first_index();
    if a.upto < first {
        return Err(CliError::Usage(format!("{spec} starts at index {first}")));
    }
    let values: Vec<String> = match a.modulus {
        Some(d) => residues(&spec, d, a.upto)?.iter().map(u64::to_string).collect(),
        None => term_table(&spec, a.upto)?.values.iter().map(BigInt::to_string).collect(),
    };
    if format == Format::Table {
        writeln!(out, "{}", values.join(","))?;
        return Ok(());
    }
    let mut t = Table::new(&["n", "value"]);
    for (i, v) in values.into_iter().enumerate() {
        t.push(vec![Cell::int(first + i as u64), Cell::Int(v)]);
    }
    Ok(t.render(format, out)?)
}

fn period(a: PeriodArgs, format: Format, out: &mut impl Write) -> CliResult {
    let spec = a.family.spec()?;
    let r = period_report(&spec, a.modulus)?;
    let mut t = Table::new(&[
        "family",
        "modulus",
        "tail_start",
        "predicted_period",
        "basic_period",
        "verified_window",
        "counterexample",
        "provenance",
    ]);
    t.push(vec![
        Cell::text(&spec),
        Cell::int(r.modulus),
        Cell::int(r.tail_start),
        Cell::int(r.predicted_period),
        Cell::opt_int(r.basic_period),
        Cell::int(r.verified_window),
        Cell::opt_int(r.counterexample),
        Cell::text(&r.provenance),
    ]);
    t.render(format, out)?;
    match r.counterexample {
        Some(n) => Err(CliError::Failed(format!("predicted period fails at n = {n}"))),
        None => Ok(()),
    }
}

fn lift(a: LiftArgs, format: Format, out: &mut impl Write) -> CliResult {
    let need = |p: &Option<IntPoly>, flag: &str| p.clone().ok_or_else(|| CliError::Usage(format!("--kind needs {flag}")));
    let kind = match a.kind {
        LiftKind::E => DecompositionKind::EPlain,
        LiftKind::EEven => DecompositionKind::EEven,
        LiftKind::EOdd => DecompositionKind::EOdd,
        LiftKind::Rprime => DecompositionKind::RPrime {
            f: need(&a.f, "--f")?,
            h1: need(&a.h1, "--h1")?,
        },
        LiftKind::Schenker => DecompositionKind::HSchenker {
            h: need(&a.h, "--h")?,
            n1: a.n1.ok_or_else(|| CliError::Usage("--kind schenker needs --n1".into()))?,
        },
    };
    let dec = make_decomposition(kind, a.p)?;
    let roots = match a.root {
        Some(r) => vec![r],
        None => zero_classes(&dec)?,
    };
    let mut t = Table::new(&["root", "level", "residue", "modulus", "parent", "step", "status", "witnesses"]);
    let mut contradictions = 0;
    for root in roots {
        let prof = valuation_profile(&dec, root, a.depth)?;
        for node in &prof.nodes {
            let status = match &node.status {
                NodeStatus::Verified => "verified".to_string(),
                NodeStatus::Unverified => "unverified".to_string(),
                NodeStatus::Contradicted(m) => {
                    contradictions += 1;
                    format!("contradicted: {m}")
                }
            };
            let witnesses: Vec<String> = node.witnesses.iter().map(|(n, v)| format!("{n}:{v}")).collect();
            t.push(vec![
                Cell::int(prof.root_residue),
                Cell::int(node.level),
                Cell::int(node.class.residue),
                Cell::int(node.class.modulus),
                Cell::opt_int(node.parent.map(|i| prof.nodes[i].class.residue)),
                node.step.map_or(Cell::Null, |s| Cell::text(s.outcome)),
                Cell::Text(status),
                Cell::Text(witnesses.join(";")),
            ]);
        }
    }
    t.render(format, out)?;
    if contradictions > 0 {
        return Err(CliError::Failed(format!("{contradictions} profile nodes contradicted by witnesses")));
    }
    Ok(())
}

fn record_row(r: &PrimeRecord) -> Vec<Cell> {
    let zeros: Vec<String> = r.zero_residues.iter().map(u64::to_string).collect();
    vec![
        Cell::int(r.prime),
        Cell::text(r.ab_class),
        Cell::Text(zeros.join(";")),
        Cell::Bool(r.degenerate),
        Cell::Bool(r.valuation_capped),
        Cell::int(r.kurepa_valuation),
    ]
}

fn summary_note(s: &ScanSummary) -> String {
    format!(
        "range {}..={}: |A| = {}, |B| = {}, A-density {:.6}, degenerate {:?}",
        s.lo, s.hi, s.count_a, s.count_b, s.density_a, s.degenerate
    )
}

fn classify(a: ClassifyArgs, format: Format, out: &mut impl Write) -> CliResult {
    if let Some(p) = a.prime {
        let d = degenerate_detail(p, None)?;
        let mut t = Table::new(&["prime", "residue", "index", "q_hat", "square_divides", "consequence"]);
        for (z, c) in &d.residues {
            t.push(vec![
                Cell::int(p),
                Cell::int(z.residue),
                Cell::int(z.index),
                Cell::int(z.q_hat),
                Cell::Bool(z.square_divides),
                Cell::text(format!("{c:?}")),
            ]);
        }
        return Ok(t.render(format, out)?);
    }
    let range = a.range.expect("clap requires --range without --prime");
    let lo = range.lo.max(2);
    let jobs = default_jobs(a.jobs);
    let records = if range.hi < 2 {
        Vec::new()
    } else if a.resume {
        if a.chunk == 0 {
            return Err(CliError::Usage("--chunk must be positive".into()));
        }
        let store = ScanStore::open(&a.cache_dir)?;
        let scan = scan_with_store(&store, lo, range.hi, jobs, a.chunk)?;
        eprintln!(
            "cache {}: {} primes computed, {} reused",
            a.cache_dir.display(),
            scan.computed,
            scan.reused
        );
        scan.records
    } else {
        scan_range(lo, range.hi, jobs)?.0
    };
    eprintln!("{}", summary_note(&ScanSummary::from_records(lo, range.hi, &records)));
    let mut t = Table::new(&["prime", "ab_class", "zero_residues", "degenerate", "valuation_capped", "kurepa_valuation"]);
    for r in &records {
        t.push(record_row(r));
    }
    Ok(t.render(format, out)?)
}

fn kurepa(a: KurepaArgs, format: Format, out: &mut impl Write) -> CliResult {
    let primes = kurepa_scan(a.bound, default_jobs(a.jobs))?;
    let mut t = Table::new(&["prime", "valuation"]);
    for p in primes {
        t.push(vec![Cell::int(p), Cell::int(subfact::hensel::sum_factorials_valuation(p)?)]);
    }
    Ok(t.render(format, out)?)
}

fn dioph(eq: DiophEquation, format: Format, out: &mut impl Write) -> CliResult {
    match eq {
        DiophEquation::Factorial { family, q } => {
            let fam = DioFamily::from(family);
            let s = solve_q_factorial(fam, &q)?;
            eprintln!("{}: exhaustive = {}; {}", s.equation, s.exhaustive, s.cutoff_used);
            let mut t = Table::new(&["family", "q", "n", "m"]);
            for (n, m) in s.solutions {
                t.push(vec![Cell::text(fam), Cell::text(&q), Cell::int(n), Cell::int(m)]);
            }
            Ok(t.render(format, out)?)
        }
        DiophEquation::PrimePower { family, p } => {
            let fam = DioFamily::from(family);
            let s = solve_prime_power(fam, p)?;
            eprintln!("{}: exhaustive = {}; {}", s.equation, s.exhaustive, s.cutoff_used);
            let mut t = Table::new(&["family", "p", "n", "k"]);
            for (n, k) in s.solutions {
                t.push(vec![Cell::text(fam), Cell::int(p), Cell::int(n), Cell::int(k)]);
            }
            Ok(t.render(format, out)?)
        }
        DiophEquation::TwoSolution { n0, n1 } => {
            let q = two_solution_q(n0, n1)?;
            if !q.verify() {
                return Err(subfact::Error::Invariant("two-solution rational failed verification".into()).into());
            }
            let q_text = match q.q_exact(1000) {
                Some(r) => r.to_string(),
                None => format!("{}/{}!", q.d_n0, q.m0),
            };
            let mut t = Table::new(&["n0", "n1", "d_n0", "d_n1", "m0", "q"]);
            t.push(vec![
                Cell::int(q.n0),
                Cell::int(q.n1),
                Cell::int(&q.d_n0),
                Cell::int(&q.d_n1),
                Cell::int(&q.m0),
                Cell::Text(q_text),
            ]);
            Ok(t.render(format, out)?)
        }
    }
}

fn shiftdiv(a: ShiftdivArgs, format: Format, out: &mut impl Write) -> CliResult {
    if let Some(ns) = a.lcm {
        if ns.len() != 3 {
            return Err(CliError::Usage(format!("--lcm takes three indices, got {}", ns.len())));
        }
        let outcome = lcm_propagation_check(a.b, &a.h1, &a.h2, ns[0], ns[1], ns[2])?;
        let (status, detail) = match &outcome {
            LcmOutcome::Holds(rules) => ("holds", format!("{rules:?}")),
            LcmOutcome::Fails(rules) => ("fails", format!("{rules:?}")),
            LcmOutcome::Inapplicable(why) => ("inapplicable", why.clone()),
        };
        let mut t = Table::new(&["b", "n1", "n2", "n3", "outcome", "detail"]);
        t.push(vec![
            Cell::int(a.b),
            Cell::int(ns[0]),
            Cell::int(ns[1]),
            Cell::int(ns[2]),
            Cell::text(status),
            Cell::Text(detail),
        ]);
        return Ok(t.render(format, out)?);
    }
    let range = a.range.expect("clap requires --range without --lcm");
    let report = characterize(a.b, &a.h1, &a.h2, range.lo, range.hi)?;
    let mut t = Table::new(&["n", "divisible", "reason"]);
    for v in &report.verdicts {
        t.push(vec![Cell::int(v.n), Cell::Bool(v.divisible), Cell::text(v.reason)]);
    }
    Ok(t.render(format, out)?)
}

fn roots(a: RootsArgs, format: Format, out: &mut impl Write) -> CliResult {
    let (poly, d) = match (a.poly, a.fd) {
        (Some(p), _) => (p, None),
        (None, Some(d)) => {
            let sign = if a.plain { FdSign::Plain } else { FdSign::Alternating };
            (build_fd(&a.f, &a.h1, sign, d), Some(d))
        }
        (None, None) => return Err(CliError::Usage("give --poly or --fd".into())),
    };
    let r = root_report(&poly)?;
    let join = |v: Vec<String>| v.join(";");
    let derangement_fd = a.f == IntPoly::x() && a.h1 == IntPoly::constant(1) && !a.plain;
    let derivative = match d {
        Some(d) if d >= 3 && derangement_fd => Cell::int(fd_derivative_at_one(d)?),
        _ => Cell::Null,
    };
    let mut t = Table::new(&[
        "polynomial",
        "degree",
        "real_roots",
        "distinct_real_roots",
        "rational_roots",
        "isolating_intervals",
        "derivative_at_one",
    ]);
    t.push(vec![
        Cell::text(&poly),
        Cell::opt_int(poly.degree()),
        Cell::int(r.real_root_count),
        Cell::int(r.distinct_real_roots),
        Cell::Text(join(r.rational_roots.iter().map(ToString::to_string).collect())),
        Cell::Text(join(r.isolating_intervals.iter().map(|(lo, hi)| format!("({lo}, {hi}]")).collect())),
        derivative,
    ]);
    Ok(t.render(format, out)?)
}

fn verify(a: VerifyArgs, format: Format, out: &mut impl Write) -> CliResult {
    let opts = AcceptanceOptions {
        extended: a.extended || AcceptanceOptions::default().extended,
        jobs: default_jobs(a.jobs),
    };
    let mut results = Vec::new();
    let mut t = Table::new(&["criterion", "title", "status", "seconds", "budget_seconds", "checks_passed", "checks"]);
    for id in 1..=10 {
        let r = acceptance::run_criterion(id, &opts).expect("criterion ids 1..=10 exist");
        if format == Format::Table {
            writeln!(out, "{}", r.summary_line())?;
            out.flush()?;
        }
        t.push(vec![
            Cell::int(r.id),
            Cell::text(r.title),
            Cell::text(r.status()),
            Cell::text(format!("{:.3}", r.elapsed.as_secs_f64())),
            Cell::int(r.budget.as_secs()),
            Cell::int(r.checks.iter().filter(|c| c.passed).count()),
            Cell::int(r.checks.len()),
        ]);
        results.push(r);
    }
    if format != Format::Table {
        t.render(format, out)?;
    }
    if acceptance::all_ok(&results) {
        Ok(())
    } else {
        Err(CliError::Failed("acceptance suite failed".into()))
    }
}
