//! End-to-end acceptance checks, numbered 1–10, each with a runtime budget.
//!
//! A criterion passes when every check passes within its budget. A check
//! can be marked `known_false`: its target value is documented as wrong, so
//! a failure there is reported as a known failure rather than a regression.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;

use crate::diophantine::{solve_factorial, solve_prime_power, DioFamily};
use crate::error::Result;
use crate::exactint::{primes_upto, vp};
use crate::hensel::{
    closed_valuation, make_decomposition, sum_factorials_valuation, valuation_profile, zero_classes, ClosedFormula,
    DecompositionKind,
};
use crate::periodicity::period_report;
use crate::polyring::{build_fd, fd_derivative_at_one, root_report, FdSign, IntPoly};
use crate::primescan::{classify_prime, degenerate_detail, kurepa_scan, scan_range, AbClass, ResidueConsequence};
use crate::sequences::{
    brute_force_derangements, derangements, even_odd_derangements, nearest_integer_check, schenker_bounds_hold,
    schenker_constant_partial_sums, sign_pow, term_table, SchenkerBoundCase, SeqSpec,
};

/// Environment variable enabling the optional scan of [2, 10⁶).
pub const EXTENDED_ENV: &str = "SUBFACT_ACCEPTANCE_EXTENDED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptanceOptions {
    /// Run the long extended prime scan of criterion 4.
    pub extended: bool,
    pub jobs: usize,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            extended: std::env::var(EXTENDED_ENV).is_ok_and(|v| v == "1"),
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// One assertion inside a criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// The target value is documented as incorrect.
    pub known_false: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Only checks marked `known_false` failed.
    KnownFail,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::KnownFail => "FAIL (known)",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
    pub budget: Duration,
    pub notes: Vec<String>,
}

impl CriterionResult {
    pub fn over_budget(&self) -> bool {
        self.elapsed > self.budget
    }

    pub fn status(&self) -> Status {
        let unexpected = self.checks.iter().any(|c| !c.passed && !c.known_false);
        if unexpected || self.over_budget() {
            Status::Fail
        } else if self.checks.iter().any(|c| !c.passed) {
            Status::KnownFail
        } else {
            Status::Pass
        }
    }

    /// One line: id, title, status, time against budget and failing checks.
    pub fn summary_line(&self) -> String {
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let mut line = format!(
            "criterion {:>2} {:<28} {:<12} {:>8.2}s / {}s  ({passed}/{} checks)",
            self.id,
            self.title,
            self.status().to_string(),
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.checks.len()
        );
        if self.over_budget() {
            line.push_str("  over budget");
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            let tag = if c.known_false { "known" } else { "failed" };
            line.push_str(&format!("\n    {tag}: {}: {}", c.label, c.detail));
        }
        for n in &self.notes {
            line.push_str(&format!("\n    note: {n}"));
        }
        line
    }
}

struct Builder {
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, label: impl Into<String>, known_false: bool, r: Result<(bool, String)>) {
        let (passed, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        self.checks.push(Check {
            label: label.into(),
            passed,
            known_false,
            detail,
        });
    }

    fn check(&mut self, label: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) {
        self.push(label, false, f());
    }

    fn eq<T: PartialEq + fmt::Debug>(&mut self, label: impl Into<String>, got: Result<T>, want: T) {
        let r = got.map(|g| (g == want, format!("got {g:?}, want {want:?}")));
        self.push(label, false, r);
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn poly(s: &str) -> IntPoly {
    s.parse().expect("literal polynomial")
}

fn rc(f: &str, h1: &str, h2: &str) -> SeqSpec {
    SeqSpec::rclass(poly(f), poly(h1), poly(h2))
}

fn criterion_1(b: &mut Builder, _: &AcceptanceOptions) {
    let d: Vec<i64> = vec![1, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496, 1334961];
    let de: Vec<i64> = vec![1, 0, 0, 2, 3, 24, 130, 930, 7413, 66752, 667476];
    let dodd: Vec<i64> = vec![0, 0, 1, 0, 6, 20, 135, 924, 7420, 66744, 667485];
    let as_big = |v: &[i64]| v.iter().map(|&x| big(x)).collect::<Vec<_>>();
    b.eq("D_n, n <= 10", Ok(derangements(10)), as_big(&d));
    let (e, o) = even_odd_derangements(10);
    b.eq("even derangements, n <= 10", Ok(e), as_big(&de));
    b.eq("odd derangements, n <= 10", Ok(o), as_big(&dodd));
    b.check("permutation enumeration, n <= 8", || {
        for n in 0..=8usize {
            let (t, ev, od) = brute_force_derangements(n)?;
            let want = (d[n] as u64, de[n] as u64, dodd[n] as u64);
            if (t, ev, od) != want {
                return Ok((false, format!("n={n}: got {:?}, want {want:?}", (t, ev, od))));
            }
        }
        Ok((true, String::new()))
    });
}

fn criterion_2(b: &mut Builder, _: &AcceptanceOptions) {
    let n_max = 500u64;
    let d = derangements(n_max);
    let (e, o) = even_odd_derangements(n_max);
    let ep = term_table(&SeqSpec::EPlain, n_max);
    let mut run = |label: &str, f: &dyn Fn(u64) -> bool, from: u64| {
        let bad = (from..=n_max).find(|&n| !f(n));
        b.check(label, || Ok((bad.is_none(), format!("first failure at n = {bad:?}"))));
    };
    let ep = match ep {
        Ok(t) => t,
        Err(err) => {
            b.push("E_n table", false, Err(err));
            return;
        }
    };
    let i = |n: u64| n as usize;
    run("E_n = D_{n-2} + D_{n-1}", &|n| ep.get(n) == &(&d[i(n) - 2] + &d[i(n) - 1]), 2);
    run(
        "E_n = n D_{n-2} - (-1)^n",
        &|n| ep.get(n) == &(&d[i(n) - 2] * n - sign_pow(n)),
        2,
    );
    run(
        "D_n^(o) - D_n^(e) = (-1)^n (n-1)",
        &|n| &o[i(n)] - &e[i(n)] == big(sign_pow(n) * (n as i64 - 1)),
        0,
    );
    run(
        "D_n^(o) = n(n-1)/2 D_{n-2}",
        &|n| o[i(n)] == &d[i(n) - 2] * (n * (n - 1) / 2),
        2,
    );
    run(
        "2 D_n^(e) = D_n - (-1)^n (n-1)",
        &|n| &e[i(n)] * 2 == &d[i(n)] - big(sign_pow(n) * (n as i64 - 1)),
        0,
    );
    run(
        "2 D_n^(o) = D_n + (-1)^n (n-1)",
        &|n| &o[i(n)] * 2 == &d[i(n)] + big(sign_pow(n) * (n as i64 - 1)),
        0,
    );
    run("D_n^(e) + D_n^(o) = D_n", &|n| &e[i(n)] + &o[i(n)] == d[i(n)], 0);
}

fn basic(spec: &SeqSpec, d: u64) -> Result<Option<u64>> {
    Ok(period_report(spec, d)?.basic_period)
}

fn criterion_3(b: &mut Builder, _: &AcceptanceOptions) {
    b.eq("(X^2-2, 1, 2) mod 5", basic(&rc("X^2-2", "1", "2"), 5), Some(100));
    b.eq("(11X^4+7, 1, 7) mod 25", basic(&rc("11*X^4+7", "1", "7"), 25), Some(500));
    let r = basic(&rc("X^2+1", "1", "-1"), 3).map(|g| {
        (
            g == Some(18),
            format!("got {g:?}, want Some(18); residues repeat 1,1,0,2,2,0, and 18 is the period mod 9"),
        )
    });
    b.push("(X^2+1, 1, -1) mod 3", true, r);
    b.eq("(X^2+1, 1, -1) mod 9", basic(&rc("X^2+1", "1", "-1"), 9), Some(18));
    b.eq("(X^2+1, 1, 1) mod 3", basic(&rc("X^2+1", "1", "1"), 3), Some(9));
    b.eq("(X, 1, 2) mod 225", basic(&rc("X", "1", "2"), 225), Some(900));
    b.eq(
        "h-Schenker(X+1) mod 25: tail and period",
        period_report(&SeqSpec::HSchenker(poly("X+1")), 25).map(|r| (r.tail_start, r.basic_period)),
        (10, Some(100)),
    );
    b.check("derangements mod d, 2 <= d <= 30", || {
        for d in 2..=30u64 {
            let want = if d % 2 == 0 { d } else { 2 * d };
            let got = basic(&SeqSpec::Derangement, d)?;
            if got != Some(want) {
                return Ok((false, format!("d={d}: got {got:?}, want {want}")));
            }
        }
        Ok((true, String::new()))
    });
}

fn criterion_4(b: &mut Builder, opts: &AcceptanceOptions) {
    b.eq(
        "class A in [2, 30]",
        scan_range(2, 30, opts.jobs).map(|(r, _)| {
            r.iter().filter(|x| x.ab_class == AbClass::A).map(|x| x.prime).collect::<Vec<_>>()
        }),
        vec![2, 5, 7, 17, 19, 23, 29],
    );
    if opts.extended {
        // Two independent classifiers both give (29018, 49480); the target
        // split is off by 28 primes, so the check is marked known-false.
        let r = scan_range(2, 999_999, opts.jobs).map(|(_, s)| {
            let got = (s.count_a, s.count_b);
            (got == (28990, 49508), format!("got {got:?}, want (28990, 49508)"))
        });
        b.push("|A| and |B| in [2, 10^6)", true, r);
    } else {
        b.notes.push(format!("extended scan of [2, 10^6) skipped; set {EXTENDED_ENV}=1"));
    }
}

fn criterion_5(b: &mut Builder, _: &AcceptanceOptions) {
    b.check("2633: residue 1578 degenerate, valuation capped", || {
        let r = classify_prime(2633)?;
        let d = degenerate_detail(2633, Some(1578))?;
        let c = d.get(1578).map(|x| x.1);
        let ok = r.ab_class == AbClass::B
            && r.zero_residues.contains(&1578)
            && r.degenerate
            && r.valuation_capped
            && c == Some(ResidueConsequence::ValuationCapped);
        Ok((ok, format!("{r:?}, 1578 -> {c:?}")))
    });
    let cases: [(u64, &[u64], &[u64]); 2] = [
        (429943, &[172017, 223393, 317291], &[172017, 223393]),
        (480143, &[121716, 265745], &[265745]),
    ];
    for (p, residues, unique) in cases {
        b.check(format!("{p}: residues {residues:?}, q-hat units at {unique:?}"), || {
            let d = degenerate_detail(p, None)?;
            let lifted: Vec<u64> = d
                .residues
                .iter()
                .filter(|(_, c)| *c == ResidueConsequence::UniqueLift)
                .map(|(z, _)| z.residue)
                .collect();
            let rec = classify_prime(p)?;
            let ok = d.residue_list() == residues && lifted == unique && rec.degenerate;
            Ok((ok, format!("residues {:?}, unit q-hat at {lifted:?}", d.residue_list())))
        });
    }
}

fn criterion_6(b: &mut Builder, opts: &AcceptanceOptions) {
    b.eq("Kurepa scan to 10^5", kurepa_scan(100_000, opts.jobs), vec![3, 11]);
    b.eq("v_3 of the factorial series", sum_factorials_valuation(3), 2);
    b.eq("v_11 of the factorial series", sum_factorials_valuation(11), 1);
}

fn criterion_7(b: &mut Builder, _: &AcceptanceOptions) {
    let sols = |f| solve_factorial(f).map(|s| s.solutions);
    b.eq("D_n = m!", sols(DioFamily::D), vec![(2, 1), (3, 2)]);
    b.eq("D_n^(o) = m!", sols(DioFamily::DOdd), vec![(2, 1), (4, 3)]);
    b.eq("D_n^(e) = m!", sols(DioFamily::DEven), vec![(0, 0), (0, 1), (3, 2), (5, 4)]);
    let pp = |f, p| solve_prime_power(f, p).map(|s| s.solutions);
    b.eq("D_n = 3^k", pp(DioFamily::D, 3), vec![(4, 2)]);
    b.eq("D_n = 11^k", pp(DioFamily::D, 11), vec![]);
    b.eq("D_n^(e) = 2^k", pp(DioFamily::DEven, 2), vec![(3, 1)]);
    b.check("D_n^(o) = p^k, p <= 50", || {
        for p in primes_upto(50) {
            let s = pp(DioFamily::DOdd, p)?;
            if !s.is_empty() {
                return Ok((false, format!("p={p}: {s:?}")));
            }
        }
        Ok((true, String::new()))
    });
}

fn criterion_8(b: &mut Builder, _: &AcceptanceOptions) {
    let mut kinds = vec![(DecompositionKind::EPlain, 3), (DecompositionKind::EPlain, 13)];
    for p in [2, 3, 5] {
        kinds.push((DecompositionKind::EEven, p));
        kinds.push((DecompositionKind::EOdd, p));
    }
    for p in [3, 5, 7] {
        kinds.push((DecompositionKind::RPrime { f: poly("X"), h1: poly("1") }, p));
    }
    for n1 in 1..5 {
        kinds.push((DecompositionKind::HSchenker { h: poly("X"), n1 }, 5));
    }
    for (kind, p) in kinds {
        b.check(format!("depth-3 profiles, {kind} at p = {p}"), || {
            let dec = make_decomposition(kind.clone(), p)?;
            let mut verified = 0;
            for n1 in zero_classes(&dec)? {
                let prof = valuation_profile(&dec, n1, 3)?;
                if let Some(bad) = prof.contradictions().first() {
                    return Ok((false, format!("n1={n1}: {:?}", bad.status)));
                }
                if !prof.all_verified() {
                    return Ok((false, format!("n1={n1}: unverified nodes")));
                }
                verified += prof.nodes.len();
            }
            Ok((true, format!("{verified} nodes verified")))
        });
    }
    for h in ["X", "X+1", "3*X-6"] {
        b.check(format!("v_p(a_n) = v_p(n!) for h = {h}, p <= 13, n <= 300"), || {
            let hp = poly(h);
            let t = term_table(&SeqSpec::HSchenker(hp.clone()), 300)?;
            let mut tested = 0;
            for p in primes_upto(13) {
                let f = ClosedFormula::FactorialWhenPDividesH { h: hp.clone(), p };
                for n in 0..=300u64 {
                    let Ok(want) = closed_valuation(&f, n) else { continue };
                    let got = vp(t.get(n), p)?;
                    if got != want {
                        return Ok((false, format!("p={p} n={n}: {got:?} vs {want:?}")));
                    }
                    tested += 1;
                }
            }
            Ok((tested > 0, format!("{tested} pairs")))
        });
    }
}

fn criterion_9(b: &mut Builder, _: &AcceptanceOptions) {
    for d in 3..=12usize {
        b.check(format!("f_{d}: roots and f'(1)"), || {
            let fd = build_fd(&IntPoly::x(), &IntPoly::constant(1), FdSign::Alternating, d);
            let r = root_report(&fd)?;
            let closed = fd_derivative_at_one(d)?;
            let symbolic = fd.derivative().eval(&BigInt::one());
            let ok = r.real_root_count == d - 1
                && r.rational_roots == vec![num_rational::BigRational::one()]
                && closed == symbolic;
            Ok((
                ok,
                format!(
                    "{} real roots, rational {:?}, f'(1) = {closed} / {symbolic}",
                    r.real_root_count, r.rational_roots
                ),
            ))
        });
    }
}

fn criterion_10(b: &mut Builder, _: &AcceptanceOptions) {
    let ranges = [
        (SchenkerBoundCase::XPlus2, 5),
        (SchenkerBoundCase::XMinus2, 4),
        (SchenkerBoundCase::NegXPlus3, 10),
        (SchenkerBoundCase::NegXSqMinus5, 10),
    ];
    for (case, from) in ranges {
        b.check(format!("growth bounds {case:?}, {from} <= n <= 40"), || {
            for n in from..=40 {
                if !schenker_bounds_hold(case, n)? {
                    return Ok((false, format!("fails at n = {n}")));
                }
            }
            Ok((true, String::new()))
        });
    }
    b.check("a_n/n! increases below e^b, b = 1..4, n <= 40", || {
        Ok(((1..=4).all(|c| schenker_constant_partial_sums(c, 40)), String::new()))
    });
    b.check("D_n nearest integer to n!/e, 1 <= n <= 20", || {
        let r = nearest_integer_check(20);
        Ok((r.nearest, format!("{r:?}")))
    });
}

/// (id, title, budget in seconds, checks).
type Criterion = (u8, &'static str, u64, fn(&mut Builder, &AcceptanceOptions));

const CRITERIA: [Criterion; 10] = [
    (1, "tables", 1, criterion_1),
    (2, "identities", 5, criterion_2),
    (3, "periods", 10, criterion_3),
    (4, "prime classification", 1, criterion_4),
    (5, "degenerate primes", 30, criterion_5),
    (6, "Kurepa scan", 60, criterion_6),
    (7, "diophantine", 10, criterion_7),
    (8, "lifting soundness", 60, criterion_8),
    (9, "roots", 5, criterion_9),
    (10, "bounds and asymptotics", 5, criterion_10),
];

/// Runs one criterion (1–10).
pub fn run_criterion(id: u8, opts: &AcceptanceOptions) -> Option<CriterionResult> {
    let &(id, title, secs, f) = CRITERIA.iter().find(|c| c.0 == id)?;
    let mut b = Builder::new();
    let start = Instant::now();
    f(&mut b, opts);
    let elapsed = start.elapsed();
    // The extended scan is exempt from the one-second budget.
    let budget = if id == 4 && opts.extended {
        Duration::from_secs(24 * 3600)
    } else {
        Duration::from_secs(secs)
    };
    Some(CriterionResult {
        id,
        title,
        checks: b.checks,
        elapsed,
        budget,
        notes: b.notes,
    })
}

/// Runs all ten criteria in order.
pub fn run_all(opts: &AcceptanceOptions) -> Vec<CriterionResult> {
    (1..=10).filter_map(|id| run_criterion(id, opts)).collect()
}

/// True when no criterion has an unexpected failure.
pub fn all_ok(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.status() != Status::Fail)
}
