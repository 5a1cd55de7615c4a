//! Exact and modular generators for every sequence family, plus
//! cross-checking oracles and asymptotic diagnostics.
//!
//! The general family is aₙ = f(n)aₙ₋₁ + h₁(n)h₂(n)ⁿ with a₀ = h₁(0), using
//! the convention 0⁰ = 1. Derangements are the instance (X, 1, −1).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, invariant, Result};
use crate::exactint::{addmod, factorial, mulmod, powmod_u64, reduce_i64};
use crate::polyring::{IntPoly, ModPoly};

/// Declarative description of a sequence family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeqSpec {
    /// aₙ = f(n)aₙ₋₁ + h₁(n)h₂(n)ⁿ, a₀ = h₁(0).
    RClass { f: IntPoly, h1: IntPoly, h2: IntPoly },
    Derangement,
    EvenDerangement,
    OddDerangement,
    /// Eₙ = Dₙ/(n−1), n ≥ 2.
    EPlain,
    /// Dₙ⁽ᵉ⁾/(n−1), n ≥ 2.
    EEven,
    /// Dₙ⁽ᵒ⁾/(n−1), n ≥ 2.
    EOdd,
    /// aₙ = Σ_{j=0}^{n} n!/j!·h(n)ʲ.
    HSchenker(IntPoly),
}

impl SeqSpec {
    pub fn rclass(f: IntPoly, h1: IntPoly, h2: IntPoly) -> Self {
        SeqSpec::RClass { f, h1, h2 }
    }

    /// Smallest index at which the family is defined.
    pub fn first_index(&self) -> u64 {
        match self {
            SeqSpec::EPlain | SeqSpec::EEven | SeqSpec::EOdd => 2,
            _ => 0,
        }
    }

    /// The (f, h₁, h₂) triple when the family is a plain recurrence.
    ///
    /// Derangements are (X, 1, −1); h-Schenker sums with constant h = b
    /// satisfy aₙ = naₙ₋₁ + bⁿ, i.e. (X, 1, b).
    pub fn as_rclass(&self) -> Option<(IntPoly, IntPoly, IntPoly)> {
        match self {
            SeqSpec::RClass { f, h1, h2 } => Some((f.clone(), h1.clone(), h2.clone())),
            SeqSpec::Derangement => Some((IntPoly::x(), 1.into(), (-1).into())),
            SeqSpec::HSchenker(h) if h.degree().unwrap_or(0) == 0 => {
                Some((IntPoly::x(), 1.into(), h.clone()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqSpec::RClass { f: ff, h1, h2 } => write!(f, "a({ff}, {h1}, {h2})"),
            SeqSpec::Derangement => write!(f, "derangement"),
            SeqSpec::EvenDerangement => write!(f, "even-derangement"),
            SeqSpec::OddDerangement => write!(f, "odd-derangement"),
            SeqSpec::EPlain => write!(f, "E"),
            SeqSpec::EEven => write!(f, "E-even"),
            SeqSpec::EOdd => write!(f, "E-odd"),
            SeqSpec::HSchenker(h) => write!(f, "h-schenker({h})"),
        }
    }
}

/// Exact terms `start..=start+len−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermTable {
    pub start: u64,
    pub values: Vec<BigInt>,
}

impl TermTable {
    pub fn get(&self, n: u64) -> &BigInt {
        &self.values[(n - self.start) as usize]
    }

    pub fn last_index(&self) -> u64 {
        self.start + self.values.len() as u64 - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.start + i as u64, v))
    }
}

fn pow_big(b: &BigInt, e: u64) -> BigInt {
    num_traits::pow::pow(b.clone(), e as usize)
}

/// Derangement numbers D₀..=D_upto.
pub fn derangements(upto: u64) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(upto as usize + 1);
    out.push(BigInt::one());
    for n in 1..=upto {
        let next = &out[n as usize - 1] * n + if n % 2 == 0 { 1 } else { -1 };
        out.push(next);
    }
    out
}

/// Even and odd derangement counts for 0..=upto by the mutual recurrence
/// Dₙ⁽ᵉ⁾ = (n−1)(Dₙ₋₂⁽ᵒ⁾ + Dₙ₋₁⁽ᵒ⁾), Dₙ⁽ᵒ⁾ = (n−1)(Dₙ₋₂⁽ᵉ⁾ + Dₙ₋₁⁽ᵉ⁾).
pub fn even_odd_derangements(upto: u64) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut even = vec![BigInt::one(), BigInt::zero()];
    let mut odd = vec![BigInt::zero(), BigInt::zero()];
    for n in 2..=upto as usize {
        let e = (&odd[n - 2] + &odd[n - 1]) * (n - 1);
        let o = (&even[n - 2] + &even[n - 1]) * (n - 1);
        even.push(e);
        odd.push(o);
    }
    even.truncate(upto as usize + 1);
    odd.truncate(upto as usize + 1);
    (even, odd)
}

/// h-Schenker sum Σ_{j=0}^{n} n!/j!·hʲ for a fixed value h, via the
/// Horner-style recursion Rₘ = m·Rₘ₋₁ + hᵐ, R₀ = 1.
pub fn schenker_sum(h: &BigInt, n: u64) -> BigInt {
    let mut r = BigInt::one();
    let mut hp = BigInt::one();
    for m in 1..=n {
        hp *= h;
        r = r * m + &hp;
    }
    r
}

/// Σ_{j=0}^{n} n!/j!·hʲ mod m for a fixed residue h, in O(n) word operations.
pub fn schenker_sum_mod(h: u64, n: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    let mut hp = 1 % m;
    for k in 1..=n {
        hp = mulmod(hp, h, m);
        r = addmod(mulmod(k % m, r, m), hp, m);
    }
    r
}

fn exact_divide(a: &BigInt, b: u64, what: &str) -> Result<BigInt> {
    let (q, r) = a.div_rem(&BigInt::from(b));
    if !r.is_zero() {
        return invariant(format!("{what}: {b} does not divide {a}"));
    }
    Ok(q)
}

/// Exact terms from the family's first index up to `upto`.
pub fn term_table(spec: &SeqSpec, upto: u64) -> Result<TermTable> {
    let start = spec.first_index();
    if upto < start {
        return domain(format!("{spec} is defined from index {start}, got {upto}"));
    }
    let values = match spec {
        SeqSpec::RClass { f, h1, h2 } => {
            let mut out = Vec::with_capacity(upto as usize + 1);
            out.push(h1.eval_i64(0));
            for n in 1..=upto {
                let nb = BigInt::from(n);
                let next = f.eval(&nb) * &out[n as usize - 1] + h1.eval(&nb) * pow_big(&h2.eval(&nb), n);
                out.push(next);
            }
            out
        }
        SeqSpec::Derangement => derangements(upto),
        SeqSpec::EvenDerangement => even_odd_derangements(upto).0,
        SeqSpec::OddDerangement => even_odd_derangements(upto).1,
        SeqSpec::EPlain => {
            let d = derangements(upto);
            (2..=upto as usize).map(|n| &d[n - 2] + &d[n - 1]).collect()
        }
        SeqSpec::EEven | SeqSpec::EOdd => {
            let (e, o) = even_odd_derangements(upto);
            let src = if *spec == SeqSpec::EEven { e } else { o };
            (2..=upto)
                .map(|n| exact_divide(&src[n as usize], n - 1, "even/odd derangement"))
                .collect::<Result<Vec<_>>>()?
        }
        SeqSpec::HSchenker(h) => (0..=upto).map(|n| schenker_sum(&h.eval_i64(n as i64), n)).collect(),
    };
    Ok(TermTable { start, values })
}

/// The exact term of index `n`.
pub fn term(spec: &SeqSpec, n: u64) -> Result<BigInt> {
    if let SeqSpec::HSchenker(h) = spec {
        return Ok(schenker_sum(&h.eval_i64(n as i64), n));
    }
    Ok(term_table(spec, n)?.get(n).clone())
}

/// aₙ = Σ_{j=0}^{n} h₁(j)h₂(j)ʲ ∏_{i=j+1}^{n} f(i), an independent path to
/// the recurrence value.
pub fn term_closed(spec: &SeqSpec, n: u64) -> Result<BigInt> {
    let Some((f, h1, h2)) = spec.as_rclass() else {
        return domain(format!("closed formula needs a recurrence family, got {spec}"));
    };
    let mut sum = BigInt::zero();
    let mut suffix = BigInt::one();
    for j in (0..=n).rev() {
        let jb = BigInt::from(j);
        sum += h1.eval(&jb) * pow_big(&h2.eval(&jb), j) * &suffix;
        suffix *= f.eval(&jb);
    }
    Ok(sum)
}

/// The associated sequence ã = (−f, h₁, 1) of a family with h₂ = −1, which
/// satisfies ãₙ = (−1)ⁿaₙ.
pub fn associated(spec: &SeqSpec) -> Result<SeqSpec> {
    match spec.as_rclass() {
        Some((f, h1, h2)) if h2 == IntPoly::constant(-1) => Ok(SeqSpec::rclass(-f, h1, 1.into())),
        _ => domain(format!("associated sequence needs h2 = -1, got {spec}")),
    }
}

/// Counts (all, even, odd) derangements of an n-set by enumerating every
/// permutation with Heap's algorithm, tracking parity through transpositions.
pub fn brute_force_derangements(n: usize) -> Result<(u64, u64, u64)> {
    if n > 9 {
        return domain(format!("permutation enumeration is capped at n = 9, got {n}"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd_parity = false;
    let mut counts = (0u64, 0u64, 0u64);
    let mut tally = |perm: &[usize], odd: bool| {
        if perm.iter().enumerate().all(|(i, &v)| i != v) {
            counts.0 += 1;
            if odd {
                counts.2 += 1;
            } else {
                counts.1 += 1;
            }
        }
    };
    tally(&perm, odd_parity);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            odd_parity = !odd_parity;
            tally(&perm, odd_parity);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(counts)
}

// ---------------------------------------------------------------------------
// Modular streams.

#[derive(Debug, Clone)]
enum StreamState {
    RClass { f: ModPoly, h1: ModPoly, h2: ModPoly, prev: u64 },
    EvenOdd { want_even: bool, even: [u64; 2], odd: [u64; 2] },
    /// Derangements mod `m2`: (Dₙ₋₂, Dₙ₋₁) with the family's index n.
    DerangementPair { d: [u64; 2], m2: u64 },
    HSchenker { h: ModPoly },
}

/// Constant-memory stream of `(n, aₙ mod d)` starting at the family's first index.
///
/// All arithmetic is word-sized with `u128` intermediates, so any modulus
/// below 2⁶³ is supported; powers h₂(n)ⁿ use fast exponentiation.
#[derive(Debug, Clone)]
pub struct ModStream {
    spec: SeqSpec,
    m: u64,
    n: u64,
    state: StreamState,
}

/// Opens a residue stream of `spec` modulo `d ≥ 1`.
pub fn mod_stream(spec: &SeqSpec, d: u64) -> Result<ModStream> {
    if d < 1 {
        return domain("stream modulus must be at least 1");
    }
    if d >= 1 << 62 {
        return domain(format!("stream modulus {d} exceeds 2^62"));
    }
    let state = match spec {
        SeqSpec::RClass { f, h1, h2 } => StreamState::RClass {
            f: f.reduce(d),
            h1: h1.reduce(d),
            h2: h2.reduce(d),
            prev: 0,
        },
        SeqSpec::Derangement => StreamState::RClass {
            f: IntPoly::x().reduce(d),
            h1: IntPoly::constant(1).reduce(d),
            h2: IntPoly::constant(-1).reduce(d),
            prev: 0,
        },
        SeqSpec::EvenDerangement | SeqSpec::OddDerangement => StreamState::EvenOdd {
            want_even: *spec == SeqSpec::EvenDerangement,
            even: [0; 2],
            odd: [0; 2],
        },
        SeqSpec::EPlain => StreamState::DerangementPair { d: [1 % d, 0], m2: d },
        SeqSpec::EEven | SeqSpec::EOdd => StreamState::DerangementPair {
            d: [1 % (2 * d), 0],
            m2: 2 * d,
        },
        SeqSpec::HSchenker(h) => StreamState::HSchenker { h: h.reduce(d) },
    };
    Ok(ModStream {
        spec: spec.clone(),
        m: d,
        n: spec.first_index(),
        state,
    })
}

impl ModStream {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Index of the next emitted term.
    pub fn position(&self) -> u64 {
        self.n
    }

    /// Advances past every index below `n`.
    pub fn skip_to(&mut self, n: u64) {
        while self.n < n {
            self.next();
        }
    }
}

impl Iterator for ModStream {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        let n = self.n;
        let m = self.m;
        let value = match &mut self.state {
            StreamState::RClass { f, h1, h2, prev } => {
                let v = if n == 0 {
                    h1.eval(0)
                } else {
                    let power = powmod_u64(h2.eval(n), n, m);
                    addmod(mulmod(f.eval(n), *prev, m), mulmod(h1.eval(n), power, m), m)
                };
                *prev = v;
                v
            }
            StreamState::EvenOdd { want_even, even, odd } => {
                let (e, o) = match n {
                    0 => (1 % m, 0),
                    1 => (0, 0),
                    _ => {
                        let k = (n - 1) % m;
                        (
                            mulmod(k, addmod(odd[0], odd[1], m), m),
                            mulmod(k, addmod(even[0], even[1], m), m),
                        )
                    }
                };
                *even = [even[1], e];
                *odd = [odd[1], o];
                if *want_even {
                    e
                } else {
                    o
                }
            }
            StreamState::DerangementPair { d, m2 } => {
                // Invariant on entry: d = [D_{n−2}, D_{n−1}] mod m2.
                let e = addmod(d[0], d[1], *m2);
                let sign = if n % 2 == 0 { 1 } else { *m2 - 1 };
                let dn = addmod(mulmod(n % *m2, d[1], *m2), sign % *m2, *m2);
                *d = [d[1], dn];
                match self.spec {
                    SeqSpec::EPlain => e,
                    SeqSpec::EEven => ((e + *m2 - sign % *m2) % *m2) / 2,
                    _ => (e + sign) % *m2 / 2,
                }
            }
            StreamState::HSchenker { h } => schenker_sum_mod(h.eval(n), n, m),
        };
        self.n += 1;
        Some((n, value))
    }
}

/// Residues of `spec` mod `d` for indices `first..=upto`.
pub fn residues(spec: &SeqSpec, d: u64, upto: u64) -> Result<Vec<u64>> {
    let s = mod_stream(spec, d)?;
    Ok(s.take_while(|&(n, _)| n <= upto).map(|(_, r)| r).collect())
}

// ---------------------------------------------------------------------------
// Exact bounds on e.

/// Σ_{j=0}^{n} 1/j!.
fn exp_partial(n: u64) -> BigRational {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for j in 0..=n {
        if j > 0 {
            fact *= j;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    sum
}

/// Rational interval `[Sₙ, Sₙ + 2/(N+1)!]` containing e, Sₙ = Σ_{j≤N} 1/j!.
pub fn e_bounds(terms: u64) -> (BigRational, BigRational) {
    let lo = exp_partial(terms);
    let hi = &lo + BigRational::new(BigInt::from(2), factorial(terms + 1));
    (lo, hi)
}

/// Rational interval containing 1/e from consecutive alternating partial
/// sums of Σ(−1)ʲ/j!.
pub fn inv_e_bounds(terms: u64) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    let mut prev = BigRational::zero();
    for j in 0..=terms + 1 {
        if j > 0 {
            fact *= j;
        }
        prev = sum.clone();
        let t = BigRational::new(BigInt::one(), fact.clone());
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    if prev < sum {
        (prev, sum)
    } else {
        (sum, prev)
    }
}

/// Outcome of the exact nearest-integer test Dₙ = round(n!/e).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestIntegerCheck {
    pub checked_upto: u64,
    /// Every n had |n!/e − Dₙ| < 1/2.
    pub nearest: bool,
    /// Every n had the sharper |n!/e − Dₙ| < 1/n.
    pub within_one_over_n: bool,
    pub first_failure: Option<u64>,
}

/// Decides |n!/e − Dₙ| < 1/2 and < 1/n for 1 ≤ n ≤ n_max with exact
/// rational interval arithmetic.
pub fn nearest_integer_check(n_max: u64) -> NearestIntegerCheck {
    let d = derangements(n_max);
    let (lo, hi) = inv_e_bounds(n_max + 25);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut nearest = true;
    let mut sharp = true;
    let mut first_failure = None;
    for n in 1..=n_max {
        let f = BigRational::from_integer(factorial(n));
        let dn = BigRational::from_integer(d[n as usize].clone());
        let gaps = [(&f * &lo - &dn).abs(), (&f * &hi - &dn).abs()];
        let bound_n = BigRational::new(BigInt::one(), BigInt::from(n));
        let ok_half = gaps.iter().all(|g| g < &half);
        let ok_n = gaps.iter().all(|g| g < &bound_n);
        if !(ok_half && ok_n) && first_failure.is_none() {
            first_failure = Some(n);
        }
        nearest &= ok_half;
        sharp &= ok_n;
    }
    NearestIntegerCheck {
        checked_upto: n_max,
        nearest,
        within_one_over_n: sharp,
        first_failure,
    }
}

/// Ratio diagnostics aₙ / ∏_{i=n₀+1}^{n} f(i) (their limit is ξ).
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    /// Largest zero of f among 0..=n_max (products start after it).
    pub n0: u64,
    pub ratios: Vec<(u64, BigRational)>,
    /// Ratio at n_max: a partial sum of the series defining ξ.
    pub xi_partial: BigRational,
    /// Present for derangements.
    pub nearest_integer: Option<NearestIntegerCheck>,
}

pub fn asymptotics_report(spec: &SeqSpec, n_max: u64) -> Result<AsymptoticsReport> {
    let supported = match spec {
        SeqSpec::Derangement => true,
        SeqSpec::RClass { f, h2, .. } => {
            f.degree().unwrap_or(0) >= 1
                && h2.as_constant().is_some_and(|c| c.abs().is_one())
        }
        _ => false,
    };
    if !supported {
        return domain(format!(
            "asymptotics need derangements or a(f, h1, ±1) with non-constant f, got {spec}"
        ));
    }
    let (f, _, _) = spec.as_rclass().expect("supported specs are recurrences");
    let terms = term_table(spec, n_max)?;
    let n0 = (0..=n_max)
        .rev()
        .find(|&i| f.eval_i64(i as i64).is_zero())
        .unwrap_or(0);
    let mut ratios = Vec::new();
    let mut prod = BigInt::one();
    for n in n0..=n_max {
        if n > n0 {
            prod *= f.eval_i64(n as i64);
        }
        ratios.push((n, BigRational::new(terms.get(n).clone(), prod.clone())));
    }
    let xi_partial = ratios.last().map(|r| r.1.clone()).unwrap_or_default();
    let nearest_integer = (*spec == SeqSpec::Derangement
        || spec.as_rclass() == SeqSpec::Derangement.as_rclass())
    .then(|| nearest_integer_check(n_max));
    Ok(AsymptoticsReport {
        n0,
        ratios,
        xi_partial,
        nearest_integer,
    })
}

/// Evidence label from a finite scan; never a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Boundedness {
    ConstantZero,
    UltimatelyConstant(BigInt),
    /// aₙ = (−1)ⁿc on the observed tail.
    Alternating(BigInt),
    /// (c, 0, c, 0, ...) on the observed tail.
    Period2C0(BigInt),
    UnboundedLikely,
    Unknown,
}

/// Classifies the behaviour of aₙ over the second half of `0..=horizon`.
pub fn classify_boundedness(spec: &SeqSpec, horizon: u64) -> Result<Boundedness> {
    if spec.as_rclass().is_none() {
        return domain(format!("boundedness classifier needs a recurrence family, got {spec}"));
    }
    let horizon = horizon.max(8);
    let t = term_table(spec, horizon)?;
    let from = horizon / 2;
    let tail: Vec<(u64, &BigInt)> = t.iter().filter(|(n, _)| *n >= from).collect();
    let first = tail[0].1;
    if tail.iter().all(|(_, v)| v.is_zero()) {
        return Ok(Boundedness::ConstantZero);
    }
    if tail.iter().all(|(_, v)| *v == first) {
        return Ok(Boundedness::UltimatelyConstant(first.clone()));
    }
    let signed = |n: u64, v: &BigInt| if n % 2 == 0 { v.clone() } else { -v };
    let c = signed(tail[0].0, first);
    if tail.iter().all(|(n, v)| signed(*n, v) == c) {
        return Ok(Boundedness::Alternating(c));
    }
    let (zeros, nonzeros): (Vec<_>, Vec<_>) = tail.iter().partition(|(n, _)| n % 2 == tail[0].0 % 2);
    for (zs, cs) in [(&zeros, &nonzeros), (&nonzeros, &zeros)] {
        if zs.iter().all(|(_, v)| v.is_zero()) && cs.iter().all(|(_, v)| *v == cs[0].1) {
            return Ok(Boundedness::Period2C0(cs[0].1.clone()));
        }
    }
    let growing = tail.windows(2).all(|w| w[1].1.abs() > w[0].1.abs());
    let max_before = t
        .iter()
        .filter(|(n, _)| *n < from)
        .map(|(_, v)| v.abs())
        .max()
        .unwrap_or_default();
    if growing && tail.last().unwrap().1.abs() > max_before {
        return Ok(Boundedness::UnboundedLikely);
    }
    Ok(Boundedness::Unknown)
}

/// Signed machine-sized helper for `(−1)ⁿ`.
pub fn sign_pow(n: u64) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Reduces an index-signed value `(−1)ⁿ·v` modulo `m`.
pub fn signed_residue(n: u64, v: u64, m: u64) -> u64 {
    reduce_i64(sign_pow(n), m) * v % m
}

/// Convenience: exact term as an `i64` when it fits.
pub fn term_i64(spec: &SeqSpec, n: u64) -> Result<Option<i64>> {
    Ok(term(spec, n)?.to_i64())
}

/// Sample h-Schenker families with explicit growth bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchenkerBoundCase {
    /// h = X + 2: (n+1)! < h(n)ⁿ < aₙ < (n+1)h(n)ⁿ.
    XPlus2,
    /// h = X − 2: n! < (n−2)ⁿ⁻²·n(n−1) < aₙ < (n+1)(n−2)ⁿ⁻²·n(n−1).
    XMinus2,
    /// h = −X + 3: n! < (n−3)ⁿ⁻³·n < |aₙ| < (n−1)(n−3)ⁿ⁻²·n(n−1).
    NegXPlus3,
    /// h = −X² − 5: n! < |h|ⁿ⁻¹(|h|−n) < |aₙ| < (n+1)|h|ⁿ.
    NegXSqMinus5,
}

impl SchenkerBoundCase {
    pub fn poly(self) -> IntPoly {
        match self {
            SchenkerBoundCase::XPlus2 => IntPoly::from_i64s(&[2, 1]),
            SchenkerBoundCase::XMinus2 => IntPoly::from_i64s(&[-2, 1]),
            SchenkerBoundCase::NegXPlus3 => IntPoly::from_i64s(&[3, -1]),
            SchenkerBoundCase::NegXSqMinus5 => IntPoly::from_i64s(&[-5, 0, -1]),
        }
    }
}

/// Evaluates the case's inequality chain exactly at index `n`.
pub fn schenker_bounds_hold(case: SchenkerBoundCase, n: u64) -> Result<bool> {
    let min_n = match case {
        SchenkerBoundCase::XPlus2 | SchenkerBoundCase::NegXSqMinus5 => 1,
        SchenkerBoundCase::XMinus2 => 3,
        SchenkerBoundCase::NegXPlus3 => 4,
    };
    if n < min_n {
        return domain(format!("bound chain for {case:?} needs n >= {min_n}"));
    }
    let h = case.poly().eval_i64(n as i64);
    let a = schenker_sum(&h, n).abs();
    let nb = BigInt::from(n);
    let fact = factorial(n);
    let chain: Vec<BigInt> = match case {
        SchenkerBoundCase::XPlus2 => {
            let hn = pow_big(&h, n);
            vec![factorial(n + 1), hn.clone(), a, (&nb + 1) * hn]
        }
        SchenkerBoundCase::XMinus2 => {
            let base: BigInt = pow_big(&(&nb - 2), n - 2) * &nb * (&nb - 1);
            vec![fact, base.clone(), a, (&nb + 1) * base]
        }
        SchenkerBoundCase::NegXPlus3 => {
            let m3 = &nb - 3;
            vec![
                fact,
                pow_big(&m3, n - 3) * &nb,
                a,
                (&nb - 1) * pow_big(&m3, n - 2) * &nb * (&nb - 1),
            ]
        }
        SchenkerBoundCase::NegXSqMinus5 => {
            let ah = h.abs();
            vec![
                fact,
                pow_big(&ah, n - 1) * (&ah - &nb),
                a,
                (&nb + 1) * pow_big(&ah, n),
            ]
        }
    };
    Ok(chain.windows(2).all(|w| w[0] < w[1]))
}

/// For constant h = b > 0, checks that aₖ/k! = Σ_{j≤k} bʲ/j! increases
/// strictly for 1 ≤ k ≤ n and stays below an exact upper bound for eᵇ.
pub fn schenker_constant_partial_sums(b: u64, n: u64) -> bool {
    let (_, e_hi) = e_bounds(n + 30);
    let exp_b_hi = num_traits::pow::pow(e_hi, b as usize);
    let bb = BigInt::from(b);
    let mut prev = BigRational::zero();
    for k in 0..=n {
        let r = BigRational::new(schenker_sum(&bb, k), factorial(k));
        if (k > 0 && r <= prev) || r >= exp_b_hi {
            return false;
        }
        prev = r;
    }
    true
}
