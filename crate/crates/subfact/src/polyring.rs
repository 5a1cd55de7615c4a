//! Dense integer polynomials, the f_d family built from a recurrence's
//! coefficients, and exact real-root analysis via Sturm sequences.
//!
//! The f_d polynomials satisfy aₙ = aₙ₋d·∏ f(n−i) + (±1)ⁿ·f_d(n): they collapse
//! `d` steps of the recurrence aₙ = f(n)aₙ₋₁ + h₁(n)(±1)ⁿ into one.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::exactint::{addmod, factorial, mulmod, reduce_big};

/// Integer polynomial, constant term first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// The monomial X.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `a₁X + a₀`.
    pub fn linear(a1: i64, a0: i64) -> Self {
        Self::from_i64s(&[a0, a1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// The value if the polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.coeffs.len() {
            0 => Some(BigInt::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval(&BigInt::from(x))
    }

    /// Value at `x` reduced into `[0, m)`.
    pub fn eval_mod(&self, x: i64, m: u64) -> Result<u64> {
        if m < 1 {
            return domain("eval_mod modulus must be at least 1");
        }
        Ok(self.reduce(m).eval_signed(x))
    }

    /// Coefficients reduced modulo `m`, for word-sized evaluation.
    pub fn reduce(&self, m: u64) -> ModPoly {
        ModPoly {
            coeffs: self.coeffs.iter().map(|c| reduce_big(c, m)).collect(),
            m,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(IntPoly::constant(1), |acc, _| &acc * self)
    }

    /// `self(g(X))`.
    pub fn compose(&self, g: &IntPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(IntPoly::zero(), |acc, c| &(&acc * g) + &IntPoly::constant(c.clone()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i)
                .collect(),
        )
    }

    /// `self(X − a)`.
    pub fn shift(&self, a: i64) -> Self {
        self.compose(&IntPoly::linear(1, -a))
    }

    /// `self(X + 1) − self(X)`.
    pub fn discrete_derivative(&self) -> Self {
        &self.shift(-1) - self
    }
}

impl From<i64> for IntPoly {
    fn from(c: i64) -> Self {
        IntPoly::constant(c)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -&self
    }
}

/// Canonical text form, highest degree first, e.g. `-X^3+4*X^2-4*X+1`.
/// The output parses back to the same polynomial.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if neg {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Polynomial with coefficients reduced modulo a word-sized `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    m: u64,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.m;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| addmod(mulmod(acc, x, self.m), c, self.m))
    }

    pub fn eval_signed(&self, x: i64) -> u64 {
        self.eval(crate::exactint::reduce_i64(x, self.m))
    }
}

/// Sign convention of the f_d construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdSign {
    /// Σ h₁(X−j)∏_{i<j} f(X−i), matching h₂ = 1.
    Plain,
    /// Σ (−1)ʲ h₁(X−j)∏_{i<j} f(X−i), matching h₂ = −1.
    Alternating,
}

impl FdSign {
    fn factor(self, j: usize) -> i64 {
        match self {
            FdSign::Alternating if j % 2 == 1 => -1,
            _ => 1,
        }
    }
}

/// f_d = Σ_{j<d} (±1)ʲ h₁(X−j) ∏_{i<j} f(X−i); `d = 0` is the empty sum.
pub fn build_fd(f: &IntPoly, h1: &IntPoly, sign: FdSign, d: usize) -> IntPoly {
    let mut sum = IntPoly::zero();
    let mut prod = IntPoly::constant(1);
    for j in 0..d {
        let term = &h1.shift(j as i64) * &prod;
        sum = &sum + &term.scale(&BigInt::from(sign.factor(j)));
        prod = &prod * &f.shift(j as i64);
    }
    sum
}

/// Checks f_{d1+d2} = (±1)^{d2}·f_{d1}(X−d2)·∏_{i<d2} f(X−i) + f_{d2} exactly.
pub fn fd_recurrence_check(f: &IntPoly, h1: &IntPoly, sign: FdSign, d1: usize, d2: usize) -> bool {
    let lhs = build_fd(f, h1, sign, d1 + d2);
    let prod = (0..d2).fold(IntPoly::constant(1), |acc, i| &acc * &f.shift(i as i64));
    let shifted = &build_fd(f, h1, sign, d1).shift(d2 as i64) * &prod;
    let rhs = &shifted.scale(&BigInt::from(sign.factor(d2))) + &build_fd(f, h1, sign, d2);
    lhs == rhs
}

/// f′_d(1) for the derangement f_d, in closed form −1 + Σ_{j=0}^{d−3} j!.
pub fn fd_derivative_at_one(d: usize) -> Result<BigInt> {
    if d < 3 {
        return domain(format!("fd_derivative_at_one needs d >= 3, got {d}"));
    }
    Ok((0..=(d as u64 - 3)).map(factorial).sum::<BigInt>() - 1)
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers for Sturm sequences.

type Rat = BigRational;

#[derive(Debug, Clone, PartialEq)]
struct RatPoly(Vec<Rat>);

impl RatPoly {
    fn from_int(p: &IntPoly) -> Self {
        RatPoly(p.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect()).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Self {
        RatPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
        .trimmed()
    }

    fn monic(&self) -> Self {
        let lc = self.0.last().expect("monic of zero polynomial").clone();
        RatPoly(self.0.iter().map(|c| c / &lc).collect())
    }

    fn sub(&self, rhs: &RatPoly) -> Self {
        let n = self.0.len().max(rhs.0.len());
        let zero = Rat::zero();
        RatPoly(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - rhs.0.get(i).unwrap_or(&zero))
                .collect(),
        )
        .trimmed()
    }

    fn neg(&self) -> Self {
        RatPoly(self.0.iter().map(|c| -c).collect())
    }

    fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lc = d.0.last().expect("division by zero polynomial").clone();
        if self.0.len() < d.0.len() {
            return (RatPoly(Vec::new()), self.clone());
        }
        let mut q = vec![Rat::zero(); self.0.len() - d.0.len() + 1];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (RatPoly(q).trimmed(), RatPoly(r).trimmed())
    }

    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Primitive integer polynomial with the same roots.
    fn to_primitive_int(&self) -> IntPoly {
        let den = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        IntPoly::new(ints.into_iter().map(|c| c / &g).collect())
    }
}

fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

struct Sturm {
    chain: Vec<RatPoly>,
}

impl Sturm {
    fn new(squarefree: &RatPoly) -> Self {
        let mut chain = vec![squarefree.clone(), squarefree.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1.neg();
            chain.push(r);
        }
        chain.pop();
        Sturm { chain }
    }

    fn variations_at(&self, x: &Rat) -> usize {
        count_variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        count_variations(self.chain.iter().map(|p| {
            let s = sign(p.0.last().unwrap());
            if !positive && p.degree() % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct real roots in `(lo, hi]`.
    fn count(&self, lo: &Rat, hi: &Rat) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    fn total(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Yun's square-free factorization: `(factor, multiplicity)` pairs.
fn squarefree_factors(p: &RatPoly) -> Vec<(RatPoly, usize)> {
    let mut out = Vec::new();
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.div_rem(&a0).0;
    let mut c = dp.div_rem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative());
        if a.degree() > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

/// Width below which isolating intervals are reported.
pub const ISOLATION_WIDTH_DENOM: u64 = 1024;

/// Exact real-root summary of an integer polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RootReport {
    /// Real roots counted with multiplicity.
    pub real_root_count: usize,
    /// Distinct real roots.
    pub distinct_real_roots: usize,
    /// Rational roots, ascending, each listed once.
    pub rational_roots: Vec<BigRational>,
    /// One half-open interval `(lo, hi]` per distinct real root, ascending,
    /// each narrower than 1/1024.
    pub isolating_intervals: Vec<(BigRational, BigRational)>,
}

/// Counts real roots by Sturm sequences over ℚ, isolates them by bisection
/// and finds the rational ones exactly.
///
/// Rational roots a/b of a primitive integer polynomial have b | lc, so once
/// an interval is narrower than 1/|lc| it holds at most one candidate of the
/// form a/|lc|; testing those is equivalent to the divisor enumeration of the
/// rational root theorem without factoring the constant term.
pub fn root_report(p: &IntPoly) -> Result<RootReport> {
    if p.is_zero() {
        return domain("root_report of the zero polynomial");
    }
    let rp = RatPoly::from_int(p);
    if rp.degree() == 0 {
        return Ok(RootReport {
            real_root_count: 0,
            distinct_real_roots: 0,
            rational_roots: Vec::new(),
            isolating_intervals: Vec::new(),
        });
    }
    let factors = squarefree_factors(&rp);
    let real_root_count = factors
        .iter()
        .map(|(f, mult)| Sturm::new(f).total() * mult)
        .sum();

    let sqfree = rp.div_rem(&rp.gcd(&rp.derivative())).0;
    let sturm = Sturm::new(&sqfree);
    let distinct = sturm.total();
    let prim = sqfree.to_primitive_int();
    let lc = prim.leading().unwrap().abs();

    // Cauchy bound, made strict so no root sits on the left end.
    let monic = sqfree.monic();
    let bound = monic.0[..monic.0.len() - 1]
        .iter()
        .map(|c| c.abs())
        .fold(Rat::zero(), |acc, c| if c > acc { c } else { acc })
        + Rat::from_integer(BigInt::from(2));

    let max_width = {
        let cap = Rat::new(BigInt::one(), BigInt::from(ISOLATION_WIDTH_DENOM));
        let by_lc = Rat::new(BigInt::one(), lc.clone() + 1);
        if by_lc < cap {
            by_lc
        } else {
            cap
        }
    };

    let mut intervals = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 && &hi - &lo < max_width {
            intervals.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    intervals.sort_by(|a, b| a.0.cmp(&b.0));
    if intervals.len() != distinct {
        return Err(Error::Invariant(format!(
            "isolated {} intervals for {} distinct roots",
            intervals.len(),
            distinct
        )));
    }

    let lc_rat = Rat::from_integer(lc.clone());
    let mut rational_roots = Vec::new();
    for (lo, hi) in &intervals {
        let a_lo: BigInt = (lo * &lc_rat).floor().to_integer() + 1;
        let a_hi = (hi * &lc_rat).floor().to_integer();
        let mut a = a_lo;
        while a <= a_hi {
            let r = Rat::new(a.clone(), lc.clone());
            if sqfree.eval(&r).is_zero() {
                rational_roots.push(r);
            }
            a += 1;
        }
    }

    Ok(RootReport {
        real_root_count,
        distinct_real_roots: distinct,
        rational_roots,
        isolating_intervals: intervals,
    })
}

// ---------------------------------------------------------------------------
// Text grammar: integers, `X`, `+ - *`, `^` with a nonnegative integer
// exponent, parentheses; or a coefficient list `[c0,c1,...]`.

/// Syntax error with the byte offset where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: u32 = 4096;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(ParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> std::result::Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn expr(&mut self) -> std::result::Result<IntPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> std::result::Result<IntPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if matches!(self.peek(), Some(b'X' | b'x' | b'(')) {
                // Juxtaposition such as `2X` or `3(X+1)`.
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> std::result::Result<IntPoly, ParseError> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> std::result::Result<IntPoly, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let at = self.pos;
            let e = self.integer()?;
            match e.to_u32() {
                Some(e) if e <= MAX_EXPONENT => Ok(base.pow(e)),
                _ => Err(ParseError {
                    position: at,
                    message: format!("exponent exceeds the limit of {MAX_EXPONENT}"),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> std::result::Result<IntPoly, ParseError> {
        match self.peek() {
            Some(b'X' | b'x') => {
                self.pos += 1;
                Ok(IntPoly::x())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(IntPoly::constant(self.integer()?)),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn coefficient_list(&mut self) -> std::result::Result<IntPoly, ParseError> {
        let mut coeffs = Vec::new();
        if self.eat(b']') {
            return Ok(IntPoly::zero());
        }
        loop {
            let neg = self.eat(b'-');
            if !neg {
                self.eat(b'+');
            }
            let c = self.integer()?;
            coeffs.push(if neg { -c } else { c });
            if self.eat(b',') {
                continue;
            }
            if self.eat(b']') {
                return Ok(IntPoly::new(coeffs));
            }
            return self.err("expected ',' or ']'");
        }
    }

    fn parse(mut self) -> std::result::Result<IntPoly, ParseError> {
        let p = if self.eat(b'[') {
            self.coefficient_list()?
        } else {
            self.expr()?
        };
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(p)
    }
}

impl FromStr for IntPoly {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        Parser {
            src: s.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}
