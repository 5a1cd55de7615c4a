//! When does n − b − 1 divide aₙ for a(X − b, h₁, h₂)?
//!
//! Reducing the recurrence twice modulo n − b − 1 gives
//! aₙ ≡ h₁(b)h₂(b)ⁿ⁻¹ + h₁(b+1)h₂(b+1)ⁿ, so divisibility is decided by this
//! right-hand side (RHS) alone. Divisibility by 0 means equality with 0.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Result};
use crate::exactint::{factorize, is_prime};
use crate::polyring::IntPoly;
use crate::sequences::{term_table, SeqSpec};

/// The values h₁(b), h₂(b), h₁(b+1), h₂(b+1) that fix the RHS.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftParams {
    pub b: i64,
    pub h1_b: BigInt,
    pub h2_b: BigInt,
    pub h1_next: BigInt,
    pub h2_next: BigInt,
}

impl ShiftParams {
    pub fn new(b: i64, h1: &IntPoly, h2: &IntPoly) -> Self {
        ShiftParams {
            b,
            h1_b: h1.eval_i64(b),
            h2_b: h2.eval_i64(b),
            h1_next: h1.eval_i64(b + 1),
            h2_next: h2.eval_i64(b + 1),
        }
    }

    /// The exact RHS at n ≥ 1.
    pub fn rhs(&self, n: u64) -> BigInt {
        &self.h1_b * Pow::pow(&self.h2_b, n - 1) + &self.h1_next * Pow::pow(&self.h2_next, n)
    }

    /// RHS mod m for m ≥ 1.
    pub fn rhs_mod(&self, n: u64, m: &BigInt) -> BigInt {
        let pw = |base: &BigInt, e: u64| base.mod_floor(m).modpow(&BigInt::from(e), m);
        (&self.h1_b * pw(&self.h2_b, n - 1) + &self.h1_next * pw(&self.h2_next, n)).mod_floor(m)
    }

    /// RHS = κ·βⁿ⁻¹ for all n ≥ 1, when one of the two terms vanishes or the
    /// bases coincide.
    pub fn monomial_form(&self) -> Option<(BigInt, BigInt)> {
        if (&self.h1_next * &self.h2_next).is_zero() {
            Some((self.h1_b.clone(), self.h2_b.clone()))
        } else if self.h1_b.is_zero() {
            Some((&self.h1_next * &self.h2_next, self.h2_next.clone()))
        } else if self.h2_b == self.h2_next {
            Some((&self.h1_b + &self.h1_next * &self.h2_next, self.h2_b.clone()))
        } else {
            None
        }
    }
}

fn spec_of(b: i64, h1: &IntPoly, h2: &IntPoly) -> SeqSpec {
    SeqSpec::rclass(IntPoly::linear(1, -b), h1.clone(), h2.clone())
}

fn shift(n: u64, b: i64) -> BigInt {
    BigInt::from(n) - BigInt::from(b) - 1
}

/// 0 | x ⇔ x = 0; otherwise |d| | x.
fn divides(d: &BigInt, x: &BigInt) -> bool {
    if d.is_zero() {
        x.is_zero()
    } else {
        (x % d.abs()).is_zero()
    }
}

/// Decides n − b − 1 | aₙ for a(X − b, h₁, h₂) through the RHS; when
/// n − b − 1 = 0 it decides aₙ = 0 from the exact term.
pub fn shift_divisor_test(b: i64, h1: &IntPoly, h2: &IntPoly, n: u64) -> Result<bool> {
    if n == 0 {
        return domain("the shifted divisor test needs n >= 1");
    }
    let m = shift(n, b).abs();
    if m.is_zero() {
        let t = term_table(&spec_of(b, h1, h2), n)?;
        return Ok(t.get(n).is_zero());
    }
    Ok(ShiftParams::new(b, h1, h2).rhs_mod(n, &m).is_zero())
}

/// Why a verdict holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShiftReason {
    /// The RHS is exactly 0, so every n qualifies.
    RhsZero,
    /// RHS = κ·βⁿ⁻¹ and each pᵟ ∥ |n−b−1| has δ ≤ (n−1)vₚ(β) + vₚ(κ).
    FactorPattern,
    /// |n − b − 1| = p is prime; the RHS is reduced with Fermat exponents.
    PrimeCase,
    /// Plain modular evaluation of the RHS (or of aₙ when n = b + 1).
    Direct,
}

impl fmt::Display for ShiftReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShiftReason::RhsZero => "RHS_ZERO",
            ShiftReason::FactorPattern => "FACTOR_PATTERN",
            ShiftReason::PrimeCase => "PRIME_CASE",
            ShiftReason::Direct => "DIRECT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftVerdict {
    pub n: u64,
    pub divisible: bool,
    pub reason: ShiftReason,
}

/// Per-n verdicts for a(X − b, h₁, h₂), each cross-checked on exact terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftDivReport {
    pub b: i64,
    pub verdicts: Vec<ShiftVerdict>,
}

impl ShiftDivReport {
    pub fn divisible_indices(&self) -> Vec<u64> {
        self.verdicts.iter().filter(|v| v.divisible).map(|v| v.n).collect()
    }
}

fn vp_big(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    Some(v)
}

/// Exponent test for |m| | κ·βⁿ⁻¹ prime by prime.
fn factor_pattern_holds(kappa: &BigInt, beta: &BigInt, n: u64, m: u64) -> bool {
    if kappa.is_zero() || (beta.is_zero() && n >= 2) {
        return true;
    }
    factorize(m).into_iter().all(|(p, delta)| {
        let vk = vp_big(kappa, p).expect("nonzero");
        let vb = if n == 1 { 0 } else { vp_big(beta, p).expect("nonzero") };
        (delta as u64) <= (n - 1).saturating_mul(vb).saturating_add(vk)
    })
}

/// RHS mod a prime p with exponents reduced mod p − 1 for unit bases.
fn prime_case_holds(params: &ShiftParams, n: u64, p: u64) -> bool {
    let pb = BigInt::from(p);
    let pw = |base: &BigInt, e: u64| {
        let base = base.mod_floor(&pb);
        if base.is_zero() {
            return if e == 0 { BigInt::one() } else { BigInt::zero() };
        }
        base.modpow(&BigInt::from(e % (p - 1)), &pb)
    };
    let v = &params.h1_b * pw(&params.h2_b, n - 1) + &params.h1_next * pw(&params.h2_next, n);
    v.mod_floor(&pb).is_zero()
}

/// Verdicts for n in `n_lo..=n_hi` (n_lo ≥ 1), tagged with the reason that
/// decides them and checked against exact division of aₙ.
pub fn characterize(b: i64, h1: &IntPoly, h2: &IntPoly, n_lo: u64, n_hi: u64) -> Result<ShiftDivReport> {
    if n_lo == 0 || n_lo > n_hi {
        return domain(format!("need 1 <= n_lo <= n_hi, got {n_lo}..={n_hi}"));
    }
    let params = ShiftParams::new(b, h1, h2);
    let monomial = params.monomial_form();
    let table = term_table(&spec_of(b, h1, h2), n_hi)?;
    let mut verdicts = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let d = shift(n, b);
        let m = d.abs();
        let (divisible, reason) = if m.is_zero() {
            (table.get(n).is_zero(), ShiftReason::Direct)
        } else if params.rhs(n).is_zero() {
            (true, ShiftReason::RhsZero)
        } else if let (Some((kappa, beta)), Some(mu)) = (&monomial, m.to_u64()) {
            (factor_pattern_holds(kappa, beta, n, mu), ShiftReason::FactorPattern)
        } else if let Some(p) = m.to_u64().filter(|&p| is_prime(p)) {
            (prime_case_holds(&params, n, p), ShiftReason::PrimeCase)
        } else {
            (params.rhs_mod(n, &m).is_zero(), ShiftReason::Direct)
        };
        if divisible != divides(&d, table.get(n)) {
            return invariant(format!("b={b}, n={n}: {reason} verdict {divisible} disagrees with exact division"));
        }
        verdicts.push(ShiftVerdict { n, divisible, reason });
    }
    Ok(ShiftDivReport { b, verdicts })
}

/// The four lcm-propagation statements for c = h₁(b) = h₁(b+1) ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LcmRule {
    /// h₂(b+1) = 1, equal v₂(nᵢ − 1), lcm(n₁−1, n₂−1) | n₃ − 1.
    NextPlusOne,
    /// h₂(b+1) = −1, lcm(n₁−1, n₂−1) | n₃ − 1.
    NextMinusOne,
    /// h₂(b) = 1, equal v₂(nᵢ), lcm(n₁, n₂) | n₃.
    HerePlusOne,
    /// h₂(b) = −1, lcm(n₁, n₂) | n₃.
    HereMinusOne,
}

/// Outcome of an lcm-propagation check; unmet hypotheses are not failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LcmOutcome {
    /// Hypotheses of the listed rules hold and n₃ − b − 1 | a_{n₃} exactly.
    Holds(Vec<LcmRule>),
    /// Hypotheses hold but the conclusion fails on exact terms.
    Fails(Vec<LcmRule>),
    Inapplicable(String),
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        BigInt::zero()
    } else {
        a.lcm(b)
    }
}

fn v2_eq(a: u64, b: u64, c: u64) -> bool {
    let v = |x: u64| if x == 0 { u32::MAX } else { x.trailing_zeros() };
    v(a) == v(b) && v(b) == v(c)
}

/// Checks whichever lcm-propagation rule applies to (n₁, n₂, n₃) and, if
/// its hypotheses hold, verifies n₃ − b − 1 | a_{n₃} on the exact term.
pub fn lcm_propagation_check(b: i64, h1: &IntPoly, h2: &IntPoly, n1: u64, n2: u64, n3: u64) -> Result<LcmOutcome> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return domain("lcm propagation needs n1, n2, n3 >= 1");
    }
    let params = ShiftParams::new(b, h1, h2);
    if params.h1_b != params.h1_next || params.h1_b.is_zero() {
        return Ok(LcmOutcome::Inapplicable("needs h1(b) = h1(b+1) != 0".into()));
    }
    let one = BigInt::one();
    let neg = -BigInt::one();
    let mut rules = Vec::new();
    if params.h2_next == one {
        rules.push(LcmRule::NextPlusOne);
    }
    if params.h2_next == neg {
        rules.push(LcmRule::NextMinusOne);
    }
    if params.h2_b == one {
        rules.push(LcmRule::HerePlusOne);
    }
    if params.h2_b == neg {
        rules.push(LcmRule::HereMinusOne);
    }
    if rules.is_empty() {
        return Ok(LcmOutcome::Inapplicable("needs h2(b) = ±1 or h2(b+1) = ±1".into()));
    }
    if !shift_divisor_test(b, h1, h2, n1)? || !shift_divisor_test(b, h1, h2, n2)? {
        return Ok(LcmOutcome::Inapplicable("n1 or n2 fails the divisibility hypothesis".into()));
    }
    let (s1, s2, s3) = (shift(n1, b), shift(n2, b), shift(n3, b));
    if !divides(&s3, &lcm_big(&s1, &s2)) {
        return Ok(LcmOutcome::Inapplicable("n3-b-1 does not divide lcm(n1-b-1, n2-b-1)".into()));
    }
    let big = |x: u64| BigInt::from(x);
    let minus_one = lcm_big(&big(n1 - 1), &big(n2 - 1));
    let plain = lcm_big(&big(n1), &big(n2));
    rules.retain(|r| match r {
        LcmRule::NextPlusOne => v2_eq(n1 - 1, n2 - 1, n3 - 1) && divides(&minus_one, &big(n3 - 1)),
        LcmRule::NextMinusOne => divides(&minus_one, &big(n3 - 1)),
        LcmRule::HerePlusOne => v2_eq(n1, n2, n3) && divides(&plain, &big(n3)),
        LcmRule::HereMinusOne => divides(&plain, &big(n3)),
    });
    if rules.is_empty() {
        return Ok(LcmOutcome::Inapplicable("index hypotheses unmet".into()));
    }
    let a3 = term_table(&spec_of(b, h1, h2), n3)?.get(n3).clone();
    Ok(if divides(&s3, &a3) {
        LcmOutcome::Holds(rules)
    } else {
        LcmOutcome::Fails(rules)
    })
}

/// For n₃ − 1 | lcm(n₁−1, n₂−1) and lcm(n₁, n₂) | n₃ (n ≥ 1): returns
/// whether n₁ | n₂ or n₂ | n₁, and n₃ = max(n₁, n₂) when n₁, n₂ > 1.
/// `None` when the hypotheses fail.
pub fn lcm_arithmetic_check(n1: u64, n2: u64, n3: u64) -> Option<bool> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return None;
    }
    let l1 = if n1 == 1 || n2 == 1 { 0 } else { (n1 - 1).lcm(&(n2 - 1)) };
    let hyp_a = if n3 == 1 { l1 == 0 } else { l1 % (n3 - 1) == 0 };
    let hyp_b = n3 % n1.lcm(&n2) == 0;
    if !(hyp_a && hyp_b) {
        return None;
    }
    let nested = n2 % n1 == 0 || n1 % n2 == 0;
    let max_ok = n1 == 1 || n2 == 1 || n3 == n1.max(n2);
    Some(nested && max_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        for n in 1..60 {
            assert!(shift_divisor_test(0, &p("1"), &p("-1"), n).unwrap());
        }
        assert!(!shift_divisor_test(0, &p("1"), &p("1"), 4).unwrap());
        assert!(shift_divisor_test(0, &p("1"), &p("1"), 3).unwrap());
        assert!(shift_divisor_test(0, &p("1"), &p("1"), 0).is_err());
    }

    #[test]
    fn derangements_rhs_zero() {
        let r = characterize(0, &p("1"), &p("-1"), 1, 60).unwrap();
        assert!(r.verdicts.iter().all(|v| v.divisible));
        // n = 1 has divisor 0 and is settled by D₁ = 0 itself.
        assert_eq!(r.verdicts[0].reason, ShiftReason::Direct);
        assert!(r.verdicts[1..].iter().all(|v| v.reason == ShiftReason::RhsZero));
    }

    #[test]
    fn vanishing_hypotheses_give_all_true() {
        // h₁(b) = 0 and h₁(b+1) = 0 at b = 2.
        let h1 = p("(X-2)*(X-3)");
        let r = characterize(2, &h1, &p("X+5"), 1, 40).unwrap();
        assert!(r.verdicts.iter().all(|v| v.divisible));
    }

    #[test]
    fn powers_of_two_and_three_times() {
        let r = characterize(0, &p("1"), &p("2"), 2, 40).unwrap();
        let expect: Vec<u64> = (2..=40)
            .filter(|&n| {
                let m: u64 = n - 1;
                let odd = m >> m.trailing_zeros();
                odd == 1 || odd == 3
            })
            .collect();
        assert_eq!(r.divisible_indices(), expect);
        assert!(r.divisible_indices().contains(&4));
        assert!(r.verdicts.iter().all(|v| v.reason == ShiftReason::FactorPattern));
    }

    #[test]
    fn corpus_matches_exact() {
        let specs = [
            (0, "1", "-1"),
            (0, "1", "1"),
            (0, "1", "2"),
            (1, "X", "X+1"),
            (-2, "X^2+1", "3"),
            (3, "2", "X-4"),
            (2, "X-2", "-1"),
            (5, "X+1", "X^2-2"),
        ];
        for (b, h1, h2) in specs {
            let (h1, h2) = (p(h1), p(h2));
            let r = characterize(b, &h1, &h2, 1, 200).unwrap();
            for v in &r.verdicts {
                assert_eq!(v.divisible, shift_divisor_test(b, &h1, &h2, v.n).unwrap());
                if v.reason == ShiftReason::RhsZero {
                    assert!(ShiftParams::new(b, &h1, &h2).rhs(v.n).is_zero());
                }
            }
        }
    }

    #[test]
    fn lcm_arithmetic() {
        let mut applicable = 0;
        for n1 in 1..=60 {
            for n2 in 1..=60 {
                for n3 in 1..=60 {
                    if let Some(ok) = lcm_arithmetic_check(n1, n2, n3) {
                        applicable += 1;
                        assert!(ok, "({n1},{n2},{n3})");
                    }
                }
            }
        }
        assert!(applicable > 60);
        assert_eq!(lcm_arithmetic_check(1, 1, 1), Some(true));
    }

    #[test]
    fn lcm_propagation() {
        let cases = [
            (0, "3", "X"),      // h₂(1) = 1
            (0, "2", "-X"),     // h₂(1) = −1
            (1, "5", "2-X"),    // h₂(1) = 1, h₂(2) = 0
            (2, "1", "X-1"),    // h₂(2) = 1
            (1, "-1", "-1"),    // h₂ ≡ −1
            (3, "X^2-7*X+16", "X-4"), // h₁(3) = h₁(4) = 4, h₂(3) = −1
        ];
        for (b, h1, h2) in cases {
            let (h1, h2) = (p(h1), p(h2));
            let mut held = 0;
            for n1 in 1..=24 {
                for n2 in 1..=24 {
                    for n3 in 1..=48 {
                        match lcm_propagation_check(b, &h1, &h2, n1, n2, n3).unwrap() {
                            LcmOutcome::Holds(_) => held += 1,
                            LcmOutcome::Fails(r) => panic!("b={b} ({n1},{n2},{n3}) {r:?}"),
                            LcmOutcome::Inapplicable(_) => {}
                        }
                    }
                }
            }
            assert!(held > 0, "b={b}");
        }
        let out = lcm_propagation_check(0, &p("1"), &p("2"), 2, 3, 4).unwrap();
        assert!(matches!(out, LcmOutcome::Inapplicable(_)));
    }
}
