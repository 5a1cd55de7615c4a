//! Period prediction for residue sequences (aₙ mod d) and exact
//! basic-period detection on the guaranteed periodic tail.
//!
//! Predictions are proven periods; detection only ever tests divisors of a
//! prediction, so a reported basic period is always exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{domain, Result};
use crate::exactint::{factorize, vp_factorial};
use crate::polyring::IntPoly;
use crate::sequences::{mod_stream, SeqSpec};

/// Largest predicted period that `basic_period` will verify (the window is 2P).
pub const MAX_VERIFIED_PERIOD: u64 = 20_000_000;

/// Which argument produced a period for one modulus component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodRule {
    /// h₂ = ±1 and d | f(n₀): period d (or lcm(d, 2) for h₂ = −1).
    WholeModulus,
    /// h₂ = ±1 and p | f(r): period pᵏ (2pᵏ for odd p when h₂ = −1).
    UnitSignRoot,
    /// p | f(r), general h₂: period pᵏ(p−1), tail (p+1)k − 1.
    Root,
    /// p ∤ f(n) for all n: period p²ᵏ(p−1), tail k − 1.
    NoRoot,
    /// h-Schenker sums: period pᵏ(p−1) once pᵏ | n!.
    SchenkerFactorial,
}

/// One factor of the combined prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RulePart {
    pub modulus: u64,
    pub rule: PeriodRule,
    pub period: u64,
    pub tail: u64,
}

/// A proven eventual period: (aₙ mod d) is P-periodic for n ≥ tail_start.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub modulus: u64,
    pub tail_start: u64,
    pub period: u64,
    pub parts: Vec<RulePart>,
    /// Set for derived families, e.g. "derangements mod 24".
    pub via: Option<String>,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| format!("{}:{:?}(P={},n0={})", p.modulus, p.rule, p.period, p.tail))
            .collect();
        write!(f, "lcm[{}]", parts.join(", "))?;
        if let Some(v) = &self.via {
            write!(f, " via {v}")?;
        }
        Ok(())
    }
}

/// Outcome of verifying a prediction and extracting the basic period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodReport {
    pub modulus: u64,
    pub tail_start: u64,
    pub predicted_period: u64,
    pub provenance: String,
    pub basic_period: Option<u64>,
    pub verified_window: u64,
    /// First n in the window with aₙ ≢ aₙ₊ₚ, when verification failed.
    pub counterexample: Option<u64>,
}

fn checked_lcm(a: u64, b: u64) -> Result<u64> {
    let l = (a as u128 / a.gcd(&b) as u128) * b as u128;
    match u64::try_from(l) {
        Ok(v) => Ok(v),
        Err(_) => domain(format!("period lcm({a}, {b}) overflows 64 bits")),
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    match p.checked_pow(e) {
        Some(v) => Ok(v),
        None => domain(format!("{p}^{e} overflows 64 bits")),
    }
}

fn checked_mul(a: u64, b: u64) -> Result<u64> {
    match a.checked_mul(b) {
        Some(v) => Ok(v),
        None => domain(format!("period {a}*{b} overflows 64 bits")),
    }
}

/// Smallest n in 0..m with m | poly(n), if any.
fn first_root_mod(poly: &IntPoly, m: u64) -> Option<u64> {
    let r = poly.reduce(m);
    (0..m).find(|&n| r.eval(n) == 0)
}

fn unit_sign(h2: &IntPoly) -> Option<i64> {
    let c = h2.as_constant()?;
    if c.is_one() {
        Some(1)
    } else if c == -BigInt::one() {
        Some(-1)
    } else {
        None
    }
}

fn combine(modulus: u64, parts: Vec<RulePart>, via: Option<String>) -> Result<Prediction> {
    let mut period = 1;
    let mut tail = 0;
    for p in &parts {
        period = checked_lcm(period, p.period)?;
        tail = tail.max(p.tail);
    }
    Ok(Prediction {
        modulus,
        tail_start: tail,
        period,
        parts,
        via,
    })
}

fn predict_rclass(f: &IntPoly, h2: &IntPoly, d: u64) -> Result<Prediction> {
    let sign = unit_sign(h2);
    if let Some(s) = sign {
        if let Some(n0) = first_root_mod(f, d) {
            let period = if s == 1 { d } else { checked_lcm(d, 2)? };
            let part = RulePart {
                modulus: d,
                rule: PeriodRule::WholeModulus,
                period,
                tail: n0,
            };
            return combine(d, vec![part], None);
        }
    }
    let mut parts = Vec::new();
    for (p, k) in factorize(d) {
        let pk = checked_pow(p, k)?;
        let kk = k as u64;
        let part = match (first_root_mod(f, p), sign) {
            (Some(r), Some(s)) => RulePart {
                modulus: pk,
                rule: PeriodRule::UnitSignRoot,
                period: if s == -1 && p != 2 { checked_mul(pk, 2)? } else { pk },
                tail: r + (kk - 1) * p,
            },
            (Some(_), None) => RulePart {
                modulus: pk,
                rule: PeriodRule::Root,
                period: checked_mul(pk, p - 1)?,
                tail: (p + 1) * kk - 1,
            },
            (None, _) => {
                let p_divides_h2 = first_root_mod(h2, p).is_some();
                RulePart {
                    modulus: pk,
                    rule: PeriodRule::NoRoot,
                    period: checked_mul(checked_pow(p, 2 * k)?, p - 1)?,
                    tail: if p_divides_h2 { kk - 1 } else { 0 },
                }
            }
        };
        parts.push(part);
    }
    combine(d, parts, None)
}

/// Least n with m | n!.
fn factorial_threshold(p: u64, k: u64) -> u64 {
    let mut n = 0;
    while vp_factorial(n, p) < k {
        n += 1;
    }
    n
}

fn predict_schenker(h: &IntPoly, d: u64) -> Result<Prediction> {
    let mut parts = Vec::new();
    for (p, k) in factorize(d) {
        let pk = checked_pow(p, k)?;
        let mu = factorial_threshold(p, k as u64);
        // Mod pᵏ only the μ falling-factorial terms i < μ survive, and
        // h(n)^(n−i) with p | h(n) vanishes only once n − i ≥ k; push the
        // tail past any such n below μ + k − 1.
        let hp = h.reduce(p);
        let mut tail = mu;
        for n in mu..mu + k as u64 - 1 {
            if hp.eval(n) == 0 {
                tail = n + 1;
            }
        }
        parts.push(RulePart {
            modulus: pk,
            rule: PeriodRule::SchenkerFactorial,
            period: checked_mul(pk, p - 1)?,
            tail,
        });
    }
    combine(d, parts, None)
}

/// Proven eventual period of (aₙ mod d) with its tail start.
pub fn predict_period(spec: &SeqSpec, d: u64) -> Result<Prediction> {
    if d < 2 {
        return domain(format!("period modulus must be at least 2, got {d}"));
    }
    match spec {
        SeqSpec::RClass { f, h2, .. } => predict_rclass(f, h2, d),
        SeqSpec::Derangement => predict_rclass(&IntPoly::x(), &IntPoly::constant(-1), d),
        SeqSpec::HSchenker(h) => predict_schenker(h, d),
        SeqSpec::EPlain => {
            // Eₙ = Dₙ₋₂ + Dₙ₋₁ inherits the derangement period two steps later.
            let base = predict_period(&SeqSpec::Derangement, d)?;
            Ok(Prediction {
                tail_start: base.tail_start + 2,
                via: Some(format!("derangements mod {d}")),
                ..base
            })
        }
        SeqSpec::EvenDerangement | SeqSpec::OddDerangement => {
            // 2Dₙ⁽ᵒ⁾ = Dₙ + (−1)ⁿ(n−1), so D mod 2d and n mod 2d determine it.
            let d2 = checked_mul(d, 2)?;
            let base = predict_period(&SeqSpec::Derangement, d2)?;
            Ok(Prediction {
                modulus: d,
                period: checked_lcm(base.period, d2)?,
                via: Some(format!("derangements mod {d2}")),
                ..base
            })
        }
        SeqSpec::EEven | SeqSpec::EOdd => {
            // 2Eₙ⁽ᵉ⁾ = Eₙ − (−1)ⁿ, so E mod 2d and the parity of n determine it.
            let d2 = checked_mul(d, 2)?;
            let base = predict_period(&SeqSpec::EPlain, d2)?;
            Ok(Prediction {
                modulus: d,
                period: checked_lcm(base.period, 2)?,
                via: Some(format!("E mod {d2}")),
                ..base
            })
        }
    }
}

/// Residues for indices `from..from+len` (from clamped to the first index).
fn residue_window(spec: &SeqSpec, d: u64, from: u64, len: u64) -> Result<Vec<u64>> {
    let mut s = mod_stream(spec, d)?;
    s.skip_to(from);
    Ok(s.take(len as usize).map(|(_, r)| r).collect())
}

/// Verifies `period` on [n₀, n₀ + 2P) and reduces it to the basic period by
/// testing its divisors.
pub fn basic_period(spec: &SeqSpec, d: u64, n0: u64, period: u64) -> Result<PeriodReport> {
    if d < 2 {
        return domain(format!("period modulus must be at least 2, got {d}"));
    }
    if period == 0 {
        return domain("period must be positive");
    }
    if period > MAX_VERIFIED_PERIOD {
        return domain(format!(
            "predicted period {period} exceeds the verification cap {MAX_VERIFIED_PERIOD}"
        ));
    }
    let n0 = n0.max(spec.first_index());
    let window = 2 * period;
    let r = residue_window(spec, d, n0, window)?;
    let p = period as usize;
    let mut report = PeriodReport {
        modulus: d,
        tail_start: n0,
        predicted_period: period,
        provenance: String::new(),
        basic_period: None,
        verified_window: window,
        counterexample: None,
    };
    if let Some(i) = (0..p).find(|&i| r[i] != r[i + p]) {
        report.counterexample = Some(n0 + i as u64);
        return Ok(report);
    }
    // r is P-periodic, so a divisor D is a period iff r[i] = r[i+D] on one block.
    let is_period = |q: usize| (0..p).all(|i| r[i] == r[i + q]);
    let mut basic = period;
    for (q, k) in factorize(period) {
        for _ in 0..k {
            if is_period((basic / q) as usize) {
                basic /= q;
            } else {
                break;
            }
        }
    }
    report.basic_period = Some(basic);
    Ok(report)
}

/// Prediction followed by verification and basic-period extraction.
pub fn period_report(spec: &SeqSpec, d: u64) -> Result<PeriodReport> {
    let pred = predict_period(spec, d)?;
    let mut rep = basic_period(spec, d, pred.tail_start, pred.period)?;
    rep.provenance = pred.to_string();
    Ok(rep)
}

/// The larger fallback period p³ᵏ⁻¹(p−1) for the no-root case.
pub fn no_root_fallback_period(p: u64, k: u32) -> Result<u64> {
    checked_mul(checked_pow(p, 3 * k - 1)?, p - 1)
}

/// Result of testing the divisibility of the basic period by d/gcd(d, b₁).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodFactorOutcome {
    Holds { basic_period: u64, required_factor: u64 },
    Fails { basic_period: u64, required_factor: u64 },
    Inapplicable(String),
}

/// For aₙ = (b₁n + b₀)aₙ₋₁ + c with d | b₁n₀ + b₀ for some n₀ and some
/// later term coprime to d, checks that d/gcd(d, b₁) divides the basic
/// period of (aₙ mod d).
pub fn period_factor_check(b1: i64, b0: i64, c: i64, d: u64) -> Result<PeriodFactorOutcome> {
    if d < 2 {
        return domain(format!("modulus must be at least 2, got {d}"));
    }
    let f = IntPoly::linear(b1, b0);
    let Some(n0) = first_root_mod(&f, d) else {
        return Ok(PeriodFactorOutcome::Inapplicable(format!(
            "{d} divides no value of {f}"
        )));
    };
    let spec = SeqSpec::rclass(f, c.into(), 1.into());
    let pred = predict_period(&spec, d)?;
    let rep = basic_period(&spec, d, pred.tail_start, pred.period)?;
    let Some(basic) = rep.basic_period else {
        return domain(format!("predicted period failed at n = {:?}", rep.counterexample));
    };
    let horizon = pred.tail_start.max(n0) + pred.period;
    let coprime = mod_stream(&spec, d)?
        .take_while(|&(n, _)| n <= horizon)
        .any(|(n, r)| n >= n0 && r.gcd(&d) == 1);
    if !coprime {
        return Ok(PeriodFactorOutcome::Inapplicable(format!(
            "no term from n = {n0} on is coprime to {d}"
        )));
    }
    let required = d / d.gcd(&b1.unsigned_abs());
    Ok(if basic % required == 0 {
        PeriodFactorOutcome::Holds { basic_period: basic, required_factor: required }
    } else {
        PeriodFactorOutcome::Fails { basic_period: basic, required_factor: required }
    })
}

/// Checks aₙ ≡ aₙ₊ₚ (mod d) on exact big-integer terms for n₀ ≤ n < n₀ + count.
pub fn exact_period_holds(spec: &SeqSpec, d: u64, n0: u64, period: u64, count: u64) -> Result<bool> {
    let n0 = n0.max(spec.first_index());
    let t = crate::sequences::term_table(spec, n0 + period + count)?;
    let m = BigInt::from(d);
    Ok((n0..n0 + count).all(|n| t.get(n).mod_floor(&m) == t.get(n + period).mod_floor(&m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc(f: &str, h1: &str, h2: &str) -> SeqSpec {
        SeqSpec::rclass(f.parse().unwrap(), h1.parse().unwrap(), h2.parse().unwrap())
    }

    fn basic(spec: &SeqSpec, d: u64) -> u64 {
        period_report(spec, d).unwrap().basic_period.unwrap()
    }

    #[test]
    fn prediction_examples() {
        let p = predict_period(&SeqSpec::Derangement, 12).unwrap();
        assert_eq!((p.period, p.tail_start), (12, 0));
        let p = predict_period(&rc("X^2-2", "1", "2"), 5).unwrap();
        assert_eq!((p.period, p.tail_start), (100, 0));
        let p = predict_period(&SeqSpec::HSchenker("X+1".parse().unwrap()), 25).unwrap();
        assert_eq!((p.period, p.tail_start), (100, 10));
        assert!(predict_period(&SeqSpec::Derangement, 1).is_err());
    }

    #[test]
    fn worked_basic_periods() {
        assert_eq!(basic(&rc("X^2-2", "1", "2"), 5), 100);
        assert_eq!(basic(&rc("11*X^4+7", "1", "7"), 25), 500);
        // Exact residues are 1,1,0,2,2,0 repeating: the basic period is 6,
        // not 18. Mod 9 it is 18.
        assert_eq!(basic(&rc("X^2+1", "1", "-1"), 3), 6);
        assert_eq!(basic(&rc("X^2+1", "1", "-1"), 9), 18);
        assert_eq!(basic(&rc("X^2+1", "1", "1"), 3), 9);
        assert_eq!(basic(&rc("X", "1", "2"), 225), 900);
        let rep = period_report(&SeqSpec::HSchenker("X+1".parse().unwrap()), 25).unwrap();
        assert_eq!((rep.tail_start, rep.basic_period), (10, Some(100)));
        assert_eq!(basic(&SeqSpec::Derangement, 3), 6);
        for d in 2..=30 {
            let want = if d % 2 == 0 { d } else { 2 * d };
            assert_eq!(basic(&SeqSpec::Derangement, d), want, "d = {d}");
        }
    }

    #[test]
    fn wrong_period_is_reported_not_trusted() {
        let rep = basic_period(&SeqSpec::Derangement, 5, 0, 5).unwrap();
        assert_eq!(rep.basic_period, None);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn no_root_tail_matters() {
        // p = 3 divides h₂ = 3 and never f = X² − 2: the tail starts at k − 1 = 1.
        let spec = rc("X^2-2", "1", "3");
        let pred = predict_period(&spec, 9).unwrap();
        assert_eq!(pred.tail_start, 1);
        let rep = basic_period(&spec, 9, 1, pred.period).unwrap();
        let b = rep.basic_period.unwrap();
        assert!(basic_period(&spec, 9, 1, b).unwrap().basic_period.is_some());
        assert!(!exact_period_holds(&spec, 9, 0, b, 1).unwrap());
        assert!(exact_period_holds(&spec, 9, 1, b, 2 * b).unwrap());
        // The fallback p³ᵏ⁻¹(p−1) is a multiple of the basic period.
        assert_eq!(no_root_fallback_period(3, 2).unwrap() % b, 0);
    }

    fn corpus() -> Vec<SeqSpec> {
        vec![
            SeqSpec::Derangement,
            SeqSpec::EvenDerangement,
            SeqSpec::OddDerangement,
            SeqSpec::EPlain,
            SeqSpec::EEven,
            SeqSpec::EOdd,
            SeqSpec::HSchenker("X".parse().unwrap()),
            SeqSpec::HSchenker("X+1".parse().unwrap()),
            SeqSpec::HSchenker("3*X-6".parse().unwrap()),
            rc("X^2-2", "1", "2"),
            rc("X^2+1", "1", "-1"),
            rc("X", "1", "2"),
            rc("2*X+1", "X-1", "1"),
            rc("X^2-2", "1", "3"),
            rc("X-3", "28-7*X", "1"),
            rc("X^2+X+1", "2", "X"),
        ]
    }

    #[test]
    fn predictions_hold_on_corpus() {
        for spec in corpus() {
            for d in 2..=50u64 {
                let pred = predict_period(&spec, d).unwrap();
                if pred.period > 200_000 {
                    continue;
                }
                let rep = basic_period(&spec, d, pred.tail_start, pred.period).unwrap();
                assert_eq!(rep.counterexample, None, "{spec} mod {d}: {pred}");
                let b = rep.basic_period.unwrap();
                assert_eq!(pred.period % b, 0);
                // No proper divisor of the basic period is a period.
                for (q, _) in factorize(b) {
                    let r = basic_period(&spec, d, pred.tail_start, b / q).unwrap();
                    assert!(r.counterexample.is_some(), "{spec} mod {d}: {b}/{q}");
                }
            }
        }
    }

    #[test]
    fn predictions_agree_with_exact_terms() {
        for spec in corpus() {
            for d in [4u64, 6, 9, 10] {
                let pred = predict_period(&spec, d).unwrap();
                if pred.period <= 1000 {
                    assert!(exact_period_holds(&spec, d, pred.tail_start, pred.period, pred.period).unwrap());
                }
            }
        }
    }

    #[test]
    fn period_factor_examples() {
        assert_eq!(
            period_factor_check(1, 0, 1, 7).unwrap(),
            PeriodFactorOutcome::Holds { basic_period: 7, required_factor: 7 }
        );
        assert!(matches!(period_factor_check(1, 0, 6, 6).unwrap(), PeriodFactorOutcome::Inapplicable(_)));
        assert!(matches!(period_factor_check(2, 1, 1, 5).unwrap(), PeriodFactorOutcome::Holds { .. }));
        assert!(matches!(period_factor_check(2, 0, 1, 2).unwrap(), PeriodFactorOutcome::Holds { .. }));
        for d in 2..=30 {
            for b1 in 1..=4 {
                for b0 in 0..=3 {
                    assert!(!matches!(period_factor_check(b1, b0, 1, d).unwrap(), PeriodFactorOutcome::Fails { .. }));
                }
            }
        }
    }
}
