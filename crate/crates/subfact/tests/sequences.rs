//! Sequence generators checked against independent exact formulas.

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use subfact::exactint::{factorial, reduce_big};
use subfact::polyring::IntPoly;
use subfact::sequences::*;

fn small_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-5i64..=5, 0..3).prop_map(|c| IntPoly::from_i64s(&c))
}

fn inclusion_exclusion(n: u64) -> BigInt {
    (0..=n)
        .map(|k| BigInt::from(sign_pow(k)) * factorial(n) / factorial(k))
        .sum()
}

#[test]
fn derangements_by_inclusion_exclusion() {
    let d = derangements(60);
    for n in 0..=60 {
        assert_eq!(d[n as usize], inclusion_exclusion(n), "n={n}");
    }
}

#[test]
fn every_family_agrees_with_enumeration() {
    for n in 0..=8usize {
        let (all, even, odd) = brute_force_derangements(n).unwrap();
        let t = |s: &SeqSpec| term(s, n as u64).unwrap();
        assert_eq!(t(&SeqSpec::Derangement), BigInt::from(all));
        assert_eq!(t(&SeqSpec::EvenDerangement), BigInt::from(even));
        assert_eq!(t(&SeqSpec::OddDerangement), BigInt::from(odd));
        if n >= 2 {
            let m = BigInt::from(n as u64 - 1);
            assert_eq!(t(&SeqSpec::EPlain) * &m, BigInt::from(all));
            assert_eq!(t(&SeqSpec::EEven) * &m, BigInt::from(even));
            assert_eq!(t(&SeqSpec::EOdd) * &m, BigInt::from(odd));
        }
    }
    assert!(brute_force_derangements(10).is_err());
}

#[test]
fn schenker_sums() {
    // h = 1 gives ⌊e·n!⌋ for n ≥ 1.
    let want = [1, 2, 5, 16, 65, 326, 1957];
    for (n, w) in want.iter().enumerate() {
        assert_eq!(schenker_sum(&BigInt::from(1), n as u64), BigInt::from(*w));
    }
    let h = SeqSpec::HSchenker("X".parse().unwrap());
    for n in 0..15u64 {
        let direct: BigInt = (0..=n)
            .map(|j| factorial(n) / factorial(j) * BigInt::from(n).pow(j as u32))
            .sum();
        assert_eq!(term(&h, n).unwrap(), direct);
        assert_eq!(schenker_sum_mod(n % 97, n, 97), reduce_big(&direct, 97));
    }
}

#[test]
fn associated_sequence_flips_sign() {
    let spec = SeqSpec::rclass("X^2+1".parse().unwrap(), "X-3".parse().unwrap(), (-1).into());
    let assoc = associated(&spec).unwrap();
    for n in 0..30 {
        assert_eq!(term(&assoc, n).unwrap(), term(&spec, n).unwrap() * sign_pow(n));
    }
    assert!(associated(&SeqSpec::Derangement).is_ok());
    assert!(associated(&SeqSpec::EPlain).is_err());
}

#[test]
fn nearest_integer() {
    let r = nearest_integer_check(60);
    assert!(r.nearest && r.first_failure.is_none());
}

#[test]
fn growth_bounds() {
    for n in 5..=30 {
        assert!(schenker_bounds_hold(SchenkerBoundCase::XPlus2, n).unwrap());
    }
    for n in 10..=30 {
        assert!(schenker_bounds_hold(SchenkerBoundCase::NegXSqMinus5, n).unwrap());
    }
    for b in 1..=4 {
        assert!(schenker_constant_partial_sums(b, 30));
    }
}

#[test]
fn boundedness() {
    let zero = SeqSpec::rclass(1.into(), 0.into(), 1.into());
    assert_eq!(classify_boundedness(&zero, 20).unwrap(), Boundedness::ConstantZero);
    assert_eq!(classify_boundedness(&SeqSpec::Derangement, 20).unwrap(), Boundedness::UnboundedLikely);
    assert!(classify_boundedness(&SeqSpec::EPlain, 20).is_err());
}

proptest! {
    #[test]
    fn recurrence_matches_closed_sum(f in small_poly(), h1 in small_poly(), h2 in small_poly(), n in 0u64..25) {
        let spec = SeqSpec::rclass(f, h1, h2);
        prop_assert_eq!(term(&spec, n).unwrap(), term_closed(&spec, n).unwrap());
    }

    #[test]
    fn residues_reduce_exact_terms(
        f in small_poly(), h1 in small_poly(), h2 in small_poly(), d in 1u64..200,
    ) {
        let spec = SeqSpec::rclass(f, h1, h2);
        let table = term_table(&spec, 40).unwrap();
        let res = residues(&spec, d, 40).unwrap();
        prop_assert_eq!(res.len(), 41);
        for (n, v) in table.iter() {
            prop_assert_eq!(res[n as usize], reduce_big(v, d));
        }
    }

    #[test]
    fn derived_family_residues(d in 1u64..300, which in 0usize..6) {
        let spec = [
            SeqSpec::Derangement, SeqSpec::EvenDerangement, SeqSpec::OddDerangement,
            SeqSpec::EPlain, SeqSpec::EEven, SeqSpec::EOdd,
        ][which].clone();
        let table = term_table(&spec, 60).unwrap();
        let res = residues(&spec, d, 60).unwrap();
        for (i, (_, v)) in table.iter().enumerate() {
            prop_assert_eq!(res[i], reduce_big(v, d));
        }
    }

    #[test]
    fn term_i64_agrees(n in 0u64..40) {
        let exact = term(&SeqSpec::Derangement, n).unwrap();
        match term_i64(&SeqSpec::Derangement, n).unwrap() {
            Some(v) => prop_assert_eq!(BigInt::from(v), exact),
            None => prop_assert!(exact > BigInt::from(i64::MAX) || exact < BigInt::zero()),
        }
    }
}
