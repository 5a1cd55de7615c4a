use super::store::{scan_with_store, ScanStore};
use super::*;
use crate::exactint::vp;
use crate::sequences::term;
use num_bigint::BigInt;

fn e_exact(n: u64) -> BigInt {
    term(&SeqSpec::EPlain, n).unwrap()
}

#[test]
fn small_scan_class_a() {
    let (recs, summary) = scan_range(2, 30, 2).unwrap();
    let a: Vec<u64> = recs.iter().filter(|r| r.ab_class == AbClass::A).map(|r| r.prime).collect();
    assert_eq!(a, vec![2, 5, 7, 17, 19, 23, 29]);
    assert_eq!(summary.count_a + summary.count_b, 10);
}

#[test]
fn prime_three() {
    let r = classify_prime(3).unwrap();
    assert_eq!(r.ab_class, AbClass::B);
    assert_eq!(r.zero_residues, vec![1]);
    assert!(!r.degenerate);
}

#[test]
fn degenerate_2633() {
    let r = classify_prime(2633).unwrap();
    assert_eq!(r.ab_class, AbClass::B);
    assert!(r.zero_residues.contains(&1578));
    assert!(r.degenerate && r.valuation_capped);
    let d = degenerate_detail(2633, Some(1578)).unwrap();
    assert_eq!(d.get(1578).unwrap().1, ResidueConsequence::ValuationCapped);
    assert!(d.residues.iter().filter(|(_, c)| *c != ResidueConsequence::UniqueLift).count() == 1);
}

#[test]
fn degenerate_details_large() {
    let d = degenerate_detail(429943, None).unwrap();
    assert_eq!(d.residue_list(), vec![172017, 223393, 317291]);
    assert_eq!(d.get(172017).unwrap().1, ResidueConsequence::UniqueLift);
    assert_eq!(d.get(223393).unwrap().1, ResidueConsequence::UniqueLift);
    assert_ne!(d.get(317291).unwrap().1, ResidueConsequence::UniqueLift);
    let d = degenerate_detail(480143, Some(121716)).unwrap();
    assert_eq!(d.residue_list(), vec![121716, 265745]);
    assert_eq!(d.get(265745).unwrap().1, ResidueConsequence::UniqueLift);
    assert_ne!(d.get(121716).unwrap().1, ResidueConsequence::UniqueLift);
    assert!(degenerate_detail(5, None).is_err());
    assert!(degenerate_detail(3, Some(2)).is_err());
}

#[test]
fn output_independent_of_jobs() {
    let base = scan_range(2, 3000, 1).unwrap();
    for jobs in [2, 8] {
        assert_eq!(scan_range(2, 3000, jobs).unwrap().0, base.0);
    }
}

#[test]
fn class_a_valuations_track_n_minus_one() {
    for r in scan_range(2, 500, 4).unwrap().0 {
        if r.ab_class != AbClass::A {
            continue;
        }
        let p = r.prime;
        let mut d = term(&SeqSpec::Derangement, 1).unwrap();
        for n in 2..=2 * p + 2 {
            d = BigInt::from(n) * d + if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(
                vp(&d, p).unwrap(),
                vp(&BigInt::from(n - 1), p).unwrap(),
                "p={p} n={n}"
            );
        }
    }
}

#[test]
fn zero_residues_are_zeros() {
    for r in scan_range(2, 100, 2).unwrap().0 {
        let p = r.prime;
        for &z in &r.zero_residues {
            let z0 = index_for_residue(z, p);
            for n in [z0, z0 + p, z0 + 2 * p] {
                assert_eq!(reduce_big(&e_exact(n), p), 0, "p={p} n={n}");
            }
        }
        let non: Vec<u64> = (2..p + 2).filter(|n| !r.zero_residues.contains(&(n % p))).take(2).collect();
        for n in non {
            assert_ne!(reduce_big(&e_exact(n), p), 0, "p={p} n={n}");
        }
    }
}

#[test]
fn q_hat_matches_exact() {
    for p in [3u64, 11, 13, 37, 41] {
        for z in zero_residues(p) {
            let n = z.index;
            let sign = |k: u64| if k % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
            let diff = sign(n + p) * e_exact(n + p) - sign(n) * e_exact(n);
            let q = diff / BigInt::from(p);
            let q = reduce_big(&q, p);
            assert!(q == z.q_hat % p || q == (p - z.q_hat % p) % p, "p={p}");
        }
    }
}

#[test]
fn schenker_primes() {
    let x = IntPoly::x();
    assert_eq!(is_h_schenker_prime(&x, 5).unwrap(), Some(SchenkerWitness { n: 2 }));
    assert_eq!(is_h_schenker_prime(&x, 3).unwrap(), None);
    assert_eq!(is_h_schenker_prime(&IntPoly::constant(-1), 2).unwrap(), Some(SchenkerWitness { n: 1 }));
    assert!(is_h_schenker_prime(&x, 4).is_err());
}

#[test]
fn kurepa() {
    assert_eq!(kurepa_scan(20, 2).unwrap(), vec![3, 11]);
    assert_eq!(kurepa_scan(2, 1).unwrap(), Vec::<u64>::new());
    assert_eq!(classify_prime(11).unwrap().kurepa_valuation, 1);
    assert_eq!(classify_prime(13).unwrap().kurepa_valuation, 0);
}

#[test]
fn divisor_scans() {
    let rc = |f: i64, a: i64, b: i64| SeqSpec::rclass(IntPoly::constant(f), IntPoly::constant(a), IntPoly::constant(b));
    assert_eq!(divisor_scan(&rc(1, 1, 1), 20, 30).unwrap(), primes_upto(20));
    assert_eq!(divisor_scan(&rc(2, 3, 2), 13, 20).unwrap(), vec![2, 3, 5, 7, 11, 13]);
    assert_eq!(divisor_scan(&rc(2, 3, 0), 13, 20).unwrap(), vec![2, 3]);
}

#[test]
fn store_resume() {
    let dir = tempfile::tempdir().unwrap();
    let store = ScanStore::open(dir.path()).unwrap();
    let first = scan_with_store(&store, 2, 500, 2, 100).unwrap();
    assert_eq!(first.reused, 0);
    let again = scan_with_store(&store, 100, 800, 3, 100).unwrap();
    assert_eq!(again.records, scan_range(100, 800, 1).unwrap().0);
    assert_eq!(again.computed, primes_in(501, 800).len());
    assert!(store.missing_ranges(2, 800).unwrap().is_empty());
    assert_eq!(store.missing_ranges(2, 900).unwrap(), vec![(801, 900)]);
}

