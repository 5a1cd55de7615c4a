//! Exact integer foundation: p-adic valuations, Legendre's formula, CRT,
//! modular inverses and powers, totients, primality and sieving.
//!
//! Word-sized modular arithmetic goes through `u128` intermediates, so any
//! modulus below 2⁶⁴ is safe.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A p-adic valuation. `Infinity` only ever comes from the input 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// True when the valuation is at least `k`.
    pub fn at_least(self, k: u64) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::Infinity => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

/// The class `residue mod modulus`, always stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    pub residue: u64,
    pub modulus: u64,
}

impl ResidueClass {
    pub fn new(residue: i128, modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return domain("residue class modulus must be at least 1");
        }
        let r = residue.rem_euclid(modulus as i128) as u64;
        Ok(ResidueClass { residue: r, modulus })
    }

    pub fn contains(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// Smallest member that is `>= from`.
    pub fn first_at_least(&self, from: u64) -> u64 {
        let base = from - from % self.modulus + self.residue;
        if base >= from {
            base
        } else {
            base + self.modulus
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        (a % m) * (b % m) % m
    } else {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

#[inline]
pub fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce_i64(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Reduce a big integer into `[0, m)`.
pub fn reduce_big(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().expect("reduced value fits in u64")
}

/// `aᵉ mod m` for `m ≥ 1`; `e = 0` gives `1 mod m`.
pub fn powmod(a: i64, e: u64, m: u64) -> u64 {
    powmod_u64(reduce_i64(a, m), e, m)
}

pub fn powmod_u64(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    base %= m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m ≥ 2`; fails when `gcd(a, m) ≠ 1`.
pub fn inverse_mod(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return domain(format!("inverse_mod needs modulus >= 2, got {m}"));
    }
    let a = reduce_i64(a, m) as i128;
    let e = a.extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return domain(format!("{a} is not invertible modulo {m}"));
    }
    Ok(e.x.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        domain(format!("{p} is not prime"))
    }
}

/// All primes `≤ limit` by the sieve of Eratosthenes.
pub fn primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in `[lo, hi]` by a segmented sieve over base primes `≤ √hi`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_upto(hi.isqrt());
    let mut out = Vec::new();
    const SEGMENT: u64 = 1 << 18;
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(SEGMENT - 1));
        let mut composite = vec![false; (end - start + 1) as usize];
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut j = (start.div_ceil(p) * p).max(p * p);
            while j <= end {
                composite[(j - start) as usize] = true;
                j += p;
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| start + i as u64),
        );
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn euler_phi(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .map(|(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// Carmichael's λ(m): the exponent of the unit group of ℤ/mℤ.
pub fn carmichael(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .map(|(p, e)| {
            if p == 2 && e >= 3 {
                1 << (e - 2)
            } else {
                p.pow(e - 1) * (p - 1)
            }
        })
        .fold(1, |acc, l| acc.lcm(&l))
}

/// p-adic valuation of a big integer.
pub fn vp(x: &BigInt, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    Ok(vp_unchecked(x, p))
}

pub(crate) fn vp_unchecked(x: &BigInt, p: u64) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        x = q;
        v += 1;
    }
}

/// p-adic valuation of a machine integer (p assumed prime).
pub fn vp_u64(mut x: u64, p: u64) -> Valuation {
    if x == 0 {
        return Valuation::Infinity;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

pub fn vp_i64(x: i64, p: u64) -> Valuation {
    vp_u64(x.unsigned_abs(), p)
}

/// Sum of the base-`base` digits of `n`.
pub fn digit_sum(mut n: u64, base: u64) -> u64 {
    assert!(base >= 2, "digit_sum base must be at least 2");
    let mut s = 0;
    while n > 0 {
        s += n % base;
        n /= base;
    }
    s
}

/// `vₚ(n!)` by Legendre's formula `(n − sₚ(n))/(p − 1)`.
pub fn vp_factorial(n: u64, p: u64) -> u64 {
    (n - digit_sum(n, p)) / (p - 1)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Chinese remaindering for pairwise coprime moduli.
pub fn crt(classes: &[ResidueClass]) -> Result<ResidueClass> {
    let mut acc = ResidueClass {
        residue: 0,
        modulus: 1,
    };
    for c in classes {
        if acc.modulus.gcd(&c.modulus) != 1 {
            return domain(format!(
                "moduli {} and {} are not coprime",
                acc.modulus, c.modulus
            ));
        }
        let m = acc
            .modulus
            .checked_mul(c.modulus)
            .ok_or_else(|| crate::Error::Domain("CRT modulus overflows u64".into()))?;
        // acc.residue + acc.modulus·t ≡ c.residue (mod c.modulus)
        let t = if c.modulus == 1 {
            0
        } else {
            let inv = inverse_mod((acc.modulus % c.modulus) as i64, c.modulus)?;
            let diff = (c.residue as i128 - acc.residue as i128).rem_euclid(c.modulus as i128) as u64;
            mulmod(diff, inv, c.modulus)
        };
        let r = (acc.residue as u128 + acc.modulus as u128 * t as u128) % m as u128;
        acc = ResidueClass {
            residue: r as u64,
            modulus: m,
        };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(r: u64, m: u64) -> ResidueClass {
        ResidueClass {
            residue: r,
            modulus: m,
        }
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&BigInt::zero(), 7).unwrap(), Valuation::Infinity);
        assert_eq!(vp(&BigInt::from(44), 2).unwrap(), Valuation::Finite(2));
        assert_eq!(vp(&BigInt::from(46233), 3).unwrap(), Valuation::Finite(2));
        assert_eq!(vp(&BigInt::from(-12), 2).unwrap(), Valuation::Finite(2));
        assert!(vp(&BigInt::from(12), 4).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(vp_factorial(0, 5), 0);
        assert_eq!(vp_factorial(10, 2), 8);
        assert_eq!(vp_factorial(8, 3), 2);
    }

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(0, 2), 0);
        assert_eq!(digit_sum(10, 2), 2);
        assert_eq!(digit_sum(46233, 10), 18);
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt(&[class(0, 1)]).unwrap(), class(0, 1));
        assert_eq!(crt(&[class(2, 3), class(3, 5)]).unwrap(), class(8, 15));
        assert_eq!(
            crt(&[class(1, 4), class(2, 9), class(3, 25)]).unwrap(),
            class(353, 900)
        );
        assert!(crt(&[class(1, 4), class(1, 6)]).is_err());
    }

    #[test]
    fn crt_matches_exhaustive_search() {
        let cases = [(2u64, 3u64, 3u64, 5u64), (1, 4, 2, 9), (0, 7, 5, 8)];
        for (r1, m1, r2, m2) in cases {
            let expected = (0..m1 * m2).find(|x| x % m1 == r1 && x % m2 == r2).unwrap();
            assert_eq!(crt(&[class(r1, m1), class(r2, m2)]).unwrap().residue, expected);
        }
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inverse_mod(5, 9).unwrap(), 2);
        assert!(inverse_mod(3, 9).is_err());
        assert_eq!(powmod(2, 0, 7), 1);
        assert_eq!(powmod(-1, 3, 7), 6);
        assert_eq!(carmichael(8), 2);
        assert_eq!(carmichael(900), 60);
        assert_eq!(euler_phi(900), 240);
    }

    #[test]
    fn carmichael_is_max_order() {
        for m in 2..200u64 {
            let max_order = (1..m)
                .filter(|a| a.gcd(&m) == 1)
                .map(|a| (1..=m).find(|&e| powmod_u64(a, e, m) == 1).unwrap())
                .max()
                .unwrap();
            assert_eq!(carmichael(m), max_order, "m = {m}");
        }
    }

    #[test]
    fn powmod_brute_force() {
        for m in 1..=100u64 {
            for a in 0..=12i64 {
                for e in 0..=12u32 {
                    assert_eq!(powmod(a, e as u64, m), (a.pow(e) as u64) % m);
                }
            }
        }
    }

    #[test]
    fn legendre_matches_direct_factorial() {
        let primes = primes_upto(50);
        let mut running = vec![0u64; primes.len()];
        let mut f = BigInt::one();
        for n in 0..=2000u64 {
            if n > 0 {
                f *= n;
                for (i, &p) in primes.iter().enumerate() {
                    running[i] += vp_u64(n, p).finite().unwrap();
                }
            }
            for (i, &p) in primes.iter().enumerate() {
                assert_eq!(vp_factorial(n, p), running[i], "n = {n}, p = {p}");
            }
            if n <= 60 || n % 97 == 0 {
                for &p in &primes {
                    assert_eq!(
                        Valuation::Finite(vp_factorial(n, p)),
                        vp(&f, p).unwrap(),
                        "n = {n}, p = {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn sieves_agree() {
        let all = primes_upto(100_000);
        assert_eq!(all.len(), 9592);
        assert_eq!(primes_in(2, 100_000), all);
        let window: Vec<u64> = all.iter().copied().filter(|&p| (500..=70_001).contains(&p)).collect();
        assert_eq!(primes_in(500, 70_001), window);
        assert!(all.iter().all(|&p| is_prime(p)));
        assert_eq!((0..100_000).filter(|&n| is_prime(n)).count(), 9592);
    }

    #[test]
    fn residue_class_members() {
        let c = ResidueClass::new(-1, 5).unwrap();
        assert_eq!(c.residue, 4);
        assert_eq!(c.first_at_least(10), 14);
        assert_eq!(c.first_at_least(14), 14);
    }
}
