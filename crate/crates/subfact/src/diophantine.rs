//! Complete solvers for Fₙ = q·m! and Fₙ = pᵏ where F is the derangement
//! sequence D or its even/odd parts D⁽ᵉ⁾, D⁽ᵒ⁾.
//!
//! The factorial solver rests on two facts valid for n ≥ 4:
//! n ≥ 1 + ℓ^{v_ℓ(Fₙ)} (ℓ = 2 for D and D⁽ᵒ⁾, ℓ = 3 for D⁽ᵉ⁾), and
//! Fₙ ≥ n!/12 with Fₙ increasing. Together they exclude every m past an
//! explicitly computed tail; everything below it is searched exactly.
//! Indices n ≤ 3 are solved directly for every m.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Result};
use crate::exactint::{factorial, is_prime};
use crate::hensel::sum_factorials_valuation;

/// The sequence on the left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DioFamily {
    /// Derangements Dₙ.
    D,
    /// Odd derangements Dₙ⁽ᵒ⁾.
    DOdd,
    /// Even derangements Dₙ⁽ᵉ⁾.
    DEven,
}

impl DioFamily {
    pub const ALL: [DioFamily; 3] = [DioFamily::D, DioFamily::DOdd, DioFamily::DEven];

    /// Prime ℓ with n ≥ 1 + ℓ^{v_ℓ(Fₙ)} for n ≥ 4.
    pub fn adic_prime(self) -> u64 {
        match self {
            DioFamily::D | DioFamily::DOdd => 2,
            DioFamily::DEven => 3,
        }
    }

    /// Smallest (n, m) admitted for the factorial equation.
    ///
    /// D and D⁽ᵒ⁾ use n, m ≥ 1; D⁽ᵉ⁾ uses n, m ≥ 0, so D₀⁽ᵉ⁾ = 1 = 0! = 1!
    /// contributes (0,0) and (0,1).
    pub fn factorial_domain(self) -> (u64, u64) {
        match self {
            DioFamily::D | DioFamily::DOdd => (1, 1),
            DioFamily::DEven => (0, 0),
        }
    }
}

impl fmt::Display for DioFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DioFamily::D => "D",
            DioFamily::DOdd => "D_ODD",
            DioFamily::DEven => "D_EVEN",
        })
    }
}

/// Lazily grown exact table of D, D⁽ᵒ⁾, D⁽ᵉ⁾.
#[derive(Debug, Clone)]
pub struct FamilyTerms {
    d: Vec<BigInt>,
}

impl Default for FamilyTerms {
    fn default() -> Self {
        FamilyTerms {
            d: vec![BigInt::one(), BigInt::zero()],
        }
    }
}

impl FamilyTerms {
    pub fn new() -> Self {
        Self::default()
    }

    fn derangement(&mut self, n: u64) -> &BigInt {
        while self.d.len() as u64 <= n {
            let k = self.d.len() as u64;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let next = BigInt::from(k) * &self.d[k as usize - 1] + sign;
            self.d.push(next);
        }
        &self.d[n as usize]
    }

    /// Fₙ exactly.
    pub fn get(&mut self, family: DioFamily, n: u64) -> BigInt {
        let odd = |s: &mut Self| {
            if n < 2 {
                BigInt::zero()
            } else {
                BigInt::from(n * (n - 1) / 2) * s.derangement(n - 2)
            }
        };
        match family {
            DioFamily::D => self.derangement(n).clone(),
            DioFamily::DOdd => odd(self),
            DioFamily::DEven => self.derangement(n).clone() - odd(self),
        }
    }
}

/// Fₙ exactly.
pub fn family_term(family: DioFamily, n: u64) -> BigInt {
    FamilyTerms::new().get(family, n)
}

/// Solutions of one equation with the bound that closes the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DioSolutionSet {
    pub equation: String,
    /// (n, m) for factorial equations, (n, k) for prime powers; ascending.
    pub solutions: Vec<(u64, u64)>,
    pub cutoff_used: String,
    /// The search space beyond the cutoff is excluded by a proved bound.
    pub exhaustive: bool,
}

fn is_integer(x: &BigRational) -> bool {
    x.denom().is_one()
}

fn vl(x: &BigInt, l: u64) -> i64 {
    let l = BigInt::from(l);
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % &l).is_zero() {
        x /= &l;
        v += 1;
    }
    v
}

/// Smallest m₀ ≥ 4 with ℓ^{(ℓ−1)v + m} ≥ (ℓ·m·(m+K))^{ℓ−1}; the inequality
/// then persists for all m ≥ m₀ because the left side grows by ℓ per step
/// and the right side by at most (5/4)^{2(ℓ−1)} < ℓ.
fn tail_start(l: u64, v: i64, k: u64) -> u64 {
    let mut m = 4u64;
    loop {
        let e = (l as i64 - 1) * v + m as i64;
        if e >= 0 {
            let lhs: BigInt = Pow::pow(BigInt::from(l), e as u64);
            let base = BigInt::from(l) * BigInt::from(m) * BigInt::from(m + k);
            let rhs: BigInt = Pow::pow(base, l - 1);
            if lhs >= rhs {
                return m;
            }
        }
        m += 1;
    }
}

/// All (n, m) in the family's domain with Fₙ = q·m!, for rational q > 0.
pub fn solve_q_factorial(family: DioFamily, q: &BigRational) -> Result<DioSolutionSet> {
    if !q.is_positive() {
        return domain(format!("q must be positive, got {q}"));
    }
    let l = family.adic_prime();
    let (n_min, m_min) = family.factorial_domain();
    let v = vl(q.numer(), l) - vl(q.denom(), l);
    // K! ≥ 12(q + 1) makes N ≥ m + K enough for N!/12 > q·m!.
    let bound = (q + BigRational::one()) * BigRational::from_integer(BigInt::from(12));
    let mut k = 1u64;
    while BigRational::from_integer(factorial(k)) < bound {
        k += 1;
    }
    let m_tail = tail_start(l, v, k).max(m_min);
    let mut terms = FamilyTerms::new();
    let mut sols = Vec::new();

    // n ≤ 3: Fₙ is a fixed small value, so m! = Fₙ/q pins m.
    for n in n_min..=3 {
        let f = terms.get(family, n);
        if f.is_zero() {
            continue;
        }
        let target = BigRational::from_integer(f) / q;
        let mut m = m_min;
        loop {
            let mf = BigRational::from_integer(factorial(m));
            if mf == target {
                sols.push((n, m));
            }
            if mf > target {
                break;
            }
            m += 1;
        }
    }

    // n ≥ 4 and m < m_tail: Fₙ is increasing, so scan n until it passes q·m!.
    for m in m_min..m_tail {
        let x = q * BigRational::from_integer(factorial(m));
        if !is_integer(&x) {
            continue;
        }
        let x = x.to_integer();
        let mut n = 4.max(n_min);
        loop {
            let f = terms.get(family, n);
            if f == x {
                sols.push((n, m));
            }
            if f > x {
                break;
            }
            n += 1;
        }
    }
    sols.sort_unstable();
    sols.dedup();
    for &(n, m) in &sols {
        let lhs = BigRational::from_integer(terms.get(family, n));
        if lhs != q * BigRational::from_integer(factorial(m)) {
            return invariant(format!("{family}: ({n},{m}) fails re-verification"));
        }
    }
    Ok(DioSolutionSet {
        equation: format!("{family}_n = {q}·m!"),
        solutions: sols,
        cutoff_used: format!(
            "n ≤ 3 solved directly; for n ≥ 4, m < {m_tail} searched exhaustively and \
             m ≥ {m_tail} excluded since n ≥ 1 + {l}^v_{l}(q·m!) ≥ m + {k} forces F_n ≥ n!/12 > q·m!"
        ),
        exhaustive: true,
    })
}

/// All (n, m) in the family's domain with Fₙ = m!.
pub fn solve_factorial(family: DioFamily) -> Result<DioSolutionSet> {
    solve_q_factorial(family, &BigRational::one())
}

/// All (n, m) with n ≤ n_max, m ≤ m_max in the family's domain and Fₙ = q·m!,
/// by plain enumeration.
pub fn brute_force_factorial(family: DioFamily, q: &BigRational, n_max: u64, m_max: u64) -> Vec<(u64, u64)> {
    let (n_min, m_min) = family.factorial_domain();
    let mut terms = FamilyTerms::new();
    let mut out = Vec::new();
    for n in n_min..=n_max {
        let f = BigRational::from_integer(terms.get(family, n));
        for m in m_min..=m_max {
            if f == q * BigRational::from_integer(factorial(m)) {
                out.push((n, m));
            }
        }
    }
    out
}

/// A rational q with two solutions (n₀, m₀) and (n₁, m₀ + 1) of Dₙ = q·m!.
///
/// q = D_{n₀}/m₀! is kept symbolic because m₀ is usually astronomically large.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSolutionQ {
    pub n0: u64,
    pub n1: u64,
    pub d_n0: BigInt,
    pub d_n1: BigInt,
    /// m₀ = D_{n₁}/D_{n₀} − 1.
    pub m0: BigInt,
}

impl TwoSolutionQ {
    /// q as an exact rational when m₀ ≤ `max_m0`.
    pub fn q_exact(&self, max_m0: u64) -> Option<BigRational> {
        let m0 = self.m0.to_u64().filter(|&m| m <= max_m0)?;
        Some(BigRational::new(self.d_n0.clone(), factorial(m0)))
    }

    /// D_{n₀} = q·m₀! holds by definition of q; D_{n₁} = q·(m₀+1)! reduces to
    /// D_{n₁} = D_{n₀}·(m₀+1).
    pub fn verify(&self) -> bool {
        !self.m0.is_negative()
            && family_term(DioFamily::D, self.n0) == self.d_n0
            && family_term(DioFamily::D, self.n1) == self.d_n1
            && &self.d_n0 * (&self.m0 + 1) == self.d_n1
    }
}

/// Builds q from indices n₀ ≠ n₁ ≥ 2 with D_{n₀} | D_{n₁}.
pub fn two_solution_q(n0: u64, n1: u64) -> Result<TwoSolutionQ> {
    if n0 < 2 || n1 < 2 || n0 == n1 {
        return domain(format!("need distinct indices ≥ 2, got ({n0}, {n1})"));
    }
    let d_n0 = family_term(DioFamily::D, n0);
    let d_n1 = family_term(DioFamily::D, n1);
    let (ratio, rem): (BigInt, BigInt) = d_n1.div_rem(&d_n0);
    if !rem.is_zero() {
        return domain(format!("D_{n0} = {d_n0} does not divide D_{n1} = {d_n1}"));
    }
    let m0: BigInt = ratio - 1;
    if m0.is_negative() {
        return domain(format!("D_{n1}/D_{n0} < 1"));
    }
    let out = TwoSolutionQ { n0, n1, d_n0, d_n1, m0 };
    if !out.verify() {
        return invariant(format!("two-solution construction for ({n0}, {n1}) fails"));
    }
    Ok(out)
}

fn exact_prime_power(x: &BigInt, p: u64) -> Option<u64> {
    if !x.is_positive() {
        return None;
    }
    let k = vl(x, p);
    (k >= 1 && *x == Pow::pow(BigInt::from(p), k as u64)).then_some(k as u64)
}

/// All (n, k), k ≥ 1, with Fₙ = pᵏ.
///
/// For D, n − 1 | Dₙ forces n − 1 = pˡ (or n ≤ 3), and Eₙ = Dₙ/(n−1) then
/// has vₚ(Eₙ) ≤ vₚ(Σ j!), so only finitely many l qualify. For D⁽ᵉ⁾ and
/// D⁽ᵒ⁾ the factors n−1, n−2 (resp. n, n−1) are coprime and both must be
/// powers of p up to a factor 2, which leaves n ≤ 4 (resp. n ≤ 3).
pub fn solve_prime_power(family: DioFamily, p: u64) -> Result<DioSolutionSet> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let mut terms = FamilyTerms::new();
    let (candidates, cutoff): (Vec<u64>, String) = match family {
        DioFamily::D => {
            let k0 = sum_factorials_valuation(p)?;
            let cap: BigInt = Pow::pow(BigInt::from(p), k0);
            let mut cands = vec![2, 3];
            let mut n1 = p; // n − 1 = pˡ
            loop {
                let n = n1 + 1;
                // Eₙ ≥ Dₙ₋₁ ≥ (n−1)!/3 once n − 1 ≥ 4.
                if n1 >= 4 && factorial(n1) > &cap * 3 {
                    break;
                }
                let e = terms.get(DioFamily::D, n - 2) + terms.get(DioFamily::D, n - 1);
                if e <= cap {
                    cands.push(n);
                }
                match n1.checked_mul(p) {
                    Some(x) => n1 = x,
                    None => break,
                }
            }
            (cands, format!("n − 1 = {p}^l with E_n ≤ {p}^{k0}"))
        }
        DioFamily::DEven => ((0..=4).collect(), "n ≤ 4 by coprimality of n−1 and n−2".into()),
        DioFamily::DOdd => ((0..=3).collect(), "n ≤ 3 by coprimality of n and n−1".into()),
    };
    let mut sols: Vec<(u64, u64)> = candidates
        .into_iter()
        .filter_map(|n| exact_prime_power(&terms.get(family, n), p).map(|k| (n, k)))
        .collect();
    sols.sort_unstable();
    sols.dedup();
    Ok(DioSolutionSet {
        equation: format!("{family}_n = {p}^k"),
        solutions: sols,
        cutoff_used: cutoff,
        exhaustive: true,
    })
}

/// Checks d(md+1) | D⁽ᵉ⁾_{md+2} and d(md+2) | D⁽ᵒ⁾_{md+3} for odd d, or the
/// same with md replaced by 2md for even d.
pub fn even_odd_divisibility_holds(d: u64, m: u64) -> Result<bool> {
    if d == 0 {
        return domain("d must be positive");
    }
    let s = if d % 2 == 1 { m * d } else { 2 * m * d };
    let mut terms = FamilyTerms::new();
    let e = terms.get(DioFamily::DEven, s + 2);
    let o = terms.get(DioFamily::DOdd, s + 3);
    let de = BigInt::from(d) * BigInt::from(s + 1);
    let dodd = BigInt::from(d) * BigInt::from(s + 2);
    Ok((e % de).is_zero() && (o % dodd).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn factorial_solution_sets() {
        assert_eq!(solve_factorial(DioFamily::D).unwrap().solutions, vec![(2, 1), (3, 2)]);
        assert_eq!(solve_factorial(DioFamily::DOdd).unwrap().solutions, vec![(2, 1), (4, 3)]);
        assert_eq!(
            solve_factorial(DioFamily::DEven).unwrap().solutions,
            vec![(0, 0), (0, 1), (3, 2), (5, 4)]
        );
    }

    #[test]
    fn q_factorial() {
        assert!(solve_q_factorial(DioFamily::D, &q(22, 1)).unwrap().solutions.contains(&(5, 2)));
        assert!(solve_q_factorial(DioFamily::D, &q(0, 1)).is_err());
        assert!(solve_q_factorial(DioFamily::D, &q(-3, 2)).is_err());
        for fam in DioFamily::ALL {
            for (a, b) in [(1, 1), (1, 2), (3, 1), (22, 1), (11, 3), (1, 24), (44, 1), (5, 8)] {
                let s = solve_q_factorial(fam, &q(a, b)).unwrap();
                let brute = brute_force_factorial(fam, &q(a, b), 12, 8);
                let boxed: Vec<_> = s.solutions.iter().copied().filter(|&(n, m)| n <= 12 && m <= 8).collect();
                assert_eq!(boxed, brute, "{fam} q={a}/{b}");
            }
        }
    }

    #[test]
    fn lemmas_behind_cutoff() {
        let mut t = FamilyTerms::new();
        for fam in DioFamily::ALL {
            let l = fam.adic_prime();
            for n in 4..400u64 {
                let f = t.get(fam, n);
                assert!(n > l.pow(vl(&f, l) as u32), "{fam} n={n}");
                assert!(f > t.get(fam, n - 1));
                if n >= 5 {
                    assert!(f * 12 >= factorial(n));
                }
            }
        }
    }

    #[test]
    fn two_solutions() {
        let t = two_solution_q(5, 49).unwrap();
        assert_eq!(t.d_n0, BigInt::from(44));
        assert!(t.verify());
        let t = two_solution_q(2, 3).unwrap();
        assert_eq!(t.m0, BigInt::from(1));
        assert_eq!(t.q_exact(10), Some(q(1, 1)));
        assert!(two_solution_q(3, 4).is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(solve_prime_power(DioFamily::D, 3).unwrap().solutions, vec![(4, 2)]);
        assert!(solve_prime_power(DioFamily::D, 11).unwrap().solutions.is_empty());
        assert_eq!(solve_prime_power(DioFamily::D, 2).unwrap().solutions, vec![(3, 1)]);
        assert_eq!(solve_prime_power(DioFamily::DEven, 2).unwrap().solutions, vec![(3, 1)]);
        assert_eq!(solve_prime_power(DioFamily::DEven, 3).unwrap().solutions, vec![(4, 1)]);
        for p in crate::exactint::primes_upto(50) {
            assert!(solve_prime_power(DioFamily::DOdd, p).unwrap().solutions.is_empty());
        }
        assert!(solve_prime_power(DioFamily::D, 9).is_err());
    }

    #[test]
    fn prime_powers_match_search() {
        let mut t = FamilyTerms::new();
        for fam in DioFamily::ALL {
            for p in crate::exactint::primes_upto(60) {
                let brute: Vec<(u64, u64)> = (0..60)
                    .filter_map(|n| exact_prime_power(&t.get(fam, n), p).map(|k| (n, k)))
                    .collect();
                assert_eq!(solve_prime_power(fam, p).unwrap().solutions, brute, "{fam} p={p}");
            }
        }
    }

    #[test]
    fn even_odd_divisibility() {
        for d in 1..=12 {
            for m in 0..=20 {
                assert!(even_odd_divisibility_holds(d, m).unwrap(), "d={d} m={m}");
            }
        }
    }
}
