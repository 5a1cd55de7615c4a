//! Per-prime classification of the divisors of Eₙ = Dₙ/(n−1), h-Schenker
//! primes, Kurepa-style factorial sums and divisor scans, run in parallel
//! over primes with deterministic, prime-ordered output.
//!
//! A prime p is in class A when it divides no Eₙ; because ((−1)ⁿEₙ mod p)
//! has period p it suffices to test 2 ≤ n ≤ p + 1. Otherwise it is in class
//! B, and each zero residue n₁ is tested for the degenerate case
//! p | q̂ₚ(n₁), which caps the valuation when additionally p² ∤ Eₙ₁.

pub mod store;

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invariant, Result};
use crate::exactint::{addmod, is_prime, mulmod, primes_in, primes_upto, reduce_big, vp_u64};
use crate::polyring::IntPoly;
use crate::sequences::{mod_stream, schenker_sum_mod, term_table, SeqSpec};

/// Membership of a prime in A (divides no Eₙ) or B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AbClass {
    A,
    B,
}

impl fmt::Display for AbClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbClass::A => "A",
            AbClass::B => "B",
        })
    }
}

/// Classification of one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub prime: u64,
    pub ab_class: AbClass,
    /// Residues n mod p (ascending) with p | Eₙ.
    pub zero_residues: Vec<u64>,
    /// Some zero residue has p | q̂ₚ(n₁).
    pub degenerate: bool,
    /// Some degenerate residue also has p² ∤ Eₙ₁, so vₚ(Eₙ) = 1 on its class.
    pub valuation_capped: bool,
    /// vₚ(Σ_{j=1}^{p−1} j!).
    pub kurepa_valuation: u64,
}

impl PrimeRecord {
    /// Checks the record's structural invariants.
    pub fn check(&self) -> Result<()> {
        if (self.ab_class == AbClass::A) != self.zero_residues.is_empty() {
            return invariant(format!("prime {}: class does not match zero residues", self.prime));
        }
        if self.degenerate && self.ab_class != AbClass::B {
            return invariant(format!("prime {}: degenerate but in class A", self.prime));
        }
        if self.valuation_capped && !self.degenerate {
            return invariant(format!("prime {}: capped but not degenerate", self.prime));
        }
        Ok(())
    }
}

/// Index in 2..=p+1 representing residue r mod p.
#[cfg(test)]
fn index_for_residue(r: u64, p: u64) -> u64 {
    if r >= 2 {
        r
    } else {
        r + p
    }
}

/// Eₙ mod p² for 2 ≤ n ≤ 2p + 1, via Eₙ = Dₙ₋₂ + Dₙ₋₁ (index i ↦ E_{i+2}).
fn e_table_mod_p2(p: u64) -> Vec<u64> {
    let m = p * p;
    let mut out = Vec::with_capacity(2 * p as usize);
    let (mut d2, mut d1) = (1 % m, 0u64); // D₀, D₁
    for n in 2..=2 * p + 1 {
        out.push(addmod(d2, d1, m));
        let sign = if n % 2 == 0 { 1 } else { m - 1 };
        let dn = addmod(mulmod(n % m, d1, m), sign, m);
        d2 = d1;
        d1 = dn;
    }
    out
}

/// Per-residue data behind a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroResidue {
    pub residue: u64,
    /// Representative index in 2..=p+1.
    pub index: u64,
    /// q̂ₚ(index) mod p (up to sign).
    pub q_hat: u64,
    /// p² | E_index.
    pub square_divides: bool,
}

fn zero_residues(p: u64) -> Vec<ZeroResidue> {
    let m = p * p;
    let e = e_table_mod_p2(p);
    let at = |n: u64| e[(n - 2) as usize];
    let mut out: Vec<ZeroResidue> = (2..=p + 1)
        .filter(|&n| at(n) % p == 0)
        .map(|n| {
            // q̂ = (E_{n+p} + Eₙ)/p for odd p; for p = 2 the signs of
            // (−1)ⁿEₙ make it (E_{n+2} − Eₙ)/2.
            let s = if p == 2 { (at(n + p) + m - at(n)) % m } else { (at(n + p) + at(n)) % m };
            ZeroResidue {
                residue: n % p,
                index: n,
                q_hat: s / p,
                square_divides: at(n) == 0,
            }
        })
        .collect();
    out.sort_by_key(|z| z.residue);
    out
}

fn kurepa_valuation(p: u64) -> u64 {
    let mut k = 2u32;
    loop {
        let m = match p.checked_pow(k) {
            Some(m) if m < 1 << 62 => m,
            _ => return k as u64 - 1,
        };
        let mut fact = 1 % m;
        let mut sum = 0;
        for j in 1..p {
            fact = mulmod(fact, j, m);
            sum = addmod(sum, fact, m);
        }
        if sum != 0 {
            return vp_u64(sum, p).finite().expect("nonzero");
        }
        k += 1;
    }
}

/// Classifies a prime: class, zero residues of Eₙ, degeneracy, Kurepa valuation.
pub fn classify_prime(p: u64) -> Result<PrimeRecord> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if p > 3_037_000_499 {
        return domain(format!("{p} is too large: p² must fit in 64 bits"));
    }
    let zeros = zero_residues(p);
    let degenerate = zeros.iter().any(|z| z.q_hat % p == 0);
    let capped = zeros.iter().any(|z| z.q_hat % p == 0 && !z.square_divides);
    let rec = PrimeRecord {
        prime: p,
        ab_class: if zeros.is_empty() { AbClass::A } else { AbClass::B },
        zero_residues: zeros.iter().map(|z| z.residue).collect(),
        degenerate,
        valuation_capped: capped,
        kurepa_valuation: kurepa_valuation(p),
    };
    rec.check()?;
    Ok(rec)
}

/// Lifting consequence of one zero residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidueConsequence {
    /// p ∤ q̂: a unique class mod p² carries the higher valuations.
    UniqueLift,
    /// p | q̂ and p² | Eₙ₁: every class above n₁ gains a factor p.
    AllLift,
    /// p | q̂ and p² ∤ Eₙ₁: vₚ(Eₙ) = 1 on the whole class.
    ValuationCapped,
}

/// Zero residues of a class-B prime with their lifting consequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateDetail {
    pub prime: u64,
    pub residues: Vec<(ZeroResidue, ResidueConsequence)>,
}

impl DegenerateDetail {
    pub fn residue_list(&self) -> Vec<u64> {
        self.residues.iter().map(|(z, _)| z.residue).collect()
    }

    pub fn get(&self, residue: u64) -> Option<&(ZeroResidue, ResidueConsequence)> {
        self.residues.iter().find(|(z, _)| z.residue == residue)
    }
}

/// Full residue list of a class-B prime; with `n1` given, it must be one of them.
pub fn degenerate_detail(p: u64, n1: Option<u64>) -> Result<DegenerateDetail> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let zeros = zero_residues(p);
    if zeros.is_empty() {
        return domain(format!("{p} is in class A: no zero residues"));
    }
    if let Some(r) = n1 {
        if !zeros.iter().any(|z| z.residue == r % p) {
            return domain(format!("{r} is not a zero residue of {p}"));
        }
    }
    let residues = zeros
        .into_iter()
        .map(|z| {
            let c = if z.q_hat % p != 0 {
                ResidueConsequence::UniqueLift
            } else if z.square_divides {
                ResidueConsequence::AllLift
            } else {
                ResidueConsequence::ValuationCapped
            };
            (z, c)
        })
        .collect();
    Ok(DegenerateDetail { prime: p, residues })
}

/// Splits ascending primes into about `parts` contiguous blocks of equal Σp.
fn balanced_blocks(primes: &[u64], parts: usize) -> Vec<&[u64]> {
    let total: u128 = primes.iter().map(|&p| p as u128).sum();
    let parts = parts.max(1) as u128;
    let mut blocks = Vec::new();
    let mut start = 0;
    let mut acc: u128 = 0;
    let mut next_cut = 1;
    for (i, &p) in primes.iter().enumerate() {
        acc += p as u128;
        if acc * parts >= total * next_cut && i + 1 < primes.len() {
            blocks.push(&primes[start..=i]);
            start = i + 1;
            next_cut = acc * parts / total.max(1) + 1;
        }
    }
    if start < primes.len() {
        blocks.push(&primes[start..]);
    }
    blocks
}

fn run_parallel<T: Send>(
    primes: &[u64],
    jobs: usize,
    work: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let jobs = jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| crate::Error::Invariant(format!("thread pool: {e}")))?;
    let blocks = balanced_blocks(primes, jobs * 8);
    let parts: Vec<Result<Vec<T>>> = pool.install(|| {
        blocks
            .par_iter()
            .map(|b| b.iter().map(|&p| work(p)).collect::<Result<Vec<T>>>())
            .collect()
    });
    let mut out = Vec::with_capacity(primes.len());
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// Counts over a scanned range. The A-density is reported, never asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub lo: u64,
    pub hi: u64,
    pub count_a: usize,
    pub count_b: usize,
    pub degenerate: Vec<u64>,
    /// |A| / (|A| + |B|).
    pub density_a: f64,
}

impl ScanSummary {
    pub fn from_records(lo: u64, hi: u64, records: &[PrimeRecord]) -> Self {
        let count_a = records.iter().filter(|r| r.ab_class == AbClass::A).count();
        let count_b = records.len() - count_a;
        ScanSummary {
            lo,
            hi,
            count_a,
            count_b,
            degenerate: records.iter().filter(|r| r.degenerate).map(|r| r.prime).collect(),
            density_a: if records.is_empty() { 0.0 } else { count_a as f64 / records.len() as f64 },
        }
    }
}

/// Records for every prime in [lo, hi], in prime order regardless of `jobs`.
pub fn scan_range(lo: u64, hi: u64, jobs: usize) -> Result<(Vec<PrimeRecord>, ScanSummary)> {
    if lo < 2 || lo > hi {
        return domain(format!("scan range needs 2 <= lo <= hi, got {lo}..={hi}"));
    }
    let primes = primes_in(lo, hi);
    let records = run_parallel(&primes, jobs, classify_prime)?;
    let summary = ScanSummary::from_records(lo, hi, &records);
    Ok((records, summary))
}

/// Witness that p is an h-Schenker prime: p | aₙ while p ∤ h(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchenkerWitness {
    pub n: u64,
}

/// Tests n ∈ 0..p with p ∤ h(n); since aₙ mod p depends only on n mod p on
/// those classes, this decides whether p divides some aₙ with p ∤ h(n).
/// Costs O(p²) word operations.
pub fn is_h_schenker_prime(h: &IntPoly, p: u64) -> Result<Option<SchenkerWitness>> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let hp = h.reduce(p);
    Ok((0..p)
        .find(|&n| {
            let hv = hp.eval(n);
            hv != 0 && schenker_sum_mod(hv, n, p) == 0
        })
        .map(|n| SchenkerWitness { n }))
}

/// Primes p ≤ bound with p | Σ_{j=1}^{p−1} j!.
pub fn kurepa_scan(bound: u64, jobs: usize) -> Result<Vec<u64>> {
    if bound < 2 {
        return domain(format!("kurepa bound must be at least 2, got {bound}"));
    }
    let primes = primes_upto(bound);
    let hits = run_parallel(&primes, jobs, |p| {
        let mut fact = 1u64;
        let mut sum = 0u64;
        for j in 1..p {
            fact = mulmod(fact, j, p);
            sum = addmod(sum, fact, p);
        }
        Ok((sum == 0).then_some(p))
    })?;
    Ok(hits.into_iter().flatten().collect())
}

/// Primes p ≤ prime_bound dividing some nonzero term aₙ with n ≤ index_horizon.
pub fn divisor_scan(spec: &SeqSpec, prime_bound: u64, index_horizon: u64) -> Result<Vec<u64>> {
    let first = spec.first_index();
    if index_horizon < first {
        return domain(format!("{spec} starts at index {first}"));
    }
    let table = term_table(spec, index_horizon)?;
    let nonzero: Vec<bool> = table.values.iter().map(|v| !v.is_zero()).collect();
    if !nonzero.iter().any(|&b| b) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for p in primes_upto(prime_bound) {
        let hit = if p < 1 << 31 {
            mod_stream(spec, p)?
                .take_while(|&(n, _)| n <= index_horizon)
                .any(|(n, r)| r == 0 && nonzero[(n - first) as usize])
        } else {
            table.values.iter().any(|v| !v.is_zero() && reduce_big(v, p) == 0)
        };
        if hit {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
