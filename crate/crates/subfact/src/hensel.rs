//! Hensel-style lifting of residue classes with growing p-adic valuation.
//!
//! A decomposition exposes A(n, k) = aₙ·g(n)⁻¹ mod pᵏ, which agrees with a
//! polynomial in n (integer coefficients) on the admissible indices. Given
//! pᵏ | A(nₖ), the derivative proxy q = (A(nₖ+p) − A(nₖ))/p mod p decides
//! whether exactly one, all, or none of the p classes above nₖ gain a
//! further factor of p.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{domain, invariant, Result};
use crate::exactint::{
    factorial, inverse_mod, is_prime, mulmod, powmod_u64, reduce_big, vp, vp_factorial, vp_i64,
    vp_u64, ResidueClass, Valuation,
};
use crate::polyring::{root_report, IntPoly};
use crate::sequences::{mod_stream, schenker_sum_mod, term_table, SeqSpec};

/// Indices up to this bound get exact big-integer witness valuations.
const EXACT_WITNESS_LIMIT: u64 = 1500;
/// Same bound for h-Schenker sums, whose exact terms cost O(n) each.
const EXACT_SCHENKER_LIMIT: u64 = 250;
/// Witnesses examined per profile node.
pub const WITNESSES_PER_CLASS: usize = 3;
/// Witness index cap is this multiple of pᵏ.
pub const WITNESS_CAP_FACTOR: u64 = 10;

/// The sequence families with a lifting decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionKind {
    /// aₙ = f(n)aₙ₋₁ + h₁(n) (h₂ = 1) at a prime dividing some f(n₀); g = 1.
    RPrime { f: IntPoly, h1: IntPoly },
    /// A = (−1)ⁿEₙ.
    EPlain,
    /// A = (−1)ⁿEₙ − 1 = 2(−1)ⁿEₙ⁽ᵉ⁾.
    EEven,
    /// A = (−1)ⁿEₙ + 1 = 2(−1)ⁿEₙ⁽ᵒ⁾.
    EOdd,
    /// h-Schenker sums on S = {n ≡ n₁ (mod p)} with g = h(n)^(n−pᵏ−1).
    HSchenker { h: IntPoly, n1: u64 },
}

impl fmt::Display for DecompositionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionKind::RPrime { f: ff, h1 } => write!(f, "rprime({ff}, {h1})"),
            DecompositionKind::EPlain => write!(f, "E"),
            DecompositionKind::EEven => write!(f, "E-even"),
            DecompositionKind::EOdd => write!(f, "E-odd"),
            DecompositionKind::HSchenker { h, n1 } => write!(f, "h-schenker({h}) on n = {n1} mod p"),
        }
    }
}

/// A validated decomposition at a fixed prime.
#[derive(Debug, Clone)]
pub struct Decomposition {
    kind: DecompositionKind,
    p: u64,
    /// The sequence whose valuations the profile describes.
    family: SeqSpec,
    /// RPrime: exact nonnegative root of f, if any.
    exact_root: Option<u64>,
    /// RPrime: least n₀ in 0..p with p | f(n₀).
    residue_root: u64,
}

/// Builds a decomposition after checking the kind's preconditions.
pub fn make_decomposition(kind: DecompositionKind, p: u64) -> Result<Decomposition> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let mut exact_root = None;
    let mut residue_root = 0;
    let family = match &kind {
        DecompositionKind::RPrime { f, h1 } => {
            let fp = f.reduce(p);
            let Some(r) = (0..p).find(|&n| fp.eval(n) == 0) else {
                return domain(format!("{p} divides no value of {f}"));
            };
            residue_root = r;
            exact_root = if f.is_zero() {
                Some(0)
            } else if f.degree() == Some(0) {
                None
            } else {
                root_report(f)?
                    .rational_roots
                    .iter()
                    .filter(|r| r.is_integer() && !r.is_negative())
                    .filter_map(|r| r.to_integer().to_u64())
                    .min()
            };
            SeqSpec::rclass(f.clone(), h1.clone(), 1.into())
        }
        DecompositionKind::EPlain => SeqSpec::EPlain,
        DecompositionKind::EEven => SeqSpec::EEven,
        DecompositionKind::EOdd => SeqSpec::EOdd,
        DecompositionKind::HSchenker { h, n1 } => {
            if *n1 >= p {
                return domain(format!("root residue {n1} must lie in 0..{p}"));
            }
            if h.reduce(p).eval(*n1) == 0 {
                return domain(format!("{p} divides h({n1}); that regime has a closed valuation"));
            }
            SeqSpec::HSchenker(h.clone())
        }
    };
    Ok(Decomposition {
        kind,
        p,
        family,
        exact_root,
        residue_root,
    })
}

impl Decomposition {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> &DecompositionKind {
        &self.kind
    }

    pub fn family(&self) -> &SeqSpec {
        &self.family
    }

    /// v(A) − v(term): A carries an extra factor 2 for the even/odd E families.
    pub fn offset(&self) -> u64 {
        match self.kind {
            DecompositionKind::EEven | DecompositionKind::EOdd if self.p == 2 => 1,
            _ => 0,
        }
    }

    /// Least index from which A(·, k) is pseudo-polynomial mod pᵏ.
    pub fn tail(&self, k: u32) -> u64 {
        match &self.kind {
            DecompositionKind::RPrime { .. } => match self.exact_root {
                Some(z) => z,
                None => self.residue_root + k as u64 * self.p,
            },
            DecompositionKind::HSchenker { .. } => 0,
            _ => 2,
        }
    }

    /// Whether n belongs to the admissible set S.
    pub fn admissible(&self, n: u64) -> bool {
        match &self.kind {
            DecompositionKind::HSchenker { n1, .. } => n % self.p == *n1,
            _ => n >= self.family.first_index(),
        }
    }

    fn modulus(&self, k: u32) -> Result<u64> {
        match self.p.checked_pow(k) {
            Some(m) if m < 1 << 62 => Ok(m),
            _ => domain(format!("{}^{k} exceeds the word-sized modulus limit", self.p)),
        }
    }

    /// A(n, k) for each (sorted, deduplicated) index, in one pass.
    pub fn accessor_values(&self, indices: &[u64], k: u32) -> Result<BTreeMap<u64, u64>> {
        let m = self.modulus(k)?;
        let mut out = BTreeMap::new();
        if let Some(&n) = indices.iter().find(|&&n| !self.admissible(n)) {
            return domain(format!("index {n} lies outside the decomposition's domain"));
        }
        match &self.kind {
            DecompositionKind::HSchenker { h, .. } => {
                let hm = h.reduce(m);
                let phi = m / self.p * (self.p - 1);
                for &n in indices {
                    let hv = hm.eval(n);
                    let a = schenker_sum_mod(hv, n, m);
                    // g(n)⁻¹ = h(n)^(pᵏ+1−n), exponent reduced mod φ(pᵏ).
                    let e = (m as i128 + 1 - n as i128).rem_euclid(phi as i128) as u64;
                    out.insert(n, mulmod(a, powmod_u64(hv, e, m), m));
                }
            }
            _ => {
                let base = match &self.kind {
                    DecompositionKind::RPrime { .. } => self.family.clone(),
                    _ => SeqSpec::EPlain,
                };
                let wanted: std::collections::BTreeSet<u64> = indices.iter().copied().collect();
                let Some(&last) = wanted.iter().next_back() else {
                    return Ok(out);
                };
                for (n, r) in mod_stream(&base, m)?.take_while(|&(n, _)| n <= last) {
                    if !wanted.contains(&n) {
                        continue;
                    }
                    let signed = |v: u64| if n % 2 == 0 { v } else { (m - v) % m };
                    let a = match self.kind {
                        DecompositionKind::RPrime { .. } => r,
                        DecompositionKind::EPlain => signed(r),
                        DecompositionKind::EEven => (signed(r) + m - 1 % m) % m,
                        _ => (signed(r) + 1) % m,
                    };
                    out.insert(n, a);
                }
            }
        }
        Ok(out)
    }

    /// A(n, k) for a single index.
    pub fn accessor(&self, n: u64, k: u32) -> Result<u64> {
        Ok(self.accessor_values(&[n], k)?[&n])
    }
}

/// q = (A(n+p, 2) − A(n, 2))/p mod p at an admissible index n ≥ tail(2).
pub fn qp(dec: &Decomposition, n: u64) -> Result<u64> {
    let p = dec.p;
    if n < dec.tail(2) {
        return domain(format!("index {n} is below the tail {}", dec.tail(2)));
    }
    let vals = dec.accessor_values(&[n, n + p], 2)?;
    let m = p * p;
    let diff = (vals[&(n + p)] + m - vals[&n]) % m;
    if diff % p != 0 {
        return invariant(format!(
            "A({}) − A({n}) = {diff} mod {m} is not divisible by {p}",
            n + p
        ));
    }
    Ok(diff / p)
}

/// The three outcomes of a lifting step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftOutcome {
    /// Exactly one class mod pᵏ⁺¹ above nₖ has valuation ≥ k+1.
    UniqueLift(ResidueClass),
    /// Every class above nₖ has valuation ≥ k+1.
    AllLift,
    /// No index in the class has valuation ≥ k+1.
    NoneLift,
}

impl fmt::Display for LiftOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftOutcome::UniqueLift(c) => write!(f, "unique-lift({c})"),
            LiftOutcome::AllLift => write!(f, "all-lift"),
            LiftOutcome::NoneLift => write!(f, "none-lift"),
        }
    }
}

/// A lifting step together with the data that decided it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftStep {
    pub outcome: LiftOutcome,
    /// Index used to evaluate the step.
    pub representative: u64,
    /// q mod p at the representative (0 means p | q).
    pub q: u64,
}

/// One step of the trichotomy for a class mod pᵏ whose members have pᵏ | A.
pub fn lift_step(dec: &Decomposition, class: &ResidueClass) -> Result<LiftStep> {
    let p = dec.p;
    let mut k = 0u32;
    let mut m = 1u64;
    while m < class.modulus {
        m = m.saturating_mul(p);
        k += 1;
    }
    if m != class.modulus || k == 0 {
        return domain(format!("class modulus {} is not a positive power of {p}", class.modulus));
    }
    let start = dec.tail(k + 1).max(dec.tail(2)).max(dec.family.first_index());
    let n = class.first_at_least(start);
    if !dec.admissible(n) {
        return domain(format!("class {class} lies outside the decomposition's domain"));
    }
    let mk1 = dec.modulus(k + 1)?;
    let z = dec.accessor(n, k + 1)?;
    if z % m != 0 {
        return domain(format!("{p}^{k} does not divide A({n}); class {class} is not a root class"));
    }
    let q = qp(dec, n)?;
    let outcome = if q != 0 {
        let zk = (z / m) % p;
        let t = mulmod(p - zk % p, inverse_mod(q as i64, p)?, p) % p;
        let lifted = (n as u128 + t as u128 * m as u128) % mk1 as u128;
        LiftOutcome::UniqueLift(ResidueClass::new(lifted as i128, mk1)?)
    } else if z == 0 {
        LiftOutcome::AllLift
    } else {
        LiftOutcome::NoneLift
    };
    Ok(LiftStep {
        outcome,
        representative: n,
        q,
    })
}

/// Valuation of a term known exactly, or only modulo pᴷ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectValuation {
    Exact(Valuation),
    /// pᴷ divides the term; the true valuation is at least K.
    AtLeast(u64),
}

impl DirectValuation {
    fn at_least(self, k: u64) -> bool {
        match self {
            DirectValuation::Exact(v) => v.at_least(k),
            DirectValuation::AtLeast(c) => c >= k,
        }
    }

    fn equals(self, k: u64) -> Option<bool> {
        match self {
            DirectValuation::Exact(v) => Some(v == Valuation::Finite(k)),
            DirectValuation::AtLeast(c) if c > k => Some(false),
            DirectValuation::AtLeast(_) => None,
        }
    }

    fn shifted(self, by: u64) -> DirectValuation {
        match self {
            DirectValuation::Exact(Valuation::Finite(v)) => DirectValuation::Exact(Valuation::Finite(v + by)),
            DirectValuation::AtLeast(c) => DirectValuation::AtLeast(c + by),
            inf => inf,
        }
    }
}

impl fmt::Display for DirectValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectValuation::Exact(v) => write!(f, "{v}"),
            DirectValuation::AtLeast(c) => write!(f, ">={c}"),
        }
    }
}

/// Valuations of the family's terms at the given indices, computed
/// independently of the accessor: exact big integers for small indices,
/// the family's own residue stream mod pᴷ beyond.
pub fn direct_valuations(dec: &Decomposition, indices: &[u64], precision: u32) -> Result<BTreeMap<u64, DirectValuation>> {
    let p = dec.p;
    let mut out = BTreeMap::new();
    let limit = if matches!(dec.family, SeqSpec::HSchenker(_)) {
        EXACT_SCHENKER_LIMIT
    } else {
        EXACT_WITNESS_LIMIT
    };
    let (small, large): (Vec<u64>, Vec<u64>) = indices.iter().partition(|&&n| n <= limit);
    if let Some(&top) = small.iter().max() {
        let first = dec.family.first_index();
        let table = term_table(&dec.family, top.max(first))?;
        for n in small {
            out.insert(n, DirectValuation::Exact(vp(table.get(n), p)?));
        }
    }
    if large.is_empty() {
        return Ok(out);
    }
    let m = dec.modulus(precision)?;
    let classify = |r: u64| match vp_u64(r, p) {
        Valuation::Finite(v) => DirectValuation::Exact(Valuation::Finite(v)),
        Valuation::Infinity => DirectValuation::AtLeast(precision as u64),
    };
    if let SeqSpec::HSchenker(h) = &dec.family {
        let hm = h.reduce(m);
        for n in large {
            out.insert(n, classify(schenker_sum_mod(hm.eval(n), n, m)));
        }
    } else {
        let wanted: std::collections::BTreeSet<u64> = large.iter().copied().collect();
        let last = *wanted.iter().next_back().expect("nonempty");
        for (n, r) in mod_stream(&dec.family, m)?.take_while(|&(n, _)| n <= last) {
            if wanted.contains(&n) {
                out.insert(n, classify(r));
            }
        }
    }
    Ok(out)
}

/// Verification status of a profile node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeStatus {
    Verified,
    /// No witness index within the budget.
    Unverified,
    /// A witness contradicts the node's claim (a bug or a broken decomposition).
    Contradicted(String),
}

/// A class mod pᵏ whose admissible members satisfy v(A) ≥ k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileNode {
    pub level: u32,
    pub class: ResidueClass,
    pub parent: Option<usize>,
    /// The lifting step; `None` on the frontier level.
    pub step: Option<LiftStep>,
    /// Witness indices with the valuation of the family term (not of A).
    pub witnesses: Vec<(u64, DirectValuation)>,
    pub status: NodeStatus,
}

/// Tree of lifted residue classes above a root class mod p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationProfile {
    pub p: u64,
    pub root_residue: u64,
    pub depth: u32,
    /// v(A) = v(term) + offset.
    pub offset: u64,
    pub nodes: Vec<ProfileNode>,
}

impl ValuationProfile {
    pub fn level(&self, k: u32) -> impl Iterator<Item = &ProfileNode> {
        self.nodes.iter().filter(move |n| n.level == k)
    }

    pub fn all_verified(&self) -> bool {
        self.nodes.iter().all(|n| n.status == NodeStatus::Verified)
    }

    pub fn contradictions(&self) -> Vec<&ProfileNode> {
        self.nodes
            .iter()
            .filter(|n| matches!(n.status, NodeStatus::Contradicted(_)))
            .collect()
    }
}

/// Residues n₁ mod p (taken at representatives in the admissible tail)
/// with p | A(n₁).
pub fn zero_classes(dec: &Decomposition) -> Result<Vec<u64>> {
    let p = dec.p;
    let start = dec.tail(1).max(dec.family.first_index());
    let reps: Vec<u64> = (start..start + p).filter(|&n| dec.admissible(n)).collect();
    let vals = dec.accessor_values(&reps, 1)?;
    Ok(reps
        .into_iter()
        .filter(|n| vals[n] == 0)
        .map(|n| n % p)
        .collect())
}

fn witness_indices(dec: &Decomposition, class: &ResidueClass, level: u32) -> Vec<u64> {
    let start = dec.tail(level).max(dec.family.first_index());
    let cap = WITNESS_CAP_FACTOR.saturating_mul(class.modulus);
    let mut out = Vec::new();
    let mut n = class.first_at_least(start);
    while n <= cap && out.len() < WITNESSES_PER_CLASS {
        if dec.admissible(n) {
            out.push(n);
        }
        n += class.modulus;
    }
    out
}

/// Builds the lifting tree above n₁ mod p down to level `depth`, checking
/// every node against direct valuations of up to three witnesses.
pub fn valuation_profile(dec: &Decomposition, n1: u64, depth: u32) -> Result<ValuationProfile> {
    let p = dec.p;
    if depth == 0 {
        return domain("profile depth must be at least 1");
    }
    let precision = depth + 2;
    dec.modulus(precision)?;
    let root = ResidueClass::new((n1 % p) as i128, p)?;
    let rep = witness_indices(dec, &root, 1)
        .first()
        .copied()
        .unwrap_or_else(|| root.first_at_least(dec.tail(1).max(dec.family.first_index())));
    if dec.accessor(rep, 1)? != 0 {
        return domain(format!("{p} does not divide A({rep}); {n1} is not a zero class"));
    }
    let mut nodes = vec![ProfileNode {
        level: 1,
        class: root,
        parent: None,
        step: None,
        witnesses: Vec::new(),
        status: NodeStatus::Unverified,
    }];
    let mut frontier = vec![0usize];
    for level in 1..depth {
        let mut next = Vec::new();
        for &i in &frontier {
            let step = lift_step(dec, &nodes[i].class)?;
            nodes[i].step = Some(step);
            let m = nodes[i].class.modulus;
            let children: Vec<ResidueClass> = match step.outcome {
                LiftOutcome::UniqueLift(c) => vec![c],
                LiftOutcome::AllLift => (0..p)
                    .map(|t| ResidueClass::new(nodes[i].class.residue as i128 + (t * m) as i128, m * p))
                    .collect::<Result<_>>()?,
                LiftOutcome::NoneLift => Vec::new(),
            };
            for class in children {
                nodes.push(ProfileNode {
                    level: level + 1,
                    class,
                    parent: Some(i),
                    step: None,
                    witnesses: Vec::new(),
                    status: NodeStatus::Unverified,
                });
                next.push(nodes.len() - 1);
            }
        }
        frontier = next;
    }
    verify_nodes(dec, &mut nodes, precision)?;
    Ok(ValuationProfile {
        p,
        root_residue: n1 % p,
        depth,
        offset: dec.offset(),
        nodes,
    })
}

fn verify_nodes(dec: &Decomposition, nodes: &mut [ProfileNode], precision: u32) -> Result<()> {
    let per_node: Vec<Vec<u64>> = nodes
        .iter()
        .map(|nd| witness_indices(dec, &nd.class, nd.level))
        .collect();
    let mut all: Vec<u64> = per_node.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    let vals = direct_valuations(dec, &all, precision)?;
    let off = dec.offset();
    for (nd, idx) in nodes.iter_mut().zip(per_node) {
        nd.witnesses = idx.iter().map(|n| (*n, vals[n])).collect();
        if nd.witnesses.is_empty() {
            nd.status = NodeStatus::Unverified;
            continue;
        }
        let k = nd.level as u64;
        let mut problem = None;
        for &(n, v) in &nd.witnesses {
            let va = v.shifted(off);
            if !va.at_least(k) {
                problem = Some(format!("witness {n} has valuation {va} < {k}"));
            } else if matches!(nd.step, Some(LiftStep { outcome: LiftOutcome::NoneLift, .. })) {
                match va.equals(k) {
                    Some(true) => {}
                    Some(false) => problem = Some(format!("witness {n} has valuation {va} > {k} in a none-lift class")),
                    None => problem = Some(format!("witness {n}: precision too low to confirm valuation {k}")),
                }
            }
        }
        nd.status = match problem {
            Some(msg) => NodeStatus::Contradicted(msg),
            None => NodeStatus::Verified,
        };
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Exponential lifting.

/// Outcome of lifting a class for a^{n(p−1)+m} ≡ c.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpLift {
    /// The unique class mod p^{k+l} with p^{s+l} | a^{n(p−1)+m} − c.
    Unique(ResidueClass),
    /// a^{n(p−1)+m} − c vanishes identically (a = 1 = c).
    Every,
    /// pˢ ∤ a^{nₖ(p−1)+m} − c, so no member of the class lifts.
    NoSolution,
}

fn big_pow_mod(a: i64, e: &BigInt, m: &BigInt) -> BigInt {
    BigInt::from(a).mod_floor(m).modpow(e, m)
}

/// s = vₚ(a^{pᵏ(p−1)} − 1), or `None` when a^{p−1} = 1 exactly.
pub fn exp_base_valuation(a: i64, p: u64, k: u32) -> Result<Option<u64>> {
    if a == 1 || (a == -1 && p == 2) {
        return Ok(None);
    }
    let e = BigInt::from(p).pow(k) * (p - 1);
    let mut cap = 8u32;
    loop {
        let m = BigInt::from(p).pow(cap);
        let r = (big_pow_mod(a, &e, &m) - BigInt::from(1)).mod_floor(&m);
        if !r.is_zero() {
            return Ok(vp(&r, p)?.finite());
        }
        if cap > 4096 {
            return invariant("valuation search did not terminate");
        }
        cap *= 2;
    }
}

/// Lifts the class nₖ mod pᵏ through l steps of the exponential
/// congruence a^{n(p−1)+m} ≡ c, solving w·t·c ≡ −z (mod p) at each step.
pub fn exp_lift(a: i64, p: u64, m: u64, c: i64, k: u32, n_k: u64, l: u32) -> Result<ExpLift> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if k == 0 || l == 0 {
        return domain("k and l must be positive");
    }
    if vp_i64(a, p) != Valuation::Finite(0) || vp_i64(c, p) != Valuation::Finite(0) {
        return domain(format!("{p} must divide neither a = {a} nor c = {c}"));
    }
    let pb = BigInt::from(p);
    let Some(s) = exp_base_valuation(a, p, k)? else {
        // a = ±1: the left side is exactly a^{nₖ(p−1)+m} on the whole class.
        let e = (n_k as u128 * (p as u128 - 1) + m as u128) % 2;
        let lhs = if a == 1 || e == 0 { 1 } else { -1 };
        return Ok(if lhs == c { ExpLift::Every } else { ExpLift::NoSolution });
    };
    let pk = pb.pow(k);
    let mut n = BigInt::from(n_k).mod_floor(&pk);
    let exponent = |n: &BigInt| n * (p - 1) + m;
    let value = |n: &BigInt, modulus: &BigInt| (big_pow_mod(a, &exponent(n), modulus) - c).mod_floor(modulus);
    if !value(&n, &pb.pow(s as u32)).is_zero() {
        return Ok(ExpLift::NoSolution);
    }
    for j in 1..=l {
        // n is a class mod p^{k+j−1} with p^{s+j−1} | a^{n(p−1)+m} − c.
        let level = pb.pow(k + j - 1);
        let sj = s as u32 + j - 1;
        let u = big_pow_mod(a, &(&level * (p - 1)), &pb.pow(sj + 1));
        let w = ((u - BigInt::from(1)) / pb.pow(sj)).mod_floor(&pb);
        let z = (value(&n, &pb.pow(sj + 1)) / pb.pow(sj)).mod_floor(&pb);
        let wc = (&w * c).mod_floor(&pb);
        let inv = inverse_mod(wc.to_i64().expect("residue mod p"), p)?;
        let t = ((-z) * inv).mod_floor(&pb);
        n += t * &level;
        let target = pb.pow(sj + 1);
        if !value(&n, &target).is_zero() {
            return invariant(format!("exponential lift failed at step {j}"));
        }
    }
    let modulus = pb.pow(k + l).to_u64();
    match (modulus, n.to_u64()) {
        (Some(md), Some(r)) => Ok(ExpLift::Unique(ResidueClass::new(r as i128, md)?)),
        _ => domain("lifted modulus exceeds 64 bits"),
    }
}

// ---------------------------------------------------------------------------
// Partial sums of Σ j!.

/// Σ_{j=1}^{∞} j! mod pᵏ, which equals the finite sum up to kp − 1 because
/// every later term is divisible by pᵏ.
pub fn sum_factorials_mod(p: u64, k: u32) -> Result<u64> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    let m = match p.checked_pow(k) {
        Some(m) if m < 1 << 62 => m,
        _ => return domain(format!("{p}^{k} exceeds the word-sized modulus limit")),
    };
    let mut fact = 1 % m;
    let mut sum = 0;
    for j in 1..k as u64 * p {
        fact = mulmod(fact, j, m);
        sum = (sum + fact) % m;
    }
    Ok(sum)
}

/// Depth cap for [`sum_factorials_valuation`].
pub const SUM_FACTORIALS_MAX_DEPTH: u32 = 24;

/// vₚ(Σ_{j≥1} j!) in ℤₚ, found as the first precision with a nonzero residue.
pub fn sum_factorials_valuation(p: u64) -> Result<u64> {
    for k in 1..=SUM_FACTORIALS_MAX_DEPTH {
        let m = match p.checked_pow(k) {
            Some(m) if m < 1 << 62 => m,
            _ => break,
        };
        let r = sum_factorials_mod(p, k)?;
        if r != 0 {
            return Ok(vp_u64(r % m, p).finite().expect("nonzero residue"));
        }
    }
    domain(format!("valuation of the factorial series at {p} exceeds the depth cap"))
}

// ---------------------------------------------------------------------------
// Closed valuation formulas.

/// Closed valuation formulas that avoid lifting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosedFormula {
    /// vₚ(Dₙ) = vₚ(n−1) for primes dividing no Eₙ.
    DerangementAPrime(u64),
    /// v₂(Dₙ⁽ᵉ⁾/(n−1)) = v₂(n−2) − 1 for even n.
    EvenQuotientTwoAdic,
    /// v₂(Dₙ⁽ᵒ⁾/(n−1)) = v₂(n−3) − 1 for odd n.
    OddQuotientTwoAdic,
    /// vₚ(aₙ) = vₚ(n!) for h-Schenker sums when p | h(n).
    FactorialWhenPDividesH { h: IntPoly, p: u64 },
}

/// True when p divides no Eₙ, which by p-periodicity of (−1)ⁿEₙ mod p
/// reduces to 2 ≤ n ≤ p + 1.
pub fn divides_no_e(p: u64) -> Result<bool> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(mod_stream(&SeqSpec::EPlain, p)?
        .take_while(|&(n, _)| n <= p + 1)
        .all(|(_, r)| r != 0))
}

fn minus_one(v: Valuation) -> Valuation {
    match v {
        Valuation::Finite(x) => Valuation::Finite(x.saturating_sub(1)),
        inf => inf,
    }
}

/// Evaluates a closed valuation formula at n.
pub fn closed_valuation(formula: &ClosedFormula, n: u64) -> Result<Valuation> {
    match formula {
        ClosedFormula::DerangementAPrime(p) => {
            if !divides_no_e(*p)? {
                return domain(format!("{p} divides some E_n, so the formula does not apply"));
            }
            Ok(vp_i64(n as i64 - 1, *p))
        }
        ClosedFormula::EvenQuotientTwoAdic => {
            if n < 2 || n % 2 == 1 {
                return domain(format!("formula needs even n >= 2, got {n}"));
            }
            let v = vp_i64(n as i64 - 2, 2);
            if v == Valuation::Finite(0) {
                return invariant("v2(n-2) is positive for even n");
            }
            Ok(minus_one(v))
        }
        ClosedFormula::OddQuotientTwoAdic => {
            if n < 3 || n % 2 == 0 {
                return domain(format!("formula needs odd n >= 3, got {n}"));
            }
            Ok(minus_one(vp_i64(n as i64 - 3, 2)))
        }
        ClosedFormula::FactorialWhenPDividesH { h, p } => {
            if !is_prime(*p) {
                return domain(format!("{p} is not prime"));
            }
            if reduce_big(&h.eval_i64(n as i64), *p) != 0 {
                return domain(format!("{p} does not divide h({n})"));
            }
            Ok(Valuation::Finite(vp_factorial(n, *p)))
        }
    }
}

/// vₚ(n!) by direct factorial, for cross-checks.
pub fn vp_factorial_direct(n: u64, p: u64) -> Result<Valuation> {
    vp(&factorial(n), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{build_fd, FdSign};
    use crate::sequences::{term, term_table};
    use proptest::prelude::*;

    fn poly(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn e_dec(p: u64) -> Decomposition {
        make_decomposition(DecompositionKind::EPlain, p).unwrap()
    }

    #[test]
    fn q_at_three_matches_e_values() {
        let dec = e_dec(3);
        // (E₇ + E₄)/3 = (309 + 3)/3 = 104, and q = −(−1)ⁿ·104 ≡ 1 (mod 3) at n = 4.
        assert_eq!(term(&SeqSpec::EPlain, 7).unwrap(), BigInt::from(309));
        assert_eq!(qp(&dec, 4).unwrap(), 1);
        let step = lift_step(&dec, &ResidueClass::new(1, 3).unwrap()).unwrap();
        assert_eq!(step.outcome, LiftOutcome::UniqueLift(ResidueClass::new(1, 9).unwrap()));
        assert_eq!(step.representative, 4);
        let v = |n| vp(&term(&SeqSpec::EPlain, n).unwrap(), 3).unwrap();
        assert_eq!(term(&SeqSpec::EPlain, 10).unwrap(), BigInt::from(148329));
        assert_eq!(v(10), Valuation::Finite(2));
        assert_eq!(v(7), Valuation::Finite(1));
        assert_eq!(v(13), Valuation::Finite(1));
    }

    #[test]
    fn accessor_examples() {
        assert_eq!(e_dec(3).accessor(4, 1).unwrap(), 0);
        let hs = make_decomposition(DecompositionKind::HSchenker { h: poly("X"), n1: 2 }, 5).unwrap();
        assert_eq!(hs.accessor(2, 1).unwrap(), 0);
        assert!(make_decomposition(DecompositionKind::HSchenker { h: poly("X"), n1: 0 }, 5).is_err());
        assert!(make_decomposition(DecompositionKind::RPrime { f: poly("X^2+1"), h1: poly("1") }, 3).is_err());
        assert!(make_decomposition(DecompositionKind::EPlain, 9).is_err());
        // The regime p | h(n) is outside S.
        assert!(hs.accessor(5, 1).is_err());
    }

    #[test]
    fn even_family_q_values() {
        let dec = make_decomposition(DecompositionKind::EEven, 2).unwrap();
        assert_eq!(qp(&dec, 2).unwrap(), 1);
        let step = lift_step(&dec, &ResidueClass::new(0, 2).unwrap()).unwrap();
        assert!(matches!(step.outcome, LiftOutcome::UniqueLift(_)));
        let dec = make_decomposition(DecompositionKind::EOdd, 2).unwrap();
        assert_eq!(qp(&dec, 3).unwrap(), 1);
    }

    #[test]
    fn rprime_matches_fd_congruence() {
        let dec = make_decomposition(DecompositionKind::RPrime { f: poly("X"), h1: poly("1") }, 7).unwrap();
        assert_eq!(dec.tail(3), 0);
        let exact = term_table(dec.family(), 100).unwrap();
        for k in 1..=2u32 {
            let fd = build_fd(&poly("X"), &poly("1"), FdSign::Plain, 7 * k as usize);
            let m = 7u64.pow(k);
            let idx: Vec<u64> = (0..=100).collect();
            let vals = dec.accessor_values(&idx, k).unwrap();
            for n in 0..=100u64 {
                assert_eq!(vals[&n], reduce_big(&fd.eval_i64(n as i64), m), "n = {n}, k = {k}");
                assert_eq!(vals[&n], reduce_big(exact.get(n), m));
            }
        }
    }

    fn criterion_kinds() -> Vec<(DecompositionKind, u64)> {
        let mut out = vec![(DecompositionKind::EPlain, 3), (DecompositionKind::EPlain, 13)];
        for p in [2, 3, 5] {
            out.push((DecompositionKind::EEven, p));
            out.push((DecompositionKind::EOdd, p));
        }
        for p in [3, 5, 7] {
            out.push((DecompositionKind::RPrime { f: poly("X"), h1: poly("1") }, p));
        }
        for n1 in 0..5 {
            out.push((DecompositionKind::HSchenker { h: poly("X"), n1 }, 5));
        }
        out
    }

    #[test]
    fn coherence_across_precisions() {
        for (kind, p) in criterion_kinds() {
            let Ok(dec) = make_decomposition(kind.clone(), p) else { continue };
            let idx: Vec<u64> = (0..400).filter(|&n| dec.admissible(n)).take(50).collect();
            let by_k: Vec<_> = (1..=4).map(|k| dec.accessor_values(&idx, k).unwrap()).collect();
            for k1 in 0..4 {
                for k2 in k1..4 {
                    let m1 = p.pow(k1 as u32 + 1);
                    for n in &idx {
                        assert_eq!(by_k[k2][n] % m1, by_k[k1][n], "{kind} p={p} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn depth_three_profiles_are_sound() {
        let mut profiles = 0;
        for (kind, p) in criterion_kinds() {
            let Ok(dec) = make_decomposition(kind.clone(), p) else { continue };
            for n1 in zero_classes(&dec).unwrap() {
                let prof = valuation_profile(&dec, n1, 3).unwrap();
                assert!(prof.contradictions().is_empty(), "{kind} p={p} n1={n1}: {:?}", prof.contradictions());
                assert!(prof.all_verified(), "{kind} p={p} n1={n1}");
                for nd in &prof.nodes {
                    if let Some(par) = nd.parent {
                        let parent = &prof.nodes[par];
                        assert_eq!(nd.class.residue % parent.class.modulus, parent.class.residue);
                        assert_eq!(nd.level, parent.level + 1);
                    }
                    let kids = prof.nodes.iter().filter(|c| c.parent.map(|q| &prof.nodes[q]) == Some(nd)).count();
                    match nd.step.map(|s| s.outcome) {
                        Some(LiftOutcome::UniqueLift(_)) => assert_eq!(kids, 1),
                        Some(LiftOutcome::AllLift) => assert_eq!(kids, p as usize),
                        Some(LiftOutcome::NoneLift) => assert_eq!(kids, 0),
                        None => assert_eq!(nd.level, 3),
                    }
                }
                profiles += 1;
            }
        }
        assert!(profiles >= 10);
    }

    #[test]
    fn degenerate_prime_caps_valuation() {
        let dec = e_dec(2633);
        let prof = valuation_profile(&dec, 1578, 2).unwrap();
        let root = &prof.nodes[0];
        let step = root.step.unwrap();
        assert_eq!(step.q, 0);
        assert_eq!(step.outcome, LiftOutcome::NoneLift);
        assert_eq!(prof.nodes.len(), 1);
        assert!(prof.all_verified());
        assert!(root.witnesses.iter().all(|(_, v)| *v == DirectValuation::Exact(Valuation::Finite(1))));
    }

    #[test]
    fn e_three_chain() {
        let prof = valuation_profile(&e_dec(3), 1, 3).unwrap();
        let chain: Vec<_> = prof.nodes.iter().map(|n| n.class).collect();
        assert_eq!(chain[0], ResidueClass::new(1, 3).unwrap());
        assert_eq!(chain[1], ResidueClass::new(1, 9).unwrap());
        assert_eq!(chain.len(), 3);
        // Cross-check the level-3 class against exact valuations n ≤ 100.
        let t = term_table(&SeqSpec::EPlain, 100).unwrap();
        let c3 = chain[2];
        for n in 2..=100u64 {
            let v = vp(t.get(n), 3).unwrap();
            assert_eq!(v.at_least(3), c3.contains(n), "n = {n}");
        }
    }

    #[test]
    fn even_two_chain_has_offset() {
        let dec = make_decomposition(DecompositionKind::EEven, 2).unwrap();
        let prof = valuation_profile(&dec, 0, 4).unwrap();
        assert_eq!(prof.offset, 1);
        assert!(prof.all_verified());
        let t = term_table(&SeqSpec::EEven, 64).unwrap();
        for nd in &prof.nodes {
            for n in (2..=64).filter(|&n| nd.class.contains(n)) {
                assert!(vp(t.get(n), 2).unwrap().at_least(nd.level as u64 - 1), "n = {n}");
            }
        }
    }

    #[test]
    fn valuation_is_factorial_when_p_divides_h() {
        for h in ["X", "X+1", "3*X-6"] {
            let hp = poly(h);
            let t = term_table(&SeqSpec::HSchenker(hp.clone()), 300).unwrap();
            for p in crate::exactint::primes_upto(13) {
                for n in 0..=300u64 {
                    if reduce_big(&hp.eval_i64(n as i64), p) != 0 {
                        continue;
                    }
                    let f = ClosedFormula::FactorialWhenPDividesH { h: hp.clone(), p };
                    assert_eq!(closed_valuation(&f, n).unwrap(), vp(t.get(n), p).unwrap(), "h={h} p={p} n={n}");
                }
            }
        }
        let f = ClosedFormula::FactorialWhenPDividesH { h: poly("X"), p: 5 };
        assert_eq!(closed_valuation(&f, 5).unwrap(), Valuation::Finite(1));
        assert_eq!(term(&SeqSpec::HSchenker(poly("X")), 5).unwrap(), BigInt::from(10970));
        assert!(closed_valuation(&f, 4).is_err());
    }

    #[test]
    fn closed_formulas_match_exact_terms() {
        assert_eq!(closed_valuation(&ClosedFormula::DerangementAPrime(2), 5).unwrap(), Valuation::Finite(2));
        assert!(closed_valuation(&ClosedFormula::DerangementAPrime(3), 5).is_err());
        let d = crate::sequences::derangements(300);
        for p in [2u64, 5, 7, 17] {
            for n in 1..=300u64 {
                let f = ClosedFormula::DerangementAPrime(p);
                assert_eq!(closed_valuation(&f, n).unwrap(), vp(&d[n as usize], p).unwrap());
            }
        }
        assert_eq!(closed_valuation(&ClosedFormula::EvenQuotientTwoAdic, 10).unwrap(), Valuation::Finite(2));
        let ee = term_table(&SeqSpec::EEven, 300).unwrap();
        let eo = term_table(&SeqSpec::EOdd, 300).unwrap();
        assert_eq!(ee.get(10), &BigInt::from(74164));
        for n in 2..=300u64 {
            if n % 2 == 0 {
                assert_eq!(closed_valuation(&ClosedFormula::EvenQuotientTwoAdic, n).unwrap(), vp(ee.get(n), 2).unwrap(), "n={n}");
                assert!(closed_valuation(&ClosedFormula::OddQuotientTwoAdic, n).is_err());
            } else if n >= 3 {
                assert_eq!(closed_valuation(&ClosedFormula::OddQuotientTwoAdic, n).unwrap(), vp(eo.get(n), 2).unwrap(), "n={n}");
            }
        }
    }

    #[test]
    fn factorial_series_valuations() {
        assert_eq!(sum_factorials_valuation(3).unwrap(), 2);
        assert_eq!(sum_factorials_valuation(11).unwrap(), 1);
        assert_eq!(sum_factorials_valuation(5).unwrap(), 0);
        assert_eq!(sum_factorials_valuation(2).unwrap(), 0);
        assert_eq!(sum_factorials_mod(5, 1).unwrap(), 3);
        // v₃(Σ_{j=1}^{8} j!) = 2 with 46233 = Σ_{j≤8} j!.
        assert_eq!(sum_factorials_mod(3, 3).unwrap(), 46233 % 27);
        // Extending the cutoff beyond kp − 1 never changes the residue.
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..=4u32 {
                let m = p.pow(k);
                let base = sum_factorials_mod(p, k).unwrap();
                let mut fact = 1u64;
                let mut sum = 0u64;
                for j in 1..(k as u64 * p + 3 * p) {
                    fact = mulmod(fact, j, m);
                    sum = (sum + fact) % m;
                }
                assert_eq!(sum, base);
            }
        }
    }

    #[test]
    fn exponential_lifting() {
        assert_eq!(exp_base_valuation(2, 5, 1).unwrap(), Some(2));
        assert_eq!(exp_lift(2, 5, 0, 1, 1, 0, 1).unwrap(), ExpLift::Unique(ResidueClass::new(0, 25).unwrap()));
        assert_eq!(exp_lift(1, 7, 3, 1, 1, 4, 2).unwrap(), ExpLift::Every);
        for n1 in 0..5 {
            assert_eq!(exp_lift(2, 5, 1, 3, 1, n1, 1).unwrap(), ExpLift::NoSolution);
        }
        assert!(exp_lift(5, 5, 0, 1, 1, 0, 1).is_err());
        // The valuation ladder vₚ(a^{p^{k+l}(p−1)} − 1) = s + l.
        for (a, p) in [(2i64, 5u64), (3, 7), (2, 3)] {
            let s = exp_base_valuation(a, p, 1).unwrap().unwrap();
            for l in 0..=3u32 {
                assert_eq!(exp_base_valuation(a, p, 1 + l).unwrap(), Some(s + l as u64));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exp_lift_solves_the_congruence(
            (a, p) in prop::sample::select(vec![(2i64, 3u64), (2, 5), (3, 5), (3, 7), (2, 7), (5, 3), (7, 11)]),
            m in 0u64..6, c_seed in 1i64..50, k in 1u32..3, l in 1u32..3, n_seed in 0u64..1000,
        ) {
            let c = if c_seed % p as i64 == 0 { c_seed + 1 } else { c_seed };
            let pk = p.pow(k);
            let nk = n_seed % pk;
            let s = exp_base_valuation(a, p, k).unwrap().unwrap();
            let target = BigInt::from(p).pow(s as u32 + l);
            let holds = |n: u64| {
                let e = BigInt::from(n) * (p - 1) + m;
                (BigInt::from(a).modpow(&e, &target) - c).mod_floor(&target).is_zero()
            };
            let hi = p.pow(k + l);
            let members: Vec<u64> = (0..hi).filter(|n| n % pk == nk).filter(|&n| holds(n)).collect();
            match exp_lift(a, p, m, c, k, nk, l).unwrap() {
                ExpLift::Unique(cl) => prop_assert_eq!(members, vec![cl.residue]),
                ExpLift::NoSolution => prop_assert!(members.is_empty()),
                ExpLift::Every => prop_assert!(false),
            }
        }
    }
}
