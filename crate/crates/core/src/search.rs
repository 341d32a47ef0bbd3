//! Depth-first enumeration over ascending prime prefixes.
//!
//! A prefix p_1 < … < p_r carries its product P and the modulus
//! L = lcm(p_i − 1). Any Carmichael number N divisible by the prefix
//! satisfies N ≡ 1 (mod L), which both prunes the tree (gcd(P, L) must be 1)
//! and drives the three completion strategies:
//!
//! * [`complete_pair`] finds the final two primes (q, r) directly from P by
//!   enumerating the integer pair (A, B) with P·r − 1 = A(q − 1) and
//!   P·q − 1 = B(r − 1);
//! * [`complete_last_prime`] finds the final prime p from the divisors e of
//!   P − 1 with p = e + 1 ≡ P⁻¹ (mod L);
//! * [`early_terminate`] replaces a whole subtree by scanning the ≤ T
//!   remaining candidates Q ≡ P⁻¹ (mod L), Q ≤ X/P, and factoring each.
//!
//! Every number is emitted exactly once: a work unit is a leading prime p_1;
//! three-factor numbers come from pair completion at the unit root and
//! nowhere else, and each deeper number comes from the unique ancestor at
//! which its subtree was either early-terminated or completed by the last
//! prime.

use rayon::prelude::*;

use crate::arith::{self, divisors, factorize, Sieve};
use crate::carmichael::CarmichaelRecord;

/// Bounds and knobs for one enumeration run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Inclusive upper bound X.
    pub limit: u64,
    /// Smallest admissible number of prime factors (≥ 3).
    pub d_min: usize,
    /// Largest admissible number of prime factors; `None` is unbounded.
    pub d_max: Option<usize>,
    /// Early-termination threshold T: a subtree is replaced by a direct scan
    /// once at most this many candidates remain in the progression.
    pub early_term: u64,
    /// Largest-prime split B: records whose largest prime exceeds B are
    /// suppressed (they belong to the large-prime scan). Defaults to √X,
    /// which suppresses nothing since p_d² < N always.
    pub split: u64,
    /// Restrict the run to these leading primes; `None` runs every unit.
    pub partition: Option<Vec<u64>>,
}

impl SearchConfig {
    pub fn new(limit: u64) -> SearchConfig {
        SearchConfig {
            limit,
            d_min: 3,
            d_max: None,
            early_term: 64,
            split: arith::isqrt(limit),
            partition: None,
        }
    }

    fn d_max_or_unbounded(&self) -> usize {
        self.d_max.unwrap_or(usize::MAX)
    }
}

/// An ascending prime prefix with its product and congruence modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixState {
    primes: Vec<u64>,
    product: u64,
    modulus: u64,
}

enum Extend {
    Ok(PrefixState),
    /// The bound prune fired; every larger prime fails it too.
    TooBig,
    /// gcd or lcm obstruction specific to this prime; larger primes may pass.
    Incompatible,
}

impl PrefixState {
    pub fn empty() -> PrefixState {
        PrefixState { primes: Vec::new(), product: 1, modulus: 1 }
    }

    /// The primes p_1 < … < p_r.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// P = ∏ p_i.
    pub fn product(&self) -> u64 {
        self.product
    }

    /// L = lcm(p_i − 1).
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn top(&self) -> u64 {
        *self.primes.last().expect("nonempty prefix")
    }

    /// Extends the prefix by a prime `p` above its top, or rejects: the new
    /// product times the minimal admissible completion must stay within the
    /// limit, the new prime must stay within the split, gcd(P′, L′) must be
    /// 1, and L′ must stay in working range (N ≡ 1 mod L′ with L′ > X would
    /// force N > X anyway).
    pub fn extend(&self, p: u64, cfg: &SearchConfig, sieve: &Sieve) -> Option<PrefixState> {
        match self.try_extend(p, cfg, sieve) {
            Extend::Ok(s) => Some(s),
            _ => None,
        }
    }

    fn try_extend(&self, p: u64, cfg: &SearchConfig, sieve: &Sieve) -> Extend {
        debug_assert!(p >= 3 && arith::is_prime(p), "extend by non-prime {p}");
        debug_assert!(self.primes.last().is_none_or(|&t| p > t), "extend out of order");
        if p > cfg.split {
            return Extend::TooBig;
        }
        let product = match self.product.checked_mul(p) {
            Some(v) if v <= cfg.limit => v,
            _ => return Extend::TooBig,
        };
        let needed = needed_after(self.primes.len() + 1, cfg.d_min);
        if completion_exceeds(sieve, p, needed, u128::from(cfg.limit / product)) {
            return Extend::TooBig;
        }
        let modulus = match arith::lcm(self.modulus, p - 1) {
            Some(l) => l,
            None => return Extend::Incompatible,
        };
        if arith::gcd(product, modulus) != 1 {
            return Extend::Incompatible;
        }
        let mut primes = self.primes.clone();
        primes.push(p);
        Extend::Ok(PrefixState { primes, product, modulus })
    }
}

/// How many more primes the minimal completion of an `r`-prefix needs. A
/// 1- or 2-prefix always needs two more (three-factor numbers are owned by
/// pair completion at the unit root, so a 2-prefix only roots d ≥ 4);
/// deeper prefixes need one, or more if `d_min` demands it.
fn needed_after(r: usize, d_min: usize) -> usize {
    let floor = if r <= 2 { 2 } else { 1 };
    d_min.saturating_sub(r).max(floor)
}

/// Whether the product of the `count` smallest primes above `after` exceeds
/// `budget`. Exact while the primes sit in the sieve; past the sieve it
/// falls back to the lower bound after + 2k, which can only under-reject.
fn completion_exceeds(sieve: &Sieve, after: u64, count: usize, budget: u128) -> bool {
    let mut acc: u128 = 1;
    let lo = sieve.rank_after(after);
    if lo + count <= sieve.primes().len() {
        for &q in &sieve.primes()[lo..lo + count] {
            acc = acc.saturating_mul(u128::from(q));
            if acc > budget {
                return true;
            }
        }
    } else {
        for k in 1..=count as u64 {
            acc = acc.saturating_mul(u128::from(after + 2 * k));
            if acc > budget {
                return true;
            }
        }
    }
    false
}

/// Last-prime completion at a prefix of r ≥ 2 primes: p − 1 must divide
/// P − 1, and p ≡ P⁻¹ (mod L) makes L divide N − 1, so candidates are
/// exactly the divisors e of P − 1 with e + 1 a prime above the prefix,
/// in the right residue class, with P(e + 1) ≤ X.
pub fn complete_last_prime(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    assert!(s.primes.len() >= 2, "last-prime completion needs r >= 2");
    let (pp, ll) = (s.product, s.modulus);
    let inv = arith::inv_mod(pp % ll, ll).expect("gcd(P, L) = 1 is a state invariant");
    let top = s.top();
    let divs = divisors(&factorize(pp - 1, sieve)).expect("u64 divisor counts stay small");
    let mut out = Vec::new();
    for e in divs {
        let p = e + 1;
        if p <= top || p > cfg.split || p % ll != inv {
            continue;
        }
        let n = u128::from(pp) * u128::from(p);
        if n > u128::from(cfg.limit) || !arith::is_prime(p) {
            continue;
        }
        let mut primes = s.primes.clone();
        primes.push(p);
        out.push(emit(n as u64, primes));
    }
    out
}

/// Pair completion: every Carmichael N = P·q·r ≤ X with two primes above
/// the prefix. From q − 1 | P·r − 1 and r − 1 | P·q − 1 there are integers
/// A, B with P·r − 1 = A(q − 1) and P·q − 1 = B(r − 1); then AB > P²,
/// 1 ≤ B ≤ P − 1 with gcd(P, B) = 1, and
/// q = (P(B−1) + B(A−1)) / (AB − P²), strictly decreasing in A. For each B
/// the A range is capped by q ≥ q_min (the next prime above the prefix),
/// making the double loop provably finite.
pub fn complete_pair(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    assert!(!s.primes.is_empty(), "pair completion needs a nonempty prefix");
    let (pp, ll) = (s.product, s.modulus);
    let top = s.top();
    let q_min = u128::from(sieve.next_prime_after(top));
    let p = u128::from(pp);
    let p_sq = p * p;
    let limit = u128::from(cfg.limit);
    let split = u128::from(cfg.split);
    let mut out = Vec::new();
    for b in (1..pp).map(u128::from) {
        if arith::gcd(pp, b as u64) != 1 {
            continue;
        }
        let a_max = (q_min * p_sq + p * (b - 1) - b) / (b * (q_min - 1));
        let mut a = p_sq / b + 1;
        while a <= a_max {
            let den = a * b - p_sq;
            let num = p * (b - 1) + b * (a - 1);
            let q = num / den;
            if q < q_min {
                break;
            }
            a += 1;
            if num % den != 0 {
                continue;
            }
            debug_assert_eq!((p * q - 1) % b, 0, "gcd(P, B) = 1 forces B | Pq - 1");
            let r = (p * q - 1) / b + 1;
            if r <= q || r > split {
                continue;
            }
            let n = p * q * r;
            if n > limit || n % u128::from(ll) != 1 {
                continue;
            }
            if !arith::is_prime(q as u64) || !arith::is_prime(r as u64) {
                continue;
            }
            let mut primes = s.primes.clone();
            primes.push(q as u64);
            primes.push(r as u64);
            out.push(emit(n as u64, primes));
        }
    }
    out.sort_by_key(CarmichaelRecord::n);
    out
}

/// Whether the early-termination scan is due: at most T candidates remain
/// in the progression Q ≡ P⁻¹ (mod L), p_r < Q ≤ X/P.
fn triggers(s: &PrefixState, cfg: &SearchConfig) -> bool {
    let hi = cfg.limit / s.product;
    let top = s.top();
    hi <= top || (hi - top) / s.modulus <= cfg.early_term
}

/// Early termination: enumerate every candidate Q ≡ P⁻¹ (mod L) with
/// p_r < Q ≤ X/P, factor it, and accept N = P·Q when Q is squarefree, all
/// its prime factors lie above the prefix and within the split, each
/// q − 1 divides N − 1, and the total factor count lands in the d window.
/// The congruence already guarantees L | N − 1.
pub fn early_terminate(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    early_complete(s, cfg, sieve, 1)
}

fn early_complete(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve, min_more: usize) -> Vec<CarmichaelRecord> {
    assert!(s.primes.len() >= 2, "early termination needs r >= 2");
    let (pp, ll) = (s.product, s.modulus);
    let top = s.top();
    let hi = cfg.limit / pp;
    if hi <= top {
        return Vec::new();
    }
    let r = s.primes.len();
    let w_min = min_more.max(cfg.d_min.saturating_sub(r)).max(1);
    let w_max = cfg.d_max_or_unbounded().saturating_sub(r);
    if w_min > w_max {
        return Vec::new();
    }
    let inv = arith::inv_mod(pp % ll, ll).expect("gcd(P, L) = 1 is a state invariant");
    let delta = (inv + ll - top % ll) % ll;
    let mut cand = top + if delta == 0 { ll } else { delta };
    let mut out = Vec::new();
    while cand <= hi {
        let f = factorize(cand, sieve);
        let n = pp * cand;
        let w = f.omega() as usize;
        let admissible = (w_min..=w_max).contains(&w)
            && f.is_squarefree()
            && f.factors.first().is_some_and(|&(q, _)| q > top)
            && f.factors.last().is_some_and(|&(q, _)| q <= cfg.split)
            && f.factors.iter().all(|&(q, _)| (n - 1) % (q - 1) == 0);
        if admissible {
            let mut primes = s.primes.clone();
            primes.extend(f.factors.iter().map(|&(q, _)| q));
            out.push(emit(n, primes));
        }
        cand += ll;
    }
    out.sort_by_key(CarmichaelRecord::n);
    out
}

fn emit(n: u64, primes: Vec<u64>) -> CarmichaelRecord {
    CarmichaelRecord::new(n, primes).expect("search emissions satisfy Korselt")
}

/// The subtree walk below a prefix of r ≥ 2 primes. Owns every admissible
/// number with this exact prefix and d ≥ r + 2 factors, plus the d = r + 1
/// completions when r ≥ 3 (a 2-prefix's three-factor numbers belong to pair
/// completion at the unit root).
fn visit(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve, out: &mut Vec<CarmichaelRecord>) {
    let r = s.primes.len();
    if triggers(s, cfg) {
        let min_more = if r == 2 { 2 } else { 1 };
        out.extend(early_complete(s, cfg, sieve, min_more));
        return;
    }
    let d_max = cfg.d_max_or_unbounded();
    if r >= 3 && (cfg.d_min..=d_max).contains(&(r + 1)) {
        out.extend(complete_last_prime(s, cfg, sieve));
    }
    if r + 2 <= d_max {
        for_each_child(s, cfg, sieve, |child| visit(&child, cfg, sieve, out));
    }
}

/// Feeds every accepted child extension to `f`, walking candidate primes in
/// ascending order and stopping at the first bound rejection (which is
/// monotone in the prime).
fn for_each_child(s: &PrefixState, cfg: &SearchConfig, sieve: &Sieve, mut f: impl FnMut(PrefixState)) {
    let top = s.top();
    for &p in &sieve.primes()[sieve.rank_after(top)..] {
        match s.try_extend(p, cfg, sieve) {
            Extend::Ok(child) => f(child),
            Extend::TooBig => return,
            Extend::Incompatible => {}
        }
    }
    // The slice ran out before the bound prune fired: continue segmented.
    let lo = sieve.limit();
    let hi = child_value_cap(s, cfg);
    arith::sieve::for_primes_in(sieve, lo, hi, |p| {
        if let Extend::Ok(child) = s.try_extend(p, cfg, sieve) {
            f(child);
        }
    });
}

/// Hard cap on any child prime of `s`: with k more primes needed after the
/// child, p·(p+2)^k ≤ X/P, so p ≤ (X/P)^(1/(k+1)) is safe to stop at.
fn child_value_cap(s: &PrefixState, cfg: &SearchConfig) -> u64 {
    let budget = cfg.limit / s.product;
    let needed = needed_after(s.primes.len() + 1, cfg.d_min);
    let cap = match needed {
        1 => arith::isqrt(budget),
        _ => arith::icbrt(budget),
    };
    cap.min(cfg.split)
}

/// The leading primes whose units can contribute at all under `cfg`:
/// p_1 ≥ 3 with the minimal completion in bounds, filtered by the
/// partition if one is set.
pub fn work_units(cfg: &SearchConfig, sieve: &Sieve) -> Vec<u64> {
    let root = PrefixState::empty();
    let mut units = Vec::new();
    for &p in &sieve.primes()[sieve.rank_after(2)..] {
        match root.try_extend(p, cfg, sieve) {
            Extend::Ok(_) => units.push(p),
            Extend::TooBig => break,
            Extend::Incompatible => {}
        }
    }
    if let Some(part) = &cfg.partition {
        units.retain(|p| part.contains(p));
    }
    units
}

/// Runs one work unit: pair completion at the root prefix (p_1) when three
/// factors are admissible, then the (p_1, p_2) subtrees in parallel.
pub fn run_unit(p1: u64, cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    let root = match PrefixState::empty().extend(p1, cfg, sieve) {
        Some(s) => s,
        None => return Vec::new(),
    };
    let mut out = Vec::new();
    let d_max = cfg.d_max_or_unbounded();
    if (cfg.d_min..=d_max).contains(&3) {
        out.extend(complete_pair(&root, cfg, sieve));
    }
    if d_max >= 4 {
        let mut children = Vec::new();
        for_each_child(&root, cfg, sieve, |c| children.push(c));
        let found: Vec<Vec<CarmichaelRecord>> = children
            .par_iter()
            .map(|child| {
                let mut v = Vec::new();
                visit(child, cfg, sieve, &mut v);
                v
            })
            .collect();
        out.extend(found.into_iter().flatten());
    }
    out
}

fn validate(cfg: &SearchConfig, sieve: &Sieve) {
    assert!(cfg.limit >= 561, "limit {} below the smallest Carmichael number", cfg.limit);
    assert!(cfg.early_term >= 1, "early-termination threshold must be positive");
    assert!(cfg.d_min >= 3, "d_min {} below 3", cfg.d_min);
    assert!(
        cfg.split <= arith::isqrt(cfg.limit),
        "split {} exceeds sqrt of limit {}",
        cfg.split,
        cfg.limit
    );
    let required = arith::isqrt(cfg.limit / 15).max(arith::icbrt(cfg.limit)) + 600;
    assert!(
        sieve.limit() >= required,
        "sieve bound {} too small for limit {}: need {}",
        sieve.limit(),
        cfg.limit,
        required
    );
}

/// Every Carmichael number N ≤ X whose largest prime factor is ≤ the split,
/// with the configured factor-count window, ascending. Exactly-once
/// emission is asserted on the merged output.
pub fn enumerate_all(cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    validate(cfg, sieve);
    let units = work_units(cfg, sieve);
    let found: Vec<Vec<CarmichaelRecord>> =
        units.par_iter().map(|&p1| run_unit(p1, cfg, sieve)).collect();
    let mut all: Vec<CarmichaelRecord> = found.into_iter().flatten().collect();
    all.sort_by_key(CarmichaelRecord::n);
    for w in all.windows(2) {
        assert!(w[0].n() < w[1].n(), "{} emitted twice", w[0].n());
    }
    all
}

/// The complete list of three-factor Carmichael numbers up to the limit:
/// pair completion over every admissible leading prime, with the split
/// widened to √X so nothing is delegated.
pub fn enumerate_d3(cfg: &SearchConfig, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    let mut cfg3 = cfg.clone();
    cfg3.d_min = 3;
    cfg3.d_max = Some(3);
    cfg3.split = arith::isqrt(cfg.limit);
    validate(&cfg3, sieve);
    let units = work_units(&cfg3, sieve);
    let found: Vec<Vec<CarmichaelRecord>> = units
        .par_iter()
        .map(|&p1| {
            let root = PrefixState::empty().extend(p1, &cfg3, sieve).expect("unit root fits");
            complete_pair(&root, &cfg3, sieve)
        })
        .collect();
    let mut all: Vec<CarmichaelRecord> = found.into_iter().flatten().collect();
    all.sort_by_key(CarmichaelRecord::n);
    for w in all.windows(2) {
        assert!(w[0].n() < w[1].n(), "{} emitted twice", w[0].n());
    }
    all
}

/// The smallest Carmichael number with exactly `d` prime factors, searching
/// under doubling bounds until `cap` is exhausted.
pub fn smallest_with_d(d: usize, cap: u64, sieve: &Sieve) -> Option<u64> {
    assert!(d >= 3, "Carmichael numbers have at least three factors");
    let mut x = 1024u64.min(cap.max(561));
    loop {
        let mut cfg = SearchConfig::new(x);
        cfg.d_min = d;
        cfg.d_max = Some(d);
        let found = enumerate_all(&cfg, sieve);
        if let Some(first) = found.first() {
            return Some(first.n());
        }
        if x >= cap {
            return None;
        }
        x = x.saturating_mul(2).min(cap);
    }
}
