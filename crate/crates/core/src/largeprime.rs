//! Arithmetic-progression scan for Carmichael numbers whose largest prime
//! factor is big.
//!
//! The tree search gets slow exactly where this scan gets fast. A Carmichael
//! number `N = m * p` with largest prime `p` satisfies `p - 1 | N - 1`, and
//! since `N = m * p` with `m = N / p`, that forces `m ≡ 1 (mod p - 1)`. So
//! for a fixed `p` every candidate cofactor lies on the progression
//! `m = 1 + k(p - 1)`, and `m * p <= X` caps `k` at roughly `X / p^2`. When
//! `p` is near `sqrt(X)` there are only a handful of candidates per prime,
//! each settled by one factorization.
//!
//! [`scan`] walks every prime in a half-open range `(p_lo, p_hi]` this way.
//! Together with the tree search capped at `split = p_lo`, the two methods
//! partition the space: each `N` belongs to exactly one method, decided by
//! its largest prime factor.

use rayon::prelude::*;

use crate::arith::sieve::for_primes_in;
use crate::arith::{self, Sieve};
use crate::carmichael::CarmichaelRecord;

/// A half-open prime band `(p_lo, p_hi]` to scan below `limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanRange {
    /// Exclusive lower end: primes `p > p_lo` are scanned. This is the
    /// `split` handed to the tree search, so the methods meet with no gap
    /// and no overlap.
    pub p_lo: u64,
    /// Inclusive upper end. Nothing above `isqrt(limit)` can be the largest
    /// prime of a Carmichael number below `limit`, so that is the natural
    /// ceiling.
    pub p_hi: u64,
    /// Only `N <= limit` are emitted.
    pub limit: u64,
}

impl ScanRange {
    /// The full complement band for a tree search capped at `split`:
    /// `(split, isqrt(limit)]`.
    pub fn above_split(split: u64, limit: u64) -> ScanRange {
        ScanRange {
            p_lo: split,
            p_hi: arith::isqrt(limit),
            limit,
        }
    }

    fn validate(&self) {
        assert!(self.p_lo >= 2, "scan below 3 is vacuous");
        assert!(self.p_lo < self.p_hi, "empty prime band");
        assert!(
            self.p_hi <= arith::isqrt(self.limit),
            "largest prime of N <= {} cannot exceed {}",
            self.limit,
            arith::isqrt(self.limit)
        );
    }
}

/// Scans one prime: walks `m = 1 + k(p - 1)` while `m * p <= limit` and
/// keeps the `m` whose product with `p` satisfies Korselt.
fn scan_prime(p: u64, limit: u64, sieve: &Sieve, out: &mut Vec<CarmichaelRecord>) {
    let cap = limit / p;
    let step = p - 1;
    let mut m = p; // k = 1
    while m <= cap {
        // m = p itself (k = 1) falls to the omega test below.
        let f = arith::factorize(m, sieve);
        let n = m * p;
        let admissible = f.omega() >= 2
            && f.is_squarefree()
            && f.greatest_prime().is_some_and(|q| q < p)
            && f.primes().all(|q| (n - 1) % (q - 1) == 0);
        if admissible {
            let mut primes: Vec<u64> = f.primes().collect();
            primes.push(p);
            out.push(CarmichaelRecord::new(n, primes).expect("scan emissions satisfy Korselt"));
        }
        m += step;
    }
}

/// Enumerates every Carmichael number `N <= limit` whose largest prime
/// factor lies in `(p_lo, p_hi]`, in ascending order.
///
/// `sieve` only has to cover `sqrt(p_hi)` (to stream the primes of the band)
/// and the trial-division bound; cofactors are factorized exactly regardless.
pub fn scan(range: &ScanRange, sieve: &Sieve) -> Vec<CarmichaelRecord> {
    range.validate();
    // Slice the band into subranges for the thread pool. The work per prime
    // shrinks as p grows (fewer progression terms fit under the limit), so
    // many small slices balance better than one per thread.
    const SLICE: u64 = 1 << 18;
    let slices: Vec<(u64, u64)> = (0..)
        .map(|i| range.p_lo + i * SLICE)
        .take_while(|&lo| lo < range.p_hi)
        .map(|lo| (lo, (lo + SLICE).min(range.p_hi)))
        .collect();
    let mut found: Vec<CarmichaelRecord> = slices
        .par_iter()
        .map(|&(lo, hi)| {
            let mut out = Vec::new();
            for_primes_in(sieve, lo, hi, |p| scan_prime(p, range.limit, sieve, &mut out));
            out
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    found.sort_by_key(|r| r.n());
    for w in found.windows(2) {
        assert!(w[0].n() < w[1].n(), "{} emitted twice", w[1].n());
    }
    found
}
