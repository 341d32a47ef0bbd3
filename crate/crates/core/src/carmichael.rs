//! The Korselt predicate and per-number invariants.
//!
//! A Carmichael number is a composite N such that b^(N−1) ≡ 1 (mod N) for
//! every b prime to N. Korselt's criterion turns that into pure divisibility:
//! N qualifies iff it is squarefree with at least three prime factors and
//! p−1 | N−1 for every prime p | N. Everything downstream uses the
//! divisibility form; [`fermat_oracle`] keeps the congruence form alive as an
//! independent cross-check.

use serde::{Deserialize, Serialize};

use crate::arith::{self, factorize, Factorization, Sieve};

/// Largest `n` the brute-force oracle accepts. One call costs O(n) modular
/// exponentiations, so the cap keeps an accidental loop over oracle calls
/// from going quadratic.
pub const ORACLE_CAP: u64 = 1_000_000;

/// Korselt's criterion for `n` with factorization `f` (which must be the
/// factorization of `n`): squarefree, at least three prime factors, and
/// p−1 | n−1 for every prime p | n.
pub fn korselt(n: u64, f: &Factorization) -> bool {
    f.omega() >= 3 && f.is_squarefree() && f.factors.iter().all(|&(p, _)| (n - 1) % (p - 1) == 0)
}

/// Whether `n` is a Carmichael number, by factorizing and applying
/// [`korselt`].
pub fn is_carmichael(n: u64, sieve: &Sieve) -> bool {
    if n < 3 {
        return false;
    }
    korselt(n, &factorize(n, sieve))
}

/// The Carmichael function λ: the exponent of the multiplicative group
/// mod the factorized value. For squarefree odd n this is lcm(p−1); prime
/// powers contribute p^(e−1)(p−1), except 2^e with e ≥ 3 contributing
/// 2^(e−2).
///
/// Returns `None` if the lcm leaves the working range, which cannot happen
/// for values up to 10^18 (λ(n) < n, and every partial lcm divides λ(n)).
pub fn carmichael_lambda(f: &Factorization) -> Option<u64> {
    let mut l = 1u64;
    for &(p, e) in &f.factors {
        let local = if p == 2 {
            match e {
                1 => 1,
                2 => 2,
                _ => 1u64 << (e - 2),
            }
        } else {
            p.pow(e - 1) * (p - 1)
        };
        l = arith::lcm(l, local)?;
    }
    Some(l)
}

/// Euler's totient of the factorized value: ∏ p^(e−1)(p−1).
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors.iter().map(|&(p, e)| p.pow(e - 1) * (p - 1)).product()
}

/// The index i(N) = (N−1)/λ(N), an exact integer ≥ 5 for every Carmichael
/// number. Returns `None` when `n` (with factorization `f`) is not
/// Carmichael.
pub fn index_of(n: u64, f: &Factorization) -> Option<u64> {
    if !korselt(n, f) {
        return None;
    }
    // Korselt gives λ | n−1, and λ ≤ n−1 keeps the lcm in range.
    let l = carmichael_lambda(f)?;
    Some((n - 1) / l)
}

/// The Lehmer index ℓ(N) = (N−1)/φ(N) as an exact rational. Meaningful for
/// composite N, where ℓ > 1; Lehmer's totient problem asks whether ℓ can be
/// an integer.
pub fn lehmer_index(n: u64, f: &Factorization) -> LehmerIndex {
    LehmerIndex { num: n - 1, den: euler_phi(f) }
}

/// Exact rational (N−1)/φ(N). Comparisons cross-multiply in 128 bits;
/// nothing here rounds except the explicit decimal renderer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LehmerIndex {
    pub num: u64,
    pub den: u64,
}

impl LehmerIndex {
    /// Exact `self > t` for an integer threshold `t`.
    pub fn exceeds_integer(&self, t: u64) -> bool {
        u128::from(self.num) > u128::from(t) * u128::from(self.den)
    }

    /// Exact `self >= t` for an integer threshold `t`.
    pub fn at_least_integer(&self, t: u64) -> bool {
        u128::from(self.num) >= u128::from(t) * u128::from(self.den)
    }

    /// Whether the index is an integer, i.e. the denominator divides the
    /// numerator exactly. For a Carmichael number this asks whether
    /// phi(N) | N - 1, the open Lehmer question.
    pub fn is_integer(&self) -> bool {
        self.num % self.den == 0
    }

    /// Five decimal places, rounding ties to even.
    pub fn to_decimal(&self) -> String {
        let scaled = u128::from(self.num) * 100_000;
        let den = u128::from(self.den);
        let mut q = scaled / den;
        let r = scaled % den;
        if 2 * r > den || (2 * r == den && q % 2 == 1) {
            q += 1;
        }
        format!("{}.{:05}", q / 100_000, q % 100_000)
    }
}

impl PartialOrd for LehmerIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LehmerIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let lhs = u128::from(self.num) * u128::from(other.den);
        let rhs = u128::from(other.num) * u128::from(self.den);
        lhs.cmp(&rhs)
    }
}

/// A verified Carmichael number: the value, its ascending prime factors, and
/// the two derived invariants every report needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarmichaelRecord {
    n: u64,
    primes: Vec<u64>,
    index: u64,
    lehmer: LehmerIndex,
}

/// Why a claimed (n, primes) pair is not a valid record.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("factors are not strictly ascending")]
    NotAscending,
    #[error("factor {0} is not prime")]
    NotPrime(u64),
    #[error("factors of {expected} multiply to {found}")]
    ProductMismatch { expected: u64, found: u128 },
    #[error("{0} fails the Korselt condition")]
    NotCarmichael(u64),
}

impl CarmichaelRecord {
    /// Validates everything: ascending certified primes multiplying to `n`,
    /// the Korselt condition, and computes index and Lehmer index.
    pub fn new(n: u64, primes: Vec<u64>) -> Result<CarmichaelRecord, RecordError> {
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RecordError::NotAscending);
        }
        if let Some(&p) = primes.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(RecordError::NotPrime(p));
        }
        let product = primes.iter().fold(1u128, |acc, &p| acc * u128::from(p));
        if product != u128::from(n) {
            return Err(RecordError::ProductMismatch { expected: n, found: product });
        }
        let f = Factorization { factors: primes.iter().map(|&p| (p, 1)).collect() };
        let index = index_of(n, &f).ok_or(RecordError::NotCarmichael(n))?;
        let lehmer = lehmer_index(n, &f);
        Ok(CarmichaelRecord { n, primes, index, lehmer })
    }

    /// Builds a record without re-verifying. For callers that have already
    /// established the invariants (the search engine proves them on the way
    /// to each emission).
    pub fn from_parts_unchecked(n: u64, primes: Vec<u64>, index: u64, lehmer: LehmerIndex) -> CarmichaelRecord {
        CarmichaelRecord { n, primes, index, lehmer }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Ascending prime factors.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of prime factors d.
    pub fn d(&self) -> usize {
        self.primes.len()
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn lehmer(&self) -> LehmerIndex {
        self.lehmer
    }
}

/// The congruence-form test, independent of [`korselt`] and of the fast
/// primality kernel: `n` is composite (established by trial division) and
/// b^(n−1) ≡ 1 (mod n) for every b in [2, n−1] prime to n.
///
/// The upper end of the b range is inclusive. b = n−1 contributes
/// (−1)^(n−1), which is 1 exactly when n is odd, so including it rules out
/// the two small even composites (4 and 6) whose smaller residues are all
/// non-coprime, and changes nothing else.
///
/// Panics outside 3 ≤ n ≤ [`ORACLE_CAP`].
pub fn fermat_oracle(n: u64) -> bool {
    assert!((3..=ORACLE_CAP).contains(&n), "fermat_oracle: {n} outside 3..={ORACLE_CAP}");
    if !trial_composite(n) {
        return false;
    }
    (2..=n - 1)
        .filter(|&b| arith::gcd(b, n) == 1)
        .all(|b| arith::pow_mod(b, n - 1, n) == 1)
}

/// Compositeness by plain trial division, so the oracle shares no code with
/// the Miller–Rabin kernel it cross-checks.
fn trial_composite(n: u64) -> bool {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return true;
        }
        d += 1;
    }
    false
}

/// Every Carmichael number ≤ `limit` by exhaustive application of
/// [`fermat_oracle`], ascending, with verified factorizations attached.
///
/// Panics if `limit` exceeds [`ORACLE_CAP`].
pub fn brute_scan(limit: u64) -> Vec<CarmichaelRecord> {
    assert!(limit <= ORACLE_CAP, "brute_scan: {limit} exceeds {ORACLE_CAP}");
    let sieve = Sieve::new(1 << 10);
    (3..=limit)
        .filter(|&n| fermat_oracle(n))
        .map(|n| {
            let f = factorize(n, &sieve);
            CarmichaelRecord::new(n, f.primes().collect()).expect("oracle hits satisfy Korselt")
        })
        .collect()
}
