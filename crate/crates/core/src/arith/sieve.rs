//! Prime sieves: a bit-packed base sieve shared read-only by all workers,
//! and a segmented iterator for prime ranges past the base bound.

/// Bit-packed sieve of Eratosthenes over odd numbers up to `limit`.
///
/// The default bound of 10^6 covers trial-division factoring and every
/// prefix-extension range at desk scale; the driver grows it as the
/// search limit demands.
pub struct Sieve {
    limit: u64,
    // bit i set => 2i+1 is composite (index 0 unused for 1, handled below)
    odd_composite: Vec<u64>,
    primes: Vec<u64>,
}

pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

impl Sieve {
    pub fn new(limit: u64) -> Sieve {
        let limit = limit.max(16);
        let half = (limit as usize + 1) / 2;
        let mut bits = vec![0u64; half / 64 + 1];
        let set = |bits: &mut [u64], i: usize| bits[i / 64] |= 1 << (i % 64);
        set(&mut bits, 0); // 1
        let mut p = 3u64;
        while p * p <= limit {
            if bits[(p / 2) as usize / 64] >> ((p / 2) % 64) & 1 == 0 {
                let mut q = p * p;
                while q <= limit {
                    set(&mut bits, (q / 2) as usize);
                    q += 2 * p;
                }
            }
            p += 2;
        }
        let mut primes = vec![2];
        let mut n = 3u64;
        while n <= limit {
            if bits[(n / 2) as usize / 64] >> ((n / 2) % 64) & 1 == 0 {
                primes.push(n);
            }
            n += 2;
        }
        Sieve { limit, odd_composite: bits, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes up to the bound, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Membership query for `n <= limit`. Panics past the bound.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "sieve query {n} past bound {}", self.limit);
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        self.odd_composite[(n / 2) as usize / 64] >> ((n / 2) % 64) & 1 == 0
    }

    /// Index of the first prime `> n`, as a position into `primes()`.
    pub fn rank_after(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Smallest prime strictly greater than `n`. Panics if that prime lies
    /// past the sieve bound; callers size the sieve for their range.
    pub fn next_prime_after(&self, n: u64) -> u64 {
        *self
            .primes
            .get(self.rank_after(n))
            .unwrap_or_else(|| panic!("next prime after {n} exceeds sieve bound {}", self.limit))
    }

    /// Product of the `count` smallest primes strictly greater than `n`,
    /// widened so it cannot overflow for any sensible `count`.
    pub fn tail_product(&self, n: u64, count: usize) -> u128 {
        let lo = self.rank_after(n);
        assert!(
            lo + count <= self.primes.len(),
            "tail of {count} primes after {n} exceeds sieve bound {}",
            self.limit
        );
        self.primes[lo..lo + count].iter().map(|&p| p as u128).product()
    }
}

/// Calls `f` for every prime in `(lo, hi]`, streaming by segments.
///
/// Needs `base` to cover `sqrt(hi)`.
pub fn for_primes_in(base: &Sieve, lo: u64, hi: u64, mut f: impl FnMut(u64)) {
    if hi <= lo {
        return;
    }
    assert!(
        base.limit() >= super::isqrt(hi),
        "segmented sieve to {hi} needs base primes to {}",
        super::isqrt(hi)
    );
    if lo < base.limit() {
        let capped = hi.min(base.limit());
        for &p in &base.primes()[base.rank_after(lo)..] {
            if p > capped {
                break;
            }
            f(p);
        }
        if hi <= base.limit() {
            return;
        }
    }
    const SEGMENT: u64 = 1 << 19;
    let mut start = (lo + 1).max(base.limit() + 1);
    let mut composite = vec![false; SEGMENT as usize];
    while start <= hi {
        let end = hi.min(start + SEGMENT - 1);
        let width = (end - start + 1) as usize;
        composite[..width].fill(false);
        for &p in base.primes() {
            if p as u128 * p as u128 > end as u128 {
                break;
            }
            let mut q = start.div_ceil(p) * p;
            if q < p * p {
                q = p * p;
            }
            while q <= end {
                composite[(q - start) as usize] = true;
                q += p;
            }
        }
        for i in 0..width {
            if !composite[i] {
                f(start + i as u64);
            }
        }
        start = end + 1;
    }
}
