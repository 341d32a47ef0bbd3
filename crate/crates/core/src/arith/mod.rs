//! Exact arithmetic on the working range of 64-bit naturals.
//!
//! Every operation here is exact: products are widened to 128 bits before
//! reduction, primality is decided by a deterministic strong-probable-prime
//! base set, and anything that could leave the working range `[0, 10^18]`
//! signals instead of wrapping.

pub mod big;
pub mod factor;
pub mod sieve;

pub use factor::{divisors, factorize, Factorization};
pub use sieve::Sieve;

/// Upper end of the working range. Values beyond this are treated as
/// overflow by [`lcm`] and pruned by callers.
pub const WORKING_LIMIT: u64 = 1_000_000_000_000_000_000;

/// `(a * b) mod m` without overflow.
///
/// Panics if `m == 0`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    assert!(m > 0, "mul_mod: zero modulus");
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by square-and-multiply.
///
/// Panics if `m == 0`.
pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    assert!(m > 0, "pow_mod: zero modulus");
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple, or `None` once the exact value leaves the
/// working range. Callers inside the search treat `None` as a prune:
/// a candidate `N <= X <= 10^18` with `N ≡ 1 (mod L)` cannot exist
/// for `L` past the range.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    let v = (a / gcd(a, b)) as u128 * b as u128;
    if v > WORKING_LIMIT as u128 {
        None
    } else {
        Some(v as u64)
    }
}

/// Modular inverse of `a` mod `m`, or `None` when `gcd(a, m) != 1`.
///
/// Panics if `m == 0`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    assert!(m > 0, "inv_mod: zero modulus");
    if m == 1 {
        return Some(0);
    }
    // Extended Euclid on (a mod m, m), tracking only the x coefficient.
    let (mut r0, mut r1) = (a % m, m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q as i128 * s1);
    }
    if r0 != 1 {
        return None;
    }
    let m = m as i128;
    Some(((s0 % m + m) % m) as u64)
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |v| v <= n) {
        r += 1;
    }
    r
}

/// Floor of the cube root.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r > 0 && (r as u128).pow(3) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(3) <= n as u128 {
        r += 1;
    }
    r
}

fn sprp(n: u64, base: u64) -> bool {
    // n odd, n > 2. Write n-1 = d * 2^s.
    let b = base % n;
    if b == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(b, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for the full u64 range.
///
/// Strong-probable-prime tests over published base sets: {2, 7, 61} decides
/// everything below 4759123141, and the seven-base set below is exhaustive
/// to 3.3e24, far past the 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    if n < 4_759_123_141 {
        [2, 7, 61].iter().all(|&b| sprp(n, b))
    } else {
        [2, 325, 9375, 28178, 450775, 9780504, 1795265022]
            .iter()
            .all(|&b| sprp(n, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_mod_exact_at_range_edge() {
        assert_eq!(
            mul_mod(999_999_999_999_999_989, 2, 1_000_000_000_000_000_000),
            999_999_999_999_999_978
        );
        assert_eq!(mul_mod(0, 0, 1), 0);
        assert_eq!(mul_mod(u64::MAX, u64::MAX, u64::MAX), 0);
    }

    #[test]
    #[should_panic(expected = "zero modulus")]
    fn mul_mod_rejects_zero_modulus() {
        mul_mod(1, 1, 0);
    }

    #[test]
    fn pow_mod_fermat_witnesses() {
        // 341 = 11*31 is a base-2 pseudoprime but not base-3.
        assert_eq!(pow_mod(2, 340, 341), 1);
        assert_eq!(pow_mod(3, 340, 341), 56);
        assert_eq!(pow_mod(5, 0, 7), 1);
        assert_eq!(pow_mod(5, 3, 1), 0);
        assert_eq!(pow_mod(2, 64, 97), {
            let mut x = 1u64;
            for _ in 0..64 {
                x = x * 2 % 97;
            }
            x
        });
    }

    #[test]
    fn gcd_lcm_small() {
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(lcm(2, 10).unwrap(), 16), Some(80));
        assert_eq!(lcm(0, 7), Some(0));
    }

    #[test]
    fn lcm_signals_overflow_past_working_range() {
        assert_eq!(lcm(WORKING_LIMIT, 3), None);
        assert_eq!(lcm(WORKING_LIMIT, 2), Some(WORKING_LIMIT));
        // Coprime halves whose product just exceeds 1e18.
        assert_eq!(lcm(1_000_000_007, 1_000_000_009), None);
    }

    #[test]
    fn inv_mod_examples() {
        assert_eq!(inv_mod(3, 80), Some(27));
        assert_eq!(inv_mod(33, 10), Some(7));
        assert_eq!(inv_mod(4, 8), None);
        assert_eq!(inv_mod(1, 1), Some(0));
        // round trip on a large modulus
        let m = 999_999_999_989; // prime
        let a = 123_456_789_123;
        let inv = inv_mod(a, m).unwrap();
        assert_eq!(mul_mod(a, inv, m), 1);
    }

    #[test]
    fn isqrt_icbrt_edges() {
        for n in 0..2_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "isqrt({n})");
            let c = icbrt(n);
            assert!(c.pow(3) <= n && (c + 1).pow(3) > n, "icbrt({n})");
        }
        assert_eq!(isqrt(u64::MAX), (1 << 32) - 1);
        assert_eq!(isqrt(100_000), 316);
        assert_eq!(icbrt(1_000_000_000_000), 10_000);
        assert_eq!(icbrt(u64::MAX), 2_642_245);
    }

    #[test]
    fn is_prime_exhaustive_against_trial_division() {
        fn trial(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        for n in 0..60_000u64 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn is_prime_large_known_values() {
        assert!(is_prime(4_759_123_129)); // last prime before the base-set switch
        assert!(is_prime(4_759_123_151)); // first prime after it
        assert!(is_prime(1_000_000_000_039));
        assert!(is_prime(704_988_733));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime(4_759_123_141));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(1_000_000_000_041));
        assert!(!is_prime(994_018_226_608_901_845));
    }
}
