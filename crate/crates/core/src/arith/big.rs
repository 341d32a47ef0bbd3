//! Arbitrary-precision path used only to verify very large records; the
//! search itself stays inside u64. Primality here is a strong base-2 test
//! plus a strong Lucas test — exhaustive for u64 inputs (those are handed
//! to the deterministic 64-bit tester) and standard practice above.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::Sieve;

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

/// Strong probable-prime test to the given base.
fn big_sprp(n: &BigUint, base: u64) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let b = big(base) % n;
    if b.is_zero() {
        return true;
    }
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let mut x = b.modpow(&d, n);
    if x.is_one() || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&big(2), n);
        if x == nm1 {
            return true;
        }
    }
    false
}

// Strong Lucas probable-prime test with Selfridge's parameter choice.
fn big_strong_lucas(n: &BigUint) -> bool {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let nb = BigInt::from(n.clone());
    // Find D = 5, -7, 9, -11, ... with jacobi(D, n) = -1.
    let mut d = BigInt::from(5);
    loop {
        let j = jacobi(&d, &nb);
        if j == 0 {
            // d shares a factor with n; n composite unless |d| == n
            return nb == d.clone().abs();
        }
        if j == -1 {
            break;
        }
        d = if d > BigInt::zero() { -(d + 2u32) } else { -(d - 2u32) };
    }
    let p = BigInt::one();
    let q = (BigInt::one() - &d) / BigInt::from(4);

    // n + 1 = t * 2^s
    let np1 = &nb + BigInt::one();
    let s = np1.trailing_zeros().unwrap_or(0);
    let t = &np1 >> s;

    // Lucas sequences U_t, V_t by binary ladder.
    let (mut u, mut v) = (BigInt::zero(), BigInt::from(2));
    let mut qk = BigInt::one();
    let half = (&nb + BigInt::one()) / BigInt::from(2); // inverse of 2 mod n (n odd)
    let bits = t.bits();
    for i in (0..bits).rev() {
        // double: U_{2k} = U_k V_k, V_{2k} = V_k^2 - 2 Q^k
        u = (&u * &v).mod_floor(&nb);
        v = (&v * &v - (&qk << 1u32)).mod_floor(&nb);
        qk = (&qk * &qk).mod_floor(&nb);
        if t.bit(i) {
            // increment: U_{k+1} = (P U_k + V_k)/2, V_{k+1} = (D U_k + P V_k)/2
            let u1 = ((&p * &u + &v) * &half).mod_floor(&nb);
            let v1 = ((&d * &u + &p * &v) * &half).mod_floor(&nb);
            u = u1;
            v = v1;
            qk = (&qk * &q).mod_floor(&nb);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = (&v * &v - (&qk << 1u32)).mod_floor(&nb);
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk).mod_floor(&nb);
    }
    false
}

fn jacobi(a: &num_bigint::BigInt, n: &num_bigint::BigInt) -> i32 {
    use num_bigint::BigInt;
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut result = 1i32;
    let zero = BigInt::zero();
    let three = BigInt::from(3);
    let four = BigInt::from(4);
    let five = BigInt::from(5);
    let eight = BigInt::from(8);
    while a != zero {
        while a.is_even() {
            a /= 2;
            let r = n.mod_floor(&eight);
            if r == three || r == five {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            result = -result;
        }
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Primality for arbitrary-size naturals. Exact below 2^64; base-2 strong
/// probable prime plus strong Lucas above.
pub fn big_is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return super::is_prime(small);
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if (n % big(p)).is_zero() {
            return false;
        }
    }
    big_sprp(n, 2) && big_strong_lucas(n)
}

/// Outcome of a budgeted factorization attempt.
pub enum BigFactoring {
    /// Distinct ascending prime factors with exponents.
    Done(Vec<(BigUint, u32)>),
    /// Budget exhausted before the number split completely.
    Inconclusive,
}

/// Factorizes with trial division over the sieve primes, then rho with an
/// iteration budget. Large verified records are smooth in practice, so the
/// budget exists only to turn pathological inputs into an explicit
/// inconclusive status instead of an unbounded loop.
pub fn big_factorize(n: &BigUint, sieve: &Sieve, rho_budget: u64) -> BigFactoring {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut cof = n.clone();
    for &p in sieve.primes() {
        if cof.is_one() {
            break;
        }
        let pb = big(p);
        if &pb * &pb > cof {
            break;
        }
        while (&cof % &pb).is_zero() {
            push(&mut out, pb.clone());
            cof /= &pb;
        }
    }
    let mut stack = vec![cof];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if big_is_prime(&m) {
            push(&mut out, m);
            continue;
        }
        match big_rho(&m, rho_budget) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => return BigFactoring::Inconclusive,
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    BigFactoring::Done(out)
}

fn push(out: &mut Vec<(BigUint, u32)>, p: BigUint) {
    if let Some(e) = out.iter_mut().find(|e| e.0 == p) {
        e.1 += 1;
    } else {
        out.push((p, 1));
    }
}

fn big_rho(n: &BigUint, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let two = big(2);
    let mut spent = 0u64;
    for c in 1u64..64 {
        let cb = big(c);
        let f = |x: &BigUint| (x * x + &cb) % n;
        let mut x = two.clone();
        let mut y = two.clone();
        let mut d = one.clone();
        while d.is_one() {
            if spent >= budget {
                return None;
            }
            spent += 1;
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle without split; next offset
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && &d != n {
            return Some(d);
        }
    }
    None
}
