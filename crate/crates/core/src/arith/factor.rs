//! Exact factorization: trial division over sieve primes, then a
//! deterministic Brent cycle-finding fallback for hard cofactors.

use super::{gcd, is_prime, mul_mod, Sieve};

/// Prime factorization in ascending prime order, exponents exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Recomposes the factored value.
    pub fn value(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn least_prime(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn greatest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_prime_value(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

// Brent's variant of the rho cycle finder with batched gcd, for one offset c.
// Returns a factor in (1, n] — n itself means this offset failed.
fn rho_with(n: u64, c: u64) -> u64 {
    let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let mut y = 2u64;
    let mut x = y;
    let mut ys = y;
    let mut d = 1u64;
    let mut r = 1u64;
    let mut q = 1u64;
    while d == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && d == 1 {
            ys = y;
            let batch = 128.min(r - k);
            for _ in 0..batch {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            d = gcd(q, n);
            k += batch;
        }
        r *= 2;
    }
    if d == n {
        // Batched gcd overshot the collision: replay one step at a time.
        d = 1;
        while d == 1 {
            ys = f(ys);
            d = gcd(x.abs_diff(ys), n);
        }
    }
    d
}

// Deterministic: the polynomial offset steps through 1, 2, 3, ... until a
// split appears.
fn rho_split(n: u64) -> u64 {
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    (1u64..)
        .map(|c| rho_with(n, c))
        .find(|&d| d != n && d != 1)
        .expect("rho: some offset must split a composite")
}

fn push_prime(out: &mut Vec<(u64, u32)>, p: u64) {
    if let Some(last) = out.last_mut() {
        if last.0 == p {
            last.1 += 1;
            return;
        }
    }
    out.push((p, 1));
}

fn split_recursive(n: u64, out: &mut Vec<u64>) {
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_split(n);
    split_recursive(d, out);
    split_recursive(n / d, out);
}

// Trial division stops at this bound before handing the cofactor to the
// primality test and rho; dividing a large prime cofactor by every sieve
// prime would dominate the search's hot path.
const TRIAL_BOUND: u64 = 8_192;

/// Factorizes `n >= 1` exactly. The sieve supplies the trial-division
/// primes; hard cofactors go through deterministic rho splitting.
pub fn factorize(n: u64, sieve: &Sieve) -> Factorization {
    assert!(n >= 1, "factorize: zero");
    let mut out = Vec::new();
    let mut cof = n;
    let covered = TRIAL_BOUND.min(sieve.limit());
    for &p in sieve.primes() {
        if p > TRIAL_BOUND || p * p > cof {
            break;
        }
        while cof % p == 0 {
            push_prime(&mut out, p);
            cof /= p;
        }
    }
    if cof > 1 {
        // No factor <= covered survived trial division, so a cofactor
        // below covered^2 is prime outright.
        if cof <= covered * covered || is_prime(cof) {
            push_prime(&mut out, cof);
        } else {
            let mut hard = Vec::new();
            split_recursive(cof, &mut hard);
            hard.sort_unstable();
            for p in hard {
                push_prime(&mut out, p);
            }
        }
    }
    out.sort_unstable();
    // merge equal primes that sorting may have made adjacent
    let mut merged: Vec<(u64, u32)> = Vec::with_capacity(out.len());
    for (p, e) in out {
        if let Some(last) = merged.last_mut() {
            if last.0 == p {
                last.1 += e;
                continue;
            }
        }
        merged.push((p, e));
    }
    Factorization { factors: merged }
}

/// All divisors of the factored value, ascending.
///
/// Refuses (returns `None`) when the divisor count exceeds 2^24, the
/// explosion guard for adversarial inputs.
pub fn divisors(f: &Factorization) -> Option<Vec<u64>> {
    let mut count: u64 = 1;
    for &(_, e) in &f.factors {
        count = count.checked_mul(e as u64 + 1)?;
        if count > 1 << 24 {
            return None;
        }
    }
    let mut out = vec![1u64];
    for &(p, e) in &f.factors {
        let prev = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..prev {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Some(out)
}
