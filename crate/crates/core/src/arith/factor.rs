//! Integer factorisation for the sizes that appear in heights and product
//! formulas: trial division, then Pollard–Brent with Miller–Rabin.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const TRIAL_LIMIT: u64 = 1 << 12;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigUint::from(2u32), BigUint::from(2u32), one.clone());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += 1,
        None => out.push((p, 1)),
    }
}

fn split_big(n: BigUint, out: &mut Vec<(u64, u32)>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        return split_u64(small, out);
    }
    if is_probable_prime_big(&n) {
        return Err(Error::Unsupported(format!(
            "prime factor {n} exceeds the 64-bit place range"
        )));
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    split_big(d, out)?;
    split_big(rest, out)
}

fn split_u64(n: u64, out: &mut Vec<(u64, u32)>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime_u64(n) {
        push_factor(out, n);
        return Ok(());
    }
    let d = rho_u64(n);
    split_u64(d, out)?;
    split_u64(n / d, out)
}

/// Prime factorisation of a positive integer as sorted `(p, e)` pairs.
pub fn factor(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::Argument("cannot factor zero".into()));
    }
    let mut out = Vec::new();
    let mut n = n.clone();
    let mut p = 2u64;
    while p < TRIAL_LIMIT {
        let bp = BigUint::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            push_factor(&mut out, p);
        }
        if n.is_one() {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_big(n, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

pub fn factor_u64(n: u64) -> Result<Vec<(u64, u32)>> {
    factor(&BigUint::from(n))
}

/// Primes `p ≤ n` by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether `|d| > 1` (or `d = -1`) has no square factor.
pub fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match factor_u64(d.unsigned_abs()) {
        Ok(f) => f.iter().all(|&(_, e)| e == 1),
        Err(_) => false,
    }
}
