//! Integer helpers shared by the solver and the group code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn big_pow(base: &BigInt, exp: usize) -> BigInt {
    num_traits::pow(base.clone(), exp)
}

pub fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Least positive integer `m` with `m * q` in `modulus * Z`.
///
/// For `q = a/b` in lowest terms this is `b*t / gcd(b*t, a)`.
pub fn least_scaling_into(q: &BigRational, modulus: &BigInt) -> BigInt {
    if q.is_zero() {
        return BigInt::one();
    }
    let bt = q.denom() * modulus.abs();
    let g = bt.gcd(q.numer());
    bt / g
}

/// Least positive integer that is an integral multiple of `q`.
pub fn least_multiple_of(q: &BigRational) -> BigInt {
    // m / (a/b) = m*b/a is integral iff |a| divides m (gcd(a,b)=1).
    q.numer().abs()
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
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

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> alloc::vec::Vec<u64> {
    let mut out = alloc::vec::Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exponent `e` with `value == p^e`, if `value` is a power of `p`.
pub fn exact_log(mut value: u64, p: u64) -> Option<u32> {
    if value == 0 || p < 2 {
        return None;
    }
    let mut e = 0;
    while value.is_multiple_of(p) {
        value /= p;
        e += 1;
    }
    (value == 1).then_some(e)
}
