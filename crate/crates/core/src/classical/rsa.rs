//! Textbook RSA on 64-bit integers. Not a cryptosystem: no padding and no
//! big-integer arithmetic.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsaKeySet {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub phi: u64,
    /// Public exponent.
    pub l: u64,
    /// Private exponent, `k l = 1 mod phi`.
    pub k: u64,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// `base^exp mod m` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m = m as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn rsa_keygen(p: u64, q: u64, l: u64) -> Result<RsaKeySet> {
    if p == q || !is_prime(p) || !is_prime(q) {
        return Err(Error::InvalidInput(format!(
            "p = {p} and q = {q} must be distinct primes"
        )));
    }
    let n = p
        .checked_mul(q)
        .ok_or_else(|| Error::InvalidInput("p q overflows 64 bits".into()))?;
    let phi = (p - 1) * (q - 1);
    if l <= 1 || l >= phi || gcd(l, phi) != 1 {
        return Err(Error::InvalidExponent { exponent: l, phi });
    }
    let k = mod_inverse(l, phi).ok_or(Error::InvalidExponent { exponent: l, phi })?;
    Ok(RsaKeySet { p, q, n, phi, l, k })
}

pub fn rsa_encrypt(m: u64, l: u64, n: u64) -> Result<u64> {
    if m >= n {
        return Err(Error::MessageTooLarge { message: m, modulus: n });
    }
    Ok(mod_pow(m, l, n))
}

pub fn rsa_decrypt(e: u64, k: u64, n: u64) -> Result<u64> {
    if e >= n {
        return Err(Error::MessageTooLarge { message: e, modulus: n });
    }
    Ok(mod_pow(e, k, n))
}
