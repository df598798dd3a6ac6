//! Fibonacci and Lucas numbers modulo arbitrary moduli, periods modulo a
//! prime, and the closed-form test for moduli at which every residue occurs.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(F(n) mod m, F(n+1) mod m)` for a machine-word modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibPair {
    pub n: u64,
    pub m: u64,
    pub f_n: u64,
    pub f_n1: u64,
}

impl FibPair {
    pub fn initial(m: u64) -> Result<Self> {
        check_modulus(m)?;
        Ok(FibPair { n: 0, m, f_n: 0, f_n1: 1 % m })
    }

    /// Steps the recurrence once.
    pub fn advance(&self) -> FibPair {
        FibPair {
            n: self.n + 1,
            m: self.m,
            f_n: self.f_n1,
            f_n1: add_mod(self.f_n, self.f_n1, self.m),
        }
    }

    pub fn lucas(&self) -> u64 {
        // L(n) = 2F(n+1) - F(n)
        sub_mod(add_mod(self.f_n1, self.f_n1, self.m), self.f_n, self.m)
    }
}

fn check_modulus(m: u64) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!("modulus must be at least 2, got {m}")));
    }
    Ok(())
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let (s, carry) = a.overflowing_add(b);
    if carry || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// Fast doubling: F(2k) = F(k)(2F(k+1) - F(k)), F(2k+1) = F(k)^2 + F(k+1)^2.
pub fn fib_pair_mod(n: u64, m: u64) -> Result<FibPair> {
    check_modulus(m)?;
    let (mut a, mut b) = (0u64, 1u64 % m);
    for bit in (0..64 - n.leading_zeros()).rev() {
        let two_b_minus_a = sub_mod(add_mod(b, b, m), a, m);
        let c = mul_mod(a, two_b_minus_a, m);
        let d = add_mod(mul_mod(a, a, m), mul_mod(b, b, m), m);
        if (n >> bit) & 1 == 1 {
            a = d;
            b = add_mod(c, d, m);
        } else {
            a = c;
            b = d;
        }
    }
    Ok(FibPair { n, m, f_n: a, f_n1: b })
}

/// Fast doubling over big integers; returns `(F(n) mod m, F(n+1) mod m)`.
pub fn fib_pair_mod_big(n: &BigUint, m: &BigUint) -> Result<(BigUint, BigUint)> {
    if *m < BigUint::from(2u8) {
        return Err(Error::invalid(format!("modulus must be at least 2, got {m}")));
    }
    let mut a = BigUint::zero();
    let mut b = BigUint::one() % m;
    for bit in (0..n.bits()).rev() {
        // 2b - a, kept non-negative by adding m
        let two_b_minus_a = ((&b << 1u32) + m - &a) % m;
        let c = (&a * two_b_minus_a) % m;
        let d = (&a * &a + &b * &b) % m;
        if n.bit(bit) {
            b = (&c + &d) % m;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    Ok((a, b))
}

pub fn fib_mod(n: u64, m: u64) -> Result<u64> {
    Ok(fib_pair_mod(n, m)?.f_n)
}

pub fn lucas_mod(n: u64, m: u64) -> Result<u64> {
    Ok(fib_pair_mod(n, m)?.lucas())
}

pub fn lucas_mod_big(n: &BigUint, m: &BigUint) -> Result<BigUint> {
    let (f, f1) = fib_pair_mod_big(n, m)?;
    Ok(((f1 << 1u32) + m - f) % m)
}

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

pub fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// The Legendre symbol (p/5).
pub fn epsilon(p: u64) -> Result<i8> {
    require_prime(p)?;
    Ok(match p % 5 {
        0 => 0,
        1 | 4 => 1,
        _ => -1,
    })
}

/// Euler's criterion for a nonzero residue modulo an odd prime.
pub fn is_quadratic_residue(x: u64, p: u64) -> bool {
    let x = x % p;
    x != 0 && pow_mod(x, (p - 1) / 2, p) == 1
}

/// A square root of `x` modulo an odd prime (Tonelli–Shanks), if one exists.
pub fn sqrt_mod_prime(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    if x == 0 {
        return Some(0);
    }
    if !is_quadratic_residue(x, p) {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while is_quadratic_residue(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(x, q, p);
    let mut r = pow_mod(x, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (q, k) in num_prime::nt_funcs::factorize64(n) {
        let len = divs.len();
        let mut power = 1u64;
        for _ in 0..k {
            power *= q;
            for idx in 0..len {
                divs.push(divs[idx] * power);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// How the restricted period is located.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphaSearch {
    /// Scan the sorted divisors of p - ε.
    #[default]
    Divisors,
    /// Walk the recurrence until the first zero. O(p), kept for auditing.
    Linear,
}

/// α(p): the least m ≥ 1 with F(m) ≡ 0 mod p.
pub fn restricted_period(p: u64, search: AlphaSearch) -> Result<u64> {
    require_prime(p)?;
    match p {
        2 => return Ok(3),
        5 => return Ok(5),
        _ => {}
    }
    match search {
        AlphaSearch::Divisors => {
            let eps = epsilon(p)?;
            let bound = if eps == 1 { p - 1 } else { p + 1 };
            for d in divisors(bound) {
                if fib_mod(d, p)? == 0 {
                    return Ok(d);
                }
            }
            Err(Error::inconsistent(format!(
                "no divisor d of {bound} has F(d) = 0 mod {p}"
            )))
        }
        AlphaSearch::Linear => {
            let mut pair = FibPair::initial(p)?.advance();
            while pair.f_n != 0 {
                pair = pair.advance();
            }
            Ok(pair.n)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodInfo {
    pub p: u64,
    pub epsilon: i8,
    pub alpha: u64,
    pub pi: u64,
    /// π(p)/α(p): 4 when α is odd, 1 when α ≡ 2 mod 4, 2 when 4 | α.
    pub ratio_class: u8,
}

pub fn period_info(p: u64) -> Result<PeriodInfo> {
    period_info_with(p, AlphaSearch::Divisors)
}

pub fn period_info_with(p: u64, search: AlphaSearch) -> Result<PeriodInfo> {
    let epsilon = epsilon(p)?;
    let alpha = restricted_period(p, search)?;
    let ratio_class = if p == 2 {
        1
    } else if alpha % 2 == 1 {
        4
    } else if alpha % 4 == 2 {
        1
    } else {
        2
    };
    let pi = alpha * ratio_class as u64;
    let check = fib_pair_mod(pi, p)?;
    if check.f_n != 0 || check.f_n1 != 1 {
        return Err(Error::inconsistent(format!(
            "derived period {pi} for p = {p} does not return to (0, 1)"
        )));
    }
    Ok(PeriodInfo { p, epsilon, alpha, pi, ratio_class })
}

/// Whether the Fibonacci sequence attains every residue modulo `m`:
/// exactly when m = 5^k·m' with m' ∈ {2, 4, 6, 7, 14} or a power of 3.
pub fn attains_all_residues(m: u64) -> Result<bool> {
    check_modulus(m)?;
    let mut rest = m;
    while rest.is_multiple_of(5) {
        rest /= 5;
    }
    if matches!(rest, 2 | 4 | 6 | 7 | 14) {
        return Ok(true);
    }
    while rest.is_multiple_of(3) {
        rest /= 3;
    }
    Ok(rest == 1)
}

/// ν_p(n) for a nonzero big integer.
pub fn valuation_big(n: &BigUint, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigUint::from(p);
    let mut v = 0;
    let mut n = n.clone();
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}
