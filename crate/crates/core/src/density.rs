//! Lucas zeros, the Wall exponent and the exact limiting density dens(p).
//!
//! For p ∉ {2, 3, 5},
//!
//! ```text
//! dens(p) = N/p^e + Z/(2·p^(2e-1)·(p + 1))
//! ```
//!
//! where e = ν_p(F(p - ε)), N counts the residues F(i) mod p^e over the
//! Lucas non-zeros i < π(p), and Z counts the Lucas zeros whose residue
//! mod p^e is not already among them.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modfib::{self, AlphaSearch, FibPair, PeriodInfo};
use crate::padic::{self, GoldenRing, Valuation};

/// Below this bound every index i < π(p) is checked when listing Lucas
/// zeros; above it a seeded sample is checked instead.
pub const FULL_ZERO_SCAN_BELOW: u64 = 100_000;
const ZERO_SAMPLES: usize = 2_000;

/// Indices i < π(p) with L(i) ≡ 0 mod p, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LucasZeroSet {
    pub p: u64,
    pub zeros: Vec<u64>,
}

impl LucasZeroSet {
    pub fn contains(&self, i: u64) -> bool {
        self.zeros.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// Lucas zeros predicted by α(p): none if α is odd, {α/2} if α ≡ 2 mod 4,
/// {α/2, 3α/2} if 4 | α. Not valid at p = 2, where L(0) = 2 ≡ 0.
fn predicted_zeros(alpha: u64) -> Vec<u64> {
    match alpha % 4 {
        1 | 3 => vec![],
        2 => vec![alpha / 2],
        _ => vec![alpha / 2, 3 * alpha / 2],
    }
}

pub fn lucas_zeros(p: u64) -> Result<LucasZeroSet> {
    lucas_zeros_with(p, &modfib::period_info(p)?, 0)
}

/// Lucas zeros for a prime whose period data is already known. The
/// prediction is checked at every claimed zero, and at every other index
/// (or a sample of `ZERO_SAMPLES` indices drawn from `seed` when p is large).
pub fn lucas_zeros_with(p: u64, info: &PeriodInfo, seed: u64) -> Result<LucasZeroSet> {
    if p == 2 {
        // L mod 2 is 0, 1, 1 with period 3
        return Ok(LucasZeroSet { p, zeros: vec![0] });
    }
    let zeros = predicted_zeros(info.alpha);
    for &i in &zeros {
        if modfib::lucas_mod(i, p)? != 0 {
            return Err(Error::inconsistent(format!("L({i}) is not divisible by {p}")));
        }
    }
    let stray = |i: u64| Error::inconsistent(format!("L({i}) ≡ 0 mod {p} but {i} was not predicted"));
    if p < FULL_ZERO_SCAN_BELOW {
        let mut pair = FibPair::initial(p)?;
        for i in 0..info.pi {
            if pair.lucas() == 0 && !zeros.contains(&i) {
                return Err(stray(i));
            }
            pair = pair.advance();
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
        for _ in 0..ZERO_SAMPLES {
            let i = rng.gen_range(0..info.pi);
            if !zeros.contains(&i) && modfib::lucas_mod(i, p)? == 0 {
                return Err(stray(i));
            }
        }
    }
    Ok(LucasZeroSet { p, zeros })
}

/// The Wall exponent e = ν_p(F(p - ε)) and its independent characterizations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallExponentRecord {
    pub p: u64,
    pub e: u32,
    pub via_fib: u32,
    /// ν_p(L(i)) at the first Lucas zero i; absent for p ∈ {2, 3} or when
    /// there is no Lucas zero.
    pub via_lucas: Option<u32>,
    /// ν_p(φ/ω(φ) - 1); absent for p = 2.
    pub via_padic: Option<u32>,
    pub wall_sun_sun: bool,
}

/// F(n) or L(n) modulo p^k.
fn fib_or_lucas_mod_power(n: u64, p: u64, k: u32, lucas: bool) -> Result<BigUint> {
    let m = BigUint::from(p).pow(k);
    let n = BigUint::from(n);
    if lucas {
        modfib::lucas_mod_big(&n, &m)
    } else {
        Ok(modfib::fib_pair_mod_big(&n, &m)?.0)
    }
}

/// ν_p of F(n) or L(n), found by raising k = 2, 3, … until F(n) mod p^k is
/// nonzero. Returns `None` when it is still zero modulo p^(cap+1).
fn valuation_up_to(n: u64, p: u64, cap: u32, lucas: bool) -> Result<Option<u32>> {
    for k in 2..=cap + 1 {
        let r = fib_or_lucas_mod_power(n, p, k, lucas)?;
        if !r.is_zero() {
            return Ok(modfib::valuation_big(&r, p));
        }
    }
    Ok(None)
}

fn p_minus_epsilon(p: u64) -> Result<u64> {
    Ok(match modfib::epsilon(p)? {
        1 => p - 1,
        -1 => p + 1,
        _ => p,
    })
}

/// Computes e for p ≠ 5, detecting exponents up to `max_e`, and fills the
/// cross-check channels that apply.
pub fn wall_exponent(p: u64, max_e: u32) -> Result<WallExponentRecord> {
    let info = modfib::period_info(p)?;
    let zeros = lucas_zeros_with(p, &info, 0)?;
    wall_exponent_with(p, max_e, &zeros, true)
}

fn wall_exponent_with(
    p: u64,
    max_e: u32,
    zeros: &LucasZeroSet,
    cross_check: bool,
) -> Result<WallExponentRecord> {
    if p == 5 {
        return Err(Error::Unsupported("the Wall exponent channels exclude p = 5".into()));
    }
    if max_e < 2 {
        return Err(Error::invalid(format!("max_e must be at least 2, got {max_e}")));
    }
    let via_fib = valuation_up_to(p_minus_epsilon(p)?, p, max_e, false)?
        .ok_or(Error::ExponentCap { p, cap: max_e })?;
    if via_fib == 0 {
        return Err(Error::inconsistent(format!("F(p - ε) is not divisible by p = {p}")));
    }

    let mut via_lucas = None;
    let mut via_padic = None;
    if cross_check {
        if p != 3 && p != 2 {
            if let Some(&i) = zeros.zeros.first() {
                via_lucas = Some(
                    valuation_up_to(i, p, via_fib + 1, true)?
                        .ok_or_else(|| Error::inconsistent(format!("ν_{p}(L({i})) exceeds e")))?,
                );
            }
        }
        if p != 2 {
            let ring = GoldenRing::new(p)?;
            via_padic = match padic::wall_valuation(&ring, via_fib + 1)? {
                Valuation::Finite(v) => Some(v),
                Valuation::Infinite => {
                    return Err(Error::inconsistent(format!(
                        "φ/ω(φ) ≡ 1 mod {p}^{} but e = {via_fib}",
                        via_fib + 1
                    )))
                }
            };
        }
        for (name, channel) in [("Lucas", via_lucas), ("p-adic", via_padic)] {
            if let Some(v) = channel {
                if v != via_fib {
                    return Err(Error::inconsistent(format!(
                        "Wall exponent channels disagree at p = {p}: Fibonacci {via_fib}, {name} {v}"
                    )));
                }
            }
        }
    }
    Ok(WallExponentRecord {
        p,
        e: via_fib,
        via_fib,
        via_lucas,
        via_padic,
        wall_sun_sun: via_fib >= 2,
    })
}

/// (N, Z) in one pass over i < π(p), keeping F(i) mod p^e.
pub fn count_n_z(info: &PeriodInfo, e: u32, zeros: &LucasZeroSet) -> Result<(u64, u64)> {
    let modulus = info
        .p
        .checked_pow(e)
        .ok_or_else(|| Error::Resource(format!("{}^{e} exceeds 64 bits", info.p)))?;
    let mut nonzero_residues = HashSet::new();
    let mut zero_residues = Vec::with_capacity(zeros.len());
    let mut pair = FibPair::initial(modulus)?;
    for i in 0..info.pi {
        if zeros.contains(i) {
            zero_residues.push(pair.f_n);
        } else {
            nonzero_residues.insert(pair.f_n);
        }
        pair = pair.advance();
    }
    let z = zero_residues.iter().filter(|r| !nonzero_residues.contains(r)).count();
    Ok((nonzero_residues.len() as u64, z as u64))
}

/// N/p^e + Z/(2·p^(2e-1)·(p + 1)).
pub fn density_formula(p: u64, e: u32, n: u64, z: u64) -> BigRational {
    let p_big = BigInt::from(p);
    let first = BigRational::new(BigInt::from(n), p_big.pow(e));
    let second_den = BigInt::from(2) * p_big.pow(2 * e - 1) * BigInt::from(p + 1);
    first + BigRational::new(BigInt::from(z), second_den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    #[serde(rename = "p=2")]
    Two,
    #[serde(rename = "p=3")]
    Three,
    #[serde(rename = "p=5")]
    Five,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub p: u64,
    pub epsilon: i8,
    pub alpha: u64,
    pub pi: u64,
    pub e: u32,
    pub lucas_zeros: LucasZeroSet,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    #[serde(with = "crate::fraction::serde_fraction")]
    pub dens: BigRational,
    pub special_case: Option<SpecialCase>,
    /// Absent for p = 5.
    pub wall: Option<WallExponentRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensityOptions {
    pub max_e: u32,
    pub alpha_search: AlphaSearch,
    /// Seeds the sampled Lucas-zero verification for large primes.
    pub seed: u64,
    /// Fill and compare the Lucas and p-adic Wall-exponent channels.
    pub cross_check: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions { max_e: 8, alpha_search: AlphaSearch::Divisors, seed: 0, cross_check: true }
    }
}

pub fn dens(p: u64) -> Result<DensityReport> {
    dens_with(p, &DensityOptions::default())
}

pub fn dens_with(p: u64, opts: &DensityOptions) -> Result<DensityReport> {
    let info = modfib::period_info_with(p, opts.alpha_search)?;
    let lucas_zeros = lucas_zeros_with(p, &info, opts.seed)?;
    let (e, wall) = if p == 5 {
        let e = valuation_up_to(5, 5, opts.max_e, false)?.ok_or(Error::ExponentCap { p, cap: opts.max_e })?;
        (e, None)
    } else {
        let record = wall_exponent_with(p, opts.max_e, &lucas_zeros, opts.cross_check)?;
        (record.e, Some(record))
    };
    let (n, z) = count_n_z(&info, e, &lucas_zeros)?;
    if z > lucas_zeros.len() as u64 || n > p.pow(e) {
        return Err(Error::inconsistent(format!("counts out of range at p = {p}: N = {n}, Z = {z}")));
    }
    let (dens, special_case) = match p {
        2 => (BigRational::new(21.into(), 32.into()), Some(SpecialCase::Two)),
        3 => (BigRational::one(), Some(SpecialCase::Three)),
        5 => (BigRational::one(), Some(SpecialCase::Five)),
        _ => (density_formula(p, e, n, z), None),
    };
    if matches!(special_case, Some(SpecialCase::Three | SpecialCase::Five))
        && density_formula(p, e, n, z) != dens
    {
        return Err(Error::inconsistent(format!("the general formula does not give 1 at p = {p}")));
    }
    if dens <= BigRational::zero() || dens > BigRational::one() {
        return Err(Error::inconsistent(format!("dens({p}) = {dens} lies outside (0, 1]")));
    }
    Ok(DensityReport {
        p,
        epsilon: info.epsilon,
        alpha: info.alpha,
        pi: info.pi,
        e,
        lucas_zeros,
        n,
        z,
        dens,
        special_case,
        wall,
    })
}

/// p/(2(p + 1)), the measure of the squares in Z_p for odd p.
pub fn square_density(p: u64) -> Result<BigRational> {
    modfib::require_prime(p)?;
    if p == 2 {
        return Err(Error::invalid("the squares formula is for odd primes"));
    }
    Ok(BigRational::new(BigInt::from(p), BigInt::from(2 * (p + 1))))
}
