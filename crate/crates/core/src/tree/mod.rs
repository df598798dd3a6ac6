//! Residues attained by the Fibonacci sequence modulo p^λ.
//!
//! [`brute_attained`] enumerates one full period and serves as the oracle.
//! [`fast_attained`] never walks the period: each Lucas non-zero i
//! contributes the whole cylinder F(i) + p^e·Z_p, and each Lucas zero that
//! is not swallowed by a cylinder contributes a path along the digits of
//! c_i = 2ω(φ)^i/√5 plus full subtrees at even depths ≥ 2e whose offset
//! digit j makes ζ√5·j a square mod p.

mod branch;
mod export;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density;
use crate::error::{Error, Result};
use crate::modfib::{self, FibPair};

pub use branch::{branch_point, branch_rule, brute_squares, quadratic_residues, square_tree, Branch, BranchRule, SquareTree, Subtree};
pub use export::{from_json, to_dot, to_json, MAX_EXPLICIT_NODES};

/// Default cap on the number of sequence terms `brute_attained` may walk.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest p^λ that will be listed residue by residue.
pub const MAX_EXPANSION: u64 = 1 << 27;

const CHUNK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compressed {
    pub e: u32,
    /// F(i) mod p^e over the Lucas non-zeros, ascending.
    pub cylinders: Vec<u64>,
    /// One branch per Lucas zero not absorbed by a cylinder.
    pub zeros: Vec<Branch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Form {
    Explicit(Vec<u64>),
    Compressed(Compressed),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttainedSet {
    pub p: u64,
    pub lambda: u32,
    pub form: Form,
}

pub(crate) fn checked_modulus(p: u64, lambda: u32) -> Result<u64> {
    p.checked_pow(lambda)
        .ok_or_else(|| Error::Resource(format!("{p}^{lambda} does not fit in 64 bits")))
}

fn value_of(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// |path node| + Σ p^(λ - λ′ - 1) over the subtrees.
pub(crate) fn branch_count(p: u64, lambda: u32, branch: &Branch) -> BigUint {
    let p = BigUint::from(p);
    branch
        .subtrees
        .iter()
        .filter(|s| s.level < lambda)
        .fold(BigUint::from(1u32), |acc, s| acc + p.pow(lambda - s.level - 1))
}

pub(crate) fn expand_branch(p: u64, lambda: u32, modulus: u64, branch: &Branch, out: &mut Vec<u64>) {
    out.push(value_of(&branch.path[..lambda as usize], p) % modulus);
    for s in branch.subtrees.iter().filter(|s| s.level < lambda) {
        let low = p.pow(s.level);
        let prefix = value_of(&branch.path[..s.level as usize], p);
        let digit = (branch.path[s.level as usize] + s.offset_digit) % p;
        let root = prefix + digit * low;
        let step = low * p;
        out.extend((0..modulus / step).map(|k| root + k * step));
    }
}

impl AttainedSet {
    pub fn explicit(p: u64, lambda: u32, mut residues: Vec<u64>) -> Self {
        residues.sort_unstable();
        residues.dedup();
        AttainedSet { p, lambda, form: Form::Explicit(residues) }
    }

    pub fn modulus(&self) -> Result<u64> {
        checked_modulus(self.p, self.lambda)
    }

    /// Number of attained residues mod p^λ.
    pub fn count(&self) -> Result<BigUint> {
        match &self.form {
            Form::Explicit(r) => Ok(BigUint::from(r.len())),
            Form::Compressed(c) if self.lambda >= c.e => {
                let p = BigUint::from(self.p);
                let cylinders = BigUint::from(c.cylinders.len()) * p.pow(self.lambda - c.e);
                Ok(c.zeros.iter().fold(cylinders, |acc, b| acc + branch_count(self.p, self.lambda, b)))
            }
            Form::Compressed(_) => Ok(BigUint::from(self.expand()?.len())),
        }
    }

    pub fn density(&self) -> Result<BigRational> {
        let count = BigInt::from(self.count()?);
        Ok(BigRational::new(count, BigInt::from(self.p).pow(self.lambda)))
    }

    /// The sorted residues mod p^λ.
    pub fn expand(&self) -> Result<Vec<u64>> {
        let modulus = self.modulus()?;
        let c = match &self.form {
            Form::Explicit(r) => return Ok(r.clone()),
            Form::Compressed(c) => c,
        };
        if modulus > MAX_EXPANSION {
            return Err(Error::Resource(format!(
                "expanding {} residues mod {}^{} exceeds the limit {MAX_EXPANSION}",
                self.count()?,
                self.p,
                self.lambda
            )));
        }
        let mut out = Vec::new();
        if self.lambda >= c.e {
            let step = self.p.pow(c.e);
            for &r in &c.cylinders {
                out.extend((0..modulus / step).map(|k| r + k * step));
            }
        } else {
            out.extend(c.cylinders.iter().map(|r| r % modulus));
        }
        for branch in &c.zeros {
            expand_branch(self.p, self.lambda, modulus, branch, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// The residues reduced modulo p^level, for level ≤ λ.
    pub fn reduce(&self, level: u32) -> Result<AttainedSet> {
        if level > self.lambda {
            return Err(Error::invalid(format!("cannot reduce level {} to {level}", self.lambda)));
        }
        let m = checked_modulus(self.p, level)?;
        let residues = self.expand()?.into_iter().map(|r| r % m).collect();
        Ok(AttainedSet::explicit(self.p, level, residues))
    }

    pub fn to_explicit(&self) -> Result<AttainedSet> {
        Ok(AttainedSet::explicit(self.p, self.lambda, self.expand()?))
    }
}

/// Enumerates F(n) mod p^λ over one period.
pub fn brute_attained(p: u64, lambda: u32) -> Result<AttainedSet> {
    brute_attained_with(p, lambda, DEFAULT_BUDGET)
}

pub fn brute_attained_with(p: u64, lambda: u32, budget: u64) -> Result<AttainedSet> {
    modfib::require_prime(p)?;
    let m = checked_modulus(p, lambda)?;
    if m == 1 {
        return Ok(AttainedSet::explicit(p, 0, vec![0]));
    }
    let info = modfib::period_info(p)?;
    let period = p
        .checked_pow(lambda - 1)
        .and_then(|q| q.checked_mul(info.pi))
        .filter(|&n| n <= budget)
        .ok_or_else(|| {
            Error::Resource(format!(
                "enumerating F mod {p}^{lambda} needs {}·{p}^{} terms, over the budget {budget}",
                info.pi,
                lambda - 1
            ))
        })?;
    if m > budget.saturating_mul(16) {
        return Err(Error::Resource(format!("a bitmap of {m} residues is over the budget")));
    }
    let back = modfib::fib_pair_mod(period, m)?;
    let residues = if back.f_n == 0 && back.f_n1 == 1 {
        parallel_residues(m, period)?
    } else {
        // Only possible if the period mod p^λ is shorter, which would make p
        // a Wall–Sun–Sun prime.
        sequential_residues(m, budget)?
    };
    Ok(AttainedSet::explicit(p, lambda, residues))
}

fn parallel_residues(m: u64, period: u64) -> Result<Vec<u64>> {
    let words: Vec<AtomicU64> = (0..m.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
    let starts: Vec<u64> = (0..period).step_by(CHUNK as usize).collect();
    starts.par_iter().try_for_each(|&start| -> Result<()> {
        let mut pair = modfib::fib_pair_mod(start, m)?;
        for _ in start..(start + CHUNK).min(period) {
            words[(pair.f_n / 64) as usize].fetch_or(1 << (pair.f_n % 64), Ordering::Relaxed);
            pair = pair.advance();
        }
        Ok(())
    })?;
    Ok(collect_bits(&words))
}

fn collect_bits(words: &[AtomicU64]) -> Vec<u64> {
    let mut out = Vec::new();
    for (w, word) in words.iter().enumerate() {
        let mut bits = word.load(Ordering::Relaxed);
        while bits != 0 {
            out.push(w as u64 * 64 + bits.trailing_zeros() as u64);
            bits &= bits - 1;
        }
    }
    out
}

fn sequential_residues(m: u64, budget: u64) -> Result<Vec<u64>> {
    let mut seen = BTreeSet::new();
    let mut pair = FibPair::initial(m)?;
    for _ in 0..budget {
        seen.insert(pair.f_n);
        pair = pair.advance();
        if pair.f_n == 0 && pair.f_n1 == 1 {
            return Ok(seen.into_iter().collect());
        }
    }
    Err(Error::Resource(format!("the period of F mod {m} exceeds the budget {budget}")))
}

/// |brute_attained(p, λ)|/p^λ.
pub fn level_density(p: u64, lambda: u32) -> Result<BigRational> {
    brute_attained(p, lambda)?.density()
}

/// The compressed attained set, built from e, the Lucas zeros and the
/// branching rule.
pub fn fast_attained(p: u64, lambda: u32) -> Result<AttainedSet> {
    fast_attained_with(p, lambda, false)
}

pub(crate) fn fast_attained_with(p: u64, lambda: u32, flip_root: bool) -> Result<AttainedSet> {
    if p == 2 || p == 5 {
        return Err(Error::Unsupported(format!("the compressed tree is not built for p = {p}")));
    }
    let report = density::dens(p)?;
    let e = report.e;
    let modulus_e = checked_modulus(p, e)?;
    let mut cylinders = BTreeSet::new();
    let mut zero_residues = Vec::new();
    let mut pair = FibPair::initial(modulus_e)?;
    for i in 0..report.pi {
        if report.lucas_zeros.contains(i) {
            zero_residues.push((i, pair.f_n));
        } else {
            cylinders.insert(pair.f_n);
        }
        pair = pair.advance();
    }
    let mut zeros = Vec::new();
    for (i, residue) in zero_residues {
        if cylinders.contains(&residue) {
            continue;
        }
        let rule = branch::branch_rule_with(p, i, lambda.max(e), flip_root)?;
        if value_of(&rule.c_digits[..e as usize], p) != residue {
            return Err(Error::inconsistent(format!(
                "c_{i} is not congruent to F({i}) mod {p}^{e}"
            )));
        }
        let path = rule.c_digits[..lambda as usize].to_vec();
        zeros.push(branch::build_branch(p, i, path, rule.zeta_sqrt5_mod_p, 2 * e, lambda));
    }
    if zeros.len() as u64 != report.z {
        return Err(Error::inconsistent(format!(
            "{} surviving Lucas zeros but Z({p}) = {}",
            zeros.len(),
            report.z
        )));
    }
    Ok(AttainedSet {
        p,
        lambda,
        form: Form::Compressed(Compressed { e, cylinders: cylinders.into_iter().collect(), zeros }),
    })
}
