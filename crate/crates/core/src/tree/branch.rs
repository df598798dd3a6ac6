use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modfib;
use crate::padic::{teichmuller, GoldenRing, PAdic};

/// Data that steers the tree below the Lucas zero `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRule {
    pub p: u64,
    pub i: u64,
    /// ζ√5 mod p for ζ = ω(φ)^i; a unit because p ≠ 5.
    pub zeta_sqrt5_mod_p: u64,
    /// Base-p digits of c_i = 2ζ/√5 ∈ Z_p, least significant first.
    pub c_digits: Vec<u64>,
    /// Nonzero squares mod p, ascending.
    pub qr_set: Vec<u64>,
}

impl BranchRule {
    /// Digits j ∈ 1..p for which ζ√5·j is a square mod p.
    pub fn offsets(&self) -> Vec<u64> {
        admissible_offsets(self.p, self.zeta_sqrt5_mod_p)
    }
}

pub fn quadratic_residues(p: u64) -> Vec<u64> {
    (1..p).filter(|&x| modfib::is_quadratic_residue(x, p)).collect()
}

fn admissible_offsets(p: u64, multiplier: u64) -> Vec<u64> {
    (1..p)
        .filter(|&j| modfib::is_quadratic_residue(modfib::mul_mod(multiplier, j, p), p))
        .collect()
}

/// 2ω(φ)^i/√5 to `prec` digits. It lies in Z_p when i is a Lucas zero or
/// when √5 ∈ Z_p; otherwise it has a √5 component.
pub fn branch_point(p: u64, i: u64, prec: u32) -> Result<PAdic> {
    let ring = GoldenRing::new(p)?;
    let zeta = ring.omega_phi(prec)?.pow(i);
    (&ring.int(2, prec) * &zeta).checked_div(&ring.sqrt5(prec)?)
}

pub fn branch_rule(p: u64, i: u64, depth: u32) -> Result<BranchRule> {
    branch_rule_with(p, i, depth, false)
}

/// With `flip`, -√5 plays the role of √5 (and so φ̄ that of φ).
pub(crate) fn branch_rule_with(p: u64, i: u64, depth: u32, flip: bool) -> Result<BranchRule> {
    if p == 2 || p == 5 {
        return Err(Error::Unsupported(format!("branching rule at p = {p}")));
    }
    let ring = GoldenRing::new(p)?;
    let prec = depth.max(1) + 2;
    let (phi, root5) = if flip {
        (ring.phi_bar(prec)?, -&ring.sqrt5(prec)?)
    } else {
        (ring.phi(prec)?, ring.sqrt5(prec)?)
    };
    let zeta = teichmuller(&phi, prec)?.pow(i);
    let c = (&ring.int(2, prec) * &zeta).checked_div(&root5)?.to_base().ok_or_else(|| {
        Error::inconsistent(format!("ω(φ)^{i} is not in √5·Z_{p}, so 2ζ/√5 leaves Z_{p}"))
    })?;
    let zeta_sqrt5 = (&zeta * &root5).to_base().ok_or_else(|| {
        Error::inconsistent(format!("ζ√5 is not in Z_{p} for i = {i}"))
    })?;
    let zeta_sqrt5_mod_p = (zeta_sqrt5.a() % BigUint::from(p)).iter_u64_digits().next().unwrap_or(0);
    if zeta_sqrt5_mod_p == 0 {
        return Err(Error::inconsistent(format!("ζ√5 is divisible by {p} for i = {i}")));
    }
    Ok(BranchRule {
        p,
        i,
        zeta_sqrt5_mod_p,
        c_digits: c.truncate(depth).digits_a(),
        qr_set: quadratic_residues(p),
    })
}

/// A full p-ary subtree hanging off a branching path: the residues whose
/// first `level` digits follow the path and whose digit at position
/// `level` is the path digit plus `offset_digit` (mod p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Subtree {
    pub level: u32,
    pub offset_digit: u64,
}

/// A path of digits that is attained at every depth, with full subtrees
/// branching off it at even depths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    /// Lucas zero index; 0 for the squares tree.
    pub i: u64,
    pub path: Vec<u64>,
    pub subtrees: Vec<Subtree>,
}

/// Subtrees at even depths `min_level ≤ λ′ < lambda`, with offset digits j
/// such that `multiplier·j` is a nonzero square mod p.
pub(crate) fn build_branch(p: u64, i: u64, path: Vec<u64>, multiplier: u64, min_level: u32, lambda: u32) -> Branch {
    let offsets = admissible_offsets(p, multiplier);
    let mut subtrees = Vec::new();
    let start = min_level + min_level % 2;
    for level in (start..lambda).step_by(2) {
        subtrees.extend(offsets.iter().map(|&offset_digit| Subtree { level, offset_digit }));
    }
    Branch { i, path, subtrees }
}

/// The squares of Z_p modulo p^λ, organised like a Lucas-zero branch:
/// the path is 0 and a unit square u²·p^(2k) sits below depth 2k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareTree {
    pub p: u64,
    pub lambda: u32,
    pub branch: Branch,
}

pub fn square_tree(p: u64, lambda: u32) -> Result<SquareTree> {
    modfib::require_prime(p)?;
    if p == 2 {
        return Err(Error::invalid("the squares tree is built for odd primes"));
    }
    let branch = build_branch(p, 0, vec![0; lambda as usize], 1, 0, lambda);
    Ok(SquareTree { p, lambda, branch })
}

impl SquareTree {
    pub fn count(&self) -> BigUint {
        super::branch_count(self.p, self.lambda, &self.branch)
    }

    pub fn expand(&self) -> Result<Vec<u64>> {
        let modulus = super::checked_modulus(self.p, self.lambda)?;
        let mut out = Vec::new();
        super::expand_branch(self.p, self.lambda, modulus, &self.branch, &mut out);
        out.sort_unstable();
        Ok(out)
    }
}

/// {x² mod p^λ}, by enumeration.
pub fn brute_squares(p: u64, lambda: u32) -> Result<Vec<u64>> {
    let m = super::checked_modulus(p, lambda)?;
    let mut seen = vec![false; m as usize];
    for x in 0..m {
        seen[modfib::mul_mod(x, x, m) as usize] = true;
    }
    Ok((0..m).filter(|&r| seen[r as usize]).collect())
}
