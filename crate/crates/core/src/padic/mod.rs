//! Fixed-precision arithmetic in Z_p and in the ring of integers of
//! Q_p(√5), for p ≠ 5.
//!
//! An element is a pair of residues modulo p^prec in one of three bases:
//!
//! * `Rational`: a plain element of Z_p. For p ≡ ±1 mod 5 this is the whole
//!   ring, with √5 realized as a Hensel lift.
//! * `Sqrt5`: a + b√5 for odd p ≡ ±2 mod 5, where Z_p[√5] is unramified of
//!   degree 2.
//! * `Phi`: a + bφ for p = 2, since φ is integral but (1 + √5)/2 hides it.
//!
//! Precision is tracked per element and only ever decreases: sums and
//! products keep the smaller precision, and dividing by p^k drops k digits.

mod analytic;
mod element;
mod interp;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modfib;

pub use analytic::{hensel_root, pexp, plog, sqrt5, teichmuller, wall_valuation};
pub use element::PAdic;
pub use interp::{interp_f, interp_f2, Interpolation, Interpolation2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Rational,
    Sqrt5,
    Phi,
}

impl Basis {
    /// The basis used for the ring of integers of Q_p(√5).
    pub fn for_prime(p: u64) -> Result<Basis> {
        modfib::require_prime(p)?;
        match p {
            2 => Ok(Basis::Phi),
            5 => Err(Error::Unsupported(
                "p = 5 is ramified in Q_5(√5) and has no p-adic model here".into(),
            )),
            _ if matches!(p % 5, 1 | 4) => Ok(Basis::Rational),
            _ => Ok(Basis::Sqrt5),
        }
    }
}

/// ν(x), with `Infinite` standing for "zero to the available precision".
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// The ring of integers O_K of K = Q_p(√5), together with its golden ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoldenRing {
    p: u64,
    basis: Basis,
}

impl GoldenRing {
    pub fn new(p: u64) -> Result<Self> {
        let basis = Basis::for_prime(p)?;
        Ok(GoldenRing { p, basis })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// f, where p^f is the size of the residue field.
    pub fn residue_degree(&self) -> u32 {
        match self.basis {
            Basis::Rational => 1,
            Basis::Sqrt5 | Basis::Phi => 2,
        }
    }

    /// p^f - 1, the order of the group of Teichmüller representatives.
    pub fn unit_root_order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.residue_degree()) - 1u32
    }

    pub fn int(&self, n: i64, prec: u32) -> PAdic {
        PAdic::from_int(self.p, n, prec).embed(self.basis)
    }

    pub fn sqrt5(&self, prec: u32) -> Result<PAdic> {
        match self.basis {
            Basis::Rational => sqrt5(self.p, prec),
            Basis::Sqrt5 => PAdic::from_parts(self.p, Basis::Sqrt5, 0, 1, prec),
            // √5 = 2φ - 1
            Basis::Phi => PAdic::from_parts(self.p, Basis::Phi, -1, 2, prec),
        }
    }

    pub fn phi(&self, prec: u32) -> Result<PAdic> {
        match self.basis {
            Basis::Phi => PAdic::from_parts(self.p, Basis::Phi, 0, 1, prec),
            _ => {
                let two = self.int(2, prec);
                (&self.int(1, prec) + &self.sqrt5(prec)?).checked_div(&two)
            }
        }
    }

    /// φ̄ = 1 - φ = -1/φ.
    pub fn phi_bar(&self, prec: u32) -> Result<PAdic> {
        Ok(&self.int(1, prec) - &self.phi(prec)?)
    }

    pub fn omega_phi(&self, prec: u32) -> Result<PAdic> {
        teichmuller(&self.phi(prec)?, prec)
    }

    pub fn omega_phi_bar(&self, prec: u32) -> Result<PAdic> {
        teichmuller(&self.phi_bar(prec)?, prec)
    }

    /// φ/ω(φ); its distance from 1 is p^(-e) for the Wall exponent e.
    pub fn phi_ratio(&self, prec: u32) -> Result<PAdic> {
        self.phi(prec)?.checked_div(&self.omega_phi(prec)?)
    }
}

#[cfg(test)]
mod tests;
