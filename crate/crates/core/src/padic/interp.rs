//! Piecewise p-adic interpolation of the Fibonacci sequence.
//!
//! For p ∉ {2, 5} and L = log_p(φ/ω(φ)),
//!
//! ```text
//! F_i(x) = (ω(φ)^i · exp_p(xL) - ω(φ̄)^i · exp_p(-xL)) / √5
//! ```
//!
//! maps Z_p into Z_p and F(n) = F_{n mod π(p)}(n). For p = 2 the
//! exponential does not converge at L itself, so six functions F_{i,r}
//! on r + 2Z_2 are built from L₂ = log_2((φ/ω(φ))²) instead.

use super::{pexp, plog, GoldenRing, PAdic, Valuation};
use crate::error::{Error, Result};

fn check_argument(x: &PAdic, p: u64, prec: u32) -> Result<()> {
    if x.p() != p {
        return Err(Error::invalid(format!("argument lives over p = {}, not {p}", x.p())));
    }
    if !x.in_base_ring() {
        return Err(Error::invalid("interpolation arguments must lie in Z_p"));
    }
    if x.prec() < prec {
        return Err(Error::Precision { needed: prec, available: x.prec() });
    }
    Ok(())
}

fn into_base(value: PAdic) -> Result<PAdic> {
    value.to_base().ok_or_else(|| {
        Error::inconsistent(format!("interpolated value {value} has a nonzero √5 component"))
    })
}

/// Precomputed constants for evaluating the F_i at one prime and precision.
#[derive(Clone, Debug)]
pub struct Interpolation {
    ring: GoldenRing,
    prec: u32,
    omega_phi: PAdic,
    omega_phi_bar: PAdic,
    log_ratio: PAdic,
    inv_sqrt5: PAdic,
}

impl Interpolation {
    pub fn new(p: u64, prec: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::Unsupported(
                "p = 2 uses the six-function interpolation (Interpolation2)".into(),
            ));
        }
        let ring = GoldenRing::new(p)?;
        let omega_phi = ring.omega_phi(prec)?;
        let omega_phi_bar = ring.omega_phi_bar(prec)?;
        let log_ratio = plog(&ring.phi_ratio(prec)?, prec)?;
        let inv_sqrt5 = ring.sqrt5(prec)?.inv()?;
        Ok(Interpolation { ring, prec, omega_phi, omega_phi_bar, log_ratio, inv_sqrt5 })
    }

    pub fn ring(&self) -> &GoldenRing {
        &self.ring
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn omega_phi(&self) -> &PAdic {
        &self.omega_phi
    }

    /// log_p(φ/ω(φ)); its valuation is the Wall exponent.
    pub fn log_ratio(&self) -> &PAdic {
        &self.log_ratio
    }

    /// h_i(x) = ω(φ)^i · exp_p(xL).
    pub fn h(&self, i: u64, x: &PAdic) -> Result<PAdic> {
        check_argument(x, self.ring.p(), self.prec)?;
        let x = x.truncate(self.prec).embed(self.ring.basis());
        Ok(&self.omega_phi.pow(i) * &pexp(&(&x * &self.log_ratio), self.prec)?)
    }

    /// F_i(x) as an element of Z_p.
    pub fn eval(&self, i: u64, x: &PAdic) -> Result<PAdic> {
        check_argument(x, self.ring.p(), self.prec)?;
        let x = x.truncate(self.prec).embed(self.ring.basis());
        let arg = &x * &self.log_ratio;
        let plus = &self.omega_phi.pow(i) * &pexp(&arg, self.prec)?;
        let minus = &self.omega_phi_bar.pow(i) * &pexp(&(-&arg), self.prec)?;
        into_base(&(&plus - &minus) * &self.inv_sqrt5)
    }
}

/// F_i(x) to `prec` digits, for p = x.p() ∉ {2, 5}.
pub fn interp_f(i: u64, x: &PAdic, prec: u32) -> Result<PAdic> {
    Interpolation::new(x.p(), prec)?.eval(i, x)
}

/// The six functions F_{i,r} for p = 2.
#[derive(Clone, Debug)]
pub struct Interpolation2 {
    prec: u32,
    phi: PAdic,
    phi_bar: PAdic,
    omega_phi: PAdic,
    omega_phi_bar: PAdic,
    log_ratio_sq: PAdic,
    inv_sqrt5: PAdic,
}

impl Interpolation2 {
    pub fn new(prec: u32) -> Result<Self> {
        let ring = GoldenRing::new(2)?;
        let phi = ring.phi(prec)?;
        let phi_bar = ring.phi_bar(prec)?;
        let omega_phi = ring.omega_phi(prec)?;
        let omega_phi_bar = ring.omega_phi_bar(prec)?;
        let ratio = phi.checked_div(&omega_phi)?;
        let log_ratio_sq = plog(&(&ratio * &ratio), prec)?;
        if log_ratio_sq.valuation() < Valuation::Finite(2) {
            return Err(Error::inconsistent(format!(
                "log_2((φ/ω(φ))²) has valuation {}, expected at least 2",
                log_ratio_sq.valuation()
            )));
        }
        let inv_sqrt5 = ring.sqrt5(prec)?.inv()?;
        Ok(Interpolation2 { prec, phi, phi_bar, omega_phi, omega_phi_bar, log_ratio_sq, inv_sqrt5 })
    }

    /// log_2((φ/ω(φ))²).
    pub fn log_ratio_sq(&self) -> &PAdic {
        &self.log_ratio_sq
    }

    /// F_{i,r}(r + 2x) for i ∈ {0, 1, 2}, r ∈ {0, 1}.
    pub fn eval(&self, i: u64, r: u64, x: &PAdic) -> Result<PAdic> {
        if i > 2 || r > 1 {
            return Err(Error::invalid(format!("F_{{i,r}} needs i < 3 and r < 2, got ({i}, {r})")));
        }
        check_argument(x, 2, self.prec)?;
        let x = x.truncate(self.prec).embed(super::Basis::Phi);
        let arg = &x * &self.log_ratio_sq;
        // ω(φ)^(i - r) with the exponent taken mod 3
        let shift = (i + 3 - r) % 3;
        let plus = &(&self.omega_phi.pow(shift) * &self.phi.pow(r)) * &pexp(&arg, self.prec)?;
        let minus =
            &(&self.omega_phi_bar.pow(shift) * &self.phi_bar.pow(r)) * &pexp(&(-&arg), self.prec)?;
        into_base(&(&plus - &minus) * &self.inv_sqrt5)
    }

    /// F(n) through the interpolation: F_{n mod 3, n mod 2}((n - r)/2).
    pub fn eval_index(&self, n: u64) -> Result<PAdic> {
        let r = n % 2;
        let x = PAdic::from_int(2, ((n - r) / 2) as i64, self.prec);
        self.eval(n % 3, r, &x)
    }
}

pub fn interp_f2(i: u64, r: u64, x: &PAdic, prec: u32) -> Result<PAdic> {
    Interpolation2::new(prec)?.eval(i, r, x)
}
