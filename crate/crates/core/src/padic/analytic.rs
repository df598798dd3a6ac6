use num_bigint::BigUint;

use super::{Basis, GoldenRing, PAdic, Valuation};
use crate::error::{Error, Result};
use crate::modfib;

/// The canonical √5 in Z_p for p ≡ ±1 mod 5: the Hensel lift of the root
/// whose residue lies in 1..=(p-1)/2.
pub fn sqrt5(p: u64, prec: u32) -> Result<PAdic> {
    modfib::require_prime(p)?;
    if !matches!(p % 5, 1 | 4) {
        return Err(Error::invalid(format!("5 is not a square in Z_{p}")));
    }
    let r = modfib::sqrt_mod_prime(5, p)
        .ok_or_else(|| Error::inconsistent(format!("5 has no square root mod {p}")))?;
    let r = r.min(p - r);
    let coeffs = [
        PAdic::from_int(p, -5, prec),
        PAdic::from_int(p, 0, prec),
        PAdic::from_int(p, 1, prec),
    ];
    hensel_root(&coeffs, &PAdic::from_biguint(p, &BigUint::from(r), prec), prec)
}

fn unit_root_order_exponent(p: u64) -> Result<BigUint> {
    let degree = match Basis::for_prime(p)? {
        Basis::Rational => 1,
        _ => 2,
    };
    Ok(BigUint::from(p).pow(degree))
}

/// ω(x): the (p^f - 1)th root of unity congruent to the unit x mod p,
/// found as the fixed point of y ↦ y^(p^f).
pub fn teichmuller(x: &PAdic, prec: u32) -> Result<PAdic> {
    if x.p() == 5 {
        return Err(Error::Unsupported("Teichmüller lifts at p = 5".into()));
    }
    if x.prec() == 0 || !x.is_unit() {
        return Err(Error::invalid(format!(
            "Teichmüller lift needs a unit, got valuation {}",
            x.valuation()
        )));
    }
    let q = unit_root_order_exponent(x.p())?;
    let mut y = x.lift(prec);
    // Each step gains at least one digit, so prec + 2 rounds is a tripwire.
    for _ in 0..prec + 2 {
        let next = y.pow_big(&q);
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Err(Error::inconsistent(format!(
        "Teichmüller iteration did not settle within {} rounds",
        prec + 2
    )))
}

fn floor_log(p: u64, m: u64) -> u32 {
    let mut k = 0;
    let mut power = p;
    while power <= m {
        k += 1;
        match power.checked_mul(p) {
            Some(next) => power = next,
            None => break,
        }
    }
    k
}

fn nu(p: u64, mut m: u64) -> u32 {
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    k
}

/// log_p(x) = Σ (-1)^(m+1) (x-1)^m / m for |x - 1|_p < 1.
///
/// With u = x - 1 of valuation v, the m-th term has valuation at least
/// m·v - ⌊log_p m⌋, which is non-decreasing in m; summation stops at the
/// first term that vanishes modulo p^prec. The result is known to
/// min(prec, x.prec()) digits.
pub fn plog(x: &PAdic, prec: u32) -> Result<PAdic> {
    let p = x.p();
    let target = prec.min(x.prec());
    if target == 0 {
        return Ok(x.zero_like().truncate(0));
    }
    let u = x - &x.one_like();
    let v = match u.valuation() {
        Valuation::Infinite => return Ok(x.zero_like().truncate(target)),
        Valuation::Finite(0) => {
            return Err(Error::Domain(format!(
                "log_{p} needs |x - 1| < 1, but x - 1 is a unit"
            )))
        }
        Valuation::Finite(v) => v as u64,
    };
    let mut last = 1u64;
    while (last + 1) * v - (floor_log(p, last + 1) as u64) < target as u64 {
        last += 1;
    }
    let work = target + floor_log(p, last);
    let u = u.lift(work);
    let mut power = u.clone();
    let mut sum = x.zero_like().lift(work);
    for m in 1..=last {
        let term = power.div_int(m)?;
        sum = if m % 2 == 1 { &sum + &term } else { &sum - &term };
        power = &power * &u;
    }
    Ok(sum.truncate(target))
}

/// exp_p(x) = Σ x^m / m! for |x|_p < p^(-1/(p-1)), i.e. ν(x) ≥ 1 for odd p
/// and ν(x) ≥ 2 for p = 2.
pub fn pexp(x: &PAdic, prec: u32) -> Result<PAdic> {
    let p = x.p();
    let target = prec.min(x.prec());
    if target == 0 {
        return Ok(x.zero_like().truncate(0));
    }
    let v = match x.valuation() {
        Valuation::Infinite => return Ok(x.one_like().truncate(target)),
        Valuation::Finite(v) => v as u64,
    };
    let min_v = if p == 2 { 2 } else { 1 };
    if v < min_v {
        return Err(Error::Domain(format!(
            "exp_{p} diverges at an argument of valuation {v}"
        )));
    }
    // ν(x^m/m!) ≥ m·v - (m-1)/(p-1); scaled by (p-1) this is increasing in m.
    let slope = v * (p - 1) - 1;
    let bound = |m: u64| m * slope + 1;
    let goal = target as u64 * (p - 1);
    let mut last = 0u64;
    while bound(last + 1) < goal {
        last += 1;
    }
    let factorial_loss: u32 = (1..=last).map(|m| nu(p, m)).sum();
    let work = target + factorial_loss;
    let x = x.lift(work);
    let mut term = x.one_like();
    let mut sum = term.clone();
    for m in 1..=last {
        term = (&term * &x).div_int(m)?;
        sum = &sum + &term;
    }
    Ok(sum.truncate(target))
}

fn eval_poly(coeffs: &[PAdic], y: &PAdic) -> PAdic {
    let mut acc = y.zero_like();
    for c in coeffs.iter().rev() {
        acc = &(&acc * y) + c;
    }
    acc
}

fn derivative(coeffs: &[PAdic]) -> Vec<PAdic> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.mul_int(k as i64))
        .collect()
}

/// Newton iteration from `y0` to the unique root y of f (coefficients
/// lowest degree first) with |y - y0| < |f'(y0)|, valid when
/// |f(y0)| < |f'(y0)|².
pub fn hensel_root(coeffs: &[PAdic], y0: &PAdic, prec: u32) -> Result<PAdic> {
    if coeffs.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    let coeff_prec = coeffs.iter().map(PAdic::prec).min().unwrap_or(0);
    let deriv = derivative(coeffs);
    let f0 = eval_poly(coeffs, &y0.lift(coeff_prec));
    let d0 = eval_poly(&deriv, &y0.lift(coeff_prec));
    let (fv, dv) = (f0.valuation(), d0.valuation());
    let k = match dv {
        Valuation::Finite(k) if fv > Valuation::Finite(2 * k) => k,
        _ => {
            return Err(Error::NoConvergence { f_valuation: fv, derivative_valuation: dv });
        }
    };
    let work = coeff_prec.min(prec + 2 * k);
    if work <= k {
        return Err(Error::Precision { needed: k + 1, available: work });
    }
    let coeffs: Vec<PAdic> = coeffs.iter().map(|c| c.truncate(work)).collect();
    let deriv: Vec<PAdic> = deriv.iter().map(|c| c.truncate(work)).collect();
    let mut y = y0.lift(work);
    let mut excess: Option<u32> = None;
    for _ in 0..=64 {
        let fy = eval_poly(&coeffs, &y);
        let t = match fy.valuation() {
            Valuation::Infinite => return Ok(y.truncate(prec.min(work - k))),
            Valuation::Finite(v) => v.checked_sub(2 * k).filter(|t| *t > 0).ok_or_else(|| {
                Error::inconsistent(format!("Newton iterate left the Hensel basin (ν(f) = {v})"))
            })?,
        };
        if let Some(prev) = excess {
            if t < (2 * prev).min(work - 2 * k) {
                return Err(Error::inconsistent(format!(
                    "Newton step lost quadratic convergence ({prev} -> {t})"
                )));
            }
        }
        excess = Some(t);
        let step = fy.checked_div(&eval_poly(&deriv, &y))?;
        // Digits of y above work - k cannot change f(y) mod p^work.
        y = (&y - &step).lift(work);
    }
    Err(Error::inconsistent("Newton iteration did not terminate"))
}

/// ν(φ/ω(φ) - 1), computed to `prec` digits.
pub fn wall_valuation(ring: &GoldenRing, prec: u32) -> Result<Valuation> {
    let ratio = ring.phi_ratio(prec)?;
    Ok((&ratio - &ratio.one_like()).valuation())
}
