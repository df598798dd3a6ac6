use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Basis, Valuation};
use crate::error::{Error, Result};

/// An element of Z_p or of O_K known modulo p^prec.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdic {
    p: u64,
    basis: Basis,
    a: BigUint,
    b: BigUint,
    prec: u32,
}

fn reduce(x: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    x.mod_floor(&m).magnitude().clone()
}

fn digit_valuation(x: &BigUint, p: &BigUint, prec: u32) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let mut v = 0;
    let mut x = x.clone();
    while v < prec {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        x = q;
        v += 1;
    }
    Valuation::Infinite
}

impl PAdic {
    pub fn from_int(p: u64, n: i64, prec: u32) -> PAdic {
        PAdic::from_bigint(p, &BigInt::from(n), prec)
    }

    pub fn from_bigint(p: u64, n: &BigInt, prec: u32) -> PAdic {
        let m = BigUint::from(p).pow(prec);
        PAdic {
            p,
            basis: Basis::Rational,
            a: reduce(n, &m),
            b: BigUint::zero(),
            prec,
        }
    }

    pub fn from_biguint(p: u64, n: &BigUint, prec: u32) -> PAdic {
        let m = BigUint::from(p).pow(prec);
        PAdic { p, basis: Basis::Rational, a: n % &m, b: BigUint::zero(), prec }
    }

    /// a + b·ξ where ξ is √5 or φ according to `basis`.
    pub fn new(p: u64, basis: Basis, a: &BigInt, b: &BigInt, prec: u32) -> Result<PAdic> {
        match basis {
            Basis::Rational if !b.is_zero() => {
                return Err(Error::invalid("a Z_p element has no second component"));
            }
            Basis::Sqrt5 | Basis::Phi if Basis::for_prime(p)? != basis => {
                return Err(Error::invalid(format!("basis {basis:?} does not apply to p = {p}")));
            }
            _ => {}
        }
        let m = BigUint::from(p).pow(prec);
        Ok(PAdic { p, basis, a: reduce(a, &m), b: reduce(b, &m), prec })
    }

    pub(crate) fn from_parts(p: u64, basis: Basis, a: i64, b: i64, prec: u32) -> Result<PAdic> {
        PAdic::new(p, basis, &BigInt::from(a), &BigInt::from(b), prec)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Rational component (coefficient of 1).
    pub fn a(&self) -> &BigUint {
        &self.a
    }

    /// Coefficient of √5 (or φ when p = 2); zero for Z_p elements.
    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub(crate) fn modulus(&self) -> BigUint {
        BigUint::from(self.p).pow(self.prec)
    }

    pub fn zero_like(&self) -> PAdic {
        PAdic { a: BigUint::zero(), b: BigUint::zero(), ..self.clone() }
    }

    pub fn one_like(&self) -> PAdic {
        let a = if self.prec == 0 { BigUint::zero() } else { BigUint::one() };
        PAdic { a, b: BigUint::zero(), ..self.clone() }
    }

    pub fn truncate(&self, prec: u32) -> PAdic {
        if prec >= self.prec {
            return self.clone();
        }
        let m = BigUint::from(self.p).pow(prec);
        PAdic { a: &self.a % &m, b: &self.b % &m, prec, ..self.clone() }
    }

    /// Raises the claimed precision, taking the unknown digits to be zero.
    /// Only sound where the caller knows those digits, or where the
    /// computation downstream is insensitive to them.
    pub fn lift(&self, prec: u32) -> PAdic {
        if prec <= self.prec {
            return self.truncate(prec);
        }
        PAdic { prec, ..self.clone() }
    }

    /// Views a Z_p element inside an extension basis.
    pub fn embed(&self, basis: Basis) -> PAdic {
        if self.basis == basis {
            return self.clone();
        }
        assert_eq!(self.basis, Basis::Rational, "cannot re-embed {:?} into {basis:?}", self.basis);
        PAdic { basis, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn in_base_ring(&self) -> bool {
        self.b.is_zero()
    }

    /// The Z_p component when the second component vanishes.
    pub fn to_base(&self) -> Option<PAdic> {
        self.in_base_ring().then(|| PAdic {
            basis: Basis::Rational,
            ..self.clone()
        })
    }

    pub fn valuation(&self) -> Valuation {
        // Both bases are integral bases of an unramified extension, so the
        // valuation is the smaller of the component valuations.
        let p = BigUint::from(self.p);
        digit_valuation(&self.a, &p, self.prec).min(digit_valuation(&self.b, &p, self.prec))
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    fn digits_of(&self, x: &BigUint) -> Vec<u64> {
        let p = BigUint::from(self.p);
        let mut x = x.clone();
        (0..self.prec)
            .map(|_| {
                let (q, r) = x.div_rem(&p);
                x = q;
                r.iter_u64_digits().next().unwrap_or(0)
            })
            .collect()
    }

    /// Base-p digits of the rational component, least significant first.
    pub fn digits_a(&self) -> Vec<u64> {
        self.digits_of(&self.a)
    }

    pub fn digits_b(&self) -> Vec<u64> {
        self.digits_of(&self.b)
    }

    /// The rational component as a signed integer in (-p^prec/2, p^prec/2].
    pub fn a_centered(&self) -> BigInt {
        let m = self.modulus();
        let a = BigInt::from(self.a.clone());
        if &self.a << 1u32 > m {
            a - BigInt::from(m)
        } else {
            a
        }
    }

    fn check_compatible(&self, rhs: &PAdic) -> Basis {
        assert_eq!(self.p, rhs.p, "p-adic elements over different primes");
        match (self.basis, rhs.basis) {
            (x, y) if x == y => x,
            (Basis::Rational, y) => y,
            (x, Basis::Rational) => x,
            (x, y) => panic!("incompatible bases {x:?} and {y:?}"),
        }
    }

    fn build(&self, basis: Basis, a: BigInt, b: BigInt, prec: u32) -> PAdic {
        let m = BigUint::from(self.p).pow(prec);
        PAdic { p: self.p, basis, a: reduce(&a, &m), b: reduce(&b, &m), prec }
    }

    /// Galois conjugate. Undefined when K = Q_p, where √5 is an ordinary
    /// p-adic number.
    pub fn conj(&self) -> Result<PAdic> {
        let ring_basis = Basis::for_prime(self.p)?;
        let a = BigInt::from(self.a.clone());
        let b = BigInt::from(self.b.clone());
        match (self.basis, ring_basis) {
            (Basis::Sqrt5, _) => Ok(self.build(Basis::Sqrt5, a, -b, self.prec)),
            // (a + bφ)‾ = a + b(1 - φ)
            (Basis::Phi, _) => Ok(self.build(Basis::Phi, &a + &b, -b, self.prec)),
            (Basis::Rational, Basis::Rational) => Err(Error::Unsupported(format!(
                "Q_{}(√5) = Q_{} has no nontrivial conjugation",
                self.p, self.p
            ))),
            (Basis::Rational, _) => Ok(self.clone()),
        }
    }

    /// Field norm down to Z_p (the element itself for Z_p elements).
    pub fn norm(&self) -> PAdic {
        let a = BigInt::from(self.a.clone());
        let b = BigInt::from(self.b.clone());
        let n = match self.basis {
            Basis::Rational => a,
            Basis::Sqrt5 => &a * &a - 5 * &b * &b,
            Basis::Phi => &a * &a + &a * &b - &b * &b,
        };
        self.build(Basis::Rational, n, BigInt::zero(), self.prec)
    }

    pub fn inv(&self) -> Result<PAdic> {
        if !self.is_unit() {
            return Err(Error::Domain(format!(
                "cannot invert a non-unit (valuation {})",
                self.valuation()
            )));
        }
        let m = self.modulus();
        let n_inv = self
            .norm()
            .a
            .modinv(&m)
            .ok_or_else(|| Error::inconsistent("unit with non-invertible norm"))?;
        let n_inv = PAdic::from_biguint(self.p, &n_inv, self.prec);
        match self.basis {
            Basis::Rational => Ok(n_inv),
            _ => Ok(&self.conj()? * &n_inv),
        }
    }

    /// Exact division by p^k; fails unless ν(self) ≥ k. Loses k digits.
    pub fn shift_down(&self, k: u32) -> Result<PAdic> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.valuation() < Valuation::Finite(k) {
            return Err(Error::Domain(format!(
                "element of valuation {} is not divisible by {}^{k}",
                self.valuation(),
                self.p
            )));
        }
        if k > self.prec {
            return Err(Error::Precision { needed: k, available: self.prec });
        }
        let pk = BigUint::from(self.p).pow(k);
        Ok(PAdic {
            a: &self.a / &pk,
            b: &self.b / &pk,
            prec: self.prec - k,
            ..self.clone()
        })
    }

    /// Multiplication by p^k, keeping the claimed precision.
    pub fn shift_up(&self, k: u32) -> PAdic {
        let pk = BigUint::from(self.p).pow(k);
        let m = self.modulus();
        PAdic { a: (&self.a * &pk) % &m, b: (&self.b * &pk) % &m, ..self.clone() }
    }

    /// Division in O_K. A divisor of valuation k costs k digits of
    /// precision; the quotient must itself be integral.
    pub fn checked_div(&self, rhs: &PAdic) -> Result<PAdic> {
        self.check_compatible(rhs);
        let k = match rhs.valuation() {
            Valuation::Finite(k) => k,
            Valuation::Infinite => {
                return Err(Error::Domain("division by an element indistinguishable from 0".into()))
            }
        };
        let unit = rhs.shift_down(k)?;
        let num = self.shift_down(k).map_err(|_| {
            Error::Domain(format!(
                "quotient is not integral: numerator valuation {} below divisor valuation {k}",
                self.valuation()
            ))
        })?;
        Ok(&num * &unit.inv()?)
    }

    pub fn mul_int(&self, k: i64) -> PAdic {
        self * &PAdic::from_int(self.p, k, self.prec)
    }

    /// Division by a nonzero integer, losing ν_p(m) digits.
    pub fn div_int(&self, m: u64) -> Result<PAdic> {
        if m == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let mut k = 0;
        let mut unit = m;
        while unit.is_multiple_of(self.p) {
            unit /= self.p;
            k += 1;
        }
        let shifted = self.shift_down(k)?;
        let inv = BigUint::from(unit)
            .modinv(&shifted.modulus())
            .unwrap_or_else(BigUint::zero);
        Ok(&shifted * &PAdic::from_biguint(self.p, &inv, shifted.prec))
    }

    pub fn pow(&self, e: u64) -> PAdic {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> PAdic {
        let mut acc = self.one_like();
        for bit in (0..e.bits()).rev() {
            acc = &acc * &acc;
            if e.bit(bit) {
                acc = &acc * self;
            }
        }
        acc
    }

    /// Digit listing, least significant first, as used by the CLI.
    pub fn render_digits(&self) -> String {
        let join = |d: Vec<u64>| d.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        match self.basis {
            Basis::Rational => join(self.digits_a()),
            Basis::Sqrt5 => format!("[{}] + [{}]·√5", join(self.digits_a()), join(self.digits_b())),
            Basis::Phi => format!("[{}] + [{}]·φ", join(self.digits_a()), join(self.digits_b())),
        }
    }
}

impl fmt::Display for PAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.render_digits(), self.p, self.prec)
    }
}

impl Add for &PAdic {
    type Output = PAdic;

    fn add(self, rhs: &PAdic) -> PAdic {
        let basis = self.check_compatible(rhs);
        let prec = self.prec.min(rhs.prec);
        let m = BigUint::from(self.p).pow(prec);
        PAdic {
            p: self.p,
            basis,
            a: (&self.a + &rhs.a) % &m,
            b: (&self.b + &rhs.b) % &m,
            prec,
        }
    }
}

impl Neg for &PAdic {
    type Output = PAdic;

    fn neg(self) -> PAdic {
        let m = self.modulus();
        PAdic {
            a: (&m - &self.a) % &m,
            b: (&m - &self.b) % &m,
            ..self.clone()
        }
    }
}

impl Sub for &PAdic {
    type Output = PAdic;

    fn sub(self, rhs: &PAdic) -> PAdic {
        self + &(-rhs)
    }
}

impl Mul for &PAdic {
    type Output = PAdic;

    fn mul(self, rhs: &PAdic) -> PAdic {
        let basis = self.check_compatible(rhs);
        let prec = self.prec.min(rhs.prec);
        let m = BigUint::from(self.p).pow(prec);
        let (a, b, c, d) = (&self.a, &self.b, &rhs.a, &rhs.b);
        let (x, y) = match basis {
            Basis::Rational => ((a * c) % &m, BigUint::zero()),
            Basis::Sqrt5 => ((a * c + 5u32 * b * d) % &m, (a * d + b * c) % &m),
            // φ² = φ + 1
            Basis::Phi => {
                let bd = b * d;
                ((a * c + &bd) % &m, (a * d + b * c + bd) % &m)
            }
        };
        PAdic { p: self.p, basis, a: x, b: y, prec }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for PAdic {
            type Output = PAdic;
            fn $method(self, rhs: PAdic) -> PAdic {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&PAdic> for PAdic {
            type Output = PAdic;
            fn $method(self, rhs: &PAdic) -> PAdic {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for PAdic {
    type Output = PAdic;

    fn neg(self) -> PAdic {
        -&self
    }
}
