//! Helpers for exact densities: JSON encoding as `{num, den}` strings and
//! decimal rendering.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A reduced fraction with big-integer parts written as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionRepr {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for FractionRepr {
    fn from(q: &BigRational) -> Self {
        FractionRepr { num: q.numer().to_string(), den: q.denom().to_string() }
    }
}

impl TryFrom<FractionRepr> for BigRational {
    type Error = String;

    fn try_from(repr: FractionRepr) -> Result<Self, String> {
        let num: BigInt = repr.num.parse().map_err(|_| format!("bad numerator {:?}", repr.num))?;
        let den: BigInt = repr.den.parse().map_err(|_| format!("bad denominator {:?}", repr.den))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(num, den))
    }
}

/// `#[serde(with = "crate::fraction::serde_fraction")]`
pub mod serde_fraction {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        FractionRepr::from(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        BigRational::try_from(FractionRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// "num/den", or just "num" for integers.
pub fn display(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses "num/den" or an integer.
pub fn parse(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.trim().parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    (!den.is_zero()).then(|| BigRational::new(num, den))
}

fn digit_count(n: &BigUint) -> i64 {
    n.to_string().len() as i64
}

/// Decimal rendering with `sig` significant digits, rounded half up and
/// with trailing zeros dropped (like printf's `%.*g` for moderate values).
pub fn to_decimal(q: &BigRational, sig: u32) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let num = q.numer().magnitude().clone();
    let den = q.denom().magnitude().clone();
    let ten = BigUint::from(10u32);
    // scale = number of digits after the decimal point
    let mut scale = sig as i64 - (digit_count(&num) - digit_count(&den)) - 1;
    let scaled = loop {
        let (n, d) = if scale >= 0 {
            (&num * ten.pow(scale as u32), den.clone())
        } else {
            (num.clone(), &den * ten.pow((-scale) as u32))
        };
        let (quot, rem) = n.div_rem(&d);
        let rounded = if rem * 2u32 >= d { quot + 1u32 } else { quot };
        let len = digit_count(&rounded);
        if len > sig as i64 {
            scale -= 1;
        } else if len < sig as i64 && !rounded.is_zero() && scale < 4 * sig as i64 + 64 {
            scale += 1;
        } else {
            break rounded;
        }
    };
    let mut digits = scaled.to_string();
    if scale <= 0 {
        digits.extend(std::iter::repeat_n('0', (-scale) as usize));
        return format!("{sign}{digits}");
    }
    let scale = scale as usize;
    if digits.len() <= scale {
        digits = "0".repeat(scale + 1 - digits.len()) + &digits;
    }
    let (int_part, frac_part) = digits.split_at(digits.len() - scale);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    to_decimal(q, 17).parse().unwrap_or(f64::NAN)
}
