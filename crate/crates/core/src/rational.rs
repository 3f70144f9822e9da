//! Exact rational numbers: parsing and text formatting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number syntax: {0:?}")]
    Syntax(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("exponent out of range in {0:?}")]
    Exponent(String),
}

/// Largest decimal exponent accepted; keeps hostile input from allocating huge integers.
const MAX_EXPONENT: i64 = 4096;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// Parses an integer, a decimal with optional exponent, or `p/q`.
pub fn parse_rational(text: &str) -> Result<Q, RationalError> {
    if text.is_empty() {
        return Err(RationalError::Empty);
    }
    if let Some((p, q)) = text.split_once('/') {
        let num = parse_integer(p).ok_or_else(|| RationalError::Syntax(text.to_string()))?;
        let den = parse_integer(q).ok_or_else(|| RationalError::Syntax(text.to_string()))?;
        if den.is_zero() {
            return Err(RationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Q::new(num, den));
    }
    parse_decimal(text)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(text: &str) -> Result<Q, RationalError> {
    let err = || RationalError::Syntax(text.to_string());
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (whole, fraction) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    if whole.is_empty() && fraction.is_empty() {
        return Err(err());
    }
    if !whole.bytes().chain(fraction.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut exp: i64 = match exponent {
        Some(e) => {
            let digits = e.strip_prefix(['-', '+']).unwrap_or(e);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            if digits.len() > 6 {
                return Err(RationalError::Exponent(text.to_string()));
            }
            e.parse().map_err(|_| err())?
        }
        None => 0,
    };
    exp -= fraction.len() as i64;
    if exp.abs() > MAX_EXPONENT {
        return Err(RationalError::Exponent(text.to_string()));
    }
    let digits = format!("{whole}{fraction}");
    let mut value: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    if negative {
        value = -value;
    }
    let ten = BigInt::from(10);
    let scale = num_traits::pow(ten, exp.unsigned_abs() as usize);
    Ok(if exp >= 0 {
        Q::from_integer(value * scale)
    } else {
        Q::new(value, scale)
    })
}

/// `p/q` form, or plain integer when the denominator is 1.
pub fn to_fraction_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact decimal text if the denominator has only factors 2 and 5.
pub fn to_exact_decimal(q: &Q) -> Option<String> {
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    if places == 0 {
        return Some(q.numer().to_string());
    }
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (q * Q::from_integer(scale)).to_integer();
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (w, f) = padded.split_at(padded.len() - places);
    let f = f.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    Some(if f.is_empty() {
        format!("{sign}{w}")
    } else {
        format!("{sign}{w}.{f}")
    })
}

/// Decimal rounded to `places` digits (half away from zero).
pub fn to_rounded_decimal(q: &Q, places: usize) -> String {
    let scale = Q::from_integer(num_traits::pow(BigInt::from(10), places));
    let scaled = q * &scale;
    let half = frac(1, 2);
    let rounded = if scaled.is_negative() {
        -((-scaled) + &half).floor()
    } else {
        (scaled + &half).floor()
    };
    let value = Q::new(rounded.to_integer(), scale.to_integer());
    to_exact_decimal(&value).unwrap_or_else(|| to_fraction_string(&value))
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn sign(q: &Q) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("0.125").unwrap(), frac(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("1.5e2").unwrap(), int(150));
        assert_eq!(parse_rational("25E-2").unwrap(), frac(1, 4));
        assert_eq!(parse_rational("7.").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "-", ".", "1/0", "a", "1.2.3", "1e", "1/2/3", " 1", "1e9999999", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats_decimals() {
        assert_eq!(to_exact_decimal(&frac(1, 8)).unwrap(), "0.125");
        assert_eq!(to_exact_decimal(&frac(-5, 2)).unwrap(), "-2.5");
        assert_eq!(to_exact_decimal(&int(12)).unwrap(), "12");
        assert_eq!(to_exact_decimal(&frac(-1, 20)).unwrap(), "-0.05");
        assert!(to_exact_decimal(&frac(1, 3)).is_none());
        assert_eq!(to_rounded_decimal(&frac(1, 3), 4), "0.3333");
        assert_eq!(to_rounded_decimal(&frac(-2, 3), 2), "-0.67");
    }

    proptest::proptest! {
        #[test]
        fn fraction_round_trip(p in -100000i64..100000, q in 1i64..100000) {
            let x = frac(p, q);
            proptest::prop_assert_eq!(parse_rational(&to_fraction_string(&x)).unwrap(), x.clone());
            if let Some(d) = to_exact_decimal(&x) {
                proptest::prop_assert_eq!(parse_rational(&d).unwrap(), x);
            }
        }
    }
}
