//! Exact rational helpers: text encoding, correctly rounded conversion to
//! `f64`, fixed-digit decimal rendering and high-precision square roots.
//!
//! Floats only ever leave this module as the final rounding of an exact
//! value, so downstream tables carry a single rounding error.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Digits carried by the high-precision intermediates (square roots, roots).
pub const HIGH_PRECISION_DIGITS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

fn parse_digits(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Parses `num/den` or a bare integer. The numerator may carry a leading
/// `-`; the denominator must be a positive decimal integer.
pub fn parse_rational(literal: &str) -> Result<BigRational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        literal: literal.to_owned(),
        reason,
    };
    let (num, den) = match literal.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (literal, None),
    };
    let (negative, digits) = match num.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, num),
    };
    let magnitude = parse_digits(digits).ok_or_else(|| err("numerator is not an integer"))?;
    let numerator = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, magnitude);
    let denominator = match den {
        None => BigInt::one(),
        Some(d) => {
            let d = parse_digits(d).ok_or_else(|| err("denominator is not a positive integer"))?;
            if d.is_zero() {
                return Err(err("zero denominator"));
            }
            BigInt::from(d)
        }
    };
    Ok(BigRational::new(numerator, denominator))
}

/// Parses a rational that must already be in lowest terms with a positive
/// denominator (the on-disk canonical form).
pub fn parse_canonical_rational(literal: &str) -> Result<BigRational, ParseRationalError> {
    let value = parse_rational(literal)?;
    if format_rational(&value) != literal {
        return Err(ParseRationalError {
            literal: literal.to_owned(),
            reason: "not in canonical lowest-terms form",
        });
    }
    Ok(value)
}

/// `num/den`, or just `num` when the denominator is one.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses a plain decimal literal such as `0.32`, `-1.5` or `7` into the
/// exact rational it denotes.
pub fn parse_decimal(literal: &str) -> Result<BigRational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        literal: literal.to_owned(),
        reason,
    };
    let (negative, body) = match literal.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, literal),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("empty decimal"));
    }
    let all = format!("{int_part}{frac_part}");
    let mantissa = parse_digits(&all).ok_or_else(|| err("not a decimal number"))?;
    let mut value = BigRational::new(
        BigInt::from(mantissa),
        num_traits::pow(BigInt::from(10u32), frac_part.len()),
    );
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

fn ldexp(mantissa: f64, exp: i64) -> f64 {
    let mut x = mantissa;
    let mut e = exp;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Converts to the nearest `f64` (ties to even), for values in the normal
/// range. Overflow gives an infinity.
pub fn to_f64(value: &BigRational) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let negative = value.is_negative();
    let n = value.numer().magnitude().clone();
    let d = value.denom().magnitude().clone();
    // Pick a binary exponent so that n / d / 2^shift lands in [2^54, 2^56).
    let shift = n.bits() as i64 - d.bits() as i64 - 55;
    let (scaled_n, scaled_d) = if shift >= 0 {
        (n, d << (shift as usize))
    } else {
        (n << ((-shift) as usize), d)
    };
    let (q, r) = scaled_n.div_rem(&scaled_d);
    let q_bits = q.bits() as i64;
    let drop = q_bits - 53;
    let sticky = !r.is_zero();
    let mut mantissa = &q >> (drop as usize);
    let dropped = &q - (&mantissa << (drop as usize));
    let half = BigUint::one() << ((drop - 1) as usize);
    let round_up = match dropped.cmp(&half) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => sticky || mantissa.is_odd(),
    };
    if round_up {
        mantissa += 1u32;
    }
    let m = mantissa.to_u64().expect("53-bit mantissa") as f64;
    let out = ldexp(m, shift + drop);
    if negative {
        -out
    } else {
        out
    }
}

/// Natural log of a positive rational, accurate to a few ulps even when the
/// numerator and denominator are far outside the `f64` range.
pub fn ln_rational(value: &BigRational) -> f64 {
    assert!(value.is_positive(), "ln of a nonpositive rational");
    ln_biguint(value.numer().magnitude()) - ln_biguint(value.denom().magnitude())
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> (shift as usize)).to_f64().expect("64-bit");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Integer part of `log10(|x|)` for nonzero `x`.
fn decimal_exponent(value: &BigRational) -> i64 {
    let n = value.numer().magnitude();
    let d = value.denom().magnitude();
    let mut e = n.to_string().len() as i64 - d.to_string().len() as i64;
    // 10^e <= n/d < 10^(e+1)
    loop {
        let (lhs, rhs) = scale_pair(n, d, e);
        if lhs < rhs {
            e -= 1;
            continue;
        }
        let (lhs, rhs) = scale_pair(n, d, e + 1);
        if lhs >= rhs {
            e += 1;
            continue;
        }
        return e;
    }
}

/// Returns (n * 10^-e, d) cleared of negative powers, i.e. a pair whose
/// comparison decides `n/d` against `10^e`.
fn scale_pair(n: &BigUint, d: &BigUint, e: i64) -> (BigUint, BigUint) {
    if e >= 0 {
        (n.clone(), d * pow10(e as u32))
    } else {
        (n * pow10((-e) as u32), d.clone())
    }
}

fn pow10(e: u32) -> BigUint {
    num_traits::pow(BigUint::from(10u32), e as usize)
}

/// A decimal in scientific form: `digits` holds exactly the requested number
/// of significant digits, value = 0.digits * 10^(exponent+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scientific {
    pub negative: bool,
    pub digits: String,
    pub exponent: i64,
}

impl fmt::Display for Scientific {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.chars().all(|c| c == '0') {
            return write!(f, "0");
        }
        let sign = if self.negative { "-" } else { "" };
        let (head, tail) = self.digits.split_at(1);
        if tail.is_empty() {
            write!(f, "{sign}{head}e{}", self.exponent)
        } else {
            write!(f, "{sign}{head}.{tail}e{}", self.exponent)
        }
    }
}

/// Rounds an exact rational to `sig` significant decimal digits, ties to
/// even.
pub fn to_scientific(value: &BigRational, sig: u32) -> Scientific {
    assert!(sig >= 1);
    if value.is_zero() {
        return Scientific {
            negative: false,
            digits: "0".repeat(sig as usize),
            exponent: 0,
        };
    }
    let n = value.numer().magnitude();
    let d = value.denom().magnitude();
    let mut e = decimal_exponent(value);
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 {
        (n * pow10(shift as u32), d.clone())
    } else {
        (n.clone(), d * pow10((-shift) as u32))
    };
    let (mut q, r) = num.div_rem(&den);
    let twice = &r << 1usize;
    let round_up = match twice.cmp(&den) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => q.is_odd(),
    };
    if round_up {
        q += 1u32;
    }
    if q == pow10(sig) {
        q = pow10(sig - 1);
        e += 1;
    }
    Scientific {
        negative: value.is_negative(),
        digits: q.to_string(),
        exponent: e,
    }
}

/// Rational approximation of `sqrt(value)` with `digits` significant
/// decimal digits (truncated). `value` must be nonnegative.
pub fn sqrt_high_precision(value: &BigRational, digits: u32) -> BigRational {
    assert!(!value.is_negative(), "square root of a negative rational");
    if value.is_zero() {
        return BigRational::zero();
    }
    // sqrt(n/d) = sqrt(n * d * 10^(2p)) / (d * 10^p)
    let e = decimal_exponent(value);
    let p = (digits as i64 - e / 2 + 2).max(0) as u32;
    let n = value.numer().magnitude();
    let d = value.denom().magnitude();
    let radicand = n * d * pow10(2 * p);
    let root = radicand.sqrt();
    BigRational::new(BigInt::from(root), BigInt::from(d * pow10(p)))
}

/// `sqrt(value)` rounded to the nearest `f64` through a high-precision
/// intermediate.
pub fn sqrt_to_f64(value: &BigRational) -> f64 {
    to_f64(&sqrt_high_precision(value, HIGH_PRECISION_DIGITS))
}

/// Rounds a positive float up (away from zero) to `sig` significant digits.
pub fn ceil_significant(x: f64, sig: u32) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return x;
    }
    let exact = rational_from_f64(x).expect("finite");
    let e = decimal_exponent(&exact);
    let shift = sig as i64 - 1 - e;
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10u32), shift.unsigned_abs() as usize));
    let scaled = if shift >= 0 { &exact * &scale } else { &exact / &scale };
    let rounded = scaled.ceil();
    let back = if shift >= 0 { rounded / scale } else { rounded * scale };
    to_f64(&back)
}

/// Largest multiple of `10^-digits` that is `<= x` (exact decimal floor,
/// immune to binary representation error of `x * 10^digits`).
pub fn floor_decimal(x: f64, digits: u32) -> f64 {
    decimal_grid(x, digits, false)
}

/// Smallest multiple of `10^-digits` that is `>= x`.
pub fn ceil_decimal(x: f64, digits: u32) -> f64 {
    decimal_grid(x, digits, true)
}

fn decimal_grid(x: f64, digits: u32, up: bool) -> f64 {
    let exact = rational_from_f64(x).expect("finite");
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10u32), digits as usize));
    let scaled = &exact * &scale;
    let k = if up { scaled.ceil() } else { scaled.floor() };
    let grid = k / scale;
    let mut out = to_f64(&grid);
    // The f64 nearest to the grid point may sit just inside x; nudge outward
    // so the bound never narrows.
    if up {
        while out < x {
            out = next_up(out);
        }
    } else {
        while out > x {
            out = next_down(out);
        }
    }
    out
}

fn next_up(x: f64) -> f64 {
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits + 1 } else { bits - 1 })
}

fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

/// Evaluates a polynomial with exact rational coefficients (ascending powers)
/// at an exact rational point by Horner's rule.
pub fn horner(coeffs: &[BigRational], t: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * t + c)
}
