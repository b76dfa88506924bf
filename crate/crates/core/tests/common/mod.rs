#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;

use euler_taylor::exact::{parse_decimal, to_scientific};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Rows of a CSV fixture without its header line.
pub fn rows(name: &str) -> Vec<Vec<String>> {
    fixture(name)
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

/// A published decimal `m.mmm…e<exp>` (or a bare integer) with the number of
/// significant digits it carries.
#[derive(Clone, Debug)]
pub struct Published {
    pub text: String,
    pub value: BigRational,
    pub exponent: i64,
    pub digits: u32,
}

pub fn published(text: &str) -> Published {
    let (mantissa, exponent) = match text.split_once('e') {
        Some((m, e)) => (m, e.parse::<i64>().expect("exponent")),
        None => (text, 0),
    };
    let mut value = parse_decimal(mantissa).expect("decimal mantissa");
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), exponent.unsigned_abs() as usize));
    if exponent >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    let digits = mantissa.trim_start_matches('-').chars().filter(char::is_ascii_digit).count() as u32;
    let exponent = if text.contains('e') { exponent } else { digits as i64 - 1 };
    Published {
        text: text.to_owned(),
        value,
        exponent,
        digits,
    }
}

/// Distance between `exact`, rounded to 16 significant digits, and a
/// 16-digit published value, in units of the 16th digit. Integers published
/// in full are compared exactly (distance 0 or infinity).
pub fn units_of_16th_digit(exact: &BigRational, reference: &Published) -> f64 {
    if !reference.text.contains('e') {
        return if *exact == reference.value { 0.0 } else { f64::INFINITY };
    }
    let ours = published(&to_scientific(exact, 16).to_string());
    let shift = reference.exponent - 15;
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), shift.unsigned_abs() as usize));
    let diff = (ours.value - &reference.value).abs();
    euler_taylor::exact::to_f64(&if shift >= 0 { diff / scale } else { diff * scale })
}

pub fn reference_norms() -> Vec<(usize, Published)> {
    rows("squared_norms.csv")
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), published(&r[1])))
        .collect()
}

pub fn norm_polynomial_52() -> Vec<(usize, Published)> {
    rows("norm_polynomial_52.csv")
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), published(&r[1])))
        .collect()
}

/// `(p, T∘, |T∘| as printed, T★)`.
pub fn reference_poles() -> Vec<(usize, num_complex::Complex64, f64, num_complex::Complex64)> {
    rows("diagonal_poles.csv")
        .into_iter()
        .map(|r| {
            let f: Vec<f64> = r[1..].iter().map(|x| x.parse().unwrap()).collect();
            (
                r[0].parse().unwrap(),
                num_complex::Complex64::new(f[0], f[1]),
                f[2],
                num_complex::Complex64::new(f[3], f[4]),
            )
        })
        .collect()
}

/// Writes straight to the process stdout so the line survives the test
/// harness's output capture.
pub fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {criterion}: {verdict} {detail}").unwrap();
    out.flush().unwrap();
}

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn big(n: &str, d: &str) -> BigRational {
    BigRational::new(n.parse().unwrap(), d.parse().unwrap())
}
