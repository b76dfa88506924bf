//! Sparse Fourier representation of real, divergence-free, zero-mean vector
//! fields on the 2π-periodic torus with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exact::{format_rational, parse_rational, ParseRationalError};

/// Integer wavevector. Ordering is lexicographic on `(k1, k2, k3)`, which is
/// the canonical order used for every traversal and serialization.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WaveVector(pub [i64; 3]);

impl WaveVector {
    pub const ZERO: WaveVector = WaveVector([0, 0, 0]);

    pub const fn new(k1: i64, k2: i64, k3: i64) -> Self {
        WaveVector([k1, k2, k3])
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn dot(&self, other: &WaveVector) -> i64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0, 0, 0]
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

impl std::ops::Neg for WaveVector {
    type Output = WaveVector;
    fn neg(self) -> WaveVector {
        WaveVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl std::ops::Add for WaveVector {
    type Output = WaveVector;
    fn add(self, o: WaveVector) -> WaveVector {
        WaveVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl std::ops::Sub for WaveVector {
    type Output = WaveVector;
    fn sub(self, o: WaveVector) -> WaveVector {
        WaveVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl fmt::Debug for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

/// Rational triple.
pub type Vec3 = [BigRational; 3];

pub fn zero_vec3() -> Vec3 {
    [BigRational::zero(), BigRational::zero(), BigRational::zero()]
}

fn vec3_is_zero(v: &Vec3) -> bool {
    v.iter().all(Zero::is_zero)
}

fn dot_k(k: &WaveVector, v: &Vec3) -> BigRational {
    (0..3).fold(BigRational::zero(), |acc, i| acc + &v[i] * BigInt::from(k.0[i]))
}

/// Complex rational 3-vector stored as separate real and imaginary triples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ComplexVec3 {
    pub re: Vec3,
    pub im: Vec3,
}

impl ComplexVec3 {
    pub fn new(re: Vec3, im: Vec3) -> Self {
        ComplexVec3 { re, im }
    }

    pub fn zero() -> Self {
        ComplexVec3 {
            re: zero_vec3(),
            im: zero_vec3(),
        }
    }

    pub fn from_real(re: Vec3) -> Self {
        ComplexVec3 { re, im: zero_vec3() }
    }

    pub fn is_zero(&self) -> bool {
        vec3_is_zero(&self.re) && vec3_is_zero(&self.im)
    }

    pub fn conj(&self) -> Self {
        ComplexVec3 {
            re: self.re.clone(),
            im: self.im.clone().map(|x| -x),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexVec3 {
            re: self.re.clone().map(|x| -x),
            im: self.im.clone().map(|x| -x),
        }
    }

    /// `k · c`, as a (real, imaginary) pair.
    pub fn dot_k(&self, k: &WaveVector) -> (BigRational, BigRational) {
        (dot_k(k, &self.re), dot_k(k, &self.im))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        ComplexVec3 {
            re: self.re.clone().map(|x| x * s),
            im: self.im.clone().map(|x| x * s),
        }
    }

    pub fn has_real_part(&self) -> bool {
        !vec3_is_zero(&self.re)
    }

    pub fn has_imag_part(&self) -> bool {
        !vec3_is_zero(&self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("coefficient at {0:?} is not orthogonal to its wavevector")]
    DivergenceViolation(WaveVector),
    #[error("field has an entry at the zero wavevector")]
    MeanViolation,
    #[error("coefficient at {0:?} is not the conjugate of the one at the opposite wavevector")]
    ConjugacyViolation(WaveVector),
    #[error("wavevector {0:?} listed more than once")]
    DuplicateMode(WaveVector),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Rational {
        line: usize,
        #[source]
        source: ParseRationalError,
    },
}

/// Immutable sparse field. Every instance is divergence-free, has zero mean,
/// satisfies `u_{-k} = conj(u_k)` and stores no zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct FourierField {
    modes: BTreeMap<WaveVector, ComplexVec3>,
}

impl FourierField {
    pub fn zero() -> Self {
        FourierField::default()
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, k: &WaveVector) -> Option<&ComplexVec3> {
        self.modes.get(k)
    }

    /// Modes in canonical (lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = (&WaveVector, &ComplexVec3)> {
        self.modes.iter()
    }

    pub fn wavevectors(&self) -> impl Iterator<Item = &WaveVector> {
        self.modes.keys()
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.modes.values().all(|c| !c.has_imag_part())
    }

    /// True when every coefficient is purely imaginary.
    pub fn is_imaginary(&self) -> bool {
        self.modes.values().all(|c| !c.has_real_part())
    }

    /// Builds a field from entries already known to satisfy the invariants.
    /// Zero coefficients are dropped.
    pub(crate) fn from_trusted(modes: BTreeMap<WaveVector, ComplexVec3>) -> Self {
        let mut modes = modes;
        modes.retain(|_, c| !c.is_zero());
        let field = FourierField { modes };
        debug_assert_eq!(field.check_invariants(), Ok(()));
        field
    }

    /// Full invariant check, used on every untrusted construction path.
    pub fn check_invariants(&self) -> Result<(), FieldError> {
        for (k, c) in &self.modes {
            if k.is_zero() {
                return Err(FieldError::MeanViolation);
            }
            let (dr, di) = c.dot_k(k);
            if !dr.is_zero() || !di.is_zero() {
                return Err(FieldError::DivergenceViolation(*k));
            }
            match self.modes.get(&-*k) {
                Some(partner) if *partner == c.conj() => {}
                _ => return Err(FieldError::ConjugacyViolation(*k)),
            }
        }
        Ok(())
    }
}

/// Validates and builds a field. Entries with a zero coefficient are
/// dropped; any entry at the zero wavevector is rejected.
pub fn make_field<I>(entries: I) -> Result<FourierField, FieldError>
where
    I: IntoIterator<Item = (WaveVector, ComplexVec3)>,
{
    let mut modes = BTreeMap::new();
    for (k, c) in entries {
        if modes.insert(k, c).is_some() {
            return Err(FieldError::DuplicateMode(k));
        }
    }
    if modes.contains_key(&WaveVector::ZERO) {
        return Err(FieldError::MeanViolation);
    }
    modes.retain(|_, c| !c.is_zero());
    let field = FourierField { modes };
    field.check_invariants()?;
    Ok(field)
}

/// Leray projection of `c` onto the plane orthogonal to `k`. The zero
/// wavevector projects to the identity.
pub fn leray_project(k: &WaveVector, c: &ComplexVec3) -> ComplexVec3 {
    if k.is_zero() {
        return c.clone();
    }
    let k2 = BigRational::from_integer(k.norm_sq().into());
    let (dr, di) = c.dot_k(k);
    let sr = dr / &k2;
    let si = di / &k2;
    let project = |v: &Vec3, s: &BigRational| -> Vec3 {
        std::array::from_fn(|i| &v[i] - s * BigInt::from(k.0[i]))
    };
    ComplexVec3 {
        re: project(&c.re, &sr),
        im: project(&c.im, &si),
    }
}

/// `alpha * v + beta * w`, dropping coefficients that cancel.
pub fn linear_combine(
    alpha: &BigRational,
    v: &FourierField,
    beta: &BigRational,
    w: &FourierField,
) -> FourierField {
    let mut out: BTreeMap<WaveVector, ComplexVec3> = BTreeMap::new();
    if !alpha.is_zero() {
        for (k, c) in v.iter() {
            out.insert(*k, c.scale(alpha));
        }
    }
    if !beta.is_zero() {
        for (k, c) in w.iter() {
            let add = c.scale(beta);
            match out.get_mut(k) {
                Some(existing) => {
                    for i in 0..3 {
                        existing.re[i] += &add.re[i];
                        existing.im[i] += &add.im[i];
                    }
                }
                None => {
                    out.insert(*k, add);
                }
            }
        }
    }
    FourierField::from_trusted(out)
}

/// Largest sup-norm of a wavevector in the support; zero for the zero field.
pub fn support_radius(v: &FourierField) -> i64 {
    v.wavevectors().map(WaveVector::max_abs).max().unwrap_or(0)
}

/// Parses the datum text format: one mode per line,
/// `k1 k2 k3 re1 im1 re2 im2 re3 im3`, rationals as `num/den` or integers.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_datum(text: &str) -> Result<FourierField, FieldError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(FieldError::Syntax {
                line,
                message: format!("expected 9 fields, found {}", tokens.len()),
            });
        }
        let mut k = [0i64; 3];
        for i in 0..3 {
            k[i] = parse_component(tokens[i]).ok_or_else(|| FieldError::Syntax {
                line,
                message: format!("invalid wavevector component {:?}", tokens[i]),
            })?;
        }
        let mut values = Vec::with_capacity(6);
        for tok in &tokens[3..] {
            values.push(parse_rational(tok).map_err(|source| FieldError::Rational { line, source })?);
        }
        let re = [values[0].clone(), values[2].clone(), values[4].clone()];
        let im = [values[1].clone(), values[3].clone(), values[5].clone()];
        entries.push((WaveVector(k), ComplexVec3::new(re, im)));
    }
    make_field(entries)
}

/// Wavevector components are bounded far below `i64` so that products and
/// squared norms never overflow.
pub const MAX_COMPONENT: i64 = 1 << 20;

pub(crate) fn parse_component(token: &str) -> Option<i64> {
    let digits = token.strip_prefix('-').unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 8 {
        return None;
    }
    let value: i64 = token.parse().ok()?;
    (value.abs() <= MAX_COMPONENT).then_some(value)
}

/// Renders a field in the datum text format, modes in canonical order.
pub fn format_datum(field: &FourierField) -> String {
    let mut out = String::new();
    for (k, c) in field.iter() {
        out.push_str(&k.to_string());
        for i in 0..3 {
            out.push(' ');
            out.push_str(&format_rational(&c.re[i]));
            out.push(' ');
            out.push_str(&format_rational(&c.im[i]));
        }
        out.push('\n');
    }
    out
}

/// A field in common-denominator integer form: every coefficient equals an
/// integer numerator divided by one shared positive denominator. Real and
/// imaginary parts are kept separately and omitted when identically zero.
#[derive(Clone, Debug)]
pub struct ScaledField {
    pub modes: Vec<WaveVector>,
    pub re: Option<Vec<[BigInt; 3]>>,
    pub im: Option<Vec<[BigInt; 3]>>,
    pub denom: BigInt,
}

impl ScaledField {
    pub fn from_field(field: &FourierField) -> Self {
        let mut denom = BigInt::one();
        for (_, c) in field.iter() {
            for x in c.re.iter().chain(c.im.iter()) {
                if !x.denom().is_one() {
                    denom = denom.lcm(x.denom());
                }
            }
        }
        let modes: Vec<WaveVector> = field.wavevectors().copied().collect();
        let scale = |x: &BigRational| -> BigInt {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (&denom / x.denom())
            }
        };
        let has_re = field.iter().any(|(_, c)| c.has_real_part());
        let has_im = field.iter().any(|(_, c)| c.has_imag_part());
        let re = has_re.then(|| {
            field
                .iter()
                .map(|(_, c)| std::array::from_fn(|i| scale(&c.re[i])))
                .collect()
        });
        let im = has_im.then(|| {
            field
                .iter()
                .map(|(_, c)| std::array::from_fn(|i| scale(&c.im[i])))
                .collect()
        });
        ScaledField { modes, re, im, denom }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

/// Reduces `num / den` to lowest terms with a positive denominator.
pub(crate) fn reduced(num: BigInt, den: &BigInt) -> BigRational {
    if num.is_zero() {
        return BigRational::zero();
    }
    let g = num.gcd(den);
    let (mut n, mut d) = (num / &g, den / &g);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    BigRational::new_raw(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn real(v: [i64; 3]) -> ComplexVec3 {
        ComplexVec3::from_real(v.map(q))
    }

    fn pair(k: WaveVector, c: ComplexVec3) -> [(WaveVector, ComplexVec3); 2] {
        let conj = c.conj();
        [(k, c), (-k, conj)]
    }

    #[test]
    fn validation_catches_each_violation() {
        let k = WaveVector::new(1, 1, 0);
        let good = pair(k, real([1, -1, 0]));
        assert!(make_field(good.clone()).is_ok());

        let bad_div = pair(k, real([1, 0, 0]));
        assert_eq!(make_field(bad_div), Err(FieldError::DivergenceViolation(-k)));

        let mean = vec![(WaveVector::ZERO, real([1, 0, 0]))];
        assert_eq!(make_field(mean), Err(FieldError::MeanViolation));

        let lonely = vec![(k, real([1, -1, 0]))];
        assert_eq!(make_field(lonely), Err(FieldError::ConjugacyViolation(k)));

        let mut dup = good.to_vec();
        dup.push(good[0].clone());
        assert_eq!(make_field(dup), Err(FieldError::DuplicateMode(k)));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let k = WaveVector::new(0, 0, 1);
        let f = make_field(pair(k, ComplexVec3::zero())).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn leray_removes_longitudinal_part() {
        let k = WaveVector::new(1, 2, 2);
        let c = real([9, 0, 0]);
        let p = leray_project(&k, &c);
        let (dr, di) = p.dot_k(&k);
        assert!(dr.is_zero() && di.is_zero());
        assert_eq!(p.re, [q(8), q(-2), q(-2)]);
        assert_eq!(leray_project(&WaveVector::ZERO, &c), c);
    }

    #[test]
    fn datum_round_trip() {
        let text = "# a comment\n1 1 0 1 0 -1 0 0 0\n-1 -1 0 1 0 -1 0 0 0\n\n0 0 1 1/2 1/3 0 0 0 0\n0 0 -1 1/2 -1/3 0 0 0 0\n";
        let f = parse_datum(text).unwrap();
        assert_eq!(f.len(), 4);
        let again = parse_datum(&format_datum(&f)).unwrap();
        assert_eq!(f, again);
        assert!(matches!(parse_datum("1 1 0 1 0"), Err(FieldError::Syntax { line: 1, .. })));
        assert!(matches!(parse_datum("1 1 0 1 0 x 0 0 0"), Err(FieldError::Rational { line: 1, .. })));
    }

    #[test]
    fn scaled_form_reconstructs_field() {
        let text = "1 1 0 1/2 0 -1/2 0 0 0\n-1 -1 0 1/2 0 -1/2 0 0 0\n0 0 1 1/3 0 0 0 0 0\n0 0 -1 1/3 0 0 0 0 0\n";
        let f = parse_datum(text).unwrap();
        let s = ScaledField::from_field(&f);
        assert_eq!(s.denom, BigInt::from(6));
        assert!(s.im.is_none());
        let re = s.re.as_ref().unwrap();
        for (idx, (k, c)) in f.iter().enumerate() {
            assert_eq!(s.modes[idx], *k);
            for i in 0..3 {
                assert_eq!(BigRational::new(re[idx][i].clone(), s.denom.clone()), c.re[i]);
            }
        }
        assert_eq!(support_radius(&f), 1);
    }

    /// Random divergence-free field built from cross products, so the
    /// invariants hold by construction.
    fn arb_field() -> impl Strategy<Value = FourierField> {
        let mode = (
            (-2i64..=2, -2i64..=2, -2i64..=2),
            (-3i64..=3, -3i64..=3, -3i64..=3),
            (-3i64..=3, -3i64..=3, -3i64..=3),
        );
        proptest::collection::vec(mode, 0..5).prop_map(|modes| {
            let mut map = BTreeMap::new();
            for ((a, b, c), (x1, x2, x3), (y1, y2, y3)) in modes {
                let k = WaveVector::new(a, b, c);
                if k.is_zero() || map.contains_key(&k) {
                    continue;
                }
                let cross = |x: [i64; 3]| [k.0[1] * x[2] - k.0[2] * x[1], k.0[2] * x[0] - k.0[0] * x[2], k.0[0] * x[1] - k.0[1] * x[0]];
                let c = ComplexVec3::new(cross([x1, x2, x3]).map(q), cross([y1, y2, y3]).map(q));
                map.insert(-k, c.conj());
                map.insert(k, c);
            }
            make_field(map).unwrap()
        })
    }

    proptest! {
        #[test]
        fn linear_combination_preserves_invariants(
            v in arb_field(), w in arb_field(), a in -5i64..5, b in -5i64..5, d in 1i64..7
        ) {
            let alpha = BigRational::new(a.into(), d.into());
            let beta = q(b);
            let sum = linear_combine(&alpha, &v, &beta, &w);
            prop_assert_eq!(sum.check_invariants(), Ok(()));
            prop_assert!(sum.iter().all(|(_, c)| !c.is_zero()));
            let back = linear_combine(&q(1), &sum, &(-beta.clone()), &w);
            prop_assert_eq!(back, linear_combine(&alpha, &v, &q(0), &w));
        }

        #[test]
        fn datum_format_round_trips(v in arb_field()) {
            prop_assert_eq!(parse_datum(&format_datum(&v)).unwrap(), v);
        }
    }
}
