//! Exact complex numbers with arbitrary-precision rational parts.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// `re + im·i` with exact rational parts.
///
/// Serialized as `"p/q"` when real and `"p/q+r/si"` otherwise; the
/// deserializer also accepts `{"re": "p/q", "im": "r/s"}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ExactComplexRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        ExactComplexRational { re, im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(v: i64) -> Self {
        Self::real(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for real integers.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    /// Representative modulo the integers: real part reduced into `[0, 1)`.
    pub fn mod_one(&self) -> Self {
        ExactComplexRational { re: &self.re - self.re.floor(), im: self.im.clone() }
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        ExactComplexRational { re: &self.re * &k, im: &self.im * &k }
    }

    pub fn scale_rational(&self, k: &BigRational) -> Self {
        ExactComplexRational { re: &self.re * k, im: &self.im * k }
    }

    /// Division by a non-zero integer.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        let k = BigRational::from_integer(BigInt::from(k));
        ExactComplexRational { re: &self.re / &k, im: &self.im / &k }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Largest denominator of the two parts; used only for diagnostics.
    pub fn denominator_bound(&self) -> BigInt {
        self.re.denom().clone().max(self.im.denom().clone())
    }
}

impl Add for &ExactComplexRational {
    type Output = ExactComplexRational;

    fn add(self, rhs: Self) -> ExactComplexRational {
        ExactComplexRational { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Add for ExactComplexRational {
    type Output = ExactComplexRational;

    fn add(self, rhs: Self) -> ExactComplexRational {
        &self + &rhs
    }
}

impl AddAssign<&ExactComplexRational> for ExactComplexRational {
    fn add_assign(&mut self, rhs: &ExactComplexRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &ExactComplexRational {
    type Output = ExactComplexRational;

    fn sub(self, rhs: Self) -> ExactComplexRational {
        ExactComplexRational { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Neg for &ExactComplexRational {
    type Output = ExactComplexRational;

    fn neg(self) -> ExactComplexRational {
        ExactComplexRational { re: -&self.re, im: -&self.im }
    }
}

impl Neg for ExactComplexRational {
    type Output = ExactComplexRational;

    fn neg(self) -> ExactComplexRational {
        -&self
    }
}

impl Mul<usize> for &ExactComplexRational {
    type Output = ExactComplexRational;

    fn mul(self, k: usize) -> ExactComplexRational {
        self.scale(k as i64)
    }
}

impl std::iter::Sum for ExactComplexRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactComplexRational::zero(), |acc, x| acc + x)
    }
}

fn parse_real(s: &str, whole: &str) -> Result<BigRational, Error> {
    let err = |reason: &str| Error::ParseRational { input: whole.to_string(), reason: reason.to_string() };
    let s = s.trim();
    if s.is_empty() {
        return Err(err("empty number"));
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.trim_start_matches('+').parse().map_err(|_| err("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| err("bad denominator"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

impl FromStr for ExactComplexRational {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self, Error> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(ExactComplexRational::real(parse_real(&s, input)?));
        };
        // split at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|&(_, c)| c == '+' || c == '-').map(|(i, _)| i).last();
        let (re_str, im_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_real(other, input)?,
        };
        Ok(ExactComplexRational { re: parse_real(re_str, input)?, im })
    }
}

impl fmt::Display for ExactComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}i", self.re, sign, self.im.abs())
    }
}

impl Serialize for ExactComplexRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Text(String),
    Int(i64),
    Parts {
        re: String,
        #[serde(default)]
        im: Option<String>,
    },
}

impl<'de> Deserialize<'de> for ExactComplexRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match RawRational::deserialize(deserializer)? {
            RawRational::Text(s) => s.parse().map_err(D::Error::custom),
            RawRational::Int(v) => Ok(ExactComplexRational::from_integer(v)),
            RawRational::Parts { re, im } => {
                let re = parse_real(&re, &re).map_err(D::Error::custom)?;
                let im = match im {
                    Some(im) => parse_real(&im, &im).map_err(D::Error::custom)?,
                    None => BigRational::zero(),
                };
                Ok(ExactComplexRational { re, im })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactComplexRational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_real_and_complex_forms() {
        assert_eq!(q("-47/210"), ExactComplexRational::from_ratio(-47, 210));
        assert_eq!(q("3"), ExactComplexRational::from_integer(3));
        assert_eq!(q("2/4"), ExactComplexRational::from_ratio(1, 2));
        let z = q("1/2+1/3 i");
        assert_eq!(z.re, BigRational::new(1.into(), 2.into()));
        assert_eq!(z.im, BigRational::new(1.into(), 3.into()));
        let w = q("-1/2-3i");
        assert_eq!(w.im, BigRational::from_integer((-3).into()));
        assert_eq!(q("i").im, BigRational::one());
        assert_eq!(q("-2/5i").re, BigRational::zero());
        assert!("1/0".parse::<ExactComplexRational>().is_err());
        assert!("abc".parse::<ExactComplexRational>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "-7/3", "1/2+1/3i", "5-1/9i", "0+1i"] {
            let z = q(s);
            assert_eq!(q(&z.to_string()), z, "{s}");
        }
    }

    #[test]
    fn json_accepts_object_form() {
        let z: ExactComplexRational = serde_json::from_str(r#"{"re":"1/2","im":"-1/3"}"#).unwrap();
        assert_eq!(z, q("1/2-1/3i"));
        let back: ExactComplexRational = serde_json::from_str(&serde_json::to_string(&z).unwrap()).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn integer_and_mod_one() {
        assert!(q("2").is_integer());
        assert!(!q("2+1i").is_integer());
        assert_eq!(q("-1/3").mod_one(), q("2/3"));
        assert_eq!(q("7/3").mod_one(), q("1/3"));
    }
}
