//! Exact rational scalars and their text form.
//!
//! Everything geometric in this crate is decided on [`Q`] values; the only
//! floating point in the crate is used to *guess* a rational that is then
//! checked exactly (square-root bounds, display).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational")]
    Empty,
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let bad = || ParseRationalError::Malformed(t.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(t.to_string()));
        }
        return Ok(Q::new(p, q));
    }
    if let Some((whole, dec)) = t.split_once('.') {
        if dec.is_empty() || !dec.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), dec);
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), dec.len());
        return Ok(Q::new(num, den));
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(p))
}

/// Canonical text: `"p"` for integers, `"p/q"` otherwise (q > 0, reduced).
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// `floor(v)` as an integer.
pub fn floor_int(v: &Q) -> BigInt {
    v.numer().div_floor(v.denom())
}

pub fn ceil_int(v: &Q) -> BigInt {
    -((-v.numer()).div_floor(v.denom()))
}

/// Round half up: `floor(v + 1/2)`.
pub fn round_int(v: &Q) -> BigInt {
    floor_int(&(v + frac(1, 2)))
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale down through the exponent.
        let n = v.numer().to_f64().unwrap_or(f64::MAX);
        let d = v.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Best rational approximation of a finite float with denominator at most `max_den`.
pub fn from_f64_approx(x: f64, max_den: i64) -> Q {
    assert!(x.is_finite(), "cannot approximate a non-finite float");
    let neg = x < 0.0;
    let x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    loop {
        let a = r.floor();
        if a > 1e30 {
            break;
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as i128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let f = r - r.floor();
        if f < 1e-15 {
            break;
        }
        r = 1.0 / f;
    }
    if q1 == 0 {
        // x beyond i128 range of the continued fraction; fall back to integer part.
        let v = Q::from_integer(BigInt::from(x as i128));
        return if neg { -v } else { v };
    }
    let v = Q::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -v
    } else {
        v
    }
}

/// A rational `s >= 0` with `s^2 <= v` and `s` within a relative 1e-6 of `sqrt(v)`.
pub fn sqrt_lower(v: &Q) -> Q {
    if !v.is_positive() {
        return Q::zero();
    }
    let guess = to_f64(v).sqrt() * (1.0 - 1e-9);
    let mut s = if guess.is_finite() && guess > 0.0 { approx_relative(guess) } else { Q::zero() };
    let shrink = frac(999_999, 1_000_000);
    while &(&s * &s) > v {
        s *= &shrink;
    }
    s
}

/// A rational `s` with `s^2 >= v` and `s` within a relative 1e-6 of `sqrt(v)`.
pub fn sqrt_upper(v: &Q) -> Q {
    if !v.is_positive() {
        return Q::zero();
    }
    let guess = to_f64(v).sqrt() * (1.0 + 1e-9);
    let mut s = approx_relative(guess);
    let grow = frac(1_000_001, 1_000_000);
    if s.is_zero() {
        s = Q::one();
    }
    while &(&s * &s) < v {
        s *= &grow;
    }
    s
}

/// Rational close to a positive float, scaled so tiny and huge values keep
/// about nine significant digits.
fn approx_relative(x: f64) -> Q {
    let e = x.log10().floor() as i32;
    let scale_pow = 9 - e;
    if scale_pow >= 0 {
        let scale = num_traits::pow(BigInt::from(10), scale_pow as usize);
        let n = (x * 10f64.powi(scale_pow)).round();
        Q::new(BigInt::from(n as i128), scale)
    } else {
        let scale = num_traits::pow(BigInt::from(10), (-scale_pow) as usize);
        let n = (x / 10f64.powi(-scale_pow)).round();
        Q::from_integer(BigInt::from(n as i128) * scale)
    }
}

pub fn min_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_q<'a>(a: &'a Q, b: &'a Q) -> &'a Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn abs_q(v: &Q) -> Q {
    v.abs()
}

/// Decimal rendering with `sig` significant digits (display only).
pub fn fmt_sig(v: &Q, sig: usize) -> String {
    fmt_sig_f64(to_f64(v), sig)
}

pub fn fmt_sig_f64(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", sig.saturating_sub(1), x);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    if (-6..15).contains(&exp) {
        let v: f64 = format!("{mant}e{exp}").parse().expect("float");
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        let out = format!("{:.*}", decimals, v);
        if out.contains('.') {
            out.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            out
        }
    } else {
        format!("{mant}e{exp}")
    }
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Text(String),
        Int(i64),
    }

    /// Accepts `"p/q"` strings and bare integers.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Text(s) => parse_q(&s).map_err(serde::de::Error::custom),
            Repr::Int(v) => Ok(int(v)),
        }
    }
}

/// Serde adapter for `Vec<(Q, Q)>` as a list of `["p/q", "p/q"]` pairs.
pub mod serde_pairs {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Q, Q)], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[QStr; 2]> = v.iter().map(|(a, b)| [QStr(a.clone()), QStr(b.clone())]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Q, Q)>, D::Error> {
        let pairs = Vec::<[QStr; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[a, b]| (a.0, b.0)).collect())
    }
}

/// Wrapper giving `Q` a `"p/q"` serde form inside collections.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct QStr(#[serde(with = "serde_q")] pub Q);

impl fmt::Debug for QStr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}
