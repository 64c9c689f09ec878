//! Arithmetic backends.
//!
//! Every geometric routine in this crate is generic over [`Scalar`]. Two
//! backends are provided: exact rationals ([`Rational`], arbitrary precision)
//! and binary64 floats compared under a process-wide [`Tolerance`].

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::Error;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Which arithmetic a simulation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Floating,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Floating => "floating",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "rational" => Ok(Backend::Exact),
            "floating" | "float" | "f64" => Ok(Backend::Floating),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// A field element the kernel can compute with.
///
/// `same` and `compare` are the backend's notion of equality and order. On
/// the exact backend they are the usual ones. On the floating backend two
/// values within tolerance are `same` and `compare` reports them `Equal`.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_i64(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }
    fn to_f64(&self) -> f64;

    fn same(&self, other: &Self) -> bool;
    fn compare(&self, other: &Self) -> Ordering;

    /// Raw total order with no tolerance, used only to canonicalize orderings.
    fn raw_cmp(&self, other: &Self) -> Ordering;

    fn is_zero_value(&self) -> bool {
        self.same(&Self::zero())
    }
    fn is_positive(&self) -> bool {
        self.compare(&Self::zero()) == Ordering::Greater
    }
    fn le(&self, other: &Self) -> bool {
        self.compare(other) != Ordering::Greater
    }
    fn lt(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Less
    }

    /// Lossless text form: `num/den` on the exact backend, 17 significant
    /// digits on the floating one.
    fn encode(&self) -> String;
    fn decode(text: &str) -> Result<Self, Error>;

    /// A random unit vector `(c, s)`. Exact backends draw Pythagorean-triple
    /// pairs so that rotations stay rational.
    fn random_unit_pair<R: Rng + ?Sized>(rng: &mut R) -> (Self, Self);
}

static EPS_ABS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9
static EPS_REL: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Floating-point comparison policy:
/// `|a - b| <= abs + rel * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-9,
            rel: 1e-9,
        }
    }
}

impl Tolerance {
    /// The policy currently in force for the floating backend.
    pub fn current() -> Tolerance {
        Tolerance {
            abs: f64::from_bits(EPS_ABS.load(AtomicOrdering::Relaxed)),
            rel: f64::from_bits(EPS_REL.load(AtomicOrdering::Relaxed)),
        }
    }

    /// Installs this policy process-wide.
    pub fn install(self) {
        EPS_ABS.store(self.abs.to_bits(), AtomicOrdering::Relaxed);
        EPS_REL.store(self.rel.to_bits(), AtomicOrdering::Relaxed);
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Floating;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }

    fn same(&self, other: &Self) -> bool {
        Tolerance::current().close(*self, *other)
    }

    fn compare(&self, other: &Self) -> Ordering {
        if self.same(other) {
            Ordering::Equal
        } else {
            self.total_cmp(other)
        }
    }

    fn raw_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn encode(&self) -> String {
        format!("{:.16e}", self)
    }

    fn decode(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad scalar `{text}`")))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad scalar `{text}`")))?;
            return Ok(n / d);
        }
        let v: f64 = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad scalar `{text}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse(format!("non-finite scalar `{text}`")))
        }
    }

    fn random_unit_pair<R: Rng + ?Sized>(rng: &mut R) -> (Self, Self) {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        (theta.cos(), theta.sin())
    }
}

impl Scalar for BigRational {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }

    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn raw_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn encode(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn decode(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let bad = || Error::Parse(format!("bad rational `{text}`"));
        match text.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if Zero::is_zero(&d) {
                    return Err(Error::Parse(format!("zero denominator in `{text}`")));
                }
                Ok(BigRational::new(n, d))
            }
            None => {
                if let Ok(n) = text.parse::<BigInt>() {
                    return Ok(BigRational::from_integer(n));
                }
                decimal_to_rational(text).ok_or_else(bad)
            }
        }
    }

    fn random_unit_pair<R: Rng + ?Sized>(rng: &mut R) -> (Self, Self) {
        // (a² - b², 2ab) / (a² + b²) covers the rational points of the unit circle.
        let a: i64 = rng.gen_range(1..=12);
        let b: i64 = rng.gen_range(0..=12);
        let h = a * a + b * b;
        let mut c = Self::from_ratio(a * a - b * b, h);
        let mut s = Self::from_ratio(2 * a * b, h);
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut s);
        }
        if rng.gen_bool(0.5) {
            c = -c;
        }
        if rng.gen_bool(0.5) {
            s = -s;
        }
        (c, s)
    }
}

/// Parses a plain decimal literal such as `-1.25` into an exact rational.
fn decimal_to_rational(text: &str) -> Option<BigRational> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn rational_text_round_trip() {
        let r = Rational::from_ratio(-7, 3);
        assert_eq!(r.encode(), "-7/3");
        assert_eq!(Rational::decode("-7/3").unwrap(), r);
        assert_eq!(Rational::decode("4").unwrap(), Rational::from_i64(4));
        assert_eq!(
            Rational::decode("-1.25").unwrap(),
            Rational::from_ratio(-5, 4)
        );
        assert!(Rational::decode("1/0").is_err());
        assert!(Rational::decode("abc").is_err());
    }

    #[test]
    fn float_text_is_lossless() {
        let v = 0.1f64 + 0.2;
        assert_eq!(f64::decode(&v.encode()).unwrap().to_bits(), v.to_bits());
        assert_eq!(f64::decode("3/4").unwrap(), 0.75);
        assert!(f64::decode("nan").is_err());
    }

    #[test]
    fn float_equality_uses_tolerance() {
        assert!(1.0f64.same(&(1.0 + 1e-12)));
        assert!(!1.0f64.same(&1.001));
        assert_eq!(1.0f64.compare(&(1.0 - 1e-12)), Ordering::Equal);
    }

    #[test]
    fn rational_unit_pairs_are_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (c, s) = Rational::random_unit_pair(&mut rng);
            assert_eq!(c.clone() * c + s.clone() * s, <Rational as Scalar>::one());
        }
    }
}
