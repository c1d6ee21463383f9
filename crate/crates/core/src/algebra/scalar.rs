//! Scalar rings used as coefficients of boundary functions.
//!
//! Three rings appear: plain rationals (metric data), Gaussian rationals
//! (Fourier coefficients of complex exponentials) and rational functions of
//! the spectral parameter ζ. All of them are exact.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::BaseTag;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Rational from a small numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Lossy conversion, used only by report emission and numerics.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range; divide in log space
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact commutative ring with the operations the engine needs.
///
/// Methods take references so that big-number values are not cloned on every
/// operation.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for non-units.
    fn inverse(&self) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&int(v))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Value of the exponent carried by a series base tag, if this ring can
    /// represent it. Only the zero tag is representable without ζ.
    fn base_value(tag: BaseTag, _n: usize) -> Option<Self> {
        match tag {
            BaseTag::Zero => Some(Self::zero()),
            _ => None,
        }
    }
}

/// Scalar ring containing the imaginary unit.
pub trait ComplexScalar: Scalar {
    fn from_gaussian(g: &GaussianRational) -> Self;
    fn conj(&self) -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// Exact complex number a + bi with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Zero::zero() }
    }

    pub fn i() -> Self {
        GaussianRational {
            re: Zero::zero(),
            im: One::one(),
        }
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> num::complex::Complex64 {
        num::complex::Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussianRational {
            re: &self.re * r,
            im: &self.im * r,
        }
    }
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        GaussianRational::real(Zero::zero())
    }
    fn one() -> Self {
        GaussianRational::real(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
    fn mul(&self, o: &Self) -> Self {
        if Zero::is_zero(&self.im) && Zero::is_zero(&o.im) {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        GaussianRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn inverse(&self) -> Option<Self> {
        if Scalar::is_zero(self) {
            return None;
        }
        let d = self.norm_sqr();
        Some(GaussianRational {
            re: &self.re / &d,
            im: -&self.im / &d,
        })
    }
    fn from_rational(r: &Rational) -> Self {
        GaussianRational::real(r.clone())
    }
}

impl ComplexScalar for GaussianRational {
    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }
    fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re0 = Zero::is_zero(&self.re);
        let im0 = Zero::is_zero(&self.im);
        match (re0, im0) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write_imag(f, &self.im),
            (false, false) => {
                write!(f, "{}", self.re)?;
                if self.im.is_negative() {
                    write!(f, "-")?;
                    write_imag(f, &-&self.im)
                } else {
                    write!(f, "+")?;
                    write_imag(f, &self.im)
                }
            }
        }
    }
}

fn write_imag(f: &mut fmt::Formatter<'_>, im: &Rational) -> fmt::Result {
    if One::is_one(im) {
        write!(f, "i")
    } else if One::is_one(&-im) {
        write!(f, "-i")
    } else {
        write!(f, "{im}i")
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Accepts `p/q`, `p/q i`, `i`, `-i` and `a+bi` / `a-bi`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty number".into()));
        }
        if !t.ends_with('i') {
            return Ok(GaussianRational::real(parse_rational(&t)?));
        }
        let body = &t[..t.len() - 1];
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("", body),
        };
        let im = match im_part {
            "" | "+" => int(1),
            "-" => int(-1),
            s => parse_rational(s.trim_start_matches('+'))?,
        };
        let re = if re_part.is_empty() {
            Zero::zero()
        } else {
            parse_rational(re_part)?
        };
        Ok(GaussianRational { re, im })
    }
}

/// Shorthand for a real Gaussian rational.
pub fn gr(num: i64, den: i64) -> GaussianRational {
    GaussianRational::real(rat(num, den))
}
