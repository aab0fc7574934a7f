//! Exact arithmetic over the rationals and the Gaussian rationals Q(i).
//!
//! Every value is kept in reduced canonical form, so equality is structural
//! equality and no epsilon ever appears. Q(i) is the computable scalar field
//! used throughout the crate; square roots that land outside Q(i) are
//! reported as failures rather than approximated.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numerator, denominator)))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Exact square root, if it exists in Q.
    pub fn sqrt_exact(&self) -> Option<Rational> {
        if self.is_negative() {
            return None;
        }
        let num = sqrt_bigint(self.0.numer())?;
        let den = sqrt_bigint(self.0.denom())?;
        Some(Rational(BigRational::new(num, den)))
    }
}

fn sqrt_bigint(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let s = x.sqrt();
    if &(&s * &s) == x {
        Some(s)
    } else {
        None
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::pre(format!("invalid rational `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num_str).map_err(|_| bad())?;
        let den = BigInt::from_str(den_str).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
    };
}

rational_binop!(Add, add, +);
rational_binop!(Sub, sub, -);
rational_binop!(Mul, mul, *);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// An element of Q(i): `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        GaussRational::from_rational(Rational::from_int(v))
    }

    /// Convenience constructor: `(a/b) + (c/d)*i`.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Ok(GaussRational {
            re: Rational::new(BigInt::from(a), BigInt::from(b))?,
            im: Rational::new(BigInt::from(c), BigInt::from(d))?,
        })
    }

    pub fn zero() -> Self {
        GaussRational::from_int(0)
    }

    pub fn one() -> Self {
        GaussRational::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// `re^2 + im^2`; zero iff the value is zero.
    pub fn norm(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = n.recip()?;
        Ok(GaussRational {
            re: &self.re * &inv,
            im: &(-&self.im) * &inv,
        })
    }

    pub fn try_div(&self, rhs: &GaussRational) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut acc = GaussRational::one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Exact square root, if one exists in Q(i). The root returned is the one
    /// with positive real part (positive imaginary part when the real part is
    /// zero).
    pub fn sqrt_exact(&self) -> Option<GaussRational> {
        if self.is_zero() {
            return Some(GaussRational::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                let s = (-&self.re).sqrt_exact()?;
                Some(GaussRational {
                    re: Rational::zero(),
                    im: s,
                })
            } else {
                let s = self.re.sqrt_exact()?;
                Some(GaussRational::from_rational(s))
            };
        }
        // For re + im*i = (x + y*i)^2 with x, y rational:
        //   x^2 + y^2 = sqrt(re^2 + im^2),  x^2 = (re + sqrt(..))/2,  y = im/(2x).
        let s = self.norm().sqrt_exact()?;
        let half = Rational::new(BigInt::from(1), BigInt::from(2)).unwrap();
        let x2 = &(&self.re + &s) * &half;
        let x = x2.sqrt_exact()?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im * &(&x + &x).recip().ok()?;
        let root = GaussRational { re: x, im: y };
        debug_assert_eq!(&root * &root, *self);
        Some(root)
    }
}

fn gauss_add(a: &GaussRational, b: &GaussRational) -> GaussRational {
    GaussRational {
        re: &a.re + &b.re,
        im: &a.im + &b.im,
    }
}

fn gauss_sub(a: &GaussRational, b: &GaussRational) -> GaussRational {
    GaussRational {
        re: &a.re - &b.re,
        im: &a.im - &b.im,
    }
}

fn gauss_mul(a: &GaussRational, b: &GaussRational) -> GaussRational {
    GaussRational {
        re: &(&a.re * &b.re) - &(&a.im * &b.im),
        im: &(&a.re * &b.im) + &(&a.im * &b.re),
    }
}

macro_rules! gauss_binop {
    ($trait:ident, $method:ident, $fun:ident) => {
        impl $trait<&GaussRational> for &GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: &GaussRational) -> GaussRational {
                $fun(self, rhs)
            }
        }
        impl $trait<GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: GaussRational) -> GaussRational {
                $fun(&self, &rhs)
            }
        }
        impl $trait<&GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: &GaussRational) -> GaussRational {
                $fun(&self, rhs)
            }
        }
    };
}

gauss_binop!(Add, add, gauss_add);
gauss_binop!(Sub, sub, gauss_sub);
gauss_binop!(Mul, mul, gauss_mul);

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, rhs: &GaussRational) {
        *self = gauss_add(self, rhs);
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, rhs: &GaussRational) {
        *self = gauss_sub(self, rhs);
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, rhs: &GaussRational) {
        *self = gauss_mul(self, rhs);
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        -&self
    }
}

impl Sum for GaussRational {
    fn sum<I: Iterator<Item = GaussRational>>(iter: I) -> Self {
        iter.fold(GaussRational::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let mag = self.im.abs();
        let unit = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{mag}*i")
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{unit}")
            } else {
                write!(f, "{unit}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{}{}", self.re, sign, unit)
        }
    }
}

impl FromStr for GaussRational {
    type Err = Error;

    /// Accepts `a/b`, `a/b+c/d*i`, `c/d*i`, `i`, `-i` and the obvious
    /// integer shorthands. Round-trips with `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::pre(format!("invalid scalar `{s}`: {msg}"));
        if s.is_empty() {
            return Err(bad("empty"));
        }
        let mut re: Option<Rational> = None;
        let mut im: Option<Rational> = None;
        for (sign, body) in split_signed_terms(s) {
            if body.is_empty() {
                return Err(bad("empty term"));
            }
            let apply_sign = |r: Rational| if sign < 0 { -r } else { r };
            if body == "i" {
                if im.is_some() {
                    return Err(bad("duplicate imaginary part"));
                }
                im = Some(apply_sign(Rational::one()));
            } else if let Some(coeff) = body.strip_suffix("*i") {
                if im.is_some() {
                    return Err(bad("duplicate imaginary part"));
                }
                im = Some(apply_sign(coeff.parse::<Rational>()?));
            } else {
                if re.is_some() {
                    return Err(bad("duplicate real part"));
                }
                re = Some(apply_sign(body.parse::<Rational>()?));
            }
        }
        Ok(GaussRational {
            re: re.unwrap_or_else(Rational::zero),
            im: im.unwrap_or_else(Rational::zero),
        })
    }
}

/// Splits `a+b-c` into signed terms; a leading sign attaches to the first term.
fn split_signed_terms(s: &str) -> Vec<(i8, &str)> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut sign: i8 = 1;
    let mut start = 0;
    let mut i = 0;
    match bytes.first() {
        Some(b'+') => {
            i = 1;
            start = 1;
        }
        Some(b'-') => {
            sign = -1;
            i = 1;
            start = 1;
        }
        _ => {}
    }
    while i < bytes.len() {
        if bytes[i] == b'+' || bytes[i] == b'-' {
            terms.push((sign, &s[start..i]));
            sign = if bytes[i] == b'-' { -1 } else { 1 };
            start = i + 1;
        }
        i += 1;
    }
    terms.push((sign, &s[start..]));
    terms
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussRational {
        GaussRational::from_parts(a, b, c, d).unwrap()
    }

    #[test]
    fn product_of_conjugate_pair() {
        let a = g(1, 1, 1, 1); // 1 + i
        let b = g(1, 1, -1, 1); // 1 - i
        assert_eq!(&a * &b, GaussRational::from_int(2));
    }

    #[test]
    fn inverse_of_i() {
        let inv = GaussRational::i().recip().unwrap();
        assert_eq!(inv, -GaussRational::i());
        assert_eq!(&GaussRational::i() * &inv, GaussRational::one());
    }

    #[test]
    fn mixed_sum_cancels() {
        let a = g(2, 3, 1, 1); // 2/3 + i
        let b = g(1, 3, -1, 1); // 1/3 - i
        assert_eq!(&a + &b, GaussRational::one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = GaussRational::i();
        assert_eq!(&i * &i, GaussRational::from_int(-1));
    }

    #[test]
    fn zero_checks_are_exact() {
        assert!(GaussRational::zero().is_zero());
        let i = GaussRational::i();
        assert!((&i - &i).is_zero());
        let tiny = GaussRational::from_parts(1, 1_000_000, 0, 1).unwrap();
        assert!(!tiny.is_zero());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = GaussRational::one().try_div(&GaussRational::zero());
        assert!(matches!(r, Err(Error::DivisionByZero)));
    }

    #[test]
    fn large_numerator_round_trips() {
        // 200-bit numerator survives arithmetic unchanged.
        let big: BigInt = BigInt::from(1) << 200;
        let x = GaussRational::new(
            Rational::new(big.clone() + 7, BigInt::from(3)).unwrap(),
            Rational::zero(),
        );
        let y = g(5, 7, 2, 9);
        let back = (&(&x + &y) - &y).clone();
        assert_eq!(back, x);
        assert_eq!(back.re.numerator(), &(big + 7));
    }

    #[test]
    fn display_round_trip_samples() {
        for s in [
            "0",
            "1",
            "-1",
            "i",
            "-i",
            "2*i",
            "-3/4*i",
            "1/2",
            "-7/3",
            "1+i",
            "1-i",
            "2/3+1/5*i",
            "-2/3-i",
            "5-4*i",
        ] {
            let v: GaussRational = s.parse().unwrap();
            assert_eq!(v.to_string(), s, "canonical form of `{s}`");
            let again: GaussRational = v.to_string().parse().unwrap();
            assert_eq!(again, v);
        }
        // Accepted shorthands that print differently.
        let v: GaussRational = "1/1+2/2*i".parse().unwrap();
        assert_eq!(v.to_string(), "1+i");
    }

    #[test]
    fn bad_scalars_rejected() {
        for s in ["", "1//2", "i+i", "1+2", "x", "1/0", "+-1"] {
            assert!(s.parse::<GaussRational>().is_err(), "`{s}` should fail");
        }
    }

    #[test]
    fn sqrt_exact_cases() {
        let m1 = GaussRational::from_int(-1);
        assert_eq!(m1.sqrt_exact().unwrap(), GaussRational::i());
        let q = g(9, 4, 0, 1);
        assert_eq!(q.sqrt_exact().unwrap(), g(3, 2, 0, 1));
        // 2i = (1+i)^2
        let two_i = g(0, 1, 2, 1);
        assert_eq!(two_i.sqrt_exact().unwrap(), g(1, 1, 1, 1));
        // 2 has no root in Q(i)
        assert!(GaussRational::from_int(2).sqrt_exact().is_none());
        // i has no root in Q(i): norm 1, but (0+1)/2 is not a square
        assert!(GaussRational::i().sqrt_exact().is_none());
    }

    fn arb_gauss() -> impl Strategy<Value = GaussRational> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20)
            .prop_map(|(a, b, c, d)| GaussRational::from_parts(a, b, c, d).unwrap())
    }

    proptest! {
        #[test]
        fn addition_associative(a in arb_gauss(), b in arb_gauss(), c in arb_gauss()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        }

        #[test]
        fn multiplication_distributes(a in arb_gauss(), b in arb_gauss(), c in arb_gauss()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn parse_print_round_trip(a in arb_gauss()) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<GaussRational>().unwrap(), a);
        }

        #[test]
        fn division_inverts_multiplication(a in arb_gauss(), b in arb_gauss()) {
            prop_assume!(!b.is_zero());
            let q = (&a * &b).try_div(&b).unwrap();
            prop_assert_eq!(q, a);
        }
    }
}
