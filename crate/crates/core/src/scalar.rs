//! Backend-generic scalar arithmetic.
//!
//! Two backends implement the [`Scalar`] contract: [`Real`] (MPFR-backed
//! floating point, correctly rounded at a configurable working precision,
//! default 256 bits) and [`Rat`] (exact arbitrary-precision rationals, used
//! by oracle tests at small truncation). Series sweeps are generic over the
//! contract; extrapolation is float-only.

use crate::error::Error;
use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Float, Rational};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// MPFR-backed floating point scalar.
pub type Real = Float;

/// Exact rational scalar.
pub type Rat = Rational;

/// Arithmetic contract shared by the float and rational backends.
///
/// `Ctx` carries whatever a constructor needs: the working precision in bits
/// for [`Real`], nothing for [`Rat`]. Binary operations take the context from
/// their left operand.
pub trait Scalar: Clone + PartialEq + PartialOrd + std::fmt::Debug + Send + Sync + 'static {
    type Ctx: Copy + Send + Sync;

    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self;
    fn from_i64(ctx: Self::Ctx, v: i64) -> Self;
    fn from_ratio(ctx: Self::Ctx, num: i64, den: i64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Integer power, exponent may be negative.
    fn powi(&self, e: i32) -> Self;
    fn recip(&self) -> Self;
    fn abs(&self) -> Self;

    fn add_i64(&self, v: i64) -> Self;
    fn mul_i64(&self, v: i64) -> Self;

    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
}

impl Scalar for Float {
    type Ctx = u32;

    fn zero(prec: u32) -> Self {
        Float::with_val(prec, 0)
    }
    fn one(prec: u32) -> Self {
        Float::with_val(prec, 1)
    }
    fn from_i64(prec: u32, v: i64) -> Self {
        Float::with_val(prec, v)
    }
    fn from_ratio(prec: u32, num: i64, den: i64) -> Self {
        Float::with_val(prec, Rational::from((num, den)))
    }

    fn add(&self, rhs: &Self) -> Self {
        (self + rhs).complete(self.prec())
    }
    fn sub(&self, rhs: &Self) -> Self {
        (self - rhs).complete(self.prec())
    }
    fn mul(&self, rhs: &Self) -> Self {
        (self * rhs).complete(self.prec())
    }
    fn div(&self, rhs: &Self) -> Self {
        (self / rhs).complete(self.prec())
    }
    fn neg(&self) -> Self {
        (-self).complete(self.prec())
    }
    fn powi(&self, e: i32) -> Self {
        self.pow(e).complete(self.prec())
    }
    fn recip(&self) -> Self {
        self.recip_ref().complete(self.prec())
    }
    fn abs(&self) -> Self {
        self.abs_ref().complete(self.prec())
    }

    fn add_i64(&self, v: i64) -> Self {
        (self + v).complete(self.prec())
    }
    fn mul_i64(&self, v: i64) -> Self {
        (self * v).complete(self.prec())
    }

    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        self.is_sign_positive() && !Float::is_zero(self)
    }
}

impl Scalar for Rational {
    type Ctx = ();

    fn zero(_: ()) -> Self {
        Rational::new()
    }
    fn one(_: ()) -> Self {
        Rational::from(1)
    }
    fn from_i64(_: (), v: i64) -> Self {
        Rational::from(v)
    }
    fn from_ratio(_: (), num: i64, den: i64) -> Self {
        Rational::from((num, den))
    }

    fn add(&self, rhs: &Self) -> Self {
        (self + rhs).complete()
    }
    fn sub(&self, rhs: &Self) -> Self {
        (self - rhs).complete()
    }
    fn mul(&self, rhs: &Self) -> Self {
        (self * rhs).complete()
    }
    fn div(&self, rhs: &Self) -> Self {
        (self / rhs).complete()
    }
    fn neg(&self) -> Self {
        (-self).complete()
    }
    fn powi(&self, e: i32) -> Self {
        self.clone().pow(e)
    }
    fn recip(&self) -> Self {
        self.clone().recip()
    }
    fn abs(&self) -> Self {
        self.clone().abs()
    }

    fn add_i64(&self, v: i64) -> Self {
        Rational::from(self + Rational::from(v))
    }
    fn mul_i64(&self, v: i64) -> Self {
        Rational::from(self * Rational::from(v))
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_positive(&self) -> bool {
        *self > 0
    }
}

/// Parse a decimal (or rational `p/q`) literal into a [`Real`] at `prec` bits.
pub fn real_from_str(s: &str, prec: u32) -> Result<Real, Error> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let q = Rational::parse(format!("{}/{}", num.trim(), den.trim()))
            .map_err(|e| Error::invalid(format!("bad rational literal {s:?}: {e}")))?
            .complete();
        return Ok(Float::with_val(prec, q));
    }
    let parsed =
        Float::parse(s).map_err(|e| Error::invalid(format!("bad numeric literal {s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Parse an exact rational literal (`p/q` or a decimal with finite expansion).
pub fn rat_from_str(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if let Some((ipart, fpart)) = s.split_once('.') {
        let digits = fpart.len() as u32;
        let joined = format!("{ipart}{fpart}");
        let num = Rational::parse(&joined)
            .map_err(|e| Error::invalid(format!("bad decimal literal {s:?}: {e}")))?
            .complete();
        return Ok(num / Rational::from(10u64).pow(digits));
    }
    Ok(Rational::parse(s)
        .map_err(|e| Error::invalid(format!("bad rational literal {s:?}: {e}")))?
        .complete())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_ops_round_at_working_precision() {
        let a = Real::from_ratio(64, 1, 3);
        let b = Real::from_ratio(64, 1, 6);
        let c = a.add(&b);
        assert_eq!(c.prec(), 64);
        let half = Real::from_ratio(64, 1, 2);
        assert!(c.sub(&half).abs() < Float::with_val(64, 1e-18));
    }

    #[test]
    fn rational_ops_are_exact() {
        let a = Rat::from_ratio((), 1, 3);
        let b = Rat::from_ratio((), 1, 6);
        assert_eq!(a.add(&b), Rat::from_ratio((), 1, 2));
        assert_eq!(a.powi(-2), Rat::from_i64((), 9));
    }

    #[test]
    fn parse_literals() {
        let x = real_from_str("1.5", 128).unwrap();
        assert_eq!(x, Float::with_val(128, 1.5));
        let y = real_from_str("3/2", 128).unwrap();
        assert_eq!(y, x);
        assert_eq!(rat_from_str("0.8").unwrap(), Rat::from_ratio((), 4, 5));
        assert_eq!(rat_from_str("3/2").unwrap(), Rat::from_ratio((), 3, 2));
        assert!(real_from_str("abc", 64).is_err());
    }
}
