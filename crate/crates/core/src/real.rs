//! High-precision reals and the mixed exact/approximate scalar used for welfare values.
//!
//! [`Real`] is a binary fixed-point number with [`FRAC_BITS`] fractional bits.
//! It only appears where square roots or fractional powers make exact
//! rationals impossible. [`Scalar`] keeps values exact whenever it can.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Fractional bits carried by [`Real`].
pub const FRAC_BITS: u32 = 192;

/// Values closer than 2^-64 compare as ties when either side is approximate.
pub const TIE_BITS: u32 = 64;

/// Largest root index accepted by [`Real::pow_rat`].
pub const MAX_ROOT: i64 = 64;

/// Fixed-point real: `mant / 2^FRAC_BITS`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real {
    mant: BigInt,
}

impl Real {
    pub fn zero() -> Real {
        Real { mant: BigInt::zero() }
    }

    pub fn from_rat(r: &Rat) -> Real {
        let n: BigInt = r.numer() << FRAC_BITS;
        Real { mant: floor_div(&n, &r.denom()) }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn add(&self, o: &Real) -> Real {
        Real { mant: &self.mant + &o.mant }
    }

    pub fn sub(&self, o: &Real) -> Real {
        Real { mant: &self.mant - &o.mant }
    }

    pub fn neg(&self) -> Real {
        Real { mant: -&self.mant }
    }

    pub fn mul(&self, o: &Real) -> Real {
        Real { mant: (&self.mant * &o.mant) >> FRAC_BITS }
    }

    pub fn div(&self, o: &Real) -> Real {
        assert!(!o.mant.is_zero(), "division by zero");
        Real { mant: floor_div(&(&self.mant << FRAC_BITS), &o.mant) }
    }

    pub fn abs(&self) -> Real {
        Real { mant: self.mant.abs() }
    }

    /// Square root, rounded down. Panics on negative input.
    pub fn sqrt(&self) -> Real {
        assert!(!self.is_negative(), "square root of a negative value");
        Real { mant: (&self.mant << FRAC_BITS).sqrt() }
    }

    /// `b^p` for rational `b ≥ 0` and `p = u/v` with `v ≤ MAX_ROOT`.
    pub fn pow_rat(b: &Rat, p: &Rat) -> Result<Real> {
        if b.is_negative() {
            return Err(Error::BadParameter(format!("fractional power of negative base {b}")));
        }
        let v = p.denom().to_i64().filter(|v| *v <= MAX_ROOT).ok_or_else(|| {
            Error::PrecisionUnavailable(format!("exponent {p} has denominator above {MAX_ROOT}"))
        })?;
        let u = p.numer().to_i32().ok_or_else(|| {
            Error::PrecisionUnavailable(format!("exponent {p} too large"))
        })?;
        if b.is_zero() {
            return Ok(Real::zero());
        }
        // (b^u)^(1/v) scaled by 2^FRAC_BITS is the v-th root of b^u * 2^(FRAC_BITS v).
        let bu = b.pow(u);
        let scaled: BigInt = (bu.numer() << (FRAC_BITS as usize * v as usize)) / bu.denom();
        Ok(Real { mant: scaled.nth_root(v as u32) })
    }

    pub fn to_f64(&self) -> f64 {
        let (hi, lo): (BigInt, BigInt) = (&self.mant >> FRAC_BITS, &self.mant & ((BigInt::from(1) << FRAC_BITS) - 1));
        hi.to_f64().unwrap_or(f64::NAN) + lo.to_f64().unwrap_or(0.0) / 2f64.powi(FRAC_BITS as i32)
    }

    /// Decimal expansion truncated to `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let m = self.mant.abs();
        let int = &m >> FRAC_BITS;
        let frac = &m - (&int << FRAC_BITS);
        let scaled = (frac * BigInt::from(10).pow(digits as u32)) >> FRAC_BITS;
        let mut s = format!("{}{}", if neg { "-" } else { "" }, int);
        if digits > 0 {
            s.push('.');
            s.push_str(&format!("{:0>width$}", scaled.to_string(), width = digits));
        }
        s
    }

    fn within_tie(&self, o: &Real) -> bool {
        let d = (&self.mant - &o.mant).abs();
        d <= BigInt::from(1) << (FRAC_BITS - TIE_BITS)
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "~{}", self.to_decimal(24))
    }
}

/// Outcome of a tolerance-aware comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Less,
    Equal,
    Greater,
    /// Approximate values within 2^-64 of each other.
    Tie,
}

/// Three-valued truth for predicates on approximate values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Uncertain,
}

impl Truth {
    pub fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    /// Ties count as true.
    pub fn lenient(self) -> bool {
        self != Truth::False
    }

    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Uncertain,
        }
    }
}

/// A welfare value: exact when possible, high-precision otherwise.
#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rat),
    Approx(Real),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact(Rat::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_real(&self) -> Real {
        match self {
            Scalar::Exact(r) => Real::from_rat(r),
            Scalar::Approx(x) => x.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Approx(x) => x.to_f64(),
        }
    }

    fn lift(
        &self,
        o: &Scalar,
        exact: impl FnOnce(&Rat, &Rat) -> Rat,
        approx: impl FnOnce(&Real, &Real) -> Real,
    ) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Approx(approx(&self.to_real(), &o.to_real())),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        self.lift(o, |a, b| a + b, Real::add)
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.lift(o, |a, b| a - b, Real::sub)
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        self.lift(o, |a, b| a * b, Real::mul)
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.lift(o, |a, b| a / b, Real::div)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(x) => Scalar::Approx(x.abs()),
        }
    }

    /// Square root; exact when the argument is a rational perfect square.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => match r.sqrt_exact() {
                Some(s) => Scalar::Exact(s),
                None => Scalar::Approx(Real::from_rat(r).sqrt()),
            },
            Scalar::Approx(x) => Scalar::Approx(x.sqrt()),
        }
    }

    /// Exact comparison when both sides are exact; otherwise values within
    /// 2^-64 are reported as [`Cmp::Tie`].
    pub fn cmp_tol(&self, o: &Scalar) -> Cmp {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => match a.cmp(b) {
                Ordering::Less => Cmp::Less,
                Ordering::Equal => Cmp::Equal,
                Ordering::Greater => Cmp::Greater,
            },
            _ => {
                let (a, b) = (self.to_real(), o.to_real());
                if a.within_tie(&b) {
                    Cmp::Tie
                } else if a < b {
                    Cmp::Less
                } else {
                    Cmp::Greater
                }
            }
        }
    }

    /// `self ≥ o` as a three-valued predicate.
    pub fn ge(&self, o: &Scalar) -> Truth {
        match self.cmp_tol(o) {
            Cmp::Greater | Cmp::Equal => Truth::True,
            Cmp::Less => Truth::False,
            Cmp::Tie => Truth::Uncertain,
        }
    }

    /// `self = o` as a three-valued predicate.
    pub fn eq_tol(&self, o: &Scalar) -> Truth {
        match self.cmp_tol(o) {
            Cmp::Equal => Truth::True,
            Cmp::Tie => Truth::Uncertain,
            _ => Truth::False,
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Scalar {
        Scalar::Exact(r)
    }
}

impl Ord for Scalar {
    /// Total order without tolerance, used for sorting.
    fn cmp(&self, o: &Scalar) -> Ordering {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self.to_real().cmp(&o.to_real()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, o: &Scalar) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(x) => write!(f, "~{}", x.to_decimal(30)),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn sqrt_two_matches_f64() {
        let r = Real::from_rat(&rat(2, 1)).sqrt();
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.to_decimal(30).starts_with("1.414213562373095048801688724209"));
    }

    #[test]
    fn fractional_power() {
        let r = Real::pow_rat(&rat(8, 1), &rat(1, 3)).unwrap();
        assert_eq!(Scalar::Approx(r).cmp_tol(&Scalar::Exact(rat(2, 1))), Cmp::Tie);
        let r = Real::pow_rat(&rat(9, 4), &rat(3, 2)).unwrap();
        assert_eq!(Scalar::Approx(r).cmp_tol(&Scalar::Exact(rat(27, 8))), Cmp::Tie);
        assert!(Real::pow_rat(&rat(2, 1), &rat(1, 1000)).is_err());
    }

    #[test]
    fn scalar_sqrt_stays_exact_on_squares() {
        assert_eq!(Scalar::Exact(rat(9, 16)).sqrt(), Scalar::Exact(rat(3, 4)));
        assert!(!Scalar::Exact(rat(1, 2)).sqrt().is_exact());
    }

    #[test]
    fn tie_tolerance() {
        let a = Scalar::Approx(Real::from_rat(&rat(1, 3)));
        assert_eq!(a.cmp_tol(&Scalar::Exact(rat(1, 3))), Cmp::Tie);
        assert_eq!(a.cmp_tol(&Scalar::Exact(rat(1, 2))), Cmp::Less);
        assert_eq!(Scalar::Exact(rat(1, 3)).cmp_tol(&Scalar::Exact(rat(1, 3))), Cmp::Equal);
    }
}
