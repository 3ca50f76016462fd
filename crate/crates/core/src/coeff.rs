//! Coefficient arithmetic in two modes: exact complex rationals for the
//! symbolic layer (composition, degrees, stability) and `Complex64` for
//! orbit iteration. Polynomials are generic over [`Coeff`].

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Operations a polynomial coefficient must support.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; caller guarantees the value is nonzero.
    fn inv(&self) -> Self;
    /// Whether a term with this coefficient should be dropped after arithmetic.
    /// Exact mode prunes exact zeros only; float mode prunes magnitudes below
    /// 1e-300 so that rounding noise never fakes a degree drop.
    fn negligible(&self) -> bool;
    fn abs_f64(&self) -> f64;
    fn to_c64(&self) -> Complex64;
    /// Principal k-th root (argument in (-pi/k, pi/k]), when representable.
    fn principal_kth_root(&self, k: u32) -> Option<Self>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn pow_u(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |self|^2 as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

/// Exact k-th root of a nonnegative rational, if one exists.
fn exact_root(x: &BigRational, k: u32) -> Option<BigRational> {
    debug_assert!(!x.is_negative());
    let rn = x.numer().nth_root(k);
    let rd = x.denom().nth_root(k);
    if rn.pow(k) == *x.numer() && rd.pow(k) == *x.denom() {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

impl Coeff for ExactComplex {
    fn zero() -> Self {
        Self {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn one() -> Self {
        Self {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            re: &self.re + &other.re,
            im: &self.im + &other.im,
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    fn neg(&self) -> Self {
        Self {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    fn inv(&self) -> Self {
        let n = self.norm_sqr();
        Self {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }

    fn abs_f64(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn principal_kth_root(&self, k: u32) -> Option<Self> {
        if k == 1 {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        // Only positive reals can have a rational principal root; anything
        // else lands off the positive axis and is irrational or non-real.
        if self.is_real() && self.re.is_positive() {
            exact_root(&self.re, k).map(Self::from_rational)
        } else {
            None
        }
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn add(&self, other: &Self) -> Self {
        self + other
    }

    fn mul(&self, other: &Self) -> Self {
        self * other
    }

    fn neg(&self) -> Self {
        -self
    }

    fn inv(&self) -> Self {
        Complex64::new(1.0, 0.0) / self
    }

    fn negligible(&self) -> bool {
        self.norm() < 1e-300
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn principal_kth_root(&self, k: u32) -> Option<Self> {
        if k == 1 {
            return Some(*self);
        }
        let (r, theta) = self.to_polar();
        Some(Complex64::from_polar(r.powf(1.0 / k as f64), theta / k as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_root_detects_perfect_powers() {
        let x = ExactComplex::from_ratio(1, 4);
        let r = x.principal_kth_root(2).unwrap();
        assert_eq!(r, ExactComplex::from_ratio(1, 2));
        assert!(ExactComplex::from_int(2).principal_kth_root(2).is_none());
        assert!(ExactComplex::from_int(-8).principal_kth_root(3).is_none());
    }

    #[test]
    fn float_principal_root_branch() {
        let c = Complex64::new(-4.0, 0.0);
        let r = c.principal_kth_root(2).unwrap();
        // principal branch of sqrt(-4) is 2i
        assert!((r - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn exact_mul_inv_roundtrip() {
        let a = ExactComplex::new(
            BigRational::new(BigInt::from(3), BigInt::from(7)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        let prod = a.mul(&a.inv());
        assert_eq!(prod, ExactComplex::one());
    }
}
