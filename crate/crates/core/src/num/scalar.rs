use rug::{Complex, Float, Rational};
use std::fmt::Debug;

use super::GaussRat;
use crate::error::{Error, Result};

/// Coefficient field for truncated series: exact Gaussian rationals or
/// arbitrary-precision complex floats.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    const EXACT: bool;

    fn from_rational(r: &Rational, prec: u32) -> Self;
    fn from_gauss(z: &GaussRat, prec: u32) -> Self;
    /// `None` for exact scalars, which cannot hold an inexact float.
    fn from_float(f: &Float) -> Option<Self>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn to_complex(&self, prec: u32) -> Complex;
    fn abs_float(&self, prec: u32) -> Float {
        self.to_complex(prec).abs().real().clone()
    }
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Working precision in bits; `None` for exact values.
    fn precision(&self) -> Option<u32>;
}

impl Scalar for GaussRat {
    const EXACT: bool = true;

    fn from_rational(r: &Rational, _prec: u32) -> Self {
        GaussRat::real(r.clone())
    }
    fn from_gauss(z: &GaussRat, _prec: u32) -> Self {
        z.clone()
    }
    fn from_float(_f: &Float) -> Option<Self> {
        None
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        GaussRat::div(self, o)
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn to_complex(&self, prec: u32) -> Complex {
        GaussRat::to_complex(self, prec)
    }
    fn zero_like(&self) -> Self {
        GaussRat::zero()
    }
    fn one_like(&self) -> Self {
        GaussRat::one()
    }
    fn precision(&self) -> Option<u32> {
        None
    }
}

impl Scalar for Complex {
    const EXACT: bool = false;

    fn from_rational(r: &Rational, prec: u32) -> Self {
        Complex::with_val(prec, r)
    }
    fn from_gauss(z: &GaussRat, prec: u32) -> Self {
        z.to_complex(prec)
    }
    fn from_float(f: &Float) -> Option<Self> {
        Some(Complex::with_val(f.prec(), f))
    }
    fn add(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::with_val(self.prec(), self * o)
    }
    fn neg(&self) -> Self {
        Complex::with_val(self.prec(), -self)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(Complex::with_val(self.prec(), self / o))
    }
    fn is_zero(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, self)
    }
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Complex::with_val(self.prec(), 1)
    }
    fn precision(&self) -> Option<u32> {
        Some(self.prec().0)
    }
}
