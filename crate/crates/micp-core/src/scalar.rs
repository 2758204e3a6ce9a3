//! Scalar abstraction so the LP kernel and lattice geometry run in floating
//! point or in exact rational arithmetic (the affine-only path).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Signed
    + Send
    + Sync
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
    /// Comparison slack for pivoting decisions; zero in exact mode.
    fn pivot_eps() -> Self;
    fn floor_i64(&self) -> i64;
    fn ceil_i64(&self) -> i64;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn pivot_eps() -> Self {
        1e-9
    }
    fn floor_i64(&self) -> i64 {
        // Guard against float fuzz just below an integer.
        (self + 1e-9).floor() as i64
    }
    fn ceil_i64(&self) -> i64 {
        (self - 1e-9).ceil() as i64
    }
}

impl Scalar for BigRational {
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite float converts to rational")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_i64(v: i64) -> Self {
        <BigRational as FromPrimitive>::from_i64(v).expect("i64 converts")
    }
    fn pivot_eps() -> Self {
        BigRational::zero()
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("desk-scale range")
    }
    fn ceil_i64(&self) -> i64 {
        self.ceil().to_integer().to_i64().expect("desk-scale range")
    }
}
