//! Exact rational arithmetic on f64 data. Every finite double is a dyadic
//! rational, so sums and products of breakpoints and values are exact here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Exact = BigRational;

pub fn exact(x: f64) -> Exact {
    BigRational::from_float(x).expect("finite input")
}

pub fn zero() -> Exact {
    BigRational::zero()
}

/// Nearest double (correctly rounded by num-rational).
pub fn to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn from_int(n: i64) -> Exact {
    BigRational::from_integer(BigInt::from(n))
}
