//! Field abstraction shared by real and complex code paths.

use std::fmt::Debug;
use std::ops::{AddAssign, Mul, MulAssign, Neg, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};

/// `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Mul<f64, Output = Self>
    + From<f64>
    + 'static
{
    /// Absolute value.
    fn modulus(self) -> f64;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }

    fn to_complex(self) -> Complex64 {
        self
    }
}
