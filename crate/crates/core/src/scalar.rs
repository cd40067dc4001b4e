//! Scalar abstraction. Every numeric routine in this crate is generic over a
//! floating-point type implementing [`Real`]; `f32` and `f64` are provided.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar the library is generic over.
///
/// The bound collects what the algorithms actually use: IEEE arithmetic with
/// transcendentals ([`Float`]), mathematical constants ([`FloatConst`]),
/// compound assignment, and conversion from `f64` literals for tolerances.
pub trait Real:
    Float + FloatConst + NumAssign + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if `T` cannot represent any `f64`, which no implementor does.
#[inline]
pub(crate) fn cst<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant not representable in scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cst_round_trips_through_f64() {
        assert_eq!(cst::<f64>(1.5), 1.5);
        assert_eq!(cst::<f32>(1.5), 1.5f32);
    }

    #[test]
    fn real_is_usable_in_generic_code() {
        fn midpoint<T: Real>(a: T, b: T) -> T {
            (a + b) / cst(2.0)
        }
        assert_eq!(midpoint(1.0f64, 3.0f64), 2.0);
        assert_eq!(midpoint(1.0f32, 3.0f32), 2.0);
    }
}
