//! Integer scalar abstraction for the lattice arithmetic.
//!
//! Everything in the engine is exact: divisor coefficients, intersection
//! numbers and cohomology counts are integers, and the definiteness test
//! runs over `Ratio<S>`. The default alias [`crate::Int`] is `BigInt`;
//! the fixed-width instantiations exist for callers that know their
//! lattices are small.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_traits::Signed;

/// Exact signed integer scalar.
pub trait Scalar:
    Integer + Signed + Clone + Hash + Debug + Display + From<i64> + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Integer + Signed + Clone + Hash + Debug + Display + From<i64> + Send + Sync + 'static
{
}

/// Shorthand for lifting small constants into a scalar type.
pub fn int<S: Scalar>(v: i64) -> S {
    S::from(v)
}

/// Exact halving with a loud parity failure.
///
/// Adjunction and Riemann-Roch divide by two; a remainder means the input
/// class is inconsistent, never something to round away.
pub fn halve_exact<S: Scalar>(v: S) -> Result<S, S> {
    let two = int::<S>(2);
    let (q, r) = v.div_rem(&two);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(v)
    }
}

/// Euclidean remainder in `[0, n)` for a positive modulus.
pub fn mod_pos<S: Scalar>(v: &S, n: &S) -> S {
    v.mod_floor(n)
}

/// Converts a scalar to `i64` when it fits.
pub fn to_i64<S: Scalar>(v: &S) -> Option<i64> {
    // Scalars in scope are tiny; walk digits via string to stay generic.
    v.to_string().parse::<i64>().ok()
}
