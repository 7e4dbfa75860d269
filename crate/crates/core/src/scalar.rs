use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};
use rand::Rng;

/// Floating-point scalar the numerical core is generic over.
///
/// `f64` is the default throughout the crate (see the aliases at the crate
/// root); `f32` is available for memory-bound sweeps at reduced precision.
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Uniform sample from [0, 1).
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Convergence floor for iterative routines: the contract tolerance
    /// 1e-12 where representable, otherwise a small multiple of epsilon.
    fn convergence_tolerance() -> Self {
        let contract = Self::from_f64(1e-12).unwrap_or_else(Self::epsilon);
        let floor = Self::epsilon() * Self::from_u32(32).unwrap();
        contract.max(floor)
    }
}

impl Scalar for f64 {
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen::<f64>()
    }
}

impl Scalar for f32 {
    fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen::<f32>()
    }
}
