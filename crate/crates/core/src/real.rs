use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

/// Floating point storage type of the fields (`f32` or `f64`).
///
/// Only the operations the update kernels need are required, so that no
/// fused or reassociated arithmetic can sneak in through a generic helper.
pub trait Real:
    Copy
    + Default
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Storage size in bytes.
    const BYTES: usize;
    const NAME: &'static str;
    const ZERO: Self;

    /// Rounds an `f64` to this type (round to nearest).
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    /// True only for `+0.0`: quiescent tiles must stay bitwise identical.
    fn is_positive_zero(self) -> bool;
    fn extend_le_bytes(self, out: &mut Vec<u8>);
}

impl Real for f32 {
    const BYTES: usize = 4;
    const NAME: &'static str = "single";
    const ZERO: Self = 0.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn is_positive_zero(self) -> bool {
        self.to_bits() == 0
    }
    fn extend_le_bytes(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}

impl Real for f64 {
    const BYTES: usize = 8;
    const NAME: &'static str = "double";
    const ZERO: Self = 0.0;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn is_positive_zero(self) -> bool {
        self.to_bits() == 0
    }
    fn extend_le_bytes(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
}
