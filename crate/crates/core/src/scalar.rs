//! Scalar rings that Clifford arithmetic can run over.
//!
//! Multivectors are generic over a commutative ring so that the same product
//! code serves plain reals, complex values and truncated Taylor jets. Jets
//! carry their layout at runtime, so constants are always built "like" an
//! existing value rather than from nothing.

use std::fmt::Debug;

use num_complex::Complex64;

/// Commutative ring with a real embedding.
pub trait Scalar: Clone + Debug + Send + Sync {
    /// The constant `c`, shaped like `self`.
    fn constant_like(&self, c: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scale(&self, c: f64) -> Self;

    /// `self += c * a * b`.
    fn acc_mul(&mut self, a: &Self, b: &Self, c: f64) {
        *self = self.plus(&a.times(b).scale(c));
    }

    /// `self += c * a`.
    fn acc_scaled(&mut self, a: &Self, c: f64) {
        *self = self.plus(&a.scale(c));
    }
}

/// Complex-valued scalars that support the analytic functions needed by the
/// principal-series cocycle and Gaussian test fields.
pub trait Analytic: Scalar {
    fn constant_c(&self, c: Complex64) -> Self;
    fn scale_c(&self, c: Complex64) -> Self;
    /// Value at the base point.
    fn constant_term(&self) -> Complex64;
    fn exp(&self) -> Self;
    /// Principal-branch power; callers guarantee a nonzero constant term.
    fn powc(&self, p: Complex64) -> Self;
    fn recip(&self) -> Self;

    /// `self += c * a`.
    fn acc_scaled_c(&mut self, a: &Self, c: Complex64) {
        *self = self.plus(&a.scale_c(c));
    }
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn acc_mul(&mut self, a: &Self, b: &Self, c: f64) {
        *self += c * a * b;
    }
    fn acc_scaled(&mut self, a: &Self, c: f64) {
        *self += c * a;
    }
}

impl Scalar for Complex64 {
    fn constant_like(&self, c: f64) -> Self {
        Complex64::new(c, 0.0)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn acc_mul(&mut self, a: &Self, b: &Self, c: f64) {
        *self += a * b * c;
    }
    fn acc_scaled(&mut self, a: &Self, c: f64) {
        *self += a * c;
    }
}

impl Analytic for Complex64 {
    fn constant_c(&self, c: Complex64) -> Self {
        c
    }
    fn scale_c(&self, c: Complex64) -> Self {
        self * c
    }
    fn constant_term(&self) -> Complex64 {
        *self
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn powc(&self, p: Complex64) -> Self {
        Complex64::powc(*self, p)
    }
    fn recip(&self) -> Self {
        self.inv()
    }
    fn acc_scaled_c(&mut self, a: &Self, c: Complex64) {
        *self += a * c;
    }
}
