//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All model, spectral and dynamics code is written against [`Real`], which
//! is implemented for `f32` and `f64`. Complex arithmetic goes through
//! [`num_complex::Complex`] with the analytic functions supplied by
//! `nalgebra::ComplexField`.

use std::fmt::{Debug, Display};

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the numerical core.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Machine epsilon of the representation.
    const EPSILON: Self;

    /// Converts an `f64` literal. Panics only for values that cannot be
    /// represented at all, which never happens for the finite constants used
    /// in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }
}

impl Real for f32 {
    const EPSILON: Self = f32::EPSILON;
}

impl Real for f64 {
    const EPSILON: Self = f64::EPSILON;
}

/// Complex number over the scalar `T`.
pub type Cx<T> = Complex<T>;

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn cre<T: Real>(re: T) -> Cx<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// `e^{i phase}`. Multiples of π/2 are produced exactly so that matrices
/// evaluated at high-symmetry momenta carry no spurious rounding; exceptional
/// points at k = ±π are then represented as genuinely defective matrices.
pub fn unit_phase<T: Real>(phase: T) -> Cx<T> {
    let quarter = phase / T::frac_pi_2();
    let nearest = quarter.round();
    if (quarter - nearest).abs() <= T::lit(4.0) * T::EPSILON * (T::one() + nearest.abs()) {
        let q = nearest.to_i64().unwrap_or(0).rem_euclid(4);
        return match q {
            0 => cx(T::one(), T::zero()),
            1 => cx(T::zero(), T::one()),
            2 => cx(-T::one(), T::zero()),
            _ => cx(T::zero(), -T::one()),
        };
    }
    cx(phase.cos(), phase.sin())
}

#[inline]
pub fn modulus<T: Real>(z: Cx<T>) -> T {
    ComplexField::modulus(z)
}

/// Principal square root (branch cut on the negative real axis, Re ≥ 0).
#[inline]
pub fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    ComplexField::sqrt(z)
}

#[inline]
pub fn cexp<T: Real>(z: Cx<T>) -> Cx<T> {
    ComplexField::exp(z)
}

#[inline]
pub fn carg<T: Real>(z: Cx<T>) -> T {
    ComplexField::argument(z)
}

#[inline]
pub fn ccos<T: Real>(z: Cx<T>) -> Cx<T> {
    ComplexField::cos(z)
}

#[inline]
pub fn csin<T: Real>(z: Cx<T>) -> Cx<T> {
    ComplexField::sin(z)
}

/// Principal inverse hyperbolic tangent, atanh z = ½[ln(1+z) − ln(1−z)].
#[inline]
pub fn catanh<T: Real>(z: Cx<T>) -> Cx<T> {
    let one = cre(T::one());
    (ComplexField::ln(one + z) - ComplexField::ln(one - z)) * T::lit(0.5)
}

/// Wraps an angle increment into (−π, π].
pub fn wrap_angle<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut y = x - two_pi * ((x + T::pi()) / two_pi).floor();
    // y is now in [−π, π); move the lower endpoint to +π.
    if y <= -T::pi() {
        y += two_pi;
    }
    y
}

/// Scientific notation with 17 significant digits, the serialization format
/// of every numeric output file.
pub fn fmt_sci(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_phase_is_exact_on_quarter_turns() {
        assert_eq!(unit_phase(PI), cx(-1.0, 0.0));
        assert_eq!(unit_phase(-PI), cx(-1.0, 0.0));
        assert_eq!(unit_phase(PI / 2.0), cx(0.0, 1.0));
        assert_eq!(unit_phase(-PI / 2.0), cx(0.0, -1.0));
        assert_eq!(unit_phase(0.0), cx(1.0, 0.0));
        let z = unit_phase(0.3_f64);
        assert!((z.re - 0.3_f64.cos()).abs() < 1e-16 && (z.im - 0.3_f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn wrap_angle_lands_in_half_open_interval() {
        for &x in &[0.0, PI, -PI, 3.0 * PI, -3.0 * PI, 7.1, -7.1, 1e-9] {
            let y = wrap_angle(x);
            assert!(y > -PI && y <= PI, "{x} -> {y}");
            let k = ((x - y) / (2.0 * PI)).round();
            assert!((x - y - 2.0 * PI * k).abs() < 1e-12);
        }
        assert_eq!(wrap_angle(-PI), PI);
    }

    #[test]
    fn principal_sqrt_has_nonnegative_real_part() {
        let r = csqrt(cx(-4.0_f64, 0.0));
        assert!((r - cx(0.0, 2.0)).norm() < 1e-15);
        let r = csqrt(cx(-4.0_f64, -1e-300));
        assert!(r.re >= 0.0);
    }

    #[test]
    fn sci_format_has_seventeen_digits() {
        assert_eq!(fmt_sci(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_sci(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_sci(f64::INFINITY), "inf");
    }
}
