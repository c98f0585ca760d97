//! Complex-plane primitives.
//!
//! Every channel quantity (direct path, per-element coefficients, candidate
//! vectors, the overall channel) is a point in the complex plane. Angles are
//! radians; arguments live in `[0, 2π)`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used wherever an exact angular comparison is needed.
pub const ANGLE_EPS: f64 = 1e-9;

/// A point in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexVec {
    pub re: f64,
    pub im: f64,
}

impl ComplexVec {
    pub const ZERO: ComplexVec = ComplexVec { re: 0.0, im: 0.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        ComplexVec { re, im }
    }

    pub fn from_polar(amplitude: f64, arg: f64) -> Self {
        let (s, c) = arg.sin_cos();
        ComplexVec::new(amplitude * c, amplitude * s)
    }

    pub fn amplitude(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    /// Counterclockwise angle from the positive real axis, in `[0, 2π)`.
    pub fn arg_mod_2pi(self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(wrap_angle(self.im.atan2(self.re)))
    }

    /// Rotates counterclockwise by `angle` radians; amplitude is preserved.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        ComplexVec::new(self.re * c - self.im * s, self.re * s + self.im * c)
    }

    pub fn dot(self, other: ComplexVec) -> f64 {
        self.re * other.re + self.im * other.im
    }
}

impl Add for ComplexVec {
    type Output = ComplexVec;
    fn add(self, rhs: ComplexVec) -> ComplexVec {
        ComplexVec::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ComplexVec {
    fn add_assign(&mut self, rhs: ComplexVec) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for ComplexVec {
    type Output = ComplexVec;
    fn sub(self, rhs: ComplexVec) -> ComplexVec {
        ComplexVec::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl SubAssign for ComplexVec {
    fn sub_assign(&mut self, rhs: ComplexVec) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl Neg for ComplexVec {
    type Output = ComplexVec;
    fn neg(self) -> ComplexVec {
        ComplexVec::new(-self.re, -self.im)
    }
}

impl Mul<f64> for ComplexVec {
    type Output = ComplexVec;
    fn mul(self, rhs: f64) -> ComplexVec {
        ComplexVec::new(self.re * rhs, self.im * rhs)
    }
}

impl std::iter::Sum for ComplexVec {
    fn sum<I: Iterator<Item = ComplexVec>>(iter: I) -> ComplexVec {
        iter.fold(ComplexVec::ZERO, |acc, v| acc + v)
    }
}

/// Reduces any finite angle into `[0, 2π)`. Exact multiples of 2π map to 0.
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Unsigned angular distance between two arguments, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (wrap_angle(a) - wrap_angle(b)).abs();
    d.min(TAU - d)
}

/// The angle between two nonzero vectors, in `[0, π]`.
pub fn angle_between(a: ComplexVec, b: ComplexVec) -> Result<f64> {
    Ok(angular_distance(a.arg_mod_2pi()?, b.arg_mod_2pi()?))
}

/// Unit vector with the given argument.
pub fn unit_from_arg(theta: f64) -> ComplexVec {
    ComplexVec::from_polar(1.0, wrap_angle(theta))
}

/// Three-way classification of an angle against the right angle, using
/// [`ANGLE_EPS`] as the band half-width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RightAngle {
    Acute,
    Boundary,
    Obtuse,
}

pub fn classify_right_angle(angle: f64) -> RightAngle {
    if angle < FRAC_PI_2 - ANGLE_EPS {
        RightAngle::Acute
    } else if angle > FRAC_PI_2 + ANGLE_EPS {
        RightAngle::Obtuse
    } else {
        RightAngle::Boundary
    }
}

/// Counterclockwise angle needed to rotate from `from` to `to`, in `[0, 2π)`.
pub fn ccw_gap(from: f64, to: f64) -> f64 {
    wrap_angle(to - from)
}
