//! Multiprecision complex scalars built on MPFR floats.
//!
//! Only the handful of operations the recurrences need are provided. Every
//! result carries the precision of its left operand.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{OpucError, Result};

pub const DEFAULT_PRECISION: u32 = 256;
pub const MIN_PRECISION: u32 = 53;
pub const MAX_PRECISION: u32 = 4096;

/// Rejects precisions outside the supported mantissa range.
pub fn check_precision(bits: u32) -> Result<u32> {
    if (MIN_PRECISION..=MAX_PRECISION).contains(&bits) {
        Ok(bits)
    } else {
        Err(OpucError::domain(format!(
            "precision {bits} outside [{MIN_PRECISION}, {MAX_PRECISION}] bits"
        )))
    }
}

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `2^(-bits)` at the given precision.
pub fn pow2_neg(prec: u32, bits: u32) -> Float {
    let two = Float::with_val(prec, 2);
    two.pow(-(bits as i64))
}

#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn zero(prec: u32) -> Self {
        Complex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Complex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Complex { re, im }
    }

    /// `e^{i angle}`.
    pub fn cis(angle: &Float) -> Self {
        let (s, c) = angle.clone().sin_cos(Float::new(angle.prec()));
        Complex { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.prec(), self.re.square_ref());
        n += Float::with_val(self.prec(), self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn add(&self, o: &Complex) -> Self {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }

    pub fn sub(&self, o: &Complex) -> Self {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }

    pub fn mul(&self, o: &Complex) -> Self {
        let mut out = Complex::zero(self.prec());
        out.add_mul(self, o);
        out
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re * s),
            im: Float::with_val(p, &self.im * s),
        }
    }

    pub fn div_real(&self, s: &Float) -> Self {
        let p = self.prec();
        Complex {
            re: Float::with_val(p, &self.re / s),
            im: Float::with_val(p, &self.im / s),
        }
    }

    pub fn div(&self, o: &Complex) -> Self {
        let d = o.norm_sqr();
        self.mul(&o.conj()).div_real(&d)
    }

    /// Integer power by repeated squaring.
    pub fn powu(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Complex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self += a * b`.
    pub fn add_mul(&mut self, a: &Complex, b: &Complex) {
        self.re += &a.re * &b.re;
        self.re -= &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im += &a.im * &b.re;
    }

    /// `self += conj(a) * b`.
    pub fn add_conj_mul(&mut self, a: &Complex, b: &Complex) {
        self.re += &a.re * &b.re;
        self.re += &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im -= &a.im * &b.re;
    }

    pub fn add_assign(&mut self, o: &Complex) {
        self.re += &o.re;
        self.im += &o.im;
    }

    pub fn sub_assign(&mut self, o: &Complex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e} {im:+e}i)")
    }
}

/// Relative difference `|a - b| / max(|b|, floor)`.
pub fn rel_diff(a: &Float, b: &Float, floor: f64) -> f64 {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    let scale = b.to_f64().abs().max(floor);
    diff.to_f64() / scale
}
