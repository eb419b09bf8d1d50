//! Precision escalation.
//!
//! Computations report [`OpucError::Precision`] when the working precision
//! cannot support the result; [`PrecisionPolicy::run`] then retries at twice
//! the precision until the ceiling is reached.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::complex::{check_precision, pow2_neg, DEFAULT_PRECISION, MAX_PRECISION};
use crate::error::{OpucError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub ceiling: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: DEFAULT_PRECISION,
            ceiling: 2048,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start: u32, ceiling: u32) -> Result<Self> {
        check_precision(start)?;
        check_precision(ceiling)?;
        if ceiling < start {
            return Err(OpucError::domain(format!(
                "precision ceiling {ceiling} below start {start}"
            )));
        }
        Ok(PrecisionPolicy { start, ceiling })
    }

    /// No escalation.
    pub fn fixed(bits: u32) -> Self {
        PrecisionPolicy {
            start: bits,
            ceiling: bits,
        }
    }

    /// Starts at `bits` and doubles up to the global maximum.
    pub fn from_start(bits: u32) -> Self {
        PrecisionPolicy {
            start: bits,
            ceiling: (bits * 8).min(MAX_PRECISION).max(bits),
        }
    }

    pub fn run<T>(&self, mut attempt: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut bits = self.start;
        loop {
            match attempt(bits) {
                Err(OpucError::Precision { .. }) if bits * 2 <= self.ceiling => bits *= 2,
                other => return other,
            }
        }
    }
}

/// Residuals above `2^{-bits/4}` call for more precision.
pub fn residual_tolerance(bits: u32) -> Float {
    pow2_neg(bits, bits / 4)
}

/// Norms below `2^{-3 bits/4}` leave fewer than `bits/4` trustworthy bits
/// in anything derived from the moment Toeplitz matrix.
pub fn conditioning_floor(bits: u32) -> Float {
    pow2_neg(bits, 3 * bits / 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_until_success() {
        let mut seen = vec![];
        let out = PrecisionPolicy::new(64, 1024)
            .unwrap()
            .run(|bits| {
                seen.push(bits);
                if bits < 256 {
                    Err(OpucError::Precision {
                        index: 0,
                        detail: String::new(),
                    })
                } else {
                    Ok(bits)
                }
            })
            .unwrap();
        assert_eq!(out, 256);
        assert_eq!(seen, vec![64, 128, 256]);
    }

    #[test]
    fn stops_at_ceiling() {
        let err = PrecisionPolicy::new(64, 200)
            .unwrap()
            .run(|_| -> Result<()> {
                Err(OpucError::Precision {
                    index: 3,
                    detail: String::new(),
                })
            })
            .unwrap_err();
        assert!(matches!(err, OpucError::Precision { index: 3, .. }));
    }

    #[test]
    fn other_errors_pass_through() {
        let err = PrecisionPolicy::default()
            .run(|_| -> Result<()> { Err(OpucError::domain("x")) })
            .unwrap_err();
        assert!(matches!(err, OpucError::Domain(_)));
    }
}
