//! Nonnegative reals stored by their natural logarithm.
//!
//! Density bounds in high dimension sit around `1e-100`, and the factors that
//! produce them (factorials, binomials, powers of `sin`) overflow long before
//! the product becomes small. Every bound in this crate is therefore carried
//! as a [`LogScaled`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul};

use serde::{Deserialize, Serialize};

/// A nonnegative real number `exp(log_value)`, or exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaled {
    is_zero: bool,
    log_value: f64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled {
        is_zero: true,
        log_value: f64::NEG_INFINITY,
    };
    pub const ONE: LogScaled = LogScaled {
        is_zero: false,
        log_value: 0.0,
    };

    /// Wraps a natural logarithm. `-inf` maps to zero.
    pub fn from_ln(log_value: f64) -> Self {
        if log_value == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogScaled {
                is_zero: false,
                log_value,
            }
        }
    }

    /// Panics on negative or NaN input; those never represent a density.
    pub fn from_f64(x: f64) -> Self {
        assert!(x >= 0.0, "LogScaled holds nonnegative values, got {x}");
        if x == 0.0 {
            Self::ZERO
        } else {
            Self::from_ln(x.ln())
        }
    }

    pub fn from_log10(log10: f64) -> Self {
        Self::from_ln(log10 * std::f64::consts::LN_10)
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    /// Natural log of the value; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_value
        }
    }

    pub fn log10(&self) -> f64 {
        self.ln() / std::f64::consts::LN_10
    }

    pub fn log2(&self) -> f64 {
        self.ln() / std::f64::consts::LN_2
    }

    /// Plain float value; underflows to 0 or overflows to inf outside the
    /// `f64` range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log_value.exp()
        }
    }

    pub fn powf(&self, p: f64) -> Self {
        if self.is_zero {
            if p > 0.0 {
                Self::ZERO
            } else {
                Self::ONE
            }
        } else {
            Self::from_ln(self.log_value * p)
        }
    }

    /// Decimal scientific notation `(mantissa, exponent)` with the mantissa
    /// in `[1, 10)`. Returns `(0.0, 0)` for zero.
    pub fn scientific(&self) -> (f64, i32) {
        if self.is_zero {
            return (0.0, 0);
        }
        let l10 = self.log10();
        let mut exp = l10.floor();
        let mut mant = 10f64.powf(l10 - exp);
        // powf can land a hair outside [1, 10) at the boundaries
        if mant >= 10.0 {
            mant /= 10.0;
            exp += 1.0;
        } else if mant < 1.0 {
            mant *= 10.0;
            exp -= 1.0;
        }
        (mant, exp as i32)
    }

    /// Relative difference `|a/b - 1|`, computed in log space.
    pub fn rel_diff(&self, other: &LogScaled) -> f64 {
        match (self.is_zero, other.is_zero) {
            (true, true) => 0.0,
            (false, false) => (self.log_value - other.log_value).exp_m1().abs(),
            _ => f64::INFINITY,
        }
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: LogScaled) -> LogScaled {
        if self.is_zero || rhs.is_zero {
            LogScaled::ZERO
        } else {
            LogScaled::from_ln(self.log_value + rhs.log_value)
        }
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, rhs: LogScaled) -> LogScaled {
        assert!(!rhs.is_zero, "division of LogScaled by zero");
        if self.is_zero {
            LogScaled::ZERO
        } else {
            LogScaled::from_ln(self.log_value - rhs.log_value)
        }
    }
}

impl PartialOrd for LogScaled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln().partial_cmp(&other.ln())
    }
}

impl fmt::Display for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.scientific();
        match f.precision() {
            Some(p) => write!(f, "{m:.p$}e{e}"),
            None => write!(f, "{m}e{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_add_logs() {
        let a = LogScaled::from_f64(3.0);
        let b = LogScaled::from_f64(4.0);
        assert!(((a * b).to_f64() - 12.0).abs() < 1e-14);
        assert!(((a / b).to_f64() - 0.75).abs() < 1e-15);
        assert!((a * LogScaled::ZERO).is_zero());
    }

    #[test]
    fn scientific_of_tiny_value() {
        // 5.036e-100 does not underflow and keeps its digits
        let v = LogScaled::from_ln(5.036f64.ln() - 100.0 * std::f64::consts::LN_10);
        let (m, e) = v.scientific();
        assert_eq!(e, -100);
        assert!((m - 5.036).abs() < 1e-12);
    }

    #[test]
    fn scientific_at_powers_of_ten() {
        for e in [-300, -17, -1, 0, 1, 42, 300] {
            let v = LogScaled::from_log10(e as f64);
            let (m, got) = v.scientific();
            assert_eq!(got, e);
            assert!((m - 1.0).abs() < 1e-12, "{m}");
        }
    }

    #[test]
    fn zero_behaves() {
        assert_eq!(LogScaled::from_f64(0.0), LogScaled::ZERO);
        assert_eq!(LogScaled::ZERO.to_f64(), 0.0);
        assert!(LogScaled::ZERO < LogScaled::ONE);
    }
}
