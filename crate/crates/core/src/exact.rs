//! Closed-form evaluation in 320-bit binary floating point.
//!
//! Schedules and stopping bounds chain several logarithms, square roots and
//! products. Evaluated in `f64` each step rounds, and results drift a couple
//! of ulps from the exact value. Here every intermediate carries 320 bits and
//! the result is rounded to `f64` once, so reals are correctly rounded and
//! ceilings are taken of the exact value.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::{Error, Result};

const PREC: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone)]
pub(crate) struct Real(BigFloat);

pub(crate) struct Ctx {
    consts: Consts,
}

impl Ctx {
    pub fn new() -> Self {
        Self {
            consts: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn ln(&mut self, x: &Real) -> Real {
        Real(x.0.ln(PREC, RM, &mut self.consts))
    }

    /// `π²/6`.
    pub fn c_e(&mut self) -> Real {
        let pi = Real(self.consts.pi(PREC, RM));
        pi.mul(&pi).div_f(6.0)
    }
}

impl Real {
    pub fn from_f64(x: f64) -> Self {
        Real(BigFloat::from_f64(x, PREC))
    }

    pub fn from_u64(x: u64) -> Self {
        Real(BigFloat::from_u64(x, PREC))
    }

    pub fn add(&self, o: &Real) -> Real {
        Real(self.0.add(&o.0, PREC, RM))
    }

    pub fn mul(&self, o: &Real) -> Real {
        Real(self.0.mul(&o.0, PREC, RM))
    }

    pub fn div(&self, o: &Real) -> Real {
        Real(self.0.div(&o.0, PREC, RM))
    }

    pub fn add_f(&self, x: f64) -> Real {
        self.add(&Real::from_f64(x))
    }

    pub fn mul_f(&self, x: f64) -> Real {
        self.mul(&Real::from_f64(x))
    }

    pub fn div_f(&self, x: f64) -> Real {
        self.div(&Real::from_f64(x))
    }

    /// `x / self`.
    pub fn recip_times(&self, x: f64) -> Real {
        Real::from_f64(x).div(self)
    }

    pub fn sq(&self) -> Real {
        self.mul(self)
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt(PREC, RM))
    }

    pub fn gt_f(&self, x: f64) -> bool {
        self.0.cmp(&BigFloat::from_f64(x, PREC)).is_some_and(|c| c > 0)
    }

    pub fn min_f(&self, x: f64) -> Real {
        if self.gt_f(x) {
            Real::from_f64(x)
        } else {
            self.clone()
        }
    }

    /// Nearest `f64`, ties to even.
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_positive() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        let mut r = self.0.clone();
        if r.set_precision(53, RM).is_err() {
            return f64::NAN;
        }
        let Some((words, _, sign, exp, _)) = r.as_raw_parts() else {
            return f64::NAN;
        };
        // Normalised mantissa: value = 0.1xxx… × 2^exp, top word holds the
        // leading bits.
        let mant = words.last().copied().unwrap_or(0) >> 11;
        let biased = exp as i64 - 1 + 1023;
        let mag = if (1..2047).contains(&biased) {
            f64::from_bits(((biased as u64) << 52) | (mant & ((1u64 << 52) - 1)))
        } else if biased >= 2047 {
            f64::INFINITY
        } else {
            mant as f64 * 2f64.powi(exp - 53 + 600) * 2f64.powi(-600)
        };
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// `⌈self⌉` as an integer.
    pub fn ceil_u64(&self, what: &str) -> Result<u64> {
        let c = Real(self.0.ceil()).to_f64();
        if !c.is_finite() || c >= u64::MAX as f64 {
            return Err(Error::config(format!(
                "{what} = {} is not representable",
                self.to_f64()
            )));
        }
        Ok(c.max(0.0) as u64)
    }
}
