//! Log-polar complex values for overflow-safe orbit iteration.
//!
//! A value is stored as (log-magnitude, argument); doubling log-magnitudes
//! under iteration then stay far from f64 range limits. Sums are computed by
//! factoring out the largest term so that only ratios of magnitude <= 1 are
//! exponentiated.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{Poly1, Poly2};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A complex number as exp(lm) * e^{i arg}, with an explicit zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogC {
    Zero,
    Val { lm: f64, arg: f64 },
}

fn reduce_arg(a: f64) -> f64 {
    let mut r = a.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r -= TAU;
    }
    r
}

impl LogC {
    pub fn from_c64(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            LogC::Zero
        } else {
            LogC::Val {
                lm: z.norm().ln(),
                arg: z.arg(),
            }
        }
    }

    pub fn to_c64(self) -> Complex64 {
        match self {
            LogC::Zero => Complex64::new(0.0, 0.0),
            LogC::Val { lm, arg } => Complex64::from_polar(lm.exp(), arg),
        }
    }

    /// ln of the magnitude; -inf for zero.
    pub fn log_abs(self) -> f64 {
        match self {
            LogC::Zero => f64::NEG_INFINITY,
            LogC::Val { lm, .. } => lm,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, LogC::Zero)
    }

    pub fn mul(self, other: LogC) -> LogC {
        match (self, other) {
            (LogC::Zero, _) | (_, LogC::Zero) => LogC::Zero,
            (LogC::Val { lm: a, arg: x }, LogC::Val { lm: b, arg: y }) => LogC::Val {
                lm: a + b,
                arg: reduce_arg(x + y),
            },
        }
    }

    pub fn powi(self, e: u32) -> LogC {
        if e == 0 {
            return LogC::Val { lm: 0.0, arg: 0.0 };
        }
        match self {
            LogC::Zero => LogC::Zero,
            LogC::Val { lm, arg } => LogC::Val {
                lm: lm * e as f64,
                arg: reduce_arg(arg * e as f64),
            },
        }
    }

    /// Sum of terms, factoring out the largest magnitude.
    pub fn sum(terms: &[LogC]) -> LogC {
        let mut best: Option<(f64, f64)> = None;
        for t in terms {
            if let LogC::Val { lm, arg } = t {
                if best.map(|(b, _)| *lm > b).unwrap_or(true) {
                    best = Some((*lm, *arg));
                }
            }
        }
        let (lm0, arg0) = match best {
            None => return LogC::Zero,
            Some(b) => b,
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for t in terms {
            if let LogC::Val { lm, arg } = t {
                let d = lm - lm0;
                // terms more than ~40 decades below the leading one are dust
                if d > -700.0 {
                    acc += Complex64::from_polar(d.exp(), arg - arg0);
                }
            }
        }
        if acc.re == 0.0 && acc.im == 0.0 {
            return LogC::Zero;
        }
        LogC::Val {
            lm: lm0 + acc.norm().ln(),
            arg: reduce_arg(arg0 + acc.arg()),
        }
    }
}

/// Evaluate a univariate polynomial at a log-polar point.
pub fn eval_poly1_log(p: &Poly1<Complex64>, z: LogC) -> LogC {
    let terms: Vec<LogC> = p
        .terms()
        .map(|(e, c)| LogC::from_c64(*c).mul(z.powi(e)))
        .collect();
    LogC::sum(&terms)
}

/// Evaluate a bivariate polynomial at a log-polar point.
pub fn eval_poly2_log(q: &Poly2<Complex64>, z: LogC, w: LogC) -> LogC {
    let terms: Vec<LogC> = q
        .terms()
        .map(|(n, m, c)| LogC::from_c64(*c).mul(z.powi(n)).mul(w.powi(m)))
        .collect();
    LogC::sum(&terms)
}

/// Grouped evaluation reused by hot loops: w-powers of z-Horner coefficients.
pub fn eval_poly2_log_grouped(by_m: &BTreeMap<u32, Poly1<Complex64>>, z: LogC, w: LogC) -> LogC {
    let terms: Vec<LogC> = by_m
        .iter()
        .map(|(&m, pz)| eval_poly1_log(pz, z).mul(w.powi(m)))
        .collect();
    LogC::sum(&terms)
}
