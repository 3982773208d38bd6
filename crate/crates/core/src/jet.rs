//! Truncated Taylor arithmetic ("jets") for exact derivatives of closed-form
//! expressions.
//!
//! A jet carries the value and the first [`JET_ORDER`] Taylor coefficients of
//! a function at a point.  Arithmetic propagates them exactly (up to
//! floating-point rounding), so derivatives of compositions like
//! exp(−1/t) / (exp(−1/t) + exp(−1/(1−t))) come out without symbolic algebra
//! or finite-difference noise.

use std::ops::{Add, Div, Mul, Sub};

/// Highest derivative order tracked.
pub const JET_ORDER: usize = 8;
const LEN: usize = JET_ORDER + 1;

/// Taylor coefficients c[k] = f^{(k)}(t)/k! at an expansion point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; LEN],
}

impl Jet {
    pub const fn zero() -> Jet {
        Jet { c: [0.0; LEN] }
    }

    pub fn constant(x: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = x;
        Jet { c }
    }

    /// The identity function at t (value t, slope 1).
    pub fn var(t: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = t;
        c[1] = 1.0;
        Jet { c }
    }

    /// An affine inner function with the given value and slope.
    pub fn affine(value: f64, slope: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = value;
        c[1] = slope;
        Jet { c }
    }

    /// 1/self; the leading coefficient must be nonzero.
    pub fn recip(self) -> Jet {
        let mut c = [0.0; LEN];
        let v0 = 1.0 / self.c[0];
        c[0] = v0;
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * c[k - j];
            }
            c[k] = -v0 * s;
        }
        Jet { c }
    }

    /// exp(self) by the standard convolution recurrence.
    pub fn exp(self) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = self.c[0].exp();
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = s / k as f64;
        }
        Jet { c }
    }

    /// f^{(j)} at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        debug_assert!(j <= JET_ORDER);
        let mut fact = 1.0f64;
        for i in 2..=j {
            fact *= i as f64;
        }
        self.c[j] * fact
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c[k] + o.c[k];
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c[k] - o.c[k];
        }
        Jet { c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..LEN - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}
