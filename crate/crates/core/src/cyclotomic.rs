//! Exact integer representations of d-th roots of unity for d ∈ {2, 3, 4, 6}.
//!
//! Character values of order dividing d live in ℤ[ζ_d].  For the orders we
//! care about this ring has an integral basis {1, ζ_d}, so every value — and
//! every partial sum of values — is an exact pair of integers.  Norms are
//! integer-valued quadratic forms, which makes equality tests and maxima of
//! |sum|² exact and the parallel reductions deterministic.
//!
//! Basis conventions: ζ₂ = −1 (second coordinate always 0), ζ₃ = e(1/3),
//! ζ₄ = i, ζ₆ = e(1/6) with ζ₆² = ζ₆ − 1.

use std::ops::{Add, Neg, Sub};

use crate::complex::Complex;

/// An element u + v·ζ_d of ℤ[ζ_d].  The order d is carried by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cyc {
    pub u: i64,
    pub v: i64,
}

pub const CYC_ZERO: Cyc = Cyc { u: 0, v: 0 };
pub const CYC_ONE: Cyc = Cyc { u: 1, v: 0 };

impl Cyc {
    pub fn new(u: i64, v: i64) -> Self {
        Cyc { u, v }
    }

    /// |u + v·ζ_d|² as an exact integer.
    pub fn norm_sq(self, d: u64) -> i64 {
        let (u, v) = (self.u, self.v);
        match d {
            2 => u * u,
            3 => u * u - u * v + v * v,
            4 => u * u + v * v,
            6 => u * u + u * v + v * v,
            _ => unreachable!("unsupported cyclotomic order {d}"),
        }
    }

    /// Complex embedding with ζ_d on the principal branch.
    pub fn to_complex(self, d: u64) -> Complex {
        let (u, v) = (self.u as f64, self.v as f64);
        let half_sqrt3 = 0.8660254037844386_f64;
        match d {
            2 => Complex::new(u - v, 0.0),
            3 => Complex::new(u - 0.5 * v, half_sqrt3 * v),
            4 => Complex::new(u, v),
            6 => Complex::new(u + 0.5 * v, half_sqrt3 * v),
            _ => unreachable!("unsupported cyclotomic order {d}"),
        }
    }

    /// Complex conjugation, exact in the {1, ζ_d} basis.
    pub fn conj(self, d: u64) -> Cyc {
        let (u, v) = (self.u, self.v);
        match d {
            2 | 4 => Cyc { u, v: -v },
            // conj ζ₃ = ζ₃² = −1 − ζ₃
            3 => Cyc { u: u - v, v: -v },
            // conj ζ₆ = ζ₆⁵ = 1 − ζ₆
            6 => Cyc { u: u + v, v: -v },
            _ => unreachable!("unsupported cyclotomic order {d}"),
        }
    }
}

impl Add for Cyc {
    type Output = Cyc;
    fn add(self, rhs: Cyc) -> Cyc {
        Cyc {
            u: self.u + rhs.u,
            v: self.v + rhs.v,
        }
    }
}

impl Sub for Cyc {
    type Output = Cyc;
    fn sub(self, rhs: Cyc) -> Cyc {
        Cyc {
            u: self.u - rhs.u,
            v: self.v - rhs.v,
        }
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc {
            u: -self.u,
            v: -self.v,
        }
    }
}

/// True for the orders the exact representation supports.
pub fn supported_order(d: u64) -> bool {
    matches!(d, 2 | 3 | 4 | 6)
}

/// ζ_d^k in the {1, ζ_d} basis.
pub fn zeta_pow(d: u64, k: u64) -> Cyc {
    let k = (k % d) as usize;
    match d {
        2 => [Cyc::new(1, 0), Cyc::new(-1, 0)][k],
        3 => [Cyc::new(1, 0), Cyc::new(0, 1), Cyc::new(-1, -1)][k],
        4 => [
            Cyc::new(1, 0),
            Cyc::new(0, 1),
            Cyc::new(-1, 0),
            Cyc::new(0, -1),
        ][k],
        6 => [
            Cyc::new(1, 0),
            Cyc::new(0, 1),
            Cyc::new(-1, 1),
            Cyc::new(-1, 0),
            Cyc::new(0, -1),
            Cyc::new(1, -1),
        ][k],
        _ => unreachable!("unsupported cyclotomic order {d}"),
    }
}
