//! Numerical laboratory kernels for averages of power-residue prime counts.
//!
//! The crate is organised around the objects the experiments need:
//!
//! * [`arith`] — exact multiplicative arithmetic (modular powering, Jacobi and
//!   Kronecker symbols, square-part decompositions, Möbius, discrete logs,
//!   the logarithmic integral).
//! * [`primes`] — a segmented sieve streaming primes with optional residue
//!   class filtering, plus the counting functions π(x) and π(x; 1, d).
//! * [`residue`] — the counts P_{(a,d)}(x), their average over a ≤ y, and the
//!   exact principal/non-principal decomposition S = S₁ + S₂.
//! * [`characters`] — character tables of order dividing d for prime moduli,
//!   partial sums, and the Pólya–Vinogradov / Jutila / large-sieve / GRH
//!   statistics.
//! * [`gauss`] — the Gauss-type sums τ_m(k) and G_m(k), evaluated both from
//!   the definition and from the multiplicative prime-power table.
//! * [`window`] — the smooth plateau window Φ with certified derivative
//!   bounds and its oscillatory transform Φ̃.
//! * [`poisson`] — the M_z/R_z splitting of μ², the Poisson summation
//!   identity for quadratic-symbol sums, and the smoothed mean value.

pub mod arith;
pub mod characters;
pub mod complex;
pub mod cyclotomic;
pub mod gauss;
pub mod jet;
pub mod poisson;
pub mod primes;
pub mod residue;
pub mod window;

use std::fmt;

/// Errors raised when an operation's domain preconditions are violated.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A modulus that must be odd was even.
    EvenModulus(u64),
    /// A parameter that must be prime was not.
    NotPrime(u64),
    /// Residue divisible by the modulus where a unit is required.
    ZeroResidue { a: i64, p: u64 },
    /// Character order d does not divide p − 1.
    OrderDoesNotDivide { d: u64, p: u64 },
    /// Base excluded by the standing assumption (a square or a = −1).
    ExcludedBase(i64),
    /// A parameter that must be squarefree was not.
    NotSquarefree(u64),
    /// An interval with hi < lo.
    EmptyRange { lo: u64, hi: u64 },
    /// Sieve segment below the supported minimum.
    SegmentTooSmall(usize),
    /// Window edge parameter too small for a nonempty plateau.
    WindowTooNarrow(f64),
    /// Frequency cutoff below the certified tail requirement.
    CutoffTooSmall { given: i64, required: i64 },
    /// Catch-all domain violation with a description.
    Domain(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EvenModulus(n) => write!(f, "modulus {n} must be odd"),
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::ZeroResidue { a, p } => write!(f, "{a} is divisible by the modulus {p}"),
            Error::OrderDoesNotDivide { d, p } => {
                write!(f, "order {d} does not divide {p} - 1")
            }
            Error::ExcludedBase(a) => {
                write!(
                    f,
                    "base {a} is excluded (must not be -1 or a perfect square)"
                )
            }
            Error::NotSquarefree(n) => write!(f, "{n} is not squarefree"),
            Error::EmptyRange { lo, hi } => write!(f, "range [{lo}, {hi}) has hi < lo"),
            Error::SegmentTooSmall(s) => {
                write!(f, "segment size {s} bytes is below the 16 KiB minimum")
            }
            Error::WindowTooNarrow(u) => {
                write!(f, "edge parameter U = {u} must be at least 4")
            }
            Error::CutoffTooSmall { given, required } => {
                write!(
                    f,
                    "cutoff {given} is below the certified requirement {required}"
                )
            }
            Error::Domain(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
