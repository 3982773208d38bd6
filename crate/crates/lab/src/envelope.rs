//! Error envelopes for the mean-value bounds, with exact rational exponent
//! bookkeeping at the piece boundaries.
//!
//! Three envelope families are evaluated: the two-branch quadratic-mean
//! bound min(x·√(log x / y), √x·log x), the nine-piece power envelope for
//! orders 3, 4 and 6, and the earlier averaged bound x·E(x,y)/(φ(d)·log x)
//! with E = y^{−1/21} or x^{−1/6}·log x that both are measured against.
//! Pieces are selected by comparing log x / log y with exact rational
//! breakpoints; the (xy)^ε factor is never folded in here.

use std::cmp::Ordering;
use std::fmt;

/// An exact rational number with reduced terms and positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd_i64(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub const fn integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        Rational::new(self.num * o.num, self.den * o.den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd_i64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b.max(1);
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Which mean-value error bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// d = 2: min(x√(log x / y), √x·log x), the branch chosen by x/log x ≷ y.
    QuadraticMean,
    /// d ∈ {3, 4, 6}: the nine-piece pure power envelope (ε factor separate).
    HigherOrderMean,
    /// The earlier averaged bound x·E(x,y)/(φ(d)·log x).
    PriorAverage { d: u64 },
}

impl Theorem {
    pub fn label(&self) -> &'static str {
        match self {
            Theorem::QuadraticMean => "quadratic-mean",
            Theorem::HigherOrderMean => "higher-order-mean",
            Theorem::PriorAverage { .. } => "prior-average",
        }
    }
}

/// One piece x^{x_exp}·y^{y_exp}, valid while log x / log y ≤ `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Piece {
    pub upper: Option<Rational>,
    pub x_exp: Rational,
    pub y_exp: Rational,
}

/// The nine pieces of the higher-order envelope, ascending in log x / log y.
pub fn higher_order_pieces() -> Vec<Piece> {
    let r = Rational::new;
    let pieces = [
        (Some((3, 5)), (1, 2), (0, 1)),
        (Some((6, 7)), (4, 3), (-1, 2)),
        (Some((6, 5)), (3, 4), (0, 1)),
        (Some((3, 2)), (7, 6), (-1, 2)),
        (Some((9, 5)), (5, 6), (0, 1)),
        (Some((108, 55)), (10, 9), (-1, 2)),
        (Some((11, 5)), (1, 2), (7, 10)),
        (Some((5, 2)), (2, 3), (1, 3)),
        (None, (1, 1), (-1, 2)),
    ];
    pieces
        .into_iter()
        .map(|(upper, xe, ye)| Piece {
            upper: upper.map(|(n, d)| r(n, d)),
            x_exp: r(xe.0, xe.1),
            y_exp: r(ye.0, ye.1),
        })
        .collect()
}

/// The eight breakpoints between the nine pieces.
pub fn higher_order_breakpoints() -> Vec<Rational> {
    higher_order_pieces()
        .iter()
        .filter_map(|p| p.upper)
        .collect()
}

/// Evaluate the envelope at (x, y).  Breakpoints resolve to the left piece;
/// the pieces agree there exactly, so the choice is immaterial.
pub fn envelope_eval(theorem: Theorem, x: f64, y: f64) -> f64 {
    debug_assert!(x > 1.0 && y > 1.0);
    match theorem {
        Theorem::QuadraticMean => {
            let lx = x.ln();
            if x / lx >= y {
                x * (lx / y).sqrt()
            } else {
                x.sqrt() * lx
            }
        }
        Theorem::HigherOrderMean => {
            let piece = select_piece(x, y);
            x.powf(piece.x_exp.to_f64()) * y.powf(piece.y_exp.to_f64())
        }
        Theorem::PriorAverage { d } => {
            let lx = x.ln();
            let phi = euler_phi_small(d) as f64;
            let e = if y <= x.powf(2.0 / 3.0) {
                y.powf(-1.0 / 21.0)
            } else {
                x.powf(-1.0 / 6.0) * lx
            };
            x * e / (phi * lx)
        }
    }
}

fn select_piece(x: f64, y: f64) -> Piece {
    let (lx, ly) = (x.ln(), y.ln());
    for piece in higher_order_pieces() {
        match piece.upper {
            // log x / log y ≤ num/den  ⟺  den·log x ≤ num·log y
            Some(upper) => {
                if upper.den() as f64 * lx <= upper.num() as f64 * ly {
                    return piece;
                }
            }
            None => return piece,
        }
    }
    unreachable!("the last piece is unbounded")
}

/// The combined exponent of a piece along the boundary curve x = y^τ, i.e.
/// the exponent of y in piece(y^τ, y), as an exact rational.
pub fn boundary_exponent(piece: &Piece, tau: Rational) -> Rational {
    tau * piece.x_exp + piece.y_exp
}

fn euler_phi_small(d: u64) -> u64 {
    ntlab_core::arith::euler_phi(d.max(1))
}
