//! Gauss-type sums τ_m(k) and their normalized factors G_m(k).
//!
//! τ_m(k) = Σ_{a mod k} (a/k)·e(am/k) for odd k, and
//! τ_m(k) = ((1+i)/2 + (−1/k)(1−i)/2)·G_m(k), so G_m(k) = τ_m(k) for
//! k ≡ 1 (mod 4) and −i·τ_m(k) for k ≡ 3 (mod 4).  G is multiplicative in
//! coprime moduli and is pinned on prime powers by a five-case table; the
//! two routes (definition and table) are kept as independently computable
//! checks of each other.

use crate::arith::{factorize, jacobi_reduced};
use crate::complex::Complex;
use crate::{Error, Result};

/// Moduli above this are rejected by the table route rather than risking a
/// long trial-division factorization.
const FACTOR_LIMIT: u64 = 1 << 40;

/// τ_m(k) by direct summation; k odd ≥ 1.  O(k) complex operations.
pub fn tau_m(k: u64, m: i64) -> Result<Complex> {
    Ok(GaussEvaluator::new(k)?.tau(m))
}

/// G_m(k) recovered from the definition of τ_m(k).
pub fn g_direct(k: u64, m: i64) -> Result<Complex> {
    Ok(GaussEvaluator::new(k)?.g_direct(m))
}

/// Per-modulus tables for repeated τ/G evaluations at many m.
pub struct GaussEvaluator {
    k: u64,
    /// (a/k) for a mod k.
    symbols: Vec<i8>,
    /// e(a/k) for a mod k.
    roots: Vec<Complex>,
}

impl GaussEvaluator {
    pub fn new(k: u64) -> Result<Self> {
        if k.is_multiple_of(2) {
            return Err(Error::EvenModulus(k));
        }
        let symbols = (0..k).map(|a| jacobi_reduced(a, k) as i8).collect();
        let roots = (0..k).map(|a| Complex::e(a as f64 / k as f64)).collect();
        Ok(GaussEvaluator { k, symbols, roots })
    }

    pub fn tau(&self, m: i64) -> Complex {
        let k = self.k;
        let m_red = m.rem_euclid(k as i64) as u64;
        let mut sum = Complex::default();
        for a in 0..k {
            let s = self.symbols[a as usize];
            if s == 0 {
                continue;
            }
            let root = self.roots[((a as u128 * m_red as u128) % k as u128) as usize];
            sum += if s > 0 { root } else { -root };
        }
        // k = 1: the single a = 0 term is (0/1)·e(0) = 1.
        if k == 1 {
            sum = Complex::new(1.0, 0.0);
        }
        sum
    }

    /// G_m(k) = τ_m(k) for k ≡ 1 (mod 4), −i·τ_m(k) for k ≡ 3 (mod 4).
    pub fn g_direct(&self, m: i64) -> Complex {
        let tau = self.tau(m);
        if self.k % 4 == 1 {
            tau
        } else {
            Complex::new(tau.im, -tau.re)
        }
    }
}

/// G_m(p^b) from the prime-power table, with a = v_p(m) (None for m = 0,
/// meaning a = ∞):
///   0          if b ≤ a odd,
///   φ(p^b)     if b ≤ a even,
///   −p^a       if b = a+1 even,
///   (m/p^a | p) p^a √p  if b = a+1 odd,
///   0          if b ≥ a+2.
fn g_prime_power(p: u64, b: u32, m: i64) -> f64 {
    let val = |a: u32| -> f64 {
        if b <= a {
            if b % 2 == 1 {
                0.0
            } else {
                // φ(p^b)
                ((p - 1) * p.pow(b - 1)) as f64
            }
        } else if b == a + 1 {
            if b.is_multiple_of(2) {
                -((p.pow(a)) as f64)
            } else {
                let m_over = m / (p.pow(a) as i64);
                let sym = jacobi_reduced(m_over.rem_euclid(p as i64) as u64, p);
                sym as f64 * p.pow(a) as f64 * (p as f64).sqrt()
            }
        } else {
            0.0
        }
    };
    if m == 0 {
        // a = ∞: only the b ≤ a cases apply.
        return if b % 2 == 1 {
            0.0
        } else {
            ((p - 1) * p.pow(b - 1)) as f64
        };
    }
    let mut a = 0u32;
    let mut mm = m.unsigned_abs();
    while mm.is_multiple_of(p) {
        mm /= p;
        a += 1;
    }
    val(a)
}

/// G_m(k) by factoring k and multiplying the prime-power table values.
pub fn g_formula(k: u64, m: i64) -> Result<Complex> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenModulus(k));
    }
    if k > FACTOR_LIMIT {
        return Err(Error::Domain("modulus exceeds the factorization bound"));
    }
    Ok(g_with_factors(&factorize(k), m))
}

/// Table evaluation against a pre-factored modulus; used in inner loops.
pub fn g_with_factors(factors: &[(u64, u32)], m: i64) -> Complex {
    let mut prod = 1.0f64;
    for &(p, b) in factors {
        prod *= g_prime_power(p, b, m);
        if prod == 0.0 {
            break;
        }
    }
    Complex::new(prod, 0.0)
}

/// Worst disagreement between the definition route and the table route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussScan {
    /// max over (k, m) of |G_direct − G_formula| / max(1, |G_formula|).
    pub max_rel_err: f64,
    pub worst_k: u64,
    pub worst_m: i64,
    pub cases: u64,
}

/// Compare the two G_m(k) routes for all odd k ≤ k_cap and |m| ≤ m_abs_cap.
pub fn verify_scan(k_cap: u64, m_abs_cap: i64) -> GaussScan {
    use rayon::prelude::*;
    let odd_k: Vec<u64> = (1..=k_cap).step_by(2).collect();
    let worst = odd_k
        .par_iter()
        .map(|&k| {
            let ev = GaussEvaluator::new(k).expect("odd modulus");
            let factors = factorize(k);
            let mut local = (0.0f64, k, 0i64);
            for m in -m_abs_cap..=m_abs_cap {
                let d = ev.g_direct(m);
                let f = g_with_factors(&factors, m);
                let rel = (d - f).abs() / f.abs().max(1.0);
                if rel > local.0 {
                    local = (rel, k, m);
                }
            }
            local
        })
        .reduce(
            || (0.0f64, 0u64, 0i64),
            |a, b| if a.0 >= b.0 { a } else { b },
        );
    GaussScan {
        max_rel_err: worst.0,
        worst_k: worst.1,
        worst_m: worst.2,
        cases: odd_k.len() as u64 * (2 * m_abs_cap as u64 + 1),
    }
}
