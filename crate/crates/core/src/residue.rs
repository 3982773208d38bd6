//! Power-residue prime counts P_{(a,d)}(x), their average over 2 ≤ a ≤ y,
//! and the exact principal/non-principal decomposition of that average.
//!
//! For a prime p ≡ 1 (mod d) the orthogonality of the d characters with
//! χ^d = χ₀ gives, per pair (p, a),
//!
//!   d · [a is a d-th power residue, p ∤ a] = χ₀(a) + Σ_{χ ≠ χ₀} χ(a),
//!
//! an identity between integers once the non-principal part is folded to
//! d·[ind(a) ≡ 0] − 1.  Summing over p ≤ x and 2 ≤ a ≤ y yields the exact
//! integer relation d·N = N₁ + N₂ behind `S = S₁ + S₂`; both evaluation
//! modes below produce these integers and only divide at the very end, so
//! the decomposition test is exact and parallel reductions deterministic.

use rayon::prelude::*;

use crate::arith::{self, is_square, powmod, spf_sieve};
use crate::cyclotomic::{self, Cyc, CYC_ZERO};
use crate::primes::{self, PrimeRange};
use crate::{Error, Result};

/// Whether the a-average runs over every 2 ≤ a ≤ y or skips perfect squares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AMode {
    /// The sum as the averaged statements write it: every integer a.
    All,
    /// Sensitivity variant: perfect squares excluded.
    Nonsquare,
}

impl AMode {
    pub fn label(self) -> &'static str {
        match self {
            AMode::All => "all",
            AMode::Nonsquare => "nonsquare",
        }
    }
}

/// True iff a is a d-th power residue mod p, for p ≡ 1 (mod d), p ∤ a.
///
/// Uses the Euler-type criterion a^{(p−1)/d} ≡ 1 (mod p).  The p | a case is
/// rejected so callers handle the principal-character bookkeeping explicitly.
pub fn is_dth_power_residue(a: i64, p: u64, d: u64) -> Result<bool> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !(p - 1).is_multiple_of(d) {
        return Err(Error::OrderDoesNotDivide { d, p });
    }
    let a = arith::reduce(a, p);
    if a == 0 {
        return Err(Error::ZeroResidue { a: 0, p });
    }
    Ok(powmod(a, (p - 1) / d, p) == 1)
}

/// P_{(a,d)}(x): primes p ≤ x with p ≡ 1 (mod d), p ∤ a, and a a d-th power
/// residue mod p.
pub fn count_p(a: i64, d: u64, x: u64) -> u64 {
    let mut count = 0u64;
    let range = PrimeRange::new(2, x.saturating_add(1)).with_filter(d, 1 % d);
    primes::stream_primes(&range, |p| {
        let r = arith::reduce(a, p);
        if r != 0 && powmod(r, (p - 1) / d, p) == 1 {
            count += 1;
        }
    })
    .expect("valid range");
    count
}

/// The averaged count with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValueResult {
    pub d: u64,
    pub x: u64,
    pub y: u64,
    pub a_mode: AMode,
    /// S = (1/y) Σ_{2 ≤ a ≤ y} P_{(a,d)}(x).
    pub s: f64,
    /// Principal-character part.
    pub s1: f64,
    /// Non-principal part; S = S1 + S2 exactly.
    pub s2: f64,
    /// π(x)/2 for d = 2, π(x; 1, d)/d otherwise.
    pub main_term: f64,
    pub abs_error: f64,
    /// Exact integer numerators: s = n/y, s1 = n1/(dy), s2 = n2/(dy),
    /// with d·n = n1 + n2.
    pub n: i64,
    pub n1: i64,
    pub n2: i64,
}

/// How `mean_value` evaluates the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanMode {
    /// One pass over primes, per-prime character sums over a ≤ y.
    Character,
    /// Definitional sum of per-(p, a) residue tests (Euler criterion).
    Direct,
}

/// Compute (1/y) Σ_{2 ≤ a ≤ y} P_{(a,d)}(x) with its S₁ + S₂ split.
///
/// Character mode needs d ∈ {2, 3, 4, 6}; other d fall back to direct mode.
/// Both modes accumulate exact integers per prime segment and reduce by
/// integer addition, so results are independent of scheduling.
pub fn mean_value(
    d: u64,
    x: u64,
    y: u64,
    a_mode: AMode,
    mode: MeanMode,
) -> Result<MeanValueResult> {
    if y < 2 {
        return Err(Error::Domain("mean value needs y >= 2"));
    }
    if x < 3 {
        return Err(Error::Domain("mean value needs x >= 3"));
    }
    if d < 2 {
        return Err(Error::Domain("mean value needs d >= 2"));
    }
    let mode = if mode == MeanMode::Character && !cyclotomic::supported_order(d) {
        MeanMode::Direct
    } else {
        mode
    };

    let shards = primes::shard_ranges(2, x + 1, 64.max(rayon::current_num_threads() * 8));
    let counters: Counters = shards
        .par_iter()
        .map(|&(lo, hi)| {
            let mut seg = Vec::new();
            let range = PrimeRange::new(lo, hi).with_filter(d, 1 % d);
            primes::stream_primes(&range, |p| seg.push(p)).expect("valid range");
            match mode {
                MeanMode::Character => character_pass(&seg, d, y, a_mode),
                MeanMode::Direct => direct_pass(&seg, d, y, a_mode),
            }
        })
        .reduce(Counters::default, Counters::merge);

    // The pair accumulation of Σ_{j≠0} χ_j(a) must land on the rational axis.
    debug_assert_eq!(
        counters.pair.v, 0,
        "non-principal sums over conjugate-closed character sets are rational"
    );

    let n = counters.residue_hits;
    let n1 = counters.principal;
    let n2 = d as i64 * n - n1;
    let s = n as f64 / y as f64;
    let s1 = n1 as f64 / (d * y) as f64;
    let s2 = n2 as f64 / (d * y) as f64;
    let main_term = if d == 2 {
        primes::pi(x) as f64 / 2.0
    } else {
        primes::pi_class(x, d) as f64 / d as f64
    };
    Ok(MeanValueResult {
        d,
        x,
        y,
        a_mode,
        s,
        s1,
        s2,
        main_term,
        abs_error: (s - main_term).abs(),
        n,
        n1,
        n2,
    })
}

#[derive(Default, Clone, Copy)]
struct Counters {
    /// Σ_p #{2 ≤ a ≤ y : p ∤ a, a a d-th power residue}.
    residue_hits: i64,
    /// Σ_p #{2 ≤ a ≤ y : p ∤ a} (the χ₀ sums).
    principal: i64,
    /// Exact Σ_p Σ_{j≠0} Σ_a χ_j(a) as a ℤ[ζ_d] pair (imaginary part must
    /// cancel); internal consistency check for character mode.
    pair: Cyc,
}

impl Counters {
    fn merge(self, o: Counters) -> Counters {
        Counters {
            residue_hits: self.residue_hits + o.residue_hits,
            principal: self.principal + o.principal,
            pair: self.pair + o.pair,
        }
    }
}

/// Per-(p, a) Euler-criterion tests; the definitional route.
fn direct_pass(primes_seg: &[u64], d: u64, y: u64, a_mode: AMode) -> Counters {
    let mut c = Counters::default();
    for &p in primes_seg {
        let e = (p - 1) / d;
        for a in 2..=y {
            if a_mode == AMode::Nonsquare && is_square(a as i64) {
                continue;
            }
            let r = a % p;
            if r == 0 {
                continue;
            }
            c.principal += 1;
            if powmod(r, e, p) == 1 {
                c.residue_hits += 1;
            }
        }
    }
    c
}

/// One pass over primes with per-prime character sums over a ≤ y.
///
/// For each prime the character index of a (the discrete log reduced mod d)
/// is extended multiplicatively from the primes below y with one table
/// lookup per composite a, keeping the inner loop free of modular powering.
fn character_pass(primes_seg: &[u64], d: u64, y: u64, a_mode: AMode) -> Counters {
    if primes_seg.is_empty() {
        return Counters::default();
    }
    let spf = spf_sieve(y as usize);
    // Σ_{j=1}^{d-1} ζ^{jk} per index class k.
    let nonprincipal_orbit: Vec<Cyc> = (0..d)
        .map(|k| {
            let mut s = CYC_ZERO;
            for j in 1..d {
                s = s + cyclotomic::zeta_pow(d, (j * k) % d);
            }
            s
        })
        .collect();
    const NO_INDEX: u8 = u8::MAX;

    let mut c = Counters::default();
    let mut index_of = vec![0u8; y as usize + 1];
    let mut class_counts = vec![0i64; d as usize];
    for &p in primes_seg {
        let e = (p - 1) / d;
        // Any element of exact order d labels the classes of d-th powers;
        // relabeling permutes the non-principal characters, which leaves
        // every accumulated quantity invariant.
        let h = order_d_element(p, d);
        let mut roots = [(0u64, 0u8); 6];
        let mut r = 1u64;
        for k in 0..d {
            roots[k as usize] = (r, k as u8);
            r = arith::mulmod(r, h, p);
        }
        let class_of = |v: u64| -> u8 {
            roots[..d as usize]
                .iter()
                .find(|&&(root, _)| root == v)
                .expect("d-th power lands on a root of unity")
                .1
        };

        // index_of[a] = class of a^{(p-1)/d} mod p, NO_INDEX at multiples of
        // p; extended multiplicatively from prime values via the SPF table.
        index_of[1] = 0;
        #[allow(clippy::needless_range_loop)]
        for a in 2..=y as usize {
            let s = spf[a] as usize;
            if s == a {
                let r = a as u64 % p;
                index_of[a] = if r == 0 {
                    NO_INDEX
                } else {
                    class_of(powmod(r, e, p))
                };
            } else {
                let (ia, ib) = (index_of[s], index_of[a / s]);
                index_of[a] = if ia == NO_INDEX || ib == NO_INDEX {
                    NO_INDEX
                } else {
                    (ia + ib) % d as u8
                };
            }
        }

        class_counts.fill(0);
        let mut coprime = 0i64;
        for (a, &k) in index_of.iter().enumerate().take(y as usize + 1).skip(2) {
            if a_mode == AMode::Nonsquare && is_square(a as i64) {
                continue;
            }
            if k != NO_INDEX {
                class_counts[k as usize] += 1;
                coprime += 1;
            }
        }
        c.principal += coprime;
        c.residue_hits += class_counts[0];
        for (k, &cnt) in class_counts.iter().enumerate() {
            let orbit = nonprincipal_orbit[k];
            c.pair = c.pair + Cyc::new(orbit.u * cnt, orbit.v * cnt);
        }
    }
    c
}

/// Some h = c^{(p−1)/d} of exact multiplicative order d mod p.
fn order_d_element(p: u64, d: u64) -> u64 {
    let e = (p - 1) / d;
    let mut c = 2u64;
    loop {
        let h = powmod(c, e, p);
        let full_order = h != 1
            && match d {
                2 | 3 => true,
                4 => mulmod_sq(h, p) != 1,
                6 => mulmod_sq(h, p) != 1 && powmod(h, 3, p) != 1,
                _ => unreachable!("unsupported order {d}"),
            };
        if full_order {
            return h;
        }
        c += 1;
    }
}

#[inline]
fn mulmod_sq(h: u64, p: u64) -> u64 {
    arith::mulmod(h, h, p)
}

/// Hooley's conditional main term ε(d)/(d·φ(d)) · li(x).
pub fn hooley_main_term(a: i64, d: u64, x: f64) -> Result<f64> {
    let eps = arith::epsilon_d(a, d)?;
    let phi = arith::euler_phi(d);
    Ok(eps as f64 / (d * phi) as f64 * arith::li(x)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: search for b with b^d ≡ a (mod p).
    fn residue_by_search(a: u64, p: u64, d: u64) -> bool {
        (1..p).any(|b| powmod(b, d, p) == a % p)
    }

    #[test]
    fn dth_power_residue_examples() {
        assert!(is_dth_power_residue(4, 7, 2).unwrap());
        assert!(!is_dth_power_residue(2, 13, 2).unwrap());
        assert!(is_dth_power_residue(2, 31, 3).unwrap());
        assert!(is_dth_power_residue(14, 7, 2).is_err());
    }

    #[test]
    fn criterion_matches_search_oracle() {
        for d in [2u64, 3, 4, 6] {
            for p in primes::primes_in(3, 200) {
                if (p - 1) % d != 0 {
                    continue;
                }
                for a in 1..p {
                    assert_eq!(
                        is_dth_power_residue(a as i64, p, d).unwrap(),
                        residue_by_search(a, p, d),
                        "a={a} p={p} d={d}"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_case_reduces_to_jacobi() {
        for p in primes::primes_in(3, 500) {
            for a in 1..p {
                assert_eq!(
                    is_dth_power_residue(a as i64, p, 2).unwrap(),
                    arith::jacobi(a as i64, p).unwrap() == 1,
                    "a={a} p={p}"
                );
            }
        }
    }

    #[test]
    fn count_p_examples() {
        assert_eq!(count_p(2, 2, 100), 11);
        assert_eq!(count_p(2, 3, 100), 2);
        for (a, d) in [(5i64, 2u64), (7, 3), (10, 4)] {
            assert_eq!(count_p(a, d, 2), 0);
        }
    }

    #[test]
    fn count_p_2_2_is_pm1_mod_8() {
        // 2 is a QR mod p exactly for p ≡ ±1 (mod 8).
        let by_residue = primes::primes_in(3, 101)
            .into_iter()
            .filter(|&p| p % 8 == 1 || p % 8 == 7)
            .count() as u64;
        assert_eq!(count_p(2, 2, 100), by_residue);
    }

    #[test]
    fn mean_value_matches_direct_summation_of_count_p() {
        let r = mean_value(2, 100, 50, AMode::All, MeanMode::Character).unwrap();
        let direct: u64 = (2..=50).map(|a| count_p(a, 2, 100)).sum();
        assert_eq!(r.n, direct as i64);
        assert!((r.s - direct as f64 / 50.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_mean_value_is_zero() {
        let r = mean_value(2, 3, 2, AMode::All, MeanMode::Character).unwrap();
        assert_eq!(r.n, 0);
        assert_eq!(r.s, 0.0);
        assert_eq!(count_p(2, 2, 3), 0);
    }

    #[test]
    fn character_and_direct_modes_agree_exactly() {
        for d in [2u64, 3, 4, 6] {
            for (x, y) in [(200u64, 40u64), (500, 97), (1000, 60)] {
                for a_mode in [AMode::All, AMode::Nonsquare] {
                    let c = mean_value(d, x, y, a_mode, MeanMode::Character).unwrap();
                    let dr = mean_value(d, x, y, a_mode, MeanMode::Direct).unwrap();
                    assert_eq!((c.n, c.n1, c.n2), (dr.n, dr.n1, dr.n2), "d={d} x={x} y={y}");
                    assert_eq!(d as i64 * c.n, c.n1 + c.n2);
                }
            }
        }
    }

    #[test]
    fn decomposition_identity_holds() {
        let r = mean_value(2, 2000, 150, AMode::All, MeanMode::Character).unwrap();
        assert!((r.s - (r.s1 + r.s2)).abs() <= 1e-9 * r.s.abs().max(1.0));
        assert!(r.s >= 0.0 && r.s <= primes::pi(2000) as f64);
    }

    #[test]
    fn s1_stays_near_half_pi() {
        // S1 = π(x)/2 + O(log log x + π(x)/y) at (x, y) = (10⁴, 10³).
        let r = mean_value(2, 10_000, 1000, AMode::All, MeanMode::Character).unwrap();
        let pi_x = primes::pi(10_000) as f64;
        let slack = (10_000f64).ln().ln() + pi_x / 1000.0 + 2.0;
        assert!(
            (r.s1 - pi_x / 2.0).abs() <= slack,
            "s1={} π/2={}",
            r.s1,
            pi_x / 2.0
        );
    }

    #[test]
    fn fallback_for_unsupported_order() {
        let r = mean_value(5, 500, 40, AMode::All, MeanMode::Character).unwrap();
        let direct: u64 = (2..=40).map(|a| count_p(a, 5, 500)).sum();
        assert_eq!(r.n, direct as i64);
    }

    #[test]
    fn hooley_main_term_values() {
        let v = hooley_main_term(2, 2, 100.0).unwrap();
        assert!((v - 0.5 * arith::li(100.0).unwrap()).abs() < 1e-12);
        assert!((v - 15.06).abs() < 0.01);
        let v = hooley_main_term(5, 10, 100.0).unwrap();
        assert!((v - 2.0 / 40.0 * arith::li(100.0).unwrap()).abs() < 1e-12);
        let v = hooley_main_term(3, 3, 1e6).unwrap();
        assert!((v - arith::li(1e6).unwrap() / 6.0).abs() < 1e-9);
        assert!(hooley_main_term(9, 2, 100.0).is_err());
    }
}
