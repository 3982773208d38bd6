//! Dirichlet characters of order dividing d for prime moduli, their partial
//! sums, and the mean-value statistics built on them.
//!
//! For p ≡ 1 (mod d) the d characters with χ^d = χ₀ are χ_j(a) =
//! e(j·ind_g(a)/d) for a generator g.  Values are kept as exact ℤ[ζ_d]
//! pairs (d ∈ {2, 3, 4, 6}), so partial-sum maxima, orthogonality tests and
//! statistic left-hand sides are integer computations; norms are taken once
//! at the end.

use rayon::prelude::*;

use crate::arith::{self, kronecker, mobius_sieve};
use crate::complex::Complex;
use crate::cyclotomic::{self, supported_order, Cyc, CYC_ZERO};
use crate::primes::{self, PrimeRange};
use crate::{Error, Result};

/// The d characters of order dividing d for a prime modulus p ≡ 1 (mod d).
pub struct CharacterTable {
    p: u64,
    d: u64,
    g: u64,
    /// ind_g(a) mod d for 1 ≤ a < p; entry 0 is a sentinel for p | a.
    ind_mod_d: Vec<u8>,
}

const NO_IND: u8 = u8::MAX;

/// Build the table for p prime and d | p − 1, d ∈ {2, 3, 4, 6}.
pub fn build_table(p: u64, d: u64) -> Result<CharacterTable> {
    if !supported_order(d) {
        return Err(Error::Domain("character order must be one of 2, 3, 4, 6"));
    }
    if !arith::is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    if !(p - 1).is_multiple_of(d) {
        return Err(Error::OrderDoesNotDivide { d, p });
    }
    let g = arith::primitive_root(p)?;
    let mut ind_mod_d = vec![NO_IND; p as usize];
    let mut a = 1u64;
    for t in 0..p - 1 {
        ind_mod_d[a as usize] = (t % d) as u8;
        a = arith::mulmod(a, g, p);
    }
    Ok(CharacterTable { p, d, g, ind_mod_d })
}

impl CharacterTable {
    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn order(&self) -> u64 {
        self.d
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// ind_g(a) mod d, or None when p | a.
    pub fn index_of(&self, a: i64) -> Option<u8> {
        let r = arith::reduce(a, self.p) as usize;
        match self.ind_mod_d[r] {
            NO_IND => None,
            k => Some(k),
        }
    }

    /// χ_j(a) as an exact ℤ[ζ_d] pair; zero at multiples of p.
    pub fn chi_exact(&self, j: u64, a: i64) -> Cyc {
        match self.index_of(a) {
            None => CYC_ZERO,
            Some(k) => cyclotomic::zeta_pow(self.d, (j % self.d) * k as u64),
        }
    }

    /// χ_j(a) embedded in ℂ.
    pub fn chi(&self, j: u64, a: i64) -> Complex {
        self.chi_exact(j, a).to_complex(self.d)
    }

    /// The d-th root of unity ζ_d^k, exact and embedded.
    pub fn unit_root_pow(&self, k: u64) -> (Cyc, Complex) {
        let c = cyclotomic::zeta_pow(self.d, k);
        (c, c.to_complex(self.d))
    }
}

/// (1/d)·Σ_{χ^d = χ₀} χ(a) ∈ {0, 1}, computed in exact pair arithmetic.
///
/// 1 exactly when a is a d-th power residue; rejects p | a.
pub fn orthogonality_indicator(table: &CharacterTable, a: i64) -> Result<u8> {
    let r = arith::reduce(a, table.p);
    if r == 0 {
        return Err(Error::ZeroResidue {
            a: r as i64,
            p: table.p,
        });
    }
    let mut sum = CYC_ZERO;
    for j in 0..table.d {
        sum = sum + table.chi_exact(j, a);
    }
    debug_assert!(sum.v == 0 && (sum.u == 0 || sum.u == table.d as i64));
    Ok(if sum.u == table.d as i64 { 1 } else { 0 })
}

/// Σ_{M < n ≤ M+N} χ_j(n) as an exact pair (non-principal j only).
pub fn char_partial_sum(table: &CharacterTable, j: u64, m_start: u64, n_len: u64) -> Result<Cyc> {
    if j.is_multiple_of(table.d) {
        return Err(Error::Domain(
            "partial sums are for non-principal characters",
        ));
    }
    let p = table.p;
    let pref = prefix_sums(table, j);
    let eval = |t: u64| -> Cyc {
        // Σ_{n ≤ t} = (full periods)·pref[p] + pref[t mod p]; pref[p] = 0
        // for non-principal characters but is carried for transparency.
        let full = (t / p) as i64;
        let head = pref[p as usize];
        pref[(t % p) as usize] + Cyc::new(head.u * full, head.v * full)
    };
    Ok(eval(m_start + n_len) - eval(m_start))
}

/// pref[t] = Σ_{n ≤ t} χ_j(n) for 0 ≤ t ≤ p.
fn prefix_sums(table: &CharacterTable, j: u64) -> Vec<Cyc> {
    let p = table.p as usize;
    let mut pref = Vec::with_capacity(p + 1);
    pref.push(CYC_ZERO);
    let mut acc = CYC_ZERO;
    for n in 1..=p {
        acc = acc + table.chi_exact(j, n as i64);
        pref.push(acc);
    }
    pref
}

/// Outcome of the exhaustive partial-sum maximum for one (p, d).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaVinogradov {
    /// max |Σ_{M<n≤M+N} χ| / (6√p·log p) over non-principal χ and all (M, N).
    pub max_ratio: f64,
    /// (j, M, N) attaining the maximum.
    pub witness: (u64, u64, u64),
    /// The maximal |sum|² as an exact integer.
    pub max_norm_sq: i64,
}

/// Exhaustive check of the 6√q·log q partial-sum bound for the table of
/// order-d characters mod p.
///
/// Every window sum is a difference of the prefix walk, so one character
/// costs O(p) space and a pass over index pairs.
pub fn polya_vinogradov_check(p: u64, d: u64) -> Result<PolyaVinogradov> {
    let table = build_table(p, d)?;
    let mut best: i64 = -1;
    let mut witness = (0u64, 0u64, 0u64);
    for j in 1..d {
        let pref = prefix_sums(&table, j);
        debug_assert_eq!(pref[p as usize], CYC_ZERO);
        let (norm, s, t) = if d == 2 {
            // Real-valued walk: the pairwise maximum is (max − min)².
            let mut min_i = 0usize;
            let mut max_i = 0usize;
            for (i, c) in pref.iter().enumerate().take(p as usize) {
                if c.u < pref[min_i].u {
                    min_i = i;
                }
                if c.u > pref[max_i].u {
                    max_i = i;
                }
            }
            let diff = pref[max_i].u - pref[min_i].u;
            (diff * diff, min_i.min(max_i), min_i.max(max_i))
        } else {
            let mut best_pair = (0i64, 0usize, 0usize);
            for s in 0..p as usize {
                let cs = pref[s];
                for (off, ct) in pref[s + 1..p as usize].iter().enumerate() {
                    let n = (*ct - cs).norm_sq(d);
                    if n > best_pair.0 {
                        best_pair = (n, s, s + 1 + off);
                    }
                }
            }
            best_pair
        };
        if norm > best {
            best = norm;
            witness = (j, s as u64, (t - s) as u64);
        }
    }
    let bound = 6.0 * (p as f64).sqrt() * (p as f64).ln();
    Ok(PolyaVinogradov {
        max_ratio: (best.max(0) as f64).sqrt() / bound,
        witness,
        max_norm_sq: best.max(0),
    })
}

/// The worst case over all primes p ≤ cap and orders d | p−1, d ∈ {2,3,4,6}.
#[derive(Debug, Clone, Copy)]
pub struct PolyaScan {
    pub worst_ratio: f64,
    pub p: u64,
    pub d: u64,
    pub witness: (u64, u64, u64),
    /// Number of (p, d) tables checked.
    pub tables: u64,
}

pub fn polya_vinogradov_scan(cap: u64) -> PolyaScan {
    let odd_primes = primes::primes_in(3, cap + 1);
    let mut cases = Vec::new();
    for &p in &odd_primes {
        for d in [2u64, 3, 4, 6] {
            if (p - 1) % d == 0 {
                cases.push((p, d));
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(p, d)| {
            let r = polya_vinogradov_check(p, d).expect("valid (p, d)");
            (r.max_ratio, p, d, r.witness)
        })
        .reduce(
            || (-1.0f64, 0u64, 0u64, (0u64, 0u64, 0u64)),
            |a, b| if a.0 >= b.0 { a } else { b },
        );
    PolyaScan {
        worst_ratio: worst.0,
        p: worst.1,
        d: worst.2,
        witness: worst.3,
        tables: cases.len() as u64,
    }
}

/// Which set of real characters (D/·) the Jutila statistic ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DConvention {
    /// Fundamental discriminants D ≠ 1 of either sign (primitive real
    /// characters, one per conductor).
    Fundamental,
    /// Every non-square D ≠ 0 of either sign; characters repeat with
    /// multiplicity under this reading.
    AllNonsquare,
}

impl DConvention {
    pub fn label(self) -> &'static str {
        match self {
            DConvention::Fundamental => "fundamental",
            DConvention::AllNonsquare => "all-nonsquare",
        }
    }
}

/// True for fundamental discriminants: D ≡ 1 (mod 4) squarefree and D ≠ 1,
/// or D = 4m with m ≡ 2, 3 (mod 4) squarefree.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let sf = |n: i64| arith::mobius(n.unsigned_abs()) != 0;
    if d.rem_euclid(4) == 1 {
        return sf(d);
    }
    if d.rem_euclid(4) == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && sf(m);
    }
    false
}

/// The D values with |D| ≤ x under a convention.
pub fn jutila_d_values(x: u64, convention: DConvention) -> Vec<i64> {
    let x = x as i64;
    let keep = |d: i64| match convention {
        DConvention::Fundamental => is_fundamental_discriminant(d),
        DConvention::AllNonsquare => d != 0 && !arith::is_square(d),
    };
    (-x..=x).filter(|&d| keep(d)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JutilaResult {
    /// Σ_D |Σ_{n ≤ Y} (D/n)|².
    pub lhs: f64,
    /// lhs / (X·Y·log²X).
    pub bound_ratio: f64,
    /// Number of characters (D values) summed.
    pub characters: u64,
}

/// Mean square of character sums Σ_{n≤Y} (D/n) over real characters with
/// |D| ≤ X, against the X·Y·log²X envelope.
pub fn jutila_statistic(x: u64, y: u64, convention: DConvention) -> JutilaResult {
    let ds = jutila_d_values(x, convention);
    // Inner sums are integers bounded by Y, their squares by Y²; the f64
    // total of ≤ 2X such integers stays exact well past the sweep scales.
    let lhs: f64 = ds
        .par_iter()
        .map(|&d| {
            let s: i64 = (1..=y as i64).map(|n| kronecker(d, n) as i64).sum();
            (s * s) as f64
        })
        .sum();
    let lx = (x as f64).ln();
    let bound = x as f64 * y as f64 * lx * lx;
    JutilaResult {
        lhs,
        bound_ratio: lhs / bound,
        characters: ds.len() as u64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeSieveResult {
    /// Σ_q Σ_{χ^k=χ₀, χ≠χ₀} |Σ_m a_m χ(m)|², exact-then-normed.
    pub lhs: f64,
    /// min{Q^{5/3}+M, Q^{4/3}+Q^{1/2}M, Q^{11/9}+Q^{2/3}M,
    ///     Q+Q^{1/3}M^{5/3}+M^{12/5}} · Σ|a_m|².
    pub envelope: f64,
    /// lhs / envelope; report-only (the inequality's constant is
    /// ε-dependent and unspecified).
    pub ratio: f64,
    pub moduli: u64,
}

/// Mean square of coefficient-weighted order-k character sums over prime
/// moduli q ∈ (Q, 2Q], q ≡ 1 (mod k), with coefficients on squarefree
/// m ∈ (M, 2M].
pub fn large_sieve_statistic(
    q_cap: u64,
    m_cap: u64,
    k: u64,
    coeffs: &[(u64, i64)],
) -> Result<LargeSieveResult> {
    if !matches!(k, 3 | 4 | 6) {
        return Err(Error::Domain("large-sieve order k must be 3, 4 or 6"));
    }
    let mu = mobius_sieve(2 * m_cap as usize);
    let mut seen = std::collections::HashSet::new();
    for &(m, _) in coeffs {
        if m <= m_cap || m > 2 * m_cap {
            return Err(Error::Domain("coefficient support must lie in (M, 2M]"));
        }
        if mu[m as usize] == 0 {
            return Err(Error::NotSquarefree(m));
        }
        if !seen.insert(m) {
            return Err(Error::Domain("duplicate coefficient index"));
        }
    }
    let moduli: Vec<u64> = primes::primes_in(q_cap + 1, 2 * q_cap + 1)
        .into_iter()
        .filter(|&q| (q - 1) % k == 0)
        .collect();
    let lhs_exact: i128 = moduli
        .par_iter()
        .map(|&q| {
            let table = build_table(q, k).expect("q ≡ 1 (mod k) prime");
            let mut total = 0i128;
            for j in 1..k {
                let mut s = CYC_ZERO;
                for &(m, a) in coeffs {
                    let chi = table.chi_exact(j, m as i64);
                    s = s + Cyc::new(chi.u * a, chi.v * a);
                }
                total += s.norm_sq(k) as i128;
            }
            total
        })
        .sum();
    let sum_sq: f64 = coeffs.iter().map(|&(_, a)| (a * a) as f64).sum();
    let q = q_cap as f64;
    let m = m_cap as f64;
    let envelope = [
        q.powf(5.0 / 3.0) + m,
        q.powf(4.0 / 3.0) + q.sqrt() * m,
        q.powf(11.0 / 9.0) + q.powf(2.0 / 3.0) * m,
        q + q.powf(1.0 / 3.0) * m.powf(5.0 / 3.0) + m.powf(12.0 / 5.0),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
        * sum_sq;
    let lhs = lhs_exact as f64;
    Ok(LargeSieveResult {
        lhs,
        envelope,
        ratio: lhs / envelope,
        moduli: moduli.len() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeCharSum {
    pub sum_exact: Cyc,
    pub sum: Complex,
    /// |Σ_{p ≤ X} χ(p)| / (X^{1/2}·log(qX)); report-only (the bound this is
    /// measured against is conditional).
    pub grh_ratio: f64,
    pub primes: u64,
}

/// Σ_{p ≤ X} χ_j(p) with its normalized size.
pub fn prime_char_sum_statistic(table: &CharacterTable, j: u64, x: u64) -> Result<PrimeCharSum> {
    if j.is_multiple_of(table.d) {
        return Err(Error::Domain("prime sums are for non-principal characters"));
    }
    let mut s = CYC_ZERO;
    let mut n = 0u64;
    if x >= 2 {
        primes::stream_primes(&PrimeRange::new(2, x + 1), |p| {
            s = s + table.chi_exact(j, p as i64);
            n += 1;
        })?;
    }
    let sum = s.to_complex(table.d);
    let denom = (x.max(2) as f64).sqrt() * ((table.p * x.max(2)) as f64).ln();
    Ok(PrimeCharSum {
        sum_exact: s,
        sum,
        grh_ratio: sum.abs() / denom,
        primes: n,
    })
}
