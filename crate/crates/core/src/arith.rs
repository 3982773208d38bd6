//! Exact multiplicative-arithmetic kernels shared by every other module.
//!
//! All modular arithmetic keeps operands below 2⁶³ and widens through u128
//! for products, so the hot loops never touch big integers.

use crate::{Error, Result};

/// (a · b) mod n via a widening product.
#[inline(always)]
pub fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// a^e mod n by binary exponentiation; powmod(_, 0, n) = 1 mod n.
pub fn powmod(a: u64, e: u64, n: u64) -> u64 {
    debug_assert!(n >= 1);
    if n == 1 {
        return 0;
    }
    let mut base = a % n;
    let mut exp = e;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, n);
        }
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduce a signed integer to its canonical residue mod n.
#[inline]
pub fn reduce(a: i64, n: u64) -> u64 {
    (a.rem_euclid(n as i64)) as u64
}

/// Jacobi symbol (a/n) for odd n ≥ 1; equals the Legendre symbol for prime n.
///
/// Computed by the binary algorithm (quadratic reciprocity plus the
/// supplement for 2), so a single evaluation costs O(log² n) word ops.
pub fn jacobi(a: i64, n: u64) -> Result<i32> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenModulus(n));
    }
    Ok(jacobi_reduced(reduce(a, n), n))
}

/// Jacobi symbol with 0 ≤ a < n already reduced and n odd.
#[inline]
pub fn jacobi_reduced(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut t = 1i32;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z & 1 == 1 {
            let r = n & 7;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for arbitrary integers.
///
/// Convention: (a/0) = 1 iff a = ±1 else 0; (a/−1) = −1 iff a < 0;
/// (a/2) = 0 for even a and (−1)^((a²−1)/8) for odd a; multiplicative in n.
/// This is the standard extension, and the one used to realize real
/// characters (D/·) for fundamental discriminants D of either sign.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut t = 1i32;
    let mut n_abs;
    if n < 0 {
        if a < 0 {
            t = -t;
        }
        n_abs = n.unsigned_abs();
    } else {
        n_abs = n as u64;
    }
    // Factor out 2s from n using the supplement (a/2).
    let z = n_abs.trailing_zeros();
    if z > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n_abs >>= z;
        if z & 1 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                t = -t;
            }
        }
    }
    if n_abs == 1 {
        return t;
    }
    t * jacobi_reduced(reduce(a, n_abs), n_abs)
}

/// True iff a is a perfect square (never true for negative a).
pub fn is_square(a: i64) -> bool {
    if a < 0 {
        return false;
    }
    let r = (a as f64).sqrt() as i64;
    for s in r.saturating_sub(1)..=r + 1 {
        if s * s == a {
            return true;
        }
    }
    false
}

/// The two canonical square-part factorizations of a positive integer.
///
/// `a = l_sf · sq²` with `l_sf` squarefree, and `a = core_l² · core_m` with
/// `core_m` squarefree.  Componentwise these coincide (core_l = sq,
/// core_m = l_sf); both namings are kept because the two roles are used in
/// different sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquarePartDecomposition {
    pub a: u64,
    /// Squarefree part: a = l_sf · sq².
    pub l_sf: u64,
    /// Square root of the square part.
    pub sq: u64,
    /// a = core_l² · core_m with core_m squarefree.
    pub core_l: u64,
    pub core_m: u64,
}

/// Decompose a ≥ 1 by trial division.
pub fn square_part(a: u64) -> SquarePartDecomposition {
    debug_assert!(a >= 1);
    let mut l_sf = 1u64;
    let mut sq = 1u64;
    for (p, e) in factorize(a) {
        if e % 2 == 1 {
            l_sf *= p;
        }
        sq *= p.pow(e / 2);
    }
    SquarePartDecomposition {
        a,
        l_sf,
        sq,
        core_l: sq,
        core_m: l_sf,
    }
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function μ(a).
pub fn mobius(a: u64) -> i32 {
    debug_assert!(a >= 1);
    let mut m = 1i32;
    for (_, e) in factorize(a) {
        if e >= 2 {
            return 0;
        }
        m = -m;
    }
    m
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = 1u64;
    for (p, e) in factorize(n) {
        phi *= (p - 1) * p.pow(e - 1);
    }
    phi
}

/// Smallest-prime-factor table for [0, n]; spf[0] = spf[1] = 0.
///
/// Used to evaluate completely multiplicative data on a whole interval with
/// one multiplication per entry.
pub fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// μ(a) for all a in [0, n] via a squared-divisor sieve.
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    let spf = spf_sieve(n);
    let mut mu = vec![0i8; n + 1];
    if n >= 1 {
        mu[1] = 1;
    }
    for a in 2..=n {
        let p = spf[a] as usize;
        let rest = a / p;
        mu[a] = if rest.is_multiple_of(p) { 0 } else { -mu[rest] };
    }
    mu
}

/// ε(d) from the main-term constant: 2 iff l ≡ 1 (mod 4) and 2l | d, where
/// l is the squarefree part of a; otherwise 1.
///
/// Rejects square a and a = −1 (the standing assumption on the base is a
/// correctness precondition, not a convention), and non-squarefree d.
pub fn epsilon_d(a: i64, d: u64) -> Result<u8> {
    if a == -1 || is_square(a) {
        return Err(Error::ExcludedBase(a));
    }
    if mobius(d) == 0 {
        return Err(Error::NotSquarefree(d));
    }
    let dec = square_part(a.unsigned_abs());
    let l = if a < 0 {
        -(dec.l_sf as i64)
    } else {
        dec.l_sf as i64
    };
    let two_l = 2 * l.unsigned_abs();
    if l.rem_euclid(4) == 1 && d.is_multiple_of(two_l) {
        Ok(2)
    } else {
        Ok(1)
    }
}

/// Deterministic Miller–Rabin for u64 (the 7-base certificate).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest positive primitive root of an odd prime p.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let prime_factors: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    'candidate: for g in 2..p {
        for &q in &prime_factors {
            if powmod(g, (p - 1) / q, p) == 1 {
                continue 'candidate;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root")
}

/// Full index tables up to this modulus; baby-step giant-step beyond.
/// 2²⁰ keeps a table at or below 8 MiB.
const DLOG_TABLE_LIMIT: u64 = 1 << 20;

enum DlogBackend {
    /// table[a] = ind_g(a) for 1 ≤ a < p (entry 0 unused).
    Table(Vec<u32>),
    /// Baby steps g^j → j for j < m, with the giant stride g^{-m}.
    Bsgs {
        m: u64,
        baby: std::collections::HashMap<u64, u32>,
        giant: u64,
    },
}

/// Discrete logarithms to a fixed primitive root of a fixed prime.
pub struct DiscreteLog {
    p: u64,
    g: u64,
    backend: DlogBackend,
}

impl DiscreteLog {
    /// Build the index structure; verifies that g generates (ℤ/pℤ)*.
    pub fn new(p: u64, g: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        for (q, _) in factorize(p - 1) {
            if powmod(g, (p - 1) / q, p) == 1 {
                return Err(Error::Domain("g is not a primitive root"));
            }
        }
        let backend = if p <= DLOG_TABLE_LIMIT {
            let mut table = vec![0u32; p as usize];
            let mut a = 1u64;
            for k in 0..p - 1 {
                table[a as usize] = k as u32;
                a = mulmod(a, g, p);
            }
            DlogBackend::Table(table)
        } else {
            let m = (p as f64).sqrt().ceil() as u64 + 1;
            let mut baby = std::collections::HashMap::with_capacity(m as usize);
            let mut a = 1u64;
            for j in 0..m {
                baby.entry(a).or_insert(j as u32);
                a = mulmod(a, g, p);
            }
            // g^{-m} = g^{(p-1-m) mod (p-1)}
            let giant = powmod(g, p - 1 - (m % (p - 1)), p);
            DlogBackend::Bsgs { m, baby, giant }
        };
        Ok(DiscreteLog { p, g, backend })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// k in [0, p−1) with g^k ≡ a (mod p); rejects a ≡ 0.
    pub fn log(&self, a: i64) -> Result<u64> {
        let a = reduce(a, self.p);
        if a == 0 {
            return Err(Error::ZeroResidue { a: 0, p: self.p });
        }
        match &self.backend {
            DlogBackend::Table(t) => Ok(t[a as usize] as u64),
            DlogBackend::Bsgs { m, baby, giant } => {
                let mut gamma = a;
                for i in 0..*m {
                    if let Some(&j) = baby.get(&gamma) {
                        return Ok((i * m + j as u64) % (self.p - 1));
                    }
                    gamma = mulmod(gamma, *giant, self.p);
                }
                unreachable!("BSGS covers the whole group")
            }
        }
    }
}

/// One-shot discrete log; builds the table or BSGS structure internally.
pub fn discrete_log(p: u64, g: u64, a: i64) -> Result<u64> {
    DiscreteLog::new(p, g)?.log(a)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Logarithmic integral li(x) = PV ∫₀^x dt/log t, x > 1.
///
/// Evaluated by the rapidly convergent Ramanujan series
/// li(x) = γ + ln ln x + √x Σ_{n≥1} (−1)^{n−1} (ln x)^n / (n! 2^{n−1})
///         · Σ_{k≤(n−1)/2} 1/(2k+1),
/// with [`li_quadrature`] as an independent cross-check.  Relative accuracy
/// is better than 1e−12 for x up to 10¹².  The principal-value integral
/// diverges at x = 1, so x ≤ 1 is rejected.
pub fn li(x: f64) -> Result<f64> {
    if x <= 1.0 {
        return Err(Error::Domain("li(x) requires x > 1"));
    }
    let lx = x.ln();
    let mut sum = 0.0f64;
    let mut term = 1.0f64; // (ln x)^n / (n! 2^{n-1}) without the sign
    let mut odd_harmonic = 0.0f64;
    for n in 1..=200u32 {
        term *= lx / n as f64;
        if n > 1 {
            term /= 2.0;
        }
        if n % 2 == 1 {
            odd_harmonic += 1.0 / n as f64;
        }
        let contrib = if n % 2 == 1 {
            term * odd_harmonic
        } else {
            -term * odd_harmonic
        };
        sum += contrib;
        if term.abs() * odd_harmonic < 1e-17 * sum.abs().max(1.0) && n as f64 > lx {
            break;
        }
    }
    Ok(EULER_GAMMA + lx.ln() + x.sqrt() * sum)
}

/// li(x) by principal-value quadrature; the series' independent oracle.
///
/// The symmetric singularity at t = 1 cancels: PV ∫₀² dt/ln t
/// = ∫₀¹ (1/ln(1+u) + 1/ln(1−u)) du with a smooth integrand, and the rest
/// of the range is regular.
pub fn li_quadrature(x: f64) -> Result<f64> {
    if x <= 1.0 {
        return Err(Error::Domain("li(x) requires x > 1"));
    }
    let sym = |u: f64| -> f64 {
        if u == 0.0 {
            1.0
        } else if u >= 1.0 {
            1.0 / (1.0 + u).ln()
        } else {
            1.0 / (1.0 + u).ln() + 1.0 / (1.0 - u).ln()
        }
    };
    if x <= 2.0 {
        // PV over [0, x] with the reflection confined to [2−x, x].
        let a = 2.0 - x;
        let reg = adaptive_simpson(&|t: f64| 1.0 / t.ln(), 1e-13, 0.0, a);
        let refl = adaptive_simpson(&sym, 1e-13, 0.0, x - 1.0);
        return Ok(reg + refl);
    }
    let li2 = adaptive_simpson(&sym, 1e-13, 0.0, 1.0);
    let rest = adaptive_simpson(&|t: f64| 1.0 / t.ln(), 1e-13, 2.0, x);
    Ok(li2 + rest)
}

/// Adaptive Simpson with an absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, tol: f64, a: f64, b: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, fa, b, fb, fm);
    rec(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// Σ_{p ≤ x} 1/p, summed over primes in ascending order.
pub fn mertens_sum(x: f64) -> f64 {
    if x < 2.0 {
        return 0.0;
    }
    let hi = x.floor() as u64;
    let mut sum = 0.0f64;
    let range = crate::primes::PrimeRange::new(2, hi + 1);
    crate::primes::stream_primes(&range, |p| sum += 1.0 / p as f64).expect("valid range");
    sum
}
