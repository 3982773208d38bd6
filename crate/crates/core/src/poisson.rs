//! The squarefree-indicator split μ² = M_z + R_z, the Poisson-summation
//! identity for window-weighted quadratic-symbol sums, and the smoothed
//! mean value built from both.
//!
//! The identity evaluated by [`poisson_identity_check`] is, for odd k,
//!
//!   Σ_{(d,2)=1} M_z(d)·(d/k)·Φ(d/X)
//!     = (X/2k)·(2/k)·Σ_{α ≤ z, (α,2k)=1} (μ(α)/α²)
//!         · Σ_m (−1)^m·G_m(k)·Φ̃(mX/(2α²k)).
//!
//! Both sides are computed independently: the left as a finite sum over the
//! window support, the right through the Gauss-sum table and the Filon
//! transform, with the m-tail certified from the window's derivative
//! variations before truncation.

use rayon::prelude::*;

use crate::arith::{self, is_square, jacobi_reduced, mobius, powmod, spf_sieve};
use crate::gauss::g_with_factors;
use crate::primes;
use crate::window::SmoothWindow;
use crate::{Error, Result};

/// M_z(a) = Σ_{l² | a, l ≤ z} μ(l).
pub fn m_z(a: u64, z: f64) -> Result<i64> {
    if a < 1 || z < 1.0 {
        return Err(Error::Domain("M_z needs a ≥ 1 and z ≥ 1"));
    }
    Ok(square_divisor_mobius_sum(a, |l| (l as f64) <= z))
}

/// R_z(a) = Σ_{l² | a, l > z} μ(l); M_z + R_z = μ² exactly.
pub fn r_z(a: u64, z: f64) -> Result<i64> {
    if a < 1 || z < 1.0 {
        return Err(Error::Domain("R_z needs a ≥ 1 and z ≥ 1"));
    }
    Ok(square_divisor_mobius_sum(a, |l| (l as f64) > z))
}

fn square_divisor_mobius_sum(a: u64, keep: impl Fn(u64) -> bool) -> i64 {
    let mut total = 0i64;
    let mut l = 1u64;
    while l * l <= a {
        if a.is_multiple_of(l * l) && keep(l) {
            total += mobius(l) as i64;
        }
        l += 1;
    }
    total
}

/// The odd squarefree integers in [y, 2y] (the averaging set D(Y)).
pub fn odd_squarefree_window(y: u64) -> Vec<u64> {
    debug_assert!(y >= 1);
    let lo = y;
    let hi = 2 * y;
    let mut squarefree = vec![true; (hi - lo + 1) as usize];
    let mut l = 2u64;
    while l * l <= hi {
        let step = l * l;
        let mut v = lo.div_ceil(step) * step;
        while v <= hi {
            squarefree[(v - lo) as usize] = false;
            v += step;
        }
        l += 1;
    }
    (lo..=hi)
        .filter(|&d| d % 2 == 1 && squarefree[(d - lo) as usize])
        .collect()
}

/// Both sides of the Poisson identity with the truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / max(1, |lhs|).
    pub rel_err: f64,
    /// Frequency cutoff actually used.
    pub m_cap: i64,
    /// Smallest cutoff meeting the 1e−9·max(1, |lhs|) tail criterion.
    pub m_cap_required: i64,
    /// Certified bound on the神 neglected tail.
    pub tail_bound: f64,
}

/// Relative tail criterion for the frequency cutoff.
const TAIL_REL: f64 = 1e-9;

/// Smallest m_cap whose certified tail stays below tol.
fn minimal_m_cap(k: u64, x: f64, z: f64, window: &SmoothWindow, tol: f64) -> (i64, f64) {
    let alphas = admissible_alphas(k, z);
    let tail_at = |m_cap: i64| -> f64 {
        let mut total = 0.0;
        for &(alpha, _) in &alphas {
            let step = x / (2.0 * (alpha * alpha) as f64 * k as f64);
            let weight = x / (2.0 * k as f64) / (alpha * alpha) as f64 * k as f64;
            total += weight * 2.0 * window.tilde_tail_bound(step, (m_cap + 1) as f64);
        }
        total
    };
    let mut lo = 1i64;
    let mut hi = 2i64;
    while tail_at(hi) > tol {
        hi *= 2;
        if hi > (1 << 34) {
            break;
        }
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail_at(mid) <= tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    (lo, tail_at(lo))
}

/// α ≤ z, odd, squarefree, coprime to k, with μ(α).
fn admissible_alphas(k: u64, z: f64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    let mut alpha = 1u64;
    while (alpha as f64) <= z {
        if alpha % 2 == 1 && arith::gcd(alpha, k) == 1 {
            let mu = mobius(alpha) as i64;
            if mu != 0 {
                out.push((alpha, mu));
            }
        }
        alpha += 1;
    }
    out
}

/// Check the identity for odd k ≥ 1 at window scale X ≥ 8 and cutoff z ≥ 1.
///
/// `m_cap = None` uses the certified minimal cutoff; an explicit cutoff
/// below it is rejected.
pub fn poisson_identity_check(
    k: u64,
    x: f64,
    z: f64,
    window: &SmoothWindow,
    m_cap: Option<i64>,
) -> Result<PoissonIdentity> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenModulus(k));
    }
    if x.is_nan() || x < 8.0 || z < 1.0 {
        return Err(Error::Domain("identity check needs X ≥ 8 and z ≥ 1"));
    }

    // Left side: finite over the window support (X, 2X).
    let d_lo = (x.floor() as u64 + 1) | 1;
    let d_hi = (2.0 * x).ceil() as u64;
    let mut lhs = 0.0f64;
    let mut d = d_lo;
    while d < d_hi {
        let mz = square_divisor_mobius_sum(d, |l| (l as f64) <= z);
        if mz != 0 {
            let sym = jacobi_reduced(d % k.max(1), k);
            if sym != 0 {
                lhs += (mz * sym as i64) as f64 * window.eval(d as f64 / x);
            }
        }
        d += 2;
    }

    let tol = TAIL_REL * lhs.abs().max(1.0);
    let (required, _) = minimal_m_cap(k, x, z, window, tol);
    let used = match m_cap {
        None => required,
        Some(cap) if cap < required => {
            return Err(Error::CutoffTooSmall {
                given: cap,
                required,
            });
        }
        Some(cap) => cap,
    };

    // Right side through Gauss sums and the window transform.
    let factors = arith::factorize(k);
    let two_over_k = jacobi_reduced(2 % k.max(1), k) as f64;
    let prefactor = x / (2.0 * k as f64) * two_over_k;
    let mut rhs = 0.0f64;
    let mut tail_bound = 0.0f64;
    for (alpha, mu) in admissible_alphas(k, z) {
        let step = x / (2.0 * (alpha * alpha) as f64 * k as f64);
        let weight = mu as f64 / (alpha * alpha) as f64;
        let mut inner = g_with_factors(&factors, 0).re * window.tilde(0.0);
        for m in 1..=used {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let g_pos = g_with_factors(&factors, m).re;
            if g_pos != 0.0 {
                inner += sign * g_pos * window.tilde(m as f64 * step);
            }
            let g_neg = g_with_factors(&factors, -m).re;
            if g_neg != 0.0 {
                inner += sign * g_neg * window.tilde(-(m as f64) * step);
            }
        }
        rhs += prefactor * weight * inner;
        tail_bound += (x / (2.0 * k as f64)) / (alpha * alpha) as f64
            * k as f64
            * 2.0
            * window.tilde_tail_bound(step, (used + 1) as f64);
    }

    Ok(PoissonIdentity {
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / lhs.abs().max(1.0),
        m_cap: used,
        m_cap_required: required,
        tail_bound,
    })
}

/// The smoothed average of P_{(8a,2)}(x) over odd squarefree a ≈ Y with its
/// full decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedMeanResult {
    pub x: u64,
    pub y: u64,
    /// Plateau-edge parameter actually used (default x^{1/8}·Y^{1/4}).
    pub u_param: f64,
    /// Squarefree-split cutoff actually used (default Y^{1/2}/(U·x^{1/4}),
    /// floored at 1).
    pub z: f64,
    /// S = (1/#D)·Σ μ²(a)·P_{(8a,2)}(x)·Φ(a/Y), from the Euler criterion.
    pub s: f64,
    /// Principal part of the character split.
    pub s1: f64,
    /// Non-principal part via quadratic symbols; S = S1 + S2.
    pub s2: f64,
    /// M_z part of S2 (S2 = S21 + S22).
    pub s21: f64,
    /// R_z part of S2.
    pub s22: f64,
    /// Square-frequency part of the Poisson form of S21.
    pub s_sq: f64,
    /// Non-square-frequency part; S_sq + S_nonsq ≈ S21.
    pub s_nonsq: f64,
    /// π(x)/2.
    pub main: f64,
    pub abs_error: f64,
    /// #D(Y).
    pub d_count: u64,
    /// |S21 − (S_sq + S_nonsq)|, limited by quadrature and the m-tails.
    pub poisson_resid: f64,
    /// Certified bound on the frequency tails dropped from S_sq + S_nonsq.
    pub poisson_tail_bound: f64,
}

/// Compute the smoothed mean two ways (Euler-criterion counts and the
/// quadratic-symbol split) plus the Poisson-side square/non-square split.
pub fn smoothed_mean(
    x: u64,
    y: u64,
    u_override: Option<f64>,
    z_override: Option<f64>,
) -> Result<SmoothedMeanResult> {
    if x < 3 {
        return Err(Error::Domain("smoothed mean needs x ≥ 3"));
    }
    if y < 16 {
        return Err(Error::Domain("smoothed mean needs Y ≥ 16"));
    }
    let u_default = (x as f64).powf(0.125) * (y as f64).powf(0.25);
    let u_param = u_override.unwrap_or(u_default.max(4.0));
    let window = crate::window::make_window(u_param)?;
    let z_default = (y as f64).sqrt() / (u_param * (x as f64).powf(0.25));
    let z = z_override.unwrap_or(z_default.max(1.0));
    if z < 1.0 {
        return Err(Error::Domain("smoothed mean needs z ≥ 1"));
    }

    let d_count = odd_squarefree_window(y).len() as u64;
    let lo = y + 1;
    let hi = 2 * y - 1;
    let len = (hi - lo + 1) as usize;

    // Squarefree split weights M_z, R_z on (y, 2y) by sieving l².
    let (mz_arr, rz_arr) = {
        let mut mz = vec![1i32; len];
        let mut rz = vec![0i32; len];
        let mut l = 2u64;
        while l * l <= hi {
            let mu = mobius(l);
            if mu != 0 {
                let step = l * l;
                let target = if (l as f64) <= z { &mut mz } else { &mut rz };
                let mut v = lo.div_ceil(step) * step;
                while v <= hi {
                    target[(v - lo) as usize] += mu;
                    v += step;
                }
            }
            l += 1;
        }
        (mz, rz)
    };

    // Per-a integer accumulators over all odd primes 2 < p ≤ x:
    //   cp[a]: Euler-criterion residue count (the count_P route),
    //   nc[a]: #{p ∤ a} (principal part),
    //   jt[a]: Σ_p (8a/p) via multiplicative symbol tables.
    let spf = spf_sieve(hi as usize);
    let odd_primes = primes::primes_in(3, x + 1);
    let chunk = (odd_primes.len() / (8 * rayon::current_num_threads().max(1))).max(1);
    let acc = odd_primes
        .par_chunks(chunk)
        .map(|ps| {
            let mut cp = vec![0i32; len];
            let mut nc = vec![0i32; len];
            let mut jt = vec![0i32; len];
            let mut leg = vec![0i8; hi as usize + 1];
            for &p in ps {
                leg[1] = 1;
                for n in 2..=hi as usize {
                    let s = spf[n] as usize;
                    leg[n] = if s == n {
                        jacobi_reduced(n as u64 % p, p) as i8
                    } else {
                        leg[s] * leg[n / s]
                    };
                }
                let two_over_p = jacobi_reduced(2 % p, p);
                let e = (p - 1) / 2;
                let mut a = lo | 1;
                let mut r8 = (8 * a) % p;
                let step = 16 % p;
                while a <= hi {
                    let i = (a - lo) as usize;
                    let l = leg[a as usize] as i32;
                    if l != 0 {
                        nc[i] += 1;
                        jt[i] += two_over_p * l;
                    }
                    if powmod(r8, e, p) == 1 {
                        cp[i] += 1;
                    }
                    a += 2;
                    r8 += step;
                    if r8 >= p {
                        r8 -= p;
                    }
                }
            }
            (cp, nc, jt)
        })
        .reduce(
            || (vec![0i32; len], vec![0i32; len], vec![0i32; len]),
            |mut a, b| {
                for i in 0..len {
                    a.0[i] += b.0[i];
                    a.1[i] += b.1[i];
                    a.2[i] += b.2[i];
                }
                a
            },
        );
    let (cp, nc, jt) = acc;

    // Weighted sums over a; each route uses its own accumulator so the
    // decomposition identities are genuine cross-checks.
    let mut s_num = 0.0f64;
    let mut s1_num = 0.0f64;
    let mut s2_num = 0.0f64;
    let mut s21_num = 0.0f64;
    let mut s22_num = 0.0f64;
    let mut a = lo | 1;
    while a <= hi {
        let i = (a - lo) as usize;
        let w = window.eval(a as f64 / y as f64);
        if w > 0.0 {
            let sf = (mz_arr[i] + rz_arr[i]) as f64; // μ²(a)
            s_num += sf * w * cp[i] as f64;
            s1_num += sf * w * nc[i] as f64;
            s2_num += sf * w * jt[i] as f64;
            s21_num += mz_arr[i] as f64 * w * jt[i] as f64;
            s22_num += rz_arr[i] as f64 * w * jt[i] as f64;
        }
        a += 2;
    }
    let dc = d_count as f64;
    let s = s_num / dc;
    let s1 = s1_num / (2.0 * dc);
    let s2 = s2_num / (2.0 * dc);
    let s21 = s21_num / (2.0 * dc);
    let s22 = s22_num / (2.0 * dc);

    // Poisson form of S21, split into square and non-square frequencies.
    let tol_total = (1e-7 * s21.abs()).max(1e-10);
    let pair_count: usize = odd_primes.len() * 2;
    let tol_share = tol_total / pair_count.max(1) as f64;
    let per_p: Vec<(f64, f64, f64)> = odd_primes
        .par_iter()
        .map(|&p| poisson_prime_terms(p, y, z, &window, dc, tol_share))
        .collect();
    let mut s_sq = 0.0f64;
    let mut s_nonsq = 0.0f64;
    let mut poisson_tail_bound = 0.0f64;
    for (sq, nonsq, tail) in per_p {
        s_sq += sq;
        s_nonsq += nonsq;
        poisson_tail_bound += tail;
    }

    let main = primes::pi(x) as f64 / 2.0;
    Ok(SmoothedMeanResult {
        x,
        y,
        u_param,
        z,
        s,
        s1,
        s2,
        s21,
        s22,
        s_sq,
        s_nonsq,
        main,
        abs_error: (s - main).abs(),
        d_count,
        poisson_resid: (s21 - (s_sq + s_nonsq)).abs(),
        poisson_tail_bound,
    })
}

/// Hard cap on the per-(p, α) frequency range in the smoothed mean.
const M_HARD_CAP: i64 = 200_000;

/// One prime's contribution to (S_sq, S_nonsq) with its tail bound.
fn poisson_prime_terms(
    p: u64,
    y: u64,
    z: f64,
    window: &SmoothWindow,
    d_count: f64,
    tol_share: f64,
) -> (f64, f64, f64) {
    let sqrt_p = (p as f64).sqrt();
    let outer = y as f64 / (4.0 * d_count) / p as f64 * sqrt_p;
    let minus_over_p = jacobi_reduced(p - 1, p) as f64;
    let mut sq = 0.0f64;
    let mut nonsq = 0.0f64;
    let mut tail_total = 0.0f64;
    for (alpha, mu) in admissible_alphas(p, z) {
        let step = y as f64 / (2.0 * (alpha * alpha * p) as f64);
        let weight = mu as f64 / (alpha * alpha) as f64;
        // Minimal cutoff with certified tail ≤ tol_share for this pair.
        let tail_at = |m: i64| -> f64 {
            outer.abs() * weight.abs() * 2.0 * window.tilde_tail_bound(step, (m + 1) as f64)
        };
        let mut cap = 8i64;
        while tail_at(cap) > tol_share && cap < M_HARD_CAP {
            cap *= 2;
        }
        let cap = cap.min(M_HARD_CAP);
        tail_total += tail_at(cap);
        for m in 1..=cap {
            if (m as u64).is_multiple_of(p) {
                continue;
            }
            let sym = jacobi_reduced(m as u64 % p, p) as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let pos = sign * sym * window.tilde(m as f64 * step);
            let neg = sign * sym * minus_over_p * window.tilde(-(m as f64) * step);
            let scale = outer * weight;
            if is_square(m) {
                sq += scale * pos;
                nonsq += scale * neg;
            } else {
                nonsq += scale * (pos + neg);
            }
        }
    }
    (sq, nonsq, tail_total)
}

/// Direct evaluation of the smoothed average via `count_p`, for cross-checks
/// at small scale.
pub fn smoothed_mean_direct_oracle(x: u64, y: u64, window: &SmoothWindow) -> f64 {
    let d_count = odd_squarefree_window(y).len() as f64;
    let mu = crate::arith::mobius_sieve(2 * y as usize);
    let mut total = 0.0f64;
    let mut a = y + 1;
    while a < 2 * y {
        if a % 2 == 1 && mu[a as usize] != 0 {
            total += crate::residue::count_p(8 * a as i64, 2, x) as f64
                * window.eval(a as f64 / y as f64);
        }
        a += 1;
    }
    total / d_count
}
