//! Segmented sieve producing primes and prime counts, with residue-class
//! filtering.
//!
//! The sieve is odd-only: one bit per odd number, segments bounded by
//! `segment_size` bytes regardless of the upper limit, so a pass over
//! [2, 10⁹) runs in constant memory.  Primes are pushed to a visitor in
//! strictly increasing order; counting reductions are plain integer sums,
//! so sharded executions are order-independent.

use crate::{Error, Result};

/// Default bytes per sieve block (≈ 4.2M odd numbers per segment).
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 18;

/// Minimum supported segment size in bytes.
pub const MIN_SEGMENT_SIZE: usize = 1 << 14;

/// A streamed range of primes in [lo, hi).
#[derive(Debug, Clone)]
pub struct PrimeRange {
    pub lo: u64,
    pub hi: u64,
    /// Keep only p ≡ r (mod d).
    pub modulus_filter: Option<(u64, u64)>,
    /// Bytes per sieve block.
    pub segment_size: usize,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Self {
        PrimeRange {
            lo,
            hi,
            modulus_filter: None,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }

    /// Restrict the stream to p ≡ r (mod d).
    pub fn with_filter(mut self, d: u64, r: u64) -> Self {
        self.modulus_filter = Some((d, r % d.max(1)));
        self
    }

    pub fn with_segment_size(mut self, bytes: usize) -> Self {
        self.segment_size = bytes;
        self
    }
}

/// Simple sieve of Eratosthenes: all primes ≤ n.
pub fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Visit every qualifying prime in the range exactly once, ascending.
/// Returns the number visited.
pub fn stream_primes<F: FnMut(u64)>(range: &PrimeRange, mut visit: F) -> Result<u64> {
    if range.hi < range.lo {
        return Err(Error::EmptyRange {
            lo: range.lo,
            hi: range.hi,
        });
    }
    if range.segment_size < MIN_SEGMENT_SIZE {
        return Err(Error::SegmentTooSmall(range.segment_size));
    }
    let lo = range.lo.max(2);
    let hi = range.hi;
    if hi <= lo {
        return Ok(0);
    }
    let keep = |p: u64| match range.modulus_filter {
        Some((d, r)) => d == 0 || p % d == r,
        None => true,
    };
    let mut count = 0u64;
    if lo <= 2 && hi > 2 && keep(2) {
        visit(2);
        count += 1;
    }

    // Base primes up to √(hi−1); odd ones drive the segment marking.
    let root = ((hi - 1) as f64).sqrt() as u64 + 1;
    let base: Vec<u64> = simple_sieve(root).into_iter().filter(|&p| p > 2).collect();

    let span = (range.segment_size as u64) * 16; // numbers covered per block
    let mut seg_lo = lo.max(3) | 1; // first odd candidate
    if seg_lo < lo {
        seg_lo += 2;
    }
    let mut bits = vec![0u64; (range.segment_size * 8).div_ceil(64)];
    while seg_lo < hi {
        let seg_hi = seg_lo.saturating_add(span).min(hi);
        let n_odd = ((seg_hi - seg_lo) as usize).div_ceil(2);
        let words = n_odd.div_ceil(64);
        bits[..words].fill(0);
        for &p in &base {
            if p * p >= seg_hi {
                break;
            }
            // First odd multiple of p at or after max(p², seg_lo).
            let mut start = p * p;
            if start < seg_lo {
                start = seg_lo.div_ceil(p) * p;
                if start % 2 == 0 {
                    start += p;
                }
            }
            let mut idx = ((start - seg_lo) / 2) as usize;
            let step = p as usize;
            while idx < n_odd {
                bits[idx / 64] |= 1u64 << (idx % 64);
                idx += step;
            }
        }
        for idx in 0..n_odd {
            if bits[idx / 64] & (1u64 << (idx % 64)) == 0 {
                let p = seg_lo + 2 * idx as u64;
                if p >= hi {
                    break;
                }
                if keep(p) {
                    visit(p);
                    count += 1;
                }
            }
        }
        seg_lo = seg_hi | 1;
    }
    Ok(count)
}

/// Materialize the primes in [lo, hi) as a vector.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut v = Vec::new();
    stream_primes(&PrimeRange::new(lo, hi), |p| v.push(p)).expect("valid range");
    v
}

/// π(x): number of primes ≤ x.
pub fn pi(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    stream_primes(&PrimeRange::new(2, x + 1), |_| {}).expect("valid range")
}

/// π(x; 1, d): number of primes p ≤ x with p ≡ 1 (mod d).
pub fn pi_class(x: u64, d: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let range = PrimeRange::new(2, x + 1).with_filter(d, 1 % d.max(1));
    stream_primes(&range, |_| {}).expect("valid range")
}

/// Split [lo, hi) into at most `parts` contiguous chunks for parallel passes.
pub fn shard_ranges(lo: u64, hi: u64, parts: usize) -> Vec<(u64, u64)> {
    if hi <= lo {
        return Vec::new();
    }
    let parts = parts.max(1) as u64;
    let width = ((hi - lo) / parts).max(1);
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = a.saturating_add(width).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}
