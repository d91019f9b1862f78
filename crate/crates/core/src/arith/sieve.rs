//! Prime enumeration: a plain sieve for small bounds and a segmented
//! odd-only sieve that streams primes in increasing order.

use std::sync::OnceLock;

const SEGMENT_BYTES: usize = 1 << 18;

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    // index i stands for 2i + 1
    let half = (n - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = (p * p - 1) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = Vec::with_capacity(n / 10 + 8);
    out.push(2);
    out.extend(
        (1..half)
            .filter(|&i| !composite[i])
            .map(|i| (2 * i + 1) as u64),
    );
    out
}

/// Primes below 10^6, computed once.
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(1_000_000))
}

/// Number of primes `<= x`.
pub fn prime_count(x: u64) -> u64 {
    SegmentedPrimes::new(2, x).count() as u64
}

/// Streams the primes in `[lo, hi]` in increasing order.
pub struct SegmentedPrimes {
    hi: u64,
    base: Vec<u64>,
    /// Odd numbers `seg_lo, seg_lo + 2, ...` of the current segment.
    seg_lo: u64,
    flags: Vec<bool>,
    pos: usize,
    pending_two: bool,
    done: bool,
}

impl SegmentedPrimes {
    pub fn new(lo: u64, hi: u64) -> Self {
        let root = (hi as f64).sqrt() as u64 + 2;
        let base = primes_up_to(root).into_iter().skip(1).collect();
        let first_odd = if lo <= 3 { 3 } else { lo | 1 };
        let mut it = SegmentedPrimes {
            hi,
            base,
            seg_lo: first_odd,
            flags: Vec::new(),
            pos: 0,
            pending_two: lo <= 2 && hi >= 2,
            done: first_odd > hi,
        };
        if !it.done {
            it.fill();
        }
        it
    }

    fn fill(&mut self) {
        let span = ((self.hi - self.seg_lo) / 2 + 1).min(SEGMENT_BYTES as u64) as usize;
        self.flags.clear();
        self.flags.resize(span, true);
        let seg_hi = self.seg_lo + 2 * (span as u64 - 1);
        for &p in &self.base {
            if p * p > seg_hi {
                break;
            }
            // first odd multiple of p that is >= max(p*p, seg_lo)
            let mut start = (self.seg_lo.div_ceil(p) * p).max(p * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - self.seg_lo) / 2) as usize;
            while j < span {
                self.flags[j] = false;
                j += p as usize;
            }
        }
        self.pos = 0;
    }
}

impl Iterator for SegmentedPrimes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending_two {
            self.pending_two = false;
            return Some(2);
        }
        while !self.done {
            while self.pos < self.flags.len() {
                let i = self.pos;
                self.pos += 1;
                if self.flags[i] {
                    return Some(self.seg_lo + 2 * i as u64);
                }
            }
            let next_lo = self.seg_lo + 2 * self.flags.len() as u64;
            if next_lo > self.hi {
                self.done = true;
            } else {
                self.seg_lo = next_lo;
                self.fill();
            }
        }
        None
    }
}
