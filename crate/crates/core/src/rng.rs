//! Small deterministic RNG for randomized property checks.
//!
//! The crate's correctness checks sample identities at random points. To keep
//! every run reproducible (and CLI output byte-identical for a fixed seed) we
//! use a self-contained SplitMix64 generator instead of pulling in an external
//! RNG crate.

use num::bigint::BigInt;
use num::rational::BigRational;

/// SplitMix64 pseudo-random generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in the half-open range `lo..hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo < hi, "empty range");
        let span = (hi - lo) as u64;
        lo + (self.next_u64() % span) as i64
    }

    /// Random rational with numerator in `-max_num..=max_num` and denominator
    /// in `1..=max_den`.
    pub fn rational(&mut self, max_num: i64, max_den: i64) -> BigRational {
        let n = self.range_i64(-max_num, max_num + 1);
        let d = self.range_i64(1, max_den + 1);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Like [`rational`](Self::rational) but never zero.
    pub fn nonzero_rational(&mut self, max_num: i64, max_den: i64) -> BigRational {
        loop {
            let r = self.rational(max_num, max_den);
            if !num::Zero::is_zero(&r) {
                return r;
            }
        }
    }
}
