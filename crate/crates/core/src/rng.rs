//! Small deterministic pseudo-random generator for sampling.
//!
//! SplitMix64: stable across platforms and versions, so sampled corpora
//! and CLI output are reproducible from a seed alone.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // Modulo bias is irrelevant for test sampling at these bounds.
        self.next_u64() % bound
    }

    /// Uniform integer in `lo..=hi`.
    pub fn next_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.next_below((hi - lo + 1) as u64) as i64
    }

    /// Nonzero integer in `-mag..=mag`.
    pub fn next_nonzero(&mut self, mag: i64) -> i64 {
        loop {
            let v = self.next_in(-mag, mag);
            if v != 0 {
                return v;
            }
        }
    }
}
