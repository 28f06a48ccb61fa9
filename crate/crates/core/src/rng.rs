//! Deterministic random-number generation.
//!
//! Every seeded choice in this crate goes through [`SplitMix64`] so that a
//! given seed produces byte-identical output on any platform, toolchain or
//! crate version. Per-sentence generators are derived as
//! `SplitMix64::new(seed ^ sentence_index)`; SplitMix64's output function
//! scrambles the low-bit differences of consecutive indices.

/// A source of bounded uniform draws.
///
/// Selection methods draw through this trait so tests can substitute a
/// scripted sequence of choices for the seeded generator.
pub trait Chooser {
    /// Returns a value in `[0, n)`. `n` must be at least 1.
    fn choose(&mut self, n: usize) -> usize;
}

/// SplitMix64 (Steele, Lea & Flood 2014): a tiny, fully specified PRNG.
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
}

impl Chooser for SplitMix64 {
    fn choose(&mut self, n: usize) -> usize {
        assert!(n >= 1, "choose(0) is meaningless");
        let n = n as u64;
        // Rejection sampling keeps the draw unbiased for every n.
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }
}

/// A chooser that replays a fixed script of draws.
///
/// Used by fixtures that pin a particular selection ("forced choices").
/// Panics when the script is exhausted, which turns an unexpected extra
/// draw into a loud test failure.
#[derive(Debug, Clone)]
pub struct Scripted {
    picks: Vec<usize>,
    next: usize,
}

impl Scripted {
    pub fn new(picks: impl Into<Vec<usize>>) -> Self {
        Self {
            picks: picks.into(),
            next: 0,
        }
    }
}

impl Chooser for Scripted {
    fn choose(&mut self, n: usize) -> usize {
        let pick = *self
            .picks
            .get(self.next)
            .expect("scripted chooser ran out of picks");
        self.next += 1;
        assert!(pick < n, "scripted pick {pick} out of range 0..{n}");
        pick
    }
}
