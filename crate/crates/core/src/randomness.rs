//! Pad generation: an OS-backed secure source, a seeded source for
//! reproducible fixtures, and exhaustive pad enumeration for the audits.
//!
//! The seeded source is gated: it is only usable when the caller explicitly
//! enables insecure test mode, since predictable pads void every privacy
//! guarantee of the scheme.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::bitstring::BitString;
use crate::codec::{PadSet1, PadSet2};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RandomnessError {
    #[error("seeded test source refused: insecure test mode is not enabled")]
    SeededSourceRefused,
    #[error("exhaustive enumeration over {0} pad bits is intractable (limit {1})")]
    EnumerationTooLarge(usize, usize),
}

/// Where pads come from: the OS entropy source, or a fixed seed (tests only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadSource {
    Secure,
    SeededTest { seed: u64 },
}

impl PadSource {
    /// Instantiates a generator. Seeded sources require `insecure_test_mode`.
    pub fn generator(&self, insecure_test_mode: bool) -> Result<PadGenerator, RandomnessError> {
        match *self {
            PadSource::Secure => Ok(PadGenerator::secure()),
            PadSource::SeededTest { seed } => {
                if !insecure_test_mode {
                    return Err(RandomnessError::SeededSourceRefused);
                }
                Ok(PadGenerator::seeded_for_tests(seed))
            }
        }
    }
}

enum Rng {
    Os(rand::rngs::OsRng),
    Seeded(ChaCha12Rng),
}

/// A stateful stream of uniform pad bits.
pub struct PadGenerator {
    rng: Rng,
}

impl PadGenerator {
    pub fn secure() -> Self {
        PadGenerator {
            rng: Rng::Os(rand::rngs::OsRng),
        }
    }

    pub fn seeded_for_tests(seed: u64) -> Self {
        PadGenerator {
            rng: Rng::Seeded(ChaCha12Rng::seed_from_u64(seed)),
        }
    }

    fn fill(&mut self, buf: &mut [u8]) {
        match &mut self.rng {
            Rng::Os(r) => r.fill_bytes(buf),
            Rng::Seeded(r) => r.fill_bytes(buf),
        }
    }

    /// Draws a uniform bit string of the given length.
    pub fn bits(&mut self, bit_len: usize) -> BitString {
        let mut bytes = vec![0u8; bit_len.div_ceil(8)];
        self.fill(&mut bytes);
        BitString::from_bytes(bytes, bit_len)
    }

    /// The two pads of the one-layer scheme, each `half_length` bits.
    pub fn pads1(&mut self, half_length: usize) -> PadSet1 {
        PadSet1 {
            r1: self.bits(half_length),
            r2: self.bits(half_length),
        }
    }

    /// The eight pads of the two-layer scheme, each `half_length` bits.
    pub fn pads2(&mut self, half_length: usize) -> PadSet2 {
        PadSet2::new(std::array::from_fn(|_| self.bits(half_length)))
    }
}

// Enumeration limit: 2^24 assignments is the most the audits ever need.
const MAX_ENUM_BITS: usize = 24;

fn carve(assignment: u64, half_length: usize, slot: usize) -> BitString {
    let shift = slot * half_length;
    let mask = if half_length == 0 {
        0
    } else {
        (1u64 << half_length) - 1
    };
    BitString::from_u128(u128::from((assignment >> shift) & mask), half_length)
        .expect("value masked to width")
}

/// Yields every `PadSet1` over `half_length`-bit pads exactly once.
pub fn exhaustive_pads1(
    half_length: usize,
) -> Result<impl Iterator<Item = PadSet1>, RandomnessError> {
    let total_bits = 2 * half_length;
    if total_bits > MAX_ENUM_BITS {
        return Err(RandomnessError::EnumerationTooLarge(total_bits, MAX_ENUM_BITS));
    }
    Ok((0..1u64 << total_bits).map(move |a| PadSet1 {
        r1: carve(a, half_length, 0),
        r2: carve(a, half_length, 1),
    }))
}

/// Yields every `PadSet2` over `half_length`-bit pads exactly once.
pub fn exhaustive_pads2(
    half_length: usize,
) -> Result<impl Iterator<Item = PadSet2>, RandomnessError> {
    let total_bits = 8 * half_length;
    if total_bits > MAX_ENUM_BITS {
        return Err(RandomnessError::EnumerationTooLarge(total_bits, MAX_ENUM_BITS));
    }
    Ok((0..1u64 << total_bits)
        .map(move |a| PadSet2::new(std::array::from_fn(|k| carve(a, half_length, k)))))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn seeded_source_is_reproducible() {
        let mut a = PadGenerator::seeded_for_tests(42);
        let mut b = PadGenerator::seeded_for_tests(42);
        assert_eq!(a.bits(8), b.bits(8));
        assert_eq!(a.pads2(17), b.pads2(17));
        let mut c = PadGenerator::seeded_for_tests(43);
        assert_ne!(PadGenerator::seeded_for_tests(42).bits(64), c.bits(64));
    }

    #[test]
    fn zero_length_pads() {
        let mut g = PadGenerator::seeded_for_tests(1);
        let p = g.pads1(0);
        assert!(p.r1.is_empty() && p.r2.is_empty());
        let p = g.pads2(0);
        for k in 1..=8 {
            assert!(p.r(k).is_empty());
        }
    }

    #[test]
    fn seeded_source_gate() {
        let src = PadSource::SeededTest { seed: 7 };
        assert!(matches!(
            src.generator(false),
            Err(RandomnessError::SeededSourceRefused)
        ));
        assert!(src.generator(true).is_ok());
        assert!(PadSource::Secure.generator(false).is_ok());
    }

    #[test]
    fn secure_draws_differ() {
        let mut g = PadGenerator::secure();
        for _ in 0..100 {
            assert_ne!(g.bits(128), g.bits(128));
        }
    }

    #[test]
    fn secure_monobit_frequency() {
        // 10^6-bit smoke test: ones within 3 sigma of n/2, sigma = sqrt(n)/2.
        let n = 1_000_000usize;
        let draw = PadGenerator::secure().bits(n);
        let ones = draw.iter_bits().filter(|&b| b).count() as f64;
        let sigma = (n as f64).sqrt() / 2.0;
        assert!((ones - n as f64 / 2.0).abs() < 3.0 * sigma, "ones = {ones}");
    }

    #[test]
    fn exhaustive_pads2_counts() {
        let all: Vec<PadSet2> = exhaustive_pads2(1).unwrap().collect();
        assert_eq!(all.len(), 256);
        let distinct: BTreeSet<Vec<String>> = all
            .iter()
            .map(|p| (1..=8).map(|k| p.r(k).to_string()).collect())
            .collect();
        assert_eq!(distinct.len(), 256);
    }

    #[test]
    fn exhaustive_pads1_counts() {
        assert_eq!(exhaustive_pads1(2).unwrap().count(), 16);
        assert_eq!(exhaustive_pads1(0).unwrap().count(), 1);
        assert!(exhaustive_pads1(20).is_err());
        assert!(exhaustive_pads2(4).is_err());
    }
}
