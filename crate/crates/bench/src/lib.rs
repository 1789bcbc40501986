//! Shared helpers for the codec benchmarks.

use x2ds_core::{split_secret, PadGenerator, PadSet2, PaddedSecret};

/// A padded secret of `len` random bytes plus a matching pad set.
pub fn instance(len: usize, seed: u64) -> (PaddedSecret, PadSet2) {
    let mut gen = PadGenerator::seeded_for_tests(seed);
    let secret = gen.bits(8 * len);
    let (padded, _, _) = split_secret(&secret);
    let pads = gen.pads2(padded.half_length());
    (padded, pads)
}
