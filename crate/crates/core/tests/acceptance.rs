//! Acceptance suite. Each test exercises one release criterion end to end
//! and prints a single pass line (visible with `cargo test -- --nocapture`).
//!
//! Run with: `cargo test -p x2ds-core --test acceptance`

use std::collections::BTreeMap;
use std::time::Instant;

use x2ds_core::{
    audit_all_cases, build_decoding_set, case_expression_check, dec2, enc2, enc2_composed,
    exhaustive_pads2, full_matrix_mutual_information, recover_from_shares, single_share_audit,
    split_secret, two_share_audit, BitString, CodecError, FailurePattern, PadGenerator, PadSet2,
};

fn pass(name: &str, detail: String) {
    println!("{name}: PASS — {detail}");
}

/// Availability, exhaustive: |S| = 2 bits, all 4 secrets x 256 pad
/// assignments x 9 failure patterns recover exactly. 9216/9216.
#[test]
fn criterion_1_availability_exhaustive() {
    let started = Instant::now();
    let mut recovered = 0u64;
    for s in 0..4u64 {
        let secret = BitString::from_u128(u128::from(s), 2).unwrap();
        let (padded, _, _) = split_secret(&secret);
        for pads in exhaustive_pads2(1).unwrap() {
            let matrix = enc2(&padded, &pads).unwrap();
            for failure in FailurePattern::all() {
                let ds = build_decoding_set(&matrix, failure);
                assert_eq!(
                    dec2(&ds, failure, 2).unwrap(),
                    secret,
                    "secret {secret}, failure (r={},c={})",
                    failure.route(),
                    failure.bs()
                );
                recovered += 1;
            }
        }
    }
    assert_eq!(recovered, 9216);
    pass(
        "criterion 1 (availability, exhaustive)",
        format!("9216/9216 recovered in {:.3} s", started.elapsed().as_secs_f64()),
    );
}

/// Availability, randomized: |S| in {8, 1024, 8 MiBit} with secure pads,
/// 100 trials per failure pattern, byte-exact recovery in all 900 runs/size.
#[test]
fn criterion_2_availability_randomized() {
    let started = Instant::now();
    let mut gen = PadGenerator::secure();
    for secret_bits in [8usize, 1024, 8 * (1 << 20)] {
        let mut recovered = 0u64;
        for failure in FailurePattern::all() {
            for _ in 0..100 {
                let secret = gen.bits(secret_bits);
                let (padded, _, _) = split_secret(&secret);
                let pads = gen.pads2(padded.half_length());
                let matrix = enc2(&padded, &pads).unwrap();
                let ds = build_decoding_set(&matrix, failure);
                assert_eq!(
                    dec2(&ds, failure, secret_bits).unwrap(),
                    secret,
                    "|S|={secret_bits}, failure (r={},c={})",
                    failure.route(),
                    failure.bs()
                );
                recovered += 1;
            }
        }
        assert_eq!(recovered, 900, "|S|={secret_bits}");
    }
    pass(
        "criterion 2 (availability, randomized)",
        format!("3 x 900/900 recovered in {:.1} s", started.elapsed().as_secs_f64()),
    );
}

/// Perfect privacy, exact: for |S| = 2 and 4 bits the per-secret observation
/// multisets are identical across all secrets for all nine patterns.
#[test]
fn criterion_3_perfect_privacy_exact() {
    let started = Instant::now();
    for secret_bits in [2usize, 4] {
        let report = audit_all_cases(secret_bits, None).unwrap();
        assert_eq!(report.cases.len(), 9);
        for case in &report.cases {
            assert!(
                case.raw.exactly_zero,
                "|S|={secret_bits}, pattern (r={},c={}): MI = {}",
                case.pattern.route(),
                case.pattern.bs(),
                case.raw.bits
            );
        }
    }
    pass(
        "criterion 3 (perfect privacy, exact)",
        format!("18 cases exactly zero in {:.1} s", started.elapsed().as_secs_f64()),
    );
}

/// Case-reduction fidelity: each reduced XOR tuple has the same (zero) MI
/// as the raw five-share observation at |S| = 2.
#[test]
fn criterion_4_case_reduction_fidelity() {
    for pattern in FailurePattern::all() {
        assert!(
            case_expression_check(2, pattern).unwrap(),
            "pattern (r={},c={})",
            pattern.route(),
            pattern.bs()
        );
    }
    pass(
        "criterion 4 (case-reduction fidelity)",
        "9/9 reductions match the raw observation".into(),
    );
}

/// One-layer privacy: each single share has exactly zero MI with the secret
/// at |S| in {2,4,6,8}; any two shares jointly have MI exactly |S|.
#[test]
fn criterion_5_one_layer_privacy() {
    for secret_bits in [2usize, 4, 6, 8] {
        for j in 1..=3u8 {
            let mi = single_share_audit(secret_bits, j).unwrap();
            assert!(mi.exactly_zero, "|S|={secret_bits}, E{j}: MI = {}", mi.bits);
        }
        for (a, b) in [(1u8, 2u8), (1, 3), (2, 3)] {
            let mi = two_share_audit(secret_bits, a, b).unwrap();
            assert!(mi.exactly_max, "|S|={secret_bits}, (E{a},E{b})");
            assert!((mi.bits - secret_bits as f64).abs() < 1e-9);
        }
    }
    pass(
        "criterion 5 (one-layer privacy)",
        "single-share MI = 0 and pairwise MI = |S| at |S| = 2,4,6,8".into(),
    );
}

/// Closed-form equivalence: Eq-style closed forms equal the composed
/// two-round encoding bit-for-bit on 10^4 random instances up to 64 KiB.
#[test]
fn criterion_6_closed_form_equivalence() {
    let started = Instant::now();
    let mut gen = PadGenerator::seeded_for_tests(0x2d5);
    for k in 0..10_000usize {
        // mostly small instances, with 1% at up to 64 KiB
        let max_bits = if k % 100 == 0 { 8 * 64 * 1024 } else { 2048 };
        let bits = (gen.bits(32).to_u128().unwrap() as usize) % (max_bits + 1);
        let secret = gen.bits(bits);
        let (padded, _, _) = split_secret(&secret);
        let pads = gen.pads2(padded.half_length());
        assert_eq!(
            enc2(&padded, &pads).unwrap(),
            enc2_composed(&padded, &pads).unwrap(),
            "instance {k}, {bits} bits"
        );
    }
    pass(
        "criterion 6 (closed-form equivalence)",
        format!("10000/10000 instances identical in {:.1} s", started.elapsed().as_secs_f64()),
    );
}

/// Golden worked example: the hand-derived 4-bit instance produces exactly
/// the expected nine shares and failure (1,1) decodes back to 1001.
#[test]
fn criterion_7_golden_worked_example() {
    let secret: BitString = "1001".parse().unwrap();
    let pads = PadSet2::new(
        ["11", "01", "10", "00", "01", "11", "10", "01"].map(|s| s.parse().unwrap()),
    );
    let (padded, _, _) = split_secret(&secret);
    let matrix = enc2(&padded, &pads).unwrap();
    let expected = [
        ["1110", "1001", "1110"],
        ["1000", "0011", "0101"],
        ["0001", "1000", "1000"],
    ];
    for i in 1..=3u8 {
        for j in 1..=3u8 {
            assert_eq!(
                matrix.get(i, j).to_string(),
                expected[i as usize - 1][j as usize - 1],
                "m[{i}][{j}]"
            );
        }
    }
    let failure = FailurePattern::new(1, 1).unwrap();
    let ds = build_decoding_set(&matrix, failure);
    assert_eq!(dec2(&ds, failure, 4).unwrap(), secret);
    pass(
        "criterion 7 (golden worked example)",
        "all nine shares and the (1,1) decode match the frozen fixtures".into(),
    );
}

/// Linear complexity: per-byte encode cost at 10 MiB is within 3x of the
/// per-byte cost at 1 MiB.
#[test]
fn criterion_8_linear_complexity() {
    fn per_byte_cost(len_bytes: usize) -> f64 {
        let mut gen = PadGenerator::seeded_for_tests(len_bytes as u64);
        let secret = gen.bits(8 * len_bytes);
        let (padded, _, _) = split_secret(&secret);
        let pads = gen.pads2(padded.half_length());
        // best of three to damp scheduling noise
        (0..3)
            .map(|_| {
                let t0 = Instant::now();
                let matrix = enc2(&padded, &pads).unwrap();
                let elapsed = t0.elapsed().as_secs_f64();
                assert_eq!(matrix.share_length(), padded.payload().len());
                elapsed / len_bytes as f64
            })
            .fold(f64::INFINITY, f64::min)
    }
    let small = per_byte_cost(1 << 20);
    let large = per_byte_cost(10 << 20);
    let ratio = large / small;
    assert!(
        ratio < 3.0,
        "per-byte cost ratio {ratio:.2} exceeds 3x (1 MiB: {small:.3e} s/B, 10 MiB: {large:.3e} s/B)"
    );
    pass(
        "criterion 8 (linear complexity)",
        format!("10 MiB / 1 MiB per-byte cost ratio = {ratio:.2} (< 3)"),
    );
}

/// Negative controls: the full matrix determines the secret exactly, and a
/// single surviving column (equivalently, a two-BS jam) is unrecoverable.
#[test]
fn criterion_9_negative_controls() {
    for secret_bits in [2usize, 4] {
        let mi = full_matrix_mutual_information(secret_bits).unwrap();
        assert!(mi.exactly_max, "|S|={secret_bits}");
        assert!((mi.bits - secret_bits as f64).abs() < 1e-9);
    }

    let mut gen = PadGenerator::secure();
    let secret = gen.bits(64);
    let (padded, _, _) = split_secret(&secret);
    let pads = gen.pads2(padded.half_length());
    let matrix = enc2(&padded, &pads).unwrap();

    // Two-BS jam leaves only column 1: no 2x2 sub-grid survives.
    let single_column: BTreeMap<(u8, u8), BitString> = matrix
        .entries()
        .filter(|((_, j), _)| *j == 1)
        .map(|(pos, s)| (pos, s.clone()))
        .collect();
    assert!(matches!(
        recover_from_shares(&single_column, 64),
        Err(CodecError::InsufficientShares(_))
    ));

    pass(
        "criterion 9 (negative controls)",
        "full-matrix MI = |S| exactly; single-column decode rejected".into(),
    );
}
