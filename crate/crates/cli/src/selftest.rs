//! Embedded golden fixtures and the exhaustive 2-bit availability and
//! privacy suite, runnable in the field without the test harness.

use std::time::Instant;

use x2ds_core::{
    audit_all_cases, build_decoding_set, dec2, enc2, enc2_composed, split_secret, BitString,
    FailurePattern, PadSet2, ShareMatrix,
};

/// The worked 4-bit instance: secret 1001, R1..R8 = 11,01,10,00,01,11,10,01.
fn golden_instance() -> (BitString, PadSet2) {
    let secret: BitString = "1001".parse().unwrap();
    let pads = PadSet2::new(
        ["11", "01", "10", "00", "01", "11", "10", "01"].map(|s| s.parse().unwrap()),
    );
    (secret, pads)
}

const GOLDEN_MATRIX: [[&str; 3]; 3] = [
    ["1110", "1001", "1110"],
    ["1000", "0011", "0101"],
    ["0001", "1000", "1000"],
];

/// Golden share-file bytes: share 1110 at (1,1), original length 4 bits.
const GOLDEN_SHARE_FILE: [u8; 24] = [
    0x58, 0x32, 0x44, 0x53, 0x01, 0x01, 0x01, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0, 4,
    0xe0,
];

/// Compares against the expected matrix, naming the first mismatching entry.
fn compare_matrix(expected: &[[&str; 3]; 3], actual: &ShareMatrix) -> Result<(), String> {
    for i in 1..=3u8 {
        for j in 1..=3u8 {
            let want: BitString = expected[i as usize - 1][j as usize - 1].parse().unwrap();
            let got = actual.get(i, j);
            if *got != want {
                return Err(format!("m[{i}][{j}] mismatch: expected {want}, got {got}"));
            }
        }
    }
    Ok(())
}

fn golden_matrix_check() -> Result<(), String> {
    let (secret, pads) = golden_instance();
    let (padded, _, _) = split_secret(&secret);
    let closed = enc2(&padded, &pads).map_err(|e| e.to_string())?;
    compare_matrix(&GOLDEN_MATRIX, &closed)?;
    let composed = enc2_composed(&padded, &pads).map_err(|e| e.to_string())?;
    if closed != composed {
        return Err("closed-form and composed encodings disagree".into());
    }
    Ok(())
}

fn golden_decode_check() -> Result<(), String> {
    let (secret, pads) = golden_instance();
    let (padded, _, _) = split_secret(&secret);
    let matrix = enc2(&padded, &pads).map_err(|e| e.to_string())?;
    for failure in FailurePattern::all() {
        let ds = build_decoding_set(&matrix, failure);
        let recovered = dec2(&ds, failure, secret.len()).map_err(|e| e.to_string())?;
        if recovered != secret {
            return Err(format!(
                "failure (r={},c={}): expected {secret}, got {recovered}",
                failure.route(),
                failure.bs()
            ));
        }
    }
    Ok(())
}

fn container_golden_check() -> Result<(), String> {
    let share: BitString = "1110".parse().unwrap();
    let encoded = x2ds_core::encode_share(&share, 1, 1, 4).map_err(|e| e.to_string())?;
    if encoded != GOLDEN_SHARE_FILE {
        return Err("share file bytes differ from the golden fixture".into());
    }
    let record = x2ds_core::decode_share(&GOLDEN_SHARE_FILE).map_err(|e| e.to_string())?;
    if record.share != share || record.route != 1 || record.bs != 1 {
        return Err("share file round trip mismatch".into());
    }
    Ok(())
}

fn exhaustive_availability_check() -> Result<(), String> {
    let mut decoded = 0u64;
    for s in 0..4u64 {
        let secret = BitString::from_u128(u128::from(s), 2).unwrap();
        let (padded, _, _) = split_secret(&secret);
        for pads in x2ds_core::exhaustive_pads2(1).map_err(|e| e.to_string())? {
            let matrix = enc2(&padded, &pads).map_err(|e| e.to_string())?;
            for failure in FailurePattern::all() {
                let ds = build_decoding_set(&matrix, failure);
                let recovered = dec2(&ds, failure, 2).map_err(|e| e.to_string())?;
                if recovered != secret {
                    return Err(format!(
                        "secret {secret} not recovered under (r={},c={})",
                        failure.route(),
                        failure.bs()
                    ));
                }
                decoded += 1;
            }
        }
    }
    if decoded != 9216 {
        return Err(format!("expected 9216 decode instances, ran {decoded}"));
    }
    Ok(())
}

fn exhaustive_privacy_check() -> Result<(), String> {
    let report = audit_all_cases(2, None).map_err(|e| e.to_string())?;
    if !report.pass() {
        return Err(format!("privacy audit failed:\n{report}"));
    }
    Ok(())
}

pub fn run() -> Result<(), String> {
    let steps: [(&str, fn() -> Result<(), String>); 5] = [
        ("golden 4-bit share matrix", golden_matrix_check),
        ("golden decode, all 9 failure patterns", golden_decode_check),
        ("share file golden bytes", container_golden_check),
        ("exhaustive 2-bit availability (9216 decodes)", exhaustive_availability_check),
        ("exhaustive 2-bit privacy audit", exhaustive_privacy_check),
    ];
    let mut failed = false;
    let started = Instant::now();
    for (name, step) in steps {
        let t0 = Instant::now();
        match step() {
            Ok(()) => println!("{name} .. pass ({:.3} s)", t0.elapsed().as_secs_f64()),
            Err(msg) => {
                failed = true;
                println!("{name} .. FAIL: {msg}");
            }
        }
    }
    println!(
        "selftest: {} ({:.3} s)",
        if failed { "FAIL" } else { "PASS" },
        started.elapsed().as_secs_f64()
    );
    if failed {
        Err("selftest failed".into())
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_matrix_names_the_mismatch() {
        let (secret, pads) = golden_instance();
        let (padded, _, _) = split_secret(&secret);
        let matrix = enc2(&padded, &pads).unwrap();
        assert!(compare_matrix(&GOLDEN_MATRIX, &matrix).is_ok());

        // A flipped bit in the expected fixture must be reported by position.
        let mut tampered = GOLDEN_MATRIX;
        tampered[1][2] = "0100";
        let err = compare_matrix(&tampered, &matrix).unwrap_err();
        assert!(err.contains("m[2][3]"), "{err}");
    }

    #[test]
    fn selftest_passes() {
        assert!(run().is_ok());
    }
}
