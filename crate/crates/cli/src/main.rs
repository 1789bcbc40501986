//! `x2ds`: split a file into nine shares for a 3x3 layered multipath
//! network, reassemble it from any surviving 2x2 sub-grid, and run the
//! simulator and exhaustive privacy audits.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 I/O
//! failure, 3 insecure-seed gate, 4 insufficient shares, 5 inconsistent
//! shares. Diagnostics go to stderr, reports to stdout.

mod selftest;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use x2ds_core::{
    audit_all_cases, enc2, recover_from_shares, run_campaign, split_secret, BitString,
    CampaignPads, CodecError, FailurePattern, Manifest, ManifestShare, PadSource, SimError,
};

const EXIT_FAIL: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_GATE: u8 = 3;
const EXIT_INSUFFICIENT: u8 = 4;
const EXIT_INCONSISTENT: u8 = 5;

pub const MANIFEST_NAME: &str = "manifest.x2dm";
const INSECURE_ENV: &str = "X2DS_INSECURE_TEST";

pub fn share_file_name(i: u8, j: u8) -> String {
    format!("share_i{i}_j{j}.x2ds")
}

#[derive(Parser)]
#[command(
    name = "x2ds",
    version,
    about = "Two-dimensional XOR secret sharing over a 3x3 share matrix"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a file into nine share files plus a manifest.
    Encode {
        /// Input file holding the secret.
        input: PathBuf,
        /// Directory receiving the nine .x2ds files and manifest.x2dm.
        #[arg(short = 'o', long, default_value = ".")]
        out_dir: PathBuf,
        /// Use a fixed pad seed (test fixtures only; requires the insecure gate).
        #[arg(long)]
        seed: Option<u64>,
        /// Allow seeded pads. Predictable pads void every privacy guarantee.
        #[arg(long)]
        insecure_test_mode: bool,
        /// Record a sha256 digest of the secret in the manifest. Off by
        /// default: a cleartext digest leaks a predicate of the secret.
        #[arg(long)]
        with_digest: bool,
        /// Print encode throughput in bytes/second.
        #[arg(long)]
        bench: bool,
    },
    /// Reassemble the secret from share files or a manifest.
    Decode {
        /// Share files (.x2ds) and/or manifests (.x2dm) to read.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file for the reassembled secret.
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Print decode throughput in bytes/second.
        #[arg(long)]
        bench: bool,
    },
    /// Run the jam/observe campaign across all 81 adversary patterns.
    Simulate {
        /// Secret size in bits (must be even).
        #[arg(long)]
        secret_bits: usize,
        /// Random trials per pattern combination.
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Seed the pad source (requires the insecure gate).
        #[arg(long)]
        seed: Option<u64>,
        /// Enumerate all secrets and pad assignments instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        /// Allow seeded pads.
        #[arg(long)]
        insecure_test_mode: bool,
    },
    /// Exhaustively verify the privacy claims at a small bit width.
    Audit {
        /// Secret size in bits; 2 or 4.
        #[arg(long)]
        secret_bits: usize,
        /// Restrict to selected cases, each given as "r,c". Repeatable.
        #[arg(long = "cases")]
        cases: Vec<String>,
    },
    /// Run the embedded golden fixtures and the exhaustive 2-bit suite.
    Selftest,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn io_failure(context: &str, err: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("{context}: {err}"))
}

fn insecure_gate_enabled(flag: bool) -> bool {
    flag || std::env::var(INSECURE_ENV).is_ok_and(|v| v == "1")
}

fn pad_source(seed: Option<u64>, insecure: bool) -> Result<(PadSource, bool), Failure> {
    let insecure = insecure_gate_enabled(insecure);
    match seed {
        Some(seed) => {
            if !insecure {
                return Err(Failure::new(
                    EXIT_GATE,
                    "--seed requires --insecure-test-mode (or X2DS_INSECURE_TEST=1); \
                     seeded pads are for test fixtures only",
                ));
            }
            Ok((PadSource::SeededTest { seed }, true))
        }
        None => Ok((PadSource::Secure, insecure)),
    }
}

fn cmd_encode(
    input: &Path,
    out_dir: &Path,
    seed: Option<u64>,
    insecure: bool,
    with_digest: bool,
    bench: bool,
) -> Result<(), Failure> {
    let (source, insecure) = pad_source(seed, insecure)?;
    let mut gen = source
        .generator(insecure)
        .map_err(|e| Failure::new(EXIT_GATE, e.to_string()))?;

    let bytes = fs::read(input).map_err(|e| io_failure("reading input", e))?;
    let secret = BitString::from_bytes(bytes.clone(), 8 * bytes.len());
    let (padded, _, _) = split_secret(&secret);
    let pads = gen.pads2(padded.half_length());

    let started = Instant::now();
    let matrix = enc2(&padded, &pads).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    let encode_time = started.elapsed();

    fs::create_dir_all(out_dir).map_err(|e| io_failure("creating output directory", e))?;
    let mut entries = Vec::with_capacity(9);
    for ((i, j), share) in matrix.entries() {
        let name = share_file_name(i, j);
        let encoded = x2ds_core::encode_share(share, i, j, secret.len() as u64)
            .map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
        fs::write(out_dir.join(&name), encoded)
            .map_err(|e| io_failure("writing share file", e))?;
        entries.push(ManifestShare { i, j, path: name });
    }
    let manifest = Manifest {
        version: u8::from(x2ds_core::FORMAT_VERSION),
        original_length_bits: secret.len() as u64,
        shares: entries,
        digest: with_digest.then(|| x2ds_core::secret_digest(&bytes)),
    };
    fs::write(out_dir.join(MANIFEST_NAME), manifest.to_toml())
        .map_err(|e| io_failure("writing manifest", e))?;

    println!(
        "encoded {} bytes into 9 shares under {}",
        bytes.len(),
        out_dir.display()
    );
    if bench {
        let secs = encode_time.as_secs_f64();
        let rate = if secs > 0.0 { bytes.len() as f64 / secs } else { f64::INFINITY };
        println!("encode throughput: {rate:.0} bytes/s ({secs:.6} s)");
    }
    Ok(())
}

fn collect_shares(
    inputs: &[PathBuf],
) -> Result<(BTreeMap<(u8, u8), BitString>, u64, Option<String>), Failure> {
    let mut share_paths: Vec<PathBuf> = Vec::new();
    let mut digest: Option<String> = None;
    let mut manifest_length: Option<u64> = None;
    for input in inputs {
        if input.extension().is_some_and(|e| e == "x2dm") {
            let text = fs::read_to_string(input).map_err(|e| io_failure("reading manifest", e))?;
            let manifest =
                Manifest::from_toml(&text).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
            let base = input.parent().unwrap_or_else(|| Path::new("."));
            for entry in &manifest.shares {
                share_paths.push(base.join(&entry.path));
            }
            manifest_length = Some(manifest.original_length_bits);
            if manifest.digest.is_some() {
                digest = manifest.digest.clone();
            }
        } else {
            share_paths.push(input.clone());
        }
    }

    let mut shares: BTreeMap<(u8, u8), BitString> = BTreeMap::new();
    let mut original_length: Option<u64> = manifest_length;
    for path in &share_paths {
        let bytes = fs::read(path).map_err(|e| io_failure("reading share file", e))?;
        let record = x2ds_core::decode_share(&bytes)
            .map_err(|e| Failure::new(EXIT_FAIL, format!("{}: {e}", path.display())))?;
        match original_length {
            None => original_length = Some(record.original_length_bits),
            Some(l) if l != record.original_length_bits => {
                return Err(Failure::new(
                    EXIT_INCONSISTENT,
                    format!(
                        "{}: original length {} bits disagrees with {} bits",
                        path.display(),
                        record.original_length_bits,
                        l
                    ),
                ));
            }
            _ => {}
        }
        let pos = (record.route, record.bs);
        if let Some(existing) = shares.get(&pos) {
            if *existing != record.share {
                return Err(Failure::new(
                    EXIT_INCONSISTENT,
                    format!("duplicate share ({},{}) with differing payloads", pos.0, pos.1),
                ));
            }
        } else {
            shares.insert(pos, record.share);
        }
    }
    let original_length =
        original_length.ok_or_else(|| Failure::new(EXIT_FAIL, "no shares supplied"))?;
    Ok((shares, original_length, digest))
}

fn cmd_decode(inputs: &[PathBuf], output: &Path, bench: bool) -> Result<(), Failure> {
    let (shares, original_length_bits, digest) = collect_shares(inputs)?;
    let started = Instant::now();
    let (secret, pattern) = recover_from_shares(&shares, original_length_bits as usize)
        .map_err(|e| match &e {
            CodecError::InsufficientShares(missing) => Failure::new(
                EXIT_INSUFFICIENT,
                format!(
                    "insufficient shares: no surviving 2x2 sub-grid; missing positions: {}",
                    missing
                        .iter()
                        .map(|(i, j)| format!("({i},{j})"))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            ),
            CodecError::Inconsistent(_) => Failure::new(EXIT_INCONSISTENT, e.to_string()),
            _ => Failure::new(EXIT_FAIL, e.to_string()),
        })?;
    let decode_time = started.elapsed();

    let bytes = secret.as_bytes().to_vec();
    if let Some(expected) = digest {
        let actual = x2ds_core::secret_digest(&bytes);
        if actual != expected {
            return Err(Failure::new(
                EXIT_INCONSISTENT,
                format!("digest mismatch: manifest has {expected}, decoded secret has {actual}"),
            ));
        }
    }
    fs::write(output, &bytes).map_err(|e| io_failure("writing output", e))?;
    println!(
        "recovered {} bytes; tolerated failure pattern (r={}, c={})",
        bytes.len(),
        pattern.route(),
        pattern.bs()
    );
    if bench {
        let secs = decode_time.as_secs_f64();
        let rate = if secs > 0.0 { bytes.len() as f64 / secs } else { f64::INFINITY };
        println!("decode throughput: {rate:.0} bytes/s ({secs:.6} s)");
    }
    Ok(())
}

fn cmd_simulate(
    secret_bits: usize,
    trials: u32,
    seed: Option<u64>,
    exhaustive: bool,
    insecure: bool,
) -> Result<(), Failure> {
    if secret_bits % 2 != 0 {
        return Err(Failure::new(EXIT_FAIL, "secret bits must be even"));
    }
    let pads = if exhaustive {
        CampaignPads::Exhaustive
    } else {
        let (source, insecure) = pad_source(seed, insecure)?;
        CampaignPads::Random {
            trials,
            source,
            insecure_test_mode: insecure,
        }
    };
    let report = run_campaign(secret_bits, pads).map_err(|e| match e {
        SimError::Randomness(err) => Failure::new(EXIT_GATE, err.to_string()),
        other => Failure::new(EXIT_FAIL, other.to_string()),
    })?;
    println!("{report}");
    Ok(())
}

fn parse_case(text: &str) -> Result<FailurePattern, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || Failure::new(EXIT_FAIL, format!("bad case {text:?}; expected \"r,c\" with indices 1..=3"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let r: u8 = parts[0].trim().parse().map_err(|_| bad())?;
    let c: u8 = parts[1].trim().parse().map_err(|_| bad())?;
    FailurePattern::new(r, c).map_err(|_| bad())
}

fn cmd_audit(secret_bits: usize, cases: &[String]) -> Result<(), Failure> {
    if secret_bits != 2 && secret_bits != 4 {
        return Err(Failure::new(
            EXIT_FAIL,
            "exhaustive audit is tractable only for --secret-bits 2 or 4",
        ));
    }
    let filter = cases
        .iter()
        .map(|c| parse_case(c))
        .collect::<Result<Vec<_>, _>>()?;
    let filter = (!filter.is_empty()).then_some(filter);
    let report = audit_all_cases(secret_bits, filter.as_deref())
        .map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
    println!("{report}");
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_FAIL, "privacy audit failed"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode {
            input,
            out_dir,
            seed,
            insecure_test_mode,
            with_digest,
            bench,
        } => cmd_encode(input, out_dir, *seed, *insecure_test_mode, *with_digest, *bench),
        Command::Decode {
            inputs,
            output,
            bench,
        } => cmd_decode(inputs, output, *bench),
        Command::Simulate {
            secret_bits,
            trials,
            seed,
            exhaustive,
            insecure_test_mode,
        } => cmd_simulate(*secret_bits, *trials, *seed, *exhaustive, *insecure_test_mode),
        Command::Audit { secret_bits, cases } => cmd_audit(*secret_bits, cases),
        Command::Selftest => selftest::run().map_err(|msg| Failure::new(EXIT_FAIL, msg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
