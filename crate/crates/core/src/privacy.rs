//! Exhaustive verification of the scheme's information-theoretic claims at
//! small bit widths.
//!
//! Every audit enumerates all secrets and all pad assignments, counts the
//! resulting observation tuples per secret, and computes the exact mutual
//! information from the integer counts. "MI = 0" is decided by multiset
//! equality of the per-secret observation distributions and "MI = |S|" by
//! disjointness of their supports, so no floating-point epsilon is involved;
//! the floating-point value is reported alongside for the human-readable
//! report. Enumeration, never sampling.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bitstring::BitString;
use crate::codec::{
    enc1, enc2, split_secret, CodecError, FailurePattern, PadSet2, ShareMatrix,
};
use crate::randomness::{exhaustive_pads1, exhaustive_pads2, RandomnessError};

/// Exhaustive-enumeration bound for two-layer audits (2^(4|S|) pad space).
pub const MAX_TWO_LAYER_SECRET_BITS: usize = 4;
/// Exhaustive-enumeration bound for one-layer audits (2^|S| pad space).
pub const MAX_ONE_LAYER_SECRET_BITS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("secret bits must be even, got {0}")]
    OddSecretBits(usize),
    #[error("secret bits {0} exceeds the exhaustive audit bound of {1}")]
    TooLarge(usize, usize),
    #[error("share index {0} out of range 1..=3")]
    IndexOutOfRange(u8),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Randomness(#[from] RandomnessError),
}

/// The five distinct shares seen from one full row plus one full column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationSet {
    pattern: FailurePattern,
    shares: Vec<((u8, u8), BitString)>,
}

impl ObservationSet {
    pub fn pattern(&self) -> FailurePattern {
        self.pattern
    }

    /// Index-tagged shares in ascending `(i, j)` order; always 5 entries.
    pub fn shares(&self) -> &[((u8, u8), BitString)] {
        &self.shares
    }
}

/// Collects row `r` and column `c` of the matrix, counting `(r, c)` once.
pub fn build_observation(matrix: &ShareMatrix, pattern: FailurePattern) -> ObservationSet {
    let shares = matrix
        .entries()
        .filter(|((i, j), _)| *i == pattern.route() || *j == pattern.bs())
        .map(|(pos, share)| (pos, share.clone()))
        .collect();
    ObservationSet { pattern, shares }
}

/// Observation-tuple counts per secret value, from exhaustive enumeration.
///
/// Tuples are packed into a `u128` key (audit sizes keep them under 128
/// bits). Per-secret totals all equal the number of pad assignments.
#[derive(Debug, Default)]
pub struct JointDistribution {
    per_secret: BTreeMap<u64, BTreeMap<u128, u64>>,
}

impl JointDistribution {
    fn record(&mut self, secret: u64, key: u128) {
        *self
            .per_secret
            .entry(secret)
            .or_default()
            .entry(key)
            .or_insert(0) += 1;
    }

    pub fn assignments_per_secret(&self) -> u64 {
        self.per_secret
            .values()
            .next()
            .map(|m| m.values().sum())
            .unwrap_or(0)
    }

    /// Exact mutual information between the observation and a uniform secret.
    pub fn mutual_information(&self) -> MiValue {
        let n_secrets = self.per_secret.len() as u64;
        let per_total = self.assignments_per_secret();

        let first = self.per_secret.values().next();
        let exactly_zero = self
            .per_secret
            .values()
            .all(|m| Some(m) == first);

        let mut marginal: BTreeMap<u128, (u64, u64)> = BTreeMap::new(); // count, #secrets seen in
        for counts in self.per_secret.values() {
            for (&key, &c) in counts {
                let e = marginal.entry(key).or_insert((0, 0));
                e.0 += c;
                e.1 += 1;
            }
        }
        let exactly_max = marginal.values().all(|&(_, owners)| owners == 1);

        let total = (n_secrets * per_total) as f64;
        let mut bits = 0.0f64;
        for counts in self.per_secret.values() {
            for (key, &c) in counts {
                let p_joint = c as f64 / total;
                let p_obs_given_s = c as f64 / per_total as f64;
                let p_obs = marginal[key].0 as f64 / total;
                bits += p_joint * (p_obs_given_s / p_obs).log2();
            }
        }
        MiValue {
            bits,
            exactly_zero,
            exactly_max,
        }
    }
}

/// A mutual-information result with its exactness certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiValue {
    /// Floating-point MI in bits, for display only.
    pub bits: f64,
    /// True iff the per-secret observation multisets are identical (MI = 0).
    pub exactly_zero: bool,
    /// True iff observation supports are disjoint across secrets (MI = H(S)).
    pub exactly_max: bool,
}

impl fmt::Display for MiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exactly_zero {
            write!(f, "0 (exact)")
        } else if self.exactly_max {
            write!(f, "{} (exact max)", self.bits.round())
        } else {
            write!(f, "{:.6}", self.bits)
        }
    }
}

fn check_two_layer_bounds(secret_bits: usize) -> Result<(), AuditError> {
    if secret_bits % 2 != 0 {
        return Err(AuditError::OddSecretBits(secret_bits));
    }
    if secret_bits > MAX_TWO_LAYER_SECRET_BITS {
        return Err(AuditError::TooLarge(secret_bits, MAX_TWO_LAYER_SECRET_BITS));
    }
    Ok(())
}

fn check_one_layer_bounds(secret_bits: usize) -> Result<(), AuditError> {
    if secret_bits % 2 != 0 {
        return Err(AuditError::OddSecretBits(secret_bits));
    }
    if secret_bits > MAX_ONE_LAYER_SECRET_BITS {
        return Err(AuditError::TooLarge(secret_bits, MAX_ONE_LAYER_SECRET_BITS));
    }
    Ok(())
}

fn pack<'a>(shares: impl Iterator<Item = &'a BitString>) -> u128 {
    shares.fold(0u128, |key, s| {
        (key << s.len()) | s.to_u128().expect("audit shares fit in u128")
    })
}

/// Packs the row-plus-column observation without materializing it.
fn pack_observation(matrix: &ShareMatrix, pattern: FailurePattern) -> u128 {
    pack(
        matrix
            .entries()
            .filter(|((i, j), _)| *i == pattern.route() || *j == pattern.bs())
            .map(|(_, share)| share),
    )
}

/// Enumerates all secrets x all two-layer pad assignments.
fn enumerate_two_layer(
    secret_bits: usize,
    mut visit: impl FnMut(u64, &BitString, &BitString, &PadSet2, &ShareMatrix),
) -> Result<(), AuditError> {
    check_two_layer_bounds(secret_bits)?;
    let half = secret_bits / 2;
    for s in 0..1u64 << secret_bits {
        let secret = BitString::from_u128(u128::from(s), secret_bits).unwrap();
        let (padded, s1, s2) = split_secret(&secret);
        for pads in exhaustive_pads2(half)? {
            let matrix = enc2(&padded, &pads)?;
            visit(s, &s1, &s2, &pads, &matrix);
        }
    }
    Ok(())
}

/// Exact MI between the row-plus-column observation `X_{r,c}` and the secret.
pub fn exact_mutual_information(
    secret_bits: usize,
    pattern: FailurePattern,
) -> Result<MiValue, AuditError> {
    let mut jd = JointDistribution::default();
    enumerate_two_layer(secret_bits, |s, _, _, _, matrix| {
        jd.record(s, pack_observation(matrix, pattern));
    })?;
    Ok(jd.mutual_information())
}

/// Control: MI between the full nine-share matrix and the secret. The
/// converse of availability forces this to equal `secret_bits` exactly.
pub fn full_matrix_mutual_information(secret_bits: usize) -> Result<MiValue, AuditError> {
    let mut jd = JointDistribution::default();
    enumerate_two_layer(secret_bits, |s, _, _, _, matrix| {
        jd.record(s, pack(matrix.entries().map(|(_, share)| share)));
    })?;
    Ok(jd.mutual_information())
}

/// Exact MI between one one-layer share `E_j` and the secret.
pub fn single_share_audit(secret_bits: usize, share_index: u8) -> Result<MiValue, AuditError> {
    check_one_layer_bounds(secret_bits)?;
    if !(1..=3).contains(&share_index) {
        return Err(AuditError::IndexOutOfRange(share_index));
    }
    let half = secret_bits / 2;
    let mut jd = JointDistribution::default();
    for s in 0..1u64 << secret_bits {
        let secret = BitString::from_u128(u128::from(s), secret_bits).unwrap();
        let (padded, _, _) = split_secret(&secret);
        for pads in exhaustive_pads1(half)? {
            let shares = enc1(padded.payload(), &pads)?;
            jd.record(s, pack(std::iter::once(shares.share(share_index))));
        }
    }
    Ok(jd.mutual_information())
}

/// Control: MI between two one-layer shares jointly and the secret; any two
/// shares determine the secret, so this must equal `secret_bits` exactly.
pub fn two_share_audit(secret_bits: usize, j1: u8, j2: u8) -> Result<MiValue, AuditError> {
    check_one_layer_bounds(secret_bits)?;
    for j in [j1, j2] {
        if !(1..=3).contains(&j) {
            return Err(AuditError::IndexOutOfRange(j));
        }
    }
    if j1 == j2 {
        return Err(AuditError::Codec(CodecError::IdenticalIndices));
    }
    let half = secret_bits / 2;
    let mut jd = JointDistribution::default();
    for s in 0..1u64 << secret_bits {
        let secret = BitString::from_u128(u128::from(s), secret_bits).unwrap();
        let (padded, _, _) = split_secret(&secret);
        for pads in exhaustive_pads1(half)? {
            let shares = enc1(padded.payload(), &pads)?;
            jd.record(s, pack([shares.share(j1), shares.share(j2)].into_iter()));
        }
    }
    Ok(jd.mutual_information())
}

/// One symbol of a reduced observation tuple: a secret half or a pad.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    S1,
    S2,
    R(u8),
}

/// The per-case algebraic reductions of the raw five-share observation to
/// XOR combinations involving only the secret halves and independent pads.
pub fn reduced_tuple(pattern: FailurePattern) -> &'static [&'static [Term]] {
    use Term::*;
    match (pattern.route(), pattern.bs()) {
        (1, 1) => &[&[S2, R(2)], &[R(2), R(6)], &[S2, R(8)]],
        (2, 1) => &[&[S1, R(5)], &[S1, R(2), R(7)], &[S2, R(2)]],
        (3, 1) => &[&[S1, R(6)], &[S1, R(2), R(8)], &[S2, R(2)], &[S2, R(7)]],
        (1, 2) => &[&[S1, R(1)], &[S2, R(1), R(8)]],
        (2, 2) => &[&[S1, R(1)], &[S1, R(7)], &[S2, R(3)]],
        (3, 2) => &[&[S1, R(1)], &[S1, R(8)], &[S2, R(4)], &[S2, R(1), R(7)]],
        (1, 3) => &[&[S1, R(2)], &[S2, R(1)]],
        (2, 3) => &[&[S1, R(2)], &[S2, R(1)], &[S2, R(2), R(3)], &[S1, R(1), R(5)]],
        (3, 3) => &[
            &[S1, R(2)],
            &[S2, R(1)],
            &[S2, R(2), R(4)],
            &[R(1), R(3)],
            &[S1, R(1), R(6)],
            &[R(2), R(5)],
        ],
        _ => unreachable!("pattern indices validated at construction"),
    }
}

fn eval_terms(
    terms: &[Term],
    s1: &BitString,
    s2: &BitString,
    pads: &PadSet2,
) -> Result<BitString, AuditError> {
    let mut acc = BitString::zeros(s1.len());
    for term in terms {
        let v = match term {
            Term::S1 => s1,
            Term::S2 => s2,
            Term::R(k) => pads.r(*k as usize),
        };
        acc = acc.xor(v).map_err(CodecError::from)?;
    }
    Ok(acc)
}

/// Exact MI between the reduced tuple for `pattern` and the secret.
pub fn reduced_tuple_mutual_information(
    secret_bits: usize,
    pattern: FailurePattern,
) -> Result<MiValue, AuditError> {
    let tuple = reduced_tuple(pattern);
    let mut jd = JointDistribution::default();
    let mut failed = None;
    enumerate_two_layer(secret_bits, |s, s1, s2, pads, _| {
        if failed.is_some() {
            return;
        }
        let mut components = Vec::with_capacity(tuple.len());
        for terms in tuple {
            match eval_terms(terms, s1, s2, pads) {
                Ok(v) => components.push(v),
                Err(e) => {
                    failed = Some(e);
                    return;
                }
            }
        }
        jd.record(s, pack(components.iter()));
    })?;
    if let Some(e) = failed {
        return Err(e);
    }
    Ok(jd.mutual_information())
}

/// Validates the case reduction: both the raw five-share observation and the
/// reduced tuple must have exactly zero MI with the secret.
pub fn case_expression_check(
    secret_bits: usize,
    pattern: FailurePattern,
) -> Result<bool, AuditError> {
    let raw = exact_mutual_information(secret_bits, pattern)?;
    let reduced = reduced_tuple_mutual_information(secret_bits, pattern)?;
    Ok(raw.exactly_zero && reduced.exactly_zero)
}

/// Premise check: under exhaustive enumeration each pad `R_k` has a uniform
/// marginal, i.e. full entropy of `half_length` bits.
pub fn pad_marginals_uniform(half_length: usize) -> Result<bool, AuditError> {
    let mut counts: [BTreeMap<u128, u64>; 8] = Default::default();
    let mut total = 0u64;
    for pads in exhaustive_pads2(half_length)? {
        total += 1;
        for k in 1..=8usize {
            *counts[k - 1]
                .entry(pads.r(k).to_u128().expect("pad fits in u128"))
                .or_insert(0) += 1;
        }
    }
    let values = 1u64 << half_length;
    Ok(counts.iter().all(|m| {
        m.len() as u64 == values && m.values().all(|&c| c == total / values)
    }))
}

/// One line of the audit report.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub pattern: FailurePattern,
    pub raw: MiValue,
    pub reduced: MiValue,
}

impl CaseResult {
    pub fn pass(&self) -> bool {
        self.raw.exactly_zero && self.reduced.exactly_zero
    }
}

#[derive(Debug, Clone)]
pub struct SingleShareResult {
    pub share_index: u8,
    pub mi: MiValue,
}

/// The full audit: nine row-column cases, the three single-share checks,
/// the full-matrix control, and the pad-uniformity premise.
#[derive(Debug)]
pub struct AuditReport {
    pub secret_bits: usize,
    pub cases: Vec<CaseResult>,
    pub single_shares: Vec<SingleShareResult>,
    pub full_matrix: MiValue,
    pub pads_uniform: bool,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass())
            && self.single_shares.iter().all(|s| s.mi.exactly_zero)
            && self.full_matrix.exactly_max
            && self.pads_uniform
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "privacy audit, |S| = {} bits (exhaustive)", self.secret_bits)?;
        for case in &self.cases {
            writeln!(
                f,
                "case (r={},c={}): raw MI = {}, reduced MI = {} .. {}",
                case.pattern.route(),
                case.pattern.bs(),
                case.raw,
                case.reduced,
                if case.pass() { "pass" } else { "FAIL" }
            )?;
        }
        for s in &self.single_shares {
            writeln!(
                f,
                "single share E{}: MI = {} .. {}",
                s.share_index,
                s.mi,
                if s.mi.exactly_zero { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(
            f,
            "control full matrix: MI = {} .. {}",
            self.full_matrix,
            if self.full_matrix.exactly_max { "pass" } else { "FAIL" }
        )?;
        writeln!(
            f,
            "pad marginals uniform .. {}",
            if self.pads_uniform { "pass" } else { "FAIL" }
        )?;
        write!(f, "overall: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// Runs the complete audit, optionally restricted to selected cases.
///
/// All selected cases share a single enumeration pass, so the 4-bit audit
/// walks its 2^20 encodings once rather than once per case.
pub fn audit_all_cases(
    secret_bits: usize,
    case_filter: Option<&[FailurePattern]>,
) -> Result<AuditReport, AuditError> {
    check_two_layer_bounds(secret_bits)?;
    let selected: Vec<FailurePattern> = match case_filter {
        Some(cases) => cases.to_vec(),
        None => FailurePattern::all().collect(),
    };
    let mut raw: Vec<JointDistribution> =
        selected.iter().map(|_| JointDistribution::default()).collect();
    let mut reduced: Vec<JointDistribution> =
        selected.iter().map(|_| JointDistribution::default()).collect();
    // The batch path evaluates the reduced tuples over packed integers; the
    // bit-level evaluation stays in reduced_tuple_mutual_information as the
    // second route, cross-checked by case_expression_check.
    enumerate_two_layer(secret_bits, |s, s1, s2, pads, matrix| {
        let half = s1.len();
        let s1v = s1.to_u128().expect("audit halves fit in u128");
        let s2v = s2.to_u128().expect("audit halves fit in u128");
        let padv: [u128; 8] =
            std::array::from_fn(|k| pads.r(k + 1).to_u128().expect("pads fit in u128"));
        for (idx, &pattern) in selected.iter().enumerate() {
            raw[idx].record(s, pack_observation(matrix, pattern));
            let mut key = 0u128;
            for terms in reduced_tuple(pattern) {
                let mut v = 0u128;
                for term in terms.iter() {
                    v ^= match term {
                        Term::S1 => s1v,
                        Term::S2 => s2v,
                        Term::R(k) => padv[*k as usize - 1],
                    };
                }
                key = (key << half) | v;
            }
            reduced[idx].record(s, key);
        }
    })?;
    let cases = selected
        .iter()
        .zip(raw.iter().zip(&reduced))
        .map(|(&pattern, (r, x))| CaseResult {
            pattern,
            raw: r.mutual_information(),
            reduced: x.mutual_information(),
        })
        .collect();
    let single_shares = (1..=3u8)
        .map(|j| {
            Ok(SingleShareResult {
                share_index: j,
                mi: single_share_audit(secret_bits, j)?,
            })
        })
        .collect::<Result<Vec<_>, AuditError>>()?;
    Ok(AuditReport {
        secret_bits,
        cases,
        single_shares,
        full_matrix: full_matrix_mutual_information(secret_bits)?,
        pads_uniform: pad_marginals_uniform(secret_bits / 2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(r: u8, c: u8) -> FailurePattern {
        FailurePattern::new(r, c).unwrap()
    }

    #[test]
    fn observation_index_sets() {
        let secret: BitString = "1001".parse().unwrap();
        let (padded, _, _) = split_secret(&secret);
        let mut gen = crate::randomness::PadGenerator::seeded_for_tests(5);
        let m = enc2(&padded, &gen.pads2(2)).unwrap();

        let cases = [
            ((1, 1), vec![(1, 1), (1, 2), (1, 3), (2, 1), (3, 1)]),
            ((3, 3), vec![(1, 3), (2, 3), (3, 1), (3, 2), (3, 3)]),
            ((2, 1), vec![(1, 1), (2, 1), (2, 2), (2, 3), (3, 1)]),
        ];
        for ((r, c), expected) in cases {
            let obs = build_observation(&m, fp(r, c));
            let indices: Vec<(u8, u8)> = obs.shares().iter().map(|(pos, _)| *pos).collect();
            assert_eq!(indices, expected, "pattern ({r},{c})");
        }
    }

    #[test]
    fn bounds_enforced() {
        assert!(matches!(
            exact_mutual_information(3, fp(1, 1)),
            Err(AuditError::OddSecretBits(3))
        ));
        assert!(matches!(
            exact_mutual_information(6, fp(1, 1)),
            Err(AuditError::TooLarge(6, MAX_TWO_LAYER_SECRET_BITS))
        ));
        assert!(matches!(
            single_share_audit(10, 1),
            Err(AuditError::TooLarge(10, MAX_ONE_LAYER_SECRET_BITS))
        ));
        assert!(matches!(
            single_share_audit(2, 4),
            Err(AuditError::IndexOutOfRange(4))
        ));
    }

    #[test]
    fn case_1_1_is_zero_at_two_bits() {
        let mi = exact_mutual_information(2, fp(1, 1)).unwrap();
        assert!(mi.exactly_zero);
        assert_eq!(mi.bits, 0.0);
    }

    #[test]
    fn full_matrix_control_at_two_bits() {
        let mi = full_matrix_mutual_information(2).unwrap();
        assert!(mi.exactly_max);
        assert!(!mi.exactly_zero);
        assert!((mi.bits - 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_share_examples() {
        for j in 1..=3 {
            let mi = single_share_audit(2, j).unwrap();
            assert!(mi.exactly_zero, "E{j}");
        }
        let joint = two_share_audit(2, 1, 2).unwrap();
        assert!(joint.exactly_max);
        assert!((joint.bits - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_tuples_have_nine_cases() {
        for pattern in FailurePattern::all() {
            assert!(!reduced_tuple(pattern).is_empty());
        }
        assert_eq!(reduced_tuple(fp(3, 3)).len(), 6);
        assert_eq!(reduced_tuple(fp(1, 3)).len(), 2);
    }

    #[test]
    fn pad_marginals_uniform_small() {
        assert!(pad_marginals_uniform(1).unwrap());
        assert!(pad_marginals_uniform(0).unwrap());
    }

    // Sanity: a deliberately leaky observation must not report exact zero.
    #[test]
    fn leak_detector_is_not_vacuous() {
        let mut jd = JointDistribution::default();
        for s in 0..4u64 {
            jd.record(s, u128::from(s)); // observation equals the secret
        }
        let mi = jd.mutual_information();
        assert!(!mi.exactly_zero);
        assert!(mi.exactly_max);
        assert!((mi.bits - 2.0).abs() < 1e-9);
    }
}
