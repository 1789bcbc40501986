//! Encode/decode kernels for the one-layer and two-layer XOR schemes.
//!
//! One layer: a secret `S = S1 || S2` and two pads `R1, R2` produce three
//! shares, any two of which recover `S` while any single one is independent
//! of it. Two layers: the three intermediate shares are each re-encoded with
//! a fresh pad pair, yielding a 3x3 matrix `M[i][j]` where row `i` transits
//! route `i` and column `j` transits base station `j`. Losing one full row
//! and one full column leaves a decodable 2x2 sub-grid.
//!
//! All operations are pure; indices are 1-based everywhere.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitstring::{BitString, BitStringError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("payload length must be even, got {0} bits")]
    OddPayload(usize),
    #[error("pad length {got} bits does not match half payload length {expected}")]
    PadLength { expected: usize, got: usize },
    #[error("share lengths differ: {0} bits vs {1} bits")]
    ShareLength(usize, usize),
    #[error("share indices must be distinct")]
    IdenticalIndices,
    #[error("index {0} out of range 1..=3")]
    IndexOutOfRange(u8),
    #[error("original length {original} bits exceeds payload length {payload} bits")]
    OriginalLengthOutOfRange { original: usize, payload: usize },
    #[error("decoding set is missing share ({0},{1})")]
    MissingShare(u8, u8),
    #[error("insufficient shares: no complete 2x2 sub-grid; missing positions {0:?}")]
    InsufficientShares(Vec<(u8, u8)>),
    #[error("inconsistent redundant shares: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Bits(#[from] BitStringError),
}

/// A secret payload made even-length by at most one appended zero bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedSecret {
    payload: BitString,
    original_length: usize,
}

impl PaddedSecret {
    pub fn payload(&self) -> &BitString {
        &self.payload
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn half_length(&self) -> usize {
        self.payload.len() / 2
    }
}

/// The two encoder-private pads of the one-layer scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadSet1 {
    pub r1: BitString,
    pub r2: BitString,
}

/// The eight encoder-private pads of the two-layer scheme, indexed 1..=8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadSet2 {
    pads: [BitString; 8],
}

impl PadSet2 {
    pub fn new(pads: [BitString; 8]) -> Self {
        PadSet2 { pads }
    }

    /// Pad `R_k`, `k` in 1..=8.
    pub fn r(&self, k: usize) -> &BitString {
        &self.pads[k - 1]
    }

    /// The pad pair for the first encoding round.
    pub fn first_round(&self) -> PadSet1 {
        PadSet1 {
            r1: self.r(1).clone(),
            r2: self.r(2).clone(),
        }
    }

    /// The pad pair for re-encoding intermediate share `j` (column `j`).
    pub fn column_round(&self, j: u8) -> PadSet1 {
        let base = 2 * j as usize + 1;
        PadSet1 {
            r1: self.r(base).clone(),
            r2: self.r(base + 1).clone(),
        }
    }
}

/// The three shares of the one-layer scheme, indexed 1..=3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneLayerShares {
    e: [BitString; 3],
}

impl OneLayerShares {
    pub fn share(&self, j: u8) -> &BitString {
        &self.e[j as usize - 1]
    }
}

/// The 3x3 share grid: `get(i, j)` transits route `i` and base station `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareMatrix {
    m: [[BitString; 3]; 3],
    secret_original_length: usize,
}

impl ShareMatrix {
    pub fn get(&self, i: u8, j: u8) -> &BitString {
        &self.m[i as usize - 1][j as usize - 1]
    }

    pub fn secret_original_length(&self) -> usize {
        self.secret_original_length
    }

    pub fn share_length(&self) -> usize {
        self.m[0][0].len()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u8, u8), &BitString)> {
        (1..=3u8).flat_map(move |i| (1..=3u8).map(move |j| ((i, j), self.get(i, j))))
    }
}

/// Names the jammed route `r` and jammed base station `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FailurePattern {
    r: u8,
    c: u8,
}

impl FailurePattern {
    pub fn new(r: u8, c: u8) -> Result<Self, CodecError> {
        check_index(r)?;
        check_index(c)?;
        Ok(FailurePattern { r, c })
    }

    pub fn route(&self) -> u8 {
        self.r
    }

    pub fn bs(&self) -> u8 {
        self.c
    }

    pub fn all() -> impl Iterator<Item = FailurePattern> {
        (1..=3u8).flat_map(|r| (1..=3u8).map(move |c| FailurePattern { r, c }))
    }
}

/// The four shares surviving a failure pattern, tagged with their positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingSet {
    entries: BTreeMap<(u8, u8), BitString>,
}

impl DecodingSet {
    pub fn get(&self, i: u8, j: u8) -> Option<&BitString> {
        self.entries.get(&(i, j))
    }

    pub fn positions(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.entries.keys().copied()
    }
}

fn check_index(i: u8) -> Result<(), CodecError> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(CodecError::IndexOutOfRange(i))
    }
}

fn check_pad(pad: &BitString, half: usize) -> Result<(), CodecError> {
    if pad.len() != half {
        return Err(CodecError::PadLength {
            expected: half,
            got: pad.len(),
        });
    }
    Ok(())
}

/// Splits a secret into two equal halves, appending one zero bit when the
/// length is odd. Returns the padded secret and the two halves.
pub fn split_secret(s: &BitString) -> (PaddedSecret, BitString, BitString) {
    let original_length = s.len();
    let payload = if s.len() % 2 == 0 {
        s.clone()
    } else {
        let mut p = s.clone();
        p.push(false);
        p
    };
    let (s1, s2) = payload.halves().expect("payload length is even");
    (
        PaddedSecret {
            payload,
            original_length,
        },
        s1,
        s2,
    )
}

/// Inverse of [`split_secret`]: rejoins the halves and strips the pad bit.
pub fn join_secret(
    s1: &BitString,
    s2: &BitString,
    original_length: usize,
) -> Result<BitString, CodecError> {
    if s1.len() != s2.len() {
        return Err(CodecError::ShareLength(s1.len(), s2.len()));
    }
    let payload = s1.concat(s2);
    if original_length > payload.len() {
        return Err(CodecError::OriginalLengthOutOfRange {
            original: original_length,
            payload: payload.len(),
        });
    }
    Ok(payload.slice(0, original_length)?)
}

/// One-layer encoding: three shares from an even-length payload and two pads.
///
/// `E1 = (S2^R2)||R1`, `E2 = (S1^R1)||R2`, `E3 = (S1^R2)||(S2^R1)`.
pub fn enc1(payload: &BitString, pads: &PadSet1) -> Result<OneLayerShares, CodecError> {
    if payload.len() % 2 != 0 {
        return Err(CodecError::OddPayload(payload.len()));
    }
    let half = payload.len() / 2;
    check_pad(&pads.r1, half)?;
    check_pad(&pads.r2, half)?;
    let (s1, s2) = payload.halves()?;
    let e1 = s2.xor(&pads.r2)?.concat(&pads.r1);
    let e2 = s1.xor(&pads.r1)?.concat(&pads.r2);
    let e3 = s1.xor(&pads.r2)?.concat(&s2.xor(&pads.r1)?);
    Ok(OneLayerShares { e: [e1, e2, e3] })
}

/// One-layer decoding from any two distinct shares; returns `S1 || S2`.
pub fn dec1(a: (u8, &BitString), b: (u8, &BitString)) -> Result<BitString, CodecError> {
    let ((ia, ea), (ib, eb)) = if a.0 <= b.0 { (a, b) } else { (b, a) };
    check_index(ia)?;
    check_index(ib)?;
    if ia == ib {
        return Err(CodecError::IdenticalIndices);
    }
    if ea.len() != eb.len() {
        return Err(CodecError::ShareLength(ea.len(), eb.len()));
    }
    if ea.len() % 2 != 0 {
        return Err(CodecError::OddPayload(ea.len()));
    }
    let (a1, a2) = ea.halves()?;
    let (b1, b2) = eb.halves()?;
    let (s1, s2) = match (ia, ib) {
        (1, 2) => {
            let s1 = a2.xor(&b1)?;
            let s2 = a1.xor(&b2)?;
            (s1, s2)
        }
        (1, 3) => {
            let s2 = a2.xor(&b2)?;
            let s1 = s2.xor(&a1)?.xor(&b1)?;
            (s1, s2)
        }
        (2, 3) => {
            let s1 = a2.xor(&b1)?;
            let s2 = s1.xor(&a1)?.xor(&b2)?;
            (s1, s2)
        }
        _ => unreachable!("indices validated"),
    };
    Ok(s1.concat(&s2))
}

/// Two-layer encoding via the closed-form share expressions.
///
/// Column `j` equals the one-layer re-encoding of intermediate share `E_j`
/// with pads `(R_{2j+1}, R_{2j+2})`; see [`enc2_composed`] for that route.
pub fn enc2(padded: &PaddedSecret, pads: &PadSet2) -> Result<ShareMatrix, CodecError> {
    let half = padded.half_length();
    for k in 1..=8 {
        check_pad(pads.r(k), half)?;
    }
    let (s1, s2) = padded.payload().halves()?;
    let r = |k: usize| pads.r(k);

    let m11 = r(1).xor(r(4))?.concat(r(3));
    let m21 = s2.xor(r(2))?.xor(r(3))?.concat(r(4));
    let m31 = s2.xor(r(2))?.xor(r(4))?.concat(&r(1).xor(r(3))?);

    let m12 = r(2).xor(r(6))?.concat(r(5));
    let m22 = s1.xor(r(1))?.xor(r(5))?.concat(r(6));
    let m32 = s1.xor(r(1))?.xor(r(6))?.concat(&r(2).xor(r(5))?);

    let m13 = s2.xor(r(1))?.xor(r(8))?.concat(r(7));
    let m23 = s1.xor(r(2))?.xor(r(7))?.concat(r(8));
    let m33 = s1.xor(r(2))?.xor(r(8))?.concat(&s2.xor(r(1))?.xor(r(7))?);

    Ok(ShareMatrix {
        m: [[m11, m12, m13], [m21, m22, m23], [m31, m32, m33]],
        secret_original_length: padded.original_length(),
    })
}

/// Two-layer encoding as two sequential one-layer rounds. Bit-identical to
/// [`enc2`]; kept as the second algebraic route for equivalence checks.
pub fn enc2_composed(padded: &PaddedSecret, pads: &PadSet2) -> Result<ShareMatrix, CodecError> {
    let intermediate = enc1(padded.payload(), &pads.first_round())?;
    let mut m: [[BitString; 3]; 3] = Default::default();
    for j in 1..=3u8 {
        let col = enc1(intermediate.share(j), &pads.column_round(j))?;
        for i in 1..=3u8 {
            m[i as usize - 1][j as usize - 1] = col.share(i).clone();
        }
    }
    Ok(ShareMatrix {
        m,
        secret_original_length: padded.original_length(),
    })
}

/// The four shares `{M[i][j] : i != r, j != c}` surviving `failure`.
pub fn build_decoding_set(matrix: &ShareMatrix, failure: FailurePattern) -> DecodingSet {
    let entries = matrix
        .entries()
        .filter(|((i, j), _)| *i != failure.route() && *j != failure.bs())
        .map(|(pos, share)| (pos, share.clone()))
        .collect();
    DecodingSet { entries }
}

/// Two-layer decoding: recover each surviving column's intermediate share
/// from its two surviving rows, then decode the secret from the two
/// intermediates and strip the pad bit.
pub fn dec2(
    ds: &DecodingSet,
    failure: FailurePattern,
    original_length: usize,
) -> Result<BitString, CodecError> {
    let rows: Vec<u8> = (1..=3).filter(|&i| i != failure.route()).collect();
    let cols: Vec<u8> = (1..=3).filter(|&j| j != failure.bs()).collect();
    let fetch = |i: u8, j: u8| ds.get(i, j).ok_or(CodecError::MissingShare(i, j));
    let mut intermediates = Vec::with_capacity(2);
    for &j in &cols {
        let e = dec1((rows[0], fetch(rows[0], j)?), (rows[1], fetch(rows[1], j)?))?;
        intermediates.push((j, e));
    }
    let payload = dec1(
        (intermediates[0].0, &intermediates[0].1),
        (intermediates[1].0, &intermediates[1].1),
    )?;
    if original_length > payload.len() {
        return Err(CodecError::OriginalLengthOutOfRange {
            original: original_length,
            payload: payload.len(),
        });
    }
    Ok(payload.slice(0, original_length)?)
}

/// Decodes from an arbitrary set of position-tagged shares.
///
/// Picks the lexicographically smallest tolerated failure pattern `(r, c)`
/// whose full 2x2 sub-grid is present, decodes it, and then cross-checks all
/// redundant shares: every pair within a column must agree on the column's
/// intermediate share and every intermediate pair must agree on the payload.
/// Returns the secret and the pattern that was effectively tolerated.
pub fn recover_from_shares(
    shares: &BTreeMap<(u8, u8), BitString>,
    original_length: usize,
) -> Result<(BitString, FailurePattern), CodecError> {
    let mut len: Option<usize> = None;
    for (&(i, j), share) in shares {
        check_index(i)?;
        check_index(j)?;
        match len {
            None => len = Some(share.len()),
            Some(l) if l != share.len() => {
                return Err(CodecError::ShareLength(l, share.len()));
            }
            _ => {}
        }
    }

    let pattern = FailurePattern::all()
        .find(|f| {
            (1..=3u8)
                .filter(|&i| i != f.route())
                .all(|i| (1..=3u8).filter(|&j| j != f.bs()).all(|j| shares.contains_key(&(i, j))))
        })
        .ok_or_else(|| {
            let missing: Vec<(u8, u8)> = (1..=3u8)
                .flat_map(|i| (1..=3u8).map(move |j| (i, j)))
                .filter(|pos| !shares.contains_key(pos))
                .collect();
            CodecError::InsufficientShares(missing)
        })?;

    let ds = DecodingSet {
        entries: shares
            .iter()
            .filter(|((i, j), _)| *i != pattern.route() && *j != pattern.bs())
            .map(|(&pos, share)| (pos, share.clone()))
            .collect(),
    };
    let secret = dec2(&ds, pattern, original_length)?;

    // Redundant-share consistency: all column pairs and intermediate pairs
    // must reconstruct the same values.
    let mut intermediates: BTreeMap<u8, BitString> = BTreeMap::new();
    for j in 1..=3u8 {
        let col: Vec<(u8, &BitString)> = (1..=3u8)
            .filter_map(|i| shares.get(&(i, j)).map(|s| (i, s)))
            .collect();
        for a in 0..col.len() {
            for b in a + 1..col.len() {
                let e = dec1(col[a], col[b])?;
                match intermediates.get(&j) {
                    None => {
                        intermediates.insert(j, e);
                    }
                    Some(prev) if *prev != e => {
                        return Err(CodecError::Inconsistent(format!(
                            "column {j} share pairs disagree on the intermediate share"
                        )));
                    }
                    _ => {}
                }
            }
        }
    }
    let ints: Vec<(u8, &BitString)> = intermediates.iter().map(|(&j, e)| (j, e)).collect();
    for a in 0..ints.len() {
        for b in a + 1..ints.len() {
            let payload = dec1(ints[a], ints[b])?;
            let candidate = payload.slice(0, original_length.min(payload.len()))?;
            if candidate != secret {
                return Err(CodecError::Inconsistent(format!(
                    "intermediate shares {} and {} disagree on the secret",
                    ints[a].0, ints[b].0
                )));
            }
        }
    }

    Ok((secret, pattern))
}
