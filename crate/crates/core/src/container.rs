//! Bit-exact share file format and the share-set manifest.
//!
//! Share file layout (all multi-byte integers big-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "X2DS"
//! 4       1     version (1)
//! 5       1     route index i (1..=3)
//! 6       1     base-station index j (1..=3)
//! 7       8     original secret length in bits
//! 15      8     payload length in bits
//! 23      n     payload, n = ceil(payload_length / 8), MSB-first,
//!               unused low-order bits of the final byte zero
//! ```
//!
//! Pads are never serialized in any format; only shares and lengths travel.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bitstring::BitString;

pub const MAGIC: [u8; 4] = *b"X2DS";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 23;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContainerError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated")]
    Truncated,
    #[error("trailing bytes after payload")]
    TrailingBytes,
    #[error("index {0} out of range 1..=3")]
    IndexOutOfRange(u8),
    #[error("nonzero padding bits in final payload byte")]
    NonzeroPadBits,
    #[error("share length {0} bits is odd")]
    OddShareLength(usize),
    #[error("manifest parse error: {0}")]
    ManifestParse(String),
}

/// A decoded share file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareRecord {
    pub share: BitString,
    pub route: u8,
    pub bs: u8,
    pub original_length_bits: u64,
}

fn check_index(i: u8) -> Result<(), ContainerError> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(ContainerError::IndexOutOfRange(i))
    }
}

/// Serializes one share with its position and the secret's bit length.
pub fn encode_share(
    share: &BitString,
    route: u8,
    bs: u8,
    original_length_bits: u64,
) -> Result<Vec<u8>, ContainerError> {
    check_index(route)?;
    check_index(bs)?;
    if share.len() % 2 != 0 {
        return Err(ContainerError::OddShareLength(share.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + share.as_bytes().len());
    out.extend_from_slice(&MAGIC);
    out.push(FORMAT_VERSION);
    out.push(route);
    out.push(bs);
    out.extend_from_slice(&original_length_bits.to_be_bytes());
    out.extend_from_slice(&(share.len() as u64).to_be_bytes());
    out.extend_from_slice(share.as_bytes());
    Ok(out)
}

/// Strict inverse of [`encode_share`].
pub fn decode_share(bytes: &[u8]) -> Result<ShareRecord, ContainerError> {
    if bytes.len() < 4 {
        return Err(ContainerError::Truncated);
    }
    if bytes[..4] != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(ContainerError::Truncated);
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(ContainerError::UnsupportedVersion(bytes[4]));
    }
    let route = bytes[5];
    let bs = bytes[6];
    check_index(route)?;
    check_index(bs)?;
    let original_length_bits = u64::from_be_bytes(bytes[7..15].try_into().unwrap());
    let payload_length = u64::from_be_bytes(bytes[15..23].try_into().unwrap()) as usize;
    let payload_bytes = payload_length.div_ceil(8);
    if bytes.len() < HEADER_LEN + payload_bytes {
        return Err(ContainerError::Truncated);
    }
    if bytes.len() > HEADER_LEN + payload_bytes {
        return Err(ContainerError::TrailingBytes);
    }
    let payload = &bytes[HEADER_LEN..];
    let rem = payload_length % 8;
    if rem != 0 && payload[payload_bytes - 1] & (0xffu8 >> rem) != 0 {
        return Err(ContainerError::NonzeroPadBits);
    }
    Ok(ShareRecord {
        share: BitString::from_bytes(payload.to_vec(), payload_length),
        route,
        bs,
        original_length_bits,
    })
}

/// The manifest written next to the nine share files. TOML on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u8,
    pub original_length_bits: u64,
    pub shares: Vec<ManifestShare>,
    /// Optional algorithm-tagged digest of the original secret, e.g.
    /// `sha256:<hex>`. Off by default: a cleartext digest of the secret
    /// leaks a predicate of it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestShare {
    pub i: u8,
    pub j: u8,
    pub path: String,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn from_toml(s: &str) -> Result<Self, ContainerError> {
        toml::from_str(s).map_err(|e| ContainerError::ManifestParse(e.to_string()))
    }
}

/// `sha256:<hex>` digest of the original secret bytes.
pub fn secret_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    // Golden bytes for share 1110 at (1,1), original length 4 bits.
    const GOLDEN: [u8; 24] = [
        0x58, 0x32, 0x44, 0x53, // "X2DS"
        0x01, 0x01, 0x01, // version, i, j
        0, 0, 0, 0, 0, 0, 0, 4, // original length
        0, 0, 0, 0, 0, 0, 0, 4, // payload length
        0xe0, // 1110 0000
    ];

    #[test]
    fn golden_layout() {
        let encoded = encode_share(&bs("1110"), 1, 1, 4).unwrap();
        assert_eq!(encoded, GOLDEN);
        let rec = decode_share(&GOLDEN).unwrap();
        assert_eq!(rec.share, bs("1110"));
        assert_eq!((rec.route, rec.bs, rec.original_length_bits), (1, 1, 4));
    }

    #[test]
    fn empty_share() {
        let encoded = encode_share(&bs(""), 3, 3, 0).unwrap();
        assert_eq!(encoded.len(), 23);
        let rec = decode_share(&encoded).unwrap();
        assert!(rec.share.is_empty());
        assert_eq!((rec.route, rec.bs), (3, 3));
    }

    #[test]
    fn decode_rejections() {
        let mut bad = GOLDEN;
        bad[0] = b'Y';
        assert_eq!(decode_share(&bad), Err(ContainerError::BadMagic));

        let mut bad = GOLDEN;
        bad[4] = 2;
        assert_eq!(decode_share(&bad), Err(ContainerError::UnsupportedVersion(2)));

        assert_eq!(decode_share(&GOLDEN[..23]), Err(ContainerError::Truncated));
        assert_eq!(decode_share(&GOLDEN[..2]), Err(ContainerError::Truncated));

        let mut long = GOLDEN.to_vec();
        long.push(0);
        assert_eq!(decode_share(&long), Err(ContainerError::TrailingBytes));

        let mut bad = GOLDEN;
        bad[5] = 0;
        assert_eq!(decode_share(&bad), Err(ContainerError::IndexOutOfRange(0)));

        let mut bad = GOLDEN;
        bad[23] = 0xe1; // nonzero bit in the pad region
        assert_eq!(decode_share(&bad), Err(ContainerError::NonzeroPadBits));
    }

    #[test]
    fn odd_share_rejected_on_write() {
        assert_eq!(
            encode_share(&bs("111"), 1, 1, 3),
            Err(ContainerError::OddShareLength(3))
        );
    }

    #[test]
    fn manifest_roundtrip() {
        let m = Manifest {
            version: 1,
            original_length_bits: 32,
            shares: vec![
                ManifestShare { i: 1, j: 1, path: "share_i1_j1.x2ds".into() },
                ManifestShare { i: 3, j: 2, path: "share_i3_j2.x2ds".into() },
            ],
            digest: None,
        };
        let text = m.to_toml();
        assert!(text.contains("original_length_bits = 32"));
        assert!(!text.contains("digest"));
        assert_eq!(Manifest::from_toml(&text).unwrap(), m);

        let with_digest = Manifest {
            digest: Some(secret_digest(b"abc")),
            ..m
        };
        let text = with_digest.to_toml();
        assert!(text.contains("digest = \"sha256:"));
        assert_eq!(Manifest::from_toml(&text).unwrap(), with_digest);
        assert!(Manifest::from_toml("not = [valid").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            secret_digest(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
