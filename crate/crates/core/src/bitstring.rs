//! Fixed-length bit sequences: the payload type for secrets, pads, and shares.
//!
//! Bits are packed MSB-first: bit 0 of the sequence is the most significant
//! bit of byte 0. Unused low-order bits of the final byte are always zero,
//! so equality and ordering can work directly on the packed bytes.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitStringError {
    #[error("length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },
    #[error("bit range {start}..{end} out of bounds for {len} bits")]
    RangeOutOfBounds { start: usize, end: usize, len: usize },
    #[error("length {0} is odd, cannot split into halves")]
    OddLength(usize),
    #[error("invalid character {0:?} in bit string literal")]
    InvalidBitChar(char),
    #[error("value does not fit in {0} bits")]
    ValueTooWide(usize),
    #[error("bit string of {0} bits does not fit in a u128")]
    TooWideForInteger(usize),
}

/// A finite sequence of bits with an explicit length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bit_len: usize,
    bytes: Vec<u8>,
}

fn mask_tail(bytes: &mut [u8], bit_len: usize) {
    let rem = bit_len % 8;
    if rem != 0 {
        if let Some(last) = bytes.last_mut() {
            *last &= 0xffu8 << (8 - rem);
        }
    }
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(bit_len: usize) -> Self {
        BitString {
            bit_len,
            bytes: vec![0u8; bit_len.div_ceil(8)],
        }
    }

    /// Takes ownership of packed bytes. Surplus low-order bits of the final
    /// byte are cleared so the zero-tail invariant holds.
    pub fn from_bytes(mut bytes: Vec<u8>, bit_len: usize) -> Self {
        assert_eq!(
            bytes.len(),
            bit_len.div_ceil(8),
            "byte count must match bit length"
        );
        mask_tail(&mut bytes, bit_len);
        BitString { bit_len, bytes }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::new();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Builds a bit string of `bit_len` bits from the low `bit_len` bits of
    /// `value`, most significant bit first.
    pub fn from_u128(value: u128, bit_len: usize) -> Result<Self, BitStringError> {
        if bit_len < 128 && value >> bit_len != 0 {
            return Err(BitStringError::ValueTooWide(bit_len));
        }
        let mut out = Self::zeros(bit_len);
        for k in 0..bit_len {
            if value >> (bit_len - 1 - k) & 1 == 1 {
                out.set(k, true);
            }
        }
        Ok(out)
    }

    pub fn to_u128(&self) -> Result<u128, BitStringError> {
        if self.bit_len > 128 {
            return Err(BitStringError::TooWideForInteger(self.bit_len));
        }
        let mut v = 0u128;
        for k in 0..self.bit_len {
            v = (v << 1) | u128::from(self.get(k).unwrap());
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn get(&self, idx: usize) -> Option<bool> {
        if idx >= self.bit_len {
            return None;
        }
        Some(self.bytes[idx / 8] & (0x80 >> (idx % 8)) != 0)
    }

    pub fn set(&mut self, idx: usize, bit: bool) {
        assert!(idx < self.bit_len, "bit index out of range");
        let mask = 0x80u8 >> (idx % 8);
        if bit {
            self.bytes[idx / 8] |= mask;
        } else {
            self.bytes[idx / 8] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.bit_len % 8 == 0 {
            self.bytes.push(0);
        }
        self.bit_len += 1;
        self.set(self.bit_len - 1, bit);
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.bit_len).map(|k| self.get(k).unwrap())
    }

    /// Bitwise XOR. Defined only for equal lengths; whole-byte fast path.
    pub fn xor(&self, other: &BitString) -> Result<BitString, BitStringError> {
        if self.bit_len != other.bit_len {
            return Err(BitStringError::LengthMismatch {
                left: self.bit_len,
                right: other.bit_len,
            });
        }
        let bytes = self
            .bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitString {
            bit_len: self.bit_len,
            bytes,
        })
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        if self.bit_len % 8 == 0 {
            let mut bytes = self.bytes.clone();
            bytes.extend_from_slice(&other.bytes);
            return BitString {
                bit_len: self.bit_len + other.bit_len,
                bytes,
            };
        }
        let mut out = self.clone();
        for b in other.iter_bits() {
            out.push(b);
        }
        out
    }

    /// Copies out the bit range `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BitString, BitStringError> {
        if start > end || end > self.bit_len {
            return Err(BitStringError::RangeOutOfBounds {
                start,
                end,
                len: self.bit_len,
            });
        }
        let out_len = end - start;
        if start % 8 == 0 {
            let bytes = self.bytes[start / 8..start / 8 + out_len.div_ceil(8)].to_vec();
            return Ok(BitString::from_bytes(bytes, out_len));
        }
        let mut out = BitString::zeros(out_len);
        for k in 0..out_len {
            out.set(k, self.get(start + k).unwrap());
        }
        Ok(out)
    }

    /// Splits an even-length string into its two halves.
    pub fn halves(&self) -> Result<(BitString, BitString), BitStringError> {
        if self.bit_len % 2 != 0 {
            return Err(BitStringError::OddLength(self.bit_len));
        }
        let mid = self.bit_len / 2;
        Ok((self.slice(0, mid)?, self.slice(mid, self.bit_len)?))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = BitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(BitStringError::InvalidBitChar(other)),
            }
        }
        Ok(out)
    }
}
