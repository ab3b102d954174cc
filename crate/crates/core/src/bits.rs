//! Fixed-length bit strings for challenges, commitment randomness and
//! signature nonces.
//!
//! Bits are indexed most-significant first: bit `i` lives in byte `i / 8`
//! at position `7 - (i % 8)`. Unused trailing bits of the last byte are
//! always zero, so byte equality is string equality.

use num_bigint::BigUint;
use rand::Rng;

/// An immutable bit string of known length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitString {
    /// Builds a bit string from raw bytes, masking any trailing bits.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Self {
        assert!(bit_len <= bytes.len() * 8, "bit length exceeds buffer");
        let n = bit_len.div_ceil(8);
        let mut bytes = bytes[..n].to_vec();
        if bit_len % 8 != 0 {
            let keep = bit_len % 8;
            let mask = 0xffu8 << (8 - keep);
            if let Some(last) = bytes.last_mut() {
                *last &= mask;
            }
        }
        BitString { bytes, bit_len }
    }

    /// The all-zero string.
    pub fn zero(bit_len: usize) -> Self {
        BitString {
            bytes: vec![0; bit_len.div_ceil(8)],
            bit_len,
        }
    }

    /// Draws a uniform bit string.
    pub fn random<R: Rng + ?Sized>(bit_len: usize, rng: &mut R) -> Self {
        let mut bytes = vec![0u8; bit_len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::from_bytes(&bytes, bit_len)
    }

    /// Extracts `bit_len` bits starting at `start_bit` from a byte stream.
    ///
    /// Used to split an expanded oracle output into disjoint slices.
    pub fn from_stream_slice(stream: &[u8], start_bit: usize, bit_len: usize) -> Self {
        assert!(
            start_bit + bit_len <= stream.len() * 8,
            "slice out of range"
        );
        let mut out = vec![0u8; bit_len.div_ceil(8)];
        for i in 0..bit_len {
            let j = start_bit + i;
            let bit = (stream[j / 8] >> (7 - (j % 8))) & 1;
            out[i / 8] |= bit << (7 - (i % 8));
        }
        BitString {
            bytes: out,
            bit_len,
        }
    }

    pub fn bit_len(&self) -> usize {
        self.bit_len
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Bit `i`, most-significant first.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.bit_len);
        (self.bytes[i / 8] >> (7 - (i % 8))) & 1
    }

    /// The string read as an unsigned big-endian integer.
    pub fn to_biguint(&self) -> BigUint {
        let pad = self.bytes.len() * 8 - self.bit_len;
        BigUint::from_bytes_be(&self.bytes) >> pad
    }

    /// Same as [`to_biguint`](Self::to_biguint) for strings of at most 128 bits.
    pub fn to_u128(&self) -> u128 {
        assert!(self.bit_len <= 128, "bit string too long for u128");
        let mut v: u128 = 0;
        for i in 0..self.bit_len {
            v = (v << 1) | u128::from(self.bit(i));
        }
        v
    }

    /// Encodes a non-negative integer as a `bit_len`-bit string.
    ///
    /// Panics if the value does not fit.
    pub fn from_biguint(value: &BigUint, bit_len: usize) -> Self {
        assert!(
            value.bits() as usize <= bit_len,
            "value does not fit bit length"
        );
        let pad = bit_len.div_ceil(8) * 8 - bit_len;
        let shifted = value << pad;
        let mut bytes = shifted.to_bytes_be();
        let n = bit_len.div_ceil(8);
        while bytes.len() < n {
            bytes.insert(0, 0);
        }
        BitString { bytes, bit_len }
    }

    pub fn from_u128(value: u128, bit_len: usize) -> Self {
        Self::from_biguint(&BigUint::from(value), bit_len)
    }

    /// Concatenates the bits of `self` and `other`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let bit_len = self.bit_len + other.bit_len;
        let mut out = vec![0u8; bit_len.div_ceil(8)];
        for i in 0..self.bit_len {
            out[i / 8] |= self.bit(i) << (7 - (i % 8));
        }
        for i in 0..other.bit_len {
            let j = self.bit_len + i;
            out[j / 8] |= other.bit(i) << (7 - (j % 8));
        }
        BitString {
            bytes: out,
            bit_len,
        }
    }
}

impl std::fmt::Debug for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitString({} bits, ", self.bit_len)?;
        for b in &self.bytes {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}
