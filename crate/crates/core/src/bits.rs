// SPDX-License-Identifier: Apache-2.0

//! Packed bit sequences, MSB-first within each byte. This is the wire format
//! of every emitted bitstream and every raw-bit file the analysis side reads.

use std::io::{Read, Write};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitBuf {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Wraps packed bytes; `len` may trim trailing pad bits of the last byte.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Self {
        assert!(len <= bytes.len() * 8);
        BitBuf { bytes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        let slot = self.len % 8;
        if slot == 0 {
            self.bytes.push(0);
        }
        if bit != 0 {
            *self.bytes.last_mut().unwrap() |= 0x80 >> slot;
        }
        self.len += 1;
    }

    pub fn get(&self, idx: usize) -> u8 {
        assert!(idx < self.len);
        (self.bytes[idx / 8] >> (7 - idx % 8)) & 1
    }

    pub fn extend(&mut self, other: &BitBuf) {
        if self.len.is_multiple_of(8) {
            // Byte-aligned fast path (cycle outputs are whole bytes).
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
            return;
        }
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    /// Packed bytes; the unused low-order bits of the final byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn ones(&self) -> usize {
        // Pad bits are zero, so popcount over whole bytes is exact.
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Unpacks into one byte per bit (0 or 1), for shuffle-style consumers.
    pub fn to_bit_bytes(&self) -> Vec<u8> {
        self.iter().collect()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&self.bytes)
    }

    pub fn read_from_file(path: &Path, max_bits: Option<usize>) -> std::io::Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut len = bytes.len() * 8;
        if let Some(cap) = max_bits {
            if cap < len {
                len = cap;
                bytes.truncate(cap.div_ceil(8));
                // Zero the pad bits so popcounts stay exact.
                if cap % 8 != 0 {
                    let last = bytes.last_mut().unwrap();
                    *last &= 0xffu8 << (8 - cap % 8);
                }
            }
        }
        Ok(BitBuf::from_bytes(bytes, len))
    }
}

impl FromIterator<u8> for BitBuf {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut buf = BitBuf::new();
        for b in iter {
            buf.push(b);
        }
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_packing() {
        let buf: BitBuf = [0u8, 1, 1, 0, 0, 0, 0, 1].into_iter().collect();
        assert_eq!(buf.as_bytes(), &[0x61]);
        assert_eq!(buf.len(), 8);
    }

    #[test]
    fn partial_byte_pads_low_bits() {
        let buf: BitBuf = [1u8, 0, 1].into_iter().collect();
        assert_eq!(buf.as_bytes(), &[0b1010_0000]);
        assert_eq!(buf.len(), 3);
        assert_eq!(buf.ones(), 2);
    }

    proptest! {
        #[test]
        fn push_get_roundtrip(bits in proptest::collection::vec(0u8..2, 0..200)) {
            let buf: BitBuf = bits.iter().cloned().collect();
            prop_assert_eq!(buf.len(), bits.len());
            for (i, &b) in bits.iter().enumerate() {
                prop_assert_eq!(buf.get(i), b);
            }
            prop_assert_eq!(buf.ones(), bits.iter().filter(|&&b| b == 1).count());
        }

        #[test]
        fn extend_matches_pushes(
            a in proptest::collection::vec(0u8..2, 0..64),
            b in proptest::collection::vec(0u8..2, 0..64),
        ) {
            let mut left: BitBuf = a.iter().cloned().collect();
            let right: BitBuf = b.iter().cloned().collect();
            left.extend(&right);
            let whole: BitBuf = a.iter().chain(b.iter()).cloned().collect();
            prop_assert_eq!(left, whole);
        }
    }
}
