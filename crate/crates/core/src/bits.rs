//! Bit strings with an exact length, used for every ticket and auxiliary blob.
//!
//! Fields are written least-significant bit first, and bits fill each byte
//! starting at bit 0. A `w`-bit field therefore occupies exactly `w` bits of
//! the string no matter how it straddles byte boundaries.

use std::fmt;

use crate::error::{Error, Result};

/// Number of bits needed to write any value in `0..count`.
///
/// `bits_for(0) == bits_for(1) == 0`.
pub fn bits_for(count: u64) -> usize {
    if count <= 1 {
        0
    } else {
        (64 - (count - 1).leading_zeros()) as usize
    }
}

/// `ceil(log2(x))` for `x >= 1`.
pub fn ceil_log2(x: u64) -> usize {
    bits_for(x)
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self> {
        if len > bytes.len() * 8 || bytes.len() != len.div_ceil(8) {
            return Err(Error::MalformedTicket(format!(
                "{} bytes cannot hold exactly {len} bits",
                bytes.len()
            )));
        }
        let mut s = Self { bytes, len };
        // Canonicalize padding so equality is bitwise.
        if len % 8 != 0 {
            let last = s.bytes.len() - 1;
            s.bytes[last] &= (1u8 << (len % 8)) - 1;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 1 << (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`.
    ///
    /// Panics if `value` does not fit, since that is always a caller bug.
    pub fn push(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        assert!(
            width == 64 || value >> width == 0,
            "value {value} does not fit in {width} bits"
        );
        for i in 0..width {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push_bit(other.bit(i));
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.bytes[i / 8] >> (i % 8)) & 1 == 1
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString[{}; ", self.len)?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        write!(f, "]")
    }
}

pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl BitReader<'_> {
    pub fn remaining(&self) -> usize {
        self.bits.len - self.pos
    }

    pub fn read(&mut self, width: usize) -> Result<u64> {
        if width > 64 || width > self.remaining() {
            return Err(Error::MalformedTicket(format!(
                "read of {width} bits with {} remaining",
                self.remaining()
            )));
        }
        let mut v = 0u64;
        for i in 0..width {
            if self.bits.bit(self.pos + i) {
                v |= 1 << i;
            }
        }
        self.pos += width;
        Ok(v)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read(1)? == 1)
    }

    /// Fails unless every bit has been consumed.
    pub fn finish(self) -> Result<()> {
        if self.remaining() == 0 {
            Ok(())
        } else {
            Err(Error::MalformedTicket(format!(
                "{} trailing bits",
                self.remaining()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn widths() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
        assert_eq!(bits_for(256), 8);
        assert_eq!(bits_for(257), 9);
    }

    #[test]
    fn from_bytes_rejects_bad_lengths() {
        assert!(BitString::from_bytes(vec![0, 0], 3).is_err());
        assert!(BitString::from_bytes(vec![], 1).is_err());
        let s = BitString::from_bytes(vec![0xff], 3).unwrap();
        assert_eq!(s.as_bytes(), &[0x07]);
    }

    #[test]
    fn short_read_is_an_error() {
        let mut s = BitString::new();
        s.push(5, 3);
        let mut r = s.reader();
        assert!(r.read(4).is_err());
        assert_eq!(r.read(3).unwrap(), 5);
        r.finish().unwrap();
    }

    proptest! {
        #[test]
        fn fields_round_trip(fields in proptest::collection::vec((any::<u64>(), 0usize..=64), 0..20)) {
            let mut s = BitString::new();
            let mut expect = Vec::new();
            for (v, w) in fields {
                let v = if w == 64 { v } else { v & ((1u64 << w) - 1) };
                s.push(v, w);
                expect.push((v, w));
            }
            prop_assert_eq!(s.len(), expect.iter().map(|e| e.1).sum::<usize>());
            let copy = BitString::from_bytes(s.as_bytes().to_vec(), s.len()).unwrap();
            prop_assert_eq!(&copy, &s);
            let mut r = copy.reader();
            for (v, w) in expect {
                prop_assert_eq!(r.read(w).unwrap(), v);
            }
            r.finish().unwrap();
        }
    }
}
