//! MSB-first bit stream reader and writer.
//!
//! Bits fill each byte from the most significant position down; the final
//! partial byte of a stream is padded with zero bits.

use crate::error::{Error, Result};

/// Accumulates bits MSB-first into a byte vector.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    current: u8,
    used: u8, // bits occupied in `current`
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.current = (self.current << 1) | bit as u8;
        self.used += 1;
        if self.used == 8 {
            self.bytes.push(self.current);
            self.current = 0;
            self.used = 0;
        }
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u32, count: u8) {
        debug_assert!(count <= 32);
        for i in (0..count).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    /// Total bits written so far.
    pub fn bit_len(&self) -> usize {
        self.bytes.len() * 8 + self.used as usize
    }

    /// Pads the final byte with zeros and returns the stream.
    pub fn finish(mut self) -> Vec<u8> {
        if self.used > 0 {
            self.bytes.push(self.current << (8 - self.used));
        }
        self.bytes
    }
}

/// Reads bits MSB-first from a byte slice, tracking its position.
#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize, // absolute bit position
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = self.pos / 8;
        if byte >= self.bytes.len() {
            return Err(Error::corrupt(self.bytes.len(), "bit stream truncated"));
        }
        let bit = (self.bytes[byte] >> (7 - (self.pos % 8))) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    /// Reads `count` bits, most significant first.
    pub fn read_bits(&mut self, count: u8) -> Result<u32> {
        debug_assert!(count <= 32);
        let mut value = 0u32;
        for _ in 0..count {
            value = (value << 1) | self.read_bit()? as u32;
        }
        Ok(value)
    }

    /// Bits consumed so far.
    pub fn bit_pos(&self) -> usize {
        self.pos
    }

    /// Bytes spanned by the bits consumed so far (the padded length of a
    /// stream that ends here).
    pub fn byte_len_consumed(&self) -> usize {
        self.pos.div_ceil(8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_msb_first_and_pads() {
        let mut w = BitWriter::new();
        w.push_bits(0b101, 3);
        assert_eq!(w.finish(), vec![0b1010_0000]);
    }

    #[test]
    fn crosses_byte_boundaries() {
        let mut w = BitWriter::new();
        w.push_bits(0xABC, 12);
        assert_eq!(w.finish(), vec![0xAB, 0xC0]);
    }

    #[test]
    fn reader_round_trips_writer() {
        let mut w = BitWriter::new();
        w.push_bits(0x3FF, 10);
        w.push_bits(0, 1);
        w.push_bits(0x1234_5678, 32);
        let bytes = w.finish();

        let mut r = BitReader::new(&bytes);
        assert_eq!(r.read_bits(10).unwrap(), 0x3FF);
        assert!(!r.read_bit().unwrap());
        assert_eq!(r.read_bits(32).unwrap(), 0x1234_5678);
        assert_eq!(r.byte_len_consumed(), bytes.len());
    }

    #[test]
    fn reading_past_end_is_corrupt() {
        let mut r = BitReader::new(&[0xFF]);
        assert_eq!(r.read_bits(8).unwrap(), 0xFF);
        assert!(matches!(
            r.read_bit(),
            Err(Error::CorruptStream { offset: 1, .. })
        ));
    }

    #[test]
    fn empty_stream_has_no_bits() {
        let mut r = BitReader::new(&[]);
        assert!(r.read_bit().is_err());
        assert_eq!(r.byte_len_consumed(), 0);
    }
}
