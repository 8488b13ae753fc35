//! Fixed-width bitstrings.
//!
//! Values are packed big-endian: the first character of a textual bitstring
//! is the most significant bit of the integer value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest width a [`BitString`] can hold.
pub const MAX_BITS: u32 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
    #[error("bitstring of width {0} exceeds {MAX_BITS} bits")]
    TooWide(u32),
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: u32 },
}

/// A bitstring with an explicit width.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    value: u64,
    width: u32,
}

impl BitString {
    pub fn new(value: u64, width: u32) -> Result<Self, BitsError> {
        if width > MAX_BITS {
            return Err(BitsError::TooWide(width));
        }
        if value & !mask(width) != 0 {
            return Err(BitsError::Overflow { value, width });
        }
        Ok(Self { value, width })
    }

    pub fn zeros(width: u32) -> Self {
        Self { value: 0, width }
    }

    pub fn ones(width: u32) -> Self {
        Self {
            value: mask(width),
            width,
        }
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let width = s.chars().count() as u32;
        if width > MAX_BITS {
            return Err(BitsError::TooWide(width));
        }
        let mut value = 0u64;
        for ch in s.chars() {
            value = (value << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(BitsError::InvalidChar(other)),
                };
        }
        Ok(Self { value, width })
    }
}

/// All-ones mask of the given width.
#[inline]
pub fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

#[inline]
pub fn parity(x: u64) -> u32 {
    x.count_ones() & 1
}

/// Number of bits needed to index `n` distinct values.
pub fn bits_for(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}
