use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::QsimError;
use crate::bits::{mask, BitString};

/// One named bit-register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub width: u32,
}

/// Ordered, named bit-registers packed big-endian into a basis index.
///
/// The first declared register occupies the most significant bits; within a
/// register the value is big-endian as well, so the basis index of
/// `|r=10, m=01⟩` over `{r:2, m:2}` is `0b1001 = 9`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total_width: u32,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(
        registers: impl IntoIterator<Item = (S, u32)>,
    ) -> Result<Self, QsimError> {
        let registers: Vec<Register> = registers
            .into_iter()
            .map(|(name, width)| Register {
                name: name.into(),
                width,
            })
            .collect();
        let mut seen = HashSet::new();
        for reg in &registers {
            if reg.width == 0 {
                return Err(QsimError::ZeroWidth(reg.name.clone()));
            }
            if !seen.insert(reg.name.as_str()) {
                return Err(QsimError::DuplicateRegister(reg.name.clone()));
            }
        }
        let total_width = registers.iter().map(|r| r.width).sum();
        if total_width > 64 {
            return Err(QsimError::CapExceeded {
                width: total_width,
                cap: 64,
            });
        }
        Ok(Self {
            registers,
            total_width,
        })
    }

    /// Like [`RegisterLayout::new`] but silently drops zero-width registers.
    pub fn new_skipping_empty<S: Into<String>>(
        registers: impl IntoIterator<Item = (S, u32)>,
    ) -> Result<Self, QsimError> {
        Self::new(registers.into_iter().filter(|(_, w)| *w > 0))
    }

    pub fn single(name: impl Into<String>, width: u32) -> Result<Self, QsimError> {
        Self::new([(name.into(), width)])
    }

    #[inline]
    pub fn total_width(&self) -> u32 {
        self.total_width
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1usize << self.total_width
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.registers.iter().map(|r| r.name.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    /// `(shift, width)` of a register: its value is `(index >> shift) & mask(width)`.
    pub fn field(&self, name: &str) -> Result<(u32, u32), QsimError> {
        let mut shift = self.total_width;
        for reg in &self.registers {
            shift -= reg.width;
            if reg.name == name {
                return Ok((shift, reg.width));
            }
        }
        Err(QsimError::UnknownRegister(name.to_string()))
    }

    pub fn width_of(&self, name: &str) -> Result<u32, QsimError> {
        self.field(name).map(|(_, w)| w)
    }

    #[inline]
    pub fn extract(&self, index: u64, name: &str) -> Result<u64, QsimError> {
        let (shift, width) = self.field(name)?;
        Ok((index >> shift) & mask(width))
    }

    /// Packs a full assignment into a basis index.
    pub fn pack(&self, assignment: &[(&str, BitString)]) -> Result<u64, QsimError> {
        for (name, _) in assignment {
            if !self.contains(name) {
                return Err(QsimError::UnknownRegister(name.to_string()));
            }
        }
        let mut index = 0u64;
        for reg in &self.registers {
            let bits = assignment
                .iter()
                .find(|(n, _)| *n == reg.name)
                .map(|(_, b)| *b)
                .ok_or_else(|| QsimError::Unassigned(reg.name.clone()))?;
            if bits.width() != reg.width {
                return Err(QsimError::WidthMismatch {
                    register: reg.name.clone(),
                    expected: reg.width,
                    got: bits.width(),
                });
            }
            index = (index << reg.width) | bits.value();
        }
        Ok(index)
    }

    /// Packs register values given in declaration order.
    pub fn pack_values(&self, values: &[u64]) -> u64 {
        debug_assert_eq!(values.len(), self.registers.len());
        self.registers
            .iter()
            .zip(values)
            .fold(0u64, |acc, (reg, v)| {
                (acc << reg.width) | (v & mask(reg.width))
            })
    }

    pub fn unpack_values(&self, mut index: u64) -> Vec<u64> {
        let mut out = vec![0; self.registers.len()];
        for (slot, reg) in out.iter_mut().zip(&self.registers).rev() {
            *slot = index & mask(reg.width);
            index >>= reg.width;
        }
        out
    }

    /// Concatenation `self ⊗ other`; `self` keeps the high bits.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self, QsimError> {
        Self::new(
            self.registers
                .iter()
                .chain(&other.registers)
                .map(|r| (r.name.clone(), r.width)),
        )
    }

    /// The sub-layout of the named registers, in declaration order.
    pub fn select(&self, names: &[&str]) -> Result<Self, QsimError> {
        for n in names {
            if !self.contains(n) {
                return Err(QsimError::UnknownRegister(n.to_string()));
            }
        }
        Self::new(
            self.registers
                .iter()
                .filter(|r| names.contains(&r.name.as_str()))
                .map(|r| (r.name.clone(), r.width)),
        )
    }

    pub fn without(&self, name: &str) -> Result<Self, QsimError> {
        self.field(name)?;
        Self::new(
            self.registers
                .iter()
                .filter(|r| r.name != name)
                .map(|r| (r.name.clone(), r.width)),
        )
    }

    /// Replaces one register by consecutive sub-registers of the same total width.
    pub fn split(&self, name: &str, parts: &[(&str, u32)]) -> Result<Self, QsimError> {
        let width = self.width_of(name)?;
        let sum: u32 = parts.iter().map(|p| p.1).sum();
        if sum != width {
            return Err(QsimError::WidthMismatch {
                register: name.to_string(),
                expected: width,
                got: sum,
            });
        }
        let mut regs = Vec::new();
        for r in &self.registers {
            if r.name == name {
                regs.extend(parts.iter().map(|(n, w)| (n.to_string(), *w)));
            } else {
                regs.push((r.name.clone(), r.width));
            }
        }
        Self::new(regs)
    }
}

impl fmt::Debug for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.registers.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", r.name, r.width)?;
        }
        f.write_str("}")
    }
}
