use std::fmt;
use std::sync::Arc;

use super::{QsimError, RegisterLayout, EXHAUSTIVE_CAP, PERMUTATION_CAP, TABLE_CAP};
use crate::bits::mask;

type IndexMap = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

/// A classical reversible map on basis indices, i.e. a permutation unitary.
///
/// The map is held in function form; [`BasisPermutation::materialize`] caches
/// it as a lookup table for total widths up to [`TABLE_CAP`]. Input and output
/// layouts have equal total width but may name and split the bits differently,
/// which is how wire swaps are expressed without moving any data.
#[derive(Clone)]
pub struct BasisPermutation {
    input: RegisterLayout,
    output: RegisterLayout,
    forward: IndexMap,
    table: Option<Arc<[u32]>>,
}

impl BasisPermutation {
    pub fn from_fn(
        input: RegisterLayout,
        output: RegisterLayout,
        forward: impl Fn(u64) -> u64 + Send + Sync + 'static,
    ) -> Result<Self, QsimError> {
        Self::from_arc(input, output, Arc::new(forward))
    }

    fn from_arc(
        input: RegisterLayout,
        output: RegisterLayout,
        forward: IndexMap,
    ) -> Result<Self, QsimError> {
        if input.total_width() != output.total_width() {
            return Err(QsimError::LayoutMismatch(format!(
                "permutation input {input:?} and output {output:?} differ in width"
            )));
        }
        let width = input.total_width();
        if width > PERMUTATION_CAP {
            return Err(QsimError::CapExceeded {
                width,
                cap: PERMUTATION_CAP,
            });
        }
        Ok(Self {
            input,
            output,
            forward,
            table: None,
        })
    }

    /// Tabulates the map when the width allows it; a no-op otherwise.
    pub fn materialize(mut self) -> Self {
        let width = self.width();
        if self.table.is_none() && width <= TABLE_CAP {
            let f = &self.forward;
            self.table = Some((0..1u64 << width).map(|i| f(i) as u32).collect());
        }
        self
    }

    /// Same-layout permutation from an explicit table. Fails if the table is not a bijection.
    pub fn from_table(layout: RegisterLayout, table: Vec<u64>) -> Result<Self, QsimError> {
        if table.len() != layout.dim() {
            return Err(QsimError::LayoutMismatch(format!(
                "table of length {} for layout {layout:?}",
                table.len()
            )));
        }
        let table: Arc<[u64]> = table.into();
        let lookup = table.clone();
        let perm =
            Self::from_fn(layout.clone(), layout, move |i| lookup[i as usize])?.materialize();
        perm.verify_bijective()?;
        Ok(perm)
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        Self::from_fn(layout.clone(), layout, |i| i).expect("identity within caps")
    }

    #[inline]
    pub fn map(&self, index: u64) -> u64 {
        match &self.table {
            Some(t) => t[index as usize] as u64,
            None => (self.forward)(index),
        }
    }

    pub fn input(&self) -> &RegisterLayout {
        &self.input
    }

    pub fn output(&self) -> &RegisterLayout {
        &self.output
    }

    pub fn width(&self) -> u32 {
        self.input.total_width()
    }

    pub fn is_materialized(&self) -> bool {
        self.table.is_some()
    }

    /// Exhaustive bijectivity check. Refuses widths above [`EXHAUSTIVE_CAP`].
    pub fn verify_bijective(&self) -> Result<(), QsimError> {
        let width = self.width();
        if width > EXHAUSTIVE_CAP {
            return Err(QsimError::CapExceeded {
                width,
                cap: EXHAUSTIVE_CAP,
            });
        }
        let dim = 1u64 << width;
        let mut preimage = vec![u64::MAX; dim as usize];
        for i in 0..dim {
            let j = self.map(i);
            if j >= dim {
                return Err(QsimError::NotABijection {
                    first: i,
                    second: i,
                    image: j,
                });
            }
            let slot = &mut preimage[j as usize];
            if *slot != u64::MAX {
                return Err(QsimError::NotABijection {
                    first: *slot,
                    second: i,
                    image: j,
                });
            }
            *slot = i;
        }
        Ok(())
    }

    /// `other ∘ self`: apply `self` first. Layouts must line up exactly.
    pub fn then(&self, other: &BasisPermutation) -> Result<Self, QsimError> {
        if self.output != other.input {
            return Err(QsimError::LayoutMismatch(format!(
                "cannot compose {:?} into {:?}",
                self.output, other.input
            )));
        }
        let (f, g) = (self.forward.clone(), other.forward.clone());
        Self::from_fn(self.input.clone(), other.output.clone(), move |i| g(f(i)))
    }

    /// Renames the output bits without moving them.
    pub fn with_output_layout(&self, output: RegisterLayout) -> Result<Self, QsimError> {
        if output.total_width() != self.width() {
            return Err(QsimError::LayoutMismatch(format!(
                "relabel {:?} as {output:?}",
                self.output
            )));
        }
        Ok(Self {
            output,
            ..self.clone()
        })
    }

    /// Restricts the permutation to the block where `register` holds `value`.
    ///
    /// The register must sit at the same bit position in input and output and
    /// must be left untouched by the map, as a classical control register is.
    /// The returned permutation acts on the remaining registers only.
    pub fn restrict(&self, register: &str, value: u64) -> Result<Self, QsimError> {
        let (shift, width) = self.input.field(register)?;
        if self.output.field(register).ok() != Some((shift, width)) {
            return Err(QsimError::RegisterNotPreserved(register.to_string()));
        }
        if value > mask(width) {
            return Err(QsimError::WidthMismatch {
                register: register.to_string(),
                expected: width,
                got: 64 - value.leading_zeros(),
            });
        }
        let input = self.input.without(register)?;
        let output = self.output.without(register)?;
        let f = self.forward.clone();
        let low = mask(shift);
        let name = register.to_string();
        Self::from_fn(input, output, move |i| {
            let full = ((i & !low) << width) | (value << shift) | (i & low);
            let out = f(full);
            assert!(
                (out >> shift) & mask(width) == value,
                "register {name} not preserved by permutation"
            );
            ((out >> (shift + width)) << shift) | (out & low)
        })
    }

    /// Inverse as a table, for widths up to [`EXHAUSTIVE_CAP`].
    pub fn inverse(&self) -> Result<Self, QsimError> {
        self.verify_bijective()?;
        let dim = 1u64 << self.width();
        let mut inv = vec![0u64; dim as usize];
        for i in 0..dim {
            inv[self.map(i) as usize] = i;
        }
        let inv: Arc<[u64]> = inv.into();
        Self::from_fn(self.output.clone(), self.input.clone(), move |i| {
            inv[i as usize]
        })
    }
}

impl fmt::Debug for BasisPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisPermutation")
            .field("input", &self.input)
            .field("output", &self.output)
            .field("materialized", &self.table.is_some())
            .finish()
    }
}
