use std::sync::Arc;

use rand::RngCore;
use serde_json::json;

use super::{ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeRef, SchemeWidths};
use crate::rng::{invert_permutation, random_permutation, stream};

/// A recoverable scheme with its messages passed through a trapdoor permutation.
///
/// `Enc(pk, m; r) = inner.Enc(pk, F(m); r)` and `Dec = F⁻¹ ∘ inner.Dec`. The
/// permutation is a seeded random table fixed per instance: the forward table
/// plays the public evaluation key, the inverse table the trapdoor. Keypairs are
/// the inner scheme's. No Rec is declared.
#[derive(Clone, Debug)]
pub struct TransformedScheme {
    inner: SchemeRef,
    seed: u64,
    forward: Arc<[u64]>,
    inverse: Arc<[u64]>,
    name: String,
}

pub fn transformed_scheme(inner: SchemeRef, seed: u64) -> Result<TransformedScheme, SchemeError> {
    let forward = random_permutation(&mut stream(seed, 0x74_6466), inner.widths().m_bits);
    let inverse = invert_permutation(&forward).expect("shuffled table is a bijection");
    TransformedScheme::with_tables(inner, seed, forward, inverse)
}

impl TransformedScheme {
    /// Builds from explicit tables without checking them against each other;
    /// see [`TransformedScheme::check_trapdoor`].
    pub fn with_tables(
        inner: SchemeRef,
        seed: u64,
        forward: Vec<u64>,
        inverse: Vec<u64>,
    ) -> Result<Self, SchemeError> {
        if !inner.has_rec() {
            return Err(SchemeError::InvalidParams(format!(
                "inner scheme {} declares no Rec",
                inner.name()
            )));
        }
        let dim = 1usize << inner.widths().m_bits;
        if forward.len() != dim || inverse.len() != dim {
            return Err(SchemeError::WidthMismatch(format!(
                "trapdoor tables must have {dim} entries"
            )));
        }
        let name = format!("transformed({})", inner.name());
        Ok(Self {
            inner,
            seed,
            forward: forward.into(),
            inverse: inverse.into(),
            name,
        })
    }

    pub fn inner(&self) -> &SchemeRef {
        &self.inner
    }

    pub fn tdf(&self, m: u64) -> u64 {
        self.forward[m as usize]
    }

    pub fn tdf_inverse(&self, x: u64) -> u64 {
        self.inverse[x as usize]
    }

    /// Exhaustively checks `F⁻¹(F(x)) = x`, returning the first violating `x`.
    pub fn check_trapdoor(&self) -> Result<(), SchemeError> {
        match (0..self.forward.len() as u64).find(|&x| self.tdf_inverse(self.tdf(x)) != x) {
            Some(x) => Err(SchemeError::InconsistentTrapdoor(x)),
            None => Ok(()),
        }
    }
}

impl ClassicalScheme for TransformedScheme {
    fn name(&self) -> &str {
        &self.name
    }

    fn widths(&self) -> &SchemeWidths {
        self.inner.widths()
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        self.inner.kgen(rng)
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        self.inner.enc(pk, self.tdf(m), r)
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        self.tdf_inverse(self.inner.dec(sk, c))
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            "transformed",
            self.seed,
            json!({ "inner": self.inner.descriptor() }),
        )
        .with_widths(self.widths().clone())
    }

    fn as_transformed(&self) -> Option<&TransformedScheme> {
        Some(self)
    }
}
