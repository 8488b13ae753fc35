//! Classical toy schemes behind one bitstring-function interface.
//!
//! Every value (key, message, randomness, ciphertext) is a `u64` holding a
//! big-endian bitstring of the width declared in the scheme's
//! [`SchemeWidths`]. Multi-part ciphertexts concatenate their parts in the
//! order of [`SchemeWidths::ct_parts`], first part in the high bits.

mod almost_constant;
mod descriptor;
mod faulty;
mod hybrid;
mod lwe;
pub mod poly;
mod rollo;
mod ske;
mod toy_perm;
mod transformed;

use std::any::Any;
use std::fmt::Debug;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use almost_constant::{almost_constant_scheme, AlmostConstant};
pub use descriptor::{build_scheme, build_ske, SchemeDescriptor, SchemeSpec, PKE_NAMES, SKE_NAMES};
pub use faulty::{corrupt_rec, CorruptRec};
pub use hybrid::{hybrid_pke, Hybrid};
pub use lwe::{toy_lwe, EncodeParams, ErrorProfile, ToyLwe};
pub use rollo::{toy_rollo, ToyRollo};
pub use ske::{ske_otp_prf, ske_random_perm, OtpPrf, RandomPermSke};
pub use toy_perm::{toy_perm, ToyPerm};
pub use transformed::{transformed_scheme, TransformedScheme};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("unsupported modulus q = {0}; only q = 2 is instantiated")]
    UnsupportedModulus(u64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no invertible key found after {attempts} draws")]
    NonInvertibleKeyDraw { attempts: u32 },
    #[error("width mismatch: {0}")]
    WidthMismatch(String),
    #[error("trapdoor forward and inverse tables disagree at {0}")]
    InconsistentTrapdoor(u64),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("descriptor error: {0}")]
    Descriptor(String),
}

/// Declared bit widths of a public-key scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeWidths {
    pub r_bits: u32,
    pub m_bits: u32,
    pub c_bits: u32,
    pub pk_bits: u32,
    pub sk_bits: u32,
    /// Named ciphertext parts, high bits first; widths sum to `c_bits`.
    pub ct_parts: Vec<(String, u32)>,
}

/// Declared bit widths of a secret-key scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeWidths {
    pub key_bits: u32,
    pub m_bits: u32,
    pub c_bits: u32,
    pub r_bits: u32,
    pub ct_parts: Vec<(String, u32)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Keypair {
    pub pk: u64,
    pub sk: u64,
}

/// A public-key scheme given as bitstring functions.
pub trait ClassicalScheme: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn widths(&self) -> &SchemeWidths;

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError>;

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64;

    /// Deterministic; malformed ciphertexts decrypt to an implicit-rejection value.
    fn dec(&self, sk: u64, c: u64) -> u64;

    /// Recovers `m` from `Enc_pk(m; r)` given `r`. `None` when no Rec is declared.
    fn rec(&self, _pk: u64, _r: u64, _c: u64) -> Option<u64> {
        None
    }

    fn has_rec(&self) -> bool {
        false
    }

    fn descriptor(&self) -> SchemeDescriptor;

    /// Concrete type access for attacks that read public scheme structure.
    fn as_any(&self) -> &dyn Any;

    /// The trapdoor-transformed view, if this scheme is one.
    fn as_transformed(&self) -> Option<&TransformedScheme> {
        None
    }
}

/// A secret-key scheme given as bitstring functions.
pub trait SkeScheme: Debug + Send + Sync {
    fn name(&self) -> &str;

    fn widths(&self) -> &SkeWidths;

    fn kgen(&self, rng: &mut dyn RngCore) -> u64 {
        crate::rng::uniform_bits(rng, self.widths().key_bits)
    }

    fn enc(&self, key: u64, m: u64, r: u64) -> u64;

    fn dec(&self, key: u64, c: u64) -> u64;

    fn descriptor(&self) -> SchemeDescriptor;
}

pub type SchemeRef = Arc<dyn ClassicalScheme>;
pub type SkeRef = Arc<dyn SkeScheme>;

pub(crate) fn parts(spec: &[(&str, u32)]) -> Vec<(String, u32)> {
    spec.iter()
        .filter(|(_, w)| *w > 0)
        .map(|(n, w)| (n.to_string(), *w))
        .collect()
}
