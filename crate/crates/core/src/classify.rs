//! Brute-force placement of a scheme instance in the correctness ×
//! recoverability × isometry taxonomy.

use std::collections::HashMap;

use rand::RngCore;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::operators::Construction;
use crate::rng::uniform_bits;
use crate::schemes::{Keypair, SchemeRef};

/// Largest `r_bits + m_bits` enumerated by exhaustive α and Rec checks.
pub const ALPHA_CAP: u32 = 20;
/// Largest `r_bits + 2·m_bits` for the injectivity scan.
pub const ISOMETRY_CAP: u32 = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("enumeration over {width} bits exceeds cap {cap}")]
    CapExceeded { width: u32, cap: u32 },
    #[error("declared Rec returns {got} for m = {m}, r = {r}")]
    RecContractViolated { m: u64, r: u64, got: u64 },
}

pub enum AlphaMode<'a> {
    Exhaustive,
    Sampled {
        samples: u64,
        rng: &'a mut dyn RngCore,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correctness {
    Perfect,
    Partial { alpha: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Recoverable {
    #[serde(rename = "yes")]
    Yes,
    #[serde(rename = "no-rec-declared")]
    NoRecDeclared,
}

/// `Enc_pk(m0; r) = Enc_pk(m1; r) = c` with `m0 < m1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CollisionWitness {
    pub r: u64,
    pub m0: u64,
    pub m1: u64,
    pub c: u64,
}

impl CollisionWitness {
    /// Re-evaluates both encryptions.
    pub fn holds(&self, scheme: &SchemeRef, pk: u64) -> bool {
        self.m0 != self.m1
            && scheme.enc(pk, self.m0, self.r) == self.c
            && scheme.enc(pk, self.m1, self.r) == self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isometry {
    IsometricWitnessed,
    NonIsometricWitnessed(CollisionWitness),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub scheme: String,
    pub correctness: Correctness,
    pub recoverable: Recoverable,
    pub isometry: Isometry,
    #[serde(serialize_with = "ser_path")]
    pub type2_path: Option<Construction>,
}

impl Serialize for Correctness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        match self {
            Correctness::Perfect => {
                m.serialize_entry("kind", "perfect")?;
                m.serialize_entry("alpha", &0.0)?;
            }
            Correctness::Partial { alpha } => {
                m.serialize_entry("kind", "partial")?;
                m.serialize_entry("alpha", alpha)?;
            }
        }
        m.end()
    }
}

impl Serialize for Isometry {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Isometry::IsometricWitnessed => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("kind", "isometric")?;
                m.end()
            }
            Isometry::NonIsometricWitnessed(w) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("kind", "non-isometric")?;
                m.serialize_entry("witness", w)?;
                m.end()
            }
        }
    }
}

fn ser_path<S: Serializer>(p: &Option<Construction>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(p.map_or("none", Construction::label))
}

/// Fraction of `(m, r)` with `Dec_sk(Enc_pk(m; r)) ≠ m`.
pub fn measure_alpha(
    scheme: &SchemeRef,
    keys: Keypair,
    mode: AlphaMode<'_>,
) -> Result<f64, ClassifyError> {
    let w = scheme.widths();
    let fails = |m: u64, r: u64| scheme.dec(keys.sk, scheme.enc(keys.pk, m, r)) != m;
    match mode {
        AlphaMode::Exhaustive => {
            let width = w.r_bits + w.m_bits;
            if width > ALPHA_CAP {
                return Err(ClassifyError::CapExceeded {
                    width,
                    cap: ALPHA_CAP,
                });
            }
            let mut bad = 0u64;
            for r in 0..1u64 << w.r_bits {
                for m in 0..1u64 << w.m_bits {
                    bad += fails(m, r) as u64;
                }
            }
            Ok(bad as f64 / (1u64 << width) as f64)
        }
        AlphaMode::Sampled { samples, rng } => {
            let n = samples.max(1);
            let bad = (0..n)
                .filter(|_| {
                    let m = uniform_bits(rng, w.m_bits);
                    let r = uniform_bits(rng, w.r_bits);
                    fails(m, r)
                })
                .count();
            Ok(bad as f64 / n as f64)
        }
    }
}

/// Scans `r` ascending, then `m` ascending, for two messages with one ciphertext.
pub fn check_isometric(scheme: &SchemeRef, pk: u64) -> Result<Isometry, ClassifyError> {
    let w = scheme.widths();
    let width = w.r_bits + 2 * w.m_bits;
    if width > ISOMETRY_CAP {
        return Err(ClassifyError::CapExceeded {
            width,
            cap: ISOMETRY_CAP,
        });
    }
    let mut seen = HashMap::with_capacity(1 << w.m_bits);
    for r in 0..1u64 << w.r_bits {
        seen.clear();
        for m in 0..1u64 << w.m_bits {
            let c = scheme.enc(pk, m, r);
            if let Some(&m0) = seen.get(&c) {
                return Ok(Isometry::NonIsometricWitnessed(CollisionWitness {
                    r,
                    m0,
                    m1: m,
                    c,
                }));
            }
            seen.insert(c, m);
        }
    }
    Ok(Isometry::IsometricWitnessed)
}

/// `Yes` only for a declared Rec that passes an exhaustive check. A missing Rec
/// is never read as a proof of non-recoverability.
pub fn check_recoverable(scheme: &SchemeRef, pk: u64) -> Result<Recoverable, ClassifyError> {
    if !scheme.has_rec() {
        return Ok(Recoverable::NoRecDeclared);
    }
    let w = scheme.widths();
    let width = w.r_bits + w.m_bits;
    if width > ALPHA_CAP {
        return Err(ClassifyError::CapExceeded {
            width,
            cap: ALPHA_CAP,
        });
    }
    for r in 0..1u64 << w.r_bits {
        for m in 0..1u64 << w.m_bits {
            let got = scheme.rec(pk, r, scheme.enc(pk, m, r)).unwrap_or(u64::MAX);
            if got != m {
                return Err(ClassifyError::RecContractViolated { m, r, got });
            }
        }
    }
    Ok(Recoverable::Yes)
}

/// Combines the three checks and picks the type-2 construction, preferring the
/// public-key-only circuit.
pub fn classify_scheme(scheme: &SchemeRef, keys: Keypair) -> Result<Classification, ClassifyError> {
    let alpha = measure_alpha(scheme, keys, AlphaMode::Exhaustive)?;
    let correctness = if alpha == 0.0 {
        Correctness::Perfect
    } else {
        Correctness::Partial { alpha }
    };
    let recoverable = check_recoverable(scheme, keys.pk)?;
    let isometry = check_isometric(scheme, keys.pk)?;
    let type2_path = match (isometry, recoverable, correctness) {
        (Isometry::NonIsometricWitnessed(_), _, _) => None,
        (_, Recoverable::Yes, _) => Some(Construction::ViaRec),
        _ if scheme.as_transformed().is_some() => Some(Construction::Transformed),
        (_, _, Correctness::Perfect) => Some(Construction::ViaDec),
        _ => None,
    };
    Ok(Classification {
        scheme: scheme.name().to_string(),
        correctness,
        recoverable,
        isometry,
        type2_path,
    })
}
