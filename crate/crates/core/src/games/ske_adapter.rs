use std::sync::Arc;

use rand::RngCore;

use crate::schemes::{
    ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeRef, SchemeWidths, SkeRef,
};

/// A secret-key scheme seen through the public-key interface with `pk = sk = key`.
///
/// Used only inside the challenger to build the secret-key encryption
/// oracle; the key never reaches the adversary.
#[derive(Debug)]
pub struct SkeAsScheme {
    ske: SkeRef,
    widths: SchemeWidths,
}

pub fn ske_as_scheme(ske: SkeRef) -> SchemeRef {
    let w = ske.widths();
    let widths = SchemeWidths {
        r_bits: w.r_bits,
        m_bits: w.m_bits,
        c_bits: w.c_bits,
        pk_bits: w.key_bits,
        sk_bits: w.key_bits,
        ct_parts: w.ct_parts.clone(),
    };
    Arc::new(SkeAsScheme { ske, widths })
}

impl SkeAsScheme {
    pub fn ske(&self) -> &SkeRef {
        &self.ske
    }
}

impl ClassicalScheme for SkeAsScheme {
    fn name(&self) -> &str {
        self.ske.name()
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        let key = self.ske.kgen(rng);
        Ok(Keypair { pk: key, sk: key })
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        self.ske.enc(pk, m, r)
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        self.ske.dec(sk, c)
    }

    fn descriptor(&self) -> SchemeDescriptor {
        self.ske.descriptor()
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}
