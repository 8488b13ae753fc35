use rand::RngCore;
use serde_json::json;

use super::{ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeRef, SchemeWidths};

/// Wraps a recoverable scheme and flips the low bit of Rec's output whenever
/// the randomness equals `fault_r`. Used to exercise contract-failure paths.
#[derive(Clone, Debug)]
pub struct CorruptRec {
    inner: SchemeRef,
    fault_r: u64,
    name: String,
}

pub fn corrupt_rec(inner: SchemeRef, fault_r: u64) -> Result<CorruptRec, SchemeError> {
    if !inner.has_rec() {
        return Err(SchemeError::InvalidParams(format!(
            "inner scheme {} declares no Rec",
            inner.name()
        )));
    }
    if fault_r >> inner.widths().r_bits != 0 {
        return Err(SchemeError::InvalidParams(format!(
            "fault randomness {fault_r} exceeds {} bits",
            inner.widths().r_bits
        )));
    }
    let name = format!("corrupt-rec({})", inner.name());
    Ok(CorruptRec {
        inner,
        fault_r,
        name,
    })
}

impl ClassicalScheme for CorruptRec {
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
        self.inner.enc(pk, m, r)
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        self.inner.dec(sk, c)
    }

    fn rec(&self, pk: u64, r: u64, c: u64) -> Option<u64> {
        let m = self.inner.rec(pk, r, c)?;
        Some(if r == self.fault_r { m ^ 1 } else { m })
    }

    fn has_rec(&self) -> bool {
        true
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            "corrupt-rec",
            self.inner.descriptor().seed,
            json!({ "inner": self.inner.descriptor(), "fault_r": self.fault_r }),
        )
        .with_widths(self.widths().clone())
    }
}
