use rand::RngCore;
use serde_json::json;

use super::{
    ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeRef, SchemeWidths, SkeRef,
};
use crate::bits::mask;

/// KEM-DEM style composition.
///
/// `r = r1 ‖ r2 ‖ r3`; the symmetric key is `k = r1`, `c1 = SKE.Enc_k(m; r2)`
/// and `c2 = PKE.Enc_pk(k; r3)` with `k` zero-extended to the PKE message
/// width. `c = c1 ‖ c2`.
#[derive(Clone, Debug)]
pub struct Hybrid {
    pke: SchemeRef,
    ske: SkeRef,
    name: String,
    widths: SchemeWidths,
}

pub fn hybrid_pke(pke: SchemeRef, ske: SkeRef) -> Result<Hybrid, SchemeError> {
    let (pw, sw) = (pke.widths(), ske.widths());
    if sw.key_bits > pw.m_bits {
        return Err(SchemeError::WidthMismatch(format!(
            "symmetric key of {} bits does not fit a {}-bit public-key message",
            sw.key_bits, pw.m_bits
        )));
    }
    let widths = SchemeWidths {
        r_bits: sw.key_bits + sw.r_bits + pw.r_bits,
        m_bits: sw.m_bits,
        c_bits: sw.c_bits + pw.c_bits,
        pk_bits: pw.pk_bits,
        sk_bits: pw.sk_bits,
        ct_parts: vec![("c1".into(), sw.c_bits), ("c2".into(), pw.c_bits)],
    };
    let name = format!("hybrid({}, {})", pke.name(), ske.name());
    Ok(Hybrid {
        pke,
        ske,
        name,
        widths,
    })
}

impl Hybrid {
    pub fn pke(&self) -> &SchemeRef {
        &self.pke
    }

    pub fn ske(&self) -> &SkeRef {
        &self.ske
    }

    /// `(r1, r2, r3)` in that chunk order.
    pub fn split_randomness(&self, r: u64) -> (u64, u64, u64) {
        let (sw, pw) = (self.ske.widths(), self.pke.widths());
        let r3 = r & mask(pw.r_bits);
        let r2 = (r >> pw.r_bits) & mask(sw.r_bits);
        let r1 = (r >> (pw.r_bits + sw.r_bits)) & mask(sw.key_bits);
        (r1, r2, r3)
    }

    /// `(c1, c2)`.
    pub fn split_ciphertext(&self, c: u64) -> (u64, u64) {
        let pc = self.pke.widths().c_bits;
        (c >> pc, c & mask(pc))
    }
}

impl ClassicalScheme for Hybrid {
    fn name(&self) -> &str {
        &self.name
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        self.pke.kgen(rng)
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        let (k, r2, r3) = self.split_randomness(r);
        let c1 = self.ske.enc(k, m, r2);
        let c2 = self.pke.enc(pk, k, r3);
        (c1 << self.pke.widths().c_bits) | c2
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        let (c1, c2) = self.split_ciphertext(c);
        let k = self.pke.dec(sk, c2) & mask(self.ske.widths().key_bits);
        self.ske.dec(k, c1)
    }

    fn rec(&self, _pk: u64, r: u64, c: u64) -> Option<u64> {
        let (k, _, _) = self.split_randomness(r);
        Some(self.ske.dec(k, self.split_ciphertext(c).0))
    }

    fn has_rec(&self) -> bool {
        true
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        let (p, s) = (self.pke.descriptor(), self.ske.descriptor());
        SchemeDescriptor::new("hybrid", p.seed, json!({ "pke": p, "ske": s }))
            .with_widths(self.widths.clone())
    }
}
