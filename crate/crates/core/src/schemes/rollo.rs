use rand::RngCore;
use serde_json::json;

use super::poly;
use super::{parts, ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeWidths};
use crate::bits::mask;
use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::rng::{derive_seed, stream, uniform_bits};

/// Key draws attempted before giving up.
const KEYGEN_ATTEMPTS: u32 = 4096;

/// Code-based scheme with a one-time-pad message part.
///
/// `pk = h = x⁻¹·y` in `Z₂[x]/(xᵏ + 1)`, `sk = x ‖ y`. Randomness `r` is split
/// into `e1` (the high `⌈k/2⌉` bits) and `e2` (the low bits); the support
/// stand-in is `e1 ‖ e2 = r` itself, so `c1 = m ⊕ G(r)` and `c2 = e1 + e2·h`.
/// Key generation keeps only keys for which `(e1, e2) ↦ c2` is injective,
/// which makes decryption exact.
///
/// `G` is a seeded balanced map `{0,1}^k → {0,1}^ℓ`: every pad value has
/// exactly `2^(k−ℓ)` preimages, so `c1` is uniform for uniform `r`.
#[derive(Clone, Debug)]
pub struct ToyRollo {
    l: u32,
    k: u32,
    seed: u64,
    g: Arc<[u64]>,
    widths: SchemeWidths,
}

pub fn toy_rollo(l: u32, k: u32, seed: u64) -> Result<ToyRollo, SchemeError> {
    if !(1..=4).contains(&l) {
        return Err(SchemeError::InvalidParams(format!(
            "message width {l} outside [1, 4]"
        )));
    }
    if !(2..=6).contains(&k) {
        return Err(SchemeError::InvalidParams(format!(
            "code width {k} outside [2, 6]"
        )));
    }
    if l > k {
        return Err(SchemeError::InvalidParams(format!(
            "message width {l} exceeds code width {k}"
        )));
    }
    let mut g: Vec<u64> = (0..1u64 << k).map(|i| i & mask(l)).collect();
    g.shuffle(&mut stream(derive_seed(seed, 0x47), 0));
    Ok(ToyRollo {
        l,
        k,
        seed,
        g: g.into(),
        widths: SchemeWidths {
            r_bits: k,
            m_bits: l,
            c_bits: l + k,
            pk_bits: k,
            sk_bits: 2 * k,
            ct_parts: parts(&[("c1", l), ("c2", k)]),
        },
    })
}

impl ToyRollo {
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Bits of `r` that form `e2`.
    fn e2_bits(&self) -> u32 {
        self.k / 2
    }

    /// `G(Supp(e1, e2))`.
    pub fn pad(&self, r: u64) -> u64 {
        self.g[(r & mask(self.k)) as usize]
    }

    /// `c2 = e1 + e2·h`, a function of `r` alone.
    pub fn syndrome(&self, h: u64, r: u64) -> u64 {
        let e1 = r >> self.e2_bits();
        let e2 = r & mask(self.e2_bits());
        e1 ^ poly::mul(e2, h, self.k)
    }

    fn syndrome_injective(&self, h: u64) -> bool {
        let mut seen = vec![false; 1 << self.k];
        (0..1u64 << self.k)
            .all(|r| !std::mem::replace(&mut seen[self.syndrome(h, r) as usize], true))
    }

    fn public_from_secret(&self, sk: u64) -> Option<u64> {
        let (x, y) = (sk >> self.k, sk & mask(self.k));
        poly::inverse(x, self.k).map(|xi| poly::mul(xi, y, self.k))
    }
}

impl ClassicalScheme for ToyRollo {
    fn name(&self) -> &str {
        "toy-rollo"
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        for _ in 0..KEYGEN_ATTEMPTS {
            let x = uniform_bits(rng, self.k);
            let y = uniform_bits(rng, self.k);
            let (Some(xi), Some(_)) = (poly::inverse(x, self.k), poly::inverse(y, self.k)) else {
                continue;
            };
            let h = poly::mul(xi, y, self.k);
            if self.syndrome_injective(h) {
                return Ok(Keypair {
                    pk: h,
                    sk: (x << self.k) | y,
                });
            }
        }
        Err(SchemeError::NonInvertibleKeyDraw {
            attempts: KEYGEN_ATTEMPTS,
        })
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        let c1 = (m ^ self.pad(r)) & mask(self.l);
        (c1 << self.k) | self.syndrome(pk, r)
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        let (c1, c2) = (c >> self.k, c & mask(self.k));
        let r = self
            .public_from_secret(sk)
            .and_then(|h| (0..1u64 << self.k).find(|&r| self.syndrome(h, r) == c2))
            .unwrap_or(0);
        (c1 ^ self.pad(r)) & mask(self.l)
    }

    fn rec(&self, _pk: u64, r: u64, c: u64) -> Option<u64> {
        Some(((c >> self.k) ^ self.pad(r)) & mask(self.l))
    }

    fn has_rec(&self) -> bool {
        true
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(self.name(), self.seed, json!({ "l": self.l, "k": self.k }))
            .with_widths(self.widths.clone())
    }
}
