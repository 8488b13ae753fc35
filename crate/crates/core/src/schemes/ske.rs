use serde_json::json;

use super::{parts, SchemeDescriptor, SchemeError, SkeScheme, SkeWidths};
use crate::bits::mask;
use crate::rng::{derive_seed, invert_permutation, random_permutation, stream, RandomFunction};

/// One-time pad keyed by a random function: `Enc_k(m; r) = r ‖ (m ⊕ F(k ‖ r))`.
#[derive(Clone, Debug)]
pub struct OtpPrf {
    nonce_bits: u32,
    seed: u64,
    f: RandomFunction,
    widths: SkeWidths,
}

pub fn ske_otp_prf(
    key_bits: u32,
    m_bits: u32,
    nonce_bits: u32,
    seed: u64,
) -> Result<OtpPrf, SchemeError> {
    if key_bits == 0 || m_bits == 0 || key_bits + nonce_bits > 16 || m_bits > 16 {
        return Err(SchemeError::InvalidParams(format!(
            "widths key={key_bits} m={m_bits} nonce={nonce_bits} outside desk scale"
        )));
    }
    Ok(OtpPrf {
        nonce_bits,
        seed,
        f: RandomFunction::new(derive_seed(seed, 0x46), key_bits + nonce_bits, m_bits),
        widths: SkeWidths {
            key_bits,
            m_bits,
            c_bits: nonce_bits + m_bits,
            r_bits: nonce_bits,
            ct_parts: parts(&[("nonce", nonce_bits), ("body", m_bits)]),
        },
    })
}

impl OtpPrf {
    pub fn pad(&self, key: u64, nonce: u64) -> u64 {
        self.f.eval((key << self.nonce_bits) | nonce)
    }
}

impl SkeScheme for OtpPrf {
    fn name(&self) -> &str {
        "ske-otp-prf"
    }

    fn widths(&self) -> &SkeWidths {
        &self.widths
    }

    fn enc(&self, key: u64, m: u64, r: u64) -> u64 {
        let mb = self.widths.m_bits;
        (r << mb) | ((m ^ self.pad(key, r)) & mask(mb))
    }

    fn dec(&self, key: u64, c: u64) -> u64 {
        let mb = self.widths.m_bits;
        (c ^ self.pad(key, c >> mb)) & mask(mb)
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            self.name(),
            self.seed,
            json!({
                "key_bits": self.widths.key_bits,
                "m_bits": self.widths.m_bits,
                "nonce_bits": self.nonce_bits,
            }),
        )
        .with_ske_widths(self.widths.clone())
    }
}

/// A truly random permutation per key: `Enc_k(m; r) = σ_k(m ‖ r)`.
///
/// With `nonce_bits = 0` this is a deterministic cipher; the nonce widens the
/// domain so that a two-point superposition of messages lands on two random
/// points of a large space.
#[derive(Clone, Debug)]
pub struct RandomPermSke {
    nonce_bits: u32,
    seed: u64,
    forward: Vec<Vec<u64>>,
    inverse: Vec<Vec<u64>>,
    widths: SkeWidths,
}

pub fn ske_random_perm(
    key_bits: u32,
    m_bits: u32,
    nonce_bits: u32,
    seed: u64,
) -> Result<RandomPermSke, SchemeError> {
    if key_bits == 0 || key_bits > 8 || m_bits == 0 || m_bits > 4 || nonce_bits > 8 {
        return Err(SchemeError::InvalidParams(format!(
            "widths key={key_bits} m={m_bits} nonce={nonce_bits} outside desk scale"
        )));
    }
    let block = m_bits + nonce_bits;
    let forward: Vec<Vec<u64>> = (0..1u64 << key_bits)
        .map(|k| random_permutation(&mut stream(derive_seed(seed, k), 0x70_7270), block))
        .collect();
    let inverse = forward
        .iter()
        .map(|t| invert_permutation(t).expect("shuffled table is a bijection"))
        .collect();
    Ok(RandomPermSke {
        nonce_bits,
        seed,
        forward,
        inverse,
        widths: SkeWidths {
            key_bits,
            m_bits,
            c_bits: block,
            r_bits: nonce_bits,
            ct_parts: parts(&[("body", block)]),
        },
    })
}

impl SkeScheme for RandomPermSke {
    fn name(&self) -> &str {
        "ske-random-perm"
    }

    fn widths(&self) -> &SkeWidths {
        &self.widths
    }

    fn enc(&self, key: u64, m: u64, r: u64) -> u64 {
        self.forward[key as usize][((m << self.nonce_bits) | r) as usize]
    }

    fn dec(&self, key: u64, c: u64) -> u64 {
        self.inverse[key as usize][c as usize] >> self.nonce_bits
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            self.name(),
            self.seed,
            json!({
                "key_bits": self.widths.key_bits,
                "m_bits": self.widths.m_bits,
                "nonce_bits": self.nonce_bits,
            }),
        )
        .with_ske_widths(self.widths.clone())
    }
}
