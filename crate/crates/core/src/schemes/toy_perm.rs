use rand::RngCore;
use serde_json::json;

use super::{parts, ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeWidths};
use crate::rng::{derive_seed, invert_permutation, random_permutation, stream, uniform_bits};

/// Key handle width of [`ToyPerm`].
const KEY_BITS: u32 = 2;

/// A perfectly correct scheme without a declared Rec: `c = σ_pk(m ‖ r)` for a
/// random permutation per key handle; `sk = pk`.
#[derive(Clone, Debug)]
pub struct ToyPerm {
    seed: u64,
    forward: Vec<Vec<u64>>,
    inverse: Vec<Vec<u64>>,
    widths: SchemeWidths,
}

pub fn toy_perm(m_bits: u32, r_bits: u32, seed: u64) -> Result<ToyPerm, SchemeError> {
    if m_bits == 0 || m_bits + r_bits > 10 {
        return Err(SchemeError::InvalidParams(format!(
            "widths m={m_bits} r={r_bits} outside desk scale"
        )));
    }
    let block = m_bits + r_bits;
    let forward: Vec<Vec<u64>> = (0..1u64 << KEY_BITS)
        .map(|k| random_permutation(&mut stream(derive_seed(seed, k), 0x74_6f79), block))
        .collect();
    let inverse = forward
        .iter()
        .map(|t| invert_permutation(t).expect("shuffled table is a bijection"))
        .collect();
    Ok(ToyPerm {
        seed,
        forward,
        inverse,
        widths: SchemeWidths {
            r_bits,
            m_bits,
            c_bits: block,
            pk_bits: KEY_BITS,
            sk_bits: KEY_BITS,
            ct_parts: parts(&[("c", block)]),
        },
    })
}

impl ClassicalScheme for ToyPerm {
    fn name(&self) -> &str {
        "toy-perm"
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        let k = uniform_bits(rng, KEY_BITS);
        Ok(Keypair { pk: k, sk: k })
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        self.forward[pk as usize][((m << self.widths.r_bits) | r) as usize]
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        self.inverse[sk as usize][c as usize] >> self.widths.r_bits
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            self.name(),
            self.seed,
            json!({ "m_bits": self.widths.m_bits, "r_bits": self.widths.r_bits }),
        )
        .with_widths(self.widths.clone())
    }
}
