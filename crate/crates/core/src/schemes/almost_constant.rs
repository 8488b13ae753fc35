use rand::RngCore;
use serde_json::json;

use super::{parts, ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeWidths};
use crate::bits::mask;
use crate::rng::{
    derive_seed, invert_permutation, random_permutation, stream, uniform_bits, RandomFunction,
};

/// Randomness width of [`AlmostConstant`].
const R_BITS: u32 = 3;

/// Encrypts every message to `0…0` except under one randomness `r̄ = pk`,
/// where `Enc(m; r̄) = 1 ‖ σ(m)`. Decryption of anything else falls back to
/// an implicit-rejection random function.
#[derive(Clone, Debug)]
pub struct AlmostConstant {
    seed: u64,
    sigma: Vec<u64>,
    sigma_inv: Vec<u64>,
    reject: RandomFunction,
    widths: SchemeWidths,
}

pub fn almost_constant_scheme(m_bits: u32, seed: u64) -> Result<AlmostConstant, SchemeError> {
    if !(1..=4).contains(&m_bits) {
        return Err(SchemeError::InvalidParams(format!(
            "message width {m_bits} outside [1, 4]"
        )));
    }
    let sigma = random_permutation(&mut stream(seed, 0x7369_676d), m_bits);
    let sigma_inv = invert_permutation(&sigma).expect("shuffled table is a bijection");
    Ok(AlmostConstant {
        seed,
        sigma,
        sigma_inv,
        reject: RandomFunction::new(derive_seed(seed, 0x726a), m_bits + 1, m_bits),
        widths: SchemeWidths {
            r_bits: R_BITS,
            m_bits,
            c_bits: m_bits + 1,
            pk_bits: R_BITS,
            sk_bits: R_BITS,
            ct_parts: parts(&[("c", m_bits + 1)]),
        },
    })
}

impl ClassicalScheme for AlmostConstant {
    fn name(&self) -> &str {
        "almost-constant"
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        let r_bar = uniform_bits(rng, R_BITS);
        Ok(Keypair {
            pk: r_bar,
            sk: r_bar,
        })
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        if r == pk {
            (1 << self.widths.m_bits) | self.sigma[m as usize]
        } else {
            0
        }
    }

    fn dec(&self, _sk: u64, c: u64) -> u64 {
        let mb = self.widths.m_bits;
        if c >> mb == 1 {
            self.sigma_inv[(c & mask(mb)) as usize]
        } else {
            self.reject.eval(c)
        }
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            self.name(),
            self.seed,
            json!({ "m_bits": self.widths.m_bits }),
        )
        .with_widths(self.widths.clone())
    }
}
