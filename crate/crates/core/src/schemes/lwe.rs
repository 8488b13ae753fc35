use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::poly;
use super::{parts, ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeWidths};
use crate::bits::{bits_for, mask};
use crate::rng::{stream, uniform_bits};

/// How error and secret polynomials are derived from raw bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorProfile {
    /// A chunk `v` becomes `0` for `v = 0`, the monomial `x^(v−1)` for
    /// `1 ≤ v ≤ n`, and `0` otherwise: Hamming weight at most one.
    SparseLowWeight,
    /// The chunk bits are the coefficients.
    Dense,
}

impl ErrorProfile {
    pub fn chunk_bits(self, n: u32) -> u32 {
        match self {
            ErrorProfile::SparseLowWeight => bits_for(n as u64 + 1) + 1,
            ErrorProfile::Dense => n,
        }
    }

    pub fn poly(self, chunk: u64, n: u32) -> u64 {
        match self {
            ErrorProfile::SparseLowWeight if chunk >= 1 && chunk <= n as u64 => 1 << (chunk - 1),
            ErrorProfile::SparseLowWeight => 0,
            ErrorProfile::Dense => chunk & mask(n),
        }
    }
}

/// The public message encoding for `q = 2`: a permutation of bit positions.
///
/// Output bit `pi[i]` is input bit `i`. Position permutations are XOR-linear,
/// `π(a ⊕ b) = π(a) ⊕ π(b)`, which the Hadamard attack relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeParams {
    pub pi: Vec<u32>,
    pub tau: u32,
    pub q: u64,
}

impl EncodeParams {
    pub fn new(pi: Vec<u32>, tau: u32, q: u64) -> Result<Self, SchemeError> {
        if q != 2 {
            return Err(SchemeError::UnsupportedModulus(q));
        }
        if tau != 0 {
            return Err(SchemeError::InvalidParams(format!(
                "pad width {tau} is nonzero; q = 2 needs none"
            )));
        }
        let mut seen = vec![false; pi.len()];
        for &p in &pi {
            match seen.get_mut(p as usize) {
                Some(slot) if !*slot => *slot = true,
                _ => {
                    return Err(SchemeError::InvalidParams(format!(
                        "{pi:?} is not a permutation of bit positions"
                    )))
                }
            }
        }
        Ok(Self { pi, tau, q })
    }

    pub fn identity(n: u32) -> Self {
        Self {
            pi: (0..n).collect(),
            tau: 0,
            q: 2,
        }
    }

    pub fn random(n: u32, seed: u64) -> Self {
        let mut rng = stream(seed, 0x656e_636f_6465);
        let mut positions: Vec<u32> = (0..n).collect();
        positions.shuffle(&mut rng);
        Self {
            pi: positions,
            tau: 0,
            q: 2,
        }
    }

    pub fn width(&self) -> u32 {
        self.pi.len() as u32
    }

    pub fn apply(&self, m: u64) -> u64 {
        self.pi
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (((m >> i) & 1) << p))
    }

    pub fn apply_inverse(&self, x: u64) -> u64 {
        self.pi
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | (((x >> p) & 1) << i))
    }
}

/// LWE-style scheme over `Z₂[x]/(xⁿ + 1)`.
///
/// `pk = a ‖ b` with `b = a·s + e`, `sk = s`; randomness splits into
/// `(e1, e2, d)` and `c = c1 ‖ c2` with `c1 = b·d + e1 + Encode(m)`,
/// `c2 = a·d + e2`.
#[derive(Clone, Debug)]
pub struct ToyLwe {
    n: u32,
    profile: ErrorProfile,
    encode: EncodeParams,
    seed: u64,
    widths: SchemeWidths,
}

pub fn toy_lwe(
    n: u32,
    q: u64,
    profile: ErrorProfile,
    encode: EncodeParams,
    seed: u64,
) -> Result<ToyLwe, SchemeError> {
    if q != 2 || encode.q != 2 {
        return Err(SchemeError::UnsupportedModulus(if q != 2 {
            q
        } else {
            encode.q
        }));
    }
    if !(2..=6).contains(&n) {
        return Err(SchemeError::InvalidParams(format!(
            "dimension {n} outside [2, 6]"
        )));
    }
    if encode.width() != n {
        return Err(SchemeError::InvalidParams(format!(
            "encoding acts on {} bits, dimension is {n}",
            encode.width()
        )));
    }
    let w = profile.chunk_bits(n);
    Ok(ToyLwe {
        n,
        profile,
        encode,
        seed,
        widths: SchemeWidths {
            r_bits: 3 * w,
            m_bits: n,
            c_bits: 2 * n,
            pk_bits: 2 * n,
            sk_bits: n,
            ct_parts: parts(&[("c1", n), ("c2", n)]),
        },
    })
}

impl ToyLwe {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn profile(&self) -> ErrorProfile {
        self.profile
    }

    pub fn encode_params(&self) -> &EncodeParams {
        &self.encode
    }

    /// `(e1, e2, d)` derived from `r` in that chunk order.
    pub fn derive(&self, r: u64) -> (u64, u64, u64) {
        let w = self.profile.chunk_bits(self.n);
        let chunk = |i: u32| self.profile.poly((r >> (w * (2 - i))) & mask(w), self.n);
        (chunk(0), chunk(1), chunk(2))
    }

    fn split_pk(&self, pk: u64) -> (u64, u64) {
        (pk >> self.n, pk & mask(self.n))
    }

    fn split_ct(&self, c: u64) -> (u64, u64) {
        (c >> self.n, c & mask(self.n))
    }
}

impl ClassicalScheme for ToyLwe {
    fn name(&self) -> &str {
        "toy-lwe"
    }

    fn widths(&self) -> &SchemeWidths {
        &self.widths
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        let n = self.n;
        let w = self.profile.chunk_bits(n);
        let a = uniform_bits(rng, n);
        let s = self.profile.poly(uniform_bits(rng, w), n);
        let e = self.profile.poly(uniform_bits(rng, w), n);
        let b = poly::mul(a, s, n) ^ e;
        Ok(Keypair {
            pk: (a << n) | b,
            sk: s,
        })
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        let n = self.n;
        let (a, b) = self.split_pk(pk);
        let (e1, e2, d) = self.derive(r);
        let c1 = poly::mul(b, d, n) ^ e1 ^ self.encode.apply(m);
        let c2 = poly::mul(a, d, n) ^ e2;
        (c1 << n) | c2
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        let (c1, c2) = self.split_ct(c);
        self.encode.apply_inverse(c1 ^ poly::mul(c2, sk, self.n))
    }

    fn rec(&self, pk: u64, r: u64, c: u64) -> Option<u64> {
        let (_, b) = self.split_pk(pk);
        let (e1, _, d) = self.derive(r);
        let (c1, _) = self.split_ct(c);
        Some(self.encode.apply_inverse(c1 ^ poly::mul(b, d, self.n) ^ e1))
    }

    fn has_rec(&self) -> bool {
        true
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }

    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::new(
            self.name(),
            self.seed,
            json!({
                "n": self.n,
                "q": 2,
                "profile": self.profile,
                "encode": self.encode.pi,
            }),
        )
        .with_widths(self.widths.clone())
    }
}
