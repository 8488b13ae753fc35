//! Distinguishers for the quantum-plaintext games, a few classical baselines
//! for the classical-challenge game, and a registry that builds them by name.
//!
//! Adversaries are immutable; whatever they carry between the challenge and
//! the guess travels in the game's token.

use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::bits::mask;
use crate::games::{
    Adversary, AdversaryRef, Challenge, ChallengeView, ClassicalAdversary, ClassicalAdversaryRef,
    ClassicalView, GameError, Token,
};
use crate::qsim::{Basis, BasisPermutation, QsimError, RegisterLayout};
use crate::schemes::{EncodeParams, Hybrid, SchemeRef, SkeRef, ToyLwe};
use crate::State;

fn layout_error(msg: String) -> GameError {
    GameError::Qsim(QsimError::LayoutMismatch(msg))
}

fn expect_message_bits(view: &ChallengeView<'_>, bits: u32, who: &str) -> Result<(), GameError> {
    if view.message_bits() != bits {
        return Err(layout_error(format!(
            "{who} built for {bits}-bit messages, game uses {:?}",
            view.message_layout
        )));
    }
    Ok(())
}

fn hadamard_all(layout: &RegisterLayout, index: u64) -> Result<State, GameError> {
    let mut s = State::basis_index(layout.clone(), index)?;
    for name in layout.names().map(str::to_string).collect::<Vec<_>>() {
        s = s.hadamard(&name)?;
    }
    Ok(s)
}

/// Hadamard-measures `register` of `psi` after tracing out everything else.
/// Returns whether the outcome is all-zero.
fn hadamard_outcome_is_zero(
    psi: &State,
    register: &str,
    rng: &mut dyn RngCore,
) -> Result<bool, GameError> {
    let marginal = psi.partial_trace(&[register])?;
    let (outcome, _) = marginal.measure(register, Basis::Hadamard, rng)?;
    Ok(outcome.value.value() == 0)
}

/// Challenges `H|0…0⟩` against `H|1…1⟩`, undoes the public encoding
/// permutation on `c1` and answers `0` iff the Hadamard outcome is all-zero.
///
/// With a bit-position encoding `c1 = w ⊕ π(m)`, so after `π⁻¹` the two
/// branches are distinct Hadamard basis states and the guess is always right.
pub struct LweHadamard {
    encode: EncodeParams,
}

pub fn lwe_hadamard_adversary(encode: EncodeParams) -> AdversaryRef {
    Arc::new(LweHadamard { encode })
}

impl Adversary for LweHadamard {
    fn name(&self) -> String {
        "lwe-hadamard".into()
    }

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError> {
        let n = self.encode.width();
        expect_message_bits(view, n, "lwe-hadamard")?;
        Ok(Challenge::new(
            hadamard_all(&view.message_layout, 0)?,
            hadamard_all(&view.message_layout, mask(n))?,
        ))
    }

    fn guess(
        &self,
        _token: Token,
        psi: &State,
        _view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        let c1 = psi.partial_trace(&["c1"])?;
        let encode = self.encode.clone();
        let undo = BasisPermutation::from_fn(c1.layout().clone(), c1.layout().clone(), move |x| {
            encode.apply_inverse(x)
        })?;
        let decoded = c1.apply_permutation(&undo)?;
        Ok(!hadamard_outcome_is_zero(&decoded, "c1", rng)? as u8)
    }
}

/// Challenges `|0…0⟩` against `H|0…0⟩` and answers `1` iff the Hadamard
/// measurement of the one-time-padded register is all-zero.
///
/// A pad XOR fixes `H|0…0⟩`, so the `b = 1` branch is always recognised; the
/// `b = 0` branch yields zero with probability `2^−ℓ`, for an overall win
/// rate of `1 − 2^−(ℓ+1)` when the target register is exactly `ℓ` bits.
pub struct PadHadamard {
    label: &'static str,
    m_bits: u32,
    target: String,
}

/// Targets `c1` of the code-based scheme.
pub fn rollo_hadamard_adversary(m_bits: u32) -> AdversaryRef {
    rollo_hadamard_adversary_on(m_bits, "c1")
}

/// The code-based distinguisher aimed at an arbitrary ciphertext register.
pub fn rollo_hadamard_adversary_on(m_bits: u32, target: &str) -> AdversaryRef {
    Arc::new(PadHadamard {
        label: "rollo-hadamard",
        m_bits,
        target: target.to_string(),
    })
}

/// Targets the message part `body` of a secret-key ciphertext.
pub fn ske_hadamard_adversary(m_bits: u32) -> AdversaryRef {
    Arc::new(PadHadamard {
        label: "ske-hadamard",
        m_bits,
        target: "body".into(),
    })
}

impl Adversary for PadHadamard {
    fn name(&self) -> String {
        self.label.into()
    }

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError> {
        expect_message_bits(view, self.m_bits, self.label)?;
        if !view.ciphertext_layout.contains(&self.target) {
            return Err(layout_error(format!(
                "{} needs a `{}` ciphertext register, got {:?}",
                self.label, self.target, view.ciphertext_layout
            )));
        }
        Ok(Challenge::new(
            State::basis_index(view.message_layout.clone(), 0)?,
            hadamard_all(&view.message_layout, 0)?,
        ))
    }

    fn guess(
        &self,
        _token: Token,
        psi: &State,
        _view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        Ok(hadamard_outcome_is_zero(psi, &self.target, rng)? as u8)
    }
}

/// Ignores the challenge and always answers `0`.
pub struct Blind;

pub fn blind_adversary() -> AdversaryRef {
    Arc::new(Blind)
}

impl Adversary for Blind {
    fn name(&self) -> String {
        "blind".into()
    }

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError> {
        let zero = State::basis_index(view.message_layout.clone(), 0)?;
        Ok(Challenge::new(zero.clone(), zero))
    }

    fn guess(
        &self,
        _token: Token,
        _psi: &State,
        _view: &ChallengeView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        Ok(0)
    }
}

/// Runs a secret-key adversary against the hybrid scheme: forwards its
/// challenge, discards `c2` and hands it the symmetric ciphertext `c1`.
pub struct HybridLifting {
    inner: AdversaryRef,
}

pub fn hybrid_lifting_adversary(inner: AdversaryRef) -> AdversaryRef {
    Arc::new(HybridLifting { inner })
}

impl HybridLifting {
    fn inner_view<'a>(view: &ChallengeView<'a>) -> Result<ChallengeView<'a>, GameError> {
        let hybrid = view
            .scheme
            .and_then(|s| s.as_any().downcast_ref::<Hybrid>())
            .ok_or_else(|| {
                layout_error(format!(
                    "hybrid lifting needs a hybrid target, got ciphertext {:?}",
                    view.ciphertext_layout
                ))
            })?;
        Ok(ChallengeView {
            pk: None,
            scheme: None,
            message_layout: view.message_layout.clone(),
            ciphertext_layout: RegisterLayout::new(hybrid.ske().widths().ct_parts.clone())?,
            oracle: None,
        })
    }
}

impl Adversary for HybridLifting {
    fn name(&self) -> String {
        format!("hybrid-lifting({})", self.inner.name())
    }

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError> {
        self.inner.prepare_challenge(&Self::inner_view(view)?, rng)
    }

    fn guess(
        &self,
        token: Token,
        psi: &State,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        let inner_view = Self::inner_view(view)?;
        let c1 = psi
            .partial_trace(&["c1"])?
            .relabel(inner_view.ciphertext_layout.clone())?;
        self.inner.guess(token, &c1, &inner_view, rng)
    }
}

fn ciphertext_part(scheme: &SchemeRef, c: u64, part: &str) -> Result<u64, GameError> {
    let layout = RegisterLayout::new(scheme.widths().ct_parts.clone())?;
    Ok(layout.extract(c, part)?)
}

fn extreme_messages(view: &ClassicalView<'_>) -> (u64, u64) {
    (0, mask(view.scheme.widths().m_bits))
}

/// Challenges all-zeros against all-ones and answers the low bit of `c1`.
pub struct ClassicalC1;

/// Challenges all-zeros against all-ones and answers `0` iff some randomness
/// re-encrypts the all-zero message to the challenge ciphertext.
pub struct ClassicalBruteForce;

/// Always answers `0`.
pub struct ClassicalConstant;

impl ClassicalAdversary for ClassicalC1 {
    fn name(&self) -> String {
        "classical-c1".into()
    }

    fn choose_messages(
        &self,
        view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<(u64, u64, Token), GameError> {
        let (m0, m1) = extreme_messages(view);
        Ok((m0, m1, Box::new(())))
    }

    fn guess(
        &self,
        _token: Token,
        c: u64,
        view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        Ok((ciphertext_part(view.scheme, c, "c1")? & 1) as u8)
    }
}

impl ClassicalAdversary for ClassicalBruteForce {
    fn name(&self) -> String {
        "classical-brute-force".into()
    }

    fn choose_messages(
        &self,
        view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<(u64, u64, Token), GameError> {
        let (m0, m1) = extreme_messages(view);
        Ok((m0, m1, Box::new(())))
    }

    fn guess(
        &self,
        _token: Token,
        c: u64,
        view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        let r_bits = view.scheme.widths().r_bits;
        let hit = (0..1u64 << r_bits).any(|r| view.scheme.enc(view.pk, 0, r) == c);
        Ok((!hit) as u8)
    }
}

impl ClassicalAdversary for ClassicalConstant {
    fn name(&self) -> String {
        "classical-constant".into()
    }

    fn choose_messages(
        &self,
        view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<(u64, u64, Token), GameError> {
        let (m0, m1) = extreme_messages(view);
        Ok((m0, m1, Box::new(())))
    }

    fn guess(
        &self,
        _token: Token,
        _c: u64,
        _view: &ClassicalView<'_>,
        _rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        Ok(0)
    }
}

pub fn classical_adversaries() -> Vec<ClassicalAdversaryRef> {
    vec![
        Arc::new(ClassicalC1),
        Arc::new(ClassicalBruteForce),
        Arc::new(ClassicalConstant),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Plays the quantum-plaintext games.
    Quantum,
    /// Plays the classical-challenge game; embedded automatically in quantum games.
    Classical,
}

/// Registry entry, listable and serializable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttackDescriptor {
    pub name: &'static str,
    pub kind: AttackKind,
    /// Scheme the attack is written against.
    pub target: &'static str,
    /// Exact rational or a formula in the message width `l`.
    pub claimed_win_rate: &'static str,
    /// Why the claim holds.
    pub source: &'static str,
}

pub fn registry() -> Vec<AttackDescriptor> {
    use AttackKind::*;
    vec![
        AttackDescriptor {
            name: "lwe-hadamard",
            kind: Quantum,
            target: "toy-lwe",
            claimed_win_rate: "1",
            source: "c1 is an XOR translate of the encoded message; after undoing the \
                     public encoding the two challenges are orthogonal Hadamard states",
        },
        AttackDescriptor {
            name: "rollo-hadamard",
            kind: Quantum,
            target: "toy-rollo",
            claimed_win_rate: "1 - 2^-(l+1)",
            source: "the pad fixes the uniform superposition; a basis state yields the \
                     all-zero Hadamard outcome with probability 2^-l",
        },
        AttackDescriptor {
            name: "ske-hadamard",
            kind: Quantum,
            target: "ske-otp-prf",
            claimed_win_rate: "1 - 2^-(l+1)",
            source: "same overlap argument as rollo-hadamard on the pad-encrypted body",
        },
        AttackDescriptor {
            name: "hybrid-lifting",
            kind: Quantum,
            target: "hybrid",
            claimed_win_rate: "inner secret-key win rate (1 - 2^-(l+1) with ske-hadamard)",
            source: "the hybrid's c1 is a secret-key ciphertext under a fresh key, which \
                     the inner adversary sees exactly as in its own game",
        },
        AttackDescriptor {
            name: "blind",
            kind: Quantum,
            target: "any",
            claimed_win_rate: "1/2",
            source: "the guess is independent of the secret bit",
        },
        AttackDescriptor {
            name: "classical-c1",
            kind: Classical,
            target: "toy-rollo",
            claimed_win_rate: "1/2",
            source: "c1 is padded by a balanced function of uniform randomness",
        },
        AttackDescriptor {
            name: "classical-brute-force",
            kind: Classical,
            target: "any",
            claimed_win_rate: "1 - Pr[Enc(1..1; r) in Enc(0..0; *)] / 2",
            source: "enumerates the randomness space against the public key",
        },
        AttackDescriptor {
            name: "classical-constant",
            kind: Classical,
            target: "any",
            claimed_win_rate: "1/2",
            source: "the guess is independent of the secret bit",
        },
    ]
}

/// What an attack is being built against.
#[derive(Clone, Copy)]
pub enum AttackTarget<'a> {
    Pke(&'a SchemeRef),
    Ske(&'a SkeRef),
}

impl AttackTarget<'_> {
    fn m_bits(&self) -> u32 {
        match self {
            AttackTarget::Pke(s) => s.widths().m_bits,
            AttackTarget::Ske(s) => s.widths().m_bits,
        }
    }
}

/// A built attack, ready for the matching game.
#[derive(Clone)]
pub enum BuiltAttack {
    Quantum(AdversaryRef),
    Classical(ClassicalAdversaryRef),
}

#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("unknown attack `{0}`")]
    Unknown(String),
    #[error("attack `{attack}` does not apply to `{target}`: {reason}")]
    Incompatible {
        attack: String,
        target: String,
        reason: String,
    },
}

/// Builds a registry attack for `target`, reading any public parameters it
/// needs from the scheme.
///
/// `hybrid-lifting` wraps `ske-hadamard`; `hybrid-lifting:<inner>` wraps any
/// other quantum registry attack.
pub fn build_attack(name: &str, target: AttackTarget<'_>) -> Result<BuiltAttack, AttackError> {
    let target_name = match target {
        AttackTarget::Pke(s) => s.name().to_string(),
        AttackTarget::Ske(s) => s.name().to_string(),
    };
    let incompatible = |reason: &str| AttackError::Incompatible {
        attack: name.to_string(),
        target: target_name.clone(),
        reason: reason.to_string(),
    };
    let l = target.m_bits();
    let q = |a: AdversaryRef| Ok(BuiltAttack::Quantum(a));
    let c = |a: ClassicalAdversaryRef| Ok(BuiltAttack::Classical(a));
    if let Some(rest) = name.strip_prefix("hybrid-lifting") {
        let inner_name = match rest {
            "" => "ske-hadamard",
            _ => rest
                .strip_prefix(':')
                .ok_or_else(|| AttackError::Unknown(name.to_string()))?,
        };
        let AttackTarget::Pke(scheme) = target else {
            return Err(incompatible("lifting needs a public-key hybrid"));
        };
        let hybrid = scheme
            .as_any()
            .downcast_ref::<Hybrid>()
            .ok_or_else(|| incompatible("target is not a hybrid scheme"))?;
        let ske = hybrid.ske().clone();
        return match build_attack(inner_name, AttackTarget::Ske(&ske))? {
            BuiltAttack::Quantum(inner) => q(hybrid_lifting_adversary(inner)),
            BuiltAttack::Classical(_) => Err(incompatible("inner attack must be quantum")),
        };
    }
    match name {
        "lwe-hadamard" => {
            let AttackTarget::Pke(scheme) = target else {
                return Err(incompatible("needs a public-key scheme"));
            };
            let lwe = scheme
                .as_any()
                .downcast_ref::<ToyLwe>()
                .ok_or_else(|| incompatible("needs the toy LWE encoding"))?;
            q(lwe_hadamard_adversary(lwe.encode_params().clone()))
        }
        "rollo-hadamard" => q(rollo_hadamard_adversary(l)),
        "ske-hadamard" => q(ske_hadamard_adversary(l)),
        "blind" => q(blind_adversary()),
        "classical-c1" => c(Arc::new(ClassicalC1)),
        "classical-brute-force" => c(Arc::new(ClassicalBruteForce)),
        "classical-constant" => c(Arc::new(ClassicalConstant)),
        other => Err(AttackError::Unknown(other.to_string())),
    }
}
