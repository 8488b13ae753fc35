use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{
    streams, Adversary, AdversaryRef, Challenge, ChallengeView, ClassicalAdversary, ClassicalView,
    ExperimentRecord, GameError, OracleHandle,
};
use crate::classify::{classify_scheme, Classification, ClassifyError, Isometry};
use crate::games::ske_as_scheme;
use crate::operators::{
    build_type1_enc, build_type2, reg, type2_oracle_call, type2_oracle_call_at, Construction,
    OracleOperator,
};
use crate::qsim::{BasisPermutation, QsimError, RegisterLayout};
use crate::rng::{derive_seed, stream, uniform_bits};
use crate::schemes::{Keypair, SchemeRef, SkeRef};
use crate::State;

/// Upper bound on randomness redraws in the forbidden-randomness game.
pub const MAX_RESAMPLES: u64 = 4096;

/// Label of the gate stream: the key pair used to classify the scheme, which
/// is also the pinned key pair.
const GATE: u64 = 0x6761_7465;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GameOptions {
    /// Reuse the gate key pair in every trial instead of drawing fresh keys.
    pub pin_keypair: bool,
}

fn gate_keys(scheme: &SchemeRef, game_seed: u64) -> Result<Keypair, GameError> {
    let mut rng = stream(derive_seed(game_seed, GATE), streams::KEYGEN);
    Ok(scheme.kgen(&mut rng)?)
}

/// Classifies once and returns the construction the game will use.
fn gate(scheme: &SchemeRef, keys: Keypair) -> Result<(Classification, Construction), GameError> {
    let class = classify_scheme(scheme, keys)?;
    match class.type2_path {
        Some(path) => Ok((class, path)),
        None => Err(GameError::GameUndefinedForScheme {
            scheme: scheme.name().to_string(),
            reason: match class.isometry {
                Isometry::NonIsometricWitnessed(_) => GameError::NON_ISOMETRIC,
                Isometry::IsometricWitnessed => GameError::NO_CONSTRUCTION,
            }
            .to_string(),
        }),
    }
}

fn trial_keys(
    scheme: &SchemeRef,
    pinned: Option<Keypair>,
    seed: u64,
) -> Result<Keypair, GameError> {
    match pinned {
        Some(k) => Ok(k),
        None => Ok(scheme.kgen(&mut stream(seed, streams::KEYGEN))?),
    }
}

fn secret_bit(seed: u64) -> u8 {
    stream(seed, streams::SECRET_BIT).gen::<bool>() as u8
}

fn message_layout(m_bits: u32) -> Result<RegisterLayout, QsimError> {
    RegisterLayout::single(reg::M, m_bits)
}

fn ciphertext_layout(parts: &[(String, u32)]) -> Result<RegisterLayout, QsimError> {
    RegisterLayout::new(parts.iter().cloned())
}

/// Holds `φ0 ⊗ φ1`, traces out `φ_{1−b}` and returns what remains on `{m}`.
fn select_challenge(ch: &Challenge, b: u8, layout: &RegisterLayout) -> Result<State, GameError> {
    for phi in [&ch.phi0, &ch.phi1] {
        if phi.layout() != layout {
            return Err(QsimError::LayoutMismatch(format!(
                "challenge plaintext over {:?}, expected {layout:?}",
                phi.layout()
            ))
            .into());
        }
        phi.validate()?;
    }
    let w = layout.total_width();
    let (keep, drop) = if b == 0 { ("m0", "m1") } else { ("m1", "m0") };
    let joint = ch
        .phi0
        .relabel(RegisterLayout::single("m0", w)?)?
        .tensor(&ch.phi1.relabel(RegisterLayout::single("m1", w)?)?);
    match joint {
        Ok(joint) => {
            let kept = joint.partial_trace(&[keep])?;
            assert!(!kept.layout().contains(drop));
            Ok(kept.relabel(layout.clone())?)
        }
        // The registers are in a product state, so keeping the chosen factor
        // is exactly the partial trace.
        Err(QsimError::CapExceeded { .. }) => Ok(if b == 0 { &ch.phi0 } else { &ch.phi1 }.clone()),
        Err(e) => Err(e.into()),
    }
}

/// Shared body of the quantum-plaintext games.
#[allow(clippy::too_many_arguments)]
fn quantum_trial(
    op: OracleOperator,
    pk: Option<u64>,
    scheme: Option<&SchemeRef>,
    m_bits: u32,
    parts: &[(String, u32)],
    adversary: &dyn Adversary,
    trial: u64,
    seed: u64,
) -> Result<ExperimentRecord, GameError> {
    let op = Arc::new(op);
    let handle = OracleHandle::new(op.clone(), derive_seed(seed, streams::ORACLE));
    let view = ChallengeView {
        pk,
        scheme,
        message_layout: message_layout(m_bits)?,
        ciphertext_layout: ciphertext_layout(parts)?,
        oracle: Some(&handle),
    };
    let mut adv_rng = stream(seed, streams::ADVERSARY);
    let challenge = adversary.prepare_challenge(&view, &mut adv_rng)?;
    let b = secret_bit(seed);
    let phi = select_challenge(&challenge, b, &view.message_layout)?;
    let psi = type2_oracle_call(&op, &phi, &mut stream(seed, streams::CHALLENGER))?;
    let guess = adversary.guess(challenge.token, &psi, &view, &mut adv_rng)?;
    check_bit(guess)?;
    let mut rec = ExperimentRecord::new(trial, seed, b, guess);
    rec.oracle_calls = handle.calls();
    Ok(rec)
}

fn check_bit(g: u8) -> Result<(), GameError> {
    if g > 1 {
        return Err(GameError::Adversary(format!("guess {g} is not a bit")));
    }
    Ok(())
}

/// Quantum-plaintext indistinguishability under quantum chosen-plaintext
/// attack, for public-key schemes with a type-2 encryption operator.
pub struct QindQcpaGame {
    scheme: SchemeRef,
    classification: Classification,
    construction: Construction,
    pinned: Option<Keypair>,
}

impl QindQcpaGame {
    /// Classifies the scheme once; rejects schemes without a type-2 operator.
    pub fn new(scheme: SchemeRef, game_seed: u64, opts: GameOptions) -> Result<Self, GameError> {
        let keys = gate_keys(&scheme, game_seed)?;
        let (classification, construction) = gate(&scheme, keys)?;
        Ok(Self {
            scheme,
            classification,
            construction,
            pinned: opts.pin_keypair.then_some(keys),
        })
    }

    pub fn classification(&self) -> &Classification {
        &self.classification
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn run_trial(
        &self,
        adversary: &dyn Adversary,
        trial: u64,
        seed: u64,
    ) -> Result<ExperimentRecord, GameError> {
        let keys = trial_keys(&self.scheme, self.pinned, seed)?;
        let op = build_type2(&self.scheme, keys, self.construction)?;
        let w = self.scheme.widths();
        quantum_trial(
            op,
            Some(keys.pk),
            Some(&self.scheme),
            w.m_bits,
            &w.ct_parts,
            adversary,
            trial,
            seed,
        )
    }
}

/// One qIND-qCPA trial with fresh keys drawn from `seed`.
pub fn run_qind_qcpa(
    scheme: &SchemeRef,
    adversary: &AdversaryRef,
    seed: u64,
) -> Result<ExperimentRecord, GameError> {
    QindQcpaGame::new(scheme.clone(), seed, GameOptions::default())?.run_trial(
        adversary.as_ref(),
        0,
        seed,
    )
}

/// Classical-challenge indistinguishability under quantum chosen-plaintext
/// attack. The challenge ciphertext is a classical string.
pub struct IndQcpaGame {
    scheme: SchemeRef,
    pinned: Option<Keypair>,
}

impl IndQcpaGame {
    pub fn new(scheme: SchemeRef, game_seed: u64, opts: GameOptions) -> Result<Self, GameError> {
        let pinned = if opts.pin_keypair {
            Some(gate_keys(&scheme, game_seed)?)
        } else {
            None
        };
        Ok(Self { scheme, pinned })
    }

    pub fn run_trial(
        &self,
        adversary: &dyn ClassicalAdversary,
        trial: u64,
        seed: u64,
    ) -> Result<ExperimentRecord, GameError> {
        let keys = trial_keys(&self.scheme, self.pinned, seed)?;
        let view = ClassicalView {
            pk: keys.pk,
            scheme: &self.scheme,
        };
        let w = self.scheme.widths();
        let mut adv_rng = stream(seed, streams::ADVERSARY);
        let (m0, m1, token) = adversary.choose_messages(&view, &mut adv_rng)?;
        for m in [m0, m1] {
            if m >> w.m_bits != 0 {
                return Err(GameError::Adversary(format!(
                    "message {m} wider than {} bits",
                    w.m_bits
                )));
            }
        }
        let b = secret_bit(seed);
        let r = uniform_bits(&mut stream(seed, streams::CHALLENGER), w.r_bits);
        let c = self.scheme.enc(keys.pk, if b == 0 { m0 } else { m1 }, r);
        let guess = adversary.guess(token, c, &view, &mut adv_rng)?;
        check_bit(guess)?;
        Ok(ExperimentRecord::new(trial, seed, b, guess))
    }
}

/// One IND-qCPA trial with fresh keys drawn from `seed`.
pub fn run_ind_qcpa(
    scheme: &SchemeRef,
    adversary: &dyn ClassicalAdversary,
    seed: u64,
) -> Result<ExperimentRecord, GameError> {
    IndQcpaGame::new(scheme.clone(), seed, GameOptions::default())?.run_trial(adversary, 0, seed)
}

/// Quantum-plaintext indistinguishability for secret-key schemes. The
/// adversary sees no key material; its oracle encrypts under the secret key.
pub struct QindSkeGame {
    ske: SkeRef,
    as_pke: SchemeRef,
    construction: Construction,
    pinned: Option<Keypair>,
}

impl QindSkeGame {
    pub fn new(ske: SkeRef, game_seed: u64, opts: GameOptions) -> Result<Self, GameError> {
        let as_pke = ske_as_scheme(ske.clone());
        let keys = gate_keys(&as_pke, game_seed)?;
        let (_, construction) = gate(&as_pke, keys)?;
        Ok(Self {
            ske,
            as_pke,
            construction,
            pinned: opts.pin_keypair.then_some(keys),
        })
    }

    pub fn ske(&self) -> &SkeRef {
        &self.ske
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn run_trial(
        &self,
        adversary: &dyn Adversary,
        trial: u64,
        seed: u64,
    ) -> Result<ExperimentRecord, GameError> {
        let keys = trial_keys(&self.as_pke, self.pinned, seed)?;
        let op = build_type2(&self.as_pke, keys, self.construction)?;
        let w = self.ske.widths();
        quantum_trial(
            op,
            None,
            None,
            w.m_bits,
            &w.ct_parts,
            adversary,
            trial,
            seed,
        )
    }
}

/// One secret-key qIND trial with a fresh key drawn from `seed`.
pub fn run_qind_ske(
    ske: &SkeRef,
    adversary: &AdversaryRef,
    seed: u64,
) -> Result<ExperimentRecord, GameError> {
    QindSkeGame::new(ske.clone(), seed, GameOptions::default())?.run_trial(
        adversary.as_ref(),
        0,
        seed,
    )
}

/// The challenge ciphertext is handed over together with its encryption
/// randomness. The built-in adversary measures the randomness, XORs the
/// ciphertext register with `Enc_pk(m0; r)` and answers `0` iff the result is
/// zero.
///
/// When `m0 ≠ m1`, randomness for which the two ciphertexts coincide is
/// redrawn and counted; with equal messages nothing is redrawn.
pub struct ForbiddenGame {
    scheme: SchemeRef,
    messages: (u64, u64),
    construction: Option<Construction>,
    pinned: Option<Keypair>,
}

impl ForbiddenGame {
    /// `messages` defaults to all-zeros against all-ones.
    pub fn new(
        scheme: SchemeRef,
        game_seed: u64,
        opts: GameOptions,
        messages: Option<(u64, u64)>,
    ) -> Result<Self, GameError> {
        let m_bits = scheme.widths().m_bits;
        let messages = messages.unwrap_or((0, crate::bits::mask(m_bits)));
        if messages.0 >> m_bits != 0 || messages.1 >> m_bits != 0 {
            return Err(GameError::InvalidConfig(format!(
                "messages {messages:?} wider than {m_bits} bits"
            )));
        }
        let keys = gate_keys(&scheme, game_seed)?;
        // A declared Rec that fails its contract rules out the type-2
        // circuit, not the type-1 path this game can fall back on.
        let construction = match classify_scheme(&scheme, keys) {
            Ok(class) => class.type2_path,
            Err(ClassifyError::RecContractViolated { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Self {
            scheme,
            messages,
            construction,
            pinned: opts.pin_keypair.then_some(keys),
        })
    }

    /// The type-2 construction used to encrypt, or `None` for the type-1 path.
    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn messages(&self) -> (u64, u64) {
        self.messages
    }

    pub fn run_trial(&self, trial: u64, seed: u64) -> Result<ExperimentRecord, GameError> {
        let scheme = &self.scheme;
        let w = scheme.widths();
        let keys = trial_keys(scheme, self.pinned, seed)?;
        let (m0, m1) = self.messages;
        let b = secret_bit(seed);
        let mb = if b == 0 { m0 } else { m1 };

        let mut rng = stream(seed, streams::CHALLENGER);
        let mut resamples = 0;
        let r = loop {
            let r = uniform_bits(&mut rng, w.r_bits);
            if m0 == m1 || scheme.enc(keys.pk, m0, r) != scheme.enc(keys.pk, m1, r) {
                break r;
            }
            resamples += 1;
            if resamples >= MAX_RESAMPLES {
                return Err(GameError::ResampleLimit {
                    attempts: resamples,
                });
            }
        };

        let ct_layout = ciphertext_layout(&w.ct_parts)?;
        let plaintext = State::basis_index(message_layout(w.m_bits)?, mb)?;
        let psi = match self.construction {
            Some(c) => type2_oracle_call_at(&build_type2(scheme, keys, c)?, &plaintext, r)?,
            None => {
                let slice = type1_enc_slice(scheme, keys.pk, r, mb)?;
                let y = State::basis_index(slice.input().clone(), 0)?;
                y.apply_permutation(&slice)?.relabel(ct_layout.clone())?
            }
        };
        let r_state = if w.r_bits > 0 {
            Some(State::basis_index(
                RegisterLayout::single(reg::R, w.r_bits)?,
                r,
            )?)
        } else {
            None
        };

        let guess = forbidden_adversary(
            scheme,
            keys.pk,
            m0,
            r_state.as_ref(),
            &psi,
            &mut stream(seed, streams::ADVERSARY),
        )?;
        let mut rec = ExperimentRecord::new(trial, seed, b, guess);
        rec.resamples = resamples;
        Ok(rec)
    }
}

/// Type-1 encryption restricted to fixed `(r, m)`: `y ↦ y ⊕ Enc_pk(m; r)` on `{y}`.
fn type1_enc_slice(
    scheme: &SchemeRef,
    pk: u64,
    r: u64,
    m: u64,
) -> Result<BasisPermutation, GameError> {
    let op = build_type1_enc(scheme, pk)?;
    let mut perm = op.perm().clone();
    if scheme.widths().r_bits > 0 {
        perm = perm.restrict(reg::R, r)?;
    }
    Ok(perm.restrict(reg::M, m)?)
}

fn forbidden_adversary(
    scheme: &SchemeRef,
    pk: u64,
    m0: u64,
    r_state: Option<&State>,
    psi: &State,
    rng: &mut dyn RngCore,
) -> Result<u8, GameError> {
    let r = r_state.map_or(0, |s| s.sample_index(rng));
    let slice = type1_enc_slice(scheme, pk, r, m0)?;
    let y = psi
        .relabel(slice.input().clone())?
        .apply_permutation(&slice)?;
    Ok((y.sample_index(rng) != 0) as u8)
}

/// One forbidden-randomness trial with fresh keys drawn from `seed`.
pub fn run_forbidden_randomness_game(
    scheme: &SchemeRef,
    messages: (u64, u64),
    seed: u64,
) -> Result<ExperimentRecord, GameError> {
    ForbiddenGame::new(scheme.clone(), seed, GameOptions::default(), Some(messages))?
        .run_trial(0, seed)
}
