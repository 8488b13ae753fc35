//! Indistinguishability experiments and advantage estimation.
//!
//! Every experiment is a pure function of a trial seed. The seed is split into
//! independent sub-streams for key generation, the secret bit, the
//! challenger's encryption randomness and the adversary, so an adversary that
//! changes how much randomness it draws never perturbs the challenger.
//!
//! Adversaries only ever see public data: the public key, the scheme's
//! public description and oracle handles. Secret keys stay inside the
//! challenger.

mod estimate;
mod experiments;
pub mod report;
mod ske_adapter;

use std::any::Any;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::ClassifyError;
use crate::operators::{type2_oracle_call, OperatorError, OracleOperator};
use crate::qsim::{QsimError, RegisterLayout};
use crate::schemes::{SchemeError, SchemeRef};
use crate::State;

pub use estimate::{estimate_advantage, thread_count, AdvantageEstimate, THREADS_ENV};
pub use experiments::{
    run_forbidden_randomness_game, run_ind_qcpa, run_qind_qcpa, run_qind_ske, ForbiddenGame,
    GameOptions, IndQcpaGame, QindQcpaGame, QindSkeGame, MAX_RESAMPLES,
};
pub use ske_adapter::{ske_as_scheme, SkeAsScheme};

/// Sub-stream labels inside a trial seed.
pub mod streams {
    pub const KEYGEN: u64 = 1;
    pub const SECRET_BIT: u64 = 2;
    pub const CHALLENGER: u64 = 3;
    pub const ADVERSARY: u64 = 4;
    /// Parent seed of the learning-phase oracle; query `n` uses stream `n`.
    pub const ORACLE: u64 = 5;
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("game undefined: {reason} `{scheme}`")]
    GameUndefinedForScheme { scheme: String, reason: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("adversary error: {0}")]
    Adversary(String),
    #[error("ciphertexts of the two messages collided on {attempts} consecutive draws")]
    ResampleLimit { attempts: u64 },
}

impl GameError {
    /// Message prefix for schemes the experiment rejects at the classification gate.
    pub const NON_ISOMETRIC: &'static str = "non-isometric scheme";
    pub const NO_CONSTRUCTION: &'static str = "no type-2 construction for scheme";
}

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: u64,
    pub seed: u64,
    pub secret_bit: u8,
    pub guess: u8,
    pub win: bool,
    /// Learning-phase oracle queries made by the adversary.
    pub oracle_calls: u64,
    /// Randomness redraws after colliding challenge ciphertexts.
    #[serde(default)]
    pub resamples: u64,
}

impl ExperimentRecord {
    pub(crate) fn new(trial: u64, seed: u64, secret_bit: u8, guess: u8) -> Self {
        Self {
            trial,
            seed,
            secret_bit,
            guess,
            win: secret_bit == guess,
            oracle_calls: 0,
            resamples: 0,
        }
    }
}

/// Type-2 encryption oracle handed to adversaries. Counts queries.
#[derive(Debug)]
pub struct OracleHandle {
    op: Arc<OracleOperator>,
    calls: AtomicU64,
    seed: u64,
}

impl OracleHandle {
    pub fn new(op: Arc<OracleOperator>, seed: u64) -> Self {
        Self {
            op,
            calls: AtomicU64::new(0),
            seed,
        }
    }

    /// Encrypts a quantum plaintext over `{m}` under fresh randomness.
    pub fn call(&self, plaintext: &State) -> Result<State, GameError> {
        let n = self.calls.fetch_add(1, Ordering::Relaxed);
        let mut rng = crate::rng::stream(self.seed, n);
        Ok(type2_oracle_call(&self.op, plaintext, &mut rng)?)
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn operator(&self) -> &OracleOperator {
        &self.op
    }
}

/// Everything a quantum adversary may look at.
pub struct ChallengeView<'a> {
    pub pk: Option<u64>,
    /// Public description of the scheme; absent in secret-key games.
    pub scheme: Option<&'a SchemeRef>,
    pub message_layout: RegisterLayout,
    pub ciphertext_layout: RegisterLayout,
    pub oracle: Option<&'a OracleHandle>,
}

impl ChallengeView<'_> {
    pub fn message_bits(&self) -> u32 {
        self.message_layout.total_width()
    }
}

/// Adversary-private data carried from the challenge phase to the guess.
pub type Token = Box<dyn Any + Send>;

/// Two challenge plaintexts over the view's message layout.
pub struct Challenge {
    pub phi0: State,
    pub phi1: State,
    pub token: Token,
}

impl Challenge {
    pub fn new(phi0: State, phi1: State) -> Self {
        Self {
            phi0,
            phi1,
            token: Box::new(()),
        }
    }
}

/// A two-phase adversary against a quantum-plaintext indistinguishability game.
pub trait Adversary: Send + Sync {
    fn name(&self) -> String;

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError>;

    /// Returns the guessed bit, `0` or `1`.
    fn guess(
        &self,
        token: Token,
        psi: &State,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError>;
}

/// Everything a classical adversary may look at.
pub struct ClassicalView<'a> {
    pub pk: u64,
    pub scheme: &'a SchemeRef,
}

/// A two-phase adversary with classical challenge messages.
pub trait ClassicalAdversary: Send + Sync {
    fn name(&self) -> String;

    fn choose_messages(
        &self,
        view: &ClassicalView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<(u64, u64, Token), GameError>;

    fn guess(
        &self,
        token: Token,
        ciphertext: u64,
        view: &ClassicalView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError>;
}

pub type AdversaryRef = Arc<dyn Adversary>;
pub type ClassicalAdversaryRef = Arc<dyn ClassicalAdversary>;

/// Runs a classical adversary inside a quantum game: challenge messages become
/// basis states and the returned ciphertext state is measured computationally.
pub fn embed_classical(inner: ClassicalAdversaryRef) -> AdversaryRef {
    Arc::new(EmbeddedClassical { inner })
}

struct EmbeddedClassical {
    inner: ClassicalAdversaryRef,
}

impl EmbeddedClassical {
    fn classical_view<'a>(view: &ChallengeView<'a>) -> Result<ClassicalView<'a>, GameError> {
        match (view.pk, view.scheme) {
            (Some(pk), Some(scheme)) => Ok(ClassicalView { pk, scheme }),
            _ => Err(GameError::Adversary(
                "embedded classical adversary needs a public key and scheme".into(),
            )),
        }
    }
}

impl Adversary for EmbeddedClassical {
    fn name(&self) -> String {
        format!("embed({})", self.inner.name())
    }

    fn prepare_challenge(
        &self,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<Challenge, GameError> {
        let cview = Self::classical_view(view)?;
        let (m0, m1, token) = self.inner.choose_messages(&cview, rng)?;
        let layout = view.message_layout.clone();
        Ok(Challenge {
            phi0: State::basis_index(layout.clone(), m0)?,
            phi1: State::basis_index(layout, m1)?,
            token,
        })
    }

    fn guess(
        &self,
        token: Token,
        psi: &State,
        view: &ChallengeView<'_>,
        rng: &mut dyn RngCore,
    ) -> Result<u8, GameError> {
        let cview = Self::classical_view(view)?;
        // Ciphertext parts are laid out high bits first, so the index is the ciphertext.
        let c = psi.sample_index(rng);
        self.inner.guess(token, c, &cview, rng)
    }
}
