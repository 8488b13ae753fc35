use std::sync::Arc;

use qs2lab::attacks::{
    blind_adversary, build_attack, hybrid_lifting_adversary, rollo_hadamard_adversary,
    rollo_hadamard_adversary_on, ske_hadamard_adversary, AttackTarget, BuiltAttack,
    ClassicalBruteForce, ClassicalC1, ClassicalConstant,
};
use qs2lab::games::{
    embed_classical, estimate_advantage, report, AdvantageEstimate, ClassicalAdversaryRef,
    ExperimentRecord, ForbiddenGame, GameError, GameOptions, IndQcpaGame, QindQcpaGame,
    QindSkeGame,
};
use qs2lab::operators::{build_type2, type2_oracle_call_at, Construction, KeyMaterial};
use qs2lab::rng::stream;
use qs2lab::schemes::{
    almost_constant_scheme, build_scheme, hybrid_pke, ske_otp_prf, ske_random_perm, toy_lwe,
    toy_perm, toy_rollo, transformed_scheme, EncodeParams, ErrorProfile, SchemeDescriptor,
    SchemeRef, SkeRef,
};
use qs2lab::State;

fn rollo(l: u32) -> SchemeRef {
    Arc::new(toy_rollo(l, 3, 21).unwrap())
}

fn lwe() -> SchemeRef {
    Arc::new(
        toy_lwe(
            4,
            2,
            ErrorProfile::SparseLowWeight,
            EncodeParams::random(4, 8),
            3,
        )
        .unwrap(),
    )
}

fn otp() -> SkeRef {
    Arc::new(ske_otp_prf(3, 1, 2, 4).unwrap())
}

fn perm_ske() -> SkeRef {
    Arc::new(ske_random_perm(3, 1, 6, 4).unwrap())
}

fn qind(scheme: &SchemeRef, attack: &str, trials: u64, seed: u64) -> AdvantageEstimate {
    let game = QindQcpaGame::new(scheme.clone(), seed, GameOptions::default()).unwrap();
    let adv = match build_attack(attack, AttackTarget::Pke(scheme)).unwrap() {
        BuiltAttack::Quantum(a) => a,
        BuiltAttack::Classical(c) => embed_classical(c),
    };
    estimate_advantage(trials, seed, |i, s| game.run_trial(adv.as_ref(), i, s))
        .unwrap()
        .1
}

#[test]
fn lwe_hadamard_always_wins() {
    let est = qind(&lwe(), "lwe-hadamard", 500, 7);
    assert_eq!(est.wins, 500);
}

#[test]
fn lwe_hadamard_wins_under_the_dense_profile_and_identity_encoding() {
    let s: SchemeRef =
        Arc::new(toy_lwe(3, 2, ErrorProfile::Dense, EncodeParams::identity(3), 5).unwrap());
    assert_eq!(qind(&s, "lwe-hadamard", 200, 2).wins, 200);
}

#[test]
fn rollo_hadamard_matches_overlap_formula() {
    for (l, trials) in [(1, 3000), (2, 3000), (3, 3000)] {
        let est = qind(&rollo(l), "rollo-hadamard", trials, 11 + l as u64);
        let expected = 1.0 - 2f64.powi(-(l as i32 + 1));
        assert!(est.within(expected, 3.0), "l={l}: {est:?}");
    }
}

#[test]
fn blind_guesser_is_at_chance() {
    let est = qind(&rollo(1), "blind", 2000, 5);
    assert!(est.within(0.5, 3.0), "{est:?}");
}

#[test]
fn classical_c1_is_at_chance_in_ind_qcpa() {
    let s = rollo(1);
    let game = IndQcpaGame::new(s.clone(), 3, GameOptions::default()).unwrap();
    let (_, est) =
        estimate_advantage(2000, 3, |i, seed| game.run_trial(&ClassicalC1, i, seed)).unwrap();
    assert!(est.within(0.5, 3.0), "{est:?}");
}

#[test]
fn embedding_replays_the_classical_game_exactly() {
    let s = rollo(2);
    let ind = IndQcpaGame::new(s.clone(), 9, GameOptions::default()).unwrap();
    let qind = QindQcpaGame::new(s.clone(), 9, GameOptions::default()).unwrap();
    let advs: Vec<ClassicalAdversaryRef> = vec![
        Arc::new(ClassicalConstant),
        Arc::new(ClassicalC1),
        Arc::new(ClassicalBruteForce),
    ];
    for a in advs {
        let e = embed_classical(a.clone());
        let (r1, _) =
            estimate_advantage(300, 9, |i, seed| ind.run_trial(a.as_ref(), i, seed)).unwrap();
        let (r2, _) =
            estimate_advantage(300, 9, |i, seed| qind.run_trial(e.as_ref(), i, seed)).unwrap();
        assert_eq!(r1, r2, "{}", a.name());
    }
}

#[test]
fn classical_ciphertext_state_measures_to_the_encryption() {
    let s = rollo(2);
    let mut rng = stream(4, 0);
    let keys = s.kgen(&mut rng).unwrap();
    let op = build_type2(&s, keys, Construction::ViaRec).unwrap();
    for m in 0..4u64 {
        for r in 0..8u64 {
            let phi = State::basis_index(qs2lab::qsim::RegisterLayout::single("m", 2).unwrap(), m)
                .unwrap();
            let psi = type2_oracle_call_at(&op, &phi, r).unwrap();
            let c = s.enc(keys.pk, m, r);
            assert!((psi.probability(c) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn secret_key_hadamard_rates() {
    let g = QindSkeGame::new(otp(), 1, GameOptions::default()).unwrap();
    let adv = ske_hadamard_adversary(1);
    let (_, est) = estimate_advantage(3000, 1, |i, s| g.run_trial(adv.as_ref(), i, s)).unwrap();
    assert!(est.within(0.75, 3.0), "{est:?}");

    let g = QindSkeGame::new(perm_ske(), 2, GameOptions::default()).unwrap();
    let (_, est) = estimate_advantage(3000, 2, |i, s| g.run_trial(adv.as_ref(), i, s)).unwrap();
    assert!(est.advantage <= 3.0 * est.stderr, "{est:?}");

    let blind = blind_adversary();
    let (_, est) = estimate_advantage(2000, 3, |i, s| g.run_trial(blind.as_ref(), i, s)).unwrap();
    assert!(est.within(0.5, 3.0), "{est:?}");
}

#[test]
fn lifting_carries_the_secret_key_attack_to_the_hybrid() {
    let h: SchemeRef = Arc::new(hybrid_pke(rollo(3), otp()).unwrap());
    let game = QindQcpaGame::new(h.clone(), 4, GameOptions::default()).unwrap();
    assert_eq!(game.construction(), Construction::ViaRec);
    let adv = hybrid_lifting_adversary(ske_hadamard_adversary(1));
    let (_, est) = estimate_advantage(3000, 4, |i, s| game.run_trial(adv.as_ref(), i, s)).unwrap();
    assert!(est.within(0.75, 3.0), "{est:?}");

    let h: SchemeRef = Arc::new(hybrid_pke(rollo(3), perm_ske()).unwrap());
    let game = QindQcpaGame::new(h.clone(), 5, GameOptions::default()).unwrap();
    for adv in [
        adv.clone(),
        rollo_hadamard_adversary_on(1, "c1"),
        hybrid_lifting_adversary(blind_adversary()),
    ] {
        let (_, est) =
            estimate_advantage(2000, 5, |i, s| game.run_trial(adv.as_ref(), i, s)).unwrap();
        assert!(est.advantage <= 3.0 * est.stderr, "{}: {est:?}", adv.name());
    }
}

#[test]
fn lifting_rejects_non_hybrid_targets() {
    let game = QindQcpaGame::new(rollo(1), 4, GameOptions::default()).unwrap();
    let adv = hybrid_lifting_adversary(ske_hadamard_adversary(1));
    assert!(matches!(
        game.run_trial(adv.as_ref(), 0, 1),
        Err(GameError::Qsim(_))
    ));
}

#[test]
fn non_isometric_scheme_has_no_quantum_game() {
    let s: SchemeRef = Arc::new(almost_constant_scheme(2, 1).unwrap());
    match QindQcpaGame::new(s, 1, GameOptions::default()) {
        Err(e @ GameError::GameUndefinedForScheme { .. }) => {
            assert!(e
                .to_string()
                .starts_with("game undefined: non-isometric scheme"))
        }
        other => panic!("expected undefined game, got {:?}", other.err()),
    }
}

#[test]
fn forbidden_randomness_game_always_wins_on_distinct_messages() {
    let schemes: Vec<SchemeRef> = vec![
        lwe(),
        rollo(1),
        rollo(3),
        Arc::new(hybrid_pke(rollo(3), otp()).unwrap()),
        Arc::new(transformed_scheme(rollo(2), 3).unwrap()),
        Arc::new(toy_perm(2, 2, 1).unwrap()),
        Arc::new(almost_constant_scheme(2, 1).unwrap()),
    ];
    for s in schemes {
        let g = ForbiddenGame::new(s.clone(), 6, GameOptions::default(), None).unwrap();
        let (recs, est) = estimate_advantage(300, 6, |i, seed| g.run_trial(i, seed)).unwrap();
        assert_eq!(est.wins, 300, "{}", s.name());
        // The b = 0 ancilla is exactly zero.
        assert!(recs
            .iter()
            .filter(|r| r.secret_bit == 0)
            .all(|r| r.guess == 0));
    }
}

#[test]
fn forbidden_game_with_equal_messages_is_at_chance() {
    let g = ForbiddenGame::new(rollo(1), 8, GameOptions::default(), Some((1, 1))).unwrap();
    let (recs, est) = estimate_advantage(2000, 8, |i, seed| g.run_trial(i, seed)).unwrap();
    assert!(est.within(0.5, 3.0), "{est:?}");
    assert!(recs.iter().all(|r| r.resamples == 0));
}

#[test]
fn almost_constant_collisions_are_resampled() {
    // Enc is constant off the key, so most draws collide and get redrawn.
    let s: SchemeRef = Arc::new(almost_constant_scheme(2, 1).unwrap());
    let g = ForbiddenGame::new(s, 2, GameOptions::default(), None).unwrap();
    assert_eq!(g.construction(), None);
    let (recs, _) = estimate_advantage(100, 2, |i, seed| g.run_trial(i, seed)).unwrap();
    assert!(recs.iter().map(|r| r.resamples).sum::<u64>() > 0);
}

#[test]
fn recoverable_games_never_touch_the_secret_key() {
    let s = rollo(1);
    let keys = s.kgen(&mut stream(1, 1)).unwrap();
    let op = build_type2(&s, keys, Construction::ViaRec).unwrap();
    assert_eq!(op.key_material(), KeyMaterial::PublicOnly);
    let game = QindQcpaGame::new(s.clone(), 1, GameOptions::default()).unwrap();
    let adv = rollo_hadamard_adversary(1);
    for i in 0..20 {
        game.run_trial(adv.as_ref(), i, i).unwrap();
    }
    assert_eq!(op.audit().dec, 0);
}

#[test]
fn replay_is_byte_identical() {
    let run = |seed| {
        let s = build_scheme(&SchemeDescriptor::new(
            "toy-rollo",
            3,
            serde_json::json!({}),
        ))
        .unwrap();
        let game = QindQcpaGame::new(s, seed, GameOptions::default()).unwrap();
        let adv = rollo_hadamard_adversary(1);
        let (recs, est) =
            estimate_advantage(200, seed, |i, t| game.run_trial(adv.as_ref(), i, t)).unwrap();
        let mut out = Vec::new();
        report::write_jsonl(&mut out, &recs, &est).unwrap();
        out
    };
    assert_eq!(run(17), run(17));
    assert_ne!(run(17), run(18));
}

#[test]
fn pinned_keypair_is_reused() {
    let s = rollo(1);
    let pinned = QindQcpaGame::new(s.clone(), 3, GameOptions { pin_keypair: true }).unwrap();
    let adv = rollo_hadamard_adversary(1);
    let (_, est) =
        estimate_advantage(2000, 3, |i, t| pinned.run_trial(adv.as_ref(), i, t)).unwrap();
    assert!(est.within(0.75, 3.0), "{est:?}");
}

#[test]
fn fair_coin_estimate_is_tight() {
    let (_, est) = estimate_advantage(10_000, 42, |i, seed| {
        use rand::Rng;
        let b = stream(seed, 0).gen::<bool>() as u8;
        Ok(ExperimentRecord {
            trial: i,
            seed,
            secret_bit: b,
            guess: 0,
            win: b == 0,
            oracle_calls: 0,
            resamples: 0,
        })
    })
    .unwrap();
    assert!((est.win_rate - 0.5).abs() <= 0.015, "{est:?}");
}

#[test]
fn oracle_queries_are_counted() {
    use qs2lab::games::{Adversary, Challenge, ChallengeView, Token};
    struct Querier;
    impl Adversary for Querier {
        fn name(&self) -> String {
            "querier".into()
        }
        fn prepare_challenge(
            &self,
            view: &ChallengeView<'_>,
            _rng: &mut dyn rand::RngCore,
        ) -> Result<Challenge, GameError> {
            let zero = State::basis_index(view.message_layout.clone(), 0)?;
            let oracle = view.oracle.unwrap();
            for _ in 0..3 {
                let out = oracle.call(&zero)?;
                assert_eq!(out.layout(), &view.ciphertext_layout);
            }
            Ok(Challenge::new(zero.clone(), zero))
        }
        fn guess(
            &self,
            _t: Token,
            _psi: &State,
            view: &ChallengeView<'_>,
            _rng: &mut dyn rand::RngCore,
        ) -> Result<u8, GameError> {
            view.oracle
                .unwrap()
                .call(&State::basis_index(view.message_layout.clone(), 1)?)?;
            Ok(1)
        }
    }
    let game = QindQcpaGame::new(rollo(1), 1, GameOptions::default()).unwrap();
    let rec = game.run_trial(&Querier, 0, 5).unwrap();
    assert_eq!(rec.oracle_calls, 4);
}
