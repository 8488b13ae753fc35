//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde_json::{json, Value};

use qs2lab::attacks::{
    blind_adversary, classical_adversaries, hybrid_lifting_adversary, lwe_hadamard_adversary,
    rollo_hadamard_adversary, rollo_hadamard_adversary_on, ske_hadamard_adversary,
};
use qs2lab::classify::{
    check_isometric, classify_scheme, measure_alpha, AlphaMode, Correctness, Isometry, Recoverable,
};
use qs2lab::games::{
    embed_classical, estimate_advantage, streams, AdvantageEstimate, AdversaryRef, ForbiddenGame,
    GameError, GameOptions, IndQcpaGame, QindQcpaGame, QindSkeGame,
};
use qs2lab::operators::{
    build_type1_dec, build_type1_enc, build_type1_rec, build_type2, check_bijective,
    check_type2_contract, CheckOutcome, Construction, KeyMaterial, OracleOperator,
};
use qs2lab::qsim::{Basis, BasisPermutation, RegisterLayout};
use qs2lab::rng::{random_permutation, stream};
use qs2lab::schemes::{
    build_scheme, build_ske, hybrid_pke, toy_perm, Keypair, SchemeDescriptor, SchemeRef, SkeRef,
    ToyLwe, PKE_NAMES,
};
use qs2lab::State;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_qs2lab");

fn pke(name: &str, seed: u64, params: Value) -> SchemeRef {
    build_scheme(&SchemeDescriptor::new(name, seed, params)).expect("built-in scheme")
}

fn ske(name: &str, seed: u64, params: Value) -> SkeRef {
    build_ske(&SchemeDescriptor::new(name, seed, params)).expect("built-in scheme")
}

fn keys(scheme: &SchemeRef, seed: u64) -> Keypair {
    scheme
        .kgen(&mut stream(seed, streams::KEYGEN))
        .expect("keygen")
}

fn qind(
    scheme: &SchemeRef,
    adv: &AdversaryRef,
    trials: u64,
    seed: u64,
) -> Result<AdvantageEstimate, GameError> {
    let game = QindQcpaGame::new(scheme.clone(), seed, GameOptions::default())?;
    Ok(estimate_advantage(trials, seed, |i, s| game.run_trial(adv.as_ref(), i, s))?.1)
}

fn qind_ske(
    ske: &SkeRef,
    adv: &AdversaryRef,
    trials: u64,
    seed: u64,
) -> Result<AdvantageEstimate, GameError> {
    let game = QindSkeGame::new(ske.clone(), seed, GameOptions::default())?;
    Ok(estimate_advantage(trials, seed, |i, s| game.run_trial(adv.as_ref(), i, s))?.1)
}

fn sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_lwe_hadamard() -> Outcome {
    let scheme = pke("toy-lwe", 7, json!({"n": 4, "q": 2, "encode": "random"}));
    let encode = scheme
        .as_any()
        .downcast_ref::<ToyLwe>()
        .expect("toy-lwe")
        .encode_params()
        .clone();
    let start = Instant::now();
    let est = qind(&scheme, &lwe_hadamard_adversary(encode), 500, 7).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    ensure(est.wins == 500, || {
        format!("{} losses in 500 trials", 500 - est.wins)
    })?;
    ensure(secs < 10.0, || format!("took {secs:.1}s, target < 10s"))?;
    Ok(format!("500/500 wins, {secs:.2}s"))
}

fn c2_rollo_hadamard() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for l in [1u32, 2] {
        let scheme = pke("toy-rollo", 7, json!({"l": l, "k": 3}));
        let est = qind(&scheme, &rollo_hadamard_adversary(l), 4000, 7).map_err(err)?;
        let expected = 1.0 - 2f64.powi(-(l as i32 + 1));
        ensure(est.within(expected, 3.0), || {
            format!(
                "l={l}: win rate {:.4} outside {expected} +- {:.4}",
                est.win_rate,
                3.0 * sigma(expected, 4000)
            )
        })?;
        notes.push(format!("l={l} {:.4} (target {expected})", est.win_rate));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1}s, target < 30s"))?;
    Ok(format!("{}, {secs:.2}s", notes.join(", ")))
}

fn hybrid_over(inner_ske: &str, seed: u64) -> SchemeRef {
    pke(
        "hybrid",
        seed,
        json!({"pke": {"name": "toy-rollo", "params": {"l": 3, "k": 3}}, "ske": inner_ske}),
    )
}

fn c3_hybrid_lifting() -> Outcome {
    let otp = ske("ske-otp-prf", 3, json!({}));
    let standalone = qind_ske(&otp, &ske_hadamard_adversary(1), 4000, 31).map_err(err)?;
    let h = hybrid_over("ske-otp-prf", 3);
    let lifted = qind(
        &h,
        &hybrid_lifting_adversary(ske_hadamard_adversary(1)),
        4000,
        32,
    )
    .map_err(err)?;
    ensure(
        lifted.win_rate >= standalone.win_rate - 3.0 * lifted.stderr,
        || {
            format!(
                "lifted {:.4} below standalone {:.4} - 3*{:.4}",
                lifted.win_rate, standalone.win_rate, lifted.stderr
            )
        },
    )?;
    ensure(lifted.within(0.75, 3.0), || {
        format!(
            "lifted win rate {:.4} outside 0.75 +- 3 sigma",
            lifted.win_rate
        )
    })?;
    Ok(format!(
        "lifted {:.4} vs standalone {:.4}",
        lifted.win_rate, standalone.win_rate
    ))
}

fn c4_random_perm_hybrid() -> Outcome {
    let h = hybrid_over("ske-random-perm", 4);
    let battery: Vec<(&str, AdversaryRef)> = vec![
        ("rollo-hadamard on c1", rollo_hadamard_adversary_on(1, "c1")),
        (
            "hybrid-lifting(ske-hadamard)",
            hybrid_lifting_adversary(ske_hadamard_adversary(1)),
        ),
        ("blind", blind_adversary()),
    ];
    let mut notes = Vec::new();
    for (i, (name, adv)) in battery.iter().enumerate() {
        let est = qind(&h, adv, 4000, 40 + i as u64).map_err(err)?;
        ensure(est.advantage <= 3.0 * est.stderr, || {
            format!(
                "{name}: advantage {:.4} > 3*{:.4}",
                est.advantage, est.stderr
            )
        })?;
        notes.push(format!("{name} adv {:.4}", est.advantage));
    }
    Ok(notes.join(", "))
}

fn builtin_pke_instances() -> Vec<SchemeRef> {
    let mut v: Vec<SchemeRef> = PKE_NAMES
        .iter()
        .filter(|n| **n != "corrupt-rec")
        .map(|n| pke(n, 5, json!({})))
        .collect();
    v.push(pke(
        "toy-lwe",
        5,
        json!({"profile": "dense", "encode": "random"}),
    ));
    v.push(pke("toy-rollo", 5, json!({"l": 2, "k": 4})));
    v.push(hybrid_over("ske-random-perm", 5));
    v
}

fn exhaustive(o: CheckOutcome) -> Result<u64, String> {
    match o {
        CheckOutcome::Exhaustive { checked } => Ok(checked),
        CheckOutcome::Sampled { .. } => Err("contract check fell back to sampling".into()),
    }
}

fn c5_constructions() -> Outcome {
    let (mut via_dec, mut via_rec, mut states) = (0, 0, 0u64);
    for scheme in builtin_pke_instances() {
        let k = keys(&scheme, 9);
        let name = scheme.name().to_string();
        let alpha = measure_alpha(&scheme, k, AlphaMode::Exhaustive).map_err(err)?;
        if alpha == 0.0 {
            let op = build_type2(&scheme, k, Construction::ViaDec)
                .map_err(|e| format!("{name}: {e}"))?;
            states += exhaustive(
                check_type2_contract(&op, &scheme, k.pk)
                    .map_err(|v| format!("{name} dec circuit: {v:?}"))?,
            )?;
            via_dec += 1;
        }
        if scheme.has_rec() {
            let op = build_type2(&scheme, k, Construction::ViaRec)
                .map_err(|e| format!("{name}: {e}"))?;
            states += exhaustive(
                check_type2_contract(&op, &scheme, k.pk)
                    .map_err(|v| format!("{name} rec circuit: {v:?}"))?,
            )?;
            ensure(op.key_material() == KeyMaterial::PublicOnly, || {
                format!("{name}: rec circuit flagged secret")
            })?;
            ensure(op.audit().dec == 0, || {
                format!("{name}: rec circuit called Dec")
            })?;
            via_rec += 1;
        }
    }
    ensure(via_dec >= 4 && via_rec >= 4, || {
        format!("too few schemes covered: via-dec {via_dec}, via-rec {via_rec}")
    })?;
    Ok(format!("{via_dec} perfect schemes via the dec circuit, {via_rec} recoverable via the rec circuit (no Dec), {states} basis inputs"))
}

fn c6_rec_exhaustive() -> Outcome {
    let otp = ske("ske-otp-prf", 6, json!({}));
    let no_rec_inner: SchemeRef = Arc::new(toy_perm(3, 2, 6).map_err(err)?);
    assert!(!no_rec_inner.has_rec());
    let schemes: Vec<SchemeRef> = vec![
        pke("toy-lwe", 6, json!({})),
        pke(
            "toy-lwe",
            6,
            json!({"profile": "dense", "encode": "random"}),
        ),
        pke("toy-rollo", 6, json!({})),
        pke("toy-rollo", 6, json!({"l": 3, "k": 5})),
        hybrid_over("ske-otp-prf", 6),
        Arc::new(hybrid_pke(no_rec_inner, otp).map_err(err)?),
    ];
    let mut pairs = 0u64;
    for s in &schemes {
        let w = s.widths();
        for seed in 0..3 {
            let k = keys(s, 100 + seed);
            for m in 0..1u64 << w.m_bits {
                for r in 0..1u64 << w.r_bits {
                    let c = s.enc(k.pk, m, r);
                    ensure(s.rec(k.pk, r, c) == Some(m), || {
                        format!("{}: Rec fails at m={m} r={r}", s.name())
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} schemes, {pairs} (key, m, r) triples",
        schemes.len()
    ))
}

fn c7_classical_lifting() -> Outcome {
    let mut notes = Vec::new();
    for scheme in [pke("toy-rollo", 7, json!({})), pke("toy-lwe", 7, json!({}))] {
        let ind = IndQcpaGame::new(scheme.clone(), 70, GameOptions::default()).map_err(err)?;
        let qg = QindQcpaGame::new(scheme.clone(), 71, GameOptions::default()).map_err(err)?;
        for adv in classical_adversaries() {
            let (_, c) = estimate_advantage(2000, 70, |i, s| ind.run_trial(adv.as_ref(), i, s))
                .map_err(err)?;
            let e = embed_classical(adv.clone());
            let (_, q) =
                estimate_advantage(2000, 71, |i, s| qg.run_trial(e.as_ref(), i, s)).map_err(err)?;
            // Independent seeds: compare against the stderr of the difference.
            let se = (c.stderr.powi(2) + q.stderr.powi(2)).sqrt();
            ensure(q.win_rate >= c.win_rate - 3.0 * se, || {
                format!(
                    "{} on {}: qIND {:.4} < IND {:.4} - 3*{se:.4}",
                    adv.name(),
                    scheme.name(),
                    q.win_rate,
                    c.win_rate
                )
            })?;
            notes.push(format!(
                "{}/{} qIND {:.3} IND {:.3}",
                scheme.name(),
                adv.name(),
                q.win_rate,
                c.win_rate
            ));
        }
    }
    Ok(notes.join(", "))
}

fn c8_forbidden() -> Outcome {
    let mut covered = Vec::new();
    let mut resamples = 0;
    let mut schemes = builtin_pke_instances();
    schemes.push(pke("corrupt-rec", 5, json!({"fault_r": 5})));
    for scheme in schemes {
        let k = keys(&scheme, 8);
        if matches!(
            check_isometric(&scheme, k.pk).map_err(err)?,
            Isometry::NonIsometricWitnessed(_)
        ) {
            continue;
        }
        let g = ForbiddenGame::new(scheme.clone(), 8, GameOptions::default(), None).map_err(err)?;
        let (recs, est) = estimate_advantage(500, 8, |i, s| g.run_trial(i, s)).map_err(err)?;
        ensure(est.wins == 500, || {
            format!("{}: {} losses", scheme.name(), 500 - est.wins)
        })?;
        resamples += recs.iter().map(|r| r.resamples).sum::<u64>();
        covered.push(scheme.name().to_string());
    }
    Ok(format!(
        "500/500 on {} isometric schemes, {resamples} resamples",
        covered.len()
    ))
}

fn c9_classification() -> Outcome {
    let check = |scheme: &SchemeRef| classify_scheme(scheme, keys(scheme, 9)).map_err(err);
    let lwe = check(&pke("toy-lwe", 9, json!({})))?;
    ensure(
        matches!(lwe.correctness, Correctness::Partial { .. })
            && lwe.recoverable == Recoverable::Yes
            && lwe.isometry == Isometry::IsometricWitnessed
            && lwe.type2_path == Some(Construction::ViaRec),
        || format!("toy-lwe: {lwe:?}"),
    )?;
    let rollo = check(&pke("toy-rollo", 9, json!({})))?;
    ensure(
        rollo.recoverable == Recoverable::Yes
            && rollo.isometry == Isometry::IsometricWitnessed
            && rollo.type2_path == Some(Construction::ViaRec),
        || format!("toy-rollo: {rollo:?}"),
    )?;
    let hybrid = check(&pke("hybrid", 9, json!({})))?;
    ensure(hybrid.recoverable == Recoverable::Yes, || {
        format!("hybrid: {hybrid:?}")
    })?;
    let tr = check(&pke("transformed", 9, json!({})))?;
    ensure(
        tr.recoverable == Recoverable::NoRecDeclared
            && tr.type2_path == Some(Construction::Transformed),
        || format!("transformed: {tr:?}"),
    )?;
    let ac_scheme = pke("almost-constant", 9, json!({}));
    let ac = check(&ac_scheme)?;
    let Isometry::NonIsometricWitnessed(w) = &ac.isometry else {
        return Err(format!("almost-constant: {ac:?}"));
    };
    ensure(w.holds(&ac_scheme, keys(&ac_scheme, 9).pk), || {
        format!("witness {w:?} does not hold")
    })?;
    ensure(ac.type2_path.is_none(), || {
        "almost-constant has a type-2 path".into()
    })?;

    let out = Command::new(BIN)
        .args([
            "run",
            "--scheme",
            "almost-constant",
            "--game",
            "qind-qcpa",
            "--attack",
            "blind",
        ])
        .args(["--trials", "10", "--seed", "7"])
        .output()
        .map_err(err)?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(2), || {
        format!("exit {:?}", out.status.code())
    })?;
    ensure(
        stderr.contains("game undefined: non-isometric scheme"),
        || stderr.to_string(),
    )?;
    Ok("five classifications match; almost-constant run exits 2".into())
}

fn random_pure(layout: RegisterLayout, rng: &mut dyn RngCore) -> State {
    let dim = layout.dim();
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    State::from_amplitudes(layout, amps).expect("normalized")
}

fn random_mixed(layout: RegisterLayout, rng: &mut dyn RngCore) -> State {
    let dim = layout.dim();
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    let weights = [0.5, 0.3, 0.2];
    for w in weights {
        let psi = random_pure(layout.clone(), rng);
        let a = psi.amplitudes().unwrap();
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] += a[i] * a[j].conj() * w;
            }
        }
    }
    State::from_density(layout, rho).expect("valid density")
}

fn random_layout(rng: &mut dyn RngCore, max_width: u32) -> RegisterLayout {
    let mut regs = Vec::new();
    let mut total = 0;
    let mut i = 0;
    while total < max_width && (regs.len() < 2 || rng.gen_bool(0.5)) {
        let w = rng.gen_range(1..=(max_width - total).min(3));
        regs.push((format!("q{i}"), w));
        total += w;
        i += 1;
    }
    RegisterLayout::new(regs).unwrap()
}

fn max_diff(a: &State, b: &State) -> f64 {
    let dim = a.layout().dim();
    let mut m: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            m = m.max((a.rho(i, j) - b.rho(i, j)).norm());
        }
    }
    m
}

fn operators_of(scheme: &SchemeRef, k: Keypair) -> Vec<OracleOperator> {
    let mut ops = vec![
        build_type1_enc(scheme, k.pk).unwrap(),
        build_type1_dec(scheme, k.sk).unwrap(),
    ];
    if scheme.has_rec() {
        ops.push(build_type1_rec(scheme, k.pk).unwrap());
        ops.push(build_type2(scheme, k, Construction::ViaRec).unwrap());
    }
    if measure_alpha(scheme, k, AlphaMode::Exhaustive).unwrap() == 0.0 {
        ops.push(build_type2(scheme, k, Construction::ViaDec).unwrap());
    }
    if scheme.as_transformed().is_some() {
        ops.push(build_type2(scheme, k, Construction::Transformed).unwrap());
    }
    ops
}

fn c10_simulator() -> Outcome {
    let mut rng = stream(10, 0);
    // Bijectivity of every built-in operator.
    let mut n_ops = 0;
    let mut n_small = 0;
    for scheme in builtin_pke_instances() {
        for op in operators_of(&scheme, keys(&scheme, 10)) {
            check_bijective(&op).map_err(|v| format!("{}: {v:?}", scheme.name()))?;
            n_ops += 1;
            n_small += (op.perm().width() <= 16) as u32;
        }
    }

    let mut worst_perm: f64 = 0.0;
    let mut worst_h: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    let mut worst_born: f64 = 0.0;
    for _ in 0..200 {
        let layout = random_layout(&mut rng, 6);
        let width = layout.total_width();
        let dim = layout.dim();
        let pure = random_pure(layout.clone(), &mut rng);
        let mixed = random_mixed(layout.clone(), &mut rng);

        // Sparse permutation against a dense permutation-matrix product.
        let table = random_permutation(&mut rng, width);
        let perm = BasisPermutation::from_table(layout.clone(), table.clone()).map_err(err)?;
        let mut dense = vec![vec![0.0f64; dim]; dim];
        for (x, &y) in table.iter().enumerate() {
            dense[y as usize][x] = 1.0;
        }
        let a = pure.amplitudes().unwrap();
        let expect: Vec<Complex64> = (0..dim)
            .map(|i| (0..dim).map(|j| a[j] * dense[i][j]).sum())
            .collect();
        let got = pure.apply_permutation(&perm).map_err(err)?;
        for (x, y) in got.amplitudes().unwrap().iter().zip(&expect) {
            worst_perm = worst_perm.max((x - y).norm());
        }
        let got_m = mixed.apply_permutation(&perm).map_err(err)?;
        for i in 0..dim {
            for j in 0..dim {
                let mut e = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    for l in 0..dim {
                        e += dense[i][k] * mixed.rho(k, l) * dense[j][l];
                    }
                }
                worst_perm = worst_perm.max((got_m.rho(i, j) - e).norm());
            }
        }

        // H is an involution on every register.
        let names: Vec<String> = layout.names().map(str::to_string).collect();
        for n in &names {
            for s in [&pure, &mixed] {
                let back = s.hadamard(n).and_then(|t| t.hadamard(n)).map_err(err)?;
                worst_h = worst_h.max(max_diff(&back, s));
            }
        }

        // Nested partial traces agree with one-shot traces, on both representations.
        let keep_first = [names[0].as_str()];
        let keep_two: Vec<&str> = names.iter().take(2).map(String::as_str).collect();
        for s in [&pure, &mixed] {
            let once = s.partial_trace(&keep_first).map_err(err)?;
            let twice = s
                .partial_trace(&keep_two)
                .and_then(|t| t.partial_trace(&keep_first))
                .map_err(err)?;
            let via_mixed = s
                .to_mixed()
                .and_then(|t| t.partial_trace(&keep_first))
                .map_err(err)?;
            worst_trace = worst_trace
                .max(max_diff(&once, &twice))
                .max(max_diff(&once, &via_mixed));
        }

        // Born-rule totals.
        for s in [&pure, &mixed] {
            for n in &names {
                for basis in [Basis::Computational, Basis::Hadamard] {
                    let p: f64 = s.outcome_probabilities(n, basis).map_err(err)?.iter().sum();
                    worst_born = worst_born.max((p - 1.0).abs());
                }
                let (_, post) = s.measure(n, Basis::Computational, &mut rng).map_err(err)?;
                worst_born = worst_born.max((post.total_probability() - 1.0).abs());
            }
        }
    }
    ensure(worst_perm <= 1e-12, || {
        format!("sparse vs dense differ by {worst_perm:e}")
    })?;
    ensure(worst_h <= 1e-12, || {
        format!("H twice differs by {worst_h:e}")
    })?;
    ensure(worst_trace <= 1e-12, || {
        format!("partial traces differ by {worst_trace:e}")
    })?;
    ensure(worst_born <= 1e-9, || {
        format!("Born totals off by {worst_born:e}")
    })?;

    // Replay: byte-identical output across runs and thread counts.
    let dir = std::env::temp_dir().join(format!("qs2lab-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    for format in ["jsonl", "csv"] {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let path = dir.join(format!("{format}-{threads}.out"));
            let status = Command::new(BIN)
                .env("QS2LAB_THREADS", threads)
                .args(["run", "--scheme", "toy-rollo", "--game", "qind-qcpa"])
                .args([
                    "--attack",
                    "rollo-hadamard",
                    "--trials",
                    "300",
                    "--seed",
                    "99",
                ])
                .args(["--format", format, "--output"])
                .arg(&path)
                .status()
                .map_err(err)?;
            ensure(status.success(), || format!("run exited {status}"))?;
            outputs.push(std::fs::read(&path).map_err(err)?);
        }
        ensure(outputs[0] == outputs[1], || {
            format!("{format} output differs between runs")
        })?;
    }
    let _ = std::fs::remove_dir_all(&dir);

    Ok(format!(
        "{n_ops} operators bijective ({n_small} exhaustive <= 16 bits); perm {worst_perm:.1e}, \
         H {worst_h:.1e}, trace {worst_trace:.1e}, Born {worst_born:.1e}; replay identical"
    ))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("lwe hadamard wins every trial", c1_lwe_hadamard),
        ("rollo hadamard overlap formula", c2_rollo_hadamard),
        ("hybrid lifting of the secret-key attack", c3_hybrid_lifting),
        (
            "random-permutation hybrid resists the battery",
            c4_random_perm_hybrid,
        ),
        ("canonical type-2 circuits", c5_constructions),
        ("exhaustive recovery", c6_rec_exhaustive),
        ("classical-to-quantum lifting", c7_classical_lifting),
        ("forbidden-randomness game", c8_forbidden),
        ("classification and game gate", c9_classification),
        ("simulator properties and replay", c10_simulator),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
