//! `qs2lab`: run security games, classify schemes and check oracle circuits.
//!
//! Exit codes: 0 success, 1 configuration error, 2 game undefined for the
//! scheme, 3 operator contract failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use qs2lab::attacks::{build_attack, registry, AttackTarget, BuiltAttack};
use qs2lab::classify::{classify_scheme, measure_alpha, AlphaMode};
use qs2lab::games::report::{self, Format};
use qs2lab::games::{
    embed_classical, estimate_advantage, ske_as_scheme, streams, ForbiddenGame, GameError,
    GameOptions, IndQcpaGame, QindQcpaGame, QindSkeGame,
};
use qs2lab::operators::{
    build_type1_dec, build_type1_enc, build_type1_rec, build_type2_unchecked, check_bijective,
    check_involution, check_type2_contract, CheckOutcome, Construction, ContractViolation,
    KeyMaterial, OracleOperator,
};
use qs2lab::rng::stream;
use qs2lab::schemes::{Keypair, SchemeDescriptor, SchemeRef, SchemeSpec};

#[derive(Parser)]
#[command(name = "qs2lab", version, about = "Quantum security-game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a game for a number of trials and write records plus the estimate.
    Run(RunArgs),
    /// Print the classification of a scheme as JSON.
    Classify(SchemeArgs),
    /// Exhaustively check every applicable oracle circuit of a scheme.
    VerifyOperators(SchemeArgs),
    /// List the attack registry as JSON lines.
    Attacks,
    /// Print the fully resolved descriptor of a scheme.
    Describe(SchemeArgs),
}

#[derive(Args)]
struct SchemeSource {
    /// Built-in scheme name.
    #[arg(
        long,
        conflicts_with = "scheme_file",
        required_unless_present = "scheme_file"
    )]
    scheme: Option<String>,
    /// JSON scheme descriptor.
    #[arg(long)]
    scheme_file: Option<PathBuf>,
    /// Scheme parameter `key=value`; the value is parsed as JSON when possible.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Seed of the scheme's internal tables; defaults to `--seed`.
    #[arg(long)]
    scheme_seed: Option<u64>,
}

#[derive(Args)]
struct SchemeArgs {
    #[command(flatten)]
    source: SchemeSource,
    /// Seed for key generation.
    #[arg(long)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameName {
    QindQcpa,
    IndQcpa,
    QindSke,
    ForbiddenRandomness,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SchemeSource,
    #[arg(long, value_enum)]
    game: GameName,
    /// Registry attack; defaults to `blind` (quantum games) or `classical-constant`.
    #[arg(long)]
    attack: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Game seed. Mandatory so that every run replays.
    #[arg(long)]
    seed: u64,
    /// Output path; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    /// Use one key pair for all trials.
    #[arg(long)]
    pin_keypair: bool,
    /// Challenge messages `m0,m1` for the forbidden-randomness game.
    #[arg(long, value_name = "M0,M1")]
    messages: Option<String>,
}

enum Failure {
    Config(anyhow::Error),
    Undefined(String),
    Contract,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

impl From<GameError> for Failure {
    fn from(e: GameError) -> Self {
        match e {
            GameError::GameUndefinedForScheme { .. } => Failure::Undefined(e.to_string()),
            other => Failure::Config(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Usage errors are configuration errors; exit 2 is reserved for undefined games.
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Classify(args) => cmd_classify(args),
        Command::VerifyOperators(args) => cmd_verify(args),
        Command::Attacks => cmd_attacks(),
        Command::Describe(args) => cmd_describe(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) if closed_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Undefined(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contract) => {
            eprintln!("error: operator contract violated");
            ExitCode::from(3)
        }
    }
}

/// A reader that stops early (`| head`) is not an error.
fn closed_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

/// Writes one line to standard output.
fn emit(line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(io::stdout().lock(), "{line}").map_err(|e| Failure::Config(e.into()))
}

fn parse_param(raw: &str) -> anyhow::Result<(String, Value)> {
    let (k, v) = raw
        .split_once('=')
        .ok_or_else(|| anyhow!("parameter `{raw}` is not KEY=VALUE"))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.to_string(), value))
}

fn descriptor(src: &SchemeSource, seed: u64) -> anyhow::Result<SchemeDescriptor> {
    let mut d = match (&src.scheme, &src.scheme_file) {
        (Some(name), None) => {
            SchemeDescriptor::new(name, src.scheme_seed.unwrap_or(seed), json!({}))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut d: SchemeDescriptor = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            if let Some(s) = src.scheme_seed {
                d.seed = s;
            }
            d
        }
        _ => bail!("give exactly one of --scheme and --scheme-file"),
    };
    if !src.params.is_empty() {
        let params = match &mut d.params {
            Value::Object(m) => m,
            other => {
                *other = Value::Object(Map::new());
                other.as_object_mut().expect("just set")
            }
        };
        for raw in &src.params {
            let (k, v) = parse_param(raw)?;
            params.insert(k, v);
        }
    }
    Ok(d)
}

fn build(src: &SchemeSource, seed: u64) -> anyhow::Result<SchemeSpec> {
    Ok(SchemeSpec::build(&descriptor(src, seed)?)?)
}

/// Public-key view of a scheme; secret-key schemes use `pk = sk = key`.
fn as_pke(spec: SchemeSpec) -> SchemeRef {
    match spec {
        SchemeSpec::Pke(s) => s,
        SchemeSpec::Ske(s) => ske_as_scheme(s),
    }
}

fn keys_for(scheme: &SchemeRef, seed: u64) -> anyhow::Result<Keypair> {
    Ok(scheme.kgen(&mut stream(seed, streams::KEYGEN))?)
}

fn parse_messages(raw: &str) -> anyhow::Result<(u64, u64)> {
    let (a, b) = raw
        .split_once(',')
        .ok_or_else(|| anyhow!("--messages expects M0,M1"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn open_output(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let spec = build(&args.source, args.seed)?;
    let opts = GameOptions {
        pin_keypair: args.pin_keypair,
    };
    let seed = args.seed;
    let n = args.trials;
    let attack_name = |default: &str| args.attack.clone().unwrap_or_else(|| default.to_string());

    let (records, estimate) = match (args.game, spec) {
        (GameName::QindQcpa, SchemeSpec::Pke(scheme)) => {
            let game = QindQcpaGame::new(scheme.clone(), seed, opts)?;
            let adv = match build_attack(&attack_name("blind"), AttackTarget::Pke(&scheme))
                .map_err(anyhow::Error::from)?
            {
                BuiltAttack::Quantum(a) => a,
                BuiltAttack::Classical(c) => embed_classical(c),
            };
            estimate_advantage(n, seed, |i, s| game.run_trial(adv.as_ref(), i, s))?
        }
        (GameName::IndQcpa, SchemeSpec::Pke(scheme)) => {
            let game = IndQcpaGame::new(scheme.clone(), seed, opts)?;
            let name = attack_name("classical-constant");
            let BuiltAttack::Classical(adv) =
                build_attack(&name, AttackTarget::Pke(&scheme)).map_err(anyhow::Error::from)?
            else {
                return Err(
                    anyhow!("ind-qcpa needs a classical attack, `{name}` is quantum").into(),
                );
            };
            estimate_advantage(n, seed, |i, s| game.run_trial(adv.as_ref(), i, s))?
        }
        (GameName::QindSke, SchemeSpec::Ske(ske)) => {
            let game = QindSkeGame::new(ske.clone(), seed, opts)?;
            let name = attack_name("blind");
            let BuiltAttack::Quantum(adv) =
                build_attack(&name, AttackTarget::Ske(&ske)).map_err(anyhow::Error::from)?
            else {
                return Err(
                    anyhow!("qind-ske needs a quantum attack, `{name}` is classical").into(),
                );
            };
            estimate_advantage(n, seed, |i, s| game.run_trial(adv.as_ref(), i, s))?
        }
        (GameName::ForbiddenRandomness, SchemeSpec::Pke(scheme)) => {
            if args.attack.is_some() {
                return Err(
                    anyhow!("the forbidden-randomness game runs its built-in adversary").into(),
                );
            }
            let messages = args.messages.as_deref().map(parse_messages).transpose()?;
            let game = ForbiddenGame::new(scheme, seed, opts, messages)?;
            estimate_advantage(n, seed, |i, s| game.run_trial(i, s))?
        }
        (GameName::QindSke, SchemeSpec::Pke(s)) => {
            return Err(anyhow!(
                "qind-ske needs a secret-key scheme, `{}` is public-key",
                s.name()
            )
            .into())
        }
        (_, SchemeSpec::Ske(s)) => {
            return Err(anyhow!(
                "this game needs a public-key scheme, `{}` is secret-key",
                s.name()
            )
            .into())
        }
    };

    let format = match args.format {
        FormatArg::Jsonl => Format::Jsonl,
        FormatArg::Csv => Format::Csv,
    };
    let mut out = open_output(&args.output)?;
    report::write(format, &mut out, &records, &estimate)
        .and_then(|_| out.flush())
        .context("writing results")?;
    Ok(())
}

fn cmd_classify(args: SchemeArgs) -> Result<(), Failure> {
    let scheme = as_pke(build(&args.source, args.seed)?);
    let keys = keys_for(&scheme, args.seed)?;
    let class = classify_scheme(&scheme, keys).map_err(anyhow::Error::from)?;
    emit(serde_json::to_string_pretty(&class).map_err(anyhow::Error::from)?)
}

fn cmd_describe(args: SchemeArgs) -> Result<(), Failure> {
    let d = match build(&args.source, args.seed)? {
        SchemeSpec::Pke(s) => s.descriptor(),
        SchemeSpec::Ske(s) => s.descriptor(),
    };
    emit(serde_json::to_string_pretty(&d).map_err(anyhow::Error::from)?)
}

fn cmd_attacks() -> Result<(), Failure> {
    for d in registry() {
        emit(serde_json::to_string(&d).map_err(anyhow::Error::from)?)?;
    }
    Ok(())
}

/// One line of the verification report.
fn report_check(
    operator: &str,
    check: &str,
    result: Result<CheckOutcome, ContractViolation>,
    failed: &mut bool,
) -> Result<(), Failure> {
    let line = match result {
        Ok(outcome) => {
            json!({"operator": operator, "check": check, "status": "pass", "outcome": outcome})
        }
        Err(witness) => {
            *failed = true;
            json!({"operator": operator, "check": check, "status": "fail", "witness": witness})
        }
    };
    emit(line)
}

fn circuit_checks(
    name: &str,
    op: &OracleOperator,
    involution: bool,
    failed: &mut bool,
) -> Result<(), Failure> {
    if involution {
        report_check(name, "involution", check_involution(op), failed)?;
    }
    report_check(name, "bijective", check_bijective(op), failed)
}

fn cmd_verify(args: SchemeArgs) -> Result<(), Failure> {
    let scheme = as_pke(build(&args.source, args.seed)?);
    let keys = keys_for(&scheme, args.seed)?;
    let mut failed = false;
    let cfg = |e: qs2lab::operators::OperatorError| Failure::Config(e.into());

    circuit_checks(
        "type1-enc",
        &build_type1_enc(&scheme, keys.pk).map_err(cfg)?,
        true,
        &mut failed,
    )?;
    circuit_checks(
        "type1-dec",
        &build_type1_dec(&scheme, keys.sk).map_err(cfg)?,
        true,
        &mut failed,
    )?;
    if scheme.has_rec() {
        circuit_checks(
            "type1-rec",
            &build_type1_rec(&scheme, keys.pk).map_err(cfg)?,
            true,
            &mut failed,
        )?;
    }

    let perfect =
        measure_alpha(&scheme, keys, AlphaMode::Exhaustive).map_err(anyhow::Error::from)? == 0.0;
    let mut constructions = Vec::new();
    if scheme.has_rec() {
        constructions.push(Construction::ViaRec);
    }
    if perfect {
        constructions.push(Construction::ViaDec);
    }
    if scheme.as_transformed().is_some() {
        constructions.push(Construction::Transformed);
    }
    for c in constructions {
        let name = format!("type2-{}", c.label());
        let op = build_type2_unchecked(&scheme, keys, c).map_err(cfg)?;
        report_check(
            &name,
            "contract",
            check_type2_contract(&op, &scheme, keys.pk),
            &mut failed,
        )?;
        circuit_checks(&name, &op, false, &mut failed)?;
        if c == Construction::ViaRec {
            let audit = op.audit();
            let public_only = op.key_material() == KeyMaterial::PublicOnly && audit.dec == 0;
            failed |= !public_only;
            emit(json!({
                "operator": name,
                "check": "public-key-only",
                "status": if public_only { "pass" } else { "fail" },
                "audit": audit,
            }))?;
        }
    }
    if failed {
        Err(Failure::Contract)
    } else {
        Ok(())
    }
}
