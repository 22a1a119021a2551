//! Command-line surface: setup / eval / open / verify, the reductions in
//! both directions, instance walking and solution checking, benchmarks, and
//! the adversary probes. All structured input and output is the JSON
//! envelope forms; exit code 0 means success or accept, 1 means a
//! verification rejected, 2 means unusable input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use vdf_core::envelope::{
    bytes_from_hex, InstanceDescriptor, ParamsEnvelope, SolutionEnvelope, StatementEnvelope,
    SCHEMA_VERSION,
};
use vdf_core::reduction::{
    general_vdf_to_rsvl, instance_from_descriptor, perm_vdf_to_rsvl, rsvl_to_general_vdf,
    rsvl_to_perm_vdf, toy_linear_family, DerivedVdf, InjectiveOwf, IteratedStep,
};
use vdf_core::scheme::{
    fs_compile, ChallengeSource, InputMap, Mode, Proof, SchemeId, VdfParams, VdfScheme,
};
use vdf_core::schemes::scheme_for;

use vdf_harness::bench::{bench, render_table, BenchConfig};
use vdf_harness::probe::{
    forgery_probe_field_exhaustive, forgery_probe_random_proofs, mutation_soundness_probe,
    parallel_speedup_probe, ProbeConfig,
};
use vdf_harness::setup_params;
use vdf_harness::vectors::run_vector_file;

#[derive(Parser)]
#[command(name = "vdf", version, about = "Verifiable delay functions, verifiable-line search problems, and the reductions between them")]
struct Cli {
    /// Seed for deterministic sampling; falls back to $VDF_FORGE_SEED.
    #[arg(long, global = true)]
    seed: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    DworkNaor,
    Rsw,
    Pietrzak,
    Wesolowski,
}

impl From<SchemeArg> for SchemeId {
    fn from(value: SchemeArg) -> SchemeId {
        match value {
            SchemeArg::DworkNaor => SchemeId::DworkNaor,
            SchemeArg::Rsw => SchemeId::Rsw,
            SchemeArg::Pietrzak => SchemeId::Pietrzak,
            SchemeArg::Wesolowski => SchemeId::Wesolowski,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Interactive,
    FiatShamir,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputMapArg {
    Residue,
    Hash,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Sample public parameters for a scheme.
    Setup(SetupArgs),
    /// Evaluate the delay function on an input.
    Eval(EvalArgs),
    /// Generate the proof for an evaluated statement.
    Open(OpenArgs),
    /// Verify a statement envelope or a file of stored test vectors.
    Verify(VerifyArgs),
    /// Convert between schemes and verifiable-line instances.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Walk an instance i steps from its source.
    Walk(WalkArgs),
    /// Check a claimed solution against an instance.
    CheckSolution(CheckSolutionArgs),
    /// Run the cost benchmark grid.
    Bench(BenchArgs),
    /// Adversary probes.
    #[command(subcommand)]
    Probe(ProbeCommand),
}

#[derive(Args)]
struct SetupArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 64)]
    lambda: u32,
    #[arg(long = "T")]
    t: u64,
    #[arg(long, value_enum, default_value = "fiat-shamir")]
    mode: ModeArg,
    #[arg(long, value_enum)]
    input_map: Option<InputMapArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    params: PathBuf,
    /// Input bytes, hex encoded.
    #[arg(long)]
    x: String,
    /// Evaluate to an intermediate position instead of the full delay.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OpenArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    statement: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, requires = "statement")]
    params: Option<PathBuf>,
    #[arg(long)]
    statement: Option<PathBuf>,
    /// JSONL file of stored vectors; verifies every line against `expect`.
    #[arg(long, conflicts_with_all = ["params", "statement"])]
    vectors: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Scheme to instance: source the line at x and verify positions with
    /// the scheme's own open + verify.
    VdfToRsvl(VdfToRsvlArgs),
    /// Instance family to proof-free scheme (toy linear family).
    RsvlToVdf(RsvlToVdfArgs),
}

#[derive(Args)]
struct VdfToRsvlArgs {
    #[arg(long)]
    params: PathBuf,
    #[arg(long)]
    x: String,
    /// Use the iterated-step construction instead of the permutation one.
    #[arg(long)]
    general: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RsvlToVdfArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: u64,
    #[arg(long = "T")]
    t: u64,
    /// Compose with an injective map to accept arbitrary byte inputs.
    #[arg(long, value_enum)]
    owf: Option<OwfArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OwfArg {
    Identity,
    Feistel,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckSolutionArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated scheme list.
    #[arg(long, value_delimiter = ',', default_values_t = ["rsw".to_string(), "pietrzak".to_string(), "wesolowski".to_string()])]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u64 << 10, 1 << 11, 1 << 12])]
    t_grid: Vec<u64>,
    #[arg(long, default_value_t = 128)]
    lambda: u32,
    #[arg(long, default_value_t = 5)]
    reps: u32,
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProbeCommand {
    /// Same-chain race, independent-instance throughput, delay doubling.
    Parallel(ParallelArgs),
    /// Brute-force forgery rates.
    Forgery(ForgeryArgs),
    /// Single-field mutations of honest statements.
    Mutation(MutationArgs),
}

#[derive(Args)]
struct ParallelArgs {
    #[arg(long = "T", default_value_t = 1 << 16)]
    t: u64,
    #[arg(long, default_value_t = 512)]
    modulus_bits: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
    workers: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    reps: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForgeryArgs {
    #[arg(long, value_enum, default_value = "dwork-naor")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 8)]
    lambda: u32,
    #[arg(long = "T", default_value_t = 16)]
    t: u64,
    #[arg(long, default_value_t = 10_000)]
    queries: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MutationArgs {
    #[arg(long, value_enum, default_value = "pietrzak")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 32)]
    lambda: u32,
    #[arg(long = "T", default_value_t = 64)]
    t: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Compound envelope for a scheme derived from an instance family.
#[derive(Serialize, Deserialize)]
struct DerivedSchemeEnvelope {
    schema: u32,
    vdf: ParamsEnvelope,
    family: FamilyDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    owf: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FamilyDescriptor {
    family: String,
    n: usize,
    #[serde(rename = "T")]
    t: u64,
    params: serde_json::Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve_seed(cli_seed: &Option<String>) -> Vec<u8> {
    if let Some(seed) = cli_seed {
        return seed.as_bytes().to_vec();
    }
    if let Ok(seed) = std::env::var("VDF_FORGE_SEED") {
        return seed.into_bytes();
    }
    b"vdf-default-seed".to_vec()
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let contents = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&contents).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: &Option<PathBuf>, payload: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{payload}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> anyhow::Result<()> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

/// Load a scheme plus parameters from either a plain params envelope or the
/// compound derived-scheme envelope.
fn load_scheme_and_params(path: &Path) -> anyhow::Result<(Arc<dyn VdfScheme>, VdfParams)> {
    let value: serde_json::Value = load_json(path)?;
    if value.get("family").is_some() {
        let envelope: DerivedSchemeEnvelope = serde_json::from_value(value)?;
        let derived = derived_from_envelope(&envelope)?;
        let params = envelope.vdf.to_params(false)?;
        Ok((Arc::new(derived), params))
    } else {
        let envelope: ParamsEnvelope = serde_json::from_value(value)?;
        // The time-lock verifier needs the totient; regenerate it from the
        // recorded setup seed when we have one.
        let with_trapdoor = envelope.scheme == SchemeId::Rsw && envelope.seed_hex.is_some();
        let params = envelope.to_params(with_trapdoor)?;
        let scheme = scheme_for(envelope.scheme)?;
        Ok((scheme, params))
    }
}

fn derived_from_envelope(envelope: &DerivedSchemeEnvelope) -> anyhow::Result<DerivedVdf> {
    if envelope.family.family != "toy_linear" {
        bail!("unknown instance family `{}`", envelope.family.family);
    }
    let c = envelope.family.params["c"]
        .as_u64()
        .ok_or_else(|| anyhow!("toy_linear family needs `c`"))?;
    let family = toy_linear_family(envelope.family.n, c, envelope.family.t)?;
    match envelope.owf.as_deref() {
        None => Ok(rsvl_to_perm_vdf(family)),
        Some(kind) => {
            let owf = match kind {
                "identity" => InjectiveOwf::identity(envelope.family.n),
                "feistel" => InjectiveOwf::feistel(envelope.family.n, b"vdf-owf-key")?,
                other => bail!("unknown injective map `{other}`"),
            };
            let probe: Vec<Vec<u8>> = if envelope.family.n <= 16 {
                (0..1u64 << envelope.family.n)
                    .map(|v| {
                        vdf_core::Vertex::from_u64(envelope.family.n, v).expect("in range").to_bytes()
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Ok(rsvl_to_general_vdf(family, owf, &probe)?)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let seed = resolve_seed(&cli.seed);
    match cli.command {
        Command::Setup(args) => {
            let mode = match args.mode {
                ModeArg::Interactive => Mode::Interactive,
                ModeArg::FiatShamir => Mode::FiatShamir,
            };
            let input_map = args.input_map.map(|m| match m {
                InputMapArg::Residue => InputMap::Residue,
                InputMapArg::Hash => InputMap::HashToRange,
            });
            let params =
                setup_params(args.scheme.into(), args.lambda, args.t, mode, input_map, &seed)?;
            emit_json(&args.out, &ParamsEnvelope::of(&params, Some(&seed)))?;
            Ok(0)
        }
        Command::Eval(args) => {
            let (scheme, params) = load_scheme_and_params(&args.params)?;
            let x = bytes_from_hex(&args.x)?;
            let steps = args.steps.unwrap_or(params.t);
            let input = scheme.map_input(&params, &x)?;
            let output = scheme.step(&params, &input, steps)?;
            let statement = vdf_core::Statement { x, y: output, t: steps };
            let envelope =
                StatementEnvelope::of(scheme.id(), params.lambda, &statement, &Proof::empty(), None);
            emit_json(&args.out, &envelope)?;
            Ok(0)
        }
        Command::Open(args) => {
            let (scheme, params) = load_scheme_and_params(&args.params)?;
            let envelope: StatementEnvelope = load_json(&args.statement)?;
            let x = bytes_from_hex(&envelope.x_hex)?;
            let input = scheme.map_input(&params, &x)?;
            let output = scheme.decode_range(&params, &bytes_from_hex(&envelope.y_hex)?)?;
            let compiled = fs_compile(Arc::clone(&scheme));
            let outcome = compiled.open(&params, &input, &output, envelope.t)?;
            let proof = outcome
                .proof
                .ok_or_else(|| anyhow!("prover aborted: {:?}", outcome.abort))?;
            let statement = vdf_core::Statement { x, y: output, t: envelope.t };
            let transcript =
                vdf_core::Transcript { rounds: outcome.rounds, final_accept: true };
            let out = StatementEnvelope::of(
                scheme.id(),
                params.lambda,
                &statement,
                &proof,
                Some(&transcript),
            );
            emit_json(&args.out, &out)?;
            Ok(0)
        }
        Command::Verify(args) => {
            if let Some(vectors) = &args.vectors {
                let contents = std::fs::read_to_string(vectors)
                    .with_context(|| format!("reading {}", vectors.display()))?;
                let summary = run_vector_file(&contents)?;
                if summary.all_matched() {
                    println!("{} vectors, all matched", summary.total);
                    return Ok(0);
                }
                println!(
                    "{} vectors, {} mismatched (lines {:?})",
                    summary.total,
                    summary.mismatched.len(),
                    summary.mismatched
                );
                return Ok(1);
            }
            let statement_path = args
                .statement
                .as_ref()
                .ok_or_else(|| anyhow!("verify needs --statement or --vectors"))?;
            let params_path = args
                .params
                .as_ref()
                .ok_or_else(|| anyhow!("verify needs --params with --statement"))?;
            let (scheme, params) = load_scheme_and_params(params_path)?;
            let envelope: StatementEnvelope = load_json(statement_path)?;
            let x = bytes_from_hex(&envelope.x_hex)?;
            let input = scheme.map_input(&params, &x)?;
            let output = scheme.decode_range(&params, &bytes_from_hex(&envelope.y_hex)?)?;
            let proof = envelope
                .proof_with(scheme.proof_kind(), |b| scheme.decode_range(&params, b))?;
            let mut source = match params.mode {
                Mode::FiatShamir => ChallengeSource::FiatShamir,
                Mode::Interactive => {
                    ChallengeSource::replay(&envelope.rounds_to_transcript()?.rounds)
                }
            };
            let accept =
                scheme.verify(&params, &input, &output, envelope.t, &proof, &mut source)?;
            println!("{}", if accept { "accept" } else { "reject" });
            Ok(if accept { 0 } else { 1 })
        }
        Command::Reduce(direction) => match direction {
            ReduceCommand::VdfToRsvl(args) => {
                let (scheme, params) = load_scheme_and_params(&args.params)?;
                let params = Arc::new(params);
                let x = bytes_from_hex(&args.x)?;
                let instance = if args.general {
                    let f = IteratedStep::from_scheme(Arc::clone(&scheme), Arc::clone(&params));
                    general_vdf_to_rsvl(scheme, params, &x, f)?
                } else {
                    perm_vdf_to_rsvl(scheme, params, &x)?
                };
                emit_json(&args.out, instance.descriptor())?;
                Ok(0)
            }
            ReduceCommand::RsvlToVdf(args) => {
                let family = toy_linear_family(args.n, args.c, args.t)?;
                let (owf_name, derived) = match args.owf {
                    None => (None, rsvl_to_perm_vdf(family)),
                    Some(OwfArg::Identity) => {
                        let owf = InjectiveOwf::identity(args.n);
                        (Some("identity".to_string()), rsvl_to_general_vdf(family, owf, &[])?)
                    }
                    Some(OwfArg::Feistel) => {
                        let owf = InjectiveOwf::feistel(args.n, b"vdf-owf-key")?;
                        let probe: Vec<Vec<u8>> = (0..1u64 << args.n.min(16))
                            .map(|v| {
                                vdf_core::Vertex::from_u64(args.n, v).expect("in range").to_bytes()
                            })
                            .collect();
                        (Some("feistel".to_string()), rsvl_to_general_vdf(family, owf, &probe)?)
                    }
                };
                let params = derived.params(args.n as u32, Mode::Interactive)?;
                let envelope = DerivedSchemeEnvelope {
                    schema: SCHEMA_VERSION,
                    vdf: ParamsEnvelope::of(&params, None),
                    family: FamilyDescriptor {
                        family: "toy_linear".into(),
                        n: args.n,
                        t: args.t,
                        params: serde_json::json!({ "c": args.c }),
                    },
                    owf: owf_name,
                };
                emit_json(&args.out, &envelope)?;
                Ok(0)
            }
        },
        Command::Walk(args) => {
            let descriptor: InstanceDescriptor = load_json(&args.instance)?;
            let instance = instance_from_descriptor(&descriptor)?;
            let vertex = instance.walk(args.steps)?;
            emit_json(&args.out, &serde_json::json!({ "vertex_hex": vertex.to_hex() }))?;
            Ok(0)
        }
        Command::CheckSolution(args) => {
            let descriptor: InstanceDescriptor = load_json(&args.instance)?;
            let instance = instance_from_descriptor(&descriptor)?;
            let solution: SolutionEnvelope = load_json(&args.solution)?;
            let accepted = instance.check_solution(&solution.to_solution(instance.n())?)?;
            println!("{}", if accepted { "accept" } else { "reject" });
            Ok(if accepted { 0 } else { 1 })
        }
        Command::Bench(args) => {
            let schemes = args
                .schemes
                .iter()
                .map(|s| s.parse::<SchemeId>())
                .collect::<vdf_core::Result<Vec<_>>>()?;
            let config = BenchConfig {
                schemes,
                t_grid: args.t_grid,
                lambda: args.lambda,
                repetitions: args.reps,
                seed: seed.clone(),
            };
            let report = bench(&config);
            match args.format {
                FormatArg::Json => emit(&args.out, &serde_json::to_string_pretty(&report)?)?,
                FormatArg::Table => emit(&args.out, &render_table(&report))?,
            }
            Ok(0)
        }
        Command::Probe(kind) => match kind {
            ProbeCommand::Parallel(args) => {
                let config = ProbeConfig {
                    t: args.t,
                    modulus_bits: args.modulus_bits,
                    workers: args.workers,
                    repetitions: args.reps,
                    seed: seed.clone(),
                    ..ProbeConfig::default()
                };
                let report = parallel_speedup_probe(&config)?;
                emit_json(&args.out, &report)?;
                Ok(0)
            }
            ProbeCommand::Forgery(args) => {
                let scheme: SchemeId = args.scheme.into();
                let report = if scheme == SchemeId::DworkNaor {
                    forgery_probe_field_exhaustive(args.lambda, args.queries, &seed)?
                } else {
                    forgery_probe_random_proofs(scheme, args.lambda, args.t, args.queries, &seed)?
                };
                emit_json(&args.out, &report)?;
                Ok(0)
            }
            ProbeCommand::Mutation(args) => {
                let report = mutation_soundness_probe(
                    args.scheme.into(),
                    args.lambda,
                    args.t,
                    args.trials,
                    &seed,
                )?;
                emit_json(&args.out, &report)?;
                if report.accepted == 0 {
                    Ok(0)
                } else {
                    Ok(1)
                }
            }
        },
    }
}
