mod commands;
mod input;
mod report;
mod selftest;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] kfree::Error),
}

impl CliError {
    /// 1 not found, 2 usage, 3 missing file, 4 parse, 5 bad input,
    /// 6 unmet hypothesis, 7 budget or overflow, 8 other i/o.
    pub fn exit_code(&self) -> i32 {
        use kfree::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::FileNotFound(_) => 3,
            CliError::Io(_) => 8,
            CliError::Core(e) => match e {
                E::NotFoundWithinBound(_) | E::NoWitness(_) => 1,
                E::Parse(_) => 4,
                E::InvalidDiscriminant(_)
                | E::NotPrime(_)
                | E::ComponentMismatch(_)
                | E::ClassOutOfRange(_)
                | E::InvalidConstraint(_)
                | E::InvalidArgument(_) => 5,
                E::TailNotBoundable
                | E::LargeSieve(_)
                | E::PreconditionFailed(_)
                | E::RegionTooSmall(_) => 6,
                E::BudgetExceeded(_) | E::Overflow(_) => 7,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "kfree",
    version,
    about = "Sieves, k-free local-global checks, linear preservers and admissible shift spaces"
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
    /// Sieve specification file.
    #[arg(long, global = true)]
    spec: Option<String>,
    /// Worker threads for parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Membership, enumeration, density and tail counts.
    #[command(subcommand)]
    Sieve(SieveCmd),
    /// Congruence solving and local surjectivity.
    #[command(subcommand)]
    Lg(LgCmd),
    /// ℤ-linear maps between orders.
    #[command(subcommand)]
    Linmap(LinmapCmd),
    /// Admissible sets and block codes.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Entropy and zeta values.
    #[command(subcommand)]
    Entropy(EntropyCmd),
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Run this module's built-in checks and exit.
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Subcommand, Debug)]
pub enum SieveCmd {
    /// Members with max |coordinate| ≤ bound.
    Enumerate(EnumerateArgs),
    /// Density enclosure from primes of norm ≤ cutoff.
    Density(DensityArgs),
    /// N'(X, M) for the k-free sieve.
    Tail(TailArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    #[arg(long, default_value_t = 10)]
    pub bound: u64,
    /// Members listed at most.
    #[arg(long, default_value_t = 1000)]
    pub limit: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long, default_value_t = 10_000)]
    pub cutoff: u64,
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct TailArgs {
    /// Algebra, e.g. `Q(sqrt 2)`; defaults to the sieve's.
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long = "X", default_value_t = 100)]
    pub x: u64,
    #[arg(long = "M", default_value_t = 10)]
    pub m: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum LgCmd {
    /// An element of V(K,R) meeting congruences `p[i]^k=r`.
    Solve(SolveArgs),
    /// Surjectivity of V_{K,k} onto its reduction at p.
    Surjectivity(SurjArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    /// Constraint `p^k=r` or `p[i]^k=r`; repeatable.
    #[arg(long = "cong")]
    pub cong: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub bound: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SurjArgs {
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub bound: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct MapSel {
    /// Map file or built-in name (`incl_Q_sqrt<d>`).
    #[arg(long)]
    pub map: Option<String>,
    /// Row-major entries, with --source/--target.
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct SievePair {
    /// Sieve on the target; defaults to the k-free sieve.
    #[arg(long)]
    pub target_spec: Option<String>,
    /// Exponent of default k-free sieves.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
}

#[derive(Subcommand, Debug)]
pub enum LinmapCmd {
    /// The local condition A(V_p(K,R)) ⊆ V_p(L,S) at one p.
    Check(CheckArgs),
    /// First p ≤ P where the local condition fails.
    Scan(ScanArgs),
    /// Write A = M_ε ∘ τ.
    Decompose(DecomposeArgs),
    /// Matrices over F_q sending (F^×)^n into (F^×)^m.
    Preservers(PreserverArgs),
    /// t with a_i + t·x_i outside every R_i mod p^k.
    Cover(CoverArgs),
    /// Whether A maps units of height ≤ H to units.
    Units(UnitArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[command(flatten)]
    pub map: MapSel,
    #[command(flatten)]
    pub sieves: SievePair,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub map: MapSel,
    #[command(flatten)]
    pub sieves: SievePair,
    #[arg(long = "P", default_value_t = 100)]
    pub cutoff: u64,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub map: MapSel,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct PreserverArgs {
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Rows; defaults to n.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1 << 24)]
    pub budget: u64,
    /// Print the matrices.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Units x_i, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Offsets a_i, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Class lists R_i, `;` between coordinates, `,` inside.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct UnitArgs {
    #[command(flatten)]
    pub map: MapSel,
    #[arg(long = "H", default_value_t = 50)]
    pub height: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum ShiftCmd {
    /// Whether a finite pattern is admissible.
    Admissible(AdmissibleArgs),
    /// Apply a block code to a pattern.
    Apply(ApplyArgs),
    /// Randomized intertwiner check of a block code.
    Verify(VerifyArgs),
    /// Search for a conjugacy between two sieves.
    Conjugacy(ConjugacyArgs),
    /// Candidate symmetries with a small window.
    Symmetries(SymmetryArgs),
    /// Δ with (−Δ + V_{K,k}) ∩ M = X ∩ M.
    Orbit(OrbitArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct PatternSel {
    /// Pattern file.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Inline points, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct AdmissibleArgs {
    #[command(flatten)]
    pub pattern: PatternSel,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ApplyArgs {
    #[arg(long)]
    pub code: Option<String>,
    #[command(flatten)]
    pub pattern: PatternSel,
    /// Box the pattern is known on, `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub known: Option<String>,
    /// Box to report, `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: Option<String>,
    /// Sieve of the image; defaults to --spec.
    #[arg(long)]
    pub target_spec: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also check f(f(X)) = X.
    #[arg(long)]
    pub involution: bool,
    /// Code claimed to give preimages.
    #[arg(long)]
    pub preimage: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ConjugacyArgs {
    #[arg(long)]
    pub target_spec: Option<String>,
    /// Unit height bound.
    #[arg(long = "H", default_value_t = 50)]
    pub height: u64,
    #[arg(long, default_value_t = 50)]
    pub tail_cutoff: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SymmetryArgs {
    /// Window radius.
    #[arg(long = "W", default_value_t = 1)]
    pub w: u32,
    #[arg(long, default_value_t = 1 << 22)]
    pub budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitArgs {
    #[arg(long, default_value = "Q")]
    pub algebra: String,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Points of X inside the window.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub x: String,
    /// Window points.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    pub bound: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// log 2 · ∏ (1 − meas R_𝔭).
    Product(ProductArgs),
    /// log(#admissible subsets of [0,N)^n) / N^n.
    Empirical(EmpiricalArgs),
    /// Enclosure of ζ_K(s).
    Zeta(ZetaArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ProductArgs {
    #[arg(long, default_value_t = 10_000)]
    pub cutoff: u64,
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct EmpiricalArgs {
    #[arg(long = "N", default_value_t = 8)]
    pub n: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ZetaArgs {
    #[arg(long, default_value = "Q")]
    pub algebra: String,
    #[arg(long, default_value_t = 2)]
    pub s: u32,
    #[arg(long, default_value_t = 10_000)]
    pub cutoff: u64,
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
    #[command(flatten)]
    pub common: Common,
}

/// Global flags handed to every command.
pub struct Ctx {
    pub spec: Option<String>,
}

impl Ctx {
    pub fn spec(&self) -> Result<&str, CliError> {
        self.spec
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command needs --spec".into()))
    }
}

pub fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

pub fn config_of<A: Serialize>(args: &A) -> serde_json::Map<String, Value> {
    match serde_json::to_value(args).expect("serializable args") {
        Value::Object(m) => m,
        _ => serde_json::Map::new(),
    }
}

/// Flattens nested flag groups into one level.
fn flat_config(m: serde_json::Map<String, Value>) -> serde_json::Map<String, Value> {
    let mut out = serde_json::Map::new();
    for (k, v) in m {
        match v {
            Value::Object(inner) => out.extend(flat_config(inner)),
            other => {
                out.insert(k, other);
            }
        }
    }
    out
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("usage: --threads must be positive");
            std::process::exit(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool");
    }
    let ctx = Ctx {
        spec: cli.spec.clone(),
    };
    let (name, args, selftest_group, outcome) = commands::dispatch(&cli.group, &ctx);
    let mut config = flat_config(args);
    config.insert("spec".into(), json!(cli.spec));
    config.insert("threads".into(), json!(rayon::current_num_threads()));
    config.insert("json".into(), json!(cli.json));
    let outcome = match selftest_group {
        Some(g) => Ok(selftest::run(g)),
        None => outcome,
    };
    let (body, status, code) = match outcome {
        Ok(r) => {
            let code = r.exit_code();
            let status = match &r.status {
                report::Status::Ok => "ok".to_string(),
                report::Status::Negative(why) => format!("negative: {why}"),
            };
            (r.result, status, code)
        }
        Err(e) => {
            let code = e.exit_code();
            if !cli.json {
                eprintln!("error: {e}");
            }
            (
                json!({ "error": e.to_string() }),
                format!("error: {e}"),
                code,
            )
        }
    };
    let env = report::envelope(&name, &config, body, &status, code);
    print!("{}", report::render(&env, cli.json));
    std::process::exit(code);
}
