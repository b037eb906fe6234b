use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use stonework::boolring::{BoolRing, RingEndo};
use stonework::duality::{h_embed, phi, phi_inverse};
use stonework::examples::{build_contrast, obstruction_witness, rna_certificate};
use stonework::finmon::{FiniteMonoid, MonoidAction, SelfMap};
use stonework::navector::{FreeVector, NaSpace};
use stonework::suite::{
    replay_witness, run_duality_suite, run_suite, SuiteConfig, VerificationReport,
};
use stonework::ultra::{
    check_nonexpansive, d_from_chain, enumerate_theta, MonotoneChain, Side, UltraPseudometric,
};
use stonework::unif::{cover_order, cover_star, cover_wedge, saturate, Cover, PartitionFamily};
use stonework::{Error, Limits};

#[derive(Parser)]
#[command(
    name = "stonework",
    version,
    about = "Finite non-archimedean monoids and their dualities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a self-map (JSON array) and emit its ring endomorphism and dual group endomorphism.
    Dualize {
        /// Input file; stdin when omitted.
        input: Option<PathBuf>,
        /// Read a ring endomorphism instead and emit the self-map it comes from.
        #[arg(long)]
        inverse: bool,
    },
    /// Build the ultra-pseudometric of a monotone chain of partitions.
    Metrize {
        #[arg(long)]
        chain: PathBuf,
    },
    /// Enumerate the 1-Lipschitz self-maps of a metric.
    Theta {
        /// A metric file, or `discrete:N`.
        #[arg(long)]
        metric: String,
        /// Keep only the injective maps.
        #[arg(long)]
        injective: bool,
    },
    /// Check that a metric is nonexpansive for one side of a monoid.
    Check {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, value_name = "left|right")]
        nonexpansive: Side,
    },
    /// Saturate a family of partitions under a monoid action.
    Saturate {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
    /// Combinators on covers.
    CoverOps {
        #[arg(long, value_enum)]
        op: CoverOp,
        #[arg(long)]
        p: PathBuf,
        /// Second cover, for `wedge`.
        #[arg(long)]
        q: Option<PathBuf>,
    },
    /// Kantorovich norm of a vector of the free space over a metric.
    Kantorovich {
        #[arg(long)]
        metric: PathBuf,
        /// Comma-separated points.
        #[arg(long)]
        vector: String,
    },
    /// Built-in example monoids.
    Example {
        #[command(subcommand)]
        which: ExampleCommand,
    },
    /// Run the verification suite.
    Verify {
        /// Run every check (the only mode).
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 3)]
        bound_points: usize,
        #[arg(long, default_value_t = 3)]
        bound_atoms: usize,
        #[arg(long, default_value_t = 4)]
        bound_k: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        out: Format,
        /// Append a corrupted monoid table that must be reported as a failure.
        #[arg(long)]
        self_test: bool,
    },
    /// Run the duality checks up to `|Y| = points`.
    VerifyDuality {
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        out: Format,
    },
    /// Re-run a failure witness taken from a report.
    Replay { witness: PathBuf },
}

#[derive(Subcommand)]
enum ExampleCommand {
    /// The truncated Cantor-cube monoid.
    Contrast {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        report: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoverOp {
    Wedge,
    Star,
    Ord,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

/// Why a command did not succeed; maps onto the exit code.
enum Failure {
    /// The input was fine and a check came out false.
    Verification,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_source(path: Option<&Path>) -> Result<(String, String), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            let text = fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Ok((text, p.display().to_string()))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok((text, "<stdin>".to_string()))
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| {
        // serde_json's message already ends with "at line L column C"
        Failure::Usage(Error::Parse(format!("{origin}: {e}")).to_string())
    })
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let (text, origin) = read_source(Some(path))?;
    parse(&text, &origin)
}

fn emit(value: &impl Serialize) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    let written = serde_json::to_writer_pretty(&mut out, value)
        .map_err(io::Error::from)
        .and_then(|()| writeln!(out));
    ignore_closed_pipe(written)
}

fn emit_lines(lines: &[String]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    ignore_closed_pipe(lines.iter().try_for_each(|l| writeln!(out, "{l}")))
}

/// A closed pipe (`| head`) is the reader's choice, not an error.
fn ignore_closed_pipe(written: io::Result<()>) -> Result<(), Failure> {
    match written {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn load_metric(arg: &str) -> Result<UltraPseudometric, Failure> {
    match arg.strip_prefix("discrete:") {
        Some(n) => {
            let n: usize = n
                .parse()
                .map_err(|_| Failure::Usage(format!("bad point count in {arg:?}")))?;
            Ok(UltraPseudometric::discrete(n))
        }
        None => load(Path::new(arg)),
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let limits = Limits::from_env()?;
    match command {
        Command::Dualize { input, inverse } => {
            let (text, origin) = read_source(input.as_deref())?;
            if inverse {
                let endo: RingEndo = parse(&text, &origin)?;
                emit(&phi_inverse(&endo))
            } else {
                let s: SelfMap = parse(&text, &origin)?;
                let ring = BoolRing::new(s.carrier_size())?;
                emit(&json!({
                    "self_map": s,
                    "ring_endo": phi(&s, &ring)?,
                    "dual_endo": h_embed(&s, &ring)?,
                }))
            }
        }
        Command::Metrize { chain } => {
            let chain: MonotoneChain = load(&chain)?;
            emit(&d_from_chain(&chain))
        }
        Command::Theta { metric, injective } => {
            let d = load_metric(&metric)?;
            let theta = enumerate_theta(&d, &limits)?;
            let maps: Vec<&SelfMap> = theta
                .elements()
                .iter()
                .filter(|f| !injective || f.is_injective())
                .collect();
            emit(&json!({ "count": maps.len(), "maps": maps }))
        }
        Command::Check {
            monoid,
            metric,
            nonexpansive,
        } => {
            let m: FiniteMonoid = load(&monoid)?;
            let d: UltraPseudometric = load(&metric)?;
            let witness = check_nonexpansive(&m, &d, nonexpansive)?;
            emit(&json!({
                "side": nonexpansive,
                "nonexpansive": witness.is_none(),
                "witness": witness,
            }))?;
            match witness {
                None => Ok(()),
                Some(_) => Err(Failure::Verification),
            }
        }
        Command::Saturate { action, family } => {
            let action: MonoidAction = load(&action)?;
            let family: PartitionFamily = load(&family)?;
            emit(&saturate(&action, &family)?)
        }
        Command::CoverOps { op, p, q } => {
            let p: Cover = load(&p)?;
            match op {
                CoverOp::Wedge => {
                    let q = q.ok_or_else(|| Failure::Usage("wedge needs --q".into()))?;
                    let q: Cover = load(&q)?;
                    emit(&cover_wedge(&p, &q)?)
                }
                CoverOp::Star => emit(&cover_star(&p)),
                CoverOp::Ord => emit(&json!({ "order": cover_order(&p) })),
            }
        }
        Command::Kantorovich { metric, vector } => {
            let d: UltraPseudometric = load(&metric)?;
            let points = vector
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Failure::Usage(format!("bad point {s:?} in --vector")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(&x) = points.iter().find(|&&x| x >= d.carrier_size()) {
                return Err(Error::OutOfRange {
                    index: x,
                    size: d.carrier_size(),
                }
                .into());
            }
            let space = NaSpace::new(d)?;
            emit(&space.kantorovich_norm(&FreeVector::from_points(&points), &limits)?)
        }
        Command::Example {
            which: ExampleCommand::Contrast { k, report },
        } => {
            let c = build_contrast(k)?;
            let certificate = rna_certificate(&c)?;
            let witnesses: Vec<Value> = (0..k)
                .map(|j| match obstruction_witness(&c, j) {
                    Ok(w) => json!(w),
                    Err(e) => json!({ "j": j, "error": e.to_string() }),
                })
                .collect();
            let ok = certificate.left_nonexpansive
                && certificate.translation_embedding
                && certificate.identity_balls_submonoids
                && witnesses
                    .iter()
                    .take(k.saturating_sub(1))
                    .all(|w| w.get("error").is_none());
            match report {
                Format::Json => emit(&json!({
                    "k": k,
                    "carrier_size": c.carrier_size(),
                    "table_sha256": c.table_digest(),
                    "certificate": certificate,
                    "obstruction_witnesses": witnesses,
                }))?,
                Format::Tsv => {
                    let mut lines = vec![
                        "field\tvalue".to_string(),
                        format!("k\t{k}"),
                        format!("carrier_size\t{}", c.carrier_size()),
                        format!("table_sha256\t{}", c.table_digest()),
                        format!("left_nonexpansive\t{}", certificate.left_nonexpansive),
                        format!(
                            "translation_embedding\t{}",
                            certificate.translation_embedding
                        ),
                        format!(
                            "identity_balls_submonoids\t{}",
                            certificate.identity_balls_submonoids
                        ),
                        format!("right_nonexpansive\t{}", certificate.right_nonexpansive),
                        format!("right_witness\t{}", json!(certificate.right_witness)),
                    ];
                    lines.extend(witnesses.iter().map(|w| format!("obstruction\t{w}")));
                    emit_lines(&lines)?;
                }
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Verify {
            all: _,
            bound_points,
            bound_atoms,
            bound_k,
            seed,
            out,
            self_test,
        } => {
            let cfg = SuiteConfig {
                bound_points,
                bound_atoms,
                bound_k,
                seed,
                self_test,
                limits,
            };
            report(&run_suite(&cfg)?, out)
        }
        Command::VerifyDuality { points, out } => report(&run_duality_suite(points, &limits)?, out),
        Command::Replay { witness } => {
            let value: Value = load(&witness)?;
            // a whole report is accepted as well; every failing line is replayed
            let witnesses: Vec<Value> = match value.as_array() {
                Some(lines) => lines
                    .iter()
                    .filter_map(|r| r.get("outcome")?.get("witness").cloned())
                    .collect(),
                None => vec![value.get("witness").cloned().unwrap_or(value)],
            };
            if witnesses.is_empty() {
                return Err(Failure::Usage("no witness to replay".into()));
            }
            let mut reproduced = false;
            let mut lines = Vec::new();
            for w in &witnesses {
                match replay_witness(w)? {
                    Some(e) => {
                        lines.push(format!("reproduced: {e}"));
                        reproduced = true;
                    }
                    None => lines.push("not reproduced: operation succeeds".to_string()),
                }
            }
            emit_lines(&lines)?;
            if reproduced {
                Err(Failure::Verification)
            } else {
                Ok(())
            }
        }
    }
}

fn report(reports: &[VerificationReport], out: Format) -> Result<(), Failure> {
    match out {
        Format::Json => emit(&reports)?,
        Format::Tsv => {
            let mut lines = vec![VerificationReport::tsv_header().to_string()];
            lines.extend(reports.iter().map(VerificationReport::to_tsv));
            emit_lines(&lines)?;
        }
    }
    if reports.iter().all(|r| r.outcome.passed()) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
