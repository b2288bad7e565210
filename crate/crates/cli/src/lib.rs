//! The `maltsev` command-line tool.
//!
//! Exit codes: 0 positive verdict or success, 1 negative verdict, 2 usage or
//! input error, 3 "maybe" (csp only), 4 internal invariant failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use maltsev_core::census::{count_maltsev_sharded, to_csv, EnumerationMode};
use maltsev_core::csp::solve_csp_with_majority;
use maltsev_core::oracle::{find_homomorphism_bruteforce, find_polymorphism_bruteforce};
use maltsev_core::synth::synthesize;
use maltsev_core::{
    decide_maltsev, factor, random_instance, rectangularity_violation,
    solve_csp_consistency, verify_identities, verify_polymorphism, CspInstance, CspVerdict,
    Digraph, Error, OpKind, Side, TernaryOp,
};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MAYBE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "maltsev",
    version,
    about = "Maltsev and majority polymorphisms of finite digraphs"
)]
struct Cli {
    /// Emit JSON for every subcommand.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Majority,
    Maltsev,
}

impl From<KindArg> for OpKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Majority => OpKind::Majority,
            KindArg::Maltsev => OpKind::Maltsev,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Labeled,
    #[value(name = "up_to_iso", alias = "iso")]
    UpToIso,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test rectangularity.
    Rect { graph: PathBuf },
    /// Print the factor digraph G⁺ or G⁻ with its class map.
    Factor {
        graph: PathBuf,
        #[arg(long, value_enum, default_value = "plus")]
        side: SideArg,
    },
    /// Decide the Maltsev property and print the certificate.
    Decide { graph: PathBuf },
    /// Build a majority or Maltsev polymorphism table.
    Synth {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Check an operation table (read from --table or stdin) against a graph.
    Verify {
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Brute-force search for a polymorphism table, or for a homomorphism
    /// when --instance is given.
    Oracle {
        graph: PathBuf,
        #[arg(long, value_enum, required_unless_present = "instance")]
        kind: Option<KindArg>,
        #[arg(long, conflicts_with = "kind")]
        instance: Option<PathBuf>,
    },
    /// Count rectangular, Maltsev and majority-admitting digraphs.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "labeled")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Decide a pinned homomorphism instance by path consistency.
    Csp {
        #[arg(long)]
        graph: PathBuf,
        /// Instance JSON; without it a random instance is drawn from --seed.
        #[arg(long, required_unless_present = "seed")]
        instance: Option<PathBuf>,
        /// Cross-check the verdict with the brute-force search.
        #[arg(long)]
        oracle: bool,
        /// Majority table for the target, used instead of deciding Maltsev.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, conflicts_with = "instance")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 6)]
        vars: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 2)]
        pins: usize,
    },
}

/// Output sinks for one invocation.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::EmptyCandidates { .. } | Error::Invariant(_) => Failure::Internal(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() {
                &mut *io.stderr
            } else {
                &mut *io.stdout
            };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(&cli, io) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(io.stderr, "internal invariant failure: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Digraph, Failure> {
    read_text(path)?
        .parse()
        .map_err(|e: Error| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_op(text: &str) -> Result<TernaryOp, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("operation table: {e}")))
}

fn print_json(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialise"))
}

fn dispatch(cli: &Cli, io: &mut Io<'_>) -> Outcome {
    let json = cli.json;
    let out = &mut *io.stdout;
    match &cli.command {
        Command::Rect { graph } => {
            let g = read_graph(graph)?;
            let witness = rectangularity_violation(&g);
            if json {
                print_json(
                    out,
                    &json!({
                        "rectangular": witness.is_none(),
                        "witness": witness.map(|w| w.to_array()),
                    }),
                )?;
            } else {
                match witness {
                    None => writeln!(out, "rectangular")?,
                    Some(w) => writeln!(out, "non-rectangular: {w}")?,
                }
            }
            Ok(if witness.is_none() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Factor { graph, side } => {
            let g = read_graph(graph)?;
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            match factor(&g, side) {
                Ok(f) => {
                    if json {
                        print_json(
                            out,
                            &json!({
                                "side": side.name(),
                                "quotient": f.quotient,
                                "classes": f.partition.blocks,
                            }),
                        )?;
                    } else {
                        write!(out, "{}", f.to_text())?;
                    }
                    Ok(EXIT_OK)
                }
                Err(Error::NotRectangular(w)) => {
                    if json {
                        print_json(out, &json!({"rectangular": false, "witness": w.to_array()}))?;
                    } else {
                        writeln!(out, "non-rectangular: {w}")?;
                    }
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Decide { graph } => {
            let g = read_graph(graph)?;
            let cert = decide_maltsev(&g);
            print_json(out, &cert.to_json())?;
            Ok(if cert.is_maltsev() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Synth { graph, kind } => {
            let g = read_graph(graph)?;
            match synthesize(&g, (*kind).into()) {
                Ok(op) => {
                    print_json(out, &op.to_json())?;
                    Ok(EXIT_OK)
                }
                Err(Error::NotMaltsev { level, witness }) => {
                    if json {
                        print_json(
                            out,
                            &json!({"verdict": false, "level": level, "witness": witness.to_array()}),
                        )?;
                    } else {
                        writeln!(out, "not maltsev: level {level} non-rectangular: {witness}")?;
                    }
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Verify { graph, kind, table } => {
            let g = read_graph(graph)?;
            let text = match table {
                Some(p) => read_text(p)?,
                None => {
                    let mut s = String::new();
                    io.stdin.read_to_string(&mut s)?;
                    s
                }
            };
            let op = read_op(&text)?;
            let kind = OpKind::from(*kind);
            let identities = verify_identities(&op, kind);
            let edges = verify_polymorphism(&g, &op)?;
            let ok = identities.is_none() && edges.is_none();
            if json {
                print_json(
                    out,
                    &json!({
                        "ok": ok,
                        "identity_violation": identities.map(|(x, y)| [x, y]),
                        "edge_violation": edges.map(|t| t.map(|(u, v)| [u, v])),
                    }),
                )?;
            } else if let Some((x, y)) = identities {
                writeln!(out, "violation: {kind} identities fail at x={x} y={y}")?;
            } else if let Some(t) = edges {
                let [a, b, c] = t;
                writeln!(
                    out,
                    "violation: edges ({} {}) ({} {}) ({} {}) map to a non-edge",
                    a.0, a.1, b.0, b.1, c.0, c.1
                )?;
            } else {
                writeln!(out, "ok")?;
            }
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Oracle {
            graph,
            kind,
            instance,
        } => {
            let g = read_graph(graph)?;
            if let Some(path) = instance {
                let inst = CspInstance::from_json(&read_text(path)?)?;
                inst.validate(&g)?;
                return match find_homomorphism_bruteforce(&inst.h, &g, &inst.pins)? {
                    Some(map) => {
                        let obj: BTreeMap<String, usize> = map
                            .iter()
                            .enumerate()
                            .map(|(v, &t)| (v.to_string(), t))
                            .collect();
                        print_json(out, &json!(obj))?;
                        Ok(EXIT_OK)
                    }
                    None => {
                        if json {
                            print_json(out, &Value::Null)?;
                        } else {
                            writeln!(out, "none")?;
                        }
                        Ok(EXIT_NEGATIVE)
                    }
                };
            }
            let kind = OpKind::from(kind.expect("clap requires --kind without --instance"));
            match find_polymorphism_bruteforce(&g, kind)? {
                Some(op) => {
                    print_json(out, &op.to_json())?;
                    Ok(EXIT_OK)
                }
                None => {
                    if json {
                        print_json(out, &Value::Null)?;
                    } else {
                        writeln!(out, "none")?;
                    }
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Census { n, mode, workers } => {
            let mode = match mode {
                ModeArg::Labeled => EnumerationMode::Labeled,
                ModeArg::UpToIso => EnumerationMode::UpToIso,
            };
            let row = count_maltsev_sharded(*n, mode, *workers)?;
            if json {
                print_json(out, &serde_json::to_value(row).expect("rows serialise"))?;
            } else {
                write!(out, "{}", to_csv(&[row]))?;
            }
            Ok(EXIT_OK)
        }
        Command::Csp {
            graph,
            instance,
            oracle,
            table,
            seed,
            vars,
            edge_prob,
            pins,
        } => {
            let g = read_graph(graph)?;
            let inst = match (instance, seed) {
                (Some(path), _) => CspInstance::from_json(&read_text(path)?)?,
                (None, Some(seed)) => random_instance(&g, *vars, *edge_prob, *pins, *seed)?,
                (None, None) => unreachable!("clap requires --instance or --seed"),
            };
            let verdict = match table {
                Some(p) => solve_csp_with_majority(&inst, &g, &read_op(&read_text(p)?)?)?,
                None => solve_csp_consistency(&inst, &g)?,
            };
            if verdict == CspVerdict::Maybe {
                writeln!(
                    io.stderr,
                    "warning: target is not known to have a majority polymorphism; \
                     a consistent instance may still be unsatisfiable"
                )?;
            }
            let truth = if *oracle {
                Some(find_homomorphism_bruteforce(&inst.h, &g, &inst.pins)?.is_some())
            } else {
                None
            };
            let contradiction = matches!(
                (verdict, truth),
                (CspVerdict::Yes, Some(false)) | (CspVerdict::No, Some(true))
            );
            if json {
                let mut v = json!({"verdict": verdict});
                if seed.is_some() {
                    v["instance"] = inst.to_json();
                }
                if let Some(t) = truth {
                    v["oracle"] = json!(if t { "yes" } else { "no" });
                    v["agree"] = json!(!contradiction);
                }
                print_json(out, &v)?;
            } else {
                writeln!(out, "{verdict}")?;
                if let Some(t) = truth {
                    let agreement = if contradiction { "disagree" } else { "agree" };
                    writeln!(out, "oracle: {} ({agreement})", if t { "yes" } else { "no" })?;
                }
            }
            if contradiction {
                return Err(Failure::Internal(format!(
                    "consistency verdict {verdict} contradicts the brute-force search"
                )));
            }
            Ok(verdict.exit_code())
        }
    }
}
