//! `fanobott`: validate, enumerate and classify Fano Bott matrices from the
//! command line.
//!
//! Exit status is 0 on success or a positive answer, 1 on a negative answer
//! (invalid matrix, not equivalent, failed certificate) and 2 on usage or
//! input errors.

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fanobott_core::ops::digest;
use fanobott_core::wire::{
    CertificateJson, ForestJson, MatrixJson, RejectionJson, SveJson, WireError, WitnessJson,
};
use fanobott_core::{
    bfs_closure_classes, certify_diffeo, enumerate, enumerate_sve, fb_count, find_witness_in,
    peel_signature, CodeMode, FanoBottMatrix, Partition, SignedRootedForest,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "fanobott", version, about = "Classify Fano Bott manifolds")]
struct Cli {
    /// Read matrix and forest arguments as JSON text instead of file paths.
    #[arg(long, global = true)]
    inline: bool,

    /// Worker threads for classify and oracle.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Variety,
    Diffeo,
    Rooted,
}

impl From<Mode> for CodeMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Variety => CodeMode::Variety,
            Mode::Diffeo => CodeMode::Diffeo,
            Mode::Rooted => CodeMode::RootedIso,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the row conditions; prints the first violation.
    Validate { input: String },
    /// Every matrix of FB(d), one JSON object per line.
    Enumerate {
        #[arg(short)]
        d: usize,
        #[arg(long)]
        count: bool,
    },
    /// Canonical classes of FB(d) with one representative each.
    Classify {
        #[arg(short)]
        d: usize,
        #[arg(long, value_enum, default_value = "diffeo")]
        mode: Mode,
    },
    /// Canonical code of a matrix or forest.
    Canon {
        input: String,
        #[arg(long, value_enum, default_value = "diffeo")]
        mode: Mode,
    },
    /// Are two matrices or forests equivalent.
    Equiv {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "diffeo")]
        mode: Mode,
    },
    /// Operation sequence taking A to B.
    Witness {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "diffeo")]
        mode: Mode,
    },
    /// Ray-matrix certificate for a witness W from A to B.
    Certify { a: String, b: String, w: String },
    /// Square-vanishing elements of degree two.
    Sve { input: String },
    /// Leaf counts while peeling the forest.
    Peel { input: String },
    /// Graphviz rendering of the forest.
    ForestDot { input: String },
    /// Compare BFS closure classes with diffeo codes on FB(d).
    Oracle {
        #[arg(short)]
        d: usize,
    },
}

enum Answer {
    Yes,
    No,
}

fn read_source(arg: &str, inline: bool) -> Result<String> {
    if inline {
        return Ok(arg.to_owned());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

enum Input {
    Matrix(MatrixJson),
    Forest(ForestJson),
}

fn parse_input(text: &str) -> Result<Input> {
    let value: serde_json::Value = serde_json::from_str(text).context("input is not JSON")?;
    if value.is_array() {
        let entries: Vec<Vec<i64>> =
            serde_json::from_value(value).context("expected an array of integer rows")?;
        return Ok(Input::Matrix(MatrixJson {
            dim: entries.len(),
            entries,
        }));
    }
    if value.get("entries").is_some() {
        return Ok(Input::Matrix(
            serde_json::from_value(value).context("malformed matrix JSON")?,
        ));
    }
    if value.get("parents").is_some() {
        return Ok(Input::Forest(
            serde_json::from_value(value).context("malformed forest JSON")?,
        ));
    }
    bail!("expected matrix JSON, forest JSON or an array of rows")
}

fn load_matrix(arg: &str, inline: bool) -> Result<FanoBottMatrix> {
    match parse_input(&read_source(arg, inline)?)? {
        Input::Matrix(m) => m.to_matrix().map_err(|e| anyhow!("{arg}: {e}")),
        Input::Forest(f) => f
            .to_forest()
            .map_err(anyhow::Error::from)
            .and_then(|t| t.to_matrix().map_err(anyhow::Error::from))
            .with_context(|| format!("{arg}: forest does not give a matrix")),
    }
}

fn load_forest(arg: &str, inline: bool) -> Result<SignedRootedForest> {
    match parse_input(&read_source(arg, inline)?)? {
        Input::Matrix(m) => m
            .to_matrix()
            .map(|a| SignedRootedForest::from_matrix(&a))
            .map_err(|e| anyhow!("{arg}: {e}")),
        Input::Forest(f) => f.to_forest().map_err(|e| anyhow!("{arg}: {e}")),
    }
}

fn print_json<T: Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct ClassSummary {
    code: String,
    members: usize,
    representative: MatrixJson,
}

#[derive(Serialize)]
struct Classification {
    dim: usize,
    mode: &'static str,
    matrices: usize,
    classes: usize,
    representatives: Vec<ClassSummary>,
}

fn classify(d: usize, mode: CodeMode) -> Classification {
    let p = Partition::by_key(enumerate(d).collect(), |a| {
        SignedRootedForest::from_matrix(a).canonical_code(mode)
    });
    let representatives = p
        .classes
        .iter()
        .map(|members| {
            let a = &p.matrices[members[0]];
            ClassSummary {
                code: SignedRootedForest::from_matrix(a).canonical_code(mode).to_string(),
                members: members.len(),
                representative: MatrixJson::from(a),
            }
        })
        .collect();
    Classification {
        dim: d,
        mode: mode.name(),
        matrices: p.matrices.len(),
        classes: p.len(),
        representatives,
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<Answer> {
    let inline = cli.inline;
    match cli.command {
        Command::Validate { input } => {
            let m = match parse_input(&read_source(&input, inline)?)? {
                Input::Matrix(m) => m,
                Input::Forest(_) => bail!("validate expects a matrix"),
            };
            let rejection = match m.to_matrix() {
                Ok(_) => None,
                Err(WireError::Matrix(e)) => Some(RejectionJson::from(&e)),
                Err(e) => Some(RejectionJson {
                    row: None,
                    violation: e.to_string(),
                }),
            };
            match rejection {
                None => {
                    writeln!(out, "{{\"valid\":true}}")?;
                    Ok(Answer::Yes)
                }
                Some(r) => {
                    writeln!(out, "{}", serde_json::to_string(&r)?)?;
                    Ok(Answer::No)
                }
            }
        }
        Command::Enumerate { d, count } => {
            if count {
                writeln!(out, "{}", fb_count(d))?;
            } else {
                for a in enumerate(d) {
                    writeln!(out, "{}", serde_json::to_string(&MatrixJson::from(&a))?)?;
                }
            }
            Ok(Answer::Yes)
        }
        Command::Classify { d, mode } => {
            print_json(out, &classify(d, mode.into()))?;
            Ok(Answer::Yes)
        }
        Command::Canon { input, mode } => {
            let t = load_forest(&input, inline)?;
            writeln!(out, "{}", t.canonical_code(mode.into()))?;
            Ok(Answer::Yes)
        }
        Command::Equiv { a, b, mode } => {
            let (s, t) = (load_forest(&a, inline)?, load_forest(&b, inline)?);
            let same = s.size() == t.size() && s.equivalent(&t, mode.into());
            writeln!(out, "{same}")?;
            Ok(if same { Answer::Yes } else { Answer::No })
        }
        Command::Witness { a, b, mode } => {
            let (x, y) = (load_matrix(&a, inline)?, load_matrix(&b, inline)?);
            match find_witness_in(&x, &y, mode.into())? {
                Some(w) => {
                    print_json(out, &WitnessJson::from(&w))?;
                    Ok(Answer::Yes)
                }
                None => {
                    writeln!(out, "null")?;
                    Ok(Answer::No)
                }
            }
        }
        Command::Certify { a, b, w } => {
            let (x, y) = (load_matrix(&a, inline)?, load_matrix(&b, inline)?);
            let text = read_source(&w, inline)?;
            let wj: WitnessJson = serde_json::from_str(&text).context("malformed witness JSON")?;
            let seq = wj.to_sequence()?;
            if seq.source_sha != digest(&x) || seq.target_sha != digest(&y) {
                writeln!(out, "witness digests do not match A and B")?;
                return Ok(Answer::No);
            }
            match certify_diffeo(&x, &y, &seq) {
                Ok(cert) => {
                    print_json(out, &CertificateJson::from(&cert))?;
                    Ok(Answer::Yes)
                }
                Err(e) => {
                    writeln!(out, "certificate failed: {e}")?;
                    Ok(Answer::No)
                }
            }
        }
        Command::Sve { input } => {
            let a = load_matrix(&input, inline)?;
            print_json(out, &SveJson::from(&enumerate_sve(&a)))?;
            Ok(Answer::Yes)
        }
        Command::Peel { input } => {
            let a = load_matrix(&input, inline)?;
            writeln!(out, "{}", serde_json::to_string(&peel_signature(&a))?)?;
            Ok(Answer::Yes)
        }
        Command::ForestDot { input } => {
            write!(out, "{}", load_forest(&input, inline)?.to_dot())?;
            Ok(Answer::Yes)
        }
        Command::Oracle { d } => {
            let bfs = bfs_closure_classes(d);
            let codes = Partition::by_key(bfs.matrices.clone(), |a| {
                SignedRootedForest::from_matrix(a).canonical_code(CodeMode::Diffeo)
            });
            let n = bfs.matrices.len();
            let disagreements = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    (bfs.class_of[i] == bfs.class_of[j]) != (codes.class_of[i] == codes.class_of[j])
                })
                .count();
            writeln!(
                out,
                "d={d} matrices={n} bfs_classes={} code_classes={} disagreements={disagreements}",
                bfs.len(),
                codes.len()
            )?;
            Ok(if disagreements == 0 { Answer::Yes } else { Answer::No })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("fanobott: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(Answer::Yes), Ok(())) => ExitCode::SUCCESS,
        (Ok(Answer::No), Ok(())) => ExitCode::from(1),
        (Err(e), _) => {
            eprintln!("fanobott: {e:#}");
            ExitCode::from(2)
        }
        (_, Err(e)) => {
            eprintln!("fanobott: {e}");
            ExitCode::from(2)
        }
    }
}
