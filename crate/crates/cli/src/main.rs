use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jetcalc_core::covariant::{formal_curvature_map_classical, formal_curvature_map_linear, iterated_covariant_differential};
use jetcalc_core::io::{decode, encode, Document};
use jetcalc_core::operators::{factorization_check, operator, seeded_jets, JetSet};
use jetcalc_core::reduction::{orbit_solve, reconstruct_first, reconstruct_second, reduce_first, reduce_second};
use jetcalc_core::suites::{run_suite, SuiteConfig, SUITES};
use jetcalc_core::{JetError, Valence, WGroupElement};

/// Exact jet calculus of linear and classical connections.
#[derive(Parser)]
#[command(name = "jetcalc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Dims {
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
}

#[derive(Args, Clone)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Classical,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded random jets, or a group element with --group.
    Gen {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 3)]
        order_classical: usize,
        #[arg(long, default_value_t = 3)]
        order_linear: usize,
        /// Also generate a tensor field of this order.
        #[arg(long)]
        order_field: Option<usize>,
        /// Field valence as p1,q1,p2,q2 (fiber up, fiber down, base up, base down).
        #[arg(long, default_value = "1,0,0,0")]
        valence: String,
        /// Emit a group element of orders (order-classical, order-linear) instead.
        #[arg(long)]
        group: bool,
        /// With --group: emit a kernel element that is the identity through this order.
        #[arg(long)]
        kernel: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        bound: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Act with a group element on jets.
    Act {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        group: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Formal curvature map of the given order.
    Curvature {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Iterated covariant differential of the field in a jets file.
    Covdiff {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[command(flatten)]
        out: Output,
    },
    /// First reduction, or the second one when the jets carry a field.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Canonical jets from reduced data.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Find h in the kernel at level k with h . in2 = in.
    Orbit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        in2: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check that an operator factors through the reduced data at level k.
    Factorize {
        #[arg(long)]
        op: String,
        #[arg(long)]
        k: usize,
        /// Jets file; seeded random jets are used when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 3)]
        order_classical: usize,
        #[arg(long, default_value_t = 3)]
        order_linear: usize,
        #[arg(long)]
        order_field: Option<usize>,
        #[arg(long, default_value = "1,0,0,0")]
        valence: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        bound: u64,
    },
    /// Run a named check suite.
    Check {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        samples: usize,
    },
    /// Run every suite with a small configuration.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &PathBuf) -> Result<Document, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    decode(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_jets(path: &PathBuf) -> Result<JetSet, String> {
    match read(path)? {
        Document::Jets(j) => Ok(j),
        other => Err(format!("{}: expected jets, found {}", path.display(), other.kind())),
    }
}

fn write(out: &Output, doc: &Document) -> Result<(), String> {
    let text = encode(doc);
    match &out.out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_valence(text: &str) -> Result<Valence, String> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("bad valence {text:?}, expected p1,q1,p2,q2"))?;
    match parts[..] {
        [a, b, c, d] => Ok(Valence::standard(a, b, c, d)),
        _ => Err(format!("bad valence {text:?}, expected p1,q1,p2,q2")),
    }
}

enum Outcome {
    Ok,
    /// Exact check came out nonzero, or the data is not in the image.
    Nonzero,
}

fn err(e: JetError) -> String {
    e.to_string()
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.command {
        Command::Gen {
            dims,
            order_classical,
            order_linear,
            order_field,
            valence,
            group,
            kernel,
            seed,
            bound,
            out,
        } => {
            let doc = if group {
                let g = match kernel {
                    Some(k) => WGroupElement::random_kernel(dims.m, dims.n, order_classical, order_linear, k, seed, bound)
                        .map_err(err)?,
                    None => WGroupElement::random(dims.m, dims.n, order_classical, order_linear, seed, bound),
                };
                Document::Group(g)
            } else {
                let field = match order_field {
                    Some(o) => Some((parse_valence(&valence)?, o)),
                    None => None,
                };
                Document::Jets(seeded_jets(dims.m, dims.n, order_classical, order_linear, field, seed, bound))
            };
            write(&out, &doc)?;
        }
        Command::Act { input, group, out } => {
            let jets = read_jets(&input)?;
            let g = match read(&group)? {
                Document::Group(g) => g,
                other => return Err(format!("{}: expected group, found {}", group.display(), other.kind())),
            };
            write(&out, &Document::Jets(jets.act(&g).map_err(err)?))?;
        }
        Command::Curvature { input, kind, order, out } => {
            let jets = read_jets(&input)?;
            let data = match kind {
                Kind::Classical => formal_curvature_map_classical(&jets.lambda, order),
                Kind::Linear => formal_curvature_map_linear(Some(&jets.lambda), &jets.k, order),
            }
            .map_err(err)?;
            write(&out, &Document::Curvature(data))?;
        }
        Command::Covdiff { input, order, out } => {
            let jets = read_jets(&input)?;
            let phi = jets.phi.as_ref().ok_or("jets file carries no field")?;
            let d = iterated_covariant_differential(phi, Some(&jets.k), Some(&jets.lambda), order).map_err(err)?;
            write(&out, &Document::Tensor(d))?;
        }
        Command::Reduce { input, k, out } => {
            let jets = read_jets(&input)?;
            let doc = match &jets.phi {
                None => Document::ReducedFirst(reduce_first(&jets.lambda, &jets.k, k).map_err(err)?),
                Some(p) => Document::ReducedSecond(reduce_second(&jets.lambda, &jets.k, p, k).map_err(err)?),
            };
            write(&out, &doc)?;
        }
        Command::Reconstruct { input, out } => {
            let rebuilt = match read(&input)? {
                Document::ReducedFirst(d) => reconstruct_first(&d).map(|(l, k)| (l, k, None)),
                Document::ReducedSecond(d) => reconstruct_second(&d).map(|(l, k, p)| (l, k, Some(p))),
                other => return Err(format!("{}: expected reduced data, found {}", input.display(), other.kind())),
            };
            match rebuilt {
                Ok((l, k, p)) => write(&out, &Document::Jets(JetSet::new(l, k, p).map_err(err)?))?,
                Err(e @ JetError::NotMember { .. }) => {
                    eprintln!("{e}");
                    return Ok(Outcome::Nonzero);
                }
                Err(e) => return Err(err(e)),
            }
        }
        Command::Orbit { input, in2, k, out } => {
            let a = read_jets(&input)?;
            let b = read_jets(&in2)?;
            match orbit_solve((&a.lambda, &a.k), (&b.lambda, &b.k), k).map_err(err)? {
                Some(h) => write(&out, &Document::Group(h))?,
                None => {
                    eprintln!("not in the same orbit at level {k}");
                    return Ok(Outcome::Nonzero);
                }
            }
        }
        Command::Factorize {
            op,
            k,
            input,
            dims,
            order_classical,
            order_linear,
            order_field,
            valence,
            seed,
            bound,
        } => {
            let op = operator(&op).map_err(err)?;
            let jets = match input {
                Some(p) => read_jets(&p)?,
                None => {
                    let field = match (order_field, op.uses_field()) {
                        (Some(o), _) => Some((parse_valence(&valence)?, o)),
                        (None, true) => Some((parse_valence(&valence)?, 3)),
                        (None, false) => None,
                    };
                    seeded_jets(dims.m, dims.n, order_classical, order_linear, field, seed, bound)
                }
            };
            let report = factorization_check(&op, &jets, k).map_err(err)?;
            println!("{report}");
            if !report.equal() {
                return Ok(Outcome::Nonzero);
            }
        }
        Command::Check {
            suite,
            dims,
            order,
            seed,
            samples,
        } => {
            let cfg = SuiteConfig::new(dims.m, dims.n, order, seed, samples);
            return Ok(report_suite(&suite, &cfg)?);
        }
        Command::Selftest { seed } => {
            let mut outcome = Outcome::Ok;
            for (m, n) in [(2, 1), (2, 2)] {
                let cfg = SuiteConfig::new(m, n, 3, seed, 3);
                for suite in SUITES.iter().filter(|s| **s != "identities") {
                    if let Outcome::Nonzero = report_suite(suite, &cfg)? {
                        outcome = Outcome::Nonzero;
                    }
                }
            }
            return Ok(outcome);
        }
    }
    Ok(Outcome::Ok)
}

fn report_suite(suite: &str, cfg: &SuiteConfig) -> Result<Outcome, String> {
    let report = run_suite(suite, cfg).map_err(err)?;
    let verdict = if report.passed() { "ok" } else { "FAILED" };
    println!(
        "{suite} m={} n={}: {verdict} ({} checks, {} failures)",
        cfg.m,
        cfg.n,
        report.checks,
        report.failures.len()
    );
    for f in &report.failures {
        println!("  {f}");
    }
    Ok(if report.passed() { Outcome::Ok } else { Outcome::Nonzero })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Nonzero) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
