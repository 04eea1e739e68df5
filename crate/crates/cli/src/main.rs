use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jacpair::atlas::{census, check_absence, Verdict};
use jacpair::classify::classify;
use jacpair::divisor::{dhar_reduce, Divisor};
use jacpair::graph::{emit_graph, parse_graph, Multigraph};
use jacpair::jacobian::{jacobian_form, monodromy_pairing};
use jacpair::number_theory::{verify_q_range, ResidueFilter};
use jacpair::realize::{parse_spec, realize};

#[derive(Parser)]
#[command(name = "jacpair", version, about = "Jacobians of multigraphs and their monodromy pairing")]
struct Cli {
    /// Add human-readable decoration to the output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the invariant factors of Jac(G).
    Jacobian { graph: PathBuf },
    /// Print the monodromy pairing of two degree-0 divisors.
    Pairing {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        d1: String,
        #[arg(long, allow_hyphen_values = true)]
        d2: String,
    },
    /// Print the reduced divisor equivalent to a given one.
    Reduce {
        graph: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Print the normal form of Jac(G) as a group with pairing.
    Classify { graph: PathBuf },
    /// Build a graph whose Jacobian is the given group with pairing.
    Realize {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        q_bound_multiplier: u64,
    },
    /// Check the nonresidue prime bound for all primes up to BOUND.
    VerifyQ {
        bound: u64,
        #[arg(long, value_enum, default_value_t = Filter::All)]
        filter: Filter,
        /// Print one TSV row per prime before the summary.
        #[arg(long)]
        emit_certificates: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Tabulate all simple 2-edge-connected graphs with few spanning trees.
    Census {
        #[arg(long)]
        max_trees: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Decide whether some simple graph has the given Jacobian.
    CheckAbsence {
        /// Invariant factors, comma separated.
        factors: String,
        #[arg(long)]
        max_trees: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Filter {
    All,
    #[value(name = "1mod24")]
    OneMod24,
}

enum Failure {
    /// Bad input: exit 2.
    Usage(String),
    /// Valid input with a negative or impossible answer: exit 1.
    Domain(String),
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn domain(e: impl ToString) -> Failure {
    Failure::Domain(e.to_string())
}

fn read_graph(path: &Path) -> Result<Multigraph, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(usage)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?
    };
    parse_graph(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn connected(g: &Multigraph) -> Result<(), Failure> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(domain("graph is not connected"))
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let pretty = cli.pretty;
    let mut say = |s: String| writeln!(out, "{s}").map_err(usage);
    match cli.command {
        Command::Jacobian { graph } => {
            let g = read_graph(&graph)?;
            connected(&g)?;
            let factors = jacobian_form(&g).map_err(domain)?.invariant_factors();
            let text: Vec<String> = factors.iter().map(ToString::to_string).collect();
            let text = if text.is_empty() { "1".to_string() } else { text.join(",") };
            say(format!("factors: {text}"))?;
            if pretty {
                let order: num_bigint::BigInt = factors.iter().product();
                let group: Vec<String> = factors.iter().map(|d| format!("Z/{d}")).collect();
                let group = if group.is_empty() { "0".into() } else { group.join(" x ") };
                say(format!("group: {group}"))?;
                say(format!("order: {order}"))?;
            }
        }
        Command::Pairing { graph, d1, d2 } => {
            let g = read_graph(&graph)?;
            let n = g.vertex_count();
            let d1 = Divisor::parse(&d1, n).map_err(usage)?;
            let d2 = Divisor::parse(&d2, n).map_err(usage)?;
            connected(&g)?;
            let x = monodromy_pairing(&g, &d1, &d2).map_err(usage)?;
            if pretty {
                say(format!("<D1, D2> = {x} (mod 1)"))?;
            } else {
                say(x.to_string())?;
            }
        }
        Command::Reduce { graph, divisor, base } => {
            let g = read_graph(&graph)?;
            let d = Divisor::parse(&divisor, g.vertex_count()).map_err(usage)?;
            connected(&g)?;
            let r = dhar_reduce(&g, &d, base).map_err(usage)?;
            say(r.to_string())?;
        }
        Command::Classify { graph } => {
            let g = read_graph(&graph)?;
            connected(&g)?;
            let form = jacobian_form(&g).map_err(domain)?;
            let d = classify(&form).map_err(domain)?;
            say(d.to_string())?;
        }
        Command::Realize {
            spec,
            output,
            q_bound_multiplier,
        } => {
            let spec = parse_spec(&spec)
                .map_err(|e| usage(format!("spec: {e}")))?
                .with_q_bound_multiplier(q_bound_multiplier);
            let r = realize(&spec).map_err(domain)?;
            let text = format!("{}{}\n", emit_graph(&r.graph), r.comment());
            match output {
                Some(path) => fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
                None => write!(out, "{text}").map_err(usage)?,
            }
        }
        Command::VerifyQ {
            bound,
            filter,
            emit_certificates,
            jobs,
        } => {
            let filter = match filter {
                Filter::All => ResidueFilter::All,
                Filter::OneMod24 => ResidueFilter::OneMod24,
            };
            let report = verify_q_range(bound, filter, jobs, emit_certificates);
            if emit_certificates {
                write!(out, "{}", report.tsv()).map_err(usage)?;
            }
            writeln!(out, "{}", report.summary()).map_err(usage)?;
            if !report.failures.is_empty() {
                let list: Vec<String> = report.failures.iter().map(ToString::to_string).collect();
                return Err(domain(format!("no witness for p in {{{}}}", list.join(", "))));
            }
        }
        Command::Census {
            max_trees,
            output,
            jobs,
        } => {
            if max_trees < 3 {
                return Err(usage("--max-trees must be at least 3"));
            }
            let c = census(max_trees, jobs);
            match output {
                Some(path) => c.write_atomic(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
                None => write!(out, "{}", c.to_tsv()).map_err(usage)?,
            }
            if pretty {
                eprintln!("{} graphs with at most {max_trees} spanning trees", c.records.len());
            }
        }
        Command::CheckAbsence {
            factors,
            max_trees,
            jobs,
        } => {
            let factors: Vec<u64> = factors
                .split(',')
                .map(|t| t.trim().parse::<u64>().map_err(|_| usage(format!("bad factor {t:?}"))))
                .collect::<Result<_, _>>()?;
            let c = census(max_trees.max(3), jobs);
            let verdict = check_absence(&factors, max_trees, &c).map_err(usage)?;
            say(verdict.to_string())?;
            if let Verdict::Present { witness, parts } = verdict {
                if pretty {
                    let parts: Vec<String> = parts
                        .iter()
                        .map(|p| p.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x "))
                        .collect();
                    say(format!("# wedge of graphs with Jacobians {}", parts.join("; ")))?;
                }
                write!(out, "{}", emit_graph(&witness)).map_err(usage)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
