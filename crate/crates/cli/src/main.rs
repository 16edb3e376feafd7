use std::fmt::Display;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ordsep::cartesian::{abelianize, rs_rewrite};
use ordsep::oracle::min_separating_degree;
use ordsep::separator::{separate_orders, verify_certificate, Certificate, Outcome, Provenance, Refusal, SeparatorConfig};
use ordsep::tower::{Gamma0Outcome, Rival, StepOutcome, Tower, TowerError};
use ordsep::{make_group, ActionGraph, FiniteGroup, FreeProduct, Word, WordClass};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_CONJUGATE: u8 = 2;
const EXIT_FACTOR: u8 = 3;
const EXIT_BUDGET: u8 = 4;
const EXIT_PARSE: u8 = 64;
const EXIT_DOMAIN: u8 = 65;
const EXIT_IO: u8 = 66;
const EXIT_BREACH: u8 = 70;

#[derive(Parser)]
#[command(name = "ordsep", version, about = "Finite quotients of A*B that separate element orders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Groups {
    /// First factor: a spec such as C2, D8, S3, C2xC3, or a table file
    #[arg(long = "A")]
    a: String,
    /// Second factor
    #[arg(long = "B")]
    b: String,
}

#[derive(Args)]
struct Search {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Candidate-vertex units available to the search
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long = "max-degree", default_value_t = 96)]
    max_degree: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal form of a word
    Normalize {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        w: String,
    },
    /// Find c with c^-1 u c = v
    Conjugate {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Classify a word and extract the root of its cyclic reduction
    Root {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        w: String,
    },
    /// Rewrite a Cartesian subgroup element in the commutator basis
    Cartesian {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        w: String,
    },
    /// Search for a first tower graph
    Gamma0 {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: Option<String>,
        #[command(flatten)]
        search: Search,
        /// Write the graph (text format) here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "dot-dir")]
        dot_dir: Option<PathBuf>,
    },
    /// Run tower steps from a first graph
    Tower {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: Option<String>,
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        /// Write a separating certificate here, if one appears
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write one DOT file per stage here
        #[arg(long = "dot-dir")]
        dot_dir: Option<PathBuf>,
    },
    /// Produce a certificate separating the orders of u and v
    Separate {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a certificate (from a file, or stdin)
    Verify {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        cert: Option<PathBuf>,
    },
    /// Exhaustive search for the smallest separating degree
    Oracle {
        #[command(flatten)]
        groups: Groups,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        /// Largest degree to try (at most 8)
        #[arg(long = "oracle", default_value_t = 8)]
        dmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a graph or certificate file as DOT
    ExportDot {
        #[command(flatten)]
        groups: Groups,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Display) -> Self {
        Failure { code, message: message.to_string() }
    }
}

type CliResult = Result<u8, Failure>;

fn load_group(arg: &str) -> Result<FiniteGroup, Failure> {
    match make_group(arg) {
        Ok(g) => Ok(g),
        Err(spec_err) => {
            let path = Path::new(arg);
            if !path.exists() {
                return Err(Failure::new(EXIT_PARSE, format!("{arg}: {spec_err}")));
            }
            let text = fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{arg}: {e}")))?;
            FiniteGroup::from_text(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{arg}: {e}")))
        }
    }
}

fn free_product(groups: &Groups) -> Result<FreeProduct, Failure> {
    Ok(FreeProduct::new(load_group(&groups.a)?, load_group(&groups.b)?))
}

fn word(fp: &FreeProduct, text: &str) -> Result<Word, Failure> {
    fp.parse_word(text).map_err(|e| Failure::new(EXIT_PARSE, format!("{text:?}: {e}")))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_dot(dir: &Path, name: &str, dot: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", dir.display())))?;
    emit(Some(&dir.join(name)), dot)
}

/// Cyclically reduced u (must be hyperbolic) and the rival derived from v.
fn tower_words(fp: &FreeProduct, u: &str, v: Option<&str>) -> Result<(Word, Rival), Failure> {
    let (ur, _) = fp.cyclic_reduce(&word(fp, u)?);
    if ur.len() < 2 {
        return Err(Failure::new(EXIT_DOMAIN, "u must not be conjugate into a factor"));
    }
    let rival = match v {
        None => Rival::None,
        Some(v) => {
            let (vr, _) = fp.cyclic_reduce(&word(fp, v)?);
            match vr.len() {
                0 => return Err(Failure::new(EXIT_DOMAIN, "v must not be the identity")),
                1 => Rival::OrderOnly(vr),
                _ => Rival::Tracked(vr),
            }
        }
    };
    Ok((ur, rival))
}

fn tower_failure(e: TowerError) -> Failure {
    let code = match e {
        TowerError::BudgetExhausted { .. } | TowerError::TooLarge { .. } => EXIT_BUDGET,
        TowerError::Breach { .. } => EXIT_BREACH,
        TowerError::NotHyperbolic | TowerError::Graph(_) => EXIT_DOMAIN,
    };
    Failure::new(code, e)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Normalize { groups, w } => {
            let fp = free_product(&groups)?;
            println!("{}", word(&fp, &w)?);
            Ok(0)
        }
        Command::Conjugate { groups, u, v } => {
            let fp = free_product(&groups)?;
            match fp.conjugate_test(&word(&fp, &u)?, &word(&fp, &v)?) {
                Some(c) => {
                    println!("{c}");
                    Ok(0)
                }
                None => {
                    println!("not conjugate");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Root { groups, w } => {
            let fp = free_product(&groups)?;
            let w = word(&fp, &w)?;
            let class = fp.classify(&w);
            let (reduced, conj) = fp.cyclic_reduce(&w);
            println!("class {class:?}");
            println!("reduced {reduced}");
            println!("conjugator {conj}");
            if class == WordClass::Hyperbolic {
                let (base, k) = fp.extract_root(&reduced).map_err(|e| Failure::new(EXIT_DOMAIN, e))?;
                println!("root {base}");
                println!("exponent {k}");
            }
            Ok(0)
        }
        Command::Cartesian { groups, w } => {
            let fp = free_product(&groups)?;
            let fw = rs_rewrite(&fp, &word(&fp, &w)?).map_err(|e| Failure::new(EXIT_DOMAIN, e))?;
            let ab: Vec<String> = abelianize(&fp, &fw).iter().map(i64::to_string).collect();
            println!("basis {fw}");
            println!("abelianized {}", ab.join(" "));
            Ok(0)
        }
        Command::Gamma0 { groups, u, v, search, out, dot_dir } => {
            let fp = free_product(&groups)?;
            let (ur, rival) = tower_words(&fp, &u, v.as_deref())?;
            let tower = Tower::new(&fp, ur, rival, search.budget).map_err(tower_failure)?;
            match tower.init_gamma0_with(search.budget, search.max_degree, search.seed).map_err(tower_failure)? {
                Gamma0Outcome::Ready { state, examined } => {
                    eprintln!("gamma0: {} vertices after {examined} candidates, max u-cycle {}", state.graph.vertex_count(), state.t);
                    if let Some(dir) = &dot_dir {
                        write_dot(dir, "stage-0.dot", &state.graph.to_dot(None))?;
                    }
                    emit(out.as_deref(), &state.graph.to_text())?;
                    Ok(0)
                }
                Gamma0Outcome::Separated { certificate, examined } => {
                    eprintln!("candidate {examined} already separates");
                    emit(out.as_deref(), &certificate.to_text())?;
                    Ok(0)
                }
            }
        }
        Command::Tower { groups, u, v, search, steps, out, dot_dir } => {
            let fp = free_product(&groups)?;
            let (ur, rival) = tower_words(&fp, &u, v.as_deref())?;
            let tower = Tower::new(&fp, ur, rival, search.budget).map_err(tower_failure)?;
            let mut state = match tower.init_gamma0_with(search.budget, search.max_degree, search.seed).map_err(tower_failure)? {
                Gamma0Outcome::Ready { state, .. } => state,
                Gamma0Outcome::Separated { certificate, .. } => {
                    println!("stage 0 separates: orders {} {}", certificate.u_order, certificate.v_order);
                    emit(out.as_deref(), &certificate.to_text())?;
                    return Ok(0);
                }
            };
            println!("stage 0: vertices {} max-u-cycle {}", state.graph.vertex_count(), state.t);
            if let Some(dir) = &dot_dir {
                write_dot(dir, "stage-0.dot", &state.graph.to_dot(Some(&state.path)))?;
            }
            for _ in 0..steps {
                match tower.step(&state).map_err(tower_failure)? {
                    StepOutcome::Separated(cert) => {
                        println!("stage {} separates: orders {} {}", state.n + 1, cert.u_order, cert.v_order);
                        emit(out.as_deref(), &cert.to_text())?;
                        return Ok(0);
                    }
                    StepOutcome::Advanced { state: next, surgeries } => {
                        state = next;
                        let copies: Vec<String> = surgeries.iter().map(|s| format!("{}x{}", s.copies, s.side)).collect();
                        println!(
                            "stage {}: vertices {} max-u-cycle {} path {} surgeries {}",
                            state.n,
                            state.graph.vertex_count(),
                            state.t,
                            state.path.len(),
                            copies.join(",")
                        );
                        if let Some(dir) = &dot_dir {
                            write_dot(dir, &format!("stage-{}.dot", state.n), &state.graph.to_dot(Some(&state.path)))?;
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Separate { groups, u, v, search, steps, out } => {
            let fp = free_product(&groups)?;
            let (u, v) = (word(&fp, &u)?, word(&fp, &v)?);
            let config = SeparatorConfig { budget: search.budget, max_degree: search.max_degree, seed: search.seed, tower_steps: steps };
            let outcome = separate_orders(&fp, &u, &v, &config).map_err(|e| Failure::new(EXIT_BREACH, e))?;
            match outcome {
                Outcome::Separated(cert) => {
                    eprintln!("orders {} {} at degree {} ({})", cert.u_order, cert.v_order, cert.degree(), cert.provenance);
                    emit(out.as_deref(), &cert.to_text())?;
                    Ok(0)
                }
                Outcome::Refused(r) => {
                    let code = match r {
                        Refusal::ConjugatePair { .. } => EXIT_CONJUGATE,
                        Refusal::FactorPairInseparable { .. } => EXIT_FACTOR,
                        Refusal::BudgetExhausted(_) => EXIT_BUDGET,
                    };
                    eprintln!("{}", r.to_string().trim_end());
                    Ok(code)
                }
            }
        }
        Command::Verify { groups, u, v, cert } => {
            let fp = free_product(&groups)?;
            let (u, v) = (word(&fp, &u)?, word(&fp, &v)?);
            let text = match &cert {
                Some(path) => fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?,
                None => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::new(EXIT_IO, e))?;
                    s
                }
            };
            let cert = Certificate::from_text(&text).map_err(|e| Failure::new(EXIT_PARSE, e))?;
            let report = verify_certificate(&fp, &u, &v, &cert);
            if report.passed() {
                println!("ok: orders {} {}", cert.u_order, cert.v_order);
                Ok(0)
            } else {
                for f in &report.failures {
                    println!("fail: {f}");
                }
                Ok(EXIT_NEGATIVE)
            }
        }
        Command::Oracle { groups, u, v, dmax, out } => {
            let fp = free_product(&groups)?;
            let (u, v) = (word(&fp, &u)?, word(&fp, &v)?);
            match min_separating_degree(&fp, &u, &v, dmax).map_err(|e| Failure::new(EXIT_DOMAIN, e))? {
                Some((d, pair)) => {
                    println!("min-degree {d}");
                    let cert = Certificate::from_tables(pair.into_tables(), &u, &v, Provenance::Oracle);
                    emit(out.as_deref(), &cert.to_text())?;
                    Ok(0)
                }
                None => {
                    println!("none up to degree {dmax}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::ExportDot { groups, input, out } => {
            let fp = free_product(&groups)?;
            let text = fs::read_to_string(&input).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", input.display())))?;
            let graph = if text.trim_start().starts_with("DEGREE") {
                let cert = Certificate::from_text(&text).map_err(|e| Failure::new(EXIT_PARSE, e))?;
                ActionGraph::from_actions(&fp, cert.tables, false)
            } else {
                ActionGraph::from_text(&fp, &text)
            }
            .map_err(|e| Failure::new(EXIT_PARSE, e))?;
            emit(out.as_deref(), &graph.to_dot(None))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_PARSE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
