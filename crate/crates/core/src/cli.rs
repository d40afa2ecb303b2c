//! The `tbcast` command line. Exit status: 0 for YES or valid, 1 for NO or
//! invalid, 2 for usage, input and budget errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gadget::{parse_role_map, render_role_map, GadgetReport};
use crate::gen;
use crate::graph::Instance;
use crate::io::{self, N3dmFile};
use crate::protocol::verify;
use crate::reduction_matching::{
    brute_force_n3dm, build_matching_gadget, partition_from_protocol, protocol_from_partition,
    to_almost, validate_matching_gadget, AlmostInstance, MatchRole, MatchingGadget,
};
use crate::reduction_sat::{
    assignment_from_protocol, build_sat_gadget, protocol_from_assignment, validate_sat_gadget,
    SatGadget, SatRole,
};
use crate::sat::{brute_force_sat, normalize, parse_dimacs, render_dimacs, validate_33, CnfFormula};
use crate::solvers::{
    decide, exact_search, permutation_oracle_with_cap, tree_broadcast_time, Answer,
    Method as SolvedBy, DEFAULT_BUDGET, DEFAULT_ORACLE_CAP,
};

#[derive(Debug, Parser)]
#[command(name = "tbcast", version, about = "Telephone broadcast toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the instance broadcasts within its deadline.
    Solve {
        #[arg(short = 'i')]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the witness protocol here.
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Check a protocol against an instance.
    Verify {
        #[arg(short = 'i')]
        instance: PathBuf,
        #[arg(short = 'p')]
        protocol: PathBuf,
    },
    /// Broadcast time by brute force over vertex orders.
    Oracle {
        #[arg(short = 'i')]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: usize,
    },
    /// Build a reduction gadget.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Convert an exact matching instance to the relaxed form.
    ToAlmost {
        #[arg(short = 'n')]
        n3dm: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Convert between source-problem witnesses and gadget protocols.
    #[command(subcommand)]
    Witness(Witness),
    /// Seeded random inputs.
    #[command(subcommand)]
    Gen(Gen),
    /// Structural audit of a gadget.
    #[command(subcommand)]
    Check(Check),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Subset,
    Perm,
    Tree,
}

#[derive(Debug, Subcommand)]
pub enum Reduce {
    /// Formula to broadcast instance.
    Sat {
        #[arg(short = 'c')]
        cnf: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
        #[arg(short = 'm')]
        map: PathBuf,
        /// Normalize formulas that do not fit the gadget and write the
        /// normalized formula here.
        #[arg(long)]
        normalized: Option<PathBuf>,
    },
    /// Relaxed matching instance to broadcast instance.
    N3dm {
        #[arg(short = 'n')]
        n3dm: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
        #[arg(short = 'm')]
        map: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    #[arg(short = 'i')]
    instance: PathBuf,
    #[arg(short = 'm')]
    map: PathBuf,
    /// Formula the gadget was built from.
    #[arg(short = 'c', conflicts_with = "n3dm", required_unless_present = "n3dm")]
    cnf: Option<PathBuf>,
    /// Relaxed matching instance the gadget was built from.
    #[arg(short = 'n')]
    n3dm: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Witness {
    /// Assignment or partition to protocol. Without `-w` a witness is found
    /// by brute force.
    ToProtocol {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'w')]
        witness: Option<PathBuf>,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Protocol to assignment or partition.
    FromProtocol {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'p')]
        protocol: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Gen {
    /// Connected graph instance.
    Graph {
        #[arg(long)]
        vertices: usize,
        /// Probability of each non-tree edge.
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long)]
        tree: bool,
        #[arg(long, default_value_t = 0)]
        deadline: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// DIMACS formula.
    Cnf {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        /// Satisfiable and gadget-ready.
        #[arg(long)]
        planted: bool,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Exact matching instance.
    N3dm {
        #[arg(long)]
        triples: usize,
        #[arg(long, default_value_t = 10)]
        max_size: usize,
        /// With a planted solution.
        #[arg(long)]
        planted: bool,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Audit a gadget given its instance and role map.
    Gadget {
        #[arg(short = 'i')]
        instance: PathBuf,
        #[arg(short = 'm')]
        map: PathBuf,
        /// Relaxed matching instance; without it the map is read as a SAT
        /// gadget.
        #[arg(short = 'n')]
        n3dm: Option<PathBuf>,
    },
}

/// Failure carrying the exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn fail(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

/// Text for stdout and the exit status.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn done(stdout: String, yes: bool) -> Outcome {
    Outcome {
        stdout,
        code: if yes { 0 } else { 1 },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path`, or returns it for stdout.
fn emit(path: Option<&PathBuf>, text: String) -> Result<String, Failure> {
    match path {
        Some(p) => write(p, &text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    io::parse_instance(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_cnf(path: &Path) -> Result<CnfFormula, Failure> {
    parse_dimacs(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_n3dm(path: &Path) -> Result<N3dmFile, Failure> {
    io::parse_n3dm(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_almost(path: &Path) -> Result<AlmostInstance, Failure> {
    match load_n3dm(path)? {
        N3dmFile::Almost(a) => Ok(a),
        N3dmFile::Exact(_) => Err(fail(format!(
            "{}: expected a relaxed instance (header with lambda); run `to-almost` first",
            path.display()
        ))),
    }
}

enum Gadget {
    Sat(SatGadget),
    Matching(MatchingGadget),
}

fn load_gadget(instance: &Path, map: &Path, n3dm: Option<&PathBuf>) -> Result<Gadget, Failure> {
    let inst = load_instance(instance)?;
    let text = read(map)?;
    let order = inst.order();
    let map_err = |e: &dyn std::fmt::Display| fail(format!("{}: {e}", map.display()));
    match n3dm {
        Some(n) => {
            let almost = load_almost(n)?;
            let roles = parse_role_map::<MatchRole>(&text, order).map_err(|e| map_err(&e))?;
            MatchingGadget::from_parts(inst, roles, almost)
                .map(Gadget::Matching)
                .map_err(|e| map_err(&e))
        }
        None => {
            let roles = parse_role_map::<SatRole>(&text, order).map_err(|e| map_err(&e))?;
            SatGadget::from_parts(inst, roles)
                .map(Gadget::Sat)
                .map_err(|e| map_err(&e))
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Solve {
            instance,
            method,
            budget,
            out,
        } => solve(&load_instance(&instance)?, method, budget, out.as_ref()),
        Command::Verify { instance, protocol } => {
            let inst = load_instance(&instance)?;
            let p = io::parse_protocol(&read(&protocol)?, inst.order(), inst.source())
                .map_err(|e| fail(format!("{}: {e}", protocol.display())))?;
            let verdict = verify(&inst, &p);
            Ok(done(format!("{verdict}\n"), verdict.is_valid()))
        }
        Command::Oracle { instance, cap } => {
            let inst = load_instance(&instance)?;
            let b = permutation_oracle_with_cap(&inst, cap).map_err(fail)?;
            Ok(done(format!("b={b}\n"), true))
        }
        Command::Reduce(r) => reduce(r),
        Command::ToAlmost { n3dm, out } => {
            let almost = match load_n3dm(&n3dm)? {
                N3dmFile::Exact(e) => to_almost(&e).map_err(fail)?,
                N3dmFile::Almost(_) => return Err(fail("instance is already relaxed")),
            };
            Ok(done(emit(out.as_ref(), io::render_almost(&almost))?, true))
        }
        Command::Witness(w) => witness(w),
        Command::Gen(g) => generate(g),
        Command::Check(Check::Gadget {
            instance,
            map,
            n3dm,
        }) => {
            let report = match load_gadget(&instance, &map, n3dm.as_ref())? {
                Gadget::Sat(g) => validate_sat_gadget(&g),
                Gadget::Matching(g) => validate_matching_gadget(&g),
            };
            Ok(done(render_report(&report), report.is_ok()))
        }
    }
}

fn render_report(report: &GadgetReport) -> String {
    let mut out = String::new();
    for v in &report.violations {
        let _ = writeln!(out, "violation: {v}");
    }
    let _ = writeln!(
        out,
        "{} ({} checks, {} violations)",
        if report.is_ok() { "ok" } else { "FAILED" },
        report.checks,
        report.violations.len()
    );
    out
}

fn solve(inst: &Instance, method: Method, budget: u64, out: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let t = inst.deadline();
    let verdict = |b: usize| {
        if b <= t {
            format!("YES (b={b} <= t={t})\n")
        } else {
            format!("NO (b={b} > t={t})\n")
        }
    };
    let (text, yes, witness) = match method {
        Method::Auto => {
            let d = decide(inst, budget).map_err(fail)?;
            let text = match (&d.answer, d.method, d.broadcast_time) {
                (_, SolvedBy::Kernel, _) => {
                    format!("NO (kernel: n={} > 2^{t})\n", inst.order())
                }
                (_, SolvedBy::LowerBound, _) => {
                    format!("NO (lower bound {} > t={t})\n", d.bound.unwrap_or_default())
                }
                (_, _, Some(b)) => verdict(b),
                (_, _, None) => format!("NO (b > t={t})\n"),
            };
            let yes = d.is_yes();
            let witness = match d.answer {
                Answer::Yes(p) => Some(p),
                Answer::No => None,
            };
            (text, yes, witness)
        }
        Method::Subset | Method::Tree => {
            let r = if method == Method::Tree {
                tree_broadcast_time(inst)
            } else {
                exact_search(inst, budget)
            }
            .map_err(fail)?;
            let yes = r.broadcast_time <= t;
            (verdict(r.broadcast_time), yes, yes.then_some(r.witness))
        }
        Method::Perm => {
            let b = permutation_oracle_with_cap(inst, DEFAULT_ORACLE_CAP).map_err(fail)?;
            (verdict(b), b <= t, None)
        }
    };
    let mut stdout = text;
    if let Some(p) = witness {
        stdout.push_str(&emit(out, io::render_protocol(&p))?);
    }
    Ok(done(stdout, yes))
}

fn reduce(r: Reduce) -> Result<Outcome, Failure> {
    match r {
        Reduce::Sat {
            cnf,
            out,
            map,
            normalized,
        } => {
            let mut f = load_cnf(&cnf)?;
            let mut note = String::new();
            if !validate_33(&f).is_empty() || f.has_empty_clause() {
                let Some(path) = normalized else {
                    return Err(fail(
                        "formula does not fit the gadget; pass --normalized <path> to convert it",
                    ));
                };
                f = normalize(&f).map_err(fail)?.formula;
                write(&path, &render_dimacs(&f))?;
                let _ = writeln!(note, "normalized formula: {} variables", f.variable_count());
            }
            let g = build_sat_gadget(&f).map_err(fail)?;
            write(&out, &io::render_instance(&g.instance))?;
            write(&map, &render_role_map(&g.roles))?;
            let _ = writeln!(
                note,
                "gadget: n={} m={} t={} levels={}",
                g.instance.order(),
                g.instance.graph().size(),
                g.deadline(),
                g.buckets.levels()
            );
            Ok(done(note, true))
        }
        Reduce::N3dm { n3dm, out, map } => {
            let almost = load_almost(&n3dm)?;
            let g = build_matching_gadget(&almost).map_err(fail)?;
            write(&out, &io::render_instance(&g.instance))?;
            write(&map, &render_role_map(&g.roles))?;
            Ok(done(
                format!(
                    "gadget: n={} m={} t={}\n",
                    g.instance.order(),
                    g.instance.graph().size(),
                    g.deadline()
                ),
                true,
            ))
        }
    }
}

fn witness(w: Witness) -> Result<Outcome, Failure> {
    match w {
        Witness::ToProtocol {
            source,
            witness,
            out,
        } => {
            let gadget = load_gadget(&source.instance, &source.map, source.n3dm.as_ref())?;
            let protocol = match gadget {
                Gadget::Sat(g) => {
                    let f = load_cnf(source.cnf.as_ref().expect("clap requires -c or -n"))?;
                    let pi = match witness {
                        Some(p) => io::parse_assignment(&read(&p)?, f.variable_count())
                            .map_err(|e| fail(format!("{}: {e}", p.display())))?,
                        None => match brute_force_sat(&f).map_err(fail)? {
                            Some(a) => a,
                            None => return Ok(done("NO (formula is unsatisfiable)\n".into(), false)),
                        },
                    };
                    if !pi.satisfies(&f) {
                        return Ok(done("NO (assignment does not satisfy the formula)\n".into(), false));
                    }
                    protocol_from_assignment(&g, &pi).map_err(fail)?
                }
                Gadget::Matching(g) => {
                    let part = match witness {
                        Some(p) => io::parse_partition(&read(&p)?, g.almost.m())
                            .map_err(|e| fail(format!("{}: {e}", p.display())))?,
                        None => match brute_force_n3dm(&g.almost).map_err(fail)? {
                            Some(p) => p,
                            None => return Ok(done("NO (no partition exists)\n".into(), false)),
                        },
                    };
                    match protocol_from_partition(&g, &part) {
                        Ok(p) => p,
                        Err(e) => return Ok(done(format!("NO ({e})\n"), false)),
                    }
                }
            };
            Ok(done(emit(out.as_ref(), io::render_protocol(&protocol))?, true))
        }
        Witness::FromProtocol {
            source,
            protocol,
            out,
        } => {
            let gadget = load_gadget(&source.instance, &source.map, source.n3dm.as_ref())?;
            let (order, s) = match &gadget {
                Gadget::Sat(g) => (g.instance.order(), g.source()),
                Gadget::Matching(g) => (g.instance.order(), g.instance.source()),
            };
            let p = io::parse_protocol(&read(&protocol)?, order, s)
                .map_err(|e| fail(format!("{}: {e}", protocol.display())))?;
            let text = match gadget {
                Gadget::Sat(g) => match assignment_from_protocol(&g, &p) {
                    Ok(a) => io::render_assignment(&a),
                    Err(e) => return Ok(done(format!("NO ({e})\n"), false)),
                },
                Gadget::Matching(g) => match partition_from_protocol(&g, &p) {
                    Ok(part) => io::render_partition(&part),
                    Err(e) => return Ok(done(format!("NO ({e})\n"), false)),
                },
            };
            Ok(done(emit(out.as_ref(), text)?, true))
        }
    }
}

fn generate(g: Gen) -> Result<Outcome, Failure> {
    let (text, out) = match g {
        Gen::Graph {
            vertices,
            density,
            tree,
            deadline,
            seed,
            out,
        } => {
            if vertices == 0 || !(0.0..=1.0).contains(&density) {
                return Err(fail("need --vertices >= 1 and 0 <= --density <= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let graph = if tree {
                gen::random_tree(&mut rng, vertices)
            } else {
                gen::random_connected(&mut rng, vertices, density)
            };
            let inst = Instance::new(graph, 1, deadline).map_err(fail)?;
            (io::render_instance(&inst), out)
        }
        Gen::Cnf {
            vars,
            clauses,
            planted,
            seed,
            out,
        } => {
            if vars == 0 {
                return Err(fail("need --vars >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = if planted {
                gen::planted_33_cnf(&mut rng, vars, clauses).0
            } else {
                gen::random_cnf(&mut rng, vars, clauses)
            };
            (render_dimacs(&f), out)
        }
        Gen::N3dm {
            triples,
            max_size,
            planted,
            seed,
            out,
        } => {
            if triples == 0 || max_size == 0 {
                return Err(fail("need --triples >= 1 and --max-size >= 1"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = if planted {
                gen::planted_n3dm(&mut rng, triples, max_size).0
            } else {
                gen::random_n3dm(&mut rng, triples, max_size)
            };
            (io::render_n3dm(&inst), out)
        }
    };
    Ok(done(emit(out.as_ref(), text)?, true))
}
