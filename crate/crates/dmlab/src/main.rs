use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dmlab::commands::{self, CutoutArgs, DoublingArgs};
use dmlab::limits::{DEFAULT_MAX_DEPTH, DEFAULT_MAX_NODES, DEFAULT_SEED};
use dmlab::{emit_plotdata, parse, run_example, ExperimentSpec, Limits, Report};
use dmlab_core::measure::TreeMeasure;
use dmlab_core::rational::Rational;
use dmlab_core::seq::SequenceFamily;
use serde_json::Value;

/// Exact-arithmetic experiments on Cantor sets, cut-out sets and doubling
/// measures.
///
/// Exit status: 0 when the report's statement check passed, 2 when it was
/// inconclusive, 1 when it failed or on error.
#[derive(Parser, Debug)]
#[command(name = "dmlab", version)]
struct Cli {
    /// Hard cap on every tree or scan depth.
    #[arg(long, global = true, env = "DMLAB_MAX_DEPTH", default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: u32,
    /// Hard cap on node and ball counts.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    /// Seed for sampled configurations.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write long-format plot CSV here.
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// Add wall-clock time to the report (makes it run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a sequence family and bound its sums.
    Seq {
        #[arg(long)]
        family: String,
        /// Also classify membership in ℓ^p.
        #[arg(long)]
        p: Option<String>,
        #[arg(long, default_value_t = 16)]
        terms: u64,
        #[arg(long, default_value_t = 16)]
        tail_at: u64,
    },
    /// Build a middle-interval Cantor tree and verify its thick structure.
    Cantor {
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Masses and distribution function of a tree measure.
    Measure {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Comma-separated points for the distribution function.
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
    },
    #[command(subcommand)]
    Doubling(DoublingCmd),
    #[command(subcommand)]
    Certify(CertifyCmd),
    #[command(subcommand)]
    Qs(QsCmd),
    /// Run a worked example.
    Example(ExampleArgs),
}

#[derive(Subcommand, Debug)]
enum DoublingCmd {
    /// Scan the doubling constant and check the mass-decay inequality.
    Scan {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        /// Sampled (A, x, r) configurations; 0 skips sampling.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Also test this (too small) constant and report its counterexample.
        #[arg(long)]
        wrong_c: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CertifyCmd {
    /// Fatness of a thick structure from the product bound.
    Fat {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        t: String,
        #[arg(long, default_value = "1")]
        c3n: String,
        /// Depth of the middle-interval tree checked for thickness; 0 skips it.
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Thinness decay of a porous construction.
    Thin {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "1")]
        s: String,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value = "1/1000")]
        eps: String,
    },
    /// Lower bound on the measure of a cut-out set.
    Cutout {
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "1")]
        scale: String,
        #[arg(long, default_value_t = 32)]
        count: u64,
        /// Explicit balls `lo,hi;lo,hi;...`; default packs them from 0.
        #[arg(long)]
        balls: Option<String>,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long, default_value_t = 32)]
        n: u64,
        #[arg(long, default_value = "1/4")]
        p: String,
    },
    /// Left-descendant removal schedule on the binary tree.
    Example54 {
        #[arg(long, default_value = "1/3")]
        p: String,
        #[arg(long, default_value_t = 12)]
        stages: u64,
    },
}

#[derive(Subcommand, Debug)]
enum QsCmd {
    /// Ratio scan of the distribution function of a measure.
    Scan {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Write the ratio table as CSV here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Doubling constant transported through a quasisymmetric map.
    Pullback {
        #[arg(long = "C")]
        c: String,
        #[arg(long)]
        eta2: String,
    },
}

#[derive(Args, Debug)]
struct ExampleArgs {
    /// One of ex5_1, ex5_2, ex5_4, prop2_3, thm3_2, thm1_1; optional with --config.
    name: Option<String>,
    /// JSON experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    stages: Option<u64>,
    /// Family as text or a JSON object.
    #[arg(long)]
    family: Option<String>,
    /// Measure as text or a JSON object.
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    c3n: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
}

/// Flags take either a text form or an inline JSON object.
fn spec_value(s: &str) -> Result<Value> {
    if s.trim_start().starts_with('{') {
        serde_json::from_str(s).with_context(|| format!("invalid JSON {s:?}"))
    } else {
        Ok(Value::from(s))
    }
}

fn family(s: &str) -> Result<SequenceFamily> {
    parse::family_json(&spec_value(s)?)
}

fn measure(s: &str, limits: &Limits) -> Result<TreeMeasure> {
    parse::measure_json(&spec_value(s)?, limits.max_depth)
}

fn rat(s: &str) -> Result<Rational> {
    parse::rational(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

struct Outputs {
    out: Option<PathBuf>,
    plot: Option<PathBuf>,
}

fn dispatch(command: Command, limits: &Limits, outputs: &mut Outputs) -> Result<Report> {
    Ok(match command {
        Command::Seq { family: f, p, terms, tail_at } => {
            let p = p.as_deref().map(rat).transpose()?;
            commands::seq(&family(&f)?, p.as_ref(), terms, tail_at)?
        }
        Command::Cantor { beta, depth } => commands::cantor(&family(&beta)?, depth, limits)?,
        Command::Measure { measure: m, depth, at } => {
            let xs = at.iter().map(|x| rat(x)).collect::<Result<Vec<_>>>()?;
            commands::measure(&m, &measure(&m, limits)?, depth, &xs, limits)?
        }
        Command::Doubling(DoublingCmd::Scan { measure: m, depth, trials, wrong_c }) => {
            let args = DoublingArgs {
                label: &m,
                depth,
                trials,
                wrong_c: wrong_c.as_deref().map(rat).transpose()?,
            };
            commands::doubling(&measure(&m, limits)?, &args, limits)?
        }
        Command::Certify(c) => match c {
            CertifyCmd::Fat { alpha, t, c3n, depth } => {
                commands::certify_fat(&family(&alpha)?, &rat(&t)?, &rat(&c3n)?, depth, limits)?
            }
            CertifyCmd::Thin { alpha, s, c, eps } => {
                commands::certify_thin(&family(&alpha)?, &rat(&s)?, &rat(&c)?, &rat(&eps)?, limits)?
            }
            CertifyCmd::Cutout { measure: m, family: f, scale, count, balls, depth, r, n, p } => {
                let args = CutoutArgs {
                    label: &m,
                    family: family(&f)?,
                    scale: rat(&scale)?,
                    count,
                    balls: balls.as_deref().map(parse::intervals).transpose()?,
                    depth,
                    r: rat(&r)?,
                    n,
                    p: rat(&p)?,
                };
                commands::certify_cutout(&measure(&m, limits)?, &args, limits)?
            }
            CertifyCmd::Example54 { p, stages } => commands::certify_example54(&rat(&p)?, stages)?,
        },
        Command::Qs(QsCmd::Scan { measure: m, depth, table }) => {
            let (report, csv) = commands::qs_scan(&m, &measure(&m, limits)?, depth, limits)?;
            match table {
                Some(path) => write(&path, &csv)?,
                None => eprint!("{csv}"),
            }
            report
        }
        Command::Qs(QsCmd::Pullback { c, eta2 }) => commands::qs_pullback(&rat(&c)?, &rat(&eta2)?)?,
        Command::Example(a) => {
            let file = match &a.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ExperimentSpec::from_json(&text)?
                }
                None => ExperimentSpec::default(),
            };
            let flags = ExperimentSpec {
                name: a.name,
                p: a.p,
                stages: a.stages,
                family: a.family.as_deref().map(spec_value).transpose()?,
                measure: a.measure.as_deref().map(spec_value).transpose()?,
                depth: a.depth,
                n: a.n,
                t: a.t,
                s: a.s,
                c: a.c,
                c3n: a.c3n,
                epsilon: a.epsilon,
                out: None,
                plot: None,
            };
            let spec = file.merge(flags);
            if let Some(d) = spec.depth {
                limits.depth("experiment", d)?;
            }
            outputs.out = outputs.out.take().or_else(|| spec.out.clone());
            outputs.plot = outputs.plot.take().or_else(|| spec.plot.clone());
            let name = spec
                .name
                .clone()
                .context("no example name given on the command line or in --config")?;
            run_example(&name, &spec, limits)?
        }
    })
}

fn run(cli: Cli) -> Result<i32> {
    let limits = Limits {
        max_depth: cli.max_depth,
        max_nodes: cli.max_nodes,
        seed: cli.seed,
    };
    let mut outputs = Outputs { out: cli.out, plot: cli.plot };
    let start = Instant::now();
    let mut report = dispatch(cli.command, &limits, &mut outputs)?;
    if cli.timing {
        report.elapsed = Some(start.elapsed());
    }
    let json = report.render();
    match &outputs.out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = &outputs.plot {
        write(path, &emit_plotdata(&report))?;
    }
    Ok(report.status.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
