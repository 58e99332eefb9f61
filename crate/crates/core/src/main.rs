use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use blowup_ratio::digraph::GraphDocument;
use blowup_ratio::experiment::{run_mc_with_threads, DEFAULT_EPSILON};
use blowup_ratio::params::DEFAULT_TOL;
use blowup_ratio::{
    build_blowup, choose_ell, convergence_sweep, count_bruteforce, count_layered,
    count_permanent, moment_report, plan, solve_p, verify_all, ConstructionPlan, Digraph,
    Profile, Seed,
};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(version, about = "Derangement/permutation ratios of random blow-up subgraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edgelist,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Permanent,
    Layered,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the blow-up D(k, ell).
    Construct {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long, value_enum, default_value = "edgelist")]
        format: GraphFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count derangements and permutations of a graph file.
    Count {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "permanent")]
        method: Method,
    },
    /// Solve for ell and p from a target ratio; with --k also fix m.
    Solve {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exact and asymptotic moments, from a target ratio or an explicit model.
    Expect {
        #[arg(long, conflicts_with_all = ["ell", "m"])]
        r: Option<f64>,
        #[arg(long)]
        k: usize,
        #[arg(long, requires = "m")]
        ell: Option<usize>,
        #[arg(long, requires = "ell")]
        m: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: TableFormat,
    },
    /// Monte Carlo trials of the planned random model.
    Mc {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Also write one CSV row per trial here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact-moment convergence table over several part sizes, as CSV.
    Sweep {
        #[arg(long)]
        r: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the built-in cross-checks.
    Verify {
        #[arg(long, default_value = "small")]
        profile: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct Versioned<T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: T,
}

fn print_json<T: Serialize>(body: T) -> Result<()> {
    let text = serde_json::to_string_pretty(&Versioned { schema: SCHEMA, body })?;
    println!("{text}");
    Ok(())
}

fn read_graph(path: &PathBuf) -> Result<GraphDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        Ok(GraphDocument::from_json(&text)?)
    } else {
        Ok(GraphDocument::from_digraph(&Digraph::from_edge_list(&text)?, None))
    }
}

#[derive(Serialize)]
struct CountOutput {
    method: &'static str,
    n: usize,
    edges: usize,
    #[serde(flatten)]
    counts: blowup_ratio::CountPair,
    ratio: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    r: f64,
    ell: u32,
    p: f64,
    x: f64,
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct { k, ell, format, out } => {
            let d = build_blowup(k, ell)?;
            let text = match format {
                GraphFormat::Edgelist => d.to_general().to_edge_list(),
                GraphFormat::Json => GraphDocument::from_blowup(&d).to_json() + "\n",
            };
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().write_all(text.as_bytes())?,
            }
        }
        Command::Count { input, method } => {
            let doc = read_graph(&input)?;
            let g = doc.to_digraph()?;
            let (name, counts) = match method {
                Method::Brute => ("brute", count_bruteforce(&g)?),
                Method::Permanent => ("permanent", count_permanent(&g)?),
                Method::Layered => ("layered", count_layered(&doc.to_subgraph()?)?),
            };
            print_json(CountOutput {
                method: name,
                n: g.n(),
                edges: g.edge_count(),
                ratio: counts.ratio_f64(),
                counts,
            })?;
        }
        Command::Solve { r, tol, k } => match k {
            Some(k) => print_json(plan(r, k)?)?,
            None => {
                let ell = choose_ell(r)?;
                let (p, x) = solve_p(r, ell, tol)?;
                print_json(SolveOutput { r, ell, p, x })?;
            }
        },
        Command::Expect { r, k, ell, m, format } => {
            let pl = match (r, ell, m) {
                (Some(r), None, None) => plan(r, k)?,
                (None, Some(ell), Some(m)) => ConstructionPlan::direct(k, ell, m)?,
                _ => bail!("give either --r with --k, or --k with --ell and --m"),
            };
            let report = moment_report(&pl)?;
            match format {
                TableFormat::Json => print_json(report)?,
                TableFormat::Csv => {
                    let mut w = csv::Writer::from_writer(io::stdout());
                    w.serialize(report.csv_row())?;
                    w.flush()?;
                }
            }
        }
        Command::Mc { r, k, trials, seed, epsilon, threads, csv } => {
            let report = run_mc_with_threads(&plan(r, k)?, trials, Seed(seed), epsilon, threads)?;
            if let Some(path) = csv {
                let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                report.write_trials_csv(file)?;
            }
            print_json(report)?;
        }
        Command::Sweep { r, k_list, trials, seed } => {
            let rows = convergence_sweep(r, &k_list, trials, Seed(seed))?;
            let mut w = csv::Writer::from_writer(io::stdout());
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Command::Verify { profile, json } => {
            let summary = verify_all(profile.parse::<Profile>()?);
            if json {
                print_json(&summary)?;
            } else {
                for c in &summary.checks {
                    let mark = if c.passed { "PASS" } else { "FAIL" };
                    println!("[{mark}] {:<32} {:>7.2}s  {}  ({})", c.name, c.seconds, c.detail, c.claim);
                }
            }
            if !summary.all_passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
