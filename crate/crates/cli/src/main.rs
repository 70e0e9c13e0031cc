//! `mv2b` command-line front-end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mv2b::io::{parse_bnet, parse_mvnet, print_mvnet, to_json};
use mv2b::pipeline::{
    run_admissibility, run_analyze_bool, run_analyze_mv, run_codes, run_convert, run_verify,
    RunConfig,
};
use mv2b::sample::{random_unitary_networks, SampleParams};
use mv2b::{CodeKind, Coding, Error, ModeChoice, DEFAULT_CAP};

const EXIT_INPUT: u8 = 1;
const EXIT_REFUSED: u8 = 2;
const EXIT_VERDICT: u8 = 3;
const EXIT_CAPACITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "mv2b",
    version,
    about = "Convert multi-valued networks into bisimilar Boolean networks"
)]
struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a `.mvnet` file into a `.bnet` Boolean network.
    Convert {
        input: PathBuf,
        #[command(flatten)]
        opts: Common,
        /// Print the conversion report as JSON instead of the network.
        #[arg(long)]
        json: bool,
        /// Record timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Check a conversion by state-space enumeration.
    Verify {
        input: PathBuf,
        /// Boolean network to check instead of converting the input.
        #[arg(long)]
        bnet: Option<PathBuf>,
        #[command(flatten)]
        opts: Common,
        #[arg(long)]
        json: bool,
    },
    /// Attractors and interaction graphs of a `.mvnet` or `.bnet` file.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        opts: Common,
        #[arg(long)]
        json: bool,
    },
    /// Inspect a coding on levels `0..=max-level`.
    Codes {
        #[arg(long, default_value = "summing")]
        coding: CodeKind,
        /// Level permutation composed with the coding, e.g. `1,0,2`.
        #[arg(long, value_delimiter = ',')]
        permutation: Option<Vec<u32>>,
        #[arg(long)]
        max_level: u32,
        #[arg(long)]
        json: bool,
    },
    /// Pairwise admissibility of the standard Boolean modes.
    Admissibility {
        input: PathBuf,
        #[command(flatten)]
        opts: Common,
        #[arg(long)]
        json: bool,
    },
    /// Write seeded random unitary stepwise networks.
    Sample {
        #[arg(long, default_value_t = 0x5eed_2024)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
        #[arg(long, default_value_t = 3)]
        max_level: u32,
        /// Output directory; networks are printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value = "summing")]
    coding: CodeKind,
    /// Level permutation composed with the coding, e.g. `1,0,2`.
    #[arg(long, value_delimiter = ',')]
    permutation: Option<Vec<u32>>,
    /// `asynchronous`, `parallel-support`, or a JSON file holding a list of
    /// modalities over Boolean variable names.
    #[arg(long, default_value = "asynchronous")]
    mode: String,
    /// Largest number of states enumerated.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Directory receiving the produced files.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn coding(kind: CodeKind, permutation: &Option<Vec<u32>>) -> mv2b::Result<Coding> {
    match permutation {
        Some(pi) => Coding::permuted(kind, pi.clone()),
        None => Ok(Coding::new(kind)),
    }
}

impl Common {
    fn config(&self, timings: bool) -> anyhow::Result<RunConfig> {
        let mode = match self.mode.parse::<ModeChoice>() {
            Ok(m) => m,
            Err(_) if Path::new(&self.mode).is_file() => {
                let text = read(Path::new(&self.mode))?;
                let modalities: Vec<Vec<String>> =
                    serde_json::from_str(&text).with_context(|| {
                        format!(
                            "{}: expected a JSON list of lists of variable names",
                            self.mode
                        )
                    })?;
                ModeChoice::Custom(modalities)
            }
            Err(e) => return Err(e.into()),
        };
        Ok(RunConfig {
            coding: coding(self.coding, &self.permutation)?,
            mode,
            cap: self.cap,
            timings,
        })
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn located(e: Error, path: &Path) -> Error {
    match e {
        Error::Parse(mut p) => {
            p.span = p.span.with_file(path.display().to_string());
            Error::Parse(p)
        }
        other => other,
    }
}

fn load_mvnet(path: &Path) -> anyhow::Result<mv2b::MvNetwork> {
    Ok(parse_mvnet(&read(path)?).map_err(|e| located(e, path))?)
}

fn load_bnet(path: &Path) -> anyhow::Result<mv2b::BooleanNetwork> {
    Ok(parse_bnet(&read(path)?).map_err(|e| located(e, path))?)
}

fn write_out(dir: &Path, name: &str, content: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "network".into(), |s| s.to_string_lossy().into_owned())
}

/// Runs a command and returns the process exit code.
fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Convert {
            input,
            opts,
            json,
            timings,
        } => {
            let net = load_mvnet(&input)?;
            let out = run_convert(&net, &opts.config(timings)?)?;
            let report = to_json("conversion", out.report())?;
            if let Some(dir) = &opts.out {
                write_out(dir, &format!("{}.bnet", stem(&input)), &out.bnet)?;
                write_out(dir, "report.json", &report)?;
            }
            print!("{}", if json { report } else { out.bnet });
            Ok(0)
        }
        Command::Verify {
            input,
            bnet,
            opts,
            json,
        } => {
            let net = load_mvnet(&input)?;
            let bn = bnet.as_deref().map(load_bnet).transpose()?;
            let report = run_verify(&net, bn.as_ref(), &opts.config(false)?)?;
            let text = to_json("verification", &report)?;
            if let Some(dir) = &opts.out {
                write_out(dir, "report.json", &text)?;
            }
            if json {
                print!("{text}");
            } else {
                println!("verdict: {}", report.verdict);
                println!("bisimulation: {}", report.bisimulation.verdict);
                println!("local evolution: {}", report.local_evolution.iter().all(|p| p.holds));
                println!("stability condition: {}", report.stability.stability_holds);
                println!("absorption: {}", report.absorption.holds);
                println!("off-domain nullity: {}", report.off_domain_nullity.holds);
                println!("attractors coincide: {}", report.attractors.coincide);
            }
            Ok(if report.verdict { 0 } else { EXIT_VERDICT })
        }
        Command::Analyze { input, opts, json } => {
            let cfg = opts.config(false)?;
            let out = if input.extension().is_some_and(|e| e == "bnet") {
                run_analyze_bool(&load_bnet(&input)?, &cfg)?
            } else {
                run_analyze_mv(&load_mvnet(&input)?, &cfg)?
            };
            let text = to_json("analysis", &out.report)?;
            if let Some(dir) = &opts.out {
                write_out(dir, "attractors.json", &text)?;
                for (name, content) in &out.files {
                    write_out(dir, name, content)?;
                }
            }
            if json {
                print!("{text}");
            } else {
                println!("stable states: {}", out.report.stable_states.join(", "));
                for a in &out.report.attractors {
                    println!("attractor ({:?}): {}", a.kind, a.states.join(" "));
                }
                println!(
                    "interaction graph: {}",
                    out.report.interaction_graph.join(", ")
                );
                if let Some(g) = &out.report.recovered_graph {
                    println!("recovered graph: {}", g.join(", "));
                }
                if let Some(e) = &out.report.recovery_error {
                    println!("recovery failed: {e}");
                }
            }
            Ok(0)
        }
        Command::Codes {
            coding: kind,
            permutation,
            max_level,
            json,
        } => {
            let report = run_codes(&coding(kind, &permutation)?, max_level)?;
            if json {
                print!("{}", to_json("codes", &report)?);
            } else {
                println!(
                    "coding {} on 0..{}: {} bits",
                    report.coding, report.max_level, report.support_size
                );
                for row in &report.table {
                    let level = row.level.map_or_else(|| "-".to_string(), |l| l.to_string());
                    println!("  {} -> {level}", row.profile);
                }
                println!("markers: {:?}", report.markers);
                println!(
                    "neighbourhood preserving: {}",
                    report.neighbourhood.preserving
                );
            }
            Ok(0)
        }
        Command::Admissibility { input, opts, json } => {
            let net = load_mvnet(&input)?;
            let report = run_admissibility(&net, &opts.config(false)?)?;
            if json {
                print!("{}", to_json("admissibility", &report)?);
            } else {
                for p in &report.pairs {
                    println!(
                        "{} admissible for {}: {}",
                        p.mode, p.reference, p.admissible
                    );
                }
            }
            Ok(0)
        }
        Command::Sample {
            seed,
            count,
            max_vars,
            max_level,
            out,
        } => {
            if max_vars == 0 || max_level == 0 {
                bail!("--max-vars and --max-level must be at least 1");
            }
            let params = SampleParams {
                max_vars,
                max_level,
                ..SampleParams::default()
            };
            for (i, net) in random_unitary_networks(seed, count, &params)?
                .iter()
                .enumerate()
            {
                let text = print_mvnet(net);
                match &out {
                    Some(dir) => write_out(dir, &format!("random-{i:03}.mvnet"), &text)?,
                    None => println!("{text}"),
                }
            }
            Ok(0)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Refused { .. }) => EXIT_REFUSED,
        Some(Error::Capacity { .. }) => EXIT_CAPACITY,
        _ => EXIT_INPUT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
