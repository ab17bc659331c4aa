//! Command-line front end: argument definitions, run-config merging and the
//! command implementations behind the `pingpong` binary.

pub mod config;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pingpong_core::attacks::EveStrategy;
use pingpong_core::gf2::{BinaryCode, BinaryWord, SyndromeDecoder};
use pingpong_core::info::detection_threshold;
use pingpong_core::pingpong::{run_session, ProtocolConfig};
use pingpong_core::qkd::{default_threshold, run_qkd_session, NestedCodePair, QkdConfig};
use pingpong_core::quantum::NoiseModel;

use config::{RunConfigFile, PINGPONG_KEYS, QKD_KEYS};
use report::{fmt6, QkdJson, SessionJson};

/// Process exit status for a run whose every block aborted.
pub const EXIT_ABORTED: u8 = 1;
/// Process exit status for invalid input, I/O failures and unsupported requests.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pingpong",
    version,
    about = "Ping-pong protocol simulator and CSS-coset key distribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eve's information versus detection probability for the measure-resend attack.
    Tradeoff(CurveArgs),
    /// I(A:E), I(A:B) and their difference versus detection probability.
    SecurityCurve(CurveArgs),
    /// Detection probability where I(A:B) = I(A:E).
    Threshold(ThresholdArgs),
    /// Simulate a ping-pong session.
    Pingpong(PingpongArgs),
    /// Run CSS-coset key distribution blocks.
    Qkd(QkdArgs),
    /// Inspect and exercise binary linear codes.
    #[command(subcommand)]
    Css(CssCommand),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct PingpongArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long)]
    pub control_prob: Option<f64>,
    /// none | measure:theta=<rad> | entangle:alpha=<rad> | ancilla:beta2=<prob>
    #[arg(long)]
    pub eve: Option<EveStrategy>,
    /// none | bitflip:p=<prob> | phaseflip:p=<prob> | depolarizing:p=<prob>
    #[arg(long)]
    pub noise: Option<NoiseModel>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QkdArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub c1: Option<PathBuf>,
    #[arg(long)]
    pub c2: Option<PathBuf>,
    /// Control positions per block.
    #[arg(long)]
    pub m: Option<usize>,
    /// Decoy positions per block.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub tprime: Option<usize>,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub eve: Option<EveStrategy>,
    #[arg(long)]
    pub noise: Option<NoiseModel>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print and record the distilled keys.
    #[arg(long)]
    pub reveal_keys: bool,
}

#[derive(Debug, Subcommand)]
pub enum CssCommand {
    /// Length, dimension and minimum distance; with two codes, the nested pair.
    Info {
        code: PathBuf,
        subcode: Option<PathBuf>,
    },
    /// Encode a message with the generator matrix.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        message: BinaryWord,
    },
    /// Nearest codeword within the correction radius.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        word: BinaryWord,
    },
    /// Coset key of a codeword of C1 relative to C2.
    Coset {
        #[arg(long)]
        c1: PathBuf,
        #[arg(long)]
        c2: PathBuf,
        #[arg(long)]
        word: BinaryWord,
    },
}

const DEFAULT_ROUNDS: u64 = 100_000;
const DEFAULT_CONTROL_PROB: f64 = 0.5;
const DEFAULT_M: usize = 100;
const DEFAULT_L: usize = 100;
const DEFAULT_BLOCKS: usize = 100;

pub fn read_code(path: &Path) -> Result<BinaryCode> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading code file {}", path.display()))?;
    BinaryCode::parse(&text).with_context(|| format!("in code file {}", path.display()))
}

fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_config(
    path: Option<&PathBuf>,
    keys: &[(&str, config::ValueKind)],
) -> Result<RunConfigFile> {
    match path {
        Some(p) => RunConfigFile::load(p, keys),
        None => Ok(RunConfigFile::default()),
    }
}

pub fn protocol_config(args: &PingpongArgs) -> Result<(ProtocolConfig, Option<PathBuf>)> {
    let file = load_config(args.config.as_ref(), PINGPONG_KEYS)?;
    let config = ProtocolConfig {
        rounds: args
            .rounds
            .or(file.count("rounds"))
            .unwrap_or(DEFAULT_ROUNDS),
        control_prob: args
            .control_prob
            .or(file.real("control-prob"))
            .unwrap_or(DEFAULT_CONTROL_PROB),
        eve: args.eve.or(file.eve("eve")).unwrap_or(EveStrategy::NoEve),
        noise: args
            .noise
            .or(file.noise("noise"))
            .unwrap_or(NoiseModel::None),
        seed: args.seed.or(file.count("seed")).unwrap_or(0),
    };
    config.validate()?;
    Ok((config, args.out.clone().or(file.path("out"))))
}

fn count_to_usize(v: Option<u64>, key: &str) -> Result<Option<usize>> {
    v.map(|x| usize::try_from(x).with_context(|| format!("{key} too large")))
        .transpose()
}

pub fn qkd_config(args: &QkdArgs) -> Result<(QkdConfig, Option<PathBuf>, bool)> {
    let file = load_config(args.config.as_ref(), QKD_KEYS)?;
    let Some(c1_path) = args.c1.clone().or(file.path("c1")) else {
        bail!("missing --c1 code file");
    };
    let Some(c2_path) = args.c2.clone().or(file.path("c2")) else {
        bail!("missing --c2 code file");
    };
    let pair = NestedCodePair::new(read_code(&c1_path)?, read_code(&c2_path)?)?;
    let m = args
        .m
        .or(count_to_usize(file.count("m"), "m")?)
        .unwrap_or(DEFAULT_M);
    let l = args
        .l
        .or(count_to_usize(file.count("l"), "l")?)
        .unwrap_or(DEFAULT_L);
    let blocks = args
        .blocks
        .or(count_to_usize(file.count("blocks"), "blocks")?)
        .unwrap_or(DEFAULT_BLOCKS);
    let eve = args.eve.or(file.eve("eve")).unwrap_or(EveStrategy::NoEve);
    let noise = args
        .noise
        .or(file.noise("noise"))
        .unwrap_or(NoiseModel::None);
    let seed = args.seed.or(file.count("seed")).unwrap_or(0);
    let mut config = QkdConfig::new(pair, m, l, blocks, eve, noise, seed);
    config.t = args
        .t
        .or(count_to_usize(file.count("t"), "t")?)
        .unwrap_or(default_threshold(m));
    config.t_prime = args
        .tprime
        .or(count_to_usize(file.count("tprime"), "tprime")?)
        .unwrap_or(default_threshold(l));
    config.validate()?;
    let reveal = args.reveal_keys || file.flag("reveal-keys").unwrap_or(false);
    Ok((config, args.out.clone().or(file.path("out")), reveal))
}

fn run_pingpong(args: &PingpongArgs) -> Result<u8> {
    let (config, out) = protocol_config(args)?;
    let report = run_session(&config)?;
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&SessionJson::new(&config, &report))?;
        write_artifact(&path, &(json + "\n"))?;
    }
    print!("{}", report::session_summary(&config, &report));
    Ok(0)
}

fn run_qkd(args: &QkdArgs) -> Result<u8> {
    let (config, out, reveal) = qkd_config(args)?;
    let report = run_qkd_session(&config)?;
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&QkdJson::new(&config, &report, reveal))?;
        write_artifact(&path, &(json + "\n"))?;
    }
    print!("{}", report::qkd_summary(&config, &report, reveal));
    Ok(if report.summary.completed == 0 {
        EXIT_ABORTED
    } else {
        0
    })
}

fn check_len(word: &BinaryWord, n: usize) -> Result<()> {
    if word.len() != n {
        bail!("word has length {}, code length is {n}", word.len());
    }
    Ok(())
}

fn run_css(cmd: &CssCommand) -> Result<u8> {
    match cmd {
        CssCommand::Info { code, subcode } => {
            let c1 = read_code(code)?;
            println!("n={} k={} d={}", c1.n(), c1.k(), c1.min_distance()?);
            if let Some(sub) = subcode {
                let c2 = read_code(sub)?;
                println!("n={} k={} d={}", c2.n(), c2.k(), c2.min_distance()?);
                let pair = NestedCodePair::new(c1, c2)?;
                println!("key_length={}", pair.key_length());
            }
        }
        CssCommand::Encode { code, message } => {
            let c = read_code(code)?;
            println!("{}", c.encode(message)?);
        }
        CssCommand::Decode { code, word } => {
            let c = read_code(code)?;
            check_len(word, c.n())?;
            match SyndromeDecoder::new(&c)?.decode(word)? {
                Some(cw) => println!("{cw}"),
                None => println!("decode failure"),
            }
        }
        CssCommand::Coset { c1, c2, word } => {
            let pair = NestedCodePair::new(read_code(c1)?, read_code(c2)?)?;
            check_len(word, pair.n())?;
            println!("{}", pair.coset_key(word)?);
        }
    }
    Ok(0)
}

/// Runs one command and returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Tradeoff(a) => {
            write_artifact(&a.out, &report::tradeoff_csv(a.steps)?)?;
            Ok(0)
        }
        Command::SecurityCurve(a) => {
            write_artifact(&a.out, &report::security_curve_csv(a.steps)?)?;
            Ok(0)
        }
        Command::Threshold(a) => {
            println!("d* = {}", fmt6(detection_threshold(a.tolerance)?));
            Ok(0)
        }
        Command::Pingpong(a) => run_pingpong(&a),
        Command::Qkd(a) => run_qkd(&a),
        Command::Css(c) => run_css(&c),
    }
}
