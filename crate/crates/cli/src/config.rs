//! Argument parsing, input resolution and the config hash.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gridiv::coloring::Algorithm;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gridiv", version, about = "Security-mechanism diversity for power grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// More log output on stderr (-v, -vv).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Impact factors and HIS/LIS classes.
    Impact(RunArgs),
    /// Run coloring algorithms and summarize sigma.
    Color(RunArgs),
    /// Replay the attack scenario against each algorithm's coloring.
    Attack(RunArgs),
    /// Side-by-side comparison of the algorithms.
    Compare(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Impact(_) => "impact",
            Command::Color(_) => "color",
            Command::Attack(_) => "attack",
            Command::Compare(_) => "compare",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Impact(a) | Command::Color(a) | Command::Attack(a) | Command::Compare(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Directory holding the default input files.
    #[arg(long, env = "GRIDIV_DATA")]
    pub data_dir: Option<PathBuf>,
    /// Bus system in IEEE common data format.
    #[arg(long)]
    pub cdf: Option<PathBuf>,
    /// Substation to bus map (JSON or CSV).
    #[arg(long)]
    pub submap: Option<PathBuf>,
    /// Impact data CSV (gamma or loading-level layout).
    #[arg(long)]
    pub impact: Option<PathBuf>,
    #[arg(long)]
    pub template: Option<PathBuf>,
    #[arg(long)]
    pub palette: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Substations with gamma above this are HIS.
    #[arg(long, default_value_t = 0.25)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per stochastic algorithm.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    #[arg(long, value_delimiter = ',', default_value = "game,greedy,sequential,random")]
    pub algos: Vec<Algorithm>,
    /// Output directory; nothing is written when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Total system load (MW) for loading-level impact data.
    #[arg(long)]
    pub p_total: Option<f64>,
    /// Also write DOT files.
    #[arg(long)]
    pub dot: bool,
    /// Worker threads for repeat runs.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Length of the security-index ranking.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

/// An input file and its contents.
#[derive(Debug, Clone)]
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Ok(Self { path: path.to_path_buf(), text })
    }
}

/// Input texts, each optional until a command needs it.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub cdf: Option<Source>,
    pub submap: Option<Source>,
    pub impact: Option<Source>,
    pub template: Option<Source>,
    pub palette: Option<Source>,
    pub scenario: Option<Source>,
}

fn first_match(dir: &Path, pred: impl Fn(&str) -> bool) -> Option<PathBuf> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| pred(n))
        .collect();
    names.sort();
    names.first().map(|n| dir.join(n))
}

impl Inputs {
    /// Explicit flags win; otherwise look for conventional names in the data directory.
    pub fn resolve(args: &RunArgs) -> CliResult<Self> {
        let dir = args.data_dir.as_deref();
        if let Some(d) = dir {
            if !d.is_dir() {
                return Err(CliError::Input(format!("data directory {} does not exist", d.display())));
            }
        }
        let pick = |flag: &Option<PathBuf>, pred: &dyn Fn(&str) -> bool| -> CliResult<Option<Source>> {
            match (flag, dir) {
                (Some(p), _) => Source::read(p).map(Some),
                (None, Some(d)) => first_match(d, pred).map(|p| Source::read(&p)).transpose(),
                (None, None) => Ok(None),
            }
        };
        Ok(Self {
            cdf: pick(&args.cdf, &|n| n.ends_with(".cdf"))?,
            submap: pick(&args.submap, &|n| n == "substations.json" || n == "substations.csv")?,
            impact: pick(&args.impact, &|n| n.starts_with("impact") && n.ends_with(".csv"))?,
            template: pick(&args.template, &|n| n == "template.json")?,
            palette: pick(&args.palette, &|n| n == "palette.json")?,
            scenario: pick(&args.scenario, &|n| n == "scenario.json")?,
        })
    }

    pub fn require<'a>(src: &'a Option<Source>, what: &str) -> CliResult<&'a Source> {
        src.as_ref()
            .ok_or_else(|| CliError::Input(format!("no {what} given (use --{what} or --data-dir)")))
    }

    fn digests(&self) -> BTreeMap<&'static str, String> {
        [
            ("cdf", &self.cdf),
            ("submap", &self.submap),
            ("impact", &self.impact),
            ("template", &self.template),
            ("palette", &self.palette),
            ("scenario", &self.scenario),
        ]
        .into_iter()
        .filter_map(|(k, s)| s.as_ref().map(|s| (k, hex::encode(Sha256::digest(s.text.as_bytes())))))
        .collect()
    }
}

#[derive(Serialize)]
struct HashedConfig<'a> {
    command: &'a str,
    threshold: f64,
    seed: u64,
    repeat: u32,
    algos: &'a [Algorithm],
    p_total: Option<f64>,
    top: usize,
    files: BTreeMap<&'static str, String>,
}

/// SHA-256 over the parameters that shape the output and the contents of every input file.
pub fn config_hash(command: &str, args: &RunArgs, inputs: &Inputs) -> String {
    let cfg = HashedConfig {
        command,
        threshold: args.threshold,
        seed: args.seed,
        repeat: args.repeat,
        algos: &args.algos,
        p_total: args.p_total,
        top: args.top,
        files: inputs.digests(),
    };
    let json = serde_json::to_vec(&cfg).expect("config serializes");
    hex::encode(Sha256::digest(json))
}
