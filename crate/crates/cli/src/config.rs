//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qmine::chain::compute_required_zeros;
use qmine::statevector::DEFAULT_QUBIT_CAP;
use qmine::toyhash::HashParams;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Quantum,
    Both,
}

/// Difficulty as given in a config file: a count or the word `"auto"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ZerosField {
    Count(u32),
    Word(String),
}

/// Mirror of the flags, every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<u32>,
    m: Option<u32>,
    rounds: Option<u32>,
    zeros: Option<ZerosField>,
    true_chi: Option<bool>,
    seed: Option<u64>,
    mode: Option<Mode>,
    exact: Option<bool>,
    prev: Option<String>,
    payload: Option<String>,
    timestamp: Option<u64>,
    solutions: Option<u64>,
    hint: Option<bool>,
    max_grover_rounds: Option<u64>,
    qubit_cap: Option<usize>,
    chain_file: Option<PathBuf>,
    csv_out: Option<PathBuf>,
}

/// Flags shared by `mine` and `sweep`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Nonce width in bits
    #[arg(long)]
    pub n: Option<u32>,
    /// Hash width in bits
    #[arg(long)]
    pub m: Option<u32>,
    /// Permutation rounds
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Required leading zero bits of the digest
    #[arg(long, conflicts_with = "auto_zeros")]
    pub zeros: Option<u32>,
    /// Derive the difficulty from n and m
    #[arg(long)]
    pub auto_zeros: bool,
    /// Use the negated-input chi step
    #[arg(long)]
    pub true_chi: bool,
    /// Measurement RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Read out the most probable nonce instead of sampling
    #[arg(long)]
    pub exact: bool,
    /// Previous block digest in hex (defaults to the chain tip, else 0)
    #[arg(long, value_name = "HEX")]
    pub prev: Option<String>,
    /// Payload digest in hex
    #[arg(long, value_name = "HEX")]
    pub payload: Option<String>,
    #[arg(long)]
    pub timestamp: Option<u64>,
    /// Scan timestamps upward from --timestamp until the header has exactly
    /// this many solutions
    #[arg(long, value_name = "M")]
    pub solutions: Option<u64>,
    /// Give the quantum miner the true solution count
    #[arg(long)]
    pub hint: bool,
    /// Cap on the unknown-count schedule, in units of ⌈π/4·√2^n⌉ iterations
    #[arg(long)]
    pub max_grover_rounds: Option<u64>,
    #[arg(long)]
    pub qubit_cap: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub chain_file: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zeros {
    Fixed(u32),
    Auto,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: u32,
    pub hash_params: HashParams,
    pub zeros: u32,
    pub seed: u64,
    pub mode: Mode,
    pub exact: bool,
    pub prev: Option<u32>,
    pub payload: u32,
    pub timestamp: u64,
    pub solutions: Option<u64>,
    pub hint: bool,
    pub max_grover_rounds: u64,
    pub qubit_cap: usize,
    pub chain_file: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn parse_hex(field: &str, s: &str) -> Result<u32, String> {
    let digits = s.trim_start_matches("0x");
    u32::from_str_radix(digits, 16).map_err(|e| format!("--{field} '{s}': {e}"))
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, String> {
        let file = match &self.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let n = self.n.or(file.n).unwrap_or(4);
        let m = self.m.or(file.m).unwrap_or(8);
        let rounds = self.rounds.or(file.rounds).unwrap_or(2);
        let true_chi = self.true_chi || file.true_chi.unwrap_or(false);
        let hash_params = HashParams::new(m, rounds).map_err(|e| e.to_string())?.with_true_chi(true_chi);
        if n == 0 || n > m {
            return Err(format!("nonce width {n} must be in 1..={m} (the hash width)"));
        }

        let zeros = match (self.zeros, self.auto_zeros, &file.zeros) {
            (Some(z), _, _) => Zeros::Fixed(z),
            (None, true, _) => Zeros::Auto,
            (None, false, Some(ZerosField::Count(z))) => Zeros::Fixed(*z),
            (None, false, Some(ZerosField::Word(w))) if w == "auto" => Zeros::Auto,
            (None, false, Some(ZerosField::Word(w))) => {
                return Err(format!("config zeros '{w}' is not a count or \"auto\""))
            }
            (None, false, None) => Zeros::Auto,
        };
        let zeros = match zeros {
            Zeros::Fixed(z) if z > m => return Err(format!("difficulty {z} exceeds hash width {m}")),
            Zeros::Fixed(z) => z,
            // n = m leaves no room for the formula; demand every bit
            Zeros::Auto => compute_required_zeros(n, m).unwrap_or(m).min(m),
        };

        let prev = match self.prev.as_ref().or(file.prev.as_ref()) {
            Some(s) => Some(parse_hex("prev", s)?),
            None => None,
        };
        let payload = match self.payload.as_ref().or(file.payload.as_ref()) {
            Some(s) => parse_hex("payload", s)?,
            None => 0,
        };
        for (name, v) in [("prev", prev.unwrap_or(0)), ("payload", payload)] {
            if v & !hash_params.mask() != 0 {
                return Err(format!("--{name} {v:x} does not fit in {m} bits"));
            }
        }
        let solutions = self.solutions.or(file.solutions);
        if solutions == Some(0) {
            return Err("--solutions must be positive".into());
        }

        Ok(RunConfig {
            n,
            hash_params,
            zeros,
            seed: self.seed.or(file.seed).unwrap_or(0),
            mode: self.mode.or(file.mode).unwrap_or(Mode::Quantum),
            exact: self.exact || file.exact.unwrap_or(false),
            prev,
            payload,
            timestamp: self.timestamp.or(file.timestamp).unwrap_or(0),
            solutions,
            hint: self.hint || file.hint.unwrap_or(false),
            max_grover_rounds: self.max_grover_rounds.or(file.max_grover_rounds).unwrap_or(4),
            qubit_cap: self.qubit_cap.or(file.qubit_cap).unwrap_or(DEFAULT_QUBIT_CAP),
            chain_file: self.chain_file.clone().or(file.chain_file),
            csv_out: self.csv_out.clone().or(file.csv_out),
        })
    }
}
