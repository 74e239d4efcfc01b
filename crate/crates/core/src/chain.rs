//! Toy proof-of-work chain: header layout, brute-force miner, difficulty
//! derivation, validation and JSON persistence.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::GateStats;
use crate::error::{arg_err, Error, Result};
use crate::miner::{MiningParams, MiningResult};
use crate::toyhash::{self, hex_digits, Digest, HashParams};

pub const CHAIN_FORMAT_VERSION: &str = "qmine-chain/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockHeader {
    pub prev_digest: u32,
    /// Stand-in for a transaction Merkle root.
    pub payload_digest: u32,
    pub timestamp: u64,
    pub difficulty_zeros: u32,
    pub nonce: u64,
}

/// Sponge blocks for a header, nonce excluded:
/// `[prev, payload, timestamp mod 2^m, z]`.
pub fn serialize_header(header: &BlockHeader, params: &HashParams) -> Result<Vec<u32>> {
    let m = params.width();
    let mask = params.mask();
    if header.prev_digest & !mask != 0 || header.payload_digest & !mask != 0 {
        return arg_err(format!("header digests must fit in {m} bits"));
    }
    if header.difficulty_zeros > m {
        return arg_err(format!("difficulty {} exceeds hash width {m}", header.difficulty_zeros));
    }
    Ok(vec![
        header.prev_digest,
        header.payload_digest,
        (header.timestamp & u64::from(mask)) as u32,
        header.difficulty_zeros,
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub header: BlockHeader,
    pub digest: Digest,
}

impl Block {
    /// Hashes the header (nonce as the final block) and caches the digest.
    pub fn seal(header: BlockHeader, params: &HashParams) -> Result<Block> {
        let blocks = serialize_header(&header, params)?;
        let digest = toyhash::hash_with_nonce(&blocks, header.nonce, params)?;
        Ok(Block { header, digest })
    }
}

/// Nonces in `0..2^n` whose digest meets `zeros`, ascending.
pub fn classical_solutions(
    header_blocks: &[u32],
    nonce_bits: u32,
    zeros: u32,
    params: &HashParams,
) -> Result<Vec<u64>> {
    check_nonce_bits(nonce_bits, params)?;
    let mut out = Vec::new();
    for nonce in 0..(1u64 << nonce_bits) {
        if toyhash::hash_with_nonce(header_blocks, nonce, params)?.meets_difficulty(zeros) {
            out.push(nonce);
        }
    }
    Ok(out)
}

fn check_nonce_bits(nonce_bits: u32, params: &HashParams) -> Result<()> {
    if nonce_bits == 0 || nonce_bits > params.width() {
        return Err(Error::UnsupportedLayout(format!(
            "nonce of {nonce_bits} bits must be 1..={} to fit one block",
            params.width()
        )));
    }
    Ok(())
}

/// Tries nonces `0, 1, …` and returns the first that meets the difficulty.
pub fn mine_classical(header_blocks: &[u32], nonce_bits: u32, params: &MiningParams) -> Result<MiningResult> {
    params.validate()?;
    check_nonce_bits(nonce_bits, &params.hash_params)?;
    let mut last = None;
    for nonce in 0..(1u64 << nonce_bits) {
        let digest = toyhash::hash_with_nonce(header_blocks, nonce, &params.hash_params)?;
        let success = digest.meets_difficulty(params.difficulty_zeros);
        last = Some((nonce, digest));
        if success {
            return Ok(classical_result(nonce, digest, true, nonce + 1));
        }
    }
    let (nonce, digest) = last.expect("nonce space is non-empty");
    Ok(classical_result(nonce, digest, false, 1u64 << nonce_bits))
}

fn classical_result(nonce: u64, digest: Digest, success: bool, hashes_tried: u64) -> MiningResult {
    MiningResult {
        nonce,
        digest,
        success,
        grover_iterations_used: 0,
        success_probability_at_measurement: if success { 1.0 } else { 0.0 },
        total_gates: 0,
        gate_stats: GateStats::default(),
        hashes_tried,
    }
}

/// Leading-zero difficulty giving an expected half solution over the nonce
/// space: solve `2^x / 2^(m-n) = 1/2` for the solution exponent `x`, then
/// `z = m - x`.
pub fn compute_required_zeros(nonce_bits: u32, hash_bits: u32) -> Result<u32> {
    if nonce_bits >= hash_bits {
        return arg_err(format!("nonce bits ({nonce_bits}) must be fewer than hash bits ({hash_bits})"));
    }
    let solution_exponent = hash_bits - nonce_bits - 1;
    Ok(hash_bits - solution_exponent)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// A header field does not fit the chain's widths.
    Malformed,
    DigestMismatch,
    InsufficientWork,
    PrevLink,
}

impl InvalidReason {
    pub fn code(&self) -> &'static str {
        match self {
            InvalidReason::Malformed => "malformed",
            InvalidReason::DigestMismatch => "digest-mismatch",
            InvalidReason::InsufficientWork => "insufficient-work",
            InvalidReason::PrevLink => "prev-link",
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Validation outcome: the failing block indices with reasons.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    pub failures: Vec<(usize, InvalidReason)>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn reasons(&self) -> Vec<InvalidReason> {
        self.failures.iter().map(|(_, r)| *r).collect()
    }
}

/// Chain-wide parameters every block is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainParams {
    pub hash_params: HashParams,
    pub nonce_bits: u32,
}

fn block_failures(block: &Block, params: &ChainParams) -> Vec<InvalidReason> {
    let header = &block.header;
    if header.nonce >> params.nonce_bits != 0 || block.digest.width() != params.hash_params.width() {
        return vec![InvalidReason::Malformed];
    }
    let Ok(blocks) = serialize_header(header, &params.hash_params) else {
        return vec![InvalidReason::Malformed];
    };
    let Ok(recomputed) = toyhash::hash_with_nonce(&blocks, header.nonce, &params.hash_params) else {
        return vec![InvalidReason::Malformed];
    };
    let mut reasons = Vec::new();
    if recomputed != block.digest {
        reasons.push(InvalidReason::DigestMismatch);
    }
    if !block.digest.meets_difficulty(header.difficulty_zeros) {
        reasons.push(InvalidReason::InsufficientWork);
    }
    reasons
}

/// Valid iff the cached digest matches the recomputed one and meets the
/// header's difficulty.
pub fn validate_block(block: &Block, params: &ChainParams) -> Validation {
    Validation { failures: block_failures(block, params).into_iter().map(|r| (0, r)).collect() }
}

/// Every block valid, and each links to its predecessor's digest (genesis
/// links to zero).
pub fn validate_chain(blocks: &[Block], params: &ChainParams) -> Validation {
    let mut failures = Vec::new();
    let mut prev = 0u32;
    for (i, block) in blocks.iter().enumerate() {
        failures.extend(block_failures(block, params).into_iter().map(|r| (i, r)));
        if block.header.prev_digest != prev {
            failures.push((i, InvalidReason::PrevLink));
        }
        prev = block.digest.value();
    }
    Validation { failures }
}

/// An append-only chain with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub params: ChainParams,
    pub blocks: Vec<Block>,
}

impl Chain {
    pub fn new(params: ChainParams) -> Self {
        Chain { params, blocks: Vec::new() }
    }

    /// Digest the next block must link to.
    pub fn tip(&self) -> u32 {
        self.blocks.last().map_or(0, |b| b.digest.value())
    }

    pub fn push(&mut self, block: Block) {
        self.blocks.push(block);
    }

    pub fn validate(&self) -> Validation {
        validate_chain(&self.blocks, &self.params)
    }

    pub fn to_json(&self) -> String {
        let w = hex_digits(self.params.hash_params.width());
        let file = ChainFile {
            version: CHAIN_FORMAT_VERSION.to_string(),
            hash_width: self.params.hash_params.width(),
            rounds: self.params.hash_params.rounds(),
            true_chi: self.params.hash_params.true_chi(),
            nonce_bits: self.params.nonce_bits,
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockRecord {
                    prev_digest: format!("{:0w$x}", b.header.prev_digest),
                    payload_digest: format!("{:0w$x}", b.header.payload_digest),
                    timestamp: format!("{:x}", b.header.timestamp),
                    difficulty_zeros: b.header.difficulty_zeros,
                    nonce: format!("{:x}", b.header.nonce),
                    digest: b.digest.to_hex(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("chain file serialises")
    }

    pub fn from_json(text: &str) -> Result<Chain> {
        let file: ChainFile =
            serde_json::from_str(text).map_err(|e| Error::Argument(format!("malformed chain file: {e}")))?;
        if file.version != CHAIN_FORMAT_VERSION {
            return arg_err(format!("unsupported chain format '{}'", file.version));
        }
        let hash_params = HashParams::new(file.hash_width, file.rounds)?.with_true_chi(file.true_chi);
        let params = ChainParams { hash_params, nonce_bits: file.nonce_bits };
        let m = hash_params.width();
        let blocks = file
            .blocks
            .iter()
            .map(|r| {
                Ok(Block {
                    header: BlockHeader {
                        prev_digest: parse_hex(&r.prev_digest)? as u32,
                        payload_digest: parse_hex(&r.payload_digest)? as u32,
                        timestamp: parse_hex(&r.timestamp)?,
                        difficulty_zeros: r.difficulty_zeros,
                        nonce: parse_hex(&r.nonce)?,
                    },
                    digest: Digest::from_hex(&r.digest, m)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Chain { params, blocks })
    }

    pub fn load(path: &Path) -> Result<Chain> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
        Chain::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Argument(format!("cannot write {}: {e}", path.display())))
    }
}

fn parse_hex(s: &str) -> Result<u64> {
    u64::from_str_radix(s, 16).map_err(|e| Error::Argument(format!("bad hex field '{s}': {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
struct ChainFile {
    version: String,
    hash_width: u32,
    rounds: u32,
    true_chi: bool,
    nonce_bits: u32,
    blocks: Vec<BlockRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BlockRecord {
    prev_digest: String,
    payload_digest: String,
    timestamp: String,
    difficulty_zeros: u32,
    nonce: String,
    digest: String,
}
