//! ToyKeccak: a small sponge hash with an equivalent reversible circuit.
//!
//! The state is `m` bits (4 ≤ m ≤ 16) and the rate equals the width, so a
//! message block is absorbed by XOR over the whole state. Each round of the
//! permutation runs four layers in order, every update seeing earlier ones:
//!
//! 1. χ-like: `h[i] ^= h[i+1] & h[i+2]` for ascending `i` (with `true_chi`,
//!    `h[i] ^= !h[i+1] & h[i+2]`)
//! 2. linear: `h[i] ^= h[i+3]` for ascending `i`
//! 3. rotate left by one: `new[i] = old[i-1]`
//! 4. round constant: `h ^= low m bits of (j+1) * 0x9E3779B9`
//!
//! All indices are mod `m`. Every step is a Toffoli, CNOT, SWAP or X on the
//! hash register, so the in-place circuit needs no service qubits.

use std::fmt;

use crate::circuit::{Circuit, Gate};
use crate::error::{arg_err, Error, Result};
use crate::miner::RegisterLayout;

pub const MIN_WIDTH: u32 = 4;
pub const MAX_WIDTH: u32 = 16;
pub const MAX_ROUNDS: u32 = 8;

const ROUND_CONSTANT_SEED: u64 = 0x9E37_79B9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashParams {
    width: u32,
    rounds: u32,
    true_chi: bool,
}

impl HashParams {
    pub fn new(width: u32, rounds: u32) -> Result<Self> {
        if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
            return arg_err(format!("hash width {width} outside {MIN_WIDTH}..={MAX_WIDTH}"));
        }
        if !(1..=MAX_ROUNDS).contains(&rounds) {
            return arg_err(format!("round count {rounds} outside 1..={MAX_ROUNDS}"));
        }
        Ok(HashParams { width, rounds, true_chi: false })
    }

    /// Switches the χ-like layer to Keccak's `!h[i+1] & h[i+2]`.
    pub fn with_true_chi(mut self, true_chi: bool) -> Self {
        self.true_chi = true_chi;
        self
    }

    /// Digest and block width `m`.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn true_chi(&self) -> bool {
        self.true_chi
    }

    pub fn mask(&self) -> u32 {
        (1u32 << self.width) - 1
    }

    fn check_block(&self, block: u32) -> Result<()> {
        if block & !self.mask() != 0 {
            return arg_err(format!("block {block:#x} wider than {} bits", self.width));
        }
        Ok(())
    }
}

/// An `m`-bit hash value. Bit `i` is hash qubit `i`; bit `m-1` leads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest {
    value: u32,
    width: u32,
}

impl Digest {
    pub fn new(value: u32, width: u32) -> Result<Self> {
        if !(1..=32).contains(&width) || (width < 32 && value >> width != 0) {
            return arg_err(format!("digest {value:#x} does not fit in {width} bits"));
        }
        Ok(Digest { value, width })
    }

    pub fn zero(width: u32) -> Self {
        Digest { value: 0, width }
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn bit(&self, i: u32) -> bool {
        (self.value >> i) & 1 == 1
    }

    /// Number of zero bits counted down from bit `m-1`.
    pub fn leading_zeros(&self) -> u32 {
        (self.value << (32 - self.width)).leading_zeros().min(self.width)
    }

    /// Whether the top `zeros` bits are all clear.
    pub fn meets_difficulty(&self, zeros: u32) -> bool {
        self.leading_zeros() >= zeros
    }

    pub fn to_hex(&self) -> String {
        format!("{:0w$x}", self.value, w = hex_digits(self.width))
    }

    pub fn from_hex(s: &str, width: u32) -> Result<Self> {
        let value = u32::from_str_radix(s, 16).map_err(|e| Error::Argument(format!("bad hex '{s}': {e}")))?;
        Digest::new(value, width)
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

pub(crate) fn hex_digits(width: u32) -> usize {
    width.div_ceil(4) as usize
}

/// Low `m` bits of `(round + 1) * 0x9E3779B9`.
pub fn round_constant(round: u32, width: u32) -> u32 {
    let product = u64::from(round + 1).wrapping_mul(ROUND_CONSTANT_SEED);
    (product & ((1u64 << width) - 1)) as u32
}

/// Applies the `r`-round permutation to an `m`-bit state.
pub fn permute(state: u32, params: &HashParams) -> Result<u32> {
    params.check_block(state)?;
    Ok(permute_unchecked(state, params))
}

fn permute_unchecked(mut h: u32, params: &HashParams) -> u32 {
    let m = params.width;
    let bit = |h: u32, i: u32| (h >> (i % m)) & 1;
    for round in 0..params.rounds {
        for i in 0..m {
            let mut a = bit(h, i + 1);
            if params.true_chi {
                a ^= 1;
            }
            h ^= (a & bit(h, i + 2)) << i;
        }
        for i in 0..m {
            h ^= bit(h, i + 3) << i;
        }
        h = ((h << 1) | (h >> (m - 1))) & params.mask();
        h ^= round_constant(round, m);
    }
    h
}

/// Sponge hash: start from zero, XOR each block in and permute.
pub fn hash_classical(blocks: &[u32], params: &HashParams) -> Result<Digest> {
    if blocks.is_empty() {
        return arg_err("cannot hash an empty message");
    }
    let mut state = 0;
    for &block in blocks {
        params.check_block(block)?;
        state = permute_unchecked(state ^ block, params);
    }
    Ok(Digest { value: state, width: params.width })
}

/// Hash of `header_blocks` followed by `nonce` as the final block.
pub fn hash_with_nonce(header_blocks: &[u32], nonce: u64, params: &HashParams) -> Result<Digest> {
    let nonce = u32::try_from(nonce).map_err(|_| Error::Argument(format!("nonce {nonce} too wide")))?;
    let mut blocks = header_blocks.to_vec();
    blocks.push(nonce);
    hash_classical(&blocks, params)
}

/// Emits the permutation in place on `hash`.
pub fn emit_permutation(circuit: &mut Circuit, hash: &[usize], params: &HashParams) -> Result<()> {
    let m = hash.len();
    if m != params.width as usize {
        return Err(Error::UnsupportedLayout(format!("hash register has {m} qubits, expected {}", params.width)));
    }
    let h = |i: usize| hash[i % m];
    for round in 0..params.rounds {
        for i in 0..m {
            if params.true_chi {
                circuit.push(Gate::X(h(i + 1)))?;
            }
            circuit.push(Gate::ccnot(h(i + 1), h(i + 2), h(i)))?;
            if params.true_chi {
                circuit.push(Gate::X(h(i + 1)))?;
            }
        }
        for i in 0..m {
            circuit.push(Gate::cnot(h(i + 3), h(i)))?;
        }
        circuit.emit_rotate_left(hash, 1)?;
        emit_constant(circuit, hash, round_constant(round, params.width))?;
    }
    Ok(())
}

fn emit_constant(circuit: &mut Circuit, hash: &[usize], value: u32) -> Result<()> {
    for (i, &q) in hash.iter().enumerate() {
        if (value >> i) & 1 == 1 {
            circuit.push(Gate::X(q))?;
        }
    }
    Ok(())
}

fn check_layout(layout: &RegisterLayout, header_blocks: &[u32], params: &HashParams) -> Result<()> {
    let m = params.width as usize;
    if layout.hash().len() != m {
        return Err(Error::UnsupportedLayout(format!(
            "hash register has {} qubits, hash width is {m}",
            layout.hash().len()
        )));
    }
    if layout.nonce().len() > m {
        return Err(Error::UnsupportedLayout(format!(
            "nonce register ({} qubits) does not fit in one {m}-bit block",
            layout.nonce().len()
        )));
    }
    header_blocks.iter().try_for_each(|&b| params.check_block(b))
}

/// Builds the circuit mapping `|v⟩|0^m⟩` to `|v⟩|hash(header ‖ v)⟩` for every
/// nonce `v`. Header blocks are absorbed with X gates, the nonce with CNOTs
/// from the nonce register.
pub fn build_hash_circuit(layout: &RegisterLayout, header_blocks: &[u32], params: &HashParams) -> Result<Circuit> {
    check_layout(layout, header_blocks, params)?;
    let hash = layout.hash();
    let mut circuit = Circuit::new(layout.total_qubits(), "hash");
    for &block in header_blocks {
        emit_constant(&mut circuit, hash, block)?;
        emit_permutation(&mut circuit, hash, params)?;
    }
    for (&n, &h) in layout.nonce().iter().zip(hash) {
        circuit.push(Gate::cnot(n, h))?;
    }
    emit_permutation(&mut circuit, hash, params)?;
    Ok(circuit)
}

/// Same mapping as [`build_hash_circuit`], but each AND of the χ-like layer
/// is first written into its own service qubit, XORed into the hash bit and
/// then uncomputed, leaving the service register at `|0…0⟩`.
///
/// Limited to `m = 4`, one round.
pub fn build_hash_circuit_outofplace(
    layout: &RegisterLayout,
    header_blocks: &[u32],
    params: &HashParams,
) -> Result<Circuit> {
    check_layout(layout, header_blocks, params)?;
    let m = params.width as usize;
    if m > 4 || params.rounds != 1 {
        return Err(Error::UnsupportedLayout(format!(
            "out-of-place hash is limited to m <= 4 and one round (got m={m}, r={})",
            params.rounds
        )));
    }
    if layout.service().len() < m {
        return Err(Error::UnsupportedLayout(format!(
            "out-of-place hash needs {m} service qubits, layout has {}",
            layout.service().len()
        )));
    }
    let hash = layout.hash();
    let service = layout.service();
    let mut circuit = Circuit::new(layout.total_qubits(), "hash-outofplace");
    let permutation = |circuit: &mut Circuit| -> Result<()> {
        let h = |i: usize| hash[i % m];
        for round in 0..params.rounds {
            for (i, &anc) in service.iter().enumerate().take(m) {
                if params.true_chi {
                    circuit.push(Gate::X(h(i + 1)))?;
                }
                circuit.emit_and_into(h(i + 1), h(i + 2), anc)?;
                circuit.push(Gate::cnot(anc, h(i)))?;
                // controls are unchanged by the CNOT, so this clears the ancilla
                circuit.emit_and_into(h(i + 1), h(i + 2), anc)?;
                if params.true_chi {
                    circuit.push(Gate::X(h(i + 1)))?;
                }
            }
            for i in 0..m {
                circuit.push(Gate::cnot(h(i + 3), h(i)))?;
            }
            circuit.emit_rotate_left(hash, 1)?;
            emit_constant(circuit, hash, round_constant(round, params.width))?;
        }
        Ok(())
    };
    for &block in header_blocks {
        emit_constant(&mut circuit, hash, block)?;
        permutation(&mut circuit)?;
    }
    for (&n, &h) in layout.nonce().iter().zip(hash) {
        circuit.push(Gate::cnot(n, h))?;
    }
    permutation(&mut circuit)?;
    Ok(circuit)
}
