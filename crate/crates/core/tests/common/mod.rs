#![allow(dead_code)]

use qmine::chain::{classical_solutions, serialize_header, BlockHeader};
use qmine::toyhash::HashParams;

/// Reference sponge on explicit bit vectors, written independently of the
/// library's packed-integer implementation.
pub mod reference {
    pub fn permute(bits: &mut [bool], rounds: u32, true_chi: bool) {
        let m = bits.len();
        for j in 0..rounds {
            for i in 0..m {
                let a = bits[(i + 1) % m] != true_chi;
                let b = bits[(i + 2) % m];
                bits[i] ^= a && b;
            }
            for i in 0..m {
                let c = bits[(i + 3) % m];
                bits[i] ^= c;
            }
            let old = bits.to_vec();
            for i in 0..m {
                bits[i] = old[(i + m - 1) % m];
            }
            let rc = (u64::from(j) + 1) * 2_654_435_769;
            for (i, bit) in bits.iter_mut().enumerate() {
                *bit ^= (rc >> i) & 1 == 1;
            }
        }
    }

    pub fn hash(blocks: &[u64], m: usize, rounds: u32, true_chi: bool) -> u64 {
        let mut state = vec![false; m];
        for &block in blocks {
            for (i, bit) in state.iter_mut().enumerate() {
                *bit ^= (block >> i) & 1 == 1;
            }
            permute(&mut state, rounds, true_chi);
        }
        state.iter().enumerate().map(|(i, &b)| u64::from(b) << i).sum()
    }
}

pub fn header(timestamp: u64, zeros: u32, params: &HashParams) -> Vec<u32> {
    let h = BlockHeader {
        prev_digest: 0,
        payload_digest: 0x5A & params.mask(),
        timestamp,
        difficulty_zeros: zeros,
        nonce: 0,
    };
    serialize_header(&h, params).unwrap()
}

/// First (timestamp-ordered) header whose solution set at `zeros` satisfies
/// `accept`, found by exhaustive classical search.
pub fn find_header(
    nonce_bits: u32,
    zeros: u32,
    params: &HashParams,
    accept: impl Fn(&[u64]) -> bool,
) -> Option<(Vec<u32>, Vec<u64>)> {
    // the timestamp block keeps only the low m bits
    (0..1u64 << params.width()).find_map(|ts| {
        let blocks = header(ts, zeros, params);
        let sols = classical_solutions(&blocks, nonce_bits, zeros, params).unwrap();
        accept(&sols).then_some((blocks, sols))
    })
}

/// A header and difficulty with exactly `count` solutions among `2^n` nonces.
pub fn header_with_solution_count(nonce_bits: u32, count: usize, params: &HashParams) -> (Vec<u32>, u32, Vec<u64>) {
    for zeros in (0..=params.width()).rev() {
        if let Some((blocks, sols)) = find_header(nonce_bits, zeros, params, |s| s.len() == count) {
            return (blocks, zeros, sols);
        }
    }
    panic!("no header with {count} solutions at n={nonce_bits}");
}
