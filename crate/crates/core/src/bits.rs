//! Outcome bitstrings. Text keys print qubit 0 as the rightmost character,
//! so `"0100"` means qubit 2 read 1.

use crate::error::{Error, Result};

pub fn format_bits(bits: &[u8]) -> String {
    bits.iter().rev().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .rev()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::Parse(format!("bad bitstring {text:?}"))),
        })
        .collect()
}

/// Packs bits into an integer, bit `i` from `bits[i]`.
pub fn pack(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | ((b as u64 & 1) << i))
}

pub fn unpack(value: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((value >> i) & 1) as u8).collect()
}
