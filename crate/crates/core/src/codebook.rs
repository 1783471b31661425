//! Shortest-first canonical codebook for the full variable-length recoding.
//!
//! Pait value `i` maps to the `i`-th code in (length, value) order: all `p`
//! codes of length 1, then all `p^2` of length 2, and so on, with the last
//! length level only partially used. The map is closed-form, so lookups need
//! no tables and the book costs `O(n)` memory.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pit::{Radix, Width};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeBook {
    radix: Radix,
    width: Width,
    /// `counts[L - 1]` codes of length `L` are in use.
    counts: Vec<u64>,
    /// First pait value assigned a code of length `L`, at index `L - 1`.
    offsets: Vec<u64>,
}

impl CodeBook {
    /// Greedy fill of `p^n` elements into code lengths `1, 2, ...`.
    ///
    /// Fails with [`Error::CapacityExceeded`] when `p^n` does not fit in a `u64`.
    pub fn build(radix: Radix, width: Width) -> Result<Self> {
        let n = width.get();
        let mut remaining = radix.checked_pow(n).ok_or(Error::CapacityExceeded {
            radix: radix.get(),
            width: n,
            cap: u64::MAX,
        })?;
        let mut counts = Vec::new();
        let mut offsets = Vec::new();
        let mut offset = 0u64;
        let mut level = 1u64;
        while remaining > 0 {
            // p^L <= p^n for every level reached, so this never overflows.
            level *= radix.get() as u64;
            let used = level.min(remaining);
            counts.push(used);
            offsets.push(offset);
            offset += used;
            remaining -= used;
        }
        debug_assert!(counts.len() <= n);
        Ok(CodeBook {
            radix,
            width,
            counts,
            offsets,
        })
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// Longest code length in use.
    pub fn max_len(&self) -> usize {
        self.counts.len()
    }

    /// Number of codes in use per length.
    pub fn histogram(&self) -> BTreeMap<usize, u64> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i + 1, c))
            .collect()
    }

    /// Total remainder pits for one pass over the whole alphabet.
    pub fn total_code_pits(&self) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u128 + 1) * c as u128)
            .sum()
    }

    /// `(code length, code value)` for pait value `value`.
    pub fn forward(&self, value: u64) -> Option<(usize, u64)> {
        let level = self.offsets.partition_point(|&o| o <= value);
        let idx = level.checked_sub(1)?;
        let code = value - self.offsets[idx];
        (code < self.counts[idx]).then_some((idx + 1, code))
    }

    /// Pait value for a `(length, code value)` pair, if the pair is in use.
    pub fn inverse(&self, len: usize, code: u64) -> Option<u64> {
        let idx = len.checked_sub(1)?;
        let count = *self.counts.get(idx)?;
        (code < count).then(|| self.offsets[idx] + code)
    }

    /// Rows `(pait value, length, code value)` in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (u64, usize, u64)> + '_ {
        self.counts.iter().enumerate().flat_map(move |(i, &c)| {
            let base = self.offsets[i];
            (0..c).map(move |code| (base + code, i + 1, code))
        })
    }
}
