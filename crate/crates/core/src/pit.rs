//! Radix-p digits ("pits"), fixed-width words ("paits") and flat pit streams.
//!
//! A pit is stored as a `u16`, which bounds the radix at 65535. Words are
//! most-significant pit first throughout the crate.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// One radix-p digit.
pub type Pit = u16;

/// Default bound on `p^n` for operations that enumerate a whole alphabet.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

pub const MAX_WIDTH: usize = 4096;

/// Number of values a single pit can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radix(u16);

impl Radix {
    pub const BINARY: Radix = Radix(2);

    pub fn new(p: u64) -> Result<Self> {
        if (2..=u16::MAX as u64).contains(&p) {
            Ok(Radix(p as u16))
        } else {
            Err(Error::InvalidRadix(p))
        }
    }

    pub fn get(self) -> u16 {
        self.0
    }

    /// Bits used per pit when packing: `ceil(log2 p)`.
    pub fn bits_per_pit(self) -> u32 {
        u16::BITS - (self.0 - 1).leading_zeros()
    }

    /// `p^k` if it fits in a `u64`.
    pub fn checked_pow(self, k: usize) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..k {
            acc = acc.checked_mul(self.0 as u64)?;
        }
        Some(acc)
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Pits per pait.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Width(u16);

impl Width {
    pub fn new(n: u64) -> Result<Self> {
        if (1..=MAX_WIDTH as u64).contains(&n) {
            Ok(Width(n as u16))
        } else {
            Err(Error::InvalidWidth(n))
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Pits remaining after dropping leading zeros, never less than one.
pub(crate) fn significant_len(word: &[Pit]) -> usize {
    let zeros = word.iter().take_while(|&&d| d == 0).count();
    (word.len() - zeros).max(1)
}

/// Numeric value of a most-significant-first digit slice, if it fits in `u64`.
pub(crate) fn digits_to_u64(digits: &[Pit], radix: Radix) -> Option<u64> {
    digits.iter().try_fold(0u64, |acc, &d| {
        acc.checked_mul(radix.get() as u64)?.checked_add(d as u64)
    })
}

/// Writes `value` into `out` as base-p digits, most significant first.
/// The caller guarantees `value < p^out.len()`.
pub(crate) fn u64_to_digits(mut value: u64, radix: Radix, out: &mut [Pit]) {
    let p = radix.get() as u64;
    for slot in out.iter_mut().rev() {
        *slot = (value % p) as Pit;
        value /= p;
    }
    debug_assert_eq!(value, 0);
}

/// A fixed-width word of `n` pits, one element of the alphabet `A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pait {
    radix: Radix,
    digits: Vec<Pit>,
}

impl Pait {
    pub fn new(radix: Radix, digits: Vec<Pit>) -> Result<Self> {
        Width::new(digits.len() as u64)?;
        check_pits(&digits, radix)?;
        Ok(Pait { radix, digits })
    }

    /// Base-p expansion of `value` in exactly `width` pits.
    pub fn from_value(value: u64, radix: Radix, width: Width) -> Result<Self> {
        let n = width.get();
        if let Some(size) = radix.checked_pow(n) {
            if value >= size {
                return Err(Error::ValueOutOfRange {
                    value,
                    radix: radix.get(),
                    width: n,
                });
            }
        }
        let mut digits = vec![0; n];
        u64_to_digits(value, radix, &mut digits);
        Ok(Pait { radix, digits })
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn width(&self) -> Width {
        Width(self.digits.len() as u16)
    }

    pub fn digits(&self) -> &[Pit] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<Pit> {
        self.digits
    }

    /// Exact numeric value, for any width.
    pub fn value(&self) -> BigUint {
        let p = BigUint::from(self.radix.get());
        self.digits
            .iter()
            .fold(BigUint::default(), |acc, &d| acc * &p + BigUint::from(d))
    }

    /// Numeric value when it fits in a `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        digits_to_u64(&self.digits, self.radix)
    }

    /// `n` minus the leading zero count; the all-zero pait keeps one pit.
    pub fn significant_length(&self) -> usize {
        significant_len(&self.digits)
    }
}

/// A flat, exact-length sequence of pits sharing one radix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PitStream {
    radix: Radix,
    pits: Vec<Pit>,
}

impl PitStream {
    pub fn new(radix: Radix, pits: Vec<Pit>) -> Result<Self> {
        check_pits(&pits, radix)?;
        Ok(PitStream { radix, pits })
    }

    pub fn empty(radix: Radix) -> Self {
        PitStream {
            radix,
            pits: Vec::new(),
        }
    }

    /// Caller guarantees every pit is below the radix.
    pub(crate) fn from_raw(radix: Radix, pits: Vec<Pit>) -> Self {
        debug_assert!(pits.iter().all(|&d| d < radix.get()));
        PitStream { radix, pits }
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn len(&self) -> usize {
        self.pits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pits.is_empty()
    }

    pub fn pits(&self) -> &[Pit] {
        &self.pits
    }

    pub fn into_pits(self) -> Vec<Pit> {
        self.pits
    }

    /// Number of pits equal to `value`.
    pub fn count_of(&self, value: Pit) -> usize {
        self.pits.iter().filter(|&&d| d == value).count()
    }
}

fn check_pits(pits: &[Pit], radix: Radix) -> Result<()> {
    match pits.iter().position(|&d| d >= radix.get()) {
        Some(position) => Err(Error::PitOutOfRange {
            value: pits[position],
            radix: radix.get(),
            position,
        }),
        None => Ok(()),
    }
}

/// Every element of `A_n` once, in ascending numeric order.
pub fn main_file(radix: Radix, width: Width) -> Result<Vec<Pait>> {
    main_file_with_cap(radix, width, DEFAULT_ENUMERATION_CAP)
}

pub fn main_file_with_cap(radix: Radix, width: Width, cap: u64) -> Result<Vec<Pait>> {
    let size = alphabet_size(radix, width, cap)?;
    (0..size)
        .map(|v| Pait::from_value(v, radix, width))
        .collect()
}

/// The main file flattened into one stream of `n * p^n` pits.
pub fn main_file_stream(radix: Radix, width: Width) -> Result<PitStream> {
    let size = alphabet_size(radix, width, DEFAULT_ENUMERATION_CAP)?;
    let n = width.get();
    let mut pits = vec![0; size as usize * n];
    for (v, word) in pits.chunks_exact_mut(n).enumerate() {
        u64_to_digits(v as u64, radix, word);
    }
    Ok(PitStream::from_raw(radix, pits))
}

fn alphabet_size(radix: Radix, width: Width, cap: u64) -> Result<u64> {
    radix
        .checked_pow(width.get())
        .filter(|&size| size <= cap)
        .ok_or(Error::CapacityExceeded {
            radix: radix.get(),
            width: width.get(),
            cap,
        })
}

/// Zero-pads `stream` to a multiple of `n` and splits it into paits.
/// Returns the paits and the number of pad pits appended.
pub fn block_into_paits(stream: &PitStream, width: Width) -> (Vec<Pait>, usize) {
    let n = width.get();
    let pad = pad_for(stream.len(), n);
    let mut pits = stream.pits.clone();
    pits.resize(pits.len() + pad, 0);
    let paits = pits
        .chunks_exact(n)
        .map(|c| Pait {
            radix: stream.radix,
            digits: c.to_vec(),
        })
        .collect();
    (paits, pad)
}

pub(crate) fn pad_for(len: usize, n: usize) -> usize {
    (n - len % n) % n
}

/// Concatenates paits back into one stream. All paits must share `radix`.
pub fn flatten(radix: Radix, paits: &[Pait]) -> Result<PitStream> {
    let mut pits = Vec::with_capacity(paits.iter().map(|x| x.digits.len()).sum());
    for x in paits {
        if x.radix != radix {
            return Err(Error::Contract(format!(
                "pait of radix {} in a radix-{} stream",
                x.radix, radix
            )));
        }
        pits.extend_from_slice(&x.digits);
    }
    Ok(PitStream::from_raw(radix, pits))
}

/// Packs pits at `ceil(log2 p)` bits each, MSB first, zero-padding the last byte.
pub fn pack_pits(stream: &PitStream) -> Vec<u8> {
    let bits = stream.radix.bits_per_pit();
    let total_bits = stream.len() as u64 * bits as u64;
    let mut out = Vec::with_capacity(total_bits.div_ceil(8) as usize);
    let mut acc: u32 = 0;
    let mut filled: u32 = 0;
    for &d in &stream.pits {
        acc = (acc << bits) | d as u32;
        filled += bits;
        while filled >= 8 {
            filled -= 8;
            out.push((acc >> filled) as u8);
        }
        acc &= (1 << filled) - 1;
    }
    if filled > 0 {
        out.push((acc << (8 - filled)) as u8);
    }
    out
}

/// Bytes occupied by `count` packed pits of the given radix.
pub fn packed_len(count: u64, radix: Radix) -> Option<u64> {
    count
        .checked_mul(radix.bits_per_pit() as u64)
        .map(|b| b.div_ceil(8))
}

/// Inverse of [`pack_pits`]; bytes beyond `count` pits are ignored.
pub fn unpack_pits(bytes: &[u8], count: usize, radix: Radix) -> Result<PitStream> {
    let bits = radix.bits_per_pit();
    let needed = count as u64 * bits as u64;
    let available = bytes.len() as u64 * 8;
    if needed > available {
        return Err(Error::Underrun { needed, available });
    }
    let mask = (1u32 << bits) - 1;
    let mut pits = Vec::with_capacity(count);
    let mut acc: u32 = 0;
    let mut filled: u32 = 0;
    let mut next = bytes.iter();
    for position in 0..count {
        while filled < bits {
            // `needed <= available` keeps the iterator from running dry.
            acc = (acc << 8) | *next.next().unwrap_or(&0) as u32;
            filled += 8;
        }
        filled -= bits;
        let d = ((acc >> filled) & mask) as Pit;
        acc &= (1 << filled) - 1;
        if d >= radix.get() {
            return Err(Error::Corrupt {
                stream: "packed",
                detail: format!("pit {d} at position {position} exceeds radix {radix}"),
            });
        }
        pits.push(d);
    }
    Ok(PitStream { radix, pits })
}
