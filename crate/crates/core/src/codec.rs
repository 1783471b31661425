//! The three recoding clones.
//!
//! Every clone turns each `n`-pit word into a variable-length code in the
//! remainder stream plus a unary length record in `flag_len` (`z` marker
//! pits of value 0, then a terminator pit of value 1). Clone 2 also moves
//! each word's most significant pit into `flag_msb`. Every word contributes
//! exactly `n + 1` pits across the streams.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codebook::CodeBook;
use crate::error::{Error, Result};
use crate::pit::{self, Pait, Pit, PitStream, Radix, Width};

const MARKER: Pit = 0;
const TERMINATOR: Pit = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum CloneId {
    /// Strip leading zeros.
    LeadingZeros = 1,
    /// Split off the most significant pit, then strip the low word.
    MsbSplit = 2,
    /// Shortest-first canonical codebook.
    Codebook = 3,
}

impl CloneId {
    pub const ALL: [CloneId; 3] = [CloneId::LeadingZeros, CloneId::MsbSplit, CloneId::Codebook];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn min_width(self) -> usize {
        match self {
            CloneId::MsbSplit => 2,
            _ => 1,
        }
    }
}

impl TryFrom<u8> for CloneId {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(CloneId::LeadingZeros),
            2 => Ok(CloneId::MsbSplit),
            3 => Ok(CloneId::Codebook),
            other => Err(Error::InvalidParams(format!("unknown clone {other}"))),
        }
    }
}

impl From<CloneId> for u8 {
    fn from(c: CloneId) -> u8 {
        c.number()
    }
}

impl fmt::Display for CloneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clone {}", self.number())
    }
}

/// Secondary streams produced by one recoding pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondaryBundle {
    pub remainder: PitStream,
    pub flag_len: PitStream,
    /// Present only for clone 2.
    pub flag_msb: Option<PitStream>,
    pub pait_count: usize,
    pub radix: Radix,
    pub width: Width,
    pub clone_id: CloneId,
}

impl SecondaryBundle {
    pub fn flag_pits(&self) -> usize {
        self.flag_len.len() + self.flag_msb.as_ref().map_or(0, PitStream::len)
    }

    pub fn total_pits(&self) -> usize {
        self.remainder.len() + self.flag_pits()
    }
}

#[derive(Clone, Debug)]
enum Scheme {
    LeadingZeros,
    MsbSplit,
    Codebook(CodeBook),
}

/// A configured clone for one `(p, n)`; reusable across any number of passes.
#[derive(Clone, Debug)]
pub struct Codec {
    radix: Radix,
    width: Width,
    scheme: Scheme,
}

impl Codec {
    pub fn new(clone_id: CloneId, radix: Radix, width: Width) -> Result<Self> {
        let scheme = match clone_id {
            CloneId::LeadingZeros => Scheme::LeadingZeros,
            CloneId::MsbSplit => {
                if width.get() < 2 {
                    return Err(Error::UnsupportedWidth {
                        clone: 2,
                        width: width.get(),
                    });
                }
                Scheme::MsbSplit
            }
            CloneId::Codebook => Scheme::Codebook(CodeBook::build(radix, width)?),
        };
        Ok(Codec {
            radix,
            width,
            scheme,
        })
    }

    pub fn with_codebook(book: CodeBook) -> Self {
        Codec {
            radix: book.radix(),
            width: book.width(),
            scheme: Scheme::Codebook(book),
        }
    }

    pub fn clone_id(&self) -> CloneId {
        match self.scheme {
            Scheme::LeadingZeros => CloneId::LeadingZeros,
            Scheme::MsbSplit => CloneId::MsbSplit,
            Scheme::Codebook(_) => CloneId::Codebook,
        }
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    pub fn width(&self) -> Width {
        self.width
    }

    pub fn codebook(&self) -> Option<&CodeBook> {
        match &self.scheme {
            Scheme::Codebook(b) => Some(b),
            _ => None,
        }
    }

    /// Encodes a flat stream whose length is a multiple of `n`.
    pub fn encode_stream(&self, input: &PitStream) -> Result<SecondaryBundle> {
        if input.radix() != self.radix {
            return Err(Error::Contract(format!(
                "radix-{} stream given to a radix-{} codec",
                input.radix(),
                self.radix
            )));
        }
        let n = self.width.get();
        if input.len() % n != 0 {
            return Err(Error::Contract(format!(
                "stream of {} pits is not a whole number of width-{n} paits",
                input.len()
            )));
        }
        Ok(self.encode_words(input.pits()))
    }

    /// Encodes a sequence of paits, which must all match this codec's `(p, n)`.
    pub fn encode_paits(&self, input: &[Pait]) -> Result<SecondaryBundle> {
        let mut flat = Vec::with_capacity(input.len() * self.width.get());
        for x in input {
            if x.radix() != self.radix || x.width() != self.width {
                return Err(Error::Contract(format!(
                    "pait (p={}, n={}) given to a (p={}, n={}) codec",
                    x.radix(),
                    x.width(),
                    self.radix,
                    self.width
                )));
            }
            flat.extend_from_slice(x.digits());
        }
        Ok(self.encode_words(&flat))
    }

    fn encode_words(&self, pits: &[Pit]) -> SecondaryBundle {
        let n = self.width.get();
        let count = pits.len() / n;
        let mut remainder = Vec::with_capacity(pits.len());
        let mut flag_len = Vec::with_capacity(count * 2);
        let mut flag_msb = match self.scheme {
            Scheme::MsbSplit => Some(Vec::with_capacity(count)),
            _ => None,
        };
        let mut code_digits = vec![0; n];

        for word in pits.chunks_exact(n) {
            let (code, zeros): (&[Pit], usize) = match &self.scheme {
                Scheme::LeadingZeros => {
                    let len = pit::significant_len(word);
                    (&word[n - len..], n - len)
                }
                Scheme::MsbSplit => {
                    if let Some(msb) = flag_msb.as_mut() {
                        msb.push(word[0]);
                    }
                    let low = &word[1..];
                    let len = pit::significant_len(low);
                    (&low[low.len() - len..], low.len() - len)
                }
                Scheme::Codebook(book) => {
                    // Words come from validated streams and p^n fits in u64.
                    let value = pit::digits_to_u64(word, self.radix)
                        .expect("codebook alphabet fits in u64");
                    let (len, code) = book.forward(value).expect("value below p^n");
                    let out = &mut code_digits[..len];
                    pit::u64_to_digits(code, self.radix, out);
                    (&*out, n - len)
                }
            };
            remainder.extend_from_slice(code);
            flag_len.extend(std::iter::repeat(MARKER).take(zeros));
            flag_len.push(TERMINATOR);
        }

        SecondaryBundle {
            remainder: PitStream::from_raw(self.radix, remainder),
            flag_len: PitStream::from_raw(self.radix, flag_len),
            flag_msb: flag_msb.map(|v| PitStream::from_raw(self.radix, v)),
            pait_count: count,
            radix: self.radix,
            width: self.width,
            clone_id: self.clone_id(),
        }
    }

    /// Decodes a bundle back into a flat stream of `pait_count * n` pits.
    /// Every input stream must be consumed exactly.
    pub fn decode_stream(&self, bundle: &SecondaryBundle) -> Result<PitStream> {
        self.check_bundle(bundle)?;
        let n = self.width.get();
        let mut out = Vec::with_capacity(bundle.pait_count * n);
        let mut flags = UnaryReader::new(bundle.flag_len.pits());
        let mut rem = bundle.remainder.pits();
        let mut msb = bundle.flag_msb.as_ref().map(|s| s.pits().iter());

        for _ in 0..bundle.pait_count {
            match &self.scheme {
                Scheme::LeadingZeros => {
                    let zeros = flags.read(n - 1)?;
                    let code = take(&mut rem, n - zeros)?;
                    check_canonical(code)?;
                    out.extend(std::iter::repeat(0).take(zeros));
                    out.extend_from_slice(code);
                }
                Scheme::MsbSplit => {
                    let top = msb
                        .as_mut()
                        .and_then(Iterator::next)
                        .ok_or(Error::Truncated { stream: "flag_msb" })?;
                    let zeros = flags.read(n - 2)?;
                    let code = take(&mut rem, n - 1 - zeros)?;
                    check_canonical(code)?;
                    out.push(*top);
                    out.extend(std::iter::repeat(0).take(zeros));
                    out.extend_from_slice(code);
                }
                Scheme::Codebook(book) => {
                    let len = n - flags.read(n - 1)?;
                    let code = take(&mut rem, len)?;
                    let code_value = pit::digits_to_u64(code, self.radix)
                        .expect("codebook alphabet fits in u64");
                    let value = book
                        .inverse(len, code_value)
                        .ok_or_else(|| Error::Corrupt {
                            stream: "remainder",
                            detail: format!("code ({len}, {code_value}) is not in the codebook"),
                        })?;
                    let start = out.len();
                    out.resize(start + n, 0);
                    pit::u64_to_digits(value, self.radix, &mut out[start..]);
                }
            }
        }

        if !flags.is_done() {
            return Err(Error::LengthMismatch {
                stream: "flag_len",
                detail: format!(
                    "{} pits left after {} records",
                    flags.rest(),
                    bundle.pait_count
                ),
            });
        }
        if !rem.is_empty() {
            return Err(Error::LengthMismatch {
                stream: "remainder",
                detail: format!("{} pits left over", rem.len()),
            });
        }
        if let Some(left) = msb.map(|it| it.len()).filter(|&l| l > 0) {
            return Err(Error::LengthMismatch {
                stream: "flag_msb",
                detail: format!("{left} pits left over"),
            });
        }
        Ok(PitStream::from_raw(self.radix, out))
    }

    pub fn decode_paits(&self, bundle: &SecondaryBundle) -> Result<Vec<Pait>> {
        let flat = self.decode_stream(bundle)?;
        flat.pits()
            .chunks_exact(self.width.get())
            .map(|c| Pait::new(self.radix, c.to_vec()))
            .collect()
    }

    fn check_bundle(&self, b: &SecondaryBundle) -> Result<()> {
        if b.clone_id != self.clone_id() || b.radix != self.radix || b.width != self.width {
            return Err(Error::Contract(format!(
                "bundle ({}, p={}, n={}) given to ({}, p={}, n={}) decoder",
                b.clone_id,
                b.radix,
                b.width,
                self.clone_id(),
                self.radix,
                self.width
            )));
        }
        let streams = [Some(&b.remainder), Some(&b.flag_len), b.flag_msb.as_ref()];
        if streams
            .into_iter()
            .flatten()
            .any(|s| s.radix() != self.radix)
        {
            return Err(Error::Contract("bundle streams disagree on radix".into()));
        }
        if b.flag_msb.is_some() != (self.clone_id() == CloneId::MsbSplit) {
            return Err(Error::Contract(
                "flag_msb must be present exactly for clone 2".into(),
            ));
        }
        Ok(())
    }
}

fn take<'a>(rem: &mut &'a [Pit], len: usize) -> Result<&'a [Pit]> {
    if rem.len() < len {
        return Err(Error::LengthMismatch {
            stream: "remainder",
            detail: format!("needed {len} pits, {} left", rem.len()),
        });
    }
    let (head, tail) = rem.split_at(len);
    *rem = tail;
    Ok(head)
}

// A stripped code never starts with zero unless it is the lone pit of an
// all-zero word; anything else could not have come from the encoder.
fn check_canonical(code: &[Pit]) -> Result<()> {
    if code.len() > 1 && code[0] == 0 {
        return Err(Error::Corrupt {
            stream: "remainder",
            detail: "stripped code starts with a zero pit".into(),
        });
    }
    Ok(())
}

struct UnaryReader<'a> {
    pits: &'a [Pit],
    pos: usize,
}

impl<'a> UnaryReader<'a> {
    fn new(pits: &'a [Pit]) -> Self {
        UnaryReader { pits, pos: 0 }
    }

    /// Reads one record and returns its marker count, which must not exceed `max_zeros`.
    fn read(&mut self, max_zeros: usize) -> Result<usize> {
        let mut zeros = 0;
        loop {
            let &d = self
                .pits
                .get(self.pos)
                .ok_or(Error::Truncated { stream: "flag_len" })?;
            self.pos += 1;
            match d {
                TERMINATOR => return Ok(zeros),
                MARKER if zeros < max_zeros => zeros += 1,
                MARKER => {
                    return Err(Error::Corrupt {
                        stream: "flag_len",
                        detail: format!("more than {max_zeros} markers in one record"),
                    })
                }
                other => {
                    return Err(Error::Corrupt {
                        stream: "flag_len",
                        detail: format!("pit {other} at position {} is not 0 or 1", self.pos - 1),
                    })
                }
            }
        }
    }

    fn is_done(&self) -> bool {
        self.pos == self.pits.len()
    }

    fn rest(&self) -> usize {
        self.pits.len() - self.pos
    }
}

fn shape_of(input: &[Pait]) -> Result<Option<(Radix, Width)>> {
    let Some(first) = input.first() else {
        return Ok(None);
    };
    let shape = (first.radix(), first.width());
    if input.iter().any(|x| (x.radix(), x.width()) != shape) {
        return Err(Error::Contract("paits of mixed radix or width".into()));
    }
    Ok(Some(shape))
}

fn empty_bundle(clone_id: CloneId) -> SecondaryBundle {
    let radix = Radix::BINARY;
    SecondaryBundle {
        remainder: PitStream::empty(radix),
        flag_len: PitStream::empty(radix),
        flag_msb: (clone_id == CloneId::MsbSplit).then(|| PitStream::empty(radix)),
        pait_count: 0,
        radix,
        width: Width::new(clone_id.min_width() as u64).expect("static width"),
        clone_id,
    }
}

fn encode_with(clone_id: CloneId, input: &[Pait]) -> Result<SecondaryBundle> {
    match shape_of(input)? {
        Some((radix, width)) => Codec::new(clone_id, radix, width)?.encode_paits(input),
        None => Ok(empty_bundle(clone_id)),
    }
}

/// Clone 1: leading zeros dropped, their count recorded in unary.
pub fn encode_clone1(input: &[Pait]) -> Result<SecondaryBundle> {
    encode_with(CloneId::LeadingZeros, input)
}

pub fn decode_clone1(bundle: &SecondaryBundle) -> Result<Vec<Pait>> {
    expect_clone(bundle, CloneId::LeadingZeros)?;
    Codec::new(CloneId::LeadingZeros, bundle.radix, bundle.width)?.decode_paits(bundle)
}

/// Clone 2: top pit to `flag_msb`, then clone 1 on the width-`(n-1)` low word.
pub fn encode_clone2(input: &[Pait]) -> Result<SecondaryBundle> {
    encode_with(CloneId::MsbSplit, input)
}

pub fn decode_clone2(bundle: &SecondaryBundle) -> Result<Vec<Pait>> {
    expect_clone(bundle, CloneId::MsbSplit)?;
    Codec::new(CloneId::MsbSplit, bundle.radix, bundle.width)?.decode_paits(bundle)
}

pub fn build_codebook(radix: Radix, width: Width) -> Result<CodeBook> {
    CodeBook::build(radix, width)
}

/// Clone 3: each pait replaced by its canonical code from `book`.
pub fn encode_clone3(input: &[Pait], book: &CodeBook) -> Result<SecondaryBundle> {
    if let Some((radix, width)) = shape_of(input)? {
        if (radix, width) != (book.radix(), book.width()) {
            return Err(Error::Contract(format!(
                "codebook is for (p={}, n={}), input is (p={radix}, n={width})",
                book.radix(),
                book.width()
            )));
        }
    }
    let codec = Codec::with_codebook(book.clone());
    codec.encode_paits(input)
}

pub fn decode_clone3(bundle: &SecondaryBundle, book: &CodeBook) -> Result<Vec<Pait>> {
    expect_clone(bundle, CloneId::Codebook)?;
    Codec::with_codebook(book.clone()).decode_paits(bundle)
}

fn expect_clone(bundle: &SecondaryBundle, id: CloneId) -> Result<()> {
    if bundle.clone_id != id {
        return Err(Error::Contract(format!(
            "expected a {id} bundle, got {}",
            bundle.clone_id
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pit::main_file;
    use proptest::prelude::*;

    fn r(p: u64) -> Radix {
        Radix::new(p).unwrap()
    }
    fn w(n: u64) -> Width {
        Width::new(n).unwrap()
    }
    fn pait(v: u64, p: u64, n: u64) -> Pait {
        Pait::from_value(v, r(p), w(n)).unwrap()
    }
    fn stream(p: u64, pits: &[Pit]) -> PitStream {
        PitStream::new(r(p), pits.to_vec()).unwrap()
    }
    fn bundle(
        clone_id: CloneId,
        p: u64,
        n: u64,
        remainder: &[Pit],
        flag_len: &[Pit],
        flag_msb: Option<&[Pit]>,
        count: usize,
    ) -> SecondaryBundle {
        SecondaryBundle {
            remainder: stream(p, remainder),
            flag_len: stream(p, flag_len),
            flag_msb: flag_msb.map(|m| stream(p, m)),
            pait_count: count,
            radix: r(p),
            width: w(n),
            clone_id,
        }
    }

    #[test]
    fn clone1_single_pait() {
        let b = encode_clone1(&[pait(13, 2, 8)]).unwrap();
        assert_eq!(b.remainder.pits(), &[1, 1, 0, 1]);
        assert_eq!(b.flag_len.pits(), &[0, 0, 0, 0, 1]);
        assert!(b.flag_msb.is_none());
        assert_eq!(b.total_pits(), 9);
    }

    #[test]
    fn clone1_main_files() {
        let b = encode_clone1(&main_file(r(2), w(8)).unwrap()).unwrap();
        assert_eq!((b.remainder.len(), b.flag_len.len()), (1794, 510));
        let b = encode_clone1(&main_file(r(3), w(2)).unwrap()).unwrap();
        assert_eq!((b.remainder.len(), b.flag_len.len()), (15, 12));
    }

    #[test]
    fn clone1_decode_examples() {
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[1, 1, 0, 1],
            &[0, 0, 0, 0, 1],
            None,
            1,
        );
        assert_eq!(decode_clone1(&b).unwrap(), vec![pait(13, 2, 8)]);
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[0],
            &[0, 0, 0, 0, 0, 0, 0, 1],
            None,
            1,
        );
        assert_eq!(decode_clone1(&b).unwrap(), vec![pait(0, 2, 8)]);
        let m = main_file(r(2), w(8)).unwrap();
        assert_eq!(decode_clone1(&encode_clone1(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn clone1_decode_errors() {
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[1, 1, 0, 1],
            &[0, 0, 0, 0],
            None,
            1,
        );
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::Truncated { stream: "flag_len" })
        ));
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[1, 1, 0],
            &[0, 0, 0, 0, 1],
            None,
            1,
        );
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::LengthMismatch {
                stream: "remainder",
                ..
            })
        ));
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[1, 1, 0, 1, 1],
            &[0, 0, 0, 0, 1],
            None,
            1,
        );
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::LengthMismatch {
                stream: "remainder",
                ..
            })
        ));
        let b = bundle(CloneId::LeadingZeros, 3, 2, &[1], &[2, 1], None, 1);
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::Corrupt {
                stream: "flag_len",
                ..
            })
        ));
        // Eight markers would mean a zero-length code.
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[],
            &[0, 0, 0, 0, 0, 0, 0, 0, 1],
            None,
            1,
        );
        assert!(matches!(decode_clone1(&b), Err(Error::Corrupt { .. })));
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[0, 1],
            &[0, 0, 0, 0, 0, 0, 1],
            None,
            1,
        );
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::Corrupt {
                stream: "remainder",
                ..
            })
        ));
        let b = bundle(
            CloneId::LeadingZeros,
            2,
            8,
            &[1],
            &[0, 0, 0, 0, 0, 0, 0, 1, 1],
            None,
            1,
        );
        assert!(matches!(
            decode_clone1(&b),
            Err(Error::LengthMismatch {
                stream: "flag_len",
                ..
            })
        ));
    }

    #[test]
    fn clone2_examples() {
        let b = encode_clone2(&[pait(13, 2, 8)]).unwrap();
        assert_eq!(b.flag_msb.as_ref().unwrap().pits(), &[0]);
        assert_eq!(b.remainder.pits(), &[1, 1, 0, 1]);
        assert_eq!(b.flag_len.pits(), &[0, 0, 0, 1]);

        let b = encode_clone2(&main_file(r(2), w(8)).unwrap()).unwrap();
        assert_eq!(b.flag_msb.as_ref().unwrap().len(), 256);
        assert_eq!(b.remainder.len(), 1540);
        assert_eq!(b.flag_len.len(), 508);

        let b = encode_clone2(&main_file(r(3), w(2)).unwrap()).unwrap();
        assert_eq!(b.flag_msb.as_ref().unwrap().len(), 9);
        assert_eq!((b.remainder.len(), b.flag_len.len()), (9, 9));

        let b = bundle(
            CloneId::MsbSplit,
            2,
            8,
            &[0],
            &[0, 0, 0, 0, 0, 0, 1],
            Some(&[1]),
            1,
        );
        assert_eq!(decode_clone2(&b).unwrap(), vec![pait(128, 2, 8)]);

        let m = main_file(r(2), w(8)).unwrap();
        assert_eq!(decode_clone2(&encode_clone2(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn clone2_errors() {
        assert!(matches!(
            encode_clone2(&[pait(1, 2, 1)]),
            Err(Error::UnsupportedWidth { clone: 2, width: 1 })
        ));
        let b = bundle(
            CloneId::MsbSplit,
            2,
            8,
            &[0],
            &[0, 0, 0, 0, 0, 0, 1],
            Some(&[]),
            1,
        );
        assert!(matches!(
            decode_clone2(&b),
            Err(Error::Truncated { stream: "flag_msb" })
        ));
        let b = bundle(
            CloneId::MsbSplit,
            2,
            8,
            &[0],
            &[0, 0, 0, 0, 0, 0, 1],
            Some(&[1, 0]),
            1,
        );
        assert!(matches!(
            decode_clone2(&b),
            Err(Error::LengthMismatch {
                stream: "flag_msb",
                ..
            })
        ));
        let b = bundle(
            CloneId::MsbSplit,
            2,
            8,
            &[0],
            &[0, 0, 0, 0, 0, 0, 1],
            None,
            1,
        );
        assert!(matches!(decode_clone2(&b), Err(Error::Contract(_))));
    }

    #[test]
    fn clone3_examples() {
        let book = build_codebook(r(2), w(8)).unwrap();
        let b = encode_clone3(&[pait(0, 2, 8)], &book).unwrap();
        assert_eq!(b.remainder.pits(), &[0]);
        assert_eq!(b.flag_len.pits(), &[0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(b.total_pits(), 9);

        let m = main_file(r(2), w(8)).unwrap();
        let b = encode_clone3(&m, &book).unwrap();
        assert_eq!((b.remainder.len(), b.flag_len.len()), (1554, 750));
        assert_eq!(decode_clone3(&b, &book).unwrap(), m);

        let book3 = build_codebook(r(3), w(2)).unwrap();
        let b = encode_clone3(&main_file(r(3), w(2)).unwrap(), &book3).unwrap();
        assert_eq!((b.remainder.len(), b.flag_len.len()), (15, 12));

        let b = bundle(
            CloneId::Codebook,
            2,
            8,
            &[1],
            &[0, 0, 0, 0, 0, 0, 0, 1],
            None,
            1,
        );
        assert_eq!(decode_clone3(&b, &book).unwrap(), vec![pait(1, 2, 8)]);
    }

    #[test]
    fn clone3_errors() {
        let book = build_codebook(r(2), w(8)).unwrap();
        assert!(matches!(
            encode_clone3(&[pait(0, 2, 7)], &book),
            Err(Error::Contract(_))
        ));
        // Length-8 code value 2 is unused: only two length-8 codes exist.
        let b = bundle(
            CloneId::Codebook,
            2,
            8,
            &[0, 0, 0, 0, 0, 0, 1, 0],
            &[1],
            None,
            1,
        );
        assert!(matches!(
            decode_clone3(&b, &book),
            Err(Error::Corrupt {
                stream: "remainder",
                ..
            })
        ));
    }

    #[test]
    fn mixed_input_is_rejected() {
        let mixed = [pait(1, 2, 8), pait(1, 3, 8)];
        assert!(matches!(encode_clone1(&mixed), Err(Error::Contract(_))));
        let mixed = [pait(1, 2, 8), pait(1, 2, 7)];
        assert!(matches!(encode_clone2(&mixed), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_input() {
        for id in CloneId::ALL {
            let b = encode_with(id, &[]).unwrap();
            assert_eq!((b.pait_count, b.total_pits()), (0, 0));
        }
    }

    fn random_paits(p: u64, n: u64, raw: &[u64]) -> Vec<Pait> {
        let size = p.pow(n as u32);
        raw.iter().map(|&v| pait(v % size, p, n)).collect()
    }

    fn check_stream_invariants(b: &SecondaryBundle, n: usize) {
        assert_eq!(b.flag_len.count_of(TERMINATOR), b.pait_count);
        assert_eq!(b.total_pits(), (n + 1) * b.pait_count);
        if let Some(m) = &b.flag_msb {
            assert_eq!(m.len(), b.pait_count);
        }
    }

    proptest! {
        #[test]
        fn round_trip_and_conservation(
            p in 2u64..=16,
            n in 1u64..=12,
            raw in prop::collection::vec(any::<u64>(), 0..60),
        ) {
            prop_assume!(p.checked_pow(n as u32).is_some());
            let input = random_paits(p, n, &raw);
            for id in CloneId::ALL {
                if (n as usize) < id.min_width() {
                    continue;
                }
                let codec = Codec::new(id, r(p), w(n)).unwrap();
                let b = codec.encode_paits(&input).unwrap();
                check_stream_invariants(&b, n as usize);
                prop_assert_eq!(codec.decode_paits(&b).unwrap(), input.clone());
            }
        }

        #[test]
        fn encoding_is_context_free(
            p in 2u64..=7,
            n in 2u64..=9,
            a in prop::collection::vec(any::<u64>(), 0..30),
            b in prop::collection::vec(any::<u64>(), 0..30),
        ) {
            let (a, b) = (random_paits(p, n, &a), random_paits(p, n, &b));
            let ab: Vec<Pait> = a.iter().chain(&b).cloned().collect();
            for id in CloneId::ALL {
                let codec = Codec::new(id, r(p), w(n)).unwrap();
                let (ea, eb, eab) = (
                    codec.encode_paits(&a).unwrap(),
                    codec.encode_paits(&b).unwrap(),
                    codec.encode_paits(&ab).unwrap(),
                );
                prop_assert_eq!(eab.remainder.pits(), [ea.remainder.pits(), eb.remainder.pits()].concat());
                prop_assert_eq!(eab.flag_len.pits(), [ea.flag_len.pits(), eb.flag_len.pits()].concat());
                if let (Some(x), Some(y), Some(z)) = (&ea.flag_msb, &eb.flag_msb, &eab.flag_msb) {
                    prop_assert_eq!(z.pits(), [x.pits(), y.pits()].concat());
                }
            }
        }

        #[test]
        fn clone1_codes_start_nonzero(p in 2u64..=9, n in 1u64..=10, v in any::<u64>()) {
            let x = pait(v % p.pow(n as u32), p, n);
            let b = encode_clone1(std::slice::from_ref(&x)).unwrap();
            let code = b.remainder.pits();
            prop_assert!(code[0] != 0 || code == [0]);
        }
    }

    #[test]
    fn exhaustive_round_trip_small_alphabets() {
        for p in 2..=16u64 {
            for n in 1..=12u64 {
                let Some(size) = r(p).checked_pow(n as usize) else {
                    continue;
                };
                if size > 1 << 12 {
                    continue;
                }
                let m = main_file(r(p), w(n)).unwrap();
                for id in CloneId::ALL {
                    if (n as usize) < id.min_width() {
                        continue;
                    }
                    let codec = Codec::new(id, r(p), w(n)).unwrap();
                    let b = codec.encode_paits(&m).unwrap();
                    check_stream_invariants(&b, n as usize);
                    assert_eq!(codec.decode_paits(&b).unwrap(), m, "{id} p={p} n={n}");
                }
            }
        }
    }
}
