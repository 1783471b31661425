//! Multi-round recoding and input ingestion.
//!
//! Round `i` blocks the current stream into paits (zero-padding the tail),
//! recodes it, keeps the flag streams and feeds the remainder to round `i+1`.

use crate::codec::{CloneId, Codec};
use crate::container::{Container, RoundRecord};
use crate::error::{Error, Result};
use crate::pit::{self, Pit, PitStream, Radix, Width};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputFormat {
    /// Raw bytes, eight binary pits each, most significant first. Radix 2 only.
    Bytes = 0,
    /// One pit per byte; every byte must be below the radix.
    Digits = 1,
}

impl InputFormat {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(InputFormat::Bytes),
            1 => Some(InputFormat::Digits),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PipelineParams {
    pub radix: Radix,
    pub width: Width,
    pub clone_id: CloneId,
    pub rounds: u8,
    pub input_format: InputFormat,
}

impl PipelineParams {
    pub fn new(
        radix: Radix,
        width: Width,
        clone_id: CloneId,
        rounds: u8,
        input_format: InputFormat,
    ) -> Result<Self> {
        let params = PipelineParams {
            radix,
            width,
            clone_id,
            rounds,
            input_format,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParams("rounds must be in 1..=255".into()));
        }
        if self.input_format == InputFormat::Bytes && self.radix != Radix::BINARY {
            return Err(Error::InvalidParams(format!(
                "byte input requires radix 2, got {}",
                self.radix
            )));
        }
        if self.width.get() < self.clone_id.min_width() {
            return Err(Error::UnsupportedWidth {
                clone: self.clone_id.number(),
                width: self.width.get(),
            });
        }
        Ok(())
    }

    pub fn codec(&self) -> Result<Codec> {
        Codec::new(self.clone_id, self.radix, self.width)
    }
}

/// Runs `params.rounds` recoding rounds over `input`.
pub fn encode_pipeline(input: &PitStream, params: &PipelineParams) -> Result<Container> {
    params.validate()?;
    if input.radix() != params.radix {
        return Err(Error::Contract(format!(
            "radix-{} input for a radix-{} pipeline",
            input.radix(),
            params.radix
        )));
    }
    let codec = params.codec()?;
    let n = params.width.get();
    let mut rounds = Vec::with_capacity(params.rounds as usize);
    let mut current = input.pits().to_vec();

    for _ in 0..params.rounds {
        let pad = pit::pad_for(current.len(), n);
        current.resize(current.len() + pad, 0);
        let bundle = codec.encode_stream(&PitStream::from_raw(params.radix, current))?;
        rounds.push(RoundRecord {
            pad_count: pad as u16,
            flag_len: bundle.flag_len,
            flag_msb: bundle.flag_msb,
        });
        current = bundle.remainder.into_pits();
    }

    Ok(Container {
        params: *params,
        original_pit_count: input.len() as u64,
        rounds,
        remainder: PitStream::from_raw(params.radix, current),
    })
}

/// Undoes every round of `container`, returning the original stream.
pub fn decode_pipeline(container: &Container) -> Result<PitStream> {
    container.validate()?;
    let params = &container.params;
    let codec = params.codec()?;
    let mut current = container.remainder.clone();

    for (i, round) in container.rounds.iter().enumerate().rev() {
        let bundle = round.bundle(&codec, current);
        let mut pits = codec.decode_stream(&bundle)?.into_pits();
        strip_pad(&mut pits, round.pad_count as usize, i + 1)?;
        current = PitStream::from_raw(params.radix, pits);
    }

    if current.len() as u64 != container.original_pit_count {
        return Err(Error::Corrupt {
            stream: "remainder",
            detail: format!(
                "decoded {} pits, header promises {}",
                current.len(),
                container.original_pit_count
            ),
        });
    }
    Ok(current)
}

fn strip_pad(pits: &mut Vec<Pit>, pad: usize, round: usize) -> Result<()> {
    let keep = pits.len().checked_sub(pad).ok_or_else(|| Error::Corrupt {
        stream: "remainder",
        detail: format!("round {round} output shorter than its {pad} pad pits"),
    })?;
    if pits[keep..].iter().any(|&d| d != 0) {
        return Err(Error::Corrupt {
            stream: "remainder",
            detail: format!("round {round} pad pits are not zero"),
        });
    }
    pits.truncate(keep);
    Ok(())
}

/// Turns an input file into a pit stream.
pub fn ingest(bytes: &[u8], format: InputFormat, radix: Radix) -> Result<PitStream> {
    match format {
        InputFormat::Bytes => {
            if radix != Radix::BINARY {
                return Err(Error::InvalidParams(format!(
                    "byte input requires radix 2, got {radix}"
                )));
            }
            let pits = bytes
                .iter()
                .flat_map(|&b| (0..8).rev().map(move |i| ((b >> i) & 1) as Pit))
                .collect();
            Ok(PitStream::from_raw(radix, pits))
        }
        InputFormat::Digits => {
            if let Some(offset) = bytes.iter().position(|&b| b as u16 >= radix.get()) {
                return Err(Error::InvalidDigit {
                    offset,
                    value: bytes[offset],
                    radix: radix.get(),
                });
            }
            Ok(PitStream::from_raw(
                radix,
                bytes.iter().map(|&b| b as Pit).collect(),
            ))
        }
    }
}

/// Inverse of [`ingest`].
pub fn emit(stream: &PitStream, format: InputFormat) -> Result<Vec<u8>> {
    match format {
        InputFormat::Bytes => {
            if stream.radix() != Radix::BINARY || stream.len() % 8 != 0 {
                return Err(Error::Contract(format!(
                    "{} radix-{} pits do not form whole bytes",
                    stream.len(),
                    stream.radix()
                )));
            }
            Ok(stream
                .pits()
                .chunks_exact(8)
                .map(|c| c.iter().fold(0u8, |acc, &d| (acc << 1) | d as u8))
                .collect())
        }
        InputFormat::Digits => stream
            .pits()
            .iter()
            .map(|&d| {
                u8::try_from(d)
                    .map_err(|_| Error::Contract(format!("pit {d} does not fit in a digit byte")))
            })
            .collect(),
    }
}
