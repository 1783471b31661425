//! Version 1 archive container.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "MV2C"
//!      4     1  version (0x01)
//!      5     2  radix p
//!      7     2  width n
//!      9     1  clone id
//!     10     1  rounds m
//!     11     1  input format (0 = bytes, 1 = digits)
//!     12     8  original pit count
//!     20  18*m  per round: pad count (2), flag_len pits (8), flag_msb pits (8)
//!      .     8  remainder pit count
//!      .     .  packed remainder, then per round flag_msb (clone 2) and flag_len,
//!               each zero-padded to a byte boundary
//!      .     4  CRC-32 (IEEE) of everything before it
//! ```
//!
//! Integers are big-endian. Streams are packed by [`pack_pits`].

use crate::codec::{CloneId, Codec, SecondaryBundle};
use crate::error::{Error, Result};
use crate::pipeline::{InputFormat, PipelineParams};
use crate::pit::{pack_pits, packed_len, unpack_pits, PitStream, Radix, Width};

pub const MAGIC: [u8; 4] = *b"MV2C";
pub const VERSION: u8 = 1;

const FIXED_HEADER_LEN: usize = 20;
const ROUND_RECORD_LEN: usize = 18;

/// Flag streams kept from one recoding round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub pad_count: u16,
    pub flag_len: PitStream,
    /// Present only for clone 2.
    pub flag_msb: Option<PitStream>,
}

impl RoundRecord {
    pub fn flag_pits(&self) -> usize {
        self.flag_len.len() + self.flag_msb.as_ref().map_or(0, PitStream::len)
    }

    /// Reassembles this round's bundle around the remainder it produced.
    pub(crate) fn bundle(&self, codec: &Codec, remainder: PitStream) -> SecondaryBundle {
        SecondaryBundle {
            remainder,
            flag_len: self.flag_len.clone(),
            flag_msb: self.flag_msb.clone(),
            // One terminator per pait.
            pait_count: self.flag_len.count_of(1),
            radix: codec.radix(),
            width: codec.width(),
            clone_id: codec.clone_id(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Container {
    pub params: PipelineParams,
    pub original_pit_count: u64,
    pub rounds: Vec<RoundRecord>,
    /// Remainder of the final round.
    pub remainder: PitStream,
}

impl Container {
    /// Pits stored across the final remainder and every flag stream.
    pub fn total_pits(&self) -> usize {
        self.remainder.len()
            + self
                .rounds
                .iter()
                .map(RoundRecord::flag_pits)
                .sum::<usize>()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        if self.rounds.len() != p.rounds as usize {
            return Err(Error::InvalidHeader(format!(
                "{} round records for {} rounds",
                self.rounds.len(),
                p.rounds
            )));
        }
        let mut streams = vec![&self.remainder];
        for (i, r) in self.rounds.iter().enumerate() {
            if r.pad_count as usize >= p.width.get() {
                return Err(Error::InvalidHeader(format!(
                    "round {} pad count {} not below width {}",
                    i + 1,
                    r.pad_count,
                    p.width
                )));
            }
            if r.flag_msb.is_some() != (p.clone_id == CloneId::MsbSplit) {
                return Err(Error::InvalidHeader(format!(
                    "round {} flag_msb presence does not match {}",
                    i + 1,
                    p.clone_id
                )));
            }
            streams.push(&r.flag_len);
            streams.extend(r.flag_msb.as_ref());
        }
        if streams.iter().any(|s| s.radix() != p.radix) {
            return Err(Error::InvalidHeader(
                "stream radix differs from header".into(),
            ));
        }
        Ok(())
    }

    /// Serializes to the v1 byte layout.
    pub fn serialize(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let p = &self.params;
        let mut out = Vec::with_capacity(
            FIXED_HEADER_LEN + ROUND_RECORD_LEN * self.rounds.len() + 12 + self.remainder.len() / 4,
        );
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&p.radix.get().to_be_bytes());
        out.extend_from_slice(&(p.width.get() as u16).to_be_bytes());
        out.push(p.clone_id.number());
        out.push(p.rounds);
        out.push(p.input_format.code());
        out.extend_from_slice(&self.original_pit_count.to_be_bytes());
        for r in &self.rounds {
            out.extend_from_slice(&r.pad_count.to_be_bytes());
            out.extend_from_slice(&(r.flag_len.len() as u64).to_be_bytes());
            let msb = r.flag_msb.as_ref().map_or(0, PitStream::len);
            out.extend_from_slice(&(msb as u64).to_be_bytes());
        }
        out.extend_from_slice(&(self.remainder.len() as u64).to_be_bytes());
        out.extend(pack_pits(&self.remainder));
        for r in &self.rounds {
            if let Some(msb) = &r.flag_msb {
                out.extend(pack_pits(msb));
            }
            out.extend(pack_pits(&r.flag_len));
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_be_bytes());
        Ok(out)
    }

    /// Parses and checksums a v1 container.
    pub fn parse(bytes: &[u8]) -> Result<Container> {
        let mut rd = Reader { bytes, pos: 0 };
        if bytes.len() < MAGIC.len() || bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::BadMagic);
        }
        rd.pos = MAGIC.len();
        let version = rd.u8("header")?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let radix = Radix::new(rd.u16("header")? as u64)
            .map_err(|e| Error::InvalidHeader(e.to_string()))?;
        let width = Width::new(rd.u16("header")? as u64)
            .map_err(|e| Error::InvalidHeader(e.to_string()))?;
        let clone_id =
            CloneId::try_from(rd.u8("header")?).map_err(|e| Error::InvalidHeader(e.to_string()))?;
        let rounds = rd.u8("header")?;
        let format_code = rd.u8("header")?;
        let input_format = InputFormat::from_code(format_code)
            .ok_or_else(|| Error::InvalidHeader(format!("unknown input format {format_code}")))?;
        let params = PipelineParams::new(radix, width, clone_id, rounds, input_format)
            .map_err(|e| Error::InvalidHeader(e.to_string()))?;
        let original_pit_count = rd.u64("header")?;

        let mut counts = Vec::with_capacity(rounds as usize);
        for _ in 0..rounds {
            let pad = rd.u16("round records")?;
            let flag_len = rd.u64("round records")?;
            let flag_msb = rd.u64("round records")?;
            counts.push((pad, flag_len, flag_msb));
        }
        let remainder_count = rd.u64("remainder count")?;

        // Locate every section first so a damaged container is rejected
        // before any stream is unpacked.
        let remainder_bytes = rd.section(remainder_count, radix, "remainder")?;
        let mut sections = Vec::with_capacity(rounds as usize);
        for (pad_count, len_count, msb_count) in counts {
            let msb = if clone_id == CloneId::MsbSplit {
                Some((msb_count, rd.section(msb_count, radix, "flag_msb")?))
            } else if msb_count != 0 {
                return Err(Error::InvalidHeader(format!(
                    "flag_msb count {msb_count} for {clone_id}"
                )));
            } else {
                None
            };
            let len = (len_count, rd.section(len_count, radix, "flag_len")?);
            sections.push((pad_count, len, msb));
        }

        let body_end = rd.pos;
        let stored = rd.u32("checksum")?;
        if rd.pos != bytes.len() {
            return Err(Error::TrailingBytes(bytes.len() - rd.pos));
        }
        let computed = crc32fast::hash(&bytes[..body_end]);
        if stored != computed {
            return Err(Error::ChecksumMismatch { stored, computed });
        }

        let remainder = unpack_section(remainder_bytes, remainder_count, radix, "remainder")?;
        let mut records = Vec::with_capacity(sections.len());
        for (pad_count, (len_count, len_bytes), msb) in sections {
            let flag_msb = match msb {
                Some((count, packed)) => Some(unpack_section(packed, count, radix, "flag_msb")?),
                None => None,
            };
            records.push(RoundRecord {
                pad_count,
                flag_len: unpack_section(len_bytes, len_count, radix, "flag_len")?,
                flag_msb,
            });
        }

        let container = Container {
            params,
            original_pit_count,
            rounds: records,
            remainder,
        };
        container.validate()?;
        Ok(container)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, section: &'static str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or(Error::TruncatedSection { section })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, section: &'static str) -> Result<[u8; N]> {
        let mut a = [0u8; N];
        a.copy_from_slice(self.take(N, section)?);
        Ok(a)
    }

    fn u8(&mut self, section: &'static str) -> Result<u8> {
        Ok(self.array::<1>(section)?[0])
    }

    fn u16(&mut self, section: &'static str) -> Result<u16> {
        self.array(section).map(u16::from_be_bytes)
    }

    fn u32(&mut self, section: &'static str) -> Result<u32> {
        self.array(section).map(u32::from_be_bytes)
    }

    fn u64(&mut self, section: &'static str) -> Result<u64> {
        self.array(section).map(u64::from_be_bytes)
    }

    /// Packed bytes of a stream of `count` pits. The byte budget is checked
    /// before anything sized by `count` is allocated.
    fn section(&mut self, count: u64, radix: Radix, section: &'static str) -> Result<&'a [u8]> {
        let len = packed_len(count, radix)
            .and_then(|l| usize::try_from(l).ok())
            .ok_or(Error::TruncatedSection { section })?;
        self.take(len, section)
    }
}

fn unpack_section(
    packed: &[u8],
    count: u64,
    radix: Radix,
    section: &'static str,
) -> Result<PitStream> {
    unpack_pits(packed, count as usize, radix).map_err(|e| match e {
        Error::Corrupt { detail, .. } => Error::Corrupt {
            stream: section,
            detail,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{encode_pipeline, ingest};
    use crate::pit::main_file_stream;

    fn sample(clone: CloneId, rounds: u8) -> Container {
        let r = Radix::new(2).unwrap();
        let w = Width::new(8).unwrap();
        let input = main_file_stream(r, w).unwrap();
        let params = PipelineParams::new(r, w, clone, rounds, InputFormat::Bytes).unwrap();
        encode_pipeline(&input, &params).unwrap()
    }

    #[test]
    fn header_golden_bytes() {
        let c = sample(CloneId::LeadingZeros, 1);
        let bytes = c.serialize().unwrap();
        #[rustfmt::skip]
        let header: [u8; 20] = [
            b'M', b'V', b'2', b'C',
            0x01,
            0x00, 0x02,
            0x00, 0x08,
            0x01,
            0x01,
            0x00,
            0, 0, 0, 0, 0, 0, 0x08, 0x00,
        ];
        assert_eq!(bytes[..20], header);
        // pad 0, flag_len 510, flag_msb 0, remainder 1794
        assert_eq!(bytes[20..22], [0, 0]);
        assert_eq!(bytes[22..30], 510u64.to_be_bytes());
        assert_eq!(bytes[30..38], 0u64.to_be_bytes());
        assert_eq!(bytes[38..46], 1794u64.to_be_bytes());
        let body = 46 + 1794usize.div_ceil(8) + 510usize.div_ceil(8);
        assert_eq!(bytes.len(), body + 4);
        let crc = crc32fast::hash(&bytes[..body]);
        assert_eq!(bytes[body..], crc.to_be_bytes());
    }

    #[test]
    fn round_trip() {
        for clone in CloneId::ALL {
            for m in [1, 3] {
                let c = sample(clone, m);
                let bytes = c.serialize().unwrap();
                assert_eq!(Container::parse(&bytes).unwrap(), c);
                // Serialization is deterministic.
                assert_eq!(c.serialize().unwrap(), bytes);
            }
        }
    }

    #[test]
    fn distinct_errors() {
        let bytes = sample(CloneId::MsbSplit, 2).serialize().unwrap();

        let mut bad = bytes.clone();
        bad[0] ^= 0x01;
        assert_eq!(Container::parse(&bad), Err(Error::BadMagic));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert_eq!(Container::parse(&bad), Err(Error::UnsupportedVersion(2)));

        assert!(matches!(
            Container::parse(&bytes[..bytes.len() - 10]),
            Err(Error::TruncatedSection { .. })
        ));
        assert!(matches!(
            Container::parse(&bytes[..30]),
            Err(Error::TruncatedSection {
                section: "round records"
            })
        ));

        let mut bad = bytes.clone();
        bad.push(0);
        assert_eq!(Container::parse(&bad), Err(Error::TrailingBytes(1)));

        let mut bad = bytes.clone();
        let last = bad.len() - 1;
        bad[last] ^= 0x80;
        assert!(matches!(
            Container::parse(&bad),
            Err(Error::ChecksumMismatch { .. })
        ));

        let mut bad = bytes.clone();
        bad[9] = 7;
        assert!(matches!(
            Container::parse(&bad),
            Err(Error::InvalidHeader(_))
        ));
    }

    #[test]
    fn huge_count_does_not_allocate() {
        let mut bytes = sample(CloneId::LeadingZeros, 1).serialize().unwrap();
        bytes[38..46].copy_from_slice(&u64::MAX.to_be_bytes());
        assert!(matches!(
            Container::parse(&bytes),
            Err(Error::TruncatedSection {
                section: "remainder"
            })
        ));
    }

    #[test]
    fn every_single_bit_flip_is_detected() {
        let r = Radix::new(3).unwrap();
        let w = Width::new(4).unwrap();
        let input = ingest(&[2, 1, 0, 0, 1, 2, 2, 0, 1], InputFormat::Digits, r).unwrap();
        for clone in CloneId::ALL {
            let params = PipelineParams::new(r, w, clone, 2, InputFormat::Digits).unwrap();
            let bytes = encode_pipeline(&input, &params)
                .unwrap()
                .serialize()
                .unwrap();
            for bit in 0..bytes.len() * 8 {
                let mut bad = bytes.clone();
                bad[bit / 8] ^= 0x80 >> (bit % 8);
                assert!(Container::parse(&bad).is_err(), "{clone} bit {bit}");
            }
        }
    }

    #[test]
    fn rejects_inconsistent_container() {
        let mut c = sample(CloneId::LeadingZeros, 2);
        c.rounds.pop();
        assert!(matches!(c.serialize(), Err(Error::InvalidHeader(_))));
    }
}
