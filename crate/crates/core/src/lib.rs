//! Multi-radix recoding in the MV2 family.
//!
//! A file of fixed-width radix-p words ("paits") is split into a remainder
//! stream of variable-length codes and flag streams recording each code's
//! length. Three clones are provided:
//!
//! 1. strip leading zeros ([`encode_clone1`]);
//! 2. move the top pit to a separate flag, then strip the low word ([`encode_clone2`]);
//! 3. replace each word by its shortest-first canonical code ([`encode_clone3`]).
//!
//! [`pipeline`] repeats a clone over several rounds and [`container`] stores
//! the result; [`analytics`] evaluates the closed-form ratios exactly and
//! [`verify`] checks them against the codecs on the full alphabet.

pub mod analytics;
pub mod codebook;
pub mod codec;
pub mod container;
pub mod error;
pub mod pipeline;
pub mod pit;
pub mod verify;

pub use analytics::{FormulaSet, Ratio};
pub use codebook::CodeBook;
pub use codec::{
    build_codebook, decode_clone1, decode_clone2, decode_clone3, encode_clone1, encode_clone2,
    encode_clone3, CloneId, Codec, SecondaryBundle,
};
pub use container::Container;
pub use error::{Error, Result};
pub use pipeline::{decode_pipeline, emit, encode_pipeline, ingest, InputFormat, PipelineParams};
pub use pit::{
    block_into_paits, main_file, pack_pits, unpack_pits, Pait, Pit, PitStream, Radix, Width,
};
pub use verify::{verify, Verdict, VerificationReport};
