use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong while building, recoding or parsing pit data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radix {0} out of range (expected 2..=65535)")]
    InvalidRadix(u64),

    #[error("width {0} out of range (expected 1..=4096)")]
    InvalidWidth(u64),

    #[error("value {value} does not fit in {width} pits of radix {radix}")]
    ValueOutOfRange {
        value: u64,
        radix: u16,
        width: usize,
    },

    #[error("pit value {value} at position {position} is not below radix {radix}")]
    PitOutOfRange {
        value: u16,
        radix: u16,
        position: usize,
    },

    #[error("alphabet of {radix}^{width} elements exceeds the enumeration cap of {cap}")]
    CapacityExceeded { radix: u16, width: usize, cap: u64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("clone {clone} does not support width {width}")]
    UnsupportedWidth { clone: u8, width: usize },

    #[error("invalid pipeline parameters: {0}")]
    InvalidParams(String),

    #[error("{stream} stream truncated")]
    Truncated { stream: &'static str },

    #[error("{stream} stream length mismatch: {detail}")]
    LengthMismatch {
        stream: &'static str,
        detail: String,
    },

    #[error("corrupt {stream} stream: {detail}")]
    Corrupt {
        stream: &'static str,
        detail: String,
    },

    #[error("packed data underrun: need {needed} bits, have {available}")]
    Underrun { needed: u64, available: u64 },

    #[error("invalid digit {value} at offset {offset} for radix {radix}")]
    InvalidDigit {
        offset: usize,
        value: u8,
        radix: u16,
    },

    #[error("bad container magic")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("container truncated in {section}")]
    TruncatedSection { section: &'static str },

    #[error("invalid container header: {0}")]
    InvalidHeader(String),

    #[error("{0} unexpected trailing bytes after container")]
    TrailingBytes(usize),

    #[error("checksum section mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },

    #[error("degenerate ratio: growth model requires k != 1")]
    DegenerateRatio,
}

impl Error {
    /// True when the error stems from bad parameters rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidRadix(_)
                | Error::InvalidWidth(_)
                | Error::CapacityExceeded { .. }
                | Error::UnsupportedWidth { .. }
                | Error::InvalidParams(_)
                | Error::DegenerateRatio
        )
    }
}
