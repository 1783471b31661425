//! C ABI over `mv2-core`.
//!
//! Every fallible call returns an [`Mv2Status`]; on failure a description is
//! available from [`mv2_last_error`] on the same thread. Memory handed out by
//! this library (buffers, strings, handles) must be released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use mv2::analytics::{ratio_clone1, ratio_clone2, ratio_clone3};
use mv2::{
    decode_pipeline, emit, encode_pipeline, ingest, CloneId, CodeBook, Container, Error,
    InputFormat, PipelineParams, Radix, Width,
};
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mv2Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedWidth = 3,
    Capacity = 4,
    Corrupt = 5,
    Truncated = 6,
    ChecksumMismatch = 7,
    BadMagic = 8,
    UnsupportedVersion = 9,
    DegenerateRatio = 10,
    Overflow = 11,
    NotFound = 12,
    Panic = 13,
}

impl From<&Error> for Mv2Status {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidRadix(_)
            | Error::InvalidWidth(_)
            | Error::ValueOutOfRange { .. }
            | Error::PitOutOfRange { .. }
            | Error::Contract(_)
            | Error::InvalidParams(_)
            | Error::InvalidDigit { .. } => Mv2Status::InvalidArgument,
            Error::UnsupportedWidth { .. } => Mv2Status::UnsupportedWidth,
            Error::CapacityExceeded { .. } => Mv2Status::Capacity,
            Error::Truncated { .. } | Error::TruncatedSection { .. } | Error::Underrun { .. } => {
                Mv2Status::Truncated
            }
            Error::LengthMismatch { .. }
            | Error::Corrupt { .. }
            | Error::InvalidHeader(_)
            | Error::TrailingBytes(_) => Mv2Status::Corrupt,
            Error::BadMagic => Mv2Status::BadMagic,
            Error::UnsupportedVersion(_) => Mv2Status::UnsupportedVersion,
            Error::ChecksumMismatch { .. } => Mv2Status::ChecksumMismatch,
            Error::DegenerateRatio => Mv2Status::DegenerateRatio,
        }
    }
}

/// Pipeline parameters. `input_format`: 0 = bytes, 1 = digits.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct Mv2Params {
    pub radix: u16,
    pub width: u16,
    pub clone_id: u8,
    pub rounds: u8,
    pub input_format: u8,
}

/// Library-owned bytes; release with [`mv2_buffer_free`].
#[repr(C)]
#[derive(Debug)]
pub struct Mv2Buffer {
    pub data: *mut u8,
    pub len: usize,
}

/// Summary of a parsed container.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct Mv2ContainerInfo {
    pub radix: u16,
    pub width: u16,
    pub clone_id: u8,
    pub rounds: u8,
    pub input_format: u8,
    pub original_pit_count: u64,
    pub remainder_pits: u64,
    pub total_pits: u64,
}

/// Opaque handle to a shortest-first codebook.
pub struct Mv2Codebook(CodeBook);

/// Opaque handle to a parsed container.
pub struct Mv2Container(Container);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: Mv2Status, msg: impl Into<String>) -> Mv2Status {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), Mv2Status> + UnwindSafe) -> Mv2Status {
    match catch_unwind(f) {
        Ok(Ok(())) => Mv2Status::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(Mv2Status::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, Mv2Status>;
}

impl<T> OrStatus<T> for mv2::Result<T> {
    fn or_status(self) -> Result<T, Mv2Status> {
        self.map_err(|e| fail(Mv2Status::from(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Mv2Status> {
    if p.is_null() {
        Err(fail(Mv2Status::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `data` must point to `len` readable bytes, or be null with `len == 0`.
unsafe fn input_slice<'a>(data: *const u8, len: usize) -> Result<&'a [u8], Mv2Status> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(data, "input")?;
    Ok(std::slice::from_raw_parts(data, len))
}

fn into_buffer(bytes: Vec<u8>) -> Mv2Buffer {
    let boxed = bytes.into_boxed_slice();
    let len = boxed.len();
    Mv2Buffer {
        data: Box::into_raw(boxed) as *mut u8,
        len,
    }
}

fn params_of(p: &Mv2Params) -> mv2::Result<PipelineParams> {
    let format = InputFormat::from_code(p.input_format)
        .ok_or_else(|| Error::InvalidParams(format!("unknown input format {}", p.input_format)))?;
    PipelineParams::new(
        Radix::new(p.radix as u64)?,
        Width::new(p.width as u64)?,
        CloneId::try_from(p.clone_id)?,
        p.rounds,
        format,
    )
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mv2_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn mv2_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Encodes `input` into a serialized container written to `out`.
///
/// # Safety
/// `input` must point to `len` readable bytes (or be null when `len == 0`);
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mv2_encode(
    input: *const u8,
    len: usize,
    params: *const Mv2Params,
    out: *mut Mv2Buffer,
) -> Mv2Status {
    guard(|| {
        non_null(params, "params")?;
        non_null(out, "out")?;
        let bytes = input_slice(input, len)?;
        let params = params_of(&*params).or_status()?;
        let stream = ingest(bytes, params.input_format, params.radix).or_status()?;
        let container = encode_pipeline(&stream, &params).or_status()?;
        *out = into_buffer(container.serialize().or_status()?);
        Ok(())
    })
}

/// Decodes a serialized container back into the original file bytes.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mv2_decode(data: *const u8, len: usize, out: *mut Mv2Buffer) -> Mv2Status {
    guard(|| {
        non_null(out, "out")?;
        let bytes = input_slice(data, len)?;
        let container = Container::parse(bytes).or_status()?;
        let stream = decode_pipeline(&container).or_status()?;
        *out = into_buffer(emit(&stream, container.params.input_format).or_status()?);
        Ok(())
    })
}

/// Releases a buffer filled by this library and resets it to empty.
///
/// # Safety
/// `buf` must be null or point to a buffer filled by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mv2_buffer_free(buf: *mut Mv2Buffer) {
    let Some(buf) = buf.as_mut() else { return };
    if !buf.data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(
            buf.data, buf.len,
        )));
    }
    buf.data = ptr::null_mut();
    buf.len = 0;
}

/// Parses and checksums a container.
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mv2_container_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut Mv2Container,
) -> Mv2Status {
    guard(|| {
        non_null(out, "out")?;
        let bytes = input_slice(data, len)?;
        let container = Container::parse(bytes).or_status()?;
        *out = Box::into_raw(Box::new(Mv2Container(container)));
        Ok(())
    })
}

/// # Safety
/// `container` must come from [`mv2_container_parse`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mv2_container_info(
    container: *const Mv2Container,
    out: *mut Mv2ContainerInfo,
) -> Mv2Status {
    guard(|| {
        non_null(container, "container")?;
        non_null(out, "out")?;
        let c = &(*container).0;
        *out = Mv2ContainerInfo {
            radix: c.params.radix.get(),
            width: c.params.width.get() as u16,
            clone_id: c.params.clone_id.number(),
            rounds: c.params.rounds,
            input_format: c.params.input_format.code(),
            original_pit_count: c.original_pit_count,
            remainder_pits: c.remainder.len() as u64,
            total_pits: c.total_pits() as u64,
        };
        Ok(())
    })
}

/// # Safety
/// `container` must be null or come from [`mv2_container_parse`] and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn mv2_container_free(container: *mut Mv2Container) {
    if !container.is_null() {
        drop(Box::from_raw(container));
    }
}

/// Builds the shortest-first codebook for `(radix, width)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mv2_codebook_new(
    radix: u16,
    width: u16,
    out: *mut *mut Mv2Codebook,
) -> Mv2Status {
    guard(|| {
        non_null(out, "out")?;
        let r = Radix::new(radix as u64).or_status()?;
        let w = Width::new(width as u64).or_status()?;
        let book = CodeBook::build(r, w).or_status()?;
        *out = Box::into_raw(Box::new(Mv2Codebook(book)));
        Ok(())
    })
}

/// # Safety
/// `book` must be null or come from [`mv2_codebook_new`] and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn mv2_codebook_free(book: *mut Mv2Codebook) {
    if !book.is_null() {
        drop(Box::from_raw(book));
    }
}

/// Code length and code value for element `value`.
///
/// # Safety
/// All pointers must be valid; `book` must come from [`mv2_codebook_new`].
#[no_mangle]
pub unsafe extern "C" fn mv2_codebook_forward(
    book: *const Mv2Codebook,
    value: u64,
    code_len: *mut u32,
    code: *mut u64,
) -> Mv2Status {
    guard(|| {
        non_null(book, "book")?;
        non_null(code_len, "code_len")?;
        non_null(code, "code")?;
        let (len, c) = (*book)
            .0
            .forward(value)
            .ok_or_else(|| fail(Mv2Status::NotFound, format!("element {value} out of range")))?;
        *code_len = len as u32;
        *code = c;
        Ok(())
    })
}

/// Element for a `(code_len, code)` pair.
///
/// # Safety
/// All pointers must be valid; `book` must come from [`mv2_codebook_new`].
#[no_mangle]
pub unsafe extern "C" fn mv2_codebook_inverse(
    book: *const Mv2Codebook,
    code_len: u32,
    code: u64,
    value: *mut u64,
) -> Mv2Status {
    guard(|| {
        non_null(book, "book")?;
        non_null(value, "value")?;
        *value = (*book).0.inverse(code_len as usize, code).ok_or_else(|| {
            fail(
                Mv2Status::NotFound,
                format!("code ({code_len}, {code}) not in codebook"),
            )
        })?;
        Ok(())
    })
}

/// Writes up to `cap` per-length code counts (index 0 is length 1) and
/// returns the number of lengths in use. Returns 0 for a null handle.
///
/// # Safety
/// `book` must come from [`mv2_codebook_new`]; `counts` must hold `cap`
/// writable elements (or be null when `cap == 0`).
#[no_mangle]
pub unsafe extern "C" fn mv2_codebook_histogram(
    book: *const Mv2Codebook,
    counts: *mut u64,
    cap: usize,
) -> usize {
    let Some(book) = book.as_ref() else { return 0 };
    let hist = book.0.histogram();
    if !counts.is_null() {
        for (i, &c) in hist.values().take(cap).enumerate() {
            *counts.add(i) = c;
        }
    }
    hist.len()
}

/// Closed-form main-file ratio of a clone as `numer / denom`.
/// Fails with `Overflow` when either part exceeds 64 bits.
///
/// # Safety
/// `numer` and `denom` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mv2_ratio(
    clone_id: u8,
    radix: u16,
    width: u16,
    numer: *mut u64,
    denom: *mut u64,
) -> Mv2Status {
    guard(|| {
        non_null(numer, "numer")?;
        non_null(denom, "denom")?;
        let r = Radix::new(radix as u64).or_status()?;
        let w = Width::new(width as u64).or_status()?;
        let k = match CloneId::try_from(clone_id).or_status()? {
            CloneId::LeadingZeros => ratio_clone1(r, w),
            CloneId::MsbSplit => ratio_clone2(r, w).or_status()?,
            CloneId::Codebook => ratio_clone3(r, w),
        };
        match (k.numer().to_u64(), k.denom().to_u64()) {
            (Some(n), Some(d)) => {
                *numer = n;
                *denom = d;
                Ok(())
            }
            _ => Err(fail(
                Mv2Status::Overflow,
                format!("{k} does not fit in 64 bits"),
            )),
        }
    })
}

/// Runs the main-file verification and returns the JSON report in `out_json`
/// (release with [`mv2_string_free`]). `regressions` receives the number of
/// regressions found; zero means every entry matched or is a known erratum.
///
/// # Safety
/// `out_json` and `regressions` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mv2_verify_json(
    radix: u16,
    width: u16,
    out_json: *mut *mut c_char,
    regressions: *mut u32,
) -> Mv2Status {
    guard(|| {
        non_null(out_json, "out_json")?;
        non_null(regressions, "regressions")?;
        let r = Radix::new(radix as u64).or_status()?;
        let w = Width::new(width as u64).or_status()?;
        let report = mv2::verify(r, w, &[]).or_status()?;
        let text =
            serde_json::to_string(&report).map_err(|e| fail(Mv2Status::Panic, e.to_string()))?;
        let text = CString::new(text).map_err(|e| fail(Mv2Status::Panic, e.to_string()))?;
        *regressions = report.regressions().len() as u32;
        *out_json = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mv2_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Length of a NUL-terminated string returned by this library, for callers
/// without `strlen`.
///
/// # Safety
/// `s` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mv2_string_len(s: *const c_char) -> usize {
    if s.is_null() {
        return 0;
    }
    CStr::from_ptr(s).to_bytes().len()
}
