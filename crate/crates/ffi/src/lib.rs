//! C ABI over the `scma` crate.
//!
//! Codebooks are opaque handles created by `scma_codebook_default` or
//! `scma_codebook_load` and released with `scma_codebook_free`. Complex
//! buffers are interleaved `re, im` doubles. Every fallible call returns a
//! `ScmaStatus`; on failure a message for the calling thread is available
//! from `scma_last_error_message` until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use scma::belief::PriorSet;
use scma::channel::{ChannelRealization, ReceivedBlock};
use scma::codebook::{default_codebook, Codebook, CodebookError, FactorGraph};
use scma::complexity::{complexity_order, ComplexityError, ComplexityProfile, Receiver};
use scma::detector::{Detector, Epa, Mpa};
use scma::epa::EpaOptions;

pub const SCMA_DETECTOR_MPA: u32 = 0;
pub const SCMA_DETECTOR_EPA: u32 = 1;

pub const SCMA_RECEIVER_MMSE_SIC: u32 = 0;
pub const SCMA_RECEIVER_MPA: u32 = 1;
pub const SCMA_RECEIVER_SIC_MPA: u32 = 2;
pub const SCMA_RECEIVER_EPA: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidCodebook = 5,
    Dimension = 6,
    Overflow = 7,
    Panic = 8,
}

/// Opaque codebook handle.
pub struct ScmaCodebook {
    cb: Codebook,
    fg: FactorGraph,
}

impl ScmaCodebook {
    fn new(cb: Codebook) -> Box<Self> {
        let fg = FactorGraph::new(&cb);
        Box::new(ScmaCodebook { cb, fg })
    }
}

/// Detector selection for `scma_decode`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ScmaDecodeOptions {
    /// `SCMA_DETECTOR_MPA` or `SCMA_DETECTOR_EPA`.
    pub detector: u32,
    /// Inner iterations, at least 1.
    pub iterations: u32,
    /// EPA damping in (0, 1]; ignored by MPA.
    pub damping: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (ScmaStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ScmaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScmaStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            ScmaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    (ScmaStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    (ScmaStatus::InvalidArgument, msg.into())
}

fn codebook_failure(e: CodebookError) -> Failure {
    let status = match e {
        CodebookError::Io(_) => ScmaStatus::Io,
        CodebookError::Parse(_) => ScmaStatus::Parse,
        CodebookError::BitLength { .. } | CodebookError::BitValue { .. } | CodebookError::UserIndex { .. } => {
            ScmaStatus::InvalidArgument
        }
        _ => ScmaStatus::InvalidCodebook,
    };
    (status, e.to_string())
}

unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

fn complex_from(interleaved: &[f64]) -> Vec<Complex64> {
    interleaved.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

unsafe fn handle<'a>(cb: *const ScmaCodebook) -> Result<&'a ScmaCodebook, Failure> {
    cb.as_ref().ok_or_else(|| null("codebook"))
}

unsafe fn store(out: *mut *mut ScmaCodebook, cb: Codebook) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(ScmaCodebook::new(cb));
    Ok(())
}

/// Message of the last failing call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn scma_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds the generated regular codebook.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn scma_codebook_default(
    users: usize,
    resources: usize,
    size: usize,
    degree: usize,
    out: *mut *mut ScmaCodebook,
) -> ScmaStatus {
    guard(|| store(out, default_codebook(users, resources, size, degree).map_err(codebook_failure)?))
}

/// Loads a codebook JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn scma_codebook_load(path: *const c_char, out: *mut *mut ScmaCodebook) -> ScmaStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8"))?;
        store(out, Codebook::load(path).map_err(codebook_failure)?)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `cb` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn scma_codebook_free(cb: *mut ScmaCodebook) {
    if !cb.is_null() {
        drop(Box::from_raw(cb));
    }
}

/// Writes K, N and M. Any output pointer may be null.
///
/// # Safety
/// `cb` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn scma_codebook_dims(
    cb: *const ScmaCodebook,
    users: *mut usize,
    resources: *mut usize,
    size: *mut usize,
) -> ScmaStatus {
    guard(|| {
        let h = handle(cb)?;
        for (ptr, v) in [(users, h.cb.users()), (resources, h.cb.resources()), (size, h.cb.size())] {
            if let Some(p) = ptr.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Maps `log2(M)` bits (0 or 1, most significant first) of one user to its
/// N-dimensional codeword, written as `2 * N` interleaved doubles.
///
/// # Safety
/// `bits` must hold `n_bits` bytes and `out` `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn scma_encode(
    cb: *const ScmaCodebook,
    user: usize,
    bits: *const u8,
    n_bits: usize,
    out: *mut f64,
    out_len: usize,
) -> ScmaStatus {
    guard(|| {
        let h = handle(cb)?;
        let bits = slice(bits, n_bits, "bits")?;
        let out = slice_mut(out, out_len, "out")?;
        if out_len != 2 * h.cb.resources() {
            return Err((
                ScmaStatus::Dimension,
                format!("output holds {out_len} doubles, codeword needs {}", 2 * h.cb.resources()),
            ));
        }
        let x = h.cb.encode(bits, user).map_err(codebook_failure)?;
        for (o, v) in out.chunks_exact_mut(2).zip(x) {
            o[0] = v.re;
            o[1] = v.im;
        }
        Ok(())
    })
}

/// Default options: EPA, three inner iterations, no damping.
#[no_mangle]
pub extern "C" fn scma_decode_options_default() -> ScmaDecodeOptions {
    ScmaDecodeOptions {
        detector: SCMA_DETECTOR_EPA,
        iterations: scma::epa::DEFAULT_INNER_ITERATIONS as u32,
        damping: 1.0,
    }
}

/// Detects one block and writes posterior LLRs, user-major, `K * log2(M)`
/// values. Positive LLRs favour bit 1.
///
/// `y` holds `antennas * N` complex samples `[antenna][resource]`; `gains`
/// holds `antennas * K * N` complex gains `[antenna][user][resource]`.
/// `prior_llrs` may be null for uniform priors, otherwise `K * log2(M)`
/// values.
///
/// # Safety
/// Every non-null pointer must reference the number of elements stated.
#[no_mangle]
pub unsafe extern "C" fn scma_decode(
    cb: *const ScmaCodebook,
    options: *const ScmaDecodeOptions,
    antennas: usize,
    y: *const f64,
    gains: *const f64,
    noise_var: f64,
    prior_llrs: *const f64,
    llr_out: *mut f64,
    llr_len: usize,
) -> ScmaStatus {
    guard(|| {
        let h = handle(cb)?;
        let opts = options.as_ref().ok_or_else(|| null("options"))?;
        let (k, n, bits) = (h.cb.users(), h.cb.resources(), h.cb.bits_per_codeword());
        if llr_len != k * bits {
            return Err((
                ScmaStatus::Dimension,
                format!("LLR buffer holds {llr_len} values, decode yields {}", k * bits),
            ));
        }
        let y_len = antennas.checked_mul(n).ok_or_else(|| invalid("antenna count too large"))?;
        let y = complex_from(slice(y, 2 * y_len, "y")?);
        let gains = complex_from(slice(gains, 2 * y_len * k, "gains")?);
        let priors = if prior_llrs.is_null() {
            PriorSet::zeros(k, bits)
        } else {
            PriorSet::from_llrs(k, bits, slice(prior_llrs, k * bits, "prior_llrs")?.to_vec())
        };
        let out = slice_mut(llr_out, llr_len, "llr_out")?;

        let dim = |e: scma::channel::ChannelError| (ScmaStatus::Dimension, e.to_string());
        let chan = ChannelRealization::new(antennas, k, n, gains, noise_var).map_err(dim)?;
        let y = ReceivedBlock::new(antennas, n, y).map_err(dim)?;
        let detector: Box<dyn Detector> = match opts.detector {
            SCMA_DETECTOR_MPA => Box::new(Mpa {
                iterations: opts.iterations as usize,
            }),
            SCMA_DETECTOR_EPA => Box::new(Epa {
                options: EpaOptions {
                    n_in: opts.iterations as usize,
                    damping: opts.damping,
                    ..EpaOptions::default()
                },
            }),
            other => return Err(invalid(format!("unknown detector {other}"))),
        };
        let det = detector
            .detect(&y, &chan, &priors, &h.cb, &h.fg)
            .map_err(|e| invalid(e.to_string()))?;
        out.copy_from_slice(&det.llrs);
        Ok(())
    })
}

/// Dominant-term complexity order of one receiver type (one of the
/// `SCMA_RECEIVER_*` constants). Fails with `Overflow` when the order does
/// not fit 64 bits.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn scma_complexity_order(
    receiver: u32,
    n_r: u32,
    n: u32,
    k: u32,
    n_iter: u32,
    m: u32,
    m_p: u32,
    d_f: u32,
    d_s: u32,
    out: *mut u64,
) -> ScmaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let receiver = match receiver {
            SCMA_RECEIVER_MMSE_SIC => Receiver::MmseSic,
            SCMA_RECEIVER_MPA => Receiver::Mpa,
            SCMA_RECEIVER_SIC_MPA => Receiver::SicMpa,
            SCMA_RECEIVER_EPA => Receiver::Epa,
            other => return Err(invalid(format!("unknown receiver {other}"))),
        };
        let profile = ComplexityProfile {
            n_r,
            n,
            k,
            n_iter,
            m,
            m_p,
            d_f,
            d_s,
        };
        let order = complexity_order(&profile, receiver).map_err(|e| match e {
            ComplexityError::Overflow => (ScmaStatus::Overflow, e.to_string()),
            _ => invalid(e.to_string()),
        })?;
        *out = u64::try_from(order).map_err(|_| (ScmaStatus::Overflow, "order exceeds 64 bits".to_string()))?;
        Ok(())
    })
}
