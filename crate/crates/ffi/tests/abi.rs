use std::ffi::{CStr, CString};
use std::path::Path;
use std::ptr;

use scma_ffi::*;

fn default_handle() -> *mut ScmaCodebook {
    let mut cb = ptr::null_mut();
    assert_eq!(unsafe { scma_codebook_default(6, 4, 4, 2, &mut cb) }, ScmaStatus::Ok);
    assert!(!cb.is_null());
    cb
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(scma_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn dims_of_default_codebook() {
    let cb = default_handle();
    let (mut k, mut n, mut m) = (0, 0, 0);
    assert_eq!(unsafe { scma_codebook_dims(cb, &mut k, &mut n, &mut m) }, ScmaStatus::Ok);
    assert_eq!((k, n, m), (6, 4, 4));
    assert_eq!(
        unsafe { scma_codebook_dims(cb, ptr::null_mut(), &mut n, ptr::null_mut()) },
        ScmaStatus::Ok
    );
    unsafe { scma_codebook_free(cb) };
}

#[test]
fn infeasible_parameters_report_a_message() {
    let mut cb = ptr::null_mut();
    assert_eq!(
        unsafe { scma_codebook_default(6, 4, 3, 2, &mut cb) },
        ScmaStatus::InvalidCodebook
    );
    assert!(cb.is_null());
    assert!(last_error().contains("power of two"));
}

#[test]
fn load_shipped_file_and_missing_file() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/default_codebook.json");
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut cb = ptr::null_mut();
    assert_eq!(unsafe { scma_codebook_load(c.as_ptr(), &mut cb) }, ScmaStatus::Ok);
    unsafe { scma_codebook_free(cb) };

    let missing = CString::new("/nonexistent/codebook.json").unwrap();
    assert_eq!(unsafe { scma_codebook_load(missing.as_ptr(), &mut cb) }, ScmaStatus::Io);
    assert_eq!(unsafe { scma_codebook_load(ptr::null(), &mut cb) }, ScmaStatus::NullPointer);
}

#[test]
fn encode_writes_interleaved_codeword() {
    let cb = default_handle();
    let mut out = [f64::NAN; 8];
    let bits = [0u8, 0];
    assert_eq!(unsafe { scma_encode(cb, 0, bits.as_ptr(), 2, out.as_mut_ptr(), 8) }, ScmaStatus::Ok);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    assert!((out[0] - a).abs() < 1e-15 && out[1].abs() < 1e-15);
    assert_eq!(&out[4..], &[0.0; 4]);

    assert_eq!(
        unsafe { scma_encode(cb, 0, bits.as_ptr(), 2, out.as_mut_ptr(), 6) },
        ScmaStatus::Dimension
    );
    assert_eq!(
        unsafe { scma_encode(cb, 9, bits.as_ptr(), 2, out.as_mut_ptr(), 8) },
        ScmaStatus::InvalidArgument
    );
    unsafe { scma_codebook_free(cb) };
}

/// Encodes `bits` for every user, superposes with unit gains and decodes.
fn noiseless_roundtrip(detector: u32) -> Vec<f64> {
    let cb = default_handle();
    let bits: [[u8; 2]; 6] = [[0, 1], [1, 1], [0, 0], [1, 0], [0, 1], [1, 1]];
    let mut y = [0.0; 8];
    for (k, b) in bits.iter().enumerate() {
        let mut x = [0.0; 8];
        assert_eq!(unsafe { scma_encode(cb, k, b.as_ptr(), 2, x.as_mut_ptr(), 8) }, ScmaStatus::Ok);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += xi;
        }
    }
    let gains: Vec<f64> = (0..24).flat_map(|_| [1.0, 0.0]).collect();
    let opts = ScmaDecodeOptions {
        detector,
        ..scma_decode_options_default()
    };
    let mut llr = [0.0; 12];
    let status = unsafe {
        scma_decode(cb, &opts, 1, y.as_ptr(), gains.as_ptr(), 1e-3, ptr::null(), llr.as_mut_ptr(), 12)
    };
    assert_eq!(status, ScmaStatus::Ok);
    unsafe { scma_codebook_free(cb) };
    let decided: Vec<u8> = llr.iter().map(|&l| u8::from(l > 0.0)).collect();
    assert_eq!(decided, bits.concat());
    llr.to_vec()
}

#[test]
fn decode_recovers_noiseless_block() {
    noiseless_roundtrip(SCMA_DETECTOR_MPA);
    noiseless_roundtrip(SCMA_DETECTOR_EPA);
}

#[test]
fn decode_rejects_bad_arguments() {
    let cb = default_handle();
    let y = [0.0; 8];
    let gains = [1.0; 48];
    let mut llr = [0.0; 12];
    let mut opts = scma_decode_options_default();
    let call = |opts: &ScmaDecodeOptions, llr: &mut [f64], len: usize| unsafe {
        scma_decode(cb, opts, 1, y.as_ptr(), gains.as_ptr(), 0.1, ptr::null(), llr.as_mut_ptr(), len)
    };
    assert_eq!(call(&opts, &mut llr, 11), ScmaStatus::Dimension);
    opts.detector = 7;
    assert_eq!(call(&opts, &mut llr, 12), ScmaStatus::InvalidArgument);
    assert!(last_error().contains("unknown detector"));
    opts = scma_decode_options_default();
    opts.iterations = 0;
    assert_eq!(call(&opts, &mut llr, 12), ScmaStatus::InvalidArgument);
    opts.iterations = 3;
    opts.damping = 0.0;
    assert_eq!(call(&opts, &mut llr, 12), ScmaStatus::InvalidArgument);
    let status = unsafe {
        scma_decode(cb, &opts, 1, y.as_ptr(), gains.as_ptr(), -1.0, ptr::null(), llr.as_mut_ptr(), 12)
    };
    assert_eq!(status, ScmaStatus::Dimension);
    assert_eq!(
        unsafe { scma_decode(ptr::null(), &opts, 1, y.as_ptr(), gains.as_ptr(), 0.1, ptr::null(), llr.as_mut_ptr(), 12) },
        ScmaStatus::NullPointer
    );
    unsafe { scma_codebook_free(cb) };
}

#[test]
fn complexity_orders() {
    let mut out = 0u64;
    let status = unsafe { scma_complexity_order(SCMA_RECEIVER_MPA, 4, 4, 12, 9, 4, 3, 6, 3, &mut out) };
    assert_eq!((status, out), (ScmaStatus::Ok, 104_976));
    let status = unsafe { scma_complexity_order(SCMA_RECEIVER_EPA, 4, 4, 12, 9, 16, 9, 6, 2, &mut out) };
    assert_eq!((status, out), (ScmaStatus::Ok, 13_824));
    let status = unsafe { scma_complexity_order(SCMA_RECEIVER_MPA, 4, 4, 12, 9, 256, 256, 9, 1, &mut out) };
    assert_eq!(status, ScmaStatus::Overflow);
    let status = unsafe { scma_complexity_order(42, 4, 4, 12, 9, 4, 3, 6, 3, &mut out) };
    assert_eq!(status, ScmaStatus::InvalidArgument);
    let status = unsafe { scma_complexity_order(SCMA_RECEIVER_MPA, 4, 4, 12, 9, 4, 5, 6, 3, &mut out) };
    assert_eq!(status, ScmaStatus::InvalidArgument);
}

#[test]
fn header_declares_the_api_and_parses_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/scma.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "scma_codebook_default",
        "scma_codebook_load",
        "scma_codebook_free",
        "scma_codebook_dims",
        "scma_encode",
        "scma_decode",
        "scma_complexity_order",
        "scma_last_error_message",
        "SCMA_STATUS_OK",
        "typedef struct ScmaCodebook ScmaCodebook",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // Only checked where a C compiler is available.
    if let Ok(out) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
