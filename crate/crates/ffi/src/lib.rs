//! C ABI for stegonet.
//!
//! Every fallible function returns a [`StegonetStatus`]. On failure the
//! message is kept per thread and can be read with
//! [`stegonet_last_error_message`]. Models are opaque handles released with
//! [`stegonet_model_free`]; strings and buffers handed out by the library are
//! released with [`stegonet_string_free`] and [`stegonet_buffer_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stegonet::image::{embed_image, extract_image, read_pgm, write_pgm};
use stegonet::training::preset::{run_preset, Preset};
use stegonet::{
    BitVector, DenseNetwork, Error, MatrixCode, NeuralCodec, OutputThreshold, Scheme, Task,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StegonetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Capacity = 4,
    Parse = 5,
    Io = 6,
    Diverged = 7,
    Unsupported = 8,
    /// Training finished but the network is not exact.
    NotExact = 9,
    Panic = 10,
}

/// Trained or loaded network.
pub struct StegonetModel {
    net: DenseNetwork,
}

/// Byte buffer owned by the library.
#[repr(C)]
pub struct StegonetBuffer {
    pub data: *mut u8,
    pub len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> StegonetStatus {
    match e {
        Error::Shape { .. } => StegonetStatus::Shape,
        Error::Capacity { .. } => StegonetStatus::Capacity,
        Error::Parse { .. } | Error::Pgm(_) => StegonetStatus::Parse,
        Error::Io(_) => StegonetStatus::Io,
        Error::Diverged { .. } => StegonetStatus::Diverged,
        Error::Unsupported(_) | Error::SpaceTooLarge { .. } => StegonetStatus::Unsupported,
        _ => StegonetStatus::InvalidArgument,
    }
}

struct Fail(StegonetStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> StegonetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StegonetStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            StegonetStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(StegonetStatus::NullPointer, format!("{} is null", what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            StegonetStatus::InvalidArgument,
            format!("{} is not UTF-8", what),
        )
    })
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn bits(values: &[u8], what: &str) -> Result<BitVector, Fail> {
    BitVector::new(values.to_vec())
        .map_err(|e| Fail(StegonetStatus::InvalidArgument, format!("{}: {}", what, e)))
}

fn scheme_arg(text: &str) -> Result<Scheme, Fail> {
    if text == "lsb" {
        return Ok(Scheme::lsb());
    }
    let k = text
        .strip_prefix("matrix:")
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| {
            Fail(
                StegonetStatus::InvalidArgument,
                format!("unknown scheme {:?}", text),
            )
        })?;
    Ok(Scheme::matrix(k)?)
}

fn into_buffer(bytes: Vec<u8>) -> StegonetBuffer {
    let mut boxed = bytes.into_boxed_slice();
    let buf = StegonetBuffer {
        data: boxed.as_mut_ptr(),
        len: boxed.len(),
    };
    std::mem::forget(boxed);
    buf
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stegonet_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn stegonet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `buf` must be NULL or point to a buffer filled by this library.
#[no_mangle]
pub unsafe extern "C" fn stegonet_buffer_free(buf: *mut StegonetBuffer) {
    if buf.is_null() || (*buf).data.is_null() {
        return;
    }
    let b = &mut *buf;
    drop(Box::from_raw(std::ptr::slice_from_raw_parts_mut(
        b.data, b.len,
    )));
    b.data = ptr::null_mut();
    b.len = 0;
}

#[no_mangle]
pub extern "C" fn stegonet_lsb_embed(x: u32, m: u8) -> u32 {
    stegonet::lsb_embed(x, m & 1)
}

#[no_mangle]
pub extern "C" fn stegonet_lsb_extract(y: u32) -> u8 {
    stegonet::lsb_extract(y)
}

/// Syndrome of `n = 2^k - 1` cover bits.
///
/// # Safety
/// `x` must point to `n` bytes and `out` to a writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn stegonet_mc_syndrome(
    k: u32,
    x: *const u8,
    n: usize,
    out: *mut usize,
) -> StegonetStatus {
    guard(|| {
        let code = MatrixCode::new(k)?;
        let x = bits(slice_arg(x, n, "x")?, "x")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = stegonet::mc_syndrome(&x, code)?;
        Ok(())
    })
}

/// Embeds `k` message bits into `n = 2^k - 1` cover bits, writing `n` bits.
///
/// # Safety
/// `x` and `y` must hold `n` bytes, `m` must hold `k` bytes.
#[no_mangle]
pub unsafe extern "C" fn stegonet_mc_embed(
    k: u32,
    x: *const u8,
    n: usize,
    m: *const u8,
    m_len: usize,
    y: *mut u8,
) -> StegonetStatus {
    guard(|| {
        let code = MatrixCode::new(k)?;
        let x = bits(slice_arg(x, n, "x")?, "x")?;
        let m = bits(slice_arg(m, m_len, "m")?, "m")?;
        let out = stegonet::mc_embed(&x, &m, code)?;
        slice_out(y, n, "y")?.copy_from_slice(out.as_slice());
        Ok(())
    })
}

/// Extracts `k` message bits from `n = 2^k - 1` stego bits.
///
/// # Safety
/// `y` must hold `n` bytes and `m` must have room for `k` bytes.
#[no_mangle]
pub unsafe extern "C" fn stegonet_mc_extract(
    k: u32,
    y: *const u8,
    n: usize,
    m: *mut u8,
) -> StegonetStatus {
    guard(|| {
        let code = MatrixCode::new(k)?;
        let y = bits(slice_arg(y, n, "y")?, "y")?;
        let out = stegonet::mc_extract(&y, code)?;
        slice_out(m, code.k(), "m")?.copy_from_slice(out.as_slice());
        Ok(())
    })
}

/// Parses a model from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_from_text(
    text: *const c_char,
    out: *mut *mut StegonetModel,
) -> StegonetStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let net = DenseNetwork::from_document(text)?;
        *out = Box::into_raw(Box::new(StegonetModel { net }));
        Ok(())
    })
}

/// Loads a model file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_load(
    path: *const c_char,
    out: *mut *mut StegonetModel,
) -> StegonetStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Fail(StegonetStatus::Io, format!("{}: {}", path, e)))?;
        let net = DenseNetwork::from_document(&text)?;
        *out = Box::into_raw(Box::new(StegonetModel { net }));
        Ok(())
    })
}

/// Runs a named preset (`appendixA`, `appendixB`, `appendixC`, `fig2`) and
/// returns its model. The model is stored even when training did not reach
/// an exact network; the status is then `NotExact`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_train_preset(
    name: *const c_char,
    seed: u64,
    out: *mut *mut StegonetModel,
) -> StegonetStatus {
    guard(|| {
        let preset: Preset = str_arg(name, "name")?.parse()?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run_preset(preset, seed)?;
        *out = Box::into_raw(Box::new(StegonetModel { net: report.model }));
        if report.success {
            Ok(())
        } else {
            Err(Fail(
                StegonetStatus::NotExact,
                format!("{} did not reach an exact network", preset.name()),
            ))
        }
    })
}

/// # Safety
/// `model` must be NULL or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_free(model: *mut StegonetModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_input_arity(model: *const StegonetModel) -> usize {
    model.as_ref().map_or(0, |m| m.net.input_arity())
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_output_arity(model: *const StegonetModel) -> usize {
    model.as_ref().map_or(0, |m| m.net.output_arity())
}

/// Raw (unthresholded) outputs for one input vector.
///
/// # Safety
/// `input` must hold `input_len` doubles and `output` `output_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_forward(
    model: *const StegonetModel,
    input: *const f64,
    input_len: usize,
    output: *mut f64,
    output_len: usize,
) -> StegonetStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let z = model.net.forward(slice_arg(input, input_len, "input")?)?;
        if output_len != z.len() {
            return Err(Error::Shape {
                what: "output buffer",
                expected: z.len(),
                actual: output_len,
            }
            .into());
        }
        slice_out(output, output_len, "output")?.copy_from_slice(&z);
        Ok(())
    })
}

/// Text form of the model; free with [`stegonet_string_free`].
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_to_text(
    model: *const StegonetModel,
    out: *mut *mut c_char,
) -> StegonetStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(model.net.to_string())
            .expect("model text has no NUL")
            .into_raw();
        Ok(())
    })
}

/// Exhaustive error rate of the thresholded model against `task` (for
/// example `lsb:3` or `matrix-c`).
///
/// # Safety
/// `model` must be a live handle, `task` a NUL-terminated string and `rate`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_model_error_rate(
    model: *const StegonetModel,
    task: *const c_char,
    rate: *mut f64,
) -> StegonetStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let task: Task = str_arg(task, "task")?.parse()?;
        if rate.is_null() {
            return Err(null("rate"));
        }
        let codec = NeuralCodec::new(model.net.clone(), task, OutputThreshold::default())?;
        *rate = codec.exhaustive_equivalence()?.error_rate();
        Ok(())
    })
}

/// Embeds message bits into a binary PGM with `lsb` or `matrix:K`, writing the
/// stego PGM to `out`.
///
/// # Safety
/// `pgm` must hold `pgm_len` bytes, `message` `message_len` bytes of 0 or 1,
/// `scheme` must be NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stegonet_embed_pgm(
    pgm: *const u8,
    pgm_len: usize,
    scheme: *const c_char,
    message: *const u8,
    message_len: usize,
    out: *mut StegonetBuffer,
) -> StegonetStatus {
    guard(|| {
        let img = read_pgm(slice_arg(pgm, pgm_len, "pgm")?)?;
        let scheme = scheme_arg(str_arg(scheme, "scheme")?)?;
        let msg = bits(slice_arg(message, message_len, "message")?, "message")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let stego = embed_image(&img, &msg, scheme.embedder().as_ref())?;
        *out = into_buffer(write_pgm(&stego));
        Ok(())
    })
}

/// Extracts `message_len` bits from a stego PGM into `message`.
///
/// # Safety
/// `pgm` must hold `pgm_len` bytes, `scheme` must be NUL-terminated and
/// `message` must have room for `message_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn stegonet_extract_pgm(
    pgm: *const u8,
    pgm_len: usize,
    scheme: *const c_char,
    message: *mut u8,
    message_len: usize,
) -> StegonetStatus {
    guard(|| {
        let img = read_pgm(slice_arg(pgm, pgm_len, "pgm")?)?;
        let scheme = scheme_arg(str_arg(scheme, "scheme")?)?;
        let msg = extract_image(&img, message_len, scheme.extractor().as_ref())?;
        slice_out(message, message_len, "message")?.copy_from_slice(msg.as_slice());
        Ok(())
    })
}
