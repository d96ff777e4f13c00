//! C ABI over the `bqc` simulator.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`BqcStatus`]; on failure [`bqc_last_error`] describes what went wrong on
//! the calling thread. Strings returned as `char *` must be released with
//! [`bqc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bqc::cli::{parse_circuit, parse_policy};
use bqc::compile::{Circuit, Protocol};
use bqc::engine::{parse_input, reference_output, run_in_process, AdversaryPolicy, SessionConfig, SessionOutput};
use bqc::simcore::fidelity_up_to_phase;
use bqc::verify::{detection_rate, DetectionSetup};
use bqc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BqcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Config = 4,
    Protocol = 5,
    Transport = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// A parsed source circuit.
pub struct BqcCircuit {
    inner: Circuit,
}

/// A finished session: the decrypted register and Bob's transcript.
pub struct BqcSession {
    output: SessionOutput,
    fidelity: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> BqcStatus {
    match err {
        Error::Parse { .. } => BqcStatus::Parse,
        Error::Protocol(_) | Error::WireFormat(_) | Error::PendingSCorrection(_) => BqcStatus::Protocol,
        Error::Transport(_) => BqcStatus::Transport,
        _ => BqcStatus::Config,
    }
}

fn fail(err: Error) -> BqcStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> BqcStatus) -> BqcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            BqcStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, BqcStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(BqcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        BqcStatus::InvalidUtf8
    })
}

fn protocol_of(n: u8) -> Result<Protocol, BqcStatus> {
    Protocol::try_from(n).map_err(fail)
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bqc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bqc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bqc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses circuit-file text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bqc_circuit_parse(text: *const c_char, out: *mut *mut BqcCircuit) -> BqcStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return BqcStatus::NullPointer;
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_circuit(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(BqcCircuit { inner: c }));
                BqcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of wires, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bqc_circuit_num_wires(circuit: *const BqcCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.num_wires())
}

/// Number of gates, or 0 for NULL.
///
/// # Safety
/// `circuit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bqc_circuit_size(circuit: *const BqcCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.inner.size())
}

/// # Safety
/// `circuit` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn bqc_circuit_free(circuit: *mut BqcCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Runs an honest in-process session. `protocol` is 1 or 2. `input` holds one
/// of `0 1 + -` per wire, or is NULL for all zeros.
///
/// # Safety
/// `circuit` must be a live handle, `input` NULL or a NUL-terminated string,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_run(
    circuit: *const BqcCircuit,
    protocol: u8,
    alice_seed: u64,
    bob_seed: u64,
    input: *const c_char,
    out: *mut *mut BqcSession,
) -> BqcStatus {
    guard(|| {
        let (Some(circuit), false) = (circuit.as_ref(), out.is_null()) else {
            set_error("null argument");
            return BqcStatus::NullPointer;
        };
        let protocol = match protocol_of(protocol) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let spec = if input.is_null() {
            "0".repeat(circuit.inner.num_wires())
        } else {
            match read_str(input) {
                Ok(s) => s.to_string(),
                Err(s) => return s,
            }
        };
        let run = || -> bqc::Result<BqcSession> {
            let qubits = parse_input(&spec)?;
            let config = SessionConfig::new(protocol, alice_seed, bob_seed);
            let output = run_in_process(&circuit.inner, &qubits, &config, AdversaryPolicy::None)?;
            let expected = reference_output(&circuit.inner, &qubits, output.output.num_wires())?;
            let fidelity = fidelity_up_to_phase(&output.output, &expected)?;
            Ok(BqcSession { output, fidelity })
        };
        match run() {
            Ok(s) => {
                *out = Box::into_raw(Box::new(s));
                BqcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Fidelity of the decrypted output against direct simulation, or -1 for
/// NULL.
///
/// # Safety
/// `session` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_fidelity(session: *const BqcSession) -> f64 {
    session.as_ref().map_or(-1.0, |s| s.fidelity)
}

/// Width of the returned register, padding included.
///
/// # Safety
/// `session` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_num_wires(session: *const BqcSession) -> usize {
    session.as_ref().map_or(0, |s| s.output.output.num_wires())
}

/// Writes the `2^wires` basis probabilities of the decrypted register.
///
/// # Safety
/// `session` must be a live handle and `probs` point at `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_probabilities(
    session: *const BqcSession,
    probs: *mut f64,
    len: usize,
) -> BqcStatus {
    guard(|| {
        let (Some(s), false) = (session.as_ref(), probs.is_null()) else {
            set_error("null argument");
            return BqcStatus::NullPointer;
        };
        let amps = s.output.output.amplitudes();
        if len < amps.len() {
            set_error(format!("need room for {} probabilities", amps.len()));
            return BqcStatus::BufferTooSmall;
        }
        let dst = std::slice::from_raw_parts_mut(probs, amps.len());
        for (d, a) in dst.iter_mut().zip(amps) {
            *d = a.norm_sqr();
        }
        BqcStatus::Ok
    })
}

/// Bob's transcript as a JSON array, or NULL for a NULL session. Release
/// with [`bqc_string_free`].
///
/// # Safety
/// `session` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_transcript_json(session: *const BqcSession) -> *mut c_char {
    let Some(s) = session.as_ref() else {
        return ptr::null_mut();
    };
    let json = serde_json::to_string(s.output.transcript.entries()).unwrap_or_default();
    CString::new(json).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `session` must be NULL or a live handle; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn bqc_session_free(session: *mut BqcSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Trap detection experiment on `circuit` with `traps` extra wires and
/// `reps` repetitions. `policy` uses the CLI names (NULL means
/// `single_random_wire`). `formula` receives the closed-form prediction, or
/// NaN when the policy has none.
///
/// # Safety
/// `circuit` must be a live handle, `policy` NULL or a NUL-terminated string,
/// and `rate` and `formula` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn bqc_detection_rate(
    circuit: *const BqcCircuit,
    protocol: u8,
    traps: usize,
    reps: usize,
    policy: *const c_char,
    trials: usize,
    seed: u64,
    rate: *mut f64,
    formula: *mut f64,
) -> BqcStatus {
    guard(|| {
        let (Some(circuit), false, false) = (circuit.as_ref(), rate.is_null(), formula.is_null()) else {
            set_error("null argument");
            return BqcStatus::NullPointer;
        };
        let protocol = match protocol_of(protocol) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let policy = if policy.is_null() {
            AdversaryPolicy::SingleRandomWire
        } else {
            let name = match read_str(policy) {
                Ok(s) => s,
                Err(s) => return s,
            };
            match parse_policy(name) {
                Ok(p) => p,
                Err(m) => return fail(Error::Config(m)),
            }
        };
        let input = match parse_input(&"0".repeat(circuit.inner.num_wires())) {
            Ok(i) => i,
            Err(e) => return fail(e),
        };
        let setup = DetectionSetup { protocol, n_d: traps, s: reps, policy, trials, seed };
        match detection_rate(&circuit.inner, &input, &setup) {
            Ok(r) => {
                *rate = r.rate;
                *formula = r.formula.unwrap_or(f64::NAN);
                BqcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
