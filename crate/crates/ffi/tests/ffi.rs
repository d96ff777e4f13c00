use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use bqc_ffi::*;

fn parse(text: &str) -> *mut BqcCircuit {
    let text = CString::new(text).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { bqc_circuit_parse(text.as_ptr(), &mut c) }, BqcStatus::Ok);
    c
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bqc_last_error()) }.to_str().unwrap().to_string()
}

#[test]
fn bell_session_through_handles() {
    let c = parse("WIRES 2\nH 0\nCNOT 0 1\n");
    unsafe {
        assert_eq!(bqc_circuit_num_wires(c), 2);
        assert_eq!(bqc_circuit_size(c), 2);
        for protocol in [1u8, 2] {
            let mut s = ptr::null_mut();
            assert_eq!(bqc_session_run(c, protocol, 7, 9, ptr::null(), &mut s), BqcStatus::Ok);
            assert!(bqc_session_fidelity(s) > 1.0 - 1e-9);
            assert_eq!(bqc_session_num_wires(s), 2);
            let mut probs = [0.0; 4];
            assert_eq!(bqc_session_probabilities(s, probs.as_mut_ptr(), 4), BqcStatus::Ok);
            assert!((probs[0] - 0.5).abs() < 1e-9 && (probs[3] - 0.5).abs() < 1e-9);
            assert_eq!(bqc_session_probabilities(s, probs.as_mut_ptr(), 3), BqcStatus::BufferTooSmall);
            let json = bqc_session_transcript_json(s);
            let text = CStr::from_ptr(json).to_str().unwrap().to_string();
            assert!(text.starts_with('[') && text.contains("circuit_announce"));
            bqc_string_free(json);
            bqc_session_free(s);
        }
        bqc_circuit_free(c);
    }
}

#[test]
fn errors_set_status_and_message() {
    let text = CString::new("WIRES 2\nCNOT 0\n").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { bqc_circuit_parse(text.as_ptr(), &mut c) }, BqcStatus::Parse);
    assert!(c.is_null());
    assert!(last_error().starts_with("line 2"));
    assert_eq!(unsafe { bqc_circuit_parse(ptr::null(), &mut c) }, BqcStatus::NullPointer);

    let c = parse("WIRES 1\nT 0\n");
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(bqc_session_run(c, 3, 0, 0, ptr::null(), &mut s), BqcStatus::Config);
        let bad = CString::new("01").unwrap();
        assert_eq!(bqc_session_run(c, 1, 0, 0, bad.as_ptr(), &mut s), BqcStatus::Config);
        assert_eq!(bqc_session_fidelity(ptr::null()), -1.0);
        bqc_circuit_free(c);
        bqc_circuit_free(ptr::null_mut());
    }
}

#[test]
fn detection_rate_matches_formula() {
    let c = parse("WIRES 3\nH 0\n");
    let (mut rate, mut formula) = (0.0, 0.0);
    unsafe {
        let st = bqc_detection_rate(c, 1, 1, 1, ptr::null(), 2000, 5, &mut rate, &mut formula);
        assert_eq!(st, BqcStatus::Ok);
        assert_eq!(formula, 0.25);
        assert!((rate - 0.25).abs() < 4.0 * (0.25f64 * 0.75 / 2000.0).sqrt());
        let none = CString::new("none").unwrap();
        assert_eq!(bqc_detection_rate(c, 1, 1, 1, none.as_ptr(), 100, 5, &mut rate, &mut formula), BqcStatus::Ok);
        assert_eq!(rate, 0.0);
        assert!(formula.is_nan());
        let junk = CString::new("junk").unwrap();
        assert_eq!(bqc_detection_rate(c, 1, 1, 1, junk.as_ptr(), 100, 5, &mut rate, &mut formula), BqcStatus::Config);
        bqc_circuit_free(c);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(bqc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/bqc.h");
    let header = std::fs::read_to_string(path).unwrap();
    for name in [
        "typedef struct BqcCircuit BqcCircuit;",
        "typedef struct BqcSession BqcSession;",
        "BQC_STATUS_OK = 0",
        "bqc_circuit_parse(",
        "bqc_session_run(",
        "bqc_detection_rate(",
        "bqc_last_error(",
        "bqc_string_free(",
    ] {
        assert!(header.contains(name), "{name} missing from bqc.h");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(&src, "#include \"bqc.h\"\nint main(void) { return bqc_version() == 0; }\n").unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .status()
        .expect("a C compiler is needed for this test");
    assert!(status.success());
}

#[test]
fn c_program_links_against_the_static_library() {
    // Integration tests live in target/<profile>/deps; the library sits one up.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(|d| d.parent()).unwrap().join("libbqc_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "bqc.h"
int main(void) {
    BqcCircuit *c = NULL;
    BqcSession *s = NULL;
    if (bqc_circuit_parse("WIRES 1\nT 0\n", &c) != BQC_STATUS_OK) return 1;
    if (bqc_session_run(c, 2, 1, 2, "+", &s) != BQC_STATUS_OK) return 2;
    printf("%.9f\n", bqc_session_fidelity(s));
    bqc_session_free(s);
    if (bqc_circuit_parse("WIRES 1\nQ 0\n", &c) != BQC_STATUS_PARSE) return 3;
    printf("%s\n", bqc_last_error());
    bqc_circuit_free(c);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let status = Command::new("cc")
        .args(["-std=c99", "-I", concat!(env!("CARGO_MANIFEST_DIR"), "/include")])
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "1.000000000\nline 2: unknown instruction \"Q\"\n");
}
