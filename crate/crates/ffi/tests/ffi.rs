use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use stegonet_ffi::*;

fn last_error() -> String {
    let p = stegonet_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn lsb_functions() {
    assert_eq!(stegonet_lsb_embed(200, 1), 201);
    assert_eq!(stegonet_lsb_embed(201, 0), 200);
    assert_eq!(stegonet_lsb_extract(201), 1);
}

#[test]
fn matrix_coding_round_trip() {
    let x = [1u8, 0, 1];
    let mut y = [0u8; 3];
    let mut m = [0u8; 2];
    unsafe {
        assert_eq!(
            stegonet_mc_embed(2, x.as_ptr(), 3, [1u8, 1].as_ptr(), 2, y.as_mut_ptr()),
            StegonetStatus::Ok
        );
        assert_eq!(
            stegonet_mc_extract(2, y.as_ptr(), 3, m.as_mut_ptr()),
            StegonetStatus::Ok
        );
        let mut s = 0usize;
        assert_eq!(
            stegonet_mc_syndrome(2, y.as_ptr(), 3, &mut s),
            StegonetStatus::Ok
        );
        assert_eq!(s, 3);
    }
    assert_eq!(m, [1, 1]);
    assert!(x.iter().zip(&y).filter(|(a, b)| a != b).count() <= 1);
}

#[test]
fn errors_set_status_and_message() {
    let mut y = [0u8; 3];
    unsafe {
        let status = stegonet_mc_embed(
            2,
            [1u8, 0].as_ptr(),
            2,
            [1u8, 1].as_ptr(),
            2,
            y.as_mut_ptr(),
        );
        assert_eq!(status, StegonetStatus::Shape);
        assert!(!last_error().is_empty());

        let status = stegonet_mc_embed(
            2,
            [2u8, 0, 0].as_ptr(),
            3,
            [1u8, 1].as_ptr(),
            2,
            y.as_mut_ptr(),
        );
        assert_eq!(status, StegonetStatus::InvalidArgument);

        assert_eq!(
            stegonet_mc_extract(0, y.as_ptr(), 3, ptr::null_mut()),
            StegonetStatus::InvalidArgument
        );
        assert_eq!(
            stegonet_mc_syndrome(2, ptr::null(), 3, ptr::null_mut()),
            StegonetStatus::NullPointer
        );
        assert!(last_error().contains("null"));
    }
}

const PERFECT_LSB: &str =
    "fnn v1\nlayers 2 1\nactivations linear\nbias 1\nw 1 1 1 0.0\nw 1 2 1 1.0\nw 1 3 1 0.0\n";

#[test]
fn model_handle_lifecycle() {
    let text = CString::new(PERFECT_LSB).unwrap();
    let task = CString::new("lsb:1").unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(
            stegonet_model_from_text(text.as_ptr(), &mut model),
            StegonetStatus::Ok
        );
        assert_eq!(stegonet_model_input_arity(model), 2);
        assert_eq!(stegonet_model_output_arity(model), 1);

        let mut z = [0.0f64];
        assert_eq!(
            stegonet_model_forward(model, [0.0, 1.0].as_ptr(), 2, z.as_mut_ptr(), 1),
            StegonetStatus::Ok
        );
        assert_eq!(z[0], 1.0);
        assert_eq!(
            stegonet_model_forward(model, [0.0].as_ptr(), 1, z.as_mut_ptr(), 1),
            StegonetStatus::Shape
        );
        assert_eq!(
            stegonet_model_forward(model, [0.0, 1.0].as_ptr(), 2, z.as_mut_ptr(), 2),
            StegonetStatus::Shape
        );

        let mut rate = -1.0;
        assert_eq!(
            stegonet_model_error_rate(model, task.as_ptr(), &mut rate),
            StegonetStatus::Ok
        );
        assert_eq!(rate, 0.0);

        let mut out = ptr::null_mut();
        assert_eq!(stegonet_model_to_text(model, &mut out), StegonetStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), PERFECT_LSB);
        stegonet_string_free(out);
        stegonet_model_free(model);
        stegonet_model_free(ptr::null_mut());
    }
}

#[test]
fn bad_model_text_is_parse_error() {
    let text = CString::new("fnn v2\n").unwrap();
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(
            stegonet_model_from_text(text.as_ptr(), &mut model),
            StegonetStatus::Parse
        );
        let missing = CString::new("/nonexistent/model.fnn").unwrap();
        assert_eq!(
            stegonet_model_load(missing.as_ptr(), &mut model),
            StegonetStatus::Io
        );
    }
    assert!(model.is_null());
}

#[test]
fn train_preset_through_ffi() {
    let name = CString::new("appendixA").unwrap();
    let task = CString::new("lsb:3").unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(
            stegonet_train_preset(name.as_ptr(), 1, &mut model),
            StegonetStatus::Ok
        );
        let mut rate = 1.0;
        assert_eq!(
            stegonet_model_error_rate(model, task.as_ptr(), &mut rate),
            StegonetStatus::Ok
        );
        assert_eq!(rate, 0.0);
        stegonet_model_free(model);

        let bogus = CString::new("bogus").unwrap();
        assert_eq!(
            stegonet_train_preset(bogus.as_ptr(), 1, &mut model),
            StegonetStatus::InvalidArgument
        );
    }
}

#[test]
fn pgm_round_trip() {
    let mut pgm = b"P5\n8 4\n255\n".to_vec();
    pgm.extend((0..32u8).map(|i| i.wrapping_mul(37)));
    let msg: Vec<u8> = (0..20).map(|i| (i * 7 % 3 == 0) as u8).collect();
    let scheme = CString::new("matrix:2").unwrap();
    unsafe {
        let mut buf = StegonetBuffer {
            data: ptr::null_mut(),
            len: 0,
        };
        let status = stegonet_embed_pgm(
            pgm.as_ptr(),
            pgm.len(),
            scheme.as_ptr(),
            msg.as_ptr(),
            msg.len(),
            &mut buf,
        );
        assert_eq!(status, StegonetStatus::Ok);
        let stego = std::slice::from_raw_parts(buf.data, buf.len).to_vec();
        stegonet_buffer_free(&mut buf);
        assert!(buf.data.is_null());

        let mut back = vec![0u8; msg.len()];
        let status = stegonet_extract_pgm(
            stego.as_ptr(),
            stego.len(),
            scheme.as_ptr(),
            back.as_mut_ptr(),
            back.len(),
        );
        assert_eq!(status, StegonetStatus::Ok);
        assert_eq!(back, msg);

        let too_long = [0u8; 22];
        let status = stegonet_embed_pgm(
            pgm.as_ptr(),
            pgm.len(),
            scheme.as_ptr(),
            too_long.as_ptr(),
            too_long.len(),
            &mut buf,
        );
        assert_eq!(status, StegonetStatus::Capacity);
    }
}

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let lib = target_dir().join("libstegonet_ffi.a");
    if !have_cc() || !lib.exists() {
        eprintln!("skipping C link check: cc or {} missing", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(
        &src,
        r#"#include "stegonet.h"
#include <stdio.h>
int main(void) {
    uint8_t x[3] = {1, 0, 1}, m[2] = {1, 1}, y[3], back[2];
    if (stegonet_lsb_embed(200, 1) != 201) return 1;
    if (stegonet_mc_embed(2, x, 3, m, 2, y) != STEGONET_STATUS_OK) return 2;
    if (stegonet_mc_extract(2, y, 3, back) != STEGONET_STATUS_OK) return 3;
    if (back[0] != 1 || back[1] != 1) return 4;
    StegonetModel *model = NULL;
    if (stegonet_model_from_text("fnn v1\n", &model) != STEGONET_STATUS_PARSE) return 5;
    if (stegonet_last_error_message() == NULL) return 6;
    puts("ok");
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("check");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&header_dir)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile or link failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C check exited with {:?}",
        out.status.code()
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
