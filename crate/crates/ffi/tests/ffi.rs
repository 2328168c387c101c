use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use zipstrata_ffi::*;

const C3: &str = r#"{"schema":1,"group":{"preset":"C3"},"p":2,"I":[1,3],"strata":["[351]"]}"#;

fn handle(cfg: &str) -> *mut ZsDatum {
    let c = CString::new(cfg).unwrap();
    let mut d = ptr::null_mut();
    let s = unsafe { zs_datum_from_json(c.as_ptr(), &mut d) };
    assert_eq!(s, ZsStatus::Ok, "{}", last_error());
    d
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(zs_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn run(d: *const ZsDatum, cmd: &str) -> (ZsStatus, String) {
    let c = CString::new(cmd).unwrap();
    let mut out = ptr::null_mut();
    let s = unsafe { zs_run(d, c.as_ptr(), &mut out) };
    let text = if out.is_null() {
        String::new()
    } else {
        let t = unsafe { CStr::from_ptr(out) }
            .to_string_lossy()
            .into_owned();
        unsafe { zs_string_free(out) };
        t
    };
    (s, text)
}

#[test]
fn hasse_through_the_abi() {
    let d = handle(C3);
    let (s, text) = run(d, "hasse");
    assert_eq!(s, ZsStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["result"]["edges"].as_array().unwrap().len(), 16);
    assert_eq!(v["result"]["nodes"].as_array().unwrap().len(), 12);
    unsafe { zs_datum_free(d) };
}

#[test]
fn cone_reports_infeasible() {
    let d = handle(C3);
    let (s, text) = run(d, "cone");
    assert_eq!(s, ZsStatus::Infeasible);
    assert!(text.contains("\"feasible\":false"));
    unsafe { zs_datum_free(d) };
}

#[test]
fn n_alpha_values() {
    let d = handle(C3);
    let label = CString::new("[351]").unwrap();
    let chi = [1i64, 1, 0];
    let mut out = ptr::null_mut();
    let s = unsafe { zs_n_alpha(d, label.as_ptr(), chi.as_ptr(), 3, &mut out) };
    assert_eq!(s, ZsStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { zs_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], false);
    let mut ns: Vec<String> = v["multiplicities"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["n"].as_str().unwrap().to_owned())
        .collect();
    ns.sort();
    assert_eq!(ns, vec!["0", "21", "21", "63"]);

    let bad = CString::new("[999]").unwrap();
    let s = unsafe { zs_n_alpha(d, bad.as_ptr(), chi.as_ptr(), 3, &mut out) };
    assert_eq!(s, ZsStatus::InvalidArgument);
    assert!(out.is_null());
    let s = unsafe { zs_n_alpha(d, label.as_ptr(), chi.as_ptr(), 2, &mut out) };
    assert_eq!(s, ZsStatus::InvalidArgument);
    assert!(last_error().contains("rank"));
    unsafe { zs_datum_free(d) };
}

#[test]
fn error_paths() {
    let bad = CString::new(r#"{"schema":1,"group":{"preset":"C3"},"p":4,"I":[1,3]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { zs_datum_from_json(bad.as_ptr(), &mut d) },
        ZsStatus::InvalidConfig
    );
    assert!(d.is_null());
    assert!(last_error().contains("`p`"));
    assert_eq!(
        unsafe { zs_datum_from_json(ptr::null(), &mut d) },
        ZsStatus::NullPointer
    );
    let h = handle(C3);
    assert_eq!(run(h, "frobnicate").0, ZsStatus::InvalidArgument);
    assert_eq!(run(ptr::null(), "hasse").0, ZsStatus::NullPointer);
    unsafe {
        zs_datum_free(h);
        zs_datum_free(ptr::null_mut());
        zs_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(zs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/zipstrata.h"),
    )
    .unwrap();
    for f in [
        "zs_datum_from_json",
        "zs_datum_free",
        "zs_run",
        "zs_n_alpha",
        "zs_string_free",
        "zs_last_error",
    ] {
        assert!(h.contains(f), "{f}");
    }
    assert!(h.contains("typedef struct ZsDatum ZsDatum;"));
}

/// Compiles and runs the C smoke program against the static library when a C
/// compiler is available.
#[test]
fn c_smoke_program() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    let lib = target.join(profile).join("libzipstrata_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C smoke test: no static library or C compiler");
        return;
    }
    let exe = std::env::temp_dir().join(format!("zipstrata_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
