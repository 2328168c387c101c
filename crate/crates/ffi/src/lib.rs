//! C ABI over zipstrata.
//!
//! Data cross the boundary as JSON strings. A `ZsDatum` is an opaque handle
//! built from a config document; every call returns a `ZsStatus`. Strings
//! returned through out-parameters belong to the caller and must be released
//! with `zs_string_free`. After a non-OK status, `zs_last_error` describes
//! the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clap::ValueEnum;
use zipstrata::cli::{self, Args, Built, CliError, Command, Format};
use zipstrata::sections::{calibrated_reading, char_section_verdict};
use zipstrata::CharVec;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZsStatus {
    Ok = 0,
    InvalidArgument = 1,
    InvalidConfig = 2,
    Infeasible = 3,
    Internal = 4,
    NullPointer = 5,
}

/// Opaque datum handle.
pub struct ZsDatum {
    built: Built,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(status: ZsStatus, msg: impl Into<String>) -> ZsStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> ZsStatus) -> ZsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ZsStatus::Internal, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, ZsStatus> {
    if p.is_null() {
        return Err(fail(ZsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ZsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> ZsStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            ZsStatus::Ok
        }
        Err(_) => fail(ZsStatus::Internal, "output contains NUL"),
    }
}

fn cli_status(e: &CliError) -> ZsStatus {
    match e {
        CliError::Config(_) | CliError::Library(_) => ZsStatus::InvalidConfig,
        CliError::Io(_) => ZsStatus::Internal,
    }
}

/// Parses a config document and builds a datum handle.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_datum_from_json(
    config_json: *const c_char,
    out: *mut *mut ZsDatum,
) -> ZsStatus {
    guarded(|| {
        if out.is_null() {
            return fail(ZsStatus::NullPointer, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(config_json, "config_json") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match cli::parse_config(text).and_then(|c| cli::build(&c)) {
            Ok(built) => {
                *out = Box::into_raw(Box::new(ZsDatum { built }));
                ZsStatus::Ok
            }
            Err(e) => fail(cli_status(&e), e.to_string()),
        }
    })
}

/// Releases a handle; null is accepted.
///
/// # Safety
/// `d` must come from `zs_datum_from_json` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zs_datum_free(d: *mut ZsDatum) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

fn default_args(command: Command) -> Args {
    Args {
        command,
        config: None,
        format: Format::Json,
        out: None,
        lattice: None,
        box_radius: None,
        workers: 1,
        strata: Vec::new(),
        primes: None,
        mutate: None,
    }
}

/// Runs a subcommand (`describe`, `strata`, `hasse`, `cone`, `purity`, ...)
/// and returns the JSON report. `cone` returns `Infeasible` together with
/// the report when a cone is empty.
///
/// # Safety
/// `d` must be a live handle, `subcommand` NUL-terminated, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_run(
    d: *const ZsDatum,
    subcommand: *const c_char,
    out_json: *mut *mut c_char,
) -> ZsStatus {
    guarded(|| {
        if d.is_null() || out_json.is_null() {
            return fail(ZsStatus::NullPointer, "handle or out_json is null");
        }
        *out_json = ptr::null_mut();
        let name = match read_str(subcommand, "subcommand") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let Ok(cmd) = Command::from_str(name, false) else {
            return fail(
                ZsStatus::InvalidArgument,
                format!("unknown subcommand `{name}`"),
            );
        };
        let built = &(*d).built;
        let args = default_args(cmd);
        let result = match cmd {
            Command::Golden => cli::run(&args).map(|o| (o.output, o.code)),
            Command::Scan => cli::cmd_scan(
                &built.config,
                &built.config.primes,
                &args,
                calibrated_reading(),
            )
            .map(|v| (v.to_string(), 0)),
            _ => cli::cmd_compute(built, cmd, &args, calibrated_reading())
                .map(|r| (r.value.to_string(), r.code)),
        };
        match result {
            Ok((text, code)) => {
                let s = write_string(out_json, text);
                match (s, code) {
                    (ZsStatus::Ok, 0) => ZsStatus::Ok,
                    (ZsStatus::Ok, 3) => {
                        fail(ZsStatus::Infeasible, "a requested cone is infeasible")
                    }
                    (ZsStatus::Ok, _) => fail(ZsStatus::Internal, "golden check failed"),
                    (s, _) => s,
                }
            }
            Err(e) => fail(cli_status(&e), e.to_string()),
        }
    })
}

/// Multiplicities n_α for the stratum `label` and the character `chi[0..len]`,
/// as a JSON object `{"verdict": bool, "multiplicities": [{"root": [...], "n": "..."}]}`.
///
/// # Safety
/// `d` must be a live handle, `label` NUL-terminated, `chi` valid for `len`
/// reads, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_n_alpha(
    d: *const ZsDatum,
    label: *const c_char,
    chi: *const i64,
    len: usize,
    out_json: *mut *mut c_char,
) -> ZsStatus {
    guarded(|| {
        if d.is_null() || out_json.is_null() || (chi.is_null() && len > 0) {
            return fail(ZsStatus::NullPointer, "null argument");
        }
        *out_json = ptr::null_mut();
        let label = match read_str(label, "label") {
            Ok(t) => t,
            Err(s) => return s,
        };
        let z = &(*d).built.zip;
        let chi = CharVec(if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(chi, len).to_vec()
        });
        let w = match z.rd().parse_label(label) {
            Ok(w) => w,
            Err(e) => return fail(ZsStatus::InvalidArgument, e.to_string()),
        };
        match char_section_verdict(z, &w, &chi) {
            Ok(v) => {
                let rows: Vec<String> = v
                    .multiplicities
                    .iter()
                    .map(|(k, n)| {
                        format!("{{\"root\":{:?},\"n\":\"{n}\"}}", z.rd().root(*k).vector.0)
                            .replace(' ', "")
                    })
                    .collect();
                write_string(
                    out_json,
                    format!(
                        "{{\"verdict\":{},\"multiplicities\":[{}]}}",
                        v.verdict,
                        rows.join(",")
                    ),
                )
            }
            Err(e) => fail(ZsStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Releases a string returned by this library; null is accepted.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread; valid until the next call.
#[no_mangle]
pub extern "C" fn zs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn zs_version() -> *const c_char {
    static V: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => c"",
        };
    V.as_ptr()
}
