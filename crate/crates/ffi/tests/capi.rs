use lzsm_ffi::*;
use std::ffi::CString;
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { lzsm_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn set(cfg: *mut LzsmConfig, name: &str, value: f64) -> LzsmStatus {
    let name = CString::new(name).unwrap();
    unsafe { lzsm_config_set(cfg, name.as_ptr(), value) }
}

#[test]
fn config_roundtrip_and_errors() {
    let cfg = lzsm_config_new();
    assert_eq!(set(cfg, "delta", 0.07), LzsmStatus::Ok);
    let name = CString::new("delta").unwrap();
    let mut v = 0.0;
    assert_eq!(unsafe { lzsm_config_get(cfg, name.as_ptr(), &mut v) }, LzsmStatus::Ok);
    assert_eq!(v, 0.07);
    assert_eq!(set(cfg, "nope", 1.0), LzsmStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
    assert_eq!(set(cfg, "v", -1.0), LzsmStatus::InvalidConfig);
    assert!(last_error().contains("v > 0"));
    // A rejected value leaves the handle unchanged.
    let vname = CString::new("v").unwrap();
    assert_eq!(unsafe { lzsm_config_get(cfg, vname.as_ptr(), &mut v) }, LzsmStatus::Ok);
    assert_eq!(v, 1.0);
    assert_eq!(unsafe { lzsm_config_get(cfg, name.as_ptr(), ptr::null_mut()) }, LzsmStatus::NullPointer);
    unsafe { lzsm_config_free(cfg) };
    unsafe { lzsm_config_free(ptr::null_mut()) };
}

#[test]
fn parse_and_closed_forms() {
    let src = CString::new("delta = 0.07\nfreq_rf = 1").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { lzsm_config_parse(src.as_ptr(), &mut cfg) }, LzsmStatus::Ok);
    let mut p = 0.0;
    assert_eq!(unsafe { lzsm_strong_drive_survival(cfg, &mut p) }, LzsmStatus::Ok);
    assert!((p - (-std::f64::consts::PI * 0.0049 / 2.0).exp()).abs() < 1e-15);
    let (mut up, mut dn) = (0.0, 0.0);
    assert_eq!(unsafe { lzsm_weak_drive_probabilities(cfg, &mut up, &mut dn) }, LzsmStatus::Ok);
    assert!((up + dn - 1.0).abs() < 1e-15);
    let mut u = [0.0; 3];
    assert_eq!(unsafe { lzsm_bloch_perturbative(cfg, -1e4, 0, u.as_mut_ptr()) }, LzsmStatus::Ok);
    assert!((u[2] - 1.0).abs() < 1e-6);
    assert_eq!(set(cfg, "eps0", 0.3), LzsmStatus::Ok);
    assert_eq!(unsafe { lzsm_strong_drive_survival(cfg, &mut p) }, LzsmStatus::OffResonance);
    unsafe { lzsm_config_free(cfg) };

    let bad = CString::new("bogus = 1").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { lzsm_config_parse(bad.as_ptr(), &mut cfg) }, LzsmStatus::Parse);
    assert!(cfg.is_null());
    assert!(last_error().contains("line 1"));
    assert_eq!(unsafe { lzsm_strong_drive_survival(ptr::null(), &mut p) }, LzsmStatus::NullPointer);
}

#[test]
fn trajectory_handle() {
    let cfg = lzsm_config_new();
    assert_eq!(set(cfg, "delta", 0.07), LzsmStatus::Ok);
    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { lzsm_trajectory_new(cfg, -50.0, 50.0, 1e-10, 10.0, &mut tr) }, LzsmStatus::Ok);
    let n = unsafe { lzsm_trajectory_len(tr) };
    assert_eq!(n, 11);
    let mut row = [0.0; 6];
    assert_eq!(unsafe { lzsm_trajectory_sample(tr, n - 1, row.as_mut_ptr()) }, LzsmStatus::Ok);
    assert_eq!(row[0], 50.0);
    assert!((row[1] - 0.99233).abs() < 2e-3);
    assert!((row[1] + row[2] - 1.0).abs() < 1e-9);
    assert_eq!(unsafe { lzsm_trajectory_sample(tr, n, row.as_mut_ptr()) }, LzsmStatus::InvalidArgument);
    unsafe { lzsm_trajectory_free(tr) };
    assert_eq!(unsafe { lzsm_trajectory_len(ptr::null()) }, 0);

    let mut tr = ptr::null_mut();
    assert_eq!(unsafe { lzsm_trajectory_new(cfg, 5.0, -5.0, 1e-10, 1.0, &mut tr) }, LzsmStatus::InvalidConfig);
    assert!(tr.is_null());
    unsafe { lzsm_config_free(cfg) };
}

#[test]
fn error_buffer_truncates() {
    let cfg = lzsm_config_new();
    assert_eq!(set(cfg, "a_field_that_does_not_exist", 1.0), LzsmStatus::InvalidArgument);
    let mut small = [0 as std::ffi::c_char; 8];
    let full = unsafe { lzsm_last_error_message(small.as_mut_ptr(), small.len()) };
    assert!(full > 8);
    assert_eq!(small[7], 0);
    assert_eq!(unsafe { lzsm_last_error_message(ptr::null_mut(), 0) }, full);
    unsafe { lzsm_config_free(cfg) };
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lzsm.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping header check");
        return;
    };
    assert!(status.success());
}
