use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use famtrans_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ft_last_error()) }.to_str().unwrap().to_string()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string();
    unsafe { ft_string_free(p) };
    s
}

fn parse_rule(text: &str) -> *mut FtRule {
    let c = CString::new(text).unwrap();
    let mut rule = ptr::null_mut();
    assert_eq!(unsafe { ft_rule_parse(c.as_ptr(), &mut rule) }, FtStatus::Ok);
    rule
}

fn members(set: *const FtSet) -> Vec<u64> {
    let (mut len, mut h) = (0usize, 0u64);
    assert_eq!(unsafe { ft_set_info(set, &mut len, &mut h) }, FtStatus::Ok);
    let mut buf = vec![0u64; len];
    let mut written = 0;
    assert_eq!(unsafe { ft_set_members(set, buf.as_mut_ptr(), len, &mut written) }, FtStatus::Ok);
    assert_eq!(written, len);
    buf
}

#[test]
fn rule_round_trip_and_admissibility() {
    let rule = parse_rule("spacing( dyadic() )");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ft_rule_to_string(rule, &mut out) }, FtStatus::Ok);
    assert_eq!(take_string(out), "spacing(dyadic())");
    let mut ok = false;
    // allowed gaps are [2,3], [8,15], [32,63], ...
    assert_eq!(unsafe { ft_rule_is_admissible(rule, [1u8, 0, 1].as_ptr(), 3, &mut ok) }, FtStatus::Ok);
    assert!(ok);
    assert_eq!(unsafe { ft_rule_is_admissible(rule, [1u8, 0, 0, 0, 1].as_ptr(), 5, &mut ok) }, FtStatus::Ok);
    assert!(!ok);
    unsafe { ft_rule_free(rule) };
}

#[test]
fn errors_set_status_and_message() {
    let bad = CString::new("spacing(").unwrap();
    let mut rule = ptr::null_mut();
    assert_eq!(unsafe { ft_rule_parse(bad.as_ptr(), &mut rule) }, FtStatus::Parse);
    assert!(rule.is_null());
    assert!(last_error().contains("column"));

    assert_eq!(unsafe { ft_rule_parse(ptr::null(), &mut rule) }, FtStatus::NullPointer);
    let mut ok = false;
    assert_eq!(unsafe { ft_rule_is_admissible(ptr::null(), ptr::null(), 0, &mut ok) }, FtStatus::NullPointer);

    let symbols = [2u8];
    let full = parse_rule("full()");
    assert_eq!(unsafe { ft_rule_is_admissible(full, symbols.as_ptr(), 1, &mut ok) }, FtStatus::Config);

    let mut set = ptr::null_mut();
    assert_eq!(unsafe { ft_set_new(5, [7u64].as_ptr(), 1, &mut set) }, FtStatus::Config);
    assert_eq!(unsafe { ft_set_new(10, [1u64, 3].as_ptr(), 2, &mut set) }, FtStatus::Ok);
    assert_eq!(last_error(), "");
    let q = CString::new("thick(10)").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ft_family_report(set, q.as_ptr(), &mut json) }, FtStatus::HorizonExhausted);
    unsafe {
        ft_set_free(set);
        ft_rule_free(full);
        ft_rule_free(ptr::null_mut());
        ft_set_free(ptr::null_mut());
        ft_point_free(ptr::null_mut());
        ft_string_free(ptr::null_mut());
    }
}

#[test]
fn sets_and_family_reports() {
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { ft_set_new(11, [10u64, 2, 4, 6, 8, 4].as_ptr(), 6, &mut set) }, FtStatus::Ok);
    assert_eq!(members(set), vec![2, 4, 6, 8, 10]);
    let mut diff = ptr::null_mut();
    assert_eq!(unsafe { ft_set_difference(set, &mut diff) }, FtStatus::Ok);
    assert_eq!(members(diff), vec![2, 4, 6, 8]);
    let q = CString::new("syndetic(2)").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ft_family_report(set, q.as_ptr(), &mut json) }, FtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    // a window of a set cannot prove syndeticity, only that it holds there
    assert_eq!(v["verdict"], "undetermined");
    assert_eq!(v["holds_on_window"], true);
    unsafe {
        ft_set_free(diff);
        ft_set_free(set);
    }
}

#[test]
fn hitting_and_sweeps() {
    let rule = parse_rule("spacing(evens())");
    let mut set = ptr::null_mut();
    let one = [1u8];
    assert_eq!(unsafe { ft_hitting_window(rule, one.as_ptr(), 1, one.as_ptr(), 1, 20, &mut set) }, FtStatus::Ok);
    assert_eq!(members(set), vec![2, 4, 6, 8, 10, 12, 14, 16, 18, 20]);
    unsafe { ft_set_free(set) };

    let dy = parse_rule("spacing(dyadic())");
    let mut json = ptr::null_mut();
    let a = [1u64, 2];
    assert_eq!(unsafe { ft_check_transitivity(dy, a.as_ptr(), 2, 1, 10_000, false, &mut json) }, FtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["verdict"], "fails-on-window");
    assert_eq!(v["certificates"][0]["name"], "parity-law");

    let a = [2u64, 3];
    assert_eq!(unsafe { ft_check_transitivity(dy, a.as_ptr(), 2, 1, 1000, false, &mut json) }, FtStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(v["verdict"], "witnessed");

    let a = [2u64, 1];
    assert_eq!(unsafe { ft_check_transitivity(dy, a.as_ptr(), 2, 1, 1000, true, &mut json) }, FtStatus::Precondition);
    unsafe {
        ft_rule_free(rule);
        ft_rule_free(dy);
    }
}

#[test]
fn points() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ft_point_champernowne(3, &mut p) }, FtStatus::Ok);
    let mut len = 0;
    assert_eq!(unsafe { ft_point_len(p, &mut len) }, FtStatus::Ok);
    assert_eq!(len, 2 + 8 + 24);
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { ft_point_entering_window(p, [1u8, 1].as_ptr(), 2, 10, &mut set) }, FtStatus::Ok);
    // prefix 0 1 00 01 10 11 000 ...: "11" starts at positions 5 and 8
    assert_eq!(members(set), vec![5, 8]);
    assert_eq!(unsafe { ft_point_entering_window(p, [1u8].as_ptr(), 1, 1000, &mut set) }, FtStatus::HorizonExhausted);
    unsafe { ft_point_free(p) };

    let rule = parse_rule("spacing(evens())");
    assert_eq!(unsafe { ft_point_greedy(rule, 3, 64, 200, &mut p) }, FtStatus::Ok);
    assert_eq!(unsafe { ft_point_len(p, &mut len) }, FtStatus::Ok);
    assert!(len >= 200);
    unsafe {
        ft_point_free(p);
        ft_rule_free(rule);
    }

    assert_eq!(unsafe { ft_point_periodic([1u8, 0].as_ptr(), 2, 50, &mut p) }, FtStatus::Ok);
    assert_eq!(unsafe { ft_point_entering_window(p, [1u8].as_ptr(), 1, 9, &mut set) }, FtStatus::Ok);
    assert_eq!(members(set), vec![2, 4, 6, 8]);
    unsafe {
        ft_set_free(set);
        ft_point_free(p);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(ft_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/famtrans.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compile and run a C program against the header and the static library.
#[test]
fn c_program_links_against_header() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("../../target"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("libfamtrans_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no static library at {} or no C compiler", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "famtrans.h"

int main(void) {
    FtRule *rule = NULL;
    if (ft_rule_parse("tripleratio(3)", &rule) != FT_STATUS_OK) return 1;
    const uint8_t w[] = {1, 1, 0, 1};
    bool ok = true;
    if (ft_rule_is_admissible(rule, w, 4, &ok) != FT_STATUS_OK || ok) return 2;
    if (ft_rule_parse("nope()", &rule) != FT_STATUS_PARSE) return 3;
    if (strlen(ft_last_error()) == 0) return 4;
    ft_rule_free(rule);
    printf("ok %s\n", ft_version());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
