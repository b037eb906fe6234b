use std::ffi::{c_char, CStr, CString};
use std::ptr;

use stonework_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let owned = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { stw_string_free(s) };
    owned
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(stw_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

const Z3: &str = r#"{"size":3,"identity":0,"table":[[0,1,2],[1,2,0],[2,0,1]]}"#;

#[test]
fn monoid_round_trip_and_product() {
    let json = CString::new(Z3).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { stw_monoid_from_json(json.as_ptr(), &mut m) },
        StwStatus::Ok
    );
    assert_eq!(unsafe { stw_monoid_size(m) }, 3);
    let mut p = usize::MAX;
    assert_eq!(unsafe { stw_monoid_mul(m, 2, 2, &mut p) }, StwStatus::Ok);
    assert_eq!(p, 1);
    assert_eq!(
        unsafe { stw_monoid_mul(m, 3, 0, &mut p) },
        StwStatus::OutOfRange
    );
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { stw_monoid_to_json(m, &mut out) }, StwStatus::Ok);
    let back: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(back, serde_json::from_str::<serde_json::Value>(Z3).unwrap());
    unsafe { stw_monoid_free(m) };
}

#[test]
fn corrupted_table_is_a_domain_error() {
    let json =
        CString::new(r#"{"size":3,"identity":0,"table":[[0,1,2],[1,0,0],[2,0,1]]}"#).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { stw_monoid_from_json(json.as_ptr(), &mut m) },
        StwStatus::Domain
    );
    assert!(m.is_null());
    assert!(last_error().contains("associativity"), "{}", last_error());
}

#[test]
fn syntax_errors_and_nulls() {
    let json = CString::new("{\"size\": ").unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { stw_monoid_from_json(json.as_ptr(), &mut m) },
        StwStatus::Parse
    );
    assert!(last_error().contains("line 1"));
    assert_eq!(
        unsafe { stw_monoid_from_json(ptr::null(), &mut m) },
        StwStatus::NullPointer
    );
    assert_eq!(unsafe { stw_monoid_size(ptr::null()) }, 0);
    unsafe { stw_monoid_free(ptr::null_mut()) };
    unsafe { stw_string_free(ptr::null_mut()) };
}

#[test]
fn chain_metric_distances() {
    let json = CString::new(r#"{"carrier_size":3,"chain":[{"classes":[[0,1],[2]]}]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { stw_metric_from_chain_json(json.as_ptr(), &mut d) },
        StwStatus::Ok
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { stw_metric_distance(d, 0, 1, &mut out) },
        StwStatus::Ok
    );
    assert_eq!(take(out), "1/2");
    assert_eq!(
        unsafe { stw_metric_distance(d, 0, 2, &mut out) },
        StwStatus::Ok
    );
    assert_eq!(take(out), "1");
    unsafe { stw_metric_free(d) };
}

#[test]
fn contrast_handles_and_sides() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { stw_contrast_new(3, &mut c) }, StwStatus::Ok);
    let (mut m, mut d) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { stw_contrast_monoid(c, &mut m) }, StwStatus::Ok);
    assert_eq!(unsafe { stw_contrast_metric(c, &mut d) }, StwStatus::Ok);
    assert_eq!(unsafe { stw_monoid_size(m) }, 11);

    let mut ok = false;
    let mut witness = ptr::null_mut();
    assert_eq!(
        unsafe { stw_check_nonexpansive(m, d, StwSide::Left, &mut ok, &mut witness) },
        StwStatus::Ok
    );
    assert!(ok && witness.is_null());
    assert_eq!(
        unsafe { stw_check_nonexpansive(m, d, StwSide::Right, &mut ok, &mut witness) },
        StwStatus::Ok
    );
    assert!(!ok);
    let w: serde_json::Value = serde_json::from_str(&take(witness)).unwrap();
    assert_eq!(w["side"], "right");

    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { stw_contrast_report_json(c, &mut report) },
        StwStatus::Ok
    );
    let r: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(r["carrier_size"], 11);
    // one witness for each j < k
    assert_eq!(r["obstruction_witnesses"].as_array().unwrap().len(), 3);
    assert_eq!(r["table_sha256"].as_str().unwrap().len(), 64);

    unsafe {
        stw_monoid_free(m);
        stw_metric_free(d);
        stw_contrast_free(c);
    }
    assert_eq!(
        unsafe { stw_contrast_new(0, &mut c) },
        StwStatus::ResourceLimit
    );
}

#[test]
fn dualize_matches_cli_schema() {
    let json = CString::new("[1,0,0]").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { stw_dualize_json(json.as_ptr(), &mut out) },
        StwStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    // atom 0 has preimage {1, 2}, atom 1 has preimage {0}
    assert_eq!(
        v["ring_endo"]["atom_images"],
        serde_json::json!(["011", "100", "000"])
    );
    assert_eq!(v["self_map"], serde_json::json!([1, 0, 0]));
}

#[test]
fn verify_all_small_bounds() {
    let mut passed = false;
    let mut report = ptr::null_mut();
    assert_eq!(
        unsafe { stw_verify_all(2, 2, 2, 7, &mut passed, &mut report) },
        StwStatus::Ok
    );
    assert!(passed);
    let r: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
    assert_eq!(r.as_array().unwrap().len(), 13);
    assert_eq!(
        unsafe { stw_verify_all(9, 2, 2, 7, &mut passed, ptr::null_mut()) },
        StwStatus::Domain
    );
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/stonework.h");
    for name in [
        "stw_last_error",
        "stw_string_free",
        "stw_monoid_from_json",
        "stw_monoid_mul",
        "stw_metric_from_chain_json",
        "stw_check_nonexpansive",
        "stw_contrast_report_json",
        "stw_verify_all",
        "STW_STATUS_RESOURCE_LIMIT",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
