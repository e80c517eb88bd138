use std::ffi::{c_void, CStr, CString};
use std::ptr;

use dsubspace_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = ds_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn registry_problem_round_trip() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(ds_problem_from_key(cstr("sphere:n=50").as_ptr(), 0, &mut problem), DsStatus::Ok);
        assert_eq!(ds_problem_dim(problem), 50);

        let config = ds_config_new();
        assert_eq!(ds_config_set(config, cstr("budget").as_ptr(), cstr("10200").as_ptr()), DsStatus::Ok);
        let mut record = ptr::null_mut();
        assert_eq!(ds_solve(problem, config, 0, &mut record), DsStatus::Ok);

        // same trajectory as the library's golden run
        let golden = include_str!("../../core/tests/golden/sphere50_history.csv");
        let rows = ds_record_history_len(record);
        assert_eq!(rows, golden.lines().count() - 1);
        let (mut k, mut alpha, mut f, mut evals) = (0u64, 0.0, 0.0, 0u64);
        assert_eq!(ds_record_history_row(record, rows - 1, &mut k, &mut alpha, &mut f, &mut evals), DsStatus::Ok);
        assert_eq!(evals, 10200);
        assert_eq!(ds_record_final_f(record), f);
        let mut term = DsTermination::StepSizeFloor;
        assert_eq!(ds_record_termination(record, &mut term), DsStatus::Ok);
        assert_eq!(term, DsTermination::Budget);

        assert_eq!(ds_record_history_row(record, rows, &mut k, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()), DsStatus::InvalidArgument);
        let mut x = vec![0.0; 49];
        assert_eq!(ds_record_final_x(record, x.as_mut_ptr(), 49), DsStatus::InvalidArgument);

        ds_record_free(record);
        ds_config_free(config);
        ds_problem_free(problem);
    }
}

extern "C" fn count_calls(user: *mut c_void, x: *const f64, n: usize) -> f64 {
    let counter = unsafe { &mut *(user as *mut u64) };
    *counter += 1;
    let x = unsafe { std::slice::from_raw_parts(x, n) };
    x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()
}

#[test]
fn callback_problem_counts_evaluations() {
    unsafe {
        let mut calls = 0u64;
        let x0 = [0.0; 4];
        let mut problem = ptr::null_mut();
        let status = ds_problem_from_callback(
            cstr("shift").as_ptr(),
            4,
            x0.as_ptr(),
            Some(count_calls),
            &mut calls as *mut u64 as *mut c_void,
            &mut problem,
        );
        assert_eq!(status, DsStatus::Ok);
        let config = ds_config_new();
        ds_config_set(config, cstr("budget").as_ptr(), cstr("300").as_ptr());
        let mut record = ptr::null_mut();
        assert_eq!(ds_solve(problem, config, 1, &mut record), DsStatus::Ok);
        assert_eq!(calls, ds_record_total_evals(record));
        assert!(ds_record_final_f(record) < 1e-6);
        ds_record_free(record);
        ds_config_free(config);
        ds_problem_free(problem);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut problem = ptr::null_mut();
        assert_eq!(ds_problem_from_key(cstr("nope:n=2").as_ptr(), 0, &mut problem), DsStatus::UnknownKey);
        assert!(last_error().contains("nope:n=2"));
        assert_eq!(ds_problem_from_key(cstr("sphere:n=x").as_ptr(), 0, &mut problem), DsStatus::Parse);
        assert_eq!(ds_problem_from_key(ptr::null(), 0, &mut problem), DsStatus::NullPointer);

        let config = ds_config_new();
        assert_eq!(ds_config_set(config, cstr("gamma-dec").as_ptr(), cstr("1.5").as_ptr()), DsStatus::Ok);
        ds_problem_from_key(cstr("sphere:n=3").as_ptr(), 0, &mut problem);
        let mut record = ptr::null_mut();
        assert_eq!(ds_solve(problem, config, 0, &mut record), DsStatus::InvalidArgument);
        assert!(last_error().contains("gamma_dec"));
        assert!(record.is_null());

        let (mut mu, mut p0) = (0.0, 0.0);
        assert_eq!(ds_diagnostics_mu_p0(2.0, 0.5, &mut mu, &mut p0), DsStatus::Ok);
        assert_eq!((mu, p0), (1.0, 0.5));

        ds_config_free(config);
        ds_problem_free(problem);
        ds_config_free(ptr::null_mut());
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(ds_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
