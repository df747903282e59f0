//! Exercises the C surface through the exported symbols.

use std::ffi::{CStr, CString};
use std::ptr;

use mgal_capi::*;

fn last_error() -> String {
    let ptr = mgal_last_error();
    assert!(!ptr.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(ptr) }.to_str().unwrap().to_string()
}

fn synth(name: &str) -> *mut MgalDataset {
    let name = CString::new(name).unwrap();
    let mut handle: *mut MgalDataset = ptr::null_mut();
    let status = unsafe { mgal_dataset_synth(name.as_ptr(), &mut handle) };
    assert_eq!(status, MgalStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(mgal_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn synth_run_and_query_lifecycle() {
    let dataset = synth("small");
    unsafe {
        assert_eq!(mgal_dataset_num_nodes(dataset), 120);
        assert_eq!(mgal_dataset_num_views(dataset), 2);
        assert_eq!(mgal_dataset_num_classes(dataset), 3);
        assert_eq!(mgal_dataset_feature_dim(dataset), 3);
    }

    let method = CString::new("mgl").unwrap();
    let mut options = mgal_run_options_default();
    options.method = method.as_ptr();
    options.label_ratio = 0.2;
    options.runs = 2;
    options.base_seed = 7;

    let mut result: *mut MgalResult = ptr::null_mut();
    let status = unsafe { mgal_run(dataset, &options, &mut result) };
    assert_eq!(status, MgalStatus::Ok, "{}", last_error());

    unsafe {
        assert_eq!(mgal_result_num_runs(result), 2);
        let mean = mgal_result_mean(result);
        assert!((0.0..=1.0).contains(&mean), "mean {mean}");
        assert!(mgal_result_std(result) >= 0.0);

        let mut acc = 0.0;
        assert_eq!(mgal_result_accuracy(result, 0, &mut acc), MgalStatus::Ok);
        assert!((0.0..=1.0).contains(&acc));
        assert_eq!(
            mgal_result_accuracy(result, 9, &mut acc),
            MgalStatus::InvalidArgument
        );
        assert!(last_error().contains("out of range"));

        mgal_result_free(result);
        mgal_dataset_free(dataset);
    }
}

#[test]
fn runs_are_deterministic_across_calls() {
    let run_once = || {
        let dataset = synth("small");
        let mut options = mgal_run_options_default();
        options.label_ratio = 0.2;
        options.runs = 1;
        options.base_seed = 3;
        let mut result: *mut MgalResult = ptr::null_mut();
        let status = unsafe { mgal_run(dataset, &options, &mut result) };
        assert_eq!(status, MgalStatus::Ok, "{}", last_error());
        let mean = unsafe { mgal_result_mean(result) };
        unsafe {
            mgal_result_free(result);
            mgal_dataset_free(dataset);
        }
        mean
    };
    assert_eq!(run_once().to_bits(), run_once().to_bits());
}

#[test]
fn error_paths_set_status_and_message() {
    // Unknown preset.
    let bad = CString::new("galaxy").unwrap();
    let mut handle: *mut MgalDataset = ptr::null_mut();
    let status = unsafe { mgal_dataset_synth(bad.as_ptr(), &mut handle) };
    assert_eq!(status, MgalStatus::InvalidArgument);
    assert!(last_error().contains("galaxy"));
    assert!(handle.is_null());

    // Null pointers.
    let status = unsafe { mgal_dataset_synth(ptr::null(), &mut handle) };
    assert_eq!(status, MgalStatus::NullPointer);
    let name = CString::new("small").unwrap();
    let status = unsafe { mgal_dataset_synth(name.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, MgalStatus::NullPointer);

    // Missing manifest maps to an I/O failure.
    let missing = CString::new("/nonexistent/manifest.txt").unwrap();
    let status = unsafe { mgal_dataset_load(missing.as_ptr(), &mut handle) };
    assert_eq!(status, MgalStatus::IoError);
    assert!(last_error().contains("/nonexistent/manifest.txt"));

    // Bad method name surfaces through the run call.
    let dataset = synth("small");
    let method = CString::new("svm").unwrap();
    let mut options = mgal_run_options_default();
    options.method = method.as_ptr();
    let mut result: *mut MgalResult = ptr::null_mut();
    let status = unsafe { mgal_run(dataset, &options, &mut result) };
    assert_eq!(status, MgalStatus::InvalidArgument);
    assert!(last_error().contains("svm"));

    // Adversarial method on a single-view dataset is a config error; reuse
    // the dataset to check zero-view-index gcn_single works instead.
    let method = CString::new("gcn_single").unwrap();
    options.method = method.as_ptr();
    options.view = 5;
    let status = unsafe { mgal_run(dataset, &options, &mut result) };
    assert_eq!(status, MgalStatus::InvalidArgument);
    assert!(last_error().contains("view 5"));

    unsafe { mgal_dataset_free(dataset) };

    // Frees tolerate null.
    unsafe {
        mgal_dataset_free(ptr::null_mut());
        mgal_result_free(ptr::null_mut());
    }
}
