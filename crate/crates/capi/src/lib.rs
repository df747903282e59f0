//! C ABI for the multi-graph learning engine.
//!
//! Handles are opaque pointers owned by this library; every constructor has a
//! matching `_free` function. Calls report an [`MgalStatus`]; on failure a
//! human-readable message is available from [`mgal_last_error`] until the
//! next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mgal::cli::{load_dataset, DatasetManifest};
use mgal::graph::{preset, synth_multiview, MultiGraphDataset};
use mgal::harness::{run_experiment, ExperimentSpec, Method, RunResult};
use mgal::model::HeadKind;

/// Call outcome. Anything but `Ok` leaves a message in `mgal_last_error`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    IoError = 4,
    NumericError = 5,
    Panic = 6,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &mgal::Error) -> MgalStatus {
    match err {
        mgal::Error::Io { .. } => MgalStatus::IoError,
        mgal::Error::Numeric { .. } => MgalStatus::NumericError,
        _ => MgalStatus::InvalidArgument,
    }
}

fn fail(err: &mgal::Error) -> MgalStatus {
    set_error(err.to_string());
    status_of(err)
}

fn null_arg(what: &str) -> MgalStatus {
    set_error(format!("{what} must not be null"));
    MgalStatus::NullPointer
}

/// Runs `f` with panics converted to `MgalStatus::Panic`.
fn guarded(f: impl FnOnce() -> MgalStatus) -> MgalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic".into());
            MgalStatus::Panic
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MgalStatus> {
    if ptr.is_null() {
        return Err(null_arg(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        MgalStatus::InvalidUtf8
    })
}

/// Opaque multi-graph dataset handle.
pub struct MgalDataset {
    inner: MultiGraphDataset,
}

/// Opaque experiment result handle.
pub struct MgalResult {
    inner: RunResult,
}

/// Experiment settings for [`mgal_run`]. Obtain defaults from
/// [`mgal_run_options_default`] and override fields as needed.
#[repr(C)]
pub struct MgalRunOptions {
    /// One of: gcn_single, gcn_m, multi_gcn, mgl, mgal. Null means mgal.
    pub method: *const c_char,
    /// View index used by gcn_single.
    pub view: usize,
    /// Labeled fraction per class, in (0, 1).
    pub label_ratio: f64,
    /// Fraction of nodes held out for early stopping.
    pub validation_fraction: f64,
    /// Number of runs with reseeded splits.
    pub runs: usize,
    /// Base seed; run r uses base_seed + r.
    pub base_seed: u64,
    /// Weight of the adversarial term in the generator objective.
    pub lambda: f64,
    /// Prediction head: fc or gconv. Null means fc.
    pub head: *const c_char,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mgal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mgal_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Samples a named synthetic preset ("default" or "small") into a new
/// dataset handle.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_synth(
    name: *const c_char,
    out: *mut *mut MgalDataset,
) -> MgalStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let name = match cstr_arg(name, "name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let spec = match preset(name) {
            Ok(spec) => spec,
            Err(e) => return fail(&e),
        };
        match synth_multiview(&spec) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MgalDataset { inner }));
                MgalStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Loads a dataset from a manifest file (see the data format documentation).
///
/// # Safety
/// `manifest_path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_load(
    manifest_path: *const c_char,
    out: *mut *mut MgalDataset,
) -> MgalStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let path = match cstr_arg(manifest_path, "manifest_path") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let manifest = match DatasetManifest::read(Path::new(path)) {
            Ok(m) => m,
            Err(e) => return fail(&e),
        };
        match load_dataset(&manifest) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MgalDataset { inner }));
                MgalStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `dataset` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_free(dataset: *mut MgalDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Returns 0 when the handle is null.
///
/// # Safety
/// `dataset` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_num_nodes(dataset: *const MgalDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.num_nodes())
}

/// Returns 0 when the handle is null.
///
/// # Safety
/// `dataset` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_num_views(dataset: *const MgalDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.num_views())
}

/// Returns 0 when the handle is null.
///
/// # Safety
/// `dataset` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_feature_dim(dataset: *const MgalDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.feature_dim())
}

/// Returns 0 when the handle is null.
///
/// # Safety
/// `dataset` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_dataset_num_classes(dataset: *const MgalDataset) -> usize {
    dataset.as_ref().map_or(0, |d| d.inner.num_classes)
}

/// Default run options: method mgal, ratio 0.1, 5% validation, 5 runs,
/// seed 0, lambda 1, fc head.
#[no_mangle]
pub extern "C" fn mgal_run_options_default() -> MgalRunOptions {
    MgalRunOptions {
        method: ptr::null(),
        view: 0,
        label_ratio: 0.1,
        validation_fraction: 0.05,
        runs: 5,
        base_seed: 0,
        lambda: 1.0,
        head: ptr::null(),
    }
}

/// Runs one experiment on the dataset and returns an aggregate result handle.
///
/// # Safety
/// `dataset` must be a live handle, `options` and `out` valid pointers, and
/// any strings inside `options` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mgal_run(
    dataset: *const MgalDataset,
    options: *const MgalRunOptions,
    out: *mut *mut MgalResult,
) -> MgalStatus {
    guarded(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let Some(dataset) = dataset.as_ref() else {
            return null_arg("dataset");
        };
        let Some(options) = options.as_ref() else {
            return null_arg("options");
        };
        let method_name = if options.method.is_null() {
            "mgal"
        } else {
            match cstr_arg(options.method, "options.method") {
                Ok(s) => s,
                Err(status) => return status,
            }
        };
        let head_name = if options.head.is_null() {
            "fc"
        } else {
            match cstr_arg(options.head, "options.head") {
                Ok(s) => s,
                Err(status) => return status,
            }
        };

        let build = || -> mgal::Result<ExperimentSpec> {
            let mut spec = ExperimentSpec::new(Method::parse(method_name, options.view)?);
            spec.label_ratio = options.label_ratio;
            spec.validation_fraction = options.validation_fraction;
            spec.runs = options.runs;
            spec.base_seed = options.base_seed;
            spec.train.lambda = options.lambda;
            spec.model.head = HeadKind::parse(head_name)?;
            Ok(spec)
        };
        let spec = match build() {
            Ok(spec) => spec,
            Err(e) => return fail(&e),
        };
        match run_experiment(&dataset.inner, &spec) {
            Ok(output) => {
                *out = Box::into_raw(Box::new(MgalResult {
                    inner: output.result,
                }));
                MgalStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_result_free(result: *mut MgalResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Mean test accuracy over the runs; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_result_mean(result: *const MgalResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.mean)
}

/// Population standard deviation over the runs; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_result_std(result: *const MgalResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.inner.std)
}

/// Number of runs aggregated in the result; 0 for a null handle.
///
/// # Safety
/// `result` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn mgal_result_num_runs(result: *const MgalResult) -> usize {
    result.as_ref().map_or(0, |r| r.inner.accuracies.len())
}

/// Fetches the test accuracy of one run.
///
/// # Safety
/// `result` must be a live handle and `accuracy` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mgal_result_accuracy(
    result: *const MgalResult,
    run: usize,
    accuracy: *mut f64,
) -> MgalStatus {
    if accuracy.is_null() {
        return null_arg("accuracy");
    }
    let Some(result) = result.as_ref() else {
        return null_arg("result");
    };
    match result.inner.accuracies.get(run) {
        Some(v) => {
            *accuracy = *v;
            MgalStatus::Ok
        }
        None => {
            set_error(format!(
                "run index {run} out of range for {} runs",
                result.inner.accuracies.len()
            ));
            MgalStatus::InvalidArgument
        }
    }
}
