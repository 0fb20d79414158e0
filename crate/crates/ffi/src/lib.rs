//! C ABI over the mvln library: opaque network handles, status codes, and
//! JSON/CSV string outputs. All returned strings are owned by the caller and
//! must be released with `mvln_string_free`.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mvln::network::{assemble, build_augmented, simulate, AugmentedSystem, Network};
use mvln::pinning::{synthesize, verify_plan, TargetPolicy};
use mvln::report::{analysis_report, pinning_report, trajectory_csv};
use mvln::sync::{analyze, sync_state_set, SyncSpec};
use mvln::Error;

/// Opaque handle to a parsed network and its augmented dynamics.
pub struct MvlnNetwork {
    network: Network,
    system: AugmentedSystem,
}

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MvlnStatus {
    MvlnOk = 0,
    MvlnNullArgument = 1,
    MvlnParseError = 2,
    MvlnInvalidArgument = 3,
    MvlnNotSynchronous = 4,
    MvlnInfeasible = 5,
    MvlnInternalError = 6,
}

fn status_of(err: &Error) -> MvlnStatus {
    match err {
        Error::Syntax { .. } | Error::UnboundVariable(_) => MvlnStatus::MvlnParseError,
        Error::Dimension(_)
        | Error::DimensionCap { .. }
        | Error::ConfirmorIndex { .. }
        | Error::IndexRange { .. }
        | Error::LevelRange { .. }
        | Error::GammaRange { .. } => MvlnStatus::MvlnInvalidArgument,
        Error::NotSynchronous => MvlnStatus::MvlnNotSynchronous,
        Error::Infeasible(_) => MvlnStatus::MvlnInfeasible,
        Error::Internal(_) => MvlnStatus::MvlnInternalError,
    }
}

fn export_string(s: String, out: *mut *mut c_char) -> MvlnStatus {
    // interior NULs cannot occur in JSON/CSV we emit; guard anyway
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            MvlnStatus::MvlnOk
        }
        Err(_) => MvlnStatus::MvlnInternalError,
    }
}

/// Parse network source text into a handle. On success writes a handle to
/// `out`; the caller owns it and must free it with `mvln_network_free`.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mvln_network_parse(
    text: *const c_char,
    out: *mut *mut MvlnNetwork,
) -> MvlnStatus {
    if text.is_null() || out.is_null() {
        return MvlnStatus::MvlnNullArgument;
    }
    *out = ptr::null_mut();
    let Ok(src) = CStr::from_ptr(text).to_str() else {
        return MvlnStatus::MvlnParseError;
    };
    let built = mvln::parse_network(src)
        .and_then(|network| {
            let alg = assemble(&network)?;
            let system = build_augmented(&alg)?;
            Ok(MvlnNetwork { network, system })
        });
    match built {
        Ok(handle) => {
            *out = Box::into_raw(Box::new(handle));
            MvlnStatus::MvlnOk
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `handle` must come from `mvln_network_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mvln_network_free(handle: *mut MvlnNetwork) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of nodes per network.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mvln_network_node_count(handle: *const MvlnNetwork) -> usize {
    if handle.is_null() {
        return 0;
    }
    (*handle).network.n
}

/// Value count k of the logic.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mvln_network_value_count(handle: *const MvlnNetwork) -> usize {
    if handle.is_null() {
        return 0;
    }
    (*handle).network.k
}

/// Run the full synchronization analysis and write a JSON report string.
///
/// # Safety
/// `handle` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mvln_analyze_json(
    handle: *const MvlnNetwork,
    gamma: usize,
    full_basin: bool,
    out: *mut *mut c_char,
) -> MvlnStatus {
    if handle.is_null() || out.is_null() {
        return MvlnStatus::MvlnNullArgument;
    }
    *out = ptr::null_mut();
    let h = &*handle;
    let result = SyncSpec::new(h.network.k, h.network.n, gamma)
        .and_then(|spec| analyze(&h.system, spec))
        .map(|analysis| analysis_report(&analysis, full_basin));
    match result {
        Ok(report) => match serde_json::to_string_pretty(&report) {
            Ok(text) => export_string(text, out),
            Err(_) => MvlnStatus::MvlnInternalError,
        },
        Err(e) => status_of(&e),
    }
}

/// Pinning synthesis (policy 0 = lowest-index, 1 = seeded with `seed`),
/// reported as JSON. Succeeds with an empty pinning section when the system
/// already synchronizes.
///
/// # Safety
/// `handle` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mvln_pin_json(
    handle: *const MvlnNetwork,
    gamma: usize,
    policy: u32,
    seed: u64,
    out: *mut *mut c_char,
) -> MvlnStatus {
    if handle.is_null() || out.is_null() {
        return MvlnStatus::MvlnNullArgument;
    }
    *out = ptr::null_mut();
    let h = &*handle;
    let policy = match policy {
        0 => TargetPolicy::LowestIndex,
        1 => TargetPolicy::Seeded(seed),
        _ => return MvlnStatus::MvlnInvalidArgument,
    };
    let result = (|| {
        let spec = SyncSpec::new(h.network.k, h.network.n, gamma)?;
        let lambda = sync_state_set(spec)?;
        let analysis = analyze(&h.system, spec)?;
        let mut report = analysis_report(&analysis, false);
        if !analysis.global_sync {
            let plan = synthesize(&h.system, &lambda, &policy)?;
            let verify = verify_plan(&h.system, &plan, &lambda)?;
            report.pinning = Some(pinning_report(&plan, &verify));
        }
        Ok::<_, Error>(report)
    })();
    match result {
        Ok(report) => match serde_json::to_string_pretty(&report) {
            Ok(text) => export_string(text, out),
            Err(_) => MvlnStatus::MvlnInternalError,
        },
        Err(e) => status_of(&e),
    }
}

/// Simulate `steps` steps from the composite δ-index `xi` and write a CSV
/// trajectory.
///
/// # Safety
/// `handle` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mvln_simulate_csv(
    handle: *const MvlnNetwork,
    xi: usize,
    steps: usize,
    out: *mut *mut c_char,
) -> MvlnStatus {
    if handle.is_null() || out.is_null() {
        return MvlnStatus::MvlnNullArgument;
    }
    *out = ptr::null_mut();
    let h = &*handle;
    let result = simulate(&h.system, xi, steps)
        .and_then(|traj| trajectory_csv(&traj, h.network.k, h.network.n));
    match result {
        Ok(csv) => export_string(csv, out),
        Err(e) => status_of(&e),
    }
}

/// Release a string returned by any mvln function.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mvln_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn mvln_status_message(status: MvlnStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        MvlnStatus::MvlnOk => b"ok\0",
        MvlnStatus::MvlnNullArgument => b"null argument\0",
        MvlnStatus::MvlnParseError => b"parse error\0",
        MvlnStatus::MvlnInvalidArgument => b"invalid argument\0",
        MvlnStatus::MvlnNotSynchronous => b"not synchronous\0",
        MvlnStatus::MvlnInfeasible => b"infeasible\0",
        MvlnStatus::MvlnInternalError => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}
