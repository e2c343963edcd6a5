//! C ABI over `lampwalk`.
//!
//! Every fallible function returns an [`LwStatus`]; on failure a message is
//! available from [`lw_last_error`] on the same thread. Handles are opaque and
//! must be released with their matching `_free` function. Strings returned
//! through `out` parameters are owned by the caller and released with
//! [`lw_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lampwalk::cli::{self, ExperimentManifest, KernelSpec, ResolvedKernel};
use lampwalk::lang::{self, FactorSet, LabeledDigraph};
use lampwalk::schreier::{build_schreier, GroupSpec, Presentation, SchreierGraph};
use lampwalk::simulate::{self, SimConfig};
use lampwalk::spectral;
use lampwalk::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LwStatus {
    Ok = 0,
    /// Null pointer or string that is not UTF-8.
    InvalidArgument = 1,
    /// Input rejected by validation.
    Validation = 2,
    /// A hypothesis certification failed.
    Hypothesis = 3,
    Io = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

/// Opaque transition kernel.
pub struct LwKernel {
    inner: ResolvedKernel,
}

/// Opaque labelled digraph.
pub struct LwGraph {
    inner: LabeledDigraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LwStatus {
    match e.exit_code() {
        3 => LwStatus::Hypothesis,
        1 => LwStatus::Io,
        _ => LwStatus::Validation,
    }
}

struct Fail(LwStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> LwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LwStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            LwStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(LwStatus::InvalidArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LwStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(LwStatus::InvalidArgument, format!("{what} is null")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(LwStatus::InvalidArgument, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(LwStatus::Internal, "string contains NUL".into()))?;
    write(out, c.into_raw(), "out")
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a kernel from shorthand (`biased:0.7`, `srw:homtree:3`,
/// `sws:srw:z`, ...) or JSON.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lw_kernel_new(spec: *const c_char, out: *mut *mut LwKernel) -> LwStatus {
    guard(|| {
        let inner = KernelSpec::parse(read_str(spec, "spec")?)?.resolve()?;
        write(out, Box::into_raw(Box::new(LwKernel { inner })), "out")
    })
}

/// # Safety
/// `k` must be null or a handle from [`lw_kernel_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lw_kernel_free(k: *mut LwKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Spectral radius at the origin from return probabilities up to `n_max`
/// (even, at least 10).
///
/// # Safety
/// `k` must be a live kernel handle; `rho` and `error_estimate` writable.
#[no_mangle]
pub unsafe extern "C" fn lw_spectral_radius(
    k: *const LwKernel,
    n_max: usize,
    rho: *mut f64,
    error_estimate: *mut f64,
) -> LwStatus {
    guard(|| {
        let e = match &deref(k, "kernel")?.inner {
            ResolvedKernel::Base(b) => spectral::spectral_radius_base(b, n_max)?,
            ResolvedKernel::Lamplighter(l) => spectral::spectral_radius_dp(
                l,
                &lampwalk::lamplighter::LamplighterState::at(l.graph().origin()),
                n_max,
            )?,
        };
        write(rho, e.rho, "rho")?;
        write(error_estimate, e.error_estimate, "error_estimate")
    })
}

/// Monte-Carlo rate of escape `E[d(X_0, X_n)]/n` in the graph metric of the
/// kernel's state space.
///
/// # Safety
/// `k` must be a live kernel handle; `estimate` and `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn lw_rate_of_escape(
    k: *const LwKernel,
    seed: u64,
    horizon: usize,
    trials: usize,
    threads: usize,
    estimate: *mut f64,
    stderr: *mut f64,
) -> LwStatus {
    guard(|| {
        let cfg = SimConfig::new(seed, horizon, trials)?.with_threads(threads.max(1));
        let e = match &deref(k, "kernel")?.inner {
            ResolvedKernel::Base(b) => simulate::rate_of_escape_base(b, &cfg)?,
            ResolvedKernel::Lamplighter(l) => {
                let lg = lampwalk::lamplighter::LamplighterGraph::new(l.graph());
                simulate::rate_of_escape(
                    l,
                    &lg.origin(),
                    |a, b| lg.distance(a, b).map_or(f64::NAN, |d| d.value as f64),
                    &cfg,
                )?
            }
        };
        write(estimate, e.estimate, "estimate")?;
        write(stderr, e.stderr, "stderr")
    })
}

/// Parses a labelled digraph from JSON
/// (`{"vertices": n, "alphabet": [...], "edges": [[s, "a", t], ...]}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lw_graph_from_json(
    json: *const c_char,
    out: *mut *mut LwGraph,
) -> LwStatus {
    guard(|| {
        let inner: LabeledDigraph =
            serde_json::from_str(read_str(json, "json")?).map_err(Error::from)?;
        write(out, Box::into_raw(Box::new(LwGraph { inner })), "out")
    })
}

/// Builds the Schreier graph of `group`/`subgroup` under the letter
/// assignment `psi` (see the CLI for the string syntax).
///
/// # Safety
/// The strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lw_schreier_build(
    group: *const c_char,
    subgroup: *const c_char,
    psi: *const c_char,
    radius: usize,
    out: *mut *mut LwGraph,
) -> LwStatus {
    guard(|| {
        let spec = GroupSpec::parse(read_str(group, "group")?, read_str(subgroup, "subgroup")?)?;
        let psi = Presentation::parse(&spec, read_str(psi, "psi")?)?;
        let SchreierGraph { graph, .. } = build_schreier(&spec, &psi, radius)?;
        write(
            out,
            Box::into_raw(Box::new(LwGraph { inner: graph })),
            "out",
        )
    })
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn lw_graph_free(g: *mut LwGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Entropy `log ρ` of the path language from `x` to `y`.
///
/// # Safety
/// `g` must be a live graph handle; `h` writable.
#[no_mangle]
pub unsafe extern "C" fn lw_entropy(
    g: *const LwGraph,
    x: usize,
    y: usize,
    n_max: usize,
    h: *mut f64,
) -> LwStatus {
    guard(|| {
        let e = lang::entropy(&deref(g, "graph")?.inner, x, y, n_max)?;
        write(h, e.h, "h")
    })
}

/// Growth-sensitivity report for the comma-separated forbidden words, as JSON.
///
/// # Safety
/// `g` must be a live graph handle, `forbid` NUL-terminated and `out`
/// writable. Free the result with [`lw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lw_growth_report_json(
    g: *const LwGraph,
    forbid: *const c_char,
    out: *mut *mut c_char,
) -> LwStatus {
    guard(|| {
        let f = FactorSet::parse(read_str(forbid, "forbid")?)?;
        let report = lang::growth_sensitivity_report(&deref(g, "graph")?.inner, &f)?;
        write_string(out, serde_json::to_string(&report).map_err(Error::from)?)
    })
}

/// Runs an experiment manifest and returns the JSON summary.
///
/// # Safety
/// `manifest` must be NUL-terminated and `out` writable. Free the result
/// with [`lw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lw_run_manifest(
    manifest: *const c_char,
    out: *mut *mut c_char,
) -> LwStatus {
    guard(|| {
        let m: ExperimentManifest =
            serde_json::from_str(read_str(manifest, "manifest")?).map_err(Error::from)?;
        let o = cli::run(&m)?;
        write_string(
            out,
            serde_json::to_string_pretty(&o.summary).map_err(Error::from)?,
        )?;
        if o.status == 0 {
            Ok(())
        } else {
            Err(Fail(LwStatus::Hypothesis, "certification failed".into()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        unsafe {
            CStr::from_ptr(lw_last_error())
                .to_string_lossy()
                .into_owned()
        }
    }

    #[test]
    fn kernel_lifecycle_and_spectral_radius() {
        unsafe {
            let mut k = ptr::null_mut();
            assert_eq!(
                lw_kernel_new(c("biased:0.7").as_ptr(), &mut k),
                LwStatus::Ok
            );
            let (mut rho, mut err) = (0.0, 0.0);
            assert_eq!(lw_spectral_radius(k, 400, &mut rho, &mut err), LwStatus::Ok);
            assert!((rho - 2.0 * (0.21f64).sqrt()).abs() < 1e-6);
            let (mut est, mut se) = (0.0, 0.0);
            assert_eq!(
                lw_rate_of_escape(k, 1, 500, 50, 2, &mut est, &mut se),
                LwStatus::Ok
            );
            assert!((est - 0.4).abs() < 5.0 * se + 0.02);
            lw_kernel_free(k);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut k = ptr::null_mut();
            assert_eq!(
                lw_kernel_new(c("biased:0.2").as_ptr(), &mut k),
                LwStatus::Validation
            );
            assert!(k.is_null());
            assert!(last_error().contains("parameter"));
            assert_eq!(
                lw_kernel_new(ptr::null(), &mut k),
                LwStatus::InvalidArgument
            );
            assert_eq!(
                lw_spectral_radius(ptr::null(), 400, ptr::null_mut(), ptr::null_mut()),
                LwStatus::InvalidArgument
            );
            lw_kernel_free(ptr::null_mut());
            lw_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn graph_entropy_and_report() {
        unsafe {
            let mut g = ptr::null_mut();
            let json = c(r#"{"vertices":1,"alphabet":["0","1"],"edges":[[0,"0",0],[0,"1",0]]}"#);
            assert_eq!(lw_graph_from_json(json.as_ptr(), &mut g), LwStatus::Ok);
            let mut h = 0.0;
            assert_eq!(lw_entropy(g, 0, 0, 64, &mut h), LwStatus::Ok);
            assert!((h - 2f64.ln()).abs() < 1e-12);
            let mut s = ptr::null_mut();
            assert_eq!(
                lw_growth_report_json(g, c("11").as_ptr(), &mut s),
                LwStatus::Ok
            );
            let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
            lw_string_free(s);
            assert!(text.contains("\"strict\":true"));
            assert_eq!(
                lw_growth_report_json(g, c("2").as_ptr(), &mut s),
                LwStatus::Validation
            );
            lw_graph_free(g);
        }
    }

    #[test]
    fn hypothesis_failures_map_to_their_status() {
        unsafe {
            let mut g = ptr::null_mut();
            let json = c(r#"{"vertices":2,"alphabet":["a"],"edges":[[0,"a",1]]}"#);
            assert_eq!(lw_graph_from_json(json.as_ptr(), &mut g), LwStatus::Ok);
            let mut h = 0.0;
            assert_eq!(lw_entropy(g, 0, 1, 16, &mut h), LwStatus::Hypothesis);
            lw_graph_free(g);
        }
    }

    #[test]
    fn schreier_and_manifest() {
        unsafe {
            let mut g = ptr::null_mut();
            let st = lw_schreier_build(
                c("z2").as_ptr(),
                c("trivial").as_ptr(),
                c("a=t").as_ptr(),
                1,
                &mut g,
            );
            assert_eq!(st, LwStatus::Ok);
            assert_eq!((*g).inner.vertex_count(), 2);
            lw_graph_free(g);
            let m =
                c(r#"{"task":{"command":"spectral","op":"rho","kernel":"biased:0.7","nmax":100}}"#);
            let mut s = ptr::null_mut();
            assert_eq!(lw_run_manifest(m.as_ptr(), &mut s), LwStatus::Validation);
            let m = c(
                r#"{"task":{"command":"spectral","op":"rho","kernel":{"kind":"biased","p":0.7},"nmax":100}}"#,
            );
            assert_eq!(lw_run_manifest(m.as_ptr(), &mut s), LwStatus::Ok);
            assert!(CStr::from_ptr(s).to_str().unwrap().contains("\"rho\""));
            lw_string_free(s);
        }
    }
}
