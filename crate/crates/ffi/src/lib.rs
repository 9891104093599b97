//! C ABI for `lpa-grade`.
//!
//! Graphs live behind an opaque [`LpaGraph`] handle. Every entry point returns
//! an [`LpaStatus`]; on failure a message is available from
//! [`lpa_last_error_message`] until the next call on the same thread. Reports
//! come back as NUL-terminated JSON strings owned by the caller and released
//! with [`lpa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lpa_grade::graph::{parse_graph_with, Graph, GraphError, ParseOptions};
use lpa_grade::matrix_ring::MatrixRingInput;
use lpa_grade::monoid::{
    default_bounds, equiv_bounded, is_periodic_oracle, leq_bounded, paper_bound_for, strong_order_unit_bounded,
    MonoidElement, MonoidError, OracleOutcome,
};
use lpa_grade::{
    canonicalize, classify_lpa, classify_matrix_ring, emit_dot, k_theory_presentation, matricial_representation,
    ShiftedMatrixRing,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ResourceLimit = 4,
    InvalidInput = 5,
    Internal = 6,
}

/// A parsed finite directed graph.
pub struct LpaGraph {
    inner: Graph,
}

/// The classification verdicts as plain flags.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LpaClassification {
    pub no_sinks: bool,
    pub no_exit: bool,
    pub edl: bool,
    pub strongly_graded: bool,
    pub crossed_product: bool,
    pub skew_group_ring: bool,
    pub group_ring: bool,
    pub graded_unit_regular: bool,
}

/// Which monoid question [`lpa_monoid_check_json`] asks.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpaMonoidCheck {
    Periodic = 0,
    Equiv = 1,
    Leq = 2,
    StrongUnit = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(LpaStatus, String);

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::CycleLimit { .. } | GraphError::CountOverflow => LpaStatus::ResourceLimit,
            GraphError::Malformed { .. }
            | GraphError::DuplicateVertex { .. }
            | GraphError::DuplicateEdge { .. }
            | GraphError::UndeclaredVertex { .. }
            | GraphError::EmptyVertexSet => LpaStatus::ParseError,
            _ => LpaStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

impl From<MonoidError> for Failure {
    fn from(e: MonoidError) -> Self {
        match e {
            MonoidError::Graph(g) => g.into(),
            MonoidError::Overflow => Failure(LpaStatus::ResourceLimit, e.to_string()),
            MonoidError::Parse(_) => Failure(LpaStatus::ParseError, e.to_string()),
            _ => Failure(LpaStatus::InvalidInput, e.to_string()),
        }
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LpaStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LpaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            set_last_error(&message);
            LpaStatus::Internal
        }
    }
}

fn null() -> Failure {
    Failure(LpaStatus::NullPointer, "null pointer argument".to_string())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(LpaStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn graph_ref<'a>(g: *const LpaGraph) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|g| &g.inner).ok_or_else(null)
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(LpaStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn write_json<T: serde::Serialize + ?Sized>(out: *mut *mut c_char, value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string(value).map_err(|e| Failure(LpaStatus::Internal, e.to_string()))?;
    write_string(out, s)
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next `lpa_*` call on the same thread.
#[no_mangle]
pub extern "C" fn lpa_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lpa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses the textual graph format. In strict mode every edge endpoint must
/// be declared with a `vertex` line.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_parse(text: *const c_char, strict: bool, out: *mut *mut LpaGraph) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let g = parse_graph_with(read_str(text)?, ParseOptions { strict })?;
        *out = Box::into_raw(Box::new(LpaGraph { inner: g }));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from [`lpa_graph_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_free(g: *mut LpaGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_vertex_count(g: *const LpaGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.vertex_count())
}

/// # Safety
/// `g` must be null or a live handle. Returns 0 for null.
#[no_mangle]
pub unsafe extern "C" fn lpa_graph_edge_count(g: *const LpaGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpa_classify_flags(g: *const LpaGraph, out: *mut LpaClassification) -> LpaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(null)?;
        let r = classify_lpa(graph_ref(g)?)?;
        *out = LpaClassification {
            no_sinks: r.no_sinks,
            no_exit: r.no_exit,
            edl: r.edl.as_ref().is_some_and(|e| e.overall),
            strongly_graded: r.strongly_graded,
            crossed_product: r.crossed_product,
            skew_group_ring: r.skew_group_ring,
            group_ring: r.group_ring,
            graded_unit_regular: r.graded_unit_regular,
        };
        Ok(())
    })
}

/// Full classification report with witnesses, as JSON.
///
/// # Safety
/// `g` must be a live handle and `out` writable. Free the result with
/// [`lpa_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lpa_classify_json(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        write_json(out, &classify_lpa(graph_ref(g)?)?)
    })
}

/// Graded matricial representation of a no-exit graph, as JSON.
///
/// # Safety
/// As for [`lpa_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn lpa_matricial_json(g: *const LpaGraph, canonical: bool, out: *mut *mut c_char) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let mut a =
            matricial_representation(graph_ref(g)?).map_err(|e| Failure(LpaStatus::InvalidInput, e.to_string()))?;
        if canonical {
            a = canonicalize(&a);
        }
        write_json(out, &a)
    })
}

/// Graded K_0 presentation of a no-exit graph, as JSON.
///
/// # Safety
/// As for [`lpa_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn lpa_ktheory_json(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let a = matricial_representation(graph_ref(g)?).map_err(|e| Failure(LpaStatus::InvalidInput, e.to_string()))?;
        write_json(out, &k_theory_presentation(&a))
    })
}

/// DOT rendering of the graph.
///
/// # Safety
/// As for [`lpa_classify_json`].
#[no_mangle]
pub unsafe extern "C" fn lpa_dot(g: *const LpaGraph, out: *mut *mut c_char) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        write_string(out, emit_dot(graph_ref(g)?))
    })
}

/// Classifies `M_n(K[Gamma])(d)` given as JSON
/// `{"rank": r, "support": [[..]], "shifts": [[..]]}`.
///
/// # Safety
/// `input` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpa_matrix_ring_json(input: *const c_char, out: *mut *mut c_char) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let parsed: MatrixRingInput =
            serde_json::from_str(read_str(input)?).map_err(|e| Failure(LpaStatus::ParseError, e.to_string()))?;
        let ring =
            ShiftedMatrixRing::from_input(&parsed).map_err(|e| Failure(LpaStatus::InvalidInput, e.to_string()))?;
        write_json(out, &classify_matrix_ring(&ring))
    })
}

/// Runs a bounded monoid oracle with default bounds and returns the outcome
/// (a certificate or `unknown`) as JSON. `element2` is required for
/// `Equiv` and `Leq` and ignored otherwise; it may be null.
///
/// # Safety
/// `g` must be a live handle, `element` a NUL-terminated string, `element2`
/// null or NUL-terminated, and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lpa_monoid_check_json(
    g: *const LpaGraph,
    check: LpaMonoidCheck,
    element: *const c_char,
    element2: *const c_char,
    out: *mut *mut c_char,
) -> LpaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let g = graph_ref(g)?;
        let a = MonoidElement::parse(g, read_str(element)?)?;
        let mut bounds = default_bounds(g)?;
        let second = || -> Result<MonoidElement, Failure> { Ok(MonoidElement::parse(g, read_str(element2)?)?) };
        let outcome: OracleOutcome = match check {
            LpaMonoidCheck::Periodic => is_periodic_oracle(g, &a, &bounds)?,
            LpaMonoidCheck::Equiv => equiv_bounded(g, &a, &second()?, &bounds),
            LpaMonoidCheck::Leq => leq_bounded(g, &a, &second()?, &bounds),
            LpaMonoidCheck::StrongUnit => {
                if let Some(n) = paper_bound_for(g, &a)? {
                    bounds.multiple_max = n;
                }
                strong_order_unit_bounded(g, &a, &bounds)?
            }
        };
        write_json(out, &outcome)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lpa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
