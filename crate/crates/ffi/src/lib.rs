//! C ABI over the core library.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `_free` function. Every fallible call returns a `welded_status`
//! code and writes its result through an out pointer; out parameters are
//! only written on `WELDED_OK`. The header `include/welded.h` mirrors these
//! signatures and is kept in sync by hand (and by the ABI tests below).

use std::ffi::{c_char, CStr, CString};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use welded_core::graph::{build_canonical, validate_welded_tree, RawGraph, WeldedTree};
use welded_core::oracle::GraphView;
use welded_core::permutation::ColorPreservingPermutation;
use welded_core::walk::column_walk;
use welded_core::{Color, RngStream};

pub const WELDED_OK: i32 = 0;
pub const WELDED_NULL_ARGUMENT: i32 = 1;
pub const WELDED_INVALID_ARGUMENT: i32 = 2;
pub const WELDED_INTERNAL: i32 = 3;

/// Opaque graph handle.
pub struct WeldedGraph {
    inner: Arc<WeldedTree>,
}

/// Opaque oracle handle: a graph, an optional weld permutation, and a
/// query meter.
pub struct WeldedOracle {
    graph: Arc<WeldedTree>,
    sigma: Option<ColorPreservingPermutation>,
    meter: AtomicU64,
}

fn color_from_u32(c: u32) -> Option<Color> {
    match c {
        0 => Some(Color::Red),
        1 => Some(Color::Green),
        2 => Some(Color::Blue),
        _ => None,
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_graph_build(n: u32, seed: u64, out: *mut *mut WeldedGraph) -> i32 {
    if out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    match build_canonical(n, seed) {
        Ok(g) => {
            unsafe { *out = Box::into_raw(Box::new(WeldedGraph { inner: Arc::new(g) })) };
            WELDED_OK
        }
        Err(_) => WELDED_INVALID_ARGUMENT,
    }
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_graph_from_json(
    json: *const c_char,
    out: *mut *mut WeldedGraph,
) -> i32 {
    if json.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let Ok(text) = unsafe { CStr::from_ptr(json) }.to_str() else {
        return WELDED_INVALID_ARGUMENT;
    };
    let Ok(raw) = serde_json::from_str::<RawGraph>(text) else {
        return WELDED_INVALID_ARGUMENT;
    };
    match WeldedTree::from_raw(&raw) {
        Ok(g) => {
            unsafe { *out = Box::into_raw(Box::new(WeldedGraph { inner: Arc::new(g) })) };
            WELDED_OK
        }
        Err(_) => WELDED_INVALID_ARGUMENT,
    }
}

/// # Safety
/// `graph` must come from a `welded_graph_*` constructor (or be null).
#[no_mangle]
pub unsafe extern "C" fn welded_graph_free(graph: *mut WeldedGraph) {
    if !graph.is_null() {
        drop(unsafe { Box::from_raw(graph) });
    }
}

macro_rules! graph_getter {
    ($name:ident, $ty:ty, $body:expr) => {
        /// # Safety
        /// `graph` must be a live graph handle and `out` a valid pointer.
        #[no_mangle]
        pub unsafe extern "C" fn $name(graph: *const WeldedGraph, out: *mut $ty) -> i32 {
            if graph.is_null() || out.is_null() {
                return WELDED_NULL_ARGUMENT;
            }
            let g: &WeldedTree = unsafe { &(*graph).inner };
            #[allow(clippy::redundant_closure_call)]
            unsafe {
                *out = ($body)(g)
            };
            WELDED_OK
        }
    };
}

graph_getter!(welded_graph_n, u32, |g: &WeldedTree| g.n());
graph_getter!(welded_graph_vertex_count, u64, |g: &WeldedTree| g.vertex_count() as u64);
graph_getter!(welded_graph_label_bits, u32, |g: &WeldedTree| g.label_bits());
graph_getter!(welded_graph_entrance_label, u64, |g: &WeldedTree| g.entrance_label());
graph_getter!(welded_graph_exit_label, u64, |g: &WeldedTree| g.exit_label());
graph_getter!(welded_graph_noedge_label, u64, |g: &WeldedTree| g.noedge_label());
graph_getter!(welded_graph_invalid_label, u64, |g: &WeldedTree| g.invalid_label());

/// Returns `WELDED_OK` when the graph passes full structural validation.
///
/// # Safety
/// `graph` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn welded_graph_validate(graph: *const WeldedGraph) -> i32 {
    if graph.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let g: &WeldedTree = unsafe { &(*graph).inner };
    if validate_welded_tree(g).is_ok() {
        WELDED_OK
    } else {
        WELDED_INVALID_ARGUMENT
    }
}

/// Serialize the graph to a NUL-terminated JSON string; release it with
/// `welded_string_free`.
///
/// # Safety
/// `graph` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_graph_to_json(
    graph: *const WeldedGraph,
    out: *mut *mut c_char,
) -> i32 {
    if graph.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let g: &WeldedTree = unsafe { &(*graph).inner };
    let Ok(json) = serde_json::to_string_pretty(&g.to_raw()) else {
        return WELDED_INTERNAL;
    };
    let Ok(cstr) = CString::new(json) else {
        return WELDED_INTERNAL;
    };
    unsafe { *out = cstr.into_raw() };
    WELDED_OK
}

/// # Safety
/// `s` must come from this library (or be null).
#[no_mangle]
pub unsafe extern "C" fn welded_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Create an oracle over the graph; with `permute` nonzero the weld is
/// permuted by a seeded draw from the uniform color-preserving family.
///
/// # Safety
/// `graph` must be a live graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_oracle_new(
    graph: *const WeldedGraph,
    permute: i32,
    seed: u64,
    out: *mut *mut WeldedOracle,
) -> i32 {
    if graph.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let arc = unsafe { (*graph).inner.clone() };
    let sigma = (permute != 0).then(|| {
        let mut rng = RngStream::derive(seed, "ffi-sigma", 0);
        ColorPreservingPermutation::sample(&arc, &mut rng)
    });
    let oracle = WeldedOracle { graph: arc, sigma, meter: AtomicU64::new(0) };
    unsafe { *out = Box::into_raw(Box::new(oracle)) };
    WELDED_OK
}

/// # Safety
/// `oracle` must come from `welded_oracle_new` (or be null).
#[no_mangle]
pub unsafe extern "C" fn welded_oracle_free(oracle: *mut WeldedOracle) {
    if !oracle.is_null() {
        drop(unsafe { Box::from_raw(oracle) });
    }
}

/// One metered query: color is 0 = red, 1 = green, 2 = blue.
///
/// # Safety
/// `oracle` must be a live oracle handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_oracle_query(
    oracle: *const WeldedOracle,
    color: u32,
    label: u64,
    out: *mut u64,
) -> i32 {
    if oracle.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let Some(color) = color_from_u32(color) else {
        return WELDED_INVALID_ARGUMENT;
    };
    let o = unsafe { &*oracle };
    let view = match &o.sigma {
        Some(sigma) => GraphView::permuted(&o.graph, sigma),
        None => GraphView::new(&o.graph),
    };
    o.meter.fetch_add(1, Ordering::Relaxed);
    unsafe { *out = view.eta(color, label) };
    WELDED_OK
}

/// # Safety
/// `oracle` must be a live oracle handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_oracle_meter(oracle: *const WeldedOracle, out: *mut u64) -> i32 {
    if oracle.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    unsafe { *out = (*oracle).meter.load(Ordering::Relaxed) };
    WELDED_OK
}

/// The color missing at the entrance, at the cost of two metered queries.
///
/// # Safety
/// `oracle` must be a live oracle handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_oracle_missing_color(
    oracle: *const WeldedOracle,
    out: *mut u32,
) -> i32 {
    if oracle.is_null() || out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    let o = unsafe { &*oracle };
    let ent = o.graph.entrance_label();
    let noedge = o.graph.noedge_label();
    let probe = |c: Color| {
        let view = match &o.sigma {
            Some(sigma) => GraphView::permuted(&o.graph, sigma),
            None => GraphView::new(&o.graph),
        };
        o.meter.fetch_add(1, Ordering::Relaxed);
        view.eta(c, ent)
    };
    let missing = if probe(Color::Red) == noedge {
        probe(Color::Green);
        0
    } else if probe(Color::Green) == noedge {
        1
    } else {
        2
    };
    unsafe { *out = missing };
    WELDED_OK
}

/// Exit probability of the reduced column walk at `time`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn welded_column_walk(n: u32, time: f64, dt: f64, out: *mut f64) -> i32 {
    if out.is_null() {
        return WELDED_NULL_ARGUMENT;
    }
    if n == 0 || !dt.is_finite() || dt <= 0.0 || !time.is_finite() || time < 0.0 {
        return WELDED_INVALID_ARGUMENT;
    }
    unsafe { *out = column_walk(n, time, dt) };
    WELDED_OK
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn welded_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn build_query_and_free_through_the_abi() {
        unsafe {
            let mut g: *mut WeldedGraph = ptr::null_mut();
            assert_eq!(welded_graph_build(3, 7, &mut g), WELDED_OK);
            assert_eq!(welded_graph_validate(g), WELDED_OK);
            let mut count = 0u64;
            assert_eq!(welded_graph_vertex_count(g, &mut count), WELDED_OK);
            assert_eq!(count, 30);

            let mut o: *mut WeldedOracle = ptr::null_mut();
            assert_eq!(welded_oracle_new(g, 0, 0, &mut o), WELDED_OK);
            let mut ent = 0u64;
            welded_graph_entrance_label(g, &mut ent);
            let mut missing = 99u32;
            assert_eq!(welded_oracle_missing_color(o, &mut missing), WELDED_OK);
            assert!(missing < 3);
            let mut answer = 0u64;
            assert_eq!(welded_oracle_query(o, missing, ent, &mut answer), WELDED_OK);
            let mut noedge = 0u64;
            welded_graph_noedge_label(g, &mut noedge);
            assert_eq!(answer, noedge);
            let mut meter = 0u64;
            assert_eq!(welded_oracle_meter(o, &mut meter), WELDED_OK);
            assert_eq!(meter, 3);

            welded_oracle_free(o);
            welded_graph_free(g);
        }
    }

    #[test]
    fn json_round_trip_through_the_abi() {
        unsafe {
            let mut g: *mut WeldedGraph = ptr::null_mut();
            assert_eq!(welded_graph_build(2, 5, &mut g), WELDED_OK);
            let mut json: *mut c_char = ptr::null_mut();
            assert_eq!(welded_graph_to_json(g, &mut json), WELDED_OK);
            let mut g2: *mut WeldedGraph = ptr::null_mut();
            assert_eq!(welded_graph_from_json(json, &mut g2), WELDED_OK);
            let (mut a, mut b) = (0u64, 0u64);
            welded_graph_entrance_label(g, &mut a);
            welded_graph_entrance_label(g2, &mut b);
            assert_eq!(a, b);
            welded_string_free(json);
            welded_graph_free(g2);
            welded_graph_free(g);
        }
    }

    #[test]
    fn permuted_oracles_stay_involutive() {
        unsafe {
            let mut g: *mut WeldedGraph = ptr::null_mut();
            assert_eq!(welded_graph_build(4, 9, &mut g), WELDED_OK);
            let mut o: *mut WeldedOracle = ptr::null_mut();
            assert_eq!(welded_oracle_new(g, 1, 13, &mut o), WELDED_OK);
            let mut ent = 0u64;
            welded_graph_entrance_label(g, &mut ent);
            let mut child = 0u64;
            assert_eq!(welded_oracle_query(o, 0, ent, &mut child), WELDED_OK);
            let mut noedge = 0u64;
            welded_graph_noedge_label(g, &mut noedge);
            if child != noedge {
                let mut back = 0u64;
                assert_eq!(welded_oracle_query(o, 0, child, &mut back), WELDED_OK);
                assert_eq!(back, ent);
            }
            welded_oracle_free(o);
            welded_graph_free(g);
        }
    }

    #[test]
    fn errors_on_null_and_bad_arguments() {
        unsafe {
            assert_eq!(welded_graph_build(3, 0, ptr::null_mut()), WELDED_NULL_ARGUMENT);
            let mut g: *mut WeldedGraph = ptr::null_mut();
            assert_eq!(welded_graph_build(0, 0, &mut g), WELDED_INVALID_ARGUMENT);
            let mut out = 0.0f64;
            assert_eq!(welded_column_walk(3, 1.0, 0.0, &mut out), WELDED_INVALID_ARGUMENT);
            assert_eq!(welded_column_walk(3, 5.0, 0.01, &mut out), WELDED_OK);
            assert!(out >= 0.0);
            let mut answer = 0u64;
            assert_eq!(
                welded_oracle_query(ptr::null(), 0, 0, &mut answer),
                WELDED_NULL_ARGUMENT
            );
        }
    }

    #[test]
    fn version_string_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(welded_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
