//! C ABI for `privgraph`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with the
//! matching `*_free` function. Every fallible call returns a [`PgStatus`]; on
//! failure [`pg_last_error_message`] describes the most recent error on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use privgraph::analytics::effective_resistance;
use privgraph::cut::cut_release;
use privgraph::graph::{edge_id, laplacian, EdgeId, Graph};
use privgraph::harness::io::{load_graph_with, save_graph, Weights};
use privgraph::harness::oracle::brute_force_max_cut_error;
use privgraph::linalg::power_iteration_estimate;
use privgraph::mirror::MirrorDescentConfig;
use privgraph::spectral::spectral_release;
use privgraph::{Error, ReleaseRng};
use rand::SeedableRng;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Capacity = 3,
    NotConverged = 4,
    Invariant = 5,
    Config = 6,
    Io = 7,
    Parse = 8,
    InvalidUtf8 = 9,
    Panic = 10,
}

/// An `(ε, δ)` pair.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgBudget {
    pub epsilon: f64,
    pub delta: f64,
}

/// Which graph of a release to copy out.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgReleasePart {
    /// The released graph.
    Whole = 0,
    /// Cut releases only: the reweighted topology sample.
    Heavy = 1,
    /// Cut releases only: the synthesized residual.
    Light = 2,
}

/// Opaque weighted graph.
pub struct PgGraph {
    inner: Graph,
}

/// Opaque result of a spectral or cut release.
pub struct PgRelease {
    graph: Graph,
    parts: Option<(Graph, Graph)>,
    m_hat: usize,
    budget: PgBudget,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PgStatus {
    match e {
        Error::Domain(_) => PgStatus::Domain,
        Error::Capacity(_) => PgStatus::Capacity,
        Error::NotConverged { .. } => PgStatus::NotConverged,
        Error::Invariant(_) => PgStatus::Invariant,
        Error::Config(_) => PgStatus::Config,
        Error::Parse { .. } => PgStatus::Parse,
        Error::File { .. } | Error::Io(_) | Error::Json(_) => PgStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Utf8,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PgStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer passed for {what}"));
            PgStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("path is not valid UTF-8");
            PgStatus::InvalidUtf8
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic");
            PgStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

fn boxed_graph(g: Graph) -> *mut PgGraph {
    Box::into_raw(Box::new(PgGraph { inner: g }))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an empty graph on `n` vertices.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_new(n: usize, out: *mut *mut PgGraph) -> PgStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        *out = boxed_graph(Graph::new(n));
        Ok(())
    })
}

/// Loads an edge-list file. Negative weights are rejected unless `allow_negative`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_load(path: *const c_char, allow_negative: bool, out: *mut *mut PgGraph) -> PgStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let weights = if allow_negative { Weights::Signed } else { Weights::NonNegative };
        *out = boxed_graph(load_graph_with(path_arg(path)?, weights)?);
        Ok(())
    })
}

/// Writes an edge-list file.
///
/// # Safety
/// `g` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_save(g: *const PgGraph, path: *const c_char) -> PgStatus {
    guard(|| {
        save_graph(&borrow(g, "graph")?.inner, path_arg(path)?)?;
        Ok(())
    })
}

/// Releases a graph handle. Null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_free(g: *mut PgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Sets the weight of `{u, v}`. Negative weights require `allow_negative`.
///
/// # Safety
/// `g` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_set_weight(g: *mut PgGraph, u: usize, v: usize, w: f64, allow_negative: bool) -> PgStatus {
    guard(|| {
        let g = &mut borrow_mut(g, "graph")?.inner;
        if allow_negative {
            g.set_signed_weight(u, v, w)?;
        } else {
            g.set_weight(u, v, w)?;
        }
        Ok(())
    })
}

/// Weight of `{u, v}` (0 when absent).
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_weight(g: *const PgGraph, u: usize, v: usize, out: *mut f64) -> PgStatus {
    guard(|| {
        let w = borrow(g, "graph")?.inner.weight(u, v)?;
        *borrow_mut(out, "out")? = w;
        Ok(())
    })
}

/// Vertex count; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_vertex_count(g: *const PgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Number of stored slots, including explicit zeros; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_slot_count(g: *const PgGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.stored_slots())
}

/// The `index`-th stored slot in `(u, v)` lexicographic order.
///
/// # Safety
/// `g` must be a live handle; the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pg_graph_slot(
    g: *const PgGraph,
    index: usize,
    u: *mut usize,
    v: *mut usize,
    w: *mut f64,
) -> PgStatus {
    guard(|| {
        let g = &borrow(g, "graph")?.inner;
        let Some((a, b, x)) = g.edges().nth(index) else {
            return Err(Error::Domain(format!("slot index {index} out of range")).into());
        };
        *borrow_mut(u, "u")? = a;
        *borrow_mut(v, "v")? = b;
        *borrow_mut(w, "w")? = x;
        Ok(())
    })
}

/// Runs the `(4ε, 0)` spectral release.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_spectral_release(
    g: *const PgGraph,
    epsilon: f64,
    beta: f64,
    seed: u64,
    out: *mut *mut PgRelease,
) -> PgStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let r = spectral_release(&borrow(g, "graph")?.inner, epsilon, beta, seed)?;
        let b = r.budget();
        *out = Box::into_raw(Box::new(PgRelease {
            graph: r.graph,
            parts: None,
            m_hat: r.m_hat,
            budget: PgBudget {
                epsilon: b.epsilon,
                delta: b.delta,
            },
        }));
        Ok(())
    })
}

/// Runs the `(5ε, δ)` cut release. A NaN `beta` selects the default and
/// `md_iterations = 0` the default round count.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_cut_release(
    g: *const PgGraph,
    epsilon: f64,
    delta: f64,
    beta: f64,
    md_iterations: usize,
    seed: u64,
    out: *mut *mut PgRelease,
) -> PgStatus {
    guard(|| {
        let out = borrow_mut(out, "out")?;
        let config = MirrorDescentConfig {
            iterations: (md_iterations > 0).then_some(md_iterations),
            ..Default::default()
        };
        let beta = (!beta.is_nan()).then_some(beta);
        let r = cut_release(&borrow(g, "graph")?.inner, epsilon, delta, beta, &config, seed)?;
        let b = r.budget();
        *out = Box::into_raw(Box::new(PgRelease {
            graph: r.graph,
            parts: Some((r.heavy_part, r.light_part)),
            m_hat: r.m_hat,
            budget: PgBudget {
                epsilon: b.epsilon,
                delta: b.delta,
            },
        }));
        Ok(())
    })
}

/// Copies one graph of a release into a new graph handle.
///
/// # Safety
/// `r` must be a live release handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_release_graph(r: *const PgRelease, part: PgReleasePart, out: *mut *mut PgGraph) -> PgStatus {
    guard(|| {
        let r = borrow(r, "release")?;
        let out = borrow_mut(out, "out")?;
        let g = match (part, &r.parts) {
            (PgReleasePart::Whole, _) => r.graph.clone(),
            (PgReleasePart::Heavy, Some((h, _))) => h.clone(),
            (PgReleasePart::Light, Some((_, l))) => l.clone(),
            _ => return Err(Error::Domain("spectral releases have no heavy or light part".into()).into()),
        };
        *out = boxed_graph(g);
        Ok(())
    })
}

/// Total privacy charged by the release.
///
/// # Safety
/// `r` must be a live release handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_release_budget(r: *const PgRelease, out: *mut PgBudget) -> PgStatus {
    guard(|| {
        *borrow_mut(out, "out")? = borrow(r, "release")?.budget;
        Ok(())
    })
}

/// Noisy edge count `m̂` drawn by the release; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live release handle.
#[no_mangle]
pub unsafe extern "C" fn pg_release_m_hat(r: *const PgRelease) -> usize {
    r.as_ref().map_or(0, |r| r.m_hat)
}

/// Releases a release handle. Null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pg_release_free(r: *mut PgRelease) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// `R_eff(u, v)` on a connected graph.
///
/// # Safety
/// `g` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_effective_resistance(g: *const PgGraph, u: usize, v: usize, out: *mut f64) -> PgStatus {
    guard(|| {
        let r = effective_resistance(&borrow(g, "graph")?.inner, u, v)?;
        *borrow_mut(out, "out")? = r;
        Ok(())
    })
}

/// Exact `max |Φ_a − Φ_b|` over disjoint `(S, T)`; `n ≤ 13`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_max_cut_error(a: *const PgGraph, b: *const PgGraph, out: *mut f64) -> PgStatus {
    guard(|| {
        let (err, _) = brute_force_max_cut_error(&borrow(a, "a")?.inner, &borrow(b, "b")?.inner)?;
        *borrow_mut(out, "out")? = err;
        Ok(())
    })
}

/// `‖L_a − L_b‖₂` by power iteration from a seeded start.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pg_spectral_norm_diff(a: *const PgGraph, b: *const PgGraph, seed: u64, out: *mut f64) -> PgStatus {
    guard(|| {
        let (a, b) = (&borrow(a, "a")?.inner, &borrow(b, "b")?.inner);
        if a.n() != b.n() {
            return Err(Error::Domain(format!("vertex counts differ: {} vs {}", a.n(), b.n())).into());
        }
        let mut rng = ReleaseRng::seed_from_u64(seed);
        *borrow_mut(out, "out")? = power_iteration_estimate(&(laplacian(a).0 - laplacian(b).0), &mut rng);
        Ok(())
    })
}

/// Slot index of `{u, v}` in an `n`-vertex graph.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pg_edge_id(u: usize, v: usize, n: usize, out: *mut usize) -> PgStatus {
    guard(|| {
        let EdgeId(id) = edge_id(u, v, n)?;
        *borrow_mut(out, "out")? = id;
        Ok(())
    })
}
