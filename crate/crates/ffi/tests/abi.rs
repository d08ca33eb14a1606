use std::ffi::{CStr, CString};
use std::ptr;

use privgraph_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(pg_last_error_message()) }.to_string_lossy().into_owned()
}

unsafe fn triangle() -> *mut PgGraph {
    let mut g = ptr::null_mut();
    assert_eq!(pg_graph_new(3, &mut g), PgStatus::Ok);
    for (u, v) in [(0, 1), (0, 2), (1, 2)] {
        assert_eq!(pg_graph_set_weight(g, u, v, 1.0, false), PgStatus::Ok);
    }
    g
}

#[test]
fn graph_lifecycle() {
    unsafe {
        let g = triangle();
        assert_eq!(pg_graph_vertex_count(g), 3);
        assert_eq!(pg_graph_slot_count(g), 3);
        let (mut u, mut v, mut w) = (0, 0, 0.0);
        assert_eq!(pg_graph_slot(g, 2, &mut u, &mut v, &mut w), PgStatus::Ok);
        assert_eq!((u, v, w), (1, 2, 1.0));
        assert_eq!(pg_graph_slot(g, 3, &mut u, &mut v, &mut w), PgStatus::Domain);
        let mut r = 0.0;
        assert_eq!(pg_effective_resistance(g, 0, 1, &mut r), PgStatus::Ok);
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
        pg_graph_free(g);
        pg_graph_free(ptr::null_mut());
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let g = triangle();
        assert_eq!(pg_graph_set_weight(g, 0, 1, -1.0, false), PgStatus::Domain);
        assert!(last_error().contains("non-negative"), "{}", last_error());
        assert_eq!(pg_graph_set_weight(g, 0, 1, -1.0, true), PgStatus::Ok);
        assert_eq!(last_error(), "");
        assert_eq!(pg_graph_set_weight(ptr::null_mut(), 0, 1, 1.0, false), PgStatus::NullPointer);
        let mut w = 0.0;
        assert_eq!(pg_graph_weight(g, 0, 0, &mut w), PgStatus::Domain);
        let mut id = 0;
        assert_eq!(pg_edge_id(2, 3, 4, &mut id), PgStatus::Ok);
        assert_eq!(id, 5);

        let big = {
            let mut b = ptr::null_mut();
            pg_graph_new(14, &mut b);
            b
        };
        let mut e = 0.0;
        assert_eq!(pg_max_cut_error(big, big, &mut e), PgStatus::Capacity);
        let missing = CString::new("/nonexistent/graph.el").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(pg_graph_load(missing.as_ptr(), false, &mut h), PgStatus::Io);
        assert!(last_error().contains("/nonexistent/graph.el"));
        pg_graph_free(big);
        pg_graph_free(g);
    }
}

#[test]
fn releases_report_budgets() {
    unsafe {
        let g = triangle();
        let mut r = ptr::null_mut();
        assert_eq!(pg_spectral_release(g, 0.5, 0.25, 7, &mut r), PgStatus::Ok);
        let mut b = PgBudget { epsilon: 0.0, delta: 0.0 };
        assert_eq!(pg_release_budget(r, &mut b), PgStatus::Ok);
        assert_eq!(b, PgBudget { epsilon: 2.0, delta: 0.0 });
        let mut out = ptr::null_mut();
        assert_eq!(pg_release_graph(r, PgReleasePart::Whole, &mut out), PgStatus::Ok);
        assert_eq!(pg_graph_slot_count(out), pg_release_m_hat(r));
        assert_eq!(pg_release_graph(r, PgReleasePart::Heavy, &mut out), PgStatus::Domain);
        pg_graph_free(out);
        pg_release_free(r);

        let mut c = ptr::null_mut();
        assert_eq!(pg_cut_release(g, 0.5, 1e-6, f64::NAN, 0, 7, &mut c), PgStatus::Ok);
        assert_eq!(pg_release_budget(c, &mut b), PgStatus::Ok);
        assert!((b.epsilon - 2.5).abs() < 1e-12 && b.delta == 1e-6);
        let (mut whole, mut heavy, mut light) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        pg_release_graph(c, PgReleasePart::Whole, &mut whole);
        pg_release_graph(c, PgReleasePart::Heavy, &mut heavy);
        pg_release_graph(c, PgReleasePart::Light, &mut light);
        let mut w = 0.0;
        let (mut hw, mut lw) = (0.0, 0.0);
        pg_graph_weight(whole, 0, 1, &mut w);
        pg_graph_weight(heavy, 0, 1, &mut hw);
        pg_graph_weight(light, 0, 1, &mut lw);
        assert_eq!(w, hw + lw);
        assert_eq!(pg_cut_release(g, 0.5, 0.0, f64::NAN, 0, 7, &mut c), PgStatus::Domain);
        for h in [whole, heavy, light] {
            pg_graph_free(h);
        }
        pg_release_free(c);
        pg_graph_free(g);
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("g.el").to_str().unwrap()).unwrap();
    unsafe {
        let g = triangle();
        pg_graph_set_weight(g, 0, 2, -0.25, true);
        assert_eq!(pg_graph_save(g, path.as_ptr()), PgStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(pg_graph_load(path.as_ptr(), false, &mut back), PgStatus::Parse);
        assert_eq!(pg_graph_load(path.as_ptr(), true, &mut back), PgStatus::Ok);
        let mut d = -1.0;
        assert_eq!(pg_spectral_norm_diff(g, back, 1, &mut d), PgStatus::Ok);
        assert_eq!(d, 0.0);
        pg_graph_free(back);
        pg_graph_free(g);
    }
}
