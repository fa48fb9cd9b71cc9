//! Drives the C ABI end to end through the Rust declarations.

use std::ptr;
use twospecies_ffi::*;

unsafe fn grid_from(step: f64, values: &[f64]) -> *mut TsGridDensity {
    let mut out = ptr::null_mut();
    let status = ts_grid_new(step, values.as_ptr(), values.len(), &mut out);
    assert_eq!(status, TsStatus::Ok);
    out
}

unsafe fn uniform_half(step: f64) -> *mut TsGridDensity {
    let n = (1.0 / step).round() as usize + 1;
    grid_from(step, &vec![0.5; n])
}

fn last_error() -> String {
    let mut buf = vec![0i8; 256];
    let len = unsafe { ts_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..len.min(255)].iter().map(|b| *b as u8).collect();
    String::from_utf8_lossy(&bytes).into_owned()
}

#[test]
fn grid_roundtrip_and_errors() {
    unsafe {
        let g = uniform_half(1e-3);
        assert!((ts_grid_mass(g) - 0.5).abs() < 1e-10);

        let mut v = 0.0;
        assert_eq!(ts_grid_cumulative(g, 0.5, &mut v), TsStatus::Ok);
        assert!((v - 0.25).abs() < 1e-10);
        assert_eq!(ts_grid_cumulative(g, -1.0, &mut v), TsStatus::Domain);
        assert!(last_error().contains("nonnegative"));

        assert_eq!(ts_grid_quantile(g, 0.25, &mut v), TsStatus::Ok);
        assert!((v - 0.5).abs() < 1e-9);

        let mut out = ptr::null_mut();
        assert_eq!(
            ts_grid_new(-1.0, [1.0].as_ptr(), 1, &mut out),
            TsStatus::Domain
        );
        assert_eq!(
            ts_grid_new(1.0, ptr::null(), 0, &mut out),
            TsStatus::NullArgument
        );
        ts_grid_free(g);
    }
}

#[test]
fn solve_matches_closed_form() {
    unsafe {
        let f1 = uniform_half(1e-3);
        let f2 = uniform_half(1e-3);
        let mut sol = ptr::null_mut();
        assert_eq!(
            ts_solution_solve(f1, f2, 0.75, 1e-8, 0.0, &mut sol),
            TsStatus::Ok
        );

        let mut a = 0.0;
        assert_eq!(ts_solution_removal_rate_at(sol, 0.5, &mut a), TsStatus::Ok);
        assert!((a - 0.5 * 0.5f64.exp()).abs() < 1e-5, "a(0.5) = {a}");

        let blowup = ts_solution_blowup_time(sol, 0.0);
        assert!((blowup - 2.0f64.ln()).abs() < 1e-3, "blowup = {blowup}");
        assert!(ts_solution_renewal_residual(sol) < 1e-5);

        let horizon = ts_solution_horizon(sol);
        let mut v = 0.0;
        assert_eq!(
            ts_solution_n2_at(sol, horizon + 0.1, &mut v),
            TsStatus::OutOfHorizon
        );
        ts_solution_free(sol);
        ts_grid_free(f1);
        ts_grid_free(f2);
    }
}

#[test]
fn scheme_stepping_hand_values() {
    unsafe {
        let f1 = uniform_half(1e-2);
        let f2 = uniform_half(1e-2);
        let mut s = ptr::null_mut();
        assert_eq!(ts_scheme_new(f1, f2, 0.25, &mut s), TsStatus::Ok);
        assert_eq!(ts_scheme_step_index(s), 0);
        assert!((ts_scheme_n2(s) - 0.5).abs() < 1e-12);

        assert_eq!(ts_scheme_step(s), TsStatus::Ok);
        assert_eq!(ts_scheme_step_index(s), 1);
        assert!((ts_scheme_n2(s) - 0.375).abs() < 1e-12);

        let mut buf = [0.0f64; 8];
        let mut written = 0usize;
        assert_eq!(
            ts_scheme_bin_masses(s, 1, buf.as_mut_ptr(), buf.len(), &mut written),
            TsStatus::Ok
        );
        assert_eq!(written, 4);
        let expect = [0.15625, 0.15625, 0.15625, 0.03125];
        for (m, e) in buf[..4].iter().zip(expect.iter()) {
            assert!((m - e).abs() < 1e-12);
        }
        assert_eq!(
            ts_scheme_bin_masses(s, 3, buf.as_mut_ptr(), buf.len(), &mut written),
            TsStatus::Domain
        );
        ts_scheme_free(s);
        ts_grid_free(f1);
        ts_grid_free(f2);
    }
}

#[test]
fn pdmp_forced_trajectory_through_ffi() {
    unsafe {
        // f1 = 1 on [0, 0.5], f2 = 5/3 on [0, 0.3]: the n = 2 placement puts
        // species 1 at 0.5 and species 2 at 0.3.
        let f1 = grid_from(1e-3, &vec![1.0; 501]);
        let f2 = grid_from(1e-3, &vec![5.0 / 3.0; 301]);
        let mut p = ptr::null_mut();
        assert_eq!(ts_pdmp_new(f1, f2, 2, 7, 0, &mut p), TsStatus::Ok);

        assert_eq!(ts_pdmp_advance_to(p, 0.9), TsStatus::Ok);
        assert!((ts_pdmp_time(p) - 0.8).abs() < 1e-9);
        assert_eq!(ts_pdmp_removal_count(p), 2);
        assert!(ts_pdmp_is_cemetery(p));

        let (mut s1, mut s2) = (0usize, 0usize);
        assert_eq!(ts_pdmp_counts(p, &mut s1, &mut s2), TsStatus::Ok);
        assert_eq!((s1, s2), (0, 0));

        let mut loss = 0.0;
        assert_eq!(ts_pdmp_loss_at(p, 0.6, &mut loss), TsStatus::Ok);
        assert_eq!(loss, 0.5);

        // n = 1 is rejected at the boundary.
        let mut bad = ptr::null_mut();
        assert_eq!(ts_pdmp_new(f1, f2, 1, 7, 0, &mut bad), TsStatus::Config);

        ts_pdmp_free(p);
        ts_grid_free(f1);
        ts_grid_free(f2);
    }
}

#[test]
fn ks_distance_through_ffi() {
    unsafe {
        let a = uniform_half(1e-2);
        let b = grid_from(1e-2, &vec![1.0; 101]);
        let mut d = 0.0;
        assert_eq!(ts_ks_distance_grid(a, b, &mut d), TsStatus::Ok);
        assert!((d - 0.5).abs() < 1e-10, "d = {d}");
        assert_eq!(ts_ks_distance_grid(a, a, &mut d), TsStatus::Ok);
        assert_eq!(d, 0.0);
        ts_grid_free(a);
        ts_grid_free(b);
    }
}

#[test]
fn generated_header_exposes_surface() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/twospecies.h"))
            .expect("header generated by build.rs");
    for symbol in [
        "TsStatus",
        "ts_grid_new",
        "ts_solution_solve",
        "ts_scheme_step",
        "ts_pdmp_advance_to",
        "ts_last_error_message",
    ] {
        assert!(header.contains(symbol), "header missing {symbol}");
    }
}
