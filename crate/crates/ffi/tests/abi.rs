use std::ffi::{c_char, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;
use tfd_ffi::*;

const OK: i32 = TfdStatus::Ok as i32;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { tfd_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf.iter().take(n.min(255)).map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn basis_lifecycle_and_algebra() {
    let sigma = [1, -1];
    let omega = [1.0, 2.0];
    let cutoff = [3usize, 0];
    let mut basis = ptr::null_mut();
    unsafe {
        assert_eq!(tfd_basis_new(sigma.as_ptr(), omega.as_ptr(), cutoff.as_ptr(), 2, &mut basis), OK);
        let mut dim = 0usize;
        assert_eq!(tfd_basis_dim(basis, &mut dim), OK);
        assert_eq!(dim, 64);
        let (mut worst, mut failed) = (f64::NAN, usize::MAX);
        assert_eq!(tfd_verify_algebra(basis, 3, 1e-12, &mut worst, &mut failed), OK);
        assert_eq!(failed, 0);
        assert!(worst < 1e-12);
        tfd_basis_free(basis);
        tfd_basis_free(ptr::null_mut());
    }
}

#[test]
fn errors_are_reported() {
    let mut basis = ptr::null_mut();
    unsafe {
        let sigma = [0];
        let code = tfd_basis_new(sigma.as_ptr(), [1.0].as_ptr(), [2usize].as_ptr(), 1, &mut basis);
        assert_eq!(code, TfdStatus::InvalidArgument as i32);
        assert!(basis.is_null());
        assert!(last_error().contains("statistics"));
        assert_eq!(tfd_basis_new(ptr::null(), ptr::null(), ptr::null(), 1, &mut basis), TfdStatus::NullPointer as i32);
        assert_eq!(tfd_basis_dim(ptr::null(), ptr::null_mut()), TfdStatus::NullPointer as i32);
        // truncated copy stays NUL-terminated
        let mut small = [1 as c_char; 4];
        let n = tfd_last_error(small.as_mut_ptr(), small.len());
        assert!(n > 3 && small[3] == 0);
    }
}

#[test]
fn propagator_matches_closed_form() {
    let mut v = [0.0; 8];
    unsafe {
        assert_eq!(tfd_propagator_delta(-1, 0.3, 1.0, 0.0, 0.0, v.as_mut_ptr()), OK);
    }
    // equal-time fermion: Δ¹¹ = −i(1−n), Δ¹² = −i n
    assert!((v[1] + 0.7).abs() < 1e-15 && (v[3] + 0.3).abs() < 1e-15);
    unsafe {
        assert_eq!(tfd_propagator_delta(2, 0.3, 1.0, 0.0, 0.0, v.as_mut_ptr()), TfdStatus::InvalidArgument as i32);
        assert_eq!(tfd_propagator_delta(1, f64::NAN, 1.0, 0.0, 0.0, v.as_mut_ptr()), TfdStatus::InvalidArgument as i32);
    }
}

#[test]
fn ladder_relaxes_and_renormalizes() {
    let mut model = ptr::null_mut();
    unsafe {
        assert_eq!(tfd_model_ladder(0.2, &mut model), OK);
        let mut k = 0;
        assert_eq!(tfd_model_n_modes(model, &mut k), OK);
        assert_eq!(k, 3);
        let n0 = [1.0, 0.1, 0.6];
        let omega = [1.0, 2.0, 3.0];
        let mut n = [0.0; 3];
        let mut gap = f64::NAN;
        assert_eq!(tfd_transport_relax(model, n0.as_ptr(), omega.as_ptr(), 3, 200.0, 1.0, 0.0, n.as_mut_ptr(), &mut gap), OK);
        assert!(gap < 1e-8);
        assert!((n.iter().sum::<f64>() - 1.7).abs() < 1e-10);
        assert_eq!(
            tfd_transport_relax(model, n0.as_ptr(), omega.as_ptr(), 2, 1.0, 1.0, 0.0, n.as_mut_ptr(), &mut gap),
            TfdStatus::InvalidArgument as i32
        );
        let mut w = [0.0; 3];
        assert_eq!(tfd_equilibrium_renormalize(model, omega.as_ptr(), 3, 1.0, 0.05, w.as_mut_ptr()), OK);
        assert!(w.iter().zip(&omega).all(|(a, b)| (a - b).abs() < 1e-14));
        tfd_model_free(model);
    }
}

#[test]
fn custom_model_and_channel_validation() {
    let mut model = ptr::null_mut();
    let ch = [TfdChannel { j: 0, k: 1, l: 1, m: 0, v_re: 0.5, v_im: 0.0 }];
    unsafe {
        assert_eq!(tfd_model_new(0.1, [1, -1].as_ptr(), 2, ch.as_ptr(), 1, &mut model), OK);
        tfd_model_free(model);
        let bad = [TfdChannel { j: 0, k: 5, l: 1, m: 0, v_re: 0.5, v_im: 0.0 }];
        assert_ne!(tfd_model_new(0.1, [1, -1].as_ptr(), 2, bad.as_ptr(), 1, &mut model), OK);
        assert!(model.is_null());
    }
}

#[test]
fn scenario_runs_through_the_abi() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let out = std::env::temp_dir().join(format!("tfd-ffi-{}", std::process::id()));
    let c = |s: &str| CString::new(s).unwrap();
    let kind = c("verify-algebra");
    let cfg = c(root.join("scenarios/verify_algebra.toml").to_str().unwrap());
    let dir = c(out.to_str().unwrap());
    unsafe {
        assert_eq!(tfd_run_scenario(kind.as_ptr(), cfg.as_ptr(), dir.as_ptr(), -1), OK);
        let bogus = c("no-such-kind");
        assert_eq!(tfd_run_scenario(bogus.as_ptr(), cfg.as_ptr(), dir.as_ptr(), 0), TfdStatus::InvalidArgument as i32);
    }
    assert!(out.join("summary.jsonl").exists());
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tfd_ffi.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in ["tfd_basis_new", "tfd_basis_free", "tfd_model_new", "tfd_transport_relax", "tfd_run_scenario", "TFD_STATUS_OK"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler found; header syntax not checked");
        return;
    };
    assert!(status.success());
}
