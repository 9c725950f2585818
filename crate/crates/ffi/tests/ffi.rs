use std::ffi::{CStr, CString};
use std::ptr;

use corona_pdo_ffi::*;

fn group(json: &str) -> *mut CpdoGroup {
    let s = CString::new(json).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cpdo_group_from_json(s.as_ptr(), &mut g) }, CpdoStatus::Ok);
    g
}

fn last_error() -> String {
    let p = cpdo_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fourier_round_trip_through_handles() {
    let g = group(r#"{"kind": "finite-cyclic", "order": 8}"#);
    let n = unsafe { cpdo_group_len(g) };
    assert_eq!(n, 8);
    let u: Vec<CpdoComplex> = (0..n).map(|j| CpdoComplex { re: j as f64, im: 1.0 - j as f64 }).collect();
    let mut hat = vec![CpdoComplex::default(); n];
    let mut back = vec![CpdoComplex::default(); n];
    unsafe {
        assert_eq!(cpdo_fourier(g, u.as_ptr(), n, hat.as_mut_ptr()), CpdoStatus::Ok);
        assert_eq!(cpdo_inverse_fourier(g, hat.as_ptr(), n, back.as_mut_ptr()), CpdoStatus::Ok);
        cpdo_group_free(g);
    }
    // Counting measure on Z_8: the constant mode is the plain sum.
    assert!((hat[0].re - 28.0).abs() < 1e-12 && (hat[0].im + 20.0).abs() < 1e-12);
    for (a, b) in u.iter().zip(&back) {
        assert!((a.re - b.re).abs() < 1e-12 && (a.im - b.im).abs() < 1e-12);
    }
}

#[test]
fn operator_matrix_and_apply_agree() {
    let g = group(r#"{"kind": "finite-cyclic", "order": 6}"#);
    let (gamma, psi) = (CString::new("trig:2:1").unwrap(), CString::new("vo:sqrt").unwrap());
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(cpdo_operator_from_tensor(g, gamma.as_ptr(), psi.as_ptr(), &mut op), CpdoStatus::Ok);
        let n = cpdo_operator_dim(op);
        assert_eq!(n, 6);
        let mut m = vec![CpdoComplex::default(); n * n];
        assert_eq!(cpdo_operator_copy_matrix(op, m.as_mut_ptr(), n * n), CpdoStatus::Ok);
        let e2: Vec<CpdoComplex> = (0..n).map(|j| CpdoComplex { re: (j == 2) as u8 as f64, im: 0.0 }).collect();
        let mut col = vec![CpdoComplex::default(); n];
        assert_eq!(cpdo_operator_apply(op, e2.as_ptr(), n, col.as_mut_ptr()), CpdoStatus::Ok);
        for r in 0..n {
            let want = m[r * n + 2];
            assert!((want.re - col[r].re).abs() < 1e-12 && (want.im - col[r].im).abs() < 1e-12);
        }
        let mut small = vec![CpdoComplex::default(); 3];
        assert_eq!(cpdo_operator_copy_matrix(op, small.as_mut_ptr(), 3), CpdoStatus::Dimension);
        cpdo_operator_free(op);
        cpdo_group_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let bad = CString::new(r#"{"kind": "finite-cyclic", "order": 0}"#).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { cpdo_group_from_json(bad.as_ptr(), &mut g) }, CpdoStatus::InvalidGroup);
    assert!(g.is_null());
    assert!(last_error().contains("order 0"));
    let junk = CString::new("{").unwrap();
    assert_eq!(unsafe { cpdo_group_from_json(junk.as_ptr(), &mut g) }, CpdoStatus::Config);
    assert_eq!(unsafe { cpdo_group_from_json(ptr::null(), &mut g) }, CpdoStatus::NullPointer);
    let grp = group(r#"{"kind": "torus", "samples": 8}"#);
    let (gamma, psi) = (CString::new("one").unwrap(), CString::new("no-such-family").unwrap());
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { cpdo_operator_from_tensor(grp, gamma.as_ptr(), psi.as_ptr(), &mut op) }, CpdoStatus::Config);
    unsafe { cpdo_group_free(grp) };
    unsafe { cpdo_group_free(ptr::null_mut()) };
}

#[test]
fn run_config_returns_report_and_exit_code() {
    let cfg = CString::new(
        r#"{"schema": 1, "task": "fourier-selftest", "group": {"x": {"kind": "finite-cyclic", "order": 16}}}"#,
    )
    .unwrap();
    let mut report = ptr::null_mut();
    let mut code = -1;
    assert_eq!(unsafe { cpdo_run_config(cfg.as_ptr(), &mut report, &mut code) }, CpdoStatus::Ok);
    assert_eq!(code, 0);
    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_owned();
    unsafe { cpdo_string_free(report) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["result"]["plancherel_defect"].as_f64().unwrap() < 1e-12);
    let version = unsafe { CStr::from_ptr(cpdo_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/corona_pdo.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ CpdoComplex z = {{1.0, 2.0}}; CpdoGroup *g = 0; \
             return (int)cpdo_group_len(g) + (z.re > 0 ? CPDO_STATUS_OK : CPDO_STATUS_PANIC); }}\n"
        ),
    )
    .unwrap();
    let status = match std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).status() {
        Ok(s) => s,
        Err(_) => {
            eprintln!("no C compiler found; header syntax not checked");
            return;
        }
    };
    assert!(status.success());
}
