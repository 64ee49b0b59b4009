use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qflg_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    qflg_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = qflg_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn cdvf_round_trip() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(qflg_cdvf_form_new(c("F3((t))").as_ptr(), c("1, 1, t, t").as_ptr(), 0, &mut f), QflgStatus::Ok);
        let mut iso = true;
        let mut cert = ptr::null_mut();
        assert_eq!(qflg_cdvf_decide(f, &mut iso, &mut cert), QflgStatus::Ok);
        assert!(!iso);
        let v: serde_json::Value = serde_json::from_str(&take(cert)).unwrap();
        assert_eq!(v["kind"], "split");
        qflg_cdvf_form_free(f);

        assert_eq!(qflg_cdvf_form_new(c("F5((t))").as_ptr(), c("1, 2, t, 2*t, t^-1").as_ptr(), 8, &mut f), QflgStatus::Ok);
        assert_eq!(qflg_cdvf_decide(f, &mut iso, ptr::null_mut()), QflgStatus::Ok);
        assert!(iso);
        qflg_cdvf_form_free(f);
    }
}

#[test]
fn verdicts() {
    unsafe {
        let mut f = ptr::null_mut();
        let field = c("FracR(F3[[x]][[y]])");
        assert_eq!(qflg_form_new(field.as_ptr(), c("1, y, x, x*y").as_ptr(), 0, &mut f), QflgStatus::Ok);
        let mut rank = 0;
        assert_eq!(qflg_form_rank(f, &mut rank), QflgStatus::Ok);
        assert_eq!(rank, 4);
        let mut kind = QflgVerdictKind::Undecided;
        let mut report = ptr::null_mut();
        assert_eq!(qflg_verdict(f, ptr::null(), &mut kind, &mut report), QflgStatus::Ok);
        assert_eq!(kind, QflgVerdictKind::Obstructed);
        let v: serde_json::Value = serde_json::from_str(&take(report)).unwrap();
        assert_eq!(v["place"]["case"], "gauss");
        let mut iso = true;
        assert_eq!(qflg_place_decide(f, c("gauss").as_ptr(), &mut iso, ptr::null_mut()), QflgStatus::Ok);
        assert!(!iso);
        qflg_form_free(f);

        assert_eq!(qflg_form_new(field.as_ptr(), c("1, 1, 1, x, y").as_ptr(), 0, &mut f), QflgStatus::Ok);
        let b = qflg_bounds_default();
        assert_eq!((b.blowup_depth, b.precision), (2, 16));
        assert_eq!(qflg_verdict(f, &b, &mut kind, ptr::null_mut()), QflgStatus::Ok);
        assert_eq!(kind, QflgVerdictKind::Isotropic);
        let mut json = ptr::null_mut();
        assert_eq!(qflg_form_normalized_json(f, &mut json), QflgStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(json)).unwrap();
        assert_eq!(v[3]["n"], 1);
        qflg_form_free(f);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(qflg_form_new(ptr::null(), c("1").as_ptr(), 0, &mut f), QflgStatus::NullPointer);
        assert!(last_error().contains("field"));
        assert_eq!(qflg_form_new(c("F3((x)(y)").as_ptr(), c("1").as_ptr(), 0, &mut f), QflgStatus::InvalidInput);
        assert!(last_error().contains("did you mean"));
        assert_eq!(qflg_form_new(c("F3[[x]]").as_ptr(), c("1, 0").as_ptr(), 0, &mut f), QflgStatus::ZeroInput);
        assert_eq!(qflg_form_new(c("F3((t))").as_ptr(), c("1").as_ptr(), 0, &mut f), QflgStatus::UnsupportedField);
        assert_eq!(qflg_cdvf_form_new(c("F3((t))").as_ptr(), c("1, +").as_ptr(), 0, ptr::null_mut()), QflgStatus::NullPointer);
        let bad = [0x66u8, 0xff, 0];
        let mut g = ptr::null_mut();
        assert_eq!(qflg_cdvf_form_new(bad.as_ptr() as *const c_char, c("1").as_ptr(), 0, &mut g), QflgStatus::InvalidUtf8);
        assert_eq!(qflg_cdvf_form_new(c("F3((t))").as_ptr(), c("1, 1 +").as_ptr(), 0, &mut g), QflgStatus::Parse);
        let mut kind = QflgVerdictKind::Undecided;
        assert_eq!(qflg_verdict(ptr::null(), ptr::null(), &mut kind, ptr::null_mut()), QflgStatus::NullPointer);
        assert_eq!(qflg_form_new(c("F3[[x]]").as_ptr(), c("1, y").as_ptr(), 0, &mut f), QflgStatus::Ok);
        let mut iso = false;
        assert_eq!(qflg_place_decide(f, c("nowhere").as_ptr(), &mut iso, ptr::null_mut()), QflgStatus::InvalidInput);
        let mut b = qflg_bounds_default();
        b.precision = 4;
        assert_eq!(qflg_verdict(f, &b, &mut kind, ptr::null_mut()), QflgStatus::InvalidInput);
        qflg_form_free(f);
        assert_eq!(qflg_form_rank(ptr::null(), ptr::null_mut()), QflgStatus::NullPointer);
        qflg_form_free(ptr::null_mut());
        qflg_string_free(ptr::null_mut());
    }
}

#[test]
fn cli_entry_point() {
    unsafe {
        let args = [c("prepare"), c("--base"), c("F3[[x]]"), c("--poly"), c("x*y + x"), c("-N"), c("8")];
        let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
        let mut out = ptr::null_mut();
        assert_eq!(qflg_cli_run(argv.len() as i32, argv.as_ptr(), &mut out), 0);
        let text = take(out);
        assert!(text.contains("n = 1") && text.contains("U = y + 1") && text.contains("P = 1"), "{text}");
        let args = [c("verdict"), c("--field"), c("FracR(F3[[x]][[y]])"), c("--form"), c("1,0")];
        let argv: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
        assert_eq!(qflg_cli_run(argv.len() as i32, argv.as_ptr(), ptr::null_mut()), 3);
        assert_eq!(qflg_cli_run(1, ptr::null(), ptr::null_mut()), 3);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(qflg_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
