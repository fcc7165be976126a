use std::ffi::{c_char, CStr, CString};
use std::ptr;

use ktower_ffi::*;

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    kt_string_free(s);
    out
}

fn last_error() -> String {
    let p = kt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn parse(json: &str) -> *mut KtTower {
    let c = CString::new(json).unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(kt_tower_from_json(c.as_ptr(), &mut t), KtStatus::Ok);
    t
}

#[test]
fn counts_by_every_method() {
    unsafe {
        for method in [
            KtMethod::Closed,
            KtMethod::Recurrence,
            KtMethod::Hypergeometric,
            KtMethod::Enumerate,
        ] {
            let mut s = ptr::null_mut();
            assert_eq!(kt_count(2, 4, 0, method, &mut s), KtStatus::Ok);
            assert_eq!(take(s), "64");
        }
        for method in [KtMethod::Closed, KtMethod::Recurrence, KtMethod::Enumerate] {
            let mut s = ptr::null_mut();
            assert_eq!(kt_count(2, 4, 2, method, &mut s), KtStatus::Ok);
            assert_eq!(take(s), "21");
        }
        let mut s = ptr::null_mut();
        assert_eq!(
            kt_count(2, 4, 2, KtMethod::Hypergeometric, &mut s),
            KtStatus::InvalidArgument
        );
        assert_eq!(
            kt_count(0, 4, 0, KtMethod::Closed, &mut s),
            KtStatus::InvalidArgument
        );
        assert!(last_error().contains("k"));
        assert_eq!(
            kt_count(2, 4, 0, KtMethod::Closed, ptr::null_mut()),
            KtStatus::NullPointer
        );
    }
}

#[test]
fn tower_round_trip_and_render() {
    unsafe {
        let t = parse(r#"{"k":2,"blocks":[[0,5],[0,7],[1,6]]}"#);
        let mut s = ptr::null_mut();
        assert_eq!(kt_tower_to_json(t, &mut s), KtStatus::Ok);
        assert_eq!(take(s), r#"{"k":2,"blocks":[[0,0],[0,2],[1,1]]}"#);
        assert_eq!(kt_tower_render(t, &mut s), KtStatus::Ok);
        assert_eq!(take(s), ".##.\n####");
        let (mut k, mut n, mut b) = (0, 0, 0);
        assert_eq!(kt_tower_shape(t, &mut k, &mut n, &mut b), KtStatus::Ok);
        assert_eq!((k, n, b), (2, 3, 2));
        assert_eq!(kt_tower_validate(t), KtStatus::Ok);
        kt_tower_free(t);
    }
}

#[test]
fn rejects_bad_input() {
    unsafe {
        let mut t = ptr::null_mut();
        let bad = CString::new(r#"{"k":2,"blocks":[[0,0],[2,0]]}"#).unwrap();
        assert_eq!(
            kt_tower_from_json(bad.as_ptr(), &mut t),
            KtStatus::InvalidTower
        );
        assert!(t.is_null());
        let junk = CString::new("{").unwrap();
        assert_eq!(kt_tower_from_json(junk.as_ptr(), &mut t), KtStatus::Parse);
        assert_eq!(
            kt_tower_from_json(ptr::null(), &mut t),
            KtStatus::NullPointer
        );
        assert_eq!(kt_tower_validate(ptr::null()), KtStatus::NullPointer);
        kt_tower_free(ptr::null_mut());
        kt_string_free(ptr::null_mut());
    }
}

#[test]
fn reduce_then_expand() {
    unsafe {
        let t = parse(r#"{"k":4,"blocks":[[0,0],[0,4],[1,-2],[1,3],[1,7],[2,-2],[2,9]]}"#);
        let mut r = ptr::null_mut();
        let mut label = ptr::null_mut();
        assert_eq!(kt_reduce(t, &mut r, &mut label), KtStatus::Ok);
        let label = take(label);
        assert_eq!(
            label,
            r#"{"case":"case_composition","j":1,"parts":[3,1],"slide":1}"#
        );
        let mut s = ptr::null_mut();
        assert_eq!(kt_tower_to_json(r, &mut s), KtStatus::Ok);
        assert_eq!(
            take(s),
            r#"{"k":4,"blocks":[[0,0],[0,4],[0,8],[1,0],[1,5],[1,11]]}"#
        );

        let c = CString::new(label).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(kt_expand(r, c.as_ptr(), &mut back), KtStatus::Ok);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        kt_tower_to_json(t, &mut a);
        kt_tower_to_json(back, &mut b);
        assert_eq!(take(a), take(b));

        let wrong = CString::new(r#"{"case":"case_hang","h":1}"#).unwrap();
        assert_eq!(
            kt_expand(r, wrong.as_ptr(), &mut back),
            KtStatus::InvalidArgument
        );
        for p in [t, r, back] {
            kt_tower_free(p);
        }
    }
}

#[test]
fn enumerator_streams_the_class() {
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(kt_enumerator_new(2, 4, 2, &mut e), KtStatus::Ok);
        let mut seen = 0;
        loop {
            let mut t = ptr::null_mut();
            match kt_enumerator_next(e, &mut t) {
                KtStatus::Ok => {
                    assert_eq!(kt_tower_validate(t), KtStatus::Ok);
                    kt_tower_free(t);
                    seen += 1;
                }
                KtStatus::Exhausted => {
                    assert!(t.is_null());
                    break;
                }
                other => panic!("{other:?}"),
            }
        }
        assert_eq!(seen, 21);
        kt_enumerator_free(e);
        assert_eq!(
            kt_enumerator_new(2, 1, 2, &mut e),
            KtStatus::InvalidArgument
        );
    }
}

#[test]
fn verify_all_small() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(kt_verify_all(2, 4, &mut s), KtStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["suite"], "all");
        assert_eq!(report["pass"], true);
    }
}
