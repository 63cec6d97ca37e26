use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use microsq_ffi::*;

#[test]
fn factorize_fills_buffers_and_reports_size() {
    let mut primes = [0u64; 8];
    let mut exps = [0u32; 8];
    let mut len = 0usize;
    let s = unsafe { microsq_factorize(360, primes.as_mut_ptr(), exps.as_mut_ptr(), 8, &mut len) };
    assert_eq!(s, MicrosqStatus::Ok);
    assert_eq!(&primes[..len], &[2, 3, 5]);
    assert_eq!(&exps[..len], &[3, 2, 1]);

    let s = unsafe { microsq_factorize(360, primes.as_mut_ptr(), exps.as_mut_ptr(), 2, &mut len) };
    assert_eq!(s, MicrosqStatus::BufferTooSmall);
    assert_eq!(len, 3);

    let s = unsafe { microsq_factorize(1, ptr::null_mut(), ptr::null_mut(), 0, &mut len) };
    assert_eq!(s, MicrosqStatus::Ok);
    assert_eq!(len, 0);
}

#[test]
fn null_out_pointers_are_rejected() {
    unsafe {
        assert_eq!(microsq_legendre(2, 7, ptr::null_mut()), MicrosqStatus::NullPointer);
        assert_eq!(microsq_a_term(3, 2, ptr::null_mut()), MicrosqStatus::NullPointer);
        assert_eq!(microsq_sphere_len(ptr::null(), &mut 0), MicrosqStatus::NullPointer);
        assert_eq!(
            microsq_factorize(10, ptr::null_mut(), ptr::null_mut(), 4, &mut 0),
            MicrosqStatus::NullPointer
        );
    }
}

#[test]
fn scalar_functions_match_core() {
    unsafe {
        let mut l = 0i8;
        assert_eq!(microsq_legendre(2, 7, &mut l), MicrosqStatus::Ok);
        assert_eq!(l, 1);
        assert_eq!(microsq_legendre(3, 7, &mut l), MicrosqStatus::Ok);
        assert_eq!(l, -1);
        assert_eq!(microsq_legendre(3, 9, &mut l), MicrosqStatus::InvalidArgument);

        let mut bits = 0u8;
        assert_eq!(microsq_classify(999_998, &mut bits), MicrosqStatus::Ok);
        assert_eq!(bits, microsq::arith::classify(999_998).bits());

        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(microsq_gauss_sum(5, 1, &mut re, &mut im), MicrosqStatus::Ok);
        assert!((re - 5f64.sqrt()).abs() < 1e-12 && im.abs() < 1e-12);

        let mut a = 0.0;
        assert_eq!(microsq_a_term(5, 2, &mut a), MicrosqStatus::Ok);
        assert!((a + 0.2).abs() < 1e-12);

        let (mut add, mut mult) = (0.0, 0.0);
        assert_eq!(microsq_singular_series(1001, 10.0, false, &mut add), MicrosqStatus::Ok);
        assert_eq!(microsq_singular_series(1001, 10.0, true, &mut mult), MicrosqStatus::Ok);
        assert_eq!(add, microsq::density::singular_series_additive(1001, 10.0).unwrap());
        assert_eq!(mult, microsq::density::singular_series_multiplicative(1001, 10.0).unwrap().value);

        let mut c = 0u64;
        assert_eq!(microsq_count_reps(1001, 10, true, false, &mut c), MicrosqStatus::Ok);
        assert_eq!(c, microsq::reps::count_reps(1001, 10, true, false).unwrap());

        let mut y = 0u64;
        assert_eq!(microsq_min_microsquare(27, &mut y), MicrosqStatus::Ok);
        assert_eq!(y, 1);
        assert_eq!(microsq_min_microsquare(7, &mut y), MicrosqStatus::NotFound);
    }
}

#[test]
fn errors_leave_a_message() {
    unsafe {
        let mut a = 0.0;
        assert_eq!(microsq_a_term(0, 1, &mut a), MicrosqStatus::InvalidArgument);
        let mut buf = [0 as std::ffi::c_char; 256];
        let len = microsq_last_error(buf.as_mut_ptr(), buf.len());
        assert!(len > 0);
        let msg = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(!msg.is_empty());

        let mut small = [0 as std::ffi::c_char; 4];
        let full = microsq_last_error(small.as_mut_ptr(), small.len());
        assert_eq!(full, len);
        assert_eq!(CStr::from_ptr(small.as_ptr()).to_bytes().len(), 3);

        let s = CStr::from_ptr(microsq_status_message(MicrosqStatus::BufferTooSmall));
        assert_eq!(s.to_str().unwrap(), "buffer too small");
    }
}

#[test]
fn sphere_handle_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(microsq_sphere_new(27, &mut h), MicrosqStatus::Ok);
        let mut len = 0;
        assert_eq!(microsq_sphere_len(h, &mut len), MicrosqStatus::Ok);
        // 27 = 3^2 + 3^2 + 3^2 = 1^2 + 1^2 + 5^2: 8 + 24 points
        assert_eq!(len, 32);
        let mut xyz = [0i64; 3];
        for i in 0..len {
            assert_eq!(microsq_sphere_get(h, i, xyz.as_mut_ptr()), MicrosqStatus::Ok);
            assert_eq!(xyz.iter().map(|v| v * v).sum::<i64>(), 27);
        }
        assert_eq!(microsq_sphere_get(h, len, xyz.as_mut_ptr()), MicrosqStatus::OutOfRange);
        let (mut d, mut d2) = (0.0, 0.0);
        assert_eq!(microsq_sphere_min_spacing(h, MicrosqMetric::Euclidean, &mut d), MicrosqStatus::Ok);
        assert_eq!(microsq_sphere_min_spacing(h, MicrosqMetric::SquaredEuclidean, &mut d2), MicrosqStatus::Ok);
        assert!((d * d - d2).abs() < 1e-12);
        // (1, 1, 5) and (-1, 1, 5) differ by 2 in one coordinate
        assert!((d2 - 4.0 / 27.0).abs() < 1e-12);
        microsq_sphere_free(h);
        microsq_sphere_free(ptr::null_mut());

        assert_eq!(microsq_sphere_new(7, &mut h), MicrosqStatus::Ok);
        assert_eq!(microsq_sphere_len(h, &mut len), MicrosqStatus::Ok);
        assert_eq!(len, 0);
        assert_eq!(microsq_sphere_min_spacing(h, MicrosqMetric::Euclidean, &mut d), MicrosqStatus::NotFound);
        microsq_sphere_free(h);
    }
}

#[test]
fn local_table_handle_round_trip() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(microsq_local_table_new(1001, 10.0, &mut h), MicrosqStatus::Ok);
        let mut len = 0;
        assert_eq!(microsq_local_table_len(h, &mut len), MicrosqStatus::Ok);
        assert_eq!(len, 4);
        let mut product = 1.0;
        let mut primes = Vec::new();
        for i in 0..len {
            let (mut p, mut hh, mut s) = (0u64, 0u32, 0.0);
            assert_eq!(microsq_local_table_row(h, i, &mut p, &mut hh, &mut s), MicrosqStatus::Ok);
            assert!(hh >= 1);
            primes.push(p);
            product *= s;
        }
        assert_eq!(primes, vec![2, 3, 5, 7]);
        let mut v = 0.0;
        assert_eq!(microsq_local_table_value(h, &mut v), MicrosqStatus::Ok);
        assert!((v - product).abs() < 1e-12);
        let (mut p, mut hh, mut s) = (0u64, 0u32, 0.0);
        assert_eq!(microsq_local_table_row(h, len, &mut p, &mut hh, &mut s), MicrosqStatus::OutOfRange);
        microsq_local_table_free(h);
    }
}

#[test]
fn header_is_generated_and_declares_the_api() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/microsq.h");
    let header = std::fs::read_to_string(&path).expect("header missing");
    for name in [
        "MICROSQ_H",
        "MICROSQ_STATUS_OK = 0",
        "MICROSQ_STATUS_PANIC",
        "typedef struct MicrosqSpherePoints MicrosqSpherePoints",
        "typedef struct MicrosqLocalTable MicrosqLocalTable",
        "microsq_factorize",
        "microsq_legendre",
        "microsq_classify",
        "microsq_gauss_sum",
        "microsq_a_term",
        "microsq_singular_series",
        "microsq_count_reps",
        "microsq_min_microsquare",
        "microsq_sphere_free",
        "microsq_local_table_free",
        "microsq_last_error",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // Compile check when a C compiler is around.
    if let Ok(out) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(&path)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
