use std::ffi::{CStr, CString};
use std::ptr;

use sparse_sieve_ffi::*;

fn last_error() -> String {
    let p = ss_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn sequence_round_trip() {
    let spec = CString::new("ones").unwrap();
    let mut seq = ptr::null_mut();
    unsafe {
        assert_eq!(ss_sequence_new(spec.as_ptr(), 5, 0, &mut seq), SsStatus::Ok);
        assert_eq!(ss_sequence_len(seq), 5);
        let mut z = 0.0;
        assert_eq!(ss_sequence_energy(seq, &mut z), SsStatus::Ok);
        assert_eq!(z, 5.0);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ss_exp_sum(seq, 0.0, &mut re, &mut im), SsStatus::Ok);
        assert!((re - 5.0).abs() < 1e-12 && im.abs() < 1e-12);
        ss_sequence_free(seq);
    }
}

#[test]
fn sequence_from_values() {
    let re = [1.0, 0.0, -1.0];
    let im = [0.0, 2.0, 0.0];
    let mut seq = ptr::null_mut();
    unsafe {
        assert_eq!(
            ss_sequence_from_values(re.as_ptr(), im.as_ptr(), 3, &mut seq),
            SsStatus::Ok
        );
        let mut z = 0.0;
        ss_sequence_energy(seq, &mut z);
        assert_eq!(z, 6.0);
        ss_sequence_free(seq);
        assert_eq!(
            ss_sequence_from_values(re.as_ptr(), ptr::null(), 0, &mut seq),
            SsStatus::InvalidArgument
        );
    }
}

#[test]
fn bad_inputs_report_status_and_message() {
    let mut seq = ptr::null_mut();
    let spec = CString::new("delta:9").unwrap();
    unsafe {
        assert_eq!(
            ss_sequence_new(spec.as_ptr(), 4, 0, &mut seq),
            SsStatus::InvalidArgument
        );
        assert!(last_error().contains('9'));
        assert_eq!(
            ss_sequence_new(ptr::null(), 4, 0, &mut seq),
            SsStatus::NullPointer
        );
        assert_eq!(
            ss_sieve_lhs(ptr::null(), ptr::null(), ptr::null_mut()),
            SsStatus::NullPointer
        );
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            ss_gauss_sum(2, 0, 4, &mut re, &mut im),
            SsStatus::NotCoprime
        );
        let mut k = 0;
        assert_eq!(
            ss_quad_root_count(1, 0, 0, &mut k),
            SsStatus::InvalidArgument
        );
    }
    // freeing NULL is a no-op
    unsafe {
        ss_sequence_free(ptr::null_mut());
        ss_moduli_free(ptr::null_mut());
        ss_farey_free(ptr::null_mut());
    }
}

#[test]
fn sieve_and_farey() {
    let mods = [1u64, 2, 3];
    let mut set = ptr::null_mut();
    let mut seq = ptr::null_mut();
    let spec = CString::new("ones").unwrap();
    unsafe {
        assert_eq!(
            ss_moduli_from_list(mods.as_ptr(), 3, &mut set),
            SsStatus::Ok
        );
        assert_eq!(ss_moduli_len(set), 3);
        let mut buf = [0u64; 2];
        let mut len = 0;
        assert_eq!(
            ss_moduli_elements(set, buf.as_mut_ptr(), 2, &mut len),
            SsStatus::Ok
        );
        assert_eq!((buf, len), ([1, 2], 3));

        assert_eq!(ss_sequence_new(spec.as_ptr(), 2, 0, &mut seq), SsStatus::Ok);
        let mut lhs = 0.0;
        assert_eq!(ss_sieve_lhs(seq, set, &mut lhs), SsStatus::Ok);
        // q=1: |S(1)|² = 4; q=2: |S(1/2)|² = 0; q=3: |e(1/3)+e(2/3)|² ·2 = 2
        assert!((lhs - 6.0).abs() < 1e-12);

        let mut farey = ptr::null_mut();
        assert_eq!(ss_farey_new(set, &mut farey), SsStatus::Ok);
        assert_eq!(ss_farey_len(farey), 4);
        let (mut a, mut q) = (0, 0);
        assert_eq!(ss_farey_get(farey, 0, &mut a, &mut q), SsStatus::Ok);
        assert_eq!((a, q), (1, 3));
        assert_eq!(
            ss_farey_get(farey, 9, &mut a, &mut q),
            SsStatus::InvalidArgument
        );
        let mut k = 0;
        assert_eq!(ss_k_delta(farey, 0.5, &mut k), SsStatus::Ok);
        assert_eq!(k, 4);
        assert_eq!(ss_k_delta(farey, 0.0, &mut k), SsStatus::InvalidArgument);

        ss_farey_free(farey);
        ss_sequence_free(seq);
        ss_moduli_free(set);
    }
}

#[test]
fn moduli_from_spec() {
    let spec = CString::new("squares").unwrap();
    let q = CString::new("N^0.3").unwrap();
    let mut set = ptr::null_mut();
    unsafe {
        assert_eq!(
            ss_moduli_new(spec.as_ptr(), q.as_ptr(), 0.0, 1024.0, &mut set),
            SsStatus::Ok
        );
        assert_eq!(ss_moduli_len(set), 8);
        ss_moduli_free(set);
        let bad = CString::new("cubes").unwrap();
        assert_eq!(
            ss_moduli_new(bad.as_ptr(), ptr::null(), 0.0, 0.0, &mut set),
            SsStatus::InvalidArgument
        );
    }
}

#[test]
fn status_names_are_static() {
    let name = unsafe { CStr::from_ptr(ss_status_name(SsStatus::NotCoprime)) };
    assert_eq!(name.to_str().unwrap(), "arguments not coprime");
}
