mod common;

use common::*;
use nucleus_core::kernels::{
    dct2_via_fft, dct2_via_fft_with, dht_via_fft, dht_via_fft_with, fft_radix2, fft_radix4, ifft,
    ifft_with, CountingFlavor, KernelError, Radix2, Radix4,
};
use num_complex::Complex64;

const TRIALS: usize = 8;

fn tol(n: usize) -> f64 {
    1e-9 * n as f64
}

#[test]
fn radix2_matches_direct_dft() {
    let mut rng = rng(1);
    for log_n in 1..=10 {
        let n = 1 << log_n;
        for _ in 0..TRIALS {
            let x = random_complex(&mut rng, n);
            let err = max_abs_err_c(&fft_radix2(&x).unwrap(), &naive_dft(&x, false));
            assert!(err <= tol(n), "n={n} err={err}");
        }
    }
}

#[test]
fn radix4_matches_direct_dft_and_radix2() {
    let mut rng = rng(2);
    for log4 in 1..=5 {
        let n = 1 << (2 * log4);
        for _ in 0..TRIALS {
            let x = random_complex(&mut rng, n);
            let y = fft_radix4(&x).unwrap();
            assert!(max_abs_err_c(&y, &naive_dft(&x, false)) <= tol(n));
            assert!(max_abs_err_c(&y, &fft_radix2(&x).unwrap()) <= tol(n));
        }
    }
}

#[test]
fn inverse_matches_direct_inverse_and_undoes_forward() {
    let mut rng = rng(3);
    for log_n in 1..=10 {
        let n = 1 << log_n;
        for _ in 0..TRIALS {
            let x = random_complex(&mut rng, n);
            assert!(max_abs_err_c(&ifft(&x).unwrap(), &naive_dft(&x, true)) <= tol(n));
            let back = ifft(&fft_radix2(&x).unwrap()).unwrap();
            assert!(max_abs_err_c(&back, &x) <= tol(n));
        }
    }
}

#[test]
fn dct_of_unit_impulse() {
    let x = [1.0, 0.0, 0.0, 0.0];
    let y = dct2_via_fft(&x).unwrap();
    assert!(max_abs_err(&y, &naive_dct2(&x)) <= tol(4));
    let expected: Vec<f64> = (0..4)
        .map(|k| (std::f64::consts::PI * k as f64 / 8.0).cos())
        .collect();
    assert!(max_abs_err(&y, &expected) <= tol(4));
}

#[test]
fn dct_and_dht_match_direct_sums() {
    let mut rng = rng(4);
    for log_n in 1..=10 {
        let n = 1 << log_n;
        for _ in 0..TRIALS {
            let x = random_real(&mut rng, n);
            assert!(max_abs_err(&dct2_via_fft(&x).unwrap(), &naive_dct2(&x)) <= tol(n));
            assert!(max_abs_err(&dht_via_fft(&x).unwrap(), &naive_dht(&x)) <= tol(n));
        }
    }
}

#[test]
fn genre_members_accept_either_flavor() {
    let mut rng = rng(5);
    let x = random_real(&mut rng, 256);
    let a = dct2_via_fft_with(&Radix4, &x).unwrap();
    let b = dct2_via_fft_with(&Radix2, &x).unwrap();
    assert!(max_abs_err(&a, &b) <= tol(256));
    let c = dht_via_fft_with(&Radix4, &x).unwrap();
    assert!(max_abs_err(&c, &naive_dht(&x)) <= tol(256));
}

#[test]
fn each_genre_member_calls_the_nucleus_once() {
    let counter = CountingFlavor::new(Radix2);
    let mut rng = rng(6);
    for n in [2usize, 8, 64, 1024] {
        let x = random_real(&mut rng, n);
        counter.reset();
        dct2_via_fft_with(&counter, &x).unwrap();
        assert_eq!(counter.calls(), 1);
        counter.reset();
        dht_via_fft_with(&counter, &x).unwrap();
        assert_eq!(counter.calls(), 1);
        counter.reset();
        let z: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        ifft_with(&counter, &z).unwrap();
        assert_eq!(counter.calls(), 1);
    }
}

#[test]
fn illegal_sizes_are_rejected() {
    let x = vec![Complex64::new(1.0, 0.0); 8];
    assert!(matches!(
        fft_radix4(&x),
        Err(KernelError::UnsupportedSize { n: 8, .. })
    ));
    assert!(fft_radix2(&x[..6]).is_err());
    assert!(fft_radix2(&x[..1]).is_err());
    assert!(dct2_via_fft(&[1.0, 2.0, 3.0]).is_err());
    assert!(dht_via_fft(&[]).is_err());
}
