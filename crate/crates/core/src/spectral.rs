//! Square 2-D FFTs on row-major buffers and frequency bookkeeping.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place unnormalized 1-D transform.
pub(crate) fn fft(buf: &mut [Complex64], inverse: bool) {
    plan(buf.len(), inverse).process(buf);
}

/// Unnormalized transform of every length-`n` row.
pub(crate) fn fft_rows(buf: &mut [Complex64], n: usize, inverse: bool) {
    plan(n, inverse).process(buf);
}

pub(crate) fn transpose(buf: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = buf[i * n + j];
        }
    }
    out
}

/// Unnormalized 2-D transform of an `n × n` row-major array.
pub(crate) fn fft2(buf: &mut Vec<Complex64>, n: usize, inverse: bool) {
    fft_rows(buf, n, inverse);
    let mut t = transpose(buf, n);
    fft_rows(&mut t, n, inverse);
    *buf = transpose(&t, n);
}

/// Inverse 2-D transform including the `1/n²` normalization.
pub(crate) fn ifft2_normalized(buf: &mut Vec<Complex64>, n: usize) {
    fft2(buf, n, true);
    let scale = 1.0 / (n * n) as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Signed representative of FFT index `k` in `[-n/2, n/2)`.
pub(crate) fn centered(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Reorders so that the grid origin (index `n/2`) sits at index 0.
pub(crate) fn ifftshift(buf: &[Complex64], n: usize) -> Vec<Complex64> {
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        let si = (i + half) % n;
        for j in 0..n {
            out[i * n + j] = buf[si * n + (j + half) % n];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft2_roundtrip() {
        let n = 6;
        let data: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut buf = data.clone();
        fft2(&mut buf, n, false);
        ifft2_normalized(&mut buf, n);
        for (a, b) in buf.iter().zip(&data) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn fft2_matches_direct_sum() {
        let n = 4;
        let data: Vec<Complex64> = (0..n * n).map(|k| Complex64::new(k as f64, -(k as f64).sqrt())).collect();
        let mut buf = data.clone();
        fft2(&mut buf, n, false);
        for a in 0..n {
            for c in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    for k in 0..n {
                        let phase = -2.0 * std::f64::consts::PI * ((a * m + c * k) as f64) / n as f64;
                        s += data[m * n + k] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((s - buf[a * n + c]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn centered_indices() {
        let got: Vec<i64> = (0..6).map(|k| centered(k, 6)).collect();
        assert_eq!(got, vec![0, 1, 2, -3, -2, -1]);
    }

    #[test]
    fn ifftshift_moves_center() {
        let n = 4;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        data[2 * n + 2] = Complex64::new(1.0, 0.0);
        assert_eq!(ifftshift(&data, n)[0], Complex64::new(1.0, 0.0));
    }
}
