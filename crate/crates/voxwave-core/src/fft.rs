//! Internal discrete Fourier transform.
//!
//! Forward transform is unnormalized, the inverse carries the 1/N factor.
//! Power-of-two lengths use an iterative radix-2 kernel; other lengths fall
//! back to a direct O(N^2) evaluation with exact twiddle indexing. Signal
//! lengths in this crate are at most a few thousand samples, so the fallback
//! is never a bottleneck.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// exp(sign * 2*pi*i * k/n) for k in 0..count.
fn twiddles(n: usize, count: usize, sign: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let a = sign * 2.0 * PI * (k as f64) / (n as f64);
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

fn radix2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    let w = twiddles(n, n / 2, sign);

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let a = buf[start + k];
                let b = buf[start + k + len / 2] * w[k * stride];
                buf[start + k] = a + b;
                buf[start + k + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
}

fn direct(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    let w = twiddles(n, n, sign);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &x) in buf.iter().enumerate() {
            acc += x * w[(j * k) % n];
        }
        *slot = acc;
    }
    buf.copy_from_slice(&out);
}

/// In-place forward DFT.
pub(crate) fn fft(buf: &mut [Complex64]) {
    if buf.len() < 2 {
        return;
    }
    if buf.len().is_power_of_two() {
        radix2(buf, -1.0);
    } else {
        direct(buf, -1.0);
    }
}

/// In-place inverse DFT, scaled by 1/N.
pub(crate) fn ifft(buf: &mut [Complex64]) {
    let n = buf.len();
    if n < 2 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, 1.0);
    } else {
        direct(buf, 1.0);
    }
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Forward DFT of a real signal.
pub(crate) fn fft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&mut buf);
    buf
}
