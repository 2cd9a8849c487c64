//! Discrete Fourier transforms.
//!
//! [`dft_direct`] evaluates the DFT sum term by term and is kept as the
//! reference. [`fft`] is an iterative radix-2 transform with a precomputed
//! twiddle table. [`dft`] accepts any length: powers of two go straight to
//! the radix-2 kernel, everything else through Bluestein's chirp-z identity
//! on top of it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `X[k] = sum_n x[n] exp(-j 2 pi k n / N)`, evaluated in O(N^2).
pub fn dft_direct(samples: &[f64]) -> Result<Vec<Complex64>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidArgument("DFT of an empty sequence".into()));
    }
    // exp(-j 2 pi m / N) for every residue m, each from its own sin/cos call
    let roots: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();
    let out = (0..n)
        .map(|k| {
            let mut m = 0;
            let mut acc = Complex64::new(0.0, 0.0);
            for &x in samples {
                acc += x * roots[m];
                m += k;
                if m >= n {
                    m -= n;
                }
            }
            acc
        })
        .collect();
    Ok(out)
}

/// A reusable radix-2 plan: bit-reversal permutation and twiddle factors.
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2Plan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(Self {
            len,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    /// In-place inverse transform, including the 1/N scaling.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        for i in 0..self.len {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < self.len {
            let stride = self.len / (2 * half);
            for start in (0..self.len).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Radix-2 FFT of a real sequence whose length is a power of two.
pub fn fft(samples: &[f64]) -> Result<Vec<Complex64>> {
    let plan = Radix2Plan::new(samples.len())?;
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan.forward(&mut buf);
    Ok(buf)
}

/// DFT of a real sequence of any length `N >= 1`.
pub fn dft(samples: &[f64]) -> Result<Vec<Complex64>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidArgument("DFT of an empty sequence".into()));
    }
    if n.is_power_of_two() {
        return fft(samples);
    }
    Ok(bluestein(samples))
}

/// Chirp-z evaluation: `X[k] = conj(c[k]) sum_n (x[n] conj(c[n])) c[k - n]`
/// with `c[m] = exp(j pi m^2 / N)`, the convolution done by radix-2 FFTs.
fn bluestein(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let m = (2 * n - 1).next_power_of_two();
    let plan = Radix2Plan::new(m).expect("power of two");

    // m^2 mod 2N keeps the chirp angle small and exact
    let two_n = 2 * n as u128;
    let chirp: Vec<Complex64> = (0..n)
        .map(|i| {
            let q = ((i as u128 * i as u128) % two_n) as f64;
            Complex64::from_polar(1.0, PI * q / n as f64)
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for (i, (&x, c)) in samples.iter().zip(&chirp).enumerate() {
        a[i] = x * c.conj();
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0];
    for i in 1..n {
        b[i] = chirp[i];
        b[m - i] = chirp[i];
    }
    plan.forward(&mut a);
    plan.forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    plan.inverse(&mut a);
    a.truncate(n);
    for (x, c) in a.iter_mut().zip(&chirp) {
        *x *= c.conj();
    }
    a
}
