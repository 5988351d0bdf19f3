//! Complex FFT for arbitrary lengths.
//!
//! Power-of-two sizes use an iterative radix-2 kernel; every other size goes
//! through Bluestein's chirp-z reformulation on a padded power-of-two
//! convolution. Both directions are unnormalized:
//!
//! ```text
//! forward:  X_j = Σ_k x_k e^{-2πi jk/n}
//! inverse:  x_k = Σ_j X_j e^{+2πi jk/n}
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;

/// A precomputed transform plan for one length.
#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Trivial,
    Radix2(Radix2),
    Bluestein(Bluestein),
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let kind = if len <= 1 {
            Kind::Trivial
        } else if len.is_power_of_two() {
            Kind::Radix2(Radix2::new(len))
        } else {
            Kind::Bluestein(Bluestein::new(len))
        };
        Fft { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform. Panics if `buf.len() != self.len()`.
    pub fn forward(&self, buf: &mut [C64]) {
        assert_eq!(buf.len(), self.len, "fft buffer length mismatch");
        match &self.kind {
            Kind::Trivial => {}
            Kind::Radix2(r) => r.forward(buf),
            Kind::Bluestein(b) => b.forward(buf),
        }
    }

    /// In-place inverse transform (no 1/n factor).
    pub fn inverse(&self, buf: &mut [C64]) {
        for x in buf.iter_mut() {
            *x = x.conj();
        }
        self.forward(buf);
        for x in buf.iter_mut() {
            *x = x.conj();
        }
    }
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    // e^{-2πik/len} for k < len/2
    twiddles: Vec<C64>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        let twiddles = (0..len / 2)
            .map(|k| {
                let theta = -2.0 * PI * (k as f64) / (len as f64);
                C64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        Radix2 { len, twiddles }
    }

    fn forward(&self, buf: &mut [C64]) {
        let n = self.len;
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

#[derive(Debug, Clone)]
struct Bluestein {
    len: usize,
    // e^{-iπ k²/len}
    chirp: Vec<C64>,
    // forward transform of the conjugate chirp, wrapped to the padded length
    kernel: Vec<C64>,
    inner: Radix2,
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let padded = (2 * len - 1).next_power_of_two();
        let modulus = 2 * len as u128;
        let chirp: Vec<C64> = (0..len)
            .map(|k| {
                // reduce k² mod 2n before scaling so the phase stays accurate
                let q = ((k as u128 * k as u128) % modulus) as f64;
                let theta = -PI * q / (len as f64);
                C64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        let inner = Radix2::new(padded);
        let mut kernel = vec![C64::new(0.0, 0.0); padded];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[padded - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Bluestein {
            len,
            chirp,
            kernel,
            inner,
        }
    }

    fn forward(&self, buf: &mut [C64]) {
        let padded = self.kernel.len();
        let mut work = vec![C64::new(0.0, 0.0); padded];
        for k in 0..self.len {
            work[k] = buf[k] * self.chirp[k];
        }
        self.inner.forward(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel) {
            *w *= k;
        }
        // inverse via conjugation, then the 1/padded factor of the convolution
        for w in work.iter_mut() {
            *w = w.conj();
        }
        self.inner.forward(&mut work);
        let scale = 1.0 / padded as f64;
        for j in 0..self.len {
            buf[j] = work[j].conj() * scale * self.chirp[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[C64]) -> Vec<C64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let theta = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        v * C64::new(libm::cos(theta), libm::sin(theta))
                    })
                    .sum()
            })
            .collect()
    }

    fn sample(n: usize) -> Vec<C64> {
        (0..n)
            .map(|k| {
                let t = k as f64;
                C64::new(libm::sin(0.37 * t) + 0.1 * t, libm::cos(1.3 * t * t))
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_mixed_sizes() {
        for n in [1, 2, 3, 4, 5, 6, 8, 12, 16, 30, 64, 100, 128, 400] {
            let x = sample(n);
            let mut y = x.clone();
            Fft::new(n).forward(&mut y);
            let reference = naive(&x);
            let scale: f64 = x.iter().map(|v| v.norm()).sum::<f64>().max(1.0);
            for (a, b) in y.iter().zip(&reference) {
                assert!((a - b).norm() < 1e-12 * scale, "n = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for n in [6, 32, 50, 1600] {
            let x = sample(n);
            let mut y = x.clone();
            let plan = Fft::new(n);
            plan.forward(&mut y);
            plan.inverse(&mut y);
            for (a, b) in y.iter().zip(&x) {
                assert!((a / n as f64 - b).norm() < 1e-11);
            }
        }
    }
}
