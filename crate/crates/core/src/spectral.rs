//! Fourier differentiation on a uniform periodic grid.
//!
//! The Laplacian keeps the Nyquist mode (eigenvalue `-(N/2)^2`) so that the
//! discrete Dirichlet form `<u, -L u>` vanishes only on constants. The first
//! derivative drops the Nyquist mode, as usual for real data.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::{count, Real};

pub struct Spectral<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    wave: Vec<T>,
    wave_sq: Vec<T>,
}

impl<T: Real> fmt::Debug for Spectral<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl<T: Real> Spectral<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let half = n / 2;
        let mut wave = Vec::with_capacity(n);
        let mut wave_sq = Vec::with_capacity(n);
        for m in 0..n {
            let k = if m <= half {
                m as f64
            } else {
                m as f64 - n as f64
            };
            let k: T = T::from(k).unwrap();
            wave_sq.push(k * k);
            wave.push(if n.is_multiple_of(2) && m == half {
                T::zero()
            } else {
                k
            });
        }
        Self {
            n,
            forward,
            inverse,
            wave,
            wave_sq,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Squared wavenumbers in FFT order (Nyquist included).
    pub fn wave_sq(&self) -> &[T] {
        &self.wave_sq
    }

    /// Unnormalized forward transform of real samples.
    pub fn modes(&self, u: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(u.len(), self.n);
        let mut buf: Vec<Complex<T>> = u.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`Spectral::modes`], keeping the real part.
    pub fn synthesize(&self, mut modes: Vec<Complex<T>>) -> Vec<T> {
        self.inverse.process(&mut modes);
        let scale = count::<T>(self.n).recip();
        modes.into_iter().map(|c| c.re * scale).collect()
    }

    fn filter(&self, u: &[T], mut factor: impl FnMut(usize) -> Complex<T>) -> Vec<T> {
        let mut m = self.modes(u);
        for (i, c) in m.iter_mut().enumerate() {
            *c = *c * factor(i);
        }
        self.synthesize(m)
    }

    /// `-u''` (positive semidefinite).
    pub fn neg_laplacian(&self, u: &[T]) -> Vec<T> {
        self.filter(u, |i| Complex::new(self.wave_sq[i], T::zero()))
    }

    pub fn derivative(&self, u: &[T]) -> Vec<T> {
        self.filter(u, |i| Complex::new(T::zero(), self.wave[i]))
    }

    /// Solves `(shift - u'') v = u` for `shift > 0`.
    pub fn resolvent(&self, shift: T, u: &[T]) -> Vec<T> {
        self.filter(u, |i| {
            Complex::new((shift + self.wave_sq[i]).recip(), T::zero())
        })
    }

    /// Dense matrix of `-d²/dt²` in row-major order (`n x n`).
    pub fn neg_laplacian_matrix(&self) -> Vec<T> {
        let n = self.n;
        let mut unit = vec![T::zero(); n];
        unit[0] = T::one();
        // Circulant: column j is the first column shifted by j.
        let col0 = self.neg_laplacian(&unit);
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = col0[(i + n - j) % n];
            }
        }
        out
    }
}
