//! Type-I discrete sine transforms, used for spectral synthesis of fields.
//!
//! `DST-I` of a length-`m` sequence: `S[u] = Σ_{j=1..m} a_j sin(π j u / (m+1))`.
//! It is computed through a complex FFT of length `2(m+1)` on the odd
//! extension, so arbitrary `m` costs `O(m log m)`. The transform is its own
//! inverse up to the factor `(m+1)/2`.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Cached 1D DST-I plan for a fixed length.
pub struct Dst1 {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Dst1 {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let len = 2 * (m + 1);
        let fft = FftPlanner::new().plan_fft_forward(len);
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Dst1 { m, fft, buf: vec![Complex::default(); len], scratch }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// In-place DST-I of `data` (length `m`).
    pub fn apply(&mut self, data: &mut [f64]) {
        assert_eq!(data.len(), self.m);
        let m = self.m;
        self.buf[0] = Complex::default();
        self.buf[m + 1] = Complex::default();
        for j in 1..=m {
            let a = data[j - 1];
            self.buf[j] = Complex::new(a, 0.0);
            self.buf[2 * (m + 1) - j] = Complex::new(-a, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for u in 1..=m {
            data[u - 1] = -0.5 * self.buf[u].im;
        }
    }
}

/// Separable 2D DST-I over a row-major `m1 × m2` grid (`m1` columns).
pub struct Dst2d {
    row: Dst1,
    col: Dst1,
    tmp: Vec<f64>,
}

impl Dst2d {
    pub fn new(m1: usize, m2: usize) -> Self {
        Dst2d { row: Dst1::new(m1), col: Dst1::new(m2), tmp: vec![0.0; m2] }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.row.m, self.col.m)
    }

    pub fn apply(&mut self, grid: &mut [f64]) {
        let (m1, m2) = (self.row.m, self.col.m);
        assert_eq!(grid.len(), m1 * m2);
        for r in 0..m2 {
            self.row.apply(&mut grid[r * m1..(r + 1) * m1]);
        }
        for c in 0..m1 {
            for r in 0..m2 {
                self.tmp[r] = grid[r * m1 + c];
            }
            self.col.apply(&mut self.tmp);
            for r in 0..m2 {
                grid[r * m1 + c] = self.tmp[r];
            }
        }
    }
}
