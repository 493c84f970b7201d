//! Multi-dimensional real FFTs on cubic grids.
//!
//! Real data is stored row-major with the last axis fastest. The spectrum is
//! the half spectrum along the last axis: shape `[n; d-1] x (n/2 + 1)`.
//! Both directions are unnormalized.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

struct LinePlans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Mutex<HashMap<usize, Arc<LinePlans>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plans(n: usize) -> Arc<LinePlans> {
    let mut map = PLANS.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut cplx = FftPlanner::<f64>::new();
            Arc::new(LinePlans {
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                forward: cplx.plan_fft_forward(n),
                inverse: cplx.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Real-to-complex transform pair for a `dim`-dimensional cube of side `n`.
#[derive(Clone)]
pub struct RealFftNd {
    dim: usize,
    n: usize,
    plans: Arc<LinePlans>,
}

impl std::fmt::Debug for RealFftNd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFftNd").field("dim", &self.dim).field("n", &self.n).finish()
    }
}

impl RealFftNd {
    pub fn new(dim: usize, n: usize) -> Self {
        assert!(dim == 2 || dim == 3, "only 2-D and 3-D transforms are supported");
        assert!(n >= 2 && n % 2 == 0, "transform length must be even");
        RealFftNd { dim, n, plans: plans(n) }
    }

    pub fn real_len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn half(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.n.pow(self.dim as u32 - 1) * self.half()
    }

    /// Forward transform. `input` is used as scratch and left unspecified.
    pub fn forward(&self, input: &mut [f64], output: &mut [Complex64]) {
        assert_eq!(input.len(), self.real_len());
        assert_eq!(output.len(), self.spectral_len());
        let n = self.n;
        let h = self.half();
        let mut scratch = self.plans.r2c.make_scratch_vec();
        for (row, out) in input.chunks_exact_mut(n).zip(output.chunks_exact_mut(h)) {
            self.plans
                .r2c
                .process_with_scratch(row, out, &mut scratch)
                .expect("r2c length mismatch");
        }
        self.complex_axes(output, &self.plans.forward);
    }

    /// Inverse transform. `input` is used as scratch and left unspecified.
    pub fn inverse(&self, input: &mut [Complex64], output: &mut [f64]) {
        assert_eq!(input.len(), self.spectral_len());
        assert_eq!(output.len(), self.real_len());
        let n = self.n;
        let h = self.half();
        self.complex_axes(input, &self.plans.inverse);
        let mut scratch = self.plans.c2r.make_scratch_vec();
        for (row, out) in input.chunks_exact_mut(h).zip(output.chunks_exact_mut(n)) {
            // c2r requires exactly real DC and Nyquist bins
            row[0].im = 0.0;
            row[h - 1].im = 0.0;
            self.plans
                .c2r
                .process_with_scratch(row, out, &mut scratch)
                .expect("c2r length mismatch");
        }
    }

    /// Complex transforms along every axis except the last.
    fn complex_axes(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let h = self.half();
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); BLOCK * n];
        match self.dim {
            2 => transform_columns(data, &mut buf, n, h, fft, &mut scratch),
            3 => {
                for slab in data.chunks_exact_mut(n * h) {
                    transform_columns(slab, &mut buf, n, h, fft, &mut scratch);
                }
                transform_columns(data, &mut buf, n, n * h, fft, &mut scratch);
            }
            _ => unreachable!(),
        }
    }
}

const BLOCK: usize = 16;

/// Transform every column of a row-major `[rows][cols]` block, gathering
/// `BLOCK` adjacent columns at a time into contiguous lines.
fn transform_columns(
    data: &mut [Complex64],
    buf: &mut [Complex64],
    rows: usize,
    cols: usize,
    fft: &Arc<dyn Fft<f64>>,
    scratch: &mut [Complex64],
) {
    let mut c0 = 0;
    while c0 < cols {
        let w = BLOCK.min(cols - c0);
        for r in 0..rows {
            let row = &data[r * cols + c0..r * cols + c0 + w];
            for (c, v) in row.iter().enumerate() {
                buf[c * rows + r] = *v;
            }
        }
        fft.process_with_scratch(&mut buf[..w * rows], scratch);
        for r in 0..rows {
            let row = &mut data[r * cols + c0..r * cols + c0 + w];
            for (c, v) in row.iter_mut().enumerate() {
                *v = buf[c * rows + r];
            }
        }
        c0 += w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_3d() {
        let t = RealFftNd::new(3, 12);
        let orig: Vec<f64> = (0..t.real_len()).map(|i| ((i * 7919) % 101) as f64 / 101.0).collect();
        let mut input = orig.clone();
        let mut spec = vec![Complex64::new(0.0, 0.0); t.spectral_len()];
        t.forward(&mut input, &mut spec);
        let mut back = vec![0.0; t.real_len()];
        t.inverse(&mut spec, &mut back);
        let scale = t.real_len() as f64;
        for (a, b) in orig.iter().zip(&back) {
            assert!((a - b / scale).abs() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_expected_bin() {
        let n = 8;
        let t = RealFftNd::new(2, n);
        let mut input: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                let y = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                (x + 2.0 * y).cos()
            })
            .collect();
        let mut spec = vec![Complex64::new(0.0, 0.0); t.spectral_len()];
        t.forward(&mut input, &mut spec);
        let h = t.half();
        // cos(x + 2y) = (e^{i(x+2y)} + e^{-i(x+2y)})/2 -> bin (1, 2) holds n^2/2
        let v = spec[h + 2];
        assert!((v.re - (n * n) as f64 / 2.0).abs() < 1e-10 && v.im.abs() < 1e-10);
    }
}
