//! Oracles shared by the integration tests. Nothing here goes through the
//! library's transforms or collocation grids: fields are evaluated by direct
//! summation of their Fourier series, and coefficients are recovered by a
//! direct DFT.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use ymh::geometry::GaugeField;
use ymh::spectral::{SpectralField, TorusGrid, VectorField};

/// Non-zero `(k, c)` pairs covering the full spectrum.
pub fn full_spectrum(f: &SpectralField) -> Vec<([i64; 3], Complex64)> {
    let g = f.grid();
    let d = g.dim();
    let mut out = Vec::new();
    for (idx, c) in f.coefficients().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let k = g.mode(idx);
        out.push((k, *c));
        if k[d - 1] > 0 {
            let mut neg = [0i64; 3];
            for a in 0..d {
                neg[a] = -k[a];
            }
            out.push((neg, c.conj()));
        }
    }
    out
}

/// Direct evaluation of a Fourier series at `x`.
pub struct Series {
    terms: Vec<([i64; 3], Complex64)>,
    scale: f64,
}

impl Series {
    pub fn new(f: &SpectralField) -> Self {
        Series { terms: full_spectrum(f), scale: 2.0 * PI / f.grid().length() }
    }

    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let phase = self.scale * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
            s += c * Complex64::from_polar(1.0, phase);
        }
        s.re
    }

    /// Exact derivative along `axis` at `x`.
    pub fn derivative(&self, axis: usize, x: &[f64; 3]) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let phase = self.scale * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
            s += c * Complex64::new(0.0, self.scale * k[axis] as f64) * Complex64::from_polar(1.0, phase);
        }
        s.re
    }
}

/// Points of the uniform `m^d` grid on the torus of `g`.
pub fn points(g: &TorusGrid, m: usize) -> Vec<[f64; 3]> {
    let h = g.length() / m as f64;
    let total = m.pow(g.dim() as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = [0.0; 3];
            for a in (0..g.dim()).rev() {
                x[a] = (idx % m) as f64 * h;
                idx /= m;
            }
            x
        })
        .collect()
}

/// Fourier coefficient at `k` of samples on the uniform `m^d` grid.
pub fn dft_coefficient(g: &TorusGrid, m: usize, values: &[f64], k: &[i64; 3]) -> Complex64 {
    let s = 2.0 * PI / g.length();
    let pts = points(g, m);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, v) in pts.iter().zip(values) {
        let phase = -s * (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]);
        acc += v * Complex64::from_polar(1.0, phase);
    }
    acc / pts.len() as f64
}

/// Every wavevector with `|k_i| <= band` on a `dim`-dimensional grid.
pub fn modes_within(dim: usize, band: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    let r = -band..=band;
    for a in r.clone() {
        for b in r.clone() {
            if dim == 2 {
                out.push([a, b, 0]);
            } else {
                for c in r.clone() {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Largest coefficient difference between `f` and the samples `values`
/// on the `m^d` grid, over `|k_i| <= band`.
pub fn coefficient_error(f: &SpectralField, m: usize, values: &[f64], band: i64) -> f64 {
    let g = f.grid();
    modes_within(g.dim(), band)
        .iter()
        .map(|k| (f.coeff(&k[..g.dim()]) - dft_coefficient(g, m, values, k)).norm())
        .fold(0.0, f64::max)
}

pub fn series_of_vector(x: &VectorField) -> Vec<Series> {
    x.components().iter().map(Series::new).collect()
}

pub fn series_of_gauge(f: &GaugeField) -> Vec<Series> {
    f.components().iter().map(Series::new).collect()
}

pub fn relative(err: f64, scale: f64) -> f64 {
    err / scale.max(f64::MIN_POSITIVE)
}

/// Dense Galerkin matrix of `p -> div(V grad p)` on the non-Nyquist modes
/// of a 2-D grid, assembled from the Fourier coefficients of `V`.
pub fn dense_weighted_poisson(v: &SpectralField, rhs: &SpectralField) -> HashMap<[i64; 2], Complex64> {
    let g = v.grid();
    let top = (g.n() / 2 - 1) as i64;
    let s = g.wavenumber_scale();
    let vhat: HashMap<[i64; 2], Complex64> =
        full_spectrum(v).into_iter().map(|(k, c)| ([k[0], k[1]], c)).collect();
    let modes: Vec<[i64; 2]> = (-top..=top)
        .flat_map(|a| (-top..=top).map(move |b| [a, b]))
        .filter(|k| *k != [0, 0])
        .collect();
    let n = modes.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (i, k) in modes.iter().enumerate() {
        for (j, q) in modes.iter().enumerate() {
            if let Some(c) = vhat.get(&[k[0] - q[0], k[1] - q[1]]) {
                let dot = s * s * (k[0] * q[0] + k[1] * q[1]) as f64;
                m[(i, j)] = -c * dot;
            }
        }
    }
    let b = DVector::from_iterator(n, modes.iter().map(|k| rhs.coeff(k)));
    let p = m.lu().solve(&b).expect("dense operator is invertible");
    modes.into_iter().zip(p.iter().copied()).collect()
}
