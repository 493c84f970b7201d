//! Truncated Fourier representation of real fields on flat tori.
//!
//! A field is stored by its normalized coefficients,
//! `f(x) = sum_k c(k) exp(i k.x 2pi/L)`, on the half spectrum of an `N^d`
//! grid (last axis non-negative). Nyquist modes are always zero, and the
//! self-conjugate plane is kept exactly Hermitian so every field is real.
//!
//! Nonlinear terms are evaluated on a [`Collocation`] grid large enough to be
//! alias-free for the requested output band and then truncated, either to the
//! 2/3 band `|k_i| <= N/3` or to the full non-Nyquist band.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fft::RealFftNd;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Isotropic periodic grid on `T^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "resolution must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!("period must be positive, got {length}")));
        }
        Ok(TorusGrid { dim, n, length })
    }

    /// Grid with the default period `2 pi`.
    pub fn periodic(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 2.0 * PI)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Physical wavenumber of the integer mode 1.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest `|k_i|` retained by nonlinear operations.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Largest non-Nyquist `|k_i|`.
    pub fn full_cutoff(&self) -> usize {
        self.n / 2 - 1
    }

    pub fn real_len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spectral_len(&self) -> usize {
        spectral_len(self.dim, self.n)
    }

    /// Physical coordinates of the collocation point with flat index `idx`.
    pub fn coordinates(&self, idx: usize) -> [f64; 3] {
        let h = self.length / self.n as f64;
        let mut x = [0.0; 3];
        let mut rem = idx;
        for axis in (0..self.dim).rev() {
            x[axis] = (rem % self.n) as f64 * h;
            rem /= self.n;
        }
        x
    }

    /// Integer wavevector of spectral slot `idx`.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        mode_of(self.dim, self.n, idx)
    }

    pub(crate) fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < self.dim {
            Ok(())
        } else {
            Err(Error::AxisOutOfRange { axis, dim: self.dim })
        }
    }
}

fn spectral_len(dim: usize, size: usize) -> usize {
    size.pow(dim as u32 - 1) * (size / 2 + 1)
}

fn signed(i: usize, size: usize) -> i64 {
    if i < (size + 1) / 2 {
        i as i64
    } else {
        i as i64 - size as i64
    }
}

fn mode_of(dim: usize, size: usize, idx: usize) -> [i64; 3] {
    let h = size / 2 + 1;
    let mut k = [0i64; 3];
    k[dim - 1] = (idx % h) as i64;
    let mut rem = idx / h;
    for axis in (0..dim - 1).rev() {
        k[axis] = signed(rem % size, size);
        rem /= size;
    }
    k
}

/// Slot of wavevector `k` (last component >= 0) in a half spectrum of side `size`.
fn slot_of(dim: usize, size: usize, k: &[i64; 3]) -> usize {
    let h = size / 2 + 1;
    let mut idx = 0usize;
    for &ki in k.iter().take(dim - 1) {
        idx = idx * size + ki.rem_euclid(size as i64) as usize;
    }
    idx * h + k[dim - 1] as usize
}

fn is_nyquist(dim: usize, n: usize, k: &[i64; 3]) -> bool {
    let ny = (n / 2) as i64;
    k.iter().take(dim).any(|&ki| ki.abs() == ny)
}

/// Per-slot wavevectors and their largest component, cached per `(dim, n)`.
#[derive(Debug)]
struct ModeTable {
    modes: Vec<[i64; 3]>,
    reach: Vec<usize>,
}

static MODE_TABLES: Lazy<Mutex<HashMap<(usize, usize), Arc<ModeTable>>>> = Lazy::new(Default::default);
static EMBEDDINGS: Lazy<Mutex<HashMap<(usize, usize, usize), Arc<Vec<usize>>>>> = Lazy::new(Default::default);

fn mode_table(dim: usize, n: usize) -> Arc<ModeTable> {
    let mut map = MODE_TABLES.lock().expect("mode table cache poisoned");
    map.entry((dim, n))
        .or_insert_with(|| {
            let modes: Vec<[i64; 3]> = (0..spectral_len(dim, n)).map(|i| mode_of(dim, n, i)).collect();
            let reach = modes.iter().map(|k| k.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0)).collect();
            Arc::new(ModeTable { modes, reach })
        })
        .clone()
}

/// Slot in the side-`size` spectrum of every slot of the side-`n` spectrum.
fn embedding(dim: usize, n: usize, size: usize) -> Arc<Vec<usize>> {
    let table = mode_table(dim, n);
    let mut map = EMBEDDINGS.lock().expect("embedding cache poisoned");
    map.entry((dim, n, size))
        .or_insert_with(|| Arc::new(table.modes.iter().map(|k| slot_of(dim, size, k)).collect()))
        .clone()
}

thread_local! {
    static SPECTRUM: std::cell::RefCell<Vec<Complex64>> = const { std::cell::RefCell::new(Vec::new()) };
}

/// Make the self-conjugate plane (last wavenumber zero) exactly Hermitian.
fn symmetrize(dim: usize, n: usize, coeffs: &mut [Complex64]) {
    let h = n / 2 + 1;
    let rows = n.pow(dim as u32 - 1);
    for r in 0..rows {
        let idx = r * h;
        let k = mode_of(dim, n, idx);
        let mut neg = [0i64; 3];
        for a in 0..dim - 1 {
            neg[a] = -k[a];
        }
        let partner = slot_of(dim, n, &neg);
        if partner == idx {
            coeffs[idx].im = 0.0;
        } else if partner > idx {
            let avg = (coeffs[idx] + coeffs[partner].conj()) * 0.5;
            coeffs[idx] = avg;
            coeffs[partner] = avg.conj();
        }
    }
}

/// Output band of a collocation evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Band {
    /// The 2/3 band `|k_i| <= N/3`.
    Dealiased,
    /// Every non-Nyquist mode of the base grid.
    Full,
}

impl Band {
    fn cutoff(self, grid: &TorusGrid) -> usize {
        match self {
            Band::Dealiased => grid.dealias_cutoff(),
            Band::Full => grid.full_cutoff(),
        }
    }
}

fn smooth_even(min: usize) -> usize {
    let mut m = min + (min % 2);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 2;
    }
}

/// Real-space evaluation grid for nonlinear terms of fields on a base grid.
#[derive(Clone, Debug)]
pub struct Collocation {
    grid: TorusGrid,
    size: usize,
    fft: RealFftNd,
    table: Arc<ModeTable>,
    embed: Arc<Vec<usize>>,
}

impl Collocation {
    /// The 3N/2 zero-padded grid, alias-free for any quadratic product.
    pub fn padded(grid: &TorusGrid) -> Self {
        Self::with_size(grid, 3 * grid.n / 2)
    }

    /// Smallest grid (never coarser than the base grid) on which a pointwise
    /// expression whose spectrum reaches `|k_i| <= content` is alias-free on
    /// the modes kept by `keep`.
    pub fn for_content(grid: &TorusGrid, content: usize, keep: Band) -> Self {
        let need = content + keep.cutoff(grid) + 1;
        Self::with_size(grid, smooth_even(need.max(grid.n)))
    }

    /// Grid on which the mean of an expression with spectral reach `content`
    /// is exact.
    pub fn for_integral(grid: &TorusGrid, content: usize) -> Self {
        Self::with_size(grid, smooth_even((content + 1).max(grid.n)))
    }

    /// Grid of exactly `size` points per axis.
    pub fn with_size(grid: &TorusGrid, size: usize) -> Self {
        Collocation {
            grid: *grid,
            size,
            fft: RealFftNd::new(grid.dim, size),
            table: mode_table(grid.dim, grid.n),
            embed: embedding(grid.dim, grid.n, size),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.grid.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples of `field` on this grid.
    pub fn values(&self, field: &SpectralField) -> Vec<f64> {
        debug_assert_eq!(field.grid, self.grid);
        let mut out = vec![0.0; self.len()];
        SPECTRUM.with(|buf| {
            let mut spec = buf.borrow_mut();
            spec.clear();
            spec.resize(spectral_len(self.grid.dim, self.size), ZERO);
            for (c, &slot) in field.coeffs.iter().zip(self.embed.iter()) {
                spec[slot] = *c;
            }
            self.fft.inverse(&mut spec, &mut out);
        });
        out
    }

    /// Transform samples back and keep the modes selected by `keep`.
    pub fn to_field(&self, mut values: Vec<f64>, keep: Band) -> SpectralField {
        assert_eq!(values.len(), self.len());
        let dim = self.grid.dim;
        let scale = 1.0 / self.len() as f64;
        let cut = keep.cutoff(&self.grid);
        let mut out = SpectralField::zeros(&self.grid);
        SPECTRUM.with(|buf| {
            let mut spec = buf.borrow_mut();
            spec.resize(spectral_len(dim, self.size), ZERO);
            self.fft.forward(&mut values, &mut spec);
            for ((c, &slot), &reach) in out.coeffs.iter_mut().zip(self.embed.iter()).zip(&self.table.reach) {
                if reach <= cut {
                    *c = spec[slot] * scale;
                }
            }
        });
        symmetrize(dim, self.grid.n, &mut out.coeffs);
        out
    }

    /// Mean of samples on this grid.
    pub fn mean(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Real scalar field on a torus in truncated Fourier form.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        SpectralField { grid: *grid, coeffs: vec![ZERO; grid.spectral_len()] }
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// Samples `func` at the collocation points; Nyquist content is dropped.
    pub fn from_fn(grid: &TorusGrid, func: impl Fn(&[f64; 3]) -> f64) -> Self {
        let values = (0..grid.real_len()).map(|i| func(&grid.coordinates(i))).collect();
        Self::from_values_unchecked(grid, values)
    }

    pub fn from_values(grid: &TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.real_len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.real_len(),
                values.len()
            )));
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    fn from_values_unchecked(grid: &TorusGrid, values: Vec<f64>) -> Self {
        Collocation::with_size(grid, grid.n).to_field(values, Band::Full)
    }

    /// `amplitude * cos(2 pi k.x / L + phase)`.
    pub fn mode(grid: &TorusGrid, k: &[i64], amplitude: f64, phase: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        f.add_mode(k, amplitude, phase)?;
        Ok(f)
    }

    /// Adds `amplitude * cos(2 pi k.x / L + phase)`.
    pub fn add_mode(&mut self, k: &[i64], amplitude: f64, phase: f64) -> Result<()> {
        let dim = self.grid.dim;
        if k.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "wavevector {k:?} has {} components, grid has {dim}",
                k.len()
            )));
        }
        let mut kk = [0i64; 3];
        kk[..dim].copy_from_slice(k);
        if kk.iter().any(|ki| ki.unsigned_abs() as usize >= self.grid.n / 2) {
            return Err(Error::InvalidArgument(format!(
                "wavevector {k:?} is not resolved below the Nyquist mode of N={}",
                self.grid.n
            )));
        }
        let half = Complex64::from_polar(0.5 * amplitude, phase);
        if kk.iter().all(|&ki| ki == 0) {
            self.coeffs[0].re += amplitude * phase.cos();
            return Ok(());
        }
        // store the representative with non-negative last component
        let (rep, c) = if kk[dim - 1] < 0 || (kk[dim - 1] == 0 && !first_nonzero_positive(&kk, dim)) {
            let mut neg = kk;
            for v in neg.iter_mut() {
                *v = -*v;
            }
            (neg, half.conj())
        } else {
            (kk, half)
        };
        let idx = slot_of(dim, self.grid.n, &rep);
        self.coeffs[idx] += c;
        if rep[dim - 1] == 0 {
            let mut neg = rep;
            for v in neg.iter_mut() {
                *v = -*v;
            }
            let pidx = slot_of(dim, self.grid.n, &neg);
            self.coeffs[pidx] += c.conj();
        }
        Ok(())
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Raw half-spectrum coefficients.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of an arbitrary wavevector (full spectrum view).
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        let dim = self.grid.dim;
        let n = self.grid.n as i64;
        let mut kk = [0i64; 3];
        for a in 0..dim {
            kk[a] = k[a].rem_euclid(n);
            if kk[a] >= n / 2 {
                kk[a] -= n;
            }
        }
        if kk[dim - 1] < 0 {
            for v in kk.iter_mut() {
                *v = -*v;
            }
            if kk[dim - 1] == n / 2 {
                return ZERO;
            }
            self.coeffs[slot_of(dim, self.grid.n, &kk)].conj()
        } else {
            self.coeffs[slot_of(dim, self.grid.n, &kk)]
        }
    }

    /// Spatial mean, the zero-mode coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Samples on the base collocation grid, last axis fastest.
    pub fn to_values(&self) -> Vec<f64> {
        Collocation::with_size(&self.grid, self.grid.n).values(self)
    }

    /// Largest `|k_i|` over nonzero coefficients.
    pub fn band(&self) -> usize {
        let table = mode_table(self.grid.dim, self.grid.n);
        self.coeffs
            .iter()
            .zip(&table.reach)
            .filter(|(c, _)| **c != ZERO)
            .map(|(_, &r)| r)
            .max()
            .unwrap_or(0)
    }

    /// Largest violation of `c(-k) = conj(c(k))` over the stored spectrum.
    pub fn hermitian_defect(&self) -> f64 {
        let dim = self.grid.dim;
        let mut worst = 0.0f64;
        for idx in 0..self.coeffs.len() {
            let k = mode_of(dim, self.grid.n, idx);
            let mut neg = [0i64; 3];
            for a in 0..dim {
                neg[a] = -k[a];
            }
            let d = (self.coeff(&neg[..dim]) - self.coeffs[idx].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    /// Zero every mode outside the 2/3 band.
    pub fn dealiased(&self) -> Self {
        let cut = self.grid.dealias_cutoff() as i64;
        self.filtered(|k| k.iter().all(|ki| ki.abs() <= cut))
    }

    /// Keep only modes accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(&[i64]) -> bool) -> Self {
        let dim = self.grid.dim;
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let k = mode_of(dim, self.grid.n, idx);
            if !keep(&k[..dim]) {
                *c = ZERO;
            }
        }
        out
    }

    /// Exact spectral derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> Result<Self> {
        self.grid.check_axis(axis)?;
        let table = mode_table(self.grid.dim, self.grid.n);
        let s = self.grid.wavenumber_scale();
        let mut out = self.clone();
        for (c, k) in out.coeffs.iter_mut().zip(&table.modes) {
            let kappa = k[axis] as f64 * s;
            *c = Complex64::new(-kappa * c.im, kappa * c.re);
        }
        Ok(out)
    }

    pub fn gradient(&self) -> VectorField {
        VectorField {
            components: (0..self.grid.dim).map(|a| self.derivative(a).expect("axis in range")).collect(),
        }
    }

    /// Applies the spectral multiplier `symbol(kappa)` with physical wavevector `kappa`.
    pub fn apply_symbol(&self, symbol: impl Fn(&[f64; 3]) -> f64) -> Self {
        let table = mode_table(self.grid.dim, self.grid.n);
        let s = self.grid.wavenumber_scale();
        let mut out = self.clone();
        for (c, k) in out.coeffs.iter_mut().zip(&table.modes) {
            let kappa = [k[0] as f64 * s, k[1] as f64 * s, k[2] as f64 * s];
            *c *= symbol(&kappa);
        }
        out
    }

    /// Root-mean-square value.
    pub fn rms(&self) -> f64 {
        self.power().sqrt()
    }

    /// Mean of `f^2` from the spectrum.
    pub fn power(&self) -> f64 {
        let h = self.grid.n / 2 + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| if idx % h == 0 { c.norm_sqr() } else { 2.0 * c.norm_sqr() })
            .sum()
    }

    /// Spatial mean of `self * other`, from the spectra.
    pub fn dot(&self, other: &SpectralField) -> f64 {
        let h = self.grid.n / 2 + 1;
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(idx, (a, b))| {
                let re = a.re * b.re + a.im * b.im;
                if idx % h == 0 {
                    re
                } else {
                    2.0 * re
                }
            })
            .sum()
    }

    /// True when every non-constant coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| *c == ZERO)
    }

    /// Maximum absolute value over the base collocation points.
    pub fn max_abs(&self) -> f64 {
        self.to_values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()))
    }

    /// Copy with every coefficient of modulus at most `tol` set to zero.
    pub fn chopped(&self, tol: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| if c.norm() <= tol { ZERO } else { c }).collect();
        SpectralField { grid: self.grid, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid, "grid mismatch in axpy");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    /// Random real field with `|k_i| <= band` and coefficients of order one.
    pub fn random_band_limited(grid: &TorusGrid, band: usize, rng: &mut impl Rng) -> Self {
        let dim = grid.dim;
        let mut f = Self::zeros(grid);
        for (idx, c) in f.coeffs.iter_mut().enumerate() {
            let k = mode_of(dim, grid.n, idx);
            if k.iter().take(dim).all(|ki| ki.unsigned_abs() as usize <= band)
                && !is_nyquist(dim, grid.n, &k)
            {
                *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        symmetrize(dim, grid.n, &mut f.coeffs);
        f
    }
}

fn first_nonzero_positive(k: &[i64; 3], dim: usize) -> bool {
    k.iter().take(dim).find(|&&v| v != 0).map(|&v| v > 0).unwrap_or(true)
}

/// Pointwise product evaluated on the 3N/2 padded grid and truncated to the
/// 2/3 band. Exact whenever the inputs are jointly band-limited within N/3.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid.check_same(&b.grid)?;
    let col = Collocation::padded(&a.grid);
    let mut va = col.values(a);
    let vb = col.values(b);
    for (x, y) in va.iter_mut().zip(&vb) {
        *x *= y;
    }
    Ok(col.to_field(va, Band::Dealiased))
}

/// `int_T field * weight dx`, i.e. `L^d` times the zero mode of the
/// alias-free product; exact for band-limited integrands.
pub fn integrate(field: &SpectralField, weight: &SpectralField) -> Result<f64> {
    field.grid.check_same(&weight.grid)?;
    let col = Collocation::padded(&field.grid);
    let vf = col.values(field);
    let vw = col.values(weight);
    let s: f64 = vf.iter().zip(&vw).map(|(x, y)| x * y).sum();
    Ok(field.grid.volume() * s / col.len() as f64)
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        assert_eq!(self.grid, rhs.grid, "grid mismatch in addition");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        assert_eq!(self.grid, rhs.grid, "grid mismatch in subtraction");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        self.scale(s)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// `d` scalar components on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<SpectralField>,
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("vector field needs components".into()))?;
        let grid = *first.grid();
        if components.len() != grid.dim {
            return Err(Error::InvalidArgument(format!(
                "{} components on a {}-dimensional grid",
                components.len(),
                grid.dim
            )));
        }
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        VectorField { components: vec![SpectralField::zeros(grid); grid.dim] }
    }

    pub fn from_fn(grid: &TorusGrid, func: impl Fn(&[f64; 3]) -> [f64; 3]) -> Self {
        let values: Vec<[f64; 3]> = (0..grid.real_len()).map(|i| func(&grid.coordinates(i))).collect();
        VectorField {
            components: (0..grid.dim)
                .map(|a| {
                    SpectralField::from_values_unchecked(grid, values.iter().map(|v| v[a]).collect())
                })
                .collect(),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn component(&self, axis: usize) -> &SpectralField {
        &self.components[axis]
    }

    pub fn component_mut(&mut self, axis: usize) -> &mut SpectralField {
        &mut self.components[axis]
    }

    pub fn into_components(self) -> Vec<SpectralField> {
        self.components
    }

    pub fn divergence(&self) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid());
        for (a, c) in self.components.iter().enumerate() {
            out += &c.derivative(a).expect("axis in range");
        }
        out
    }

    /// Two-dimensional scalar vorticity `d_0 X_1 - d_1 X_0`.
    pub fn vorticity_2d(&self) -> Result<SpectralField> {
        if self.dim() != 2 {
            return Err(Error::InvalidArgument("scalar vorticity needs a 2-D field".into()));
        }
        Ok(&self.components[1].derivative(0)? - &self.components[0].derivative(1)?)
    }

    pub fn scale(&self, s: f64) -> Self {
        VectorField { components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn axpy(&mut self, s: f64, other: &VectorField) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(s, b);
        }
    }

    pub fn dealiased(&self) -> Self {
        VectorField { components: self.components.iter().map(|c| c.dealiased()).collect() }
    }

    pub fn band(&self) -> usize {
        self.components.iter().map(|c| c.band()).max().unwrap_or(0)
    }

    pub fn rms(&self) -> f64 {
        self.components.iter().map(|c| c.power()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn max_coeff(&self) -> f64 {
        self.components.iter().map(|c| c.max_coeff()).fold(0.0, f64::max)
    }

    /// Drops coefficients below `rel` times the largest coefficient of any component.
    pub fn chopped(&self, rel: f64) -> Self {
        let tol = rel * self.max_coeff();
        VectorField { components: self.components.iter().map(|c| c.chopped(tol)).collect() }
    }

    pub fn random_band_limited(grid: &TorusGrid, band: usize, rng: &mut impl Rng) -> Self {
        VectorField {
            components: (0..grid.dim).map(|_| SpectralField::random_band_limited(grid, band, rng)).collect(),
        }
    }
}

impl Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField { components: self.components.iter().zip(&rhs.components).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &VectorField {
    type Output = VectorField;
    fn sub(self, rhs: &VectorField) -> VectorField {
        VectorField { components: self.components.iter().zip(&rhs.components).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField { components: self.components.iter().map(|c| -c).collect() }
    }
}
