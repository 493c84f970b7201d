//! The Hopf fibration `S^1 -> S^3 -> S^2` as a concrete bundle for checking
//! the fiber-volume and integration formulas numerically.
//!
//! `S^3` sits in `C^2` with the round metric and the Hopf map is
//! `pi(z1, z2) = (2 z1 conj(z2), |z1|^2 - |z2|^2)` onto the unit sphere. The
//! round submersion metric on the base is that of the sphere of radius 1/2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Highest spherical-harmonic degree accepted by [`SphericalFunction`].
pub const MAX_DEGREE: usize = 8;

/// Quadrature and sampling settings for the Hopf checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfSampler {
    /// Gauss–Legendre order in `cos(theta)` on the base; the azimuth uses twice as many points.
    pub quadrature_order: usize,
    /// Total number of quasi-random points on `S^3`.
    pub samples: usize,
    /// Independent randomly shifted replicates used for the error estimate.
    pub replicates: usize,
    pub seed: u64,
}

impl Default for HopfSampler {
    fn default() -> Self {
        HopfSampler { quadrature_order: 16, samples: 1_000_000, replicates: 32, seed: 20_240_601 }
    }
}

impl HopfSampler {
    pub fn validate(&self) -> Result<()> {
        if self.quadrature_order < 8 {
            return Err(Error::InvalidArgument(format!(
                "quadrature order must be at least 8, got {}",
                self.quadrature_order
            )));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidArgument("at least two replicates are needed for an error estimate".into()));
        }
        if self.samples < self.replicates {
            return Err(Error::InvalidArgument(format!(
                "{} samples cannot fill {} replicates",
                self.samples, self.replicates
            )));
        }
        Ok(())
    }
}

/// Real function on the unit sphere given by real orthonormal spherical
/// harmonic coefficients, indexed `l*l + l + m` for `-l <= m <= l`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalFunction {
    degree: usize,
    coeffs: Vec<f64>,
}

impl SphericalFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let degree = (coeffs.len() as f64).sqrt() as usize;
        if degree * degree != coeffs.len() || degree == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not fill degrees 0..=l",
                coeffs.len()
            )));
        }
        if degree - 1 > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("degree {} exceeds {MAX_DEGREE}", degree - 1)));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(SphericalFunction { degree: degree - 1, coeffs })
    }

    pub fn constant(c: f64) -> Self {
        SphericalFunction { degree: 0, coeffs: vec![c * (4.0 * PI).sqrt()] }
    }

    /// Coefficients of `func` up to `degree`, by Gauss–Legendre projection.
    pub fn project(degree: usize, func: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let rule = SphereRule::new(MAX_DEGREE + 8);
        let mut coeffs = vec![0.0; (degree + 1) * (degree + 1)];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let y = real_harmonics(degree, *p);
            let fv = func(*p);
            for (c, yi) in coeffs.iter_mut().zip(&y) {
                *c += w * fv * yi;
            }
        }
        for c in coeffs.iter_mut() {
            if c.abs() < 1e-14 {
                *c = 0.0;
            }
        }
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at a point of the unit sphere.
    pub fn eval(&self, p: [f64; 3]) -> f64 {
        real_harmonics(self.degree, p).iter().zip(&self.coeffs).map(|(y, c)| y * c).sum()
    }
}

/// Real orthonormal spherical harmonics (no Condon–Shortley phase) up to `degree`.
pub fn real_harmonics(degree: usize, p: [f64; 3]) -> Vec<f64> {
    let [x, y, z] = p;
    let l_max = degree;
    let mut out = vec![0.0; (l_max + 1) * (l_max + 1)];
    // (x + iy)^m carries the azimuthal factor times sin(theta)^m
    let xy = Complex64::new(x, y);
    let mut pow = Complex64::new(1.0, 0.0);
    // q_mm = (2m-1)!!; P_l^m = sin^m(theta) q_lm(z)
    let mut q_mm = 1.0;
    for m in 0..=l_max {
        if m > 0 {
            pow *= xy;
            q_mm *= (2 * m - 1) as f64;
        }
        let mut q_prev = 0.0;
        let mut q = q_mm;
        for l in m..=l_max {
            if l > m {
                let next = if l == m + 1 {
                    z * (2 * m + 1) as f64 * q_mm
                } else {
                    ((2 * l - 1) as f64 * z * q - (l + m - 1) as f64 * q_prev) / (l - m) as f64
                };
                q_prev = q;
                q = next;
            }
            let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio_factorial(l - m, l + m)).sqrt();
            let base = l * l + l;
            if m == 0 {
                out[base] = norm * q;
            } else {
                let s = std::f64::consts::SQRT_2 * norm * q;
                out[base + m] = s * pow.re;
                out[base - m] = s * pow.im;
            }
        }
    }
    out
}

/// `a! / b!` for `a <= b`.
fn ratio_factorial(a: usize, b: usize) -> f64 {
    ((a + 1)..=b).fold(1.0, |acc, k| acc / k as f64)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos(theta)`, uniform azimuth.
struct SphereRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereRule {
    fn new(order: usize) -> Self {
        let (nodes, gw) = gauss_legendre(order);
        let naz = 2 * order;
        let mut points = Vec::with_capacity(order * naz);
        let mut weights = Vec::with_capacity(order * naz);
        for (z, w) in nodes.iter().zip(&gw) {
            let s = (1.0 - z * z).sqrt();
            for j in 0..naz {
                let phi = 2.0 * PI * j as f64 / naz as f64;
                points.push([s * phi.cos(), s * phi.sin(), *z]);
                weights.push(w * 2.0 * PI / naz as f64);
            }
        }
        SphereRule { points, weights }
    }

    fn integrate(&self, f: impl Fn([f64; 3]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}

/// The Hopf projection.
pub fn hopf_map(z1: Complex64, z2: Complex64) -> [f64; 3] {
    let w = 2.0 * z1 * z2.conj();
    [w.re, w.im, z1.norm_sqr() - z2.norm_sqr()]
}

/// A point of the fiber over `(theta, phi)` on the unit sphere.
pub fn hopf_lift(theta: f64, phi: f64) -> (Complex64, Complex64) {
    (Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), -phi))
}

/// Length of the fiber through `(z1, z2)`: trapezoid rule on the speed of
/// `t -> (z1 e^{it}, z2 e^{it})` over one period.
pub fn fiber_length(z1: Complex64, z2: Complex64, segments: usize) -> f64 {
    let h = 2.0 * PI / segments as f64;
    (0..segments)
        .map(|k| {
            let e = Complex64::from_polar(1.0, k as f64 * h);
            let i = Complex64::i();
            let v1 = i * z1 * e;
            let v2 = i * z2 * e;
            (v1.norm_sqr() + v2.norm_sqr()).sqrt()
        })
        .sum::<f64>()
        * h
}

/// Volume of the fiber over `(theta, phi)`.
pub fn hopf_orbit_volume_at(theta: f64, phi: f64) -> f64 {
    let (z1, z2) = hopf_lift(theta, phi);
    fiber_length(z1, z2, 256)
}

/// Fiber volume over the north pole.
pub fn hopf_orbit_volume() -> f64 {
    hopf_orbit_volume_at(0.0, 0.0)
}

/// Both sides of the bundle integration formula for one test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfCheck {
    /// Quasi-Monte-Carlo estimate of the integral of `f o pi` over `S^3`.
    pub lhs: f64,
    /// Quadrature of `f V` over the base sphere of radius 1/2.
    pub rhs: f64,
    /// Standard error of `lhs` over the shifted replicates.
    pub std_error: f64,
}

impl HopfCheck {
    pub fn difference(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// Within three standard errors, with a floor at rounding level for
    /// integrands the sampler resolves exactly.
    pub fn passed(&self) -> bool {
        let floor = 1e-12 * self.lhs.abs().max(self.rhs.abs()).max(1.0);
        self.difference() <= 3.0 * self.std_error + floor
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

/// Integral of `f o pi` over the round unit `S^3`, with its standard error.
pub fn s3_integral(f: impl Fn([f64; 3]) -> f64, sampler: &HopfSampler) -> Result<(f64, f64)> {
    sampler.validate()?;
    let per = sampler.samples / sampler.replicates;
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let total = 2.0 * PI * PI;
    let mut means = Vec::with_capacity(sampler.replicates);
    for _ in 0..sampler.replicates {
        let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
        let mut sum = 0.0;
        for i in 1..=per as u64 {
            let u = (radical_inverse(i, 2) + shift[0]).fract();
            let v = (radical_inverse(i, 3) + shift[1]).fract();
            let w = (radical_inverse(i, 5) + shift[2]).fract();
            // uniform on S^3 in Hopf coordinates: sin^2(eta) is uniform
            let eta = u.sqrt().asin();
            let z1 = Complex64::from_polar(eta.cos(), 2.0 * PI * v);
            let z2 = Complex64::from_polar(eta.sin(), 2.0 * PI * w);
            sum += f(hopf_map(z1, z2));
        }
        means.push(total * sum / per as f64);
    }
    let r = means.len() as f64;
    let mean = means.iter().sum::<f64>() / r;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (r - 1.0);
    Ok((mean, (var / r).sqrt()))
}

/// Compares the integral of `f o pi` over `S^3` with `V` times the integral
/// of `f` over the base sphere of radius 1/2.
pub fn hopf_integration_check(f: &SphericalFunction, sampler: &HopfSampler) -> Result<HopfCheck> {
    let (lhs, std_error) = s3_integral(|p| f.eval(p), sampler)?;
    let rule = SphereRule::new(sampler.quadrature_order);
    // area element of the radius-1/2 sphere is 1/4 of the unit one
    let rhs = hopf_orbit_volume() * 0.25 * rule.integrate(|p| f.eval(p));
    Ok(HopfCheck { lhs, rhs, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn harmonics_are_orthonormal() {
        let rule = SphereRule::new(16);
        let n = (MAX_DEGREE + 1) * (MAX_DEGREE + 1);
        let ys: Vec<Vec<f64>> = rule.points.iter().map(|p| real_harmonics(MAX_DEGREE, *p)).collect();
        for i in 0..n {
            for j in 0..n {
                let g: f64 = ys.iter().zip(&rule.weights).map(|(y, w)| w * y[i] * y[j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() < 1e-12, "({i},{j}) -> {g}");
            }
        }
    }

    #[test]
    fn projection_of_z() {
        let f = SphericalFunction::project(2, |p| p[2]).unwrap();
        assert!((f.coefficients()[2] - (4.0 * PI / 3.0).sqrt()).abs() < 1e-14);
        assert!((f.eval([0.0, 0.6, 0.8]) - 0.8).abs() < 1e-14);
    }

    #[test]
    fn coefficient_count_validated() {
        assert!(SphericalFunction::new(vec![1.0, 2.0]).is_err());
        assert!(SphericalFunction::new(vec![0.0; 100]).is_err());
    }

    #[test]
    fn lift_lands_on_base_point() {
        let (theta, phi) = (1.1, -2.3);
        let (z1, z2) = hopf_lift(theta, phi);
        let p = hopf_map(z1, z2);
        let want = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        for a in 0..3 {
            assert!((p[a] - want[a]).abs() < 1e-15);
        }
    }

    #[test]
    fn orbit_volume_is_two_pi() {
        assert!((hopf_orbit_volume() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sampler_validation() {
        let s = HopfSampler { quadrature_order: 4, ..Default::default() };
        assert!(s.validate().is_err());
        let s = HopfSampler { samples: 1, ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn small_check_constant() {
        let s = HopfSampler { samples: 4096, ..Default::default() };
        let c = hopf_integration_check(&SphericalFunction::constant(1.0), &s).unwrap();
        assert!((c.rhs - 2.0 * PI * PI).abs() < 1e-12);
        assert!(c.passed());
    }
}
