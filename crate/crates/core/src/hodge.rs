//! Weighted Helmholtz–Hodge decomposition `X = P_V X + grad p` with
//! `div(V P_V X) = 0`.
//!
//! The weighted operator `p -> div(V grad p)` is discretized by Galerkin
//! projection onto the non-Nyquist modes of the grid: products with `V` are
//! evaluated alias-free and projected back before differentiating. On
//! zero-mean fields it is symmetric negative definite, so variable weights
//! are handled by preconditioned conjugate gradients with the inverse
//! Laplacian at the mean weight as preconditioner. Constant weights reduce
//! to a single spectral division, i.e. the classical Leray projector.

use crate::error::{Error, Result};
use crate::spectral::{Band, Collocation, SpectralField, TorusGrid, VectorField};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Background coefficients below this fraction of the largest one are
/// treated as sampling noise and dropped.
pub const ROUNDOFF: f64 = 1e-14;

/// Immutable weight data and solver settings for weighted projections.
#[derive(Clone, Debug)]
pub struct ProjectionWorkspace {
    grid: TorusGrid,
    weight: SpectralField,
    mean_weight: f64,
    constant: bool,
    tolerance: f64,
    max_iterations: usize,
    col: Collocation,
    weight_values: Vec<f64>,
}

impl ProjectionWorkspace {
    pub fn new(weight: SpectralField, tolerance: f64, max_iterations: usize) -> Result<Self> {
        if !(tolerance >= 1e-14 && tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!("solver tolerance must be >= 1e-14, got {tolerance:e}")));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidArgument("max iterations must be positive".into()));
        }
        let min = weight.to_values().into_iter().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight must be positive at every collocation point, minimum is {min:e}"
            )));
        }
        let weight = weight.chopped(ROUNDOFF * weight.max_coeff());
        let grid = *weight.grid();
        let col = Collocation::for_content(&grid, weight.band() + grid.full_cutoff(), Band::Full);
        let weight_values = col.values(&weight);
        Ok(ProjectionWorkspace {
            grid,
            mean_weight: weight.mean(),
            constant: weight.is_constant(),
            weight,
            tolerance,
            max_iterations,
            col,
            weight_values,
        })
    }

    /// Constant weight with default solver settings.
    pub fn uniform(grid: &TorusGrid, value: f64) -> Result<Self> {
        Self::new(SpectralField::constant(grid, value), DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn weight(&self) -> &SpectralField {
        &self.weight
    }

    pub fn mean_weight(&self) -> f64 {
        self.mean_weight
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    /// `V g` projected onto the non-Nyquist modes.
    fn weighted(&self, g: &SpectralField) -> SpectralField {
        if self.constant {
            return g.scale(self.mean_weight);
        }
        let mut v = self.col.values(g);
        for (x, w) in v.iter_mut().zip(&self.weight_values) {
            *x *= w;
        }
        self.col.to_field(v, Band::Full)
    }

    /// `div(V X)`.
    pub fn weighted_divergence(&self, x: &VectorField) -> Result<SpectralField> {
        self.grid.check_same(x.grid())?;
        let mut out = SpectralField::zeros(&self.grid);
        for (axis, c) in x.components().iter().enumerate() {
            out += &self.weighted(c).derivative(axis)?;
        }
        Ok(out)
    }

    /// `div(V grad p)`.
    pub fn apply_operator(&self, p: &SpectralField) -> Result<SpectralField> {
        self.weighted_divergence(&p.gradient())
    }

    fn precondition(&self, r: &SpectralField) -> SpectralField {
        let v = self.mean_weight;
        r.apply_symbol(|k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                0.0
            } else {
                -1.0 / (v * k2)
            }
        })
    }
}

/// Solves `div(V grad p) = rhs` for zero-mean `p`.
pub fn solve_weighted_poisson(rhs: &SpectralField, ws: &ProjectionWorkspace) -> Result<SpectralField> {
    ws.grid.check_same(rhs.grid())?;
    let scale = rhs.rms();
    if rhs.mean().abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "solvability requires zero mean, rhs mean is {:e}",
            rhs.mean()
        )));
    }
    let mut b = rhs.clone();
    b.coefficients_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
    if ws.constant {
        return Ok(ws.precondition(&b));
    }
    let bnorm = b.dot(&b).sqrt();
    if bnorm == 0.0 {
        return Ok(SpectralField::zeros(&ws.grid));
    }
    // CG on the positive definite operator -div(V grad .)
    let mut x = SpectralField::zeros(&ws.grid);
    let mut r = b.clone();
    let mut z = ws.precondition(&r);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    let mut res = 1.0;
    for _ in 0..ws.max_iterations {
        let ap = ws.apply_operator(&p)?;
        let pap = p.dot(&ap);
        if !(pap.is_finite() && pap != 0.0) {
            return Err(Error::Numerical(format!("breakdown in weighted Poisson solve (p.Ap = {pap:e})")));
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        res = r.dot(&r).sqrt() / bnorm;
        if res <= ws.tolerance {
            return Ok(x);
        }
        z = ws.precondition(&r);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = &z + &p.scale(beta);
    }
    Err(Error::SolverDiverged { iterations: ws.max_iterations, residual: res })
}

/// `X - grad p` with `div(V (X - grad p)) = 0`.
pub fn weighted_leray_project(x: &VectorField, ws: &ProjectionWorkspace) -> Result<VectorField> {
    let div = ws.weighted_divergence(x)?;
    let p = solve_weighted_poisson(&div, ws)?;
    Ok(x - &p.gradient())
}
