//! Gauge data of a trivialized principal bundle over a torus: the structure
//! algebra with its fiber metric, the potential `A`, the curvature and the
//! weight `V`.
//!
//! In a global trivialization an equivariant charge `f` is a `g`-valued
//! function on the base. The horizontal lift of a base field `X` annihilates
//! `theta`, so along it `f(gamma(t))` changes by the ordinary derivative plus
//! the infinitesimal gauge rotation carried by `A`:
//! `X^*(f) = X(f) + [A(X), f]`. That is [`covariant_derivative`].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hodge::{ProjectionWorkspace, ROUNDOFF};
use crate::spectral::{Band, Collocation, SpectralField, TorusGrid, VectorField};

const STRUCTURE_TOL: f64 = 1e-12;

/// Finite-dimensional Lie algebra with a constant inner product.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec {
    dim: usize,
    structure: Vec<f64>,
    metric: Vec<f64>,
    metric_inv: Vec<f64>,
    ad_invariant: bool,
    // nonzero c_ab^c with a < b
    terms: Vec<(usize, usize, usize, f64)>,
}

impl LieAlgebraSpec {
    /// `structure[(a*m + b)*m + c] = c_ab^c`, `inner_product` row-major `m x m`.
    pub fn new(dim: usize, structure: Vec<f64>, inner_product: Vec<f64>, ad_invariant: bool) -> Result<Self> {
        let m = dim;
        if m == 0 {
            return Err(Error::InvalidArgument("Lie algebra dimension must be positive".into()));
        }
        if structure.len() != m * m * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} structure constants, got {}",
                m * m * m,
                structure.len()
            )));
        }
        if inner_product.len() != m * m {
            return Err(Error::InvalidArgument(format!(
                "expected {} inner product entries, got {}",
                m * m,
                inner_product.len()
            )));
        }
        let c = |a: usize, b: usize, e: usize| structure[(a * m + b) * m + e];
        for a in 0..m {
            for b in 0..m {
                for e in 0..m {
                    if (c(a, b, e) + c(b, a, e)).abs() > STRUCTURE_TOL {
                        return Err(Error::InvalidArgument(format!(
                            "structure constants not antisymmetric at ({a},{b},{e})"
                        )));
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for cc in 0..m {
                    for d in 0..m {
                        let s: f64 = (0..m)
                            .map(|e| c(a, b, e) * c(e, cc, d) + c(b, cc, e) * c(e, a, d) + c(cc, a, e) * c(e, b, d))
                            .sum();
                        if s.abs() > STRUCTURE_TOL {
                            return Err(Error::InvalidArgument(format!(
                                "structure constants violate the Jacobi identity by {s:e}"
                            )));
                        }
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..a {
                if (inner_product[a * m + b] - inner_product[b * m + a]).abs() > STRUCTURE_TOL {
                    return Err(Error::InvalidArgument("inner product is not symmetric".into()));
                }
            }
        }
        let h = DMatrix::from_row_slice(m, m, &inner_product);
        let chol = h
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("inner product is not positive definite".into()))?;
        let inv = chol.inverse();
        let metric_inv: Vec<f64> = (0..m * m).map(|i| inv[(i / m, i % m)]).collect();
        if ad_invariant {
            // h([e_a,e_b],e_c) + h(e_b,[e_a,e_c]) = 0
            for a in 0..m {
                for b in 0..m {
                    for cc in 0..m {
                        let s: f64 = (0..m)
                            .map(|e| c(a, b, e) * inner_product[e * m + cc] + c(a, cc, e) * inner_product[b * m + e])
                            .sum();
                        if s.abs() > STRUCTURE_TOL {
                            return Err(Error::InvalidArgument(format!(
                                "inner product is not Ad-invariant (defect {s:e})"
                            )));
                        }
                    }
                }
            }
        }
        let mut terms = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                for e in 0..m {
                    if c(a, b, e) != 0.0 {
                        terms.push((a, b, e, c(a, b, e)));
                    }
                }
            }
        }
        Ok(LieAlgebraSpec { dim: m, structure, metric: inner_product, metric_inv, ad_invariant, terms })
    }

    /// The one-dimensional abelian algebra `u(1)` with unit metric.
    pub fn abelian() -> Self {
        Self::new(1, vec![0.0], vec![1.0], true).expect("u(1) is valid")
    }

    /// `su(2)` in the basis with `[e_1, e_2] = e_3` cyclic, identity metric.
    pub fn su2() -> Self {
        Self::su2_with_metric(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], true).expect("su(2) is valid")
    }

    pub fn su2_with_metric(inner_product: Vec<f64>, ad_invariant: bool) -> Result<Self> {
        let mut c = vec![0.0; 27];
        for (a, b, e) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(a * 3 + b) * 3 + e] = 1.0;
            c[(b * 3 + a) * 3 + e] = -1.0;
        }
        Self::new(3, c, inner_product, ad_invariant)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        self.structure[(a * self.dim + b) * self.dim + c]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure
    }

    /// Row-major `h_ab`.
    pub fn inner_product(&self) -> &[f64] {
        &self.metric
    }

    pub fn inverse_inner_product(&self) -> &[f64] {
        &self.metric_inv
    }

    pub fn is_ad_invariant(&self) -> bool {
        self.ad_invariant
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn metric_is_identity(&self) -> bool {
        let m = self.dim;
        (0..m * m).all(|i| self.metric[i] == if i / m == i % m { 1.0 } else { 0.0 })
    }

    /// Bracket of two algebra vectors.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(a, b, e, v) in &self.terms {
            out[e] += v * (x[a] * y[b] - x[b] * y[a]);
        }
        out
    }

    /// Pointwise `out += [x, y]` on collocation samples indexed `[component][point]`.
    pub(crate) fn add_bracket_values(&self, out: &mut [Vec<f64>], x: &[Vec<f64>], y: &[Vec<f64>]) {
        for &(a, b, e, v) in &self.terms {
            let (xa, xb, ya, yb) = (&x[a], &x[b], &y[a], &y[b]);
            for (p, o) in out[e].iter_mut().enumerate() {
                *o += v * (xa[p] * yb[p] - xb[p] * ya[p]);
            }
        }
    }

    /// Pointwise `out += s * ad^*(x) xi`, with `(ad^*(x) xi)_b = -sum c_ab^c x_a xi_c`.
    pub(crate) fn add_coadjoint_values(&self, out: &mut [Vec<f64>], s: f64, x: &[Vec<f64>], xi: &[Vec<f64>]) {
        for &(a, b, e, v) in &self.terms {
            // c_ab^e = v and c_ba^e = -v
            let w = -s * v;
            for p in 0..out[b].len() {
                out[b][p] += w * x[a][p] * xi[e][p];
            }
            for p in 0..out[a].len() {
                out[a][p] -= w * x[b][p] * xi[e][p];
            }
        }
    }
}

/// A `g`-valued field: one scalar field per basis direction.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeField {
    components: Vec<SpectralField>,
}

impl GaugeField {
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("gauge field needs components".into()))?;
        for c in &components[1..] {
            first.grid().check_same(c.grid())?;
        }
        Ok(GaugeField { components })
    }

    pub fn zeros(grid: &TorusGrid, m: usize) -> Self {
        GaugeField { components: vec![SpectralField::zeros(grid); m] }
    }

    pub fn constant(grid: &TorusGrid, value: &[f64]) -> Self {
        GaugeField { components: value.iter().map(|&v| SpectralField::constant(grid, v)).collect() }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    /// Number of algebra components.
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &SpectralField {
        &self.components[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut SpectralField {
        &mut self.components[a]
    }

    pub fn derivative(&self, axis: usize) -> Result<GaugeField> {
        Ok(GaugeField { components: self.components.iter().map(|c| c.derivative(axis)).collect::<Result<_>>()? })
    }

    /// Pointwise `M f` for a constant row-major `m x m` matrix.
    pub fn apply_matrix(&self, matrix: &[f64]) -> GaugeField {
        let m = self.dim();
        let grid = *self.grid();
        let components = (0..m)
            .map(|a| {
                let mut out = SpectralField::zeros(&grid);
                for b in 0..m {
                    let w = matrix[a * m + b];
                    if w != 0.0 {
                        out.axpy(w, &self.components[b]);
                    }
                }
                out
            })
            .collect();
        GaugeField { components }
    }

    pub fn scale(&self, s: f64) -> GaugeField {
        GaugeField { components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn axpy(&mut self, s: f64, other: &GaugeField) {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.axpy(s, b);
        }
    }

    pub fn dealiased(&self) -> GaugeField {
        GaugeField { components: self.components.iter().map(|c| c.dealiased()).collect() }
    }

    pub fn band(&self) -> usize {
        self.components.iter().map(|c| c.band()).max().unwrap_or(0)
    }

    pub fn rms(&self) -> f64 {
        self.components.iter().map(|c| c.power()).sum::<f64>().sqrt()
    }

    pub fn max_coeff(&self) -> f64 {
        self.components.iter().map(|c| c.max_coeff()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_coeff() == 0.0
    }

    pub(crate) fn values(&self, col: &Collocation) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| col.values(c)).collect()
    }

    pub(crate) fn from_values(col: &Collocation, values: Vec<Vec<f64>>, keep: Band) -> GaugeField {
        GaugeField { components: values.into_iter().map(|v| col.to_field(v, keep)).collect() }
    }

    pub fn random_band_limited(grid: &TorusGrid, m: usize, band: usize, rng: &mut impl rand::Rng) -> Self {
        GaugeField { components: (0..m).map(|_| SpectralField::random_band_limited(grid, band, rng)).collect() }
    }
}

impl std::ops::Add for &GaugeField {
    type Output = GaugeField;
    fn add(self, rhs: &GaugeField) -> GaugeField {
        GaugeField { components: self.components.iter().zip(&rhs.components).map(|(a, b)| a + b).collect() }
    }
}

impl std::ops::Sub for &GaugeField {
    type Output = GaugeField;
    fn sub(self, rhs: &GaugeField) -> GaugeField {
        GaugeField { components: self.components.iter().zip(&rhs.components).map(|(a, b)| a - b).collect() }
    }
}

impl std::ops::Neg for &GaugeField {
    type Output = GaugeField;
    fn neg(self) -> GaugeField {
        GaugeField { components: self.components.iter().map(|c| -c).collect() }
    }
}

/// Local connection coefficients `A_i`, one gauge field per base direction.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential {
    a: Vec<GaugeField>,
}

impl GaugePotential {
    pub fn new(a: Vec<GaugeField>) -> Result<Self> {
        let first = a.first().ok_or_else(|| Error::InvalidArgument("potential needs components".into()))?;
        let grid = *first.grid();
        if a.len() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "potential has {} components on a {}-dimensional grid",
                a.len(),
                grid.dim()
            )));
        }
        for ai in &a {
            grid.check_same(ai.grid())?;
            if ai.dim() != first.dim() {
                return Err(Error::InvalidArgument("potential components disagree on algebra dimension".into()));
            }
        }
        Ok(GaugePotential { a })
    }

    pub fn zeros(grid: &TorusGrid, m: usize) -> Self {
        GaugePotential { a: vec![GaugeField::zeros(grid, m); grid.dim()] }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.a[0].grid()
    }

    pub fn algebra_dim(&self) -> usize {
        self.a[0].dim()
    }

    pub fn component(&self, i: usize) -> &GaugeField {
        &self.a[i]
    }

    pub fn components(&self) -> &[GaugeField] {
        &self.a
    }

    pub fn band(&self) -> usize {
        self.a.iter().map(|f| f.band()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|f| f.is_zero())
    }

    /// Drops coefficients below `rel` times the largest coefficient.
    pub fn chopped(&self, rel: f64) -> Self {
        let tol = rel * self.a.iter().map(|f| f.max_coeff()).fold(0.0, f64::max);
        let a = self
            .a
            .iter()
            .map(|f| GaugeField { components: f.components.iter().map(|c| c.chopped(tol)).collect() })
            .collect();
        GaugePotential { a }
    }
}

/// Antisymmetric `Omega_ij`, stored for `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    dim: usize,
    upper: Vec<GaugeField>,
}

fn pair_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    match (dim, i, j) {
        (2, 0, 1) => 0,
        (3, 0, 1) => 0,
        (3, 0, 2) => 1,
        (3, 1, 2) => 2,
        _ => unreachable!("pair ({i},{j}) in dimension {dim}"),
    }
}

impl Curvature {
    pub fn zeros(grid: &TorusGrid, m: usize) -> Self {
        let d = grid.dim();
        Curvature { dim: d, upper: vec![GaugeField::zeros(grid, m); d * (d - 1) / 2] }
    }

    /// `Omega_ij` for `i < j`.
    pub fn upper(&self, i: usize, j: usize) -> &GaugeField {
        &self.upper[pair_index(self.dim, i, j)]
    }

    /// `Omega_ij` for any pair.
    pub fn get(&self, i: usize, j: usize) -> GaugeField {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.upper(i, j).clone(),
            std::cmp::Ordering::Greater => -self.upper(j, i),
            std::cmp::Ordering::Equal => GaugeField::zeros(self.upper[0].grid(), self.upper[0].dim()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.upper[0].dim()
    }

    pub fn band(&self) -> usize {
        self.upper.iter().map(|f| f.band()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|f| f.is_zero())
    }
}

/// `Omega_ij = d_i A_j - d_j A_i + [A_i, A_j]`, commutator truncated to the 2/3 band.
pub fn curvature_from_potential(a: &GaugePotential, alg: &LieAlgebraSpec) -> Result<Curvature> {
    if a.algebra_dim() != alg.dim() {
        return Err(Error::InvalidArgument(format!(
            "potential has {} algebra components, algebra has dimension {}",
            a.algebra_dim(),
            alg.dim()
        )));
    }
    let grid = *a.grid();
    let d = grid.dim();
    let col = (!alg.is_abelian()).then(|| Collocation::for_content(&grid, 2 * a.band(), Band::Dealiased));
    let vals: Option<Vec<Vec<Vec<f64>>>> = col.as_ref().map(|c| a.a.iter().map(|ai| ai.values(c)).collect());
    let mut upper = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut om = &a.a[j].derivative(i)? - &a.a[i].derivative(j)?;
            if let (Some(col), Some(vals)) = (&col, &vals) {
                let mut br = vec![vec![0.0; col.len()]; alg.dim()];
                alg.add_bracket_values(&mut br, &vals[i], &vals[j]);
                om = &om + &GaugeField::from_values(col, br, Band::Dealiased);
            }
            upper.push(om);
        }
    }
    Ok(Curvature { dim: d, upper })
}

/// Abelian curvature on `T^3` from a magnetic field: `Omega_ij = -eps_ijk B_k`,
/// so that `sum_j X_j Omega_ji = (X x B)_i`.
pub fn curvature_from_magnetic(b: &VectorField) -> Result<Curvature> {
    let grid = *b.grid();
    if grid.dim() != 3 {
        return Err(Error::InvalidArgument("a magnetic field needs a 3-D grid".into()));
    }
    let div = b.divergence();
    let scale = b.components().iter().map(|c| c.max_coeff()).fold(0.0, f64::max) * grid.wavenumber_scale();
    if div.max_coeff() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument("magnetic field must be divergence-free".into()));
    }
    let g = |f: SpectralField| GaugeField { components: vec![f] };
    let c = b.components();
    Ok(Curvature { dim: 3, upper: vec![g(-&c[2]), g(c[1].clone()), g(-&c[0])] })
}

/// Pointwise `out += (sum_i X_i d_i f) + [A(X), f]` on collocation samples.
pub(crate) fn add_covariant_values(
    out: &mut [Vec<f64>],
    x: &[Vec<f64>],
    df: &[Vec<Vec<f64>>],
    f: &[Vec<f64>],
    a: Option<&[Vec<Vec<f64>>]>,
    alg: &LieAlgebraSpec,
) {
    for (i, xi) in x.iter().enumerate() {
        for (o, dfa) in out.iter_mut().zip(&df[i]) {
            for p in 0..o.len() {
                o[p] += xi[p] * dfa[p];
            }
        }
    }
    if let Some(a) = a {
        if alg.is_abelian() {
            return;
        }
        let n = x[0].len();
        let ax: Vec<Vec<f64>> = (0..alg.dim())
            .map(|c| (0..n).map(|p| x.iter().zip(a).map(|(xi, ai)| xi[p] * ai[c][p]).sum()).collect())
            .collect();
        alg.add_bracket_values(out, &ax, f);
    }
}

/// `X(f) + [A(X), f]` truncated to the 2/3 band; `None` means `A = 0`.
pub fn covariant_derivative(
    x: &VectorField,
    f: &GaugeField,
    a: Option<&GaugePotential>,
    alg: &LieAlgebraSpec,
) -> Result<GaugeField> {
    let grid = *x.grid();
    grid.check_same(f.grid())?;
    if f.dim() != alg.dim() {
        return Err(Error::InvalidArgument("gauge field and algebra dimensions differ".into()));
    }
    let mut content = x.band() + f.band();
    if let Some(a) = a {
        grid.check_same(a.grid())?;
        content += a.band();
    }
    let col = Collocation::for_content(&grid, content, Band::Dealiased);
    let xv: Vec<Vec<f64>> = x.components().iter().map(|c| col.values(c)).collect();
    let df: Vec<Vec<Vec<f64>>> =
        (0..grid.dim()).map(|i| Ok(f.derivative(i)?.values(&col))).collect::<Result<_>>()?;
    let fv = f.values(&col);
    let av: Option<Vec<Vec<Vec<f64>>>> = a.map(|a| a.a.iter().map(|ai| ai.values(&col)).collect());
    let mut out = vec![vec![0.0; col.len()]; f.dim()];
    add_covariant_values(&mut out, &xv, &df, &fv, av.as_deref(), alg);
    Ok(GaugeField::from_values(&col, out, Band::Dealiased))
}

/// Everything the algebra and dynamics need to know about the bundle.
#[derive(Clone, Debug)]
pub struct GaugeGeometry {
    algebra: LieAlgebraSpec,
    potential: Option<GaugePotential>,
    curvature: Curvature,
    workspace: ProjectionWorkspace,
}

impl GaugeGeometry {
    /// Geometry from a potential; `None` is the trivial connection.
    pub fn new(
        algebra: LieAlgebraSpec,
        potential: Option<GaugePotential>,
        workspace: ProjectionWorkspace,
    ) -> Result<Self> {
        let grid = *workspace.grid();
        let mut potential = potential;
        let curvature = match &mut potential {
            Some(a) => {
                grid.check_same(a.grid())?;
                *a = a.chopped(ROUNDOFF);
                curvature_from_potential(a, &algebra)?
            }
            None => Curvature::zeros(&grid, algebra.dim()),
        };
        let potential = potential.filter(|a| !a.is_zero());
        Ok(GaugeGeometry { algebra, potential, curvature, workspace })
    }

    /// Abelian geometry on `T^3` given by its magnetic field.
    pub fn with_magnetic_field(b: &VectorField, workspace: ProjectionWorkspace) -> Result<Self> {
        workspace.grid().check_same(b.grid())?;
        Ok(GaugeGeometry {
            algebra: LieAlgebraSpec::abelian(),
            potential: None,
            curvature: curvature_from_magnetic(&b.chopped(ROUNDOFF))?,
            workspace,
        })
    }

    /// Trivial connection with unit weight.
    pub fn trivial(grid: &TorusGrid, algebra: LieAlgebraSpec) -> Result<Self> {
        Self::new(algebra, None, ProjectionWorkspace::uniform(grid, 1.0)?)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.workspace.grid()
    }

    pub fn algebra(&self) -> &LieAlgebraSpec {
        &self.algebra
    }

    pub fn potential(&self) -> Option<&GaugePotential> {
        self.potential.as_ref()
    }

    pub fn curvature(&self) -> &Curvature {
        &self.curvature
    }

    pub fn workspace(&self) -> &ProjectionWorkspace {
        &self.workspace
    }

    pub fn weight(&self) -> &SpectralField {
        self.workspace.weight()
    }
}
