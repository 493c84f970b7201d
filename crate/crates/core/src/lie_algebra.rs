//! The Lie algebra of weighted-volume-preserving base fields plus
//! equivariant charges, its regular dual, and the coadjoint operator.
//!
//! Sign convention: [`bracket`] is the opposite of the usual vector-field
//! bracket, and the adjoint action is `ad(u)v := bracket(u, v)`. The
//! coadjoint operator satisfies
//! `pairing(coadjoint(u, d), v) = -pairing(d, bracket(u, v))`.
//!
//! In coordinates, with `D` the covariant derivative of the trivialization,
//!
//! ```text
//! bracket((Z,f),(Z',f')) = -([Z,Z'], [f,f'] + D_Z f' - D_Z' f + Omega(Z,Z'))
//! coadjoint((X,f),(a,xi)) = (P_V[-L_X a - (xi,Df)~ + (xi,i_X Omega)~],
//!                            -ad*(f)xi - D_X xi)
//! ```
//!
//! where `(ad*(f)xi)_b = -sum c_ab^c f_a xi_c`, `D_X xi = X(xi) + ad*(A(X))xi`,
//! `(xi,Df)~_i = sum_a xi_a (D_i f)_a` and `(xi,i_X Omega)~_i = sum_j X_j (xi, Omega_ji)`.
//! Every nonlinear term is evaluated on one alias-free grid and truncated to
//! the 2/3 band once.

use crate::error::{Error, Result};
use crate::geometry::{add_covariant_values, GaugeField, GaugeGeometry, LieAlgebraSpec};
use crate::hodge::weighted_leray_project;
use crate::spectral::{Band, Collocation, SpectralField, VectorField};

/// Absolute weighted-divergence tolerance accepted at construction.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// `(X, f)`: weighted-divergence-free base field and charge.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    x: VectorField,
    f: GaugeField,
}

/// `([alpha], xi)`: a 1-form class by its weighted-divergence-free
/// representative, and a dual charge density in dual components.
#[derive(Clone, Debug, PartialEq)]
pub struct DualElement {
    alpha: VectorField,
    xi: GaugeField,
}

fn check_parts(x: &VectorField, f: &GaugeField, geom: &GaugeGeometry) -> Result<()> {
    geom.grid().check_same(x.grid())?;
    geom.grid().check_same(f.grid())?;
    if f.dim() != geom.algebra().dim() {
        return Err(Error::InvalidArgument(format!(
            "charge has {} components, algebra has dimension {}",
            f.dim(),
            geom.algebra().dim()
        )));
    }
    Ok(())
}

fn check_divergence(x: &VectorField, geom: &GaugeGeometry) -> Result<()> {
    let div = geom.workspace().weighted_divergence(x)?.max_abs();
    let tol = DIVERGENCE_TOLERANCE * x.rms().max(1.0);
    if div > tol {
        return Err(Error::Precondition(format!(
            "field is not weighted-divergence-free (max |div(V X)| = {div:e})"
        )));
    }
    Ok(())
}

impl AlgebraElement {
    /// Validates `div(V X) = 0` within [`DIVERGENCE_TOLERANCE`].
    pub fn new(x: VectorField, f: GaugeField, geom: &GaugeGeometry) -> Result<Self> {
        check_parts(&x, &f, geom)?;
        check_divergence(&x, geom)?;
        Ok(AlgebraElement { x, f })
    }

    /// Projects `x` onto the weighted-divergence-free fields first.
    pub fn projected(x: VectorField, f: GaugeField, geom: &GaugeGeometry) -> Result<Self> {
        check_parts(&x, &f, geom)?;
        let x = weighted_leray_project(&x, geom.workspace())?;
        Ok(AlgebraElement { x, f })
    }

    pub(crate) fn from_parts(x: VectorField, f: GaugeField) -> Self {
        AlgebraElement { x, f }
    }

    pub fn zero(geom: &GaugeGeometry) -> Self {
        AlgebraElement { x: VectorField::zeros(geom.grid()), f: GaugeField::zeros(geom.grid(), geom.algebra().dim()) }
    }

    pub fn x(&self) -> &VectorField {
        &self.x
    }

    pub fn f(&self) -> &GaugeField {
        &self.f
    }

    pub fn into_parts(self) -> (VectorField, GaugeField) {
        (self.x, self.f)
    }

    /// Coefficient-space RMS size of both parts.
    pub fn norm(&self) -> f64 {
        (self.x.rms().powi(2) + self.f.rms().powi(2)).sqrt()
    }

    pub fn band(&self) -> usize {
        self.x.band().max(self.f.band())
    }
}

impl std::ops::Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { x: &self.x + &rhs.x, f: &self.f + &rhs.f }
    }
}

impl std::ops::Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { x: &self.x - &rhs.x, f: &self.f - &rhs.f }
    }
}

impl DualElement {
    /// Validates that `alpha` is the weighted-divergence-free representative.
    pub fn new(alpha: VectorField, xi: GaugeField, geom: &GaugeGeometry) -> Result<Self> {
        check_parts(&alpha, &xi, geom)?;
        check_divergence(&alpha, geom)?;
        Ok(DualElement { alpha, xi })
    }

    /// Class of an arbitrary 1-form (given by its components).
    pub fn from_one_form(alpha: VectorField, xi: GaugeField, geom: &GaugeGeometry) -> Result<Self> {
        check_parts(&alpha, &xi, geom)?;
        let alpha = weighted_leray_project(&alpha, geom.workspace())?;
        Ok(DualElement { alpha, xi })
    }

    pub fn zero(geom: &GaugeGeometry) -> Self {
        DualElement {
            alpha: VectorField::zeros(geom.grid()),
            xi: GaugeField::zeros(geom.grid(), geom.algebra().dim()),
        }
    }

    pub fn alpha(&self) -> &VectorField {
        &self.alpha
    }

    pub fn xi(&self) -> &GaugeField {
        &self.xi
    }

    pub fn into_parts(self) -> (VectorField, GaugeField) {
        (self.alpha, self.xi)
    }

    pub fn norm(&self) -> f64 {
        (self.alpha.rms().powi(2) + self.xi.rms().powi(2)).sqrt()
    }

    pub fn band(&self) -> usize {
        self.alpha.band().max(self.xi.band())
    }
}

/// Collocation samples of a vector field and its first derivatives.
pub(crate) struct VectorValues {
    pub v: Vec<Vec<f64>>,
    /// `grad[j][i] = d_j v_i`
    pub grad: Vec<Vec<Vec<f64>>>,
}

pub(crate) fn vector_values(col: &Collocation, x: &VectorField, with_grad: bool) -> Result<VectorValues> {
    let v = x.components().iter().map(|c| col.values(c)).collect();
    let grad = if with_grad {
        (0..x.dim())
            .map(|j| x.components().iter().map(|c| Ok(col.values(&c.derivative(j)?))).collect::<Result<_>>())
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok(VectorValues { v, grad })
}

pub(crate) fn gauge_gradient_values(col: &Collocation, f: &GaugeField) -> Result<Vec<Vec<Vec<f64>>>> {
    (0..col.grid().dim()).map(|j| Ok(f.derivative(j)?.values(col))).collect()
}

pub(crate) fn potential_values(col: &Collocation, geom: &GaugeGeometry) -> Option<Vec<Vec<Vec<f64>>>> {
    geom.potential().map(|a| a.components().iter().map(|ai| ai.values(col)).collect())
}

/// `curv[i][j][a]` for every ordered pair; `None` where identically zero.
pub(crate) fn curvature_values(col: &Collocation, geom: &GaugeGeometry) -> Option<Vec<Vec<Vec<Vec<f64>>>>> {
    let om = geom.curvature();
    if om.is_zero() {
        return None;
    }
    let d = om.dim();
    let m = om.algebra_dim();
    let mut out = vec![vec![vec![Vec::new(); m]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let vals = om.upper(i, j).values(col);
            for a in 0..m {
                out[j][i][a] = vals[a].iter().map(|v| -v).collect();
                out[i][j][a] = vals[a].clone();
            }
        }
        for a in 0..m {
            out[i][i][a] = vec![0.0; col.len()];
        }
    }
    Some(out)
}

fn content_band(geom: &GaugeGeometry) -> (usize, usize) {
    let a = geom.potential().map_or(0, |a| a.band());
    (a, geom.curvature().band())
}

/// The algebra bracket (with the overall minus sign).
pub fn bracket(u: &AlgebraElement, v: &AlgebraElement, geom: &GaugeGeometry) -> Result<AlgebraElement> {
    check_parts(&u.x, &u.f, geom)?;
    check_parts(&v.x, &v.f, geom)?;
    let grid = *geom.grid();
    let alg = geom.algebra();
    let (ba, bo) = content_band(geom);
    let (bz, bzp, bf, bfp) = (u.x.band(), v.x.band(), u.f.band(), v.f.band());
    let content = (bz + bzp + bo).max(bf + bfp).max(bz.max(bzp) + bf.max(bfp) + ba);
    let col = Collocation::for_content(&grid, content, Band::Dealiased);
    let n = col.len();
    let d = grid.dim();
    let m = alg.dim();

    let z = vector_values(&col, &u.x, true)?;
    let zp = vector_values(&col, &v.x, true)?;
    let f = u.f.values(&col);
    let fp = v.f.values(&col);
    let df = gauge_gradient_values(&col, &u.f)?;
    let dfp = gauge_gradient_values(&col, &v.f)?;
    let av = potential_values(&col, geom);
    let ov = curvature_values(&col, geom);

    // base: -((Z.grad)Z' - (Z'.grad)Z)
    let mut base = Vec::with_capacity(d);
    for i in 0..d {
        let mut out = vec![0.0; n];
        for (p, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            let mut t = 0.0;
            for j in 0..d {
                s += z.v[j][p] * zp.grad[j][i][p];
                t += zp.v[j][p] * z.grad[j][i][p];
            }
            *o = -(s - t);
        }
        base.push(out);
    }

    let mut fbr = vec![vec![0.0; n]; m];
    alg.add_bracket_values(&mut fbr, &f, &fp);
    let mut dz_fp = vec![vec![0.0; n]; m];
    add_covariant_values(&mut dz_fp, &z.v, &dfp, &fp, av.as_deref(), alg);
    let mut dzp_f = vec![vec![0.0; n]; m];
    add_covariant_values(&mut dzp_f, &zp.v, &df, &f, av.as_deref(), alg);
    let mut charge = vec![vec![0.0; n]; m];
    for a in 0..m {
        for p in 0..n {
            let mut om = 0.0;
            if let Some(ov) = &ov {
                for i in 0..d {
                    for j in i + 1..d {
                        om += (z.v[i][p] * zp.v[j][p] - z.v[j][p] * zp.v[i][p]) * ov[i][j][a][p];
                    }
                }
            }
            charge[a][p] = -(fbr[a][p] + (dz_fp[a][p] - dzp_f[a][p]) + om);
        }
    }

    let x = VectorField::new(base.into_iter().map(|v| col.to_field(v, Band::Dealiased)).collect())?;
    let x = if geom.workspace().is_constant() { x } else { weighted_leray_project(&x, geom.workspace())? };
    Ok(AlgebraElement { x, f: GaugeField::from_values(&col, charge, Band::Dealiased) })
}

/// The adjoint action, `ad(u)v = bracket(u, v)`.
pub fn ad(u: &AlgebraElement, v: &AlgebraElement, geom: &GaugeGeometry) -> Result<AlgebraElement> {
    bracket(u, v, geom)
}

/// Index lowering: identity on the base field, `h` on the charge.
pub fn flat(u: &AlgebraElement, geom: &GaugeGeometry) -> DualElement {
    DualElement { alpha: u.x.clone(), xi: u.f.apply_matrix(geom.algebra().inner_product()) }
}

/// Inverse of [`flat`]; the base part is projected to its class representative.
pub fn sharp(d: &DualElement, geom: &GaugeGeometry) -> Result<AlgebraElement> {
    let x = weighted_leray_project(&d.alpha, geom.workspace())?;
    Ok(AlgebraElement { x, f: d.xi.apply_matrix(geom.algebra().inverse_inner_product()) })
}

/// `int_B alpha(X) V + int_B (xi, f) V`.
pub fn pairing(d: &DualElement, u: &AlgebraElement, geom: &GaugeGeometry) -> Result<f64> {
    check_parts(&d.alpha, &d.xi, geom)?;
    check_parts(&u.x, &u.f, geom)?;
    let grid = *geom.grid();
    let weight = geom.weight();
    let content = (d.alpha.band() + u.x.band()).max(d.xi.band() + u.f.band()) + weight.band();
    let col = Collocation::for_integral(&grid, content);
    let wv = col.values(weight);
    let mut acc = vec![0.0; col.len()];
    for (a, x) in d.alpha.components().iter().zip(u.x.components()) {
        let (av, xv) = (col.values(a), col.values(x));
        for p in 0..acc.len() {
            acc[p] += av[p] * xv[p];
        }
    }
    for (a, x) in d.xi.components().iter().zip(u.f.components()) {
        let (av, xv) = (col.values(a), col.values(x));
        for p in 0..acc.len() {
            acc[p] += av[p] * xv[p];
        }
    }
    let s: f64 = acc.iter().zip(&wv).map(|(a, w)| a * w).sum();
    Ok(grid.volume() * s / col.len() as f64)
}

/// Pointwise `out += s * D_X xi` for a dual charge (`X(xi) + ad*(A(X)) xi`).
pub(crate) fn add_coadjoint_covariant_values(
    out: &mut [Vec<f64>],
    s: f64,
    x: &[Vec<f64>],
    dxi: &[Vec<Vec<f64>>],
    xi: &[Vec<f64>],
    a: Option<&[Vec<Vec<f64>>]>,
    alg: &LieAlgebraSpec,
) {
    for (i, xv) in x.iter().enumerate() {
        for (o, d) in out.iter_mut().zip(&dxi[i]) {
            for p in 0..o.len() {
                o[p] += s * xv[p] * d[p];
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
        alg.add_coadjoint_values(out, s, &ax, xi);
    }
}

/// Pointwise `out_i += s * (sum_a xi_a (D_i f)_a - sum_j X_j (xi, Omega_ji))`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn add_charge_force_values(
    out: &mut [Vec<f64>],
    s: f64,
    x: &[Vec<f64>],
    f: &[Vec<f64>],
    df: &[Vec<Vec<f64>>],
    xi: &[Vec<f64>],
    a: Option<&[Vec<Vec<f64>>]>,
    curv: Option<&[Vec<Vec<Vec<f64>>>]>,
    alg: &LieAlgebraSpec,
    skip_gradient: bool,
) {
    let d = out.len();
    let m = xi.len();
    let n = out[0].len();
    for i in 0..d {
        if !skip_gradient {
            // D_i f = d_i f + [A_i, f]
            let mut dif: Vec<Vec<f64>> = df[i].clone();
            if let Some(a) = a {
                alg.add_bracket_values(&mut dif, &a[i], f);
            }
            for c in 0..m {
                for p in 0..n {
                    out[i][p] += s * xi[c][p] * dif[c][p];
                }
            }
        }
        if let Some(curv) = curv {
            for j in 0..d {
                if j == i {
                    continue;
                }
                for c in 0..m {
                    let om = &curv[j][i][c];
                    for p in 0..n {
                        out[i][p] -= s * x[j][p] * xi[c][p] * om[p];
                    }
                }
            }
        }
    }
}

/// The coadjoint operator `ad*(u) d`.
pub fn coadjoint(u: &AlgebraElement, dual: &DualElement, geom: &GaugeGeometry) -> Result<DualElement> {
    check_parts(&u.x, &u.f, geom)?;
    check_parts(&dual.alpha, &dual.xi, geom)?;
    let grid = *geom.grid();
    let alg = geom.algebra();
    let (ba, bo) = content_band(geom);
    let (bx, bf, bal, bxi) = (u.x.band(), u.f.band(), dual.alpha.band(), dual.xi.band());
    let content = (bx + bal).max(bxi + bf + ba).max(bx + bxi + bo.max(ba));
    let col = Collocation::for_content(&grid, content, Band::Dealiased);
    let n = col.len();
    let d = grid.dim();
    let m = alg.dim();

    let x = vector_values(&col, &u.x, true)?;
    let al = vector_values(&col, &dual.alpha, true)?;
    let f = u.f.values(&col);
    let df = gauge_gradient_values(&col, &u.f)?;
    let xi = dual.xi.values(&col);
    let dxi = gauge_gradient_values(&col, &dual.xi)?;
    let av = potential_values(&col, geom);
    let ov = curvature_values(&col, geom);

    // -L_X alpha, (L_X alpha)_i = X_j d_j alpha_i + alpha_j d_i X_j
    let mut base = vec![vec![0.0; n]; d];
    for (i, out) in base.iter_mut().enumerate() {
        for (p, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..d {
                s += x.v[j][p] * al.grad[j][i][p] + al.v[j][p] * x.grad[i][j][p];
            }
            *o = -s;
        }
    }
    add_charge_force_values(&mut base, -1.0, &x.v, &f, &df, &xi, av.as_deref(), ov.as_deref(), alg, false);

    let mut charge = vec![vec![0.0; n]; m];
    alg.add_coadjoint_values(&mut charge, -1.0, &f, &xi);
    add_coadjoint_covariant_values(&mut charge, -1.0, &x.v, &dxi, &xi, av.as_deref(), alg);

    let alpha = VectorField::new(base.into_iter().map(|v| col.to_field(v, Band::Dealiased)).collect())?;
    let alpha = weighted_leray_project(&alpha, geom.workspace())?;
    Ok(DualElement { alpha, xi: GaugeField::from_values(&col, charge, Band::Dealiased) })
}

/// `(xi, Df)~` as a vector field, truncated to the 2/3 band (unprojected).
pub fn charge_gradient_form(u: &AlgebraElement, dual: &DualElement, geom: &GaugeGeometry) -> Result<VectorField> {
    let grid = *geom.grid();
    let (ba, _) = content_band(geom);
    let content = dual.xi.band() + u.f.band() + ba;
    let col = Collocation::for_content(&grid, content, Band::Dealiased);
    let f = u.f.values(&col);
    let df = gauge_gradient_values(&col, &u.f)?;
    let xi = dual.xi.values(&col);
    let av = potential_values(&col, geom);
    let mut out = vec![vec![0.0; col.len()]; grid.dim()];
    let zero_x = vec![vec![0.0; col.len()]; grid.dim()];
    add_charge_force_values(&mut out, 1.0, &zero_x, &f, &df, &xi, av.as_deref(), None, geom.algebra(), false);
    VectorField::new(out.into_iter().map(|v| col.to_field(v, Band::Dealiased)).collect())
}

/// Scalar `int (xi, f) V` helper used by diagnostics.
pub(crate) fn weighted_charge_pairing(xi: &GaugeField, f: &GaugeField, weight: &SpectralField) -> Result<f64> {
    let grid = *weight.grid();
    let col = Collocation::for_integral(&grid, xi.band() + f.band() + weight.band());
    let wv = col.values(weight);
    let mut acc = vec![0.0; col.len()];
    for (a, b) in xi.components().iter().zip(f.components()) {
        let (av, bv) = (col.values(a), col.values(b));
        for p in 0..acc.len() {
            acc[p] += av[p] * bv[p];
        }
    }
    let s: f64 = acc.iter().zip(&wv).map(|(a, w)| a * w).sum();
    Ok(grid.volume() * s / col.len() as f64)
}
