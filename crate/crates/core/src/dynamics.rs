//! Euler equations of the automorphism group, integrated in the primal
//! variables `(X, f)`:
//!
//! ```text
//! dX/dt = P_V( -(X.grad)X - (xi,Df)~ + (xi,i_X Omega)~ )
//! df/dt = h^{-1}( -ad*(f)xi - D_X xi ),     xi = h f
//! ```
//!
//! The advection term is evaluated in rotational form `-(curl X) x X`; the
//! two differ by `grad |X|^2/2`, which the projection removes.

use std::time::Instant;

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{GaugeField, GaugeGeometry};
use crate::hodge::weighted_leray_project;
use crate::lie_algebra::{
    add_charge_force_values, add_coadjoint_covariant_values, curvature_values, gauge_gradient_values,
    potential_values, weighted_charge_pairing, AlgebraElement,
};
use crate::spectral::{Band, Collocation, SpectralField, VectorField};

/// Time and primal state `(X, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluidState {
    pub t: f64,
    pub u: AlgebraElement,
}

impl FluidState {
    pub fn new(t: f64, u: AlgebraElement) -> Self {
        FluidState { t, u }
    }

    /// Truncates to the 2/3 band and projects `X`.
    pub fn initial(x: VectorField, f: GaugeField, geom: &GaugeGeometry) -> Result<Self> {
        let u = AlgebraElement::projected(x.dealiased(), f.dealiased(), geom)?;
        Ok(FluidState { t: 0.0, u })
    }

    pub fn x(&self) -> &VectorField {
        self.u.x()
    }

    pub fn f(&self) -> &GaugeField {
        self.u.f()
    }
}

/// One row of the diagnostics table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub kinetic: f64,
    pub charge: f64,
    pub total: f64,
    pub div_inf: f64,
    /// `1/2 int omega^2` in 2-D; NaN in 3-D.
    pub enstrophy: f64,
    /// `int |f|_h^2 V`
    pub charge_l2: f64,
    /// `int |f|_h^4 V`
    pub charge_l4: f64,
    pub wall_ms: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "t,E_kin,E_charge,E_total,div_inf,enstrophy,charge_L2,charge_L4,wall_ms";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3}",
            self.t,
            self.kinetic,
            self.charge,
            self.total,
            self.div_inf,
            self.enstrophy,
            self.charge_l2,
            self.charge_l4,
            self.wall_ms
        )
    }
}

fn curl_values(col: &Collocation, x: &VectorField) -> Result<Vec<Vec<f64>>> {
    let c = x.components();
    if x.dim() == 2 {
        Ok(vec![col.values(&(&c[1].derivative(0)? - &c[0].derivative(1)?))])
    } else {
        Ok(vec![
            col.values(&(&c[2].derivative(1)? - &c[1].derivative(2)?)),
            col.values(&(&c[0].derivative(2)? - &c[2].derivative(0)?)),
            col.values(&(&c[1].derivative(0)? - &c[0].derivative(1)?)),
        ])
    }
}

/// Unprojected velocity force and charge tendency in dual components.
fn raw_rhs(u: &AlgebraElement, geom: &GaugeGeometry) -> Result<(VectorField, GaugeField)> {
    let grid = *geom.grid();
    let alg = geom.algebra();
    let x = u.x();
    let f = u.f();
    let identity = alg.metric_is_identity();
    let xi_field = if identity { f.clone() } else { f.apply_matrix(alg.inner_product()) };
    let ba = geom.potential().map_or(0, |a| a.band());
    let bo = geom.curvature().band();
    let (bx, bf) = (x.band(), f.band());
    let content = (2 * bx).max(2 * bf + ba).max(bx + bf + bo.max(ba));
    let col = Collocation::for_content(&grid, content, Band::Dealiased);
    let n = col.len();
    let d = grid.dim();
    let m = alg.dim();

    let xv: Vec<Vec<f64>> = x.components().iter().map(|c| col.values(c)).collect();
    let w = curl_values(&col, x)?;
    let fv = f.values(&col);
    let df = gauge_gradient_values(&col, f)?;
    let (xiv, dxi) = if identity {
        (fv.clone(), df.clone())
    } else {
        (xi_field.values(&col), gauge_gradient_values(&col, &xi_field)?)
    };
    let av = potential_values(&col, geom);
    let ov = curvature_values(&col, geom);

    let mut vel = vec![vec![0.0; n]; d];
    if d == 2 {
        for p in 0..n {
            vel[0][p] = w[0][p] * xv[1][p];
            vel[1][p] = -w[0][p] * xv[0][p];
        }
    } else {
        for p in 0..n {
            vel[0][p] = -(w[1][p] * xv[2][p] - w[2][p] * xv[1][p]);
            vel[1][p] = -(w[2][p] * xv[0][p] - w[0][p] * xv[2][p]);
            vel[2][p] = -(w[0][p] * xv[1][p] - w[1][p] * xv[0][p]);
        }
    }
    add_charge_force_values(&mut vel, -1.0, &xv, &fv, &df, &xiv, av.as_deref(), ov.as_deref(), alg, false);

    let mut charge = vec![vec![0.0; n]; m];
    alg.add_coadjoint_values(&mut charge, -1.0, &fv, &xiv);
    add_coadjoint_covariant_values(&mut charge, -1.0, &xv, &dxi, &xiv, av.as_deref(), alg);

    let vel = VectorField::new(vel.into_iter().map(|v| col.to_field(v, Band::Dealiased)).collect())?;
    let dxi_dt = GaugeField::from_values(&col, charge, Band::Dealiased);
    Ok((vel, dxi_dt))
}

/// Both tendencies `(dX/dt, df/dt)` from one evaluation.
pub fn rhs(s: &FluidState, geom: &GaugeGeometry) -> Result<(VectorField, GaugeField)> {
    let (vel, dxi) = raw_rhs(&s.u, geom)?;
    let vel = weighted_leray_project(&vel, geom.workspace())?;
    let alg = geom.algebra();
    let df = if alg.metric_is_identity() { dxi } else { dxi.apply_matrix(alg.inverse_inner_product()) };
    Ok((vel, df))
}

/// `dX/dt`.
pub fn velocity_rhs(s: &FluidState, geom: &GaugeGeometry) -> Result<VectorField> {
    Ok(rhs(s, geom)?.0)
}

/// `df/dt`.
pub fn charge_rhs(s: &FluidState, geom: &GaugeGeometry) -> Result<GaugeField> {
    Ok(rhs(s, geom)?.1)
}

/// Tendencies for a flat connection, with the velocity equation evaluated
/// without reference to the charge.
pub fn passive_transport_rhs(s: &FluidState, geom: &GaugeGeometry) -> Result<(VectorField, GaugeField)> {
    if !geom.curvature().is_zero() {
        return Err(Error::Precondition("passive transport requires vanishing curvature".into()));
    }
    let uncharged = AlgebraElement::from_parts(s.x().clone(), GaugeField::zeros(geom.grid(), geom.algebra().dim()));
    let vel = velocity_rhs(&FluidState::new(s.t, uncharged), geom)?;
    Ok((vel, charge_rhs(s, geom)?))
}

/// Largest pointwise `|ad*(f) h f|` on the base grid; vanishes for an
/// Ad-invariant metric.
pub fn self_coadjoint_defect(f: &GaugeField, geom: &GaugeGeometry) -> f64 {
    let alg = geom.algebra();
    let col = Collocation::for_content(geom.grid(), 0, Band::Full);
    let fv = f.values(&col);
    let xi = f.apply_matrix(alg.inner_product()).values(&col);
    let mut out = vec![vec![0.0; col.len()]; alg.dim()];
    alg.add_coadjoint_values(&mut out, 1.0, &fv, &xi);
    out.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn combine(s: &FluidState, dt: f64, k: &(VectorField, GaugeField)) -> FluidState {
    let (mut x, mut f) = s.u.clone().into_parts();
    x.axpy(dt, &k.0);
    f.axpy(dt, &k.1);
    FluidState { t: s.t + dt, u: AlgebraElement::from_parts(x, f) }
}

/// CFL number `max|X| dt N / L`.
pub fn cfl_number(s: &FluidState, dt: f64) -> f64 {
    let g = s.x().grid();
    s.x().max_abs() * dt * g.n() as f64 / g.length()
}

/// Classical fourth-order Runge–Kutta step with a final re-projection.
pub fn step_rk4(s: &FluidState, dt: f64, geom: &GaugeGeometry) -> Result<FluidState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    let cfl = cfl_number(s, dt);
    if cfl > 0.5 {
        warn!("CFL number {cfl:.3} exceeds 0.5 at t = {}", s.t);
    }
    let k1 = rhs(s, geom)?;
    let k2 = rhs(&combine(s, 0.5 * dt, &k1), geom)?;
    let k3 = rhs(&combine(s, 0.5 * dt, &k2), geom)?;
    let k4 = rhs(&combine(s, dt, &k3), geom)?;
    let (mut x, mut f) = s.u.clone().into_parts();
    for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
        x.axpy(w * dt / 6.0, &k.0);
        f.axpy(w * dt / 6.0, &k.1);
    }
    let x = weighted_leray_project(&x, geom.workspace())?;
    // rms squares the samples, so it also catches states whose energy overflows
    if !(x.rms().is_finite() && f.rms().is_finite()) {
        return Err(Error::Numerical(format!("non-finite state after step at t = {}", s.t)));
    }
    let next = FluidState { t: s.t + dt, u: AlgebraElement::from_parts(x, f) };
    if cfg!(debug_assertions) && geom.algebra().is_ad_invariant() {
        let defect = self_coadjoint_defect(next.f(), geom);
        let scale = next.f().rms().powi(2).max(1.0);
        debug_assert!(defect <= 1e-12 * scale, "ad*(f) flat(f) = {defect:e}");
    }
    Ok(next)
}

fn integral_of(values: &[f64], weight: &[f64], volume: f64) -> f64 {
    volume * values.iter().zip(weight).map(|(a, w)| a * w).sum::<f64>() / values.len() as f64
}

/// Energies, Casimir moments and constraint residual of a state.
pub fn diagnostics(s: &FluidState, geom: &GaugeGeometry, wall_ms: f64) -> Result<DiagnosticsRecord> {
    let grid = *geom.grid();
    let weight = geom.weight();
    let vol = grid.volume();
    let x = s.x();
    let f = s.f();

    let col = Collocation::for_integral(&grid, 2 * x.band() + weight.band());
    let wv = col.values(weight);
    let mut sq = vec![0.0; col.len()];
    for c in x.components() {
        for (a, v) in sq.iter_mut().zip(col.values(c)) {
            *a += v * v;
        }
    }
    let kinetic = 0.5 * integral_of(&sq, &wv, vol);

    let xi = f.apply_matrix(geom.algebra().inner_product());
    let charge_l2 = weighted_charge_pairing(&xi, f, weight)?;
    let charge = 0.5 * charge_l2;

    let col4 = Collocation::for_integral(&grid, 4 * f.band() + weight.band());
    let fv = f.values(&col4);
    let xv = xi.values(&col4);
    let w4 = col4.values(weight);
    let norm2: Vec<f64> =
        (0..col4.len()).map(|p| fv.iter().zip(&xv).map(|(a, b)| a[p] * b[p]).sum::<f64>()).collect();
    let quartic: Vec<f64> = norm2.iter().map(|v| v * v).collect();
    let charge_l4 = integral_of(&quartic, &w4, vol);

    let enstrophy = if grid.dim() == 2 {
        let w = x.vorticity_2d()?;
        let colw = Collocation::for_integral(&grid, 2 * w.band());
        let wv = colw.values(&w);
        0.5 * vol * wv.iter().map(|v| v * v).sum::<f64>() / colw.len() as f64
    } else {
        f64::NAN
    };

    let div_inf = geom.workspace().weighted_divergence(x)?.max_abs();
    Ok(DiagnosticsRecord {
        t: s.t,
        kinetic,
        charge,
        total: kinetic + charge,
        div_inf,
        enstrophy,
        charge_l2,
        charge_l4,
        wall_ms,
    })
}

/// Independently assembled abelian tendencies on `T^3` for a magnetic field
/// `b`: `dX/dt = P_V(-(X.grad)X + f X x b)`, `df/dt = -X(f)`.
pub fn superconductivity_rhs(
    s: &FluidState,
    b: &VectorField,
    geom: &GaugeGeometry,
) -> Result<(VectorField, SpectralField)> {
    let grid = *geom.grid();
    if grid.dim() != 3 || geom.algebra().dim() != 1 {
        return Err(Error::InvalidArgument("superconductivity form needs an abelian 3-D geometry".into()));
    }
    let x = s.x();
    let f = s.f().component(0);
    let col = Collocation::padded(&grid);
    let need = (2 * x.band()).max(x.band() + f.band() + b.band()) + grid.dealias_cutoff() + 1;
    if need > col.size() {
        return Err(Error::InvalidArgument("state band too wide for the padded grid".into()));
    }
    let xv: Vec<Vec<f64>> = x.components().iter().map(|c| col.values(c)).collect();
    let bv: Vec<Vec<f64>> = b.components().iter().map(|c| col.values(c)).collect();
    let fv = col.values(f);
    let mut force = Vec::with_capacity(3);
    for i in 0..3 {
        let grads: Vec<Vec<f64>> =
            (0..3).map(|j| Ok(col.values(&x.component(i).derivative(j)?))).collect::<Result<_>>()?;
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let v: Vec<f64> = (0..col.len())
            .map(|p| {
                let adv = xv[0][p] * grads[0][p] + xv[1][p] * grads[1][p] + xv[2][p] * grads[2][p];
                let cross = xv[j][p] * bv[k][p] - xv[k][p] * bv[j][p];
                -adv + fv[p] * cross
            })
            .collect();
        force.push(col.to_field(v, Band::Dealiased));
    }
    let vel = weighted_leray_project(&VectorField::new(force)?, geom.workspace())?;
    let mut adv = vec![0.0; col.len()];
    for j in 0..3 {
        let dj = col.values(&f.derivative(j)?);
        for p in 0..adv.len() {
            adv[p] -= xv[j][p] * dj[p];
        }
    }
    Ok((vel, col.to_field(adv, Band::Dealiased)))
}

/// Sequential time integration with wall-clock accounting.
#[derive(Clone, Debug)]
pub struct Simulation {
    geom: GaugeGeometry,
    state: FluidState,
    dt: f64,
    step: usize,
    timing: bool,
}

impl Simulation {
    pub fn new(geom: GaugeGeometry, state: FluidState, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        Ok(Simulation { geom, state, dt, step: 0, timing: true })
    }

    /// Record zero wall time so outputs are bit-reproducible.
    pub fn without_timing(mut self) -> Self {
        self.timing = false;
        self
    }

    pub fn geometry(&self) -> &GaugeGeometry {
        &self.geom
    }

    pub fn state(&self) -> &FluidState {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    /// Advances one step; returns the step's wall time in milliseconds.
    pub fn advance(&mut self) -> Result<f64> {
        let start = Instant::now();
        self.state = step_rk4(&self.state, self.dt, &self.geom)?;
        self.step += 1;
        Ok(if self.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 })
    }

    pub fn diagnostics(&self, wall_ms: f64) -> Result<DiagnosticsRecord> {
        diagnostics(&self.state, &self.geom, if self.timing { wall_ms } else { 0.0 })
    }
}
