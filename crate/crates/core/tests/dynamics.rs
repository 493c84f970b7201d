mod common;

use common::{points, Series};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ymh::dynamics::{
    charge_rhs, diagnostics, passive_transport_rhs, rhs, self_coadjoint_defect, step_rk4, superconductivity_rhs,
    velocity_rhs, FluidState, Simulation,
};
use ymh::geometry::{GaugeField, GaugeGeometry, GaugePotential, LieAlgebraSpec};
use ymh::hodge::ProjectionWorkspace;
use ymh::spectral::{SpectralField, TorusGrid, VectorField};

fn taylor_green(g: &TorusGrid) -> VectorField {
    VectorField::from_fn(g, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0])
}

fn magnetic(g: &TorusGrid) -> VectorField {
    VectorField::from_fn(g, |x| [0.0, 0.0, x[0].cos()])
}

fn random_abelian_state(geom: &GaugeGeometry, band: usize, rng: &mut ChaCha8Rng) -> FluidState {
    let g = *geom.grid();
    let x = VectorField::random_band_limited(&g, band, rng);
    let f = GaugeField::random_band_limited(&g, 1, band, rng);
    FluidState::initial(x, f, geom).unwrap()
}

#[test]
fn taylor_green_velocity_rhs_vanishes() {
    let g = TorusGrid::periodic(2, 32).unwrap();
    let geom = GaugeGeometry::trivial(&g, LieAlgebraSpec::abelian()).unwrap();
    let s = FluidState::initial(taylor_green(&g), GaugeField::zeros(&g, 1), &geom).unwrap();
    let v = velocity_rhs(&s, &geom).unwrap();
    assert!(v.max_abs() <= 1e-10, "{:e}", v.max_abs());
}

#[test]
fn general_rhs_matches_superconductivity_form() {
    let g = TorusGrid::periodic(3, 16).unwrap();
    let b = magnetic(&g);
    let geom = GaugeGeometry::with_magnetic_field(&b, ProjectionWorkspace::uniform(&g, 1.0).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let s = random_abelian_state(&geom, 3, &mut rng);
        let (v, f) = rhs(&s, &geom).unwrap();
        let (v2, f2) = superconductivity_rhs(&s, &b, &geom).unwrap();
        assert!((&v - &v2).max_coeff() <= 1e-12 * v.max_coeff());
        assert!((f.component(0) - &f2).max_coeff() <= 1e-12 * f2.max_coeff());
    }
}

#[test]
fn magnetic_force_direction() {
    // X = (sin y, 0, 0), f = 1, B = (0, 0, 1): force f X x B = (0, -sin y, 0)
    let g = TorusGrid::periodic(3, 8).unwrap();
    let b = VectorField::from_fn(&g, |_| [0.0, 0.0, 1.0]);
    let geom = GaugeGeometry::with_magnetic_field(&b, ProjectionWorkspace::uniform(&g, 1.0).unwrap()).unwrap();
    let x = VectorField::from_fn(&g, |p| [p[1].sin(), 0.0, 0.0]);
    let s = FluidState::initial(x, GaugeField::constant(&g, &[1.0]), &geom).unwrap();
    let v = velocity_rhs(&s, &geom).unwrap();
    // -sin y in the y component is a gradient of cos y, so it projects away
    assert!(v.max_abs() < 1e-14);
    let x = VectorField::from_fn(&g, |p| [p[2].sin(), 0.0, 0.0]);
    let s = FluidState::initial(x, GaugeField::constant(&g, &[1.0]), &geom).unwrap();
    let v = velocity_rhs(&s, &geom).unwrap();
    let want = SpectralField::from_fn(&g, |p| -p[2].sin());
    assert!((v.component(1) - &want).max_coeff() < 1e-14);
}

#[test]
fn charge_rhs_examples() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    // covariant transport by a constant potential: df/dt = -[A(X), f]
    let a = GaugePotential::new(vec![GaugeField::constant(&g, &[1.0, 0.0, 0.0]), GaugeField::zeros(&g, 3)]).unwrap();
    let geom = GaugeGeometry::new(LieAlgebraSpec::su2(), Some(a), ProjectionWorkspace::uniform(&g, 1.0).unwrap())
        .unwrap();
    let x = VectorField::from_fn(&g, |_| [1.0, 0.0, 0.0]);
    let s = FluidState::initial(x.clone(), GaugeField::constant(&g, &[0.0, 1.0, 0.0]), &geom).unwrap();
    let df = charge_rhs(&s, &geom).unwrap();
    assert!((&df - &GaugeField::constant(&g, &[0.0, 0.0, -1.0])).max_coeff() < 1e-15);

    // trivial connection, constant charge: nothing moves
    let flat = GaugeGeometry::trivial(&g, LieAlgebraSpec::su2()).unwrap();
    let s = FluidState::initial(x, GaugeField::constant(&g, &[0.3, -0.2, 0.5]), &flat).unwrap();
    assert_eq!(charge_rhs(&s, &flat).unwrap().max_coeff(), 0.0);
}

#[test]
fn pure_advection_matches_translation() {
    let g = TorusGrid::periodic(2, 32).unwrap();
    let geom = GaugeGeometry::trivial(&g, LieAlgebraSpec::abelian()).unwrap();
    let c = [1.0, 0.5];
    let f0 = |x: &[f64; 3]| x[0].sin() + 0.5 * (2.0 * x[1] + 0.3).cos();
    let x = VectorField::from_fn(&g, |_| [c[0], c[1], 0.0]);
    let f = GaugeField::new(vec![SpectralField::from_fn(&g, f0)]).unwrap();
    let s0 = FluidState::initial(x, f, &geom).unwrap();
    let mut sim = Simulation::new(geom, s0, 1e-3).unwrap().without_timing();
    for _ in 0..1000 {
        sim.advance().unwrap();
    }
    let t = sim.state().t;
    assert!((t - 1.0).abs() < 1e-12);
    let s = Series::new(sim.state().f().component(0));
    let worst = points(&g, g.n())
        .iter()
        .map(|p| (s.eval(p) - f0(&[p[0] - c[0] * t, p[1] - c[1] * t, 0.0])).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn flat_connection_decouples_velocity() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    // commuting constant potential: nonzero A, zero curvature
    let a = GaugePotential::new(vec![
        GaugeField::constant(&g, &[0.7, 0.0, 0.0]),
        GaugeField::constant(&g, &[-0.4, 0.0, 0.0]),
    ])
    .unwrap();
    let v = SpectralField::from_fn(&g, |x| 1.0 + 0.3 * x[0].cos());
    let geom = GaugeGeometry::new(LieAlgebraSpec::su2(), Some(a), ProjectionWorkspace::new(v, 1e-13, 500).unwrap())
        .unwrap();
    assert!(geom.curvature().is_zero());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = VectorField::random_band_limited(&g, 4, &mut rng);
    let f = GaugeField::random_band_limited(&g, 3, 4, &mut rng);
    let charged = FluidState::initial(x.clone(), f, &geom).unwrap();
    let bare = FluidState::initial(x, GaugeField::zeros(&g, 3), &geom).unwrap();
    let (v1, v2) = (velocity_rhs(&charged, &geom).unwrap(), velocity_rhs(&bare, &geom).unwrap());
    assert!((&v1 - &v2).max_abs() <= 1e-10 * v2.max_abs());
    let (pv, pf) = passive_transport_rhs(&charged, &geom).unwrap();
    assert_eq!(pv, v2);
    assert!((&pf - &charge_rhs(&charged, &geom).unwrap()).max_coeff() == 0.0);

    let b = VectorField::from_fn(&TorusGrid::periodic(3, 8).unwrap(), |x| [0.0, 0.0, x[0].cos()]);
    let curved = GaugeGeometry::with_magnetic_field(&b, ProjectionWorkspace::uniform(b.grid(), 1.0).unwrap()).unwrap();
    let s = FluidState::initial(b.clone(), GaugeField::zeros(b.grid(), 1), &curved).unwrap();
    assert!(passive_transport_rhs(&s, &curved).is_err());
}

#[test]
fn charge_casimir_is_conserved_in_short_run() {
    let g = TorusGrid::periodic(3, 16).unwrap();
    let b = magnetic(&g);
    let geom = GaugeGeometry::with_magnetic_field(&b, ProjectionWorkspace::uniform(&g, 1.0).unwrap()).unwrap();
    let x = VectorField::from_fn(&g, |p| [p[1].sin(), p[2].sin(), p[0].sin() * p[1].cos()]);
    let f = GaugeField::new(vec![SpectralField::from_fn(&g, |p| p[0].cos() + 0.5 * (p[1] + 2.0 * p[2]).sin())]).unwrap();
    let mut s = FluidState::initial(x, f, &geom).unwrap();
    let d0 = diagnostics(&s, &geom, 0.0).unwrap();
    for _ in 0..50 {
        s = step_rk4(&s, 1e-3, &geom).unwrap();
    }
    let d1 = diagnostics(&s, &geom, 0.0).unwrap();
    assert!(((d1.charge_l2 - d0.charge_l2) / d0.charge_l2).abs() <= 1e-8);
    assert!(((d1.total - d0.total) / d0.total).abs() <= 1e-8);
    assert!(d1.div_inf <= 1e-12);
    assert!(d1.enstrophy.is_nan());
}

#[test]
fn self_coadjoint_term_vanishes_only_for_invariant_metric() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = GaugeField::random_band_limited(&g, 3, 5, &mut rng);
    let inv = GaugeGeometry::trivial(&g, LieAlgebraSpec::su2()).unwrap();
    assert!(self_coadjoint_defect(&f, &inv) <= 1e-12 * f.max_coeff().powi(2));
    let h = vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
    let skew = GaugeGeometry::trivial(&g, LieAlgebraSpec::su2_with_metric(h, false).unwrap()).unwrap();
    assert!(self_coadjoint_defect(&f, &skew) > 1e-3);
}

#[test]
fn enstrophy_matches_quadrature_in_2d() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let geom = GaugeGeometry::trivial(&g, LieAlgebraSpec::abelian()).unwrap();
    let s = FluidState::initial(taylor_green(&g), GaugeField::zeros(&g, 1), &geom).unwrap();
    let d = diagnostics(&s, &geom, 0.0).unwrap();
    // omega = 2 sin x sin y
    let want = 0.5 * 4.0 * 0.25 * g.volume();
    assert!((d.enstrophy - want).abs() < 1e-12 * want);
    assert!((d.kinetic - 0.5 * 0.5 * g.volume()).abs() < 1e-12);
    assert_eq!(d.charge, 0.0);
}

#[test]
fn step_validation() {
    let g = TorusGrid::periodic(2, 8).unwrap();
    let geom = GaugeGeometry::trivial(&g, LieAlgebraSpec::abelian()).unwrap();
    let s = FluidState::initial(taylor_green(&g), GaugeField::zeros(&g, 1), &geom).unwrap();
    assert!(step_rk4(&s, 0.0, &geom).is_err());
    assert!(step_rk4(&s, f64::NAN, &geom).is_err());
    assert!(Simulation::new(geom, s, -1.0).is_err());
}
