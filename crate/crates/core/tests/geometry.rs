mod common;

use common::Series;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ymh::geometry::{
    covariant_derivative, curvature_from_magnetic, curvature_from_potential, GaugeField, GaugePotential,
    LieAlgebraSpec,
};
use ymh::spectral::{SpectralField, TorusGrid, VectorField};

fn su2_bracket(x: &[f64], y: &[f64]) -> [f64; 3] {
    [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
}

#[test]
fn zero_potential_has_zero_curvature() {
    let g = TorusGrid::periodic(3, 8).unwrap();
    let om = curvature_from_potential(&GaugePotential::zeros(&g, 3), &LieAlgebraSpec::su2()).unwrap();
    assert!(om.is_zero());
}

#[test]
fn abelian_curvature_of_sine_potential() {
    let g = TorusGrid::periodic(3, 16).unwrap();
    let zero = GaugeField::zeros(&g, 1);
    let ay = GaugeField::new(vec![SpectralField::from_fn(&g, |x| x[0].sin())]).unwrap();
    let a = GaugePotential::new(vec![zero.clone(), ay, zero]).unwrap();
    let om = curvature_from_potential(&a, &LieAlgebraSpec::abelian()).unwrap();
    let cos = SpectralField::from_fn(&g, |x| x[0].cos());
    assert!((om.upper(0, 1).component(0) - &cos).max_coeff() < 1e-15);
    assert_eq!(om.upper(0, 2).max_coeff(), 0.0);
    assert_eq!(om.upper(1, 2).max_coeff(), 0.0);
    assert!((om.get(1, 0).component(0) + &cos).max_coeff() < 1e-15);
}

#[test]
fn abelian_curvature_is_exactly_da() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = GaugePotential::new((0..2).map(|_| GaugeField::random_band_limited(&g, 1, 7, &mut rng)).collect()).unwrap();
    let om = curvature_from_potential(&a, &LieAlgebraSpec::abelian()).unwrap();
    let da = &a.component(1).component(0).derivative(0).unwrap() - &a.component(0).component(0).derivative(1).unwrap();
    assert_eq!(om.upper(0, 1).component(0), &da);
}

#[test]
fn constant_su2_potential_gives_commutator() {
    let g = TorusGrid::periodic(2, 8).unwrap();
    let a = GaugePotential::new(vec![
        GaugeField::constant(&g, &[1.0, 0.0, 0.0]),
        GaugeField::constant(&g, &[0.0, 1.0, 0.0]),
    ])
    .unwrap();
    let om = curvature_from_potential(&a, &LieAlgebraSpec::su2()).unwrap();
    let want = GaugeField::constant(&g, &[0.0, 0.0, 1.0]);
    assert!((om.upper(0, 1) - &want).max_coeff() < 1e-15);
}

#[test]
fn bianchi_identity_holds_pointwise() {
    let g = TorusGrid::periodic(3, 16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let band = g.n() / 6;
    let a = GaugePotential::new((0..3).map(|_| GaugeField::random_band_limited(&g, 3, band, &mut rng)).collect()).unwrap();
    let om = curvature_from_potential(&a, &LieAlgebraSpec::su2()).unwrap();
    let asr: Vec<Vec<Series>> = a.components().iter().map(common::series_of_gauge).collect();
    let osr = |i: usize, j: usize| common::series_of_gauge(&om.get(i, j));
    let oms: Vec<Vec<Vec<Series>>> = (0..3).map(|i| (0..3).map(|j| osr(i, j)).collect()).collect();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for _ in 0..40 {
        let x = [rng.gen::<f64>() * 6.3, rng.gen::<f64>() * 6.3, rng.gen::<f64>() * 6.3];
        let mut total = [0.0; 3];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let ai: Vec<f64> = asr[i].iter().map(|s| s.eval(&x)).collect();
            let ojk: Vec<f64> = oms[j][k].iter().map(|s| s.eval(&x)).collect();
            let br = su2_bracket(&ai, &ojk);
            for c in 0..3 {
                let d = oms[j][k][c].derivative(i, &x);
                scale = scale.max(d.abs());
                total[c] += d + br[c];
            }
        }
        worst = worst.max(total.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    assert!(worst <= 1e-10 * scale.max(1.0), "{worst:e}");
}

#[test]
fn covariant_derivative_examples() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let su2 = LieAlgebraSpec::su2();
    // A = 0: plain directional derivative
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // bands chosen so the product stays inside the 2/3 cutoff
    let x = VectorField::random_band_limited(&g, 2, &mut rng);
    let f = GaugeField::random_band_limited(&g, 3, 2, &mut rng);
    let d = covariant_derivative(&x, &f, None, &su2).unwrap();
    let (xs, fs) = (common::series_of_vector(&x), common::series_of_gauge(&f));
    let ds = common::series_of_gauge(&d);
    for p in common::points(&g, 7) {
        for c in 0..3 {
            let want: f64 = (0..2).map(|i| xs[i].eval(&p) * fs[c].derivative(i, &p)).sum();
            assert!((ds[c].eval(&p) - want).abs() < 1e-12);
        }
    }

    // abelian, constant f: zero for any A
    let ab = LieAlgebraSpec::abelian();
    let a1 = GaugePotential::new((0..2).map(|_| GaugeField::random_band_limited(&g, 1, 3, &mut rng)).collect()).unwrap();
    let d = covariant_derivative(&x, &GaugeField::constant(&g, &[2.0]), Some(&a1), &ab).unwrap();
    assert_eq!(d.max_coeff(), 0.0);

    // su(2): X = e_x, f = e_2, A_x = e_1 gives [e_1, e_2] = e_3
    let ex = VectorField::from_fn(&g, |_| [1.0, 0.0, 0.0]);
    let a = GaugePotential::new(vec![GaugeField::constant(&g, &[1.0, 0.0, 0.0]), GaugeField::zeros(&g, 3)]).unwrap();
    let d = covariant_derivative(&ex, &GaugeField::constant(&g, &[0.0, 1.0, 0.0]), Some(&a), &su2).unwrap();
    assert!((&d - &GaugeField::constant(&g, &[0.0, 0.0, 1.0])).max_coeff() < 1e-15);
}

#[test]
fn magnetic_curvature_reproduces_cross_product() {
    let g = TorusGrid::periodic(3, 8).unwrap();
    let b = VectorField::from_fn(&g, |x| [x[1].sin(), x[2].cos(), x[0].cos()]);
    let om = curvature_from_magnetic(&b).unwrap();
    let xv = [0.3, -1.1, 0.7];
    let bv = b.components().iter().map(|c| c.to_values()).collect::<Vec<_>>();
    let ov: Vec<Vec<Vec<f64>>> = (0..3).map(|i| (0..3).map(|j| om.get(i, j).component(0).to_values()).collect()).collect();
    for p in 0..g.real_len() {
        let bb = [bv[0][p], bv[1][p], bv[2][p]];
        let cross = [xv[1] * bb[2] - xv[2] * bb[1], xv[2] * bb[0] - xv[0] * bb[2], xv[0] * bb[1] - xv[1] * bb[0]];
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| xv[j] * ov[j][i][p]).sum();
            assert!((s - cross[i]).abs() < 1e-14);
        }
    }
    let compressible = VectorField::from_fn(&g, |x| [x[0].sin(), 0.0, 0.0]);
    assert!(curvature_from_magnetic(&compressible).is_err());
}

#[test]
fn algebra_validation() {
    let c = vec![0.0; 8];
    assert!(LieAlgebraSpec::new(2, c.clone(), vec![1.0, 0.0, 0.0, 1.0], true).is_ok());
    assert!(LieAlgebraSpec::new(2, c, vec![1.0, 2.0, 0.0, 1.0], false).is_err());
    let s = LieAlgebraSpec::su2();
    assert_eq!(s.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
    assert!(s.is_ad_invariant());
}
