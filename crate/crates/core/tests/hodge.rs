mod common;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ymh::hodge::{solve_weighted_poisson, weighted_leray_project, ProjectionWorkspace};
use ymh::spectral::{dealiased_product, integrate, SpectralField, TorusGrid, VectorField};
use ymh::Error;

fn zero_mean_random(g: &TorusGrid, band: usize, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::random_band_limited(g, band, &mut rng);
    f.coefficients_mut()[0] = Complex64::new(0.0, 0.0);
    f
}

#[test]
fn variable_weight_solve_matches_dense_oracle() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let v = SpectralField::from_fn(&g, |x| 1.0 + 0.5 * x[0].sin());
    let ws = ProjectionWorkspace::new(v.clone(), 1e-13, 500).unwrap();
    let rhs = zero_mean_random(&g, 7, 31);
    let p = solve_weighted_poisson(&rhs, &ws).unwrap();
    let oracle = common::dense_weighted_poisson(&v, &rhs);
    let err = oracle.iter().map(|(k, c)| (p.coeff(k) - c).norm()).fold(0.0, f64::max);
    assert!(err <= 1e-9, "{err:e}");
    assert_eq!(p.coeff(&[0, 0]).norm(), 0.0);
}

#[test]
fn constant_weight_matches_classical_leray() {
    let g = TorusGrid::new(3, 16, 3.0).unwrap();
    let ws = ProjectionWorkspace::uniform(&g, 2.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = VectorField::random_band_limited(&g, 7, &mut rng);
    let px = weighted_leray_project(&x, &ws).unwrap();
    let s = g.wavenumber_scale();
    let top = (g.n() / 2 - 1) as i64;
    let mut worst = 0.0f64;
    for a in -top..=top {
        for b in -top..=top {
            for c in -top..=top {
                let k = [a, b, c];
                let kk: Vec<f64> = k.iter().map(|&v| v as f64 * s).collect();
                let k2: f64 = kk.iter().map(|v| v * v).sum();
                let xh: Vec<Complex64> = (0..3).map(|i| x.component(i).coeff(&k)).collect();
                let kx: Complex64 = (0..3).map(|i| xh[i] * kk[i]).sum();
                for i in 0..3 {
                    let want = if k2 == 0.0 { xh[i] } else { xh[i] - kx * kk[i] / k2 };
                    worst = worst.max((px.component(i).coeff(&k) - want).norm());
                }
            }
        }
    }
    assert!(worst <= 1e-13, "{worst:e}");
}

fn bumpy(g: &TorusGrid) -> ProjectionWorkspace {
    let v = SpectralField::from_fn(g, |x| 1.0 + 0.5 * x[0].sin() + 0.25 * (x[1] - 0.4).cos());
    ProjectionWorkspace::new(v, 1e-12, 500).unwrap()
}

#[test]
fn projector_kills_gradients() {
    let g = TorusGrid::periodic(2, 32).unwrap();
    let q = zero_mean_random(&g, 10, 8);
    for ws in [ProjectionWorkspace::uniform(&g, 1.0).unwrap(), bumpy(&g)] {
        let p = weighted_leray_project(&q.gradient(), &ws).unwrap();
        assert!(p.max_coeff() <= 1e-12 * q.gradient().max_coeff().max(1.0), "{:e}", p.max_coeff());
    }
}

#[test]
fn projector_is_idempotent_and_orthogonal() {
    let g = TorusGrid::periodic(2, 32).unwrap();
    let ws = bumpy(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let x = VectorField::random_band_limited(&g, 10, &mut rng);
    let px = weighted_leray_project(&x, &ws).unwrap();
    let ppx = weighted_leray_project(&px, &ws).unwrap();
    assert!((&ppx - &px).rms() <= 1e-11 * x.rms());
    let div = ws.weighted_divergence(&px).unwrap();
    assert!(div.rms() <= 1e-10 * x.rms());

    // the two parts are orthogonal in the V-weighted inner product
    let rest = &x - &px;
    let mut dot = 0.0;
    for i in 0..2 {
        dot += integrate(&dealiased_product(px.component(i), rest.component(i)).unwrap(), ws.weight()).unwrap();
    }
    let norms = x.rms() * x.rms() * g.volume();
    assert!(dot.abs() <= 1e-10 * norms, "{dot:e}");
}

#[test]
fn projector_is_linear() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let ws = bumpy(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let x = VectorField::random_band_limited(&g, 5, &mut rng);
    let y = VectorField::random_band_limited(&g, 5, &mut rng);
    let lhs = weighted_leray_project(&(&x + &y.scale(3.0)), &ws).unwrap();
    let rhs = &weighted_leray_project(&x, &ws).unwrap() + &weighted_leray_project(&y, &ws).unwrap().scale(3.0);
    assert!((&lhs - &rhs).rms() <= 1e-11 * lhs.rms());
}

#[test]
fn solenoidal_input_is_unchanged() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let ws = ProjectionWorkspace::uniform(&g, 1.0).unwrap();
    let x = VectorField::from_fn(&g, |p| [p[0].sin() * p[1].cos(), -p[0].cos() * p[1].sin(), 0.0]);
    let px = weighted_leray_project(&x, &ws).unwrap();
    assert!((&px - &x).max_coeff() <= 1e-12);
}

#[test]
fn errors_are_reported() {
    let g = TorusGrid::periodic(2, 16).unwrap();
    let ws = bumpy(&g);
    let err = solve_weighted_poisson(&SpectralField::constant(&g, 0.1), &ws).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(err.to_string().contains("solvability requires zero mean"));
    let v = SpectralField::from_fn(&g, |x| 0.2 + x[1].cos());
    assert!(ProjectionWorkspace::new(v, 1e-12, 100).is_err());
}
