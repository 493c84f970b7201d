//! Self-contained verification suites behind `ymh verify`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::self_coadjoint_defect;
use crate::error::Result;
use crate::geometry::{GaugeField, GaugeGeometry, GaugePotential, LieAlgebraSpec};
use crate::hodge::ProjectionWorkspace;
use crate::hopf::{hopf_integration_check, hopf_orbit_volume, hopf_orbit_volume_at, HopfCheck, HopfSampler, SphericalFunction};
use crate::lie_algebra::{ad, bracket, coadjoint, flat, pairing, AlgebraElement};
use crate::spectral::{Band, Collocation, TorusGrid, VectorField};

/// One named residual and the bound it must meet.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), value, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct HopfReport {
    pub orbit_volume: f64,
    /// Largest deviation of the fiber volume over random base points.
    pub orbit_spread: f64,
    pub functions: Vec<(String, HopfCheck)>,
    pub checks: Vec<Check>,
}

impl HopfReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed) && self.functions.iter().all(|(_, c)| c.passed())
    }
}

/// Fiber volume checks and the integration formula for `1, z, z^2, 1 + z^2`.
pub fn verify_hopf(sampler: &HopfSampler) -> Result<HopfReport> {
    sampler.validate()?;
    let orbit_volume = hopf_orbit_volume();
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    let mut orbit_spread = 0.0f64;
    for _ in 0..100 {
        let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
        let phi = 2.0 * PI * rng.gen::<f64>();
        orbit_spread = orbit_spread.max((hopf_orbit_volume_at(theta, phi) - orbit_volume).abs());
    }
    let tests: [(&str, fn([f64; 3]) -> f64); 4] =
        [("1", |_| 1.0), ("z", |p| p[2]), ("z^2", |p| p[2] * p[2]), ("1+z^2", |p| 1.0 + p[2] * p[2])];
    let mut functions = Vec::new();
    for (name, func) in tests {
        let f = SphericalFunction::project(2, func)?;
        functions.push((name.to_string(), hopf_integration_check(&f, sampler)?));
    }
    let s3 = 2.0 * PI * PI;
    let unit = &functions[0].1;
    let checks = vec![
        Check::new("orbit volume - 2 pi", (orbit_volume - 2.0 * PI).abs(), 1e-10),
        Check::new("orbit volume spread", orbit_spread, 1e-10),
        Check::new("orbit volume * pi - 2 pi^2", (orbit_volume * PI - s3).abs(), 1e-10),
        Check::new("lhs(1) - 2 pi^2", (unit.lhs - s3).abs(), 1e-10),
        Check::new("rhs(1) - 2 pi^2", (unit.rhs - s3).abs(), 1e-10),
    ];
    Ok(HopfReport { orbit_volume, orbit_spread, functions, checks })
}

#[derive(Clone, Debug)]
pub struct AlgebraReport {
    pub resolution: usize,
    pub instances: usize,
    pub checks: Vec<Check>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

fn su2_geometry(grid: &TorusGrid, band_a: usize, rng: &mut ChaCha8Rng) -> Result<GaugeGeometry> {
    let a = (0..grid.dim()).map(|_| GaugeField::random_band_limited(grid, 3, band_a, rng).scale(0.3)).collect();
    GaugeGeometry::new(LieAlgebraSpec::su2(), Some(GaugePotential::new(a)?), ProjectionWorkspace::uniform(grid, 1.0)?)
}

fn random_element(geom: &GaugeGeometry, band: usize, rng: &mut ChaCha8Rng) -> Result<AlgebraElement> {
    let g = geom.grid();
    let x = VectorField::random_band_limited(g, band, rng);
    let f = GaugeField::random_band_limited(g, geom.algebra().dim(), band, rng);
    AlgebraElement::projected(x, f, geom)
}

/// Bracket evaluated term by term at the points of a `4N` grid, then
/// truncated to the 2/3 band.
pub fn collocation_bracket(u: &AlgebraElement, v: &AlgebraElement, geom: &GaugeGeometry) -> Result<AlgebraElement> {
    let grid = *geom.grid();
    let col = Collocation::with_size(&grid, 4 * grid.n());
    let d = grid.dim();
    let alg = geom.algebra();
    let m = alg.dim();
    let n = col.len();
    let vals = |f: &crate::spectral::SpectralField| col.values(f);
    let z: Vec<Vec<f64>> = u.x().components().iter().map(vals).collect();
    let zp: Vec<Vec<f64>> = v.x().components().iter().map(vals).collect();
    let f: Vec<Vec<f64>> = u.f().components().iter().map(vals).collect();
    let fp: Vec<Vec<f64>> = v.f().components().iter().map(vals).collect();
    let mut dz = Vec::new();
    let mut dzp = Vec::new();
    let mut df = Vec::new();
    let mut dfp = Vec::new();
    for j in 0..d {
        dz.push(u.x().components().iter().map(|c| Ok(vals(&c.derivative(j)?))).collect::<Result<Vec<_>>>()?);
        dzp.push(v.x().components().iter().map(|c| Ok(vals(&c.derivative(j)?))).collect::<Result<Vec<_>>>()?);
        df.push(u.f().components().iter().map(|c| Ok(vals(&c.derivative(j)?))).collect::<Result<Vec<_>>>()?);
        dfp.push(v.f().components().iter().map(|c| Ok(vals(&c.derivative(j)?))).collect::<Result<Vec<_>>>()?);
    }
    let a: Option<Vec<Vec<Vec<f64>>>> =
        geom.potential().map(|a| a.components().iter().map(|ai| ai.components().iter().map(vals).collect()).collect());
    let om = geom.curvature();
    let mut omv = vec![vec![vec![vec![0.0; n]; m]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            for (c, comp) in om.upper(i, j).components().iter().enumerate() {
                omv[i][j][c] = vals(comp);
            }
        }
    }
    let br = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (e, o) in out.iter_mut().enumerate() {
            for p in 0..m {
                for q in 0..m {
                    *o += alg.structure_constant(p, q, e) * x[p] * y[q];
                }
            }
        }
        out
    };

    let mut base = vec![vec![0.0; n]; d];
    let mut charge = vec![vec![0.0; n]; m];
    for p in 0..n {
        for i in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                s += z[j][p] * dzp[j][i][p] - zp[j][p] * dz[j][i][p];
            }
            base[i][p] = -s;
        }
        let fp_p: Vec<f64> = (0..m).map(|c| fp[c][p]).collect();
        let f_p: Vec<f64> = (0..m).map(|c| f[c][p]).collect();
        let ff = br(&f_p, &fp_p);
        // covariant derivatives D_Z f' and D_Z' f
        let mut dz_fp = vec![0.0; m];
        let mut dzp_f = vec![0.0; m];
        for c in 0..m {
            for j in 0..d {
                dz_fp[c] += z[j][p] * dfp[j][c][p];
                dzp_f[c] += zp[j][p] * df[j][c][p];
            }
        }
        if let Some(a) = &a {
            let mut az = vec![0.0; m];
            let mut azp = vec![0.0; m];
            for j in 0..d {
                for c in 0..m {
                    az[c] += z[j][p] * a[j][c][p];
                    azp[c] += zp[j][p] * a[j][c][p];
                }
            }
            let t1 = br(&az, &fp_p);
            let t2 = br(&azp, &f_p);
            for c in 0..m {
                dz_fp[c] += t1[c];
                dzp_f[c] += t2[c];
            }
        }
        for c in 0..m {
            let mut o = 0.0;
            for i in 0..d {
                for j in i + 1..d {
                    o += (z[i][p] * zp[j][p] - z[j][p] * zp[i][p]) * omv[i][j][c][p];
                }
            }
            charge[c][p] = -(ff[c] + dz_fp[c] - dzp_f[c] + o);
        }
    }
    let x = VectorField::new(base.into_iter().map(|b| col.to_field(b, Band::Dealiased)).collect())?;
    let f = GaugeField::new(charge.into_iter().map(|c| col.to_field(c, Band::Dealiased)).collect())?;
    Ok(AlgebraElement::from_parts(x, f))
}

/// Bracket oracle, antisymmetry, Jacobi, coadjoint duality and the
/// self-coadjoint identity on random su(2) instances over `T^2`.
pub fn verify_algebra(resolution: usize, instances: usize, seed: u64) -> Result<AlgebraReport> {
    let grid = TorusGrid::periodic(2, resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quarter = resolution / 4;
    // the inner brackets of the Jacobi sum must not be truncated: with a
    // band-1 potential the curvature has band 2, so 2 b + 2 <= N/3
    let inner = (resolution / 8).min((grid.dealias_cutoff() - 2) / 2);
    let geom = su2_geometry(&grid, (resolution / 8).max(1), &mut rng)?;
    let geom_j = su2_geometry(&grid, 1, &mut rng)?;
    let (mut oracle, mut anti, mut jac, mut dual, mut selfc) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let u = random_element(&geom, quarter, &mut rng)?;
        let v = random_element(&geom, quarter, &mut rng)?;
        let w = random_element(&geom, quarter, &mut rng)?;
        let b = bracket(&u, &v, &geom)?;
        let o = collocation_bracket(&u, &v, &geom)?;
        oracle = oracle.max((&b - &o).norm() / o.norm().max(f64::MIN_POSITIVE));
        anti = anti.max((&b + &bracket(&v, &u, &geom)?).norm());

        let d = flat(&w, &geom);
        let lhs = pairing(&coadjoint(&u, &d, &geom)?, &v, &geom)?;
        let rhs = pairing(&d, &ad(&u, &v, &geom)?, &geom)?;
        dual = dual.max((lhs + rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
        selfc = selfc.max(self_coadjoint_defect(u.f(), &geom));

        let (p, q, r) = (
            random_element(&geom_j, inner, &mut rng)?,
            random_element(&geom_j, inner, &mut rng)?,
            random_element(&geom_j, inner, &mut rng)?,
        );
        let t1 = bracket(&p, &bracket(&q, &r, &geom_j)?, &geom_j)?;
        let t2 = bracket(&q, &bracket(&r, &p, &geom_j)?, &geom_j)?;
        let t3 = bracket(&r, &bracket(&p, &q, &geom_j)?, &geom_j)?;
        let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(f64::MIN_POSITIVE);
        jac = jac.max((&(&t1 + &t2) + &t3).norm() / scale);
    }
    Ok(AlgebraReport {
        resolution,
        instances,
        checks: vec![
            Check::new("bracket vs collocation oracle (relative)", oracle, 1e-10),
            Check::new("antisymmetry", anti, 0.0),
            Check::new("Jacobi residual (relative)", jac, 1e-10),
            Check::new("coadjoint duality (relative)", dual, 1e-10),
            Check::new("ad*(f) flat(f)", selfc, 1e-12),
        ],
    })
}
