//! Run configuration in TOML.
//!
//! Every table rejects unknown keys. Mode lists describe fields as sums of
//! `amplitude * cos(2 pi k.x / L + phase)`; `axis` selects a vector component
//! and `component` a Lie-algebra basis direction. See `docs/config.md` for
//! the full grammar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GaugeField, GaugeGeometry, GaugePotential, LieAlgebraSpec};
use crate::hodge::ProjectionWorkspace;
use crate::hopf::HopfSampler;
use crate::spectral::{SpectralField, TorusGrid, VectorField};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Simulate,
    VerifyHopf,
    VerifyAlgebra,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    #[default]
    Abelian,
    Su2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub resolution: usize,
    #[serde(default = "default_period")]
    pub period: f64,
}

fn default_period() -> f64 {
    2.0 * std::f64::consts::PI
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    #[serde(default)]
    pub kind: AlgebraKind,
    /// Row-major inner product; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<f64>>,
    /// Defaults to true without an explicit metric and false with one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ad_invariant: Option<bool>,
}

/// One cosine mode of a field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    pub k: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

impl ModeEntry {
    pub fn new(axis: Option<usize>, component: Option<usize>, k: &[i64], amplitude: f64, phase: f64) -> Self {
        ModeEntry { axis, component, k: k.to_vec(), amplitude, phase }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    /// Entries need `axis` and `component`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub potential: Vec<ModeEntry>,
    /// Abelian 3-D only; entries need `axis`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub magnetic: Vec<ModeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    #[serde(default = "one")]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeEntry>,
}

fn one() -> f64 {
    1.0
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig { constant: 1.0, modes: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Entries need `axis`; the field is projected at load.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub velocity: Vec<ModeEntry>,
    /// Entries need `component`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub charge: Vec<ModeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_steps() -> usize {
    100
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { dt: default_dt(), steps: default_steps() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_diag_every")]
    pub diag_every: usize,
    /// Zero disables snapshots.
    #[serde(default)]
    pub snap_every: usize,
    /// Record per-step wall time; off makes outputs bit-reproducible.
    #[serde(default = "yes")]
    pub timing: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("output")
}

fn default_diag_every() -> usize {
    10
}

fn yes() -> bool {
    true
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), diag_every: default_diag_every(), snap_every: 0, timing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_tolerance() -> f64 {
    crate::hodge::DEFAULT_TOLERANCE
}

fn default_max_iterations() -> usize {
    crate::hodge::DEFAULT_MAX_ITERATIONS
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tolerance: default_tolerance(), max_iterations: default_max_iterations() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_order")]
    pub quadrature_order: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
}

fn default_samples() -> usize {
    HopfSampler::default().samples
}

fn default_order() -> usize {
    HopfSampler::default().quadrature_order
}

fn default_replicates() -> usize {
    HopfSampler::default().replicates
}

impl Default for HopfConfig {
    fn default() -> Self {
        HopfConfig { samples: default_samples(), quadrature_order: default_order(), replicates: default_replicates() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_instances")]
    pub instances: usize,
}

fn default_resolution() -> usize {
    32
}

fn default_instances() -> usize {
    50
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { resolution: default_resolution(), instances: default_instances() }
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub grid: GridConfig,
    #[serde(default)]
    pub algebra: AlgebraConfig,
    #[serde(default)]
    pub gauge: GaugeConfig,
    #[serde(default)]
    pub weight: WeightConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub hopf: HopfConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_seed() -> u64 {
    HopfSampler::default().seed
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl SimConfig {
    /// Parses and validates TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| line_of(text, s.start));
            Error::Parse { line, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn torus(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid.dim, self.grid.resolution, self.grid.period).map_err(|e| {
            let field = if !(self.grid.dim == 2 || self.grid.dim == 3) {
                "grid.dim"
            } else if !(self.grid.period.is_finite() && self.grid.period > 0.0) {
                "grid.period"
            } else {
                "grid.resolution"
            };
            Error::config(field, strip_argument(e))
        })
    }

    pub fn algebra_spec(&self) -> Result<LieAlgebraSpec> {
        let m = match self.algebra.kind {
            AlgebraKind::Abelian => 1,
            AlgebraKind::Su2 => 3,
        };
        let metric = self.algebra.metric.clone().unwrap_or_else(|| identity(m));
        if metric.len() != m * m {
            return Err(Error::config("algebra.metric", format!("expected {} entries, got {}", m * m, metric.len())));
        }
        let ad_invariant = self.algebra.ad_invariant.unwrap_or(self.algebra.metric.is_none());
        let spec = match self.algebra.kind {
            AlgebraKind::Abelian => LieAlgebraSpec::new(1, vec![0.0], metric, ad_invariant),
            AlgebraKind::Su2 => LieAlgebraSpec::su2_with_metric(metric, ad_invariant),
        };
        spec.map_err(|e| Error::config("algebra.metric", strip_argument(e)))
    }

    pub fn sampler(&self) -> HopfSampler {
        HopfSampler {
            quadrature_order: self.hopf.quadrature_order,
            samples: self.hopf.samples,
            replicates: self.hopf.replicates,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.torus()?;
        if !(self.time.dt > 0.0 && self.time.dt.is_finite()) {
            return Err(Error::config("time.dt", "dt must be positive"));
        }
        if self.output.diag_every == 0 {
            return Err(Error::config("output.diag_every", "must be at least 1"));
        }
        if !(self.solver.tolerance >= 1e-14 && self.solver.tolerance.is_finite()) {
            return Err(Error::config("solver.tolerance", "tolerance must be at least 1e-14"));
        }
        if self.solver.max_iterations == 0 {
            return Err(Error::config("solver.max_iterations", "must be positive"));
        }
        self.sampler().validate().map_err(|e| Error::config("hopf", strip_argument(e)))?;
        if self.verify.resolution < 8 || !self.verify.resolution.is_power_of_two() {
            return Err(Error::config("verify.resolution", "resolution must be a power of two >= 8"));
        }
        if self.verify.instances == 0 {
            return Err(Error::config("verify.instances", "must be positive"));
        }
        if self.mode == Mode::Simulate {
            let geom = self.geometry()?;
            self.initial_fields(&geom)?;
        } else {
            self.algebra_spec()?;
        }
        Ok(())
    }

    fn weight_field(&self, grid: &TorusGrid) -> Result<SpectralField> {
        let mut v = SpectralField::constant(grid, self.weight.constant);
        for (i, e) in self.weight.modes.iter().enumerate() {
            let field = format!("weight.modes[{i}]");
            forbid(e.axis, &field, "axis")?;
            forbid(e.component, &field, "component")?;
            add_entry(&mut v, e, &field)?;
        }
        Ok(v)
    }

    /// Geometry described by the `algebra`, `gauge`, `weight` and `solver` tables.
    pub fn geometry(&self) -> Result<GaugeGeometry> {
        let grid = self.torus()?;
        let alg = self.algebra_spec()?;
        let ws = ProjectionWorkspace::new(self.weight_field(&grid)?, self.solver.tolerance, self.solver.max_iterations)
            .map_err(|e| Error::config("weight", strip_argument(e)))?;
        if !self.gauge.magnetic.is_empty() {
            if !self.gauge.potential.is_empty() {
                return Err(Error::config("gauge", "give either a potential or a magnetic field, not both"));
            }
            if grid.dim() != 3 || alg.dim() != 1 {
                return Err(Error::config("gauge.magnetic", "a magnetic field needs an abelian algebra on a 3-D grid"));
            }
            let b = self.magnetic_field(&grid)?;
            return GaugeGeometry::with_magnetic_field(&b, ws).map_err(|e| Error::config("gauge.magnetic", strip_argument(e)));
        }
        let mut a = vec![GaugeField::zeros(&grid, alg.dim()); grid.dim()];
        for (i, e) in self.gauge.potential.iter().enumerate() {
            let field = format!("gauge.potential[{i}]");
            let axis = require(e.axis, &field, "axis", grid.dim())?;
            let comp = require(e.component, &field, "component", alg.dim())?;
            add_entry(a[axis].component_mut(comp), e, &field)?;
        }
        let potential = GaugePotential::new(a)?;
        GaugeGeometry::new(alg, Some(potential), ws)
    }

    /// The magnetic field, zero when none is configured.
    pub fn magnetic_field(&self, grid: &TorusGrid) -> Result<VectorField> {
        let mut b = vec![SpectralField::zeros(grid); grid.dim()];
        for (i, e) in self.gauge.magnetic.iter().enumerate() {
            let field = format!("gauge.magnetic[{i}]");
            let axis = require(e.axis, &field, "axis", grid.dim())?;
            forbid(e.component, &field, "component")?;
            add_entry(&mut b[axis], e, &field)?;
        }
        VectorField::new(b)
    }

    /// Initial `(X, f)` before truncation and projection.
    pub fn initial_fields(&self, geom: &GaugeGeometry) -> Result<(VectorField, GaugeField)> {
        let grid = *geom.grid();
        let mut x = vec![SpectralField::zeros(&grid); grid.dim()];
        for (i, e) in self.initial.velocity.iter().enumerate() {
            let field = format!("initial.velocity[{i}]");
            let axis = require(e.axis, &field, "axis", grid.dim())?;
            forbid(e.component, &field, "component")?;
            add_entry(&mut x[axis], e, &field)?;
        }
        let m = geom.algebra().dim();
        let mut f = GaugeField::zeros(&grid, m);
        for (i, e) in self.initial.charge.iter().enumerate() {
            let field = format!("initial.charge[{i}]");
            let comp = require(e.component, &field, "component", m)?;
            forbid(e.axis, &field, "axis")?;
            add_entry(f.component_mut(comp), e, &field)?;
        }
        Ok((VectorField::new(x)?, f))
    }

    /// Built-in configuration by name.
    pub fn template(name: &str) -> Result<Self> {
        let cfg = match name {
            "taylor-green" => taylor_green(),
            "superconductivity" => superconductivity(),
            "chromo" => chromo(),
            "passive" => passive(),
            "hopf" => SimConfig { mode: Mode::VerifyHopf, ..base(2, 32) },
            "algebra" => SimConfig { mode: Mode::VerifyAlgebra, ..base(2, 32) },
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown template {name:?}; available: {}",
                    TEMPLATES.join(", ")
                )))
            }
        };
        Ok(cfg)
    }
}

pub const TEMPLATES: &[&str] = &["taylor-green", "superconductivity", "chromo", "passive", "hopf", "algebra"];

fn identity(m: usize) -> Vec<f64> {
    let mut h = vec![0.0; m * m];
    for a in 0..m {
        h[a * m + a] = 1.0;
    }
    h
}

fn strip_argument(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn require(value: Option<usize>, field: &str, key: &str, bound: usize) -> Result<usize> {
    match value {
        None => Err(Error::config(field, format!("missing key `{key}`"))),
        Some(v) if v >= bound => Err(Error::config(field, format!("{key} {v} out of range (must be < {bound})"))),
        Some(v) => Ok(v),
    }
}

fn forbid(value: Option<usize>, field: &str, key: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::config(field, format!("key `{key}` does not apply here"))),
        None => Ok(()),
    }
}

fn add_entry(f: &mut SpectralField, e: &ModeEntry, field: &str) -> Result<()> {
    if !(e.amplitude.is_finite() && e.phase.is_finite()) {
        return Err(Error::config(field, "amplitude and phase must be finite"));
    }
    f.add_mode(&e.k, e.amplitude, e.phase).map_err(|err| Error::config(field, strip_argument(err)))
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

fn base(dim: usize, n: usize) -> SimConfig {
    SimConfig {
        mode: Mode::Simulate,
        seed: default_seed(),
        grid: GridConfig { dim, resolution: n, period: default_period() },
        algebra: AlgebraConfig::default(),
        gauge: GaugeConfig::default(),
        weight: WeightConfig::default(),
        initial: InitialConfig::default(),
        time: TimeConfig { dt: 1e-3, steps: 1000 },
        output: OutputConfig::default(),
        solver: SolverConfig::default(),
        hopf: HopfConfig::default(),
        verify: VerifyConfig::default(),
    }
}

/// `(sin x cos y, -cos x sin y)` as cosine modes.
fn taylor_green_modes() -> Vec<ModeEntry> {
    vec![
        ModeEntry::new(Some(0), None, &[1, 1], 0.5, -HALF_PI),
        ModeEntry::new(Some(0), None, &[1, -1], 0.5, -HALF_PI),
        ModeEntry::new(Some(1), None, &[1, 1], -0.5, -HALF_PI),
        ModeEntry::new(Some(1), None, &[1, -1], 0.5, -HALF_PI),
    ]
}

fn taylor_green() -> SimConfig {
    let mut c = base(2, 32);
    c.initial.velocity = taylor_green_modes();
    c
}

fn passive() -> SimConfig {
    let mut c = taylor_green();
    c.initial.charge = vec![
        ModeEntry::new(None, Some(0), &[1, 0], 1.0, 0.0),
        ModeEntry::new(None, Some(0), &[0, 2], 0.5, 0.3),
    ];
    c
}

fn superconductivity() -> SimConfig {
    let mut c = base(3, 32);
    c.gauge.magnetic = vec![ModeEntry::new(Some(2), None, &[1, 0, 0], 1.0, 0.0)];
    c.initial.velocity = vec![
        ModeEntry::new(Some(0), None, &[0, 1, 0], 1.0, -HALF_PI),
        ModeEntry::new(Some(0), None, &[0, 0, 2], 0.3, 0.0),
        ModeEntry::new(Some(1), None, &[0, 0, 1], 1.0, -HALF_PI),
        ModeEntry::new(Some(1), None, &[1, 0, 0], 0.2, 0.0),
        ModeEntry::new(Some(2), None, &[1, 1, 0], 0.5, -HALF_PI),
        ModeEntry::new(Some(2), None, &[1, -1, 0], 0.5, -HALF_PI),
    ];
    c.initial.charge = vec![
        ModeEntry::new(None, Some(0), &[1, 0, 0], 1.0, 0.0),
        ModeEntry::new(None, Some(0), &[0, 1, 2], 0.5, -HALF_PI),
    ];
    c
}

fn chromo() -> SimConfig {
    let mut c = base(2, 32);
    c.algebra.kind = AlgebraKind::Su2;
    c.gauge.potential = vec![
        ModeEntry::new(Some(0), Some(0), &[0, 1], 0.5, 0.0),
        ModeEntry::new(Some(1), Some(1), &[1, 0], 0.5, -HALF_PI),
        ModeEntry::new(Some(1), Some(2), &[1, 1], 0.2, 0.0),
    ];
    c.initial.velocity = taylor_green_modes();
    c.initial.velocity.push(ModeEntry::new(Some(0), None, &[0, 2], 0.3, 0.0));
    c.initial.charge = vec![
        ModeEntry::new(None, Some(0), &[1, 0], 1.0, 0.0),
        ModeEntry::new(None, Some(1), &[0, 1], 0.8, -HALF_PI),
        ModeEntry::new(None, Some(2), &[1, 1], 0.6, 0.4),
        ModeEntry::new(None, Some(2), &[0, 0], 0.5, 0.0),
    ];
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[grid]\ndim = 2\nresolution = 16\n\n[[initial.velocity]]\naxis = 0\nk = [0, 1]\namplitude = 1.0\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = SimConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.mode, Mode::Simulate);
        assert_eq!(c.grid.period, 2.0 * std::f64::consts::PI);
        assert_eq!(c.algebra.kind, AlgebraKind::Abelian);
        assert_eq!(c.time, TimeConfig { dt: 1e-3, steps: 100 });
        assert_eq!(c.output.diag_every, 10);
        assert_eq!(c.solver.tolerance, 1e-12);
        assert_eq!(c.initial.velocity[0].phase, 0.0);
    }

    #[test]
    fn bad_resolution_names_field() {
        let err = SimConfig::parse(&MINIMAL.replace("16", "17")).unwrap_err();
        match err {
            Error::InvalidConfig { field, message } => {
                assert_eq!(field, "grid.resolution");
                assert!(message.contains("resolution must be a power of two"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{MINIMAL}\n[time]\ndt = 0.01\nstpes = 4\n");
        match SimConfig::parse(&text).unwrap_err() {
            Error::Parse { line, message } => {
                assert_eq!(line, 12);
                assert!(message.contains("stpes"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn templates_round_trip() {
        for name in TEMPLATES {
            let c = SimConfig::template(name).unwrap();
            c.validate().unwrap();
            let again = SimConfig::parse(&c.to_toml()).unwrap();
            assert_eq!(again, c, "{name}");
        }
        assert!(SimConfig::template("nope").is_err());
    }

    #[test]
    fn entry_keys_checked() {
        let text = MINIMAL.replace("axis = 0", "axis = 2");
        assert!(matches!(SimConfig::parse(&text), Err(Error::InvalidConfig { .. })));
        let text = MINIMAL.replace("axis = 0\n", "");
        assert!(matches!(SimConfig::parse(&text), Err(Error::InvalidConfig { .. })));
        let text = MINIMAL.replace("k = [0, 1]", "k = [0, 8]");
        assert!(matches!(SimConfig::parse(&text), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn nonpositive_weight_rejected() {
        let text = format!("{MINIMAL}\n[weight]\nconstant = 0.5\n[[weight.modes]]\nk = [1, 0]\namplitude = 1.0\n");
        match SimConfig::parse(&text).unwrap_err() {
            Error::InvalidConfig { field, .. } => assert_eq!(field, "weight"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn template_fields_match_closed_forms() {
        let c = SimConfig::template("taylor-green").unwrap();
        let geom = c.geometry().unwrap();
        let (x, _) = c.initial_fields(&geom).unwrap();
        let g = *geom.grid();
        let want = VectorField::from_fn(&g, |p| [p[0].sin() * p[1].cos(), -p[0].cos() * p[1].sin(), 0.0]);
        assert!((&x - &want).max_coeff() < 1e-15);
    }
}
