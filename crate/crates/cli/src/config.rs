//! JSON experiment configuration, validation and resolution into library objects.

use std::sync::Arc;

use homframe::heisenberg::{window, Grid, Signal, WindowKind};
use homframe::pointset::Generator;
use homframe::{GroupSpec, HomogeneousNorm, PointSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default)]
    pub norm: NormConfig,
    #[serde(default)]
    pub window: WindowConfig,
    #[serde(default)]
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub density: DensityConfig,
    #[serde(default)]
    pub dual: DualConfig,
    #[serde(default)]
    pub schur: SchurConfig,
    #[serde(default)]
    pub orthogonality: OrthogonalityConfig,
    #[serde(default)]
    pub seed: u64,
    /// Where results go; excluded from the config hash.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// A builtin group name or an explicit description with 1-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    Builtin(String),
    Custom(CustomGroup),
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig::Builtin("plane".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomGroup {
    pub name: String,
    pub dim: usize,
    pub step: usize,
    pub weights: Vec<u32>,
    /// `[i, j, k, c]`: `[e_i, e_j]` has component `c` along `e_k`, indices from 1.
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormConfig {
    #[default]
    WeightedMax,
    WeightedSum { p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowName {
    Gaussian,
    Hermite,
    Exponential,
    Box,
    Sinc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub kind: WindowName,
    /// Hermite order; ignored by the other windows.
    #[serde(default)]
    pub order: usize,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
}

fn default_grid_points() -> usize {
    1024
}

fn default_grid_step() -> f64 {
    1.0 / 32.0
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { kind: WindowName::Gaussian, order: 0, grid_points: default_grid_points(), grid_step: default_grid_step() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LatticeConfig {
    /// Columns of the generating matrix.
    Lattice { basis: Vec<Vec<f64>> },
    QuasiLattice { basis: Vec<Vec<f64>>, complement: Vec<f64> },
    Explicit { points: Vec<Vec<f64>> },
    /// Base set with every point moved by a random element of `B_jitter`; the seed
    /// defaults to the experiment seed.
    Perturbed { base: Box<LatticeConfig>, jitter: f64, seed: Option<u64> },
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig::Lattice { basis: vec![vec![1.0, 0.0], vec![0.0, 1.0]] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    /// Nested truncation radii, increasing.
    pub radii: Vec<f64>,
    /// Boundary guard; defaults to 2 for frames and 0 for Riesz sequences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<f64>,
    /// Radius of the generated point set; defaults to the largest truncation radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { radii: vec![6.0, 8.0, 10.0], guard: None, window: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub r: Vec<f64>,
    /// `frame` or `riesz`.
    #[serde(default = "default_mode")]
    pub mode: ModeName,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { r: (0..=10).map(|k| 0.95 + 0.01 * k as f64).collect(), mode: default_mode() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Frame,
    Riesz,
}

fn default_mode() -> ModeName {
    ModeName::Frame
}

impl From<ModeName> for homframe::frame::FrameMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Frame => homframe::frame::FrameMode::Frame,
            ModeName::Riesz => homframe::frame::FrameMode::Riesz,
        }
    }
}

/// A probe exponent: a number or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(String),
}

impl Exponent {
    pub fn value(&self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(*p),
            Exponent::Named(s) if s == "inf" => Some(f64::INFINITY),
            Exponent::Named(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub p: Vec<Exponent>,
    #[serde(default = "default_mode")]
    pub mode: ModeName,
    pub trials: usize,
    pub iterations: usize,
    pub certify: bool,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            p: vec![Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Named("inf".into())],
            mode: default_mode(),
            trials: 4,
            iterations: 60,
            certify: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    /// Ball radii; defaults to half and a quarter of the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Dilation factors applied to the set (radii scale along).
    pub dilations: Vec<f64>,
    pub max_centers: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self { radii: None, dilations: vec![1.0], max_centers: 40_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualConfig {
    /// `none` fails on ill-conditioned systems, `spectral-floor` proceeds.
    pub regularization: RegularizationName,
    pub floor_rel: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_radius: Option<f64>,
    /// Number of Hermite test signals for the reconstruction residual.
    pub hermite_tests: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularizationName {
    None,
    SpectralFloor,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self { regularization: RegularizationName::None, floor_rel: 1e-8, interior_radius: None, hermite_tests: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchurConfig {
    /// Weight exponent; defaults to `Q + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub bin: f64,
    /// Matrix file (binary with a JSON sidecar); without it the Gramian of the configured system is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    /// Guard band for the pseudo-inverse of the Gramian.
    pub guard: f64,
    pub floor_rel: f64,
}

impl Default for SchurConfig {
    fn default() -> Self {
        Self { alpha: None, bin: 0.5, matrix: None, guard: 5.0, floor_rel: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrthogonalityConfig {
    pub extent: f64,
    pub step: f64,
    /// Hermite orders whose pairs are tested against the Gaussian window.
    pub orders: Vec<usize>,
}

impl Default for OrthogonalityConfig {
    fn default() -> Self {
        Self { extent: 12.0, step: 0.125, orders: vec![0, 1, 2, 3] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
}

/// Parses a configuration, reporting syntax errors with their position.
pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config {
        message: e.to_string(),
        line: Some(e.line()),
        column: Some(e.column()),
    })
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Config { message: message.into(), line: None, column: None }
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form without the output section.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        // serde_json maps are ordered by key, so this form is canonical
        let value = serde_json::to_value(&c).expect("config serializes");
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.group_spec()?;
        let t = &self.truncation;
        if t.radii.is_empty() || t.radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(invalid("truncation.radii must be nonempty and positive"));
        }
        if t.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("truncation.radii must increase"));
        }
        if let Some(g) = t.guard {
            if !(g >= 0.0) || g >= t.radii[0] {
                return Err(invalid(format!("guard {g} must be nonnegative and below the smallest radius {}", t.radii[0])));
            }
        }
        if let Some(w) = t.window {
            if w < *t.radii.last().unwrap() {
                return Err(invalid("truncation.window must cover the largest radius"));
            }
        }
        if let Some(r) = self.sweep.r.iter().find(|r| !(**r >= 0.5 && **r <= 2.0)) {
            return Err(invalid(format!("sweep value r = {r} outside [0.5, 2]")));
        }
        for p in &self.probe.p {
            match p.value() {
                Some(v) if v == 1.0 || v == 2.0 || v.is_infinite() => {}
                _ => return Err(invalid(format!("probe exponent {p:?} must be 1, 2 or \"inf\""))),
            }
        }
        if self.probe.trials == 0 {
            return Err(invalid("probe.trials must be positive"));
        }
        if self.density.dilations.is_empty() || self.density.dilations.iter().any(|r| !(*r > 0.0)) {
            return Err(invalid("density.dilations must be nonempty and positive"));
        }
        if let Some(radii) = &self.density.radii {
            if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
                return Err(invalid("density.radii must be nonempty and positive"));
            }
        }
        if !(self.window.grid_step > 0.0) || self.window.grid_points < 2 {
            return Err(invalid("window grid needs a positive step and at least two points"));
        }
        if !(self.schur.bin > 0.0) || !(self.schur.guard >= 0.0) {
            return Err(invalid("schur.bin must be positive and schur.guard nonnegative"));
        }
        if !(self.orthogonality.extent > 0.0) || !(self.orthogonality.step > 0.0) || self.orthogonality.orders.is_empty() {
            return Err(invalid("orthogonality needs positive extent and step and at least one order"));
        }
        if let NormConfig::WeightedSum { p } = self.norm {
            HomogeneousNorm::weighted_sum(p).map_err(|e| invalid(e.to_string()))?;
        }
        self.point_set()?;
        Ok(())
    }

    pub fn group_spec(&self) -> Result<Arc<GroupSpec>, CliError> {
        group_spec(&self.group).map(Arc::new)
    }

    pub fn norm(&self) -> HomogeneousNorm {
        match self.norm {
            NormConfig::WeightedMax => HomogeneousNorm::WeightedMax,
            NormConfig::WeightedSum { p } => HomogeneousNorm::WeightedSum { p },
        }
    }

    pub fn window_radius(&self) -> f64 {
        self.truncation.window.unwrap_or(*self.truncation.radii.last().unwrap_or(&1.0))
    }

    /// The configured set; explicit point lists bypass the generators.
    pub fn point_set(&self) -> Result<PointSet, CliError> {
        let (spec, norm, r) = (self.group_spec()?, self.norm(), self.window_radius());
        let ps = match &self.lattice {
            LatticeConfig::Explicit { points } => PointSet::explicit(spec, norm, points.clone(), r),
            l => PointSet::generate(spec, norm, self.generator(l)?, r),
        };
        ps.map_err(|e| invalid(format!("lattice: {e}")))
    }

    fn generator(&self, l: &LatticeConfig) -> Result<Generator, CliError> {
        Ok(match l {
            LatticeConfig::Lattice { basis } => Generator::Lattice { basis: basis.clone() },
            LatticeConfig::QuasiLattice { basis, complement } => {
                Generator::QuasiLattice { basis: basis.clone(), complement: complement.clone() }
            }
            LatticeConfig::Explicit { .. } => return Err(invalid("perturbed sets need a generated base")),
            LatticeConfig::Perturbed { base, jitter, seed } => {
                Generator::Perturbed { base: Box::new(self.generator(base)?), jitter: *jitter, seed: seed.unwrap_or(self.seed) }
            }
        })
    }

    pub fn grid(&self) -> Grid {
        Grid::line(self.window.grid_points, self.window.grid_step)
    }

    pub fn window_kind(&self) -> WindowKind {
        match self.window.kind {
            WindowName::Gaussian => WindowKind::Gaussian,
            WindowName::Hermite => WindowKind::Hermite(self.window.order),
            WindowName::Exponential => WindowKind::TwoSidedExponential,
            WindowName::Box => WindowKind::Box,
            WindowName::Sinc => WindowKind::Sinc,
        }
    }

    pub fn window_signal(&self) -> Result<Signal, CliError> {
        window(&self.grid(), self.window_kind()).map_err(|e| invalid(format!("window: {e}")))
    }
}

/// Builtin names: `plane`, `abelian-<n>`, `heisenberg`, `heisenberg-<d>`, `engel`, `free-3-2`.
pub fn group_spec(g: &GroupConfig) -> Result<GroupSpec, CliError> {
    match g {
        GroupConfig::Builtin(name) => {
            let numbered = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok()).filter(|n| *n >= 1);
            match name.as_str() {
                "plane" => Ok(GroupSpec::abelian(2)),
                "heisenberg" => Ok(GroupSpec::heisenberg(1)),
                "engel" => Ok(GroupSpec::engel()),
                "free-3-2" => Ok(GroupSpec::free_step2_rank3()),
                _ => {
                    if let Some(n) = numbered("abelian-") {
                        Ok(GroupSpec::abelian(n))
                    } else if let Some(d) = numbered("heisenberg-") {
                        Ok(GroupSpec::heisenberg(d))
                    } else {
                        Err(invalid(format!("unknown builtin group {name:?}")))
                    }
                }
            }
        }
        GroupConfig::Custom(c) => {
            let idx = |i: usize, what: &str| {
                if i == 0 || i > c.dim {
                    Err(invalid(format!("{what} index {i} outside 1..={}", c.dim)))
                } else {
                    Ok(i - 1)
                }
            };
            let brackets = c
                .brackets
                .iter()
                .map(|&(i, j, k, v)| Ok((idx(i, "bracket")?, idx(j, "bracket")?, idx(k, "bracket")?, v)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let center = match &c.center {
                Some(cs) => Some(cs.iter().map(|&i| idx(i, "center")).collect::<Result<Vec<_>, _>>()?),
                None => None,
            };
            GroupSpec::new(c.name.clone(), c.dim, c.step, c.weights.clone(), &brackets, center).map_err(|e| invalid(format!("group: {e}")))
        }
    }
}
