//! Named experiment presets.

use crate::commands::Command;
use crate::config::*;

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    /// Subcommand the preset is designed for.
    pub command: Command,
    pub config: ExperimentConfig,
}

fn square_lattice(a: f64) -> LatticeConfig {
    LatticeConfig::Lattice { basis: vec![vec![a, 0.0], vec![0.0, a]] }
}

fn gabor(a: f64) -> ExperimentConfig {
    ExperimentConfig {
        group: GroupConfig::Builtin("plane".into()),
        norm: NormConfig::WeightedMax,
        window: WindowConfig::default(),
        lattice: square_lattice(a),
        truncation: TruncationConfig::default(),
        sweep: SweepConfig::default(),
        probe: ProbeConfig::default(),
        density: DensityConfig::default(),
        dual: DualConfig::default(),
        schur: SchurConfig::default(),
        orthogonality: OrthogonalityConfig::default(),
        seed: 0,
        output: None,
    }
}

/// `n` evenly spaced values from `lo` to `hi`.
fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub fn scenario_catalog() -> Vec<Scenario> {
    let redundant = ExperimentConfig { sweep: SweepConfig { r: grid(0.95, 1.05, 21), mode: ModeName::Frame }, ..gabor(0.5) };
    let critical = ExperimentConfig {
        truncation: TruncationConfig { radii: vec![6.0, 8.0], guard: None, window: None },
        sweep: SweepConfig { r: grid(0.9, 1.1, 11), mode: ModeName::Frame },
        ..gabor(1.0)
    };
    let riesz = ExperimentConfig {
        sweep: SweepConfig { r: grid(0.95, 1.05, 11), mode: ModeName::Riesz },
        probe: ProbeConfig { mode: ModeName::Riesz, ..ProbeConfig::default() },
        ..gabor(std::f64::consts::SQRT_2)
    };
    let heisenberg = ExperimentConfig {
        group: GroupConfig::Builtin("heisenberg".into()),
        lattice: LatticeConfig::QuasiLattice {
            basis: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.5]],
            complement: vec![1.0, 1.0, 0.5],
        },
        truncation: TruncationConfig { radii: vec![6.0], guard: None, window: None },
        density: DensityConfig { radii: Some(vec![1.5, 3.0]), dilations: vec![0.5, 0.8, 1.0, 1.25, 2.0], max_centers: 4_000 },
        ..gabor(1.0)
    };
    let schur = ExperimentConfig {
        truncation: TruncationConfig { radii: vec![8.0], guard: None, window: None },
        schur: SchurConfig { guard: 5.0, ..SchurConfig::default() },
        ..gabor(0.5)
    };
    vec![
        Scenario {
            name: "gaussian-redundant",
            description: "Gaussian window on the lattice 0.5Z x 0.5Z (density 4)",
            command: Command::FrameBounds,
            config: redundant,
        },
        Scenario {
            name: "gaussian-critical",
            description: "Gaussian window on Z x Z (critical density 1), dilated through the critical density",
            command: Command::DeformSweep,
            config: critical,
        },
        Scenario {
            name: "gaussian-riesz",
            description: "Gaussian window on sqrt(2)Z x sqrt(2)Z (density 1/2) as a Riesz sequence",
            command: Command::Riesz,
            config: riesz,
        },
        Scenario {
            name: "heisenberg-quasilattice",
            description: "Quasi-lattice in the Heisenberg group: density under dilations",
            command: Command::Density,
            config: heisenberg,
        },
        Scenario {
            name: "schur-inverse-demo",
            description: "Schur norm and pseudo-inverse decay of the Gaussian Gramian at density 4",
            command: Command::Schur,
            config: schur,
        },
    ]
}

pub fn find(name: &str) -> Option<Scenario> {
    scenario_catalog().into_iter().find(|s| s.name == name)
}
