//! Run configuration: a JSON document with every default explicit, plus
//! command-line overrides applied on top.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use varns_core::field::{Boundary, Grid};
use varns_core::solver::{SolveConfig, TimeScheme};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub dim: usize,
    pub extents: Vec<f64>,
    pub nodes: Vec<usize>,
    pub boundary: Vec<Boundary>,
    pub time_nodes: usize,
    pub dt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dim: 2,
            extents: vec![TAU, TAU],
            nodes: vec![16, 16],
            boundary: vec![Boundary::Periodic; 2],
            time_nodes: 6,
            dt: 0.05,
        }
    }
}

impl GridSpec {
    fn check_dim(&self) -> anyhow::Result<()> {
        let lens = [self.extents.len(), self.nodes.len(), self.boundary.len()];
        if lens.iter().any(|&l| l != self.dim) {
            bail!(
                "grid.dim is {} but extents, nodes and boundary have lengths {}, {}, {}",
                self.dim,
                lens[0],
                lens[1],
                lens[2]
            );
        }
        Ok(())
    }

    pub fn space_time(&self) -> anyhow::Result<Arc<Grid<f64>>> {
        self.check_dim()?;
        let g = Grid::new(self.extents.clone(), self.nodes.clone(), self.boundary.clone(), self.time_nodes, self.dt)?;
        Ok(Arc::new(g))
    }

    /// The same spatial grid with a single time level.
    pub fn steady(&self) -> anyhow::Result<Arc<Grid<f64>>> {
        self.check_dim()?;
        Ok(Arc::new(Grid::steady(self.extents.clone(), self.nodes.clone(), self.boundary.clone())?))
    }
}

/// Solver settings; the viscosity comes from the top-level `nu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSpec {
    pub newton_tol: f64,
    pub max_newton: usize,
    pub continuation_steps: usize,
    pub time_scheme: TimeScheme,
    pub linear_tol: f64,
    pub picard_max: usize,
    pub pseudo_dt: f64,
    pub max_pseudo_steps: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let c = SolveConfig::default();
        Self {
            newton_tol: c.newton_tol,
            max_newton: c.max_newton,
            continuation_steps: c.continuation_steps,
            time_scheme: c.time_scheme,
            linear_tol: c.linear_tol,
            picard_max: c.picard_max,
            pseudo_dt: c.pseudo_dt,
            max_pseudo_steps: c.max_pseudo_steps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorSpec {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Number of intervals; the grid has `intervals + 1` nodes.
    pub intervals: usize,
}

impl Default for OscillatorSpec {
    fn default() -> Self {
        Self { a: 1.0, b: 20.0, alpha: 0.0, beta: 1.0, intervals: 128 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySpec {
    /// Number of grids in the refinement sweep.
    pub refine: usize,
    /// Final time of every run.
    pub tau: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { refine: 3, tau: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Subcommand to run when none is given on the command line.
    pub command: Option<String>,
    pub grid: GridSpec,
    pub nu: f64,
    pub solver: SolverSpec,
    /// `taylor-green`, `zero`, `cavity`, `random:<seed>` or `file:<dir>`.
    pub scenario: String,
    /// Surface velocities: `trace` (of the state itself), `zero` or
    /// `random:<seed>`.
    pub surface: String,
    /// Seed of random directions and perturbations.
    pub seed: u64,
    /// Relative size of the `w` perturbation seeding the dual Newton solve.
    pub perturbation: f64,
    pub oscillator: OscillatorSpec,
    pub verify: VerifySpec,
    /// Output directory; falls back to `VARNS_OUT`, then `varns-out`.
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            grid: GridSpec::default(),
            nu: 0.1,
            solver: SolverSpec::default(),
            scenario: "taylor-green".into(),
            surface: "trace".into(),
            seed: 0,
            perturbation: 0.1,
            oscillator: OscillatorSpec::default(),
            verify: VerifySpec::default(),
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn solve_config(&self) -> anyhow::Result<SolveConfig> {
        let s = &self.solver;
        let c = SolveConfig {
            nu: self.nu,
            newton_tol: s.newton_tol,
            max_newton: s.max_newton,
            continuation_steps: s.continuation_steps,
            time_scheme: s.time_scheme,
            linear_tol: s.linear_tol,
            picard_max: s.picard_max,
            pseudo_dt: s.pseudo_dt,
            max_pseudo_steps: s.max_pseudo_steps,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("VARNS_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("varns-out"))
    }
}
