//! Builds states and surface data from scenario names, and dumps quartets
//! as field snapshots.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use varns_core::boundary::SurfaceData;
use varns_core::field::snapshot::{read_snapshot, write_snapshot};
use varns_core::field::{FieldQuartet, Grid, ScalarField, VectorField};
use varns_core::scenario::{cavity_velocity, random_quartet, random_surface};
use varns_core::solver::taylor_green;

fn field_names(dim: usize) -> Vec<String> {
    let mut names: Vec<String> = (0..dim).map(|i| format!("u{i}")).collect();
    names.push("p".into());
    names.extend((0..dim).map(|i| format!("w{i}")));
    names.push("r".into());
    names
}

pub fn state(scenario: &str, grid: &Arc<Grid<f64>>, nu: f64) -> anyhow::Result<FieldQuartet<f64>> {
    if let Some(seed) = scenario.strip_prefix("random:") {
        let seed: u64 = seed.parse().with_context(|| format!("bad seed in scenario {scenario:?}"))?;
        return Ok(random_quartet(grid, seed));
    }
    if let Some(dir) = scenario.strip_prefix("file:") {
        return read_quartet(Path::new(dir), grid);
    }
    match scenario {
        "zero" => Ok(FieldQuartet::zeros(grid)),
        "taylor-green" => Ok(taylor_green(nu, grid)?),
        "cavity" => Ok(FieldQuartet::symmetric(cavity_velocity(grid), ScalarField::zeros(grid))?),
        other => bail!("unknown scenario {other:?}; expected taylor-green, zero, cavity, random:<seed> or file:<dir>"),
    }
}

pub fn surface(spec: &str, state: &FieldQuartet<f64>) -> anyhow::Result<SurfaceData<f64>> {
    if let Some(seed) = spec.strip_prefix("random:") {
        let seed: u64 = seed.parse().with_context(|| format!("bad seed in surface {spec:?}"))?;
        return Ok(random_surface(state.grid(), seed));
    }
    match spec {
        "trace" => Ok(SurfaceData::new(state.u.clone(), state.w.clone())?),
        "zero" => Ok(SurfaceData::zeros(state.grid())),
        other => bail!("unknown surface {other:?}; expected trace, zero or random:<seed>"),
    }
}

/// Reads `u0.csv`, ..., `p.csv`, `w0.csv`, ..., `r.csv` from `dir`.
fn read_quartet(dir: &Path, grid: &Arc<Grid<f64>>) -> anyhow::Result<FieldQuartet<f64>> {
    let dim = grid.dim();
    let mut fields = Vec::new();
    for name in field_names(dim) {
        let path = dir.join(format!("{name}.csv"));
        let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        fields.push(read_snapshot(grid, file).with_context(|| format!("reading {}", path.display()))?);
    }
    let r = fields.pop().expect("r");
    let w = VectorField::new(fields.drain(dim + 1..).collect())?;
    let p = fields.pop().expect("p");
    let u = VectorField::new(fields)?;
    Ok(FieldQuartet::new(u, p, w, r)?)
}

pub fn write_quartet(dir: &Path, q: &FieldQuartet<f64>) -> anyhow::Result<()> {
    let fields = q.u.comps().iter().chain([&q.p]).chain(q.w.comps()).chain([&q.r]);
    for (name, f) in field_names(q.grid().dim()).iter().zip(fields) {
        let path = dir.join(format!("{name}.csv"));
        write_snapshot(f, BufWriter::new(File::create(&path)?))?;
    }
    Ok(())
}
