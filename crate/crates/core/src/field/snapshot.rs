//! CSV snapshots of fields: header `axis0,axis1[,axis2],t,value`, one row
//! per node, time-major then axis 0.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::field::{Grid, ScalarField};
use crate::scalar::{lit, to_f64, Scalar};

fn header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = (0..dim).map(|a| format!("axis{a}")).collect();
    h.push("t".into());
    h.push("value".into());
    h
}

pub fn write_snapshot<T: Scalar, W: Write>(f: &ScalarField<T>, out: W) -> Result<()> {
    let g = f.grid();
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(header(g.dim()))?;
    let positions: Vec<Vec<T>> = (0..g.space_len()).map(|k| g.position(k)).collect();
    for n in 0..g.time_nodes() {
        let t = to_f64(g.time(n));
        for (k, x) in positions.iter().enumerate() {
            let mut rec: Vec<String> = x.iter().map(|&c| to_f64(c).to_string()).collect();
            rec.push(t.to_string());
            rec.push(to_f64(f.at(n, k)).to_string());
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a snapshot written for `grid`; coordinates must match node
/// positions to 1e-9 relative to the extent.
pub fn read_snapshot<T: Scalar, R: Read>(grid: &Arc<Grid<T>>, input: R) -> Result<ScalarField<T>> {
    let mut rdr = csv::Reader::from_reader(input);
    let expected = header(grid.dim());
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if got != expected {
        return Err(domain(format!("snapshot header {got:?} does not match {expected:?}")));
    }
    let positions: Vec<Vec<T>> = (0..grid.space_len()).map(|k| grid.position(k)).collect();
    let scale = grid.extents().iter().fold(to_f64(grid.tau()), |m, &e| m.max(to_f64(e)));
    let tol = 1e-9 * scale.max(1.0);
    let mut values = Vec::with_capacity(grid.len());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if row >= grid.len() {
            return Err(domain(format!("snapshot has more than {} rows", grid.len())));
        }
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| domain(format!("row {}: {e}", row + 2)))?;
        let (n, k) = (row / grid.space_len(), row % grid.space_len());
        let mut coords: Vec<f64> = positions[k].iter().map(|&c| to_f64(c)).collect();
        coords.push(to_f64(grid.time(n)));
        if coords.iter().zip(&nums).any(|(a, b)| (a - b).abs() > tol) {
            return Err(domain(format!("row {} coordinates do not match the grid node", row + 2)));
        }
        values.push(lit(nums[grid.dim() + 1]));
    }
    ScalarField::new(grid.clone(), values)
}
