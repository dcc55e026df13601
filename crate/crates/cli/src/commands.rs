//! One function per subcommand. Each writes its reports into the output
//! directory and returns the one-line summary with a pass/fail verdict.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use varns_core::boundary::{boundary_recovery_audit, extended_functional};
use varns_core::field::{divergence, FieldQuartet, Grid, ScalarField, VectorField};
use varns_core::lagrangian::{el_residuals, energy_series, evaluate_lagrangian, first_variation, gronwall_audit};
use varns_core::oscillator::{galerkin_identity_residual, solve_oscillator_vp, OscillatorProblem};
use varns_core::scenario::random_direction;
use varns_core::solver::{
    march_reduced, newton_dual, steady_solve, taylor_green, taylor_green_energy, u_w_gap, DualData, SteadyData,
    Trajectory,
};
use varns_core::steady::{inequality_chain_audit, steady_boundary_estimate, uniqueness_certificate};
use varns_core::Error;

use crate::config::RunConfig;
use crate::inputs;

/// Tolerance of the boundary audit, relative to the field scale.
const BOUNDARY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Oscillator,
    Evaluate,
    Residual,
    VariationCheck,
    Energy,
    SteadyCert,
    InequalityAudit,
    Extended,
    BoundaryAudit,
    SolveUnsteady,
    SolveSteady,
    NewtonDual,
    TaylorGreenVerify,
}

pub struct Verdict {
    pub summary: Value,
    pub passed: bool,
}

impl Verdict {
    fn new(passed: bool, summary: Value) -> Self {
        Self { summary, passed }
    }
}

pub fn run(command: Command, config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    match command {
        Command::Oscillator => oscillator(config, out),
        Command::Evaluate => evaluate(config, out),
        Command::Residual => residual(config, out),
        Command::VariationCheck => variation_check(config),
        Command::Energy => energy(config, out),
        Command::SteadyCert => steady_cert(config, out),
        Command::InequalityAudit => inequality_audit(config, out),
        Command::Extended => extended(config, out),
        Command::BoundaryAudit => boundary_audit(config, out),
        Command::SolveUnsteady => solve_unsteady(config, out),
        Command::SolveSteady => solve_steady(config, out),
        Command::NewtonDual => newton(config, out),
        Command::TaylorGreenVerify => taylor_green_verify(config, out),
    }
}

fn create(out: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = out.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_json(out: &Path, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(create(out, name)?, value)?;
    Ok(())
}

fn space_time_state(config: &RunConfig) -> anyhow::Result<FieldQuartet<f64>> {
    inputs::state(&config.scenario, &config.grid.space_time()?, config.nu)
}

fn steady_state(config: &RunConfig) -> anyhow::Result<FieldQuartet<f64>> {
    inputs::state(&config.scenario, &config.grid.steady()?, config.nu)
}

fn max_abs_error(problem: &OscillatorProblem<f64>, y: &[f64]) -> anyhow::Result<f64> {
    let mut err = 0f64;
    for (&x, &v) in problem.nodes().iter().zip(y) {
        err = err.max((v - problem.analytic(x)?).abs());
    }
    Ok(err)
}

fn oscillator(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let o = &config.oscillator;
    let problem = OscillatorProblem::new(o.a, o.b, o.alpha, o.beta, o.intervals + 1)?;
    let solution = match solve_oscillator_vp(&problem) {
        Err(e @ Error::Resonance { m, .. }) => {
            return Ok(Verdict::new(false, json!({"error": "resonance", "m": m, "message": e.to_string()})));
        }
        other => other?,
    };
    let analytic: Vec<f64> = solution.x.iter().map(|&x| problem.analytic(x)).collect::<Result<_, _>>()?;
    let mut csv = csv::Writer::from_writer(create(out, "oscillator.csv")?);
    csv.write_record(["x", "y1", "y2", "y_mean", "y_diff", "analytic"])?;
    for i in 0..solution.x.len() {
        let row = [solution.x[i], solution.y1[i], solution.y2[i], solution.y_mean[i], solution.y_diff[i], analytic[i]];
        csv.write_record(row.iter().map(f64::to_string))?;
    }
    csv.flush()?;
    let max_err = max_abs_error(&problem, &solution.y_mean)?;
    let fine = problem.with_nodes(2 * o.intervals + 1)?;
    let fine_err = max_abs_error(&fine, &solve_oscillator_vp(&fine)?.y_mean)?;
    let order_estimate = (max_err / fine_err).log2();
    let galerkin_residual = galerkin_identity_residual(&solution.y1, &solution.y2, &problem)?;
    let y_max = solution.y_mean.iter().fold(0f64, |m, v| m.max(v.abs()));
    let diff_max = solution.y_diff.iter().fold(0f64, |m, v| m.max(v.abs()));
    let summary = json!({
        "J": solution.functional_value,
        "galerkin_residual": galerkin_residual,
        "max_err": max_err,
        "order_estimate": order_estimate,
    });
    Ok(Verdict::new(diff_max <= 1e-8 * y_max.max(f64::MIN_POSITIVE), summary))
}

fn evaluate(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let report = evaluate_lagrangian(&space_time_state(config)?, config.nu)?;
    write_json(out, "lagrangian_report.json", &report)?;
    Ok(Verdict::new(true, json!({"J": report.j})))
}

fn residual(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let res = el_residuals(&space_time_state(config)?, config.nu)?;
    let summary = json!({
        "max_abs": res.max_abs(),
        "rms": res.rms(),
        "div_u": res.res_div_u.max_abs(),
        "div_w": res.res_div_w.max_abs(),
        "momentum_u": res.res_u.max_abs(),
        "momentum_w": res.res_w.max_abs(),
    });
    write_json(out, "residuals.json", &summary)?;
    Ok(Verdict::new(true, summary))
}

fn variation_check(config: &RunConfig) -> anyhow::Result<Verdict> {
    let state = space_time_state(config)?;
    let grid = state.grid().clone();
    let direction = random_direction(&grid, config.seed);
    let eps = 1e-5 * state.max_abs().max(1.0);
    let j = |q: &FieldQuartet<f64>| evaluate_lagrangian(q, config.nu).map(|r| r.j);
    let fd = (j(&state.add_scaled(eps, &direction))? - j(&state.add_scaled(-eps, &direction))?) / (2.0 * eps);
    let exact = first_variation(&state, &direction, config.nu)?;
    let rel = (exact - fd).abs() / exact.abs().max(f64::MIN_POSITIVE);
    let summary = json!({"first_variation": exact, "finite_difference": fd, "epsilon": eps, "relative_error": rel});
    Ok(Verdict::new(rel <= 1e-6, summary))
}

fn energy(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let series = energy_series(&space_time_state(config)?, config.nu)?;
    series.write_csv(create(out, "energy_series.csv")?)?;
    let audit = gronwall_audit(&series);
    write_json(out, "gronwall.json", &audit)?;
    let summary = json!({
        "max_mismatch": series.max_mismatch(),
        "min_margin": audit.min_margin,
        "tolerance": audit.tolerance,
        "pointwise_holds": audit.pointwise_holds,
    });
    Ok(Verdict::new(audit.pointwise_holds, summary))
}

fn steady_cert(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let state = steady_state(config)?;
    let cert = uniqueness_certificate(&state, config.nu)?;
    write_json(out, "certificate.json", &cert)?;
    write_json(out, "boundary_estimate.json", &steady_boundary_estimate(&state, config.nu)?)?;
    Ok(Verdict::new(cert.satisfied, serde_json::to_value(cert)?))
}

fn inequality_audit(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let audit = inequality_chain_audit(&steady_state(config)?, config.nu)?;
    audit.write_csv(create(out, "inequality_audit.csv")?)?;
    let margins: serde_json::Map<String, Value> = audit.rows.iter().map(|r| (r.name.to_string(), json!(r.margin))).collect();
    let summary = json!({"asserted_hold": audit.asserted_hold, "margins": margins, "scale": audit.scale});
    Ok(Verdict::new(audit.asserted_hold, summary))
}

fn extended(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let state = space_time_state(config)?;
    let surface = inputs::surface(&config.surface, &state)?;
    let report = extended_functional(&state, &surface, config.nu)?;
    write_json(out, "extended_report.json", &report)?;
    let summary = json!({"J": report.j, "surface_term": report.surface_term, "I": report.i});
    Ok(Verdict::new(true, summary))
}

fn boundary_audit(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let state = space_time_state(config)?;
    let surface = inputs::surface(&config.surface, &state)?;
    let audit = boundary_recovery_audit(&state, &surface, config.nu)?;
    audit.write_csv(create(out, "boundary_audit.csv")?)?;
    let passed = audit.passes(BOUNDARY_TOL);
    let summary = json!({
        "max_a": audit.max_a,
        "max_b": audit.max_b,
        "max_c": audit.max_c,
        "max_d": audit.max_d,
        "scale": audit.scale,
        "passes": passed,
    });
    Ok(Verdict::new(passed, summary))
}

fn dump(out: &Path, t: &Trajectory<f64>) -> anyhow::Result<()> {
    inputs::write_quartet(out, &t.quartet)?;
    t.write_history_csv(create(out, "history.csv")?)?;
    Ok(())
}

fn first_level(v: &VectorField<f64>) -> anyhow::Result<VectorField<f64>> {
    let space = Arc::new(v.grid().spatial());
    let comps = v.comps().iter().map(|c| ScalarField::new(space.clone(), c.slice(0).to_vec()));
    Ok(VectorField::new(comps.collect::<Result<_, _>>()?)?)
}

/// Relative discrete L2 error of `u` at the last level.
fn final_error(u: &VectorField<f64>, exact: &VectorField<f64>) -> f64 {
    let last = u.grid().time_nodes() - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..u.dim() {
        for (a, b) in u.comp(i).slice(last).iter().zip(exact.comp(i).slice(last)) {
            num += (a - b) * (a - b);
            den += b * b;
        }
    }
    (num / den).sqrt()
}

/// Kinetic energy `1/2 int |u|^2` at the last level.
fn final_energy(u: &VectorField<f64>) -> f64 {
    let g = u.grid();
    let last = g.time_nodes() - 1;
    let w = g.space_weights();
    0.5 * (0..u.dim())
        .map(|i| u.comp(i).slice(last).iter().zip(&w).map(|(v, w)| v * v * w).sum::<f64>())
        .sum::<f64>()
}

fn solve_unsteady(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let grid = config.grid.space_time()?;
    let state = inputs::state(&config.scenario, &grid, config.nu)?;
    let t = march_reduced(&first_level(&state.u)?, &config.solve_config()?, &grid)?;
    dump(out, &t)?;
    let last = grid.time_nodes() - 1;
    let div = divergence(&t.quartet.u);
    let mut summary = json!({
        "status": t.status,
        "steps": t.history.len(),
        "max_divergence": div.max_abs(),
        "final_energy": final_energy(&t.quartet.u),
        "t": grid.time(last),
    });
    if config.scenario == "taylor-green" {
        summary["l2_error"] = json!(final_error(&t.quartet.u, &state.u));
    }
    Ok(Verdict::new(t.converged(), summary))
}

fn solve_steady(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let grid = config.grid.steady()?;
    let state = inputs::state(&config.scenario, &grid, config.nu)?;
    let t = steady_solve(&SteadyData { velocity: state.u }, &config.solve_config()?, &grid)?;
    dump(out, &t)?;
    let cert = uniqueness_certificate(&t.quartet, config.nu)?;
    write_json(out, "certificate.json", &cert)?;
    let residual = t.history.last().map(|r| r.residual);
    let summary = json!({
        "status": t.status,
        "steps": t.history.len(),
        "residual": residual,
        "certificate": cert,
    });
    Ok(Verdict::new(t.converged() && cert.satisfied, summary))
}

fn newton(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let grid = config.grid.space_time()?;
    let state = inputs::state(&config.scenario, &grid, config.nu)?;
    let data = DualData::from_quartet(&state);
    let mut seed = state.clone();
    let eps = config.perturbation;
    seed.w = VectorField::from_fn(&grid, |x, t, i| {
        let phase: f64 = x.iter().enumerate().map(|(a, &c)| (a + 1) as f64 * c).sum();
        let k = node_index(&grid, x);
        let n = (t / grid.dt()).round() as usize;
        state.u.comp(i).at(n, k) * (1.0 + eps * phase.sin() * (1.0 + t))
    });
    let t = newton_dual(&seed, &data, &config.solve_config()?, &grid)?;
    dump(out, &t)?;
    let report = evaluate_lagrangian(&t.quartet, config.nu)?;
    let gap = u_w_gap(&t.quartet);
    let passed = t.converged() && gap <= 1e-8 && report.j.abs() <= 1e-10 * report.magnitude;
    let summary = json!({
        "status": t.status,
        "iterations": t.history.len() - 1,
        "u_w_gap": gap,
        "J": report.j,
        "scale": report.magnitude,
        "el_residual": el_residuals(&t.quartet, config.nu)?.max_abs(),
    });
    Ok(Verdict::new(passed, summary))
}

fn node_index(grid: &Grid<f64>, x: &[f64]) -> usize {
    let idx: Vec<usize> = (0..grid.dim()).map(|a| (x[a] / grid.spacing(a)).round() as usize).collect();
    grid.space_index(&idx)
}

#[derive(Serialize)]
struct VerifyRow {
    n: usize,
    dt: f64,
    l2_error: f64,
    l2_ratio: Option<f64>,
    energy_error: f64,
    energy_ratio: Option<f64>,
}

fn taylor_green_verify(config: &RunConfig, out: &Path) -> anyhow::Result<Verdict> {
    let solve = config.solve_config()?;
    let v = &config.verify;
    let n0 = config.grid.nodes.first().copied().unwrap_or(16);
    if v.refine < 2 {
        anyhow::bail!("verify.refine must be at least 2, got {}", v.refine);
    }
    let mut rows: Vec<VerifyRow> = Vec::new();
    for level in 0..v.refine {
        let n = n0 << level;
        let dt = config.grid.dt / (1u32 << level) as f64;
        let steps = (v.tau / dt).round() as usize;
        let grid = Arc::new(Grid::periodic_square(n, steps + 1, dt)?);
        let exact = taylor_green(config.nu, &grid)?;
        let t = march_reduced(&first_level(&exact.u)?, &solve, &grid)?;
        let expected = taylor_green_energy(grid.tau(), config.nu);
        let l2_error = final_error(&t.quartet.u, &exact.u);
        let energy_error = (final_energy(&t.quartet.u) / expected - 1.0).abs();
        let (l2_ratio, energy_ratio) = match rows.last() {
            Some(prev) => (Some(prev.l2_error / l2_error), Some(prev.energy_error / energy_error)),
            None => (None, None),
        };
        rows.push(VerifyRow { n, dt, l2_error, l2_ratio, energy_error, energy_ratio });
    }
    let mut csv = csv::Writer::from_writer(create(out, "taylor_green_verify.csv")?);
    for r in &rows {
        csv.serialize(r)?;
    }
    csv.flush()?;
    let ratios: Vec<f64> = rows.iter().flat_map(|r| [r.l2_ratio, r.energy_ratio]).flatten().collect();
    let passed = ratios.iter().all(|r| (3.3..=4.7).contains(r));
    let summary = json!({
        "n": rows.iter().map(|r| r.n).collect::<Vec<_>>(),
        "l2_error": rows.iter().map(|r| r.l2_error).collect::<Vec<_>>(),
        "l2_ratio": rows.iter().filter_map(|r| r.l2_ratio).collect::<Vec<_>>(),
        "energy_ratio": rows.iter().filter_map(|r| r.energy_ratio).collect::<Vec<_>>(),
    });
    Ok(Verdict::new(passed, summary))
}
