//! Command bodies: each turns a resolved config into a table.

use confnet_core::connmass::{
    mass_closed, mass_quadrature, mass_scaling_leading, mass_step_approx, step_error,
};
use confnet_core::geometry::{ConvexPolygon, RightPrism};
use confnet_core::linkmodels::{ConnectionModel, PathLossParams};
use confnet_core::mc_sim::{
    connection_field, node_count_for_density, run_trials, sample_polygon, Lattice, McConfig,
    PointProcess,
};
use confnet_core::pfc_analytic::{assemble, feature_table, Mimo2x2Analytic};
use confnet_core::validation::{run_checks, ValidationOptions};
use rayon::prelude::*;

use crate::args::{DomainKind, ModelName, Process};
use crate::config::{FieldConfig, MassConfig, PfcConfig, RunConfig, SimulateConfig, ValidateConfig};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Output table and the number of failed validation checks.
pub struct Outcome {
    pub table: Table,
    pub failures: usize,
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let table = match config {
        RunConfig::Mass(c) => cmd_mass(c)?,
        RunConfig::Pfc(c) => cmd_pfc(c)?,
        RunConfig::Simulate(c) => cmd_simulate(c)?,
        RunConfig::Field(c) => cmd_field(c)?,
        RunConfig::Validate(c) => return cmd_validate(c),
    };
    Ok(Outcome { table, failures: 0 })
}

fn model_name(m: ModelName) -> &'static str {
    match m {
        ModelName::Siso => "siso",
        ModelName::Simo => "simo",
        ModelName::Miso => "miso",
        ModelName::Mimo => "mimo",
        ModelName::UnitDisk => "unit-disk",
    }
}

pub fn build_model(
    kind: ModelName,
    m: u32,
    n: u32,
    radius: f64,
    params: PathLossParams,
) -> Result<ConnectionModel, CliError> {
    Ok(match kind {
        ModelName::Siso => ConnectionModel::siso(params),
        ModelName::Simo | ModelName::Miso => ConnectionModel::simo_miso(m, params)?,
        ModelName::Mimo => ConnectionModel::mimo(m, n, params)?,
        ModelName::UnitDisk => ConnectionModel::unit_disk(radius, params)?,
    })
}

fn cmd_mass(c: &MassConfig) -> Result<Table, CliError> {
    // (eta, model, diversity order k) in output order
    let mut jobs = Vec::new();
    for &eta in &c.eta {
        let params = PathLossParams::new(c.beta, eta, c.d)?;
        match c.model {
            ModelName::Simo | ModelName::Miso => {
                for &k in c.m.as_deref().unwrap_or_default() {
                    jobs.push((eta, build_model(c.model, k, 0, c.radius, params)?, k));
                }
            }
            ModelName::Mimo => {
                for &m in c.m.as_deref().unwrap_or_default() {
                    for &n in c.n.as_deref().unwrap_or_default() {
                        let model = build_model(c.model, m, n, c.radius, params)?;
                        jobs.push((eta, model, n.max(m)));
                    }
                }
            }
            ModelName::Siso | ModelName::UnitDisk => {
                jobs.push((eta, build_model(c.model, 1, 0, c.radius, params)?, 1));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|(eta, model, k)| -> Result<Vec<Cell>, CliError> {
            let closed = mass_closed(model)?.value;
            let quad = mass_quadrature(model)?.value;
            let leading = match c.model {
                ModelName::Simo | ModelName::Miso | ModelName::Mimo => Some(mass_scaling_leading(model)?),
                _ => None,
            };
            let (step, eps) = if c.model == ModelName::Mimo {
                let p = model.params();
                (Some(mass_step_approx(*k, &p)?.value), Some(step_error(*k, &p)?))
            } else {
                (None, None)
            };
            Ok(vec![
                model_name(c.model).into(),
                (*k).into(),
                c.d.into(),
                (*eta).into(),
                c.beta.into(),
                closed.into(),
                quad.into(),
                ((closed - quad).abs() / quad.abs()).into(),
                leading.into(),
                leading.map(|l| closed / l - 1.0).into(),
                step.into(),
                eps.map(|e| e.eps_minus).into(),
                eps.map(|e| e.eps_plus).into(),
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Table::new(vec![
        "model",
        "k",
        "d",
        "eta",
        "beta",
        "closed_form",
        "quadrature",
        "quad_rel_diff",
        "leading_order",
        "leading_gap",
        "step_approx",
        "eps_minus",
        "eps_plus",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn prism_model(
    prism: &crate::config::PrismSpec,
    l: f64,
    kind: ModelName,
    m: u32,
    n: u32,
    radius: f64,
    beta: f64,
    eta: f64,
) -> Result<(RightPrism, ConnectionModel), CliError> {
    let prism = prism.build(l)?;
    let model = build_model(kind, m, n, radius, PathLossParams::new(beta, eta, 3)?)?;
    Ok((prism, model))
}

fn check_densities(rho: &[f64]) -> Result<(), CliError> {
    if rho.is_empty() {
        return Err(CliError::Usage("density grid is empty".into()));
    }
    Ok(())
}

fn cmd_pfc(c: &PfcConfig) -> Result<Table, CliError> {
    let (prism, model) = prism_model(&c.prism, c.l, c.model, c.m, c.n, c.radius, c.beta, c.eta)?;
    if c.table {
        let mut t = Table::new(vec![
            "class",
            "theta",
            "multiplicity",
            "measure",
            "measure_symbol",
            "solid_angle",
            "solid_angle_symbol",
            "geometric_factor",
            "geometric_factor_symbol",
        ]);
        for r in feature_table(&prism, &model)? {
            t.push(vec![
                r.class.name().into(),
                r.theta.into(),
                r.multiplicity.into(),
                r.measure.into(),
                r.measure_symbol.into(),
                r.solid_angle.into(),
                r.solid_angle_symbol.into(),
                r.geometric_factor.into(),
                r.geometric_factor_symbol.into(),
            ]);
        }
        return Ok(t);
    }
    check_densities(&c.rho)?;
    let mut t = Table::new(vec![
        "rho",
        "p_fc",
        "p_out",
        "p_fc_bulk_only",
        "p_fc_with_faces",
        "p_fc_with_edges",
        "p_fc_full",
        "corner_total",
        "edge_total",
        "face_total",
        "bulk_total",
        "negative_pfc",
        "small_scale",
        "out_of_regime",
    ]);
    for b in assemble(&prism, &model, &c.rho)? {
        t.push(vec![
            b.rho.into(),
            b.p_fc.into(),
            b.p_out.into(),
            b.partial.bulk_only.into(),
            b.partial.with_faces.into(),
            b.partial.with_edges.into(),
            b.partial.full.into(),
            b.totals.corner.into(),
            b.totals.edge.into(),
            b.totals.face.into(),
            b.totals.bulk.into(),
            b.flags.negative_pfc.into(),
            b.flags.small_scale.into(),
            b.flags.out_of_regime().into(),
        ]);
    }
    Ok(t)
}

/// Independent seed for grid point `index`.
fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn cmd_simulate(c: &SimulateConfig) -> Result<Table, CliError> {
    let (prism, model) = prism_model(&c.prism, c.l, c.model, c.m, c.n, c.radius, c.beta, c.eta)?;
    check_densities(&c.rho)?;
    // Analytic columns only where the closed-form prism result applies.
    let analytic = match Mimo2x2Analytic::new(&model) {
        Ok(_) => Some(assemble(&prism, &model, &c.rho)?),
        Err(_) => None,
    };
    let process = match c.process {
        Process::Binomial => PointProcess::Binomial,
        Process::Poisson => PointProcess::Poisson,
    };
    let mut t = Table::new(vec![
        "rho",
        "nodes",
        "trials",
        "connected",
        "p_fc_hat",
        "ci_low",
        "ci_high",
        "ci99_low",
        "ci99_high",
        "mean_isolated",
        "p_isolated_hat",
        "p_fc_analytic",
        "p_out_analytic",
    ]);
    for (i, &rho) in c.rho.iter().enumerate() {
        let cfg = McConfig::from_density(rho, c.trials, point_seed(c.seed, i), model, prism.clone())?
            .with_process(process);
        let e = run_trials(&cfg)?;
        let a = analytic.as_ref().map(|a| &a[i]);
        t.push(vec![
            rho.into(),
            cfg.node_count.into(),
            e.trials.into(),
            e.connected.into(),
            e.p_fc_hat.into(),
            e.ci_low.into(),
            e.ci_high.into(),
            e.ci99_low.into(),
            e.ci99_high.into(),
            e.mean_isolated.into(),
            e.p_isolated_hat.into(),
            a.map(|b| b.p_fc).into(),
            a.map(|b| b.p_out).into(),
        ]);
    }
    Ok(t)
}

/// round(ρ·measure), zero allowed.
fn field_node_count(rho: f64, measure: f64) -> Result<usize, CliError> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(CliError::Usage(format!("density must be non-negative, got {rho}")));
    }
    Ok(node_count_for_density(rho, measure).unwrap_or(0))
}

fn cmd_field(c: &FieldConfig) -> Result<Table, CliError> {
    if c.grid == 0 {
        return Err(CliError::Usage("grid must be at least 1".into()));
    }
    match c.domain {
        DomainKind::Square => {
            let square = ConvexPolygon::square(c.side)?;
            let model = build_model(c.model, c.m, c.n, c.radius, PathLossParams::new(c.beta, c.eta, 2)?)?;
            let nodes = sample_polygon(&square, field_node_count(c.rho, square.area())?, c.seed);
            let lattice = Lattice::uniform([0.0, 0.0], [c.side, c.side], c.grid)?;
            let field = connection_field(&nodes, &model, &lattice)?;
            let mut t = Table::new(vec!["x", "y", "value"]);
            for ([x, y], v) in field.iter() {
                t.push(vec![x.into(), y.into(), v.into()]);
            }
            Ok(t)
        }
        DomainKind::Prism => {
            let (prism, model) = prism_model(&c.prism, c.l, c.model, c.m, c.n, c.radius, c.beta, c.eta)?;
            let nodes = prism.sample_uniform(field_node_count(c.rho, prism.volume())?, c.seed);
            let (lo, hi) = prism.base().bounding_box();
            let lattice = Lattice::uniform([lo[0], lo[1], 0.0], [hi[0], hi[1], prism.height()], c.grid)?;
            let field = connection_field(&nodes, &model, &lattice)?;
            let mut t = Table::new(vec!["x", "y", "z", "value"]);
            for (p, v) in field.iter().filter(|(p, _)| prism.contains(*p)) {
                t.push(vec![p[0].into(), p[1].into(), p[2].into(), v.into()]);
            }
            Ok(t)
        }
    }
}

fn cmd_validate(c: &ValidateConfig) -> Result<Outcome, CliError> {
    let opts = ValidationOptions { perturb: c.perturb, seed: c.seed };
    let reports = run_checks(&c.check, &opts)?;
    let mut t = Table::new(vec!["check", "passed", "worst", "tolerance", "detail"]);
    let mut failures = 0;
    for r in reports {
        failures += usize::from(!r.passed);
        t.push(vec![r.name.into(), r.passed.into(), r.worst.into(), r.tolerance.into(), r.detail.into()]);
    }
    Ok(Outcome { table: t, failures })
}
