//! The four subcommands. Each writes into a [`RunOutputs`] and returns the
//! verdict; the caller records the manifest either way.

use std::time::Instant;

use chernoff_core::operators::{ChernoffGenerator, Family, Mutation};
use chernoff_core::reference::{dense_oracle, splitstep_raw, DENSE_SIZE_CAP};
use chernoff_core::verify::{
    convergence_report, geometric_grid, verify_norm_bounds, verify_self_adjoint, verify_strong_continuity,
    verify_tangency, PropertyReport, SuiteOptions, SELF_ADJOINT_TOL,
};
use chernoff_core::{Propagator, PropagatorConfig, WaveFunction};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_f64, RunOutputs};
use crate::setup::Setup;

pub const UNITARITY_TOL: f64 = 1e-9;
pub const DEFAULT_EVOLVE_N: usize = 1024;
pub const DEFAULT_SERIES_N: usize = 16;
pub const DEFAULT_STEPS_LIST: [usize; 4] = [64, 256, 1024, 4096];

fn numerical(context: &str) -> impl Fn(chernoff_core::ChernoffError) -> CliError + '_ {
    move |e| CliError::from_core(context, e)
}

fn distance(a: &WaveFunction, b: &WaveFunction) -> Result<f64, CliError> {
    a.distance(b).map_err(numerical("distance"))
}

fn fail_on(reports: &[PropertyReport]) -> Result<(), CliError> {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.property_id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Property(format!("failed: {}", failed.join(", "))))
    }
}

pub fn evolve(cfg: &RunConfig, setup: &Setup, mutation: Mutation, out: &mut RunOutputs) -> Result<(), CliError> {
    let n = cfg.n_or(DEFAULT_EVOLVE_N);
    let propagator = Propagator::with_mutation(setup.spec.clone(), mutation);
    out.write_dump("initial.wf", &setup.psi0)?;
    let start = Instant::now();
    let psi = propagator.propagate(cfg.t, &PropagatorConfig::with_n(n), &setup.psi0).map_err(numerical("propagate"))?;
    out.measure_f64("wall_time_s", start.elapsed().as_secs_f64());
    if !psi.is_finite() {
        return Err(CliError::Numerical("propagated state is not finite".into()));
    }
    out.write_dump("final.wf", &psi)?;

    let grid = psi.grid();
    let mut header: Vec<String> = (0..grid.dim()).map(|m| format!("x{m}")).collect();
    header.push("density".into());
    let rows: Vec<Vec<String>> = psi
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| grid.point(i).into_iter().chain([v.norm_sqr()]).map(fmt_f64).collect())
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.write_csv("profile.csv", &header, &rows)?;

    let deviation = (psi.norm() / setup.psi0.norm() - 1.0).abs();
    out.measure("n", n);
    out.measure_f64("t", cfg.t);
    out.measure_f64("norm_initial", setup.psi0.norm());
    out.measure_f64("norm_final", psi.norm());
    out.measure_f64("unitarity_deviation", deviation);
    let report = PropertyReport::new("unitarity", 1, deviation, UNITARITY_TOL).detail("norm_final", psi.norm());
    out.properties.push(report);
    fail_on(&out.properties)
}

pub fn verify(cfg: &RunConfig, setup: &Setup, mutation: Mutation, out: &mut RunOutputs) -> Result<(), CliError> {
    let opts = SuiteOptions { seed: cfg.seed, mutation, trials: cfg.trials.unwrap_or(200), ..SuiteOptions::default() };
    let reference = setup.reference(cfg, cfg.t)?;
    let n_list = cfg.n_list_or_default();
    let spec = &setup.spec;
    let phi = &setup.psi0;
    let checks: Vec<Option<PropertyReport>> = (0..5usize)
        .into_par_iter()
        .map(|i| -> Result<Option<PropertyReport>, CliError> {
            let ctx = numerical("verify");
            Ok(Some(match i {
                0 => verify_self_adjoint(
                    |t| ChernoffGenerator::with_mutation(spec, t, mutation),
                    &opts.self_adjoint_t,
                    opts.trials,
                    SELF_ADJOINT_TOL,
                    opts.seed,
                )
                .map_err(ctx)?,
                1 => verify_tangency(spec, phi, &opts.tangency_t, mutation).map_err(ctx)?,
                2 => verify_norm_bounds(spec, &opts.norm_t, opts.seed).map_err(ctx)?,
                3 => verify_strong_continuity(spec, phi, 0.1, &geometric_grid(1e-2, 1e-6, 5)).map_err(ctx)?,
                _ => match &reference {
                    None => return Ok(None),
                    Some(r) => {
                        let p = Propagator::with_mutation(spec.clone(), mutation);
                        let errors = sweep_n(&p, phi, cfg.t, &n_list, &r.wavefunction)?;
                        let mut report = convergence_report(&n_list, &errors);
                        report.notes.push(format!("reference: {}", r.method));
                        report
                    }
                },
            }))
        })
        .collect::<Result<_, _>>()?;
    let mut reports: Vec<PropertyReport> = checks.into_iter().flatten().collect();
    if reference.is_none() {
        out.measure("convergence", "skipped: no reference solution for this spec");
    }
    for r in &mut reports {
        r.details.push(("seed".into(), cfg.seed as f64));
    }
    out.write_properties(&reports)?;
    for r in &reports {
        out.measure(&format!("{}_pass", r.property_id), r.pass);
        out.measure_f64(&format!("{}_worst_violation", r.property_id), r.worst_violation);
        if let Some(order) = r.fitted_order {
            out.measure_f64(&format!("{}_fitted_order", r.property_id), order);
        }
    }
    if mutation != Mutation::None {
        out.measure("mutation", format!("{mutation:?}"));
    }
    out.properties = reports;
    fail_on(&out.properties)
}

/// `ε(n)` for each `n`, evaluated concurrently and returned in input order.
fn sweep_n(
    p: &Propagator,
    psi0: &WaveFunction,
    t: f64,
    n_list: &[usize],
    reference: &WaveFunction,
) -> Result<Vec<f64>, CliError> {
    n_list
        .par_iter()
        .map(|&n| {
            let psi = p.propagate(t, &PropagatorConfig::with_n(n), psi0).map_err(numerical("propagate"))?;
            distance(&psi, reference)
        })
        .collect()
}

pub fn converge(cfg: &RunConfig, setup: &Setup, mutation: Mutation, out: &mut RunOutputs) -> Result<(), CliError> {
    let reference = setup.require_reference(cfg, cfg.t)?;
    out.measure("reference", reference.method);
    out.measure_f64("reference_est_error", reference.est_error);
    let p = Propagator::with_mutation(setup.spec.clone(), mutation);
    let psi0 = &setup.psi0;

    if cfg.n_list.is_some() || cfg.j_list.is_none() {
        let n_list = cfg.n_list_or_default();
        let errors = sweep_n(&p, psi0, cfg.t, &n_list, &reference.wavefunction)?;
        let rows: Vec<Vec<String>> =
            n_list.iter().zip(&errors).map(|(n, e)| vec![n.to_string(), fmt_f64(*e)]).collect();
        out.write_csv("converge_n.csv", &["n", "l2_error"], &rows)?;
        let mut report = convergence_report(&n_list, &errors);
        report.notes.push(format!("reference: {}", reference.method));
        out.measure_f64("fitted_order_n", report.fitted_order.unwrap_or(f64::NAN));
        out.properties.push(report);
    }

    if let Some(j_list) = &cfg.j_list {
        let n = cfg.n_or(DEFAULT_SERIES_N);
        let pcfg = PropagatorConfig::with_n(n);
        let exact = p.propagate(cfg.t, &pcfg, psi0).map_err(numerical("propagate"))?;
        let scale = exact.norm();
        let rows: Vec<Result<(Vec<String>, f64), CliError>> = j_list
            .par_iter()
            .map(|&j| {
                let (s, trace) = p.series_partial(cfg.t, j, &pcfg, psi0).map_err(numerical("series"))?;
                let vs_exp = distance(&s, &exact)? / scale;
                let vs_ref = distance(&s, &reference.wavefunction)?;
                let tail = trace.partial_norms.last().copied().unwrap_or(f64::NAN);
                let row =
                    vec![j.to_string(), fmt_f64(vs_exp), fmt_f64(vs_ref), fmt_f64(tail), trace.converged.to_string()];
                Ok((row, vs_exp))
            })
            .collect();
        let rows: Vec<(Vec<String>, f64)> = rows.into_iter().collect::<Result<_, _>>()?;
        let table: Vec<Vec<String>> = rows.iter().map(|(r, _)| r.clone()).collect();
        out.write_csv(
            "converge_j.csv",
            &["j", "rel_error_vs_propagate", "l2_error_vs_reference", "last_term_norm", "tail_converged"],
            &table,
        )?;
        out.measure("series_n", n);
        if let Some((_, last)) = rows.last() {
            out.measure_f64("series_final_rel_error", *last);
        }
    }
    fail_on(&out.properties)
}

pub fn compare(cfg: &RunConfig, setup: &Setup, _mutation: Mutation, out: &mut RunOutputs) -> Result<(), CliError> {
    if setup.spec.family() != Family::MultiD {
        return Err(CliError::Usage("compare handles only the multi-d family (split-step needs H = ½Δ − V)".into()));
    }
    let reference = setup.require_reference(cfg, cfg.t)?;
    out.measure("reference", reference.method);
    out.measure_f64("reference_est_error", reference.est_error);
    let psi0 = &setup.psi0;
    let p = Propagator::new(setup.spec.clone());
    let n_list = cfg.n_list_or_default();
    let steps_list = cfg.steps_list.clone().unwrap_or_else(|| DEFAULT_STEPS_LIST.to_vec());

    enum Method {
        Chernoff(usize),
        Splitstep(usize),
        Dense,
    }
    let mut methods: Vec<Method> = n_list.iter().map(|&n| Method::Chernoff(n)).collect();
    methods.extend(steps_list.iter().map(|&s| Method::Splitstep(s)));
    if setup.grid.total_size() <= DENSE_SIZE_CAP {
        methods.push(Method::Dense);
    }
    let results: Vec<(String, usize, WaveFunction, f64)> = methods
        .par_iter()
        .map(|m| -> Result<_, CliError> {
            let start = Instant::now();
            let (name, param, psi) = match *m {
                Method::Chernoff(n) => (
                    "chernoff",
                    n,
                    p.propagate(cfg.t, &PropagatorConfig::with_n(n), psi0).map_err(numerical("propagate"))?,
                ),
                Method::Splitstep(s) => {
                    ("splitstep", s, splitstep_raw(&setup.spec, cfg.t, s, psi0).map_err(numerical("split-step"))?)
                }
                Method::Dense => (
                    "dense",
                    0,
                    dense_oracle(&setup.spec, cfg.t, psi0).map_err(numerical("dense oracle"))?.wavefunction,
                ),
            };
            Ok((name.to_string(), param, psi, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, _>>()?;

    let mut rows = Vec::new();
    for (name, param, psi, wall) in &results {
        let err = distance(psi, &reference.wavefunction)?;
        rows.push(vec![name.clone(), param.to_string(), fmt_f64(err), fmt_f64(*wall)]);
    }
    out.write_csv("compare.csv", &["method", "n_or_steps", "l2_error", "wall_time_s"], &rows)?;

    let finest = |name: &str| results.iter().filter(|r| r.0 == name).max_by_key(|r| r.1).map(|r| &r.2);
    if let (Some(c), Some(s)) = (finest("chernoff"), finest("splitstep")) {
        out.measure_f64("chernoff_vs_splitstep_finest", distance(c, s)?);
    }
    for name in ["chernoff", "splitstep", "dense"] {
        if let Some(psi) = finest(name) {
            out.measure_f64(&format!("{name}_finest_error"), distance(psi, &reference.wavefunction)?);
        }
    }
    Ok(())
}
