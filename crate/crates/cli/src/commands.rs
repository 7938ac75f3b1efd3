use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use microrev::channel::DIVERGENCE_THRESHOLD;
use microrev::photonics::{self, estimate_gamma};
use microrev::states::heat;
use microrev::sweeps::{beta_range, diagonal_cut, gamma_curve, gamma_map, ExtremumSearch, SweepGrid, SweepPoint};
use microrev::verify::{self, Fault};
use microrev::{ChannelParams, EnergySpec, Regime, ShotConfig, ThermalReservoir, TransitionCase};

use crate::args::{CurveArgs, CutArgs, ExtremumArgs, Format, MapArgs, OutputArgs, PhotonicArgs, VerifyArgs};
use crate::output::{self, json_float};
use crate::svg;

/// A flag combination that passed clap but is still invalid; reported
/// with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(flag: &str, e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(format!("invalid value for '--{flag}': {e}")).into()
}

fn channel_params(args: &crate::args::ChannelArgs) -> Result<ChannelParams> {
    let flag = if args.time.is_some() { "time" } else { "p" };
    args.params().map_err(|e| usage(flag, e))
}

fn reservoir(beta: f64) -> Result<ThermalReservoir> {
    ThermalReservoir::new(beta).map_err(|e| usage("beta-delta-e", e))
}

fn write_svg(path: Option<&Path>, render: impl FnOnce() -> String) -> Result<()> {
    if let Some(path) = path {
        fs::write(path, render()).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn emit(table: &output::Table, out: &OutputArgs, params: Value) -> Result<()> {
    table.emit(out.format, params, out.out.as_deref())
}

pub fn map(args: &MapArgs) -> Result<()> {
    let c = channel_params(&args.channel)?;
    let regime = Regime::from(args.regime);
    let grid = SweepGrid::new(args.beta_delta_e, c.p())
        .map_err(|e| usage("beta-delta-e", e))?
        .with_size(args.grid, args.grid)
        .map_err(|e| usage("grid", e))?
        .with_phases(args.phi_i, args.phi_f)
        .with_evaluation(args.evaluation.into());
    let rows = gamma_map(&grid, regime)?;
    let table = output::map_table(&rows);
    let params = json!({
        "beta_delta_e": args.beta_delta_e,
        "p": c.p(),
        "regime": format!("{regime:?}"),
        "grid": args.grid,
        "phi_i": args.phi_i,
        "phi_f": args.phi_f,
    });
    emit(&table, &args.output, params)?;
    write_svg(args.output.svg.as_deref(), || {
        let title = format!("Gamma, {regime:?}, beta dE = {}, p = {}", args.beta_delta_e, c.p());
        svg::heatmap(&title, &table.column("gamma"), args.grid, args.grid)
    })
}

pub fn curve(args: &CurveArgs) -> Result<()> {
    let c = channel_params(&args.channel)?;
    if args.beta_max < args.beta_min {
        return Err(usage(
            "beta-max",
            format!("{} is below --beta-min {}", args.beta_max, args.beta_min),
        ));
    }
    let betas = beta_range(args.beta_min, args.beta_max, args.n).map_err(|e| usage("n", e))?;
    let case = TransitionCase::from(args.case);
    let rows = gamma_curve(&case, &betas, c.p())?;
    let table = output::curve_table(&rows);
    let params = json!({ "case": args.case.number(), "p": c.p(), "beta_min": args.beta_min, "beta_max": args.beta_max });
    emit(&table, &args.output, params)?;
    write_svg(args.output.svg.as_deref(), || {
        let title = format!("Gamma, case {}, p = {}", args.case.number(), c.p());
        svg::line_plot(&title, "beta dE", "Gamma", &betas, &table.column("gamma"))
    })
}

pub fn cut(args: &CutArgs) -> Result<()> {
    let c = channel_params(&args.channel)?;
    reservoir(args.beta_delta_e)?;
    let regime = Regime::from(args.regime);
    let rows = diagonal_cut(args.beta_delta_e, c.p(), regime, args.n)?;
    let table = output::cut_table(&rows);
    let params = json!({ "beta_delta_e": args.beta_delta_e, "p": c.p(), "regime": format!("{regime:?}"), "n": args.n });
    emit(&table, &args.output, params)?;
    write_svg(args.output.svg.as_deref(), || {
        let title = format!("Gamma on C_i = C_f, {regime:?}, beta dE = {}", args.beta_delta_e);
        svg::line_plot(&title, "C", "Gamma", &table.column("c"), &table.column("gamma"))
    })
}

pub fn extremum(args: &ExtremumArgs) -> Result<()> {
    let c = channel_params(&args.channel)?;
    let point = SweepPoint::new(args.beta_delta_e, c.p()).map_err(|e| usage("beta-delta-e", e))?;
    let regime = Regime::from(args.regime);
    let e = ExtremumSearch::default().run(&point, regime)?;
    println!("{}", output::extremum_summary(&e));
    if let Some(path) = args.out.as_deref() {
        let table = output::extremum_table(&e);
        let rounds: Vec<Value> = e.round_values.iter().map(|&g| json_float(g)).collect();
        let params = json!({
            "beta_delta_e": args.beta_delta_e,
            "p": c.p(),
            "regime": format!("{regime:?}"),
            "round_values": rounds,
        });
        table.emit(args.format, params, Some(path))?;
    }
    Ok(())
}

pub fn photonic_sim(args: &PhotonicArgs) -> Result<()> {
    let c = channel_params(&args.channel)?;
    let r = reservoir(args.beta_delta_e)?;
    let (initial, final_) = TransitionCase::from(args.case).states();
    let x = photonics::param_map(&initial, &r, c)?;
    let (pf, pb) = photonics::transition_probabilities(&initial, &final_, &r, c)?;
    let beta_q = r.beta_delta_e() * heat(&initial, &final_, &EnergySpec::default());
    let ratio = if pb <= DIVERGENCE_THRESHOLD { f64::INFINITY } else { pf / pb };
    let sampled = if args.n_shots == 0 {
        Value::Null
    } else {
        let s = ShotConfig::new(args.n_shots, args.seed)?;
        let est = estimate_gamma(pf, pb, beta_q, &s)?;
        json!({
            "n_shots": est.n_shots,
            "p_forward": json_float(est.p_forward),
            "p_forward_std_err": json_float(est.p_forward_std_err),
            "p_backward": json_float(est.p_backward),
            "p_backward_std_err": json_float(est.p_backward_std_err),
            "ratio": json_float(est.ratio),
            "gamma": json_float(est.gamma),
            "std_err": json_float(est.gamma_std_err),
            "diverged": est.diverged,
        })
    };
    let report = json!({
        "params": {
            "case": args.case.number(),
            "beta_delta_e": args.beta_delta_e,
            "p": c.p(),
            "w_e": json_float(r.w_e()),
            "a": json_float(x.a),
            "b": json_float(x.b),
            "phi_res": json_float(x.phi_res),
            "theta_ch": json_float(x.theta_ch),
            "theta_i": json_float(initial.theta()),
            "theta_f": json_float(final_.theta()),
            "n_shots": args.n_shots,
        },
        "analytic": {
            "p_forward": json_float(pf),
            "p_backward": json_float(pb),
            "ratio": json_float(ratio),
            "beta_q": json_float(beta_q),
            "gamma": json_float(ratio * beta_q.exp()),
            "diverged": ratio.is_infinite(),
        },
        "sampled": sampled,
        "seed": args.seed,
    });
    output::with_output(args.out.as_deref(), |w| output::write_json(w, &report))
}

/// Returns whether every check passed.
pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let report = verify::run_all(Fault {
        forward_offset: args.perturb_forward,
    });
    match args.format {
        Format::Csv => output::with_output(None, |w| output::verify_table(&report).write_csv(w))?,
        Format::Json => {
            let summary = json!({ "suites": report.suites.len(), "passed": report.passed, "failed": report.failed });
            let doc = output::verify_table(&report).to_json(summary);
            output::with_output(None, |w| output::write_json(w, &doc))?
        }
    }
    for s in &report.suites {
        eprintln!("suite {}: {} passed, {} failed", s.suite, s.passed, s.failed);
    }
    eprintln!(
        "verify: {} suites, {} checks passed, {} failed",
        report.suites.len(),
        report.passed,
        report.failed
    );
    Ok(report.all_passed())
}
