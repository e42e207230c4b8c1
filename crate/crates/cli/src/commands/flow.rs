use std::fs::File;
use std::io::BufWriter;
use std::sync::Arc;

use clap::{value_parser, Arg, ArgAction};
use g2_core::catalog::identify;
use g2_core::flow::{closed_form, flow_integrate, ClosedForm, FlowOptions, CLOSED_FORMS};
use g2_core::LieAlgebra;
use serde_json::{json, Value};

use crate::context::{CliError, CliResult, Context};
use crate::registry::Command;
use crate::report::Report;

/// Matching tolerance when recognising a catalog starting point.
const IDENTIFY_TOL: f64 = 1e-12;

/// Times at which the exact solutions are checked against the flow equation.
pub const ORACLE_TIMES: [f64; 4] = [0.0, 1.0, 10.0, 100.0];

fn starting_point(alg: &LieAlgebra, phi: &g2_core::KForm) -> Option<&'static ClosedForm> {
    identify(alg, phi, IDENTIFY_TOL).and_then(closed_form)
}

/// Laplacian flow of a closed `phi` with fixed-step RK4.
pub struct Flow;

impl Command for Flow {
    fn name(&self) -> &'static str {
        "flow"
    }

    fn about(&self) -> &'static str {
        "integrate the Laplacian flow of a closed phi; --oracle compares with the exact solution"
    }

    fn default_tol(&self) -> f64 {
        1e-6
    }

    fn args(&self) -> Vec<Arg> {
        vec![
            Arg::new("t-end")
                .long("t-end")
                .value_name("T")
                .default_value("1")
                .value_parser(value_parser!(f64))
                .help("final time"),
            Arg::new("dt")
                .long("dt")
                .value_name("DT")
                .default_value("1e-3")
                .value_parser(value_parser!(f64))
                .help("RK4 step"),
            Arg::new("sample-every")
                .long("sample-every")
                .value_name("N")
                .default_value("1")
                .value_parser(value_parser!(usize))
                .help("record every N-th step"),
            Arg::new("out")
                .long("out")
                .value_name("PATH")
                .value_parser(value_parser!(std::path::PathBuf))
                .help("write the trajectory as CSV"),
            Arg::new("oracle")
                .long("oracle")
                .action(ArgAction::SetTrue)
                .help("compare with the exact solution from a catalog starting point"),
        ]
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let alg = ctx.algebra()?;
        let phi0 = ctx.form("phi")?;
        let t_end = ctx.f64_arg("t-end").unwrap_or(1.0);
        let dt = ctx.f64_arg("dt").unwrap_or(1e-3);
        let opts = FlowOptions {
            sample_every: ctx.usize_arg("sample-every").unwrap_or(1),
            ..FlowOptions::default()
        };
        let traj = flow_integrate(&alg, phi0, t_end, dt, opts)?;

        if let Some(path) = ctx.path_arg("out") {
            let file = File::create(&path)
                .map_err(|e| CliError::Parse(format!("creating {}: {e}", path.display())))?;
            traj.write_csv(BufWriter::new(file))?;
            report.result("csv", path.display().to_string());
        }

        let first = &traj.states[0];
        let last = traj.last();
        let lap: Vec<f64> = traj
            .states
            .iter()
            .map(|s| s.diagnostics.laplacian_norm)
            .collect();
        let closedness = traj
            .states
            .iter()
            .map(|s| s.diagnostics.closedness)
            .fold(0.0, f64::max);
        report
            .result("termination", traj.termination.as_str())
            .result("steps", traj.steps)
            .result("samples", traj.states.len())
            .result("t_end", t_end)
            .result("dt", dt)
            .result("t_final", last.t)
            .result("phi_final", &last.phi)
            .result("initial", first.diagnostics)
            .result("final", last.diagnostics)
            .result("volume_non_decreasing", traj.volume_non_decreasing(1e-12))
            .result(
                "laplacian_norm_non_increasing",
                lap.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
            )
            .residual("closedness", closedness);

        if ctx.flag("oracle") {
            let Some(exact) = starting_point(&alg, phi0) else {
                report.result("oracle", Value::Null);
                report.fail("no exact solution is known for this starting point");
                return Ok(());
            };
            let mut max_dev: f64 = 0.0;
            for s in &traj.states {
                let dev = (&s.phi - &(exact.phi)(s.t)?).max_abs();
                max_dev = max_dev.max(dev);
            }
            let final_dev = (&last.phi - &(exact.phi)(last.t)?).max_abs();
            report
                .result(
                    "oracle",
                    json!({
                        "catalog": exact.catalog,
                        "max_deviation": max_dev,
                        "final_deviation": final_dev,
                    }),
                )
                .residual("oracle", max_dev);
            report.require_below("deviation from the exact solution", max_dev, ctx.tol);
        }
        Ok(())
    }
}

/// Checks that the exact flow solutions satisfy `∂ₜφ = Δφ`.
pub struct Oracle;

impl Command for Oracle {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn about(&self) -> &'static str {
        "ODE residual of the exact flow solutions (all, or the one starting at the input)"
    }

    fn default_tol(&self) -> f64 {
        1e-9
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let selected: Vec<&ClosedForm> = match &ctx.document {
            None => CLOSED_FORMS.iter().collect(),
            Some(_) => {
                let alg = ctx.algebra()?;
                match starting_point(&alg, ctx.form("phi")?) {
                    Some(c) => vec![c],
                    None => {
                        return Err(CliError::Invalid(
                            "no exact solution is known for this starting point".into(),
                        ))
                    }
                }
            }
        };
        let mut solutions = Vec::new();
        for c in selected {
            let alg = Arc::new(g2_core::catalog::catalog(c.catalog)?.algebra()?);
            let residuals = ORACLE_TIMES
                .iter()
                .map(|&t| c.ode_residual(&alg, t))
                .collect::<g2_core::Result<Vec<f64>>>()?;
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            report.residual(c.catalog, worst);
            report.require_below(&format!("{} ODE residual", c.catalog), worst, ctx.tol);
            solutions.push(json!({
                "catalog": c.catalog,
                "lower": c.lower,
                "times": ORACLE_TIMES,
                "ode_residuals": residuals,
            }));
        }
        report.result("solutions", solutions);
        Ok(())
    }
}
