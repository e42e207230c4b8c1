use g2_core::curvature::{
    einstein_calibrated_residual, einstein_residual, ricci, ricci_endomorphism, scal_from_torsion,
    scalar_curvature, soliton_solve, star_ricci,
};
use serde_json::{json, Value};

use super::sorted;
use crate::context::{CliResult, Context};
use crate::registry::Command;
use crate::report::{diagonal, matrix, Report};

/// Ricci tensor and scalar curvature of the left-invariant metric.
pub struct Ricci;

impl Command for Ricci {
    fn name(&self) -> &'static str {
        "ricci"
    }

    fn about(&self) -> &'static str {
        "Ricci tensor and scalar curvature (metric of phi, of (omega, psi), or the identity)"
    }

    fn default_tol(&self) -> f64 {
        1e-8
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let alg = ctx.algebra()?;
        let (g, source) = ctx.metric()?;
        let ric = ricci(&alg, &g)?;
        let endo = ricci_endomorphism(&alg, &g)?;
        let eig = endo.complex_eigenvalues().iter().map(|z| z.re).collect();
        let scal = scalar_curvature(&alg, &g)?;
        report
            .result("metric_source", source)
            .result("ricci", matrix(&ric))
            .result("ricci_eigenvalues", sorted(eig))
            .result("scal", scal)
            .residual("ricci_symmetry", (&ric - ric.transpose()).amax());
        if source == "phi" {
            let g2 = ctx.g2()?;
            let star = star_ricci(&g2)?;
            let from_torsion = scal_from_torsion(&g2)?;
            report
                .result("scal_from_torsion", from_torsion)
                .result("star_ricci", matrix(&star.matrix))
                .result("star_scal", star.scal)
                .residual("scal_identity", (scal - from_torsion).abs());
        }
        Ok(())
    }
}

/// Ricci soliton certificate `Ric = λ I + D` with `D` a derivation.
pub struct Soliton;

impl Command for Soliton {
    fn name(&self) -> &'static str {
        "soliton"
    }

    fn about(&self) -> &'static str {
        "solve Ric = lambda I + D for a derivation D"
    }

    fn default_tol(&self) -> f64 {
        1e-9
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let alg = ctx.algebra()?;
        let (g, source) = ctx.metric()?;
        let cert = soliton_solve(&alg, &g)?;
        let is_soliton = cert.residual <= ctx.tol;
        report
            .result("metric_source", source)
            .result("is_soliton", is_soliton)
            .result("lambda", cert.lambda)
            .result("kind", cert.kind.as_str())
            .result("derivation", matrix(&cert.derivation))
            .result("derivation_diagonal", diagonal(&cert.derivation, ctx.tol))
            .residual("soliton", cert.residual)
            .residual("derivation", alg.derivation_residual(&cert.derivation));
        Ok(())
    }
}

/// Einstein test for the metric, and the Einstein condition on calibrated `phi`.
pub struct Einstein;

impl Command for Einstein {
    fn name(&self) -> &'static str {
        "einstein"
    }

    fn about(&self) -> &'static str {
        "Einstein residual of the metric and, for calibrated phi, of the calibrated condition"
    }

    fn default_tol(&self) -> f64 {
        1e-9
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let alg = ctx.algebra()?;
        let (g, source) = ctx.metric()?;
        let residual = einstein_residual(&alg, &g)?;
        let scal = scalar_curvature(&alg, &g)?;
        report
            .result("metric_source", source)
            .result("is_einstein", residual <= ctx.tol)
            .result("einstein_constant", scal / alg.dim() as f64)
            .result("scal", scal)
            .result("ricci", matrix(&ricci(&alg, &g)?))
            .residual("einstein", residual);
        let calibrated = if source == "phi" {
            match einstein_calibrated_residual(&ctx.g2()?) {
                Ok(r) => {
                    report.residual("calibrated_einstein", r);
                    json!({ "calibrated": true, "einstein": r <= ctx.tol })
                }
                Err(g2_core::Error::NotCalibrated(_)) => json!({ "calibrated": false }),
                Err(e) => return Err(e.into()),
            }
        } else {
            Value::Null
        };
        report.result("calibrated_phi", calibrated);
        Ok(())
    }
}
