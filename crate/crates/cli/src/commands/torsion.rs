use g2_core::g2::{classify, lee_form, torsion_forms, CLASSIFY_TOL};
use serde_json::json;

use super::class_json;
use crate::context::{CliResult, Context};
use crate::registry::Command;
use crate::report::Report;

/// The torsion forms of `phi`.
pub struct Torsion;

impl Command for Torsion {
    fn name(&self) -> &'static str {
        "torsion"
    }

    fn about(&self) -> &'static str {
        "intrinsic torsion forms tau0..tau3 and Lee form of phi"
    }

    fn default_tol(&self) -> f64 {
        CLASSIFY_TOL
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let g2 = ctx.g2()?;
        let t = torsion_forms(&g2)?;
        let class = classify(&t, ctx.tol);
        let [n0, n1, n2, n3] = t.norms;
        report
            .result("tau0", t.tau0)
            .result("tau1", &t.tau1)
            .result("tau2", &t.tau2)
            .result("tau3", &t.tau3)
            .result(
                "norms",
                json!({ "tau0": n0, "tau1": n1, "tau2": n2, "tau3": n3 }),
            )
            .result("lee_form", lee_form(&g2)?)
            .result("class", class_json(&class))
            .residual("reconstruction", t.residual)
            .residual("tau1_mismatch", t.tau1_mismatch);
        Ok(())
    }
}

/// The torsion class of `phi`.
pub struct Classify;

impl Command for Classify {
    fn name(&self) -> &'static str {
        "classify"
    }

    fn about(&self) -> &'static str {
        "torsion class of phi from the vanishing torsion forms"
    }

    fn default_tol(&self) -> f64 {
        CLASSIFY_TOL
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let g2 = ctx.g2()?;
        let t = torsion_forms(&g2)?;
        let class = classify(&t, ctx.tol);
        let [n0, n1, n2, n3] = t.norms;
        let alg = g2.algebra();
        let lee = lee_form(&g2)?;
        report
            .result("class", class_json(&class))
            .result(
                "norms",
                json!({ "tau0": n0, "tau1": n1, "tau2": n2, "tau3": n3 }),
            )
            .residual("dphi", g2.star().norm(&g2.dphi()?)?)
            .residual("d_star_phi", g2.star().norm(&g2.d_star_phi()?)?)
            .residual("lee_closed", g2.star().norm(&alg.ce_diff(&lee)?)?)
            .residual("reconstruction", t.residual);
        Ok(())
    }
}
