use g2_core::g2::{classify, torsion_forms, CLASSIFY_TOL};
use g2_core::su3::{g2_product, su3_classify, SU3_TOL};
use serde_json::json;

use super::class_json;
use crate::context::{CliResult, Context};
use crate::registry::Command;
use crate::report::{matrix, Report};

/// The SU(3)-structure of `(omega, psi)` on a six-dimensional algebra.
pub struct Su3;

impl Command for Su3 {
    fn name(&self) -> &'static str {
        "su3"
    }

    fn about(&self) -> &'static str {
        "J, metric and type of the SU(3)-structure (omega, psi), and of phi = omega^e7 + psi"
    }

    fn default_tol(&self) -> f64 {
        SU3_TOL
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let s = ctx.su3()?;
        let c = su3_classify(&s, ctx.tol)?;
        let product = g2_product(&s)?;
        let t = torsion_forms(&product)?;
        report
            .result("lambda", s.lambda())
            .result("j", matrix(s.j()))
            .result("metric", matrix(s.metric().matrix()))
            .result("psi_hat", s.psi_hat())
            .result(
                "class",
                json!({
                    "half_flat": c.half_flat,
                    "coupled": c.coupled,
                    "symplectic_half_flat": c.symplectic_half_flat,
                    "nearly_kahler": c.nearly_kahler,
                }),
            )
            .result("coupled_constant", c.coupled_constant)
            .result(
                "product",
                json!({
                    "phi": product.phi(),
                    "class": class_json(&classify(&t, CLASSIFY_TOL.max(ctx.tol))),
                }),
            )
            .residual("normalization", s.normalization_defect()?)
            .residual("coupled", c.coupled_residual)
            .residual("nearly_kahler", c.nearly_kahler_residual)
            .residual("d_omega2", c.d_omega2)
            .residual("d_psi", c.d_psi);
        Ok(())
    }
}
