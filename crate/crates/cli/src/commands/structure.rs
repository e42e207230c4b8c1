use std::sync::Arc;

use g2_core::g2::G2Structure;
use g2_core::su3::Su3Structure;
use serde_json::{json, Map, Value};

use super::sorted;
use crate::context::{CliResult, Context, JACOBI_TOL};
use crate::registry::Command;
use crate::report::{matrix, Report};

/// Jacobi identity plus validity of `phi` and of the pair `(omega, psi)`.
pub struct Check;

impl Command for Check {
    fn name(&self) -> &'static str {
        "check"
    }

    fn about(&self) -> &'static str {
        "validate the Jacobi identity and every structure in the input"
    }

    fn default_tol(&self) -> f64 {
        JACOBI_TOL
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let doc = ctx.document()?;
        let alg = Arc::new(doc.algebra()?);
        let jacobi = alg.jacobi_residual();
        report.residual("jacobi", jacobi);
        let jacobi_ok = report.require_below("Jacobi residual |d^2|", jacobi, ctx.tol);
        report.result("dim", alg.dim()).result("jacobi", jacobi_ok);
        if jacobi_ok {
            report
                .result("lower_central_series", alg.lower_central_series())
                .result("nilpotent", alg.is_nilpotent())
                .result("unimodular", alg.is_unimodular(JACOBI_TOL))
                .result("derivation_dim", alg.derivation_space().len());
        }

        let mut forms = Map::new();
        for (name, f) in &doc.forms {
            forms.insert(name.clone(), json!({ "degree": f.degree() }));
        }
        if let Some(phi) = doc.form("phi") {
            let entry = match G2Structure::new(Arc::clone(&alg), phi.clone()) {
                Ok(g2) => {
                    report.residual("metric_identity", g2.metric_identity_residual()?);
                    json!({ "degree": 3, "kind": "g2", "valid": true })
                }
                Err(e) => {
                    report.fail(format!("phi: {e}"));
                    json!({ "degree": phi.degree(), "kind": "g2", "valid": false, "error": e.to_string() })
                }
            };
            forms.insert("phi".into(), entry);
        }
        match (doc.form("omega"), doc.form("psi")) {
            (Some(omega), Some(psi)) => {
                let entry = match Su3Structure::new(Arc::clone(&alg), omega.clone(), psi.clone()) {
                    Ok(s) => {
                        report.residual("normalization", s.normalization_defect()?);
                        json!({ "kind": "su3", "valid": true })
                    }
                    Err(e) => {
                        report.fail(format!("(omega, psi): {e}"));
                        json!({ "kind": "su3", "valid": false, "error": e.to_string() })
                    }
                };
                for name in ["omega", "psi"] {
                    if let Some(Value::Object(m)) = forms.get_mut(name) {
                        m.extend(entry.as_object().cloned().unwrap_or_default());
                    }
                }
            }
            (Some(_), None) | (None, Some(_)) => {
                report.fail("omega and psi must be given together");
            }
            (None, None) => {}
        }
        report.result("forms", forms);
        let valid = report.errors.is_empty();
        report.result("valid", valid);
        Ok(())
    }
}

/// The metric, orientation and volume induced by `phi`.
pub struct MetricCmd;

impl Command for MetricCmd {
    fn name(&self) -> &'static str {
        "metric"
    }

    fn about(&self) -> &'static str {
        "metric, orientation and volume form induced by phi"
    }

    fn default_tol(&self) -> f64 {
        1e-12
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let g2 = ctx.g2()?;
        let g = g2.metric().matrix();
        let eig = g.clone().symmetric_eigenvalues().iter().copied().collect();
        report
            .result("metric", matrix(g))
            .result("eigenvalues", sorted(eig))
            .result("orientation", g2.phi_orientation())
            .result("volume_density", g2.volume_density())
            .result("volume", g2.volume())
            .result("star_phi", g2.star_phi())
            .residual("metric_identity", g2.metric_identity_residual()?);
        Ok(())
    }
}
