use g2_core::catalog::{catalog, names};
use g2_core::input::{format_document, parse};
use serde_json::json;

use crate::context::{CliResult, Context};
use crate::registry::Command;
use crate::report::Report;

/// Lists the built-in entries, or describes one document.
pub struct Catalog;

impl Command for Catalog {
    fn name(&self) -> &'static str {
        "catalog"
    }

    fn about(&self) -> &'static str {
        "list built-in algebras and forms, or show the canonical text of one input"
    }

    fn default_tol(&self) -> f64 {
        1e-12
    }

    fn run(&self, ctx: &Context, report: &mut Report) -> CliResult<()> {
        let Some(doc) = &ctx.document else {
            let mut entries = Vec::new();
            for name in names() {
                let e = catalog(name)?;
                let forms: Vec<&str> = e.document.forms.iter().map(|(n, _)| n.as_str()).collect();
                entries.push(json!({
                    "name": name,
                    "summary": e.summary,
                    "dim": e.document.dim,
                    "forms": forms,
                }));
            }
            report.result("entries", entries);
            return Ok(());
        };
        let text = format_document(doc);
        let round_trip = parse(&text).is_ok_and(|d| d == *doc);
        if !round_trip {
            report.fail("canonical text does not parse back to the same document");
        }
        let matched = names().find(|n| catalog(n).is_ok_and(|e| e.document == *doc));
        let summary = matched.and_then(|n| catalog(n).ok()).map(|e| e.summary);
        report
            .result("name", matched)
            .result("summary", summary)
            .result("text", text)
            .result("round_trip", round_trip);
        Ok(())
    }
}
