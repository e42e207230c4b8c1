//! Input loading and the shared accessors commands build on.

use std::path::PathBuf;
use std::sync::Arc;

use clap::ArgMatches;
use g2_core::catalog::catalog;
use g2_core::g2::G2Structure;
use g2_core::input::{format_document, parse, InputDocument};
use g2_core::su3::Su3Structure;
use g2_core::{KForm, LieAlgebra, Metric};
use serde_json::{json, Value};

/// `d² = 0` on 1-forms must hold to this absolute tolerance.
pub const JACOBI_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad arguments, unreadable or unparsable input: exit 1, no report.
    Parse(String),
    /// Well-formed input that fails validation: exit 2 with a report.
    Invalid(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) | CliError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<g2_core::Error> for CliError {
    fn from(e: g2_core::Error) -> Self {
        use g2_core::Error as E;
        match e {
            E::Parse(_) | E::UnknownCatalog(_) | E::Csv(_) => CliError::Parse(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    None,
    Catalog(String),
    File(PathBuf),
    Stdin,
}

/// Everything a command sees: parsed flags, the loaded document and the
/// resolved tolerance.
pub struct Context<'a> {
    pub matches: &'a ArgMatches,
    pub source: InputSource,
    pub document: Option<InputDocument>,
    pub tol: f64,
}

impl<'a> Context<'a> {
    pub fn load(matches: &'a ArgMatches, tol: f64) -> CliResult<Self> {
        let name = matches.get_one::<String>("catalog").cloned();
        let path = matches.get_one::<PathBuf>("input").cloned();
        let (source, document) = match (name, path) {
            (Some(_), Some(_)) => {
                return Err(CliError::Parse(
                    "give either an input file or --catalog, not both".into(),
                ))
            }
            (Some(n), None) => {
                let doc = catalog(&n)?.document;
                (InputSource::Catalog(n), Some(doc))
            }
            (None, Some(p)) if p.as_os_str() == "-" => {
                let text = std::io::read_to_string(std::io::stdin())
                    .map_err(|e| CliError::Parse(format!("reading stdin: {e}")))?;
                (InputSource::Stdin, Some(parse_text(&text, "<stdin>")?))
            }
            (None, Some(p)) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::Parse(format!("reading {}: {e}", p.display())))?;
                let doc = parse_text(&text, &p.display().to_string())?;
                (InputSource::File(p), Some(doc))
            }
            (None, None) => (InputSource::None, None),
        };
        Ok(Context {
            matches,
            source,
            document,
            tol,
        })
    }

    /// The `input` block of the report.
    pub fn describe(&self) -> Value {
        let (kind, name) = match &self.source {
            InputSource::None => ("none", Value::Null),
            InputSource::Catalog(n) => ("catalog", json!(n)),
            InputSource::File(p) => ("file", json!(p.display().to_string())),
            InputSource::Stdin => ("stdin", Value::Null),
        };
        match &self.document {
            Some(doc) => json!({
                "source": kind,
                "name": name,
                "dim": doc.dim,
                "document": format_document(doc),
            }),
            None => json!({ "source": kind, "name": name }),
        }
    }

    pub fn document(&self) -> CliResult<&InputDocument> {
        self.document
            .as_ref()
            .ok_or_else(|| CliError::Parse("no input: pass a file, '-' or --catalog NAME".into()))
    }

    /// The algebra, rejected when it violates the Jacobi identity.
    pub fn algebra(&self) -> CliResult<Arc<LieAlgebra>> {
        let alg = self.document()?.algebra()?;
        let r = alg.jacobi_residual();
        if r > JACOBI_TOL {
            return Err(CliError::Invalid(format!(
                "structure constants violate the Jacobi identity (|d^2| = {r:e})"
            )));
        }
        Ok(Arc::new(alg))
    }

    pub fn form(&self, name: &str) -> CliResult<&KForm> {
        self.document()?
            .form(name)
            .ok_or_else(|| CliError::Invalid(format!("input has no form named '{name}'")))
    }

    pub fn has_form(&self, name: &str) -> bool {
        self.document
            .as_ref()
            .is_some_and(|d| d.form(name).is_some())
    }

    pub fn g2(&self) -> CliResult<G2Structure> {
        Ok(G2Structure::new(
            self.algebra()?,
            self.form("phi")?.clone(),
        )?)
    }

    pub fn su3(&self) -> CliResult<Su3Structure> {
        let (omega, psi) = (self.form("omega")?.clone(), self.form("psi")?.clone());
        Ok(Su3Structure::new(self.algebra()?, omega, psi)?)
    }

    /// The metric of `phi` when the input has one, of `(omega, psi)` when it
    /// has those, and the identity otherwise.
    pub fn metric(&self) -> CliResult<(Metric, &'static str)> {
        if self.has_form("phi") {
            Ok((self.g2()?.metric().clone(), "phi"))
        } else if self.has_form("omega") && self.has_form("psi") {
            Ok((self.su3()?.metric().clone(), "su3"))
        } else {
            Ok((Metric::identity(self.algebra()?.dim()), "identity"))
        }
    }

    pub fn f64_arg(&self, id: &str) -> Option<f64> {
        self.matches.try_get_one::<f64>(id).ok().flatten().copied()
    }

    pub fn usize_arg(&self, id: &str) -> Option<usize> {
        self.matches
            .try_get_one::<usize>(id)
            .ok()
            .flatten()
            .copied()
    }

    pub fn path_arg(&self, id: &str) -> Option<PathBuf> {
        self.matches
            .try_get_one::<PathBuf>(id)
            .ok()
            .flatten()
            .cloned()
    }

    pub fn flag(&self, id: &str) -> bool {
        self.matches
            .try_get_one::<bool>(id)
            .ok()
            .flatten()
            .copied()
            .unwrap_or(false)
    }
}

fn parse_text(text: &str, origin: &str) -> CliResult<InputDocument> {
    parse(text).map_err(|e| CliError::Parse(format!("{origin}: {e}")))
}
