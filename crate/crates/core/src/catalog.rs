//! Built-in algebras and forms, written in the input syntax.

use crate::error::{Error, Result};
use crate::exterior::KForm;
use crate::input::{parse, InputDocument};
use crate::liealg::LieAlgebra;

const PHI_STD: &str = "e127 + e347 + e567 + e135 - e146 - e236 - e245";

struct Source {
    name: &'static str,
    summary: &'static str,
    algebra: &'static str,
    forms: &'static [(&'static str, &'static str)],
}

const SOURCES: &[Source] = &[
    Source {
        name: "n1",
        summary: "abelian R^7 with the standard G2 form",
        algebra: "dim 7",
        forms: &[("phi", PHI_STD)],
    },
    Source {
        name: "n2",
        summary: "(0,0,0,0,e12,e13,0) with its calibrated nilsoliton form",
        algebra: "dim 7 d e5 = e12 d e6 = e13",
        forms: &[("phi", "e147 + e267 + e357 + e123 + e156 + e245 - e346")],
    },
    Source {
        name: "n3",
        summary: "(0,0,0,e12,e13,e23,0)",
        algebra: "dim 7 d e4 = e12 d e5 = e13 d e6 = e23",
        forms: &[],
    },
    Source {
        name: "n4",
        summary: "(0,0,e12,0,0,e13+e24,e15) with its calibrated nilsoliton form",
        algebra: "dim 7 d e3 = e12 d e6 = e13 + e24 d e7 = e15",
        forms: &[("phi", "-e124 - e456 + e347 + e135 + e167 + e257 - e236")],
    },
    Source {
        name: "n5",
        summary: "(0,0,e12,0,0,e13,e14+e25)",
        algebra: "dim 7 d e3 = e12 d e6 = e13 d e7 = e14 + e25",
        forms: &[],
    },
    Source {
        name: "n6",
        summary: "(0,0,0,e12,e13,e14,e15) with its calibrated nilsoliton form",
        algebra: "dim 7 d e4 = e12 d e5 = e13 d e6 = e14 d e7 = e15",
        forms: &[("phi", "e123 + e145 + e167 + e257 - e246 + e347 + e356")],
    },
    Source {
        name: "n7",
        summary: "(0,0,0,e12,e13,e14+e23,e15)",
        algebra: "dim 7 d e4 = e12 d e5 = e13 d e6 = e14 + e23 d e7 = e15",
        forms: &[],
    },
    Source {
        name: "n8",
        summary: "(0,0,e12,e13,e23,e15+e24,e16+e34)",
        algebra: "dim 7 d e3 = e12 d e4 = e13 d e5 = e23 d e6 = e15 + e24 d e7 = e16 + e34",
        forms: &[],
    },
    Source {
        name: "n9",
        summary: "(0,0,e12,e13,e23,e15+e24,e16+e34+e25)",
        algebra: "dim 7 d e3 = e12 d e4 = e13 d e5 = e23 d e6 = e15 + e24 d e7 = e16 + e34 + e25",
        forms: &[],
    },
    Source {
        name: "n10",
        summary: "(0,0,e12,0,e13+e24,e14,e46+e34+e15+e23)",
        algebra: "dim 7 d e3 = e12 d e5 = e13 + e24 d e6 = e14 d e7 = e46 + e34 + e15 + e23",
        forms: &[],
    },
    Source {
        name: "n11",
        summary: "(0,0,e12,0,e13,e24+e23,e25+e34+e15+e16-3e26)",
        algebra:
            "dim 7 d e3 = e12 d e5 = e13 d e6 = e24 + e23 d e7 = e25 + e34 + e15 + e16 - 3 e26",
        forms: &[],
    },
    Source {
        name: "n12",
        summary: "(0,0,0,e12,e23,-e13,2e26-2e34-2e16+2e25)",
        algebra: "dim 7 d e4 = e12 d e5 = e23 d e6 = -e13 d e7 = 2 e26 - 2 e34 - 2 e16 + 2 e25",
        forms: &[],
    },
    Source {
        name: "n12_modified_basis",
        summary: "n12 in the basis adapted to its calibrated nilsoliton form",
        algebra: "dim 7
            d e4 = sqrt(3)/6 e12
            d e5 = sqrt(3)/12 e13 - 1/4 e23
            d e6 = -sqrt(3)/12 e23 - 1/4 e13
            d e7 = sqrt(3)/12 e16 - sqrt(3)/6 e34 + sqrt(3)/12 e25 + 1/4 e26 - 1/4 e15",
        forms: &[("phi", "-e124 + e167 + e257 + e347 - e456 + e135 - e236")],
    },
    Source {
        name: "h1",
        summary: "(0,0,0,e12,e14-e23,e15+e34)",
        algebra: "dim 6 d e4 = e12 d e5 = e14 - e23 d e6 = e15 + e34",
        forms: &[],
    },
    Source {
        name: "h2",
        summary: "complex Heisenberg algebra (0,0,0,0,e13-e24,e14+e23) with a coupled SU(3) pair",
        algebra: "dim 6 d e5 = e13 - e24 d e6 = e14 + e23",
        forms: &[
            ("omega", "e12 + e34 - e56"),
            ("psi", "e136 - e145 - e235 - e246"),
        ],
    },
    Source {
        name: "s_ext_h2",
        summary: "Einstein rank-one extension of h2 with a locally conformal calibrated form",
        algebra: "dim 7
            d e1 = 1/2 e17
            d e2 = 1/2 e27
            d e3 = 1/2 e37
            d e4 = 1/2 e47
            d e5 = e13 - e24 + e57
            d e6 = e14 + e23 + e67",
        forms: &[("phi", "e127 + e347 - e567 + e136 - e145 - e235 - e246")],
    },
    Source {
        name: "std_g2",
        summary: "the standard G2 form on abelian R^7",
        algebra: "dim 7",
        forms: &[("phi", PHI_STD)],
    },
];

/// A named built-in algebra with its forms.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub document: InputDocument,
}

impl CatalogEntry {
    pub fn algebra(&self) -> Result<LieAlgebra> {
        self.document.algebra()
    }

    pub fn form(&self, name: &str) -> Option<&KForm> {
        self.document.form(name)
    }
}

/// Names accepted by [`catalog`], in listing order.
pub fn names() -> impl Iterator<Item = &'static str> {
    SOURCES.iter().map(|s| s.name)
}

/// Looks up a built-in entry by name.
pub fn catalog(name: &str) -> Result<CatalogEntry> {
    let src = SOURCES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownCatalog(name.to_string()))?;
    let mut text = format!("algebra {{ {} }}\n", src.algebra);
    for (form, body) in src.forms {
        text.push_str(&format!("form {form} {{ {body} }}\n"));
    }
    let document = parse(&text)?;
    Ok(CatalogEntry {
        name: src.name,
        summary: src.summary,
        document,
    })
}

/// The standard positive 3-form on R^7.
pub fn phi_std() -> KForm {
    catalog("std_g2")
        .ok()
        .and_then(|e| e.form("phi").cloned())
        .expect("built-in catalog parses")
}

/// Finds the catalog entry whose algebra and `phi` match, if any.
pub fn identify(algebra: &LieAlgebra, phi: &KForm, tol: f64) -> Option<&'static str> {
    SOURCES.iter().map(|s| s.name).find(|name| {
        let Ok(entry) = catalog(name) else {
            return false;
        };
        let same_alg = entry.document.dim == algebra.dim()
            && entry
                .document
                .differentials
                .iter()
                .zip(algebra.differentials())
                .all(|(a, b)| a.approx_eq(b, tol));
        same_alg && entry.form("phi").is_some_and(|p| p.approx_eq(phi, tol))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_and_satisfies_jacobi() {
        for name in names() {
            let e = catalog(name).unwrap();
            let alg = e.algebra().unwrap();
            assert!(alg.jacobi_residual() < 1e-12, "{name}");
        }
    }

    #[test]
    fn reference_forms() {
        let n2 = catalog("n2").unwrap();
        assert_eq!(
            n2.form("phi").unwrap().to_string(),
            "e123 + e147 + e156 + e245 + e267 - e346 + e357"
        );
        let h2 = catalog("h2").unwrap();
        assert_eq!(h2.form("omega").unwrap().to_string(), "e12 + e34 - e56");
        assert!(matches!(catalog("n13"), Err(Error::UnknownCatalog(_))));
    }

    #[test]
    fn modified_n12_coefficient() {
        let e = catalog("n12_modified_basis").unwrap();
        let de4 = &e.document.differentials[3];
        assert!((de4.coeff(&[1, 2]) - 3f64.sqrt() / 6.0).abs() < 1e-16);
    }

    #[test]
    fn identify_recognises_entries() {
        let e = catalog("n2").unwrap();
        let alg = e.algebra().unwrap();
        assert_eq!(identify(&alg, e.form("phi").unwrap(), 1e-12), Some("n2"));
    }
}
