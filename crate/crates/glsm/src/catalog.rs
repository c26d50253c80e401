//! Built-in example catalog. Every entry re-verifies through the classifier
//! when the catalog is assembled, so a loaded entry is guaranteed to exhibit
//! the class it advertises.

use crate::bundles::{decompose, SubmanifoldClass};
use crate::config::{parse_config, RunConfig};
use crate::error::{GlsmError, Result};
use crate::search::{search_example, SearchOutcome};
use crate::verify::{classify_golden_submanifold, GoldenClass};

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Where the instance comes from (hand construction or search seed).
    pub provenance: &'static str,
    pub config: RunConfig,
    pub expected_class: SubmanifoldClass,
    pub expected_golden: GoldenClass,
}

const LIGHT_CONE: &str = r#"
[ambient]
dim = 3
metric_diag = [-1.0, 1.0, 1.0]

[immersion]
chart_dim = 2
components = ["u1", "u1*cos(u2)", "u1*sin(u2)"]
domain = [[0.25, 2.0], [-3.0, 3.0]]
"#;

const NULL_PLANE: &str = r#"
[ambient]
dim = 4
metric_diag = [1.0, 1.0, -1.0, -1.0]

[immersion]
chart_dim = 2
components = ["u1", "u2", "u1", "u2"]
domain = [[-1.0, 1.0], [-1.0, 1.0]]
"#;

const ISOTROPIC_PLANE: &str = r#"
[ambient]
dim = 6
metric_diag = [1.0, 1.0, -1.0, -1.0, -1.0, -1.0]

[immersion]
chart_dim = 2
components = ["u1", "u2", "u1", "u2", "0", "0"]
domain = [[-1.0, 1.0], [-1.0, 1.0]]
"#;

const PARABOLOID: &str = r#"
[ambient]
dim = 3
signature = [3, 0]

[immersion]
chart_dim = 2
components = ["u1", "u2", "u1^2 + u2^2"]
domain = [[-1.0, 1.0], [-1.0, 1.0]]
"#;

fn search_entry(class: GoldenClass, seed: u64) -> Result<RunConfig> {
    match search_example(class, 8, (4, 4), 2, seed, 64)? {
        SearchOutcome::Found(cfg) => Ok(cfg),
        SearchOutcome::NotFound(nf) => Err(GlsmError::Eval(format!(
            "catalog search entry failed: {} (best residual {})",
            nf.note, nf.best_residual
        ))),
    }
}

/// Assembles and re-verifies the full catalog.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    let entries = vec![
        CatalogEntry {
            name: "lightcone-r3",
            description: "light cone of the Minkowski 3-space, radical rank 1",
            provenance: "hand construction",
            config: parse_config(LIGHT_CONE)?,
            expected_class: SubmanifoldClass::CoIsotropic,
            expected_golden: GoldenClass::Neither,
        },
        CatalogEntry {
            name: "null-plane-r4",
            description: "totally null plane in the neutral 4-space, radical rank 2",
            provenance: "hand construction",
            config: parse_config(NULL_PLANE)?,
            expected_class: SubmanifoldClass::TotallyLightlike,
            expected_golden: GoldenClass::Neither,
        },
        CatalogEntry {
            name: "isotropic-r2",
            description: "totally null plane in a 6-space of signature (2, 4), codimension 4",
            provenance: "hand construction",
            config: parse_config(ISOTROPIC_PLANE)?,
            expected_class: SubmanifoldClass::Isotropic,
            expected_golden: GoldenClass::Neither,
        },
        CatalogEntry {
            name: "paraboloid-nondegenerate",
            description: "Euclidean paraboloid, trivial radical",
            provenance: "hand construction",
            config: parse_config(PARABOLOID)?,
            expected_class: SubmanifoldClass::NonDegenerate,
            expected_golden: GoldenClass::Neither,
        },
        CatalogEntry {
            name: "radical-transversal-r2",
            description: "radical transversal plane in the golden neutral 8-space, \
                          radical rank 2, screen rank 2",
            provenance: "search oracle, seed 7",
            config: search_entry(GoldenClass::RadicalTransversal, 7)?,
            expected_class: SubmanifoldClass::RLightlike,
            expected_golden: GoldenClass::RadicalTransversal,
        },
        CatalogEntry {
            name: "transversal-mu-r2",
            description: "transversal plane in the golden neutral 8-space, radical rank 2, \
                          invariant complement mu of rank 2",
            provenance: "search oracle, seed 9",
            config: search_entry(GoldenClass::Transversal, 9)?,
            expected_class: SubmanifoldClass::RLightlike,
            expected_golden: GoldenClass::Transversal,
        },
    ];
    for e in &entries {
        verify_entry(e)?;
    }
    Ok(entries)
}

/// Looks up one entry by name.
pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    catalog()?
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GlsmError::Validation(vec![format!("unknown catalog entry: {name}")]))
}

fn center_point(cfg: &RunConfig) -> Vec<f64> {
    cfg.immersion
        .domain
        .iter()
        .map(|&(lo, hi)| 0.5 * (lo + hi))
        .collect()
}

fn verify_entry(e: &CatalogEntry) -> Result<()> {
    let amb = e.config.build_ambient()?;
    let imm = e.config.build_immersion()?;
    let num = e.config.build_numeric();
    let u = center_point(&e.config);
    let d = decompose(&amb, &imm, &u, 1)?;
    if d.class != e.expected_class {
        return Err(GlsmError::ClassMismatch(format!(
            "catalog entry {}: expected {:?}, decomposed as {:?}",
            e.name, e.expected_class, d.class
        )));
    }
    if let Some(g) = amb.golden() {
        let rep = classify_golden_submanifold(&d, g, num.tau_eq);
        if rep.class != e.expected_golden {
            return Err(GlsmError::ClassMismatch(format!(
                "catalog entry {}: expected golden class {:?}, classified {:?} ({:?})",
                e.name, e.expected_golden, rep.class, rep.notes
            )));
        }
    } else if e.expected_golden != GoldenClass::Neither {
        return Err(GlsmError::ClassMismatch(format!(
            "catalog entry {}: golden class expected but no golden structure configured",
            e.name
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_and_reverifies() {
        let entries = catalog().unwrap();
        assert_eq!(entries.len(), 6);
        let names: Vec<_> = entries.iter().map(|e| e.name).collect();
        assert!(names.contains(&"lightcone-r3"));
        assert!(names.contains(&"radical-transversal-r2"));
        assert!(names.contains(&"transversal-mu-r2"));
    }

    #[test]
    fn catalog_covers_every_classifier_branch() {
        let entries = catalog().unwrap();
        for class in [
            SubmanifoldClass::NonDegenerate,
            SubmanifoldClass::RLightlike,
            SubmanifoldClass::CoIsotropic,
            SubmanifoldClass::Isotropic,
            SubmanifoldClass::TotallyLightlike,
        ] {
            assert!(
                entries.iter().any(|e| e.expected_class == class),
                "missing {class:?}"
            );
        }
    }

    #[test]
    fn lookup_by_name() {
        let e = catalog_entry("null-plane-r4").unwrap();
        assert_eq!(e.expected_class, SubmanifoldClass::TotallyLightlike);
        assert!(catalog_entry("nope").is_err());
    }
}
