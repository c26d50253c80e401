//! Run configuration: a TOML document describing the ambient manifold, the
//! immersion, the sample plan, numeric knobs, and the theorem selection.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{GlsmError, Result};
use crate::expr::{ambient_vars, chart_vars, Expression};
use crate::geometry::{parse_metric_expressions, AmbientManifold, Immersion, Numeric};
use crate::golden::{golden_from_product, GoldenStructure, ProductStructure};
use crate::verify::all_theorems;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub dim: usize,
    /// Shorthand for a diagonal metric with `signature.0` plus-ones followed
    /// by `signature.1` minus-ones.
    pub signature: Option<(usize, usize)>,
    /// Constant diagonal metric entries.
    pub metric_diag: Option<Vec<f64>>,
    /// Full metric as expression rows in the ambient variables x1..xn.
    pub metric: Option<Vec<Vec<String>>>,
    /// Almost product structure F (F^2 = I); P is derived as (I + sqrt5 F)/2.
    pub f_matrix: Option<Vec<Vec<f64>>>,
    /// Golden structure P directly (P^2 = P + I).
    pub p_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImmersionSpec {
    pub chart_dim: usize,
    /// Component expressions in the chart variables u1..um.
    pub components: Vec<String>,
    /// Domain box, one (lo, hi) pair per chart variable.
    pub domain: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    Grid,
    LowDiscrepancy,
}

fn default_points() -> usize {
    16
}

fn default_seed() -> u64 {
    42
}

fn default_strategy() -> SampleStrategy {
    SampleStrategy::Grid
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_strategy")]
    pub strategy: SampleStrategy,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            points: default_points(),
            seed: default_seed(),
            strategy: default_strategy(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSpec {
    pub fd_step: Option<f64>,
    pub tau_rank: Option<f64>,
    pub tau_eq: Option<f64>,
}

impl Default for NumericSpec {
    fn default() -> Self {
        NumericSpec {
            fd_step: None,
            tau_rank: None,
            tau_eq: None,
        }
    }
}

fn default_theorems() -> Vec<String> {
    vec!["all".to_string()]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ambient: AmbientSpec,
    pub immersion: ImmersionSpec,
    #[serde(default)]
    pub sampling: SamplePlan,
    #[serde(default)]
    pub numeric: NumericSpec,
    #[serde(default = "default_theorems")]
    pub theorems: Vec<String>,
}

/// Parses and validates a configuration document. Syntax errors carry the
/// byte offset and the parser's line/column message; validation problems
/// are collected into one error naming every offending field.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| GlsmError::Parse {
        offset: e.span().map_or(0, |s| s.start),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let dim = self.ambient.dim;
        if dim == 0 {
            problems.push("ambient.dim must be positive".to_string());
        }
        let metric_choices = [
            self.ambient.signature.is_some(),
            self.ambient.metric_diag.is_some(),
            self.ambient.metric.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if metric_choices != 1 {
            problems.push(
                "exactly one of ambient.signature, ambient.metric_diag, ambient.metric required"
                    .to_string(),
            );
        }
        if let Some((p, q)) = self.ambient.signature {
            if p + q != dim {
                problems.push(format!(
                    "ambient.signature ({p}, {q}) does not sum to ambient.dim {dim}"
                ));
            }
        }
        if let Some(d) = &self.ambient.metric_diag {
            if d.len() != dim {
                problems.push(format!(
                    "ambient.metric_diag has {} entries, ambient.dim is {dim}",
                    d.len()
                ));
            }
            if d.iter().any(|&x| x == 0.0) {
                problems.push("ambient.metric_diag entries must be nonzero".to_string());
            }
        }
        if let Some(rows) = &self.ambient.metric {
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                problems.push(format!("ambient.metric must be a {dim}x{dim} expression grid"));
            } else {
                let vars = ambient_vars(dim);
                for (i, row) in rows.iter().enumerate() {
                    for (j, cell) in row.iter().enumerate() {
                        if let Err(e) = Expression::parse(cell, &vars) {
                            problems.push(format!("ambient.metric[{i}][{j}]: {e}"));
                        }
                    }
                }
            }
        }
        if self.ambient.f_matrix.is_some() && self.ambient.p_matrix.is_some() {
            problems.push("at most one of ambient.f_matrix, ambient.p_matrix allowed".to_string());
        }
        for (name, m) in [
            ("ambient.f_matrix", &self.ambient.f_matrix),
            ("ambient.p_matrix", &self.ambient.p_matrix),
        ] {
            if let Some(rows) = m {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    problems.push(format!("{name} must be a {dim}x{dim} matrix"));
                }
            }
        }

        let m = self.immersion.chart_dim;
        if m == 0 {
            problems.push("immersion.chart_dim must be positive".to_string());
        } else if m >= dim && dim > 0 {
            problems.push(format!(
                "immersion.chart_dim {m} must be smaller than ambient.dim {dim}"
            ));
        }
        if self.immersion.components.len() != dim {
            problems.push(format!(
                "immersion.components has {} entries but ambient.dim is {dim}",
                self.immersion.components.len()
            ));
        }
        let vars = chart_vars(m);
        for (i, c) in self.immersion.components.iter().enumerate() {
            if let Err(e) = Expression::parse(c, &vars) {
                problems.push(format!("immersion.components[{i}]: {e}"));
            }
        }
        if self.immersion.domain.len() != m {
            problems.push(format!(
                "immersion.domain has {} intervals but immersion.chart_dim is {m}",
                self.immersion.domain.len()
            ));
        }
        for (i, &(lo, hi)) in self.immersion.domain.iter().enumerate() {
            if !(lo < hi) {
                problems.push(format!("immersion.domain[{i}] is empty: [{lo}, {hi}]"));
            }
        }

        for (name, v) in [
            ("numeric.fd_step", self.numeric.fd_step),
            ("numeric.tau_rank", self.numeric.tau_rank),
            ("numeric.tau_eq", self.numeric.tau_eq),
        ] {
            if let Some(x) = v {
                if !(x > 0.0 && x.is_finite()) {
                    problems.push(format!("{name} must be positive and finite, got {x}"));
                }
            }
        }

        let known = all_theorems();
        for t in &self.theorems {
            if t != "all" && !known.contains(&t.as_str()) {
                problems.push(format!("unknown theorem id: {t}"));
            }
        }
        if self.theorems.is_empty() {
            problems.push("theorems must not be empty (use [\"all\"])".to_string());
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(GlsmError::Validation(problems))
        }
    }

    /// Builds the ambient manifold, including the golden structure when one
    /// is configured.
    pub fn build_ambient(&self) -> Result<AmbientManifold> {
        let dim = self.ambient.dim;
        let amb = if let Some((p, q)) = self.ambient.signature {
            let mut diag = vec![1.0; p];
            diag.extend(std::iter::repeat(-1.0).take(q));
            AmbientManifold::flat(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
        } else if let Some(d) = &self.ambient.metric_diag {
            AmbientManifold::flat(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
                d.clone(),
            )))
        } else if let Some(rows) = &self.ambient.metric {
            let metric = parse_metric_expressions(rows, dim)?;
            AmbientManifold::new(dim, metric, None)?
        } else {
            return Err(GlsmError::Validation(vec!["no metric configured".into()]));
        };
        let golden = self.build_golden()?;
        match golden {
            Some(g) => amb.with_golden(g),
            None => Ok(amb),
        }
    }

    fn build_golden(&self) -> Result<Option<GoldenStructure>> {
        if let Some(rows) = &self.ambient.p_matrix {
            return Ok(Some(GoldenStructure::new(rows_to_matrix(rows))));
        }
        if let Some(rows) = &self.ambient.f_matrix {
            let f = ProductStructure::new(rows_to_matrix(rows));
            return Ok(Some(golden_from_product(&f)));
        }
        Ok(None)
    }

    pub fn build_immersion(&self) -> Result<Immersion> {
        let vars = chart_vars(self.immersion.chart_dim);
        let comps = self
            .immersion
            .components
            .iter()
            .map(|c| Expression::parse(c, &vars))
            .collect::<Result<Vec<_>>>()?;
        Immersion::new(
            self.immersion.chart_dim,
            self.ambient.dim,
            comps,
            self.immersion.domain.clone(),
        )
    }

    pub fn build_numeric(&self) -> Numeric {
        let mut num = Numeric::default();
        if let Some(h) = self.numeric.fd_step {
            num.h_fd = h;
        }
        if let Some(t) = self.numeric.tau_rank {
            num.tau_rank = t;
        }
        if let Some(t) = self.numeric.tau_eq {
            num.tau_eq = t;
        }
        num
    }

    /// Expands `all` and preserves the canonical theorem order.
    pub fn theorem_ids(&self) -> Vec<&'static str> {
        let known = all_theorems();
        if self.theorems.iter().any(|t| t == "all") {
            return known;
        }
        known
            .into_iter()
            .filter(|id| self.theorems.iter().any(|t| t == id))
            .collect()
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows.first().map_or(0, |r| r.len()), |i, j| rows[i][j])
}
