//! Report assembly and emission. The JSON form is byte-stable for a fixed
//! config, seed, and tool version; wall time therefore only appears in the
//! markdown rendering.

use serde::Serialize;

use crate::config::RunConfig;
use crate::verify::TheoremVerdict;

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    pub class: Option<String>,
    pub radical_rank: Option<usize>,
    pub golden_class: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremRow {
    pub id: String,
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub vacuous: usize,
    /// Points where the theorem's class hypothesis did not apply.
    pub not_applicable: usize,
    pub max_residual_lhs: f64,
    pub max_residual_rhs: f64,
}

impl TheoremRow {
    pub fn new(id: &str) -> Self {
        TheoremRow {
            id: id.to_string(),
            pass: 0,
            fail: 0,
            indeterminate: 0,
            vacuous: 0,
            not_applicable: 0,
            max_residual_lhs: 0.0,
            max_residual_rhs: 0.0,
        }
    }

    pub fn absorb(&mut self, v: &TheoremVerdict) {
        if v.vacuous {
            self.vacuous += 1;
        } else if v.indeterminate {
            self.indeterminate += 1;
        } else if v.equivalent {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        self.max_residual_lhs = self.max_residual_lhs.max(v.lhs_residual);
        self.max_residual_rhs = self.max_residual_rhs.max(v.rhs_residual);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomSummary {
    pub max: f64,
    pub median: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: RunConfig,
    pub points: Vec<PointReport>,
    pub theorems: Vec<TheoremRow>,
    pub axioms: Option<AxiomSummary>,
    pub provenance: Vec<String>,
    pub version: String,
    pub wall_time_ms: u128,
}

impl Report {
    /// A clean equivalence break anywhere in the run.
    pub fn any_fail(&self) -> bool {
        self.theorems.iter().any(|t| t.fail > 0)
    }
}

#[derive(Serialize)]
struct JsonMeta<'a> {
    version: &'a str,
    provenance: &'a [String],
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a RunConfig,
    points: &'a [PointReport],
    theorems: &'a [TheoremRow],
    axioms: &'a Option<AxiomSummary>,
    meta: JsonMeta<'a>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

pub fn emit_report(r: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => emit_json(r),
        ReportFormat::Markdown => emit_markdown(r),
    }
}

fn emit_json(r: &Report) -> String {
    let doc = JsonReport {
        config: &r.config,
        points: &r.points,
        theorems: &r.theorems,
        axioms: &r.axioms,
        meta: JsonMeta {
            version: &r.version,
            provenance: &r.provenance,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serialization");
    s.push('\n');
    s
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(", "))
}

fn emit_markdown(r: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# Analysis report (v{})\n\n", r.version));
    for note in &r.provenance {
        out.push_str(&format!("- provenance: {note}\n"));
    }
    out.push_str(&format!(
        "- points: {}\n- wall time: {} ms\n",
        r.points.len(),
        r.wall_time_ms
    ));
    if let Some(a) = &r.axioms {
        out.push_str(&format!(
            "- golden axiom residuals: max {:.3e}, median {:.3e}\n",
            a.max, a.median
        ));
    }
    out.push_str("\n## Points\n\n");
    out.push_str("| point | class | radical rank | golden class | error |\n");
    out.push_str("|---|---|---|---|---|\n");
    for p in &r.points {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            fmt_point(&p.point),
            p.class.as_deref().unwrap_or("-"),
            p.radical_rank.map_or("-".to_string(), |r| r.to_string()),
            p.golden_class.as_deref().unwrap_or("-"),
            p.error.as_deref().unwrap_or("-"),
        ));
    }
    out.push_str("\n## Theorems\n\n");
    out.push_str(
        "| id | pass | fail | indeterminate | vacuous | not applicable | max residual lhs | max residual rhs |\n",
    );
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    for t in &r.theorems {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {:.3e} | {:.3e} |\n",
            t.id,
            t.pass,
            t.fail,
            t.indeterminate,
            t.vacuous,
            t.not_applicable,
            t.max_residual_lhs,
            t.max_residual_rhs
        ));
    }
    out
}
