//! Sampling orchestration: decompose, classify, and verify at every sample
//! point, then aggregate into a report. Per-point work fans out across
//! threads; collection order is fixed by the point index, so reports are
//! deterministic for a fixed config and seed.

use std::time::Instant;

use rayon::prelude::*;

use crate::bundles::decompose;
use crate::config::{RunConfig, SamplePlan, SampleStrategy};
use crate::error::Result;
use crate::geometry::{AmbientManifold, Immersion, Numeric};
use crate::golden::verify_golden;
use crate::report::{AxiomSummary, PointReport, Report, TheoremRow};
use crate::verify::{theorems_for, verify, TheoremVerdict, VerifyCtx};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sample points strictly inside the domain box. The grid strategy ignores
/// the seed; the low-discrepancy strategy offsets a Halton sequence by it.
pub fn sample_points(plan: &SamplePlan, domain: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let m = domain.len();
    if plan.points == 0 || m == 0 {
        return Vec::new();
    }
    let place = |frac: f64, (lo, hi): (f64, f64)| lo + (hi - lo) * (0.05 + 0.9 * frac);
    match plan.strategy {
        SampleStrategy::Grid => {
            let mut c = 1usize;
            while c.pow(m as u32) < plan.points {
                c += 1;
            }
            let mut pts = Vec::with_capacity(plan.points);
            let mut idx = vec![0usize; m];
            'outer: loop {
                let p: Vec<f64> = (0..m)
                    .map(|d| place((idx[d] as f64 + 0.5) / c as f64, domain[d]))
                    .collect();
                pts.push(p);
                if pts.len() == plan.points {
                    break;
                }
                for d in (0..m).rev() {
                    idx[d] += 1;
                    if idx[d] < c {
                        continue 'outer;
                    }
                    idx[d] = 0;
                }
                break;
            }
            pts
        }
        SampleStrategy::LowDiscrepancy => {
            let offset = (plan.seed % 8191) as usize + 1;
            (0..plan.points)
                .map(|i| {
                    (0..m)
                        .map(|d| place(halton(i + offset, PRIMES[d % PRIMES.len()]), domain[d]))
                        .collect()
                })
                .collect()
        }
    }
}

const PRIMES: [usize; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut x = 0.0;
    while i > 0 {
        f /= base as f64;
        x += f * (i % base) as f64;
        i /= base;
    }
    x
}

struct PointOutcome {
    report: PointReport,
    /// One slot per requested theorem id; None marks not-applicable.
    verdicts: Vec<Option<TheoremVerdict>>,
    axiom_residual: Option<f64>,
}

fn analyze_point(
    amb: &AmbientManifold,
    imm: &Immersion,
    num: &Numeric,
    seed: u64,
    ids: &[&'static str],
    u: &[f64],
) -> PointOutcome {
    let mut report = PointReport {
        point: u.to_vec(),
        class: None,
        radical_rank: None,
        golden_class: None,
        error: None,
    };
    let mut verdicts: Vec<Option<TheoremVerdict>> = vec![None; ids.len()];
    let mut axiom_residual = None;

    let d = match decompose(amb, imm, u, seed) {
        Ok(d) => d,
        Err(e) => {
            report.error = Some(e.to_string());
            return PointOutcome {
                report,
                verdicts,
                axiom_residual,
            };
        }
    };
    report.class = Some(format!("{:?}", d.class));
    report.radical_rank = Some(d.radical_rank());

    let golden = match amb.golden() {
        Some(g) => g,
        None => {
            return PointOutcome {
                report,
                verdicts,
                axiom_residual,
            }
        }
    };
    axiom_residual = (|| {
        let x = imm.map(u).ok()?;
        let form = amb.metric_at(x.as_slice()).ok()?;
        verify_golden(golden, &form).ok().map(|r| r.max_residual())
    })();

    let ctx = match VerifyCtx::new(amb, imm, golden, u, num.clone(), seed) {
        Ok(c) => c,
        Err(e) => {
            report.error = Some(e.to_string());
            return PointOutcome {
                report,
                verdicts,
                axiom_residual,
            };
        }
    };
    report.golden_class = Some(format!("{:?}", ctx.class()));
    let applicable = theorems_for(ctx.class());
    for (slot, id) in verdicts.iter_mut().zip(ids) {
        if !applicable.contains(id) {
            continue;
        }
        match verify(&ctx, id) {
            Ok(v) => *slot = Some(v),
            Err(e) => {
                report.error = Some(format!("{id}: {e}"));
                break;
            }
        }
    }
    PointOutcome {
        report,
        verdicts,
        axiom_residual,
    }
}

fn thread_pool() -> Option<rayon::ThreadPool> {
    let n: usize = std::env::var("GLSM_THREADS").ok()?.parse().ok()?;
    if n == 0 {
        return None;
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
}

/// Runs the full pipeline described by the config.
pub fn run_analysis(cfg: &RunConfig) -> Result<Report> {
    run_with_provenance(cfg, Vec::new())
}

/// Same as [`run_analysis`] with provenance notes attached to the report.
pub fn run_with_provenance(cfg: &RunConfig, provenance: Vec<String>) -> Result<Report> {
    let start = Instant::now();
    cfg.validate()?;
    let amb = cfg.build_ambient()?;
    let imm = cfg.build_immersion()?;
    let num = cfg.build_numeric();
    let ids = cfg.theorem_ids();
    let pts = sample_points(&cfg.sampling, imm.domain());
    let seed = cfg.sampling.seed;

    let work = || -> Vec<PointOutcome> {
        pts.par_iter()
            .map(|u| analyze_point(&amb, &imm, &num, seed, &ids, u))
            .collect()
    };
    let outcomes = match thread_pool() {
        Some(pool) => pool.install(work),
        None => work(),
    };

    let mut points = Vec::with_capacity(outcomes.len());
    let mut rows: Vec<TheoremRow> = ids.iter().map(|id| TheoremRow::new(id)).collect();
    let mut axiom_residuals = Vec::new();
    for o in outcomes {
        for (row, v) in rows.iter_mut().zip(&o.verdicts) {
            match v {
                Some(v) => row.absorb(v),
                None => row.not_applicable += 1,
            }
        }
        if let Some(res) = o.axiom_residual {
            axiom_residuals.push(res);
        }
        points.push(o.report);
    }
    if points.is_empty() {
        rows.clear();
    }
    let axioms = summarize_axioms(&axiom_residuals);
    Ok(Report {
        config: cfg.clone(),
        points,
        theorems: rows,
        axioms,
        provenance,
        version: VERSION.to_string(),
        wall_time_ms: start.elapsed().as_millis(),
    })
}

fn summarize_axioms(residuals: &[f64]) -> Option<AxiomSummary> {
    if residuals.is_empty() {
        return None;
    }
    let mut sorted = residuals.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Some(AxiomSummary {
        max: sorted[n - 1],
        median,
    })
}
