//! End-to-end acceptance suite. Each test prints one pass/fail line and
//! enforces its own wall-clock budget.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glsm::bundles::decompose;
use glsm::catalog::{catalog, catalog_entry};
use glsm::config::{RunConfig, SamplePlan, SampleStrategy};
use glsm::expr::{chart_vars, Expression};
use glsm::geometry::{ChartField, Immersion, Numeric};
use glsm::golden::{
    golden_from_product, product_from_golden, verify_golden, GoldenStructure, ProductStructure,
    PHI,
};
use glsm::gw::{frame_field, gauss_split, identity_battery, second_fundamental_form};
use glsm::linalg::{radical, subspace_distance, BilinearForm, Subspace};
use glsm::report::emit_report;
use glsm::run::{run_analysis, sample_points};
use glsm::search::{search_example, SearchOutcome};
use glsm::verify::{
    classify_golden_submanifold, pairing_obstruction_check, theorems_for, verify, Fault,
    GoldenClass, VerifyCtx,
};

struct Criterion {
    label: &'static str,
    start: Instant,
    budget_s: f64,
}

impl Criterion {
    fn new(label: &'static str, budget_s: f64) -> Self {
        Criterion {
            label,
            start: Instant::now(),
            budget_s,
        }
    }

    fn finish(self) {
        let elapsed = self.start.elapsed().as_secs_f64();
        let within = elapsed <= self.budget_s;
        println!(
            "{}: {} ({elapsed:.2}s of {:.0}s budget)",
            self.label,
            if within { "pass" } else { "fail" },
            self.budget_s
        );
        assert!(
            within,
            "{} exceeded its runtime budget: {elapsed:.2}s > {:.0}s",
            self.label, self.budget_s
        );
    }
}

// ---------------------------------------------------------------------------
// shared construction helpers

/// Series matrix exponential with scaling and squaring.
fn matrix_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let scale = a.norm().log2().ceil().max(0.0) as u32 + 1;
    let small = a / 2.0f64.powi(scale as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=16 {
        term = &term * &small / k as f64;
        sum += &term;
    }
    for _ in 0..scale {
        sum = &sum * &sum;
    }
    sum
}

/// Random isometry of the diagonal form `g_diag` (entries ±1): exp(g S)
/// with S antisymmetric solves Q^T g Q = g exactly.
fn random_isometry(g_diag: &[f64], rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = g_diag.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let v = rng.gen_range(-0.3..0.3);
            s[(i, j)] = v;
            s[(j, i)] = -v;
        }
    }
    let g = DMatrix::from_diagonal(&DVector::from_row_slice(g_diag));
    matrix_exp(&(&g * s))
}

/// Orthonormal basis of a projector's column space: the left singular
/// vectors with singular value away from zero (a projector has no
/// intermediate singular values).
fn projector_column_space(e: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let svd = e.clone().svd(true, false);
    let u = svd.u.as_ref().unwrap();
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0.5)
        .map(|(k, _)| {
            // one pass back through the projector scrubs the SVD's own
            // rounding, leaving a vector exactly in the column space
            let v = e * u.column(k);
            &v / v.norm()
        })
        .collect()
}

fn isometry_inverse(g_diag: &[f64], q: &DMatrix<f64>) -> DMatrix<f64> {
    let g = DMatrix::from_diagonal(&DVector::from_row_slice(g_diag));
    &g * q.transpose() * &g
}

/// Seeded degree-two polynomial chart field with small coefficients.
fn poly_field(m: usize, rng: &mut ChaCha8Rng) -> ChartField<'static> {
    let vars = chart_vars(m);
    let mut comps = Vec::with_capacity(m);
    for _ in 0..m {
        let mut text = format!("{:.4}", rng.gen_range(-0.5..0.5));
        for (j, v) in vars.iter().enumerate() {
            text += &format!(" + ({:.4})*{v}", rng.gen_range(-0.5..0.5));
            for w in vars.iter().skip(j) {
                text += &format!(" + ({:.4})*{v}*{w}", rng.gen_range(-0.2..0.2));
            }
        }
        comps.push(Expression::parse(&text, &vars).unwrap());
    }
    ChartField::from_exprs(comps)
}

fn sixteen_points(cfg: &RunConfig, imm: &Immersion) -> Vec<Vec<f64>> {
    let plan = SamplePlan {
        points: 16,
        seed: cfg.sampling.seed,
        strategy: SampleStrategy::Grid,
    };
    sample_points(&plan, imm.domain())
}

// ---------------------------------------------------------------------------
// criterion 1: golden axiom suite on seeded involutions

#[test]
fn criterion_1_golden_axioms_on_seeded_involutions() {
    let c = Criterion::new("criterion 1 (golden axiom suite)", 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100 {
        let n = 2 + i % 7;
        let g_diag: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let mut f0 = DMatrix::zeros(n, n);
        for k in 0..n {
            f0[(k, k)] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        }
        let q = random_isometry(&g_diag, &mut rng);
        let q_inv = isometry_inverse(&g_diag, &q);
        let f = ProductStructure::new(&q * f0 * q_inv);
        let p = golden_from_product(&f);
        let form = BilinearForm::from_diagonal(&g_diag);

        let rep = verify_golden(&p, &form).unwrap();
        assert!(rep.pass, "instance {i}: residuals {rep:?}");
        assert!(rep.max_residual() <= 1e-10, "instance {i}");

        // spectrum check: the eigenprojections (I +- F)/2 span complementary
        // eigenspaces and each basis vector carries an eigenvalue residual
        // below 1e-9
        let f_back = product_from_golden(&p);
        let id = DMatrix::identity(n, n);
        let vp = projector_column_space(&((&id + f_back.matrix()) * 0.5));
        let vm = projector_column_space(&((&id - f_back.matrix()) * 0.5));
        assert_eq!(vp.len() + vm.len(), n, "instance {i}");
        for v in &vp {
            assert!(
                (p.matrix() * v - PHI * v).norm() < 1e-9 * v.norm(),
                "instance {i}: phi eigenvector residual"
            );
        }
        for v in &vm {
            assert!(
                (p.matrix() * v - (1.0 - PHI) * v).norm() < 1e-9 * v.norm(),
                "instance {i}: (1-phi) eigenvector residual {} (n={n}, vp={}, vm={})",
                (p.matrix() * v - (1.0 - PHI) * v).norm(),
                vp.len(),
                vm.len()
            );
        }

        let back_p = golden_from_product(&product_from_golden(&p));
        assert!((back_p.matrix() - p.matrix()).norm() < 1e-12, "instance {i}");
        let back_f = product_from_golden(&golden_from_product(&f));
        assert!((back_f.matrix() - f.matrix()).norm() < 1e-12, "instance {i}");
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 2: the 1/sqrt(2) conversion coefficient is a hard failure

#[test]
fn criterion_2_sqrt2_coefficient_regression() {
    let c = Criterion::new("criterion 2 (1/sqrt(2) coefficient regression)", 1.0);
    let f = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, -1.0]));
    let p_bad = GoldenStructure::new(
        (DMatrix::identity(2, 2) + 5.0f64.sqrt() * f) / 2.0f64.sqrt(),
    );
    let form = BilinearForm::from_diagonal(&[1.0, -1.0]);
    let rep = verify_golden(&p_bad, &form).unwrap();
    assert!(rep.r20 > 0.5, "r20 = {}", rep.r20);
    assert!(!rep.pass);
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 3: radical extraction against exact rational elimination

#[derive(Clone, Copy, PartialEq)]
struct Rat {
    num: i128,
    den: i128,
}

impl Rat {
    fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let g = gcd(num.abs(), den.abs()).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rat {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    fn int(v: i128) -> Self {
        Rat { num: v, den: 1 }
    }

    fn zero() -> Self {
        Rat::int(0)
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn sub(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }

    fn mul(self, o: Rat) -> Rat {
        Rat::new(self.num * o.num, self.den * o.den)
    }

    fn div(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den, self.den * o.num)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact reduced row echelon form; returns the pivot column of each row.
fn rref(m: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = Rat::int(1).div(m[row][col]);
        for c in col..cols {
            m[row][c] = m[row][c].mul(inv);
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col];
                for c in col..cols {
                    m[r][c] = m[r][c].sub(factor.mul(m[row][c]));
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

/// Exact rational nullspace basis of an integer matrix.
fn nullspace_exact(m: &[Vec<i128>]) -> Vec<Vec<Rat>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut work: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&v| Rat::int(v)).collect())
        .collect();
    let pivots = rref(&mut work);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::int(1);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = Rat::zero().sub(work[r][free]);
        }
        basis.push(v);
    }
    basis
}

fn exact_rank(m: &[Vec<i128>]) -> usize {
    let mut work: Vec<Vec<Rat>> = m
        .iter()
        .map(|r| r.iter().map(|&v| Rat::int(v)).collect())
        .collect();
    rref(&mut work).len()
}

#[test]
fn criterion_3_radical_matches_exact_elimination() {
    let c = Criterion::new("criterion 3 (degenerate linear algebra oracle)", 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(2..=6usize);
        let m = rng.gen_range(1..=n);
        let mut gram_i = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-3..=3i128);
                gram_i[i][j] = v;
                gram_i[j][i] = v;
            }
        }
        let basis_i: Vec<Vec<i128>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen_range(-2..=2i128)).collect())
            .collect();
        if exact_rank(&basis_i) < m {
            continue;
        }
        done += 1;

        // exact restricted Gram B^T G B and its rational nullspace
        let mut restricted = vec![vec![0i128; m]; m];
        for a in 0..m {
            for b in 0..m {
                let mut s = 0i128;
                for i in 0..n {
                    for j in 0..n {
                        s += basis_i[i][a] * gram_i[i][j] * basis_i[j][b];
                    }
                }
                restricted[a][b] = s;
            }
        }
        let null = nullspace_exact(&restricted);

        let gram = DMatrix::from_fn(n, n, |i, j| gram_i[i][j] as f64);
        let basis = DMatrix::from_fn(n, m, |i, j| basis_i[i][j] as f64);
        let form = BilinearForm::new(gram);
        let sub = Subspace::new(basis.clone()).unwrap();
        let rad = radical(&form, &sub);

        assert_eq!(rad.rank(), null.len(), "rank mismatch on draw {done}");
        if null.is_empty() {
            continue;
        }
        let cols: Vec<DVector<f64>> = null
            .iter()
            .map(|v| {
                let coeffs = DVector::from_iterator(m, v.iter().map(|r| r.to_f64()));
                &basis * coeffs
            })
            .collect();
        let exact = Subspace::from_columns(n, &cols).unwrap();
        assert!(
            subspace_distance(&rad, &exact) < 1e-10,
            "draw {done}: distance {}",
            subspace_distance(&rad, &exact)
        );
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 4: derivative reconstruction and identity battery on the catalog

#[test]
fn criterion_4_reconstruction_and_identities_on_catalog() {
    let c = Criterion::new("criterion 4 (derivative reconstruction on the catalog)", 10.0);
    for entry in catalog().unwrap() {
        let amb = entry.config.build_ambient().unwrap();
        let imm = entry.config.build_immersion().unwrap();
        let num = entry.config.build_numeric();
        let seed = entry.config.sampling.seed;
        for u in sixteen_points(&entry.config, &imm) {
            let golden_frame;
            let plain_frame;
            let frame = match amb.golden() {
                Some(g) => {
                    golden_frame = VerifyCtx::new(&amb, &imm, g, &u, num, seed).unwrap();
                    &golden_frame.frame
                }
                None => {
                    plain_frame = frame_field(&amb, &imm, decompose(&amb, &imm, &u, seed).unwrap());
                    &plain_frame
                }
            };
            let rep = identity_battery(&amb, &imm, frame, &u, &num).unwrap();
            assert!(
                rep.max_residual() < 5.0 * num.tau_eq,
                "{} at {u:?}: identity residual {}",
                entry.name,
                rep.max_residual()
            );
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4a5);
            for pair in 0..8 {
                let w = poly_field(imm.chart_dim(), &mut rng);
                let v = poly_field(imm.chart_dim(), &mut rng);
                let d = gauss_split(&amb, &imm, frame, &w, &v, &u, &num).unwrap();
                assert!(
                    d.reconstruction_residual() < 1e-10 + 5.0 * num.tau_eq,
                    "{} at {u:?}, pair {pair}: reconstruction residual {}",
                    entry.name,
                    d.reconstruction_residual()
                );
            }
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 5: the total transversal form is screen-independent

#[test]
fn criterion_5_transversal_form_screen_independent() {
    let c = Criterion::new("criterion 5 (screen independence of the transversal form)", 5.0);
    for name in ["lightcone-r3", "null-plane-r4"] {
        let entry = catalog_entry(name).unwrap();
        let amb = entry.config.build_ambient().unwrap();
        let imm = entry.config.build_immersion().unwrap();
        let num = Numeric::default();
        let m = imm.chart_dim();
        let plan = SamplePlan {
            points: 4,
            seed: 3,
            strategy: SampleStrategy::Grid,
        };
        for u in sample_points(&plan, imm.domain()) {
            for a in 0..m {
                for b in a..m {
                    let mut ea = DVector::zeros(m);
                    ea[a] = 1.0;
                    let mut eb = DVector::zeros(m);
                    eb[b] = 1.0;
                    let w = ChartField::constant(ea);
                    let v = ChartField::constant(eb);
                    let mut reference: Option<DVector<f64>> = None;
                    for screen_seed in 1..=5u64 {
                        let d = decompose(&amb, &imm, &u, screen_seed).unwrap();
                        let frame = frame_field(&amb, &imm, d);
                        let h = second_fundamental_form(&amb, &imm, &frame, &w, &v, &u, &num)
                            .unwrap();
                        match &reference {
                            None => reference = Some(h),
                            Some(h0) => assert!(
                                (h0 - &h).norm() < 2.0 * num.tau_eq,
                                "{name} at {u:?}, pair ({a},{b}), seed {screen_seed}: \
                                 deviation {}",
                                (h0 - &h).norm()
                            ),
                        }
                    }
                }
            }
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 6: no rank-1 radical admits either golden class

#[test]
fn criterion_6_rank_one_radical_sweep() {
    let c = Criterion::new("criterion 6 (rank-1 impossibility sweep)", 5.0);
    for i in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + i);
        let n = 3 + (i as usize) % 4;
        let p_count = n / 2 + 1;
        let g_diag: Vec<f64> = (0..n)
            .map(|k| if k < p_count { 1.0 } else { -1.0 })
            .collect();
        let gram = DMatrix::from_diagonal(&DVector::from_row_slice(&g_diag));

        // null tangent direction plus a spacelike one, then a random rotation
        // by an isometry so nothing is axis-aligned
        let mut xi = DVector::zeros(n);
        xi[0] = 1.0;
        xi[p_count] = 1.0;
        let mut v = DVector::zeros(n);
        v[1] = 1.0;
        let q = random_isometry(&g_diag, &mut rng);
        let cols = DMatrix::from_columns(&[&q * xi, &q * v]);

        let mut f0 = DMatrix::zeros(n, n);
        for k in 0..n {
            f0[(k, k)] = if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        let q_inv = isometry_inverse(&g_diag, &q);
        let golden = golden_from_product(&ProductStructure::new(&q * f0 * q_inv));

        let amb = glsm::geometry::AmbientManifold::flat(gram)
            .with_golden(golden.clone())
            .unwrap();
        let imm = Immersion::linear(&cols, 1.0);
        let d = decompose(&amb, &imm, &[0.1, -0.2], i).unwrap();
        assert_eq!(d.radical_rank(), 1, "candidate {i}");

        let rep = classify_golden_submanifold(&d, &golden, 1e-6);
        assert_eq!(rep.class, GoldenClass::Neither, "candidate {i}");
        assert!(
            rep.notes.iter().any(|s| s.contains("singular")),
            "candidate {i}: notes {:?}",
            rep.notes
        );

        // the 1x1 pairing explains it: a class witness needs the golden image
        // of the radical to be null (scalar 0, a singular matrix) yet pair
        // nonsingularly with the radical, which no scalar satisfies
        let pairing = pairing_obstruction_check(&d, &golden);
        assert_eq!((pairing.nrows(), pairing.ncols()), (1, 1), "candidate {i}");
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 7: the search oracle finds both classes and re-verifies

fn reverify(cfg: &RunConfig, want: GoldenClass) -> glsm::verify::ClassReport {
    let amb = cfg.build_ambient().unwrap();
    let imm = cfg.build_immersion().unwrap();
    let u: Vec<f64> = imm.domain().iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
    let d = decompose(&amb, &imm, &u, 1).unwrap();
    let rep = classify_golden_submanifold(&d, amb.golden().unwrap(), 1e-6);
    assert_eq!(rep.class, want, "notes: {:?}", rep.notes);
    rep
}

#[test]
fn criterion_7_search_finds_both_classes() {
    let c = Criterion::new("criterion 7 (search oracle)", 60.0);
    let budget = 100_000;

    let run_rt = || match search_example(GoldenClass::RadicalTransversal, 8, (4, 4), 2, 11, budget)
        .unwrap()
    {
        SearchOutcome::Found(cfg) => cfg,
        SearchOutcome::NotFound(nf) => panic!("radical transversal search failed: {}", nf.note),
    };
    let rt = run_rt();
    let rt_rep = reverify(&rt, GoldenClass::RadicalTransversal);
    assert!(
        rt_rep.screen_invariance < 1e-8,
        "residual {}",
        rt_rep.screen_invariance
    );
    // seed-reproducible: the same request emits the identical config
    assert_eq!(
        toml::to_string(&rt).unwrap(),
        toml::to_string(&run_rt()).unwrap()
    );

    let t = match search_example(GoldenClass::Transversal, 8, (4, 4), 2, 11, budget).unwrap() {
        SearchOutcome::Found(cfg) => cfg,
        SearchOutcome::NotFound(nf) => panic!("transversal search failed: {}", nf.note),
    };
    let t_rep = reverify(&t, GoldenClass::Transversal);
    assert!(
        t_rep.screen_transversality < 1e-8,
        "residual {}",
        t_rep.screen_transversality
    );
    assert!(
        t_rep.mu.as_ref().map_or(0, |mu| mu.rank()) >= 1,
        "mu rank: {:?}",
        t_rep.mu.as_ref().map(|mu| mu.rank())
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 8: full verdict suite on both oracle instances + fault injection

#[test]
fn criterion_8_theorem_suite_and_fault_injection() {
    let c = Criterion::new("criterion 8 (theorem biconditional suite)", 120.0);
    for name in ["radical-transversal-r2", "transversal-mu-r2"] {
        let entry = catalog_entry(name).unwrap();
        let mut cfg = entry.config.clone();
        cfg.sampling.points = 16;
        let report = run_analysis(&cfg).unwrap();
        for p in &report.points {
            assert!(p.error.is_none(), "{name}: {:?}", p.error);
        }
        let mut applicable = 0;
        for row in &report.theorems {
            assert_eq!(row.fail, 0, "{name}: {} failed", row.id);
            assert_eq!(row.indeterminate, 0, "{name}: {} indeterminate", row.id);
            if row.not_applicable == 0 {
                assert_eq!(row.pass + row.vacuous, 16, "{name}: {}", row.id);
                applicable += 1;
            } else {
                assert_eq!(row.not_applicable, 16, "{name}: {}", row.id);
            }
        }
        assert!(applicable >= 7, "{name}: only {applicable} applicable rows");

        // negative controls: a corrupted right-hand evaluation path must
        // break every applicable equivalence at every offset
        let amb = cfg.build_ambient().unwrap();
        let imm = cfg.build_immersion().unwrap();
        let num = cfg.build_numeric();
        let u: Vec<f64> = imm.domain().iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        let golden = amb.golden().unwrap();
        for offset in [0.2, 0.5, 1.0] {
            let mut ctx = VerifyCtx::new(&amb, &imm, golden, &u, num, cfg.sampling.seed).unwrap();
            ctx.fault = Some(Fault { offset });
            for id in theorems_for(ctx.class()) {
                let v = verify(&ctx, id).unwrap();
                assert!(
                    !v.equivalent && !v.vacuous,
                    "{name}: fault offset {offset} left {id} equivalent"
                );
            }
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical reports from repeated binary runs

#[test]
fn criterion_9_analyze_is_deterministic() {
    let c = Criterion::new("criterion 9 (byte-identical analyze runs)", 5.0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cone.toml");
    std::fs::write(
        &path,
        r#"
[ambient]
dim = 3
metric_diag = [-1.0, 1.0, 1.0]

[sampling]
points = 6
seed = 12
strategy = "low-discrepancy"

[immersion]
chart_dim = 2
components = ["u1", "u1*cos(u2)", "u1*sin(u2)"]
domain = [[0.25, 2.0], [-3.0, 3.0]]
"#,
    )
    .unwrap();
    let run = || {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_glsm"))
            .args(["analyze", "--config"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run();
    assert_eq!(first, run());
    // and the in-process path agrees with itself as well
    let cfg = glsm::config::parse_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let a = emit_report(&run_analysis(&cfg).unwrap(), glsm::report::ReportFormat::Json);
    let b = emit_report(&run_analysis(&cfg).unwrap(), glsm::report::ReportFormat::Json);
    assert_eq!(a, b);
    c.finish();
}
