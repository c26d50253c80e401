//! Charts, immersions and ambient differential operators: AD Jacobians,
//! Christoffel symbols, ambient covariant derivatives and Lie brackets.

use nalgebra::{DMatrix, DVector};

use crate::error::{GlsmError, Result};
use crate::expr::{ambient_vars, Expression};
use crate::golden::GoldenStructure;
use crate::linalg::{BilinearForm, TAU_RANK};

/// Finite-difference step for central differences over the chart.
pub const H_FD: f64 = 1e-5;

/// Numeric knobs shared by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numeric {
    pub h_fd: f64,
    pub tau_rank: f64,
    pub tau_eq: f64,
}

impl Default for Numeric {
    fn default() -> Self {
        Numeric {
            h_fd: H_FD,
            tau_rank: TAU_RANK,
            tau_eq: crate::linalg::TAU_EQ_FD,
        }
    }
}

/// A smooth map from an axis-aligned chart box into ambient coordinates.
#[derive(Debug, Clone)]
pub struct Immersion {
    chart_dim: usize,
    ambient_dim: usize,
    components: Vec<Expression>,
    domain: Vec<(f64, f64)>,
}

impl Immersion {
    pub fn new(
        chart_dim: usize,
        ambient_dim: usize,
        components: Vec<Expression>,
        domain: Vec<(f64, f64)>,
    ) -> Result<Self> {
        if components.len() != ambient_dim {
            return Err(GlsmError::DimensionMismatch(format!(
                "{} immersion components for ambient dimension {}",
                components.len(),
                ambient_dim
            )));
        }
        if domain.len() != chart_dim {
            return Err(GlsmError::DimensionMismatch(format!(
                "{} domain intervals for chart dimension {}",
                domain.len(),
                chart_dim
            )));
        }
        if domain.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(GlsmError::DimensionMismatch(
                "empty chart domain interval".into(),
            ));
        }
        Ok(Immersion {
            chart_dim,
            ambient_dim,
            components,
            domain,
        })
    }

    /// Linear immersion u -> sum u_a * columns_a through the origin.
    pub fn linear(columns: &DMatrix<f64>, domain_halfwidth: f64) -> Self {
        let (n, m) = (columns.nrows(), columns.ncols());
        let components = (0..n)
            .map(|i| Expression::linear(&columns.row(i).iter().copied().collect::<Vec<_>>()))
            .collect();
        Immersion {
            chart_dim: m,
            ambient_dim: n,
            components,
            domain: vec![(-domain_halfwidth, domain_halfwidth); m],
        }
    }

    pub fn chart_dim(&self) -> usize {
        self.chart_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn components(&self) -> &[Expression] {
        &self.components
    }

    pub fn contains(&self, u: &[f64], margin: f64) -> bool {
        u.iter()
            .zip(&self.domain)
            .all(|(&x, &(lo, hi))| x >= lo + margin && x <= hi - margin)
    }

    pub fn map(&self, u: &[f64]) -> Result<DVector<f64>> {
        let mut x = DVector::zeros(self.ambient_dim);
        for (i, c) in self.components.iter().enumerate() {
            x[i] = c.value(u)?;
        }
        Ok(x)
    }

    /// Jacobian (pushforward) at `u`, column j = d(components)/du_j, by
    /// forward-mode AD. Errors with RankDeficient if the immersion
    /// condition fails at `u`.
    pub fn pushforward(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.ambient_dim, self.chart_dim);
        for j in 0..self.chart_dim {
            for (i, c) in self.components.iter().enumerate() {
                jac[(i, j)] = c.partial(u, j)?;
            }
        }
        #[cfg(debug_assertions)]
        {
            let fd = self.pushforward_fd(u, H_FD)?;
            debug_assert!(
                (&jac - &fd).amax() < 1e-6,
                "AD Jacobian disagrees with central differences"
            );
        }
        let svd = jac.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > TAU_RANK * smax)
            .count();
        if rank < self.chart_dim {
            return Err(GlsmError::RankDeficient {
                rank,
                expected: self.chart_dim,
                point: u.to_vec(),
            });
        }
        Ok(jac)
    }

    /// Central finite-difference Jacobian (independent cross-check of AD).
    pub fn pushforward_fd(&self, u: &[f64], h: f64) -> Result<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.ambient_dim, self.chart_dim);
        for j in 0..self.chart_dim {
            let mut hi = u.to_vec();
            let mut lo = u.to_vec();
            hi[j] += h;
            lo[j] -= h;
            let col = (self.map(&hi)? - self.map(&lo)?) / (2.0 * h);
            jac.set_column(j, &col);
        }
        Ok(jac)
    }

    /// Least-squares chart coefficients of an ambient vector against the
    /// Jacobian columns (exact for tangent vectors).
    pub fn tangent_coeffs(&self, jac: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        jac.clone()
            .svd(true, true)
            .solve(v, 1e-14)
            .expect("immersion Jacobian has full column rank")
    }
}

/// Ambient metric: constant matrix or a matrix of expressions in x1..xn.
#[derive(Debug, Clone)]
pub enum Metric {
    Constant(DMatrix<f64>),
    Expressions(Vec<Vec<Expression>>),
}

/// The ambient semi-Riemannian (optionally golden) manifold.
#[derive(Debug, Clone)]
pub struct AmbientManifold {
    dim: usize,
    metric: Metric,
    golden: Option<GoldenStructure>,
}

impl AmbientManifold {
    pub fn new(dim: usize, metric: Metric, golden: Option<GoldenStructure>) -> Result<Self> {
        match &metric {
            Metric::Constant(g) => {
                if g.nrows() != dim || g.ncols() != dim {
                    return Err(GlsmError::DimensionMismatch(
                        "metric matrix does not match ambient dimension".into(),
                    ));
                }
            }
            Metric::Expressions(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(GlsmError::DimensionMismatch(
                        "metric expression matrix does not match ambient dimension".into(),
                    ));
                }
                if golden.is_some() {
                    return Err(GlsmError::DimensionMismatch(
                        "a golden structure requires a constant ambient metric".into(),
                    ));
                }
            }
        }
        if let Some(g) = &golden {
            if g.dim() != dim {
                return Err(GlsmError::DimensionMismatch(
                    "golden structure does not match ambient dimension".into(),
                ));
            }
        }
        Ok(AmbientManifold { dim, metric, golden })
    }

    pub fn flat(gram: DMatrix<f64>) -> Self {
        let dim = gram.nrows();
        AmbientManifold {
            dim,
            metric: Metric::Constant(gram),
            golden: None,
        }
    }

    pub fn with_golden(mut self, g: GoldenStructure) -> Result<Self> {
        if matches!(self.metric, Metric::Expressions(_)) {
            return Err(GlsmError::DimensionMismatch(
                "a golden structure requires a constant ambient metric".into(),
            ));
        }
        if g.dim() != self.dim {
            return Err(GlsmError::DimensionMismatch(
                "golden structure does not match ambient dimension".into(),
            ));
        }
        self.golden = Some(g);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn golden(&self) -> Option<&GoldenStructure> {
        self.golden.as_ref()
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.metric, Metric::Constant(_))
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<BilinearForm> {
        let gram = match &self.metric {
            Metric::Constant(g) => g.clone(),
            Metric::Expressions(rows) => {
                let mut g = DMatrix::zeros(self.dim, self.dim);
                for (i, row) in rows.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        g[(i, j)] = e.value(x)?;
                    }
                }
                g
            }
        };
        let det = gram.determinant().abs();
        if det <= TAU_RANK.powi(self.dim as i32) {
            return Err(GlsmError::SingularMetric { point: x.to_vec() });
        }
        Ok(BilinearForm::new(gram))
    }

    /// Levi-Civita Christoffel symbols at `x`: result[k][(i, j)] = Γ^k_ij.
    /// Identically zero for a constant metric; metric derivatives by AD
    /// for an expression metric.
    pub fn christoffel(&self, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let n = self.dim;
        match &self.metric {
            Metric::Constant(_) => Ok(vec![DMatrix::zeros(n, n); n]),
            Metric::Expressions(rows) => {
                let form = self.metric_at(x)?;
                let inv = form
                    .gram()
                    .clone()
                    .try_inverse()
                    .ok_or(GlsmError::SingularMetric { point: x.to_vec() })?;
                // dg[l][(i,j)] = d g_ij / d x_l
                let mut dg = vec![DMatrix::zeros(n, n); n];
                for l in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            dg[l][(i, j)] = rows[i][j].partial(x, l)?;
                        }
                    }
                }
                let mut gamma = vec![DMatrix::zeros(n, n); n];
                for k in 0..n {
                    for i in 0..n {
                        for j in 0..n {
                            let mut s = 0.0;
                            for l in 0..n {
                                s += inv[(k, l)]
                                    * (dg[i][(l, j)] + dg[j][(i, l)] - dg[l][(i, j)]);
                            }
                            gamma[k][(i, j)] = 0.5 * s;
                        }
                    }
                }
                Ok(gamma)
            }
        }
    }
}

/// A tangent vector field along the submanifold, given by its chart
/// coefficients: either parsed expressions or a numeric closure.
pub enum ChartField<'a> {
    Exprs(Vec<Expression>),
    Fn(Box<dyn Fn(&[f64]) -> Result<DVector<f64>> + Sync + 'a>),
}

impl<'a> ChartField<'a> {
    pub fn from_exprs(exprs: Vec<Expression>) -> Self {
        ChartField::Exprs(exprs)
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DVector<f64>> + Sync + 'a,
    {
        ChartField::Fn(Box::new(f))
    }

    pub fn constant(coeffs: DVector<f64>) -> Self {
        ChartField::from_fn(move |_| Ok(coeffs.clone()))
    }

    pub fn coeffs(&self, u: &[f64]) -> Result<DVector<f64>> {
        match self {
            ChartField::Exprs(es) => {
                let mut v = DVector::zeros(es.len());
                for (i, e) in es.iter().enumerate() {
                    v[i] = e.value(u)?;
                }
                Ok(v)
            }
            ChartField::Fn(f) => f(u),
        }
    }

    /// Directional derivative of each coefficient along `dir` (AD for
    /// expression fields, central FD otherwise).
    pub fn coeffs_directional(
        &self,
        u: &[f64],
        dir: &DVector<f64>,
        h: f64,
    ) -> Result<DVector<f64>> {
        match self {
            ChartField::Exprs(es) => {
                let d: Vec<f64> = dir.iter().copied().collect();
                let mut v = DVector::zeros(es.len());
                for (i, e) in es.iter().enumerate() {
                    v[i] = e.directional(u, &d)?;
                }
                Ok(v)
            }
            ChartField::Fn(_) => {
                let (hi, lo) = stencil_points(u, dir, h);
                Ok((self.coeffs(&hi)? - self.coeffs(&lo)?) / (2.0 * h))
            }
        }
    }
}

/// An ambient-vector-valued field along the chart (frame sections live here).
pub struct Section<'a> {
    f: Box<dyn Fn(&[f64]) -> Result<DVector<f64>> + Sync + 'a>,
}

impl<'a> Section<'a> {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DVector<f64>> + Sync + 'a,
    {
        Section { f: Box::new(f) }
    }

    /// Pushforward of a tangent chart field along the immersion.
    pub fn from_chart(imm: &'a Immersion, field: &'a ChartField<'a>) -> Self {
        Section::new(move |u| {
            let jac = imm.pushforward(u)?;
            Ok(jac * field.coeffs(u)?)
        })
    }

    pub fn at(&self, u: &[f64]) -> Result<DVector<f64>> {
        (self.f)(u)
    }
}

fn stencil_points(u: &[f64], dir: &DVector<f64>, h: f64) -> (Vec<f64>, Vec<f64>) {
    let hi: Vec<f64> = u.iter().zip(dir.iter()).map(|(&x, &d)| x + h * d).collect();
    let lo: Vec<f64> = u.iter().zip(dir.iter()).map(|(&x, &d)| x - h * d).collect();
    (hi, lo)
}

/// Ambient covariant derivative of a section along a tangent direction:
/// central FD of the section over the chart plus the Christoffel correction.
pub fn covariant_derivative_section(
    amb: &AmbientManifold,
    imm: &Immersion,
    section: &Section,
    w_chart: &DVector<f64>,
    u: &[f64],
    h: f64,
) -> Result<DVector<f64>> {
    let (hi, lo) = stencil_points(u, w_chart, h);
    if !imm.contains(&hi, 0.0) || !imm.contains(&lo, 0.0) {
        return Err(GlsmError::StepUnderflow { point: u.to_vec() });
    }
    let mut deriv = (section.at(&hi)? - section.at(&lo)?) / (2.0 * h);

    if !amb.is_flat() {
        let x = imm.map(u)?;
        let xs: Vec<f64> = x.iter().copied().collect();
        let gamma = amb.christoffel(&xs)?;
        let jac = imm.pushforward(u)?;
        let w_amb = &jac * w_chart;
        let v_amb = section.at(u)?;
        for k in 0..amb.dim() {
            deriv[k] += (w_amb.transpose() * &gamma[k] * &v_amb)[(0, 0)];
        }
    }
    Ok(deriv)
}

/// Ambient covariant derivative of one tangent chart field along another.
pub fn ambient_covariant_derivative(
    amb: &AmbientManifold,
    imm: &Immersion,
    w_field: &ChartField,
    u_field: &ChartField,
    u: &[f64],
    h: f64,
) -> Result<DVector<f64>> {
    let section = Section::from_chart(imm, u_field);
    let w = w_field.coeffs(u)?;
    covariant_derivative_section(amb, imm, &section, &w, u, h)
}

/// Lie bracket of two tangent chart fields: [W,U]^i = W(U^i) - U(W^i).
pub fn lie_bracket(
    w_field: &ChartField,
    u_field: &ChartField,
    u: &[f64],
    h: f64,
) -> Result<DVector<f64>> {
    let w = w_field.coeffs(u)?;
    let uv = u_field.coeffs(u)?;
    let du_along_w = u_field.coeffs_directional(u, &w, h)?;
    let dw_along_u = w_field.coeffs_directional(u, &uv, h)?;
    Ok(du_along_w - dw_along_u)
}

/// The induced (possibly degenerate) metric pulled back along the immersion.
pub fn induced_metric(
    amb: &AmbientManifold,
    imm: &Immersion,
    u: &[f64],
) -> Result<BilinearForm> {
    let jac = imm.pushforward(u)?;
    let x = imm.map(u)?;
    let xs: Vec<f64> = x.iter().copied().collect();
    let g = amb.metric_at(&xs)?;
    Ok(BilinearForm::new(jac.transpose() * g.gram() * jac))
}

/// Parses an expression metric from row-major strings.
pub fn parse_metric_expressions(rows: &[Vec<String>], dim: usize) -> Result<Metric> {
    let vars = ambient_vars(dim);
    let mut parsed = Vec::with_capacity(dim);
    for row in rows {
        let mut r = Vec::with_capacity(dim);
        for text in row {
            r.push(Expression::parse(text, &vars)?);
        }
        parsed.push(r);
    }
    Ok(Metric::Expressions(parsed))
}
