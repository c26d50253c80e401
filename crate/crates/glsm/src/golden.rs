//! Golden structures (P^2 = P + I) and their almost-product counterparts
//! (F^2 = I): construction, conversion and axiomatic verification.

use nalgebra::DMatrix;

use crate::error::{GlsmError, Result};
use crate::linalg::{orthonormal_columns, BilinearForm, Subspace, TAU_RANK};

/// The golden ratio, (1 + sqrt 5) / 2.
pub const PHI: f64 = 1.618033988749894848204586834365638118;

/// Linear endomorphism P with P^2 = P + I.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenStructure {
    dim: usize,
    p_matrix: DMatrix<f64>,
}

/// Linear endomorphism F with F^2 = I.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductStructure {
    dim: usize,
    f_matrix: DMatrix<f64>,
}

impl GoldenStructure {
    pub fn new(p_matrix: DMatrix<f64>) -> Self {
        assert_eq!(p_matrix.nrows(), p_matrix.ncols());
        let dim = p_matrix.nrows();
        GoldenStructure { dim, p_matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p_matrix
    }

    /// Frobenius residual of the defining equation P^2 - P - I.
    pub fn defect(&self) -> f64 {
        let p = &self.p_matrix;
        (p * p - p - DMatrix::identity(self.dim, self.dim)).norm()
    }
}

impl ProductStructure {
    pub fn new(f_matrix: DMatrix<f64>) -> Self {
        assert_eq!(f_matrix.nrows(), f_matrix.ncols());
        let dim = f_matrix.nrows();
        ProductStructure { dim, f_matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.f_matrix
    }

    pub fn defect(&self) -> f64 {
        let f = &self.f_matrix;
        (f * f - DMatrix::identity(self.dim, self.dim)).norm()
    }
}

/// Canonical product structure of N1 x N2: block-diagonal diag(I_p, -I_q).
pub fn product_structure_from_split(p: usize, q: usize) -> ProductStructure {
    assert!(p + q >= 1, "need a nonempty product");
    let mut f = DMatrix::zeros(p + q, p + q);
    for i in 0..p {
        f[(i, i)] = 1.0;
    }
    for i in p..p + q {
        f[(i, i)] = -1.0;
    }
    ProductStructure::new(f)
}

/// P = (I + sqrt 5 F) / 2. The +1 eigenspace of F maps to eigenvalue phi,
/// the -1 eigenspace to 1 - phi.
pub fn golden_from_product(f: &ProductStructure) -> GoldenStructure {
    let n = f.dim();
    let p = (DMatrix::identity(n, n) + 5.0f64.sqrt() * f.matrix()) * 0.5;
    GoldenStructure::new(p)
}

/// F = (2P - I) / sqrt 5.
pub fn product_from_golden(g: &GoldenStructure) -> ProductStructure {
    let n = g.dim();
    let f = (2.0 * g.matrix() - DMatrix::identity(n, n)) / 5.0f64.sqrt();
    ProductStructure::new(f)
}

/// Residuals of the golden axioms against a bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    /// ||P^2 - P - I||
    pub r20: f64,
    /// ||Gram P - P^T Gram|| (self-adjointness)
    pub r21: f64,
    /// ||P^T Gram P - Gram P - Gram||
    pub r23: f64,
    pub pass: bool,
}

impl AxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.r20.max(self.r21).max(self.r23)
    }
}

/// Checks P^2 = P + I, self-adjointness w.r.t. the form, and the derived
/// compatibility identity; verdict passes iff all residuals <= 1e-10.
pub fn verify_golden(g: &GoldenStructure, form: &BilinearForm) -> Result<AxiomReport> {
    if g.dim() != form.dim() {
        return Err(GlsmError::DimensionMismatch(format!(
            "golden structure dim {} vs form dim {}",
            g.dim(),
            form.dim()
        )));
    }
    let p = g.matrix();
    let gram = form.gram();
    let r20 = g.defect();
    let r21 = (gram * p - p.transpose() * gram).norm();
    let r23 = (p.transpose() * gram * p - gram * p - gram).norm();
    let pass = r20 <= 1e-10 && r21 <= 1e-10 && r23 <= 1e-10;
    Ok(AxiomReport { r20, r21, r23, pass })
}

/// Spectral split of a golden structure into the phi and (1 - phi)
/// eigenspaces, via the almost-product eigenprojections (I ± F)/2.
pub fn golden_eigensplit(g: &GoldenStructure) -> (Subspace, Subspace) {
    let n = g.dim();
    let f = product_from_golden(g);
    let id = DMatrix::identity(n, n);
    let plus = orthonormal_columns(&clean_small(&((&id + f.matrix()) * 0.5)));
    let minus = orthonormal_columns(&clean_small(&((&id - f.matrix()) * 0.5)));
    (
        Subspace::new(plus).unwrap_or_else(|_| Subspace::empty(n)),
        Subspace::new(minus).unwrap_or_else(|_| Subspace::empty(n)),
    )
}

fn clean_small(m: &DMatrix<f64>) -> DMatrix<f64> {
    let max = m.amax();
    m.map(|x| if x.abs() <= TAU_RANK * max { 0.0 } else { x })
}
