//! Dense linear algebra over indefinite and degenerate symmetric bilinear
//! forms: signatures, radicals, screen complements and the lightlike
//! transversal frame construction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GlsmError, Result};

/// Relative rank tolerance (against the largest singular value / eigenvalue).
pub const TAU_RANK: f64 = 1e-8;
/// Equation tolerance for finite-difference-derived data.
pub const TAU_EQ_FD: f64 = 1e-6;
/// Equation tolerance for pure linear-algebra data.
pub const TAU_EQ_LIN: f64 = 1e-10;

const MAX_SCREEN_RETRIES: usize = 32;

/// A symmetric bilinear form on a finite-dimensional real space, possibly
/// degenerate. Symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm {
    dim: usize,
    gram: DMatrix<f64>,
}

impl BilinearForm {
    pub fn new(gram: DMatrix<f64>) -> Self {
        assert_eq!(gram.nrows(), gram.ncols(), "gram matrix must be square");
        let dim = gram.nrows();
        let sym = (&gram + gram.transpose()) * 0.5;
        BilinearForm { dim, gram: sym }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(diag)))
    }

    /// diag(+1 x p, -1 x q) semi-Euclidean form.
    pub fn semi_euclidean(p: usize, q: usize) -> Self {
        let mut d = vec![1.0; p];
        d.extend(std::iter::repeat(-1.0).take(q));
        Self::from_diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.gram * v)[(0, 0)]
    }

    /// Gram matrix of the form restricted to the columns of `basis`.
    pub fn restrict(&self, basis: &DMatrix<f64>) -> DMatrix<f64> {
        let g = basis.transpose() * &self.gram * basis;
        (&g + g.transpose()) * 0.5
    }
}

/// A subspace of an ambient space, represented by linearly independent
/// basis columns.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let ambient_dim = basis.nrows();
        if basis.ncols() > 0 {
            let svd = basis.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            if smax == 0.0 || smin <= TAU_RANK * smax {
                return Err(GlsmError::DimensionMismatch(
                    "basis columns are not linearly independent".into(),
                ));
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn from_columns(ambient_dim: usize, cols: &[DVector<f64>]) -> Result<Self> {
        let basis = DMatrix::from_columns(cols);
        assert_eq!(basis.nrows(), ambient_dim);
        Self::new(basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        self.basis.column(i).into_owned()
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    /// Euclidean-orthonormal basis of the same span.
    pub fn orthonormal_basis(&self) -> DMatrix<f64> {
        orthonormal_columns(&self.basis)
    }

    /// Euclidean orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        if self.is_empty() {
            return DMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        let q = self.orthonormal_basis();
        &q * q.transpose()
    }

    /// Residual of `v` against the span: ||v - proj(v)||.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - self.projector() * v).norm()
    }
}

/// Euclidean-orthonormalize columns (SVD-based, rank-preserving).
pub fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > TAU_RANK * smax)
        .count();
    u.columns(0, rank).into_owned()
}

/// Euclidean null space of `m` (kernel of the linear map v -> m v).
pub fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    if m.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    // pad wide matrices with zero rows: the thin SVD only returns
    // min(nrows, ncols) right singular vectors
    let m_eff = if m.nrows() < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = m_eff.svd(false, true);
    let vt = svd.v_t.unwrap();
    let smax = svd.singular_values.max();
    let rank = if smax == 0.0 {
        0
    } else {
        svd.singular_values
            .iter()
            .filter(|&&s| s > TAU_RANK * smax)
            .count()
    };
    vt.rows(rank, vt.nrows() - rank).transpose()
}

/// Frobenius distance between the orthogonal projectors of two subspaces.
/// Zero iff the spans coincide.
pub fn subspace_distance(a: &Subspace, b: &Subspace) -> f64 {
    (a.projector() - b.projector()).norm()
}

/// Containment residual: how far `a` sticks out of `b`, as the norm of the
/// component of a's orthonormal basis outside b. Zero iff span(a) ⊆ span(b).
pub fn containment_residual(a: &Subspace, b: &Subspace) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let qa = a.orthonormal_basis();
    let out = &qa - b.projector() * &qa;
    out.norm()
}

/// Signature (p, q, z) of a symmetric bilinear form: positive, negative and
/// zero eigenvalue counts, with zero decided relative to the largest
/// eigenvalue magnitude.
pub fn signature(form: &BilinearForm) -> (usize, usize, usize) {
    signature_of_gram(form.gram())
}

pub fn signature_of_gram(gram: &DMatrix<f64>) -> (usize, usize, usize) {
    let n = gram.nrows();
    if n == 0 {
        return (0, 0, 0);
    }
    let eig = gram.clone().symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    let (mut p, mut q, mut z) = (0, 0, 0);
    for &l in eig.eigenvalues.iter() {
        if max_abs == 0.0 || l.abs() <= TAU_RANK * max_abs {
            z += 1;
        } else if l > 0.0 {
            p += 1;
        } else {
            q += 1;
        }
    }
    (p, q, z)
}

/// Radical of `form` restricted to `sub`: the kernel of the restricted Gram
/// matrix, mapped back to ambient coordinates. Uses a symmetric eigensolve
/// for stable zero-eigenvalue detection on indefinite forms. Basis vectors
/// are Euclidean-normalized.
pub fn radical(form: &BilinearForm, sub: &Subspace) -> Subspace {
    assert_eq!(form.dim(), sub.ambient_dim());
    if sub.is_empty() {
        return Subspace::empty(sub.ambient_dim());
    }
    let restricted = form.restrict(sub.basis());
    let eig = restricted.symmetric_eigen();
    let max_abs = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    // scale against the ambient form as well, so that a fully degenerate
    // restriction (all eigenvalues at noise level) is still detected
    let col_sq = sub
        .basis()
        .column_iter()
        .map(|c| c.norm_squared())
        .fold(0.0f64, f64::max);
    let scale = max_abs.max(form.gram().amax() * col_sq);
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if scale == 0.0 || l.abs() <= TAU_RANK * scale {
            let coeffs = eig.eigenvectors.column(i).into_owned();
            let mut v = sub.basis() * coeffs;
            let norm = v.norm();
            if norm > 0.0 {
                v /= norm;
            }
            cols.push(v);
        }
    }
    if cols.is_empty() {
        Subspace::empty(sub.ambient_dim())
    } else {
        Subspace::from_columns(sub.ambient_dim(), &cols)
            .expect("kernel eigenvectors are independent")
    }
}

/// Seeded-random nondegenerate complement of `rad` inside `within`.
///
/// Any complement of the radical carries a nondegenerate restriction of the
/// form, so the seeded rotation and radical shift only select among valid
/// screens; retries guard against numerically pathological draws.
pub fn nondegenerate_complement(
    form: &BilinearForm,
    rad: &Subspace,
    within: &Subspace,
    seed: u64,
) -> Result<Subspace> {
    let n = within.ambient_dim();
    let s_rank = within.rank() - rad.rank();
    if s_rank == 0 {
        return Ok(Subspace::empty(n));
    }
    if rad.is_empty() {
        return Ok(within.clone());
    }

    let q_rad = rad.orthonormal_basis();
    // canonical complement: within-basis with the radical projected out
    let proj_out = within.basis() - &q_rad * (q_rad.transpose() * within.basis());
    let canon = orthonormal_columns(&proj_out);
    assert_eq!(canon.ncols(), s_rank, "rad must be the radical of within");

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c4ee_a11);
    for retry in 0..MAX_SCREEN_RETRIES {
        // seeded rotation of the canonical complement basis; the span stays
        // the Euclidean-orthogonal complement of the radical, which keeps
        // the transversal projection independent of the seed
        let rot = random_orthogonal(&mut rng, s_rank);
        let cols = &canon * rot;
        let gram_s = form.restrict(&cols);
        let det = gram_s.determinant().abs();
        if det > TAU_RANK.powi(s_rank as i32) {
            let _ = retry;
            return Ok(Subspace::new(cols)?);
        }
    }
    Err(GlsmError::DegenerateScreen {
        retries: MAX_SCREEN_RETRIES,
    })
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0f64));
    let qr = a.qr();
    qr.q()
}

/// The Duggal–Bejancu lightlike transversal construction.
///
/// Solves the pairing system g(N_i, xi_j) = delta_ij inside the orthogonal
/// complement of screen ⊥ screen_perp (minimum-norm particular solution),
/// then applies the symmetric null correction so that g(N_i, N_j) = 0.
pub fn lightlike_transversal(
    form: &BilinearForm,
    rad: &Subspace,
    screen: &Subspace,
    screen_perp: &Subspace,
) -> Result<Subspace> {
    let n = form.dim();
    let r = rad.rank();
    if r == 0 {
        return Ok(Subspace::empty(n));
    }

    // V = (screen ⊥ screen_perp)^⊥ w.r.t. the form; contains rad, dim 2r.
    let non_rad_cols = screen.rank() + screen_perp.rank();
    let v_basis = if non_rad_cols == 0 {
        DMatrix::identity(n, n)
    } else {
        let mut s = DMatrix::zeros(non_rad_cols, n);
        let mut row = 0;
        for sub in [screen, screen_perp] {
            for c in sub.basis().column_iter() {
                let gc = form.gram() * c;
                s.row_mut(row).copy_from(&gc.transpose());
                row += 1;
            }
        }
        null_space(&s)
    };

    // pairing matrix A_{j a} = g(xi_j, v_a)
    let pairing = rad.basis().transpose() * form.gram() * &v_basis;
    let svd = pairing.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= TAU_RANK * smax {
        return Err(GlsmError::SingularPairing);
    }

    // minimum-norm candidates E_i with g(E_i, xi_j) = delta_ij
    let mut candidates: Vec<DVector<f64>> = Vec::with_capacity(r);
    for i in 0..r {
        let mut e = DVector::zeros(r);
        e[i] = 1.0;
        let y = svd.solve(&e, 0.0).map_err(|_| GlsmError::SingularPairing)?;
        candidates.push(&v_basis * y);
    }

    // symmetric null correction: N_i = E_i - 1/2 sum_j g(E_i, E_j) xi_j
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(r);
    for i in 0..r {
        let mut ni = candidates[i].clone();
        for j in 0..r {
            let c = -0.5 * form.apply(&candidates[i], &candidates[j]);
            ni += c * rad.column(j);
        }
        cols.push(ni);
    }
    Subspace::from_columns(n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecf(v: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(v)
    }

    #[test]
    fn signature_diagonal_forms() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(signature(&f), (2, 2, 0));
        let f = BilinearForm::from_diagonal(&[0.0, 1.0]);
        assert_eq!(signature(&f), (1, 0, 1));
    }

    #[test]
    fn signature_of_induced_metric_on_null_plane() {
        // totally null plane in R^4_(2,2): restricted Gram is the zero 2x2
        let f = BilinearForm::semi_euclidean(2, 2);
        let sub = Subspace::from_columns(
            4,
            &[vecf(&[1.0, 0.0, 1.0, 0.0]), vecf(&[0.0, 1.0, 0.0, 1.0])],
        )
        .unwrap();
        let restricted = BilinearForm::new(f.restrict(sub.basis()));
        assert_eq!(signature(&restricted), (0, 0, 2));
    }

    #[test]
    fn radical_of_degenerate_plane() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0, -1.0]);
        let sub = Subspace::from_columns(
            3,
            &[vecf(&[1.0, 0.0, 1.0]), vecf(&[0.0, 1.0, 0.0])],
        )
        .unwrap();
        let rad = radical(&f, &sub);
        assert_eq!(rad.rank(), 1);
        let expected = vecf(&[1.0, 0.0, 1.0]) / 2.0f64.sqrt();
        let got = rad.column(0);
        let diff = (&got - &expected).norm().min((&got + &expected).norm());
        assert!(diff < 1e-12);
    }

    #[test]
    fn radical_of_nondegenerate_form_is_trivial() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0]);
        let rad = radical(&f, &Subspace::full(2));
        assert_eq!(rad.rank(), 0);
    }

    #[test]
    fn radical_on_light_cone_tangent() {
        // cone point (1,1,0) in Minkowski R^3, tangent spanned by the radial
        // null direction and the circle direction
        let f = BilinearForm::from_diagonal(&[-1.0, 1.0, 1.0]);
        let sub = Subspace::from_columns(
            3,
            &[vecf(&[1.0, 1.0, 0.0]), vecf(&[0.0, 0.0, 1.0])],
        )
        .unwrap();
        let rad = radical(&f, &sub);
        assert_eq!(rad.rank(), 1);
        for c in sub.basis().column_iter() {
            assert!(f.apply(&rad.column(0), &c.into_owned()).abs() < 1e-12);
        }
    }

    #[test]
    fn radical_is_idempotent() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0, -1.0, 0.0]);
        let sub = Subspace::from_columns(
            4,
            &[
                vecf(&[1.0, 0.0, 1.0, 0.0]),
                vecf(&[0.0, 1.0, 0.0, 0.0]),
                vecf(&[0.0, 0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        let r1 = radical(&f, &sub);
        let r2 = radical(&f, &r1);
        assert_eq!(r1.rank(), r2.rank());
        assert!(subspace_distance(&r1, &r2) < 1e-10);
    }

    #[test]
    fn complement_avoids_null_line() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0, -1.0]);
        let within = Subspace::from_columns(
            3,
            &[vecf(&[1.0, 0.0, 1.0]), vecf(&[0.0, 1.0, 0.0])],
        )
        .unwrap();
        let rad = radical(&f, &within);
        let s = nondegenerate_complement(&f, &rad, &within, 7).unwrap();
        assert_eq!(s.rank(), 1);
        let gram_s = f.restrict(s.basis());
        assert!(gram_s.determinant().abs() > 1e-4);
        // direct sum check: rad ∪ S spans within
        let joint = DMatrix::from_columns(&[rad.column(0), s.column(0)]);
        assert_eq!(orthonormal_columns(&joint).ncols(), 2);
    }

    #[test]
    fn complement_of_totally_lightlike_is_empty() {
        let f = BilinearForm::semi_euclidean(2, 2);
        let within = Subspace::from_columns(
            4,
            &[vecf(&[1.0, 0.0, 1.0, 0.0]), vecf(&[0.0, 1.0, 0.0, 1.0])],
        )
        .unwrap();
        let rad = radical(&f, &within);
        assert_eq!(rad.rank(), 2);
        let s = nondegenerate_complement(&f, &rad, &within, 0).unwrap();
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn complement_of_trivial_radical_is_identity() {
        let f = BilinearForm::from_diagonal(&[1.0, -1.0]);
        let within = Subspace::full(2);
        let rad = Subspace::empty(2);
        let s = nondegenerate_complement(&f, &rad, &within, 3).unwrap();
        assert!(subspace_distance(&s, &within) < 1e-12);
    }

    #[test]
    fn transversal_in_minkowski_plane() {
        let f = BilinearForm::from_diagonal(&[-1.0, 1.0]);
        let xi = vecf(&[1.0, 1.0]) / 2.0f64.sqrt();
        let rad = Subspace::from_columns(2, &[xi.clone()]).unwrap();
        let ltr = lightlike_transversal(&f, &rad, &Subspace::empty(2), &Subspace::empty(2))
            .unwrap();
        assert_eq!(ltr.rank(), 1);
        let n = ltr.column(0);
        assert!((f.apply(&n, &xi) - 1.0).abs() < 1e-12);
        assert!(f.apply(&n, &n).abs() < 1e-12);
        // hand-solved oracle: N = (-1, 1)/sqrt(2)
        let expected = vecf(&[-1.0, 1.0]) / 2.0f64.sqrt();
        assert!((n - expected).norm() < 1e-12);
    }

    #[test]
    fn transversal_empty_for_trivial_radical() {
        let f = BilinearForm::from_diagonal(&[1.0, 1.0]);
        let ltr = lightlike_transversal(
            &f,
            &Subspace::empty(2),
            &Subspace::full(2),
            &Subspace::empty(2),
        )
        .unwrap();
        assert_eq!(ltr.rank(), 0);
    }

    #[test]
    fn transversal_on_totally_null_plane_gives_hyperbolic_pairs() {
        let f = BilinearForm::semi_euclidean(2, 2);
        let s = 2.0f64.sqrt();
        let xi1 = vecf(&[1.0, 0.0, 1.0, 0.0]) / s;
        let xi2 = vecf(&[0.0, 1.0, 0.0, 1.0]) / s;
        let rad = Subspace::from_columns(4, &[xi1.clone(), xi2.clone()]).unwrap();
        let ltr = lightlike_transversal(&f, &rad, &Subspace::empty(4), &Subspace::empty(4))
            .unwrap();
        assert_eq!(ltr.rank(), 2);
        let frame = [xi1, xi2, ltr.column(0), ltr.column(1)];
        // Gram must be the standard hyperbolic-pair block form:
        // zero except g(xi_i, N_i) = 1
        for (i, a) in frame.iter().enumerate() {
            for (j, b) in frame.iter().enumerate() {
                let expected = if (i + 2 == j) || (j + 2 == i) { 1.0 } else { 0.0 };
                assert!(
                    (f.apply(a, b) - expected).abs() < 1e-10,
                    "Gram({i},{j}) = {} != {expected}",
                    f.apply(a, b)
                );
            }
        }
    }

    #[test]
    fn transversal_pairing_residuals_small() {
        // r-lightlike case with nontrivial screen and screen_perp
        // R^5_(2,3): tangent = null vector + spacelike screen vector
        let f = BilinearForm::from_diagonal(&[1.0, 1.0, -1.0, -1.0, -1.0]);
        let xi = vecf(&[1.0, 0.0, 1.0, 0.0, 0.0]) / 2.0f64.sqrt();
        let rad = Subspace::from_columns(5, &[xi.clone()]).unwrap();
        let screen = Subspace::from_columns(5, &[vecf(&[0.0, 1.0, 0.0, 0.0, 0.0])]).unwrap();
        let sperp = Subspace::from_columns(5, &[vecf(&[0.0, 0.0, 0.0, 1.0, 0.0])]).unwrap();
        let ltr = lightlike_transversal(&f, &rad, &screen, &sperp).unwrap();
        let n = ltr.column(0);
        assert!((f.apply(&n, &xi) - 1.0).abs() < 1e-10);
        assert!(f.apply(&n, &n).abs() < 1e-10);
        assert!(f.apply(&n, &screen.column(0)).abs() < 1e-10);
        assert!(f.apply(&n, &sperp.column(0)).abs() < 1e-10);
    }

    #[test]
    fn rank_of_radical_matches_zero_count() {
        let f = BilinearForm::from_diagonal(&[1.0, -1.0, 1.0, -1.0]);
        let sub = Subspace::from_columns(
            4,
            &[
                vecf(&[1.0, 1.0, 0.0, 0.0]),
                vecf(&[0.0, 0.0, 1.0, 0.0]),
                vecf(&[0.0, 0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        let restricted = BilinearForm::new(f.restrict(sub.basis()));
        let (_, _, z) = signature(&restricted);
        assert_eq!(radical(&f, &sub).rank(), z);
    }
}
