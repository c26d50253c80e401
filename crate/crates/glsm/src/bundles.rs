//! Pointwise bundle decompositions along a lightlike immersion: radical,
//! screen, screen transversal and lightlike transversal, plus smooth frame
//! extensions for finite differencing.

use nalgebra::{DMatrix, DVector};

use crate::error::{GlsmError, Result};
use crate::geometry::{AmbientManifold, Immersion};
use crate::golden::GoldenStructure;
use crate::linalg::{
    lightlike_transversal, nondegenerate_complement, null_space, radical, BilinearForm,
    Subspace, TAU_RANK,
};

/// Classification by radical rank r against dimension m and codimension k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SubmanifoldClass {
    NonDegenerate,
    RLightlike,
    CoIsotropic,
    Isotropic,
    TotallyLightlike,
}

pub fn classify(r: usize, m: usize, k: usize) -> SubmanifoldClass {
    if r == 0 {
        SubmanifoldClass::NonDegenerate
    } else if r == m && r == k {
        SubmanifoldClass::TotallyLightlike
    } else if r == k {
        SubmanifoldClass::CoIsotropic
    } else if r == m {
        SubmanifoldClass::Isotropic
    } else {
        SubmanifoldClass::RLightlike
    }
}

/// Orthogonal complement of `sub` in the whole space w.r.t. `form`.
pub fn form_perp(form: &BilinearForm, sub: &Subspace) -> Subspace {
    let rows = sub.basis().transpose() * form.gram();
    Subspace::new(null_space(&rows)).expect("null space basis is orthonormal")
}

/// Intersection of two subspaces (common kernel of the complement
/// projectors).
pub fn subspace_intersection(a: &Subspace, b: &Subspace) -> Subspace {
    let n = a.ambient_dim();
    assert_eq!(n, b.ambient_dim());
    let id = DMatrix::identity(n, n);
    let mut stacked = DMatrix::zeros(2 * n, n);
    stacked.rows_mut(0, n).copy_from(&(&id - a.projector()));
    stacked.rows_mut(n, n).copy_from(&(&id - b.projector()));
    Subspace::new(null_space(&stacked)).expect("null space basis is orthonormal")
}

/// The frame split of an ambient vector against a bundle decomposition.
#[derive(Debug, Clone)]
pub struct FrameSplit {
    pub rad_coeffs: DVector<f64>,
    pub screen_coeffs: DVector<f64>,
    pub ltr_coeffs: DVector<f64>,
    pub sperp_coeffs: DVector<f64>,
    pub rad_part: DVector<f64>,
    pub screen_part: DVector<f64>,
    pub ltr_part: DVector<f64>,
    pub sperp_part: DVector<f64>,
}

impl FrameSplit {
    pub fn tangent_part(&self) -> DVector<f64> {
        &self.rad_part + &self.screen_part
    }

    pub fn transversal_part(&self) -> DVector<f64> {
        &self.ltr_part + &self.sperp_part
    }
}

/// All bundle data at one chart point.
#[derive(Debug, Clone)]
pub struct BundleDecomposition {
    pub chart_point: Vec<f64>,
    pub ambient_point: DVector<f64>,
    pub form: BilinearForm,
    pub tangent: Subspace,
    pub rad: Subspace,
    pub screen: Subspace,
    pub screen_perp: Subspace,
    pub ltr: Subspace,
    pub mu: Option<Subspace>,
    pub class: SubmanifoldClass,
    /// True when the lightlike transversal was forced to be the golden image
    /// of the radical (its own products are then not required to vanish).
    pub adapted: bool,
}

impl BundleDecomposition {
    pub fn radical_rank(&self) -> usize {
        self.rad.rank()
    }

    pub fn dim(&self) -> usize {
        self.tangent.rank()
    }

    pub fn codim(&self) -> usize {
        self.tangent.ambient_dim() - self.tangent.rank()
    }

    /// The full frame matrix [rad | screen | ltr | screen_perp].
    pub fn frame_matrix(&self) -> DMatrix<f64> {
        let n = self.tangent.ambient_dim();
        let blocks = [&self.rad, &self.screen, &self.ltr, &self.screen_perp];
        let total: usize = blocks.iter().map(|b| b.rank()).sum();
        let mut f = DMatrix::zeros(n, total);
        let mut col = 0;
        for b in blocks {
            for c in b.basis().column_iter() {
                f.set_column(col, &c);
                col += 1;
            }
        }
        f
    }

    /// Splits an ambient vector over the frame. Errors with FrameSingular if
    /// the blocks do not span the ambient space.
    pub fn project(&self, v: &DVector<f64>) -> Result<FrameSplit> {
        let f = self.frame_matrix();
        let n = self.tangent.ambient_dim();
        if f.ncols() != n {
            return Err(GlsmError::FrameSingular);
        }
        let lu = f.clone().full_piv_lu();
        let coeffs = lu.solve(v).ok_or(GlsmError::FrameSingular)?;
        let resid = (&f * &coeffs - v).norm();
        if !resid.is_finite() || resid > 1e-6 * v.norm().max(1.0) {
            return Err(GlsmError::FrameSingular);
        }
        let (r, s) = (self.rad.rank(), self.screen.rank());
        let (l, t) = (self.ltr.rank(), self.screen_perp.rank());
        let take = |from: usize, len: usize| coeffs.rows(from, len).into_owned();
        let rad_coeffs = take(0, r);
        let screen_coeffs = take(r, s);
        let ltr_coeffs = take(r + s, l);
        let sperp_coeffs = take(r + s + l, t);
        Ok(FrameSplit {
            rad_part: self.rad.basis() * &rad_coeffs,
            screen_part: self.screen.basis() * &screen_coeffs,
            ltr_part: self.ltr.basis() * &ltr_coeffs,
            sperp_part: self.screen_perp.basis() * &sperp_coeffs,
            rad_coeffs,
            screen_coeffs,
            ltr_coeffs,
            sperp_coeffs,
        })
    }

    /// Max residual over the defining frame relations: the pairing
    /// g(N_i, xi_j) = delta, orthogonality of ltr against the screens, and
    /// (when not adapted) nullity of the transversal products g(N_i, N_j).
    pub fn frame_defect(&self) -> f64 {
        let g = &self.form;
        let mut worst: f64 = 0.0;
        for i in 0..self.ltr.rank() {
            let n_i = self.ltr.column(i);
            for j in 0..self.rad.rank() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.apply(&n_i, &self.rad.column(j)) - target).abs());
            }
            for j in 0..self.screen.rank() {
                worst = worst.max(g.apply(&n_i, &self.screen.column(j)).abs());
            }
            for j in 0..self.screen_perp.rank() {
                worst = worst.max(g.apply(&n_i, &self.screen_perp.column(j)).abs());
            }
            if !self.adapted {
                for j in 0..self.ltr.rank() {
                    worst = worst.max(g.apply(&n_i, &self.ltr.column(j)).abs());
                }
            }
        }
        for i in 0..self.rad.rank() {
            let xi = self.rad.column(i);
            for sub in [&self.tangent, &self.screen_perp] {
                for c in sub.basis().column_iter() {
                    worst = worst.max(g.apply(&xi, &c.into_owned()).abs());
                }
            }
        }
        for i in 0..self.screen.rank() {
            let s = self.screen.column(i);
            for c in self.screen_perp.basis().column_iter() {
                worst = worst.max(g.apply(&s, &c.into_owned()).abs());
            }
        }
        worst
    }
}

/// Canonical tangent-space data at a chart point.
fn tangent_data(
    amb: &AmbientManifold,
    imm: &Immersion,
    u: &[f64],
) -> Result<(DVector<f64>, BilinearForm, Subspace)> {
    let jac = imm.pushforward(u)?;
    let x = imm.map(u)?;
    let xs: Vec<f64> = x.iter().copied().collect();
    let form = amb.metric_at(&xs)?;
    let tangent = Subspace::new(jac)?;
    Ok((x, form, tangent))
}

/// Full pointwise decomposition with seeded screen selection and the
/// standard (fully null) lightlike transversal.
pub fn decompose(
    amb: &AmbientManifold,
    imm: &Immersion,
    u: &[f64],
    seed: u64,
) -> Result<BundleDecomposition> {
    let (x, form, tangent) = tangent_data(amb, imm, u)?;
    let rad = radical(&form, &tangent);
    let screen = nondegenerate_complement(&form, &rad, &tangent, seed)?;
    let perp = form_perp(&form, &tangent);

    // the radical of the normal space must be the radical of the tangent
    let rad_perp = radical(&form, &perp);
    debug_assert!(
        crate::linalg::subspace_distance(&rad, &rad_perp) < 1e-7,
        "tangent and normal radicals disagree"
    );
    let screen_perp = nondegenerate_complement(&form, &rad, &perp, seed ^ 0x9e37_79b9)?;
    let ltr = lightlike_transversal(&form, &rad, &screen, &screen_perp)?;
    let class = classify(
        rad.rank(),
        tangent.rank(),
        tangent.ambient_dim() - tangent.rank(),
    );
    Ok(BundleDecomposition {
        chart_point: u.to_vec(),
        ambient_point: x,
        form,
        tangent,
        rad,
        screen,
        screen_perp,
        ltr,
        mu: None,
        class,
        adapted: false,
    })
}

/// Dual-normalizes candidate transversal columns so that
/// g(N_i, xi_j) = delta_ij. Errors with SingularPairing when the pairing
/// matrix is singular.
pub fn dual_normalize(
    form: &BilinearForm,
    rad: &Subspace,
    candidates: &DMatrix<f64>,
) -> Result<Subspace> {
    let pairing = rad.basis().transpose() * form.gram() * candidates;
    let svd = pairing.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= TAU_RANK * smax {
        return Err(GlsmError::SingularPairing);
    }
    let inv = pairing
        .try_inverse()
        .ok_or(GlsmError::SingularPairing)?;
    Subspace::new(candidates * inv)
}

/// Decomposition adapted to a golden class: the screen is the canonical
/// piece of the tangent space orthogonal to the golden image of the
/// radical, and the lightlike transversal is that golden image itself
/// (dual-normalized). Deterministic; no seeded choices.
pub fn decompose_adapted(
    amb: &AmbientManifold,
    imm: &Immersion,
    u: &[f64],
    golden: &GoldenStructure,
) -> Result<BundleDecomposition> {
    let (x, form, tangent) = tangent_data(amb, imm, u)?;
    let rad = radical(&form, &tangent);
    if rad.is_empty() {
        return Err(GlsmError::ClassMismatch(
            "adapted decomposition needs a nontrivial radical".into(),
        ));
    }
    let p_rad_cols = golden.matrix() * rad.basis();
    let p_rad = Subspace::new(p_rad_cols.clone())?;
    let perp = form_perp(&form, &tangent);

    // screen: tangent directions orthogonal (w.r.t. the form) to P rad
    let p_rad_perp = form_perp(&form, &p_rad);
    let screen = subspace_intersection(&tangent, &p_rad_perp);
    if screen.rank() + rad.rank() != tangent.rank() {
        return Err(GlsmError::ClassMismatch(format!(
            "screen rank {} + radical rank {} != tangent rank {}",
            screen.rank(),
            rad.rank(),
            tangent.rank()
        )));
    }
    let gram_s = form.restrict(screen.basis());
    if screen.rank() > 0 && gram_s.determinant().abs() <= TAU_RANK.powi(screen.rank() as i32)
    {
        return Err(GlsmError::DegenerateScreen { retries: 0 });
    }
    let screen_perp = subspace_intersection(&perp, &p_rad_perp);
    let expected_sperp = perp.rank() - rad.rank();
    if screen_perp.rank() != expected_sperp {
        return Err(GlsmError::ClassMismatch(format!(
            "screen transversal rank {} != {}",
            screen_perp.rank(),
            expected_sperp
        )));
    }
    let ltr = dual_normalize(&form, &rad, &p_rad_cols)?;
    let class = classify(
        rad.rank(),
        tangent.rank(),
        tangent.ambient_dim() - tangent.rank(),
    );
    Ok(BundleDecomposition {
        chart_point: u.to_vec(),
        ambient_point: x,
        form,
        tangent,
        rad,
        screen,
        screen_perp,
        ltr,
        mu: None,
        class,
        adapted: true,
    })
}

/// Canonical complement span of `rad` inside `within`, with the center
/// basis projected onto it.
fn aligned_complement(
    rad: &Subspace,
    within: &Subspace,
    center_basis: &Subspace,
) -> Result<Subspace> {
    let n = within.ambient_dim();
    if center_basis.is_empty() {
        return Ok(Subspace::empty(n));
    }
    let span = if rad.is_empty() {
        within.orthonormal_basis()
    } else {
        let q_rad = rad.orthonormal_basis();
        let proj_out = within.basis() - &q_rad * (q_rad.transpose() * within.basis());
        crate::linalg::orthonormal_columns(&proj_out)
    };
    let projector = &span * span.transpose();
    Subspace::new(projector * center_basis.basis())
}

/// Projects the center basis onto an explicitly given span.
fn project_onto_span(span: &Subspace, center_basis: &Subspace) -> Result<Subspace> {
    if center_basis.is_empty() {
        return Ok(Subspace::empty(span.ambient_dim()));
    }
    let q = span.orthonormal_basis();
    Subspace::new(&q * (q.transpose() * center_basis.basis()))
}

/// A smooth extension of a center decomposition to nearby chart points, for
/// finite differencing of frame sections. Each subspace basis at a nearby
/// point is the center basis projected onto the corresponding subspace
/// there, which reproduces the center frame exactly at the center.
pub struct FrameField<'a> {
    amb: &'a AmbientManifold,
    imm: &'a Immersion,
    center: BundleDecomposition,
    golden: Option<&'a GoldenStructure>,
}

impl<'a> FrameField<'a> {
    pub fn new(
        amb: &'a AmbientManifold,
        imm: &'a Immersion,
        center: BundleDecomposition,
    ) -> Self {
        FrameField {
            amb,
            imm,
            center,
            golden: None,
        }
    }

    /// Adapted variant: the transversal at every stencil point is the golden
    /// image of the radical there.
    pub fn new_adapted(
        amb: &'a AmbientManifold,
        imm: &'a Immersion,
        center: BundleDecomposition,
        golden: &'a GoldenStructure,
    ) -> Self {
        FrameField {
            amb,
            imm,
            center,
            golden: Some(golden),
        }
    }

    pub fn center(&self) -> &BundleDecomposition {
        &self.center
    }

    /// The aligned decomposition at a nearby chart point.
    pub fn at(&self, u: &[f64]) -> Result<BundleDecomposition> {
        if u == self.center.chart_point.as_slice() {
            return Ok(self.center.clone());
        }
        let (x, form, tangent) = tangent_data(self.amb, self.imm, u)?;
        let rad_raw = radical(&form, &tangent);
        if rad_raw.rank() != self.center.rad.rank() {
            return Err(GlsmError::RankDeficient {
                rank: rad_raw.rank(),
                expected: self.center.rad.rank(),
                point: u.to_vec(),
            });
        }
        let perp = form_perp(&form, &tangent);
        let p_rad = rad_raw.projector();

        let rad = if rad_raw.is_empty() {
            rad_raw.clone()
        } else {
            Subspace::new(&p_rad * self.center.rad.basis())?
        };
        // the screen and screen transversal spans at each point must follow
        // the same canonical rule the center decomposition used, with the
        // center bases projected onto those spans so the sections vary
        // smoothly and reproduce the center frame; mixing rules would rotate
        // the distributions at zeroth order
        let (screen, screen_perp, ltr, adapted) = match self.golden {
            Some(g) if !rad.is_empty() => {
                let p_rad = Subspace::new(g.matrix() * rad.basis())?;
                let p_rad_perp = form_perp(&form, &p_rad);
                let screen_span = subspace_intersection(&tangent, &p_rad_perp);
                let sperp_span = subspace_intersection(&perp, &p_rad_perp);
                let screen = project_onto_span(&screen_span, &self.center.screen)?;
                let screen_perp = project_onto_span(&sperp_span, &self.center.screen_perp)?;
                let ltr = dual_normalize(&form, &rad, &(g.matrix() * rad.basis()))?;
                (screen, screen_perp, ltr, true)
            }
            _ => {
                let screen = aligned_complement(&rad_raw, &tangent, &self.center.screen)?;
                let screen_perp = aligned_complement(&rad_raw, &perp, &self.center.screen_perp)?;
                let ltr = lightlike_transversal(&form, &rad, &screen, &screen_perp)?;
                (screen, screen_perp, ltr, false)
            }
        };
        Ok(BundleDecomposition {
            chart_point: u.to_vec(),
            ambient_point: x,
            form,
            tangent,
            rad,
            screen,
            screen_perp,
            ltr,
            mu: None,
            class: self.center.class,
            adapted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{chart_vars, Expression};
    use crate::golden::golden_from_product;
    use crate::linalg::subspace_distance;
    use nalgebra::{dmatrix, dvector};

    fn light_cone() -> (AmbientManifold, Immersion) {
        let amb = AmbientManifold::flat(DMatrix::from_diagonal(&dvector![-1.0, 1.0, 1.0]));
        let vars = chart_vars(2);
        let comps = ["u1", "u1*cos(u2)", "u1*sin(u2)"]
            .iter()
            .map(|t| Expression::parse(t, &vars).unwrap())
            .collect();
        let imm = Immersion::new(2, 3, comps, vec![(0.25, 2.0), (-7.0, 7.0)]).unwrap();
        (amb, imm)
    }

    #[test]
    fn classify_all_cases() {
        assert_eq!(classify(0, 3, 2), SubmanifoldClass::NonDegenerate);
        assert_eq!(classify(1, 3, 2), SubmanifoldClass::RLightlike);
        assert_eq!(classify(2, 3, 2), SubmanifoldClass::CoIsotropic);
        assert_eq!(classify(2, 2, 3), SubmanifoldClass::Isotropic);
        assert_eq!(classify(2, 2, 2), SubmanifoldClass::TotallyLightlike);
    }

    #[test]
    fn light_cone_decomposition() {
        let (amb, imm) = light_cone();
        let u = [1.0, std::f64::consts::FRAC_PI_2];
        let d = decompose(&amb, &imm, &u, 11).unwrap();
        assert_eq!(d.class, SubmanifoldClass::CoIsotropic);
        assert_eq!(d.radical_rank(), 1);
        assert_eq!(d.screen.rank(), 1);
        assert_eq!(d.screen_perp.rank(), 0);
        assert_eq!(d.ltr.rank(), 1);
        assert!(d.frame_defect() < 1e-10);
        // radical is the radial null direction (0-eigenvector of induced g)
        let xi_dir = dvector![1.0, 0.0, 1.0] / 2.0f64.sqrt();
        assert!(d.rad.residual(&xi_dir) < 1e-10);
        // with the canonical circle-direction screen the transversal is
        // hand-solvable: N = (-1, 0, 1)/sqrt(2) for xi = (1, 0, 1)/sqrt(2)
        let rad0 = Subspace::from_columns(3, &[xi_dir.clone()]).unwrap();
        let screen0 = Subspace::from_columns(3, &[dvector![0.0, 1.0, 0.0]]).unwrap();
        let ltr0 = crate::linalg::lightlike_transversal(
            &d.form,
            &rad0,
            &screen0,
            &Subspace::empty(3),
        )
        .unwrap();
        let expected = dvector![-1.0, 0.0, 1.0] / 2.0f64.sqrt();
        assert!((ltr0.column(0) - expected).norm() < 1e-10);
        // the pairing coefficient g(v, xi) of any ambient vector against the
        // seeded transversal frame is screen-independent
        let v = dvector![0.0, 0.0, -1.0];
        let split = d.project(&v).unwrap();
        let xi = d.rad.column(0);
        assert!(
            (d.form.apply(&v, &xi) - split.ltr_coeffs[0]).abs() < 1e-10,
            "ltr coefficient must equal the pairing with xi"
        );
    }

    #[test]
    fn totally_null_plane_decomposition() {
        let amb = AmbientManifold::flat(DMatrix::from_diagonal(&dvector![
            1.0, 1.0, -1.0, -1.0
        ]));
        let cols = dmatrix![1.0, 0.0; 0.0, 1.0; 1.0, 0.0; 0.0, 1.0];
        let imm = Immersion::linear(&cols, 1.0);
        let d = decompose(&amb, &imm, &[0.1, 0.2], 3).unwrap();
        assert_eq!(d.class, SubmanifoldClass::TotallyLightlike);
        assert_eq!(d.radical_rank(), 2);
        assert!(d.screen.is_empty());
        assert!(d.screen_perp.is_empty());
        assert!(d.frame_defect() < 1e-10);
    }

    #[test]
    fn euclidean_graph_is_nondegenerate() {
        let amb = AmbientManifold::flat(DMatrix::identity(3, 3));
        let vars = chart_vars(2);
        let comps = ["u1", "u2", "u1^2 + u2^2"]
            .iter()
            .map(|t| Expression::parse(t, &vars).unwrap())
            .collect();
        let imm = Immersion::new(2, 3, comps, vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let d = decompose(&amb, &imm, &[0.2, 0.3], 5).unwrap();
        assert_eq!(d.class, SubmanifoldClass::NonDegenerate);
        assert!(d.rad.is_empty());
        assert!(d.ltr.is_empty());
        assert!(subspace_distance(&d.screen, &d.tangent) < 1e-10);
    }

    #[test]
    fn project_round_trip() {
        let (amb, imm) = light_cone();
        let d = decompose(&amb, &imm, &[1.3, 0.4], 17).unwrap();
        let v = dvector![0.3, -1.1, 0.7];
        let split = d.project(&v).unwrap();
        let rebuilt =
            &split.rad_part + &split.screen_part + &split.ltr_part + &split.sperp_part;
        assert!((rebuilt - &v).norm() < 1e-12);
        assert!((split.tangent_part() + split.transversal_part() - v).norm() < 1e-12);
    }

    #[test]
    fn project_tangent_vector_has_no_transversal_part() {
        let (amb, imm) = light_cone();
        let d = decompose(&amb, &imm, &[0.8, -0.3], 23).unwrap();
        let v = d.tangent.column(0) + 2.0 * d.tangent.column(1);
        let split = d.project(&v).unwrap();
        assert!(split.transversal_part().norm() < 1e-12);
    }

    #[test]
    fn radical_and_screen_span_are_seed_independent() {
        let amb = AmbientManifold::flat(DMatrix::from_diagonal(&dvector![
            1.0, 1.0, -1.0, -1.0, 1.0
        ]));
        // r-lightlike 3-surface: null direction + mixed screen
        let cols = dmatrix![
            1.0, 0.0, 0.0;
            0.0, 1.0, 0.0;
            1.0, 0.0, 0.0;
            0.0, 0.0, 0.0;
            0.0, 0.0, 1.0
        ];
        let imm = Immersion::linear(&cols, 1.0);
        let d1 = decompose(&amb, &imm, &[0.0, 0.0, 0.0], 1).unwrap();
        let d2 = decompose(&amb, &imm, &[0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(d1.class, SubmanifoldClass::RLightlike);
        assert!(subspace_distance(&d1.rad, &d2.rad) < 1e-10);
        assert!(subspace_distance(&d1.tangent, &d2.tangent) < 1e-10);
        // the screen span is the canonical complement for every seed (only
        // its basis rotates), so the transversal bundle is seed-independent
        assert!(subspace_distance(&d1.screen, &d2.screen) < 1e-10);
        assert!(subspace_distance(&d1.ltr, &d2.ltr) < 1e-10);
        assert!(d1.frame_defect() < 1e-9);
        assert!(d2.frame_defect() < 1e-9);
    }

    #[test]
    fn decompose_is_deterministic_for_fixed_seed() {
        let (amb, imm) = light_cone();
        let d1 = decompose(&amb, &imm, &[1.1, 0.6], 42).unwrap();
        let d2 = decompose(&amb, &imm, &[1.1, 0.6], 42).unwrap();
        assert_eq!(d1.screen.basis(), d2.screen.basis());
        assert_eq!(d1.ltr.basis(), d2.ltr.basis());
    }

    #[test]
    fn frame_matrix_is_full_rank() {
        let (amb, imm) = light_cone();
        let d = decompose(&amb, &imm, &[0.9, 2.0], 8).unwrap();
        let f = d.frame_matrix();
        assert_eq!(f.ncols(), 3);
        assert!(f.determinant().abs() > 1e-6);
    }

    #[test]
    fn frame_field_matches_center_and_varies_smoothly() {
        let (amb, imm) = light_cone();
        let u = [1.0, 0.5];
        let d = decompose(&amb, &imm, &u, 7).unwrap();
        let field = FrameField::new(&amb, &imm, d.clone());
        let at_center = field.at(&u).unwrap();
        assert!((at_center.rad.basis() - d.rad.basis()).norm() < 1e-14);

        let h = 1e-5;
        let near = field.at(&[u[0] + h, u[1]]).unwrap();
        assert!((near.rad.basis() - d.rad.basis()).norm() < 10.0 * h);
        assert!((near.ltr.basis() - d.ltr.basis()).norm() < 10.0 * h);
        assert!(near.frame_defect() < 1e-9);
    }

    #[test]
    fn adapted_decomposition_on_golden_instance() {
        // ambient R^4 with product split (2,2), golden P, neutral metric
        // arranged so that P maps the radical off the tangent space
        let g = BilinearForm::from_diagonal(&[1.0, -1.0, 1.0, -1.0]);
        let amb = AmbientManifold::flat(g.gram().clone());
        // eigenvalue pattern interleaved with the metric signs, so the null
        // direction e1 + e2 mixes both eigenspaces and P maps it off the
        // tangent plane
        let f = crate::golden::ProductStructure::new(DMatrix::from_diagonal(&dvector![
            1.0, -1.0, 1.0, -1.0
        ]));
        let p = golden_from_product(&f);
        let amb = amb.with_golden(p.clone()).unwrap();
        // tangent plane: xi = e1 + e2 (null), screen w = e3; P xi lives on
        // the first two coordinates so g(w, xi) = g(w, P xi) = 0 while
        // g(w, w) = 1 keeps the screen nondegenerate
        let xi = dvector![1.0, 1.0, 0.0, 0.0];
        let w = dvector![0.0, 0.0, 1.0, 0.0];
        let cols = DMatrix::from_columns(&[xi.clone(), w]);
        let imm = Immersion::linear(&cols, 1.0);
        let d = decompose_adapted(&amb, &imm, &[0.1, 0.1], &p).unwrap();
        assert!(d.adapted);
        assert_eq!(d.radical_rank(), 1);
        assert_eq!(d.screen.rank(), 1);
        assert_eq!(d.screen_perp.rank(), 1);
        // ltr spans P(rad)
        let p_xi = p.matrix() * &xi;
        assert!(d.ltr.residual(&p_xi) < 1e-10);
        // pairing normalized, orthogonality against both screens
        assert!(d.frame_defect() < 1e-10);
    }

    #[test]
    fn intersection_and_perp_helpers() {
        let a = Subspace::from_columns(
            3,
            &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let b = Subspace::from_columns(
            3,
            &[dvector![0.0, 1.0, 0.0], dvector![0.0, 0.0, 1.0]],
        )
        .unwrap();
        let i = subspace_intersection(&a, &b);
        assert_eq!(i.rank(), 1);
        assert!(i.residual(&dvector![0.0, 1.0, 0.0]) < 1e-12);

        let f = BilinearForm::from_diagonal(&[-1.0, 1.0, 1.0]);
        let line = Subspace::from_columns(3, &[dvector![1.0, 1.0, 0.0]]).unwrap();
        let perp = form_perp(&f, &line);
        assert_eq!(perp.rank(), 2);
        assert!(perp.residual(&dvector![1.0, 1.0, 0.0]) < 1e-12);
        assert!(perp.residual(&dvector![0.0, 0.0, 1.0]) < 1e-12);
    }
}
