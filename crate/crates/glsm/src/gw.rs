//! Second fundamental forms, shape operators and transversal connections
//! extracted from finite-difference ambient derivatives plus frame
//! projection, together with the battery of structure identities relating
//! them.

use nalgebra::{DMatrix, DVector};

use crate::bundles::{BundleDecomposition, FrameField, FrameSplit};
use crate::error::{GlsmError, Result};
use crate::geometry::{
    covariant_derivative_section, AmbientManifold, ChartField, Immersion, Numeric, Section,
};

/// An ambient covariant derivative together with its frame split at the
/// center point.
pub struct SplitDerivative {
    pub ambient: DVector<f64>,
    pub split: FrameSplit,
}

impl SplitDerivative {
    /// Residual of re-summing the frame parts against the raw derivative.
    pub fn reconstruction_residual(&self) -> f64 {
        (&self.split.rad_part + &self.split.screen_part + &self.split.ltr_part
            + &self.split.sperp_part
            - &self.ambient)
            .norm()
    }
}

/// Section of the lightlike transversal frame (stencil-extended).
pub fn section_ltr<'a>(frame: &'a FrameField<'a>, i: usize) -> Section<'a> {
    Section::new(move |v| Ok(frame.at(v)?.ltr.column(i)))
}

/// Section of the screen transversal frame.
pub fn section_sperp<'a>(frame: &'a FrameField<'a>, i: usize) -> Section<'a> {
    Section::new(move |v| Ok(frame.at(v)?.screen_perp.column(i)))
}

/// Section of the radical frame.
pub fn section_rad<'a>(frame: &'a FrameField<'a>, i: usize) -> Section<'a> {
    Section::new(move |v| Ok(frame.at(v)?.rad.column(i)))
}

/// Section of the screen frame.
pub fn section_screen<'a>(frame: &'a FrameField<'a>, i: usize) -> Section<'a> {
    Section::new(move |v| Ok(frame.at(v)?.screen.column(i)))
}

/// The radical frame vector as a tangent chart field.
pub fn chart_field_rad<'a>(imm: &'a Immersion, frame: &'a FrameField<'a>, i: usize) -> ChartField<'a> {
    ChartField::from_fn(move |v| {
        let jac = imm.pushforward(v)?;
        Ok(imm.tangent_coeffs(&jac, &frame.at(v)?.rad.column(i)))
    })
}

/// The screen frame vector as a tangent chart field.
pub fn chart_field_screen<'a>(
    imm: &'a Immersion,
    frame: &'a FrameField<'a>,
    i: usize,
) -> ChartField<'a> {
    ChartField::from_fn(move |v| {
        let jac = imm.pushforward(v)?;
        Ok(imm.tangent_coeffs(&jac, &frame.at(v)?.screen.column(i)))
    })
}

/// Ambient covariant derivative of an arbitrary section along a tangent
/// field, split over the decomposition frame at the center point.
pub fn split_section_derivative(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    section: &Section,
    u: &[f64],
    num: &Numeric,
) -> Result<SplitDerivative> {
    let w0 = w.coeffs(u)?;
    let ambient = covariant_derivative_section(amb, imm, section, &w0, u, num.h_fd)?;
    let split = frame.center().project(&ambient)?;
    Ok(SplitDerivative { ambient, split })
}

/// Gauss formula split: the ambient derivative of a tangent field breaks
/// into the induced tangential derivative plus the ltr-valued and
/// screen-transversal-valued second fundamental forms.
pub fn gauss_split(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    u_field: &ChartField,
    u: &[f64],
    num: &Numeric,
) -> Result<SplitDerivative> {
    let section = Section::from_chart(imm, u_field);
    split_section_derivative(amb, imm, frame, w, &section, u, num)
}

/// Weingarten split for a lightlike transversal frame section N_i: the
/// tangent part is -A_N W, the ltr coefficients carry the transversal
/// connection and the screen-transversal coefficients carry the coupling.
pub fn weingarten_ltr(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    n_index: usize,
    u: &[f64],
    num: &Numeric,
) -> Result<SplitDerivative> {
    let section = section_ltr(frame, n_index);
    split_section_derivative(amb, imm, frame, w, &section, u, num)
}

/// Weingarten split for a screen transversal frame section Z_i.
pub fn weingarten_screen_transversal(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    z_index: usize,
    u: &[f64],
    num: &Numeric,
) -> Result<SplitDerivative> {
    let section = section_sperp(frame, z_index);
    split_section_derivative(amb, imm, frame, w, &section, u, num)
}

/// Screen-level split of the induced tangential derivative of a tangent
/// field into (screen coefficients, radical coefficients). Feeding a screen
/// field yields the screen connection and its radical-valued second
/// fundamental form; feeding a radical field yields minus the screen shape
/// operator and the radical transversal connection.
pub fn screen_split(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    x_field: &ChartField,
    u: &[f64],
    num: &Numeric,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let d = gauss_split(amb, imm, frame, w, x_field, u, num)?;
    Ok((d.split.screen_coeffs, d.split.rad_coeffs))
}

/// Both sides of the metric-defect identity: the failure of the induced
/// connection to be metric equals a symmetric pairing of the lightlike
/// second fundamental form.
pub struct MetricDefect {
    pub lhs: f64,
    pub rhs: f64,
}

impl MetricDefect {
    pub fn agreement(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// (∇_W g)(U, V) two ways: directly by finite differences of g(U, V) minus
/// the connection terms, and through the second-fundamental-form pairing.
pub fn metric_defect(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    u_field: &ChartField,
    v_field: &ChartField,
    u: &[f64],
    num: &Numeric,
) -> Result<MetricDefect> {
    let h = num.h_fd;
    let w0 = w.coeffs(u)?;
    let pair_at = |pt: &[f64]| -> Result<f64> {
        let jac = imm.pushforward(pt)?;
        let x = imm.map(pt)?;
        let g = amb.metric_at(x.as_slice())?;
        let ua = &jac * u_field.coeffs(pt)?;
        let va = &jac * v_field.coeffs(pt)?;
        Ok(g.apply(&ua, &va))
    };
    let hi: Vec<f64> = u.iter().zip(w0.iter()).map(|(&x, &d)| x + h * d).collect();
    let lo: Vec<f64> = u.iter().zip(w0.iter()).map(|(&x, &d)| x - h * d).collect();
    if !imm.contains(&hi, 0.0) || !imm.contains(&lo, 0.0) {
        return Err(GlsmError::StepUnderflow { point: u.to_vec() });
    }
    let w_of_g = (pair_at(&hi)? - pair_at(&lo)?) / (2.0 * h);

    let du = gauss_split(amb, imm, frame, w, u_field, u, num)?;
    let dv = gauss_split(amb, imm, frame, w, v_field, u, num)?;
    let center = frame.center();
    let g = &center.form;
    let jac = imm.pushforward(u)?;
    let ua = &jac * u_field.coeffs(u)?;
    let va = &jac * v_field.coeffs(u)?;
    let lhs = w_of_g - g.apply(&du.split.tangent_part(), &va) - g.apply(&ua, &dv.split.tangent_part());
    let rhs = g.apply(&du.split.ltr_part, &va) + g.apply(&dv.split.ltr_part, &ua);
    Ok(MetricDefect { lhs, rhs })
}

/// All connection-level coefficient arrays at a point, in the decomposition
/// frame, indexed over the chart coordinate directions.
pub struct GaussWeingartenData {
    /// h_l[i][(a, b)]: ltr_i coefficient of h(e_a, e_b)
    pub h_l: Vec<DMatrix<f64>>,
    /// h_s[i][(a, b)]: screen-transversal_i coefficient of h(e_a, e_b)
    pub h_s: Vec<DMatrix<f64>>,
    /// shape_n[i]: chart matrix of A_{N_i}
    pub shape_n: Vec<DMatrix<f64>>,
    /// shape_z[i]: chart matrix of A_{Z_i}
    pub shape_z: Vec<DMatrix<f64>>,
    /// conn_l[a][(j, i)]: N_j coefficient of the transversal derivative of N_i along e_a
    pub conn_l: Vec<DMatrix<f64>>,
    /// d_s[a][(j, i)]: Z_j coefficient of the coupling D^s(e_a, N_i)
    pub d_s: Vec<DMatrix<f64>>,
    /// conn_s[a][(j, i)]: Z_j coefficient of the transversal derivative of Z_i along e_a
    pub conn_s: Vec<DMatrix<f64>>,
    /// d_l[a][(j, i)]: N_j coefficient of the coupling D^l(e_a, Z_i)
    pub d_l: Vec<DMatrix<f64>>,
    /// screen_conn[a][(j, i)]: screen_j coefficient of the screen derivative of screen_i along e_a
    pub screen_conn: Vec<DMatrix<f64>>,
    /// h_star[a][(j, i)]: xi_j coefficient of h*(e_a, screen_i)
    pub h_star: Vec<DMatrix<f64>>,
    /// shape_star[i]: chart matrix of A*_{xi_i}
    pub shape_star: Vec<DMatrix<f64>>,
    /// conn_star_t[a][(j, i)]: xi_j coefficient of the radical derivative of xi_i along e_a
    pub conn_star_t: Vec<DMatrix<f64>>,
}

/// Extracts every coefficient array over the chart coordinate directions.
pub fn extract(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    u: &[f64],
    num: &Numeric,
) -> Result<GaussWeingartenData> {
    let center = frame.center();
    let m = imm.chart_dim();
    let r = center.rad.rank();
    let s = center.screen.rank();
    let t = center.screen_perp.rank();
    let jac = imm.pushforward(u)?;
    let coords: Vec<ChartField> = (0..m)
        .map(|a| {
            let mut e = DVector::zeros(m);
            e[a] = 1.0;
            ChartField::constant(e)
        })
        .collect();

    let mut h_l = vec![DMatrix::zeros(m, m); r];
    let mut h_s = vec![DMatrix::zeros(m, m); t];
    for (a, wa) in coords.iter().enumerate() {
        for (b, ub) in coords.iter().enumerate() {
            let d = gauss_split(amb, imm, frame, wa, ub, u, num)?;
            for i in 0..r {
                h_l[i][(a, b)] = d.split.ltr_coeffs[i];
            }
            for i in 0..t {
                h_s[i][(a, b)] = d.split.sperp_coeffs[i];
            }
        }
    }

    let mut shape_n = vec![DMatrix::zeros(m, m); r];
    let mut conn_l = vec![DMatrix::zeros(r, r); m];
    let mut d_s = vec![DMatrix::zeros(t, r); m];
    for i in 0..r {
        for (a, wa) in coords.iter().enumerate() {
            let d = weingarten_ltr(amb, imm, frame, wa, i, u, num)?;
            let an = imm.tangent_coeffs(&jac, &(-d.split.tangent_part()));
            shape_n[i].set_column(a, &an);
            for j in 0..r {
                conn_l[a][(j, i)] = d.split.ltr_coeffs[j];
            }
            for j in 0..t {
                d_s[a][(j, i)] = d.split.sperp_coeffs[j];
            }
        }
    }

    let mut shape_z = vec![DMatrix::zeros(m, m); t];
    let mut conn_s = vec![DMatrix::zeros(t, t); m];
    let mut d_l = vec![DMatrix::zeros(r, t); m];
    for i in 0..t {
        for (a, wa) in coords.iter().enumerate() {
            let d = weingarten_screen_transversal(amb, imm, frame, wa, i, u, num)?;
            let az = imm.tangent_coeffs(&jac, &(-d.split.tangent_part()));
            shape_z[i].set_column(a, &az);
            for j in 0..t {
                conn_s[a][(j, i)] = d.split.sperp_coeffs[j];
            }
            for j in 0..r {
                d_l[a][(j, i)] = d.split.ltr_coeffs[j];
            }
        }
    }

    let mut screen_conn = vec![DMatrix::zeros(s, s); m];
    let mut h_star = vec![DMatrix::zeros(r, s); m];
    for i in 0..s {
        let pu = chart_field_screen(imm, frame, i);
        for (a, wa) in coords.iter().enumerate() {
            let (star_tan, star_rad) = screen_split(amb, imm, frame, wa, &pu, u, num)?;
            screen_conn[a].set_column(i, &star_tan);
            h_star[a].set_column(i, &star_rad);
        }
    }

    let mut shape_star = vec![DMatrix::zeros(m, m); r];
    let mut conn_star_t = vec![DMatrix::zeros(r, r); m];
    for i in 0..r {
        let xi = chart_field_rad(imm, frame, i);
        for (a, wa) in coords.iter().enumerate() {
            let d = gauss_split(amb, imm, frame, wa, &xi, u, num)?;
            let a_star = imm.tangent_coeffs(&jac, &(-d.split.screen_part));
            shape_star[i].set_column(a, &a_star);
            conn_star_t[a].set_column(i, &d.split.rad_coeffs);
        }
    }

    Ok(GaussWeingartenData {
        h_l,
        h_s,
        shape_n,
        shape_z,
        conn_l,
        d_s,
        conn_s,
        d_l,
        screen_conn,
        h_star,
        shape_star,
        conn_star_t,
    })
}

/// Max residuals of the structure-identity battery at one point, over all
/// chart coordinate directions and frame sections.
#[derive(Debug, Clone, Default)]
pub struct IdentityReport {
    pub sym_h: f64,
    pub a_z_pairing: f64,
    pub d_s_pairing: f64,
    pub a_star_pairing: f64,
    pub a_n_pairing: f64,
    pub radical_form_nullity: f64,
    pub radical_shape_nullity: f64,
    pub metricity: f64,
    pub reconstruction: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.sym_h,
            self.a_z_pairing,
            self.d_s_pairing,
            self.a_star_pairing,
            self.a_n_pairing,
            self.radical_form_nullity,
            self.radical_shape_nullity,
            self.metricity,
            self.reconstruction,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Runs the full identity battery at one point.
pub fn identity_battery(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    u: &[f64],
    num: &Numeric,
) -> Result<IdentityReport> {
    let center = frame.center();
    let g = &center.form;
    let m = imm.chart_dim();
    let r = center.rad.rank();
    let s = center.screen.rank();
    let t = center.screen_perp.rank();
    let coords: Vec<ChartField> = (0..m)
        .map(|a| {
            let mut e = DVector::zeros(m);
            e[a] = 1.0;
            ChartField::constant(e)
        })
        .collect();
    let jac = imm.pushforward(u)?;
    let mut rep = IdentityReport::default();

    // pairwise tangential derivatives
    let mut gauss = Vec::with_capacity(m * m);
    for wa in &coords {
        for ub in &coords {
            let d = gauss_split(amb, imm, frame, wa, ub, u, num)?;
            rep.reconstruction = rep.reconstruction.max(d.reconstruction_residual());
            gauss.push(d);
        }
    }
    // symmetry of both transversal parts for coordinate fields
    for a in 0..m {
        for b in 0..m {
            let dab = &gauss[a * m + b];
            let dba = &gauss[b * m + a];
            rep.sym_h = rep
                .sym_h
                .max((dab.split.transversal_part() - dba.split.transversal_part()).norm());
        }
    }

    let weingarten_n: Vec<Vec<SplitDerivative>> = (0..r)
        .map(|i| {
            coords
                .iter()
                .map(|wa| weingarten_ltr(amb, imm, frame, wa, i, u, num))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let weingarten_z: Vec<Vec<SplitDerivative>> = (0..t)
        .map(|i| {
            coords
                .iter()
                .map(|wa| weingarten_screen_transversal(amb, imm, frame, wa, i, u, num))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // couplings of tangent pairs against the screen transversal frame
    for zi in 0..t {
        let z = center.screen_perp.column(zi);
        for a in 0..m {
            let a_z_w = -weingarten_z[zi][a].split.tangent_part();
            for b in 0..m {
                let dab = &gauss[a * m + b];
                let ub = jac.column(b).into_owned();
                // g(h^s(W,U), Z) + g(U, D^l(W,Z)) = g(A_Z W, U)
                let lhs = g.apply(&dab.split.sperp_part, &z)
                    + g.apply(&ub, &weingarten_z[zi][a].split.ltr_part);
                let rhs = g.apply(&a_z_w, &ub);
                rep.a_z_pairing = rep.a_z_pairing.max((lhs - rhs).abs());
            }
            // g(D^s(W,N), Z) = g(N, A_Z W)
            for ni in 0..r {
                let n = center.ltr.column(ni);
                let lhs = g.apply(&weingarten_n[ni][a].split.sperp_part, &z);
                let rhs = g.apply(&n, &a_z_w);
                rep.d_s_pairing = rep.d_s_pairing.max((lhs - rhs).abs());
            }
        }
    }

    // screen-level identities
    for si in 0..s {
        let pu = chart_field_screen(imm, frame, si);
        let pu_amb = center.screen.column(si);
        for (a, wa) in coords.iter().enumerate() {
            let d = gauss_split(amb, imm, frame, wa, &pu, u, num)?;
            for xi_i in 0..r {
                let xi = center.rad.column(xi_i);
                // g(h^l(W, PU), xi) = g(A*_xi W, PU)
                let xi_field = chart_field_rad(imm, frame, xi_i);
                let dxi = gauss_split(amb, imm, frame, wa, &xi_field, u, num)?;
                let a_star_w = -dxi.split.screen_part;
                let lhs = g.apply(&d.split.ltr_part, &xi);
                let rhs = g.apply(&a_star_w, &pu_amb);
                rep.a_star_pairing = rep.a_star_pairing.max((lhs - rhs).abs());
            }
            for ni in 0..r {
                let n = center.ltr.column(ni);
                // g(h*(W, PU), N) = g(A_N W, PU); h* is the radical part of
                // the tangential derivative
                let a_n_w = -weingarten_n[ni][a].split.tangent_part();
                let lhs = g.apply(&d.split.rad_part, &n);
                let rhs = g.apply(&a_n_w, &pu_amb);
                rep.a_n_pairing = rep.a_n_pairing.max((lhs - rhs).abs());
            }
        }
    }

    // radical identities: g(h^l(W, xi), xi) = 0 and A*_xi xi = 0
    for xi_i in 0..r {
        let xi_field = chart_field_rad(imm, frame, xi_i);
        let xi = center.rad.column(xi_i);
        for wa in &coords {
            let d = gauss_split(amb, imm, frame, wa, &xi_field, u, num)?;
            rep.radical_form_nullity = rep.radical_form_nullity.max(g.apply(&d.split.ltr_part, &xi).abs());
        }
        for xj in 0..r {
            let xj_field = chart_field_rad(imm, frame, xj);
            let d = gauss_split(amb, imm, frame, &xi_field, &xj_field, u, num)?;
            rep.radical_shape_nullity = rep.radical_shape_nullity.max(d.split.screen_part.norm());
        }
    }

    // metric defect: LHS/RHS agreement for all coordinate triples
    for wa in &coords {
        for ub in &coords {
            for vc in &coords {
                let md = metric_defect(amb, imm, frame, wa, ub, vc, u, num)?;
                rep.metricity = rep.metricity.max(md.agreement());
            }
        }
    }
    Ok(rep)
}

/// Ambient transversal part of the second fundamental form h(W, U).
pub fn second_fundamental_form(
    amb: &AmbientManifold,
    imm: &Immersion,
    frame: &FrameField,
    w: &ChartField,
    u_field: &ChartField,
    u: &[f64],
    num: &Numeric,
) -> Result<DVector<f64>> {
    Ok(gauss_split(amb, imm, frame, w, u_field, u, num)?
        .split
        .transversal_part())
}

/// Convenience: center decomposition field from a seeded decomposition.
pub fn frame_field<'a>(
    amb: &'a AmbientManifold,
    imm: &'a Immersion,
    center: BundleDecomposition,
) -> FrameField<'a> {
    FrameField::new(amb, imm, center)
}
