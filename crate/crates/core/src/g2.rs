//! G2-structures: the metric of a positive 3-form, intrinsic torsion forms,
//! the Lee form and the torsion-class labels.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{HodgeStar, KForm, Metric};
use crate::liealg::LieAlgebra;
use crate::linalg;

/// Default absolute tolerance for "this torsion form vanishes".
pub const CLASSIFY_TOL: f64 = 1e-8;

/// Maximum allowed disagreement between the two determinations of `τ1`.
pub const TAU1_CONSISTENCY_TOL: f64 = 1e-8;

/// A positive 3-form on a 7-dimensional Lie algebra with everything it induces.
#[derive(Clone, Debug)]
pub struct G2Structure {
    algebra: Arc<LieAlgebra>,
    phi: KForm,
    metric: Metric,
    star: HodgeStar,
    star_phi: KForm,
    gram_det: f64,
}

/// The symmetric matrix `B_ij = ⅙ ι_iφ ∧ ι_jφ ∧ φ / e^{1...7}`.
fn phi_bilinear(phi: &KForm) -> Result<DMatrix<f64>> {
    let contractions: Vec<KForm> = (1..=7)
        .map(|i| phi.interior_basis(i))
        .collect::<Result<_>>()?;
    let with_phi: Vec<KForm> = contractions
        .iter()
        .map(|c| c.wedge(phi))
        .collect::<Result<_>>()?;
    let mut b = DMatrix::zeros(7, 7);
    for i in 0..7 {
        for j in i..7 {
            let top = contractions[j].wedge(&with_phi[i])?.as_scalar() / 6.0;
            b[(i, j)] = top;
            b[(j, i)] = top;
        }
    }
    Ok(b)
}

impl G2Structure {
    /// Builds the structure induced by `phi`. The volume form is always a
    /// positive multiple of `e^{1...7}`; `g = B / (det B)^{1/9}` with the real
    /// ninth root, so forms inducing the opposite orientation still get a
    /// metric when it is positive definite.
    pub fn new(algebra: Arc<LieAlgebra>, phi: KForm) -> Result<Self> {
        if algebra.dim() != 7 || phi.dim() != 7 {
            return Err(Error::NotPositiveG2(format!(
                "G2-structures live in dimension 7, got algebra {} / form {}",
                algebra.dim(),
                phi.dim()
            )));
        }
        if phi.degree() != 3 {
            return Err(Error::DegreeMismatch {
                expected: 3,
                found: phi.degree(),
            });
        }
        let b = phi_bilinear(&phi)?;
        let det_b = b.determinant();
        let eig = b.symmetric_eigenvalues().map(f64::abs);
        if eig.max() == 0.0 || eig.min() <= 1e-12 * eig.max() {
            return Err(Error::NotPositiveG2(format!(
                "degenerate bilinear form (det B = {det_b:.3e})"
            )));
        }
        let g = b.scale(det_b.signum() / det_b.abs().powf(1.0 / 9.0));
        let metric = Metric::new(g)?;
        if !metric.is_positive_definite() {
            return Err(Error::NotPositiveG2("induced metric is indefinite".into()));
        }
        let star = HodgeStar::with_orientation(&metric, 1.0)?;
        let star_phi = star.star(&phi)?;
        Ok(G2Structure {
            algebra,
            phi,
            metric,
            star,
            star_phi,
            gram_det: det_b,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn phi(&self) -> &KForm {
        &self.phi
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn star(&self) -> &HodgeStar {
        &self.star
    }

    pub fn star_phi(&self) -> &KForm {
        &self.star_phi
    }

    /// `det B` for the normalized bilinear form `B`.
    pub fn gram_det(&self) -> f64 {
        self.gram_det
    }

    /// `±1`: the sign of `det B`, i.e. whether `φ` itself orients the
    /// basis positively.
    pub fn phi_orientation(&self) -> f64 {
        self.gram_det.signum()
    }

    /// `dV = sqrt(det g) e^{1...7}`.
    pub fn volume(&self) -> KForm {
        self.star.volume()
    }

    pub fn volume_density(&self) -> f64 {
        self.star.volume_density()
    }

    pub fn dphi(&self) -> Result<KForm> {
        self.algebra.ce_diff(&self.phi)
    }

    pub fn d_star_phi(&self) -> Result<KForm> {
        self.algebra.ce_diff(&self.star_phi)
    }

    /// `max |g(X,Y) dV_φ - ⅙ ι_Xφ∧ι_Yφ∧φ|` over basis pairs, with `dV_φ`
    /// the volume form oriented by `φ`.
    pub fn metric_identity_residual(&self) -> Result<f64> {
        let b = phi_bilinear(&self.phi)?;
        let dv = self.phi_orientation() * self.volume().as_scalar();
        Ok((self.metric.matrix() * dv - b).amax())
    }
}

/// Free-function form of [`G2Structure::new`].
pub fn metric_from_phi(algebra: &LieAlgebra, phi: &KForm) -> Result<G2Structure> {
    G2Structure::new(Arc::new(algebra.clone()), phi.clone())
}

fn coeff_matrix(columns: &[KForm]) -> DMatrix<f64> {
    let rows = columns.first().map_or(0, |c| c.coeffs().len());
    let mut m = DMatrix::zeros(rows, columns.len());
    for (j, c) in columns.iter().enumerate() {
        m.set_column(j, &DVector::from_column_slice(c.coeffs()));
    }
    m
}

fn basis_forms(dim: usize, degree: usize) -> Vec<KForm> {
    let len = crate::exterior::basis_len(dim, degree);
    (0..len)
        .map(|p| {
            let mut c = vec![0.0; len];
            c[p] = 1.0;
            KForm::from_coeffs(dim, degree, c).expect("basis length")
        })
        .collect()
}

fn kernel_forms(map: &DMatrix<f64>, degree: usize) -> Vec<KForm> {
    linalg::null_space(map, 1e-10)
        .column_iter()
        .map(|c| KForm::from_coeffs(7, degree, c.as_slice().to_vec()).expect("kernel length"))
        .collect()
}

/// Basis of `Λ²₁₄ = {α : α ∧ ⋆φ = 0}`.
pub fn lambda2_14(g2: &G2Structure) -> Result<Vec<KForm>> {
    let images: Vec<KForm> = basis_forms(7, 2)
        .iter()
        .map(|a| a.wedge(g2.star_phi()))
        .collect::<Result<_>>()?;
    Ok(kernel_forms(&coeff_matrix(&images), 2))
}

/// Basis of `Λ³₂₇ = {β : β ∧ φ = 0, β ∧ ⋆φ = 0}`.
pub fn lambda3_27(g2: &G2Structure) -> Result<Vec<KForm>> {
    let basis = basis_forms(7, 3);
    let mut map = DMatrix::zeros(8, basis.len());
    for (j, b) in basis.iter().enumerate() {
        let w = b.wedge(g2.phi())?;
        for (r, c) in w.coeffs().iter().enumerate() {
            map[(r, j)] = *c;
        }
        map[(7, j)] = b.wedge(g2.star_phi())?.as_scalar();
    }
    Ok(kernel_forms(&map, 3))
}

/// The intrinsic torsion forms `(τ0, τ1, τ2, τ3)` of a G2-structure.
#[derive(Clone, Debug, Serialize)]
pub struct TorsionForms {
    pub tau0: f64,
    pub tau1: KForm,
    pub tau2: KForm,
    pub tau3: KForm,
    /// Largest coefficient error when rebuilding `dφ` and `d⋆φ`.
    pub residual: f64,
    /// `|τ1|` difference between the `dφ` and `d⋆φ` determinations.
    pub tau1_mismatch: f64,
    /// Pointwise norms `|τ0|, |τ1|, |τ2|, |τ3|` in the induced metric.
    pub norms: [f64; 4],
}

/// Solves `dφ = τ0 ⋆φ + 3τ1∧φ + ⋆τ3` and `d⋆φ = 4τ1∧⋆φ + τ2∧φ` with
/// `τ2 ∈ Λ²₁₄`, `τ3 ∈ Λ³₂₇`.
pub fn torsion_forms(g2: &G2Structure) -> Result<TorsionForms> {
    let phi = g2.phi();
    let star_phi = g2.star_phi();
    let star = g2.star();
    let l2 = lambda2_14(g2)?;
    let l3 = lambda3_27(g2)?;
    if l2.len() != 14 || l3.len() != 27 {
        return Err(Error::Torsion(format!(
            "irreducible subspaces have dimensions {} and {} (expected 14 and 27)",
            l2.len(),
            l3.len()
        )));
    }
    let dphi = g2.dphi()?;
    let dstar = g2.d_star_phi()?;
    let ones: Vec<KForm> = (1..=7)
        .map(|i| KForm::basis(7, &[i]))
        .collect::<Result<_>>()?;

    let mut cols1 = vec![star_phi.clone()];
    for e in &ones {
        cols1.push(e.wedge(phi)?.scale(3.0));
    }
    for b in &l3 {
        cols1.push(star.star(b)?);
    }
    let a1 = coeff_matrix(&cols1);
    let mut cols2 = Vec::new();
    for e in &ones {
        cols2.push(e.wedge(star_phi)?.scale(4.0));
    }
    for a in &l2 {
        cols2.push(a.wedge(phi)?);
    }
    let a2 = coeff_matrix(&cols2);
    let b1 = DVector::from_column_slice(dphi.coeffs());
    let b2 = DVector::from_column_slice(dstar.coeffs());

    let x1 = linalg::lstsq(&a1, &b1, 1e-12);
    let x2 = linalg::lstsq(&a2, &b2, 1e-12);
    let tau1_first = DVector::from_iterator(7, x1.rows(1, 7).iter().copied());
    let tau1_second = DVector::from_iterator(7, x2.rows(0, 7).iter().copied());
    let tau1_mismatch = (&tau1_first - &tau1_second).norm();
    let tau1_scale = 1.0 + tau1_first.norm().max(tau1_second.norm());
    if tau1_mismatch > TAU1_CONSISTENCY_TOL * tau1_scale {
        return Err(Error::Torsion(format!(
            "the two equations give different tau1 (difference {tau1_mismatch:.3e})"
        )));
    }

    // joint solve with a shared τ1: unknowns [τ0, τ1, τ3 coords, τ2 coords]
    let (r1, r2) = (a1.nrows(), a2.nrows());
    let mut joint = DMatrix::zeros(r1 + r2, 1 + 7 + 27 + 14);
    joint.view_mut((0, 0), (r1, 35)).copy_from(&a1);
    joint
        .view_mut((r1, 1), (r2, 7))
        .copy_from(&a2.columns(0, 7));
    joint
        .view_mut((r1, 35), (r2, 14))
        .copy_from(&a2.columns(7, 14));
    let mut rhs = DVector::zeros(r1 + r2);
    rhs.rows_mut(0, r1).copy_from(&b1);
    rhs.rows_mut(r1, r2).copy_from(&b2);
    let x = linalg::lstsq(&joint, &rhs, 1e-12);
    let residual = (&joint * &x - &rhs).amax();

    let tau0 = x[0];
    let tau1 = KForm::one_form(x.rows(1, 7).as_slice())?;
    let mut tau3 = KForm::zero(7, 3);
    for (k, b) in l3.iter().enumerate() {
        tau3 = tau3.add_scaled(x[8 + k], b)?;
    }
    let mut tau2 = KForm::zero(7, 2);
    for (k, a) in l2.iter().enumerate() {
        tau2 = tau2.add_scaled(x[35 + k], a)?;
    }
    let norms = [
        tau0.abs(),
        star.norm(&tau1)?,
        star.norm(&tau2)?,
        star.norm(&tau3)?,
    ];
    Ok(TorsionForms {
        tau0,
        tau1,
        tau2,
        tau3,
        residual,
        tau1_mismatch,
        norms,
    })
}

/// The Lee form `θ = -¼ ⋆(⋆dφ ∧ φ)`, equal to `3τ1`.
pub fn lee_form(g2: &G2Structure) -> Result<KForm> {
    let star = g2.star();
    let inner = star.star(&g2.dphi()?)?.wedge(g2.phi())?;
    Ok(star.star(&inner)?.scale(-0.25))
}

/// Torsion classes named by the vanishing torsion forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum G2Label {
    TorsionFree,
    NearlyParallel,
    Calibrated,
    LocallyConformalParallel,
    Cocalibrated,
    LocallyConformalCalibrated,
    Generic,
}

impl G2Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            G2Label::TorsionFree => "torsion-free",
            G2Label::NearlyParallel => "nearly parallel",
            G2Label::Calibrated => "closed, calibrated",
            G2Label::LocallyConformalParallel => "locally conformal parallel",
            G2Label::Cocalibrated => "coclosed, cocalibrated",
            G2Label::LocallyConformalCalibrated => "locally conformal calibrated",
            G2Label::Generic => "generic",
        }
    }
}

impl fmt::Display for G2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct G2Class {
    /// Vanishing of `τ0, τ1, τ2, τ3`.
    pub vanishing: [bool; 4],
    /// The most specific class.
    pub label: G2Label,
    /// Every class whose defining conditions hold, most specific first.
    pub labels: Vec<G2Label>,
}

impl G2Class {
    pub fn is_calibrated(&self) -> bool {
        self.labels.contains(&G2Label::Calibrated)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.label == G2Label::TorsionFree
    }
}

pub fn classify(t: &TorsionForms, tol: f64) -> G2Class {
    let z = t.norms.map(|n| n <= tol);
    let [z0, z1, z2, z3] = z;
    let candidates = [
        (G2Label::TorsionFree, z0 && z1 && z2 && z3),
        (G2Label::NearlyParallel, z1 && z2 && z3),
        (G2Label::Calibrated, z0 && z1 && z3),
        (G2Label::LocallyConformalParallel, z0 && z2 && z3),
        (G2Label::Cocalibrated, z1 && z2),
        (G2Label::LocallyConformalCalibrated, z0 && z3),
    ];
    let mut labels: Vec<G2Label> = candidates
        .iter()
        .filter(|(_, holds)| *holds)
        .map(|(l, _)| *l)
        .collect();
    if labels.is_empty() {
        labels.push(G2Label::Generic);
    }
    G2Class {
        vanishing: z,
        label: labels[0],
        labels,
    }
}
