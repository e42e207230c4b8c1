//! SU(3)-structures `(ω, ψ)` on six-dimensional Lie algebras.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{HodgeStar, KForm, Metric};
use crate::g2::G2Structure;
use crate::liealg::LieAlgebra;

/// Relative tolerance for the algebraic compatibility conditions.
pub const SU3_TOL: f64 = 1e-8;

/// Hitchin's endomorphism `K_ψ`: `ι_{K(v)} e^{1...6} = ι_vψ ∧ ψ`.
pub fn hitchin_k(psi: &KForm) -> Result<DMatrix<f64>> {
    if psi.dim() != 6 || psi.degree() != 3 {
        return Err(Error::InvalidSu3(format!(
            "psi must be a 3-form in dimension 6, got degree {} in dimension {}",
            psi.degree(),
            psi.dim()
        )));
    }
    let mut k = DMatrix::zeros(6, 6);
    for j in 0..6 {
        let five = psi.interior_basis(j + 1)?.wedge(psi)?;
        for i in 0..6 {
            let rest: Vec<usize> = (1..=6).filter(|&l| l != i + 1).collect();
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            k[(i, j)] = sign * five.coeff(&rest);
        }
    }
    Ok(k)
}

/// `J = K_ψ / sqrt(-λ)` with `λ = ⅙ tr K²`; the overall sign is not fixed here.
pub fn hitchin_j(psi: &KForm) -> Result<(DMatrix<f64>, f64)> {
    let k = hitchin_k(psi)?;
    let lambda = (&k * &k).trace() / 6.0;
    let scale = psi.max_abs().powi(4).max(f64::MIN_POSITIVE);
    if lambda >= -1e-12 * scale {
        return Err(Error::UnstablePsi(lambda));
    }
    let j = k / (-lambda).sqrt();
    let sq_err = (&j * &j + DMatrix::identity(6, 6)).amax();
    if sq_err > 1e-8 {
        return Err(Error::InvalidSu3(format!(
            "J^2 differs from -I by {sq_err:.3e}"
        )));
    }
    Ok((j, lambda))
}

/// `g(X, Y) = ω(X, JY)` as a matrix.
fn omega_metric(omega: &KForm, j: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut g = DMatrix::zeros(6, 6);
    for a in 0..6 {
        let ia = omega.interior_basis(a + 1)?;
        for b in 0..6 {
            let jb: Vec<f64> = j.column(b).iter().copied().collect();
            g[(a, b)] = ia.interior(&jb)?.as_scalar();
        }
    }
    Ok(g)
}

/// `ψ̂(X, Y, Z) = −ψ(JX, Y, Z)`.
pub fn psi_hat_from(psi: &KForm, j: &DMatrix<f64>) -> Result<KForm> {
    let mut out = KForm::zero(6, 3);
    let basis: Vec<Vec<f64>> = (0..6)
        .map(|i| (0..6).map(|r| if r == i { 1.0 } else { 0.0 }).collect())
        .collect();
    let idx: Vec<_> = KForm::basis_indices(6, 3).collect();
    for (pos, m) in idx.iter().enumerate() {
        let l = m.labels();
        let jx: Vec<f64> = j.column(l[0] - 1).iter().copied().collect();
        out.coeffs_mut()[pos] = -psi.eval(&[&jx, &basis[l[1] - 1], &basis[l[2] - 1]])?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Su3Structure {
    algebra: Arc<LieAlgebra>,
    omega: KForm,
    psi: KForm,
    j: DMatrix<f64>,
    lambda: f64,
    psi_hat: KForm,
    metric: Metric,
    star: HodgeStar,
}

impl Su3Structure {
    pub fn new(algebra: Arc<LieAlgebra>, omega: KForm, psi: KForm) -> Result<Self> {
        if algebra.dim() != 6 {
            return Err(Error::InvalidSu3(format!(
                "SU(3)-structures live in dimension 6, got {}",
                algebra.dim()
            )));
        }
        if omega.dim() != 6 || omega.degree() != 2 {
            return Err(Error::InvalidSu3(
                "omega must be a 2-form in dimension 6".into(),
            ));
        }
        let omega3 = omega.wedge(&omega)?.wedge(&omega)?.as_scalar();
        let scale_w = omega.max_abs().powi(3).max(f64::MIN_POSITIVE);
        if omega3.abs() <= 1e-12 * scale_w {
            return Err(Error::InvalidSu3(
                "omega is degenerate (omega^3 = 0)".into(),
            ));
        }
        let (k_j, lambda) = hitchin_j(&psi)?;
        let compat = omega.wedge(&psi)?.max_abs();
        let scale = omega.max_abs() * psi.max_abs();
        if compat > SU3_TOL * scale.max(1.0) {
            return Err(Error::InvalidSu3(format!(
                "omega and psi are not compatible (|omega^psi| = {compat:.3e})"
            )));
        }
        let mut found = None;
        for sign in [1.0, -1.0] {
            let j = &k_j * sign;
            let g = omega_metric(&omega, &j)?;
            let asym = (&g - g.transpose()).amax();
            if asym > SU3_TOL * omega.max_abs().max(1.0) {
                return Err(Error::InvalidSu3(format!(
                    "omega is not J-invariant (asymmetry {asym:.3e})"
                )));
            }
            let metric = Metric::new((&g + g.transpose()) * 0.5)?;
            if metric.is_positive_definite() {
                found = Some((j, metric));
                break;
            }
        }
        let (j, metric) = found.ok_or_else(|| {
            Error::InvalidSu3("omega(., J.) is indefinite for both signs of J".into())
        })?;
        let psi_hat = psi_hat_from(&psi, &j)?;
        let lhs = psi.wedge(&psi_hat)?.as_scalar();
        let rhs = 2.0 / 3.0 * omega3;
        if (lhs - rhs).abs() > SU3_TOL * rhs.abs() {
            return Err(Error::InvalidSu3(format!(
                "normalization fails: psi^psi_hat = {lhs} but 2/3 omega^3 = {rhs}"
            )));
        }
        let star = HodgeStar::with_orientation(&metric, 1.0)?;
        Ok(Su3Structure {
            algebra,
            omega,
            psi,
            j,
            lambda,
            psi_hat,
            metric,
            star,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn omega(&self) -> &KForm {
        &self.omega
    }

    pub fn psi(&self) -> &KForm {
        &self.psi
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// Hitchin's invariant `λ(ψ) < 0`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn psi_hat(&self) -> &KForm {
        &self.psi_hat
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// `ψ ∧ ψ̂ − ⅔ ω³`, as a multiple of `e^{1...6}`.
    pub fn normalization_defect(&self) -> Result<f64> {
        let w3 = self.omega.wedge(&self.omega)?.wedge(&self.omega)?;
        Ok(self.psi.wedge(&self.psi_hat)?.as_scalar() - 2.0 / 3.0 * w3.as_scalar())
    }

    fn norm(&self, a: &KForm) -> Result<f64> {
        self.star.norm(a)
    }
}

/// Intrinsic-torsion flags of an SU(3)-structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Su3Class {
    pub half_flat: bool,
    pub coupled: bool,
    /// Least-squares `c` in `dω = cψ`.
    pub coupled_constant: f64,
    /// `|dω − cψ|`.
    pub coupled_residual: f64,
    pub symplectic_half_flat: bool,
    pub nearly_kahler: bool,
    /// `|d(ω∧ω)|`, `|dψ|` and `|dψ̂ + ⅔c ω∧ω|`.
    pub d_omega2: f64,
    pub d_psi: f64,
    pub nearly_kahler_residual: f64,
}

pub fn su3_classify(s: &Su3Structure, tol: f64) -> Result<Su3Class> {
    let alg = s.algebra();
    let omega2 = s.omega.wedge(&s.omega)?;
    let d_omega = alg.ce_diff(&s.omega)?;
    let d_omega2 = s.norm(&alg.ce_diff(&omega2)?)?;
    let d_psi = s.norm(&alg.ce_diff(&s.psi)?)?;
    let psi_sq = s.star.inner(&s.psi, &s.psi)?;
    let c = s.star.inner(&d_omega, &s.psi)? / psi_sq;
    let coupled_residual = s.norm(&d_omega.add_scaled(-c, &s.psi)?)?;
    let nearly_kahler_residual = s.norm(
        &alg.ce_diff(&s.psi_hat)?
            .add_scaled(2.0 / 3.0 * c, &omega2)?,
    )?;
    let half_flat = d_omega2 < tol && d_psi < tol;
    let in_span = coupled_residual < tol;
    let coupled = in_span && c.abs() > tol;
    let symplectic_half_flat = in_span && !coupled && d_psi < tol;
    Ok(Su3Class {
        half_flat,
        coupled,
        coupled_constant: c,
        coupled_residual,
        symplectic_half_flat,
        nearly_kahler: coupled && nearly_kahler_residual < tol,
        d_omega2,
        d_psi,
        nearly_kahler_residual,
    })
}

/// `φ = ω ∧ e^7 + ψ` on the algebra `L ⊕ R` with `de^7 = 0`.
pub fn g2_product(s: &Su3Structure) -> Result<G2Structure> {
    let mut diffs: Vec<KForm> = s
        .algebra()
        .differentials()
        .iter()
        .map(|d| d.embed(7))
        .collect::<Result<_>>()?;
    diffs.push(KForm::zero(7, 2));
    g2_product_on(s, Arc::new(LieAlgebra::new(diffs)?))
}

/// `φ = ω ∧ e^7 + ψ` on a supplied seven-dimensional extension.
pub fn g2_product_on(s: &Su3Structure, extension: Arc<LieAlgebra>) -> Result<G2Structure> {
    if extension.dim() != 7 {
        return Err(Error::DimensionMismatch {
            left: extension.dim(),
            right: 7,
        });
    }
    let e7 = KForm::basis(7, &[7])?;
    let phi = s
        .omega
        .embed(7)?
        .wedge(&e7)?
        .add_scaled(1.0, &s.psi.embed(7)?)?;
    let g2 = G2Structure::new(extension, phi)?;
    let expected = s.metric.direct_sum(&Metric::identity(1))?;
    let diff = (g2.metric().matrix() - expected.matrix()).amax();
    if diff > 1e-8 * expected.matrix().amax() {
        return Err(Error::InvalidSu3(format!(
            "product metric differs from g + (e7)^2 by {diff:.3e}"
        )));
    }
    Ok(g2)
}
