//! Left-invariant curvature of metric Lie algebras.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{KForm, Metric};
use crate::g2::{classify, torsion_forms, G2Structure, CLASSIFY_TOL};
use crate::liealg::{LieAlgebra, DERIVATION_CUTOFF};
use crate::linalg;

/// Largest derivation residual accepted by [`rank_one_extension`].
pub const DERIVATION_TOL: f64 = 1e-10;

/// `|λ|` at or below this counts as a steady soliton.
pub const STEADY_TOL: f64 = 1e-9;

/// Levi-Civita connection of a left-invariant metric.
#[derive(Clone, Debug)]
pub struct ConnectionTable {
    /// `gamma[i]` is the matrix of `∇_{e_i}`; its column `j` is `∇_{e_i} e_j`.
    gamma: Vec<DMatrix<f64>>,
}

impl ConnectionTable {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Matrix of `∇_{e_i}` (0-based `i`).
    pub fn matrix(&self, i: usize) -> &DMatrix<f64> {
        &self.gamma[i]
    }

    /// `∇_{e_i} e_j` (0-based indices).
    pub fn nabla(&self, i: usize, j: usize) -> DVector<f64> {
        self.gamma[i].column(j).into_owned()
    }

    /// `∇_X Y` for arbitrary vectors.
    pub fn covariant(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        let n = self.dim();
        let yv = DVector::from_column_slice(y);
        let mut out = DVector::zeros(n);
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0.0 {
                out += &self.gamma[i] * &yv * *xi;
            }
        }
        out
    }
}

fn check_metric(alg: &LieAlgebra, g: &Metric) -> Result<()> {
    if g.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            left: g.dim(),
            right: alg.dim(),
        });
    }
    if !g.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// Koszul formula `2⟨∇_XY,Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`.
pub fn levi_civita(alg: &LieAlgebra, g: &Metric) -> Result<ConnectionTable> {
    check_metric(alg, g)?;
    let n = alg.dim();
    let gm = g.matrix();
    let ginv = g.inverse()?;
    // lowered[i][(j, k)] = <[e_i, e_j], e_k>
    let lowered: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let mut m = DMatrix::zeros(n, n);
            for j in 0..n {
                let b = gm * alg.bracket_basis(i, j);
                m.set_row(j, &b.transpose());
            }
            m
        })
        .collect();
    let gamma = (0..n)
        .map(|i| {
            let mut low = DMatrix::zeros(n, n);
            for j in 0..n {
                for k in 0..n {
                    low[(k, j)] =
                        0.5 * (lowered[i][(j, k)] - lowered[j][(k, i)] + lowered[k][(i, j)]);
                }
            }
            &ginv * low
        })
        .collect();
    Ok(ConnectionTable { gamma })
}

/// The curvature operators `R(e_i, e_j) = [∇_i, ∇_j] − ∇_{[e_i, e_j]}`.
#[derive(Clone, Debug)]
pub struct Riemann {
    n: usize,
    ops: Vec<DMatrix<f64>>,
}

impl Riemann {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Matrix of `R(e_i, e_j)` (0-based).
    pub fn operator(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.ops[i * self.n + j]
    }

    /// `R(e_i, e_j) e_k`.
    pub fn apply(&self, i: usize, j: usize, k: usize) -> DVector<f64> {
        self.operator(i, j).column(k).into_owned()
    }

    /// `R(X, Y) Z` for arbitrary vectors.
    pub fn apply_vectors(&self, x: &[f64], y: &[f64], z: &[f64]) -> DVector<f64> {
        let zv = DVector::from_column_slice(z);
        let mut out = DVector::zeros(self.n);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                let c = xi * yj;
                if c != 0.0 {
                    out += self.operator(i, j) * &zv * c;
                }
            }
        }
        out
    }

    /// `R_{ijkl} = g(R(e_i, e_j) e_k, e_l)`, flattened row-major.
    pub fn lowered(&self, g: &Metric) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                let low = g.matrix() * self.operator(i, j);
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] = low[(l, k)];
                    }
                }
            }
        }
        out
    }
}

pub fn riemann(alg: &LieAlgebra, g: &Metric) -> Result<Riemann> {
    let conn = levi_civita(alg, g)?;
    Ok(riemann_from(alg, &conn))
}

fn riemann_from(alg: &LieAlgebra, conn: &ConnectionTable) -> Riemann {
    let n = alg.dim();
    let mut ops = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (gi, gj) = (conn.matrix(i), conn.matrix(j));
            let mut r = gi * gj - gj * gi;
            for (k, c) in alg.bracket_basis(i, j).iter().enumerate() {
                if *c != 0.0 {
                    r -= conn.matrix(k) * *c;
                }
            }
            ops.push(r);
        }
    }
    Riemann { n, ops }
}

/// Ricci tensor `Ric(Y, Z) = tr(X ↦ R(X, Y)Z)` as a symmetric bilinear form.
pub fn ricci(alg: &LieAlgebra, g: &Metric) -> Result<DMatrix<f64>> {
    let r = riemann(alg, g)?;
    let n = alg.dim();
    let mut ric = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let op = r.operator(i, j);
            for k in 0..n {
                ric[(j, k)] += op[(i, k)];
            }
        }
    }
    Ok((&ric + ric.transpose()) * 0.5)
}

/// `g⁻¹ Ric`.
pub fn ricci_endomorphism(alg: &LieAlgebra, g: &Metric) -> Result<DMatrix<f64>> {
    Ok(g.inverse()? * ricci(alg, g)?)
}

pub fn scalar_curvature(alg: &LieAlgebra, g: &Metric) -> Result<f64> {
    Ok(ricci_endomorphism(alg, g)?.trace())
}

/// `Scal = 12δτ1 + 21/8 τ0² + 30|τ1|² − ½|τ2|² − ½|τ3|²`.
pub fn scal_from_torsion(g2: &G2Structure) -> Result<f64> {
    let t = torsion_forms(g2)?;
    let delta = g2.algebra().codifferential_with(g2.star(), &t.tau1)?;
    let [_, n1, n2, n3] = t.norms;
    Ok(
        12.0 * delta.as_scalar() + 21.0 / 8.0 * t.tau0 * t.tau0 + 30.0 * n1 * n1
            - 0.5 * n2 * n2
            - 0.5 * n3 * n3,
    )
}

/// The `*`-Ricci tensor of a G2-structure.
#[derive(Clone, Debug)]
pub struct StarRicci {
    /// `Ric*` as a bilinear form in the basis `e_1, ..., e_7`.
    pub matrix: DMatrix<f64>,
    /// The same tensor in the orthonormal frame `g^{-1/2} e_i`.
    pub frame_matrix: DMatrix<f64>,
    /// `Scal* = tr_g Ric*`.
    pub scal: f64,
    /// Operator norm of `Ric* − (Scal*/7) g`.
    pub einstein_residual: f64,
}

/// `Ric*_{sm} = R_{ijkl} φ_{ijs} φ_{klm}`, contracted in a `g`-orthonormal frame.
pub fn star_ricci(g2: &G2Structure) -> Result<StarRicci> {
    let n = 7;
    let g = g2.metric();
    let s = linalg::sym_sqrt(g.matrix());
    let p = s.clone().try_inverse().ok_or(Error::SingularMetric)?;
    // R and φ in the frame f_a = Σ_b p[(b, a)] e_b
    let low = riemann(g2.algebra(), g)?.lowered(g);
    let r = transform4(&low, &p, n);
    let phi_f = g2.phi().pullback(&p)?;
    let mut phi = vec![0.0; n * n * n];
    for (idx, c) in phi_f.terms() {
        let l = idx.labels();
        let (a, b, cc) = (l[0] - 1, l[1] - 1, l[2] - 1);
        for (x, y, z, sign) in [
            (a, b, cc, 1.0),
            (b, cc, a, 1.0),
            (cc, a, b, 1.0),
            (b, a, cc, -1.0),
            (a, cc, b, -1.0),
            (cc, b, a, -1.0),
        ] {
            phi[(x * n + y) * n + z] = sign * c;
        }
    }
    // t[(i, j), m] = Σ_kl R_ijkl φ_klm
    let mut t = vec![0.0; n * n * n];
    for ij in 0..n * n {
        for kl in 0..n * n {
            let rv = r[ij * n * n + kl];
            if rv == 0.0 {
                continue;
            }
            for m in 0..n {
                t[ij * n + m] += rv * phi[kl * n + m];
            }
        }
    }
    let mut frame = DMatrix::zeros(n, n);
    for sidx in 0..n {
        for m in 0..n {
            let mut acc = 0.0;
            for ij in 0..n * n {
                acc += phi[ij * n + sidx] * t[ij * n + m];
            }
            frame[(sidx, m)] = acc;
        }
    }
    let scal = frame.trace();
    let residual_matrix = &frame - DMatrix::identity(n, n) * (scal / 7.0);
    let einstein_residual = linalg::sym_spectral_norm(&residual_matrix);
    let matrix = &s * &frame * &s;
    Ok(StarRicci {
        matrix,
        frame_matrix: frame,
        scal,
        einstein_residual,
    })
}

/// `out_{abcd} = Σ t_{ijkl} p_{ia} p_{jb} p_{kc} p_{ld}`.
fn transform4(t: &[f64], p: &DMatrix<f64>, n: usize) -> Vec<f64> {
    let mut cur = t.to_vec();
    for axis in 0..4 {
        let stride = n.pow(3 - axis as u32);
        let mut next = vec![0.0; cur.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            let a = (flat / stride) % n;
            let base = flat - a * stride;
            *out = (0..n).map(|i| cur[base + i * stride] * p[(i, a)]).sum();
        }
        cur = next;
    }
    cur
}

/// Soliton type by the sign of `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    Expanding,
    Steady,
    Shrinking,
}

impl SolitonKind {
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda < -STEADY_TOL {
            SolitonKind::Expanding
        } else if lambda > STEADY_TOL {
            SolitonKind::Shrinking
        } else {
            SolitonKind::Steady
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SolitonKind::Expanding => "expanding",
            SolitonKind::Steady => "steady",
            SolitonKind::Shrinking => "shrinking",
        }
    }
}

/// Best fit of `Ric = λI + D` with `D` a derivation.
#[derive(Clone, Debug)]
pub struct SolitonCertificate {
    pub lambda: f64,
    pub derivation: DMatrix<f64>,
    /// Frobenius norm of `Ric − λI − D`.
    pub residual: f64,
    pub kind: SolitonKind,
}

pub fn soliton_solve(alg: &LieAlgebra, g: &Metric) -> Result<SolitonCertificate> {
    let ric = ricci_endomorphism(alg, g)?;
    let n = alg.dim();
    let ders = alg.derivation_space();
    let mut a = DMatrix::zeros(n * n, 1 + ders.len());
    a.set_column(
        0,
        &DVector::from_column_slice(DMatrix::<f64>::identity(n, n).as_slice()),
    );
    for (k, d) in ders.iter().enumerate() {
        a.set_column(k + 1, &DVector::from_column_slice(d.as_slice()));
    }
    let b = DVector::from_column_slice(ric.as_slice());
    let x = linalg::lstsq(&a, &b, DERIVATION_CUTOFF);
    let lambda = x[0];
    let mut derivation = DMatrix::zeros(n, n);
    for (k, d) in ders.iter().enumerate() {
        derivation += d * x[k + 1];
    }
    let residual = (&ric - DMatrix::identity(n, n) * lambda - &derivation).norm();
    Ok(SolitonCertificate {
        lambda,
        derivation,
        residual,
        kind: SolitonKind::from_lambda(lambda),
    })
}

/// Operator norm of `Ric − (Scal/n) g` measured in a `g`-orthonormal frame.
pub fn einstein_residual(alg: &LieAlgebra, g: &Metric) -> Result<f64> {
    let ric = ricci(alg, g)?;
    let n = alg.dim() as f64;
    let scal = (g.inverse()? * &ric).trace();
    let s_inv = linalg::sym_sqrt(g.matrix())
        .try_inverse()
        .ok_or(Error::SingularMetric)?;
    let traceless = ric - g.matrix() * (scal / n);
    Ok(linalg::sym_spectral_norm(&(&s_inv * traceless * &s_inv)))
}

/// `|dτ2 − 3/14 |τ2|² φ − ½ ⋆(τ2∧τ2)|` for a calibrated structure.
pub fn einstein_calibrated_residual(g2: &G2Structure) -> Result<f64> {
    let t = torsion_forms(g2)?;
    let class = classify(&t, CLASSIFY_TOL);
    if !class.is_calibrated() {
        let worst = t.norms[0].max(t.norms[1]).max(t.norms[3]);
        return Err(Error::NotCalibrated(worst));
    }
    let star = g2.star();
    let tau2_sq = t.norms[2] * t.norms[2];
    let d_tau2 = g2.algebra().ce_diff(&t.tau2)?;
    let quad = star.star(&t.tau2.wedge(&t.tau2)?)?;
    let diff = d_tau2
        .add_scaled(-3.0 / 14.0 * tau2_sq, g2.phi())?
        .add_scaled(-0.5, &quad)?;
    star.norm(&diff)
}

/// The algebra `L ⋊_D R`: `de^k` gains `Σ_i D_ki e^{i,n+1}` and `de^{n+1} = 0`.
pub fn rank_one_extension(alg: &LieAlgebra, d: &DMatrix<f64>) -> Result<LieAlgebra> {
    let n = alg.dim();
    if d.nrows() != n || d.ncols() != n {
        return Err(Error::DimensionMismatch {
            left: d.nrows(),
            right: n,
        });
    }
    let residual = alg.derivation_residual(d);
    if residual > DERIVATION_TOL {
        return Err(Error::NotADerivation(residual));
    }
    let m = n + 1;
    let mut diffs = Vec::with_capacity(m);
    for (k, de) in alg.differentials().iter().enumerate() {
        let mut out = de.embed(m)?;
        for i in 0..n {
            let c = d[(k, i)];
            if c != 0.0 {
                out = out.add_scaled(c, &KForm::basis(m, &[i + 1, m])?)?;
            }
        }
        diffs.push(out);
    }
    diffs.push(KForm::zero(m, 2));
    LieAlgebra::new(diffs)
}
