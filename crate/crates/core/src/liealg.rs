//! Lie algebras given by the differentials `d e^k` of a dual basis.
//!
//! Convention: `d e^k = Σ_{i<j} c^k_{ij} e^{ij}` corresponds to
//! `[e_i, e_j] = -Σ_k c^k_{ij} e_k`, i.e. `dα(X, Y) = -α([X, Y])`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::{basis_len, HodgeStar, KForm, Metric, MultiIndex};
use crate::linalg;

/// Singular-value cutoff separating derivations from noise.
pub const DERIVATION_CUTOFF: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LieAlgebra {
    dim: usize,
    differentials: Vec<KForm>,
    /// `structure[k][(i, j)] = c^k_{ij}`, antisymmetric in `i, j`.
    structure: Vec<DMatrix<f64>>,
    /// Matrix of `d: Λ^k → Λ^{k+1}` for `k = 0..=n`.
    d_matrices: Vec<DMatrix<f64>>,
    derivations: Vec<DMatrix<f64>>,
}

impl PartialEq for LieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.differentials == other.differentials
    }
}

impl LieAlgebra {
    /// `differentials[i]` is the 2-form `d e^{i+1}`.
    pub fn new(differentials: Vec<KForm>) -> Result<Self> {
        let dim = differentials.len();
        if dim == 0 || dim > crate::exterior::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        for de in &differentials {
            if de.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: de.dim(),
                    right: dim,
                });
            }
            if de.degree() != 2 {
                return Err(Error::DegreeMismatch {
                    expected: 2,
                    found: de.degree(),
                });
            }
        }
        let structure = differentials
            .iter()
            .map(|de| {
                let mut c = DMatrix::zeros(dim, dim);
                for (idx, v) in de.terms() {
                    let l = idx.labels();
                    c[(l[0] - 1, l[1] - 1)] = v;
                    c[(l[1] - 1, l[0] - 1)] = -v;
                }
                c
            })
            .collect();
        let d_matrices = (0..=dim)
            .map(|k| build_d_matrix(&differentials, dim, k))
            .collect::<Result<Vec<_>>>()?;
        let mut alg = LieAlgebra {
            dim,
            differentials,
            structure,
            d_matrices,
            derivations: Vec::new(),
        };
        alg.derivations = alg.compute_derivation_space();
        Ok(alg)
    }

    /// The abelian algebra of dimension `n`.
    pub fn abelian(n: usize) -> Result<Self> {
        if n == 0 || n > crate::exterior::MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        Self::new((0..n).map(|_| KForm::zero(n, 2)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn differentials(&self) -> &[KForm] {
        &self.differentials
    }

    /// `c^k_{ij}` with 0-based indices.
    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.structure[k][(i, j)]
    }

    /// `[x, y]` for vectors given in the basis `e_1, ..., e_n`.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        let xv = DVector::from_column_slice(x);
        let yv = DVector::from_column_slice(y);
        DVector::from_iterator(self.dim, self.structure.iter().map(|c| -xv.dot(&(c * &yv))))
    }

    /// `[e_i, e_j]` with 0-based indices.
    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.structure.iter().map(|c| -c[(i, j)]))
    }

    /// Matrix of `ad_{e_i}` with 0-based `i`.
    pub fn ad(&self, i: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            m.set_column(j, &self.bracket_basis(i, j));
        }
        m
    }

    /// Matrix of the differential on `k`-forms.
    pub fn d_matrix(&self, k: usize) -> &DMatrix<f64> {
        &self.d_matrices[k]
    }

    /// Chevalley–Eilenberg differential.
    pub fn ce_diff(&self, a: &KForm) -> Result<KForm> {
        if a.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: self.dim,
            });
        }
        if a.degree() >= self.dim {
            return Ok(KForm::zero(self.dim, a.degree() + 1));
        }
        let v = &self.d_matrices[a.degree()] * DVector::from_column_slice(a.coeffs());
        KForm::from_coeffs(self.dim, a.degree() + 1, v.as_slice().to_vec())
    }

    /// `max_i |d(d e^i)|`; zero exactly when the Jacobi identity holds.
    pub fn jacobi_residual(&self) -> f64 {
        self.differentials
            .iter()
            .map(|de| {
                self.ce_diff(de)
                    .map(|f| f.coeff_norm())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// `δ = (-1)^k ⋆^{-1} d ⋆` on `k`-forms; returns the zero 0-form for `k = 0`.
    pub fn codifferential_with(&self, star: &HodgeStar, a: &KForm) -> Result<KForm> {
        let k = a.degree();
        if k == 0 {
            return Ok(KForm::zero(self.dim, 0));
        }
        let inner = self.ce_diff(&star.star(a)?)?;
        let out = star.star_inverse(&inner)?;
        Ok(if k.is_multiple_of(2) { out } else { -out })
    }

    /// Codifferential for the metric `g` with orientation `e^{1...n}`.
    pub fn codifferential(&self, g: &Metric, a: &KForm) -> Result<KForm> {
        let star = HodgeStar::with_orientation(g, 1.0)?;
        self.codifferential_with(&star, a)
    }

    /// `max_{i<j} |D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]|`.
    pub fn derivation_residual(&self, d: &DMatrix<f64>) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let lhs = d * self.bracket_basis(i, j);
                let di = d.column(i).iter().copied().collect::<Vec<_>>();
                let dj = d.column(j).iter().copied().collect::<Vec<_>>();
                let mut ei = vec![0.0; n];
                ei[i] = 1.0;
                let mut ej = vec![0.0; n];
                ej[j] = 1.0;
                let rhs = self.bracket(&di, &ej) + self.bracket(&ei, &dj);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    /// Orthonormal basis (Frobenius inner product) of the derivation algebra.
    pub fn derivation_space(&self) -> &[DMatrix<f64>] {
        &self.derivations
    }

    fn compute_derivation_space(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim;
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        // unknown D[(r, s)] sits at column r + n*s (column-major)
        let mut m = DMatrix::zeros(pairs.len() * n, n * n);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            let bij = self.bracket_basis(i, j);
            for r in 0..n {
                let row = p * n + r;
                // D[e_i, e_j]_r = Σ_s D[r,s] bij[s]
                for s in 0..n {
                    m[(row, r + n * s)] += bij[s];
                }
                // [D e_i, e_j]_r = Σ_s D[s,i] [e_s, e_j]_r
                for s in 0..n {
                    m[(row, s + n * i)] -= -self.structure[r][(s, j)];
                    m[(row, s + n * j)] -= -self.structure[r][(i, s)];
                }
            }
        }
        let ns = linalg::null_space(&m, DERIVATION_CUTOFF);
        ns.column_iter()
            .map(|c| DMatrix::from_column_slice(n, n, c.as_slice()))
            .collect()
    }

    /// Dimensions of the lower central series `g ⊃ [g,g] ⊃ [g,[g,g]] ⊃ ...`
    /// until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let n = self.dim;
        let mut current = DMatrix::<f64>::identity(n, n);
        let mut dims = vec![n];
        let scale = self.structure.iter().map(|c| c.amax()).fold(1.0, f64::max);
        let tol = 1e-10 * scale;
        loop {
            let mut cols = Vec::new();
            for i in 0..n {
                let ad = self.ad(i);
                for c in current.column_iter() {
                    cols.push(&ad * c);
                }
            }
            let span = if cols.is_empty() {
                DMatrix::zeros(n, 0)
            } else {
                DMatrix::from_columns(&cols)
            };
            let basis = linalg::range_basis(&span, tol);
            let r = basis.ncols();
            if r == *dims.last().unwrap() {
                break;
            }
            dims.push(r);
            if r == 0 {
                break;
            }
            current = basis;
        }
        dims
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last() == Some(&0)
    }

    /// `true` when every `ad_x` is trace free.
    pub fn is_unimodular(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| self.ad(i).trace().abs() <= tol)
    }
}

fn build_d_matrix(differentials: &[KForm], n: usize, k: usize) -> Result<DMatrix<f64>> {
    let rows = basis_len(n, k + 1);
    let cols = basis_len(n, k);
    let mut m = DMatrix::zeros(rows, cols);
    if rows == 0 {
        return Ok(m);
    }
    let basis: Vec<MultiIndex> = KForm::basis_indices(n, k).collect();
    for (col, idx) in basis.iter().enumerate() {
        let labels = idx.labels();
        // d(e^{i1} ∧ ... ∧ e^{ik}) = Σ_m (-1)^m e^{i1..} ∧ d e^{im} ∧ ...
        let mut image = KForm::zero(n, k + 1);
        for slot in 0..k {
            let left = if slot == 0 {
                KForm::scalar(n, 1.0)
            } else {
                KForm::basis(n, &labels[..slot])?
            };
            let right = if slot + 1 == k {
                KForm::scalar(n, 1.0)
            } else {
                KForm::basis(n, &labels[slot + 1..])?
            };
            let term = left
                .wedge(&differentials[labels[slot] - 1])?
                .wedge(&right)?;
            let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
            image = image.add_scaled(sign, &term)?;
        }
        for (row, c) in image.coeffs().iter().enumerate() {
            m[(row, col)] = *c;
        }
    }
    Ok(m)
}
