//! Exterior algebra over a fixed basis `e^1, ..., e^n` of a dual vector space.
//!
//! Forms are stored densely: a degree-`k` form on an `n`-dimensional space keeps
//! one coefficient per strictly increasing multi-index, in lexicographic order.
//! Multi-indices are packed into bitmasks internally, which makes wedge signs a
//! matter of counting bits.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// Largest supported dimension of the underlying vector space.
pub const MAX_DIM: usize = 10;

/// Coefficients below this magnitude are dropped when a form is canonicalized.
pub const PRUNE_TOL: f64 = 1e-13;

type Mask = u16;

struct BasisTables {
    /// `by_degree[k]` lists the degree-`k` masks in lexicographic tuple order.
    by_degree: Vec<Vec<Mask>>,
    /// Position of every mask inside its own degree.
    position: Vec<u32>,
}

fn tables(n: usize) -> &'static BasisTables {
    static TABLES: OnceLock<Vec<BasisTables>> = OnceLock::new();
    let all = TABLES.get_or_init(|| {
        (0..=MAX_DIM)
            .map(|n| {
                let mut position = vec![0u32; 1 << n];
                let by_degree = (0..=n)
                    .map(|k| {
                        let masks: Vec<Mask> = (0..n)
                            .combinations(k)
                            .map(|c| c.iter().fold(0, |m, &i| m | (1 << i)))
                            .collect();
                        for (p, &m) in masks.iter().enumerate() {
                            position[m as usize] = p as u32;
                        }
                        masks
                    })
                    .collect();
                BasisTables {
                    by_degree,
                    position,
                }
            })
            .collect()
    });
    &all[n]
}

fn masks(n: usize, k: usize) -> &'static [Mask] {
    let t = tables(n);
    if k > n {
        &[]
    } else {
        &t.by_degree[k]
    }
}

#[inline]
fn position(n: usize, mask: Mask) -> usize {
    tables(n).position[mask as usize] as usize
}

/// Number of basis `k`-forms in dimension `n`.
pub fn basis_len(n: usize, k: usize) -> usize {
    masks(n, k).len()
}

/// Sign of `e^a ∧ e^b` relative to `e^{a ∪ b}`; zero when the index sets overlap.
#[inline]
fn wedge_sign(a: Mask, b: Mask) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    // count pairs (i in a, j in b) with i > j
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A strictly increasing tuple of basis labels `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Mask);

impl MultiIndex {
    /// Sorts `labels` (1-based), returning the permutation sign and the index.
    /// Repeated labels or labels outside `1..=dim` are rejected.
    pub fn from_labels(dim: usize, labels: &[usize]) -> Result<(f64, Self)> {
        check_dim(dim)?;
        let mut mask: Mask = 0;
        let mut inversions = 0usize;
        for (p, &l) in labels.iter().enumerate() {
            if l == 0 || l > dim {
                return Err(Error::IndexOutOfRange { index: l, dim });
            }
            let bit = 1 << (l - 1);
            if mask & bit != 0 {
                return Err(Error::RepeatedIndex(l));
            }
            mask |= bit;
            inversions += labels[..p].iter().filter(|&&m| m > l).count();
        }
        let sign = if inversions.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        Ok((sign, MultiIndex(mask)))
    }

    /// The 1-based labels in increasing order.
    pub fn labels(&self) -> Vec<usize> {
        (0..16)
            .filter(|i| self.0 & (1 << i) != 0)
            .map(|i| i + 1)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels();
        if labels.iter().all(|&l| l < 10) {
            write!(f, "e")?;
            for l in labels {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            write!(f, "e{{{}}}", labels.iter().join(","))
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

/// A homogeneous form of fixed degree with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct KForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl KForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim > 0 && dim <= MAX_DIM, "unsupported dimension {dim}");
        KForm {
            dim,
            degree,
            coeffs: vec![0.0; basis_len(dim, degree)],
        }
    }

    /// The constant 0-form `c`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim, 0);
        f.coeffs[0] = c;
        f
    }

    /// Builds a form from its coefficients in lexicographic multi-index order.
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let expected = basis_len(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::CoefficientCount {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(KForm {
            dim,
            degree,
            coeffs,
        })
    }

    /// The signed monomial `e^{l_1} ∧ ... ∧ e^{l_k}` for 1-based labels.
    pub fn basis(dim: usize, labels: &[usize]) -> Result<Self> {
        Self::from_terms(dim, labels.len(), [(1.0, labels)])
    }

    /// Sums `c · e^{labels}` over the given terms. Labels need not be sorted.
    pub fn from_terms<'a, I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, &'a [usize])>,
    {
        check_dim(dim)?;
        let mut f = Self::zero(dim, degree);
        for (c, labels) in terms {
            if labels.len() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: labels.len(),
                });
            }
            let (sign, idx) = MultiIndex::from_labels(dim, labels)?;
            f.coeffs[position(dim, idx.0)] += sign * c;
        }
        Ok(f)
    }

    /// The 1-form with the given components.
    pub fn one_form(coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(coeffs.len(), 1, coeffs.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Multi-indices of this degree, in storage order.
    pub fn basis_indices(dim: usize, degree: usize) -> impl Iterator<Item = MultiIndex> {
        masks(dim, degree).iter().map(|&m| MultiIndex(m))
    }

    /// Coefficient of `e^{labels}`, accounting for the ordering sign.
    pub fn coeff(&self, labels: &[usize]) -> f64 {
        match MultiIndex::from_labels(self.dim, labels) {
            Ok((sign, idx)) if idx.len() == self.degree => {
                sign * self.coeffs[position(self.dim, idx.0)]
            }
            _ => 0.0,
        }
    }

    pub fn coeff_at(&self, idx: MultiIndex) -> f64 {
        if idx.len() != self.degree {
            return 0.0;
        }
        self.coeffs[position(self.dim, idx.0)]
    }

    /// Nonzero terms after pruning, in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        masks(self.dim, self.degree)
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| c.abs() >= PRUNE_TOL)
            .map(|(&m, &c)| (MultiIndex(m), c))
    }

    /// Drops coefficients smaller than [`PRUNE_TOL`].
    pub fn canonicalize(mut self) -> Self {
        for c in &mut self.coeffs {
            if c.abs() < PRUNE_TOL {
                *c = 0.0;
            }
        }
        self
    }

    /// Value of the scalar component of a 0-form (or top form coefficient for degree n).
    pub fn as_scalar(&self) -> f64 {
        match self.coeffs.as_slice() {
            [c] => *c,
            _ => 0.0,
        }
    }

    /// Euclidean norm of the coefficient vector (metric independent).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Coefficient-wise comparison; forms of different shape are never equal.
    pub fn approx_eq(&self, other: &KForm, tol: f64) -> bool {
        self.dim == other.dim
            && self.degree == other.degree
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn scale(&self, s: f64) -> KForm {
        KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn check_same_shape(&self, other: &KForm) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &KForm) -> Result<KForm> {
        self.check_same_shape(other)?;
        Ok(KForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    /// Exterior product.
    pub fn wedge(&self, other: &KForm) -> Result<KForm> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = KForm::zero(n, self.degree + other.degree);
        if out.coeffs.is_empty() {
            return Ok(out);
        }
        let ma = masks(n, self.degree);
        let mb = masks(n, other.degree);
        for (&a, &ca) in ma.iter().zip(&self.coeffs) {
            if ca == 0.0 {
                continue;
            }
            for (&b, &cb) in mb.iter().zip(&other.coeffs) {
                if cb == 0.0 || a & b != 0 {
                    continue;
                }
                out.coeffs[position(n, a | b)] += wedge_sign(a, b) * ca * cb;
            }
        }
        Ok(out)
    }

    /// Interior product `ι_v` with the vector whose components are `v`.
    pub fn interior(&self, v: &[f64]) -> Result<KForm> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: v.len(),
                right: self.dim,
            });
        }
        if self.degree == 0 {
            return Err(Error::InteriorOfScalar);
        }
        let n = self.dim;
        let mut out = KForm::zero(n, self.degree - 1);
        for (&m, &c) in masks(n, self.degree).iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let mut rest = m;
            let mut slot = 0;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                if v[i] != 0.0 {
                    let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                    out.coeffs[position(n, m & !(1 << i))] += sign * v[i] * c;
                }
                rest &= rest - 1;
                slot += 1;
            }
        }
        Ok(out)
    }

    /// Interior product with the basis vector `e_label` (1-based).
    pub fn interior_basis(&self, label: usize) -> Result<KForm> {
        if label == 0 || label > self.dim {
            return Err(Error::IndexOutOfRange {
                index: label,
                dim: self.dim,
            });
        }
        let mut v = vec![0.0; self.dim];
        v[label - 1] = 1.0;
        self.interior(&v)
    }

    /// Evaluates the form on `degree` vectors.
    pub fn eval(&self, vectors: &[&[f64]]) -> Result<f64> {
        if vectors.len() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: vectors.len(),
            });
        }
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v)?;
        }
        // (ι_{v_1} α)(v_2, ..., v_k) = α(v_1, ..., v_k)
        Ok(f.as_scalar())
    }

    /// The same multi-indices viewed in a larger space (new basis covectors appended).
    pub fn embed(&self, new_dim: usize) -> Result<KForm> {
        check_dim(new_dim)?;
        if new_dim < self.dim {
            return Err(Error::DimensionMismatch {
                left: new_dim,
                right: self.dim,
            });
        }
        let mut out = KForm::zero(new_dim, self.degree);
        for (&m, &c) in masks(self.dim, self.degree).iter().zip(&self.coeffs) {
            out.coeffs[position(new_dim, m)] = c;
        }
        Ok(out)
    }

    /// Pull-back along the linear map sending `e^i` to `Σ_j a[(i, j)] e^j`.
    pub fn pullback(&self, a: &DMatrix<f64>) -> Result<KForm> {
        let n = self.dim;
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: a.nrows(),
                right: n,
            });
        }
        let images: Vec<KForm> = (0..n)
            .map(|i| KForm::one_form(&a.row(i).iter().copied().collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let mut out = KForm::zero(n, self.degree);
        for (&m, &c) in masks(n, self.degree).iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let mut term = KForm::scalar(n, c);
            for i in (0..n).filter(|i| m & (1 << i) != 0) {
                term = term.wedge(&images[i])?;
            }
            out = out.add_scaled(1.0, &term)?;
        }
        Ok(out)
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if (mag - 1.0).abs() > 0.0 {
                write!(f, "{mag} ")?;
            }
            if idx.is_empty() {
                write!(f, "1")?;
            } else {
                write!(f, "{idx}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for KForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a>(&'a KForm);
        impl Serialize for Terms<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let terms: Vec<_> = self.0.terms().collect();
                let mut map = serializer.serialize_map(Some(terms.len()))?;
                for (idx, c) in terms {
                    let key = if idx.is_empty() {
                        "1".to_string()
                    } else {
                        idx.to_string()
                    };
                    map.serialize_entry(&key, &c)?;
                }
                map.end()
            }
        }
        let mut s = serializer.serialize_struct("KForm", 3)?;
        s.serialize_field("dim", &self.dim)?;
        s.serialize_field("degree", &self.degree)?;
        s.serialize_field("terms", &Terms(self))?;
        s.end()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $sign:expr) => {
        impl $trait<&KForm> for &KForm {
            type Output = KForm;
            /// Panics when the shapes differ; use [`KForm::add_scaled`] for a checked version.
            fn $method(self, rhs: &KForm) -> KForm {
                self.add_scaled($sign, rhs).expect("form shape mismatch")
            }
        }
        impl $trait<KForm> for KForm {
            type Output = KForm;
            fn $method(self, rhs: KForm) -> KForm {
                (&self).$method(&rhs)
            }
        }
    };
}
binop!(Add, add, 1.0);
binop!(Sub, sub, -1.0);

impl AddAssign<&KForm> for KForm {
    fn add_assign(&mut self, rhs: &KForm) {
        assert!(
            self.dim == rhs.dim && self.degree == rhs.degree,
            "form shape mismatch"
        );
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Mul<&KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: &KForm) -> KForm {
        rhs.scale(self)
    }
}

impl Mul<KForm> for f64 {
    type Output = KForm;
    fn mul(self, rhs: KForm) -> KForm {
        rhs.scale(self)
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(-1.0)
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(-1.0)
    }
}

/// Free-function form of [`KForm::wedge`].
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    a.wedge(b)
}

/// Free-function form of [`KForm::interior`].
pub fn interior(v: &[f64], a: &KForm) -> Result<KForm> {
    a.interior(v)
}

/// The top-degree form `e^{1...n}`.
pub fn unit_volume(dim: usize) -> KForm {
    let mut f = KForm::zero(dim, dim);
    f.coeffs[0] = 1.0;
    f
}

/// A symmetric bilinear form on the vector space, in the basis `e_1, ..., e_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    g: DMatrix<f64>,
    positive_definite: bool,
}

impl Metric {
    /// Symmetrizes `g` (which must be square and symmetric up to roundoff).
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: g.ncols(),
            });
        }
        check_dim(n)?;
        let scale = g.amax().max(1.0);
        if (&g - g.transpose()).amax() > 1e-9 * scale {
            return Err(Error::NotSymmetric);
        }
        let g = (&g + g.transpose()) * 0.5;
        let positive_definite = linalg::leading_minors_positive(&g, 1e-12 * scale);
        Ok(Metric {
            g,
            positive_definite,
        })
    }

    pub fn identity(n: usize) -> Self {
        Metric {
            g: DMatrix::identity(n, n),
            positive_definite: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positive_definite
    }

    pub fn determinant(&self) -> f64 {
        self.g.determinant()
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.g.clone().try_inverse().ok_or(Error::SingularMetric)
    }

    /// `g(u, v)`.
    pub fn apply(&self, u: &[f64], v: &[f64]) -> f64 {
        let u = DVector::from_column_slice(u);
        let v = DVector::from_column_slice(v);
        u.dot(&(&self.g * v))
    }

    /// Orthogonal direct sum with `extra` on the appended basis vectors.
    pub fn direct_sum(&self, extra: &Metric) -> Result<Metric> {
        let (n, m) = (self.dim(), extra.dim());
        let mut g = DMatrix::zeros(n + m, n + m);
        g.view_mut((0, 0), (n, n)).copy_from(&self.g);
        g.view_mut((n, n), (m, m)).copy_from(&extra.g);
        Metric::new(g)
    }
}

/// Gram matrix of the metric induced on `k`-forms by the inverse metric `ginv`.
fn gram_matrix(ginv: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = ginv.nrows();
    let ms = masks(n, k);
    let len = ms.len();
    let mut out = DMatrix::zeros(len, len);
    let idx: Vec<Vec<usize>> = ms
        .iter()
        .map(|&m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let mut buf = [0.0f64; MAX_DIM * MAX_DIM];
    for a in 0..len {
        for b in a..len {
            for (r, &i) in idx[a].iter().enumerate() {
                for (c, &j) in idx[b].iter().enumerate() {
                    buf[r * k + c] = ginv[(i, j)];
                }
            }
            let d = linalg::small_det(&mut buf[..k * k], k);
            out[(a, b)] = d;
            out[(b, a)] = d;
        }
    }
    out
}

/// Hodge star and pointwise inner products of a metric with a chosen orientation,
/// precomputed for every degree.
#[derive(Clone, Debug)]
pub struct HodgeStar {
    dim: usize,
    orientation: f64,
    sqrt_det: f64,
    grams: Vec<DMatrix<f64>>,
    stars: Vec<DMatrix<f64>>,
}

impl HodgeStar {
    /// `orientation_volume` must be a nonzero top-degree form; only its sign matters.
    pub fn new(g: &Metric, orientation_volume: &KForm) -> Result<Self> {
        let n = g.dim();
        if orientation_volume.dim() != n || orientation_volume.degree() != n {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: orientation_volume.degree(),
            });
        }
        let o = orientation_volume.as_scalar();
        if o == 0.0 {
            return Err(Error::ZeroOrientation);
        }
        Self::with_orientation(g, o.signum())
    }

    /// `orientation` is `+1` for `e^{1...n}` and `-1` for the opposite orientation.
    pub fn with_orientation(g: &Metric, orientation: f64) -> Result<Self> {
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let n = g.dim();
        let ginv = g.inverse()?;
        let sqrt_det = g.determinant().sqrt();
        let full: Mask = ((1u32 << n) - 1) as Mask;
        let grams: Vec<DMatrix<f64>> = (0..=n).map(|k| gram_matrix(&ginv, k)).collect();
        let stars = (0..=n)
            .map(|k| {
                let src = masks(n, k);
                let mut s = DMatrix::zeros(basis_len(n, n - k), src.len());
                for (jpos, &j) in src.iter().enumerate() {
                    let jc = full & !j;
                    let eps = wedge_sign(j, jc);
                    let row = position(n, jc);
                    for ipos in 0..src.len() {
                        s[(row, ipos)] = orientation * eps * sqrt_det * grams[k][(jpos, ipos)];
                    }
                }
                s
            })
            .collect();
        Ok(HodgeStar {
            dim: n,
            orientation,
            sqrt_det,
            grams,
            stars,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Orientation sign relative to `e^{1...n}`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// The Riemannian volume form `± sqrt(det g) e^{1...n}`.
    pub fn volume(&self) -> KForm {
        unit_volume(self.dim).scale(self.orientation * self.sqrt_det)
    }

    pub fn volume_density(&self) -> f64 {
        self.sqrt_det
    }

    fn check(&self, a: &KForm) -> Result<()> {
        if a.dim != self.dim {
            return Err(Error::DimensionMismatch {
                left: a.dim,
                right: self.dim,
            });
        }
        if a.degree > self.dim {
            return Err(Error::DegreeMismatch {
                expected: self.dim,
                found: a.degree,
            });
        }
        Ok(())
    }

    pub fn star(&self, a: &KForm) -> Result<KForm> {
        self.check(a)?;
        let v = &self.stars[a.degree] * DVector::from_column_slice(&a.coeffs);
        Ok(KForm {
            dim: self.dim,
            degree: self.dim - a.degree,
            coeffs: v.as_slice().to_vec(),
        })
    }

    /// Inverse of [`HodgeStar::star`]: `⋆⋆ = (-1)^{k(n-k)}` on `k`-forms.
    pub fn star_inverse(&self, a: &KForm) -> Result<KForm> {
        let b = self.star(a)?;
        let k = self.dim - a.degree;
        Ok(if (k * (self.dim - k)).is_multiple_of(2) {
            b
        } else {
            -b
        })
    }

    pub fn inner(&self, a: &KForm, b: &KForm) -> Result<f64> {
        self.check(a)?;
        a.check_same_shape(b)?;
        let g = &self.grams[a.degree];
        let x = DVector::from_column_slice(&a.coeffs);
        let y = DVector::from_column_slice(&b.coeffs);
        Ok(x.dot(&(g * y)))
    }

    pub fn norm(&self, a: &KForm) -> Result<f64> {
        Ok(self.inner(a, a)?.max(0.0).sqrt())
    }

    /// Gram matrix of the induced inner product on `k`-forms.
    pub fn gram(&self, k: usize) -> &DMatrix<f64> {
        &self.grams[k]
    }
}

/// `⋆a` for the metric `g` and the orientation of `orientation_volume`.
pub fn hodge_star(g: &Metric, orientation_volume: &KForm, a: &KForm) -> Result<KForm> {
    HodgeStar::new(g, orientation_volume)?.star(a)
}

/// Pointwise inner product of two forms of equal degree.
pub fn form_inner(g: &Metric, a: &KForm, b: &KForm) -> Result<f64> {
    if g.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: g.dim(),
            right: a.dim(),
        });
    }
    a.check_same_shape(b)?;
    let ginv = g.inverse()?;
    let gram = gram_matrix(&ginv, a.degree);
    let x = DVector::from_column_slice(&a.coeffs);
    let y = DVector::from_column_slice(&b.coeffs);
    Ok(x.dot(&(gram * y)))
}
