//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Determinant of the `k×k` row-major matrix in `buf` (destroyed).
pub(crate) fn small_det(buf: &mut [f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => buf[0],
        2 => buf[0] * buf[3] - buf[1] * buf[2],
        _ => {
            let mut det = 1.0;
            for c in 0..k {
                let p = (c..k)
                    .max_by(|&a, &b| buf[a * k + c].abs().total_cmp(&buf[b * k + c].abs()))
                    .unwrap();
                let pivot = buf[p * k + c];
                if pivot == 0.0 {
                    return 0.0;
                }
                if p != c {
                    for j in 0..k {
                        buf.swap(p * k + j, c * k + j);
                    }
                    det = -det;
                }
                det *= pivot;
                for r in c + 1..k {
                    let f = buf[r * k + c] / pivot;
                    if f != 0.0 {
                        for j in c..k {
                            buf[r * k + j] -= f * buf[c * k + j];
                        }
                    }
                }
            }
            det
        }
    }
}

pub(crate) fn leading_minors_positive(g: &DMatrix<f64>, tol: f64) -> bool {
    (1..=g.nrows()).all(|m| g.view((0, 0), (m, m)).into_owned().determinant() > tol)
}

/// Householder QR with column pivoting by remaining column norm:
/// `A[:, perm] = Q R` with `Q` square orthogonal.
struct PivotedQr {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    perm: Vec<usize>,
}

impl PivotedQr {
    fn new(a: &DMatrix<f64>, pivot: bool) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut q = DMatrix::<f64>::identity(m, m);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..m.min(n) {
            if pivot {
                let norm = |j: usize| r.view((k, j), (m - k, 1)).norm_squared();
                let best = (k..n).max_by(|&x, &y| norm(x).total_cmp(&norm(y))).unwrap();
                if best != k {
                    r.swap_columns(k, best);
                    perm.swap(k, best);
                }
            }
            let x = r.view((k, k), (m - k, 1)).into_owned();
            let xnorm = x.norm();
            if xnorm == 0.0 {
                continue;
            }
            let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm = v.norm();
            if vnorm == 0.0 {
                continue;
            }
            v /= vnorm;
            let mut block = r.view_mut((k, k), (m - k, n - k));
            let w = block.tr_mul(&v);
            block -= &v * w.transpose() * 2.0;
            let mut qb = q.view_mut((0, k), (m, m - k));
            let u = &qb * &v;
            qb -= u * v.transpose() * 2.0;
        }
        PivotedQr { q, r, perm }
    }

    fn diag_abs(&self, k: usize) -> f64 {
        self.r[(k, k)].abs()
    }

    fn rank(&self, tol: f64) -> usize {
        let k = self.r.nrows().min(self.r.ncols());
        (0..k).take_while(|&i| self.diag_abs(i) > tol).count()
    }

    fn lead(&self) -> f64 {
        if self.r.nrows() == 0 || self.r.ncols() == 0 {
            0.0
        } else {
            self.diag_abs(0)
        }
    }
}

/// Orthonormal basis (as columns) of the null space of `a`. Pivots below
/// `rel_cutoff · max(|R₀₀|, 1)` count as zero.
pub fn null_space(a: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // range(Aᵀ) is spanned by the leading columns of Q; the rest is ker A
    let qr = PivotedQr::new(&a.transpose(), true);
    let r = qr.rank(rel_cutoff * qr.lead().max(1.0));
    qr.q.columns(r, n - r).into_owned()
}

/// Orthonormal basis (as columns) of the column space of `a`, treating pivots
/// at or below `abs_tol` as zero.
pub fn range_basis(a: &DMatrix<f64>, abs_tol: f64) -> DMatrix<f64> {
    let qr = PivotedQr::new(a, true);
    let r = qr.rank(abs_tol);
    qr.q.columns(0, r).into_owned()
}

/// Minimum-norm least-squares solution of `a x = b`, with pivots below
/// `rel_cutoff · |R₀₀|` treated as zero (complete orthogonal decomposition).
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    let n = a.ncols();
    let qr = PivotedQr::new(a, true);
    let r = qr.rank((rel_cutoff * qr.lead()).max(f64::MIN_POSITIVE));
    let mut x = DVector::zeros(n);
    if r == 0 {
        return x;
    }
    let c = qr.q.columns(0, r).tr_mul(b);
    // T = R[..r, :] = Lᵀ Zᵀ with Tᵀ = Z L
    let t = qr.r.rows(0, r).into_owned();
    let cod = PivotedQr::new(&t.transpose(), false);
    let lt = cod.r.rows(0, r).transpose();
    let w = lt
        .solve_lower_triangular(&c)
        .expect("pivots above the cutoff are nonzero");
    let y = cod.q.columns(0, r) * w;
    for (j, &p) in qr.perm.iter().enumerate() {
        x[p] = y[j];
    }
    x
}

/// Numerical rank with a relative cutoff on the pivots.
pub fn rank(a: &DMatrix<f64>, rel_cutoff: f64) -> usize {
    let qr = PivotedQr::new(a, true);
    let lead = qr.lead();
    if lead == 0.0 {
        return 0;
    }
    qr.rank(rel_cutoff * lead)
}

/// Unique symmetric positive square root of a symmetric positive-definite matrix.
pub fn sym_sqrt(g: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = g.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn sym_spectral_norm(a: &DMatrix<f64>) -> f64 {
    let s = (a + a.transpose()) * 0.5;
    s.symmetric_eigenvalues().amax()
}
