//! Naive reference implementations on full component arrays, plus proptest
//! strategies shared by the integration tests.

#![allow(dead_code)]

use g2_core::{KForm, LieAlgebra, Metric};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Sign of a permutation of distinct values, by counting inversions.
pub fn perm_sign(p: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All permutations of `0..k`.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).product::<usize>() as f64
}

/// Increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Fully antisymmetric component array `a[i1, ..., ik]` (0-based indices).
#[derive(Clone, Debug)]
pub struct Tensor {
    pub n: usize,
    pub k: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zero(n: usize, k: usize) -> Self {
        Tensor {
            n,
            k,
            data: vec![0.0; n.pow(k as u32)],
        }
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn from_form(f: &KForm) -> Self {
        let (n, k) = (f.dim(), f.degree());
        let mut t = Tensor::zero(n, k);
        for s in subsets(n, k) {
            let labels: Vec<usize> = s.iter().map(|i| i + 1).collect();
            let c = f.coeff(&labels);
            for p in permutations(k) {
                let idx: Vec<usize> = p.iter().map(|&q| s[q]).collect();
                let pos = t.flat(&idx);
                t.data[pos] = perm_sign(&p) * c;
            }
        }
        t
    }

    pub fn to_form(&self) -> KForm {
        let coeffs = subsets(self.n, self.k)
            .iter()
            .map(|s| self.get(s))
            .collect();
        KForm::from_coeffs(self.n, self.k, coeffs).unwrap()
    }

    /// `α(v_1, ..., v_k)` with the convention `α(e_I) = α_I` for increasing `I`.
    pub fn eval(&self, vs: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        let n = self.n;
        let count = n.pow(self.k as u32);
        for flat in 0..count {
            let c = self.data[flat];
            if c == 0.0 {
                continue;
            }
            let mut rest = flat;
            let mut prod = c;
            for slot in (0..self.k).rev() {
                prod *= vs[slot][rest % n];
                rest /= n;
            }
            total += prod;
        }
        total
    }
}

/// `(α∧β)(v_1..v_{k+l}) = 1/(k! l!) Σ_σ sgn σ α(v_σ...) β(v_σ...)`.
pub fn wedge(a: &KForm, b: &KForm) -> KForm {
    let n = a.dim();
    let (k, l) = (a.degree(), b.degree());
    let (ta, tb) = (Tensor::from_form(a), Tensor::from_form(b));
    let norm = factorial(k) * factorial(l);
    let perms = permutations(k + l);
    let coeffs = subsets(n, k + l)
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|p| {
                    let idx: Vec<usize> = p.iter().map(|&q| s[q]).collect();
                    perm_sign(p) * ta.get(&idx[..k]) * tb.get(&idx[k..])
                })
                .sum::<f64>()
                / norm
        })
        .collect();
    KForm::from_coeffs(n, k + l, coeffs).unwrap()
}

/// Raises every index of a covariant tensor with `ginv`.
fn raise_all(t: &Tensor, ginv: &DMatrix<f64>) -> Tensor {
    let n = t.n;
    let mut cur = t.data.clone();
    for axis in 0..t.k {
        let stride = n.pow((t.k - 1 - axis) as u32);
        let mut next = vec![0.0; cur.len()];
        for (flat, out) in next.iter_mut().enumerate() {
            let a = (flat / stride) % n;
            let base = flat - a * stride;
            *out = (0..n).map(|i| ginv[(a, i)] * cur[base + i * stride]).sum();
        }
        cur = next;
    }
    Tensor {
        n,
        k: t.k,
        data: cur,
    }
}

/// `⟨α, β⟩ = 1/k! α_{i...} β^{i...}`.
pub fn inner(g: &DMatrix<f64>, a: &KForm, b: &KForm) -> f64 {
    let ginv = g.clone().try_inverse().unwrap();
    let ta = Tensor::from_form(a);
    let tb = raise_all(&Tensor::from_form(b), &ginv);
    ta.data
        .iter()
        .zip(&tb.data)
        .map(|(x, y)| x * y)
        .sum::<f64>()
        / factorial(a.degree())
}

/// `⋆β` from `α ∧ ⋆β = ⟨α, β⟩ sqrt(det g) e^{1...n}` for all `α`.
pub fn star(g: &DMatrix<f64>, b: &KForm) -> KForm {
    let n = b.dim();
    let k = b.degree();
    let sub_k = subsets(n, k);
    let sub_c = subsets(n, n - k);
    let basis = |s: &Vec<usize>| {
        let labels: Vec<usize> = s.iter().map(|i| i + 1).collect();
        KForm::basis(n, &labels).unwrap()
    };
    let mut m = DMatrix::zeros(sub_k.len(), sub_c.len());
    let mut rhs = nalgebra::DVector::zeros(sub_k.len());
    let vol = g.determinant().sqrt();
    for (r, s) in sub_k.iter().enumerate() {
        let a = basis(s);
        for (c, t) in sub_c.iter().enumerate() {
            m[(r, c)] = wedge(&a, &basis(t)).as_scalar();
        }
        rhs[r] = inner(g, &a, b) * vol;
    }
    let sol = m.lu().solve(&rhs).unwrap();
    KForm::from_coeffs(n, n - k, sol.as_slice().to_vec()).unwrap()
}

pub fn interior(v: &[f64], a: &KForm) -> KForm {
    let t = Tensor::from_form(a);
    let n = a.dim();
    let k = a.degree();
    let coeffs = subsets(n, k - 1)
        .iter()
        .map(|s| {
            (0..n)
                .map(|i| {
                    let mut idx = vec![i];
                    idx.extend(s);
                    v[i] * t.get(&idx)
                })
                .sum()
        })
        .collect();
    KForm::from_coeffs(n, k - 1, coeffs).unwrap()
}

/// `[e_i, e_j]^k = -de^k(e_i, e_j)`.
pub fn bracket(alg: &LieAlgebra, x: &[f64], y: &[f64]) -> Vec<f64> {
    alg.differentials()
        .iter()
        .map(|de| -Tensor::from_form(de).eval(&[x.to_vec(), y.to_vec()]))
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()
}

/// `dα(X_0..X_k) = Σ_{i<j} (-1)^{i+j} α([X_i, X_j], X_0..X̂_i..X̂_j..)`.
pub fn ce_diff(alg: &LieAlgebra, a: &KForm) -> KForm {
    let n = a.dim();
    let k = a.degree();
    let t = Tensor::from_form(a);
    let coeffs = subsets(n, k + 1)
        .iter()
        .map(|s| {
            let xs: Vec<Vec<f64>> = s.iter().map(|&i| unit(n, i)).collect();
            let mut total = 0.0;
            for i in 0..=k {
                for j in i + 1..=k {
                    let mut args = vec![bracket(alg, &xs[i], &xs[j])];
                    for (m, x) in xs.iter().enumerate() {
                        if m != i && m != j {
                            args.push(x.clone());
                        }
                    }
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    total += sign * t.eval(&args);
                }
            }
            total
        })
        .collect();
    KForm::from_coeffs(n, k + 1, coeffs).unwrap()
}

fn gdot(g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in 0..y.len() {
            s += x[i] * g[(i, j)] * y[j];
        }
    }
    s
}

/// `∇_X Y = ½([X,Y] − ad_X^* Y − ad_Y^* X)` with `ad^*` the `g`-adjoint.
pub fn nabla(alg: &LieAlgebra, g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let ginv = g.clone().try_inverse().unwrap();
    let adjoint = |a: &[f64], b: &[f64]| -> Vec<f64> {
        // g(ad_a^* b, e_z) = g(b, [a, e_z])
        let low: Vec<f64> = (0..n)
            .map(|z| gdot(g, b, &bracket(alg, a, &unit(n, z))))
            .collect();
        (0..n)
            .map(|i| (0..n).map(|z| ginv[(i, z)] * low[z]).sum())
            .collect()
    };
    let br = bracket(alg, x, y);
    let ax = adjoint(x, y);
    let ay = adjoint(y, x);
    (0..n).map(|i| 0.5 * (br[i] - ax[i] - ay[i])).collect()
}

/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`.
pub fn curvature(alg: &LieAlgebra, g: &DMatrix<f64>, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let a = nabla(alg, g, x, &nabla(alg, g, y, z));
    let b = nabla(alg, g, y, &nabla(alg, g, x, z));
    let c = nabla(alg, g, &bracket(alg, x, y), z);
    (0..x.len()).map(|i| a[i] - b[i] - c[i]).collect()
}

/// `Ric(Y, Z) = Σ_i e^i(R(e_i, Y) Z)`.
pub fn ricci(alg: &LieAlgebra, g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = alg.dim();
    DMatrix::from_fn(n, n, |j, k| {
        (0..n)
            .map(|i| curvature(alg, g, &unit(n, i), &unit(n, j), &unit(n, k))[i])
            .sum()
    })
}

/// `Ric*_{sm} = R^{ijkl} φ_{ijs} φ_{klm}` with all curvature indices raised by `g`.
pub fn star_ricci(alg: &LieAlgebra, g: &DMatrix<f64>, phi: &KForm) -> DMatrix<f64> {
    let n = alg.dim();
    let mut r = Tensor::zero(n, 4);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = curvature(alg, g, &unit(n, i), &unit(n, j), &unit(n, k));
                for l in 0..n {
                    let pos = ((i * n + j) * n + k) * n + l;
                    r.data[pos] = gdot(g, &v, &unit(n, l));
                }
            }
        }
    }
    let ginv = g.clone().try_inverse().unwrap();
    let up = raise_all(&r, &ginv);
    let p = Tensor::from_form(phi);
    DMatrix::from_fn(n, n, |s, m| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        acc += up.get(&[i, j, k, l]) * p.get(&[i, j, s]) * p.get(&[k, l, m]);
                    }
                }
            }
        }
        acc
    })
}

/// `B_ij = ⅙ ι_iφ∧ι_jφ∧φ / e^{1...7}`, then `g = B / (det B)^{1/9}` (real root).
pub fn g2_metric(phi: &KForm) -> DMatrix<f64> {
    let n = 7;
    let b = DMatrix::from_fn(n, n, |i, j| {
        let a = interior(&unit(n, i), phi);
        let c = interior(&unit(n, j), phi);
        wedge(&wedge(&a, &c), phi).as_scalar() / 6.0
    });
    let det = b.determinant();
    b * (det.signum() / det.abs().powf(1.0 / 9.0))
}

pub fn catalog_algebras() -> Vec<(&'static str, LieAlgebra)> {
    g2_core::catalog::names()
        .map(|name| {
            (
                name,
                g2_core::catalog::catalog(name).unwrap().algebra().unwrap(),
            )
        })
        .collect()
}

pub fn seven_dim_algebras() -> Vec<(&'static str, LieAlgebra)> {
    catalog_algebras()
        .into_iter()
        .filter(|(_, a)| a.dim() == 7)
        .collect()
}

/// Coefficients in `[-2, 2]` for a `k`-form on `R^n`.
pub fn arb_form(n: usize, k: usize) -> impl Strategy<Value = KForm> {
    let len = g2_core::exterior::basis_len(n, k);
    prop::collection::vec(-2.0..2.0f64, len).prop_map(move |c| KForm::from_coeffs(n, k, c).unwrap())
}

/// A random symmetric positive-definite matrix `A Aᵀ + ½ I`.
pub fn arb_metric(n: usize) -> impl Strategy<Value = Metric> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        let g = &a * a.transpose() + DMatrix::identity(n, n) * 0.5;
        Metric::new(g).unwrap()
    })
}

/// An invertible matrix close to the identity, `I + ε A` with `|ε A| ≤ 0.3`.
pub fn arb_near_identity(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-0.3..0.3f64, n * n)
        .prop_map(move |v| DMatrix::identity(n, n) + DMatrix::from_vec(n, n, v) / n as f64)
}
