//! The operator zoo: gradients, symmetric and deviatoric gradients, curl and
//! curl-curl, divergences, Laplacians and the identity.
//!
//! Component orderings (frozen by the golden symbol tests):
//! - matrix-valued fields `u: R^n -> R^(N x n)` store components `(j, a)`
//!   with the row index `j` outermost;
//! - symmetric matrices store the upper triangle `(p, q)` with `p <= q` in
//!   lexicographic order, each entry once;
//! - `curl` rows are indexed `(j, (i, k))` with `i < k` and evaluate to
//!   `d_k u_(j,i) - d_i u_(j,k)`;
//! - `curlcurl` applies `d_ij v_kl + d_kl v_ij - d_il v_kj - d_kj v_il`; the
//!   reduced variant keeps one representative per index symmetry class, the
//!   full variant (behind a flag) emits all `n^4` components.

use super::{compose, nabla_compose, OpError, Operator};
use crate::exactnum::{ratio, FieldMatrix, Rational};
use crate::multipoly::Monomial;
use num_traits::One;

/// Builder parameters: `n` is the space dimension; `components` is the
/// number of scalar components `N` where applicable; `order` is the gradient
/// order for `kgradient`; `full` selects the unreduced curl-curl.
#[derive(Clone, Copy, Debug)]
pub struct ZooParams {
    pub n: usize,
    pub components: usize,
    pub order: usize,
    pub full: bool,
}

impl ZooParams {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            components: 1,
            order: 1,
            full: false,
        }
    }

    pub fn components(mut self, c: usize) -> Self {
        self.components = c;
        self
    }

    pub fn order(mut self, k: usize) -> Self {
        self.order = k;
        self
    }

    pub fn full(mut self, f: bool) -> Self {
        self.full = f;
        self
    }
}

/// Names accepted by [`builtin`].
pub const ZOO_NAMES: [&str; 12] = [
    "gradient",
    "kgradient",
    "symgrad",
    "devsymgrad",
    "curl",
    "curlcurl",
    "div",
    "divsym",
    "laplacian",
    "bilaplacian",
    "identity",
    "perpgradient",
];

/// Returns the named zoo operator.
pub fn builtin(name: &str, params: ZooParams) -> Result<Operator, OpError> {
    match name {
        "gradient" => Ok(gradient(params.n, params.components)),
        "kgradient" => Ok(kgradient(params.n, params.components, params.order)),
        "symgrad" => Ok(symgrad(params.n)),
        "devsymgrad" => Ok(devsymgrad(params.n)),
        "curl" => Ok(curl(params.n, params.components)),
        "curlcurl" => Ok(curlcurl(params.n, params.full)),
        "div" => Ok(div(params.n)),
        "divsym" => Ok(divsym(params.n)),
        "laplacian" => Ok(laplacian(params.n, params.components)),
        "bilaplacian" => Ok(bilaplacian(params.n, params.components)),
        "identity" => Ok(identity(params.n, params.components)),
        "perpgradient" => {
            if params.n != 2 {
                return Err(OpError::DimensionMismatch(
                    "perpgradient is only defined for n = 2".into(),
                ));
            }
            Ok(perp_gradient())
        }
        other => Err(OpError::UnknownName(other.to_string())),
    }
}

fn e(n: usize, a: usize) -> Monomial {
    Monomial::variable(n, a)
}

/// Position of the unordered pair `{p, q}` in the upper-triangle layout.
pub fn sym_index(n: usize, p: usize, q: usize) -> usize {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    let tri = p * p.saturating_sub(1) / 2;
    p * n - tri + (q - p)
}

/// All pairs `(p, q)` with `p <= q < n` in lexicographic order.
pub fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p..n {
            out.push((p, q));
        }
    }
    out
}

/// Strict pairs `(i, k)` with `i < k < n` in lexicographic order.
pub fn strict_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for k in (i + 1)..n {
            out.push((i, k));
        }
    }
    out
}

/// Order-zero identity on `N` components.
pub fn identity(n: usize, ncomp: usize) -> Operator {
    Operator::new(
        n,
        ncomp,
        ncomp,
        vec![(Monomial::unit(n), FieldMatrix::identity(ncomp))],
    )
    .expect("identity is valid")
}

/// Full gradient `u: R^n -> R^N` to `R^(N x n)`, rows `(j, a) = d_a u_j`.
pub fn gradient(n: usize, ncomp: usize) -> Operator {
    let l = ncomp * n;
    let mut terms = Vec::new();
    for a in 0..n {
        let mut m = FieldMatrix::zeros(l, ncomp);
        for j in 0..ncomp {
            *m.at_mut(j * n + a, j) = Rational::one();
        }
        terms.push((e(n, a), m));
    }
    Operator::new(n, ncomp, l, terms).expect("gradient is valid")
}

/// Iterated gradient of order `k` (the identity for `k = 0`).
pub fn kgradient(n: usize, ncomp: usize, k: usize) -> Operator {
    nabla_compose(&identity(n, ncomp), k)
}

/// Symmetric gradient on `u: R^n -> R^n`, upper-triangle components
/// `(p, q) = (d_p u_q + d_q u_p) / 2`, stored once each.
pub fn symgrad(n: usize) -> Operator {
    let pairs = sym_pairs(n);
    let l = pairs.len();
    let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
    for a in 0..n {
        let mut m = FieldMatrix::zeros(l, n);
        for (row, &(p, q)) in pairs.iter().enumerate() {
            if p == q {
                if p == a {
                    *m.at_mut(row, p) = Rational::one();
                }
            } else {
                if a == p {
                    *m.at_mut(row, q) = ratio(1, 2);
                }
                if a == q {
                    *m.at_mut(row, p) = ratio(1, 2);
                }
            }
        }
        terms.push((e(n, a), m));
    }
    Operator::new(n, n, l, terms).expect("symgrad is valid")
}

/// Trace-free symmetric gradient: `symgrad(u) - div(u)/n * Id`.
pub fn devsymgrad(n: usize) -> Operator {
    let pairs = sym_pairs(n);
    let l = pairs.len();
    let base = symgrad(n);
    let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> =
        base.terms().map(|(a, m)| (a.clone(), m.clone())).collect();
    for a in 0..n {
        let mut m = FieldMatrix::zeros(l, n);
        for (row, &(p, q)) in pairs.iter().enumerate() {
            if p == q {
                *m.at_mut(row, a) = -ratio(1, n as i64);
            }
        }
        terms.push((e(n, a), m));
    }
    Operator::new(n, n, l, terms).expect("devsymgrad is valid")
}

/// Row-wise curl on `u: R^n -> R^(N x n)`: rows `(j, (i, k))` with `i < k`
/// evaluating to `d_k u_(j,i) - d_i u_(j,k)`.
pub fn curl(n: usize, ncomp: usize) -> Operator {
    let pairs = strict_pairs(n);
    let d = ncomp * n;
    let l = ncomp * pairs.len();
    let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
    for a in 0..n {
        let mut m: FieldMatrix<Rational> = FieldMatrix::zeros(l, d);
        let mut used = false;
        for j in 0..ncomp {
            for (pi, &(i, k)) in pairs.iter().enumerate() {
                let row = j * pairs.len() + pi;
                if a == k {
                    *m.at_mut(row, j * n + i) = m.at(row, j * n + i).clone() + Rational::one();
                    used = true;
                }
                if a == i {
                    *m.at_mut(row, j * n + k) = m.at(row, j * n + k).clone() - Rational::one();
                    used = true;
                }
            }
        }
        if used {
            terms.push((e(n, a), m));
        }
    }
    Operator::new(n, d, l, terms).expect("curl is valid")
}

/// Saint-Venant curl-curl on symmetric-matrix fields. The reduced variant
/// indexes components by unordered pairs of strict pairs; the full variant
/// emits every `(i, j, k, l)`.
pub fn curlcurl(n: usize, full: bool) -> Operator {
    let d = sym_pairs(n).len();
    let components: Vec<(usize, usize, usize, usize)> = if full {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        v.push((i, j, k, l));
                    }
                }
            }
        }
        v
    } else {
        // pair1 = (i, k) at index positions 1 and 3, pair2 = (j, l) at 2 and 4;
        // the expression is invariant under swapping pair1 with pair2
        let pairs = strict_pairs(n);
        let mut v = Vec::new();
        for (a, &(i, k)) in pairs.iter().enumerate() {
            for &(j, l) in pairs.iter().skip(a) {
                v.push((i, j, k, l));
            }
        }
        v
    };
    let lrows = components.len();
    let mut acc: std::collections::BTreeMap<Monomial, FieldMatrix<Rational>> =
        std::collections::BTreeMap::new();
    let mut add = |alpha: Monomial, row: usize, col: usize, sign: i64| {
        let m = acc
            .entry(alpha)
            .or_insert_with(|| FieldMatrix::zeros(lrows, d));
        *m.at_mut(row, col) = m.at(row, col).clone() + ratio(sign, 1);
    };
    for (row, &(i, j, k, l)) in components.iter().enumerate() {
        let dd = |a: usize, b: usize| {
            let mut m = Monomial::unit(n);
            m.0[a] += 1;
            m.0[b] += 1;
            m
        };
        add(dd(i, j), row, sym_index(n, k, l), 1);
        add(dd(k, l), row, sym_index(n, i, j), 1);
        add(dd(i, l), row, sym_index(n, k, j), -1);
        add(dd(k, j), row, sym_index(n, i, l), -1);
    }
    Operator::new(n, d, lrows, acc.into_iter().collect()).expect("curlcurl is valid")
}

/// Divergence of vector fields: one row `(xi_1, ..., xi_n)`.
pub fn div(n: usize) -> Operator {
    let mut terms = Vec::new();
    for a in 0..n {
        let mut m = FieldMatrix::zeros(1, n);
        *m.at_mut(0, a) = Rational::one();
        terms.push((e(n, a), m));
    }
    Operator::new(n, n, 1, terms).expect("div is valid")
}

/// Row-wise divergence of symmetric-matrix fields.
pub fn divsym(n: usize) -> Operator {
    let d = sym_pairs(n).len();
    let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
    for a in 0..n {
        let mut m = FieldMatrix::zeros(n, d);
        for i in 0..n {
            // (div u)_i = sum_j d_j u_(i,j); the stored entry is u_(min,max)
            *m.at_mut(i, sym_index(n, i, a)) = Rational::one();
        }
        terms.push((e(n, a), m));
    }
    Operator::new(n, d, n, terms).expect("divsym is valid")
}

/// Componentwise Laplacian.
pub fn laplacian(n: usize, ncomp: usize) -> Operator {
    let mut terms = Vec::new();
    for a in 0..n {
        let mut m = Monomial::unit(n);
        m.0[a] = 2;
        terms.push((m, FieldMatrix::identity(ncomp)));
    }
    Operator::new(n, ncomp, ncomp, terms).expect("laplacian is valid")
}

/// Componentwise bi-Laplacian.
pub fn bilaplacian(n: usize, ncomp: usize) -> Operator {
    let lap = laplacian(n, ncomp);
    compose(&lap, &lap).expect("laplacian composes with itself")
}

/// Rotated gradient in two dimensions: `psi -> (-d_2 psi, d_1 psi)`, the
/// potential of `div`.
pub fn perp_gradient() -> Operator {
    let n = 2;
    let mut m1 = FieldMatrix::zeros(2, 1);
    *m1.at_mut(1, 0) = Rational::one();
    let mut m2 = FieldMatrix::zeros(2, 1);
    *m2.at_mut(0, 0) = -Rational::one();
    Operator::new(n, 1, 2, vec![(e(n, 0), m1), (e(n, 1), m2)]).expect("perp gradient is valid")
}
