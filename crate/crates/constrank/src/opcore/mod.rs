//! Constant-coefficient differential operators and their Fourier symbols.
//!
//! An [`Operator`] is a finite map from multi-indices to exact coefficient
//! matrices; replacing each derivative `d^alpha` by `xi^alpha` yields the
//! [`SymbolMatrix`]. Rows may carry different homogeneity orders (the
//! componentwise-homogeneous setting); fully homogeneous operators have all
//! row orders equal. Component orderings and sign conventions are frozen in
//! `docs/CONVENTIONS.md` and by the golden symbol tests.

pub mod zoo;

use crate::exactnum::{
    rational_from_str, rational_to_string, FieldMatrix, GaussianRational, Rational,
};
use crate::multipoly::{Monomial, MonomialOrder, MultiPoly};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("row {row} mixes monomial degrees {found:?}; rows must be homogeneous")]
    RowInhomogeneous { row: usize, found: Vec<u32> },
    #[error("operator is not fully homogeneous (row orders {0:?})")]
    NotFullyHomogeneous(Vec<u32>),
    #[error("unknown operator name {0:?}")]
    UnknownName(String),
    #[error("the two image-span computations disagree")]
    SpanMismatch,
    #[error("order reduction needs a fully homogeneous operator of order >= 1")]
    OrderTooLow,
    #[error("invalid operator data: {0}")]
    Invalid(String),
}

/// All multi-indices of length `n` with total degree `k`, in descending
/// lexicographic order (so `(k, 0, ..)` comes first). This fixes the jet
/// component ordering used by `reduce_order` and the iterated-gradient rows.
pub fn monomials_of_degree(n: usize, k: u32) -> Vec<Monomial> {
    fn rec(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if n == 1 {
            let mut e = prefix.clone();
            e.push(k);
            out.push(Monomial(e));
            return;
        }
        for first in (0..=k).rev() {
            prefix.push(first);
            rec(n - 1, k - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::new(), &mut out);
    out
}

/// Constant-coefficient differential operator `sum_alpha M_alpha d^alpha`
/// from `R^dim_domain`-valued to `R^dim_codomain`-valued fields on `R^n`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    n: usize,
    dim_domain: usize,
    dim_codomain: usize,
    terms: BTreeMap<Monomial, FieldMatrix<Rational>>,
    row_orders: Vec<u32>,
}

impl Operator {
    /// Builds an operator, inferring per-row homogeneity orders. Fails if a
    /// row mixes degrees. Zero rows get order 0.
    pub fn new(
        n: usize,
        dim_domain: usize,
        dim_codomain: usize,
        terms: Vec<(Monomial, FieldMatrix<Rational>)>,
    ) -> Result<Self, OpError> {
        let mut map: BTreeMap<Monomial, FieldMatrix<Rational>> = BTreeMap::new();
        for (alpha, m) in terms {
            if alpha.0.len() != n {
                return Err(OpError::DimensionMismatch(format!(
                    "multi-index arity {} vs n = {}",
                    alpha.0.len(),
                    n
                )));
            }
            if m.rows() != dim_codomain || m.cols() != dim_domain {
                return Err(OpError::DimensionMismatch(format!(
                    "coefficient matrix is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    dim_codomain,
                    dim_domain
                )));
            }
            match map.entry(alpha) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(m);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().add(&m);
                    *e.get_mut() = sum;
                }
            }
        }
        map.retain(|_, m| !m.is_zero_matrix());
        let mut row_orders = Vec::with_capacity(dim_codomain);
        for j in 0..dim_codomain {
            let mut degrees: Vec<u32> = map
                .iter()
                .filter(|(_, m)| (0..dim_domain).any(|i| !m.at(j, i).is_zero()))
                .map(|(a, _)| a.degree())
                .collect();
            degrees.sort_unstable();
            degrees.dedup();
            match degrees.len() {
                0 => row_orders.push(0),
                1 => row_orders.push(degrees[0]),
                _ => {
                    return Err(OpError::RowInhomogeneous {
                        row: j,
                        found: degrees,
                    })
                }
            }
        }
        Ok(Self {
            n,
            dim_domain,
            dim_codomain,
            terms: map,
            row_orders,
        })
    }

    /// Reconstructs an operator from a matrix of real polynomials in `xi`.
    pub fn from_polynomial_rows(
        n: usize,
        dim_domain: usize,
        rows: &[Vec<MultiPoly<Rational>>],
    ) -> Result<Self, OpError> {
        let dim_codomain = rows.len();
        let mut terms: BTreeMap<Monomial, FieldMatrix<Rational>> = BTreeMap::new();
        for (j, row) in rows.iter().enumerate() {
            if row.len() != dim_domain {
                return Err(OpError::DimensionMismatch(format!(
                    "row {j} has {} entries, expected {dim_domain}",
                    row.len()
                )));
            }
            for (i, p) in row.iter().enumerate() {
                for (m, c) in p.terms() {
                    let entry = terms
                        .entry(m.clone())
                        .or_insert_with(|| FieldMatrix::zeros(dim_codomain, dim_domain));
                    *entry.at_mut(j, i) = entry.at(j, i).clone() + c.clone();
                }
            }
        }
        Self::new(
            n,
            dim_domain,
            dim_codomain,
            terms.into_iter().collect(),
        )
    }

    pub fn space_dim(&self) -> usize {
        self.n
    }

    pub fn dim_domain(&self) -> usize {
        self.dim_domain
    }

    pub fn dim_codomain(&self) -> usize {
        self.dim_codomain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldMatrix<Rational>)> {
        self.terms.iter()
    }

    pub fn row_orders(&self) -> &[u32] {
        &self.row_orders
    }

    /// True when row `j` carries no nonzero coefficient at all.
    pub fn row_is_zero(&self, j: usize) -> bool {
        self.terms
            .values()
            .all(|m| (0..self.dim_domain).all(|i| m.at(j, i).is_zero()))
    }

    /// Order of a fully homogeneous operator; `None` when nonzero rows
    /// disagree. Zero rows are homogeneous of every degree and are ignored.
    pub fn uniform_order(&self) -> Option<u32> {
        let mut order = None;
        for (j, &o) in self.row_orders.iter().enumerate() {
            if self.row_is_zero(j) {
                continue;
            }
            match order {
                None => order = Some(o),
                Some(prev) if prev == o => {}
                Some(_) => return None,
            }
        }
        order.or(Some(0))
    }

    pub fn is_fully_homogeneous(&self) -> bool {
        self.uniform_order().is_some()
    }

    /// The Fourier symbol: entry `(j, i)` is `sum_alpha xi^alpha M_alpha[j,i]`.
    pub fn symbol(&self) -> SymbolMatrix {
        let mut entries =
            vec![MultiPoly::zero_poly(self.n); self.dim_codomain * self.dim_domain];
        for (alpha, m) in &self.terms {
            for j in 0..self.dim_codomain {
                for i in 0..self.dim_domain {
                    if m.at(j, i).is_zero() {
                        continue;
                    }
                    let idx = j * self.dim_domain + i;
                    entries[idx] = entries[idx].add(&MultiPoly::monomial_term(
                        alpha.clone(),
                        GaussianRational::from(m.at(j, i).clone()),
                    ));
                }
            }
        }
        SymbolMatrix {
            n: self.n,
            rows: self.dim_codomain,
            cols: self.dim_domain,
            entries,
            row_orders: self.row_orders.clone(),
        }
    }

    /// Exact evaluation of the symbol at a real rational point.
    pub fn symbol_at(&self, point: &[Rational]) -> FieldMatrix<Rational> {
        assert_eq!(point.len(), self.n, "point dimension");
        let mut out = FieldMatrix::zeros(self.dim_codomain, self.dim_domain);
        for (alpha, m) in &self.terms {
            let mut scale = Rational::one();
            for (x, &e) in point.iter().zip(&alpha.0) {
                for _ in 0..e {
                    scale *= x.clone();
                }
            }
            if scale.is_zero() {
                continue;
            }
            out = out.add(&m.scale(&scale));
        }
        out
    }

    /// Applies the operator to a polynomial vector field.
    pub fn apply_to_poly_field(
        &self,
        field: &[MultiPoly<Rational>],
    ) -> Result<Vec<MultiPoly<Rational>>, OpError> {
        if field.len() != self.dim_domain {
            return Err(OpError::DimensionMismatch(format!(
                "field has {} components, domain needs {}",
                field.len(),
                self.dim_domain
            )));
        }
        let mut out = vec![MultiPoly::zero_poly(self.n); self.dim_codomain];
        for (alpha, m) in &self.terms {
            let derived: Vec<MultiPoly<Rational>> = field
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    for (axis, &e) in alpha.0.iter().enumerate() {
                        for _ in 0..e {
                            q = q.derivative(axis);
                        }
                    }
                    q
                })
                .collect();
            for (j, out_j) in out.iter_mut().enumerate() {
                for (i, d) in derived.iter().enumerate() {
                    if !m.at(j, i).is_zero() {
                        *out_j = out_j.add(&d.scale(m.at(j, i)));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Composition `outer(inner(u))`; the inner operator must be fully
/// homogeneous so that the result stays componentwise homogeneous.
pub fn compose(outer: &Operator, inner: &Operator) -> Result<Operator, OpError> {
    if inner.dim_codomain != outer.dim_domain {
        return Err(OpError::DimensionMismatch(format!(
            "inner codomain {} vs outer domain {}",
            inner.dim_codomain, outer.dim_domain
        )));
    }
    if inner.n != outer.n {
        return Err(OpError::DimensionMismatch(
            "space dimensions differ".into(),
        ));
    }
    if !inner.is_fully_homogeneous() {
        return Err(OpError::NotFullyHomogeneous(inner.row_orders.clone()));
    }
    let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
    for (a, ma) in &outer.terms {
        for (b, mb) in &inner.terms {
            terms.push((a.mul(b), ma.mul(mb)));
        }
    }
    let out = Operator::new(outer.n, inner.dim_domain, outer.dim_codomain, terms)?;
    debug_assert_eq!(
        out.symbol(),
        outer.symbol().mul(&inner.symbol()),
        "symbol of a composition must be the product of symbols"
    );
    Ok(out)
}

/// Iterated gradient composition: one application maps `u` to the stack of
/// `d_a (op u)` for `a = 1..n` (blocks ordered by `a`, then original rows).
pub fn nabla_compose(op: &Operator, times: usize) -> Operator {
    let mut cur = op.clone();
    for _ in 0..times {
        let n = cur.n;
        let l = cur.dim_codomain;
        let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
        for (alpha, m) in &cur.terms {
            for a in 0..n {
                let mut shifted = alpha.clone();
                shifted.0[a] += 1;
                let mut block = FieldMatrix::zeros(n * l, cur.dim_domain);
                for j in 0..l {
                    for i in 0..cur.dim_domain {
                        *block.at_mut(a * l + j, i) = m.at(j, i).clone();
                    }
                }
                terms.push((shifted, block));
            }
        }
        cur = Operator::new(n, cur.dim_domain, n * l, terms).expect("shift preserves homogeneity");
    }
    cur
}

/// Homogenizes a componentwise-homogeneous family: each component of order
/// `k_i` is pushed to order `k = max k_i` by `nabla_compose`, and the rows are
/// stacked in component order.
pub fn homogenize(components: &[Operator]) -> Result<Operator, OpError> {
    let first = components
        .first()
        .ok_or_else(|| OpError::Invalid("empty component list".into()))?;
    let (n, d) = (first.n, first.dim_domain);
    if components
        .iter()
        .any(|c| c.n != n || c.dim_domain != d)
    {
        return Err(OpError::DimensionMismatch(
            "components must share space and domain dimensions".into(),
        ));
    }
    let orders: Vec<u32> = components
        .iter()
        .map(|c| {
            c.uniform_order()
                .ok_or_else(|| OpError::NotFullyHomogeneous(c.row_orders.clone()))
        })
        .collect::<Result<_, _>>()?;
    let k = *orders.iter().max().expect("nonempty");
    let lifted: Vec<Operator> = components
        .iter()
        .zip(&orders)
        .map(|(c, &o)| nabla_compose(c, (k - o) as usize))
        .collect();
    let mut rows: Vec<Vec<MultiPoly<Rational>>> = Vec::new();
    for op in &lifted {
        let s = op.symbol();
        for j in 0..s.rows {
            rows.push(
                (0..s.cols)
                    .map(|i| {
                        s.entry(j, i)
                            .to_rational()
                            .expect("real operator symbols stay real")
                    })
                    .collect(),
            );
        }
    }
    Operator::from_polynomial_rows(n, d, &rows)
}

/// Basis of the image span `W = span { A[xi] (R^d) : xi }`, computed two
/// independent ways and compared exactly:
/// (a) stacking symbol images at `d*l + 1` seeded random rational points;
/// (b) applying the operator to the monomial basis of the homogeneous
/// polynomials of matching degree and collecting the constant outputs.
/// Returns the canonical (rref-row) basis of the subspace of `R^l`.
pub fn image_span(op: &Operator, seed: u64) -> Result<FieldMatrix<Rational>, OpError> {
    let k = op
        .uniform_order()
        .ok_or_else(|| OpError::NotFullyHomogeneous(op.row_orders.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // route (a): sampled symbol images
    let samples = op.dim_domain * op.dim_codomain + 1;
    let mut image_rows: Vec<Vec<Rational>> = Vec::new();
    for _ in 0..samples {
        let point = crate::exactnum::sample_rational_point(&mut rng, op.n, 9);
        let m = op.symbol_at(&point);
        for i in 0..m.cols() {
            image_rows.push(m.col(i));
        }
    }
    let span_a = FieldMatrix::from_rows(image_rows);
    // route (b): operator applied to x^beta e_i for |beta| = k
    let mut poly_rows: Vec<Vec<Rational>> = Vec::new();
    for beta in monomials_of_degree(op.n, k) {
        for i in 0..op.dim_domain {
            let mut field = vec![MultiPoly::zero_poly(op.n); op.dim_domain];
            field[i] = MultiPoly::monomial_term(beta.clone(), Rational::one());
            let out = op.apply_to_poly_field(&field)?;
            poly_rows.push(
                out.iter()
                    .map(|p| p.coeff(&Monomial::unit(op.n)))
                    .collect(),
            );
        }
    }
    let span_b = FieldMatrix::from_rows(poly_rows);
    let canon = |m: &FieldMatrix<Rational>| -> FieldMatrix<Rational> {
        let r = m.rref();
        FieldMatrix::from_fn(r.pivots.len(), m.cols(), |i, j| r.reduced.at(i, j).clone())
    };
    let basis_a = canon(&span_a);
    let basis_b = canon(&span_b);
    if basis_a != basis_b {
        return Err(OpError::SpanMismatch);
    }
    Ok(basis_b)
}

/// Layout of the symmetric jet variable `u^(m) = grad^m u`: components are
/// ordered by multi-index (descending lexicographic), then by the original
/// component index.
#[derive(Clone, Debug)]
pub struct JetLayout {
    pub jet_order: u32,
    pub multi_indices: Vec<Monomial>,
    pub dim_base: usize,
}

impl JetLayout {
    pub fn new(n: usize, jet_order: u32, dim_base: usize) -> Self {
        Self {
            jet_order,
            multi_indices: monomials_of_degree(n, jet_order),
            dim_base,
        }
    }

    pub fn dim(&self) -> usize {
        self.multi_indices.len() * self.dim_base
    }

    pub fn index_of(&self, beta: &Monomial, component: usize) -> usize {
        let pos = self
            .multi_indices
            .iter()
            .position(|m| m == beta)
            .expect("jet multi-index");
        pos * self.dim_base + component
    }

    /// The jet map as an operator: `u` of dimension `dim_base` is sent to all
    /// of its `jet_order`-th derivatives in layout order.
    pub fn jet_operator(&self, n: usize) -> Operator {
        let d = self.dim_base;
        let rows = self.dim();
        let mut terms: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
        for (pos, beta) in self.multi_indices.iter().enumerate() {
            let mut m = FieldMatrix::zeros(rows, d);
            for i in 0..d {
                *m.at_mut(pos * d + i, i) = Rational::one();
            }
            terms.push((beta.clone(), m));
        }
        Operator::new(n, d, rows, terms).expect("jet map is homogeneous")
    }
}

/// Result of rewriting an order-`l` operator as a first-order operator on the
/// `(l-1)`-jet together with the curl-type compatibility constraints that
/// characterize jets of actual fields.
#[derive(Clone)]
pub struct ReducedOrder {
    pub first_order: Operator,
    pub compatibility: Operator,
    pub jet: JetLayout,
}

/// First-order reduction. For an operator that is already first order the
/// input is returned unchanged with an empty compatibility block.
pub fn reduce_order(op: &Operator) -> Result<ReducedOrder, OpError> {
    let l = op
        .uniform_order()
        .ok_or_else(|| OpError::NotFullyHomogeneous(op.row_orders.clone()))?;
    if l == 0 {
        return Err(OpError::OrderTooLow);
    }
    let jet = JetLayout::new(op.n, l - 1, op.dim_domain);
    if l == 1 {
        return Ok(ReducedOrder {
            first_order: op.clone(),
            compatibility: Operator::new(op.n, op.dim_domain, 0, Vec::new())?,
            jet,
        });
    }
    // first-order part: xi^alpha = xi_a * xi^(alpha - e_a) with a the first
    // index used by alpha
    let mut terms: BTreeMap<Monomial, FieldMatrix<Rational>> = BTreeMap::new();
    for (alpha, m) in &op.terms {
        let a = alpha
            .0
            .iter()
            .position(|&e| e > 0)
            .expect("order >= 2 term");
        let mut beta = alpha.clone();
        beta.0[a] -= 1;
        let key = Monomial::variable(op.n, a);
        let entry = terms
            .entry(key)
            .or_insert_with(|| FieldMatrix::zeros(op.dim_codomain, jet.dim()));
        for j in 0..op.dim_codomain {
            for i in 0..op.dim_domain {
                if m.at(j, i).is_zero() {
                    continue;
                }
                let col = jet.index_of(&beta, i);
                *entry.at_mut(j, col) = entry.at(j, col).clone() + m.at(j, i).clone();
            }
        }
    }
    let first_order = Operator::new(
        op.n,
        jet.dim(),
        op.dim_codomain,
        terms.into_iter().collect(),
    )?;
    // compatibility rows: d_a w_(gamma - e_a) = d_b w_(gamma - e_b) for every
    // |gamma| = l - ... of the jet order + 1 and every base component
    let mut compat_rows: Vec<(Monomial, FieldMatrix<Rational>)> = Vec::new();
    let gammas = monomials_of_degree(op.n, l);
    let mut row_count = 0usize;
    let mut blocks: Vec<(usize, usize, Monomial, Monomial)> = Vec::new(); // (a, b, beta_a, beta_b)
    for gamma in &gammas {
        for a in 0..op.n {
            if gamma.0[a] == 0 {
                continue;
            }
            for b in (a + 1)..op.n {
                if gamma.0[b] == 0 {
                    continue;
                }
                let mut beta_a = gamma.clone();
                beta_a.0[a] -= 1;
                let mut beta_b = gamma.clone();
                beta_b.0[b] -= 1;
                blocks.push((a, b, beta_a, beta_b));
                row_count += op.dim_domain;
            }
        }
    }
    let mut by_axis: BTreeMap<Monomial, FieldMatrix<Rational>> = BTreeMap::new();
    for (row_block, (a, b, beta_a, beta_b)) in blocks.iter().enumerate() {
        for i in 0..op.dim_domain {
            let row = row_block * op.dim_domain + i;
            {
                let key = Monomial::variable(op.n, *a);
                let entry = by_axis
                    .entry(key)
                    .or_insert_with(|| FieldMatrix::zeros(row_count, jet.dim()));
                let col = jet.index_of(beta_a, i);
                *entry.at_mut(row, col) = entry.at(row, col).clone() + Rational::one();
            }
            {
                let key = Monomial::variable(op.n, *b);
                let entry = by_axis
                    .entry(key)
                    .or_insert_with(|| FieldMatrix::zeros(row_count, jet.dim()));
                let col = jet.index_of(beta_b, i);
                *entry.at_mut(row, col) = entry.at(row, col).clone() - Rational::one();
            }
        }
    }
    compat_rows.extend(by_axis);
    let compatibility = Operator::new(op.n, jet.dim(), row_count, compat_rows)?;
    // round trip: first_order composed with the jet map reproduces the symbol
    let jet_op = jet.jet_operator(op.n);
    let recomposed = compose(&first_order, &jet_op)?;
    if recomposed.symbol() != op.symbol() {
        return Err(OpError::Invalid(
            "jet reduction failed to reproduce the symbol".into(),
        ));
    }
    Ok(ReducedOrder {
        first_order,
        compatibility,
        jet,
    })
}

/// Matrix of multivariate polynomials over Q(i): the evaluated-form carrier
/// of Fourier symbols. Entry `(j, i)` is homogeneous of `row_orders[j]` or
/// zero.
#[derive(Clone, PartialEq)]
pub struct SymbolMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly<GaussianRational>>,
    row_orders: Vec<u32>,
}

impl SymbolMatrix {
    pub fn from_rows(n: usize, rows: Vec<Vec<MultiPoly<GaussianRational>>>) -> Result<Self, OpError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(OpError::Invalid("ragged symbol rows".into()));
        }
        let mut row_orders = Vec::with_capacity(r);
        for (j, row) in rows.iter().enumerate() {
            let mut degrees: Vec<u32> = Vec::new();
            for p in row {
                match p.homogeneity() {
                    crate::multipoly::Homogeneity::Zero => {}
                    crate::multipoly::Homogeneity::Homogeneous(d) => degrees.push(d),
                    crate::multipoly::Homogeneity::Inhomogeneous => {
                        return Err(OpError::RowInhomogeneous {
                            row: j,
                            found: vec![],
                        })
                    }
                }
            }
            degrees.sort_unstable();
            degrees.dedup();
            match degrees.len() {
                0 => row_orders.push(0),
                1 => row_orders.push(degrees[0]),
                _ => {
                    return Err(OpError::RowInhomogeneous {
                        row: j,
                        found: degrees,
                    })
                }
            }
        }
        Ok(Self {
            n,
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
            row_orders,
        })
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_orders(&self) -> &[u32] {
        &self.row_orders
    }

    pub fn entry(&self, j: usize, i: usize) -> &MultiPoly<GaussianRational> {
        &self.entries[j * self.cols + i]
    }

    pub fn row(&self, j: usize) -> Vec<MultiPoly<GaussianRational>> {
        (0..self.cols).map(|i| self.entry(j, i).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(MultiPoly::is_zero)
    }

    pub fn transpose(&self) -> SymbolMatrix {
        let rows: Vec<Vec<MultiPoly<GaussianRational>>> = (0..self.cols)
            .map(|i| (0..self.rows).map(|j| self.entry(j, i).clone()).collect())
            .collect();
        SymbolMatrix::from_rows(self.n, rows).expect("transpose of a valid symbol")
    }

    pub fn mul(&self, rhs: &SymbolMatrix) -> SymbolMatrix {
        assert_eq!(self.cols, rhs.rows, "symbol product shape");
        let rows: Vec<Vec<MultiPoly<GaussianRational>>> = (0..self.rows)
            .map(|j| {
                (0..rhs.cols)
                    .map(|i| {
                        let mut acc = MultiPoly::zero_poly(self.n);
                        for k in 0..self.cols {
                            acc = acc.add(&self.entry(j, k).mul(rhs.entry(k, i)));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        SymbolMatrix::from_rows(self.n, rows).expect("product of valid symbols")
    }

    pub fn sub(&self, rhs: &SymbolMatrix) -> SymbolMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let rows: Vec<Vec<MultiPoly<GaussianRational>>> = (0..self.rows)
            .map(|j| {
                (0..self.cols)
                    .map(|i| self.entry(j, i).sub(rhs.entry(j, i)))
                    .collect()
            })
            .collect();
        SymbolMatrix {
            n: self.n,
            rows: self.rows,
            cols: self.cols,
            entries: rows.into_iter().flatten().collect(),
            row_orders: vec![0; self.rows],
        }
    }

    /// Exact evaluation at a Gaussian-rational point.
    pub fn evaluate(&self, point: &[GaussianRational]) -> FieldMatrix<GaussianRational> {
        FieldMatrix::from_fn(self.rows, self.cols, |j, i| {
            self.entry(j, i)
                .evaluate(point)
                .expect("dimension validated")
        })
    }

    /// Determinant of the square submatrix picked by `rows` x `cols`, by
    /// fraction-free (Bareiss) elimination with exact polynomial divisions.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> MultiPoly<GaussianRational> {
        assert_eq!(rows.len(), cols.len(), "square minor");
        if rows.is_empty() {
            return MultiPoly::one_poly(self.n);
        }
        let m: Vec<Vec<MultiPoly<GaussianRational>>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.entry(r, c).clone()).collect())
            .collect();
        crate::multipoly::det_bareiss(&m, MonomialOrder::GrevLex)
    }

    /// Cofactor-expansion determinant of the same submatrix; the independent
    /// oracle for `minor`.
    pub fn minor_laplace(&self, rows: &[usize], cols: &[usize]) -> MultiPoly<GaussianRational> {
        assert_eq!(rows.len(), cols.len(), "square minor");
        if rows.is_empty() {
            return MultiPoly::one_poly(self.n);
        }
        let m: Vec<Vec<MultiPoly<GaussianRational>>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.entry(r, c).clone()).collect())
            .collect();
        crate::multipoly::det_laplace(&m)
    }
}

impl std::fmt::Debug for SymbolMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "symbol [{}x{}] in {} vars", self.rows, self.cols, self.n)?;
        for j in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|i| format!("{}", self.entry(j, i)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "operator n={} {}x{} orders {:?}",
            self.n, self.dim_codomain, self.dim_domain, self.row_orders
        )
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorTermDto {
    alpha: Vec<u32>,
    matrix: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorDto {
    n: usize,
    dim_domain: usize,
    dim_codomain: usize,
    terms: Vec<OperatorTermDto>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = OperatorDto {
            n: self.n,
            dim_domain: self.dim_domain,
            dim_codomain: self.dim_codomain,
            terms: self
                .terms
                .iter()
                .map(|(a, m)| OperatorTermDto {
                    alpha: a.0.clone(),
                    matrix: (0..m.rows())
                        .map(|j| (0..m.cols()).map(|i| rational_to_string(m.at(j, i))).collect())
                        .collect(),
                })
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = OperatorDto::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(dto.terms.len());
        for t in dto.terms {
            if t.matrix.len() != dto.dim_codomain
                || t.matrix.iter().any(|r| r.len() != dto.dim_domain)
            {
                return Err(serde::de::Error::custom(format!(
                    "term matrix must be {}x{}",
                    dto.dim_codomain, dto.dim_domain
                )));
            }
            let mut m = FieldMatrix::zeros(dto.dim_codomain, dto.dim_domain);
            for (j, row) in t.matrix.iter().enumerate() {
                for (i, s) in row.iter().enumerate() {
                    *m.at_mut(j, i) = rational_from_str(s).map_err(serde::de::Error::custom)?;
                }
            }
            terms.push((Monomial(t.alpha), m));
        }
        Operator::new(dto.n, dto.dim_domain, dto.dim_codomain, terms)
            .map_err(serde::de::Error::custom)
    }
}

/// Finite-dimensional space of vector-valued polynomials with a verified
/// linearly independent basis.
#[derive(Clone, Debug, Serialize)]
pub struct PolySpace {
    pub n: usize,
    pub dim_values: usize,
    pub basis: Vec<Vec<MultiPoly<Rational>>>,
    pub degree_bound: u32,
}

impl PolySpace {
    pub fn new(
        n: usize,
        dim_values: usize,
        basis: Vec<Vec<MultiPoly<Rational>>>,
        degree_bound: u32,
    ) -> Result<Self, OpError> {
        // linear independence via the coefficient matrix
        let mut monomials: Vec<Monomial> = Vec::new();
        for b in &basis {
            if b.len() != dim_values {
                return Err(OpError::DimensionMismatch(
                    "basis element has wrong value dimension".into(),
                ));
            }
            for p in b {
                for (m, _) in p.terms() {
                    if !monomials.contains(m) {
                        monomials.push(m.clone());
                    }
                }
            }
        }
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|b| {
                let mut row = Vec::with_capacity(monomials.len() * dim_values);
                for p in b {
                    for m in &monomials {
                        row.push(p.coeff(m));
                    }
                }
                row
            })
            .collect();
        if !rows.is_empty() {
            let m = FieldMatrix::from_rows(rows);
            if m.rank() != basis.len() {
                return Err(OpError::Invalid(
                    "polynomial basis is linearly dependent".into(),
                ));
            }
        }
        Ok(Self {
            n,
            dim_values,
            basis,
            degree_bound,
        })
    }

    pub fn empty(n: usize, dim_values: usize) -> Self {
        Self {
            n,
            dim_values,
            basis: Vec::new(),
            degree_bound: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}
