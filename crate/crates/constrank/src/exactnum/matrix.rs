//! Dense matrices over an exact field with reduction to reduced row echelon
//! form, kernel bases, right inverses on subspaces and the Moore-Penrose
//! pseudo-inverse via rank factorization.

use super::{ExactError, Field};
use num_traits::Zero;
use std::fmt;

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct FieldMatrix<F> {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
}

/// Result of a reduction to reduced row echelon form.
///
/// `transform` is the invertible accumulated row-operation matrix with
/// `transform * original = reduced`, and `pivots` lists the pivot columns in
/// order, so the rank is `pivots.len()`.
pub struct Rref<F> {
    pub reduced: FieldMatrix<F>,
    pub pivots: Vec<usize>,
    pub transform: FieldMatrix<F>,
}

impl<F: Field> FieldMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Column vector from a slice.
    pub fn column(v: &[F]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &F {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Conjugate transpose; equals `transpose` over the rationals.
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> FieldMatrix<G> {
        FieldMatrix::from_fn(self.rows, self.cols, |i, j| f(self.at(i, j)))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = F::zero();
            for k in 0..self.cols {
                if !self.at(i, k).is_zero() && !rhs.at(k, j).is_zero() {
                    acc = acc + self.at(i, k).clone() * rhs.at(k, j).clone();
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for k in 0..self.cols {
                    if !self.at(i, k).is_zero() && !v[k].is_zero() {
                        acc = acc + self.at(i, k).clone() * v[k].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() + rhs.at(i, j).clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() - rhs.at(i, j).clone()
        })
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            self.at(i, j).clone() * c.clone()
        })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column count");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row count");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<F>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == dim), "column length");
        Self::from_fn(dim, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Reduced row echelon form with pivot list and the accumulated row
    /// transform. Pivoting picks the first nonzero entry in column order, so
    /// the output is deterministic.
    pub fn rref(&self) -> Rref<F> {
        let mut a = self.clone();
        let mut t = Self::identity(self.rows);
        let mut pivots = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..self.cols {
            if pivot_row >= self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| !a.at(r, col).is_zero()) else {
                continue;
            };
            if r != pivot_row {
                a.swap_rows(r, pivot_row);
                t.swap_rows(r, pivot_row);
            }
            let inv = a.at(pivot_row, col).inv();
            a.scale_row(pivot_row, &inv);
            t.scale_row(pivot_row, &inv);
            for other in 0..self.rows {
                if other != pivot_row && !a.at(other, col).is_zero() {
                    let factor = a.at(other, col).clone();
                    a.row_axpy(other, pivot_row, &factor);
                    t.row_axpy(other, pivot_row, &factor);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        Rref {
            reduced: a,
            pivots,
            transform: t,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Canonical basis of the exact kernel: one vector per free column, with
    /// a unit in the free position and back-substituted pivot entries.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -reduced.at(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = rhs` for one particular solution, if consistent.
    pub fn solve(&self, rhs: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, rhs.len(), "solve shape");
        let augmented = self.hstack(&Self::column(rhs));
        let Rref {
            reduced, pivots, ..
        } = augmented.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the rhs column: inconsistent
        }
        let mut x = vec![F::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = reduced.at(r, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix of full rank.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let Rref {
            reduced,
            pivots,
            transform,
        } = self.rref();
        if pivots.len() < self.rows {
            return None;
        }
        debug_assert_eq!(reduced, Self::identity(self.rows));
        Some(transform)
    }

    /// Right inverse `L` of `self` whose columns lie in the span of the given
    /// subspace vectors, so `self * L = I` exactly.
    ///
    /// Fails with [`ExactError::NotSurjective`] when the restriction of the
    /// matrix to the subspace does not map onto the full codomain.
    pub fn right_inverse_on_subspace(&self, subspace: &[Vec<F>]) -> Result<Self, ExactError> {
        for s in subspace {
            if s.len() != self.cols {
                return Err(ExactError::DimensionMismatch(format!(
                    "subspace vector length {} does not match domain {}",
                    s.len(),
                    self.cols
                )));
            }
        }
        let s = Self::from_columns(self.cols, subspace);
        let restricted = self.mul(&s); // rows x |S|
        let mut x_cols = Vec::with_capacity(self.rows);
        for j in 0..self.rows {
            let mut e = vec![F::zero(); self.rows];
            e[j] = F::one();
            let col = restricted.solve(&e).ok_or(ExactError::NotSurjective)?;
            x_cols.push(col);
        }
        let x = Self::from_columns(subspace.len(), &x_cols);
        let l = s.mul(&x);
        debug_assert_eq!(self.mul(&l), Self::identity(self.rows));
        Ok(l)
    }

    /// Moore-Penrose pseudo-inverse via exact rank factorization.
    ///
    /// Writes `A = F G` with `F` the pivot columns and `G` the nonzero rref
    /// rows, then `A^+ = G^* (G G^*)^{-1} (F^* F)^{-1} F^*`. Exactness of the
    /// rank decision makes a singular-value cutoff unnecessary.
    pub fn pseudo_inverse(&self) -> Self {
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let r = pivots.len();
        if r == 0 {
            return Self::zeros(self.cols, self.rows);
        }
        let f = Self::from_fn(self.rows, r, |i, j| self.at(i, pivots[j]).clone());
        let g = Self::from_fn(r, self.cols, |i, j| reduced.at(i, j).clone());
        let g_star = g.conj_transpose();
        let f_star = f.conj_transpose();
        let gg = g.mul(&g_star).inverse().expect("G G* invertible at rank r");
        let ff = f_star.mul(&f).inverse().expect("F* F invertible at rank r");
        g_star.mul(&gg).mul(&ff).mul(&f_star)
    }

    /// Orthogonal projection onto the column span of the given vectors
    /// (with respect to the standard sesquilinear inner product).
    pub fn projector_onto_span(dim: usize, span: &[Vec<F>]) -> Self {
        if span.is_empty() {
            return Self::zeros(dim, dim);
        }
        let c = Self::from_columns(dim, span);
        // C (C* C)^{-1} C*; the span vectors need not be independent, so go
        // through the pseudo-inverse of C instead.
        let c_pinv = c.pseudo_inverse();
        c.mul(&c_pinv)
    }

    /// Determinant by cofactor expansion along the first row; intended for
    /// the small exact matrices used in tests and witness checks.
    pub fn det_laplace(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        match self.rows {
            0 => F::one(),
            1 => self.at(0, 0).clone(),
            n => {
                let mut acc = F::zero();
                for j in 0..n {
                    if self.at(0, j).is_zero() {
                        continue;
                    }
                    let minor = Self::from_fn(n - 1, n - 1, |r, c| {
                        self.at(r + 1, if c < j { c } else { c + 1 }).clone()
                    });
                    let term = self.at(0, j).clone() * minor.det_laplace();
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &F) {
        for j in 0..self.cols {
            let v = self.at(r, j).clone() * c.clone();
            *self.at_mut(r, j) = v;
        }
    }

    /// row[target] -= factor * row[source]
    fn row_axpy(&mut self, target: usize, source: usize, factor: &F) {
        for j in 0..self.cols {
            let v = self.at(target, j).clone() - factor.clone() * self.at(source, j).clone();
            *self.at_mut(target, j) = v;
        }
    }
}

impl<F: Field> fmt::Debug for FieldMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, sample_gaussian, GaussianRational, Rational};
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rmat(rows: Vec<Vec<i64>>) -> FieldMatrix<Rational> {
        FieldMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat).collect())
                .collect(),
        )
    }

    /// Rank oracle: largest k with a nonzero k x k minor.
    fn rank_by_minors<F: Field>(m: &FieldMatrix<F>) -> usize {
        let max_k = m.rows().min(m.cols());
        for k in (1..=max_k).rev() {
            for rows in (0..m.rows()).combinations(k) {
                for cols in (0..m.cols()).combinations(k) {
                    let sub =
                        FieldMatrix::from_fn(k, k, |i, j| m.at(rows[i], cols[j]).clone());
                    if !sub.det_laplace().is_zero() {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rref_identity_case() {
        let m = rmat(vec![vec![1, 0], vec![0, 1]]);
        let r = m.rref();
        assert_eq!(r.reduced, m);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.transform, FieldMatrix::identity(2));
    }

    #[test]
    fn rref_proportional_rows() {
        let m = rmat(vec![vec![1, 2], vec![2, 4]]);
        let r = m.rref();
        assert_eq!(r.pivots.len(), 1);
        assert_eq!(r.reduced, rmat(vec![vec![1, 2], vec![0, 0]]));
        // T * M = R holds exactly
        assert_eq!(r.transform.mul(&m), r.reduced);
    }

    #[test]
    fn rank_matches_minor_oracle_on_random_gaussian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for case in 0..120 {
            let rows = 1 + case % 4;
            let cols = 1 + (case / 4) % 4;
            let m = FieldMatrix::from_fn(rows, cols, |_, _| sample_gaussian(&mut rng, 3, 2));
            let r = m.rref();
            assert_eq!(r.pivots.len(), rank_by_minors(&m), "matrix {m:?}");
            assert_eq!(r.transform.mul(&m), r.reduced);
        }
    }

    #[test]
    fn kernel_of_div_symbol_at_e1() {
        // 1 x 2 matrix [1, 0]: kernel spanned by (0, 1)
        let m = rmat(vec![vec![1, 0]]);
        let basis = m.kernel_basis();
        assert_eq!(basis, vec![vec![rat(0), rat(1)]]);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let m: FieldMatrix<Rational> = FieldMatrix::identity(3);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn kernel_of_curl_row_at_complex_point() {
        // row (-i, 1): kernel spanned by (1, i)
        let m = FieldMatrix::from_rows(vec![vec![
            GaussianRational::from_parts(0, -1),
            GaussianRational::from_parts(1, 0),
        ]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 1);
        // canonical form: unit in the free column, so (i, 1) here; check span
        for v in &basis {
            let image = m.mul_vec(v);
            assert!(image.iter().all(|z| z.is_zero()));
        }
        // (1, i) must be in the kernel too
        let v = vec![
            GaussianRational::from_parts(1, 0),
            GaussianRational::from_parts(0, 1),
        ];
        assert!(m.mul_vec(&v).iter().all(|z| z.is_zero()));
    }

    #[test]
    fn kernel_vectors_are_exact_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for case in 0..100 {
            let rows = 1 + case % 4;
            let cols = 1 + (case / 3) % 4;
            let m = FieldMatrix::from_fn(rows, cols, |_, _| sample_gaussian(&mut rng, 4, 3));
            let basis = m.kernel_basis();
            assert_eq!(basis.len(), m.cols() - m.rank());
            for v in &basis {
                assert!(m.mul_vec(v).iter().all(|z| z.is_zero()));
            }
        }
    }

    #[test]
    fn right_inverse_div_on_kernel() {
        // M = div[e2] = [0, 1], S = ker div[e1] = span{(0,1)}: L(t) = (0,t)
        let m = rmat(vec![vec![0, 1]]);
        let s = vec![vec![rat(0), rat(1)]];
        let l = m.right_inverse_on_subspace(&s).unwrap();
        assert_eq!(l, rmat(vec![vec![0], vec![1]]));
    }

    #[test]
    fn right_inverse_square_invertible() {
        let m = rmat(vec![vec![2, 1], vec![1, 1]]);
        let s = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        let l = m.right_inverse_on_subspace(&s).unwrap();
        assert_eq!(m.mul(&l), FieldMatrix::identity(2));
        assert_eq!(l, m.inverse().unwrap());
    }

    #[test]
    fn right_inverse_curl_row() {
        // M = curl[e2] = (-1, 0), S = ker curl[e1] = span{(1,0)}: L(t) = (-t, 0)
        let m = rmat(vec![vec![-1, 0]]);
        let s = vec![vec![rat(1), rat(0)]];
        let l = m.right_inverse_on_subspace(&s).unwrap();
        assert_eq!(l, rmat(vec![vec![-1], vec![0]]));
    }

    #[test]
    fn right_inverse_detects_non_surjective() {
        let m = rmat(vec![vec![1, 0], vec![0, 1]]);
        let s = vec![vec![rat(1), rat(0)]]; // restriction has rank 1 < 2
        assert!(matches!(
            m.right_inverse_on_subspace(&s),
            Err(ExactError::NotSurjective)
        ));
    }

    #[test]
    fn right_inverse_columns_in_span_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 25 {
            let m = FieldMatrix::from_fn(2, 3, |_, _| sample_gaussian(&mut rng, 3, 2));
            let s: Vec<Vec<GaussianRational>> = (0..2)
                .map(|_| (0..3).map(|_| sample_gaussian(&mut rng, 3, 2)).collect())
                .collect();
            if let Ok(l) = m.right_inverse_on_subspace(&s) {
                found += 1;
                assert_eq!(m.mul(&l), FieldMatrix::identity(2));
                // every column of L is a combination of S: rank does not grow
                let span = FieldMatrix::from_columns(3, &s);
                for j in 0..l.cols() {
                    let aug = span.hstack(&FieldMatrix::column(&l.col(j)));
                    assert_eq!(aug.rank(), span.rank());
                }
            }
        }
    }

    #[test]
    fn pseudo_inverse_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..60 {
            let rows = 1 + case % 3;
            let cols = 1 + (case / 3) % 3;
            let a = FieldMatrix::from_fn(rows, cols, |_, _| sample_gaussian(&mut rng, 3, 2));
            let p = a.pseudo_inverse();
            assert_eq!(a.mul(&p).mul(&a), a, "A A+ A = A");
            assert_eq!(p.mul(&a).mul(&p), p, "A+ A A+ = A+");
            let apa = a.mul(&p);
            assert_eq!(apa.conj_transpose(), apa, "A A+ Hermitian");
            let pa = p.mul(&a);
            assert_eq!(pa.conj_transpose(), pa, "A+ A Hermitian");
        }
    }
}
