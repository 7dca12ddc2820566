//! Multivariate polynomial arithmetic over an exact field.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, which fixes a
//! deterministic storage order independent of the monomial order used for
//! division; leading terms are selected against the active [`MonomialOrder`]
//! at the point of use.

use crate::exactnum::{
    rational_from_str, rational_to_string, Field, GaussianRational, Rational,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("point dimension {got} does not match variable count {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Exponent vector of a single monomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn variable(n: usize, idx: usize) -> Self {
        let mut e = vec![0; n];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient(&self, other: &Monomial) -> Monomial {
        Monomial(
            other
                .0
                .iter()
                .zip(&self.0)
                .map(|(b, a)| b - a)
                .collect(),
        )
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime_with(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{:?}", self.0)
    }
}

/// Total orders on monomials used by the division and basis algorithms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonomialOrder {
    /// Graded reverse lexicographic (the default for ideal computations).
    #[default]
    GrevLex,
    /// Pure lexicographic.
    Lex,
    /// Graded lexicographic.
    GrLex,
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::GrLex => a
                .degree()
                .cmp(&b.degree())
                .then_with(|| a.0.cmp(&b.0)),
            MonomialOrder::GrevLex => a.degree().cmp(&b.degree()).then_with(|| {
                for (x, y) in a.0.iter().zip(&b.0).rev() {
                    match y.cmp(x) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }),
        }
    }
}

/// Homogeneity classification of a polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Homogeneity {
    Homogeneous(u32),
    Inhomogeneous,
    /// The zero polynomial, conventionally homogeneous of every degree.
    Zero,
}

/// Multivariate polynomial with exact coefficients; zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly<F> {
    n: usize,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero_poly(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: F) -> Self {
        let mut p = Self::zero_poly(n);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(n), c);
        }
        p
    }

    pub fn one_poly(n: usize) -> Self {
        Self::constant(n, F::one())
    }

    /// The variable `x_idx`.
    pub fn variable(n: usize, idx: usize) -> Self {
        Self::monomial_term(Monomial::variable(n, idx), F::one())
    }

    pub fn monomial_term(m: Monomial, c: F) -> Self {
        let n = m.0.len();
        let mut p = Self::zero_poly(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut p = Self::zero_poly(n);
        for (m, c) in terms {
            assert_eq!(m.0.len(), n, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero_poly(self.n);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "variable count");
        let mut out = Self::zero_poly(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero_poly(self.n);
        }
        let mut out = Self::zero_poly(self.n);
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.clone() * c.clone());
        }
        out
    }

    /// Multiplies by the single term `c * x^m`.
    pub fn mul_term(&self, m: &Monomial, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero_poly(self.n);
        }
        let mut out = Self::zero_poly(self.n);
        for (ma, ca) in &self.terms {
            out.terms.insert(ma.mul(m), ca.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one_poly(self.n);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading term with respect to the given order.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &F)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    /// Exact evaluation at a point of matching dimension.
    pub fn evaluate(&self, point: &[F]) -> Result<F, PolyError> {
        if point.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let mut acc = F::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    pub fn homogeneity(&self) -> Homogeneity {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => Homogeneity::Zero,
            Some(d) => {
                if degrees.all(|e| e == d) {
                    Homogeneity::Homogeneous(d)
                } else {
                    Homogeneity::Inhomogeneous
                }
            }
        }
    }

    /// True when the polynomial is zero or homogeneous of degree `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        match self.homogeneity() {
            Homogeneity::Zero => true,
            Homogeneity::Homogeneous(k) => k == d,
            Homogeneity::Inhomogeneous => false,
        }
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> MultiPoly<G> {
        MultiPoly::from_terms(self.n, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Exact quotient `self / d` when `d` divides `self`; `None` otherwise.
    pub fn exact_div(&self, d: &Self, order: MonomialOrder) -> Option<Self> {
        assert_eq!(self.n, d.n, "variable count");
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (dm, dc) = d.leading_term(order).expect("nonzero divisor");
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Self::zero_poly(self.n);
        while let Some((lm, lc)) = rem.leading_term(order) {
            if !dm.divides(lm) {
                return None;
            }
            let qm = dm.quotient(lm);
            let qc = lc.div_ref(&dc);
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&d.mul_term(&qm, &qc));
        }
        Some(quot)
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn derivative(&self, idx: usize) -> Self {
        let mut out = Self::zero_poly(self.n);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[idx] -= 1;
            let mut factor = F::zero();
            for _ in 0..e {
                factor = factor + F::one();
            }
            out.add_term(me, c.clone() * factor);
        }
        out
    }
}

impl MultiPoly<Rational> {
    pub fn to_gaussian(&self) -> MultiPoly<GaussianRational> {
        self.map_coeffs(|c| GaussianRational::from(c.clone()))
    }
}

/// Determinant of a square polynomial matrix by fraction-free (Bareiss)
/// elimination; all intermediate divisions are exact.
pub fn det_bareiss<F: Field>(m: &[Vec<MultiPoly<F>>], order: MonomialOrder) -> MultiPoly<F> {
    let t = m.len();
    assert!(t >= 1, "empty determinants are handled by callers");
    assert!(m.iter().all(|row| row.len() == t), "square matrix");
    let n = m[0][0].nvars();
    if t == 1 {
        return m[0][0].clone();
    }
    let mut w: Vec<Vec<MultiPoly<F>>> = m.to_vec();
    let mut sign_flip = false;
    let mut prev = MultiPoly::one_poly(n);
    for k in 0..t - 1 {
        if w[k][k].is_zero() {
            let Some(swap) = (k + 1..t).find(|&r| !w[r][k].is_zero()) else {
                return MultiPoly::zero_poly(n);
            };
            w.swap(k, swap);
            sign_flip = !sign_flip;
        }
        for i in k + 1..t {
            for j in k + 1..t {
                let num = w[k][k].mul(&w[i][j]).sub(&w[i][k].mul(&w[k][j]));
                w[i][j] = if num.is_zero() {
                    num
                } else {
                    num.exact_div(&prev, order)
                        .expect("Bareiss divisions are exact")
                };
            }
            w[i][k] = MultiPoly::zero_poly(n);
        }
        prev = w[k][k].clone();
    }
    let det = w[t - 1][t - 1].clone();
    if sign_flip {
        det.neg()
    } else {
        det
    }
}

/// Determinant by cofactor expansion along the first row; the independent
/// oracle for [`det_bareiss`] on small matrices.
pub fn det_laplace<F: Field>(m: &[Vec<MultiPoly<F>>]) -> MultiPoly<F> {
    let t = m.len();
    assert!(t >= 1, "empty determinants are handled by callers");
    assert!(m.iter().all(|row| row.len() == t), "square matrix");
    let n = m[0][0].nvars();
    if t == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero_poly(n);
    for j in 0..t {
        if m[0][j].is_zero() {
            continue;
        }
        let sub: Vec<Vec<MultiPoly<F>>> = (1..t)
            .map(|r| {
                (0..t)
                    .filter(|&c| c != j)
                    .map(|c| m[r][c].clone())
                    .collect()
            })
            .collect();
        let term = m[0][j].mul(&det_laplace(&sub));
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

impl MultiPoly<GaussianRational> {
    /// Back to rational coefficients; `None` if any coefficient has a
    /// nonzero imaginary part.
    pub fn to_rational(&self) -> Option<MultiPoly<Rational>> {
        if self.terms.values().any(|c| !c.is_real()) {
            return None;
        }
        Some(MultiPoly::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| (m.clone(), c.re.clone())),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermDto {
    exp: Vec<u32>,
    coeff: CoeffDto,
}

/// Coefficient wire format: a plain `p/q` string for real values, or an
/// object with `re`/`im` strings for proper Gaussian rationals.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffDto {
    Real(String),
    Complex { re: String, im: String },
}

#[derive(Serialize, Deserialize)]
struct PolyDto {
    n: usize,
    terms: Vec<PolyTermDto>,
}

impl CoeffDto {
    fn to_gaussian(&self) -> Result<GaussianRational, String> {
        match self {
            CoeffDto::Real(s) => Ok(GaussianRational::from(
                rational_from_str(s).map_err(|e| e.to_string())?,
            )),
            CoeffDto::Complex { re, im } => Ok(GaussianRational::new(
                rational_from_str(re).map_err(|e| e.to_string())?,
                rational_from_str(im).map_err(|e| e.to_string())?,
            )),
        }
    }
}

impl Serialize for MultiPoly<Rational> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = PolyDto {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PolyTermDto {
                    exp: m.0.clone(),
                    coeff: CoeffDto::Real(rational_to_string(c)),
                })
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl Serialize for MultiPoly<GaussianRational> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dto = PolyDto {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| PolyTermDto {
                    exp: m.0.clone(),
                    coeff: if c.is_real() {
                        CoeffDto::Real(rational_to_string(&c.re))
                    } else {
                        CoeffDto::Complex {
                            re: rational_to_string(&c.re),
                            im: rational_to_string(&c.im),
                        }
                    },
                })
                .collect(),
        };
        dto.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly<Rational> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = PolyDto::deserialize(deserializer)?;
        let mut p = MultiPoly::zero_poly(dto.n);
        for t in dto.terms {
            if t.exp.len() != dto.n {
                return Err(serde::de::Error::custom("exponent arity mismatch"));
            }
            let c = t.coeff.to_gaussian().map_err(serde::de::Error::custom)?;
            if !c.is_real() {
                return Err(serde::de::Error::custom(
                    "complex coefficient in a real polynomial",
                ));
            }
            p.add_term(Monomial(t.exp), c.re);
        }
        Ok(p)
    }
}

impl<'de> Deserialize<'de> for MultiPoly<GaussianRational> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let dto = PolyDto::deserialize(deserializer)?;
        let mut p = MultiPoly::zero_poly(dto.n);
        for t in dto.terms {
            if t.exp.len() != dto.n {
                return Err(serde::de::Error::custom("exponent arity mismatch"));
            }
            let c = t.coeff.to_gaussian().map_err(serde::de::Error::custom)?;
            p.add_term(Monomial(t.exp), c);
        }
        Ok(p)
    }
}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{sample_gaussian, GaussianRational};
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type GPoly = MultiPoly<GaussianRational>;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_parts(re, im)
    }

    /// xi_1^2 + xi_2^2 in two variables.
    fn laplace_symbol() -> GPoly {
        GPoly::from_terms(
            2,
            vec![
                (Monomial(vec![2, 0]), g(1, 0)),
                (Monomial(vec![0, 2]), g(1, 0)),
            ],
        )
    }

    fn random_poly<R: Rng>(rng: &mut R, n: usize, max_deg: u32, terms: usize) -> GPoly {
        let mut p = GPoly::zero_poly(n);
        for _ in 0..terms {
            let m = Monomial((0..n).map(|_| rng.gen_range(0..=max_deg)).collect());
            p = p.add(&GPoly::monomial_term(m, sample_gaussian(rng, 5, 3)));
        }
        p
    }

    #[test]
    fn evaluate_laplace_symbol_on_isotropic_line() {
        let p = laplace_symbol();
        let point = vec![g(1, 0), g(0, 1)];
        assert!(p.evaluate(&point).unwrap().is_zero());
    }

    #[test]
    fn evaluate_homogeneous_at_origin() {
        let p = laplace_symbol();
        let origin = vec![g(0, 0), g(0, 0)];
        assert!(p.evaluate(&origin).unwrap().is_zero());
    }

    #[test]
    fn evaluate_plain_arithmetic() {
        // x1*x2 + x2^2 at (2, 3) = 6 + 9 = 15
        let p = GPoly::from_terms(
            2,
            vec![
                (Monomial(vec![1, 1]), g(1, 0)),
                (Monomial(vec![0, 2]), g(1, 0)),
            ],
        );
        assert_eq!(p.evaluate(&[g(2, 0), g(3, 0)]).unwrap(), g(15, 0));
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let p = laplace_symbol();
        assert!(matches!(
            p.evaluate(&[g(1, 0)]),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn homogeneity_classification() {
        assert_eq!(laplace_symbol().homogeneity(), Homogeneity::Homogeneous(2));
        let mixed = GPoly::from_terms(
            2,
            vec![
                (Monomial(vec![1, 0]), g(1, 0)),
                (Monomial(vec![0, 2]), g(1, 0)),
            ],
        );
        assert_eq!(mixed.homogeneity(), Homogeneity::Inhomogeneous);
        assert_eq!(GPoly::zero_poly(2).homogeneity(), Homogeneity::Zero);
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..200 {
            let p = random_poly(&mut rng, 2, 3, 3);
            let q = random_poly(&mut rng, 2, 3, 3);
            let r = random_poly(&mut rng, 2, 3, 3);
            assert_eq!(p.add(&q), q.add(&p));
            assert_eq!(p.mul(&q), q.mul(&p));
            assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
            assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
            assert!(p.sub(&p).is_zero());
        }
    }

    #[test]
    fn evaluate_is_ring_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let p = random_poly(&mut rng, 3, 2, 3);
            let q = random_poly(&mut rng, 3, 2, 3);
            let r = random_poly(&mut rng, 3, 2, 3);
            let x: Vec<GaussianRational> =
                (0..3).map(|_| sample_gaussian(&mut rng, 4, 3)).collect();
            let lhs = p.mul(&q).add(&r).evaluate(&x).unwrap();
            let rhs = p.evaluate(&x).unwrap() * q.evaluate(&x).unwrap() + r.evaluate(&x).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn homogeneous_products_add_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let da = rng.gen_range(0..4u32);
            let db = rng.gen_range(0..4u32);
            let make = |rng: &mut ChaCha8Rng, d: u32| {
                let mut p = GPoly::zero_poly(2);
                for _ in 0..3 {
                    let a = rng.gen_range(0..=d);
                    let m = Monomial(vec![a, d - a]);
                    p = p.add(&GPoly::monomial_term(m, sample_gaussian(rng, 3, 2)));
                }
                p
            };
            let pa = make(&mut rng, da);
            let pb = make(&mut rng, db);
            match pa.mul(&pb).homogeneity() {
                Homogeneity::Homogeneous(d) => assert_eq!(d, da + db),
                Homogeneity::Zero => {}
                Homogeneity::Inhomogeneous => panic!("product lost homogeneity"),
            }
        }
    }

    #[test]
    fn exact_division_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let mut d = random_poly(&mut rng, 2, 2, 2);
            if d.is_zero() {
                d = GPoly::one_poly(2);
            }
            let q = random_poly(&mut rng, 2, 2, 2);
            let p = d.mul(&q);
            let got = p.exact_div(&d, MonomialOrder::GrevLex).unwrap();
            assert_eq!(got, q);
        }
        // non-divisible pair
        let x1 = GPoly::variable(2, 0);
        let x2 = GPoly::variable(2, 1);
        assert!(x1.exact_div(&x2, MonomialOrder::GrevLex).is_none());
    }

    #[test]
    fn grevlex_orders_standard_examples() {
        let o = MonomialOrder::GrevLex;
        // deg dominates
        assert_eq!(
            o.cmp(&Monomial(vec![2, 0, 0]), &Monomial(vec![1, 1, 1])),
            Ordering::Less
        );
        // same degree: smaller last exponent wins
        assert_eq!(
            o.cmp(&Monomial(vec![1, 1, 0]), &Monomial(vec![2, 0, 0])),
            Ordering::Less
        );
        assert_eq!(
            o.cmp(&Monomial(vec![0, 2, 0]), &Monomial(vec![1, 1, 0])),
            Ordering::Less
        );
    }

    #[test]
    fn derivative_basic() {
        // d/dx1 (x1^2 x2) = 2 x1 x2
        let p = GPoly::monomial_term(Monomial(vec![2, 1]), g(1, 0));
        assert_eq!(
            p.derivative(0),
            GPoly::monomial_term(Monomial(vec![1, 1]), g(2, 0))
        );
    }
}
