//! Recovery of potentials on the unit square: given first-order operators
//! `A` (potential) and `B` (annihilator of `A`, constant rank over C) and a
//! `B`-free field `u`, produce `v` with `A v = u` up to a finite-dimensional
//! polynomial space.
//!
//! Pipeline: split `R^d` against the kernels of `B[e1]`, `B[e2]`; cancel the
//! mean boundary defect with the `B`-free quadratic `S1 u`; periodify with
//! edge measures `S2 u` built from cumulative right-inverse integrals; invert
//! the symbol frequency by frequency on the torus; and undo `S1` with exact
//! cubic polynomials `P3`, `P4`.

pub mod csv;
mod polyfield;
mod solve;
mod torus;

pub use polyfield::{apply_first_order, rational_to_f64, PolyField};
pub use solve::{
    assemble_p3_p4, solve, Diagnostics, GridField, InputTraces, PotentialSolution, SolveOptions,
    P3P4,
};
pub use torus::{torus_inverse, TorusInverse};

use crate::exactnum::{ExactError, FieldMatrix, Rational};
use crate::opcore::{monomials_of_degree, OpError, Operator, PolySpace};
use crate::spectral::{Edge, EdgeTrace, SpectralError};
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PoincareError {
    #[error("the solver handles n = 2 only (got n = {0})")]
    WrongDimension(usize),
    #[error("operator must be first order; reduce higher-order inputs through the jet rewriting first (order {0})")]
    UnsupportedOrder(u32),
    #[error("B is not an annihilator of A: B[xi] A[xi] != 0")]
    NotAnnihilator,
    #[error("B does not have certified constant rank over C: {0}")]
    NotConstantRank(String),
    #[error("the operator is not spanning (V0 dimension {v0_dim}, codomain span {span_dim} of {codomain})")]
    NotSpanning {
        v0_dim: usize,
        span_dim: usize,
        codomain: usize,
    },
    #[error("boundary compatibility violated: |c1 + c2| = {defect:.3e} exceeds {tol:.3e} (is u B-free?)")]
    CompatibilityViolated { defect: f64, tol: f64 },
    #[error("kernel membership violated in {display}: defect {defect:.3e}")]
    KernelMembershipViolated { display: String, defect: f64 },
    #[error("mean of the corrected field is not in the image span of A (residual {0:.3e})")]
    MeanNotInImage(f64),
    #[error("per-frequency residual too large at k = {k:?}: {value:.3e}")]
    ResidualTooLarge { k: (i64, i64), value: f64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Exact splitting of the domain against the kernels of `B[e1]`, `B[e2]`:
/// `V2` is their intersection, `V0` the orthogonal complement of their span,
/// `V1` the rest.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub v0: Vec<Vec<Rational>>,
    pub v1: Vec<Vec<Rational>>,
    pub v2: Vec<Vec<Rational>>,
    pub p_v0: FieldMatrix<Rational>,
    pub p_y: FieldMatrix<Rational>,
    pub ker_e1: Vec<Vec<Rational>>,
    pub ker_e2: Vec<Vec<Rational>>,
}

fn unit_point(n: usize, axis: usize) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); n];
    p[axis] = Rational::one();
    p
}

/// Orthogonal complement (for the standard inner product) of the span of the
/// given vectors inside `R^dim`.
fn orthogonal_complement(dim: usize, span: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if span.is_empty() {
        return (0..dim)
            .map(|i| {
                let mut e = vec![Rational::zero(); dim];
                e[i] = Rational::one();
                e
            })
            .collect();
    }
    FieldMatrix::from_rows(span.to_vec()).kernel_basis()
}

/// Splits the domain per the kernel geometry of a first-order `B` in 2D.
pub fn decompose(b: &Operator) -> Result<Decomposition, PoincareError> {
    if b.space_dim() != 2 {
        return Err(PoincareError::WrongDimension(b.space_dim()));
    }
    if b.row_orders().iter().any(|&o| o > 1) {
        return Err(PoincareError::UnsupportedOrder(
            *b.row_orders().iter().max().unwrap_or(&0),
        ));
    }
    let d = b.dim_domain();
    let b1 = b.symbol_at(&unit_point(2, 0));
    let b2 = b.symbol_at(&unit_point(2, 1));
    let ker_e1 = b1.kernel_basis();
    let ker_e2 = b2.kernel_basis();
    let mut span = ker_e1.clone();
    span.extend(ker_e2.clone());
    let v0 = orthogonal_complement(d, &span);
    let v2 = b1.vstack(&b2).kernel_basis();
    let mut v0_v2 = v0.clone();
    v0_v2.extend(v2.clone());
    let v1 = orthogonal_complement(d, &v0_v2);

    // verified invariants: orthogonality, direct sum, and the kernel
    // characterizations
    let dot = |x: &[Rational], y: &[Rational]| -> Rational {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.clone() * b.clone())
            .fold(Rational::zero(), |acc, t| acc + t)
    };
    for x in &v0 {
        for y in &v2 {
            assert!(dot(x, y).is_zero(), "V0 and V2 must be orthogonal");
        }
        for y in &v1 {
            assert!(dot(x, y).is_zero(), "V0 and V1 must be orthogonal");
        }
    }
    for x in &v1 {
        for y in &v2 {
            assert!(dot(x, y).is_zero(), "V1 and V2 must be orthogonal");
        }
    }
    let mut all = v0.clone();
    all.extend(v1.clone());
    all.extend(v2.clone());
    assert_eq!(all.len(), d, "V0 + V1 + V2 must fill the domain");
    if !all.is_empty() {
        assert_eq!(
            FieldMatrix::from_rows(all).rank(),
            d,
            "V0 + V1 + V2 must be a direct sum"
        );
    }

    let p_v0 = FieldMatrix::projector_onto_span(d, &v0);
    // Y = span of the symbol images = Im B[e1] + Im B[e2]
    let l = b.dim_codomain();
    let mut image_span: Vec<Vec<Rational>> = Vec::new();
    for m in [&b1, &b2] {
        for i in 0..m.cols() {
            image_span.push(m.col(i));
        }
    }
    let p_y = FieldMatrix::projector_onto_span(l, &image_span);
    Ok(Decomposition {
        v0,
        v1,
        v2,
        p_v0,
        p_y,
        ker_e1,
        ker_e2,
    })
}

/// Result of forcing the spanning hypotheses: the stacked operator
/// `(P_Y' . B, P_V0)` with componentwise orders, and the degree bound for
/// the finite-dimensional polynomial defect space.
#[derive(Clone, Debug)]
pub struct SpanningSystem {
    /// Order-one block expressed in a basis of the codomain image span.
    pub first_order_block: Operator,
    /// Order-zero rows (a basis of `V0` as functionals); empty when `B` is
    /// already spanning.
    pub zero_order_rows: Vec<Vec<Rational>>,
    pub x_degree_bound: u32,
    pub was_spanning: bool,
}

/// Canonical row basis (rref rows) of the span of the given vectors.
fn row_basis(dim: usize, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = FieldMatrix::from_rows(vectors.to_vec());
    let r = m.rref();
    (0..r.pivots.len())
        .map(|i| (0..dim).map(|j| r.reduced.at(i, j).clone()).collect())
        .collect()
}

/// Stacks `B` with the projection onto `V0` and compresses the codomain onto
/// the span of the symbol images, so the spanning hypotheses hold for the
/// order-one block on the restricted domain `V0^perp`.
pub fn make_spanning(b: &Operator) -> Result<SpanningSystem, PoincareError> {
    let dec = decompose(b)?;
    let l = b.dim_codomain();
    let b1 = b.symbol_at(&unit_point(2, 0));
    let b2 = b.symbol_at(&unit_point(2, 1));
    let mut image_span: Vec<Vec<Rational>> = Vec::new();
    for m in [&b1, &b2] {
        for i in 0..m.cols() {
            image_span.push(m.col(i));
        }
    }
    let y_basis = row_basis(l, &image_span);
    let was_spanning = dec.v0.is_empty() && y_basis.len() == l;
    if was_spanning {
        return Ok(SpanningSystem {
            first_order_block: b.clone(),
            zero_order_rows: Vec::new(),
            x_degree_bound: 1,
            was_spanning: true,
        });
    }
    // compress the codomain: rows = (basis of Y) . B
    let compress = FieldMatrix::from_rows(y_basis);
    let mut terms = Vec::new();
    for (alpha, m) in b.terms() {
        terms.push((alpha.clone(), compress.mul(m)));
    }
    let first_order_block = Operator::new(2, b.dim_domain(), compress.rows(), terms)?;
    Ok(SpanningSystem {
        first_order_block,
        zero_order_rows: dec.v0.clone(),
        x_degree_bound: 1,
        was_spanning: false,
    })
}

/// Basis of the `d`-vector polynomials of degree at most `bound` that `B`
/// annihilates; the conservative carrier of the defect space `X`.
pub fn polynomial_kernel(b: &Operator, bound: u32) -> Result<PolySpace, PoincareError> {
    use crate::multipoly::MultiPoly;
    let d = b.dim_domain();
    let n = b.space_dim();
    let mut raw_basis: Vec<Vec<MultiPoly<Rational>>> = Vec::new();
    for deg in 0..=bound {
        for beta in monomials_of_degree(n, deg) {
            for i in 0..d {
                let mut field = vec![MultiPoly::zero_poly(n); d];
                field[i] = MultiPoly::monomial_term(beta.clone(), Rational::one());
                raw_basis.push(field);
            }
        }
    }
    // coefficient matrix of p -> B p over the raw basis
    let mut out_monomials: Vec<crate::multipoly::Monomial> = Vec::new();
    let mut images: Vec<Vec<MultiPoly<Rational>>> = Vec::new();
    for field in &raw_basis {
        let img = b.apply_to_poly_field(field)?;
        for p in &img {
            for (mono, _) in p.terms() {
                if !out_monomials.contains(mono) {
                    out_monomials.push(mono.clone());
                }
            }
        }
        images.push(img);
    }
    let ncols = out_monomials.len() * b.dim_codomain();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for img in &images {
        let mut row = Vec::with_capacity(ncols);
        for p in img {
            for mono in &out_monomials {
                row.push(p.coeff(mono));
            }
        }
        rows.push(row);
    }
    let kernel = if ncols == 0 {
        // B annihilates everything of this degree
        FieldMatrix::<Rational>::zeros(raw_basis.len(), 1).kernel_basis()
    } else {
        FieldMatrix::from_rows(rows).transpose().kernel_basis()
    };
    let mut basis: Vec<Vec<MultiPoly<Rational>>> = Vec::new();
    for combo in kernel {
        let mut field = vec![MultiPoly::zero_poly(n); d];
        for (w, coeff) in raw_basis.iter().zip(&combo) {
            if coeff.is_zero() {
                continue;
            }
            for (f, p) in field.iter_mut().zip(w) {
                *f = f.add(&p.scale(coeff));
            }
        }
        basis.push(field);
    }
    Ok(PolySpace::new(n, d, basis, bound)?)
}

/// Dense float matrix rows, the working form of exact rational matrices.
pub type MatF = Vec<Vec<f64>>;

/// The three exact right-inverse maps used by the correctors, as float
/// matrices (their defining identities hold exactly over the rationals).
#[derive(Clone, Debug)]
pub struct CorrectorMaps {
    /// `L_(e1, e2-e1)`: into `ker B[e1]`, right inverse of `B[e2 - e1]`.
    pub l_km1_e2me1: MatF,
    /// `L_(e2, e1)`: into `ker B[e2]`, right inverse of `B[e1]`.
    pub l_km2_e1: MatF,
    /// `L_(e1, e2)`: into `ker B[e1]`, right inverse of `B[e2]`.
    pub l_km1_e2: MatF,
    pub b1: MatF,
    pub b2: MatF,
}

fn to_f64_matrix(m: &FieldMatrix<Rational>) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| rational_to_f64(m.at(i, j))).collect())
        .collect()
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn vec_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn vec_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Builds the corrector right-inverse maps; fails with `NotSpanning` when a
/// restriction is not surjective.
pub fn corrector_maps(b: &Operator) -> Result<CorrectorMaps, PoincareError> {
    let dec = decompose(b)?;
    let b1 = b.symbol_at(&unit_point(2, 0));
    let b2 = b.symbol_at(&unit_point(2, 1));
    let b2m1 = b2.sub(&b1);
    let not_spanning = |_e: ExactError| PoincareError::NotSpanning {
        v0_dim: dec.v0.len(),
        span_dim: b.dim_codomain(),
        codomain: b.dim_codomain(),
    };
    let l_km1_e2me1 = b2m1
        .right_inverse_on_subspace(&dec.ker_e1)
        .map_err(not_spanning)?;
    let l_km2_e1 = b1
        .right_inverse_on_subspace(&dec.ker_e2)
        .map_err(not_spanning)?;
    let l_km1_e2 = b2
        .right_inverse_on_subspace(&dec.ker_e1)
        .map_err(not_spanning)?;
    Ok(CorrectorMaps {
        l_km1_e2me1: to_f64_matrix(&l_km1_e2me1),
        l_km2_e1: to_f64_matrix(&l_km2_e1),
        l_km1_e2: to_f64_matrix(&l_km1_e2),
        b1: to_f64_matrix(&b1),
        b2: to_f64_matrix(&b2),
    })
}

/// Boundary jump data of a field on the square: `w1(y) = B[e1](u(0,y) -
/// u(1,y))` on `Q1`, `w2(x) = B[e2](u(x,0) - u(x,1))` on `Q2`, plus their
/// integrals.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub w1: EdgeTrace,
    pub w2: EdgeTrace,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// The compatibility tolerance actually applied; the base tolerance
    /// widened by the estimated trapezoid error of the traces.
    pub tol_used: f64,
}

/// Traces of the field on the four faces of the square at matching
/// resolution: entry `j` sits at parameter `j / M`.
#[derive(Clone, Debug)]
pub struct Traces {
    /// `u(0, y)`
    pub x1_lo: Vec<Vec<f64>>,
    /// `u(1, y)`
    pub x1_hi: Vec<Vec<f64>>,
    /// `u(x, 0)`
    pub x2_lo: Vec<Vec<f64>>,
    /// `u(x, 1)`
    pub x2_hi: Vec<Vec<f64>>,
}

impl Traces {
    pub fn from_fn(resolution: usize, d: usize, mut u: impl FnMut(f64, f64) -> Vec<f64>) -> Self {
        let sample = |fixed: f64, along_x1: bool, u: &mut dyn FnMut(f64, f64) -> Vec<f64>| {
            (0..=resolution)
                .map(|j| {
                    let t = j as f64 / resolution as f64;
                    let v = if along_x1 { u(t, fixed) } else { u(fixed, t) };
                    assert_eq!(v.len(), d);
                    v
                })
                .collect::<Vec<_>>()
        };
        Self {
            x1_lo: sample(0.0, false, &mut u),
            x1_hi: sample(1.0, false, &mut u),
            x2_lo: sample(0.0, true, &mut u),
            x2_hi: sample(1.0, true, &mut u),
        }
    }

    pub fn resolution(&self) -> usize {
        self.x1_lo.len().saturating_sub(1)
    }

    /// Adds the quadratic corrector values on each face.
    pub fn plus_s1(&self, s1: &CorrectorS1) -> Traces {
        let m = self.resolution();
        let shift = |vals: &[Vec<f64>], along_x1: bool, fixed: f64| -> Vec<Vec<f64>> {
            vals.iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = j as f64 / m as f64;
                    let (x1, x2) = if along_x1 { (t, fixed) } else { (fixed, t) };
                    let s = s1.eval(x1, x2);
                    v.iter().zip(&s).map(|(a, b)| a + b).collect()
                })
                .collect()
        };
        Traces {
            x1_lo: shift(&self.x1_lo, false, 0.0),
            x1_hi: shift(&self.x1_hi, false, 1.0),
            x2_lo: shift(&self.x2_lo, true, 0.0),
            x2_hi: shift(&self.x2_hi, true, 1.0),
        }
    }
}

/// Computes the boundary jump data; `tol` guards the compatibility identity
/// `c1 + c2 = 0` that holds for `B`-free fields.
pub fn boundary_data(
    b: &Operator,
    traces: &Traces,
    tol: f64,
) -> Result<BoundaryData, PoincareError> {
    let maps = corrector_maps_shape_only(b)?;
    let m = traces.resolution();
    if [&traces.x1_hi, &traces.x2_lo, &traces.x2_hi]
        .iter()
        .any(|t| t.len() != m + 1)
    {
        return Err(PoincareError::Shape(
            "face traces must share one resolution".into(),
        ));
    }
    let w1 = EdgeTrace {
        edge: Edge::Q1,
        values: (0..=m)
            .map(|j| {
                let diff = vec_sub(&traces.x1_lo[j], &traces.x1_hi[j]);
                mat_vec(&maps.0, &diff)
            })
            .collect(),
    };
    let w2 = EdgeTrace {
        edge: Edge::Q2,
        values: (0..=m)
            .map(|j| {
                let diff = vec_sub(&traces.x2_lo[j], &traces.x2_hi[j]);
                mat_vec(&maps.1, &diff)
            })
            .collect(),
    };
    let c1 = w1.integral();
    let c2 = w2.integral();
    let defect = vec_norm(&c1.iter().zip(&c2).map(|(a, b)| a + b).collect::<Vec<_>>());
    // quadrature-aware tolerance: the composite trapezoid error is about
    // |w''| / (12 M^2), and the largest second difference of the samples
    // estimates |w''| / M^2
    let second_diff = |t: &EdgeTrace| -> f64 {
        let mut worst = 0.0f64;
        for j in 1..t.values.len().saturating_sub(1) {
            let mut acc = 0.0;
            for c in 0..t.components() {
                let d2 = t.values[j + 1][c] - 2.0 * t.values[j][c] + t.values[j - 1][c];
                acc += d2 * d2;
            }
            worst = worst.max(acc.sqrt());
        }
        worst
    };
    let quad_err = (second_diff(&w1).max(second_diff(&w2))) * (2.0 / 3.0);
    let tol_used = tol.max(quad_err);
    if defect > tol_used {
        return Err(PoincareError::CompatibilityViolated {
            defect,
            tol: tol_used,
        });
    }
    Ok(BoundaryData {
        w1,
        w2,
        c1,
        c2,
        tol_used,
    })
}

fn corrector_maps_shape_only(b: &Operator) -> Result<(MatF, MatF), PoincareError> {
    if b.space_dim() != 2 {
        return Err(PoincareError::WrongDimension(b.space_dim()));
    }
    let b1 = b.symbol_at(&unit_point(2, 0));
    let b2 = b.symbol_at(&unit_point(2, 1));
    Ok((to_f64_matrix(&b1), to_f64_matrix(&b2)))
}

/// The quadratic corrector `S1 u = a11 x1^2 + 2 a12 x1 x2 + a22 x2^2`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CorrectorS1 {
    pub a11: Vec<f64>,
    pub a12: Vec<f64>,
    pub a22: Vec<f64>,
}

impl CorrectorS1 {
    pub fn eval(&self, x1: f64, x2: f64) -> Vec<f64> {
        self.a11
            .iter()
            .zip(&self.a12)
            .zip(&self.a22)
            .map(|((a, b), c)| a * x1 * x1 + 2.0 * b * x1 * x2 + c * x2 * x2)
            .collect()
    }

    pub fn as_polyfield(&self) -> PolyField {
        let mut p = PolyField::zero(self.a11.len());
        p.add_term((2, 0), self.a11.clone());
        p.add_term((1, 1), self.a12.iter().map(|v| 2.0 * v).collect());
        p.add_term((0, 2), self.a22.clone());
        p.trimmed(0.0)
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        vec_norm(&self.a11).max(vec_norm(&self.a12)).max(vec_norm(&self.a22)) <= eps
    }
}

/// Builds `S1` from the boundary integrals: `a12 = -L_(e1,e2-e1)(c1)`,
/// `a11 = L_(e2,e1)(-B[e2] a12)`, `a22 = L_(e1,e2)(-B[e1] a12)`. The
/// annihilation `B S1 u = 0` is verified coefficientwise.
pub fn corrector_s1(
    maps: &CorrectorMaps,
    bd: &BoundaryData,
    check_tol: f64,
) -> Result<CorrectorS1, PoincareError> {
    let a12: Vec<f64> = mat_vec(&maps.l_km1_e2me1, &bd.c1)
        .iter()
        .map(|v| -v)
        .collect();
    let minus_b2_a12: Vec<f64> = mat_vec(&maps.b2, &a12).iter().map(|v| -v).collect();
    let a11 = mat_vec(&maps.l_km2_e1, &minus_b2_a12);
    let minus_b1_a12: Vec<f64> = mat_vec(&maps.b1, &a12).iter().map(|v| -v).collect();
    let a22 = mat_vec(&maps.l_km1_e2, &minus_b1_a12);
    // B[e1] a11 + B[e2] a12 = 0 and B[e2] a22 + B[e1] a12 = 0
    let chk1 = vec_norm(
        &mat_vec(&maps.b1, &a11)
            .iter()
            .zip(&mat_vec(&maps.b2, &a12))
            .map(|(x, y)| x + y)
            .collect::<Vec<_>>(),
    );
    let chk2 = vec_norm(
        &mat_vec(&maps.b2, &a22)
            .iter()
            .zip(&mat_vec(&maps.b1, &a12))
            .map(|(x, y)| x + y)
            .collect::<Vec<_>>(),
    );
    if chk1 > check_tol || chk2 > check_tol {
        return Err(PoincareError::KernelMembershipViolated {
            display: "B[e1] a11 + B[e2] a12 = 0 and the symmetric relation".into(),
            defect: chk1.max(chk2),
        });
    }
    Ok(CorrectorS1 { a11, a12, a22 })
}

/// Edge densities of the periodifying measure: cumulative right-inverse
/// integrals of the (corrected) jump traces.
#[derive(Clone, Debug)]
pub struct CorrectorS2 {
    pub q1: EdgeTrace,
    pub q2: EdgeTrace,
}

/// Builds `S2` from the boundary data of the already-corrected field
/// (`u + S1 u`): `S2(0, y) = -int_0^y L_(e1,e2) w1`, `S2(x, 0) = -int_0^x
/// L_(e2,e1) w2`. Corner values and kernel membership are verified.
pub fn corrector_s2(
    maps: &CorrectorMaps,
    bd_corrected: &BoundaryData,
    tol: f64,
) -> Result<CorrectorS2, PoincareError> {
    let d = maps.l_km1_e2.len();
    let cum = |trace: &EdgeTrace, l: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let m = trace.segments();
        let h = 1.0 / m as f64;
        let mut acc = vec![0.0; trace.components()];
        let mut out = Vec::with_capacity(m + 1);
        out.push(vec![0.0; d]);
        for j in 1..=m {
            for (a, (lo, hi)) in acc
                .iter_mut()
                .zip(trace.values[j - 1].iter().zip(&trace.values[j]))
            {
                *a += 0.5 * h * (lo + hi);
            }
            out.push(mat_vec(l, &acc).iter().map(|v| -v).collect());
        }
        out
    };
    let q1_values = cum(&bd_corrected.w1, &maps.l_km1_e2);
    let q2_values = cum(&bd_corrected.w2, &maps.l_km2_e1);
    let q1 = EdgeTrace {
        edge: Edge::Q1,
        values: q1_values,
    };
    let q2 = EdgeTrace {
        edge: Edge::Q2,
        values: q2_values,
    };
    // corners: S2(0,0) = 0 by construction; S2(0,1) and S2(1,0) vanish
    // because the corrected integrals c vanish
    let corner1 = vec_norm(q1.values.last().expect("nonempty"));
    let corner2 = vec_norm(q2.values.last().expect("nonempty"));
    if corner1 > tol || corner2 > tol {
        return Err(PoincareError::CompatibilityViolated {
            defect: corner1.max(corner2),
            tol,
        });
    }
    // kernel membership: Q1 values in ker B[e1], Q2 values in ker B[e2]
    for v in &q1.values {
        let r = vec_norm(&mat_vec(&maps.b1, v));
        if r > tol {
            return Err(PoincareError::KernelMembershipViolated {
                display: "S2 u(0, .) in ker(B[e1])".into(),
                defect: r,
            });
        }
    }
    for v in &q2.values {
        let r = vec_norm(&mat_vec(&maps.b2, v));
        if r > tol {
            return Err(PoincareError::KernelMembershipViolated {
                display: "S2 u(., 0) in ker(B[e2])".into(),
                defect: r,
            });
        }
    }
    // derivative relations at the integrand level:
    // B[e2] L_(e1,e2) w1 = w1 and B[e1] L_(e2,e1) w2 = w2
    for w in &bd_corrected.w1.values {
        let lhs = mat_vec(&maps.b2, &mat_vec(&maps.l_km1_e2, w));
        if vec_norm(&vec_sub(&lhs, w)) > tol * (1.0 + vec_norm(w)) {
            return Err(PoincareError::KernelMembershipViolated {
                display: "B[e2] d/dt S2(0, t) = -w1(t)".into(),
                defect: vec_norm(&vec_sub(&lhs, w)),
            });
        }
    }
    for w in &bd_corrected.w2.values {
        let lhs = mat_vec(&maps.b1, &mat_vec(&maps.l_km2_e1, w));
        if vec_norm(&vec_sub(&lhs, w)) > tol * (1.0 + vec_norm(w)) {
            return Err(PoincareError::KernelMembershipViolated {
                display: "B[e1] d/dt S2(t, 0) = -w2(t)".into(),
                defect: vec_norm(&vec_sub(&lhs, w)),
            });
        }
    }
    Ok(CorrectorS2 { q1, q2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::zoo;

    fn div_op() -> Operator {
        zoo::div(2)
    }

    /// u = (x1, -x2), divergence free.
    fn linear_field(x1: f64, x2: f64) -> Vec<f64> {
        vec![x1, -x2]
    }

    #[test]
    fn decompose_div() {
        let dec = decompose(&div_op()).unwrap();
        assert!(dec.v0.is_empty());
        assert!(dec.v2.is_empty());
        assert_eq!(dec.v1.len(), 2);
    }

    #[test]
    fn decompose_stacked_first_component_derivatives() {
        // B u = (d1 u1, d2 u1) on d = 2: both kernels are {v1 = 0}
        use crate::multipoly::Monomial;
        let mut m1 = FieldMatrix::zeros(2, 2);
        *m1.at_mut(0, 0) = Rational::one();
        let mut m2 = FieldMatrix::zeros(2, 2);
        *m2.at_mut(1, 0) = Rational::one();
        let b = Operator::new(
            2,
            2,
            2,
            vec![(Monomial(vec![1, 0]), m1), (Monomial(vec![0, 1]), m2)],
        )
        .unwrap();
        let dec = decompose(&b).unwrap();
        // per the defining invariants: V2 = span e2, V0 = (span e2)^perp =
        // span e1, V1 = 0
        assert_eq!(dec.v2, vec![vec![Rational::zero(), Rational::one()]]);
        assert_eq!(dec.v0, vec![vec![Rational::one(), Rational::zero()]]);
        assert!(dec.v1.is_empty());
    }

    #[test]
    fn decompose_gradient_on_scalars() {
        let g = zoo::gradient(2, 1);
        let dec = decompose(&g).unwrap();
        assert_eq!(dec.v0.len(), 1);
        assert!(dec.v1.is_empty());
        assert!(dec.v2.is_empty());
    }

    #[test]
    fn make_spanning_keeps_div() {
        let s = make_spanning(&div_op()).unwrap();
        assert!(s.was_spanning);
        assert!(s.zero_order_rows.is_empty());
        assert_eq!(s.first_order_block.symbol(), div_op().symbol());
    }

    #[test]
    fn make_spanning_gradient_gets_identity_row() {
        let s = make_spanning(&zoo::gradient(2, 1)).unwrap();
        assert!(!s.was_spanning);
        assert_eq!(s.zero_order_rows, vec![vec![Rational::one()]]);
    }

    #[test]
    fn make_spanning_drops_redundant_zero_row() {
        use crate::multipoly::Monomial;
        // div with an extra zero row in the codomain
        let mut m1 = FieldMatrix::zeros(2, 2);
        *m1.at_mut(0, 0) = Rational::one();
        let mut m2 = FieldMatrix::zeros(2, 2);
        *m2.at_mut(0, 1) = Rational::one();
        let padded = Operator::new(
            2,
            2,
            2,
            vec![(Monomial(vec![1, 0]), m1), (Monomial(vec![0, 1]), m2)],
        )
        .unwrap();
        let s = make_spanning(&padded).unwrap();
        assert!(!s.was_spanning);
        assert_eq!(s.first_order_block.dim_codomain(), 1);
        assert_eq!(s.first_order_block.symbol(), div_op().symbol());
    }

    #[test]
    fn boundary_data_periodic_field_vanishes() {
        let traces = Traces::from_fn(256, 2, |x1, x2| {
            let s = (2.0 * std::f64::consts::PI * x1).sin()
                * (2.0 * std::f64::consts::PI * x2).cos();
            vec![s, -s]
        });
        let bd = boundary_data(&div_op(), &traces, 1e-8).unwrap();
        assert!(bd.w1.values.iter().all(|v| vec_norm(v) < 1e-12));
        assert!(bd.w2.values.iter().all(|v| vec_norm(v) < 1e-12));
        assert!(vec_norm(&bd.c1) < 1e-12 && vec_norm(&bd.c2) < 1e-12);
    }

    #[test]
    fn boundary_data_div_fixture() {
        let traces = Traces::from_fn(128, 2, linear_field);
        let bd = boundary_data(&div_op(), &traces, 1e-10).unwrap();
        // w1 = -1, w2 = +1 identically
        for v in &bd.w1.values {
            assert!((v[0] + 1.0).abs() < 1e-12);
        }
        for v in &bd.w2.values {
            assert!((v[0] - 1.0).abs() < 1e-12);
        }
        assert!((bd.c1[0] + 1.0).abs() < 1e-12);
        assert!((bd.c2[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_data_rejects_non_annihilated_field() {
        // u = (x1, 0) is not divergence free: c1 = -1, c2 = 0
        let traces = Traces::from_fn(128, 2, |x1, _| vec![x1, 0.0]);
        assert!(matches!(
            boundary_data(&div_op(), &traces, 1e-10),
            Err(PoincareError::CompatibilityViolated { .. })
        ));
    }

    #[test]
    fn corrector_s1_div_fixture_golden() {
        let maps = corrector_maps(&div_op()).unwrap();
        let traces = Traces::from_fn(128, 2, linear_field);
        let bd = boundary_data(&div_op(), &traces, 1e-10).unwrap();
        let s1 = corrector_s1(&maps, &bd, 1e-10).unwrap();
        assert!(vec_norm(&vec_sub(&s1.a12, &[0.0, 1.0])) < 1e-10);
        assert!(vec_norm(&vec_sub(&s1.a11, &[-1.0, 0.0])) < 1e-10);
        assert!(vec_norm(&s1.a22) < 1e-10);
        // div S1 u = 0 identically: apply the operator to the quadratic
        let div_s1 = apply_first_order(&div_op(), &s1.as_polyfield());
        assert!(div_s1.max_coeff() < 1e-12);
    }

    #[test]
    fn corrector_s1_zero_for_compatible_mean() {
        let maps = corrector_maps(&div_op()).unwrap();
        let traces = Traces::from_fn(128, 2, |_, _| vec![1.0, 2.0]);
        let bd = boundary_data(&div_op(), &traces, 1e-10).unwrap();
        assert!(vec_norm(&bd.c1) < 1e-13);
        let s1 = corrector_s1(&maps, &bd, 1e-10).unwrap();
        assert!(s1.is_zero(1e-13));
    }

    #[test]
    fn s1_involution_kills_corrected_integrals() {
        let maps = corrector_maps(&div_op()).unwrap();
        let traces = Traces::from_fn(256, 2, linear_field);
        let bd = boundary_data(&div_op(), &traces, 1e-10).unwrap();
        let s1 = corrector_s1(&maps, &bd, 1e-10).unwrap();
        let corrected = traces.plus_s1(&s1);
        let bd2 = boundary_data(&div_op(), &corrected, 1e-8).unwrap();
        assert!(vec_norm(&bd2.c1) < 1e-10, "c1 tilde = {:?}", bd2.c1);
        assert!(vec_norm(&bd2.c2) < 1e-10);
    }

    #[test]
    fn corrector_s2_div_fixture_golden() {
        let maps = corrector_maps(&div_op()).unwrap();
        let traces = Traces::from_fn(256, 2, linear_field);
        let bd = boundary_data(&div_op(), &traces, 1e-10).unwrap();
        let s1 = corrector_s1(&maps, &bd, 1e-10).unwrap();
        let corrected = traces.plus_s1(&s1);
        let bd2 = boundary_data(&div_op(), &corrected, 1e-8).unwrap();
        let s2 = corrector_s2(&maps, &bd2, 1e-8).unwrap();
        // S2 on Q1 vanishes; S2 on Q2 equals (-(x - x^2), 0)
        for v in &s2.q1.values {
            assert!(vec_norm(v) < 1e-8);
        }
        let m = s2.q2.segments();
        for (j, v) in s2.q2.values.iter().enumerate() {
            let x = j as f64 / m as f64;
            let expected = [-(x - x * x), 0.0];
            assert!(
                vec_norm(&vec_sub(v, &expected)) < 1e-8,
                "node {j}: {v:?} vs {expected:?}"
            );
        }
        // corners
        assert!(vec_norm(s2.q1.values.first().unwrap()) < 1e-12);
        assert!(vec_norm(s2.q1.values.last().unwrap()) < 1e-8);
        assert!(vec_norm(s2.q2.values.last().unwrap()) < 1e-8);
    }

    #[test]
    fn corrector_s2_zero_for_zero_jumps() {
        let maps = corrector_maps(&div_op()).unwrap();
        let traces = Traces::from_fn(128, 2, |x1, x2| {
            let p = (2.0 * std::f64::consts::PI * x2).cos();
            vec![p * x1.mul_add(0.0, 1.0), 0.0]
        });
        // periodic in both directions: w = 0
        let bd = boundary_data(&div_op(), &traces, 1e-8).unwrap();
        let s2 = corrector_s2(&maps, &bd, 1e-10).unwrap();
        assert!(s2.q1.values.iter().all(|v| vec_norm(v) < 1e-12));
        assert!(s2.q2.values.iter().all(|v| vec_norm(v) < 1e-12));
    }

    #[test]
    fn c_defect_decays_first_order_in_resolution() {
        // divergence-free field with curved traces, so the defect comes
        // from quadrature only: the perp gradient of x1^2 x2^2 / 2
        let upg = |x1: f64, x2: f64| vec![-x1 * x1 * x2, x1 * x2 * x2];
        let defect = |m: usize| -> f64 {
            let traces = Traces::from_fn(m, 2, upg);
            let bd = boundary_data(&div_op(), &traces, 1.0).unwrap();
            bd.c1
                .iter()
                .zip(&bd.c2)
                .map(|(a, b)| (a + b).abs())
                .fold(0.0, f64::max)
        };
        let d1 = defect(64);
        let d2 = defect(128);
        if d1 > 1e-13 {
            assert!(d1 / d2.max(1e-300) >= 2.0, "{d1} vs {d2}");
        }
        // polynomial traces of degree <= 2 are not integrated exactly by the
        // trapezoid rule, but the linear fixture is
        let traces = Traces::from_fn(64, 2, linear_field);
        let bd = boundary_data(&div_op(), &traces, 1e-12).unwrap();
        assert!((bd.c1[0] + bd.c2[0]).abs() < 1e-12);
    }
}
