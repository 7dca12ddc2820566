//! Per-frequency inversion of the symbol on the torus.
//!
//! For each nonzero integer frequency `k` the coefficient is first projected
//! onto `ker B[k]` (the domain of the multiplier; for an annihilator pair
//! this equals `Im A[k]`), then hit with `A[2 pi i k]^+ = (2 pi i)^(-1)
//! A[k]^+`. The projections and pseudo-inverses are computed exactly over
//! the rationals (the frequencies are integers), so the per-frequency
//! identity `A[2 pi i k] v(k) = u_proj(k)` holds to rounding. The zero
//! frequency is carried by a mean-zero linear polynomial `P1` with
//! `A P1 = u_0`.

use super::polyfield::{rational_to_f64, PolyField};
use super::PoincareError;
use crate::exactnum::{rat, FieldMatrix, Rational};
use crate::opcore::Operator;
use crate::spectral::{Space, TorusField};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Outcome of the torus inversion.
#[derive(Clone, Debug)]
pub struct TorusInverse {
    /// Coefficient-space potential; the zero frequency is zero.
    pub v_hat: TorusField,
    /// Mean-zero linear polynomial with `A P1 = u_0`.
    pub p1: PolyField,
    pub u0: Vec<f64>,
    /// max over k != 0 of |(I - P_ker) u_raw(k)| / max |u_raw|.
    pub raw_misalignment: f64,
    /// max over k != 0 of |B[2 pi i k] u_proj(k)| / max |u_proj| (rounding).
    pub projected_residual: f64,
    /// max over k != 0 of |A[2 pi i k] v(k) - u_proj(k)| / max |u_proj|.
    pub identity_defect: f64,
    /// Weighted coefficient norm of the raw annihilation defect:
    /// `sum_k (1 + |k|^2)^(-2) |B[2 pi i k] u_raw(k)|^2`, the discrete
    /// H^(-2) proxy.
    pub h_minus2_proxy: f64,
    /// The projected coefficient table (the `u_total` used downstream).
    pub u_proj: TorusField,
}

fn to_f64_matrix(m: &FieldMatrix<Rational>) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| rational_to_f64(m.at(i, j))).collect())
        .collect()
}

fn cmat_vec(m: &[Vec<f64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .map(|(a, b)| b * *a)
                .sum::<Complex64>()
        })
        .collect()
}

fn cnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Exact symbol at an integer frequency.
fn symbol_at_integer(op: &Operator, k: (i64, i64)) -> FieldMatrix<Rational> {
    op.symbol_at(&[rat(k.0), rat(k.1)])
}

/// Inverts the symbol per frequency. `coeffs` must hold the total
/// coefficient table of the periodified field (grid part plus edge
/// measures) in coefficient space, with `d = A.dim_codomain()` components.
pub fn torus_inverse(
    a: &Operator,
    b: &Operator,
    coeffs: &TorusField,
    mean_tol: f64,
    residual_cap: f64,
) -> Result<TorusInverse, PoincareError> {
    if coeffs.space() != Space::Coefficient {
        return Err(PoincareError::Shape(
            "torus_inverse expects a coefficient table".into(),
        ));
    }
    let d = a.dim_codomain();
    if coeffs.components() != d || b.dim_domain() != d {
        return Err(PoincareError::Shape(format!(
            "coefficient table has {} components; A maps into {}, B out of {}",
            coeffs.components(),
            d,
            b.dim_domain()
        )));
    }
    let n = coeffs.n_grid();
    let m = a.dim_domain();
    let mut v_hat = TorusField::zeros(n, m, Space::Coefficient)?;
    let mut u_proj = coeffs.clone();

    let max_raw = {
        let mut mx = 0.0f64;
        for ((i1, i2), _) in coeffs.frequencies() {
            let v: Vec<Complex64> = (0..d).map(|c| coeffs.at(c, i1, i2)).collect();
            mx = mx.max(cnorm(&v));
        }
        mx.max(f64::MIN_POSITIVE)
    };

    let mut raw_misalignment = 0.0f64;
    let mut projected_residual = 0.0f64;
    let mut identity_defect = 0.0f64;
    let mut h_proxy = 0.0f64;
    let mut worst_k = (0i64, 0i64);

    for ((i1, i2), (k1, k2)) in coeffs.frequencies() {
        if k1 == 0 && k2 == 0 {
            continue;
        }
        let u_k: Vec<Complex64> = (0..d).map(|c| coeffs.at(c, i1, i2)).collect();
        let bk = symbol_at_integer(b, (k1, k2));
        let ak = symbol_at_integer(a, (k1, k2));
        // exact kernel projection P = I - B+ B
        let b_pinv = bk.pseudo_inverse();
        let proj_exact = FieldMatrix::<Rational>::identity(d).sub(&b_pinv.mul(&bk));
        let proj = to_f64_matrix(&proj_exact);
        let u_p = cmat_vec(&proj, &u_k);
        let defect = cnorm(
            &u_k.iter()
                .zip(&u_p)
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        );
        if defect / max_raw > raw_misalignment {
            raw_misalignment = defect / max_raw;
            worst_k = (k1, k2);
        }
        // H^-2 proxy of the raw annihilation defect
        let bf = to_f64_matrix(&bk);
        let scale = 2.0 * PI;
        let b_u_raw: Vec<Complex64> = cmat_vec(&bf, &u_k)
            .into_iter()
            .map(|z| z * Complex64::new(0.0, scale))
            .collect();
        let kk = (k1 * k1 + k2 * k2) as f64;
        h_proxy += cnorm(&b_u_raw).powi(2) / (1.0 + kk).powi(2);
        // residual of the projected coefficient (rounding only)
        let b_u_proj: Vec<Complex64> = cmat_vec(&bf, &u_p)
            .into_iter()
            .map(|z| z * Complex64::new(0.0, scale))
            .collect();
        projected_residual = projected_residual.max(cnorm(&b_u_proj) / max_raw);
        // v(k) = (2 pi i)^(-1) A[k]+ u_p
        let a_pinv = to_f64_matrix(&ak.pseudo_inverse());
        let inv_2pii = Complex64::new(0.0, -1.0 / (2.0 * PI));
        let v_k: Vec<Complex64> = cmat_vec(&a_pinv, &u_p)
            .into_iter()
            .map(|z| z * inv_2pii)
            .collect();
        // identity: A[2 pi i k] v(k) = u_p
        let af = to_f64_matrix(&ak);
        let av: Vec<Complex64> = cmat_vec(&af, &v_k)
            .into_iter()
            .map(|z| z * Complex64::new(0.0, scale))
            .collect();
        let idef = cnorm(
            &av.iter()
                .zip(&u_p)
                .map(|(x, y)| x - y)
                .collect::<Vec<_>>(),
        );
        identity_defect = identity_defect.max(idef / max_raw);
        for c in 0..m {
            *v_hat.at_mut(c, i1, i2) = v_k[c];
        }
        for c in 0..d {
            *u_proj.at_mut(c, i1, i2) = u_p[c];
        }
    }
    if raw_misalignment > residual_cap {
        return Err(PoincareError::ResidualTooLarge {
            k: worst_k,
            value: raw_misalignment,
        });
    }

    // zero frequency: u0 = A P1 with P1 linear and mean zero on the square
    let u0_c: Vec<Complex64> = (0..d).map(|c| coeffs.at(c, 0, 0)).collect();
    let u0: Vec<f64> = u0_c.iter().map(|z| z.re).collect();
    let a1 = symbol_at_integer(a, (1, 0));
    let a2 = symbol_at_integer(a, (0, 1));
    let stacked = a1.hstack(&a2); // d x 2m
    let pinv = to_f64_matrix(&stacked.pseudo_inverse());
    let c_both = pinv
        .iter()
        .map(|row| row.iter().zip(&u0).map(|(a, b)| a * b).sum::<f64>())
        .collect::<Vec<f64>>();
    let (c1v, c2v) = c_both.split_at(m);
    // residual: is u0 in the image span of A?
    let stacked_f = to_f64_matrix(&stacked);
    let reproduced: Vec<f64> = stacked_f
        .iter()
        .map(|row| row.iter().zip(&c_both).map(|(a, b)| a * b).sum())
        .collect();
    let mean_residual = u0
        .iter()
        .zip(&reproduced)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let u0_norm = u0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if mean_residual > mean_tol * (1.0 + u0_norm) {
        return Err(PoincareError::MeanNotInImage(mean_residual));
    }
    // P1(x) = c1 (x1 - 1/2) + c2 (x2 - 1/2): mean zero over the square
    let mut p1 = PolyField::zero(m);
    p1.add_term((1, 0), c1v.to_vec());
    p1.add_term((0, 1), c2v.to_vec());
    let mut shift = vec![0.0; m];
    for (s, (x, y)) in shift.iter_mut().zip(c1v.iter().zip(c2v)) {
        *s = -0.5 * (x + y);
    }
    p1.add_term((0, 0), shift);
    let p1 = p1.trimmed(0.0);

    v_hat = {
        let mut vh = v_hat;
        for c in 0..m {
            *vh.at_mut(c, 0, 0) = Complex64::new(0.0, 0.0);
        }
        vh
    };
    Ok(TorusInverse {
        v_hat,
        p1,
        u0,
        raw_misalignment,
        projected_residual,
        identity_defect,
        h_minus2_proxy: h_proxy,
        u_proj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::zoo;
    use crate::spectral::{dft2, idft2};

    #[test]
    fn cosine_field_has_closed_form_potential() {
        // A = gradient on scalars, u = (cos(2 pi x1), 0) = grad of
        // sin(2 pi x1) / (2 pi)
        let n = 64;
        let f = TorusField::from_fn(n, 2, |x1, _| vec![(2.0 * PI * x1).cos(), 0.0]).unwrap();
        let c = dft2(&f).unwrap();
        let a = zoo::gradient(2, 1);
        let b = zoo::curl(2, 1);
        let out = torus_inverse(&a, &b, &c, 1e-9, 0.5).unwrap();
        assert!(out.raw_misalignment < 1e-12, "{}", out.raw_misalignment);
        assert!(out.identity_defect < 1e-12);
        let v = idft2(&out.v_hat).unwrap();
        for p1 in 0..n {
            for p2 in 0..n {
                let x1 = p1 as f64 / n as f64;
                let expected = (2.0 * PI * x1).sin() / (2.0 * PI);
                assert!(
                    (v.at(0, p1, p2).re - expected).abs() < 1e-12,
                    "node ({p1},{p2})"
                );
            }
        }
    }

    #[test]
    fn zero_field_inverts_to_zero() {
        let c = TorusField::zeros(16, 2, Space::Coefficient).unwrap();
        let out = torus_inverse(&zoo::gradient(2, 1), &zoo::curl(2, 1), &c, 1e-9, 0.5).unwrap();
        assert_eq!(out.v_hat.max_abs(), 0.0);
        assert!(out.p1.max_coeff() == 0.0);
    }

    #[test]
    fn constant_field_goes_to_linear_polynomial() {
        let n = 16;
        let f = TorusField::from_fn(n, 2, |_, _| vec![1.0, 0.0]).unwrap();
        let c = dft2(&f).unwrap();
        let out = torus_inverse(&zoo::gradient(2, 1), &zoo::curl(2, 1), &c, 1e-9, 0.5).unwrap();
        assert!(out.v_hat.max_abs() < 1e-13);
        // A P1 = e1 and P1 has mean zero: P1 = x1 - 1/2
        let g = super::super::apply_first_order(&zoo::gradient(2, 1), &out.p1);
        let at = g.eval(0.3, 0.7);
        assert!((at[0] - 1.0).abs() < 1e-12 && at[1].abs() < 1e-12);
        let mean = out.p1.eval(0.5, 0.5);
        assert!(mean[0].abs() < 1e-12);
    }

    #[test]
    fn mean_outside_image_span_is_rejected() {
        // B u = d1 u1 (stacked with nothing): A = potential with image
        // {v2 = anything, v1 from d1 psi}; a constant e1 mean cannot be hit
        // by A = perp gradient restricted example; build directly:
        // A maps scalars to (0, psi)' style so u0 = e1 is outside
        use crate::multipoly::Monomial;
        let mut m1 = FieldMatrix::zeros(2, 1);
        *m1.at_mut(1, 0) = Rational::from_integer(1.into());
        let a = Operator::new(2, 1, 2, vec![(Monomial(vec![1, 0]), m1)]).unwrap();
        // annihilator of a: B u = (d1 u1, d2 u1, d1 u2 ... ) keep simple:
        // B u = d1 u1 and d2 u1 stacked kills Im a = span e2 direction fields
        let mut b1 = FieldMatrix::zeros(2, 2);
        *b1.at_mut(0, 0) = Rational::from_integer(1.into());
        let mut b2 = FieldMatrix::zeros(2, 2);
        *b2.at_mut(1, 0) = Rational::from_integer(1.into());
        let b = Operator::new(
            2,
            2,
            2,
            vec![(Monomial(vec![1, 0]), b1), (Monomial(vec![0, 1]), b2)],
        )
        .unwrap();
        let f = TorusField::from_fn(16, 2, |_, _| vec![1.0, 0.0]).unwrap();
        let c = dft2(&f).unwrap();
        assert!(matches!(
            torus_inverse(&a, &b, &c, 1e-9, 0.5),
            Err(PoincareError::MeanNotInImage(_))
        ));
    }

    #[test]
    fn pseudo_inverse_multiplier_is_homogeneous_of_degree_minus_one() {
        use crate::exactnum::{ratio, sample_rational_point};
        use rand::{Rng, SeedableRng};
        let a = zoo::gradient(2, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..50 {
            let xi = sample_rational_point(&mut rng, 2, 7);
            let lambda = ratio(rng.gen_range(1..9), rng.gen_range(1..5));
            let ax = a.symbol_at(&xi);
            let scaled: Vec<Rational> = xi.iter().map(|x| x * lambda.clone()).collect();
            let ax_l = a.symbol_at(&scaled);
            // pinv(A[lambda xi]) = lambda^{-1} pinv(A[xi]) exactly
            let lhs = ax_l.pseudo_inverse();
            let rhs = ax.pseudo_inverse().scale(&(Rational::from_integer(1.into()) / lambda));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn potential_coefficients_avoid_the_symbol_kernel() {
        use crate::multipoly::Monomial;
        use num_traits::One;
        // A with a redundant scalar input: (psi, phi) -> (-d2 psi, d1 psi);
        // ker A[k] = span e2, so the potential must have zero phi-part
        let mut m1 = FieldMatrix::zeros(2, 2);
        *m1.at_mut(1, 0) = Rational::one();
        let mut m2 = FieldMatrix::zeros(2, 2);
        *m2.at_mut(0, 0) = -Rational::one();
        let a = Operator::new(
            2,
            2,
            2,
            vec![(Monomial(vec![1, 0]), m1), (Monomial(vec![0, 1]), m2)],
        )
        .unwrap();
        let b = crate::opcore::zoo::div(2);
        assert!(crate::opcore::compose(&b, &a).unwrap().symbol().is_zero());
        let n = 32;
        let f = TorusField::from_fn(n, 2, |x1, x2| {
            // perp gradient of sin(2 pi x1) sin(2 pi x2): divergence free
            let g1 = -2.0 * PI * (2.0 * PI * x1).sin() * (2.0 * PI * x2).cos();
            let g2 = 2.0 * PI * (2.0 * PI * x1).cos() * (2.0 * PI * x2).sin();
            vec![g1, g2]
        })
        .unwrap();
        let c = dft2(&f).unwrap();
        let out = torus_inverse(&a, &b, &c, 1e-9, 0.5).unwrap();
        assert!(out.identity_defect < 1e-11);
        for ((i1, i2), _) in out.v_hat.frequencies() {
            assert!(
                out.v_hat.at(1, i1, i2).norm() < 1e-13,
                "second component lies in ker A and must stay zero"
            );
        }
    }

    #[test]
    fn projected_coefficients_reproduce_kernel_inputs() {
        // coefficients already in ker B[k] are reproduced by A v exactly
        let n = 32;
        let f = TorusField::from_fn(n, 2, |x1, x2| {
            // gradient of sin(2 pi x1) cos(4 pi x2): curl free and periodic
            let g1 = 2.0 * PI * (2.0 * PI * x1).cos() * (4.0 * PI * x2).cos();
            let g2 = -4.0 * PI * (2.0 * PI * x1).sin() * (4.0 * PI * x2).sin();
            vec![g1, g2]
        })
        .unwrap();
        let c = dft2(&f).unwrap();
        let out = torus_inverse(&zoo::gradient(2, 1), &zoo::curl(2, 1), &c, 1e-9, 0.5).unwrap();
        assert!(out.raw_misalignment < 1e-12);
        assert!(out.identity_defect < 1e-12);
        // v_hat lives in (ker A[2 pi i k])^perp = row space of A[k]; for the
        // gradient ker A[k] = 0, nothing further to check beyond the defect
    }
}
