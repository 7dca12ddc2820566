//! Small bivariate polynomial vector fields with float coefficients: the
//! representation of the polynomial parts `P1`, `P3`, `P4` and `S1 u`.

use crate::exactnum::Rational;
use crate::opcore::Operator;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;

/// `x1^i x2^j` exponent pair.
pub type Exp2 = (u32, u32);

/// Polynomial map `R^2 -> R^k` with dense per-term coefficient vectors.
#[derive(Clone, Debug, Default)]
pub struct PolyField {
    pub components: usize,
    pub terms: BTreeMap<Exp2, Vec<f64>>,
}

impl PolyField {
    pub fn zero(components: usize) -> Self {
        Self {
            components,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, exp: Exp2, coeff: Vec<f64>) {
        assert_eq!(coeff.len(), self.components);
        let slot = self
            .terms
            .entry(exp)
            .or_insert_with(|| vec![0.0; self.components]);
        for (s, c) in slot.iter_mut().zip(&coeff) {
            *s += c;
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.components];
        for (&(i, j), c) in &self.terms {
            let w = x1.powi(i as i32) * x2.powi(j as i32);
            for (o, v) in out.iter_mut().zip(c) {
                *o += w * v;
            }
        }
        out
    }

    pub fn add(&self, other: &PolyField) -> PolyField {
        assert_eq!(self.components, other.components);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, s: f64) -> PolyField {
        let mut out = PolyField::zero(self.components);
        for (e, c) in &self.terms {
            out.add_term(*e, c.iter().map(|v| v * s).collect());
        }
        out
    }

    /// Componentwise partial derivative along axis 0 or 1.
    pub fn derivative(&self, axis: usize) -> PolyField {
        let mut out = PolyField::zero(self.components);
        for (&(i, j), c) in &self.terms {
            let (e, factor) = match axis {
                0 => {
                    if i == 0 {
                        continue;
                    }
                    ((i - 1, j), i as f64)
                }
                _ => {
                    if j == 0 {
                        continue;
                    }
                    ((i, j - 1), j as f64)
                }
            };
            out.add_term(e, c.iter().map(|v| v * factor).collect());
        }
        out
    }

    /// Largest absolute coefficient; a cheap magnitude proxy.
    pub fn max_coeff(&self) -> f64 {
        self.terms
            .values()
            .flat_map(|c| c.iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Drops terms with all coefficients below `eps`.
    pub fn trimmed(mut self, eps: f64) -> Self {
        self.terms.retain(|_, c| c.iter().any(|v| v.abs() > eps));
        self
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

/// First-order operator applied to a polynomial field, in floats:
/// `(A p)(x) = A[e1] d1 p + A[e2] d2 p` (plus the order-zero part if any).
pub fn apply_first_order(op: &Operator, p: &PolyField) -> PolyField {
    assert_eq!(op.dim_domain(), p.components, "operator domain");
    assert!(
        op.row_orders().iter().all(|&o| o <= 1),
        "first-order application"
    );
    let mut out = PolyField::zero(op.dim_codomain());
    for (alpha, m) in op.terms() {
        let deg: u32 = alpha.0.iter().sum();
        let source = match deg {
            0 => p.clone(),
            1 => {
                let axis = alpha.0.iter().position(|&e| e > 0).expect("degree 1");
                p.derivative(axis)
            }
            _ => unreachable!("guarded by row order check"),
        };
        for (e, c) in &source.terms {
            let mut mapped = vec![0.0; op.dim_codomain()];
            for (j, slot) in mapped.iter_mut().enumerate() {
                for (i, v) in c.iter().enumerate() {
                    *slot += rational_to_f64(m.at(j, i)) * v;
                }
            }
            out.add_term(*e, mapped);
        }
    }
    out
}
