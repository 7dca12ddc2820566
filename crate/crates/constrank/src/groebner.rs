//! Buchberger engine with cofactor tracking.
//!
//! Every basis element carries an explicit representation over the original
//! generators, so ideal-membership answers come with replayable coefficient
//! witnesses. Power membership (`q^m` in the ideal) and the variety-is-origin
//! test build directly on that: the only common zero of a homogeneous family
//! is the origin iff some power of every variable lies in the ideal.

pub mod zerosearch;

use crate::exactnum::{Field, GaussianRational};
use crate::multipoly::{Homogeneity, Monomial, MonomialOrder, MultiPoly};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroebnerError {
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("no exponent m <= {cap} puts q^m in the ideal (last remainder had {last_remainder_terms} terms)")]
    CapExceeded {
        cap: usize,
        last_remainder_terms: usize,
    },
    #[error("generator list is empty or holds only zero polynomials")]
    EmptyGenerators,
    #[error("generators disagree on variable count")]
    MixedArity,
}

/// Resource limits for a Buchberger run.
#[derive(Clone, Copy, Debug)]
pub struct GroebnerLimits {
    pub max_basis: usize,
    pub max_pairs: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        Self {
            max_basis: 4096,
            max_pairs: 200_000,
        }
    }
}

/// Groebner basis together with cofactors over the original generators:
/// `basis[i] = sum_j cofactors[i][j] * generators[j]`, exactly.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "MultiPoly<F>: Serialize",
    deserialize = "MultiPoly<F>: Deserialize<'de>"
))]
pub struct TrackedBasis<F: Field> {
    pub generators: Vec<MultiPoly<F>>,
    pub basis: Vec<MultiPoly<F>>,
    pub cofactors: Vec<Vec<MultiPoly<F>>>,
    pub order: MonomialOrder,
}

/// Explicit representation `target = sum_j coefficients[j] * generators[j]
/// + remainder` with the remainder fully reduced against the basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "MultiPoly<F>: Serialize",
    deserialize = "MultiPoly<F>: Deserialize<'de>"
))]
pub struct MembershipWitness<F: Field> {
    pub target: MultiPoly<F>,
    pub coefficients: Vec<MultiPoly<F>>,
    pub remainder: MultiPoly<F>,
}

impl<F: Field> MembershipWitness<F> {
    /// Re-checks the defining identity by expansion.
    pub fn verify(&self, generators: &[MultiPoly<F>]) -> bool {
        let n = self.target.nvars();
        let mut acc = MultiPoly::zero_poly(n);
        for (c, g) in self.coefficients.iter().zip(generators) {
            acc = acc.add(&c.mul(g));
        }
        acc.add(&self.remainder) == self.target
    }

    pub fn is_member(&self) -> bool {
        self.remainder.is_zero()
    }
}

/// Divides `p` by the given polynomials, tracking quotients.
/// Returns (quotients aligned with `divisors`, remainder); the invariant
/// `p = sum_k quotients[k] * divisors[k] + remainder` holds exactly and no
/// remainder term is divisible by any divisor's leading monomial.
fn divide_tracked<F: Field>(
    p: &MultiPoly<F>,
    divisors: &[MultiPoly<F>],
    order: MonomialOrder,
) -> (Vec<MultiPoly<F>>, MultiPoly<F>) {
    let n = p.nvars();
    let mut quotients = vec![MultiPoly::zero_poly(n); divisors.len()];
    let mut remainder = MultiPoly::zero_poly(n);
    let mut work = p.clone();
    let leads: Vec<Option<(Monomial, F)>> = divisors
        .iter()
        .map(|d| d.leading_term(order).map(|(m, c)| (m.clone(), c.clone())))
        .collect();
    while let Some((lm, lc)) = work.leading_term(order) {
        let lm = lm.clone();
        let lc = lc.clone();
        let hit = leads
            .iter()
            .enumerate()
            .find(|(_, l)| matches!(l, Some((m, _)) if m.divides(&lm)));
        match hit {
            Some((k, Some((dm, dc)))) => {
                let qm = dm.quotient(&lm);
                let qc = lc.div_ref(dc);
                quotients[k] = quotients[k].add(&MultiPoly::monomial_term(qm.clone(), qc.clone()));
                work = work.sub(&divisors[k].mul_term(&qm, &qc));
            }
            _ => {
                let t = MultiPoly::monomial_term(lm.clone(), lc.clone());
                remainder = remainder.add(&t);
                work = work.sub(&t);
            }
        }
    }
    (quotients, remainder)
}

impl<F: Field> TrackedBasis<F> {
    /// Asserts the cofactor identity for every basis element; used after
    /// every construction step and available to tests.
    pub fn validate(&self) -> bool {
        self.basis.iter().zip(&self.cofactors).all(|(b, row)| {
            let n = b.nvars();
            let mut acc = MultiPoly::zero_poly(n);
            for (c, g) in row.iter().zip(&self.generators) {
                acc = acc.add(&c.mul(g));
            }
            acc == *b
        })
    }
}

/// Buchberger's algorithm with the coprime-leading-term criterion and normal
/// (smallest lcm degree first) pair selection. The returned basis is reduced
/// and monic, with deterministic element order.
pub fn buchberger<F: Field>(
    generators: &[MultiPoly<F>],
    order: MonomialOrder,
    limits: GroebnerLimits,
) -> Result<TrackedBasis<F>, GroebnerError> {
    if generators.is_empty() {
        return Err(GroebnerError::EmptyGenerators);
    }
    let n = generators[0].nvars();
    if generators.iter().any(|g| g.nvars() != n) {
        return Err(GroebnerError::MixedArity);
    }

    let mut basis: Vec<MultiPoly<F>> = Vec::new();
    let mut cofactors: Vec<Vec<MultiPoly<F>>> = Vec::new();
    for (j, g) in generators.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let lc = g.leading_term(order).expect("nonzero").1.clone();
        let inv = lc.inv();
        let mut row = vec![MultiPoly::zero_poly(n); generators.len()];
        row[j] = MultiPoly::constant(n, inv.clone());
        basis.push(g.scale(&inv));
        cofactors.push(row);
    }
    if basis.is_empty() {
        return Err(GroebnerError::EmptyGenerators);
    }

    // pair queue keyed by (lcm degree, i, j) for deterministic normal selection
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let lcm_deg = |basis: &[MultiPoly<F>], i: usize, j: usize| -> u32 {
        let mi = basis[i].leading_term(order).expect("nonzero").0;
        let mj = basis[j].leading_term(order).expect("nonzero").0;
        mi.lcm(mj).degree()
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            pairs.insert((lcm_deg(&basis, i, j), i, j));
        }
    }

    let mut processed = 0usize;
    while let Some(&pair) = pairs.iter().next() {
        pairs.remove(&pair);
        let (_, i, j) = pair;
        processed += 1;
        if processed > limits.max_pairs {
            return Err(GroebnerError::ResourceCap(format!(
                "pair queue exceeded {} S-pairs",
                limits.max_pairs
            )));
        }
        let (mi, _) = basis[i].leading_term(order).expect("nonzero");
        let (mj, _) = basis[j].leading_term(order).expect("nonzero");
        if mi.is_coprime_with(mj) {
            continue; // Buchberger's first criterion
        }
        let lcm = mi.lcm(mj);
        // basis elements are monic, so the S-polynomial is
        // x^(lcm-mi) * b_i - x^(lcm-mj) * b_j
        let ui = mi.quotient(&lcm);
        let uj = mj.quotient(&lcm);
        let s = basis[i]
            .mul_term(&ui, &F::one())
            .sub(&basis[j].mul_term(&uj, &F::one()));
        let mut rep: Vec<MultiPoly<F>> = (0..cofactors[0].len())
            .map(|g| {
                cofactors[i][g]
                    .mul_term(&ui, &F::one())
                    .sub(&cofactors[j][g].mul_term(&uj, &F::one()))
            })
            .collect();
        let (quotients, remainder) = divide_tracked(&s, &basis, order);
        if remainder.is_zero() {
            continue;
        }
        for (k, q) in quotients.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for g in 0..rep.len() {
                rep[g] = rep[g].sub(&q.mul(&cofactors[k][g]));
            }
        }
        let lc = remainder.leading_term(order).expect("nonzero").1.clone();
        let inv = lc.inv();
        let new_elem = remainder.scale(&inv);
        let new_rep: Vec<MultiPoly<F>> = rep.iter().map(|r| r.scale(&inv)).collect();
        basis.push(new_elem);
        cofactors.push(new_rep);
        if basis.len() > limits.max_basis {
            return Err(GroebnerError::ResourceCap(format!(
                "basis grew beyond {} elements",
                limits.max_basis
            )));
        }
        let new_idx = basis.len() - 1;
        for k in 0..new_idx {
            pairs.insert((lcm_deg(&basis, k, new_idx), k, new_idx));
        }
    }

    let tb = inter_reduce(TrackedBasis {
        generators: generators.to_vec(),
        basis,
        cofactors,
        order,
    });
    debug_assert!(tb.validate(), "cofactor identity violated");
    debug_assert!(
        generators
            .iter()
            .all(|g| divide_tracked(g, &tb.basis, order).1.is_zero()),
        "generators must reduce to zero against their own basis"
    );
    Ok(tb)
}

/// Minimizes and tail-reduces the basis while keeping cofactors consistent.
fn inter_reduce<F: Field>(tb: TrackedBasis<F>) -> TrackedBasis<F> {
    let order = tb.order;
    // drop elements whose leading monomial is divisible by another's
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..tb.basis.len() {
        let (mi, _) = tb.basis[i].leading_term(order).expect("nonzero");
        let redundant = (0..tb.basis.len()).any(|j| {
            if i == j {
                return false;
            }
            let (mj, _) = tb.basis[j].leading_term(order).expect("nonzero");
            mj.divides(mi) && (mj != mi || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut basis: Vec<MultiPoly<F>> = keep.iter().map(|&i| tb.basis[i].clone()).collect();
    let mut cofactors: Vec<Vec<MultiPoly<F>>> =
        keep.iter().map(|&i| tb.cofactors[i].clone()).collect();
    // tail-reduce every element against the others
    for i in 0..basis.len() {
        let others: Vec<MultiPoly<F>> = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| b.clone())
            .collect();
        let (quotients, remainder) = divide_tracked(&basis[i], &others, order);
        if remainder == basis[i] {
            continue;
        }
        let mut rep = cofactors[i].clone();
        let other_idx: Vec<usize> = (0..basis.len()).filter(|&j| j != i).collect();
        for (k, q) in quotients.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let src = other_idx[k];
            for p in 0..rep.len() {
                rep[p] = rep[p].sub(&q.mul(&cofactors[src][p]));
            }
        }
        // remainder keeps the same leading term, hence stays monic
        basis[i] = remainder;
        cofactors[i] = rep;
    }
    // deterministic element order: descending leading monomial
    let mut idx: Vec<usize> = (0..basis.len()).collect();
    idx.sort_by(|&a, &b| {
        let ma = basis[a].leading_term(order).expect("nonzero").0;
        let mb = basis[b].leading_term(order).expect("nonzero").0;
        order.cmp(mb, ma)
    });
    let basis = idx.iter().map(|&i| basis[i].clone()).collect();
    let cofactors = idx.iter().map(|&i| cofactors[i].clone()).collect();
    TrackedBasis {
        generators: tb.generators,
        basis,
        cofactors,
        order: tb.order,
    }
}

/// Fully reduces `p` against the tracked basis; the witness coefficients are
/// rewritten to the original generators through the cofactors.
pub fn reduce<F: Field>(p: &MultiPoly<F>, tb: &TrackedBasis<F>) -> MembershipWitness<F> {
    let n = p.nvars();
    let (quotients, remainder) = divide_tracked(p, &tb.basis, tb.order);
    let mut coefficients = vec![MultiPoly::zero_poly(n); tb.generators.len()];
    for (k, q) in quotients.iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        for g in 0..coefficients.len() {
            coefficients[g] = coefficients[g].add(&q.mul(&tb.cofactors[k][g]));
        }
    }
    let w = MembershipWitness {
        target: p.clone(),
        coefficients,
        remainder,
    };
    debug_assert!(w.verify(&tb.generators));
    w
}

/// Plain reduction without coefficient assembly, for callers that only need
/// the remainder (rank certification loops over many minors).
pub fn reduce_remainder_only<F: Field>(p: &MultiPoly<F>, tb: &TrackedBasis<F>) -> MultiPoly<F> {
    divide_tracked(p, &tb.basis, tb.order).1
}

/// Smallest `m` in `0..=cap` with `q^m` in the ideal of the generators,
/// together with exact coefficients over the original generators.
/// `m = 0` means the ideal contains 1.
pub fn power_membership<F: Field>(
    q: &MultiPoly<F>,
    tb: &TrackedBasis<F>,
    cap: usize,
) -> Result<(usize, Vec<MultiPoly<F>>), GroebnerError> {
    assert!(!q.is_zero(), "power membership of the zero polynomial");
    let n = q.nvars();
    let mut qm = MultiPoly::one_poly(n);
    let mut last_terms = 0usize;
    for m in 0..=cap {
        let w = reduce(&qm, tb);
        if w.is_member() {
            return Ok((m, w.coefficients));
        }
        last_terms = w.remainder.num_terms();
        qm = qm.mul(q);
    }
    Err(GroebnerError::CapExceeded {
        cap,
        last_remainder_terms: last_terms,
    })
}

/// Default power-membership cap: scales with the generator degrees and the
/// variable count; practical instances stay in single digits.
pub fn default_cap<F: Field>(gens: &[MultiPoly<F>]) -> usize {
    let max_deg = gens
        .iter()
        .filter_map(MultiPoly::total_degree)
        .max()
        .unwrap_or(1)
        .max(1) as usize;
    let n = gens.first().map_or(1, MultiPoly::nvars).max(1);
    4 * max_deg * n
}

/// Outcome of the variety-is-origin test on a homogeneous family.
#[derive(Clone, Debug)]
pub enum VarietyOutcome {
    /// Certified: the ideal contains `xi_a^{exponents[a]}` for every `a`,
    /// so the only common zero is the origin.
    OnlyOrigin { exponents: Vec<usize> },
    /// A verified nonzero common zero.
    NonzeroZero { point: Vec<GaussianRational> },
    /// Cap exhausted on some variable and no counterexample found.
    Undetermined { failing_variable: usize },
}

impl VarietyOutcome {
    pub fn is_origin(&self) -> bool {
        matches!(self, VarietyOutcome::OnlyOrigin { .. })
    }
}

/// Decides whether the only common zero of the (componentwise homogeneous)
/// generators is the origin. Zero generators are ignored. Soundness rule:
/// cap exhaustion degrades to `Undetermined`, never to a verdict.
pub fn variety_is_origin(
    gens: &[MultiPoly<GaussianRational>],
    order: MonomialOrder,
    cap: usize,
    seed: u64,
) -> Result<VarietyOutcome, GroebnerError> {
    let nonzero: Vec<MultiPoly<GaussianRational>> =
        gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let n = gens.first().map(MultiPoly::nvars).unwrap_or(0);
    if nonzero.is_empty() {
        // every point is a common zero
        let mut e1 = vec![GaussianRational::zero(); n.max(1)];
        e1[0] = GaussianRational::one();
        return Ok(VarietyOutcome::NonzeroZero { point: e1 });
    }
    for g in &nonzero {
        debug_assert!(
            !matches!(g.homogeneity(), Homogeneity::Inhomogeneous),
            "variety_is_origin expects homogeneous generators"
        );
    }
    let tb = buchberger(&nonzero, order, GroebnerLimits::default())?;
    let mut exponents = Vec::with_capacity(n);
    for a in 0..n {
        let var = MultiPoly::variable(n, a);
        match power_membership(&var, &tb, cap) {
            Ok((m, _)) => exponents.push(m),
            Err(GroebnerError::CapExceeded { .. }) => {
                if let Some(point) = zerosearch::find_common_zero(&nonzero, seed, 200) {
                    return Ok(VarietyOutcome::NonzeroZero { point });
                }
                return Ok(VarietyOutcome::Undetermined {
                    failing_variable: a,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(VarietyOutcome::OnlyOrigin { exponents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::sample_gaussian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type GPoly = MultiPoly<GaussianRational>;

    fn g1() -> GaussianRational {
        GaussianRational::from_parts(1, 0)
    }

    fn xi(n: usize, i: usize) -> GPoly {
        GPoly::variable(n, i)
    }

    /// x1^2 + x2^2 and x1 x2 in two variables.
    fn cross_ideal() -> Vec<GPoly> {
        vec![
            xi(2, 0).mul(&xi(2, 0)).add(&xi(2, 1).mul(&xi(2, 1))),
            xi(2, 0).mul(&xi(2, 1)),
        ]
    }

    #[test]
    fn already_a_basis_is_kept() {
        let gens = vec![xi(2, 0), xi(2, 1)];
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        assert_eq!(tb.basis, gens);
        assert!(tb.validate());
    }

    #[test]
    fn single_generator_basis() {
        let gens = vec![xi(2, 0).mul(&xi(2, 0))];
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        assert_eq!(tb.basis, gens);
    }

    #[test]
    fn cross_ideal_membership_matches_manual_division() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        assert!(tb.validate());
        // manual transcripts, each checked by expansion:
        //   x1^3    = x1 * (x1^2 + x2^2) - x2 * (x1 x2)
        //   x2^3    = x2 * (x1^2 + x2^2) - x1 * (x1 x2)
        //   x1^2 x2 = x1 * (x1 x2)
        for p in [
            xi(2, 0).pow(3),
            xi(2, 1).pow(3),
            xi(2, 0).pow(2).mul(&xi(2, 1)),
        ] {
            let w = reduce(&p, &tb);
            assert!(w.is_member(), "{p:?} must be in the ideal");
            assert!(w.verify(&gens));
        }
        // x1 and the constant 1 are not members
        assert!(!reduce(&xi(2, 0), &tb).is_member());
        assert!(!reduce(&GPoly::one_poly(2), &tb).is_member());
    }

    #[test]
    fn reduce_of_generator_gives_unit_coefficients() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let w = reduce(&gens[0], &tb);
        assert!(w.is_member());
        assert_eq!(w.coefficients[0], GPoly::one_poly(2));
        assert!(w.coefficients[1].is_zero());
    }

    #[test]
    fn reduce_one_against_maximal_ideal() {
        let gens = vec![xi(2, 0), xi(2, 1)];
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let w = reduce(&GPoly::one_poly(2), &tb);
        assert_eq!(w.remainder, GPoly::one_poly(2));
    }

    #[test]
    fn reduce_x1_cubed_recovers_pinned_coefficients() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let w = reduce(&xi(2, 0).pow(3), &tb);
        assert!(w.is_member());
        assert_eq!(w.coefficients[0], xi(2, 0));
        assert_eq!(w.coefficients[1], xi(2, 1).neg());
        assert!(w.verify(&gens));
    }

    #[test]
    fn power_membership_cross_ideal() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let (m, coeffs) = power_membership(&xi(2, 0), &tb, 10).unwrap();
        assert_eq!(m, 3);
        assert_eq!(coeffs[0], xi(2, 0));
        assert_eq!(coeffs[1], xi(2, 1).neg());
        // minimality: q^(m-1) does not reduce to zero
        assert!(!reduce(&xi(2, 0).pow(2), &tb).is_member());
    }

    #[test]
    fn power_membership_member_is_one() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let q = gens[0].clone();
        let (m, _) = power_membership(&q, &tb, 10).unwrap();
        assert_eq!(m, 1);
    }

    #[test]
    fn power_membership_cap_exceeded() {
        let gens = vec![xi(2, 1)];
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        assert!(matches!(
            power_membership(&xi(2, 0), &tb, 5),
            Err(GroebnerError::CapExceeded { cap: 5, .. })
        ));
    }

    #[test]
    fn variety_of_coordinate_ideal_is_origin() {
        let gens = vec![xi(2, 0), xi(2, 1)];
        let out = variety_is_origin(&gens, MonomialOrder::GrevLex, 8, crate::DEFAULT_SEED).unwrap();
        match out {
            VarietyOutcome::OnlyOrigin { exponents } => assert_eq!(exponents, vec![1, 1]),
            other => panic!("expected origin, got {other:?}"),
        }
    }

    #[test]
    fn isotropic_cone_is_not_origin() {
        // x1^2 + x2^2 vanishes on the line through (1, i)
        let gens = vec![cross_ideal()[0].clone()];
        let out = variety_is_origin(&gens, MonomialOrder::GrevLex, 8, crate::DEFAULT_SEED).unwrap();
        match out {
            VarietyOutcome::NonzeroZero { point } => {
                for g in &gens {
                    assert!(g.evaluate(&point).unwrap().is_zero());
                }
                assert!(point.iter().any(|z| !z.is_zero()));
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn cross_ideal_variety_is_origin() {
        let out = variety_is_origin(
            &cross_ideal(),
            MonomialOrder::GrevLex,
            16,
            crate::DEFAULT_SEED,
        )
        .unwrap();
        assert!(out.is_origin(), "got {out:?}");
    }

    #[test]
    fn membership_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..12 {
            let mut gens = Vec::new();
            for _ in 0..2 {
                let mut p = GPoly::zero_poly(2);
                for _ in 0..2 {
                    let m = Monomial(vec![rng.gen_range(0..3u32), rng.gen_range(0..3u32)]);
                    p = p.add(&GPoly::monomial_term(m, sample_gaussian(&mut rng, 3, 2)));
                }
                if !p.is_zero() {
                    gens.push(p);
                }
            }
            if gens.is_empty() {
                continue;
            }
            let tb1 = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
            let tb2 = buchberger(&gens, MonomialOrder::Lex, GroebnerLimits::default()).unwrap();
            for _ in 0..6 {
                let m = Monomial(vec![rng.gen_range(0..4u32), rng.gen_range(0..4u32)]);
                let p = GPoly::monomial_term(m, g1());
                assert_eq!(
                    reduce(&p, &tb1).is_member(),
                    reduce(&p, &tb2).is_member(),
                    "membership must not depend on the monomial order"
                );
            }
        }
    }

    #[test]
    fn tracked_basis_and_witness_serialize_round_trip() {
        let gens = cross_ideal();
        let tb = buchberger(&gens, MonomialOrder::GrevLex, GroebnerLimits::default()).unwrap();
        let js = serde_json::to_string(&tb).unwrap();
        let back: TrackedBasis<GaussianRational> = serde_json::from_str(&js).unwrap();
        assert_eq!(back.basis, tb.basis);
        assert!(back.validate());
        let w = reduce(&xi(2, 0).pow(3), &tb);
        let js = serde_json::to_string(&w).unwrap();
        let back: MembershipWitness<GaussianRational> = serde_json::from_str(&js).unwrap();
        assert!(back.verify(&gens));
    }

    #[test]
    fn certified_origin_has_no_random_common_zero() {
        let gens = cross_ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(crate::DEFAULT_SEED);
        for _ in 0..1000 {
            let p = crate::exactnum::sample_gaussian_point(&mut rng, 2, 4);
            let all_vanish = gens.iter().all(|g| g.evaluate(&p).unwrap().is_zero());
            assert!(!all_vanish, "found unexpected common zero {p:?}");
        }
    }
}
