//! Certificates for the row-module inclusion behind annihilator relations:
//! given a constant-rank system `sum_i p_ij(xi) v_i = 0` whose solutions all
//! satisfy `sum_i b_i(xi) v_i = 0`, produce polynomials `h_j` and an `m >= 0`
//! with the exact identity `q^m b_i = sum_j h_j p_ij` for every `i`.
//!
//! Construction: the minimal `m` is found by scanning ideal membership of
//! `q^m * sum_i b_i v_i` in the ideal of the system rows inside the extended
//! ring with the `v`-variables adjoined (membership there is equivalent to
//! row-module membership because everything is linear in `v`). Alongside,
//! the minor machinery is assembled for provenance: `q^power` is written
//! over the rank-sized minors `det(M_IJ)` with cofactors `g_IJ`, the
//! modified determinants `det(M_IJ^gamma)` replace one column by `b`, and
//! the exchange identity
//! `sum_gamma p_(i j(gamma)) det(M_IJ^gamma) = b_i det(M_IJ)` is asserted
//! exactly for every `i, I, J` before a certificate is returned.

use crate::crank::{self, Constancy, CrankConfig};
use crate::exactnum::{sample_gaussian_point, GaussianRational};
use crate::groebner::{self, GroebnerError, GroebnerLimits, TrackedBasis};
use crate::multipoly::{det_bareiss, Homogeneity, Monomial, MonomialOrder, MultiPoly};
use crate::opcore::SymbolMatrix;
use itertools::Itertools;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type G = GaussianRational;
type GPoly = MultiPoly<G>;

#[derive(Debug, Error)]
pub enum NullsatzError {
    #[error("the system does not have constant rank over C: {0}")]
    ConstantRankViolated(String),
    #[error("kernel inclusion fails at a sample point (the b-row does not vanish on the solution space)")]
    InclusionViolated {
        xi: Vec<G>,
        v: Vec<G>,
    },
    #[error("certificate cap {0} exhausted")]
    CapExceeded(usize),
    #[error("q must be homogeneous of degree >= 1, got {0:?}")]
    BadMultiplier(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error("rank analysis failed: {0}")]
    Crank(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// The system `sum_i p_ij v_i = 0` with its rank-sized minors.
///
/// Orientation: the system matrix is `d x l` with `p_ij` indexed
/// by (domain component `i`, equation `j`); operator symbols arrive in the
/// transposed `l x d` layout (equations as rows), and this type stores that
/// transposed form, exposing `p(i, j)`. Index sets `I` pick `r` of the `d`
/// domain components, `J` picks `r` of the `l` equations; duplicates among
/// the minors are kept so the certificate formulas can sum over all of
/// `I x J` literally.
#[derive(Clone, Debug)]
pub struct MinorSystem {
    /// Equations as rows (`l x d`).
    pub sys: SymbolMatrix,
    pub rank: usize,
    pub i_sets: Vec<Vec<usize>>,
    pub j_sets: Vec<Vec<usize>>,
    /// `minors[a][b] = det(M_(I_a, J_b))`.
    pub minors: Vec<Vec<GPoly>>,
}

impl MinorSystem {
    pub fn new(sys: &SymbolMatrix, rank: usize) -> Self {
        let d = sys.cols();
        let l = sys.rows();
        let i_sets: Vec<Vec<usize>> = (0..d).combinations(rank).collect();
        let j_sets: Vec<Vec<usize>> = (0..l).combinations(rank).collect();
        let minors = i_sets
            .iter()
            .map(|iset| {
                j_sets
                    .iter()
                    // rows of `sys` are equations, so det(M_IJ) = det over
                    // (J rows, I cols); transposition leaves minors equal
                    .map(|jset| sys.minor(jset, iset))
                    .collect()
            })
            .collect();
        Self {
            sys: sys.clone(),
            rank,
            i_sets,
            j_sets,
            minors,
        }
    }

    pub fn nvars(&self) -> usize {
        self.sys.nvars()
    }

    /// `p_ij` in the component-major system orientation.
    pub fn p(&self, i: usize, j: usize) -> &GPoly {
        self.sys.entry(j, i)
    }

    pub fn dim_domain(&self) -> usize {
        self.sys.cols()
    }

    pub fn equations(&self) -> usize {
        self.sys.rows()
    }

    /// Determinant of `M_IJ` with column `gamma` replaced by
    /// `(b_(i(beta)))_beta`.
    pub fn modified_det(&self, iset: &[usize], jset: &[usize], gamma: usize, b: &[GPoly]) -> GPoly {
        let r = iset.len();
        if r == 0 {
            return GPoly::one_poly(self.nvars());
        }
        let rows: Vec<Vec<GPoly>> = iset
            .iter()
            .map(|&i| {
                (0..r)
                    .map(|g| {
                        if g == gamma {
                            b[i].clone()
                        } else {
                            self.p(i, jset[g]).clone()
                        }
                    })
                    .collect()
            })
            .collect();
        det_bareiss(&rows, MonomialOrder::GrevLex)
    }

    /// Flat minor list in `(I, J)` enumeration order (J fastest).
    pub fn minor_list(&self) -> Vec<GPoly> {
        self.minors.iter().flatten().cloned().collect()
    }
}

/// One `g_IJ` cofactor from the power identity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndexedPoly {
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub poly: GPoly,
}

/// One modified determinant `det(M_IJ^gamma)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModifiedDet {
    pub i_set: Vec<usize>,
    pub j_set: Vec<usize>,
    pub gamma: usize,
    pub poly: GPoly,
}

/// Replayable construction data: the minor representation of `q^power` and
/// the column-replaced determinants that assemble the proof-style `h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub rank: usize,
    pub power: usize,
    pub g: Vec<IndexedPoly>,
    pub modified_dets: Vec<ModifiedDet>,
}

/// The certificate data `(q, m, h_1..h_l)` with provenance. The defining
/// identity `q^m b_i = sum_j h_j p_ij` holds exactly for every `i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub q: GPoly,
    pub m: usize,
    pub h: Vec<GPoly>,
    pub provenance: Provenance,
}

/// Precomputed state for certifying many rows against one system.
pub struct RowCertifier {
    minor_system: MinorSystem,
    /// Tracked basis of the system rows in the extended ring with the
    /// `v`-variables adjoined.
    extended_basis: TrackedBasis<G>,
    crank_cfg: CrankConfig,
}

/// Lifts an `n`-variable polynomial into the extended ring with `extra`
/// fresh variables appended.
fn extend_vars(p: &GPoly, extra: usize) -> GPoly {
    let n = p.nvars();
    GPoly::from_terms(
        n + extra,
        p.terms().map(|(m, c)| {
            let mut e = m.0.clone();
            e.extend(std::iter::repeat_n(0, extra));
            (Monomial(e), c.clone())
        }),
    )
}

/// Extracts the `v`-free part of a coefficient polynomial in the extended
/// ring (the graded piece that matters for linear-in-`v` identities).
fn v_free_part(p: &GPoly, n: usize) -> GPoly {
    let total = p.nvars();
    let mut out = GPoly::zero_poly(n);
    for (m, c) in p.terms() {
        if m.0[n..total].iter().all(|&e| e == 0) {
            out = out.add(&GPoly::monomial_term(Monomial(m.0[..n].to_vec()), c.clone()));
        }
    }
    out
}

impl RowCertifier {
    /// Validates the constant-rank hypothesis and prepares the extended-ring
    /// basis and minor system. `sys` has equations as rows (`l x d`).
    pub fn new(sys: &SymbolMatrix, cfg: &CrankConfig) -> Result<Self, NullsatzError> {
        let report = crank::is_constant_rank_c(sys, cfg)
            .map_err(|e| NullsatzError::Crank(e.to_string()))?;
        match report.constant_over_c {
            Constancy::Yes => {}
            Constancy::No { witness } => {
                return Err(NullsatzError::ConstantRankViolated(format!(
                    "rank drops at {witness:?}"
                )))
            }
            Constancy::Undetermined { reason } => {
                return Err(NullsatzError::ConstantRankViolated(format!(
                    "undetermined: {reason}"
                )))
            }
        }
        let minor_system = MinorSystem::new(sys, report.generic_rank);
        let n = sys.nvars();
        let d = sys.cols();
        // R_j(xi, v) = sum_i p_ij v_i
        let row_polys: Vec<GPoly> = (0..sys.rows())
            .map(|j| {
                let mut acc = GPoly::zero_poly(n + d);
                for i in 0..d {
                    let p = extend_vars(sys.entry(j, i), d);
                    let v = GPoly::variable(n + d, n + i);
                    acc = acc.add(&p.mul(&v));
                }
                acc
            })
            .collect();
        let extended_basis = groebner::buchberger(
            &row_polys,
            MonomialOrder::GrevLex,
            GroebnerLimits::default(),
        )?;
        Ok(Self {
            minor_system,
            extended_basis,
            crank_cfg: *cfg,
        })
    }

    pub fn minor_system(&self) -> &MinorSystem {
        &self.minor_system
    }

    pub fn rank(&self) -> usize {
        self.minor_system.rank
    }

    /// Checks the kernel-inclusion hypothesis at seeded random complex
    /// points: every solution of the system must annihilate the `b`-row.
    pub fn check_inclusion(&self, b: &[GPoly], samples: usize) -> Result<(), NullsatzError> {
        let n = self.minor_system.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(self.crank_cfg.seed ^ 0xb0b);
        for _ in 0..samples {
            let xi = sample_gaussian_point(&mut rng, n, 6);
            let mat = self.minor_system.sys.evaluate(&xi);
            for v in mat.kernel_basis() {
                let mut acc = G::zero();
                for (i, vi) in v.iter().enumerate() {
                    acc = acc + vi.clone() * b[i].evaluate(&xi).expect("arity");
                }
                if !acc.is_zero() {
                    return Err(NullsatzError::InclusionViolated { xi, v });
                }
            }
        }
        Ok(())
    }

    /// Builds a certificate for the row `b` and multiplier `q`.
    pub fn certify(&self, b: &[GPoly], q: &GPoly, cap: usize) -> Result<Certificate, NullsatzError> {
        let n = self.minor_system.nvars();
        let d = self.minor_system.dim_domain();
        let l = self.minor_system.equations();
        if b.len() != d {
            return Err(NullsatzError::Shape(format!(
                "b has {} entries, the system has {} domain components",
                b.len(),
                d
            )));
        }
        match q.homogeneity() {
            Homogeneity::Homogeneous(k) if k >= 1 => {}
            other => return Err(NullsatzError::BadMultiplier(format!("{other:?}"))),
        }
        self.check_inclusion(b, 50)?;

        let r = self.minor_system.rank;
        if r == 0 {
            // the system vanishes identically; inclusion forces b = 0
            if let Some(bad) = b.iter().position(|p| !p.is_zero()) {
                let ms = &self.minor_system;
                let mut rng = ChaCha8Rng::seed_from_u64(self.crank_cfg.seed);
                loop {
                    let xi = sample_gaussian_point(&mut rng, n, 6);
                    if !b[bad].evaluate(&xi).expect("arity").is_zero() {
                        let mut v = vec![G::zero(); ms.dim_domain()];
                        v[bad] = G::one();
                        return Err(NullsatzError::InclusionViolated { xi, v });
                    }
                }
            }
            return Ok(Certificate {
                q: q.clone(),
                m: 0,
                h: vec![GPoly::zero_poly(n); l],
                provenance: Provenance {
                    rank: 0,
                    power: 0,
                    g: vec![IndexedPoly {
                        i_set: vec![],
                        j_set: vec![],
                        poly: GPoly::one_poly(n),
                    }],
                    modified_dets: Vec::new(),
                },
            });
        }

        // provenance: q^power over the minors, modified determinants, and
        // the proof-style h (asserted via the exchange identity)
        let minor_list = self.minor_system.minor_list();
        let minor_basis = groebner::buchberger(
            &minor_list,
            MonomialOrder::GrevLex,
            GroebnerLimits::default(),
        )?;
        let (power, g_flat) = groebner::power_membership(q, &minor_basis, cap)
            .map_err(|e| match e {
                GroebnerError::CapExceeded { cap, .. } => NullsatzError::CapExceeded(cap),
                other => NullsatzError::Groebner(other),
            })?;
        let ms = &self.minor_system;
        let mut g = Vec::new();
        let mut modified_dets = Vec::new();
        let mut flat = 0usize;
        for iset in &ms.i_sets {
            for jset in &ms.j_sets {
                g.push(IndexedPoly {
                    i_set: iset.clone(),
                    j_set: jset.clone(),
                    poly: g_flat[flat].clone(),
                });
                flat += 1;
                for gamma in 0..r {
                    modified_dets.push(ModifiedDet {
                        i_set: iset.clone(),
                        j_set: jset.clone(),
                        gamma,
                        poly: ms.modified_det(iset, jset, gamma, b),
                    });
                }
            }
        }
        // exchange identity (column replacement vs. scaling by b):
        // sum_gamma p_(i j(gamma)) det(M_IJ^gamma) = b_i det(M_IJ), exactly
        for (a, iset) in ms.i_sets.iter().enumerate() {
            for (bj, jset) in ms.j_sets.iter().enumerate() {
                for i in 0..d {
                    let mut lhs = GPoly::zero_poly(n);
                    for gamma in 0..r {
                        let md = modified_dets
                            .iter()
                            .find(|m| {
                                m.i_set == *iset && m.j_set == *jset && m.gamma == gamma
                            })
                            .expect("just built");
                        lhs = lhs.add(&ms.p(i, jset[gamma]).mul(&md.poly));
                    }
                    let rhs = b[i].mul(&ms.minors[a][bj]);
                    if lhs != rhs {
                        return Err(NullsatzError::Internal(format!(
                            "exchange identity failed at i={i}, I={iset:?}, J={jset:?}"
                        )));
                    }
                }
            }
        }
        let h_proof: Vec<GPoly> = (0..l)
            .map(|j| {
                let mut acc = GPoly::zero_poly(n);
                for item in &g {
                    for gamma in 0..r {
                        if item.j_set[gamma] != j {
                            continue;
                        }
                        let md = modified_dets
                            .iter()
                            .find(|m| {
                                m.i_set == item.i_set && m.j_set == item.j_set && m.gamma == gamma
                            })
                            .expect("just built");
                        acc = acc.add(&item.poly.mul(&md.poly));
                    }
                }
                acc
            })
            .collect();
        if !identity_holds(ms, b, q, power, &h_proof) {
            return Err(NullsatzError::Internal(
                "proof-style certificate failed the defining identity".into(),
            ));
        }

        // minimal m by membership of q^m * B(xi, v) in the extended ring
        let v_polys: Vec<GPoly> = (0..d).map(|i| GPoly::variable(n + d, n + i)).collect();
        let mut b_ext = GPoly::zero_poly(n + d);
        for (i, bi) in b.iter().enumerate() {
            b_ext = b_ext.add(&extend_vars(bi, d).mul(&v_polys[i]));
        }
        let q_ext = extend_vars(q, d);
        let mut target = b_ext.clone();
        let mut chosen: Option<(usize, Vec<GPoly>)> = None;
        for m in 0..=power {
            let w = groebner::reduce(&target, &self.extended_basis);
            if w.is_member() {
                let h: Vec<GPoly> = w
                    .coefficients
                    .iter()
                    .map(|c| v_free_part(c, n))
                    .collect();
                if identity_holds(ms, b, q, m, &h) {
                    chosen = Some((m, h));
                    break;
                }
            }
            target = target.mul(&q_ext);
        }
        let (m, h) = match chosen {
            Some(pair) => pair,
            // the proof-style pair always satisfies the identity
            None => (power, h_proof.clone()),
        };
        Ok(Certificate {
            q: q.clone(),
            m,
            h,
            provenance: Provenance {
                rank: r,
                power,
                g,
                modified_dets,
            },
        })
    }
}

/// Exact check of `q^m b_i = sum_j h_j p_ij` for all `i`.
fn identity_holds(ms: &MinorSystem, b: &[GPoly], q: &GPoly, m: usize, h: &[GPoly]) -> bool {
    let qm = q.pow(m);
    for i in 0..ms.dim_domain() {
        let lhs = qm.mul(&b[i]);
        let mut rhs = GPoly::zero_poly(ms.nvars());
        for (j, hj) in h.iter().enumerate() {
            rhs = rhs.add(&hj.mul(ms.p(i, j)));
        }
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// One-shot certification; `sys` holds the equations as rows (`l x d`).
pub fn certify_row(
    sys: &SymbolMatrix,
    b: &[GPoly],
    q: &GPoly,
    cap: usize,
    cfg: &CrankConfig,
) -> Result<Certificate, NullsatzError> {
    RowCertifier::new(sys, cfg)?.certify(b, q, cap)
}

/// Outcome of re-verifying a certificate against its system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<GPoly>,
    pub power_identity_ok: bool,
}

/// Replays a certificate: the defining identity by exact expansion, plus the
/// provenance identity `q^power = sum g_IJ det(M_IJ)` with minors recomputed
/// from the system.
pub fn verify_certificate(sys: &SymbolMatrix, b: &[GPoly], cert: &Certificate) -> VerifyOutcome {
    let n = sys.nvars();
    let d = sys.cols();
    let qm = cert.q.pow(cert.m);
    let mut failing_index = None;
    let mut difference = None;
    for i in 0..d {
        let lhs = qm.mul(&b[i]);
        let mut rhs = GPoly::zero_poly(n);
        for (j, hj) in cert.h.iter().enumerate() {
            rhs = rhs.add(&hj.mul(sys.entry(j, i)));
        }
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            failing_index = Some(i);
            difference = Some(diff);
            break;
        }
    }
    // provenance: recompute each minor from the system
    let ms = MinorSystem::new(sys, cert.provenance.rank);
    let mut power_rhs = GPoly::zero_poly(n);
    for item in &cert.provenance.g {
        let minor = if item.i_set.is_empty() {
            GPoly::one_poly(n)
        } else {
            ms.sys.minor(&item.j_set, &item.i_set)
        };
        power_rhs = power_rhs.add(&item.poly.mul(&minor));
    }
    let power_identity_ok = cert.q.pow(cert.provenance.power) == power_rhs;
    VerifyOutcome {
        ok: failing_index.is_none() && power_identity_ok,
        failing_index,
        difference,
        power_identity_ok,
    }
}
