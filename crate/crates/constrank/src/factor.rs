//! Factorization through iterated gradients and the symbol-kernel-equality
//! decision.
//!
//! If every complex phase kernel of `A1` sits inside the kernel of `A2` and
//! `A1` has constant rank over C, each codomain row of `A2` certifies against
//! the `A1`-system with multiplier `xi_a`, giving exponents `N(a, m)`; with
//! `k = n * max N(a, m)` every monomial of degree `k` rewrites through one of
//! those certificates and the operator identity `grad^k . A2 = B . A1` holds
//! exactly. Kernel equality of two symbols is decided through certificates in
//! both directions (or scalar radical membership when the unknown is scalar),
//! and a negative verdict always carries an exact witness pair, from which a
//! family of plane waves separating the two nullspaces is built.

use crate::crank::{self, Constancy, CrankConfig};
use crate::exactnum::{sample_gaussian_point, FieldMatrix, GaussianRational};
use crate::groebner::{self, zerosearch, GroebnerError, GroebnerLimits};
use crate::multipoly::{MonomialOrder, MultiPoly};
use crate::nullsatz::{Certificate, NullsatzError, RowCertifier};
use crate::opcore::{nabla_compose, OpError, Operator, SymbolMatrix};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type G = GaussianRational;
type GPoly = MultiPoly<G>;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("{operator} does not have certified constant rank over C ({detail})")]
    ConstantRankViolated { operator: String, detail: String },
    #[error("kernel inclusion fails: at the witness point the first symbol kills v but the second does not")]
    InclusionViolated { xi: Vec<G>, v: Vec<G> },
    #[error("certificate cap {0} exhausted")]
    CapExceeded(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Nullsatz(#[from] NullsatzError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("rank analysis failed: {0}")]
    Crank(String),
    #[error("no witness is constructible: the verdict is {0}")]
    NoWitness(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug)]
pub struct FactorConfig {
    pub seed: u64,
    pub cap: Option<usize>,
    /// Require constant rank over C for both operators (the corollary's
    /// hypothesis); non-strict mode checks only the factored-through side.
    pub strict: bool,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            cap: None,
            strict: true,
        }
    }
}

/// Successful factorization `grad^k_tilde . a2 = b_op . a1`, with the
/// per-row, per-variable certificates that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub k_tilde: usize,
    pub b_op: Operator,
    /// `exponents[m][a] = N(a, m)`: the certified power of `xi_(a+1)` for
    /// codomain row `m` of `a2`.
    pub exponents: Vec<Vec<usize>>,
    pub certificates: Vec<Vec<Certificate>>,
}

fn ensure_constant_rank(
    op: &Operator,
    label: &str,
    cfg: &CrankConfig,
) -> Result<crank::RankReport, FactorError> {
    let report = crank::is_constant_rank_c(&op.symbol(), cfg)
        .map_err(|e| FactorError::Crank(e.to_string()))?;
    match &report.constant_over_c {
        Constancy::Yes => Ok(report),
        Constancy::No { witness } => Err(FactorError::ConstantRankViolated {
            operator: label.to_string(),
            detail: format!("rank drops at {witness:?}"),
        }),
        Constancy::Undetermined { reason } => Err(FactorError::ConstantRankViolated {
            operator: label.to_string(),
            detail: format!("undetermined: {reason}"),
        }),
    }
}

/// Verifies `ker a1[xi] subset ker a2[xi]` at the coordinate directions and
/// seeded random complex points; returns the first verified counterexample.
fn check_inclusion(
    s1: &SymbolMatrix,
    s2: &SymbolMatrix,
    seed: u64,
    samples: usize,
) -> Result<(), FactorError> {
    let n = s1.nvars();
    let mut points: Vec<Vec<G>> = (0..n)
        .map(|a| {
            let mut p = vec![G::zero(); n];
            p[a] = G::one();
            p
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfac);
    for _ in 0..samples {
        points.push(sample_gaussian_point(&mut rng, n, 6));
    }
    for xi in points {
        let m1 = s1.evaluate(&xi);
        let m2 = s2.evaluate(&xi);
        for v in m1.kernel_basis() {
            if !m2.mul_vec(&v).iter().all(Zero::is_zero) {
                return Err(FactorError::InclusionViolated { xi, v });
            }
        }
    }
    Ok(())
}

/// Factors `a2` through `a1`: finds `k_tilde` and `b_op` with
/// `grad^k_tilde . a2 = b_op . a1` as an exact symbol identity.
pub fn factor_through(
    a1: &Operator,
    a2: &Operator,
    cfg: &FactorConfig,
) -> Result<FactorizationResult, FactorError> {
    if a1.space_dim() != a2.space_dim() || a1.dim_domain() != a2.dim_domain() {
        return Err(FactorError::DimensionMismatch(format!(
            "a1 acts on {} components in {} variables, a2 on {} in {}",
            a1.dim_domain(),
            a1.space_dim(),
            a2.dim_domain(),
            a2.space_dim()
        )));
    }
    let n = a1.space_dim();
    let crank_cfg = CrankConfig {
        seed: cfg.seed,
        cap: cfg.cap,
        ..CrankConfig::default()
    };
    ensure_constant_rank(a1, "the factored-through operator (a1)", &crank_cfg)?;
    if cfg.strict {
        ensure_constant_rank(a2, "the factored operator (a2)", &crank_cfg)?;
    }
    let s1 = a1.symbol();
    let s2 = a2.symbol();
    check_inclusion(&s1, &s2, cfg.seed, 40)?;

    let certifier = RowCertifier::new(&s1, &crank_cfg)?;
    let cap = cfg.cap.unwrap_or_else(|| {
        let minors = certifier.minor_system().minor_list();
        groebner::default_cap(&minors).max(8)
    });
    let l2 = a2.dim_codomain();
    let mut certificates: Vec<Vec<Certificate>> = Vec::with_capacity(l2);
    let mut exponents: Vec<Vec<usize>> = Vec::with_capacity(l2);
    for m in 0..l2 {
        let b: Vec<GPoly> = (0..a2.dim_domain())
            .map(|i| s2.entry(m, i).clone())
            .collect();
        let mut row_certs = Vec::with_capacity(n);
        let mut row_exps = Vec::with_capacity(n);
        for a in 0..n {
            let q = GPoly::variable(n, a);
            let cert = certifier.certify(&b, &q, cap).map_err(|e| match e {
                NullsatzError::CapExceeded(c) => FactorError::CapExceeded(c),
                NullsatzError::InclusionViolated { xi, v } => {
                    FactorError::InclusionViolated { xi, v }
                }
                other => FactorError::Nullsatz(other),
            })?;
            row_exps.push(cert.m);
            row_certs.push(cert);
        }
        exponents.push(row_exps);
        certificates.push(row_certs);
    }
    let max_n = exponents
        .iter()
        .flat_map(|r| r.iter().copied())
        .max()
        .unwrap_or(0);
    let k_tilde = n * max_n;

    // assemble b_op: the row of grad^k . a2 indexed by the axis sequence
    // (a_k, ..., a_1, m) rewrites as xi^(alpha - N e_a) h^(m, a) with alpha
    // the sequence's multi-index and a the first axis with alpha_a >= N(a, m)
    let l1 = a1.dim_codomain();
    let mut rows: Vec<Vec<MultiPoly<crate::exactnum::Rational>>> = Vec::new();
    let sequences = axis_sequences(n, k_tilde);
    for seq in &sequences {
        let mut alpha = vec![0u32; n];
        for &a in seq {
            alpha[a] += 1;
        }
        for m in 0..l2 {
            let a_star = (0..n)
                .find(|&a| alpha[a] as usize >= exponents[m][a])
                .ok_or_else(|| {
                    FactorError::Internal("pigeonhole axis selection failed".into())
                })?;
            let mut shift = alpha.clone();
            shift[a_star] -= exponents[m][a_star] as u32;
            let shift_mono = crate::multipoly::Monomial(shift);
            let cert = &certificates[m][a_star];
            let mut row = Vec::with_capacity(l1);
            for hj in &cert.h {
                let lifted = hj.mul_term(&shift_mono, &num_traits::One::one());
                let real = lifted.to_rational().ok_or_else(|| {
                    FactorError::Internal(
                        "certificate coefficients for a real operator must be real".into(),
                    )
                })?;
                row.push(real);
            }
            rows.push(row);
        }
    }
    let b_op = Operator::from_polynomial_rows(n, l1, &rows)?;

    // exact identity: symbol(grad^k . a2) = symbol(b_op) * symbol(a1)
    let lhs = nabla_compose(a2, k_tilde).symbol();
    let rhs = b_op.symbol().mul(&s1);
    if !lhs.sub(&rhs).is_zero() {
        return Err(FactorError::Internal(
            "factorization identity has a nonzero polynomial defect".into(),
        ));
    }
    Ok(FactorizationResult {
        k_tilde,
        b_op,
        exponents,
        certificates,
    })
}

/// Axis sequences `(a_k, ..., a_1)` in the row order produced by iterating
/// [`nabla_compose`]: the block index of iteration `t` is `a_t`, with the
/// final iteration outermost.
fn axis_sequences(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(seqs.len() * n);
        for a in 0..n {
            for s in &seqs {
                let mut t = s.clone();
                t.push(a);
                next.push(t);
            }
        }
        seqs = next;
    }
    seqs
}

/// Which operator annihilates the witness vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Verdict of the kernel-equality decision.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum KernelVerdict {
    Equal,
    NotEqual {
        xi: Vec<G>,
        v: Vec<G>,
        /// The side whose symbol annihilates `v` at `xi`.
        annihilated_by: Side,
    },
    Undetermined {
        reason: String,
    },
}

/// Which decision path produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelMethod {
    Certificates,
    ScalarRadical,
    RankWitness,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelEqualityResult {
    #[serde(flatten)]
    pub verdict: KernelVerdict,
    pub method: KernelMethod,
}

impl KernelEqualityResult {
    pub fn is_equal(&self) -> bool {
        matches!(self.verdict, KernelVerdict::Equal)
    }
}

/// Exact span equality of two kernel bases.
fn same_span(dim: usize, k1: &[Vec<G>], k2: &[Vec<G>]) -> bool {
    if k1.len() != k2.len() {
        return false;
    }
    if k1.is_empty() {
        return true;
    }
    let m2 = FieldMatrix::from_columns(dim, k2);
    let r2 = m2.rank();
    for v in k1 {
        let aug = m2.hstack(&FieldMatrix::column(v));
        if aug.rank() != r2 {
            return false;
        }
    }
    true
}

/// Builds a verified NotEqual verdict at `xi` if the kernels there differ.
fn witness_at(s_left: &SymbolMatrix, s_right: &SymbolMatrix, xi: &[G]) -> Option<KernelVerdict> {
    let ml = s_left.evaluate(xi);
    let mr = s_right.evaluate(xi);
    let kl = ml.kernel_basis();
    let kr = mr.kernel_basis();
    if same_span(s_left.cols(), &kl, &kr) {
        return None;
    }
    // some vector killed by one side survives the other
    for v in &kl {
        if !mr.mul_vec(v).iter().all(Zero::is_zero) {
            return Some(KernelVerdict::NotEqual {
                xi: xi.to_vec(),
                v: v.clone(),
                annihilated_by: Side::Left,
            });
        }
    }
    for v in &kr {
        if !ml.mul_vec(v).iter().all(Zero::is_zero) {
            return Some(KernelVerdict::NotEqual {
                xi: xi.to_vec(),
                v: v.clone(),
                annihilated_by: Side::Right,
            });
        }
    }
    None
}

/// Decides whether `ker b[xi] = ker bt[xi]` for every nonzero complex `xi`.
pub fn symbol_kernel_equal(
    b: &Operator,
    bt: &Operator,
    cfg: &FactorConfig,
) -> Result<KernelEqualityResult, FactorError> {
    if b.space_dim() != bt.space_dim() || b.dim_domain() != bt.dim_domain() {
        return Err(FactorError::DimensionMismatch(
            "kernel comparison needs matching space and domain dimensions".into(),
        ));
    }
    let sb = b.symbol();
    let st = bt.symbol();
    let d = b.dim_domain();

    if d == 1 {
        return scalar_radical_path(&sb, &st, cfg);
    }

    let crank_cfg = CrankConfig {
        seed: cfg.seed,
        cap: cfg.cap,
        ..CrankConfig::default()
    };
    let rb = crank::is_constant_rank_c(&sb, &crank_cfg)
        .map_err(|e| FactorError::Crank(e.to_string()))?;
    let rt = crank::is_constant_rank_c(&st, &crank_cfg)
        .map_err(|e| FactorError::Crank(e.to_string()))?;

    // a rank-drop witness of either side is a natural place for the kernels
    // to separate; check it exactly first
    for rep in [&rb, &rt] {
        if let Constancy::No { witness } = &rep.constant_over_c {
            if let Some(verdict) = witness_at(&sb, &st, witness) {
                return Ok(KernelEqualityResult {
                    verdict,
                    method: KernelMethod::RankWitness,
                });
            }
        }
    }

    if rb.constant_over_c.is_yes() && rt.constant_over_c.is_yes() {
        return certificate_path(&sb, &st, cfg, &crank_cfg);
    }

    // not constant rank and the rank witnesses did not separate the kernels:
    // sample for a separating point before giving up
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xe9);
    for _ in 0..200 {
        let xi = sample_gaussian_point(&mut rng, b.space_dim(), 6);
        if let Some(verdict) = witness_at(&sb, &st, &xi) {
            return Ok(KernelEqualityResult {
                verdict,
                method: KernelMethod::RankWitness,
            });
        }
    }
    Ok(KernelEqualityResult {
        verdict: KernelVerdict::Undetermined {
            reason: "at least one operator lacks certified constant rank and no separating point was found".into(),
        },
        method: KernelMethod::Inconclusive,
    })
}

fn scalar_radical_path(
    sb: &SymbolMatrix,
    st: &SymbolMatrix,
    cfg: &FactorConfig,
) -> Result<KernelEqualityResult, FactorError> {
    let n = sb.nvars();
    let gens_b: Vec<GPoly> = (0..sb.rows())
        .map(|j| sb.entry(j, 0).clone())
        .filter(|p| !p.is_zero())
        .collect();
    let gens_t: Vec<GPoly> = (0..st.rows())
        .map(|j| st.entry(j, 0).clone())
        .filter(|p| !p.is_zero())
        .collect();
    match (gens_b.is_empty(), gens_t.is_empty()) {
        (true, true) => {
            return Ok(KernelEqualityResult {
                verdict: KernelVerdict::Equal,
                method: KernelMethod::ScalarRadical,
            })
        }
        (true, false) | (false, true) => {
            // one symbol vanishes identically, the other does not: any point
            // where some entry of the nonzero side survives separates them
            let (nonzero, side) = if gens_b.is_empty() {
                (&gens_t, Side::Left) // left kernel is everything
            } else {
                (&gens_b, Side::Right)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            loop {
                let xi = sample_gaussian_point(&mut rng, n, 4);
                if nonzero
                    .iter()
                    .any(|p| !p.evaluate(&xi).expect("arity").is_zero())
                {
                    return Ok(KernelEqualityResult {
                        verdict: KernelVerdict::NotEqual {
                            xi,
                            v: vec![G::one()],
                            annihilated_by: side,
                        },
                        method: KernelMethod::ScalarRadical,
                    });
                }
            }
        }
        (false, false) => {}
    }
    // mutual radical membership; a failure searches the cone of one family
    // for a point missed by the other
    let cap = cfg
        .cap
        .unwrap_or_else(|| groebner::default_cap(&gens_b).max(groebner::default_cap(&gens_t)));
    let check = |zero_set_of: &[GPoly],
                 must_vanish: &[GPoly],
                 annihilated_by: Side|
     -> Result<Option<KernelVerdict>, FactorError> {
        let tb = groebner::buchberger(zero_set_of, MonomialOrder::GrevLex, GroebnerLimits::default())?;
        let mut failed = false;
        for p in must_vanish {
            match groebner::power_membership(p, &tb, cap) {
                Ok(_) => {}
                Err(GroebnerError::CapExceeded { .. }) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if !failed {
            return Ok(None);
        }
        // hunt for a point in V(zero_set_of) where some target survives
        for xi in zerosearch::collect_common_zeros(zero_set_of, cfg.seed, 100, 32) {
            if must_vanish
                .iter()
                .any(|p| !p.evaluate(&xi).expect("arity").is_zero())
            {
                return Ok(Some(KernelVerdict::NotEqual {
                    xi,
                    v: vec![G::one()],
                    annihilated_by,
                }));
            }
        }
        Ok(Some(KernelVerdict::Undetermined {
            reason: "radical membership cap exhausted without a separating point".into(),
        }))
    };
    // points killing all of gens_b must kill gens_t (so that ker b subset
    // ker bt fails nowhere), and symmetrically
    if let Some(verdict) = check(&gens_b, &gens_t, Side::Left)? {
        let method = KernelMethod::ScalarRadical;
        return Ok(KernelEqualityResult { verdict, method });
    }
    if let Some(verdict) = check(&gens_t, &gens_b, Side::Right)? {
        let method = KernelMethod::ScalarRadical;
        return Ok(KernelEqualityResult { verdict, method });
    }
    Ok(KernelEqualityResult {
        verdict: KernelVerdict::Equal,
        method: KernelMethod::ScalarRadical,
    })
}

fn certificate_path(
    sb: &SymbolMatrix,
    st: &SymbolMatrix,
    cfg: &FactorConfig,
    crank_cfg: &CrankConfig,
) -> Result<KernelEqualityResult, FactorError> {
    let n = sb.nvars();
    let d = sb.cols();
    let cap = cfg.cap.unwrap_or(16);
    let run = |sys: &SymbolMatrix,
               rows_of: &SymbolMatrix,
               annihilated_by: Side|
     -> Result<Option<KernelVerdict>, FactorError> {
        let certifier = RowCertifier::new(sys, crank_cfg)?;
        for m in 0..rows_of.rows() {
            let bvec: Vec<GPoly> = (0..d).map(|i| rows_of.entry(m, i).clone()).collect();
            for a in 0..n {
                let q = GPoly::variable(n, a);
                match certifier.certify(&bvec, &q, cap) {
                    Ok(_) => {}
                    Err(NullsatzError::InclusionViolated { xi, v }) => {
                        // verified separating point: v solves the sys-side,
                        // the rows_of side does not kill it
                        return Ok(Some(KernelVerdict::NotEqual {
                            xi,
                            v,
                            annihilated_by,
                        }));
                    }
                    Err(NullsatzError::CapExceeded(c)) => {
                        return Ok(Some(KernelVerdict::Undetermined {
                            reason: format!("certificate cap {c} exhausted"),
                        }))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(None)
    };
    // rows of bt certify against the b-system: solutions of b are killed by
    // bt, i.e. ker b subset ker bt; then symmetrically
    if let Some(verdict) = run(sb, st, Side::Left)? {
        return Ok(KernelEqualityResult {
            verdict,
            method: KernelMethod::Certificates,
        });
    }
    if let Some(verdict) = run(st, sb, Side::Right)? {
        return Ok(KernelEqualityResult {
            verdict,
            method: KernelMethod::Certificates,
        });
    }
    Ok(KernelEqualityResult {
        verdict: KernelVerdict::Equal,
        method: KernelMethod::Certificates,
    })
}

/// The separating family of plane waves built from a NotEqual verdict:
/// `u_h(x) = exp(i h x . xi) v` is annihilated by one operator and not the
/// other, for every integer `h != 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFamily {
    pub xi: Vec<G>,
    pub v: Vec<G>,
    pub annihilated_by: Side,
    pub description: String,
}

/// Packages and re-verifies the plane-wave family at `h = 1`; homogeneity of
/// the symbols extends the check to every `h != 0`.
pub fn plane_wave_witness(
    b: &Operator,
    bt: &Operator,
    result: &KernelEqualityResult,
) -> Result<WitnessFamily, FactorError> {
    let KernelVerdict::NotEqual {
        xi,
        v,
        annihilated_by,
    } = &result.verdict
    else {
        return Err(FactorError::NoWitness(format!("{:?}", result.verdict)));
    };
    let (ann, other) = match annihilated_by {
        Side::Left => (b, bt),
        Side::Right => (bt, b),
    };
    let ma = ann.symbol().evaluate(xi);
    let mo = other.symbol().evaluate(xi);
    if !ma.mul_vec(v).iter().all(Zero::is_zero) {
        return Err(FactorError::Internal(
            "witness is not annihilated by its claimed side".into(),
        ));
    }
    if mo.mul_vec(v).iter().all(Zero::is_zero) {
        return Err(FactorError::Internal(
            "witness fails to separate the kernels".into(),
        ));
    }
    Ok(WitnessFamily {
        xi: xi.clone(),
        v: v.clone(),
        annihilated_by: *annihilated_by,
        description: "u_h(x) = exp(i h x.xi) v, h in Z \\ {0}".into(),
    })
}
