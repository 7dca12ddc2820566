//! Certified rank analysis of Fourier symbols.
//!
//! The generic rank is found by exact evaluation at seeded random
//! Gaussian-rational points, then certified: all `(r+1)`-minors must vanish
//! identically (rank never exceeds `r`), and the variety-is-origin test on
//! the `r`-minor ideal proves the rank never drops for nonzero complex
//! phases. Sampling alone never decides; a "no" verdict always carries an
//! exact witness direction at which the rank provably drops.

use crate::exactnum::{sample_gaussian_point, sample_rational_point, Field, GaussianRational};
use crate::groebner::{self, GroebnerError, VarietyOutcome};
use crate::multipoly::{MonomialOrder, MultiPoly};
use crate::opcore::SymbolMatrix;
use itertools::Itertools;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrankError {
    #[error("groebner engine failed: {0}")]
    Groebner(#[from] GroebnerError),
    #[error("witness verification failed: rank at the candidate point is not below {expected}")]
    BadWitness { expected: usize },
}

/// Tuning knobs for the rank analysis; `cap = None` derives the
/// power-membership cap from the minor degrees.
#[derive(Clone, Copy, Debug)]
pub struct CrankConfig {
    pub seed: u64,
    pub samples: usize,
    pub real_samples: usize,
    pub cap: Option<usize>,
    /// Above this many minors the ideal is seeded lazily.
    pub minor_budget: usize,
}

impl Default for CrankConfig {
    fn default() -> Self {
        Self {
            seed: crate::DEFAULT_SEED,
            samples: 8,
            real_samples: 32,
            cap: None,
            minor_budget: 20_000,
        }
    }
}

/// Verdict on constancy of the complex rank.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Constancy {
    Yes,
    No { witness: Vec<GaussianRational> },
    Undetermined { reason: String },
}

impl Constancy {
    pub fn is_yes(&self) -> bool {
        matches!(self, Constancy::Yes)
    }
}

/// Outcome of the sampled (uncertified) real constant-rank probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledRealRank {
    pub constant: bool,
    pub samples: usize,
    /// Always false: real-variety emptiness is out of certification scope.
    pub certified: bool,
}

/// Full rank analysis of one symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankReport {
    pub generic_rank: usize,
    pub constant_over_c: Constancy,
    pub c_elliptic: bool,
    pub kernel_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nullstellensatz_exponents: Option<Vec<usize>>,
    pub sampled_real_constant: SampledRealRank,
}

/// Maximum exact rank over seeded random Gaussian-rational points.
pub fn generic_rank(s: &SymbolMatrix, samples: usize, seed: u64) -> usize {
    assert!(samples >= 1, "at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..samples {
        let p = sample_gaussian_point(&mut rng, s.nvars(), 9);
        best = best.max(s.evaluate(&p).rank());
    }
    best
}

/// All `t x t` minors of the symbol, normalized monic and deduplicated
/// (which leaves the generated ideal unchanged).
fn minor_ideal(s: &SymbolMatrix, t: usize) -> Vec<MultiPoly<GaussianRational>> {
    let mut out: Vec<MultiPoly<GaussianRational>> = Vec::new();
    for rows in (0..s.rows()).combinations(t) {
        for cols in (0..s.cols()).combinations(t) {
            let m = s.minor(&rows, &cols);
            if m.is_zero() {
                continue;
            }
            let lc = m
                .leading_term(MonomialOrder::GrevLex)
                .expect("nonzero")
                .1
                .clone();
            let monic = m.scale(&lc.inv());
            if !out.contains(&monic) {
                out.push(monic);
            }
        }
    }
    out
}

fn count_minors(s: &SymbolMatrix, t: usize) -> usize {
    let c = |n: usize, k: usize| -> usize {
        if k > n {
            return 0;
        }
        let mut acc = 1usize;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        acc
    };
    c(s.rows(), t) * c(s.cols(), t)
}

/// True when every `t x t` minor vanishes identically (so the rank is below
/// `t` everywhere). Vacuously true when `t` exceeds the shape.
fn all_minors_vanish(s: &SymbolMatrix, t: usize) -> bool {
    if t > s.rows().min(s.cols()) {
        return true;
    }
    for rows in (0..s.rows()).combinations(t) {
        for cols in (0..s.cols()).combinations(t) {
            if !s.minor(&rows, &cols).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Decides constant rank over the complex numbers with certification.
pub fn is_constant_rank_c(s: &SymbolMatrix, cfg: &CrankConfig) -> Result<RankReport, CrankError> {
    // 1. generic rank from sampling, then bumped until the (r+1)-minors
    //    vanish identically (sampling never overshoots, only undershoots)
    let mut r = generic_rank(s, cfg.samples, cfg.seed);
    while !all_minors_vanish(s, r + 1) {
        r += 1;
    }
    let d = s.cols();
    let sampled_real = sampled_real_rank(s, r, cfg);

    // 2. rank 0 means the symbol vanishes identically: constant trivially
    if r == 0 {
        return Ok(RankReport {
            generic_rank: 0,
            constant_over_c: Constancy::Yes,
            c_elliptic: d == 0,
            kernel_dim: d,
            nullstellensatz_exponents: Some(vec![0; s.nvars()]),
            sampled_real_constant: sampled_real,
        });
    }

    // 3. the r-minor ideal must have the origin as its only common zero
    let (outcome, used_all_minors) = if count_minors(s, r) <= cfg.minor_budget {
        let minors = minor_ideal(s, r);
        (run_variety(&minors, cfg)?, true)
    } else {
        (lazy_minor_variety(s, r, cfg)?, false)
    };

    let constant_over_c = match outcome {
        VarietyOutcome::OnlyOrigin { exponents } => {
            return Ok(RankReport {
                generic_rank: r,
                constant_over_c: Constancy::Yes,
                c_elliptic: r == d,
                kernel_dim: d - r,
                nullstellensatz_exponents: Some(exponents),
                sampled_real_constant: sampled_real,
            });
        }
        VarietyOutcome::NonzeroZero { point } => {
            // verified: the exact rank at the witness is strictly below r
            let rank_at = s.evaluate(&point).rank();
            if rank_at >= r {
                if used_all_minors {
                    return Err(CrankError::BadWitness { expected: r });
                }
                Constancy::Undetermined {
                    reason: "lazy minor seeding produced an unverified candidate".into(),
                }
            } else {
                Constancy::No { witness: point }
            }
        }
        VarietyOutcome::Undetermined { failing_variable } => Constancy::Undetermined {
            reason: format!(
                "power membership cap exhausted on variable {}",
                failing_variable + 1
            ),
        },
    };
    Ok(RankReport {
        generic_rank: r,
        constant_over_c,
        c_elliptic: false,
        kernel_dim: d - r,
        nullstellensatz_exponents: None,
        sampled_real_constant: sampled_real,
    })
}

fn run_variety(
    minors: &[MultiPoly<GaussianRational>],
    cfg: &CrankConfig,
) -> Result<VarietyOutcome, CrankError> {
    let cap = cfg.cap.unwrap_or_else(|| groebner::default_cap(minors));
    Ok(groebner::variety_is_origin(
        minors,
        MonomialOrder::GrevLex,
        cap,
        cfg.seed,
    )?)
}

/// Incremental minor seeding for combinatorially large minor families: grow
/// a subset until its variety is already the origin (sound, since the full
/// ideal only shrinks the variety), or a candidate zero survives every minor.
fn lazy_minor_variety(
    s: &SymbolMatrix,
    r: usize,
    cfg: &CrankConfig,
) -> Result<VarietyOutcome, CrankError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a2b);
    let probe = sample_gaussian_point(&mut rng, s.nvars(), 9);
    let mut selected: Vec<MultiPoly<GaussianRational>> = Vec::new();
    let mut rest: Vec<MultiPoly<GaussianRational>> = Vec::new();
    let mut seen = 0usize;
    'outer: for rows in (0..s.rows()).combinations(r) {
        for cols in (0..s.cols()).combinations(r) {
            seen += 1;
            if seen > 4 * cfg.minor_budget {
                break 'outer;
            }
            let m = s.minor(&rows, &cols);
            if m.is_zero() {
                continue;
            }
            let lc = m
                .leading_term(MonomialOrder::GrevLex)
                .expect("nonzero")
                .1
                .clone();
            let monic = m.scale(&lc.inv());
            let nonzero_at_probe = !monic.evaluate(&probe).expect("arity").is_zero();
            if nonzero_at_probe && selected.len() < 128 && !selected.contains(&monic) {
                selected.push(monic);
            } else if rest.len() < cfg.minor_budget && !rest.contains(&monic) {
                rest.push(monic);
            }
        }
    }
    for _round in 0..8 {
        if selected.is_empty() {
            break;
        }
        match run_variety(&selected, cfg)? {
            VarietyOutcome::OnlyOrigin { exponents } => {
                return Ok(VarietyOutcome::OnlyOrigin { exponents })
            }
            VarietyOutcome::NonzeroZero { point } => {
                // candidate zero of the subset: either it kills the rest too
                // (genuine witness) or the violated minors join the subset
                let violated: Vec<usize> = rest
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| !m.evaluate(&point).expect("arity").is_zero())
                    .map(|(i, _)| i)
                    .collect();
                if violated.is_empty() {
                    return Ok(VarietyOutcome::NonzeroZero { point });
                }
                for i in violated.into_iter().rev().take(32) {
                    selected.push(rest.swap_remove(i));
                }
            }
            undetermined => return Ok(undetermined),
        }
    }
    Ok(VarietyOutcome::Undetermined {
        failing_variable: 0,
    })
}

fn sampled_real_rank(s: &SymbolMatrix, r: usize, cfg: &CrankConfig) -> SampledRealRank {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x55);
    let mut constant = true;
    for _ in 0..cfg.real_samples {
        let p = sample_rational_point(&mut rng, s.nvars(), 9);
        let gp: Vec<GaussianRational> = p.into_iter().map(GaussianRational::from).collect();
        if s.evaluate(&gp).rank() != r {
            constant = false;
            break;
        }
    }
    SampledRealRank {
        constant,
        samples: cfg.real_samples,
        certified: false,
    }
}

/// The symbol is injective for every nonzero complex phase: constant rank
/// with full column rank.
pub fn is_c_elliptic(s: &SymbolMatrix, cfg: &CrankConfig) -> Result<RankReport, CrankError> {
    is_constant_rank_c(s, cfg)
}
