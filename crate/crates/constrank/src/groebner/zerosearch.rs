//! Exact search for nonzero common zeros of polynomial families over Q(i).
//!
//! Strategy, in order: a deterministic scan over small Gaussian-rational
//! candidate points (which covers the isotropic directions such as `(1, i)`),
//! then chart solving: fix all variables but one to deterministic or random
//! values, take the gcd of the resulting univariate specializations and find
//! its roots exactly (linear and quadratic factors are solved in closed form
//! via exact Gaussian square roots). Every returned point is re-verified
//! against the full family, so a `Some` answer is always sound; `None` means
//! the search was inconclusive, never that no zero exists.

use crate::exactnum::{sample_gaussian, Field, GaussianRational};
use crate::multipoly::MultiPoly;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type G = GaussianRational;
type GPoly = MultiPoly<G>;

/// Univariate polynomial over Q(i), coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly(pub Vec<G>);

impl UniPoly {
    pub fn trim(mut self) -> Self {
        while matches!(self.0.last(), Some(c) if c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn eval(&self, x: &G) -> G {
        let mut acc = G::zero();
        for c in self.0.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn monic(mut self) -> Self {
        if let Some(lead) = self.0.last().cloned() {
            let inv = lead.inv();
            for c in &mut self.0 {
                *c = c.clone() * inv.clone();
            }
        }
        self
    }

    /// Polynomial remainder of `self` modulo `rhs`.
    pub fn rem(&self, rhs: &UniPoly) -> UniPoly {
        let d = rhs.degree().expect("remainder by zero polynomial");
        let lead_inv = rhs.0[d].inv();
        let mut r = self.0.clone();
        while r.len() > d {
            let k = r.len() - 1;
            let factor = r[k].clone() * lead_inv.clone();
            if !factor.is_zero() {
                for j in 0..=d {
                    let idx = k - d + j;
                    r[idx] = r[idx].clone() - factor.clone() * rhs.0[j].clone();
                }
            }
            r.pop();
            while matches!(r.last(), Some(c) if c.is_zero()) {
                r.pop();
            }
            if r.len() <= d {
                break;
            }
        }
        UniPoly(r).trim()
    }

    pub fn gcd(&self, rhs: &UniPoly) -> UniPoly {
        let mut a = self.clone().trim();
        let mut b = rhs.clone().trim();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> UniPoly {
        if self.0.len() <= 1 {
            return UniPoly(Vec::new());
        }
        let coeffs = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let mut factor = G::zero();
                for _ in 0..k {
                    factor = factor + G::one();
                }
                c.clone() * factor
            })
            .collect();
        UniPoly(coeffs).trim()
    }

    /// Exact roots found in Q(i). Complete for degree <= 2; for higher
    /// degrees it peels the root at zero, recurses through the squarefree
    /// part, and scans small candidates, so it may miss roots (callers treat
    /// the result as a best effort).
    pub fn roots(&self) -> Vec<G> {
        let mut out: Vec<G> = Vec::new();
        let mut push = |z: G| {
            if !out.contains(&z) {
                out.push(z);
            }
        };
        let p = self.clone().trim();
        if p.is_zero() || p.degree() == Some(0) {
            return Vec::new();
        }
        // root at zero
        let mut coeffs = p.0.clone();
        if coeffs[0].is_zero() {
            push(G::zero());
            while coeffs.first().is_some_and(Zero::is_zero) {
                coeffs.remove(0);
            }
        }
        let q = UniPoly(coeffs).trim();
        match q.degree() {
            None | Some(0) => {}
            Some(1) => {
                // a + b t = 0
                push(-(q.0[0].clone().div_ref(&q.0[1])));
            }
            Some(2) => {
                // a + b t + c t^2 = 0
                let (a, b, c) = (q.0[0].clone(), q.0[1].clone(), q.0[2].clone());
                let four = G::from_parts(4, 0);
                let two = G::from_parts(2, 0);
                let disc = b.clone() * b.clone() - four * a * c.clone();
                if let Some(s) = disc.sqrt_exact() {
                    let denom = (two * c).inv();
                    push((-b.clone() + s.clone()) * denom.clone());
                    push((-b - s) * denom);
                }
            }
            Some(_) => {
                // repeated factors first, then a candidate scan
                let sf = q.gcd(&q.derivative());
                if sf.degree().is_some_and(|d| d >= 1) && sf.degree() < q.degree() {
                    for r in sf.roots() {
                        push(r);
                    }
                    if let Some(quot) = divide_out(&q, &sf) {
                        for r in quot.roots() {
                            push(r);
                        }
                    }
                }
                for cand in candidate_scalars() {
                    if q.eval(&cand).is_zero() {
                        push(cand);
                    }
                }
            }
        }
        out.retain(|r| self.eval(r).is_zero());
        out
    }
}

fn divide_out(p: &UniPoly, d: &UniPoly) -> Option<UniPoly> {
    // long division; Some only when the division is exact
    let dd = d.degree()?;
    let lead_inv = d.0[dd].inv();
    let mut r = p.0.clone();
    let mut q = vec![G::zero(); r.len().saturating_sub(dd)];
    while r.len() > dd {
        let k = r.len() - 1;
        let factor = r[k].clone() * lead_inv.clone();
        q[k - dd] = factor.clone();
        for j in 0..=dd {
            let idx = k - dd + j;
            r[idx] = r[idx].clone() - factor.clone() * d.0[j].clone();
        }
        r.pop();
        while matches!(r.last(), Some(c) if c.is_zero()) {
            r.pop();
        }
    }
    if UniPoly(r).trim().is_zero() {
        Some(UniPoly(q).trim())
    } else {
        None
    }
}

/// Small deterministic scalar candidates, including the units of Q(i) and a
/// few half-integer points.
fn candidate_scalars() -> Vec<G> {
    let mut out = Vec::new();
    let vals: [(i64, i64); 13] = [
        (0, 0),
        (1, 0),
        (-1, 0),
        (0, 1),
        (0, -1),
        (1, 1),
        (1, -1),
        (-1, 1),
        (-1, -1),
        (2, 0),
        (-2, 0),
        (0, 2),
        (0, -2),
    ];
    for (re, im) in vals {
        out.push(G::from_parts(re, im));
    }
    out
}

/// Specializes `p` to a univariate polynomial in variable `var`, with the
/// remaining coordinates fixed to `point` (whose entry at `var` is ignored).
fn specialize_to_univariate(p: &GPoly, var: usize, point: &[G]) -> UniPoly {
    let max_deg = p
        .terms()
        .map(|(m, _)| m.0[var])
        .max()
        .unwrap_or(0) as usize;
    let mut coeffs = vec![G::zero(); max_deg + 1];
    for (m, c) in p.terms() {
        let mut value = c.clone();
        for (i, &e) in m.0.iter().enumerate() {
            if i == var {
                continue;
            }
            for _ in 0..e {
                value = value * point[i].clone();
            }
        }
        let k = m.0[var] as usize;
        coeffs[k] = coeffs[k].clone() + value;
    }
    UniPoly(coeffs).trim()
}

fn verify_zero(gens: &[GPoly], point: &[G]) -> bool {
    point.iter().any(|z| !z.is_zero())
        && gens
            .iter()
            .all(|g| g.evaluate(point).expect("dimension checked").is_zero())
}

/// Searches for a nonzero exact common zero of the family. Deterministic for
/// a fixed seed. `None` is inconclusive.
pub fn find_common_zero(gens: &[GPoly], seed: u64, random_tries: usize) -> Option<Vec<G>> {
    collect_common_zeros(gens, seed, random_tries, 1).into_iter().next()
}

/// Collects up to `limit` distinct nonzero common zeros with the same search
/// strategy as [`find_common_zero`].
pub fn collect_common_zeros(
    gens: &[GPoly],
    seed: u64,
    random_tries: usize,
    limit: usize,
) -> Vec<Vec<G>> {
    let mut found: Vec<Vec<G>> = Vec::new();
    if gens.is_empty() || limit == 0 {
        return found;
    }
    let n = gens[0].nvars();
    if n == 0 {
        return found;
    }

    // 1. candidate grid over small Gaussian integers (covers isotropic lines)
    let scalars = candidate_scalars();
    let mut stack: Vec<Vec<G>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &stack {
            for s in &scalars {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push(p);
            }
        }
        stack = next;
        if stack.len() > 40_000 {
            break; // grid too large for this arity; chart solving handles it
        }
    }
    if stack.first().is_some_and(|p| p.len() == n) {
        for point in &stack {
            if verify_zero(gens, point) && !found.contains(point) {
                found.push(point.clone());
                if found.len() >= limit {
                    return found;
                }
            }
        }
    }

    // 2. chart solving: one coordinate pinned to 1, one solved for, the rest
    //    drawn from a deterministic stream
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempt = |point_template: &[Option<G>], solve_var: usize| -> Vec<Vec<G>> {
        let mut point: Vec<G> = point_template
            .iter()
            .map(|v| v.clone().unwrap_or_else(G::zero))
            .collect();
        let mut common: Option<UniPoly> = None;
        for g in gens {
            let u = specialize_to_univariate(g, solve_var, &point);
            if u.is_zero() {
                continue;
            }
            common = Some(match common {
                None => u.monic(),
                Some(c) => c.gcd(&u),
            });
            if common.as_ref().is_some_and(|c| c.degree() == Some(0)) {
                return Vec::new(); // gcd is a unit: no common root on this chart
            }
        }
        match common {
            None => {
                // the whole line consists of zeros; pick t = 1
                point[solve_var] = G::one();
                if verify_zero(gens, &point) {
                    vec![point]
                } else {
                    Vec::new()
                }
            }
            Some(c) => {
                let mut hits = Vec::new();
                for root in c.roots() {
                    point[solve_var] = root;
                    if verify_zero(gens, &point) {
                        hits.push(point.clone());
                    }
                }
                hits
            }
        }
    };
    let push_all = |found: &mut Vec<Vec<G>>, hits: Vec<Vec<G>>| {
        for h in hits {
            if !found.contains(&h) {
                found.push(h);
            }
        }
    };

    // deterministic charts: chart var = 1, others zero, solve each position
    for chart in 0..n {
        for solve in 0..n {
            if solve == chart {
                continue;
            }
            let mut template: Vec<Option<G>> = vec![Some(G::zero()); n];
            template[chart] = Some(G::one());
            template[solve] = None;
            push_all(&mut found, attempt(&template, solve));
            if found.len() >= limit {
                return found;
            }
        }
    }

    // randomized charts
    for t in 0..random_tries {
        let chart = t % n;
        let solve = (t + 1) % n;
        if chart == solve {
            continue;
        }
        let mut template: Vec<Option<G>> = Vec::with_capacity(n);
        for i in 0..n {
            if i == solve {
                template.push(None);
            } else if i == chart {
                template.push(Some(G::one()));
            } else {
                template.push(Some(sample_gaussian(&mut rng, 3, 2)));
            }
        }
        push_all(&mut found, attempt(&template, solve));
        if found.len() >= limit {
            return found;
        }
    }
    found
}
