//! Canonical forms and equivalence classification of permutation binomials.
//!
//! Two binomials f, g over F_q are equivalent when g = u * f(v X^s)^{p^i} for
//! some nonzero u, v, unit s and Frobenius power i; equivalence preserves the
//! permutation property. Every binomial is equivalent to exactly one
//! X^{n+d} + xi^{a_log} X^n with d = gcd(exponent difference, q-1), n the
//! least exponent reachable in the orbit structure of Z_{q-1}, and a_log the
//! least coefficient log reachable in Z_d; that (d, n, a_log) triple is the
//! complete invariant computed here, together with an explicit transform
//! chain realizing it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::binomial::Binomial;
use crate::ff::{self, Fe, FieldCtx};
use crate::residue::{coprime_lift, inv_mod, norm1, orbit_group};
use crate::{Error, Result};

/// Cap on the field order for brute-force equivalence search.
pub const EQUIV_BRUTE_CAP: u64 = 1 << 12;

/// Least representatives of the exponent orbits: the set of n values that can
/// appear in a canonical triple with this d.
pub fn compute_nd(ctx: &FieldCtx, d: u64) -> Result<Vec<u64>> {
    Ok(orbit_group(ctx.q() - 1, d)?.orbit_minima())
}

/// The subgroup of Z_d^* that stabilizes the exponent pair {n, n+d}: always
/// contains p; contains -1 exactly when d = -2n holds modulo (q-1)/d and n is
/// a unit mod q-1. Members are listed in {1, ..., d}, ascending.
pub fn compute_gdn(ctx: &FieldCtx, d: u64, n: u64) -> Result<Vec<u64>> {
    let qm1 = ctx.q() - 1;
    if d == 0 || qm1 % d != 0 {
        return Err(Error::NonDivisor { d, modulus: qm1 });
    }
    validate_orbit_min(ctx, d, n)?;
    let mut gens = vec![norm1(ctx.p() as u128, d)];
    if includes_minus(ctx, d, n) {
        gens.push(norm1(d as u128 * 2 - 1, d)); // -1 mod d, as a {1..d} residue
    }
    // Multiplicative closure of the generators in Z_d^*.
    let mut members = vec![norm1(1, d)];
    let mut frontier = members.clone();
    while let Some(x) = frontier.pop() {
        for &g in &gens {
            let y = norm1(x as u128 * g as u128, d);
            if !members.contains(&y) {
                members.push(y);
                frontier.push(y);
            }
        }
    }
    members.sort_unstable();
    Ok(members)
}

/// Least representatives of the orbits of Z_d = {0, ..., d-1} under
/// multiplication by the stabilizer subgroup: the set of coefficient logs
/// that can appear in a canonical triple with this (d, n).
pub fn compute_adn(ctx: &FieldCtx, d: u64, n: u64) -> Result<Vec<u64>> {
    let members = compute_gdn(ctx, d, n)?;
    let mut minima = Vec::new();
    let mut assigned = vec![false; d as usize];
    for x in 0..d {
        if assigned[x as usize] {
            continue;
        }
        // Group action: the orbit of x is {g*x mod d}.
        let mut orbit: Vec<u64> = members.iter().map(|&g| g % d * x % d).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            assigned[y as usize] = true;
        }
        minima.push(orbit[0]);
    }
    minima.sort_unstable();
    Ok(minima)
}

fn includes_minus(ctx: &FieldCtx, d: u64, n: u64) -> bool {
    let qm1 = ctx.q() - 1;
    let step = qm1 / d;
    (d + 2 * n) % step == 0 && ff::gcd(n, qm1) == 1
}

fn validate_orbit_min(ctx: &FieldCtx, d: u64, n: u64) -> Result<()> {
    let g = orbit_group(ctx.q() - 1, d)?;
    if n < 1 || n > ctx.q() - 1 || g.orbit_min(n).0 != n {
        return Err(Error::NotInNd { n, d });
    }
    Ok(())
}

/// The complete equivalence invariant: the class representative is
/// X^{n+d} + xi^{a_log} X^n with a_log < d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalTriple {
    pub d: u64,
    pub n: u64,
    pub a_log: u64,
}

/// Reconstructs the class representative a triple names.
pub fn canonical_binomial(ctx: &Arc<FieldCtx>, t: &CanonicalTriple) -> Result<Binomial> {
    let a = ctx.pow(ctx.xi(), t.a_log as u128);
    Binomial::new(ctx, (ctx.one(), t.n + t.d), (a, t.n))
}

/// One elementary equivalence move. Coefficients are carried as logs of the
/// field's primitive element so chains serialize exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// f -> xi^{u_log} * f
    Alpha { u_log: u64 },
    /// f -> f^{p^count}
    Beta { count: u32 },
    /// f -> f(xi^{v_log} X^s)
    Gamma { v_log: u64, s: u64 },
}

/// A collapsed chain: f -> xi^{u_log} * f(xi^{v_log} X^s)^{p^i}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub u_log: u64,
    pub v_log: u64,
    pub s: u64,
    pub i: u32,
}

impl EquivalenceWitness {
    pub fn identity() -> Self {
        EquivalenceWitness { u_log: 0, v_log: 0, s: 1, i: 0 }
    }
}

/// Applies one transform.
pub fn apply_transform(f: &Binomial, t: &Transform) -> Result<Binomial> {
    let ctx = f.ctx();
    match *t {
        Transform::Alpha { u_log } => f.alpha(ctx.pow(ctx.xi(), u_log as u128)),
        Transform::Beta { count } => {
            let mut g = f.clone();
            for _ in 0..count {
                g = g.beta();
            }
            Ok(g)
        }
        Transform::Gamma { v_log, s } => f.gamma(ctx.pow(ctx.xi(), v_log as u128), s),
    }
}

/// Applies a chain left to right.
pub fn apply_chain(f: &Binomial, chain: &[Transform]) -> Result<Binomial> {
    let mut g = f.clone();
    for t in chain {
        g = apply_transform(&g, t)?;
    }
    Ok(g)
}

/// Applies a collapsed witness: substitution, then Frobenius, then scaling.
pub fn apply_witness(f: &Binomial, w: &EquivalenceWitness) -> Result<Binomial> {
    let ctx = f.ctx().clone();
    let mut g = f.gamma(ctx.pow(ctx.xi(), w.v_log as u128), w.s)?;
    for _ in 0..w.i {
        g = g.beta();
    }
    g.alpha(ctx.pow(ctx.xi(), w.u_log as u128))
}

/// Folds a chain into the single composite u * f(v X^s)^{p^i}.
///
/// Appending a move updates the composite: scaling multiplies into u;
/// Frobenius powers u and bumps i; a substitution (v', s') lands inside the
/// existing one as v <- v * v'^s, s <- s * s'.
pub fn collapse(ctx: &FieldCtx, chain: &[Transform]) -> EquivalenceWitness {
    let qm1 = ctx.q() - 1;
    let m = ctx.m();
    let mut w = EquivalenceWitness::identity();
    for t in chain {
        match *t {
            Transform::Alpha { u_log } => {
                w.u_log = (w.u_log + u_log) % qm1;
            }
            Transform::Beta { count } => {
                let pc = ff::mod_pow_u64(ctx.p(), count as u64, qm1);
                w.u_log = (w.u_log as u128 * pc as u128 % qm1 as u128) as u64;
                w.i = (w.i + count) % m;
            }
            Transform::Gamma { v_log, s } => {
                w.v_log = ((w.v_log as u128 + v_log as u128 * w.s as u128) % qm1 as u128) as u64;
                w.s = (w.s as u128 * s as u128 % qm1 as u128) as u64;
            }
        }
    }
    w
}

/// The chain undoing `chain`: reversed order, each move inverted.
pub fn invert_chain(ctx: &FieldCtx, chain: &[Transform]) -> Vec<Transform> {
    let qm1 = ctx.q() - 1;
    let m = ctx.m();
    chain
        .iter()
        .rev()
        .map(|t| match *t {
            Transform::Alpha { u_log } => Transform::Alpha { u_log: (qm1 - u_log) % qm1 },
            Transform::Beta { count } => Transform::Beta { count: (m - count % m) % m },
            Transform::Gamma { v_log, s } => {
                let s_inv = inv_mod(s, qm1).expect("chain substitutions carry units");
                let v_inv =
                    (qm1 as u128 - v_log as u128 * s_inv as u128 % qm1 as u128) as u64 % qm1;
                Transform::Gamma { v_log: v_inv, s: s_inv }
            }
        })
        .collect()
}

fn push_alpha(chain: &mut Vec<Transform>, u_log: u64) {
    if u_log != 0 {
        chain.push(Transform::Alpha { u_log });
    }
}

fn push_beta(chain: &mut Vec<Transform>, count: u32) {
    if count != 0 {
        chain.push(Transform::Beta { count });
    }
}

fn push_gamma(chain: &mut Vec<Transform>, v_log: u64, s: u64) {
    if v_log != 0 || s != 1 {
        chain.push(Transform::Gamma { v_log, s });
    }
}

/// Canonical triple and a realizing transform chain for a permutation
/// binomial. Errors with [`Error::NotAPermutation`] otherwise.
pub fn canonical_form(f: &Binomial) -> Result<(CanonicalTriple, Vec<Transform>)> {
    if !f.is_permutation()? {
        return Err(Error::NotAPermutation);
    }
    canonical_form_unchecked(f)
}

/// Canonical form without the permutation precondition. The reduction is
/// total on binomials; on non-permutations the triple still classifies the
/// equivalence class, it just does not name a permutation class.
pub fn canonical_form_unchecked(f: &Binomial) -> Result<(CanonicalTriple, Vec<Transform>)> {
    let ctx = f.ctx().clone();
    let qm1 = ctx.q() - 1;
    let p = ctx.p();
    let m = ctx.m();
    let mut chain: Vec<Transform> = Vec::new();
    let mut cur = f.clone();

    // Step 1: rescale exponents so they differ by exactly d = gcd(diff, q-1).
    let diff = f.exp_hi() - f.exp_lo();
    let d = ff::gcd(diff, qm1);
    let step = qm1 / d;
    let s1 = if step == 1 {
        coprime_lift(1, qm1, 1)?
    } else {
        coprime_lift(inv_mod(diff / d % step, step)?, qm1, step)?
    } % qm1;
    // The lift is a unit, so it only reduces to 0 when qm1 = 1, which admits
    // no binomials at all.
    push_gamma(&mut chain, 0, s1);
    if s1 != 1 {
        cur = cur.gamma(ctx.one(), s1)?;
    }
    let (n1, _, _) = split_pair(&cur, d, qm1)?;

    // Step 2: move the low exponent to its orbit minimum.
    let group = orbit_group(qm1, d)?;
    let (n_star, t, _) = group.orbit_min(n1);
    push_gamma(&mut chain, 0, t % qm1);
    if t % qm1 != 1 {
        cur = cur.gamma(ctx.one(), t)?;
    }
    let (n_chk, c_top, c_bot) = split_pair(&cur, d, qm1)?;
    if n_chk != n_star {
        return Err(Error::Internal(format!(
            "orbit move produced low exponent {n_chk}, expected {n_star}"
        )));
    }

    // Step 3a: make the top coefficient 1.
    let c_top_log = ctx.dlog(c_top)?;
    push_alpha(&mut chain, (qm1 - c_top_log) % qm1);
    if c_top_log != 0 {
        cur = cur.alpha(ctx.inv(c_top)?)?;
    }
    let mut e_full = (ctx.dlog(c_bot)? + qm1 - c_top_log) % qm1;

    // Step 3b: move the remaining coefficient log to its orbit minimum in
    // Z_d under the stabilizer subgroup.
    let minus = includes_minus(&ctx, d, n_star);
    let e_star = coeff_orbit_min(e_full % d, d, p, m, minus);
    let route = (0..m)
        .find_map(|i| {
            let pi = ff::mod_pow_u64(p, i as u64, d.max(1)) % d;
            if pi * (e_full % d) % d == e_star {
                Some((i, false))
            } else if minus && pi * ((d - e_full % d) % d) % d == e_star {
                Some((i, true))
            } else {
                None
            }
        })
        .ok_or_else(|| Error::Internal("no Frobenius power reaches the coefficient minimum".into()))?;
    let (i, via_inverse) = route;

    if via_inverse {
        // Flip the exponent pair with the substitution X -> X^{1 + d/n}; the
        // stabilizer condition makes 1 + k d a unit mod q-1 for k = n^{-1}.
        let k = inv_mod(n_star, qm1)?;
        let s_flip = norm1(1 + k as u128 * d as u128, qm1);
        push_gamma(&mut chain, 0, s_flip);
        if s_flip != 1 {
            cur = cur.gamma(ctx.one(), s_flip)?;
        }
        // The old bottom coefficient now sits on top; rescale it away.
        push_alpha(&mut chain, (qm1 - e_full) % qm1);
        if e_full != 0 {
            cur = cur.alpha(ctx.pow(ctx.xi(), (qm1 - e_full) as u128))?;
        }
        e_full = (qm1 - e_full) % qm1;
    }

    // Direct route: with c = xi^{e_full} and p^i e_full = e_star (mod d),
    // write c^{p^i} = xi^{e_star} * b^d and absorb b through a substitution.
    let pi_mod = ff::mod_pow_u64(p, i as u64, qm1);
    let w = (pi_mod as u128 * e_full as u128 + (qm1 - e_star) as u128) % qm1 as u128;
    debug_assert_eq!(w % d as u128, 0);
    let b_log = (w / d as u128) as u64;
    let b1_log =
        (b_log as u128 * ff::mod_pow_u64(p, ((m - i) % m) as u64, qm1) as u128 % qm1 as u128) as u64;
    let s3 = ff::mod_pow_u64(p, ((m - i) % m) as u64, qm1);
    push_gamma(&mut chain, b1_log, s3);
    if b1_log != 0 || s3 != 1 {
        cur = cur.gamma(ctx.pow(ctx.xi(), b1_log as u128), s3)?;
    }
    push_beta(&mut chain, i);
    for _ in 0..i {
        cur = cur.beta();
    }
    let u_log = (qm1 as u128 - b_log as u128 * (n_star + d) as u128 % qm1 as u128) as u64 % qm1;
    push_alpha(&mut chain, u_log);
    if u_log != 0 {
        cur = cur.alpha(ctx.pow(ctx.xi(), u_log as u128))?;
    }

    // Replay check: the chain must land exactly on the representativeform.
    let triple = CanonicalTriple { d, n: n_star, a_log: e_star };
    let expected = canonical_binomial(&ctx, &triple)?;
    if cur != expected || apply_chain(f, &chain)? != expected {
        return Err(Error::Internal(format!(
            "canonical chain replay mismatch for triple d={d} n={n_star} a_log={e_star}"
        )));
    }
    Ok((triple, chain))
}

/// Reads a binomial whose exponents differ by d mod q-1 as the pair
/// {n, n+d}: returns (n, coefficient of X^{n+d}, coefficient of X^n).
fn split_pair(f: &Binomial, d: u64, qm1: u64) -> Result<(u64, Fe, Fe)> {
    let gap = f.exp_hi() - f.exp_lo();
    if gap == d {
        Ok((f.exp_lo(), f.lead(), f.trail()))
    } else if gap == qm1 - d {
        // The pair wraps: n + d reduced past q-1 landed below n.
        Ok((f.exp_hi(), f.trail(), f.lead()))
    } else {
        Err(Error::Internal(format!(
            "exponent gap {gap} is neither {d} nor {}",
            qm1 - d
        )))
    }
}

/// Minimum of the orbit of e in Z_d under multiplication by p (and by -1
/// when the stabilizer includes it).
fn coeff_orbit_min(e: u64, d: u64, p: u64, m: u32, minus: bool) -> u64 {
    let mut best = u64::MAX;
    let mut pi = 1 % d.max(1);
    for _ in 0..m.max(1) {
        best = best.min(pi * (e % d) % d);
        if minus {
            best = best.min(pi * ((d - e % d) % d) % d);
        }
        pi = pi * (p % d) % d;
    }
    best
}

/// Decides equivalence of two permutation binomials over the same field via
/// canonical triples; on success returns a verified witness.
pub fn equivalent(f: &Binomial, g: &Binomial) -> Result<Option<EquivalenceWitness>> {
    if f.ctx().q() != g.ctx().q() {
        return Err(Error::FieldMismatch { q1: f.ctx().q(), q2: g.ctx().q() });
    }
    let (tf, chain_f) = canonical_form(f)?;
    let (tg, chain_g) = canonical_form(g)?;
    if tf != tg {
        return Ok(None);
    }
    let mut chain = chain_f;
    chain.extend(invert_chain(g.ctx(), &chain_g));
    let w = collapse(f.ctx(), &chain);
    if apply_witness(f, &w)? != *g {
        return Err(Error::Internal("collapsed equivalence witness failed to replay".into()));
    }
    Ok(Some(w))
}

/// Exhaustive equivalence search: tries every u-free composite
/// f(v X^s)^{p^i} in (v, s, i)-lexicographic order and solves for the
/// scaling; independent of the canonical-form machinery.
pub fn equivalent_bruteforce(f: &Binomial, g: &Binomial) -> Result<Option<EquivalenceWitness>> {
    let ctx = f.ctx().clone();
    let q = ctx.q();
    if q != g.ctx().q() {
        return Err(Error::FieldMismatch { q1: q, q2: g.ctx().q() });
    }
    if q > EQUIV_BRUTE_CAP {
        return Err(Error::EnumerationCap { q, cap: EQUIV_BRUTE_CAP, what: "equivalence search" });
    }
    let qm1 = q - 1;
    for v_idx in 1..q {
        let v = ctx.element(v_idx)?;
        for s in (1..=qm1).filter(|&s| ff::gcd(s, qm1) == 1) {
            let mut h = f.gamma(v, s)?;
            for i in 0..ctx.m() {
                if i > 0 {
                    h = h.beta();
                }
                if h.exp_hi() == g.exp_hi() && h.exp_lo() == g.exp_lo() {
                    let u = ctx.div(g.lead(), h.lead())?;
                    if ctx.mul(u, h.trail()) == g.trail() {
                        return Ok(Some(EquivalenceWitness {
                            u_log: ctx.dlog(u)?,
                            v_log: ctx.dlog(v)?,
                            s,
                            i,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Full classification of the field's permutation binomials: every class
/// keyed by its canonical triple, members in census order. Classes come out
/// sorted by triple.
pub fn classify_field(ctx: &Arc<FieldCtx>) -> Result<Vec<(CanonicalTriple, Vec<Binomial>)>> {
    let mut classes: std::collections::BTreeMap<CanonicalTriple, Vec<Binomial>> =
        std::collections::BTreeMap::new();
    for f in crate::binomial::all_permutation_binomials(ctx)? {
        let (t, _) = canonical_form(&f)?;
        classes.entry(t).or_default().push(f);
    }
    Ok(classes.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::{from_family, FamilyParams};
    use crate::ff::make_field;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn field(p: u64, m: u32) -> Arc<FieldCtx> {
        Arc::new(make_field(p, m).unwrap())
    }

    fn all_pbs(ctx: &Arc<FieldCtx>) -> Vec<Binomial> {
        crate::binomial::all_permutation_binomials(ctx).unwrap()
    }

    #[test]
    fn exponent_orbit_minima_frozen_values() {
        let ctx16 = field(2, 4);
        assert_eq!(compute_nd(&ctx16, 3).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        let ctx5 = field(5, 1);
        assert_eq!(compute_nd(&ctx5, 1).unwrap(), vec![1, 3]);
        assert!(matches!(
            compute_nd(&ctx16, 4),
            Err(Error::NonDivisor { d: 4, modulus: 15 })
        ));
    }

    #[test]
    fn stabilizer_subgroup_frozen_values() {
        let ctx = field(2, 4);
        // d = 15, n = 1: step is 1, so -1 joins the generators.
        assert_eq!(
            compute_gdn(&ctx, 15, 1).unwrap(),
            vec![1, 2, 4, 7, 8, 11, 13, 14]
        );
        // d = 1 and d = 2 have trivial unit groups.
        assert_eq!(compute_gdn(&ctx, 1, 1).unwrap(), vec![1]);
        let ctx9 = field(3, 2);
        assert_eq!(compute_gdn(&ctx9, 2, 1).unwrap(), vec![1]);
        // n must be an orbit minimum for its d.
        assert!(matches!(
            compute_gdn(&ctx, 3, 5),
            Err(Error::NotInNd { n: 5, d: 3 })
        ));
    }

    #[test]
    fn coefficient_orbit_minima_frozen_values() {
        let ctx = field(2, 4);
        assert_eq!(compute_adn(&ctx, 3, 1).unwrap(), vec![0, 1]);
        assert_eq!(compute_adn(&ctx, 1, 1).unwrap(), vec![0]);
        // A_{d,n} always contains 0 (the orbit of 0 is {0}) and partitions
        // Z_d into stabilizer orbits.
        for (p, m) in [(2u64, 4u32), (3, 2), (5, 1), (7, 1), (2, 3)] {
            let ctx = field(p, m);
            let qm1 = ctx.q() - 1;
            for d in (1..=qm1).filter(|d| qm1 % d == 0) {
                for n in compute_nd(&ctx, d).unwrap() {
                    let members = compute_gdn(&ctx, d, n).unwrap();
                    let minima = compute_adn(&ctx, d, n).unwrap();
                    assert_eq!(minima[0], 0);
                    // Each element of Z_d reaches exactly one listed minimum.
                    for x in 0..d {
                        let mut orbit: Vec<u64> =
                            members.iter().map(|&g| g % d * x % d).collect();
                        orbit.sort_unstable();
                        assert_eq!(
                            minima.iter().filter(|&&e| orbit.contains(&e)).count(),
                            1
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_triples_are_valid_and_idempotent() {
        // F_5 and F_8 admit no permutation binomials at all (their loops are
        // vacuous and double as a regression check on that fact); F_7, F_9
        // and F_16 have 24, 96 and 600 of them.
        for (p, m) in [(5u64, 1u32), (2, 3), (7, 1), (3, 2), (2, 4)] {
            let ctx = field(p, m);
            let qm1 = ctx.q() - 1;
            for f in all_pbs(&ctx) {
                let (t, chain) = canonical_form(&f).unwrap();
                assert_eq!(qm1 % t.d, 0);
                assert!(compute_nd(&ctx, t.d).unwrap().contains(&t.n));
                assert!(compute_adn(&ctx, t.d, t.n).unwrap().contains(&t.a_log));
                // The representative is itself a permutation in the class,
                // and reducing it is a fixed point with an empty chain.
                let rep = canonical_binomial(&ctx, &t).unwrap();
                assert!(rep.is_permutation().unwrap());
                let (t2, chain2) = canonical_form(&rep).unwrap();
                assert_eq!(t, t2);
                assert!(chain2.is_empty());
                // d is the gcd invariant of the original exponents.
                assert_eq!(t.d, ff::gcd(f.exp_hi() - f.exp_lo(), qm1));
                // Chains only contain non-identity moves.
                for tr in &chain {
                    match *tr {
                        Transform::Alpha { u_log } => assert_ne!(u_log, 0),
                        Transform::Beta { count } => assert_ne!(count, 0),
                        Transform::Gamma { v_log, s } => assert!(v_log != 0 || s != 1),
                    }
                }
            }
        }
    }

    #[test]
    fn triples_separate_classes_exactly_like_brute_force() {
        for (p, m) in [(7u64, 1u32), (3, 2)] {
            let ctx = field(p, m);
            let tagged: Vec<(Binomial, CanonicalTriple)> = all_pbs(&ctx)
                .into_iter()
                .map(|f| {
                    let t = canonical_form(&f).unwrap().0;
                    (f, t)
                })
                .collect();
            assert!(!tagged.is_empty());
            for (f, tf) in &tagged {
                for (g, tg) in &tagged {
                    let brute = equivalent_bruteforce(f, g).unwrap();
                    assert_eq!(
                        tf == tg,
                        brute.is_some(),
                        "triple/brute disagreement over q={}",
                        ctx.q()
                    );
                    if let Some(w) = brute {
                        assert_eq!(apply_witness(f, &w).unwrap(), *g);
                    }
                }
            }
            // The witness-producing path agrees on a sample of pairs.
            for (f, tf) in tagged.iter().take(6) {
                for (g, tg) in tagged.iter().take(6) {
                    let fast = equivalent(f, g).unwrap();
                    assert_eq!(fast.is_some(), tf == tg);
                    if let Some(w) = fast {
                        assert_eq!(apply_witness(f, &w).unwrap(), *g);
                    }
                }
            }
        }
    }

    #[test]
    fn self_equivalence_yields_the_identity_witness_first() {
        let ctx = field(7, 1);
        let f = all_pbs(&ctx).into_iter().next().expect("F_7 has permutation binomials");
        let w = equivalent_bruteforce(&f, &f).unwrap().unwrap();
        assert_eq!(w, EquivalenceWitness::identity());
        let w2 = equivalent(&f, &f).unwrap().unwrap();
        assert_eq!(apply_witness(&f, &w2).unwrap(), f);
    }

    #[test]
    fn unchecked_reduction_is_total_on_non_permutations() {
        let ctx = field(2, 2);
        let f = Binomial::new(&ctx, (ctx.one(), 2), (ctx.xi(), 1)).unwrap();
        assert!(!f.is_permutation().unwrap());
        assert!(matches!(canonical_form(&f), Err(Error::NotAPermutation)));
        let (t, chain) = canonical_form_unchecked(&f).unwrap();
        assert_eq!(t, CanonicalTriple { d: 1, n: 1, a_log: 0 });
        assert_eq!(apply_chain(&f, &chain).unwrap(), canonical_binomial(&ctx, &t).unwrap());
    }

    #[test]
    fn chain_algebra_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xca11);
        for (p, m) in [(2u64, 4u32), (3, 2), (7, 1)] {
            let ctx = field(p, m);
            let q = ctx.q();
            let qm1 = q - 1;
            let units: Vec<u64> = (1..qm1).filter(|&s| ff::gcd(s, qm1) == 1).collect();
            for _ in 0..60 {
                // Random valid binomial.
                let f = loop {
                    let e1 = rng.random_range(1..qm1);
                    let e2 = rng.random_range(1..qm1);
                    if e1 == e2 {
                        continue;
                    }
                    let c1 = ctx.element(rng.random_range(1..q)).unwrap();
                    let c2 = ctx.element(rng.random_range(1..q)).unwrap();
                    break Binomial::new(&ctx, (c1, e1), (c2, e2)).unwrap();
                };
                // Random chain.
                let chain: Vec<Transform> = (0..rng.random_range(0..6))
                    .map(|_| match rng.random_range(0..3u32) {
                        0 => Transform::Alpha { u_log: rng.random_range(0..qm1) },
                        1 => Transform::Beta { count: rng.random_range(0..m) },
                        _ => Transform::Gamma {
                            v_log: rng.random_range(0..qm1),
                            s: units[rng.random_range(0..units.len())],
                        },
                    })
                    .collect();
                let g = apply_chain(&f, &chain).unwrap();
                // Collapsing preserves the induced map.
                let w = collapse(&ctx, &chain);
                assert_eq!(apply_witness(&f, &w).unwrap(), g);
                // Inverting undoes it.
                let back = apply_chain(&g, &invert_chain(&ctx, &chain)).unwrap();
                assert_eq!(back, f);
            }
        }
    }

    #[test]
    fn reciprocal_coefficient_family_pairs_are_equivalent() {
        // Over F_25: X(X^{2(q-1)} + a) pairs with X^3(X^{2(q-1)} + a^{-1}).
        let ctx = field(5, 2);
        let mut hits = 0;
        for a in ctx.nonzero_elements() {
            let f = from_family(&FamilyParams { q: 5, e: 2, n: 1, d: 2, a }, &ctx).unwrap();
            if !f.is_permutation().unwrap() {
                continue;
            }
            hits += 1;
            let g = from_family(
                &FamilyParams { q: 5, e: 2, n: 3, d: 2, a: ctx.inv(a).unwrap() },
                &ctx,
            )
            .unwrap();
            assert!(g.is_permutation().unwrap());
            let (tf, _) = canonical_form(&f).unwrap();
            let (tg, _) = canonical_form(&g).unwrap();
            assert_eq!(tf, tg);
            let w = equivalent(&f, &g).unwrap().expect("pair must be equivalent");
            assert_eq!(apply_witness(&f, &w).unwrap(), g);
        }
        assert!(hits > 0, "some coefficient must give a permutation");
    }

    #[test]
    fn exponent_doubling_family_pairs_are_equivalent() {
        // Over F_16: X^13(X^{3*3} + a) pairs with X^11(X^3 + a), same a.
        let ctx = field(2, 4);
        let mut hits = 0;
        for a in ctx.nonzero_elements() {
            let f = from_family(&FamilyParams { q: 4, e: 2, n: 13, d: 3, a }, &ctx).unwrap();
            if !f.is_permutation().unwrap() {
                continue;
            }
            hits += 1;
            let g = from_family(&FamilyParams { q: 4, e: 2, n: 11, d: 1, a }, &ctx).unwrap();
            assert!(g.is_permutation().unwrap());
            let w = equivalent(&f, &g).unwrap().expect("pair must be equivalent");
            assert_eq!(apply_witness(&f, &w).unwrap(), g);
            // The independent search agrees.
            assert!(equivalent_bruteforce(&f, &g).unwrap().is_some());
        }
        assert_eq!(hits, 10, "exactly the non-norm-one coefficients qualify");
    }

    #[test]
    fn mismatched_fields_and_caps_are_rejected() {
        let ctx8 = field(2, 3);
        let ctx9 = field(3, 2);
        let f = Binomial::new(&ctx8, (ctx8.one(), 3), (ctx8.one(), 1)).unwrap();
        let g = Binomial::new(&ctx9, (ctx9.one(), 3), (ctx9.one(), 1)).unwrap();
        assert!(matches!(
            equivalent(&f, &g),
            Err(Error::FieldMismatch { q1: 8, q2: 9 })
        ));
        assert!(matches!(
            equivalent_bruteforce(&f, &g),
            Err(Error::FieldMismatch { .. })
        ));

        let big = Arc::new(make_field(2, 13).unwrap());
        let h = Binomial::new(&big, (big.one(), 2), (big.one(), 1)).unwrap();
        assert!(matches!(
            equivalent_bruteforce(&h, &h),
            Err(Error::EnumerationCap { q: 8192, cap: 4096, .. })
        ));
    }
}
