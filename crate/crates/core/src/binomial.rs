//! Binomials over a finite field, the parametric family X^n(X^{d(q-1)} + a),
//! and the norm-one-subgroup permutation test for quadratic extensions.
//!
//! A binomial is kept in reduced form: two terms with nonzero coefficients
//! and distinct exponents in {1, ..., q-2}, sorted so the high exponent comes
//! first. Reduction is modulo X^q - X restricted to positive exponents, so
//! reduced binomials correspond bijectively to the functions they induce.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ff::{self, Fe, FieldCtx, FieldDescr};
use crate::{Error, Result};

/// Cap on the field order for exhaustive function tabulation.
pub const FN_TABLE_CAP: u64 = 1 << 16;

/// A reduced two-term polynomial `lead*X^exp_hi + trail*X^exp_lo` over a
/// shared field context, with `exp_hi > exp_lo`, both in {1, ..., q-2}.
#[derive(Clone, Debug)]
pub struct Binomial {
    ctx: Arc<FieldCtx>,
    lead: Fe,
    exp_hi: u64,
    trail: Fe,
    exp_lo: u64,
}

impl PartialEq for Binomial {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.p() == other.ctx.p()
            && self.ctx.m() == other.ctx.m()
            && self.lead == other.lead
            && self.exp_hi == other.exp_hi
            && self.trail == other.trail
            && self.exp_lo == other.exp_lo
    }
}

impl Eq for Binomial {}

impl Binomial {
    /// Builds a reduced binomial from two raw terms (coefficient, exponent).
    ///
    /// Exponents are reduced mod q-1 into {1, ..., q-2}; an exponent that is
    /// a multiple of q-1, equal exponents after reduction, or a zero
    /// coefficient is an error. Term order does not matter.
    pub fn new(ctx: &Arc<FieldCtx>, t1: (Fe, u64), t2: (Fe, u64)) -> Result<Self> {
        let qm1 = ctx.q() - 1;
        if t1.0 == ctx.zero() || t2.0 == ctx.zero() {
            return Err(Error::ZeroCoefficient);
        }
        let e1 = reduce_exponent(t1.1, qm1)?;
        let e2 = reduce_exponent(t2.1, qm1)?;
        if e1 == e2 {
            return Err(Error::CongruentExponents { e1: t1.1, e2: t2.1, modulus: qm1 });
        }
        let ((lead, exp_hi), (trail, exp_lo)) = if e1 > e2 {
            ((t1.0, e1), (t2.0, e2))
        } else {
            ((t2.0, e2), (t1.0, e1))
        };
        Ok(Binomial { ctx: Arc::clone(ctx), lead, exp_hi, trail, exp_lo })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn lead(&self) -> Fe {
        self.lead
    }

    pub fn exp_hi(&self) -> u64 {
        self.exp_hi
    }

    pub fn trail(&self) -> Fe {
        self.trail
    }

    pub fn exp_lo(&self) -> u64 {
        self.exp_lo
    }

    /// Value at a point. Both exponents are positive, so 0 maps to 0.
    pub fn eval(&self, x: Fe) -> Fe {
        let hi = self.ctx.mul(self.lead, self.ctx.pow(x, self.exp_hi as u128));
        let lo = self.ctx.mul(self.trail, self.ctx.pow(x, self.exp_lo as u128));
        self.ctx.add(hi, lo)
    }

    /// The induced function as a vector indexed by element index.
    pub fn as_function_table(&self) -> Result<Vec<u64>> {
        let q = self.ctx.q();
        if q > FN_TABLE_CAP {
            return Err(Error::EnumerationCap { q, cap: FN_TABLE_CAP, what: "function tabulation" });
        }
        Ok(self.ctx.elements().map(|x| self.eval(x).index()).collect())
    }

    /// Whether the induced function permutes the field. Walks the elements
    /// with a seen-set and stops at the first collision.
    pub fn is_permutation(&self) -> Result<bool> {
        let q = self.ctx.q();
        if q > FN_TABLE_CAP {
            return Err(Error::EnumerationCap { q, cap: FN_TABLE_CAP, what: "permutation check" });
        }
        let mut seen = vec![false; q as usize];
        for x in self.ctx.elements() {
            let y = self.eval(x).index() as usize;
            if seen[y] {
                return Ok(false);
            }
            seen[y] = true;
        }
        Ok(true)
    }

    /// Left coefficient scaling f -> u*f.
    pub fn alpha(&self, u: Fe) -> Result<Self> {
        if u == self.ctx.zero() {
            return Err(Error::ZeroCoefficient);
        }
        Ok(Binomial {
            ctx: Arc::clone(&self.ctx),
            lead: self.ctx.mul(u, self.lead),
            exp_hi: self.exp_hi,
            trail: self.ctx.mul(u, self.trail),
            exp_lo: self.exp_lo,
        })
    }

    /// Frobenius twist f -> f^p: coefficients to the p-th power, exponents
    /// scaled by p mod q-1.
    pub fn beta(&self) -> Self {
        let p = self.ctx.p();
        Binomial::new(
            &self.ctx,
            (self.ctx.frob(self.lead), mul_mod(self.exp_hi, p, self.ctx.q() - 1)),
            (self.ctx.frob(self.trail), mul_mod(self.exp_lo, p, self.ctx.q() - 1)),
        )
        .expect("frobenius preserves the binomial invariants")
    }

    /// Substitution f -> f(v*X^s) for v nonzero and s a unit mod q-1.
    pub fn gamma(&self, v: Fe, s: u64) -> Result<Self> {
        let qm1 = self.ctx.q() - 1;
        if v == self.ctx.zero() {
            return Err(Error::ZeroCoefficient);
        }
        if ff::gcd(s % qm1, qm1) != 1 {
            return Err(Error::NotAUnit { t: s % qm1, modulus: qm1 });
        }
        let term = |c: Fe, e: u64| -> (Fe, u64) {
            (self.ctx.mul(c, self.ctx.pow(v, e as u128)), mul_mod(e, s, qm1))
        };
        Ok(Binomial::new(&self.ctx, term(self.lead, self.exp_hi), term(self.trail, self.exp_lo))
            .expect("unit substitution preserves the binomial invariants"))
    }

    /// Serializable form; requires exp/log tables for the coefficient logs.
    pub fn repr(&self) -> Result<BinomialRepr> {
        Ok(BinomialRepr {
            field: self.ctx.descr(),
            terms: vec![
                TermRepr { coeff_log: self.ctx.dlog(self.lead)?, exp: self.exp_hi },
                TermRepr { coeff_log: self.ctx.dlog(self.trail)?, exp: self.exp_lo },
            ],
        })
    }

    /// Rebuilds a binomial (and its field) from the serializable form.
    pub fn from_repr(repr: &BinomialRepr) -> Result<Self> {
        let ctx = Arc::new(ff::field_from_descr(&repr.field)?);
        if repr.terms.len() != 2 {
            return Err(Error::Malformed(format!(
                "a binomial has exactly 2 terms, got {}",
                repr.terms.len()
            )));
        }
        let coeff = |t: &TermRepr| ctx.pow(ctx.xi(), t.coeff_log as u128);
        Binomial::new(
            &ctx,
            (coeff(&repr.terms[0]), repr.terms[0].exp),
            (coeff(&repr.terms[1]), repr.terms[1].exp),
        )
    }
}

fn reduce_exponent(e: u64, qm1: u64) -> Result<u64> {
    let r = e % qm1;
    if r == 0 {
        return Err(Error::ExponentZero { exp: e, modulus: qm1 });
    }
    Ok(r)
}

fn mul_mod(a: u64, b: u64, modulus: u64) -> u64 {
    (a as u128 * b as u128 % modulus as u128) as u64
}

/// One term of the serialized form: coefficient as a discrete log of the
/// field's primitive element, exponent already reduced.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermRepr {
    pub coeff_log: u64,
    pub exp: u64,
}

/// Serialized binomial: owning field description plus terms, high exponent
/// first.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BinomialRepr {
    pub field: FieldDescr,
    pub terms: Vec<TermRepr>,
}

/// Parameters of the family X^n(X^{d(q-1)} + a) over F_{q^e}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub q: u64,
    pub e: u32,
    pub n: u64,
    pub d: u64,
    pub a: Fe,
}

impl FamilyParams {
    /// Order q^e of the field the family lives in, if it fits in u64.
    pub fn big_q(&self) -> Option<u64> {
        let mut acc: u128 = 1;
        for _ in 0..self.e {
            acc = acc.checked_mul(self.q as u128)?;
            if acc > u64::MAX as u128 {
                return None;
            }
        }
        Some(acc as u64)
    }
}

/// Instantiates the family member X^{n + d(q-1)} + a*X^n as a reduced
/// binomial of F_{q^e}.
///
/// The parameters are degenerate when either exponent or their difference
/// vanishes mod q^e - 1; each case is reported by name.
pub fn from_family(params: &FamilyParams, ctx: &Arc<FieldCtx>) -> Result<Binomial> {
    let expected = params.big_q().unwrap_or(0);
    if expected != ctx.q() || expected < 2 {
        return Err(Error::FamilyFieldMismatch { expected, actual: ctx.q() });
    }
    if params.a == ctx.zero() {
        return Err(Error::ZeroCoefficient);
    }
    let qm1_big = (expected - 1) as u128;
    let n_red = (params.n as u128 % qm1_big) as u64;
    let dq_red = (params.d as u128 * (params.q - 1) as u128 % qm1_big) as u64;
    if n_red == 0 {
        return Err(Error::DegenerateFamily { which: "n" });
    }
    if dq_red == 0 {
        return Err(Error::DegenerateFamily { which: "d(q-1)" });
    }
    let hi_red = ((n_red + dq_red) as u128 % qm1_big) as u64;
    if hi_red == 0 {
        return Err(Error::DegenerateFamily { which: "n+d(q-1)" });
    }
    Binomial::new(ctx, (ctx.one(), hi_red), (params.a, n_red))
}

/// Whether a criterion-false verdict from [`MuTester`] implies "not a
/// permutation": true exactly when every prime factor of gcd(n, d) divides
/// q^2 - 1. A criterion-true verdict implies "permutation" unconditionally.
pub fn criterion_is_complete(n: u64, d: u64, q: u64) -> bool {
    let g = ff::gcd(n, d);
    let qsq_m1 = (q as u128 * q as u128 - 1) as u64;
    ff::prime_factors(g).iter().all(|&r| qsq_m1 % r == 0)
}

/// Reusable norm-one-subgroup permutation test for the family over F_{q^2}:
/// f is a permutation iff gcd(n, d(q-1)) = 1 and X^n (X^d + a)^{q-1} is
/// injective on the (q+1)-element norm-one subgroup.
pub struct MuTester {
    ctx: Arc<FieldCtx>,
    q_base: u64,
    mu: Vec<Fe>,
    scratch: Vec<u64>,
}

impl MuTester {
    pub fn new(ctx: &Arc<FieldCtx>, q_base: u64) -> Result<Self> {
        let mu = ff::mu_subgroup(ctx, q_base)?;
        Ok(MuTester { ctx: Arc::clone(ctx), q_base, mu, scratch: Vec::new() })
    }

    /// Evaluates the criterion for X^n(X^{d(q-1)} + a).
    pub fn is_pb(&mut self, n: u64, d: u64, a: Fe) -> bool {
        let dq = d as u128 * (self.q_base - 1) as u128;
        gcd_u128(n as u128, dq) == 1 && self.injective_on_mu(n, d, a)
    }

    /// The injectivity half of the criterion: whether X^n (X^d + a)^{q-1}
    /// maps the norm-one subgroup injectively. A zero of X^d + a on the
    /// subgroup counts as a failure (the image collapses into 0's fiber).
    pub fn injective_on_mu(&mut self, n: u64, d: u64, a: Fe) -> bool {
        let ctx = &self.ctx;
        self.scratch.clear();
        for &x in &self.mu {
            let t = ctx.add(ctx.pow(x, d as u128), a);
            if t == ctx.zero() {
                return false;
            }
            let img = ctx.mul(ctx.pow(x, n as u128), ctx.pow(t, (self.q_base - 1) as u128));
            self.scratch.push(img.index());
        }
        self.scratch.sort_unstable();
        self.scratch.windows(2).all(|w| w[0] != w[1])
    }

    /// The norm-one subgroup this tester walks.
    pub fn mu(&self) -> &[Fe] {
        &self.mu
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// One-shot form of [`MuTester`] with full parameter validation. Only
/// quadratic extensions (e = 2) are supported.
pub fn is_pb_mu_criterion(params: &FamilyParams, ctx: &Arc<FieldCtx>) -> Result<bool> {
    if params.e != 2 {
        return Err(Error::NotQuadraticFamily { e: params.e });
    }
    from_family(params, ctx)?;
    Ok(MuTester::new(ctx, params.q)?.is_pb(params.n, params.d, params.a))
}

/// Cap on the field order for the full binomial census; there are about
/// q^4 / 2 candidates to walk.
pub const CENSUS_CAP: u64 = 1 << 6;

/// Every reduced binomial of the field, in deterministic order: exponent
/// pairs (hi, lo) lexicographic, coefficients by element index.
pub fn all_binomials(ctx: &Arc<FieldCtx>) -> Result<Vec<Binomial>> {
    let q = ctx.q();
    if q > CENSUS_CAP {
        return Err(Error::EnumerationCap { q, cap: CENSUS_CAP, what: "binomial census" });
    }
    let qm1 = q - 1;
    let mut out = Vec::new();
    for exp_hi in 2..qm1 {
        for exp_lo in 1..exp_hi {
            for lead in ctx.nonzero_elements() {
                for trail in ctx.nonzero_elements() {
                    out.push(Binomial::new(ctx, (lead, exp_hi), (trail, exp_lo))?);
                }
            }
        }
    }
    Ok(out)
}

/// The permutation binomials among [`all_binomials`], same order.
pub fn all_permutation_binomials(ctx: &Arc<FieldCtx>) -> Result<Vec<Binomial>> {
    let mut pbs = Vec::new();
    for f in all_binomials(ctx)? {
        if f.is_permutation()? {
            pbs.push(f);
        }
    }
    Ok(pbs)
}
