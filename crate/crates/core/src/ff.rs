//! Deterministic construction of `F_{p^m}` with desk-scale arithmetic.
//!
//! Construction rule: the modulus is the least monic irreducible polynomial
//! of degree `m` over `F_p`, and the primitive element `xi` is the least
//! nonzero element of full multiplicative order `q - 1`. "Least" compares
//! coefficient vectors `(c_0, ..., c_{m-1})` by their base-`p` integer value
//! `c_0 + c_1 p + ...`; that single ordering is the tie-break rule for every
//! deterministic choice in this crate (modulus scan, `xi`, embedding roots).
//! Two independent constructions of the same order agree bit for bit.
//!
//! Elements are indices into that ordering. Fields up to [`TABLE_LIMIT`]
//! carry exp/log tables, so multiplication, inversion, powering and discrete
//! logs are O(1) lookups; larger fields fall back to polynomial arithmetic
//! and have no discrete logs (operations that need them reject such fields).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest order for which exp/log tables are built.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Hard cap on constructible field orders.
pub const FIELD_LIMIT: u64 = 1 << 26;

/// A field element: an index into the coefficient-vector ordering of its
/// owning [`FieldCtx`]. Elements are plain data; all arithmetic goes through
/// the context.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Fe(pub(crate) u64);

impl Fe {
    /// Position of the element in the field's total order (0 is zero, 1 is one).
    pub fn index(self) -> u64 {
        self.0
    }
}

/// Table policy for [`make_field_with`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum TableMode {
    /// Build tables when the order allows it, otherwise run table-free.
    #[default]
    Auto,
    /// Error out instead of falling back to table-free arithmetic.
    Required,
    /// Never build tables (mainly for exercising the generic path).
    Off,
}

/// A fixed field `F_{p^m}`: modulus, primitive element, optional tables.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    p: u64,
    m: u32,
    q: u64,
    /// Little-endian coefficients, length `m + 1`, monic.
    modulus: Vec<u64>,
    xi: u64,
    /// Distinct prime factors of `q - 1`.
    qm1_primes: Vec<u64>,
    exp: Option<Vec<u64>>,
    log: Option<Vec<u64>>,
}

const NO_LOG: u64 = u64::MAX;

// ---- integer helpers ----------------------------------------------------

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes `q` as `p^m` for prime `p`, if possible.
pub fn factor_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = q;
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    let mut m = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest == 1 {
        Some((p, m))
    } else {
        None
    }
}

// ---- dense polynomials over F_p (construction-time only) -----------------

fn ptrim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pdeg(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    ptrim(&mut out);
    out
}

/// Remainder of `a` modulo monic-normalizable `b`.
fn prem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let db = pdeg(b).expect("division by zero polynomial");
    let lead_inv = mod_inv_u64(b[db], p);
    while let Some(dr) = pdeg(&r) {
        if dr < db {
            break;
        }
        let c = (r[dr] * lead_inv) % p;
        let shift = dr - db;
        for (j, &bj) in b.iter().enumerate() {
            let t = (c * bj) % p;
            let idx = shift + j;
            r[idx] = (r[idx] + p - t) % p;
        }
        ptrim(&mut r);
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    ptrim(&mut x);
    ptrim(&mut y);
    while !y.is_empty() {
        let r = prem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn ppowmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), f, p);
        }
        b = prem(&pmul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    // Fermat; p is prime and a != 0 mod p.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Irreducibility of a monic degree-`m` polynomial over `F_p`:
/// `X^{p^m} = X (mod f)` and `gcd(X^{p^{m/t}} - X, f) = 1` for every prime
/// `t | m`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let m = pdeg(f).unwrap();
    if m == 1 {
        return true;
    }
    let checkpoints: Vec<usize> = prime_factors(m as u64)
        .into_iter()
        .map(|t| m / t as usize)
        .collect();
    let x = vec![0u64, 1];
    let mut r = prem(&x, f, p);
    for j in 1..=m {
        r = ppowmod(&r, p, f, p);
        if checkpoints.contains(&j) {
            // gcd(r - X, f) must be constant.
            let mut diff = r.clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] = (diff[1] + p - 1) % p;
            ptrim(&mut diff);
            let g = pgcd(&diff, f, p);
            if pdeg(&g) != Some(0) {
                return false;
            }
        }
    }
    // r is now X^{p^m} mod f.
    let xr = prem(&x, f, p);
    r == xr
}

fn find_modulus(p: u64, m: u32) -> Vec<u64> {
    let md = m as usize;
    let mut k = 0u64;
    loop {
        let mut f = vec![0u64; md + 1];
        let mut t = k;
        for c in f.iter_mut().take(md) {
            *c = t % p;
            t /= p;
        }
        f[md] = 1;
        if is_irreducible(&f, p) {
            return f;
        }
        k += 1;
        debug_assert!(t == 0 || k > 0, "modulus scan escaped its range");
    }
}

// ---- construction ---------------------------------------------------------

/// Builds `F_{p^m}` with the default table policy.
pub fn make_field(p: u64, m: u32) -> Result<FieldCtx> {
    make_field_with(p, m, TableMode::Auto)
}

/// Builds `F_{p^m}` with an explicit table policy.
pub fn make_field_with(p: u64, m: u32, mode: TableMode) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = (0..m).try_fold(1u64, |acc, _| {
        acc.checked_mul(p).filter(|&v| v <= FIELD_LIMIT)
    });
    let q = q.ok_or(Error::FieldTooLarge {
        q: 0,
        cap: FIELD_LIMIT,
    })?;
    let tables = match mode {
        TableMode::Auto => q <= TABLE_LIMIT,
        TableMode::Required => {
            if q > TABLE_LIMIT {
                return Err(Error::TablesUnavailable { q, cap: TABLE_LIMIT });
            }
            true
        }
        TableMode::Off => false,
    };
    let modulus = find_modulus(p, m);
    let qm1_primes = prime_factors(q - 1);
    let mut ctx = FieldCtx {
        p,
        m,
        q,
        modulus,
        xi: 0,
        qm1_primes,
        exp: None,
        log: None,
    };
    if tables {
        ctx.build_tables();
    } else {
        ctx.xi = ctx.find_xi_generic();
    }
    Ok(ctx)
}

/// Builds the field of order `q` (which must be a prime power).
pub fn make_field_from_order(q: u64) -> Result<FieldCtx> {
    let (p, m) = factor_prime_power(q).ok_or(Error::NotPrimePower { q })?;
    make_field(p, m)
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    /// Field order `p^m`.
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Little-endian modulus coefficients, length `m + 1`, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn has_tables(&self) -> bool {
        self.exp.is_some()
    }
    pub fn zero(&self) -> Fe {
        Fe(0)
    }
    pub fn one(&self) -> Fe {
        Fe(1)
    }
    /// The deterministic primitive element.
    pub fn xi(&self) -> Fe {
        Fe(self.xi)
    }

    fn unpack(&self, idx: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.m as usize];
        let mut t = idx;
        for c in v.iter_mut() {
            *c = t % self.p;
            t /= self.p;
        }
        v
    }

    fn pack(&self, coeffs: &[u64]) -> u64 {
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    fn build_tables(&mut self) {
        let qm1 = self.q - 1;
        // Find any generator first, by scanning in element order.
        let mut gen = 1u64;
        for idx in 1..self.q {
            if self.order_is_full_generic(idx) {
                gen = idx;
                break;
            }
        }
        let mut exp = vec![0u64; qm1 as usize];
        let mut log = vec![NO_LOG; self.q as usize];
        let mut cur = 1u64;
        for (k, e) in exp.iter_mut().enumerate() {
            *e = cur;
            log[cur as usize] = k as u64;
            cur = self.mul_generic(cur, gen);
        }
        debug_assert_eq!(cur, 1, "generator order mismatch");
        // xi is the least element whose log w.r.t. gen is a unit mod q-1.
        let mut xi = gen;
        for idx in 1..self.q {
            let l = log[idx as usize];
            if l != NO_LOG && gcd(l, qm1) == 1 {
                xi = idx;
                break;
            }
        }
        if xi != gen {
            let shift = log[xi as usize] as u128;
            let mut exp2 = vec![0u64; qm1 as usize];
            let mut log2 = vec![NO_LOG; self.q as usize];
            for k in 0..qm1 {
                let e = exp[((k as u128 * shift) % qm1 as u128) as usize];
                exp2[k as usize] = e;
                log2[e as usize] = k;
            }
            exp = exp2;
            log = log2;
        }
        self.xi = xi;
        self.exp = Some(exp);
        self.log = Some(log);
    }

    fn find_xi_generic(&self) -> u64 {
        for idx in 1..self.q {
            if self.order_is_full_generic(idx) {
                return idx;
            }
        }
        unreachable!("every finite field has a primitive element")
    }

    fn order_is_full_generic(&self, idx: u64) -> bool {
        let qm1 = self.q - 1;
        self.qm1_primes
            .iter()
            .all(|&r| self.pow_generic(idx, qm1 / r) != 1)
    }

    fn mul_generic(&self, a: u64, b: u64) -> u64 {
        let pa = self.unpack(a);
        let pb = self.unpack(b);
        let prod = pmul(&pa, &pb, self.p);
        let r = prem(&prod, &self.modulus, self.p);
        let mut full = vec![0u64; self.m as usize];
        full[..r.len()].copy_from_slice(&r);
        self.pack(&full)
    }

    fn pow_generic(&self, base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_generic(acc, b);
            }
            b = self.mul_generic(b, b);
            e >>= 1;
        }
        acc
    }

    // ---- element plumbing ----

    /// Element with the given index, bounds-checked.
    pub fn element(&self, idx: u64) -> Result<Fe> {
        if idx < self.q {
            Ok(Fe(idx))
        } else {
            Err(Error::IndexOutOfRange { idx, q: self.q })
        }
    }

    /// Little-endian coefficient vector of length `m`.
    pub fn coeffs(&self, x: Fe) -> Vec<u64> {
        self.unpack(x.0)
    }

    /// Element from a little-endian coefficient vector (length at most `m`).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Fe> {
        if coeffs.len() > self.m as usize {
            return Err(Error::IndexOutOfRange {
                idx: u64::MAX,
                q: self.q,
            });
        }
        let mut full = vec![0u64; self.m as usize];
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(Error::CoefficientOutOfRange { c, p: self.p });
            }
            full[i] = c;
        }
        Ok(Fe(self.pack(&full)))
    }

    /// Image of the integer `k` (i.e. `k` times one).
    pub fn int(&self, k: u64) -> Fe {
        Fe(k % self.p)
    }

    /// All elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// All nonzero elements in ascending order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.q).map(Fe)
    }

    // ---- arithmetic ----

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if self.m == 1 {
            return Fe((a.0 + b.0) % self.p);
        }
        let pa = self.unpack(a.0);
        let pb = self.unpack(b.0);
        let sum: Vec<u64> = pa
            .iter()
            .zip(pb.iter())
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        Fe(self.pack(&sum))
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.m == 1 {
            return Fe((self.p - a.0) % self.p);
        }
        let pa = self.unpack(a.0);
        let n: Vec<u64> = pa.iter().map(|&x| (self.p - x) % self.p).collect();
        Fe(self.pack(&n))
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(a.0 < self.q && b.0 < self.q);
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let qm1 = self.q - 1;
                let s = log[a.0 as usize] + log[b.0 as usize];
                let s = if s >= qm1 { s - qm1 } else { s };
                Fe(exp[s as usize])
            }
            _ => Fe(self.mul_generic(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let qm1 = self.q - 1;
                let l = log[a.0 as usize];
                Ok(Fe(exp[((qm1 - l) % qm1) as usize]))
            }
            _ => Ok(Fe(self.pow_generic(a.0, self.q - 2))),
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with the convention `0^0 = 1`.
    pub fn pow(&self, a: Fe, e: u128) -> Fe {
        if e == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        let qm1 = (self.q - 1) as u128;
        let e = (e % qm1) as u64;
        if e == 0 {
            return Fe(1);
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u128;
                Fe(exp[((l * e as u128) % qm1) as usize])
            }
            _ => Fe(self.pow_generic(a.0, e)),
        }
    }

    /// `a^e` for signed `e`; negative exponents require `a != 0`.
    pub fn pow_signed(&self, a: Fe, e: i128) -> Result<Fe> {
        if e >= 0 {
            return Ok(self.pow(a, e as u128));
        }
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let inv = self.inv(a)?;
        Ok(self.pow(inv, e.unsigned_abs()))
    }

    /// Frobenius `x -> x^p`.
    pub fn frob(&self, a: Fe) -> Fe {
        self.pow(a, self.p as u128)
    }

    /// Iterated Frobenius `x -> x^{p^i}`.
    pub fn frob_pow(&self, a: Fe, i: u32) -> Fe {
        if a.0 == 0 {
            return a;
        }
        let qm1 = self.q - 1;
        let e = mod_pow_u64(self.p, i as u64 % self.m as u64, qm1);
        self.pow(a, e as u128)
    }

    /// Discrete log base `xi`; requires tables.
    pub fn dlog(&self, a: Fe) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::DiscreteLogOfZero);
        }
        match &self.log {
            Some(log) => Ok(log[a.0 as usize]),
            None => Err(Error::NoTables { q: self.q }),
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, a: Fe) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut o = self.q - 1;
        for &r in &self.qm1_primes {
            while o % r == 0 && self.pow(a, (o / r) as u128) == Fe(1) {
                o /= r;
            }
        }
        Ok(o)
    }

    /// Serializable description of the field.
    pub fn descr(&self) -> FieldDescr {
        FieldDescr {
            p: self.p,
            m: self.m,
            modulus: self.modulus.clone(),
            xi: self.coeffs(Fe(self.xi)),
        }
    }
}

pub(crate) fn mod_pow_u64(base: u64, mut e: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % modulus) as u128;
    let m = modulus as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

// ---- subgroups and embeddings --------------------------------------------

/// The norm-one subgroup `{x in F_{q^2}* : x^{q+1} = 1}`, enumerated as
/// powers of `xi^{q-1}`. The context must be the quadratic extension of a
/// field of order `q_base`. Returns exactly `q_base + 1` elements, starting
/// with 1.
pub fn mu_subgroup(ctx: &FieldCtx, q_base: u64) -> Result<Vec<Fe>> {
    if q_base < 2 || ctx.q != q_base * q_base {
        return Err(Error::NotQuadratic {
            q: ctx.q,
            q_base,
        });
    }
    let g = ctx.pow(ctx.xi(), (q_base - 1) as u128);
    let mut out = Vec::with_capacity(q_base as usize + 1);
    let mut cur = ctx.one();
    for _ in 0..=q_base {
        out.push(cur);
        cur = ctx.mul(cur, g);
    }
    debug_assert_eq!(cur, ctx.one());
    Ok(out)
}

/// A fixed embedding of a subfield into an extension. The image of the
/// subfield generator is the least root of the subfield modulus in the
/// extension, so the embedding is deterministic per (base, ext) pair.
#[derive(Clone, Debug)]
pub struct Embedding {
    base_q: u64,
    ext_q: u64,
    /// Powers `r^0 .. r^{m_base - 1}` of the chosen root, in the extension.
    powers: Vec<Fe>,
}

impl Embedding {
    pub fn new(base: &FieldCtx, ext: &FieldCtx) -> Result<Self> {
        if base.p != ext.p || ext.m % base.m != 0 {
            return Err(Error::IncompatibleOrders {
                base: base.q,
                ext: ext.q,
            });
        }
        let mut root = None;
        for x in ext.elements() {
            // Horner evaluation of the base modulus, coefficients lifted to
            // the prime field of the extension.
            let mut acc = ext.zero();
            for &c in base.modulus.iter().rev() {
                acc = ext.add(ext.mul(acc, x), ext.int(c));
            }
            if acc == ext.zero() {
                root = Some(x);
                break;
            }
        }
        let r = root.ok_or_else(|| {
            Error::Internal("subfield modulus has no root in the extension".into())
        })?;
        let mut powers = Vec::with_capacity(base.m as usize);
        let mut cur = ext.one();
        for _ in 0..base.m {
            powers.push(cur);
            cur = ext.mul(cur, r);
        }
        Ok(Embedding {
            base_q: base.q,
            ext_q: ext.q,
            powers,
        })
    }

    pub fn apply(&self, base: &FieldCtx, ext: &FieldCtx, x: Fe) -> Result<Fe> {
        if base.q != self.base_q || ext.q != self.ext_q {
            return Err(Error::FieldMismatch {
                q1: base.q,
                q2: ext.q,
            });
        }
        let coeffs = base.coeffs(x);
        let mut acc = ext.zero();
        for (c, r) in coeffs.iter().zip(self.powers.iter()) {
            acc = ext.add(acc, ext.mul(ext.int(*c), *r));
        }
        Ok(acc)
    }
}

/// One-shot embedding of `x` from the base field into the extension.
pub fn subfield_embed(base: &FieldCtx, ext: &FieldCtx, x: Fe) -> Result<Fe> {
    Embedding::new(base, ext)?.apply(base, ext, x)
}

// ---- serialization --------------------------------------------------------

/// JSON description of a field: `{p, m, modulus, xi}` with little-endian
/// coefficient vectors. Loading reconstructs the field deterministically and
/// verifies the stored modulus and `xi` match.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescr {
    pub p: u64,
    pub m: u32,
    pub modulus: Vec<u64>,
    pub xi: Vec<u64>,
}

/// Rebuilds the field a description came from, verifying it matches.
pub fn field_from_descr(d: &FieldDescr) -> Result<FieldCtx> {
    let ctx = make_field(d.p, d.m)?;
    if ctx.modulus() != d.modulus.as_slice() || ctx.coeffs(ctx.xi()) != d.xi {
        return Err(Error::FieldDescriptionMismatch { p: d.p, m: d.m });
    }
    Ok(ctx)
}
