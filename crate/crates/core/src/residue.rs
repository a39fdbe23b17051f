//! Arithmetic in Z_{q-1} and the orbit structure used by exponent reduction.
//!
//! Exponents of a binomial live in the cyclic group Z_{q-1}, represented here
//! by the residues {1, ..., q-1} (a multiple of q-1 is written q-1, not 0,
//! because X^{q-1} is the reduced power). For a divisor d of q-1 the subgroup
//! G of units acting on these residues determines which exponents are
//! reachable from each other by the exponent-rescaling transforms; `g_orbits`
//! computes that partition and `orbit_min` the least representative.

use crate::{Error, Result};

/// Canonical representative of `x` in {1, ..., modulus}.
///
/// This is the "multiples map to the top" normalization: residues are never 0.
pub fn norm1(x: u128, modulus: u64) -> u64 {
    debug_assert!(modulus > 0);
    let r = (x % modulus as u128) as u64;
    if r == 0 {
        modulus
    } else {
        r
    }
}

/// Signed variant of [`norm1`] for intermediate values that may be negative.
pub fn norm1_signed(x: i128, modulus: u64) -> u64 {
    let m = modulus as i128;
    let r = x.rem_euclid(m);
    if r == 0 {
        modulus
    } else {
        r as u64
    }
}

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b).
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `modulus`, in {1, ..., modulus-1}.
pub fn inv_mod(a: u64, modulus: u64) -> Result<u64> {
    if modulus == 1 {
        // Z_1 is trivial; the unique element is its own inverse. Callers in
        // this crate always normalize the result with norm1 where it matters.
        return Ok(0);
    }
    let (g, x, _) = egcd((a % modulus) as i128, modulus as i128);
    if g != 1 && g != -1 {
        return Err(Error::NotAUnit { t: a % modulus, modulus });
    }
    Ok(x.rem_euclid(modulus as i128) as u64)
}

/// Least s ≡ r (mod step) with s ≥ r and gcd(s, dividend) = 1.
///
/// Requires gcd(r, step) = 1 (otherwise every lift shares that factor with
/// `dividend` whenever step | dividend, and no lift can work in the intended
/// use). The scan over k = 0..=dividend is guaranteed to hit a unit when
/// step | dividend and gcd(r, step) = 1, by CRT: the lifts cover every residue
/// class mod dividend/step in the r-coset.
pub fn coprime_lift(r: u64, dividend: u64, step: u64) -> Result<u64> {
    debug_assert!(r > 0 && dividend > 0 && step > 0);
    if crate::ff::gcd(r, step) != 1 {
        return Err(Error::NoLift { r, step });
    }
    for k in 0..=dividend {
        let s = r + k * step;
        if crate::ff::gcd(s, dividend) == 1 {
            return Ok(s);
        }
    }
    Err(Error::NoLift { r, step })
}

/// One unit t of Z_{qm1} together with which action rule(s) it obeys.
///
/// With step = qm1/d, the unit t acts on a residue n by t*n when
/// t ≡ 1 (mod step) and by t*n - d when t ≡ -1 (mod step). When step ≤ 2 the
/// two congruences coincide and both rules apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitMember {
    pub t: u64,
    pub plus: bool,
    pub minus: bool,
}

/// The group G of units of Z_{qm1} congruent to ±1 mod step, acting on the
/// residues {1, ..., qm1}.
#[derive(Debug, Clone)]
pub struct OrbitGroup {
    qm1: u64,
    d: u64,
    step: u64,
    members: Vec<OrbitMember>,
}

/// Builds the orbit group for the divisor d of qm1.
pub fn orbit_group(qm1: u64, d: u64) -> Result<OrbitGroup> {
    debug_assert!(qm1 > 0);
    if d == 0 || qm1 % d != 0 {
        return Err(Error::NonDivisor { d, modulus: qm1 });
    }
    let step = qm1 / d;
    let mut members = Vec::new();
    for t in 1..=qm1 {
        if crate::ff::gcd(t, qm1) != 1 {
            continue;
        }
        let plus = t % step == 1 % step;
        let minus = (t + 1) % step == 0;
        if plus || minus {
            members.push(OrbitMember { t, plus, minus });
        }
    }
    Ok(OrbitGroup { qm1, d, step, members })
}

impl OrbitGroup {
    pub fn qm1(&self) -> u64 {
        self.qm1
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn members(&self) -> &[OrbitMember] {
        &self.members
    }

    /// Image of n under the plus rule for t: t*n mod qm1, normalized to
    /// {1, ..., qm1}.
    fn act_plus(&self, t: u64, n: u64) -> u64 {
        norm1(t as u128 * n as u128, self.qm1)
    }

    /// Image of n under the minus rule for t: t*n - d mod qm1, normalized.
    fn act_minus(&self, t: u64, n: u64) -> u64 {
        norm1_signed(t as i128 * n as i128 - self.d as i128, self.qm1)
    }

    /// All images of n under single applications of the group, de-duplicated
    /// and sorted. n itself is always present (t = 1 obeys the plus rule).
    pub fn images(&self, n: u64) -> Vec<u64> {
        debug_assert!(n >= 1 && n <= self.qm1);
        let mut out = Vec::with_capacity(self.members.len());
        for mem in &self.members {
            if mem.plus {
                out.push(self.act_plus(mem.t, n));
            }
            if mem.minus {
                out.push(self.act_minus(mem.t, n));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Least image of n, with a witness (t, case2) achieving it.
    ///
    /// The group structure makes the orbit minimum reachable in a single
    /// application. Among witnesses, the plus rule is preferred over the minus
    /// rule, and within a rule the least t wins.
    pub fn orbit_min(&self, n: u64) -> (u64, u64, bool) {
        debug_assert!(n >= 1 && n <= self.qm1);
        let mut best = u64::MAX;
        let mut wit_t = 1;
        let mut wit_case2 = false;
        // Two passes: all plus-rule images first so a plus witness is kept at
        // ties, then minus-rule images strictly improving.
        for mem in &self.members {
            if mem.plus {
                let img = self.act_plus(mem.t, n);
                if img < best {
                    best = img;
                    wit_t = mem.t;
                    wit_case2 = false;
                }
            }
        }
        for mem in &self.members {
            if mem.minus {
                let img = self.act_minus(mem.t, n);
                if img < best {
                    best = img;
                    wit_t = mem.t;
                    wit_case2 = true;
                }
            }
        }
        (best, wit_t, wit_case2)
    }

    /// The full orbit of n (closure under repeated application), sorted.
    pub fn orbit_of(&self, n: u64) -> Vec<u64> {
        debug_assert!(n >= 1 && n <= self.qm1);
        let mut seen = vec![false; self.qm1 as usize + 1];
        let mut stack = vec![n];
        seen[n as usize] = true;
        while let Some(x) = stack.pop() {
            for img in self.images(x) {
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    stack.push(img);
                }
            }
        }
        (1..=self.qm1).filter(|&x| seen[x as usize]).collect()
    }

    /// Partition of {1, ..., qm1} into orbits, each sorted, ordered by least
    /// element.
    pub fn g_orbits(&self) -> Vec<Vec<u64>> {
        let mut assigned = vec![false; self.qm1 as usize + 1];
        let mut orbits = Vec::new();
        for n in 1..=self.qm1 {
            if assigned[n as usize] {
                continue;
            }
            let orbit = self.orbit_of(n);
            for &x in &orbit {
                assigned[x as usize] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }

    /// Least elements of the orbits, sorted ascending.
    pub fn orbit_minima(&self) -> Vec<u64> {
        self.g_orbits().iter().map(|o| o[0]).collect()
    }
}
