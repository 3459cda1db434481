//! Candidates for small e dividing Φ_n(q) with a prescribed value m(q,e),
//! n prime.
//!
//! If e | Φ_n(q) and q^{i_1} + … + q^{i_m} ≡ 0 (mod e), then e divides every
//! integer in the ideal (Φ_n(X), X^{i_1} + … + X^{i_m}) of ℤ[X]. Extended
//! Euclid over ℚ produces such an integer d.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::m_bfs;
use crate::arith::{self, divisors, euler_phi, gcd, is_prime, Word};
use crate::error::{Error, Result};

type Poly = Vec<BigRational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn sub_scaled(a: &mut Poly, b: &Poly, c: &BigRational, shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, BigRational::zero());
    }
    for (i, bi) in b.iter().enumerate() {
        a[i + shift] -= c * bi;
    }
    trim(a);
}

fn div_rem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    let lead = b.last().expect("nonzero divisor").clone();
    let mut quot = vec![BigRational::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        sub_scaled(&mut r, b, &c, shift);
        quot[shift] = c;
    }
    trim(&mut quot);
    (quot, r)
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

fn sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    sub_scaled(&mut out, b, &BigRational::one(), 0);
    out
}

/// Bézout coefficients (a, b) with a·f + b·g = 1, for coprime f, g.
fn bezout(f: &Poly, g: &Poly) -> Option<(Poly, Poly)> {
    let (mut r0, mut r1) = (f.clone(), g.clone());
    let (mut s0, mut s1): (Poly, Poly) = (vec![BigRational::one()], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (quot, rem) = div_rem(&r0, &r1);
        let s2 = sub(&s0, &mul(&quot, &s1));
        let t2 = sub(&t0, &mul(&quot, &t1));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].clone();
    let scale = |p: Poly| p.into_iter().map(|x| x / &c).collect::<Poly>();
    Some((scale(s0), scale(t0)))
}

/// Least d ∈ ℕ with d·a, d·b ∈ ℤ[X] for the Bézout pair of Φ_n and g.
fn cleared_constant(phi: &Poly, g: &Poly) -> Option<BigInt> {
    let (a, b) = bezout(phi, g)?;
    Some(
        a.iter()
            .chain(b.iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
            .abs(),
    )
}

fn next_tuple(t: &mut [usize], max: usize) -> bool {
    // Nondecreasing tuples with t[0] fixed at 0.
    let mut i = t.len();
    while i > 1 {
        i -= 1;
        if t[i] < max {
            t[i] += 1;
            let v = t[i];
            for x in &mut t[i + 1..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

/// Values of m(q,e) realised by units q of prime order n with e | Φ_n(q).
fn realised_m(n: Word, e: Word) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::new();
    for r in 2..e + 2 {
        if gcd(r, e) != 1 || r % e == 1 || arith::pow_mod(r, n, e) != 1 || !phi_vanishes(n, r, e) {
            continue;
        }
        out.insert(m_bfs(r, e)?.m);
    }
    Ok(out)
}

/// Φ_n(q) ≡ 0 (mod e) for prime n, i.e. 1 + q + … + q^{n−1} ≡ 0.
fn phi_vanishes(n: Word, q: Word, e: Word) -> bool {
    let mut acc = 0;
    let mut p = 1 % e;
    for _ in 0..n {
        acc = (acc + p) % e;
        p = arith::mul_mod(p, q, e);
    }
    acc == 0
}

/// For each m ≤ m_max, the moduli e > 1 that can divide Φ_n(q) with
/// m(q,e) = m for some q of order n modulo e.
pub fn small_e_candidates(n: Word, m_max: Word) -> Result<BTreeMap<Word, BTreeSet<Word>>> {
    if !is_prime(n) {
        return Err(Error::arg(format!("{n} is not prime")));
    }
    if m_max == 0 || m_max >= n {
        return Err(Error::arg(format!("need 1 <= m_max < {n}")));
    }
    let phi: Poly = vec![BigRational::one(); n as usize];
    let mut raw: BTreeMap<Word, BTreeSet<Word>> = BTreeMap::new();
    for m in 1..=m_max as usize {
        let mut t = vec![0usize; m];
        let entry = raw.entry(m as Word).or_default();
        loop {
            let mut g: Poly = vec![BigRational::zero(); t[m - 1] + 1];
            for &i in &t {
                g[i] += BigRational::one();
            }
            let d = cleared_constant(&phi, &g).expect("Φ_n is coprime to every nonzero polynomial of lower degree");
            let d = d
                .to_u64()
                .ok_or_else(|| Error::Capacity(format!("cleared constant {d} exceeds a word")))?;
            for e in divisors(d)? {
                if e > 1
                    && (n % 2 == 0 || e % 2 == 1)
                    && (n % 3 == 0 || e % 3 != 0)
                    && euler_phi(e)? % n == 0
                {
                    entry.insert(e);
                }
            }
            if !next_tuple(&mut t, n as usize - 2) {
                break;
            }
        }
    }
    let mut cache: HashMap<Word, BTreeSet<Word>> = HashMap::new();
    let mut out = BTreeMap::new();
    for (m, es) in raw {
        let mut kept = BTreeSet::new();
        for e in es {
            if let Entry::Vacant(slot) = cache.entry(e) {
                slot.insert(realised_m(n, e)?);
            }
            if cache[&e].contains(&m) {
                kept.insert(e);
            }
        }
        out.insert(m, kept);
    }
    Ok(out)
}
