use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgebraParams;
use crate::arith::{self, mult_order, Nat, Word};
use crate::error::{Error, Result};
use crate::mfunc;

/// A basis element b_index given by its exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub index: Word,
    pub exponents: Vec<Word>,
}

/// A factorization b_target = b_{i_1}···b_{i_r} in A(q,n,e).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub q: Word,
    pub n: Word,
    #[serde(with = "crate::serde_nat")]
    pub e: Nat,
    pub target: Word,
    pub factors: Vec<Factor>,
}

fn value(v: &[Word], q: Word) -> Nat {
    v.iter().rev().fold(Nat::zero(), |acc, &c| acc * q + c)
}

fn vector_of(x: &Nat, q: Word, n: Word) -> Result<Vec<Word>> {
    let mut d = arith::qadic_expand(x, q)?.coeffs;
    if d.len() > n as usize {
        return Err(Error::arg(format!("{x} has more than {n} digits in base {q}")));
    }
    d.resize(n as usize, 0);
    Ok(d)
}

fn factor_from_vector(exponents: Vec<Word>, q: Word, e: &Nat) -> Result<Factor> {
    let (k, r) = value(&exponents, q).div_rem(e);
    if !r.is_zero() {
        return Err(Error::arg("exponent vector is not admissible"));
    }
    let index = k.to_u64().ok_or_else(|| Error::Overflow("factor index exceeds a word".into()))?;
    Ok(Factor { index, exponents })
}

impl Witness {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Checks admissibility of every factor, absence of carries and the
    /// target.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let (q, n) = (self.q, self.n);
        if q < 2 || self.e.is_zero() {
            return Err("degenerate parameters".into());
        }
        let full = arith::nat_pow(q, n) - 1u32;
        if !(&full % &self.e).is_zero() {
            return Err(format!("e does not divide {q}^{n} - 1"));
        }
        let mut sum = vec![0 as Word; n as usize];
        let mut index_sum: u128 = 0;
        for f in &self.factors {
            if f.exponents.len() != n as usize {
                return Err(format!("factor b_{} has {} exponents", f.index, f.exponents.len()));
            }
            if f.exponents.iter().all(|&c| c == 0) {
                return Err("zero exponent vector".into());
            }
            if f.exponents.iter().any(|&c| c >= q) {
                return Err(format!("factor b_{} has an exponent above q - 1", f.index));
            }
            if value(&f.exponents, q) != &self.e * Nat::from(f.index) {
                return Err(format!("factor b_{} does not match its exponent vector", f.index));
            }
            for (s, &c) in sum.iter_mut().zip(&f.exponents) {
                *s += c;
                if *s >= q {
                    return Err(format!("carry at factor b_{}", f.index));
                }
            }
            index_sum += f.index as u128;
        }
        if index_sum != self.target as u128 {
            return Err(format!("indices sum to {index_sum}, not {}", self.target));
        }
        if value(&sum, q) != &self.e * Nat::from(self.target) {
            return Err("product is not the target".into());
        }
        Ok(())
    }

    pub fn z(&self) -> Result<Word> {
        arith::z_from_e(self.q, self.n, &self.e)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fac in &self.factors {
            let deg: Word = fac.exponents.iter().sum();
            let exp: Vec<String> = fac.exponents.iter().map(|c| c.to_string()).collect();
            writeln!(f, "k={} deg={} exp=[{}]", fac.index, deg, exp.join(","))?;
        }
        Ok(())
    }
}

fn checked(w: Witness) -> Result<Witness> {
    w.verify().map_err(|msg| Error::arg(format!("constructed witness fails verification: {msg}")))?;
    Ok(w)
}

/// Moves a witness along an isomorphism A(q,n,e) ≅ A(Q,n,e') onto the
/// parameters `to`.
///
/// With e' = e and ⟨q⟩ = ⟨Q⟩ in (ℤ/e)^× exponent positions are permuted so
/// that q^t ≡ Q^π(t). With equal z and ⟨q⟩ = ⟨Q⟩ in (ℤ/z)^× indices are
/// kept. The target must be the all-a vector in the first mode.
pub fn transport_witness(w: &Witness, to: &AlgebraParams) -> Result<Witness> {
    if to.n != w.n {
        return Err(Error::arg("transport needs equal n"));
    }
    let e_to = to.e();
    if e_to == w.e {
        return transport_same_e(w, to.q);
    }
    let z = w.z()?;
    if z != to.z {
        return Err(Error::Unsupported("transport needs equal e or equal z".into()));
    }
    if !same_subgroup(w.q % z.max(1), to.q % z.max(1), z) {
        return Err(Error::arg(format!("<{}> and <{}> differ modulo {z}", w.q, to.q)));
    }
    let factors = w
        .factors
        .iter()
        .map(|f| Factor { index: f.index, exponents: mfunc::residue_digits(to.q, to.n, z, f.index) })
        .collect();
    checked(Witness { q: to.q, n: to.n, e: e_to, target: w.target, factors })
}

fn same_subgroup(a: Word, b: Word, m: Word) -> bool {
    if m <= 1 {
        return true;
    }
    let oa = mult_order(a, m).expect("unit");
    if mult_order(b, m).expect("unit") != oa {
        return false;
    }
    let mut p = 1 % m;
    for _ in 0..oa {
        if p == b {
            return true;
        }
        p = arith::mul_mod(p, a, m);
    }
    false
}

fn transport_same_e(w: &Witness, big_q: Word) -> Result<Witness> {
    let (q, n, e) = (w.q, w.n, &w.e);
    let target = vector_of(&(e * Nat::from(w.target)), q, n)?;
    let a = target[0];
    if target.iter().any(|&c| c != a) || a >= q.min(big_q) {
        return Err(Error::arg("target must be a constant vector below min(q, Q)"));
    }
    let q_mod = Nat::from(q) % e;
    let big_mod = Nat::from(big_q) % e;
    let mut powers: HashMap<Nat, Word> = HashMap::new();
    let mut p = Nat::one() % e;
    let mut nu = 0;
    loop {
        powers.insert(p.clone(), nu);
        nu += 1;
        p = p * &big_mod % e;
        if p == Nat::one() % e || nu > n {
            break;
        }
    }
    if n % nu != 0 {
        return Err(Error::arg("n is not a multiple of the order of Q"));
    }
    let mut pi = vec![0 as Word; n as usize];
    let mut p = Nat::one() % e;
    let mut used = vec![false; n as usize];
    for t in 0..n {
        let u = *powers
            .get(&p)
            .ok_or_else(|| Error::arg(format!("{q}^{t} is not a power of {big_q} modulo e")))?;
        let slot = (t / nu) * nu + u;
        if used[slot as usize] {
            return Err(Error::arg("the subgroups generated by q and Q differ"));
        }
        used[slot as usize] = true;
        pi[t as usize] = slot;
        p = p * &q_mod % e;
    }
    let mut factors = Vec::with_capacity(w.factors.len());
    for f in &w.factors {
        let mut v = vec![0 as Word; n as usize];
        for (t, &c) in f.exponents.iter().enumerate() {
            v[pi[t] as usize] = c;
        }
        factors.push(factor_from_vector(v, big_q, e)?);
    }
    let target = factors.iter().map(|f| f.index).sum();
    checked(Witness { q: big_q, n, e: e.clone(), target, factors })
}

/// Extends a witness for b_z in A(q,n,e) to one in A(q+l,n,e) by adjoining
/// l/m rounds of the n cyclic shifts of a minimal-degree vector. Needs
/// e | l and m(q,e) | l.
pub fn shift_witness(w: &Witness, l: Word) -> Result<Witness> {
    let (q, n) = (w.q, w.n);
    let z = w.z()?;
    if w.target != z {
        return Err(Error::arg("shift needs a witness for the top element"));
    }
    if l == 0 {
        return Ok(w.clone());
    }
    let mr = mfunc::m_via_z(q, n, z)?;
    let m = mr.m;
    let k = mr.k.expect("the residue formula reports its index");
    if !(Nat::from(l) % &w.e).is_zero() || l % m != 0 {
        return Err(Error::arg(format!("{l} is not a multiple of lcm(e, {m})")));
    }
    let big_q = q
        .checked_add(l)
        .ok_or_else(|| Error::Overflow("q + l".into()))?;
    let base = mfunc::residue_digits(q, n, z, k);
    let mut factors = Vec::with_capacity(w.factors.len() + (n * (l / m)) as usize);
    for f in &w.factors {
        factors.push(factor_from_vector(f.exponents.clone(), big_q, &w.e)?);
    }
    for _ in 0..l / m {
        for s in 0..n as usize {
            let mut v = vec![0 as Word; n as usize];
            for (j, &c) in base.iter().enumerate() {
                v[(j + s) % n as usize] = c;
            }
            factors.push(factor_from_vector(v, big_q, &w.e)?);
        }
    }
    let target = arith::z_from_e(big_q, n, &w.e)?;
    checked(Witness { q: big_q, n, e: w.e.clone(), target, factors })
}

/// Combines witnesses in A(q,n1,e) and A(q,n2,e) into one in A(q,n1+n2,e)
/// by concatenating exponent vectors.
pub fn concat_witness(w1: &Witness, w2: &Witness) -> Result<Witness> {
    if w1.q != w2.q || w1.e != w2.e {
        return Err(Error::arg("concatenation needs equal q and e"));
    }
    let (q, n1, n2) = (w1.q, w1.n as usize, w2.n as usize);
    let n = n1 + n2;
    let mut factors = Vec::with_capacity(w1.len() + w2.len());
    for f in &w1.factors {
        let mut v = f.exponents.clone();
        v.resize(n, 0);
        factors.push(factor_from_vector(v, q, &w1.e)?);
    }
    for f in &w2.factors {
        let mut v = vec![0 as Word; n1];
        v.extend_from_slice(&f.exponents);
        factors.push(factor_from_vector(v, q, &w1.e)?);
    }
    let target = factors.iter().map(|f| f.index).sum();
    checked(Witness { q, n: n as Word, e: w1.e.clone(), target, factors })
}
