//! The algebra A[q,n,z]: basis b_0,…,b_z, multiplication b_k·b_l ∈ {0, b_{k+l}},
//! Loewy layers and factorization witnesses, all decided modulo z.

mod witness;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{self, mult_order, pow_mod, Nat, Word};
use crate::error::{Error, Result};
use crate::mfunc;

pub use witness::{concat_witness, shift_witness, transport_witness, Factor, Witness};

/// Default limit on the number of residue-table entries (z·ν).
pub const DEFAULT_TABLE_CAP: Word = 1 << 28;

/// The parameters (q,n,z) of A[q,n,z] = A(q,n,(q^n − 1)/z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraParams {
    pub q: Word,
    pub n: Word,
    pub z: Word,
    /// ord_z(q).
    pub nu: Word,
}

impl AlgebraParams {
    pub fn new(q: Word, n: Word, z: Word) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        if n == 0 || z == 0 {
            return Err(Error::arg("n and z must be positive"));
        }
        if pow_mod(q, n, z) != 1 % z {
            return Err(Error::NotDivisible(format!("{z} does not divide {q}^{n} - 1")));
        }
        Ok(Self { q, n, z, nu: mult_order(q, z)? })
    }

    /// Parameters of A(q,n,e).
    pub fn from_e(q: Word, n: Word, e: &Nat) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidBase(q));
        }
        Self::new(q, n, arith::z_from_e(q, n, e)?)
    }

    pub fn e(&self) -> Nat {
        arith::e_from_z(self.q, self.n, self.z).expect("validated parameters")
    }

    pub fn dim(&self) -> Word {
        self.z + 1
    }
}

/// A[q,n,z] with its residue table `bar[k][i] = k·q^(i+1) mod z`,
/// 0 ≤ k < z, 0 ≤ i < ν.
#[derive(Clone, Debug)]
pub struct Algebra {
    params: AlgebraParams,
    bar: Vec<u32>,
}

/// Layer data of the radical filtration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoewyProfile {
    /// λ(k) for k = 0..=z; λ(0) = 0.
    pub lambda: Vec<u32>,
    /// Irreducible left factor of a longest factorization of b_k, 0 when
    /// b_k is irreducible.
    pub back: Vec<u32>,
    pub loewy_vector: Vec<Word>,
    pub ll: Word,
}

impl LoewyProfile {
    pub fn irreducibles(&self) -> impl Iterator<Item = Word> + '_ {
        self.lambda
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &l)| l == 1)
            .map(|(k, _)| k as Word)
    }

    /// dim J^t for t ≥ 1.
    pub fn radical_power_dim(&self, t: Word) -> Word {
        self.loewy_vector.iter().skip(t as usize).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ll: Word,
    pub bound: Word,
    pub gap: Word,
    pub m: Word,
}

/// One row of the exponent-orbit report: b_k and its cyclic shifts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub k: Word,
    pub exponents: Vec<Word>,
    pub length: Word,
    pub degree: Word,
}

impl Algebra {
    pub fn new(q: Word, n: Word, z: Word) -> Result<Self> {
        Self::with_params(AlgebraParams::new(q, n, z)?, DEFAULT_TABLE_CAP)
    }

    pub fn with_params(params: AlgebraParams, table_cap: Word) -> Result<Self> {
        let AlgebraParams { q, z, nu, .. } = params;
        if z > u32::MAX as Word {
            return Err(Error::Capacity(format!("z = {z} exceeds the residue width")));
        }
        let entries = z
            .checked_mul(nu)
            .filter(|&x| x <= table_cap)
            .ok_or_else(|| Error::Capacity(format!("residue table of {z}x{nu} entries exceeds the cap {table_cap}")))?;
        let nu_us = nu as usize;
        let mut bar = vec![0u32; entries as usize];
        if z > 1 {
            let mut r = q % z;
            for i in 0..nu_us {
                bar[nu_us + i] = r as u32;
                r = arith::mul_mod(r, q, z);
            }
            let z32 = z as u32;
            for k in 2..z as usize {
                let (done, rest) = bar.split_at_mut(k * nu_us);
                let prev = &done[(k - 1) * nu_us..];
                let one = &done[nu_us..2 * nu_us];
                for i in 0..nu_us {
                    let s = prev[i] + one[i];
                    rest[i] = if s >= z32 { s - z32 } else { s };
                }
            }
        }
        Ok(Self { params, bar })
    }

    pub fn params(&self) -> &AlgebraParams {
        &self.params
    }

    pub fn q(&self) -> Word {
        self.params.q
    }

    pub fn n(&self) -> Word {
        self.params.n
    }

    pub fn z(&self) -> Word {
        self.params.z
    }

    pub fn nu(&self) -> Word {
        self.params.nu
    }

    pub fn e(&self) -> Nat {
        self.params.e()
    }

    #[inline]
    fn row(&self, k: Word) -> &[u32] {
        let nu = self.params.nu as usize;
        &self.bar[k as usize * nu..(k as usize + 1) * nu]
    }

    /// k·q^j mod z.
    fn residue(&self, k: Word, j: Word) -> Word {
        let j = j % self.params.nu;
        if j == 0 {
            k % self.params.z
        } else {
            self.row(k)[j as usize - 1] as Word
        }
    }

    /// Index of b_k·b_l, or `None` when the product is zero.
    ///
    /// For 1 ≤ k, l < z the product is nonzero iff adding the q-adic
    /// expansions of ke and le produces no carry, which happens iff no
    /// residue sum (k q^i mod z) + (l q^i mod z) reaches z, unless all of
    /// them equal z. The latter happens exactly when k + l = z.
    #[inline]
    pub fn product(&self, k: Word, l: Word) -> Option<Word> {
        let z = self.params.z;
        if k == 0 || l == 0 {
            return Some(k + l);
        }
        if k == z || l == z {
            return None;
        }
        let s = k + l;
        if s >= z {
            return (s == z).then_some(z);
        }
        let z32 = z as u32;
        let carry = self.row(k).iter().zip(self.row(l)).any(|(&a, &b)| a + b >= z32);
        (!carry).then_some(s)
    }

    /// [`Algebra::product`] with range checks.
    pub fn product_index(&self, k: Word, l: Word) -> Result<Option<Word>> {
        let z = self.params.z;
        if k > z || l > z {
            return Err(Error::arg(format!("indices ({k}, {l}) out of range 0..={z}")));
        }
        Ok(self.product(k, l))
    }

    /// The carry criterion evaluated literally over one period: a carry
    /// occurs iff some residue sum reaches z and not all sums equal z.
    pub fn carry_criterion(&self, k: Word, l: Word) -> bool {
        let z = self.params.z as u32;
        let (a, b) = (self.row(k), self.row(l));
        let sums = a.iter().zip(b).map(|(&x, &y)| x + y);
        sums.clone().any(|s| s >= z) && !sums.clone().all(|s| s == z)
    }

    /// Exponent vector of b_k, least significant position first.
    pub fn exponent_vector(&self, k: Word) -> Result<Vec<Word>> {
        let AlgebraParams { q, n, z, .. } = self.params;
        if k > z {
            return Err(Error::arg(format!("index {k} out of range 0..={z}")));
        }
        if k == z {
            return Ok(vec![q - 1; n as usize]);
        }
        let mut v = vec![0; n as usize];
        for i in (1..=n).rev() {
            let r = self.residue(k, n - i);
            v[i as usize - 1] = ((r as u128 * q as u128) / z as u128) as Word;
        }
        Ok(v)
    }

    /// s_q(ke) computed from residues.
    pub fn degree(&self, k: Word) -> Word {
        let AlgebraParams { q, n, z, nu } = self.params;
        if k == 0 {
            return 0;
        }
        if k == z {
            return n * (q - 1);
        }
        let s: u128 = self.row(k).iter().map(|&r| r as u128).sum();
        let num = (q - 1) as u128 * (n / nu) as u128 * s;
        debug_assert_eq!(num % z as u128, 0);
        (num / z as u128) as Word
    }

    /// Multiset of degrees s_q(ke), k = 1..z.
    pub fn degree_histogram(&self) -> BTreeMap<Word, Word> {
        let mut h = BTreeMap::new();
        for k in 1..=self.params.z {
            *h.entry(self.degree(k)).or_insert(0) += 1;
        }
        h
    }

    /// Orbits of 1..z−1 under k ↦ kq mod z, which cyclically shift exponent
    /// vectors. An orbit is represented by its least element k unless its
    /// dual orbit −O has a smaller least element k', in which case z − k'
    /// is used. Rows are sorted by representative.
    pub fn orbit_report(&self) -> Vec<OrbitRow> {
        let z = self.params.z;
        let mut orbit_min = vec![0 as Word; z as usize];
        let mut lengths = Vec::new();
        for k in 1..z {
            if orbit_min[k as usize] != 0 {
                continue;
            }
            let mut r = k;
            let mut length = 0;
            loop {
                orbit_min[r as usize] = k;
                length += 1;
                r = self.residue(r, 1);
                if r == k {
                    break;
                }
            }
            lengths.push((k, length));
        }
        let mut rows: Vec<OrbitRow> = lengths
            .into_iter()
            .map(|(k, length)| {
                let dual = orbit_min[(z - k) as usize];
                let rep = if dual < k { z - dual } else { k };
                OrbitRow {
                    k: rep,
                    exponents: self.exponent_vector(rep).expect("in range"),
                    length,
                    degree: self.degree(rep),
                }
            })
            .collect();
        rows.sort_by_key(|r| r.k);
        rows
    }

    /// λ by dynamic programming over k, maximizing over irreducible left
    /// factors only.
    pub fn loewy_profile(&self) -> LoewyProfile {
        let z = self.params.z as usize;
        let mut lambda = vec![0u32; z + 1];
        let mut back = vec![0u32; z + 1];
        let mut irreducible: Vec<u32> = Vec::new();
        for k in 1..=z {
            let mut best = 0u32;
            let mut arg = 0u32;
            for &i in &irreducible {
                let j = k - i as usize;
                let cand = lambda[j] + 1;
                if cand > best && self.product(i as Word, j as Word).is_some() {
                    best = cand;
                    arg = i;
                }
            }
            if best == 0 {
                lambda[k] = 1;
                irreducible.push(k as u32);
            } else {
                lambda[k] = best;
                back[k] = arg;
            }
        }
        profile_from_lambda(lambda, back)
    }

    /// λ by the unrestricted recursion λ(k) = max λ(i) + λ(k−i) over all
    /// splittings with a nonzero product. Quadratic in z.
    pub fn quadratic_lambda(&self) -> Vec<u32> {
        let z = self.params.z as usize;
        let mut lambda = vec![0u32; z + 1];
        for k in 1..=z {
            let mut best = 1;
            for i in 1..=k / 2 {
                let cand = lambda[i] + lambda[k - i];
                if cand > best && self.product(i as Word, (k - i) as Word).is_some() {
                    best = cand;
                }
            }
            lambda[k] = best;
        }
        lambda
    }

    pub fn m(&self) -> Word {
        let AlgebraParams { q, n, z, .. } = self.params;
        mfunc::m_via_z(q, n, z).expect("validated parameters").m
    }

    /// ⌊n(q−1)/m⌋ + 1.
    pub fn upper_bound(&self) -> Word {
        let AlgebraParams { q, n, .. } = self.params;
        n * (q - 1) / self.m() + 1
    }

    pub fn bound_report(&self, profile: &LoewyProfile) -> BoundReport {
        let m = self.m();
        let bound = self.params.n * (self.params.q - 1) / m + 1;
        assert!(profile.ll <= bound, "Loewy length exceeds the upper bound for {:?}", self.params);
        BoundReport { ll: profile.ll, bound, gap: bound - profile.ll, m }
    }

    /// A longest factorization of b_k, verified.
    pub fn witness(&self, profile: &LoewyProfile, k: Word) -> Result<Witness> {
        let z = self.params.z;
        if k == 0 || k > z {
            return Err(Error::arg(format!("index {k} out of range 1..={z}")));
        }
        let mut indices = Vec::with_capacity(profile.lambda[k as usize] as usize);
        let mut cur = k;
        while profile.back[cur as usize] != 0 {
            let i = profile.back[cur as usize] as Word;
            indices.push(i);
            cur -= i;
        }
        indices.push(cur);
        let factors = indices
            .into_iter()
            .map(|i| Factor { index: i, exponents: self.exponent_vector(i).expect("in range") })
            .collect();
        let w = Witness { q: self.params.q, n: self.params.n, e: self.e(), target: k, factors };
        if let Err(msg) = w.verify() {
            panic!("internal error: witness for b_{k} in {:?} fails verification: {msg}", self.params);
        }
        Ok(w)
    }
}

fn profile_from_lambda(lambda: Vec<u32>, back: Vec<u32>) -> LoewyProfile {
    let top = *lambda.last().expect("z >= 1");
    debug_assert_eq!(top, lambda.iter().copied().max().unwrap());
    let mut loewy_vector = vec![0; top as usize + 1];
    loewy_vector[0] = 1;
    for &l in &lambda[1..] {
        loewy_vector[l as usize] += 1;
    }
    LoewyProfile { lambda, back, loewy_vector, ll: top as Word + 1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qadic_expand;
    use proptest::prelude::*;

    fn digits(x: &Nat, q: Word, n: Word) -> Vec<Word> {
        let mut d = qadic_expand(x, q).unwrap().coeffs;
        d.resize(n as usize, 0);
        d
    }

    #[test]
    fn construction() {
        let a = Algebra::new(3, 12, 70).unwrap();
        assert_eq!(a.nu(), 12);
        assert_eq!(a.e(), Nat::from(7592u32));
        let b = Algebra::new(2, 3, 1).unwrap();
        assert_eq!(b.params().dim(), 2);
        assert!(Algebra::new(3, 12, 71).is_err());
        assert!(Algebra::new(1, 12, 70).is_err());
        let p = AlgebraParams::new(5, 10, 295_928).unwrap();
        assert_eq!(p.e(), Nat::from(33u32));
        assert!(Algebra::with_params(p, 1000).unwrap_err().is_capacity());
    }

    #[test]
    fn exponent_vectors() {
        let a = Algebra::new(3, 12, 70).unwrap();
        assert_eq!(a.exponent_vector(1).unwrap(), vec![2, 1, 0, 2, 0, 1, 1, 0, 1, 0, 0, 0]);
        assert_eq!(a.exponent_vector(35).unwrap(), vec![1; 12]);
        assert_eq!(a.exponent_vector(70).unwrap(), vec![2; 12]);
        assert_eq!(a.exponent_vector(0).unwrap(), vec![0; 12]);
        assert!(a.exponent_vector(71).is_err());
        let e = a.e();
        for k in 0..=70 {
            assert_eq!(a.exponent_vector(k).unwrap(), digits(&(&e * Nat::from(k)), 3, 12));
        }
    }

    #[test]
    fn products_small() {
        let a = Algebra::new(2, 4, 5).unwrap();
        assert_eq!(a.product_index(1, 1).unwrap(), None);
        for k in 1..5 {
            assert_eq!(a.product(k, 5 - k), Some(5));
            assert_eq!(a.product(0, k), Some(k));
            assert_eq!(a.product(k, 5), None);
        }
        assert!(a.product_index(6, 0).is_err());
    }

    #[test]
    fn residue_degrees() {
        let a = Algebra::new(55, 8, 123).unwrap();
        let h = a.degree_histogram();
        let want: BTreeMap<Word, Word> =
            [(126, 8), (144, 1), (198, 32), (216, 40), (234, 32), (288, 1), (306, 8), (432, 1)].into();
        assert_eq!(h, want);
        let one = Algebra::new(4, 3, 1).unwrap();
        assert_eq!(one.degree_histogram(), BTreeMap::from([(9, 1)]));
    }

    #[test]
    fn orbits_of_z70() {
        let a = Algebra::new(3, 12, 70).unwrap();
        let rows = a.orbit_report();
        assert_eq!(rows[7].exponents, vec![1, 2, 1, 1, 1, 0, 0, 2, 0, 2, 2, 2]);
        assert_eq!(rows.iter().map(|r| r.length).sum::<Word>(), 69);
        let got: Vec<(Word, Word, Word)> = rows.iter().map(|r| (r.k, r.length, r.degree)).collect();
        assert_eq!(
            got,
            vec![
                (1, 12, 8),
                (2, 12, 10),
                (5, 6, 12),
                (7, 4, 12),
                (10, 6, 12),
                (14, 4, 12),
                (35, 1, 12),
                (68, 12, 14),
                (69, 12, 16)
            ]
        );
    }

    #[test]
    fn profiles() {
        let a = Algebra::new(3, 4, 40).unwrap();
        let p = a.loewy_profile();
        assert_eq!(p.loewy_vector, vec![1, 10, 19, 10, 1]);
        assert_eq!(p.ll, 5);
        let b = Algebra::new(3, 12, 70).unwrap();
        let pb = b.loewy_profile();
        assert_eq!(pb.ll, 3);
        assert_eq!(b.bound_report(&pb), BoundReport { ll: 3, bound: 4, gap: 1, m: 8 });
        let c = Algebra::new(2, 3, 1).unwrap();
        let pc = c.loewy_profile();
        assert_eq!((pc.ll, pc.loewy_vector.clone()), (2, vec![1, 1]));
    }

    #[test]
    fn uniserial_when_q_is_one_mod_z() {
        let a = Algebra::new(8, 2, 7).unwrap();
        let p = a.loewy_profile();
        assert_eq!(p.loewy_vector, vec![1; 8]);
        assert_eq!(a.bound_report(&p).gap, 0);
    }

    #[test]
    fn witnesses() {
        let a = Algebra::new(2, 3, 7).unwrap();
        let p = a.loewy_profile();
        assert_eq!(p.ll, 4);
        let w = a.witness(&p, 7).unwrap();
        assert_eq!(w.factors.len(), 3);
        for k in p.irreducibles().collect::<Vec<_>>() {
            assert_eq!(a.witness(&p, k).unwrap().factors.len(), 1);
        }
        assert!(a.witness(&p, 0).is_err());
    }

    #[test]
    fn restricted_dp_matches_quadratic() {
        for (q, n, z) in [(3, 12, 70), (3, 4, 40), (19, 2, 40), (2, 12, 455), (7, 12, 195), (10, 6, 999)] {
            let a = Algebra::new(q, n, z).unwrap();
            assert_eq!(a.loewy_profile().lambda, a.quadratic_lambda(), "{q} {n} {z}");
        }
    }

    proptest! {
        #[test]
        fn carry_criterion_matches_digit_addition(z in 2u64..400, q in 2u64..60, seed in any::<u64>()) {
            prop_assume!(arith::gcd(q, z) == 1);
            let n = mult_order(q, z).unwrap();
            prop_assume!(n <= 40);
            let a = Algebra::new(q, n, z).unwrap();
            let k = seed % z;
            let l = (seed / z) % z;
            prop_assume!(k > 0 && l > 0);
            let vk = a.exponent_vector(k).unwrap();
            let vl = a.exponent_vector(l).unwrap();
            let no_carry = vk.iter().zip(&vl).all(|(x, y)| x + y < q);
            prop_assert_eq!(a.product(k, l).is_some(), no_carry);
            prop_assert_eq!(a.carry_criterion(k, l), !no_carry);
            if no_carry {
                let sum: Vec<Word> = vk.iter().zip(&vl).map(|(x, y)| x + y).collect();
                prop_assert_eq!(sum, a.exponent_vector(k + l).unwrap());
            }
        }
    }
}
