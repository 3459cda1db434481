//! Isomorphism invariants of A[q,n,z] over F_p: Frobenius kernels and
//! images, socle series, dimensions of sums and products of ideals, and a
//! pair-counting invariant.
//!
//! Structure constants are 0/1, so reduction modulo p changes no table.
//! Every subspace considered here is spanned by basis elements and is
//! stored as an [`IndexSet`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Algebra, LoewyProfile};
use crate::arith::{is_prime, Nat, Word};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`pair_count`].
pub const PAIR_COUNT_MAX_DIM: Word = 24;

/// A sorted set of basis indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSet {
    members: Vec<Word>,
}

impl IndexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: Word) -> bool {
        self.members.binary_search(&k).is_ok()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        self.members.iter().chain(&other.members).copied().collect()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.members.iter().all(|&k| other.contains(k))
    }

    /// The ideal spanned by all nonzero products of members.
    pub fn product(&self, other: &IndexSet, a: &Algebra) -> IndexSet {
        let mut hit = vec![false; a.z() as usize + 1];
        for &k in &self.members {
            for &l in &other.members {
                if let Some(r) = a.product(k, l) {
                    hit[r as usize] = true;
                }
            }
        }
        from_mask(&hit)
    }
}

impl FromIterator<Word> for IndexSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        let mut members: Vec<Word> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }
}

fn from_mask(mask: &[bool]) -> IndexSet {
    IndexSet { members: (0..mask.len()).filter(|&i| mask[i]).map(|i| i as Word).collect() }
}

/// k ↦ p·k where b_k^p ≠ 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusMap {
    pub p: Word,
    pub image: Vec<Option<Word>>,
}

impl FrobeniusMap {
    /// Number of k ∈ 1..z with b_k^p ≠ 0; for p = 2 this is dim U.
    pub fn image_dim(&self) -> Word {
        self.image.iter().skip(1).filter(|x| x.is_some()).count() as Word
    }
}

pub fn frobenius(a: &Algebra, p: Word) -> Result<FrobeniusMap> {
    if !is_prime(p) {
        return Err(Error::arg(format!("{p} is not prime")));
    }
    let z = a.z();
    let image = (0..=z)
        .map(|k| {
            let mut cur = k;
            for _ in 1..p {
                cur = a.product(cur, k)?;
            }
            Some(cur)
        })
        .collect();
    Ok(FrobeniusMap { p, image })
}

/// dim V_{p,k} = dim { x ∈ J : x^(p^k) = 0 } for k = 1..=k_max.
pub fn frobenius_kernel_dims(f: &FrobeniusMap, k_max: Word) -> Vec<Word> {
    let mut cur: Vec<Option<Word>> = (0..f.image.len() as Word).map(Some).collect();
    let mut dims = Vec::with_capacity(k_max as usize);
    for _ in 0..k_max {
        for c in cur.iter_mut() {
            *c = c.and_then(|j| f.image[j as usize]);
        }
        dims.push(cur.iter().skip(1).filter(|c| c.is_none()).count() as Word);
    }
    dims
}

/// V_{p,k} as an index set.
pub fn frobenius_kernel(f: &FrobeniusMap, k: Word) -> IndexSet {
    (1..f.image.len() as Word)
        .filter(|&j| {
            let mut c = Some(j);
            for _ in 0..k {
                c = c.and_then(|x| f.image[x as usize]);
            }
            c.is_none()
        })
        .collect()
}

/// J^i = span { b_k : λ(k) ≥ i }, i ≥ 1.
pub fn radical_power(profile: &LoewyProfile, i: Word) -> IndexSet {
    (1..profile.lambda.len() as Word)
        .filter(|&k| profile.lambda[k as usize] as Word >= i)
        .collect()
}

/// S_j = ann(J^j) for j = 1..LL−1.
pub fn socle_series(a: &Algebra, profile: &LoewyProfile) -> Vec<IndexSet> {
    let z = a.z();
    let mut by_lambda: Vec<Word> = (1..=z).collect();
    by_lambda.sort_by_key(|&l| std::cmp::Reverse(profile.lambda[l as usize]));
    // μ(k): largest λ(l) with b_k b_l ≠ 0, l ≥ 1.
    let mu: Vec<u32> = (0..=z)
        .map(|k| {
            if k == 0 {
                return profile.lambda[z as usize];
            }
            by_lambda
                .iter()
                .find(|&&l| a.product(k, l).is_some())
                .map_or(0, |&l| profile.lambda[l as usize])
        })
        .collect();
    (1..profile.ll)
        .map(|j| (1..=z).filter(|&k| (mu[k as usize] as Word) < j).collect())
        .collect()
}

/// Checks dim S_j + dim J^j = z + 1 for every j; returns the offending j.
pub fn duality_defects(a: &Algebra, profile: &LoewyProfile, socle: &[IndexSet]) -> Vec<Word> {
    socle
        .iter()
        .enumerate()
        .map(|(i, s)| (i as Word + 1, s))
        .filter(|(j, s)| s.len() as Word + profile.radical_power_dim(*j) != a.z() + 1)
        .map(|(j, _)| j)
        .collect()
}

/// V·A for an index set V of J.
pub fn ideal_generated(a: &Algebra, v: &IndexSet) -> IndexSet {
    let all: IndexSet = (0..=a.z()).collect();
    v.union(&v.product(&all, a))
}

/// Labelled dimensions of J^i, S_j, J^i + S_j, J^i·S_j, V_{p,k}, V_{p,k}·A
/// and the Frobenius image for each prime in `primes`.
pub fn ideal_dims_profile(a: &Algebra, profile: &LoewyProfile, primes: &[Word]) -> Result<Vec<(String, Word)>> {
    let top = profile.ll - 1;
    let socle = socle_series(a, profile);
    let powers: Vec<IndexSet> = (1..=top).map(|i| radical_power(profile, i)).collect();
    let mut out = Vec::new();
    for (i, j_i) in powers.iter().enumerate() {
        out.push((format!("J^{}", i + 1), j_i.len() as Word));
    }
    for (j, s) in socle.iter().enumerate() {
        out.push((format!("S_{}", j + 1), s.len() as Word));
    }
    for (i, j_i) in powers.iter().enumerate() {
        for (j, s) in socle.iter().enumerate() {
            out.push((format!("J^{}+S_{}", i + 1, j + 1), j_i.union(s).len() as Word));
            out.push((format!("J^{}*S_{}", i + 1, j + 1), j_i.product(s, a).len() as Word));
        }
    }
    for &p in primes {
        let f = frobenius(a, p)?;
        out.push((format!("U_{p}"), f.image_dim()));
        let mut prev = None;
        for k in 1.. {
            let v = frobenius_kernel(&f, k);
            let d = v.len() as Word;
            out.push((format!("V_{p},{k}"), d));
            out.push((format!("V_{p},{k}*A"), ideal_generated(a, &v).len() as Word));
            if d == a.z() || prev == Some(d) {
                break;
            }
            prev = Some(d);
        }
    }
    Ok(out)
}

/// True iff the product tables agree on all pairs 1 ≤ k ≤ l ≤ z − 1, i.e.
/// b_i ↦ b_i is an isomorphism.
pub fn same_table(a: &Algebra, b: &Algebra) -> Result<bool> {
    if a.z() != b.z() {
        return Err(Error::arg(format!("dimension mismatch: z = {} vs {}", a.z(), b.z())));
    }
    let z = a.z();
    for k in 1..z {
        for l in k..z {
            if a.product(k, l) != b.product(k, l) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// #{ (x,y) ∈ A_p × A_p : xy ∈ span W }, p = 2, by summing the kernel size
/// of y ↦ xy modulo W over all x.
pub fn pair_count(a: &Algebra, p: Word, w: &IndexSet) -> Result<Nat> {
    if p != 2 {
        return Err(Error::Unsupported(format!("pair count in characteristic {p}")));
    }
    let dim = a.z() + 1;
    if dim > PAIR_COUNT_MAX_DIM {
        return Err(Error::Capacity(format!("pair count over 2^{dim} elements")));
    }
    let d = dim as usize;
    let kept: Vec<usize> = (0..d).filter(|&r| !w.contains(r as Word)).collect();
    // gen[k][row] is the row mask contributed by b_k: bit l in row r when
    // b_k b_l = b_r.
    let mut gen = vec![vec![0u32; kept.len()]; d];
    for (k, g) in gen.iter_mut().enumerate() {
        for (ri, &r) in kept.iter().enumerate() {
            for l in 0..d {
                if a.product(k as Word, l as Word) == Some(r as Word) {
                    g[ri] |= 1 << l;
                }
            }
        }
    }
    let mut rows = vec![0u32; kept.len()];
    let mut total: u64 = 1 << dim;
    for step in 1u64..(1 << dim) {
        let flip = step.trailing_zeros() as usize;
        for (r, g) in rows.iter_mut().zip(&gen[flip]) {
            *r ^= g;
        }
        total += 1 << (dim - rank_f2(&rows));
    }
    Ok(Nat::from(total))
}

fn rank_f2(rows: &[u32]) -> Word {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for &r in rows {
        let mut x = r;
        while x != 0 {
            let top = 31 - x.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = x;
                rank += 1;
                break;
            }
            x ^= basis[top];
        }
    }
    rank
}

/// Sorted key=value invariants of one algebra; diffing two reports is the
/// evidence of non-isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub entries: BTreeMap<String, String>,
}

impl InvariantReport {
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_string().as_bytes());
        hex::encode(h.finalize())
    }

    /// Keys whose values differ, with both values.
    pub fn diff(&self, other: &InvariantReport) -> Vec<(String, String, String)> {
        let missing = String::from("-");
        let mut keys: Vec<&String> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter_map(|k| {
                let x = self.entries.get(k).unwrap_or(&missing);
                let y = other.entries.get(k).unwrap_or(&missing);
                (x != y).then(|| (k.clone(), x.clone(), y.clone()))
            })
            .collect()
    }
}

impl fmt::Display for InvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// The invariants that depend only on the isomorphism type. Basis-dependent
/// data such as q, n and e are omitted.
pub fn invariant_report(a: &Algebra, profile: &LoewyProfile, primes: &[Word]) -> Result<InvariantReport> {
    let mut entries = BTreeMap::new();
    entries.insert("dim".to_string(), (a.z() + 1).to_string());
    let lv: Vec<String> = profile.loewy_vector.iter().map(|c| c.to_string()).collect();
    entries.insert("loewy_vector".to_string(), format!("({})", lv.join(",")));
    for (label, d) in ideal_dims_profile(a, profile, primes)? {
        entries.insert(format!("dim {label}"), d.to_string());
    }
    let socle = socle_series(a, profile);
    let defects = duality_defects(a, profile, &socle);
    if !defects.is_empty() {
        let list: Vec<String> = defects.iter().map(|j| j.to_string()).collect();
        entries.insert("warning duality".to_string(), list.join(","));
    }
    if a.z() < PAIR_COUNT_MAX_DIM {
        let f = frobenius(a, 2)?;
        let mut w: IndexSet = f.image.iter().skip(1).flatten().copied().collect();
        w = w.union(&IndexSet::from_iter([a.z()]));
        entries.insert("pairs_2 U+soc".to_string(), pair_count(a, 2, &w)?.to_string());
    }
    Ok(InvariantReport { entries })
}

/// p^(2 dim A), the pair count for W = A.
pub fn full_pair_count(a: &Algebra, p: Word) -> Nat {
    let mut x = Nat::one();
    for _ in 0..2 * (a.z() + 1) {
        x *= p;
    }
    x
}
