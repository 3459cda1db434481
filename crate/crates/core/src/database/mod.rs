//! Enumeration of the classes A[q,n,z], one per cyclic subgroup ⟨q⟩ of
//! (ℤ/z)^×, with persisted Loewy data and the aggregate statistics.

mod scan;
mod stats;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraParams, DEFAULT_TABLE_CAP};
use crate::arith::{self, gcd, mul_mod, Word};
use crate::error::Result;

pub use scan::{read_rows, scan, write_csv, ScanConfig, ScanOutcome};
pub use stats::{
    isomorphism_screen, stats, verify, PairStatus, ScreenClass, ScreenGroup, ScreenReport, Stats, VerifyReport,
    SCREEN_PRIMES,
};

pub const SCHEMA: u32 = 1;

/// A cyclic subgroup ⟨q⟩ ⊆ (ℤ/z)^× with its smallest generator; the trivial
/// subgroup is represented by q = z + 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivKey {
    pub z: Word,
    pub subgroup: Vec<Word>,
    pub q_rep: Word,
}

impl EquivKey {
    pub fn order(&self) -> Word {
        self.subgroup.len() as Word
    }
}

/// One key per cyclic subgroup, sorted by (order, smallest generator).
pub fn subgroup_representatives(z: Word) -> Vec<EquivKey> {
    if z <= 2 {
        return vec![EquivKey { z, subgroup: vec![1 % z], q_rep: z + 1 }];
    }
    let mut covered = vec![false; z as usize];
    let mut keys = Vec::new();
    for u in 1..z {
        if covered[u as usize] || gcd(u, z) != 1 {
            continue;
        }
        let mut cyc = vec![1];
        let mut p = u;
        while p != 1 {
            cyc.push(p);
            p = mul_mod(p, u, z);
        }
        let ord = cyc.len() as Word;
        for (t, &g) in cyc.iter().enumerate() {
            if gcd(t as Word, ord) == 1 {
                covered[g as usize] = true;
            }
        }
        cyc.sort_unstable();
        let q_rep = if u == 1 { z + 1 } else { u };
        keys.push(EquivKey { z, subgroup: cyc, q_rep });
    }
    keys.sort_by_key(|k| (k.order(), k.q_rep));
    keys
}

/// Number of cyclic subgroups of (ℤ/z)^×.
pub fn subgroup_count(z: Word) -> usize {
    subgroup_representatives(z).len()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub uniserial: bool,
    pub bound_attained: bool,
    pub ll_three: bool,
    /// Loewy vector (1,k,1,…,1) of length at least 4 with k > 1.
    pub spike_vector: bool,
}

impl Flags {
    pub fn from_vector(v: &[Word], gap: Word) -> Self {
        let k = v.get(1).copied().unwrap_or(0);
        Flags {
            uniserial: v.iter().all(|&c| c == 1),
            bound_attained: gap == 0,
            ll_three: v.len() == 3,
            spike_vector: v.len() >= 4 && k > 1 && v[0] == 1 && v[2..].iter().all(|&c| c == 1),
        }
    }
}

/// One JSONL line. Rows for which the computation failed carry `error`
/// and no Loewy data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbRecord {
    pub schema: u32,
    pub z: Word,
    pub q: Word,
    pub n: Word,
    pub subgroup: Vec<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ll: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loewy_vector: Option<Vec<Word>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Flags>,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DbRecord {
    pub fn key(&self) -> (Word, Word, Word) {
        (self.z, self.subgroup.len() as Word, self.q)
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}

/// Computes the record of one key. Capacity failures become error rows;
/// other failures are propagated.
pub fn compute_record(key: &EquivKey, table_cap: Word, timing: bool) -> Result<DbRecord> {
    let start = Instant::now();
    let z = key.z;
    let q = key.q_rep;
    let n = arith::mult_order(q, z)?;
    let mut rec = DbRecord {
        schema: SCHEMA,
        z,
        q,
        n,
        subgroup: key.subgroup.clone(),
        e: None,
        m: None,
        ll: None,
        bound: None,
        gap: None,
        loewy_vector: None,
        flags: None,
        runtime_ms: 0,
        error: None,
    };
    let params = AlgebraParams::new(q, n, z)?;
    let a = match Algebra::with_params(params, table_cap) {
        Ok(a) => a,
        Err(err) if err.is_capacity() => {
            rec.error = Some(err.to_string());
            return Ok(rec);
        }
        Err(err) => return Err(err),
    };
    let profile = a.loewy_profile();
    let report = a.bound_report(&profile);
    rec.e = Some(params.e().to_string());
    rec.m = Some(report.m);
    rec.ll = Some(report.ll);
    rec.bound = Some(report.bound);
    rec.gap = Some(report.gap);
    rec.flags = Some(Flags::from_vector(&profile.loewy_vector, report.gap));
    rec.loewy_vector = Some(profile.loewy_vector);
    if timing {
        rec.runtime_ms = start.elapsed().as_millis() as u64;
    }
    Ok(rec)
}

/// Records for all keys of one z, in order.
pub fn records_for(z: Word) -> Result<Vec<DbRecord>> {
    subgroup_representatives(z)
        .iter()
        .map(|k| compute_record(k, DEFAULT_TABLE_CAP, false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn closure_oracle(z: Word) -> usize {
        let mut seen: BTreeSet<Vec<Word>> = BTreeSet::new();
        for u in 0..z.max(1) {
            if gcd(u, z) != 1 && z > 1 {
                continue;
            }
            let mut s: BTreeSet<Word> = BTreeSet::new();
            let mut p = 1 % z;
            loop {
                if !s.insert(p) {
                    break;
                }
                p = (p * u) % z;
            }
            seen.insert(s.into_iter().collect());
        }
        seen.len()
    }

    #[test]
    fn representatives() {
        let k5 = subgroup_representatives(5);
        let reps: Vec<Word> = k5.iter().map(|k| k.q_rep).collect();
        assert_eq!(reps, vec![6, 4, 2]);
        assert_eq!(k5[2].subgroup, vec![1, 2, 3, 4]);
        let k1 = subgroup_representatives(1);
        assert_eq!(k1.len(), 1);
        assert_eq!(k1[0].q_rep, 2);
        assert_eq!(subgroup_count(7), 4);
        for z in 1..200 {
            assert_eq!(subgroup_count(z), closure_oracle(z), "z={z}");
        }
    }

    #[test]
    fn keys_are_sound() {
        for z in 1..120 {
            for k in subgroup_representatives(z) {
                let n = arith::mult_order(k.q_rep, z).unwrap();
                assert_eq!(n, k.order());
                assert_eq!(arith::pow_mod(k.q_rep, n, z), 1 % z);
                assert!(k.subgroup.contains(&(k.q_rep % z.max(1))) || z == 1);
            }
        }
    }

    #[test]
    fn records() {
        let rs = records_for(40).unwrap();
        assert!(rs.iter().any(|r| r.loewy_vector.as_deref() == Some(&[1, 10, 19, 10, 1][..])));
        for r in &rs {
            assert_eq!(r.loewy_vector.as_ref().unwrap().iter().sum::<Word>(), 41);
        }
        let r70 = records_for(70).unwrap();
        let gaps: Vec<(Word, Word)> = r70.iter().filter(|r| r.gap > Some(0)).map(|r| (r.q, r.n)).collect();
        assert_eq!(gaps, vec![(3, 12)]);
        let line = serde_json::to_string(&r70[0]).unwrap();
        assert!(line.starts_with("{\"schema\":1,\"z\":70,\"q\":71,\"n\":1,\"subgroup\":[1],\"e\":"));
        assert!(line.ends_with("\"runtime_ms\":0}"));
    }

    #[test]
    fn capacity_rows() {
        let k = &subgroup_representatives(97)[5];
        let r = compute_record(k, 10, false).unwrap();
        assert!(r.is_error());
        assert!(r.ll.is_none());
    }
}
