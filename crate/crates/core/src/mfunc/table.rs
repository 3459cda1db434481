use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use super::m_bfs;
use crate::arith::{gcd, mul_mod, Word};
use crate::error::Result;

/// Grid of m(q,e); `cells[i][j]` belongs to `qs[i]` and `es[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTable {
    pub qs: Vec<Word>,
    pub es: Vec<Word>,
    pub cells: Vec<Vec<Option<Word>>>,
}

impl MTable {
    pub fn get(&self, q: Word, e: Word) -> Option<Word> {
        let i = self.qs.iter().position(|&x| x == q)?;
        let j = self.es.iter().position(|&x| x == e)?;
        self.cells[i][j]
    }

    /// CSV with a header of e values and one row per q; empty cells where
    /// gcd(q,e) ≠ 1.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = std::iter::once("q".to_string())
            .chain(self.es.iter().map(|e| e.to_string()))
            .collect();
        w.write_record(&header).expect("in-memory write");
        for (q, row) in self.qs.iter().zip(&self.cells) {
            let rec: Vec<String> = std::iter::once(q.to_string())
                .chain(row.iter().map(|c| c.map_or(String::new(), |m| m.to_string())))
                .collect();
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

/// m(q,e) for every coprime pair in the ranges. A base q = 1 stands for the
/// residue class of 1 and is evaluated at q = 1 + e.
pub fn emit_m_table(qs: RangeInclusive<Word>, es: RangeInclusive<Word>) -> Result<MTable> {
    let qs: Vec<Word> = qs.collect();
    let es: Vec<Word> = es.collect();
    let mut cells = Vec::with_capacity(qs.len());
    for &q in &qs {
        let mut row = Vec::with_capacity(es.len());
        for &e in &es {
            if e == 0 || gcd(q, e) != 1 {
                row.push(None);
                continue;
            }
            let base = if q < 2 { q + e.max(2) } else { q };
            row.push(Some(m_bfs(base, e)?.m));
        }
        cells.push(row);
    }
    Ok(MTable { qs, es, cells })
}

/// Residues q ≢ 1 modulo e grouped by m(q,e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueGroups {
    pub e: Word,
    pub groups: BTreeMap<Word, Vec<Word>>,
}

impl fmt::Display for ResidueGroups {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.e)?;
        for (m, qs) in &self.groups {
            let list: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
            write!(f, " {m}: {{{}}}", list.join(","))?;
        }
        Ok(())
    }
}

/// Groups the units 2 ≤ q < e by m(q,e). With `generators_only`, each
/// cyclic subgroup of (ℤ/e)^× contributes only its smallest generator.
pub fn group_by_m(e: Word, generators_only: bool) -> Result<ResidueGroups> {
    let mut groups: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
    let mut covered = vec![false; e as usize];
    for q in 2..e {
        if gcd(q, e) != 1 || covered[q as usize] {
            continue;
        }
        if generators_only {
            let mut cyc = Vec::new();
            let mut p = q;
            while p != 1 {
                cyc.push(p);
                p = mul_mod(p, q, e);
            }
            let ord = cyc.len() as Word + 1;
            for (t, &g) in cyc.iter().enumerate() {
                if gcd(t as Word + 1, ord) == 1 {
                    covered[g as usize] = true;
                }
            }
        }
        groups.entry(m_bfs(q, e)?.m).or_default().push(q);
    }
    Ok(ResidueGroups { e, groups })
}
