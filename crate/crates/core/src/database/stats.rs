//! Aggregate counts, the isomorphism screen and sampled re-verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{compute_record, subgroup_representatives, DbRecord};
use crate::algebra::{Algebra, DEFAULT_TABLE_CAP};
use crate::arith::Word;
use crate::error::{Error, Result};
use crate::invariants::{invariant_report, same_table};

/// Primes whose Frobenius kernels enter the screen's invariant reports.
pub const SCREEN_PRIMES: [Word; 4] = [2, 3, 5, 7];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub z_range: Option<(Word, Word)>,
    pub pairs: u64,
    pub errors: u64,
    pub distinct_vectors: u64,
    pub ll_three: u64,
    pub spike_vectors: u64,
    pub gap_positive: u64,
    pub gap_above_one: u64,
    pub gap_histogram: BTreeMap<Word, u64>,
    /// (dim, q, n) of the smallest algebra with a positive gap.
    pub smallest_gap: Option<(Word, Word, Word)>,
    /// (gap, z, q, n) of the first record with the largest gap.
    pub largest_gap: Option<(Word, Word, Word, Word)>,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.z_range {
            Some((a, b)) => writeln!(f, "z_range = {a}..{b}")?,
            None => writeln!(f, "z_range = empty")?,
        }
        writeln!(f, "pairs = {}", self.pairs)?;
        writeln!(f, "errors = {}", self.errors)?;
        writeln!(f, "distinct_loewy_vectors = {}", self.distinct_vectors)?;
        writeln!(f, "ll_three = {}", self.ll_three)?;
        writeln!(f, "spike_vectors = {}", self.spike_vectors)?;
        writeln!(f, "gap_positive = {}", self.gap_positive)?;
        writeln!(f, "gap_above_one = {}", self.gap_above_one)?;
        let hist: Vec<String> = self.gap_histogram.iter().map(|(g, c)| format!("{g}:{c}")).collect();
        writeln!(f, "gap_histogram = {}", hist.join(" "))?;
        if let Some((d, q, n)) = self.smallest_gap {
            writeln!(f, "smallest_gap_dim = {d} (q={q}, n={n}, z={})", d - 1)?;
        }
        if let Some((g, z, q, n)) = self.largest_gap {
            writeln!(f, "largest_gap = {g} (q={q}, n={n}, z={z})")?;
        }
        Ok(())
    }
}

/// Summary of the records with z in `range`, or in the span of the file
/// when no range is given. Refuses unless every key of the range is present
/// exactly once.
pub fn stats(rows: &[DbRecord], range: Option<(Word, Word)>) -> Result<Stats> {
    let range = range.or_else(|| {
        let lo = rows.iter().map(|r| r.z).min()?;
        let hi = rows.iter().map(|r| r.z).max()?;
        Some((lo, hi))
    });
    let Some((lo, hi)) = range.filter(|(lo, hi)| lo <= hi) else {
        return Ok(Stats::default());
    };
    let rows: Vec<&DbRecord> = rows.iter().filter(|r| (lo..=hi).contains(&r.z)).collect();
    let mut seen = BTreeSet::new();
    for r in &rows {
        if !seen.insert(r.key()) {
            return Err(Error::Malformed(format!("duplicate record z={} q={}", r.z, r.q)));
        }
    }
    let missing: Vec<Word> = (lo.max(1)..=hi)
        .filter(|&z| {
            subgroup_representatives(z).iter().any(|k| !seen.contains(&(z, k.order(), k.q_rep)))
        })
        .collect();
    if !missing.is_empty() {
        let (a, b) = (missing[0], missing[missing.len() - 1]);
        return Err(Error::Incomplete(format!("{} values of z lack records, z in {a}..={b}", missing.len())));
    }
    let mut s = Stats { z_range: Some((lo, hi)), ..Stats::default() };
    let mut vectors: BTreeSet<&[Word]> = BTreeSet::new();
    for r in rows {
        s.pairs += 1;
        let (Some(v), Some(gap), Some(flags)) = (r.loewy_vector.as_deref(), r.gap, r.flags) else {
            s.errors += 1;
            continue;
        };
        vectors.insert(v);
        s.ll_three += flags.ll_three as u64;
        s.spike_vectors += flags.spike_vector as u64;
        s.gap_positive += (gap > 0) as u64;
        s.gap_above_one += (gap > 1) as u64;
        *s.gap_histogram.entry(gap).or_default() += 1;
        if gap > 0 && s.smallest_gap.map_or(true, |(d, _, _)| r.z + 1 < d) {
            s.smallest_gap = Some((r.z + 1, r.q, r.n));
        }
        if gap > 0 && s.largest_gap.map_or(true, |(g, ..)| gap > g) {
            s.largest_gap = Some((gap, r.z, r.q, r.n));
        }
    }
    s.distinct_vectors = vectors.len() as u64;
    Ok(s)
}

/// Algebras of one Loewy-vector group whose tables coincide under b_i ↦ b_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScreenClass {
    pub qs: Vec<Word>,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairStatus {
    DistinguishedBy(String),
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScreenGroup {
    pub loewy_vector: Vec<Word>,
    pub classes: Vec<ScreenClass>,
    /// One entry per pair of classes (i < j).
    pub pairs: Vec<(usize, usize, PairStatus)>,
}

impl ScreenGroup {
    pub fn status(&self) -> &'static str {
        if self.classes.len() == 1 {
            "isomorphic-by-basis-map"
        } else if self.pairs.iter().all(|p| matches!(p.2, PairStatus::DistinguishedBy(_))) {
            "distinguished"
        } else {
            "unresolved"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScreenReport {
    pub z: Word,
    pub groups: Vec<ScreenGroup>,
}

impl fmt::Display for ScreenReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "z = {} groups = {}", self.z, self.groups.len())?;
        for g in &self.groups {
            let v: Vec<String> = g.loewy_vector.iter().map(|c| c.to_string()).collect();
            writeln!(f, "vector ({}) classes={} status={}", v.join(","), g.classes.len(), g.status())?;
            for (i, c) in g.classes.iter().enumerate() {
                writeln!(f, "  class {i} q={:?} digest={}", c.qs, &c.digest[..16])?;
            }
            for (i, j, st) in &g.pairs {
                match st {
                    PairStatus::DistinguishedBy(label) => writeln!(f, "  {i} vs {j}: distinguished-by({label})")?,
                    PairStatus::Unresolved => writeln!(f, "  {i} vs {j}: unresolved")?,
                }
            }
        }
        Ok(())
    }
}

/// Groups the records of `z` by Loewy vector, merges algebras with equal
/// tables, and compares invariant reports across the remaining classes.
pub fn isomorphism_screen(rows: &[DbRecord], z: Word) -> Result<ScreenReport> {
    let mut by_vector: BTreeMap<Vec<Word>, Vec<&DbRecord>> = BTreeMap::new();
    let mut count = 0;
    for r in rows.iter().filter(|r| r.z == z) {
        count += 1;
        if let Some(v) = &r.loewy_vector {
            by_vector.entry(v.clone()).or_default().push(r);
        }
    }
    if count != subgroup_representatives(z).len() {
        return Err(Error::Incomplete(format!("z = {z} has {count} records")));
    }
    let mut groups = Vec::new();
    for (vector, members) in by_vector {
        let mut classes: Vec<(Algebra, Vec<Word>)> = Vec::new();
        for r in members {
            let a = Algebra::new(r.q, r.n, r.z)?;
            let mut placed = false;
            for (rep, qs) in classes.iter_mut() {
                if same_table(rep, &a)? {
                    qs.push(r.q);
                    placed = true;
                    break;
                }
            }
            if !placed {
                classes.push((a, vec![r.q]));
            }
        }
        let reports = if classes.len() > 1 {
            classes
                .iter()
                .map(|(a, _)| invariant_report(a, &a.loewy_profile(), &SCREEN_PRIMES))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let mut pairs = Vec::new();
        for i in 0..reports.len() {
            for j in i + 1..reports.len() {
                let status = match reports[i].diff(&reports[j]).into_iter().next() {
                    Some((label, x, y)) => PairStatus::DistinguishedBy(format!("{label}: {x} vs {y}")),
                    None => PairStatus::Unresolved,
                };
                pairs.push((i, j, status));
            }
        }
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(i, (_, qs))| ScreenClass { qs, digest: reports.get(i).map_or_else(|| "-".repeat(16), |r| r.digest()) })
            .collect();
        groups.push(ScreenGroup { loewy_vector: vector, classes, pairs });
    }
    Ok(ScreenReport { z, groups })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

/// Recomputes `sample_size` records chosen with a seeded generator.
pub fn verify(rows: &[DbRecord], sample_size: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, rows.len(), sample_size.min(rows.len()));
    let mut report = VerifyReport::default();
    for i in picks.into_iter() {
        let row = &rows[i];
        let keys = subgroup_representatives(row.z);
        let Some(key) = keys.iter().find(|k| k.q_rep == row.q) else {
            report.mismatches.push(format!("z={} q={}: not a subgroup representative", row.z, row.q));
            continue;
        };
        let fresh = compute_record(key, DEFAULT_TABLE_CAP, false)?;
        report.checked += 1;
        if !row.is_error() && !same_data(row, &fresh) {
            report.mismatches.push(format!("z={} q={}: stored record differs from recomputation", row.z, row.q));
        }
    }
    Ok(report)
}

fn same_data(a: &DbRecord, b: &DbRecord) -> bool {
    (a.schema, a.n, &a.subgroup, &a.e, a.m, a.ll, a.bound, a.gap, &a.loewy_vector, a.flags)
        == (b.schema, b.n, &b.subgroup, &b.e, b.m, b.ll, b.bound, b.gap, &b.loewy_vector, b.flags)
}
