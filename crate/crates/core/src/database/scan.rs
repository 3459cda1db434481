//! Parallel, deterministic and resumable scan over a range of z.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::thread;

use crossbeam_channel::{bounded, unbounded, Receiver, Select};
use serde::Serialize;

use super::{compute_record, subgroup_representatives, DbRecord, EquivKey};
use crate::algebra::DEFAULT_TABLE_CAP;
use crate::arith::Word;
use crate::error::{Error, Result};

const CSV_VECTOR_MAX: usize = 32;

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub z_min: Word,
    pub z_max: Word,
    pub jobs: usize,
    pub out: PathBuf,
    pub timing: bool,
    pub table_cap: Word,
    /// Keys with z·ord above this go to the slow lane.
    pub slow_cost: Word,
}

impl ScanConfig {
    pub fn new(z_min: Word, z_max: Word, out: impl Into<PathBuf>) -> Self {
        ScanConfig {
            z_min,
            z_max,
            jobs: 1,
            out: out.into(),
            timing: false,
            table_cap: DEFAULT_TABLE_CAP,
            slow_cost: 4_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanOutcome {
    pub resumed: u64,
    pub written: u64,
    pub errors: u64,
}

type Job = (u64, EquivKey);

fn keys(z_min: Word, z_max: Word) -> impl Iterator<Item = EquivKey> {
    (z_min..=z_max).flat_map(subgroup_representatives)
}

/// Reads every line of a JSONL file. With `allow_partial`, an unterminated
/// last line is dropped and its byte offset returned.
fn read_prefix(path: &Path, allow_partial: bool) -> Result<(Vec<DbRecord>, u64)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let mut end = bytes.len();
    if bytes.last().is_some_and(|&b| b != b'\n') {
        if !allow_partial {
            return Err(Error::Malformed(format!("{}: unterminated last line", path.display())));
        }
        end = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    }
    let mut rows = Vec::new();
    for (i, line) in bytes[..end].split(|&b| b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: DbRecord = serde_json::from_slice(line)
            .map_err(|e| Error::Malformed(format!("{} line {}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok((rows, end as u64))
}

/// All records of a complete JSONL file.
pub fn read_rows(path: &Path) -> Result<Vec<DbRecord>> {
    Ok(read_prefix(path, false)?.0)
}

fn next_job(lanes: &mut Vec<&Receiver<Job>>) -> Option<Job> {
    while !lanes.is_empty() {
        for r in lanes.iter() {
            if let Ok(job) = r.try_recv() {
                return Some(job);
            }
        }
        let mut sel = Select::new();
        for r in lanes.iter() {
            sel.recv(r);
        }
        let op = sel.select();
        let i = op.index();
        match op.recv(lanes[i]) {
            Ok(job) => return Some(job),
            Err(_) => {
                lanes.remove(i);
            }
        }
    }
    None
}

/// Scans `[z_min, z_max]` into `cfg.out`. An existing file is validated
/// against the key order, its partial last line dropped, and extended.
pub fn scan(cfg: &ScanConfig) -> Result<ScanOutcome> {
    if cfg.z_min == 0 {
        return Err(Error::arg("z_min must be positive"));
    }
    if cfg.jobs == 0 {
        return Err(Error::arg("jobs must be positive"));
    }
    let mut outcome = ScanOutcome::default();
    let mut valid_len = 0;
    if cfg.out.exists() {
        let (rows, end) = read_prefix(&cfg.out, true)?;
        let mut expected = keys(cfg.z_min, cfg.z_max);
        for (i, row) in rows.iter().enumerate() {
            let key = expected
                .next()
                .ok_or_else(|| Error::Malformed(format!("line {} lies outside the scan range", i + 1)))?;
            if row.key() != (key.z, key.order(), key.q_rep) {
                return Err(Error::Malformed(format!(
                    "line {} holds (z={}, q={}) where (z={}, q={}) was expected",
                    i + 1,
                    row.z,
                    row.q,
                    key.z,
                    key.q_rep
                )));
            }
            outcome.errors += row.is_error() as u64;
        }
        outcome.resumed = rows.len() as u64;
        valid_len = end;
    }
    let file = OpenOptions::new().create(true).write(true).truncate(false).open(&cfg.out)?;
    file.set_len(valid_len)?;
    drop(file);
    let mut out = BufWriter::new(OpenOptions::new().append(true).open(&cfg.out)?);

    let skip = outcome.resumed as usize;
    let (fast_tx, fast_rx) = bounded::<Job>(cfg.jobs * 16);
    let (slow_tx, slow_rx) = bounded::<Job>(cfg.jobs * 2);
    let (res_tx, res_rx) = unbounded::<(u64, Result<DbRecord>)>();
    let stop = AtomicBool::new(false);
    let mut failure = None;

    thread::scope(|s| {
        let stop = &stop;
        let (z_min, z_max, slow_cost) = (cfg.z_min, cfg.z_max, cfg.slow_cost);
        s.spawn(move || {
            for (seq, key) in keys(z_min, z_max).skip(skip).enumerate() {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let lane = if key.z.saturating_mul(key.order()) > slow_cost { &slow_tx } else { &fast_tx };
                if lane.send((seq as u64, key)).is_err() {
                    break;
                }
            }
        });
        for w in 0..cfg.jobs {
            let (fast_rx, slow_rx, res_tx) = (fast_rx.clone(), slow_rx.clone(), res_tx.clone());
            let (table_cap, timing) = (cfg.table_cap, cfg.timing);
            s.spawn(move || {
                let mut lanes = if w == 0 && cfg.jobs > 1 { vec![&slow_rx, &fast_rx] } else { vec![&fast_rx, &slow_rx] };
                while let Some((seq, key)) = next_job(&mut lanes) {
                    if stop.load(Ordering::Relaxed) {
                        break;
                    }
                    if res_tx.send((seq, compute_record(&key, table_cap, timing))).is_err() {
                        break;
                    }
                }
            });
        }
        drop(res_tx);
        drop(fast_rx);
        drop(slow_rx);

        let mut pending: BTreeMap<u64, DbRecord> = BTreeMap::new();
        let mut next = 0u64;
        for (seq, res) in res_rx.iter() {
            match res {
                Ok(rec) => {
                    pending.insert(seq, rec);
                }
                Err(err) => {
                    stop.store(true, Ordering::Relaxed);
                    failure.get_or_insert(err);
                    continue;
                }
            }
            if failure.is_some() {
                continue;
            }
            while let Some(rec) = pending.remove(&next) {
                let written = serde_json::to_writer(&mut out, &rec)
                    .map_err(|e| Error::Io(e.into()))
                    .and_then(|_| out.write_all(b"\n").map_err(Error::from));
                if let Err(err) = written {
                    stop.store(true, Ordering::Relaxed);
                    failure.get_or_insert(err);
                    break;
                }
                outcome.written += 1;
                outcome.errors += rec.is_error() as u64;
                next += 1;
            }
        }
    });
    out.flush()?;
    match failure {
        Some(err) => Err(err),
        None => Ok(outcome),
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    z: Word,
    q: Word,
    n: Word,
    subgroup_order: usize,
    e: Option<&'a str>,
    m: Option<Word>,
    ll: Option<Word>,
    bound: Option<Word>,
    gap: Option<Word>,
    loewy_vector: Option<String>,
    uniserial: Option<bool>,
    bound_attained: Option<bool>,
    ll_three: Option<bool>,
    spike_vector: Option<bool>,
    error: Option<&'a str>,
}

/// CSV projection of a JSONL file: no subgroup list, Loewy vectors cut
/// after 32 entries.
pub fn write_csv(jsonl: &Path, csv_path: &Path) -> Result<u64> {
    let reader = BufReader::new(File::open(jsonl)?);
    let mut w = csv::Writer::from_path(csv_path).map_err(csv_error)?;
    let mut count = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let rec: DbRecord =
            serde_json::from_str(&line).map_err(|e| Error::Malformed(format!("line {}: {e}", i + 1)))?;
        let flags = rec.flags;
        let row = CsvRow {
            z: rec.z,
            q: rec.q,
            n: rec.n,
            subgroup_order: rec.subgroup.len(),
            e: rec.e.as_deref(),
            m: rec.m,
            ll: rec.ll,
            bound: rec.bound,
            gap: rec.gap,
            loewy_vector: rec.loewy_vector.as_ref().map(|v| {
                let head: Vec<String> = v.iter().take(CSV_VECTOR_MAX).map(|c| c.to_string()).collect();
                head.join(" ")
            }),
            uniserial: flags.map(|f| f.uniserial),
            bound_attained: flags.map(|f| f.bound_attained),
            ll_three: flags.map(|f| f.ll_three),
            spike_vector: flags.map(|f| f.spike_vector),
            error: rec.error.as_deref(),
        };
        w.serialize(row).map_err(csv_error)?;
        count += 1;
    }
    w.flush()?;
    Ok(count)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_scan_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.jsonl");
        let b = dir.path().join("b.jsonl");
        let mut cfg = ScanConfig::new(1, 60, &a);
        assert_eq!(scan(&cfg).unwrap().written as usize, (1..=60).map(super::super::subgroup_count).sum::<usize>());
        cfg.out = b.clone();
        cfg.jobs = 4;
        cfg.slow_cost = 200;
        scan(&cfg).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn resume_after_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let full = dir.path().join("full.jsonl");
        let part = dir.path().join("part.jsonl");
        scan(&ScanConfig::new(2, 40, &full)).unwrap();
        let bytes = std::fs::read(&full).unwrap();
        std::fs::write(&part, &bytes[..bytes.len() / 2]).unwrap();
        let out = scan(&ScanConfig { jobs: 3, ..ScanConfig::new(2, 40, &part) }).unwrap();
        assert!(out.resumed > 0);
        assert_eq!(std::fs::read(&full).unwrap(), std::fs::read(&part).unwrap());
        let again = scan(&ScanConfig::new(2, 40, &part)).unwrap();
        assert_eq!(again.written, 0);
    }

    #[test]
    fn resume_rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        scan(&ScanConfig::new(5, 9, &p)).unwrap();
        assert!(matches!(scan(&ScanConfig::new(6, 9, &p)), Err(Error::Malformed(_))));
    }

    #[test]
    fn error_rows_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.jsonl");
        let out = scan(&ScanConfig { table_cap: 200, ..ScanConfig::new(1, 30, &p) }).unwrap();
        assert!(out.errors > 0);
        let rows = read_rows(&p).unwrap();
        assert_eq!(rows.len() as u64, out.written);
        let c = dir.path().join("x.csv");
        assert_eq!(write_csv(&p, &c).unwrap(), out.written);
        let text = std::fs::read_to_string(&c).unwrap();
        assert!(text.starts_with("z,q,n,subgroup_order,e,m,ll,bound,gap,loewy_vector,"));
        assert!(text.contains("capacity exceeded"));
    }
}
