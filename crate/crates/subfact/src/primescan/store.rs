//! Append-only persistence for prime scans: a records CSV keyed by prime
//! and a manifest of completed inclusive ranges, so interrupted scans resume
//! without recomputing finished work.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{classify_prime, run_parallel, AbClass, PrimeRecord};
use crate::error::{domain, Error, Result};
use crate::exactint::primes_in;

pub const RECORDS_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.csv";

/// Flat CSV row: `prime,ab_class,zero_residues,degenerate,valuation_capped,kurepa_valuation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    pub prime: u64,
    pub ab_class: String,
    /// Residues joined by `;`.
    pub zero_residues: String,
    pub degenerate: bool,
    pub valuation_capped: bool,
    pub kurepa_valuation: u64,
}

impl From<&PrimeRecord> for RecordRow {
    fn from(r: &PrimeRecord) -> Self {
        RecordRow {
            prime: r.prime,
            ab_class: r.ab_class.to_string(),
            zero_residues: r
                .zero_residues
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(";"),
            degenerate: r.degenerate,
            valuation_capped: r.valuation_capped,
            kurepa_valuation: r.kurepa_valuation,
        }
    }
}

impl TryFrom<RecordRow> for PrimeRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        let ab_class = match row.ab_class.as_str() {
            "A" => AbClass::A,
            "B" => AbClass::B,
            other => return domain(format!("bad class {other:?} for prime {}", row.prime)),
        };
        let zero_residues = if row.zero_residues.is_empty() {
            Vec::new()
        } else {
            row.zero_residues
                .split(';')
                .map(|s| s.parse::<u64>().map_err(|e| Error::Domain(format!("bad residue {s:?}: {e}"))))
                .collect::<Result<_>>()?
        };
        let rec = PrimeRecord {
            prime: row.prime,
            ab_class,
            zero_residues,
            degenerate: row.degenerate,
            valuation_capped: row.valuation_capped,
            kurepa_valuation: row.kurepa_valuation,
        };
        rec.check()?;
        Ok(rec)
    }
}

/// One completed inclusive range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub lo: u64,
    pub hi: u64,
    /// Seconds since the Unix epoch.
    pub completed_at: u64,
}

/// A scan cache directory.
#[derive(Debug, Clone)]
pub struct ScanStore {
    dir: PathBuf,
}

impl ScanStore {
    /// Opens (creating if needed) the cache directory.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(ScanStore {
            dir: dir.as_ref().to_path_buf(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn append<T: Serialize>(&self, file: &str, rows: &[T]) -> Result<()> {
        let path = self.dir.join(file);
        let fresh = fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
        let handle = OpenOptions::new().create(true).append(true).open(&path)?;
        let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(handle);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    fn read<T: for<'de> Deserialize<'de>>(&self, file: &str) -> Result<Vec<T>> {
        let path = self.dir.join(file);
        if !path.exists() {
            return Ok(Vec::new());
        }
        let mut r = csv::Reader::from_path(&path)?;
        r.deserialize().map(|row| row.map_err(Error::from)).collect()
    }

    /// All stored records, deduplicated by prime (later rows win).
    pub fn load_records(&self) -> Result<BTreeMap<u64, PrimeRecord>> {
        let mut out = BTreeMap::new();
        for row in self.read::<RecordRow>(RECORDS_FILE)? {
            let rec = PrimeRecord::try_from(row)?;
            out.insert(rec.prime, rec);
        }
        Ok(out)
    }

    pub fn append_records(&self, records: &[PrimeRecord]) -> Result<()> {
        let rows: Vec<RecordRow> = records.iter().map(RecordRow::from).collect();
        self.append(RECORDS_FILE, &rows)
    }

    pub fn manifest(&self) -> Result<Vec<ManifestEntry>> {
        self.read(MANIFEST_FILE)
    }

    pub fn mark_completed(&self, lo: u64, hi: u64) -> Result<()> {
        let completed_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        self.append(MANIFEST_FILE, &[ManifestEntry { lo, hi, completed_at }])
    }

    /// Maximal subranges of [lo, hi] not covered by the manifest.
    pub fn missing_ranges(&self, lo: u64, hi: u64) -> Result<Vec<(u64, u64)>> {
        let mut done: Vec<(u64, u64)> = self.manifest()?.iter().map(|e| (e.lo, e.hi)).collect();
        done.sort_unstable();
        let mut out = Vec::new();
        let mut cursor = lo;
        for (a, b) in done {
            if cursor > hi {
                break;
            }
            if b < cursor {
                continue;
            }
            if a > cursor {
                out.push((cursor, (a - 1).min(hi)));
            }
            cursor = cursor.max(b.saturating_add(1));
        }
        if cursor <= hi {
            out.push((cursor, hi));
        }
        Ok(out)
    }
}

/// Result of a cached scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CachedScan {
    pub records: Vec<PrimeRecord>,
    /// Primes classified in this run.
    pub computed: usize,
    /// Primes taken from the store.
    pub reused: usize,
}

/// Default number of integers per persisted chunk.
pub const DEFAULT_CHUNK: u64 = 100_000;

/// Scans [lo, hi], computing only ranges missing from the manifest and
/// persisting each chunk (records first, then its manifest line).
pub fn scan_with_store(store: &ScanStore, lo: u64, hi: u64, jobs: usize, chunk: u64) -> Result<CachedScan> {
    if lo < 2 || lo > hi {
        return domain(format!("scan range needs 2 <= lo <= hi, got {lo}..={hi}"));
    }
    let chunk = chunk.max(1);
    let mut computed = 0;
    for (a, b) in store.missing_ranges(lo, hi)? {
        let mut start = a;
        while start <= b {
            let end = start.saturating_add(chunk - 1).min(b);
            let primes = primes_in(start, end);
            let recs = run_parallel(&primes, jobs, classify_prime)?;
            store.append_records(&recs)?;
            store.mark_completed(start, end)?;
            computed += recs.len();
            if end == u64::MAX {
                break;
            }
            start = end + 1;
        }
    }
    let all = store.load_records()?;
    let records: Vec<PrimeRecord> = all.range(lo..=hi).map(|(_, r)| r.clone()).collect();
    let expected = primes_in(lo, hi);
    if records.iter().map(|r| r.prime).ne(expected.iter().copied()) {
        return domain(format!(
            "store at {} is inconsistent with its manifest for {lo}..={hi}",
            store.dir.display()
        ));
    }
    Ok(CachedScan {
        reused: records.len() - computed.min(records.len()),
        records,
        computed,
    })
}
