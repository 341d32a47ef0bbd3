//! Result files, merging, and checkpointed runs.
//!
//! Everything the engines produce can be written to disk as a plain text
//! file: a four-line header followed by one record per line, `N` then its
//! prime factors, all ascending. The format is deliberately dull — diffable,
//! greppable, and readable from any language:
//!
//! ```text
//! # carmichael-v1
//! # limit 100000
//! # strategy tree
//! # unit all
//! 561 3 11 17
//! 1105 5 13 17
//! ```
//!
//! Loading re-verifies every line by default (ascending certified primes,
//! product, Korselt), so a result file is evidence, not just a cache. The
//! structural checks and the Korselt divisibilities always run because the
//! record's derived fields depend on them; [`Verify::Trust`] skips only the
//! primality certification of the listed factors, the expensive part on
//! bulk loads.
//!
//! [`run_checkpointed`] drives a full enumeration one work unit at a time,
//! writing a unit file and a checkpoint line per unit so an interrupted run
//! resumes where it stopped and still produces a byte-identical merge.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use crate::arith::{Factorization, Sieve};
use crate::carmichael::{index_of, lehmer_index, CarmichaelRecord};
use crate::search::{self, SearchConfig};

/// First header line of every result file.
pub const FORMAT: &str = "carmichael-v1";
/// First header line of every checkpoint file.
pub const CHECKPOINT_FORMAT: &str = "carmichael-checkpoint-v1";

/// Provenance carried in a result-file header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileMeta {
    /// Enumeration bound the records were produced under.
    pub limit: u64,
    /// Which engine produced the file: "tree", "d3", "scan", "oracle", "merged".
    pub strategy: String,
    /// Work-unit id within the strategy, or "all".
    pub unit: String,
}

/// A parsed result file: provenance plus verified records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultFile {
    pub meta: FileMeta,
    pub records: Vec<CarmichaelRecord>,
}

/// How much to re-verify on load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verify {
    /// Certify every listed factor prime (full integrity gate).
    Full,
    /// Trust the listed factors' primality; still check structure and the
    /// Korselt divisibilities.
    Trust,
}

/// Why a file failed to load.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected header \"# {expected} ...\"")]
    BadHeader { line: usize, expected: &'static str },
    #[error("line {line}: unsupported format \"{found}\" (this reader speaks {FORMAT})")]
    BadFormat { line: usize, found: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {n} out of order (records must ascend)")]
    NotAscending { line: usize, n: u64 },
    #[error("line {line}: {n} rejected: {source}")]
    BadRecord {
        line: usize,
        n: u64,
        source: crate::carmichael::RecordError,
    },
}

/// Why a merge was refused.
#[derive(Debug, thiserror::Error)]
pub enum MergeError {
    #[error("nothing to merge")]
    Empty,
    #[error("limit mismatch: {0} vs {1}")]
    LimitMismatch(u64, u64),
    #[error("{n} carries two different factorizations: {a:?} vs {b:?}")]
    Conflict { n: u64, a: Vec<u64>, b: Vec<u64> },
}

/// Serializes records under a header. Records must already be ascending.
pub fn write_to(w: &mut impl Write, records: &[CarmichaelRecord], meta: &FileMeta) -> io::Result<()> {
    let mut text = String::new();
    writeln!(text, "# {FORMAT}").unwrap();
    writeln!(text, "# limit {}", meta.limit).unwrap();
    writeln!(text, "# strategy {}", meta.strategy).unwrap();
    writeln!(text, "# unit {}", meta.unit).unwrap();
    for r in records {
        write!(text, "{}", r.n()).unwrap();
        for p in r.primes() {
            write!(text, " {p}").unwrap();
        }
        text.push('\n');
    }
    w.write_all(text.as_bytes())
}

/// Writes a result file to `path`, replacing any existing file.
pub fn write(path: &Path, records: &[CarmichaelRecord], meta: &FileMeta) -> io::Result<()> {
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    write_to(&mut f, records, meta)?;
    f.flush()
}

fn header_value<'a>(
    lines: &mut impl Iterator<Item = (usize, io::Result<String>)>,
    key: &'static str,
) -> Result<(usize, String), LoadError> {
    let (no, line) = lines
        .next()
        .ok_or(LoadError::BadHeader { line: 0, expected: key })?;
    let line = line?;
    let rest = line
        .strip_prefix("# ")
        .and_then(|r| r.strip_prefix(key))
        .filter(|r| r.is_empty() || r.starts_with(' ') || key.is_empty())
        .map(str::trim)
        .ok_or(LoadError::BadHeader { line: no, expected: key })?;
    Ok((no, rest.to_string()))
}

fn parse_record(line: &str, no: usize, verify: Verify) -> Result<CarmichaelRecord, LoadError> {
    let mut nums = line.split_ascii_whitespace().map(|t| {
        t.parse::<u64>().map_err(|_| LoadError::Malformed {
            line: no,
            msg: format!("\"{t}\" is not a decimal number"),
        })
    });
    let n = nums.next().ok_or(LoadError::Malformed {
        line: no,
        msg: "empty record line".into(),
    })??;
    let primes = nums.collect::<Result<Vec<u64>, _>>()?;
    let wrap = |source| LoadError::BadRecord { line: no, n, source };
    match verify {
        Verify::Full => CarmichaelRecord::new(n, primes).map_err(wrap),
        Verify::Trust => {
            use crate::carmichael::RecordError;
            if primes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(wrap(RecordError::NotAscending));
            }
            let product = primes.iter().fold(1u128, |acc, &p| acc * u128::from(p));
            if product != u128::from(n) {
                return Err(wrap(RecordError::ProductMismatch { expected: n, found: product }));
            }
            let f = Factorization { factors: primes.iter().map(|&p| (p, 1)).collect() };
            let index = index_of(n, &f).ok_or(RecordError::NotCarmichael(n)).map_err(wrap)?;
            let lehmer = lehmer_index(n, &f);
            Ok(CarmichaelRecord::from_parts_unchecked(n, primes, index, lehmer))
        }
    }
}

/// Parses a result file, re-verifying each line per `verify`.
pub fn read_from(r: impl BufRead, verify: Verify) -> Result<ResultFile, LoadError> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (no, format) = header_value(&mut lines, "")?;
    if format != FORMAT {
        return Err(LoadError::BadFormat { line: no, found: format });
    }
    let (no, limit) = header_value(&mut lines, "limit")?;
    let limit = limit.parse::<u64>().map_err(|_| LoadError::Malformed {
        line: no,
        msg: format!("bad limit \"{limit}\""),
    })?;
    let (_, strategy) = header_value(&mut lines, "strategy")?;
    let (_, unit) = header_value(&mut lines, "unit")?;
    let mut records: Vec<CarmichaelRecord> = Vec::new();
    for (no, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_record(&line, no, verify)?;
        if records.last().is_some_and(|prev| prev.n() >= rec.n()) {
            return Err(LoadError::NotAscending { line: no, n: rec.n() });
        }
        if rec.n() > limit {
            return Err(LoadError::Malformed {
                line: no,
                msg: format!("{} exceeds the declared limit {limit}", rec.n()),
            });
        }
        records.push(rec);
    }
    Ok(ResultFile {
        meta: FileMeta { limit, strategy, unit },
        records,
    })
}

/// Reads and verifies the file at `path`.
pub fn read(path: &Path, verify: Verify) -> Result<ResultFile, LoadError> {
    let f = io::BufReader::new(fs::File::open(path)?);
    read_from(f, verify)
}

/// Sorted union of several files sharing one limit. Duplicate `N` across
/// inputs must carry identical factors; they collapse to one record.
pub fn merge(files: &[ResultFile]) -> Result<ResultFile, MergeError> {
    let first = files.first().ok_or(MergeError::Empty)?;
    let limit = first.meta.limit;
    for f in files {
        if f.meta.limit != limit {
            return Err(MergeError::LimitMismatch(limit, f.meta.limit));
        }
    }
    let mut all: Vec<&CarmichaelRecord> = files.iter().flat_map(|f| &f.records).collect();
    all.sort_by_key(|r| r.n());
    let mut records: Vec<CarmichaelRecord> = Vec::with_capacity(all.len());
    for r in all {
        match records.last() {
            Some(prev) if prev.n() == r.n() => {
                if prev.primes() != r.primes() {
                    return Err(MergeError::Conflict {
                        n: r.n(),
                        a: prev.primes().to_vec(),
                        b: r.primes().to_vec(),
                    });
                }
            }
            _ => records.push(r.clone()),
        }
    }
    Ok(ResultFile {
        meta: FileMeta {
            limit,
            strategy: "merged".into(),
            unit: "all".into(),
        },
        records,
    })
}

/// FNV-1a over the canonical rendering of a search configuration. Thread
/// count and other execution details are deliberately absent: a checkpoint
/// binds to the mathematical problem, not to the machine.
pub fn config_fingerprint(cfg: &SearchConfig) -> u64 {
    let mut canon = format!(
        "limit={};d_min={};d_max={:?};early_term={};split={}",
        cfg.limit, cfg.d_min, cfg.d_max, cfg.early_term, cfg.split
    );
    match &cfg.partition {
        None => canon.push_str(";partition=none"),
        Some(units) => {
            canon.push_str(";partition=");
            for u in units {
                write!(canon, "{u},").unwrap();
            }
        }
    }
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canon.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Progress marker for a unit-by-unit run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub fingerprint: u64,
    pub done: BTreeSet<u64>,
}

/// Writes the checkpoint atomically (temp file, then rename), so a crash
/// mid-write leaves the previous checkpoint intact.
pub fn checkpoint_write(path: &Path, cp: &Checkpoint) -> io::Result<()> {
    let mut text = String::new();
    writeln!(text, "# {CHECKPOINT_FORMAT}").unwrap();
    writeln!(text, "# fingerprint {:016x}", cp.fingerprint).unwrap();
    for unit in &cp.done {
        writeln!(text, "{unit}").unwrap();
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)
}

/// Reads a checkpoint file.
pub fn checkpoint_read(path: &Path) -> Result<Checkpoint, LoadError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, Ok(l.to_string())));
    let (no, format) = header_value(&mut lines, "")?;
    if format != CHECKPOINT_FORMAT {
        return Err(LoadError::BadFormat { line: no, found: format });
    }
    let (no, fp) = header_value(&mut lines, "fingerprint")?;
    let fingerprint = u64::from_str_radix(&fp, 16).map_err(|_| LoadError::Malformed {
        line: no,
        msg: format!("bad fingerprint \"{fp}\""),
    })?;
    let mut done = BTreeSet::new();
    for (no, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let unit = line.trim().parse::<u64>().map_err(|_| LoadError::Malformed {
            line: no,
            msg: format!("bad unit id \"{line}\""),
        })?;
        done.insert(unit);
    }
    Ok(Checkpoint { fingerprint, done })
}

/// Why a checkpointed run could not proceed.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("load failed: {0}")]
    Load(#[from] LoadError),
    #[error(
        "checkpoint fingerprint {found:016x} does not match this configuration \
         ({expected:016x}); the existing run used different parameters — \
         finish it with those, or start fresh in an empty directory"
    )]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("merge failed: {0}")]
    Merge(#[from] MergeError),
}

/// Output of [`run_checkpointed`].
#[derive(Debug)]
pub enum RunOutcome {
    /// All units done; the merged result, also written to `merged.result`.
    Complete(ResultFile),
    /// Stopped by the interrupt hook with units still pending.
    Interrupted { done: usize, total: usize },
}

fn unit_path(dir: &Path, unit: u64) -> PathBuf {
    dir.join(format!("unit-{unit}.result"))
}

/// Runs a full enumeration one work unit at a time under `dir`, writing
/// `unit-<p>.result` per unit and updating `checkpoint` after each, then
/// merging everything into `merged.result`.
///
/// A re-run in the same directory resumes after the completed units, refusing
/// to continue if the configuration fingerprint differs. The final merged
/// file is byte-identical whether or not the run was interrupted, and
/// whatever the thread count: units run in a fixed order and each unit's
/// output is internally sorted.
///
/// `stop_after` is an interrupt hook for tests and operators: stop cleanly
/// after that many freshly computed units.
pub fn run_checkpointed(
    cfg: &SearchConfig,
    sieve: &Sieve,
    dir: &Path,
    stop_after: Option<usize>,
) -> Result<RunOutcome, RunError> {
    fs::create_dir_all(dir)?;
    let fingerprint = config_fingerprint(cfg);
    let ckpt_path = dir.join("checkpoint");
    let mut cp = if ckpt_path.exists() {
        let cp = checkpoint_read(&ckpt_path)?;
        if cp.fingerprint != fingerprint {
            return Err(RunError::FingerprintMismatch {
                expected: fingerprint,
                found: cp.fingerprint,
            });
        }
        cp
    } else {
        Checkpoint { fingerprint, done: BTreeSet::new() }
    };
    let units = search::work_units(cfg, sieve);
    let mut fresh = 0usize;
    for &unit in &units {
        if cp.done.contains(&unit) {
            continue;
        }
        if let Some(cap) = stop_after {
            if fresh >= cap {
                return Ok(RunOutcome::Interrupted { done: cp.done.len(), total: units.len() });
            }
        }
        let mut records = search::run_unit(unit, cfg, sieve);
        records.sort_by_key(|r| r.n());
        let meta = FileMeta {
            limit: cfg.limit,
            strategy: "tree".into(),
            unit: unit.to_string(),
        };
        write(&unit_path(dir, unit), &records, &meta)?;
        cp.done.insert(unit);
        checkpoint_write(&ckpt_path, &cp)?;
        fresh += 1;
    }
    let mut files = Vec::with_capacity(units.len());
    for &unit in &units {
        files.push(read(&unit_path(dir, unit), Verify::Full)?);
    }
    let merged = if files.is_empty() {
        ResultFile {
            meta: FileMeta { limit: cfg.limit, strategy: "merged".into(), unit: "all".into() },
            records: Vec::new(),
        }
    } else {
        merge(&files)?
    };
    write(dir.join("merged.result").as_path(), &merged.records, &merged.meta)?;
    Ok(RunOutcome::Complete(merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carmichael::brute_scan;
    use crate::search::enumerate_all;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn meta(limit: u64) -> FileMeta {
        FileMeta { limit, strategy: "tree".into(), unit: "all".into() }
    }

    fn file_of(records: Vec<CarmichaelRecord>, limit: u64) -> ResultFile {
        ResultFile { meta: meta(limit), records }
    }

    fn render(records: &[CarmichaelRecord], m: &FileMeta) -> String {
        let mut buf = Vec::new();
        write_to(&mut buf, records, m).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn single_record_renders_one_line() {
        let r = CarmichaelRecord::new(561, vec![3, 11, 17]).unwrap();
        let text = render(&[r], &meta(1000));
        assert_eq!(
            text,
            "# carmichael-v1\n# limit 1000\n# strategy tree\n# unit all\n561 3 11 17\n"
        );
    }

    #[test]
    fn empty_file_is_header_only() {
        let text = render(&[], &meta(500));
        assert_eq!(text.lines().count(), 4);
        let back = read_from(Cursor::new(text), Verify::Full).unwrap();
        assert!(back.records.is_empty());
        assert_eq!(back.meta.limit, 500);
    }

    #[test]
    fn round_trip_is_exact() {
        let records = brute_scan(100_000);
        let m = meta(100_000);
        let text = render(&records, &m);
        for verify in [Verify::Full, Verify::Trust] {
            let back = read_from(Cursor::new(text.clone()), verify).unwrap();
            assert_eq!(back.records, records);
            assert_eq!(back.meta, m);
            // and writing again reproduces the bytes
            assert_eq!(render(&back.records, &back.meta), text);
        }
    }

    #[test]
    fn tampered_lines_name_their_line_number() {
        let base = "# carmichael-v1\n# limit 10000\n# strategy tree\n# unit all\n";
        let cases = [
            ("9 3 3", "not strictly ascending"),
            ("561 3 11 18", "not prime"),
            ("561 3 11 19", "multiply to"),
            ("1729 7 13 19\n561 3 11 17", "out of order"),
            ("565 5 113", "Korselt"),
            ("56x 3 11 17", "not a decimal"),
            ("10585 5 29 73", "exceeds the declared limit"),
        ];
        for (body, needle) in cases {
            let err = read_from(Cursor::new(format!("{base}{body}\n")), Verify::Full).unwrap_err();
            let msg = err.to_string();
            assert!(msg.starts_with("line 5") || msg.starts_with("line 6"), "{msg}");
            assert!(msg.contains(needle), "{msg} should mention {needle}");
        }
    }

    #[test]
    fn trust_mode_skips_only_primality() {
        // 41041 = 13 * 41 * 77 with 77 composite, yet 12, 40 and 76 all
        // divide 41040, so the line passes every check except the primality
        // certification.
        for m in [12u64, 40, 76] {
            assert_eq!(41040 % m, 0);
        }
        let base = "# carmichael-v1\n# limit 50000\n# strategy tree\n# unit all\n41041 13 41 77\n";
        assert!(read_from(Cursor::new(base), Verify::Trust).is_ok());
        let err = read_from(Cursor::new(base), Verify::Full).unwrap_err();
        assert!(err.to_string().contains("not prime"), "{err}");
    }

    #[test]
    fn wrong_format_is_refused() {
        let err = read_from(Cursor::new("# carmichael-v2\n# limit 1\n# strategy x\n# unit y\n"), Verify::Full)
            .unwrap_err();
        assert!(err.to_string().contains("carmichael-v2"), "{err}");
    }

    #[test]
    fn merge_collapses_duplicates_and_sorts() {
        let all = brute_scan(100_000);
        let (even, odd): (Vec<_>, Vec<_>) = all
            .iter()
            .cloned()
            .enumerate()
            .partition(|(i, _)| i % 2 == 0);
        let even: Vec<_> = even.into_iter().map(|(_, r)| r).collect();
        let odd: Vec<_> = odd.into_iter().map(|(_, r)| r).collect();
        // overlap: both halves also carry the full first three records
        let mut even_plus = all[..3].to_vec();
        even_plus.extend(even);
        even_plus.sort_by_key(|r| r.n());
        even_plus.dedup_by_key(|r| r.n());
        let merged = merge(&[file_of(even_plus, 100_000), file_of(odd, 100_000)]).unwrap();
        assert_eq!(merged.records, all);
        assert_eq!(merged.meta.strategy, "merged");
    }

    #[test]
    fn merge_is_idempotent() {
        let f = file_of(brute_scan(10_000), 10_000);
        let m = merge(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(m.records, f.records);
    }

    #[test]
    fn merge_refuses_conflicting_factorizations() {
        let good = CarmichaelRecord::new(561, vec![3, 11, 17]).unwrap();
        let bad = CarmichaelRecord::from_parts_unchecked(561, vec![3, 187], 7, good.lehmer());
        let err = merge(&[file_of(vec![good], 1000), file_of(vec![bad], 1000)]).unwrap_err();
        assert!(matches!(err, MergeError::Conflict { n: 561, .. }), "{err}");
    }

    #[test]
    fn merge_refuses_mixed_limits() {
        let a = file_of(vec![], 1000);
        let b = file_of(vec![], 2000);
        assert!(matches!(merge(&[a, b]), Err(MergeError::LimitMismatch(1000, 2000))));
    }

    #[test]
    fn fingerprint_tracks_every_config_field() {
        let base = SearchConfig::new(1_000_000);
        let fp = config_fingerprint(&base);
        let mut limit = base.clone();
        limit.limit = 2_000_000;
        let mut split = base.clone();
        split.split = 999;
        let mut term = base.clone();
        term.early_term = 1;
        let mut window = base.clone();
        window.d_max = Some(3);
        let mut part = base.clone();
        part.partition = Some(vec![3, 5]);
        for other in [limit, split, term, window, part] {
            assert_ne!(config_fingerprint(&other), fp);
        }
        assert_eq!(config_fingerprint(&base.clone()), fp);
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("checkpoint");
        let cp = Checkpoint { fingerprint: 0xdead_beef_0123_4567, done: [3, 5, 11].into() };
        checkpoint_write(&path, &cp).unwrap();
        assert_eq!(checkpoint_read(&path).unwrap(), cp);
    }

    #[test]
    fn interrupted_run_resumes_to_identical_bytes() {
        let sieve = Sieve::new(1 << 12);
        let cfg = SearchConfig::new(100_000);
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        // uninterrupted reference run
        let RunOutcome::Complete(clean) = run_checkpointed(&cfg, &sieve, dir_a.path(), None).unwrap()
        else {
            panic!("reference run should complete")
        };
        // interrupt after two units, then resume
        let outcome = run_checkpointed(&cfg, &sieve, dir_b.path(), Some(2)).unwrap();
        assert!(matches!(outcome, RunOutcome::Interrupted { .. }));
        let RunOutcome::Complete(resumed) = run_checkpointed(&cfg, &sieve, dir_b.path(), None).unwrap()
        else {
            panic!("resume should complete")
        };
        assert_eq!(resumed, clean);
        let bytes_a = fs::read(dir_a.path().join("merged.result")).unwrap();
        let bytes_b = fs::read(dir_b.path().join("merged.result")).unwrap();
        assert_eq!(bytes_a, bytes_b);
        // and the merge equals a direct enumeration
        let direct = enumerate_all(&cfg, &sieve);
        assert_eq!(clean.records, direct);
    }

    #[test]
    fn resume_with_changed_config_is_refused() {
        let sieve = Sieve::new(1 << 12);
        let cfg = SearchConfig::new(10_000);
        let dir = tempfile::tempdir().unwrap();
        let _ = run_checkpointed(&cfg, &sieve, dir.path(), Some(1)).unwrap();
        let mut changed = cfg.clone();
        changed.limit = 20_000;
        let err = run_checkpointed(&changed, &sieve, dir.path(), None).unwrap_err();
        assert!(matches!(err, RunError::FingerprintMismatch { .. }), "{err}");
        // the original config still resumes fine
        assert!(matches!(
            run_checkpointed(&cfg, &sieve, dir.path(), None),
            Ok(RunOutcome::Complete(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// Merge is order-insensitive and collapses arbitrary overlaps: any
        /// family of subsets of the 10^5 census merges back to exactly the
        /// records present in the union.
        #[test]
        fn merge_of_subsets_is_their_union(masks in prop::collection::vec(prop::collection::vec(any::<bool>(), 16), 1..5)) {
            let all = brute_scan(100_000);
            prop_assert_eq!(all.len(), 16);
            let files: Vec<ResultFile> = masks
                .iter()
                .map(|mask| {
                    let subset: Vec<_> = all
                        .iter()
                        .zip(mask)
                        .filter(|(_, keep)| **keep)
                        .map(|(r, _)| r.clone())
                        .collect();
                    file_of(subset, 100_000)
                })
                .collect();
            let merged = merge(&files).unwrap();
            let mut expect: Vec<CarmichaelRecord> = all
                .iter()
                .enumerate()
                .filter(|(i, _)| masks.iter().any(|m| m[*i]))
                .map(|(_, r)| r.clone())
                .collect();
            expect.sort_by_key(|r| r.n());
            prop_assert_eq!(&merged.records, &expect);
            // associativity against the flat merge
            if files.len() >= 2 {
                let left = merge(&files[..1]).unwrap();
                let right = merge(&files[1..]).unwrap();
                let nested = merge(&[left, right]).unwrap();
                prop_assert_eq!(&nested.records, &merged.records);
            }
        }
    }
}
