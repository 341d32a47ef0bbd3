//! Command-line driver for the Carmichael number engines.
//!
//! Subcommands emit record lines (`N p_1 ... p_d`) on stdout or write full
//! result files with `--out`; diagnostics go to stderr. Exit codes: 0 on
//! success, 1 when a verification or integrity check fails, 2 on usage
//! errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use carmex_core::arith::{self, factorize, Sieve};
use carmex_core::carmichael::{brute_scan, CarmichaelRecord, ORACLE_CAP};
use carmex_core::largeprime::{self, ScanRange};
use carmex_core::search::{self, SearchConfig};
use carmex_core::stats::StatsReport;
use carmex_core::store::{self, FileMeta, ResultFile, RunOutcome, Verify};

/// Parses a count written as plain digits, with underscores, in scientific
/// shorthand ("1e12", "2.5e10"), or as an explicit power ("10^7"). Anything
/// that is not an exact natural number is rejected.
fn parse_count(s: &str) -> Result<u64, String> {
    let s: String = s.chars().filter(|&c| c != '_').collect();
    let fail = || format!("\"{s}\" is not an exact natural number");
    let exact = |v: u128| u64::try_from(v).map_err(|_| fail());
    if let Some((base, exp)) = s.split_once('^') {
        let base: u128 = base.parse().map_err(|_| fail())?;
        let exp: u32 = exp.parse().map_err(|_| fail())?;
        return exact(base.checked_pow(exp).ok_or_else(fail)?);
    }
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let exp: u32 = exp.parse().map_err(|_| fail())?;
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let digits = format!("{int_part}{frac_part}");
        let scale = exp.checked_sub(frac_part.len() as u32).ok_or_else(fail)?;
        let base: u128 = digits.parse().map_err(|_| fail())?;
        let pow = 10u128.checked_pow(scale).ok_or_else(fail)?;
        return exact(base.checked_mul(pow).ok_or_else(fail)?);
    }
    s.parse::<u64>().map_err(|_| fail())
}

#[derive(Parser)]
#[command(name = "carmex", about = "Exact enumeration and statistics of Carmichael numbers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate every Carmichael number up to a bound
    Enumerate {
        /// Inclusive bound X
        #[arg(long, value_parser = parse_count, default_value = "1e9")]
        limit: u64,
        /// Largest prime the tree search owns; primes above it belong to `scan`
        /// (default: sqrt of the limit, covering everything)
        #[arg(long, value_parser = parse_count)]
        split: Option<u64>,
        /// Smallest admissible number of prime factors
        #[arg(long, value_parser = parse_count)]
        d_min: Option<u64>,
        /// Largest admissible number of prime factors
        #[arg(long, value_parser = parse_count)]
        d_max: Option<u64>,
        /// Early-termination threshold
        #[arg(long, value_parser = parse_count)]
        early_term: Option<u64>,
        /// Restrict to these work units (comma-separated first primes)
        #[arg(long)]
        units: Option<String>,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        threads: Option<usize>,
        /// Write a result file here instead of printing records
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for unit files and the checkpoint; reruns resume
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Enumerate only the three-factor Carmichael numbers
    EnumerateD3 {
        #[arg(long, value_parser = parse_count, default_value = "1e9")]
        limit: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan large largest-prime bands via the cofactor progression
    Scan {
        /// Exclusive lower end of the prime band
        #[arg(long, value_parser = parse_count, default_value = "1e4")]
        p_lo: u64,
        /// Inclusive upper end of the prime band (default: sqrt of the limit)
        #[arg(long, value_parser = parse_count)]
        p_hi: Option<u64>,
        #[arg(long, value_parser = parse_count, default_value = "1e9")]
        limit: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify every record of a result file
    Verify {
        file: PathBuf,
        /// Trust factor primality (still checks structure and Korselt)
        #[arg(long)]
        trust: bool,
    },
    /// Check one number: factors, Korselt verdict, index, Lehmer index
    Check {
        #[arg(value_parser = parse_count)]
        n: u64,
    },
    /// Tabulate statistics from a result file
    Stats {
        /// Result file to read
        #[arg(long = "in")]
        input: PathBuf,
        /// Report bound (default: the file's own limit)
        #[arg(long, value_parser = parse_count)]
        limit: Option<u64>,
        /// Comma-separated table names to print (default: all)
        #[arg(long)]
        tables: Option<String>,
        /// Write plot series (k.dat, exponent.dat) into this directory
        #[arg(long)]
        plots: Option<PathBuf>,
        /// Emit one JSON object per table instead of text
        #[arg(long)]
        json: bool,
    },
    /// Find the smallest Carmichael number with exactly d prime factors
    Smallest {
        #[arg(long, value_parser = parse_count)]
        d: u64,
        /// Give up beyond this bound
        #[arg(long, value_parser = parse_count)]
        cap: u64,
    },
    /// Brute-force census from the Fermat congruence (small bounds only)
    Oracle {
        #[arg(long, value_parser = parse_count)]
        limit: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge result files, collapsing duplicates
    Merge {
        #[arg(num_args = 1..)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run, split by exit code: usage errors (2) versus verification,
/// integrity, and environment failures (1).
enum Failure {
    Usage(String),
    Fault(String),
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Failure {
        Failure::Usage(msg.into())
    }
    fn fault(msg: impl std::fmt::Display) -> Failure {
        Failure::Fault(msg.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::fault(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Fault(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Sieve bound: the environment override when set, otherwise whatever the
/// caller computed for the job at hand.
fn make_sieve(auto: u64) -> Result<Sieve, Failure> {
    match std::env::var("CARMEX_SIEVE_LIMIT") {
        Ok(v) => {
            let bound = parse_count(&v)
                .map_err(|e| Failure::usage(format!("CARMEX_SIEVE_LIMIT: {e}")))?;
            Ok(Sieve::new(bound))
        }
        Err(_) => Ok(Sieve::new(auto)),
    }
}

/// Sieve requirement for tree searches at this limit, with head-room.
fn search_sieve_bound(limit: u64) -> u64 {
    1_000_000u64
        .max(arith::isqrt(limit / 15) + 1000)
        .max(arith::icbrt(limit) + 1000)
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(job()),
        Some(t) => {
            if t == 0 {
                return Err(Failure::usage("--threads must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(Failure::fault)?;
            Ok(pool.install(job))
        }
    }
}

/// Prints records as result-file body lines, or writes a full file.
fn deliver(records: &[CarmichaelRecord], meta: FileMeta, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => {
            store::write(path, records, &meta)?;
            eprintln!("{} records -> {}", records.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            for r in records {
                let line = r
                    .primes()
                    .iter()
                    .fold(r.n().to_string(), |acc, p| format!("{acc} {p}"));
                writeln!(w, "{line}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cmd: Cmd) -> CmdResult {
    match cmd {
        Cmd::Enumerate {
            limit,
            split,
            d_min,
            d_max,
            early_term,
            units,
            threads,
            out,
            checkpoint,
        } => {
            let mut cfg = SearchConfig::new(limit);
            if limit < 561 {
                return Err(Failure::usage(format!(
                    "limit {limit} lies below 561, the smallest Carmichael number"
                )));
            }
            if let Some(b) = split {
                if b > arith::isqrt(limit) {
                    return Err(Failure::usage(format!(
                        "split {b} exceeds sqrt of the limit ({})",
                        arith::isqrt(limit)
                    )));
                }
                cfg.split = b;
            }
            if let Some(d) = d_min {
                if d < 3 {
                    return Err(Failure::usage("a Carmichael number has at least 3 prime factors"));
                }
                cfg.d_min = d as usize;
            }
            if let Some(d) = d_max {
                if (d as usize) < cfg.d_min {
                    return Err(Failure::usage("--d-max lies below --d-min"));
                }
                cfg.d_max = Some(d as usize);
            }
            if let Some(t) = early_term {
                if t == 0 {
                    return Err(Failure::usage("--early-term must be at least 1"));
                }
                cfg.early_term = t;
            }
            if let Some(list) = units {
                let parsed: Result<Vec<u64>, String> = list.split(',').map(parse_count).collect();
                cfg.partition = Some(parsed.map_err(Failure::usage)?);
            }
            let sieve = make_sieve(search_sieve_bound(limit))?;
            let need = arith::isqrt(limit / 15).max(arith::icbrt(limit)) + 600;
            if sieve.limit() < need {
                return Err(Failure::usage(format!(
                    "sieve bound {} too small for limit {limit}: need at least {need}",
                    sieve.limit()
                )));
            }
            let records = match checkpoint {
                None => in_pool(threads, || search::enumerate_all(&cfg, &sieve))?,
                Some(dir) => {
                    let outcome = in_pool(threads, || {
                        store::run_checkpointed(&cfg, &sieve, &dir, None)
                    })?
                    .map_err(Failure::fault)?;
                    match outcome {
                        RunOutcome::Complete(file) => file.records,
                        RunOutcome::Interrupted { .. } => unreachable!("no interrupt hook here"),
                    }
                }
            };
            deliver(&records, FileMeta { limit, strategy: "tree".into(), unit: "all".into() }, out.as_deref())
        }
        Cmd::EnumerateD3 { limit, threads, out } => {
            if limit < 561 {
                return Err(Failure::usage(format!(
                    "limit {limit} lies below 561, the smallest Carmichael number"
                )));
            }
            let cfg = SearchConfig::new(limit);
            let sieve = make_sieve(search_sieve_bound(limit))?;
            let records = in_pool(threads, || search::enumerate_d3(&cfg, &sieve))?;
            deliver(&records, FileMeta { limit, strategy: "d3".into(), unit: "all".into() }, out.as_deref())
        }
        Cmd::Scan { p_lo, p_hi, limit, threads, out } => {
            let ceiling = arith::isqrt(limit);
            let p_hi = p_hi.unwrap_or(ceiling);
            if p_lo < 2 || p_lo >= p_hi || p_hi > ceiling {
                return Err(Failure::usage(format!(
                    "need 2 <= p_lo < p_hi <= {ceiling} (sqrt of the limit); got ({p_lo}, {p_hi}]"
                )));
            }
            let range = ScanRange { p_lo, p_hi, limit };
            let sieve = make_sieve(20_000.max(arith::isqrt(p_hi) + 1000))?;
            let records = in_pool(threads, || largeprime::scan(&range, &sieve))?;
            deliver(
                &records,
                FileMeta { limit, strategy: "scan".into(), unit: format!("{p_lo}-{p_hi}") },
                out.as_deref(),
            )
        }
        Cmd::Verify { file, trust } => {
            let mode = if trust { Verify::Trust } else { Verify::Full };
            let parsed = store::read(&file, mode).map_err(Failure::fault)?;
            eprintln!(
                "{}: {} records verified (limit {}, strategy {})",
                file.display(),
                parsed.records.len(),
                parsed.meta.limit,
                parsed.meta.strategy
            );
            Ok(())
        }
        Cmd::Check { n } => {
            let sieve = make_sieve(1 << 14)?;
            if n >= 3 {
                let f = factorize(n, &sieve);
                if carmex_core::carmichael::korselt(n, &f) {
                    let record = CarmichaelRecord::new(n, f.primes().collect())
                        .expect("korselt-verified factorization");
                    let factors = record
                        .primes()
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(" ");
                    println!(
                        "Carmichael: yes; factors {factors}; index {}; lehmer {}",
                        record.index(),
                        record.lehmer().to_decimal()
                    );
                    return Ok(());
                }
            }
            println!("Carmichael: no");
            Err(Failure::Fault(format!("{n} is not a Carmichael number")))
        }
        Cmd::Stats { input, limit, tables, plots, json } => {
            let parsed = store::read(&input, Verify::Full).map_err(Failure::fault)?;
            let limit = match limit {
                None => parsed.meta.limit,
                Some(x) if x > parsed.meta.limit => {
                    return Err(Failure::usage(format!(
                        "the file only covers numbers up to {}; cannot report at {x}",
                        parsed.meta.limit
                    )))
                }
                Some(x) => x,
            };
            let records: Vec<CarmichaelRecord> = parsed
                .records
                .into_iter()
                .filter(|r| r.n() <= limit)
                .collect();
            let filter: Option<Vec<String>> = match tables {
                None => None,
                Some(list) => {
                    let known = [
                        "counts", "counts_by_d", "k", "swift", "exponent", "residues", "primes",
                        "index", "lehmer", "sd",
                    ];
                    let names: Vec<String> = list.split(',').map(|t| t.trim().to_string()).collect();
                    if let Some(bad) = names.iter().find(|t| !known.contains(&t.as_str())) {
                        return Err(Failure::usage(format!(
                            "unknown table \"{bad}\"; expected one of {}",
                            known.join(", ")
                        )));
                    }
                    Some(names)
                }
            };
            let report = StatsReport::build(&records, limit).map_err(Failure::fault)?;
            let stdout = io::stdout();
            let mut w = io::BufWriter::new(stdout.lock());
            if json {
                report.to_json(&mut w)?;
            } else {
                report.to_tsv(&mut w, filter.as_deref())?;
            }
            w.flush()?;
            if let Some(dir) = plots {
                fs::create_dir_all(&dir)?;
                let series = [("k.dat", &report.k), ("exponent.dat", &report.exponent)];
                for (name, data) in series {
                    let mut text = String::new();
                    for (n, v) in data {
                        text.push_str(&format!("{n}\t{v}\n"));
                    }
                    fs::write(dir.join(name), text)?;
                }
                eprintln!("plot series -> {}", dir.display());
            }
            Ok(())
        }
        Cmd::Smallest { d, cap } => {
            if d < 3 {
                return Err(Failure::usage("a Carmichael number has at least 3 prime factors"));
            }
            let sieve = make_sieve(search_sieve_bound(cap))?;
            match search::smallest_with_d(d as usize, cap, &sieve) {
                Some(n) => {
                    println!("{n}");
                    Ok(())
                }
                None => Err(Failure::Fault(format!(
                    "no Carmichael number with {d} prime factors up to {cap}"
                ))),
            }
        }
        Cmd::Oracle { limit, out } => {
            if limit > ORACLE_CAP {
                return Err(Failure::usage(format!(
                    "the oracle checks every base of every number and is capped at {ORACLE_CAP}"
                )));
            }
            let records = brute_scan(limit);
            deliver(&records, FileMeta { limit, strategy: "oracle".into(), unit: "all".into() }, out.as_deref())
        }
        Cmd::Merge { files, out } => {
            let mut parsed: Vec<ResultFile> = Vec::with_capacity(files.len());
            for f in &files {
                parsed.push(store::read(f, Verify::Full).map_err(Failure::fault)?);
            }
            let merged = store::merge(&parsed).map_err(Failure::fault)?;
            eprintln!("{} records from {} files", merged.records.len(), files.len());
            deliver(&merged.records, merged.meta.clone(), out.as_deref())
        }
    }
}
