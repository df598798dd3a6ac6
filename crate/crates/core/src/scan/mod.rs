//! Batch density computation over ranges of primes, with checkpoints.
//!
//! Primes are processed in batches of `checkpoint_every`. Each batch is
//! computed in parallel, reassembled in ascending order, written to the
//! sink and committed; only then is the checkpoint replaced (write to a
//! temporary file, then rename). A resumed scan rolls the sink back to the
//! checkpointed position and continues after the last completed prime, so
//! its output is byte-identical to an uninterrupted run.

mod sink;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{self, DensityOptions, WallExponentRecord};
use crate::error::{Error, Result};
use crate::modfib;

pub use sink::{encode, FileSink, MemorySink, OutputFormat, RecordSink, StreamSink, CSV_HEADER};

pub const CHECKPOINT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u64,
    #[serde(with = "crate::fraction::serde_fraction")]
    pub dens: BigRational,
    pub e: u32,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "Z")]
    pub z: u64,
    pub alpha: u64,
    pub pi: u64,
    /// Wall-clock milliseconds; 0 unless timing was requested.
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremum {
    pub p: u64,
    #[serde(with = "crate::fraction::serde_fraction")]
    pub dens: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub schema_version: u32,
    pub lo: u64,
    pub hi: u64,
    pub last_completed_prime: Option<u64>,
    pub running_min: Option<Extremum>,
    pub running_max: Option<Extremum>,
    pub record_count: u64,
    /// Sink position after the last committed batch.
    pub sink_position: u64,
    /// Primes with e ≥ 2.
    pub wss_hits: Vec<u64>,
    /// Primes whose Wall exponent exceeded the cap.
    pub cap_errors: Vec<u64>,
}

impl ScanCheckpoint {
    fn fresh(lo: u64, hi: u64, sink_position: u64) -> Self {
        ScanCheckpoint {
            schema_version: CHECKPOINT_SCHEMA_VERSION,
            lo,
            hi,
            last_completed_prime: None,
            running_min: None,
            running_max: None,
            record_count: 0,
            sink_position,
            wss_hits: Vec::new(),
            cap_errors: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: ScanCheckpoint = serde_json::from_slice(&fs::read(path)?)?;
        if cp.schema_version != CHECKPOINT_SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "checkpoint schema {} is not supported (expected {CHECKPOINT_SCHEMA_VERSION})",
                cp.schema_version
            )));
        }
        Ok(cp)
    }

    /// Replaces `path` atomically.
    pub fn store(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        {
            let file = fs::File::create(&tmp)?;
            serde_json::to_writer_pretty(&file, self)?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    fn absorb(&mut self, rec: &ScanRecord) {
        if self.running_min.as_ref().is_none_or(|m| rec.dens < m.dens) {
            self.running_min = Some(Extremum { p: rec.p, dens: rec.dens.clone() });
        }
        if self.running_max.as_ref().is_none_or(|m| rec.dens > m.dens) {
            self.running_max = Some(Extremum { p: rec.p, dens: rec.dens.clone() });
        }
        if rec.e >= 2 {
            self.wss_hits.push(rec.p);
        }
        self.record_count += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    /// Worker threads; 0 uses rayon's default.
    pub workers: usize,
    pub checkpoint_every: usize,
    pub max_e: u32,
    pub record_timing: bool,
    pub cross_check: bool,
    pub checkpoint: Option<PathBuf>,
    /// Continue from `checkpoint` instead of starting over.
    pub resume: bool,
    /// Stop (as if killed) after this many committed batches.
    pub stop_after_batches: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            workers: 0,
            checkpoint_every: 256,
            max_e: 8,
            record_timing: false,
            cross_check: true,
            checkpoint: None,
            resume: false,
            stop_after_batches: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub lo: u64,
    pub hi: u64,
    pub record_count: u64,
    pub min: Option<Extremum>,
    pub max: Option<Extremum>,
    pub wss_hits: Vec<u64>,
    pub cap_errors: Vec<u64>,
    pub last_completed_prime: Option<u64>,
    /// False when the scan stopped early.
    pub completed: bool,
}

impl ScanSummary {
    fn from_checkpoint(cp: &ScanCheckpoint, completed: bool) -> Self {
        ScanSummary {
            lo: cp.lo,
            hi: cp.hi,
            record_count: cp.record_count,
            min: cp.running_min.clone(),
            max: cp.running_max.clone(),
            wss_hits: cp.wss_hits.clone(),
            cap_errors: cp.cap_errors.clone(),
            last_completed_prime: cp.last_completed_prime,
            completed,
        }
    }
}

/// Up to `count` primes in [from, hi], ascending.
fn next_primes(from: u64, hi: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = from;
    while n <= hi && out.len() < count {
        if modfib::is_prime(n) {
            out.push(n);
        }
        match n.checked_add(1) {
            Some(next) => n = next,
            None => break,
        }
    }
    out
}

enum Outcome {
    Record(ScanRecord),
    Capped(u64),
}

fn compute(p: u64, opts: &ScanOptions) -> Result<Outcome> {
    let start = Instant::now();
    let dens_opts = DensityOptions { max_e: opts.max_e, cross_check: opts.cross_check, ..Default::default() };
    match density::dens_with(p, &dens_opts) {
        Ok(r) => Ok(Outcome::Record(ScanRecord {
            p,
            dens: r.dens,
            e: r.e,
            n: r.n,
            z: r.z,
            alpha: r.alpha,
            pi: r.pi,
            ms: if opts.record_timing { start.elapsed().as_millis() as u64 } else { 0 },
        })),
        Err(Error::ExponentCap { p, .. }) => Ok(Outcome::Capped(p)),
        Err(e) => Err(e),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker threads: {e}")))
}

/// Writes one record per prime in [lo, hi] to `sink`, in ascending order.
pub fn scan_range(lo: u64, hi: u64, sink: &mut dyn RecordSink, opts: &ScanOptions) -> Result<ScanSummary> {
    if lo > hi {
        return Err(Error::invalid(format!("empty interval: lo = {lo} > hi = {hi}")));
    }
    if opts.checkpoint_every == 0 {
        return Err(Error::invalid("checkpoint interval must be positive"));
    }
    let mut cp = match (&opts.checkpoint, opts.resume) {
        (Some(path), true) => {
            let cp = ScanCheckpoint::load(path)?;
            if (cp.lo, cp.hi) != (lo, hi) {
                return Err(Error::invalid(format!(
                    "checkpoint covers [{}, {}], not [{lo}, {hi}]",
                    cp.lo, cp.hi
                )));
            }
            sink.rollback(cp.sink_position)?;
            cp
        }
        (None, true) => return Err(Error::invalid("resuming needs a checkpoint file")),
        (_, false) => ScanCheckpoint::fresh(lo, hi, sink.commit()?),
    };
    let workers = pool(opts.workers)?;
    let mut batches = 0;
    loop {
        let from = match cp.last_completed_prime {
            Some(p) if p >= hi => break,
            Some(p) => p + 1,
            None => lo,
        };
        let batch = next_primes(from, hi, opts.checkpoint_every);
        if batch.is_empty() {
            break;
        }
        let outcomes: Vec<Result<Outcome>> =
            workers.install(|| batch.par_iter().map(|&p| compute(p, opts)).collect());
        for outcome in outcomes {
            match outcome? {
                Outcome::Record(rec) => {
                    sink.write(&rec)?;
                    cp.absorb(&rec);
                }
                Outcome::Capped(p) => cp.cap_errors.push(p),
            }
        }
        cp.sink_position = sink.commit()?;
        cp.last_completed_prime = batch.last().copied();
        if let Some(path) = &opts.checkpoint {
            cp.store(path)?;
        }
        batches += 1;
        if opts.stop_after_batches.is_some_and(|n| batches >= n) {
            return Ok(ScanSummary::from_checkpoint(&cp, false));
        }
    }
    // Mark the whole range done so a later resume is a no-op.
    cp.last_completed_prime = Some(hi);
    if let Some(path) = &opts.checkpoint {
        cp.store(path)?;
    }
    Ok(ScanSummary::from_checkpoint(&cp, true))
}

/// F(p - ε) mod p², using machine words when p² fits.
fn fib_p_minus_eps_mod_p2(p: u64) -> Result<bool> {
    let n = match modfib::epsilon(p)? {
        1 => p - 1,
        -1 => p + 1,
        _ => return Ok(false),
    };
    match p.checked_mul(p) {
        Some(m) => Ok(modfib::fib_pair_mod(n, m)?.f_n == 0),
        None => {
            let m = num_bigint::BigUint::from(p).pow(2);
            let (f, _) = modfib::fib_pair_mod_big(&n.into(), &m)?;
            Ok(f == num_bigint::BigUint::from(0u32))
        }
    }
}

/// Primes p ∈ [lo, hi] with p² | F(p - ε), each confirmed through every
/// Wall-exponent channel that applies.
pub fn wss_sweep(lo: u64, hi: u64) -> Result<Vec<WallExponentRecord>> {
    if lo > hi {
        return Err(Error::invalid(format!("empty interval: lo = {lo} > hi = {hi}")));
    }
    const BLOCK: u64 = 1 << 14;
    let starts: Vec<u64> = (lo..=hi).step_by(BLOCK as usize).collect();
    let candidates: Vec<u64> = starts
        .par_iter()
        .map(|&start| -> Result<Vec<u64>> {
            let end = start.saturating_add(BLOCK - 1).min(hi);
            let mut hits = Vec::new();
            for p in (start..=end).filter(|&p| p != 5 && modfib::is_prime(p)) {
                if fib_p_minus_eps_mod_p2(p)? {
                    hits.push(p);
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut confirmed = Vec::new();
    for p in candidates {
        let record = match density::wall_exponent(p, 16) {
            Ok(r) => r,
            Err(Error::ExponentCap { .. }) => {
                return Err(Error::ExponentCap { p, cap: 16 });
            }
            Err(e) => return Err(e),
        };
        if record.e < 2 {
            return Err(Error::inconsistent(format!(
                "p = {p} looked like a Wall–Sun–Sun prime but has e = {}",
                record.e
            )));
        }
        confirmed.push(record);
    }
    Ok(confirmed)
}

#[cfg(test)]
mod tests;
