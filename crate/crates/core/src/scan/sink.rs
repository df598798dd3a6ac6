use std::fs::{File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScanRecord;
use crate::error::{Error, Result};
use crate::fraction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

pub const CSV_HEADER: [&str; 10] = ["p", "dens_num", "dens_den", "dens_float", "e", "N", "Z", "alpha", "pi", "ms"];

fn header(format: OutputFormat) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        OutputFormat::Jsonl => Ok(Vec::new()),
    }
}

pub fn encode(format: OutputFormat, rec: &ScanRecord) -> Result<Vec<u8>> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                rec.p.to_string(),
                rec.dens.numer().to_string(),
                rec.dens.denom().to_string(),
                fraction::to_decimal(&rec.dens, 15),
                rec.e.to_string(),
                rec.n.to_string(),
                rec.z.to_string(),
                rec.alpha.to_string(),
                rec.pi.to_string(),
                rec.ms.to_string(),
            ])?;
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        OutputFormat::Jsonl => {
            let mut line = serde_json::to_vec(rec)?;
            line.push(b'\n');
            Ok(line)
        }
    }
}

/// Destination for scan records. Records become durable at `commit`, which
/// returns a position that `rollback` can later restore.
pub trait RecordSink {
    fn write(&mut self, rec: &ScanRecord) -> Result<()>;
    fn commit(&mut self) -> Result<u64>;
    fn rollback(&mut self, position: u64) -> Result<()>;
}

/// Records appended to a file; positions are byte offsets.
pub struct FileSink {
    file: File,
    format: OutputFormat,
    pending: Vec<u8>,
    position: u64,
}

impl FileSink {
    /// Truncates `path` and writes the header.
    pub fn create(path: &Path, format: OutputFormat) -> Result<Self> {
        let mut file = File::create(path)?;
        let head = header(format)?;
        file.write_all(&head)?;
        file.sync_data()?;
        Ok(FileSink { file, format, pending: Vec::new(), position: head.len() as u64 })
    }

    /// Opens an existing output for resumption; the caller rolls it back to
    /// the checkpointed position before writing.
    pub fn reopen(path: &Path, format: OutputFormat) -> Result<Self> {
        let mut file = OpenOptions::new().read(true).write(true).open(path)?;
        let position = file.seek(SeekFrom::End(0))?;
        Ok(FileSink { file, format, pending: Vec::new(), position })
    }
}

impl RecordSink for FileSink {
    fn write(&mut self, rec: &ScanRecord) -> Result<()> {
        self.pending.extend(encode(self.format, rec)?);
        Ok(())
    }

    fn commit(&mut self) -> Result<u64> {
        self.file.write_all(&self.pending)?;
        self.file.sync_data()?;
        self.position += self.pending.len() as u64;
        self.pending.clear();
        Ok(self.position)
    }

    fn rollback(&mut self, position: u64) -> Result<()> {
        let len = self.file.metadata()?.len();
        if position > len {
            return Err(Error::invalid(format!(
                "checkpoint expects {position} bytes of output but the file has {len}"
            )));
        }
        self.pending.clear();
        self.file.set_len(position)?;
        self.file.seek(SeekFrom::Start(position))?;
        self.position = position;
        Ok(())
    }
}

/// Records streamed to a writer such as stdout. Cannot roll back.
pub struct StreamSink<W: Write> {
    out: W,
    format: OutputFormat,
    position: u64,
}

impl<W: Write> StreamSink<W> {
    pub fn new(mut out: W, format: OutputFormat) -> Result<Self> {
        let head = header(format)?;
        out.write_all(&head)?;
        Ok(StreamSink { out, format, position: head.len() as u64 })
    }
}

impl<W: Write> RecordSink for StreamSink<W> {
    fn write(&mut self, rec: &ScanRecord) -> Result<()> {
        let bytes = encode(self.format, rec)?;
        self.out.write_all(&bytes)?;
        self.position += bytes.len() as u64;
        Ok(())
    }

    fn commit(&mut self) -> Result<u64> {
        self.out.flush()?;
        Ok(self.position)
    }

    fn rollback(&mut self, position: u64) -> Result<()> {
        if position == self.position {
            Ok(())
        } else {
            Err(Error::Unsupported("a streamed output cannot be rewound".into()))
        }
    }
}

/// Keeps records in memory; positions are record counts.
#[derive(Default)]
pub struct MemorySink {
    pub records: Vec<ScanRecord>,
    committed: usize,
}

impl RecordSink for MemorySink {
    fn write(&mut self, rec: &ScanRecord) -> Result<()> {
        self.records.push(rec.clone());
        Ok(())
    }

    fn commit(&mut self) -> Result<u64> {
        self.committed = self.records.len();
        Ok(self.committed as u64)
    }

    fn rollback(&mut self, position: u64) -> Result<()> {
        self.records.truncate(position as usize);
        self.committed = self.records.len();
        Ok(())
    }
}
