//! Append-only checkpoint files.
//!
//! ```text
//! #magicsq-checkpoint v1 digest=<hex> engine=assoc order=7 mode=canonical scope=- total=817190 created=<unix secs>
//! <pair_id>\t<count>\t<elapsed_micros>
//! ```
//!
//! A final line without its newline is a torn write and is dropped on load.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};

use super::Workload;

const MAGIC: &str = "#magicsq-checkpoint";
const FORMAT_VERSION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResultRecord {
    pub pair_id: u64,
    pub count: u64,
    pub elapsed_micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointHeader {
    pub workload: Workload,
    pub digest: String,
    pub total_ids: u64,
    pub created: u64,
}

impl CheckpointHeader {
    pub fn new(workload: Workload, total_ids: u64) -> Self {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        CheckpointHeader { digest: workload.digest(), workload, total_ids, created }
    }

    fn to_line(&self) -> String {
        let w = &self.workload;
        format!(
            "{MAGIC} {FORMAT_VERSION} digest={} engine={} order={} mode={} scope={} total={} created={}",
            self.digest,
            w.engine.name(),
            w.order,
            w.mode_name(),
            w.scope_name(),
            self.total_ids,
            self.created
        )
    }

    fn parse(line: &str, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Checkpoint { path: path.to_path_buf(), reason };
        let mut parts = line.split_whitespace();
        if parts.next() != Some(MAGIC) {
            return Err(bad("missing checkpoint header".into()));
        }
        if parts.next() != Some(FORMAT_VERSION) {
            return Err(bad("unsupported checkpoint version".into()));
        }
        let mut fields = BTreeMap::new();
        for p in parts {
            let (k, v) = p.split_once('=').ok_or_else(|| bad(format!("malformed header field {p:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("header lacks {k}")));
        let num =
            |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| bad(format!("header field {k} is not a number"))) };
        let workload = Workload::from_names(get("engine")?, num("order")? as usize, get("mode")?, get("scope")?)
            .map_err(|e| bad(e.to_string()))?;
        let header = CheckpointHeader {
            workload,
            digest: get("digest")?.to_string(),
            total_ids: num("total")?,
            created: num("created")?,
        };
        if header.digest != header.workload.digest() {
            return Err(Error::DigestMismatch { expected: header.workload.digest(), found: header.digest });
        }
        Ok(header)
    }
}

/// A loaded checkpoint: header plus records keyed by pair ID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub records: BTreeMap<u64, ResultRecord>,
    /// Byte length of the intact prefix (everything before a torn line).
    pub(crate) valid_len: u64,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Checkpoint { path: path.to_path_buf(), reason };
        let text = fs::read_to_string(path)?;
        let intact = match text.rfind('\n') {
            Some(i) => &text[..=i],
            None => return Err(bad("checkpoint has no complete header line".into())),
        };
        if intact.len() < text.len() {
            log::warn!("{}: dropping torn final line", path.display());
        }
        let mut lines = intact.lines();
        let header = CheckpointHeader::parse(lines.next().unwrap_or_default(), path)?;
        let mut records = BTreeMap::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec = parse_record(line).ok_or_else(|| bad(format!("malformed record on line {}", n + 2)))?;
            if rec.pair_id == 0 || rec.pair_id > header.total_ids {
                return Err(bad(format!("pair id {} outside 1..={}", rec.pair_id, header.total_ids)));
            }
            if records.insert(rec.pair_id, rec).is_some() {
                return Err(bad(format!("duplicate record for pair {}", rec.pair_id)));
            }
        }
        Ok(Checkpoint { header, records, valid_len: intact.len() as u64 })
    }

    pub fn workload(&self) -> &Workload {
        &self.header.workload
    }
}

fn parse_record(line: &str) -> Option<ResultRecord> {
    let mut f = line.split('\t');
    let rec = ResultRecord {
        pair_id: f.next()?.parse().ok()?,
        count: f.next()?.parse().ok()?,
        elapsed_micros: f.next()?.parse().ok()?,
    };
    f.next().is_none().then_some(rec)
}

/// Appends records to a checkpoint file, one flushed line each.
pub struct CheckpointWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CheckpointWriter {
    /// Creates a new file with a header, or reopens an existing one for
    /// appending after discarding any torn tail.
    pub fn open(path: &Path, header: &CheckpointHeader, existing: Option<&Checkpoint>) -> Result<Self> {
        let file = match existing {
            Some(cp) => {
                let f = OpenOptions::new().write(true).open(path)?;
                f.set_len(cp.valid_len)?;
                let mut f = f;
                use std::io::Seek;
                f.seek(std::io::SeekFrom::End(0))?;
                f
            }
            None => {
                let mut f = OpenOptions::new().write(true).create_new(true).open(path)?;
                writeln!(f, "{}", header.to_line())?;
                f.sync_data()?;
                f
            }
        };
        Ok(CheckpointWriter { path: path.to_path_buf(), out: BufWriter::new(file) })
    }

    /// Writes and flushes one record; the record only counts as stored once
    /// this returns.
    pub fn append(&mut self, rec: &ResultRecord) -> Result<()> {
        self.write_line(rec)?;
        self.out.flush().map_err(|e| Error::Checkpoint { path: self.path.clone(), reason: e.to_string() })
    }

    fn write_line(&mut self, rec: &ResultRecord) -> Result<()> {
        writeln!(self.out, "{}\t{}\t{}", rec.pair_id, rec.count, rec.elapsed_micros)
            .map_err(|e| Error::Checkpoint { path: self.path.clone(), reason: e.to_string() })
    }

    pub fn sync(&mut self) -> Result<()> {
        self.out.flush()?;
        self.out.get_ref().sync_data()?;
        Ok(())
    }
}

/// Writes a complete checkpoint in one go (used for hand-built inputs).
pub fn write_checkpoint(path: &Path, header: &CheckpointHeader, records: &[ResultRecord]) -> Result<()> {
    let mut w = CheckpointWriter::open(path, header, None)?;
    for r in records {
        w.write_line(r)?;
    }
    w.sync()
}
