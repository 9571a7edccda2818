use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Mutex;

use geoqa_core::TraceRecord;

/// Where completed turns go.
pub trait TraceSink: Send + Sync {
    fn append(&self, record: &TraceRecord) -> io::Result<()>;
}

/// Append-only JSON lines file, flushed after every record.
pub struct JsonlTraceLog {
    out: Mutex<BufWriter<File>>,
}

impl JsonlTraceLog {
    pub fn open(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { out: Mutex::new(BufWriter::new(file)) })
    }
}

impl TraceSink for JsonlTraceLog {
    fn append(&self, record: &TraceRecord) -> io::Result<()> {
        let line = serde_json::to_string(record)?;
        let mut out = self.out.lock().expect("trace log lock");
        writeln!(out, "{line}")?;
        out.flush()
    }
}

/// In-memory sink, for tests and runs without `--log`.
#[derive(Default)]
pub struct MemoryTraceLog {
    records: Mutex<Vec<TraceRecord>>,
}

impl MemoryTraceLog {
    pub fn records(&self) -> Vec<TraceRecord> {
        self.records.lock().expect("trace lock").clone()
    }
}

impl TraceSink for MemoryTraceLog {
    fn append(&self, record: &TraceRecord) -> io::Result<()> {
        self.records.lock().expect("trace lock").push(record.clone());
        Ok(())
    }
}
