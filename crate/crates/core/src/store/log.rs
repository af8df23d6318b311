use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use fs2::FileExt;

use super::{EventRecord, StoreError};

pub const LOG_FILE: &str = "events.jsonl";
pub const LOCK_FILE: &str = "fable.lock";
pub const SNAPSHOT_FILE: &str = "snapshot.json";

/// Where appended records go. A database-backed implementation can replace
/// the file log without touching the rest of the store.
pub trait LogBackend: Send {
    /// Writes one record durably. Either the whole record is persisted or,
    /// on error, none of it is.
    fn persist(&mut self, record: &EventRecord) -> Result<(), StoreError>;
}

#[derive(Debug, Default)]
pub struct MemoryLog {
    pub lines: Vec<String>,
}

impl LogBackend for MemoryLog {
    fn persist(&mut self, record: &EventRecord) -> Result<(), StoreError> {
        let line = serde_json::to_string(record).map_err(|e| StoreError::InvalidPayload(e.to_string()))?;
        self.lines.push(line);
        Ok(())
    }
}

/// Newline-delimited JSON log in a data directory, guarded by an exclusive
/// lock file for the lifetime of the value.
#[derive(Debug)]
pub struct FileLog {
    file: File,
    _lock: File,
}

impl FileLog {
    /// Locks `dir`, then reads and parses the existing log.
    pub fn open(dir: &Path) -> Result<(FileLog, Vec<EventRecord>), StoreError> {
        fs::create_dir_all(dir)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join(LOCK_FILE))?;
        lock.try_lock_exclusive().map_err(|_| StoreError::Locked)?;
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(dir.join(LOG_FILE))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let records = read_log(&bytes)?;
        Ok((FileLog { file, _lock: lock }, records))
    }
}

impl LogBackend for FileLog {
    fn persist(&mut self, record: &EventRecord) -> Result<(), StoreError> {
        let mut line = serde_json::to_vec(record).map_err(|e| StoreError::InvalidPayload(e.to_string()))?;
        line.push(b'\n');
        let before = self.file.metadata()?.len();
        let written = self.file.write_all(&line).and_then(|()| self.file.sync_data());
        if let Err(e) = written {
            // roll back a torn write so later appends start on a clean line
            let _ = self.file.set_len(before);
            return Err(StoreError::Io(e));
        }
        Ok(())
    }
}

/// Parses log bytes. Every record must be a complete, newline-terminated
/// JSON line; a torn or unparsable line is reported with its line number.
pub fn read_log(bytes: &[u8]) -> Result<Vec<EventRecord>, StoreError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        StoreError::Corrupt {
            line,
            reason: "invalid UTF-8".into(),
        }
    })?;
    let mut records = Vec::new();
    let mut rest = text;
    let mut line_no = 0;
    while !rest.is_empty() {
        line_no += 1;
        let Some(end) = rest.find('\n') else {
            return Err(StoreError::Corrupt {
                line: line_no,
                reason: "truncated record (no line terminator)".into(),
            });
        };
        let line = &rest[..end];
        rest = &rest[end + 1..];
        if line.trim().is_empty() {
            return Err(StoreError::Corrupt {
                line: line_no,
                reason: "empty line".into(),
            });
        }
        let record: EventRecord = serde_json::from_str(line).map_err(|e| StoreError::Corrupt {
            line: line_no,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}
