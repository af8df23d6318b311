use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EventRecord, MaterializedState, StoreError};

pub const SNAPSHOT_SCHEMA: &str = "fable-snapshot/1";

/// Materialized state at a known seq.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub schema: String,
    pub seq: u64,
    pub state: MaterializedState,
}

impl Snapshot {
    pub fn read(path: &Path) -> Result<Snapshot, StoreError> {
        let bytes = fs::read(path)?;
        let snap: Snapshot = serde_json::from_slice(&bytes)
            .map_err(|e| StoreError::InvalidPayload(format!("snapshot: {e}")))?;
        if snap.schema != SNAPSHOT_SCHEMA || snap.seq != snap.state.last_seq {
            return Err(StoreError::InvalidPayload("snapshot: inconsistent header".into()));
        }
        Ok(snap)
    }

    /// Writes via a temporary file and rename, so readers never see half a snapshot.
    pub fn write(&self, path: &Path) -> Result<(), StoreError> {
        let tmp = path.with_extension("json.tmp");
        let bytes = serde_json::to_vec(self).map_err(|e| StoreError::InvalidPayload(e.to_string()))?;
        fs::write(&tmp, bytes)?;
        fs::File::open(&tmp)?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

pub fn snapshot(state: &MaterializedState) -> Snapshot {
    Snapshot {
        schema: SNAPSHOT_SCHEMA.to_string(),
        seq: state.last_seq,
        state: state.clone(),
    }
}

/// Rebuilds the state from a snapshot and the events after it. `tail` must
/// start at `snapshot.seq + 1`.
pub fn restore(snapshot: Snapshot, tail: &[EventRecord]) -> Result<MaterializedState, StoreError> {
    if let Some(first) = tail.first() {
        if first.seq != snapshot.seq + 1 {
            return Err(StoreError::SnapshotMismatch {
                snapshot_seq: snapshot.seq,
                tail_start: first.seq,
            });
        }
    }
    let mut state = snapshot.state;
    for record in tail {
        state.apply(record)?;
    }
    Ok(state)
}
