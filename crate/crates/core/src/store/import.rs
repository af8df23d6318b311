use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Claim, ClaimStatus, Event, Store, StoreError};
use crate::ids::ClaimId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportFormat {
    JsonLines,
    Csv,
}

impl ImportFormat {
    /// JSON lines if the first non-blank byte opens an object, CSV otherwise.
    pub fn detect(source: &[u8]) -> ImportFormat {
        match source.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') => ImportFormat::JsonLines,
            _ => ImportFormat::Csv,
        }
    }
}

/// A rejected input row. `line` is 1-based within the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportReport {
    pub imported: Vec<Claim>,
    pub errors: Vec<RowError>,
}

/// One input row as read, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimRow {
    #[serde(default)]
    pub claim_id: Option<String>,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub source_url: Option<String>,
    #[serde(default)]
    pub platform: Option<String>,
}

fn non_empty(value: Option<String>) -> Option<String> {
    value.filter(|v| !v.trim().is_empty())
}

/// Splits a batch into rows tagged with their 1-based source line. Rows that
/// fail to parse carry the reason instead.
pub fn parse_claim_batch(source: &[u8], format: ImportFormat) -> Result<Vec<(usize, Result<ClaimRow, String>)>, StoreError> {
    let text = std::str::from_utf8(source).map_err(|e| StoreError::UnreadableSource(e.to_string()))?;
    Ok(parse_rows(text, format))
}

fn parse_rows(text: &str, format: ImportFormat) -> Vec<(usize, Result<ClaimRow, String>)> {
    match format {
        ImportFormat::JsonLines => text
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| (i + 1, serde_json::from_str::<ClaimRow>(line).map_err(|e| format!("invalid JSON: {e}"))))
            .collect(),
        ImportFormat::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let headers = match reader.headers() {
                Ok(h) => h.clone(),
                Err(e) => return vec![(1, Err(format!("invalid CSV header: {e}")))],
            };
            reader
                .records()
                .map(|result| match result {
                    Ok(record) => {
                        let line = record.position().map_or(0, |p| p.line() as usize);
                        let row = record
                            .deserialize::<ClaimRow>(Some(&headers))
                            .map_err(|e| format!("invalid CSV row: {e}"));
                        (line, row)
                    }
                    Err(e) => {
                        let line = e.position().map_or(0, |p| p.line() as usize);
                        (line, Err(format!("invalid CSV row: {e}")))
                    }
                })
                .collect()
        }
    }
}

impl Store {
    /// Imports a claim batch. Valid rows become `ClaimAdded` events; bad
    /// rows are reported and skipped. A row without `claim_id` gets a UUID.
    pub fn import_claims(&mut self, source: &[u8], format: ImportFormat) -> Result<ImportReport, StoreError> {
        let rows = parse_claim_batch(source, format)?;
        let mut report = ImportReport::default();
        let mut batch_ids = HashSet::new();
        for (line, row) in rows {
            let row = match row {
                Ok(row) => row,
                Err(reason) => {
                    report.errors.push(RowError { line, reason });
                    continue;
                }
            };
            let Some(text) = non_empty(row.text) else {
                report.errors.push(RowError {
                    line,
                    reason: "empty claim text".into(),
                });
                continue;
            };
            let claim_id = ClaimId::new(
                non_empty(row.claim_id)
                    .map(|s| s.trim().to_string())
                    .unwrap_or_else(|| uuid::Uuid::new_v4().to_string()),
            );
            if !batch_ids.insert(claim_id.clone()) {
                report.errors.push(RowError {
                    line,
                    reason: format!("duplicate claim_id {claim_id} in batch"),
                });
                continue;
            }
            if self.state.claims.contains_key(&claim_id) {
                report.errors.push(RowError {
                    line,
                    reason: format!("claim_id {claim_id} already exists"),
                });
                continue;
            }
            let claim = Claim {
                claim_id,
                text,
                source_url: non_empty(row.source_url),
                platform: non_empty(row.platform),
                created_at: self.clock.now(),
                status: ClaimStatus::Open,
            };
            self.append(Event::ClaimAdded(claim.clone()))?;
            report.imported.push(claim);
        }
        Ok(report)
    }
}
