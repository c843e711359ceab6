//! JSON-lines dataset files: one record per line with fields in the order
//! `id, task, source, target, meta`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::{TaskInstance, TaskMeta};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub task: String,
    pub source: String,
    pub target: String,
    pub meta: Value,
}

/// Where a record came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: String,
    pub index: u64,
    pub config_digest: String,
}

impl DatasetRecord {
    pub fn from_instance(inst: &TaskInstance, provenance: &Provenance) -> Self {
        DatasetRecord {
            id: inst.id.clone(),
            task: inst.task.clone(),
            source: inst.source_text(),
            target: inst.target_text(),
            meta: json!({
                "seed": provenance.seed,
                "stream": provenance.stream,
                "index": provenance.index,
                "config_digest": provenance.config_digest,
                "task": inst.meta,
            }),
        }
    }

    /// Task metadata, if the record carries it.
    pub fn task_meta(&self) -> Result<TaskMeta> {
        let task = self
            .meta
            .get("task")
            .ok_or_else(|| Error::invalid(format!("record {} has no task metadata", self.id)))?;
        serde_json::from_value(task.clone())
            .map_err(|e| Error::invalid(format!("record {}: bad task metadata: {e}", self.id)))
    }

    pub fn to_instance(&self) -> Result<TaskInstance> {
        Ok(TaskInstance {
            id: self.id.clone(),
            task: self.task.clone(),
            source: self.source.split_whitespace().map(str::to_string).collect(),
            target: self.target.split_whitespace().map(str::to_string).collect(),
            meta: self.task_meta()?,
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Buffered single-writer for a dataset file.
pub struct DatasetWriter {
    path: PathBuf,
    out: BufWriter<File>,
    written: usize,
}

impl DatasetWriter {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(DatasetWriter {
            out: BufWriter::with_capacity(1 << 20, file),
            path,
            written: 0,
        })
    }

    pub fn write(&mut self, record: &DatasetRecord) -> Result<()> {
        self.write_line(&record.to_json_line())
    }

    /// Writes an already serialized record line.
    pub fn write_line(&mut self, line: &str) -> Result<()> {
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.write_all(b"\n"))
            .map_err(|e| Error::io(&self.path, e))?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn finish(mut self) -> Result<usize> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.written)
    }
}

pub fn write_dataset(records: &[DatasetRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = DatasetWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish().map(|_| ())
}

/// Streaming reader that validates each record as it goes: fields present,
/// source and target non-empty, ids unique.
pub struct DatasetReader {
    path: PathBuf,
    lines: std::io::Lines<BufReader<File>>,
    line_no: usize,
    ids: HashSet<String>,
}

impl DatasetReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        Ok(DatasetReader {
            lines: BufReader::new(file).lines(),
            path,
            line_no: 0,
            ids: HashSet::new(),
        })
    }

    fn parse_error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.line_no,
            message: message.into(),
        }
    }

    /// 1-based line number of the record most recently returned.
    pub fn line(&self) -> usize {
        self.line_no
    }
}

impl Iterator for DatasetReader {
    type Item = Result<DatasetRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let record: DatasetRecord = match serde_json::from_str(&line) {
                Ok(r) => r,
                Err(e) => return Some(Err(self.parse_error(e.to_string()))),
            };
            if record.source.trim().is_empty() || record.target.trim().is_empty() {
                return Some(Err(self.parse_error(format!(
                    "record {} has an empty source or target",
                    record.id
                ))));
            }
            if !self.ids.insert(record.id.clone()) {
                return Some(Err(
                    self.parse_error(format!("duplicate id `{}`", record.id))
                ));
            }
            return Some(Ok(record));
        }
    }
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<DatasetRecord>> {
    DatasetReader::open(path)?.collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str) -> DatasetRecord {
        DatasetRecord {
            id: id.into(),
            task: "sr".into(),
            source: "baa . aaa .".into(),
            target: "aaa . baa .".into(),
            meta: json!({"k": [1, 2]}),
        }
    }

    #[test]
    fn field_order() {
        let line = record("x").to_json_line();
        let keys: Vec<usize> = ["\"id\"", "\"task\"", "\"source\"", "\"target\"", "\"meta\""]
            .iter()
            .map(|k| line.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "{line}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        write_dataset(&[record("a"), record("b"), record("a")], &path).unwrap();
        match read_dataset(&path) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let good = record("a").to_json_line();
        std::fs::write(&path, format!("{good}\n{{not json\n")).unwrap();
        let err = read_dataset(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains(":2:"));
    }

    #[test]
    fn empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        std::fs::write(&path, "").unwrap();
        assert!(read_dataset(&path).unwrap().is_empty());
    }

    #[test]
    fn empty_target_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        let mut r = record("a");
        r.target = " ".into();
        write_dataset(&[r], &path).unwrap();
        assert!(read_dataset(&path).is_err());
    }
}
