//! Parallel, deterministic dataset generation and verification.
//!
//! Instance `i` of a run depends only on `(seed, stream, i)`, so chunks are
//! generated in parallel and written in index order; output files are
//! byte-identical for a given configuration regardless of thread count.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::document::{DocPolicy, Document, DocumentSampler};
use crate::elementary::{
    elementary_from_document, generate_elementary, ElementaryKind, KeywordScheme, TaskContext,
};
use crate::ensemble::{compose, compose_on, EnsembleConfig};
use crate::error::{Error, Result};
use crate::instance::{check_instance, TaskInstance, ENSEMBLE_TAG};
use crate::io::{DatasetReader, DatasetRecord, DatasetWriter, Provenance};
use crate::rng::{derive_instance_rng, InstanceRng};
use crate::step::{make_step, MaskConfig, StepKind};
use crate::vocab::{Vocabulary, DEFAULT_VOCAB_SIZE};

/// Instances generated per parallel batch before writing.
pub const CHUNK_SIZE: usize = 4096;

/// Attempts at finding a usable supplied document for one instance.
pub const MAX_REAL_DOCUMENT_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TaskSelection {
    Step { kind: StepKind },
    Elementary { kind: ElementaryKind },
    Ensemble { config: EnsembleConfig },
}

impl TaskSelection {
    /// Task tag written to each record.
    pub fn tag(&self) -> String {
        match self {
            TaskSelection::Step { kind } => kind.tag().to_string(),
            TaskSelection::Elementary { kind } => kind.name().to_string(),
            TaskSelection::Ensemble { .. } => ENSEMBLE_TAG.to_string(),
        }
    }

    /// RNG stream id; distinct for every task so runs never share draws.
    pub fn stream_id(&self) -> String {
        match self {
            TaskSelection::Step { kind } => format!("step/{}", kind.tag()),
            TaskSelection::Elementary { kind } => format!("tasks/{}", kind.name()),
            TaskSelection::Ensemble { .. } => format!("tasks/{ENSEMBLE_TAG}"),
        }
    }

    pub fn default_policy(&self) -> DocPolicy {
        match self {
            TaskSelection::Step { .. } => DocPolicy::STEP,
            _ => DocPolicy::ELEMENTARY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub count: u64,
    pub task: TaskSelection,
    pub vocab_size: usize,
    pub mask: MaskConfig,
    pub scheme: KeywordScheme,
    /// Digest of supplied real documents, if any.
    pub documents_digest: Option<String>,
}

impl RunConfig {
    pub fn new(seed: u64, count: u64, task: TaskSelection) -> Self {
        RunConfig {
            seed,
            count,
            task,
            vocab_size: DEFAULT_VOCAB_SIZE,
            mask: MaskConfig::default(),
            scheme: KeywordScheme::default(),
            documents_digest: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if let TaskSelection::Ensemble { config } = &self.task {
            config.validate()?;
        }
        self.scheme.validate()?;
        self.mask.span_len(usize::MAX / 2).map(|_| ())
    }

    /// SHA-256 (hex) of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config always serializes");
        hex(&Sha256::digest(json))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Digest of a document list, recorded in the run configuration.
pub fn documents_digest(docs: &[Document]) -> String {
    let mut h = Sha256::new();
    for d in docs {
        h.update(d.to_string().as_bytes());
        h.update(b"\n");
    }
    hex(&h.finalize())
}

/// A prepared run: sampler, scheme and optional supplied documents.
pub struct Generator {
    config: RunConfig,
    digest: String,
    sampler: DocumentSampler,
    documents: Option<Arc<[Document]>>,
}

impl Generator {
    pub fn new(config: RunConfig) -> Result<Self> {
        Self::build(config, None)
    }

    /// Uses `documents` (scrubbed of reserved tokens) as base documents in
    /// place of sampled nonsense ones.
    pub fn with_documents(mut config: RunConfig, documents: Vec<Document>) -> Result<Self> {
        if documents.is_empty() {
            return Err(Error::invalid("no base documents supplied"));
        }
        let docs: Vec<Document> = documents.iter().map(|d| config.scheme.scrub(d)).collect();
        if docs.iter().any(Document::is_empty) {
            return Err(Error::invalid(
                "a supplied document is empty after scrubbing",
            ));
        }
        config.documents_digest = Some(documents_digest(&docs));
        Self::build(config, Some(docs.into()))
    }

    fn build(config: RunConfig, documents: Option<Arc<[Document]>>) -> Result<Self> {
        config.validate()?;
        let vocab = Vocabulary::new(config.vocab_size)?;
        let sampler = DocumentSampler::new(vocab, config.task.default_policy());
        Ok(Generator {
            digest: config.digest(),
            config,
            sampler,
            documents,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn instance(&self, index: u64) -> Result<TaskInstance> {
        let stream = self.config.task.stream_id();
        let mut rng = derive_instance_rng(self.config.seed, &stream, index);
        let id = format!("{}-{index:08}", self.config.task.tag());
        match &self.documents {
            None => self.sampled_instance(id, &mut rng),
            Some(docs) => self.supplied_instance(id, index, docs, &mut rng),
        }
    }

    fn sampled_instance(&self, id: String, rng: &mut InstanceRng) -> Result<TaskInstance> {
        let scheme = &self.config.scheme;
        Ok(match &self.config.task {
            TaskSelection::Step { kind } => {
                let doc = self.sampler.sample(rng)?;
                TaskInstance::from_step(id, make_step(*kind, rng, &doc, &self.config.mask)?)
            }
            TaskSelection::Elementary { kind } => TaskInstance::from_elementary(
                id,
                generate_elementary(*kind, rng, scheme, &self.sampler)?,
            ),
            TaskSelection::Ensemble { config } => {
                TaskInstance::from_ensemble(id, compose(rng, scheme, &self.sampler, config)?)
            }
        })
    }

    /// Instance `i` starts at supplied document `i mod n` and moves on to the
    /// following documents when one cannot host the task.
    fn supplied_instance(
        &self,
        id: String,
        index: u64,
        docs: &[Document],
        rng: &mut InstanceRng,
    ) -> Result<TaskInstance> {
        let ctx = TaskContext {
            vocab: &self.sampler.vocab,
            scheme: &self.config.scheme,
        };
        let kinds = match &self.config.task {
            TaskSelection::Ensemble { config } => config.sample_kinds(rng),
            _ => Vec::new(),
        };
        let mut last_err = None;
        for k in 0..MAX_REAL_DOCUMENT_ATTEMPTS.min(docs.len()) {
            let doc = docs[((index as usize) + k) % docs.len()].clone();
            let result = match &self.config.task {
                TaskSelection::Step { kind } => make_step(*kind, rng, &doc, &self.config.mask)
                    .map(|i| TaskInstance::from_step(id.clone(), i)),
                TaskSelection::Elementary { kind } => {
                    elementary_from_document(*kind, doc, rng, ctx)
                        .map(|i| TaskInstance::from_elementary(id.clone(), i))
                }
                TaskSelection::Ensemble { .. } => compose_on(&kinds, doc, rng, ctx)
                    .map(|i| TaskInstance::from_ensemble(id.clone(), i)),
            };
            match result {
                Ok(inst) => return Ok(inst),
                Err(e @ Error::InvalidInput(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::invalid("no supplied documents")))
    }

    pub fn record(&self, index: u64) -> Result<DatasetRecord> {
        let inst = self.instance(index)?;
        Ok(DatasetRecord::from_instance(
            &inst,
            &Provenance {
                seed: self.config.seed,
                stream: self.config.task.stream_id(),
                index,
                config_digest: self.digest.clone(),
            },
        ))
    }

    /// Generates instances `[start, end)` in parallel, returned in order.
    pub fn records(&self, start: u64, end: u64) -> Result<Vec<DatasetRecord>> {
        (start..end)
            .into_par_iter()
            .map(|i| self.record(i))
            .collect()
    }

    /// Writes the whole run to `out` plus a `<out>.config.json` sidecar.
    pub fn write(&self, out: impl AsRef<Path>) -> Result<RunSummary> {
        let out = out.as_ref();
        let started = Instant::now();
        let mut writer = DatasetWriter::create(out)?;
        let mut start = 0;
        while start < self.config.count {
            let end = (start + CHUNK_SIZE as u64).min(self.config.count);
            let lines: Vec<String> = (start..end)
                .into_par_iter()
                .map(|i| self.record(i).map(|r| r.to_json_line()))
                .collect::<Result<_>>()?;
            for line in &lines {
                writer.write_line(line)?;
            }
            start = end;
        }
        let records = writer.finish()?;
        let sidecar = sidecar_path(out);
        let json = serde_json::to_string_pretty(&serde_json::json!({
            "config_digest": self.digest,
            "config": self.config,
        }))
        .expect("config always serializes");
        std::fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))?;
        Ok(RunSummary {
            records,
            elapsed: started.elapsed(),
            config_digest: self.digest.clone(),
        })
    }
}

impl Generator {
    /// Regenerates every `every`-th instance and replays its checks.
    /// Returns the number of instances checked.
    pub fn spot_check(&self, every: u64) -> Result<usize> {
        let every = every.max(1);
        let indices: Vec<u64> = (0..self.config.count).step_by(every as usize).collect();
        indices.par_iter().try_for_each(|&i| {
            let inst = self.instance(i)?;
            check_instance(&inst, &self.config.scheme)
                .map_err(|e| Error::Consistency(format!("instance {}: {e}", inst.id)))
        })?;
        Ok(indices.len())
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.json");
    PathBuf::from(name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub records: usize,
    pub elapsed: Duration,
    pub config_digest: String,
}

impl RunSummary {
    pub fn per_second(&self) -> f64 {
        self.records as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyFailure {
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub total: usize,
    pub passed: usize,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn failed(&self) -> usize {
        self.total - self.passed
    }

    pub fn ok(&self) -> bool {
        self.total > 0 && self.failures.is_empty()
    }
}

/// Re-checks every record of a dataset file. Unreadable or malformed
/// records count as failures; only failing to open the file is an error.
pub fn verify_dataset(path: impl AsRef<Path>, scheme: &KeywordScheme) -> Result<VerifyReport> {
    let mut reader = DatasetReader::open(path)?;
    let mut report = VerifyReport::default();
    let mut batch: Vec<(usize, Result<DatasetRecord>)> = Vec::with_capacity(CHUNK_SIZE);
    loop {
        batch.clear();
        while batch.len() < CHUNK_SIZE {
            match reader.next() {
                Some(item) => batch.push((reader.line(), item)),
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Option<VerifyFailure>> = batch
            .par_iter()
            .map(|(line, item)| match item {
                Err(e) => Some(VerifyFailure {
                    line: *line,
                    id: None,
                    message: e.to_string(),
                }),
                Ok(rec) => rec
                    .to_instance()
                    .and_then(|inst| check_instance(&inst, scheme))
                    .err()
                    .map(|e| VerifyFailure {
                        line: *line,
                        id: Some(rec.id.clone()),
                        message: e.to_string(),
                    }),
            })
            .collect();
        report.total += results.len();
        for f in results {
            match f {
                None => report.passed += 1,
                Some(f) => report.failures.push(f),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_dataset;

    #[test]
    fn digest_is_stable_and_sensitive() {
        let a = RunConfig::new(1, 10, TaskSelection::Step { kind: StepKind::Sr });
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
        b.seed = 2;
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn zero_count_rejected() {
        let cfg = RunConfig::new(1, 0, TaskSelection::Step { kind: StepKind::Sr });
        assert!(matches!(Generator::new(cfg), Err(Error::Config(_))));
    }

    #[test]
    fn instances_depend_only_on_index() {
        let cfg = RunConfig::new(
            3,
            50,
            TaskSelection::Elementary {
                kind: ElementaryKind::CopyQuoted,
            },
        );
        let g = Generator::new(cfg).unwrap();
        let all = g.records(0, 50).unwrap();
        assert_eq!(g.record(37).unwrap(), all[37]);
        assert_eq!(all[5].id, "CopyQuoted-00000005");
    }

    #[test]
    fn write_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("d.jsonl");
        let cfg = RunConfig::new(
            5,
            200,
            TaskSelection::Ensemble {
                config: EnsembleConfig::default(),
            },
        );
        let g = Generator::new(cfg).unwrap();
        let summary = g.write(&out).unwrap();
        assert_eq!(summary.records, 200);
        assert!(sidecar_path(&out).exists());
        let report = verify_dataset(&out, &KeywordScheme::default()).unwrap();
        assert_eq!((report.total, report.passed), (200, 200));
        let recs = read_dataset(&out).unwrap();
        assert_eq!(recs[0].meta["config_digest"], g.digest());
    }

    #[test]
    fn supplied_documents() {
        let text = (0..400)
            .map(|i| format!("Word{i} alpha beta gamma delta epsilon."))
            .collect::<Vec<_>>()
            .join(" ");
        let docs = crate::io::ingest_text(&text, DocPolicy::ELEMENTARY, 0).unwrap();
        for task in [
            TaskSelection::Step {
                kind: StepKind::Nsg,
            },
            TaskSelection::Elementary {
                kind: ElementaryKind::CopyKwdOneSentence,
            },
            TaskSelection::Ensemble {
                config: EnsembleConfig::default(),
            },
        ] {
            let g = Generator::with_documents(RunConfig::new(1, 20, task), docs.clone()).unwrap();
            assert!(g.config().documents_digest.is_some());
            for i in 0..20 {
                let inst = g.instance(i).unwrap();
                check_instance(&inst, &g.config().scheme).unwrap();
            }
        }
    }
}
