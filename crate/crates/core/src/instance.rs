//! The unit written to datasets: id, task tag, source and target token
//! sequences, and the metadata needed to replay the task's checks.

use serde::{Deserialize, Serialize};

use crate::document::Document;
use crate::elementary::{compute_gold, ElementaryInstance, KeywordScheme, Oracle, TaskRecord};
use crate::ensemble::{segments_accepted, EnsembleInstance};
use crate::error::{Error, Result};
use crate::step::{verify_step, StepInstance, StepRecord};

pub const ENSEMBLE_TAG: &str = "ensemble";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TaskMeta {
    Step {
        record: StepRecord,
    },
    /// One record for a single elementary task, several for an ensemble.
    Elementary {
        records: Vec<TaskRecord>,
        segments: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskInstance {
    pub id: String,
    pub task: String,
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub meta: TaskMeta,
}

impl TaskInstance {
    pub fn from_step(id: impl Into<String>, inst: StepInstance) -> Self {
        TaskInstance {
            id: id.into(),
            task: inst.record.kind().tag().to_string(),
            source: inst.source,
            target: inst.target,
            meta: TaskMeta::Step {
                record: inst.record,
            },
        }
    }

    pub fn from_elementary(id: impl Into<String>, inst: ElementaryInstance) -> Self {
        TaskInstance {
            id: id.into(),
            task: inst.record.kind.name().to_string(),
            source: inst.document.to_tokens(),
            meta: TaskMeta::Elementary {
                segments: vec![inst.target.len()],
                records: vec![inst.record],
            },
            target: inst.target,
        }
    }

    pub fn from_ensemble(id: impl Into<String>, inst: EnsembleInstance) -> Self {
        TaskInstance {
            id: id.into(),
            task: ENSEMBLE_TAG.to_string(),
            source: inst.document.to_tokens(),
            target: inst.target,
            meta: TaskMeta::Elementary {
                records: inst.records,
                segments: inst.segments,
            },
        }
    }

    pub fn source_text(&self) -> String {
        self.source.join(" ")
    }

    pub fn target_text(&self) -> String {
        self.target.join(" ")
    }
}

/// Replays an instance's checks. For denoising tasks this reconstructs the
/// target from the source and record; for elementary and ensemble tasks the
/// target must split into segments each accepted by its task's oracle on
/// the source document.
pub fn check_instance(inst: &TaskInstance, scheme: &KeywordScheme) -> Result<()> {
    match &inst.meta {
        TaskMeta::Step { record } => verify_step(&inst.source, &inst.target, record),
        TaskMeta::Elementary { records, .. } => {
            if records.is_empty() {
                return Err(Error::Consistency("no task records".into()));
            }
            let doc = Document::from_tokens(&inst.source)?;
            let kinds: Vec<_> = records.iter().map(|r| r.kind).collect();
            if segments_accepted(&Oracle::new(scheme), &kinds, &doc, &inst.target) {
                Ok(())
            } else {
                Err(Error::Consistency(format!(
                    "target is not accepted for {}",
                    kinds
                        .iter()
                        .map(|k| k.name())
                        .collect::<Vec<_>>()
                        .join(" + ")
                )))
            }
        }
    }
}

pub fn verify_instance(inst: &TaskInstance, scheme: &KeywordScheme) -> bool {
    check_instance(inst, scheme).is_ok()
}

/// Rebuilds the gold target from the records alone, the path independent of
/// the oracle.
pub fn replay_gold(inst: &TaskInstance, scheme: &KeywordScheme) -> Result<Vec<String>> {
    match &inst.meta {
        TaskMeta::Step { .. } => Err(Error::invalid("denoising instances have no task records")),
        TaskMeta::Elementary { records, .. } => {
            let doc = Document::from_tokens(&inst.source)?;
            let mut out = Vec::new();
            for r in records {
                out.extend(compute_gold(r, &doc, scheme)?);
            }
            Ok(out)
        }
    }
}
