//! The 21 elementary summarization subtasks.
//!
//! Each task has three parts that are kept apart on purpose:
//!
//! * [`apply_modification`] plants the task's trigger material into a
//!   document and returns a [`TaskRecord`] describing what it did;
//! * [`compute_gold`] turns the record and the modified document into the
//!   gold summary;
//! * [`Oracle`] decides whether a candidate summary is acceptable by
//!   rescanning the document for trigger tokens, without looking at the
//!   record.

mod gold;
mod kind;
mod modify;
mod oracle;
mod scheme;

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use gold::compute_gold;
pub use kind::ElementaryKind;
pub use modify::{apply_modification, apply_modification_in};
pub use oracle::{integer_after, Oracle};
pub use scheme::{
    Answers, KeywordClass, KeywordPools, KeywordScheme, Markers, NumberScheme, SynonymEntry,
    MAX_MARKED_SENTENCES,
};

use crate::document::{Document, DocumentSampler};
use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

/// Vocabulary and keyword scheme shared by every task.
#[derive(Debug, Clone, Copy)]
pub struct TaskContext<'a> {
    pub vocab: &'a Vocabulary,
    pub scheme: &'a KeywordScheme,
}

/// One token inserted by a modification. `position` is its word index in
/// the modified sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Planted {
    pub sentence: usize,
    pub position: usize,
    pub token: String,
}

/// Task-specific values chosen while planting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskParams {
    /// Nothing beyond the claimed sentences.
    Copy,
    Check {
        present: bool,
        keyword: Option<String>,
    },
    Classify {
        keyword: String,
        class: String,
    },
    Majority {
        keywords: Vec<String>,
        counts: Vec<usize>,
    },
    /// Quoted span as word indices of the modified sentence, quotes excluded.
    Quoted {
        start: usize,
        len: usize,
    },
    /// One keyword per claimed sentence, aligned with `TaskRecord::sentences`.
    Keywords {
        keywords: Vec<String>,
    },
    /// Marked sentences plus the order the gold copies them in.
    Shuffled {
        keywords: Vec<String>,
        order: Vec<usize>,
    },
    Replace {
        keyword: String,
        label: String,
    },
    Numbers {
        values: Vec<i64>,
    },
    Cutoff {
        position: usize,
    },
    Clauses {
        lengths: Vec<usize>,
    },
    Paraphrase {
        keyword: String,
        synonym: String,
    },
}

/// What a modification did: enough to rebuild the gold summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub kind: ElementaryKind,
    /// Sentences the task planted into or reads from, ascending.
    pub sentences: Vec<usize>,
    pub planted: Vec<Planted>,
    pub params: TaskParams,
}

/// A single-task pair: modified document plus gold summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryInstance {
    pub document: Document,
    pub target: Vec<String>,
    pub record: TaskRecord,
}

/// Attempts at drawing a base document large enough for the task.
pub const MAX_DOCUMENT_ATTEMPTS: usize = 100;

/// Samples a base document, plants `kind` into it and builds the gold.
pub fn generate_elementary<R: Rng + ?Sized>(
    kind: ElementaryKind,
    rng: &mut R,
    scheme: &KeywordScheme,
    sampler: &DocumentSampler,
) -> Result<ElementaryInstance> {
    let ctx = TaskContext {
        vocab: &sampler.vocab,
        scheme,
    };
    let mut last_err = None;
    for _ in 0..MAX_DOCUMENT_ATTEMPTS {
        let doc = sampler.sample(rng)?;
        match elementary_from_document(kind, doc, rng, ctx) {
            Ok(inst) => return Ok(inst),
            Err(e @ Error::InvalidInput(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::invalid("no document attempts")))
}

/// Plants `kind` into a given base document (nonsense or real text).
pub fn elementary_from_document<R: Rng + ?Sized>(
    kind: ElementaryKind,
    mut doc: Document,
    rng: &mut R,
    ctx: TaskContext<'_>,
) -> Result<ElementaryInstance> {
    let available: BTreeSet<usize> = (0..doc.len()).collect();
    let record = apply_modification_in(kind, &mut doc, rng, ctx, &available)?;
    let target = compute_gold(&record, &doc, ctx.scheme)?;
    Ok(ElementaryInstance {
        document: doc,
        target,
        record,
    })
}
