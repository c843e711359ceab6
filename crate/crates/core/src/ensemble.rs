//! Composite pretraining pairs: several elementary tasks planted into one
//! document, their gold summaries concatenated in the order applied.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::document::{Document, DocumentSampler};
use crate::elementary::{
    apply_modification_in, compute_gold, ElementaryKind, KeywordScheme, Oracle, TaskContext,
    TaskRecord,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub eligible_kinds: BTreeSet<ElementaryKind>,
    pub tasks_per_instance: usize,
    pub replacement: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            eligible_kinds: ElementaryKind::ALL
                .into_iter()
                .filter(|k| k.ensemble_eligible())
                .collect(),
            tasks_per_instance: 3,
            replacement: false,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tasks_per_instance == 0 {
            return Err(Error::Config(
                "tasks_per_instance must be at least 1".into(),
            ));
        }
        if self.eligible_kinds.is_empty() {
            return Err(Error::Config("no eligible task kinds".into()));
        }
        if !self.replacement && self.tasks_per_instance > self.eligible_kinds.len() {
            return Err(Error::Config(format!(
                "cannot draw {} distinct kinds from {} eligible",
                self.tasks_per_instance,
                self.eligible_kinds.len()
            )));
        }
        Ok(())
    }

    pub fn sample_kinds<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<ElementaryKind> {
        let pool: Vec<ElementaryKind> = self.eligible_kinds.iter().copied().collect();
        if self.replacement {
            (0..self.tasks_per_instance)
                .map(|_| pool[rng.random_range(0..pool.len())])
                .collect()
        } else {
            index::sample(rng, pool.len(), self.tasks_per_instance)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleInstance {
    pub document: Document,
    pub target: Vec<String>,
    /// One record per task, in applied order.
    pub records: Vec<TaskRecord>,
    /// Token length of each task's gold segment within `target`.
    pub segments: Vec<usize>,
}

impl EnsembleInstance {
    pub fn kinds(&self) -> Vec<ElementaryKind> {
        self.records.iter().map(|r| r.kind).collect()
    }
}

/// Base documents tried before giving up on a draw of kinds.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;

/// Plants `kinds` in order into `doc`, each into sentences no earlier task
/// used, and concatenates the gold summaries.
pub fn compose_on<R: Rng + ?Sized>(
    kinds: &[ElementaryKind],
    mut doc: Document,
    rng: &mut R,
    ctx: TaskContext<'_>,
) -> Result<EnsembleInstance> {
    let mut available: BTreeSet<usize> = (0..doc.len()).collect();
    let mut records = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let record = apply_modification_in(kind, &mut doc, rng, ctx, &available)?;
        for s in &record.sentences {
            available.remove(s);
        }
        records.push(record);
    }
    let mut target = Vec::new();
    let mut segments = Vec::with_capacity(records.len());
    for r in &records {
        let gold = compute_gold(r, &doc, ctx.scheme)?;
        segments.push(gold.len());
        target.extend(gold);
    }
    Ok(EnsembleInstance {
        document: doc,
        target,
        records,
        segments,
    })
}

/// Samples kinds and a base document and composes them; when the document
/// has no room for all kinds, a fresh document is drawn.
pub fn compose<R: Rng + ?Sized>(
    rng: &mut R,
    scheme: &KeywordScheme,
    sampler: &DocumentSampler,
    cfg: &EnsembleConfig,
) -> Result<EnsembleInstance> {
    cfg.validate()?;
    let ctx = TaskContext {
        vocab: &sampler.vocab,
        scheme,
    };
    let kinds = cfg.sample_kinds(rng);
    let mut last_err = None;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let doc = sampler.sample(rng)?;
        match compose_on(&kinds, doc, rng, ctx) {
            Ok(inst) => return Ok(inst),
            Err(e @ Error::InvalidInput(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::invalid("no placement attempts")))
}

/// True iff `candidate` splits into consecutive segments, the i-th accepted
/// by the oracle for `kinds[i]` on `doc`.
pub fn segments_accepted(
    oracle: &Oracle<'_>,
    kinds: &[ElementaryKind],
    doc: &Document,
    candidate: &[String],
) -> bool {
    let sets: Vec<Vec<Vec<String>>> = kinds
        .iter()
        .map(|&k| oracle.acceptance_set(k, doc))
        .collect();
    split_matches(&sets, candidate)
}

fn split_matches(sets: &[Vec<Vec<String>>], candidate: &[String]) -> bool {
    match sets.split_first() {
        None => candidate.is_empty(),
        Some((first, rest)) => first.iter().any(|option| {
            candidate.starts_with(option) && split_matches(rest, &candidate[option.len()..])
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn default_config() {
        let cfg = EnsembleConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.eligible_kinds.len(), 16);
        for k in ElementaryKind::ENSEMBLE_EXCLUDED {
            assert!(!cfg.eligible_kinds.contains(&k));
        }
    }

    #[test]
    fn too_few_kinds() {
        let cfg = EnsembleConfig {
            eligible_kinds: [ElementaryKind::CopyQuoted, ElementaryKind::BreakClauses].into(),
            ..EnsembleConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let with = EnsembleConfig {
            replacement: true,
            ..cfg
        };
        with.validate().unwrap();
    }

    #[test]
    fn hand_composed_segments() {
        let scheme = KeywordScheme::default();
        let oracle = Oracle::new(&scheme);
        let doc = Document::from_text(
            "aaa \" baa caa \" daa . eaa keyword7 faa . gaa maxnum 7 haa maxnum 40 . iaa .",
        )
        .unwrap();
        let kinds = [
            ElementaryKind::CopyQuoted,
            ElementaryKind::CopyKwdOneSentence,
            ElementaryKind::LargestNumber,
        ];
        let gold = toks("baa caa . eaa keyword7 faa . 40 .");
        assert!(segments_accepted(&oracle, &kinds, &doc, &gold));
        let swapped = toks("eaa keyword7 faa . baa caa . 40 .");
        assert!(!segments_accepted(&oracle, &kinds, &doc, &swapped));
        let digit = toks("baa caa . eaa keyword7 faa . 41 .");
        assert!(!segments_accepted(&oracle, &kinds, &doc, &digit));
        let truncated = toks("baa caa . eaa keyword7 faa .");
        assert!(!segments_accepted(&oracle, &kinds, &doc, &truncated));
    }
}
