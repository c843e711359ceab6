//! ROUGE-1, ROUGE-2 and ROUGE-L over token sequences.
//!
//! F-measures use β = 1. When either side is empty (or too short to hold an
//! n-gram) every score is zero.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    #[serde(rename = "p")]
    pub precision: f64,
    #[serde(rename = "r")]
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    pub fn from_counts(matched: usize, candidate_total: usize, reference_total: usize) -> Self {
        if candidate_total == 0 || reference_total == 0 {
            return RougeScore::default();
        }
        let precision = matched as f64 / candidate_total as f64;
        let recall = matched as f64 / reference_total as f64;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        RougeScore {
            precision,
            recall,
            f1,
        }
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for w in tokens.windows(n) {
        *counts
            .entry(w.iter().map(AsRef::as_ref).collect())
            .or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram overlap.
pub fn rouge_n<S: AsRef<str>, T: AsRef<str>>(
    candidate: &[S],
    reference: &[T],
    n: usize,
) -> RougeScore {
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let matched = cand
        .iter()
        .map(|(g, &c)| c.min(refs.get(g).copied().unwrap_or(0)))
        .sum();
    RougeScore::from_counts(matched, cand.values().sum(), refs.values().sum())
}

/// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
pub fn lcs_len<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x.as_ref() == y.as_ref() {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn rouge_l<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> RougeScore {
    RougeScore::from_counts(
        lcs_len(candidate, reference),
        candidate.len(),
        reference.len(),
    )
}

/// How raw text is split into tokens before scoring.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tokenization {
    /// Lowercased whitespace tokens; right for nonsense text.
    #[default]
    Whitespace,
    /// Lowercased alphanumeric runs; punctuation is dropped.
    RealText,
}

impl Tokenization {
    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenization::Whitespace => text.split_whitespace().map(str::to_lowercase).collect(),
            Tokenization::RealText => text
                .split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(str::to_lowercase)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairScores {
    pub r1: RougeScore,
    pub r2: RougeScore,
    pub rl: RougeScore,
}

impl PairScores {
    pub fn score<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T]) -> Self {
        PairScores {
            r1: rouge_n(candidate, reference, 1),
            r2: rouge_n(candidate, reference, 2),
            rl: rouge_l(candidate, reference),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub beta: f64,
    pub tokenization: Tokenization,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RougeReport {
    /// Arithmetic means over pairs, per variant and component.
    pub mean: PairScores,
    pub per_pair: Vec<PairScores>,
    pub meta: ReportMeta,
}

fn mean_of(scores: impl Iterator<Item = RougeScore>, n: f64) -> RougeScore {
    let (p, r, f) = scores.fold((0.0, 0.0, 0.0), |(p, r, f), s| {
        (p + s.precision, r + s.recall, f + s.f1)
    });
    RougeScore {
        precision: p / n,
        recall: r / n,
        f1: f / n,
    }
}

/// Scores every `(candidate, reference)` pair and averages. Pairs are scored
/// in parallel; the reduction runs in input order.
pub fn corpus_rouge<S, T>(pairs: &[(S, T)], tokenization: Tokenization) -> Result<RougeReport>
where
    S: AsRef<[String]> + Sync,
    T: AsRef<[String]> + Sync,
{
    if pairs.is_empty() {
        return Err(Error::invalid("no pairs to score"));
    }
    let per_pair: Vec<PairScores> = pairs
        .par_iter()
        .map(|(c, r)| PairScores::score(c.as_ref(), r.as_ref()))
        .collect();
    let n = per_pair.len() as f64;
    let mean = PairScores {
        r1: mean_of(per_pair.iter().map(|s| s.r1), n),
        r2: mean_of(per_pair.iter().map(|s| s.r2), n),
        rl: mean_of(per_pair.iter().map(|s| s.rl), n),
    };
    Ok(RougeReport {
        mean,
        meta: ReportMeta {
            beta: 1.0,
            tokenization,
            pairs: per_pair.len(),
        },
        per_pair,
    })
}

/// Tokenizes aligned candidate and reference lines and scores them.
pub fn score_texts<S: AsRef<str>, T: AsRef<str>>(
    candidates: &[S],
    references: &[T],
    tokenization: Tokenization,
) -> Result<RougeReport> {
    if candidates.len() != references.len() {
        return Err(Error::invalid(format!(
            "{} candidates but {} references",
            candidates.len(),
            references.len()
        )));
    }
    let pairs: Vec<(Vec<String>, Vec<String>)> = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| {
            (
                tokenization.tokenize(c.as_ref()),
                tokenization.tokenize(r.as_ref()),
            )
        })
        .collect();
    corpus_rouge(&pairs, tokenization)
}

impl RougeReport {
    pub fn to_table(&self, with_pairs: bool) -> String {
        let mut out = String::new();
        let row = |out: &mut String, label: &str, s: &PairScores| {
            let _ = writeln!(
                out,
                "{label:>8} | {:.4} {:.4} {:.4} | {:.4} {:.4} {:.4} | {:.4} {:.4} {:.4}",
                s.r1.precision,
                s.r1.recall,
                s.r1.f1,
                s.r2.precision,
                s.r2.recall,
                s.r2.f1,
                s.rl.precision,
                s.rl.recall,
                s.rl.f1
            );
        };
        let _ = writeln!(
            out,
            "{:>8} | {:^20} | {:^20} | {:^20}",
            "", "ROUGE-1 (P R F1)", "ROUGE-2 (P R F1)", "ROUGE-L (P R F1)"
        );
        if with_pairs {
            for (i, s) in self.per_pair.iter().enumerate() {
                row(&mut out, &i.to_string(), s);
            }
        }
        row(&mut out, "mean", &self.mean);
        out
    }
}
