//! Real-text ingestion.
//!
//! Sentences end at any whitespace-delimited token that ends in `.`, `!` or
//! `?`; the final character becomes the sentence terminator. This naive rule
//! splits after abbreviations ("e.g.") and does not see terminators hidden
//! behind closing quotes or brackets. Text after the last terminator is
//! dropped. Words are kept verbatim otherwise, so every output token occurs
//! in the input.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::document::{is_terminator, DocPolicy, Document, LengthRange, Sentence};
use crate::error::{Error, Result};
use crate::rng::derive_instance_rng;

pub type IngestPolicy = DocPolicy;

const INGEST_STREAM: &str = "ingest";

pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut words: Vec<String> = Vec::new();
    for token in text.split_whitespace() {
        let Some(last) = token
            .chars()
            .last()
            .filter(|c| matches!(c, '.' | '!' | '?'))
        else {
            words.push(token.to_string());
            continue;
        };
        let word = &token[..token.len() - last.len_utf8()];
        if !word.is_empty() && !is_terminator(word) {
            words.push(word.to_string());
        }
        if !words.is_empty() {
            sentences.push(Sentence::with_terminator(
                std::mem::take(&mut words),
                last.to_string(),
            ));
        }
    }
    sentences
}

/// Groups sentences into documents. With `BySentences` each document takes
/// a uniformly drawn count (seeded per document index); with `ByTokens`
/// sentences accumulate until the budget is reached. A tail too short for
/// the policy is dropped.
pub fn assemble_documents(
    sentences: Vec<Sentence>,
    policy: DocPolicy,
    seed: u64,
) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    match policy {
        DocPolicy::BySentences { min, max } => {
            let range = LengthRange::new(min, max)?;
            let mut rest = sentences.into_iter();
            let mut remaining = rest.len();
            while remaining >= min {
                let mut rng = derive_instance_rng(seed, INGEST_STREAM, docs.len() as u64);
                let take = range.sample(&mut rng).min(remaining);
                docs.push(Document::new(rest.by_ref().take(take).collect()));
                remaining -= take;
            }
        }
        DocPolicy::ByTokens { budget } => {
            if budget == 0 {
                return Err(Error::invalid("token budget must be positive"));
            }
            let mut doc = Document::default();
            let mut count = 0;
            for s in sentences {
                count += s.token_count();
                doc.sentences.push(s);
                if count >= budget {
                    docs.push(std::mem::take(&mut doc));
                    count = 0;
                }
            }
        }
    }
    Ok(docs)
}

pub fn ingest_text(text: &str, policy: DocPolicy, seed: u64) -> Result<Vec<Document>> {
    assemble_documents(split_sentences(text), policy, seed)
}

/// Reads a plain-text file (one paragraph per line or continuous text) and
/// assembles documents.
pub fn ingest_real_corpus(
    path: impl AsRef<Path>,
    policy: DocPolicy,
    seed: u64,
) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim().is_empty() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, "input text is empty"),
        ));
    }
    ingest_text(&text, policy, seed)
}

/// Writes documents one per line, tokens separated by single spaces.
pub fn write_documents(docs: &[Document], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for d in docs {
        writeln!(out, "{d}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_documents(path: impl AsRef<Path>) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = Document::from_text(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting() {
        let s = split_sentences("Hello there. How are you?\nFine!  trailing words");
        assert_eq!(s.len(), 3);
        assert_eq!(s[0].words, ["Hello", "there"]);
        assert_eq!(s[1].terminator, "?");
        assert_eq!(s[2].to_string(), "Fine !");
    }

    #[test]
    fn punctuation_only_tokens() {
        let s = split_sentences("a b . .. c ?! d.");
        let text: Vec<String> = s.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["a b .", "c !", "d ."]);
    }

    #[test]
    fn twenty_sentences_by_count() {
        let text = (0..20)
            .map(|i| format!("w{i} x{i}."))
            .collect::<Vec<_>>()
            .join(" ");
        for seed in 0..50 {
            let docs = ingest_text(&text, DocPolicy::ELEMENTARY, seed).unwrap();
            assert!((1..=2).contains(&docs.len()));
            assert!(docs.iter().all(|d| (7..=13).contains(&d.len())));
        }
    }

    #[test]
    fn short_tail_dropped() {
        assert!(ingest_text("a b c .", DocPolicy::STEP, 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn by_tokens_reaches_budget() {
        let text = (0..100)
            .map(|i| format!("w{i} x y z."))
            .collect::<Vec<_>>()
            .join(" ");
        let docs = ingest_text(&text, DocPolicy::ByTokens { budget: 32 }, 0).unwrap();
        assert_eq!(docs.len(), 14); // 5 tokens per sentence, 7 sentences per doc
        assert!(docs.iter().all(|d| d.token_count() >= 32));
    }

    #[test]
    fn documents_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("docs.txt");
        let docs = ingest_text(
            "One two! Three four? Five six. Seven. Eight nine ten. a. b. c. d.",
            DocPolicy::BySentences { min: 2, max: 3 },
            1,
        )
        .unwrap();
        write_documents(&docs, &path).unwrap();
        assert_eq!(read_documents(&path).unwrap(), docs);
    }

    #[test]
    fn empty_input_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        std::fs::write(&path, "  \n").unwrap();
        assert!(matches!(
            ingest_real_corpus(&path, DocPolicy::STEP, 0),
            Err(Error::Io { .. })
        ));
        assert!(ingest_real_corpus(dir.path().join("missing"), DocPolicy::STEP, 0).is_err());
    }
}
