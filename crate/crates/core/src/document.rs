//! Sentences, documents and the nonsense samplers.
//!
//! A token is a whitespace-delimited unit. Every sentence ends with its own
//! terminator token, so a document's token count is the sum of
//! `words + 1` over its sentences.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::Vocabulary;

pub const PERIOD: &str = ".";

/// Tokens that close a sentence when a token stream is split back into
/// sentences.
pub const TERMINATORS: [&str; 3] = [".", "!", "?"];

pub fn is_terminator(token: &str) -> bool {
    TERMINATORS.contains(&token)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence {
    pub words: Vec<String>,
    pub terminator: String,
}

impl Sentence {
    pub fn new(words: Vec<String>) -> Self {
        Sentence {
            words,
            terminator: PERIOD.to_string(),
        }
    }

    pub fn with_terminator(words: Vec<String>, terminator: impl Into<String>) -> Self {
        Sentence {
            words,
            terminator: terminator.into(),
        }
    }

    pub fn token_count(&self) -> usize {
        self.words.len() + 1
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.words
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.terminator.as_str()))
    }

    pub fn to_tokens(&self) -> Vec<String> {
        self.tokens().map(str::to_string).collect()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.iter().any(|w| w == token)
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for w in &self.words {
            write!(f, "{w} ")?;
        }
        f.write_str(&self.terminator)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        Document { sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::token_count).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.sentences.iter().flat_map(Sentence::tokens)
    }

    pub fn to_tokens(&self) -> Vec<String> {
        self.tokens().map(str::to_string).collect()
    }

    /// Splits a token stream into sentences at terminator tokens.
    ///
    /// Fails if tokens trail after the last terminator.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        let mut sentences = Vec::new();
        let mut words = Vec::new();
        for t in tokens {
            let t = t.as_ref();
            if is_terminator(t) {
                sentences.push(Sentence::with_terminator(std::mem::take(&mut words), t));
            } else {
                words.push(t.to_string());
            }
        }
        if !words.is_empty() {
            return Err(Error::invalid(format!(
                "{} token(s) after the last sentence terminator",
                words.len()
            )));
        }
        Ok(Document { sentences })
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        Self::from_tokens(&tokens)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sentences.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Inclusive bounds on words per sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthRange {
    pub min: usize,
    pub max: usize,
}

impl LengthRange {
    pub const SENTENCE_WORDS: LengthRange = LengthRange { min: 5, max: 15 };
    pub const DOCUMENT_SENTENCES: LengthRange = LengthRange { min: 7, max: 13 };

    pub fn new(min: usize, max: usize) -> Result<Self> {
        let r = LengthRange { min, max };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min == 0 || self.min > self.max {
            return Err(Error::invalid(format!(
                "length range {}..={} must satisfy 1 <= min <= max",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

/// How many sentences a sampled document gets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "policy")]
pub enum DocPolicy {
    /// Uniform sentence count, used for the elementary tasks.
    BySentences { min: usize, max: usize },
    /// Append sentences until the token budget is reached or exceeded, used
    /// for the denoising tasks.
    ByTokens { budget: usize },
}

impl DocPolicy {
    pub const ELEMENTARY: DocPolicy = DocPolicy::BySentences { min: 7, max: 13 };
    pub const STEP: DocPolicy = DocPolicy::ByTokens { budget: 512 };
}

pub fn sample_sentence<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    lengths: LengthRange,
) -> Result<Sentence> {
    if vocab.is_empty() {
        return Err(Error::invalid("empty vocabulary"));
    }
    lengths.validate()?;
    let n = lengths.sample(rng);
    let words = vocab.words();
    let sentence = (0..n)
        .map(|_| words[rng.random_range(0..words.len())].clone())
        .collect();
    Ok(Sentence::new(sentence))
}

pub fn sample_document_by_sentences<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    lengths: LengthRange,
    sentences: LengthRange,
) -> Result<Document> {
    sentences.validate()?;
    let n = sentences.sample(rng);
    let sentences = (0..n)
        .map(|_| sample_sentence(rng, vocab, lengths))
        .collect::<Result<_>>()?;
    Ok(Document::new(sentences))
}

/// Samples sentences until the document holds at least `budget` tokens.
/// The overshoot is at most `lengths.max` tokens.
pub fn sample_document_by_tokens<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    lengths: LengthRange,
    budget: usize,
) -> Result<Document> {
    lengths.validate()?;
    if budget < lengths.max + 1 {
        return Err(Error::invalid(format!(
            "token budget {budget} is smaller than one maximal sentence ({} tokens)",
            lengths.max + 1
        )));
    }
    let mut doc = Document::default();
    let mut count = 0;
    while count < budget {
        let s = sample_sentence(rng, vocab, lengths)?;
        count += s.token_count();
        doc.sentences.push(s);
    }
    Ok(doc)
}

/// Vocabulary plus sentence-length bounds: everything needed to draw base
/// documents.
#[derive(Debug, Clone)]
pub struct DocumentSampler {
    pub vocab: Vocabulary,
    pub lengths: LengthRange,
    pub policy: DocPolicy,
}

impl DocumentSampler {
    pub fn new(vocab: Vocabulary, policy: DocPolicy) -> Self {
        DocumentSampler {
            vocab,
            lengths: LengthRange::SENTENCE_WORDS,
            policy,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Document> {
        match self.policy {
            DocPolicy::BySentences { min, max } => sample_document_by_sentences(
                rng,
                &self.vocab,
                self.lengths,
                LengthRange { min, max },
            ),
            DocPolicy::ByTokens { budget } => {
                sample_document_by_tokens(rng, &self.vocab, self.lengths, budget)
            }
        }
    }
}
