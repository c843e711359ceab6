//! Denoising pretraining tasks: next sentence generation, sentence
//! reordering and masked document generation, plus the two "adjusted"
//! variants that drop the copying component from the target.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::document::{Document, Sentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Nsg,
    Sr,
    SrAdjusted,
    Mdg,
    MdgAdjusted,
}

impl StepKind {
    pub const ALL: [StepKind; 5] = [
        StepKind::Nsg,
        StepKind::Sr,
        StepKind::SrAdjusted,
        StepKind::Mdg,
        StepKind::MdgAdjusted,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            StepKind::Nsg => "nsg",
            StepKind::Sr => "sr",
            StepKind::SrAdjusted => "sr_adjusted",
            StepKind::Mdg => "mdg",
            StepKind::MdgAdjusted => "mdg_adjusted",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for StepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        StepKind::ALL
            .into_iter()
            .find(|k| k.tag() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown denoising task kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub mask_fraction: f64,
    pub mask_token: String,
    /// Replace every masked token with the mask token (length preserving)
    /// instead of collapsing the span into a single mask token.
    pub per_token: bool,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig {
            mask_fraction: 0.15,
            mask_token: "[MASK]".to_string(),
            per_token: true,
        }
    }
}

impl MaskConfig {
    /// Masked span length for a document of `token_count` tokens.
    pub fn span_len(&self, token_count: usize) -> Result<usize> {
        if !(self.mask_fraction > 0.0 && self.mask_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "mask fraction {} outside (0, 1)",
                self.mask_fraction
            )));
        }
        if self.mask_token.is_empty() || self.mask_token.contains(char::is_whitespace) {
            return Err(Error::invalid(
                "mask token must be a single non-empty token",
            ));
        }
        let len = ((self.mask_fraction * token_count as f64).round() as usize).max(1);
        if len >= token_count {
            return Err(Error::invalid(format!(
                "mask span of {len} tokens covers the whole {token_count}-token document"
            )));
        }
        Ok(len)
    }
}

/// What is needed to check a denoising instance after the fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepRecord {
    Nsg {
        /// Number of sentences in the source half.
        split: usize,
        sentences: usize,
    },
    Sr {
        /// `permutation[k]` is the original index of the k-th source sentence.
        permutation: Vec<usize>,
    },
    SrAdjusted {
        permutation: Vec<usize>,
    },
    Mdg {
        start: usize,
        len: usize,
        per_token: bool,
        mask_token: String,
    },
    MdgAdjusted {
        start: usize,
        len: usize,
        per_token: bool,
        mask_token: String,
    },
}

impl StepRecord {
    pub fn kind(&self) -> StepKind {
        match self {
            StepRecord::Nsg { .. } => StepKind::Nsg,
            StepRecord::Sr { .. } => StepKind::Sr,
            StepRecord::SrAdjusted { .. } => StepKind::SrAdjusted,
            StepRecord::Mdg { .. } => StepKind::Mdg,
            StepRecord::MdgAdjusted { .. } => StepKind::MdgAdjusted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepInstance {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub record: StepRecord,
}

fn require_sentences(doc: &Document, what: &str) -> Result<()> {
    if doc.len() < 2 {
        return Err(Error::invalid(format!(
            "{what} needs at least 2 sentences, document has {}",
            doc.len()
        )));
    }
    Ok(())
}

fn flatten<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> Vec<String> {
    sentences
        .into_iter()
        .flat_map(Sentence::to_tokens)
        .collect()
}

/// Sentence boundary whose cumulative token count is closest to half the
/// document; ties go to the earlier boundary. Returns the number of
/// sentences in the first part.
pub fn nsg_split_point(doc: &Document) -> Result<usize> {
    require_sentences(doc, "next sentence generation")?;
    let total = doc.token_count();
    let mut best = (usize::MAX, 1);
    let mut cumulative = 0;
    for (k, s) in doc.sentences[..doc.len() - 1].iter().enumerate() {
        cumulative += s.token_count();
        // compare 2*c against total to stay in integers
        let dist = (2 * cumulative).abs_diff(total);
        if dist < best.0 {
            best = (dist, k + 1);
        }
    }
    Ok(best.1)
}

pub fn make_nsg(doc: &Document) -> Result<StepInstance> {
    let split = nsg_split_point(doc)?;
    Ok(StepInstance {
        source: flatten(&doc.sentences[..split]),
        target: flatten(&doc.sentences[split..]),
        record: StepRecord::Nsg {
            split,
            sentences: doc.len(),
        },
    })
}

/// Uniform permutation of `0..n`, resampled while it is the identity.
pub fn non_identity_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        perm.shuffle(rng);
        if n < 2 || perm.iter().enumerate().any(|(i, &p)| i != p) {
            return perm;
        }
    }
}

fn shuffled(doc: &Document, permutation: &[usize]) -> Vec<String> {
    flatten(permutation.iter().map(|&i| &doc.sentences[i]))
}

pub fn make_sr<R: Rng + ?Sized>(rng: &mut R, doc: &Document) -> Result<StepInstance> {
    require_sentences(doc, "sentence reordering")?;
    let permutation = non_identity_permutation(rng, doc.len());
    Ok(StepInstance {
        source: shuffled(doc, &permutation),
        target: doc.to_tokens(),
        record: StepRecord::Sr { permutation },
    })
}

/// 1-based indices `j` such that `shuffled[j_k - 1]` is the k-th original
/// sentence.
pub fn copy_order(permutation: &[usize]) -> Vec<usize> {
    let mut order = vec![0; permutation.len()];
    for (pos, &orig) in permutation.iter().enumerate() {
        order[orig] = pos + 1;
    }
    order
}

pub fn make_sr_adjusted<R: Rng + ?Sized>(rng: &mut R, doc: &Document) -> Result<StepInstance> {
    require_sentences(doc, "sentence reordering")?;
    let permutation = non_identity_permutation(rng, doc.len());
    Ok(StepInstance {
        source: shuffled(doc, &permutation),
        target: copy_order(&permutation)
            .into_iter()
            .map(|j| j.to_string())
            .collect(),
        record: StepRecord::SrAdjusted { permutation },
    })
}

fn masked_source(tokens: &[String], start: usize, len: usize, cfg: &MaskConfig) -> Vec<String> {
    let mut source = Vec::with_capacity(tokens.len());
    source.extend_from_slice(&tokens[..start]);
    if cfg.per_token {
        source.extend(std::iter::repeat_n(cfg.mask_token.clone(), len));
    } else {
        source.push(cfg.mask_token.clone());
    }
    source.extend_from_slice(&tokens[start + len..]);
    source
}

fn sample_span<R: Rng + ?Sized>(
    rng: &mut R,
    doc: &Document,
    cfg: &MaskConfig,
) -> Result<(Vec<String>, usize, usize)> {
    let tokens = doc.to_tokens();
    let len = cfg.span_len(tokens.len())?;
    if tokens.contains(&cfg.mask_token) {
        return Err(Error::invalid(format!(
            "document already contains the mask token `{}`",
            cfg.mask_token
        )));
    }
    let start = rng.random_range(0..=tokens.len() - len);
    Ok((tokens, start, len))
}

pub fn make_mdg<R: Rng + ?Sized>(
    rng: &mut R,
    doc: &Document,
    cfg: &MaskConfig,
) -> Result<StepInstance> {
    let (tokens, start, len) = sample_span(rng, doc, cfg)?;
    Ok(StepInstance {
        source: masked_source(&tokens, start, len, cfg),
        target: tokens,
        record: StepRecord::Mdg {
            start,
            len,
            per_token: cfg.per_token,
            mask_token: cfg.mask_token.clone(),
        },
    })
}

pub fn make_mdg_adjusted<R: Rng + ?Sized>(
    rng: &mut R,
    doc: &Document,
    cfg: &MaskConfig,
) -> Result<StepInstance> {
    let (tokens, start, len) = sample_span(rng, doc, cfg)?;
    Ok(StepInstance {
        source: masked_source(&tokens, start, len, cfg),
        target: tokens[start..start + len].to_vec(),
        record: StepRecord::MdgAdjusted {
            start,
            len,
            per_token: cfg.per_token,
            mask_token: cfg.mask_token.clone(),
        },
    })
}

pub fn make_step<R: Rng + ?Sized>(
    kind: StepKind,
    rng: &mut R,
    doc: &Document,
    cfg: &MaskConfig,
) -> Result<StepInstance> {
    match kind {
        StepKind::Nsg => make_nsg(doc),
        StepKind::Sr => make_sr(rng, doc),
        StepKind::SrAdjusted => make_sr_adjusted(rng, doc),
        StepKind::Mdg => make_mdg(rng, doc, cfg),
        StepKind::MdgAdjusted => make_mdg_adjusted(rng, doc, cfg),
    }
}

/// Puts shuffled sentences back in original order.
pub fn unshuffle(source: &[String], permutation: &[usize]) -> Result<Vec<String>> {
    let doc = Document::from_tokens(source)?;
    if doc.len() != permutation.len() {
        return Err(Error::Consistency(format!(
            "source has {} sentences, permutation has {}",
            doc.len(),
            permutation.len()
        )));
    }
    let mut slots: Vec<Option<&Sentence>> = vec![None; doc.len()];
    for (s, &orig) in doc.sentences.iter().zip(permutation) {
        match slots.get_mut(orig) {
            Some(slot @ None) => *slot = Some(s),
            _ => return Err(Error::Consistency("permutation is not a bijection".into())),
        }
    }
    Ok(flatten(slots.into_iter().map(|s| s.expect("bijection"))))
}

/// Copies shuffled sentences in the order given by 1-based indices.
pub fn apply_copy_order<S: AsRef<str>>(source: &[String], order: &[S]) -> Result<Vec<String>> {
    let doc = Document::from_tokens(source)?;
    let mut seen = vec![false; doc.len()];
    let mut out = Vec::new();
    for j in order {
        let j: usize = j
            .as_ref()
            .parse()
            .map_err(|_| Error::Consistency(format!("`{}` is not an index", j.as_ref())))?;
        if j == 0 || j > doc.len() || std::mem::replace(&mut seen[j - 1], true) {
            return Err(Error::Consistency(format!("index {j} invalid or repeated")));
        }
        out.extend(doc.sentences[j - 1].to_tokens());
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Consistency(
            "copy order does not cover every sentence".into(),
        ));
    }
    Ok(out)
}

/// Fills the mask positions of `source` with `span`.
pub fn splice_span(
    source: &[String],
    span: &[String],
    start: usize,
    per_token: bool,
) -> Result<Vec<String>> {
    let width = if per_token { span.len() } else { 1 };
    if start + width > source.len() {
        return Err(Error::Consistency("mask span runs past the source".into()));
    }
    let mut out = Vec::with_capacity(source.len() - width + span.len());
    out.extend_from_slice(&source[..start]);
    out.extend_from_slice(span);
    out.extend_from_slice(&source[start + width..]);
    Ok(out)
}

/// Maximal runs `(start, len)` of `token` in `tokens`.
pub fn runs_of(tokens: &[String], token: &str) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == token {
            let start = i;
            while i < tokens.len() && tokens[i] == token {
                i += 1;
            }
            runs.push((start, i - start));
        } else {
            i += 1;
        }
    }
    runs
}

/// Checks a denoising instance from its source, target and record alone.
pub fn verify_step(source: &[String], target: &[String], record: &StepRecord) -> Result<()> {
    let fail = |msg: String| Err(Error::Consistency(msg));
    match record {
        StepRecord::Nsg { split, sentences } => {
            let src = Document::from_tokens(source)?;
            let tgt = Document::from_tokens(target)?;
            if src.is_empty() || tgt.is_empty() {
                return fail("empty half".into());
            }
            if src.len() != *split || src.len() + tgt.len() != *sentences {
                return fail(format!(
                    "halves have {}+{} sentences, record says {split} of {sentences}",
                    src.len(),
                    tgt.len()
                ));
            }
            let whole = Document::new([src.sentences, tgt.sentences].concat());
            if nsg_split_point(&whole)? != *split {
                return fail("split is not at the token-balanced boundary".into());
            }
            Ok(())
        }
        StepRecord::Sr { permutation } => {
            if unshuffle(source, permutation)? != target {
                return fail("unshuffled source differs from target".into());
            }
            Ok(())
        }
        StepRecord::SrAdjusted { permutation } => {
            let expected: Vec<String> = copy_order(permutation)
                .iter()
                .map(usize::to_string)
                .collect();
            if expected != target {
                return fail("copy order does not invert the shuffle".into());
            }
            // the order must reference every source sentence exactly once
            apply_copy_order(source, target)?;
            Ok(())
        }
        StepRecord::Mdg {
            start,
            len,
            per_token,
            mask_token,
        } => {
            let width = if *per_token { *len } else { 1 };
            if runs_of(source, mask_token) != [(*start, width)] {
                return fail("mask run does not match the record".into());
            }
            if source.len() + len - width != target.len() {
                return fail("source and target lengths disagree".into());
            }
            let tail = start + width;
            let tgt_tail = start + len;
            if source[..*start] != target[..*start] || source[tail..] != target[tgt_tail..] {
                return fail("unmasked tokens differ from the target".into());
            }
            Ok(())
        }
        StepRecord::MdgAdjusted {
            start,
            len,
            per_token,
            mask_token,
        } => {
            let width = if *per_token { *len } else { 1 };
            if runs_of(source, mask_token) != [(*start, width)] {
                return fail("mask run does not match the record".into());
            }
            if target.len() != *len {
                return fail(format!(
                    "target has {} tokens, span has {len}",
                    target.len()
                ));
            }
            Ok(())
        }
    }
}
