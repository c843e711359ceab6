//! Reserved trigger tokens planted into documents, plus the answer tokens
//! that appear in gold summaries.
//!
//! A scheme is loaded from TOML. Every section is optional; missing sections
//! fall back to the built-in defaults. See `schemes/default.toml` at the
//! repository root for the full format.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::document::{is_terminator, Document};
use crate::elementary::ElementaryKind;
use crate::error::{Error, Result};
use crate::vocab::is_vocabulary_shaped;

/// A labelled set of member keywords.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordClass {
    pub label: String,
    pub members: Vec<String>,
}

impl KeywordClass {
    fn numbered(label: &str, prefix: &str, range: std::ops::RangeInclusive<usize>) -> Self {
        KeywordClass {
            label: label.to_string(),
            members: range.map(|i| format!("{prefix}{i}")).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymEntry {
    pub source: String,
    pub synonyms: Vec<String>,
}

/// Plain trigger keyword pools, one per keyword-marked task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeywordPools {
    pub check: Vec<String>,
    pub majority: Vec<String>,
    pub copy_one: Vec<String>,
    pub copy_in_order: Vec<String>,
    /// Pool order is the canonical keyword order used for sorting.
    pub copy_sorted: Vec<String>,
    pub copy_shuffled: Vec<String>,
    pub join: Vec<String>,
}

impl Default for KeywordPools {
    fn default() -> Self {
        let pool = |range: std::ops::RangeInclusive<usize>| {
            range.map(|i| format!("keyword{i}")).collect::<Vec<_>>()
        };
        KeywordPools {
            check: pool(1..=1),
            majority: pool(2..=6),
            copy_one: pool(7..=11),
            copy_in_order: pool(12..=16),
            copy_sorted: pool(17..=21),
            copy_shuffled: pool(22..=26),
            join: pool(27..=29),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumberScheme {
    pub compare_trigger: String,
    pub sum_trigger: String,
    pub threshold_trigger: String,
    pub largest_trigger: String,
    pub min: i64,
    pub max: i64,
    pub threshold: i64,
}

impl Default for NumberScheme {
    fn default() -> Self {
        NumberScheme {
            compare_trigger: "cmpnum".into(),
            sum_trigger: "sumnum".into(),
            threshold_trigger: "thrnum".into(),
            largest_trigger: "maxnum".into(),
            min: 0,
            max: 100,
            threshold: 50,
        }
    }
}

impl NumberScheme {
    pub fn trigger(&self, kind: ElementaryKind) -> Option<&str> {
        Some(match kind {
            ElementaryKind::CompareNumbers => &self.compare_trigger,
            ElementaryKind::SumOfNumbers => &self.sum_trigger,
            ElementaryKind::ThresholdNumber => &self.threshold_trigger,
            ElementaryKind::LargestNumber => &self.largest_trigger,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Markers {
    pub bullet: String,
    pub quote_open: String,
    pub quote_close: String,
    pub cutoff: String,
    pub clause_separator: String,
}

impl Default for Markers {
    fn default() -> Self {
        Markers {
            bullet: "*".into(),
            quote_open: "\"".into(),
            quote_close: "\"".into(),
            cutoff: "cutoff".into(),
            clause_separator: ",".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Answers {
    pub present: String,
    pub absent: String,
    pub at_or_above: String,
    pub below: String,
}

impl Default for Answers {
    fn default() -> Self {
        Answers {
            present: "present".into(),
            absent: "absent".into(),
            at_or_above: "above".into(),
            below: "below".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeywordScheme {
    pub keywords: KeywordPools,
    /// Two classes of five adjectives for ClassifyKeyword.
    pub sentiment: Vec<KeywordClass>,
    /// Object classes for ReplaceClassKeyword; the label replaces the member.
    pub categories: Vec<KeywordClass>,
    /// Topic classes for TopicSegregation; the label is the section header.
    pub topics: Vec<KeywordClass>,
    pub synonyms: Vec<SynonymEntry>,
    pub numbers: NumberScheme,
    pub markers: Markers,
    pub answers: Answers,
}

impl Default for KeywordScheme {
    fn default() -> Self {
        KeywordScheme {
            keywords: KeywordPools::default(),
            sentiment: vec![
                KeywordClass::numbered("negative", "negadj", 1..=5),
                KeywordClass::numbered("positive", "posadj", 1..=5),
            ],
            categories: vec![
                KeywordClass::numbered("category1", "object", 1..=4),
                KeywordClass::numbered("category2", "object", 5..=8),
                KeywordClass::numbered("category3", "object", 9..=12),
            ],
            topics: vec![
                KeywordClass::numbered("section1", "topic", 1..=4),
                KeywordClass::numbered("section2", "topic", 5..=8),
                KeywordClass::numbered("section3", "topic", 9..=12),
            ],
            synonyms: (1..=5)
                .map(|i| SynonymEntry {
                    source: format!("src{i}"),
                    synonyms: (1..=3).map(|j| format!("syn{i}_{j}")).collect(),
                })
                .collect(),
            numbers: NumberScheme::default(),
            markers: Markers::default(),
            answers: Answers::default(),
        }
    }
}

fn check_token(token: &str, field: &str) -> Result<()> {
    let bad = |why: &str| Err(Error::Config(format!("{field}: token `{token}` {why}")));
    if token.is_empty() || token.contains(char::is_whitespace) {
        return bad("must be a single non-empty token");
    }
    if is_vocabulary_shaped(token) {
        return bad("collides with the three-letter vocabulary space");
    }
    if token.parse::<i64>().is_ok() {
        return bad("is an integer and would collide with planted numbers");
    }
    if is_terminator(token) {
        return bad("is a sentence terminator");
    }
    Ok(())
}

impl KeywordScheme {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scheme: KeywordScheme =
            toml::from_str(text).map_err(|e| Error::Config(format!("keyword scheme: {e}")))?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scheme is always representable in TOML")
    }

    /// Every trigger and answer token with the field it comes from.
    fn labelled_tokens(&self) -> Vec<(String, &str)> {
        let mut out = Vec::new();
        let k = &self.keywords;
        for (field, pool) in [
            ("keywords.check", &k.check),
            ("keywords.majority", &k.majority),
            ("keywords.copy_one", &k.copy_one),
            ("keywords.copy_in_order", &k.copy_in_order),
            ("keywords.copy_sorted", &k.copy_sorted),
            ("keywords.copy_shuffled", &k.copy_shuffled),
            ("keywords.join", &k.join),
        ] {
            out.extend(pool.iter().map(|t| (field.to_string(), t.as_str())));
        }
        for (field, classes) in [
            ("sentiment", &self.sentiment),
            ("categories", &self.categories),
            ("topics", &self.topics),
        ] {
            for c in classes {
                out.push((format!("{field}.label"), c.label.as_str()));
                out.extend(
                    c.members
                        .iter()
                        .map(|m| (format!("{field}.{}", c.label), m.as_str())),
                );
            }
        }
        for e in &self.synonyms {
            out.push(("synonyms.source".into(), e.source.as_str()));
            out.extend(
                e.synonyms
                    .iter()
                    .map(|s| (format!("synonyms.{}", e.source), s.as_str())),
            );
        }
        let n = &self.numbers;
        for t in [
            &n.compare_trigger,
            &n.sum_trigger,
            &n.threshold_trigger,
            &n.largest_trigger,
        ] {
            out.push(("numbers".into(), t.as_str()));
        }
        let m = &self.markers;
        out.push(("markers.bullet".into(), m.bullet.as_str()));
        out.push(("markers.quote_open".into(), m.quote_open.as_str()));
        if m.quote_close != m.quote_open {
            out.push(("markers.quote_close".into(), m.quote_close.as_str()));
        }
        out.push(("markers.cutoff".into(), m.cutoff.as_str()));
        out.push((
            "markers.clause_separator".into(),
            m.clause_separator.as_str(),
        ));
        let a = &self.answers;
        for t in [&a.present, &a.absent, &a.at_or_above, &a.below] {
            out.push(("answers".into(), t.as_str()));
        }
        out
    }

    /// Checks that all reserved tokens are well formed, pairwise distinct and
    /// disjoint from the vocabulary space, and that every pool is large enough
    /// for the task that draws from it.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (field, token) in self.labelled_tokens() {
            check_token(token, &field)?;
            if let Some(prev) = seen.insert(token, field.clone()) {
                return Err(Error::Config(format!(
                    "token `{token}` appears in both {prev} and {field}"
                )));
            }
        }
        let need = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        };
        let k = &self.keywords;
        need(!k.check.is_empty(), "keywords.check must not be empty")?;
        need(
            k.majority.len() >= 2,
            "keywords.majority needs at least 2 keywords",
        )?;
        need(
            !k.copy_one.is_empty(),
            "keywords.copy_one must not be empty",
        )?;
        for (pool, name) in [
            (&k.copy_in_order, "copy_in_order"),
            (&k.copy_sorted, "copy_sorted"),
            (&k.copy_shuffled, "copy_shuffled"),
        ] {
            need(
                pool.len() >= MAX_MARKED_SENTENCES,
                &format!("keywords.{name} needs at least {MAX_MARKED_SENTENCES} keywords"),
            )?;
        }
        need(!k.join.is_empty(), "keywords.join must not be empty")?;
        need(
            self.sentiment.len() == 2,
            "sentiment needs exactly 2 classes",
        )?;
        need(!self.categories.is_empty(), "categories must not be empty")?;
        need(!self.topics.is_empty(), "topics must not be empty")?;
        for c in self
            .sentiment
            .iter()
            .chain(&self.categories)
            .chain(&self.topics)
        {
            need(
                !c.members.is_empty(),
                &format!("class `{}` has no members", c.label),
            )?;
        }
        need(!self.synonyms.is_empty(), "synonyms must not be empty")?;
        for e in &self.synonyms {
            need(
                !e.synonyms.is_empty(),
                &format!("synonym entry `{}` has no synonyms", e.source),
            )?;
        }
        let n = &self.numbers;
        need(n.min < n.max, "numbers.min must be below numbers.max")?;
        need(
            (n.min..=n.max).contains(&n.threshold),
            "numbers.threshold must lie within numbers.min..=numbers.max",
        )?;
        Ok(())
    }

    /// All reserved tokens, for trigger-isolation checks and scrubbing real
    /// text.
    pub fn reserved_tokens(&self) -> BTreeSet<String> {
        self.labelled_tokens()
            .into_iter()
            .map(|(_, t)| t.to_string())
            .collect()
    }

    /// Topic classes in section order (sorted by header).
    pub fn sorted_topics(&self) -> Vec<&KeywordClass> {
        let mut topics: Vec<_> = self.topics.iter().collect();
        topics.sort_by(|a, b| a.label.cmp(&b.label));
        topics
    }

    /// Removes reserved tokens from a document's words and drops sentences
    /// left empty. Used before planting triggers into real text.
    pub fn scrub(&self, doc: &Document) -> Document {
        let reserved = self.reserved_tokens();
        let mut out = doc.clone();
        for s in &mut out.sentences {
            s.words.retain(|w| !reserved.contains(w));
        }
        out.sentences.retain(|s| !s.words.is_empty());
        out
    }
}

/// Upper bound on sentences marked by the multi-sentence copy tasks.
pub const MAX_MARKED_SENTENCES: usize = 4;
