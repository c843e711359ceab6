use super::{ElementaryKind, KeywordScheme, TaskParams, TaskRecord};
use crate::document::{Document, Sentence, PERIOD};
use crate::error::{Error, Result};

use ElementaryKind::*;

fn mismatch(kind: ElementaryKind, what: impl std::fmt::Display) -> Error {
    Error::Consistency(format!("{kind}: {what}"))
}

fn answer(token: impl Into<String>) -> Vec<String> {
    vec![token.into(), PERIOD.to_string()]
}

/// Gold summary for a planted task, rebuilt from the record and the
/// (possibly further modified) document.
///
/// Fails when the record does not describe the document, e.g. a recorded
/// keyword is missing from its sentence.
pub fn compute_gold(
    record: &TaskRecord,
    doc: &Document,
    scheme: &KeywordScheme,
) -> Result<Vec<String>> {
    let kind = record.kind;
    let sentence = |i: usize| -> Result<&Sentence> {
        doc.sentences
            .get(i)
            .ok_or_else(|| mismatch(kind, format!("sentence {i} out of range")))
    };
    let only = || -> Result<&Sentence> {
        match record.sentences.as_slice() {
            [i] => sentence(*i),
            other => Err(mismatch(
                kind,
                format!("expected one sentence, got {other:?}"),
            )),
        }
    };
    let holding = |s: &Sentence, kw: &str| -> Result<()> {
        if s.contains(kw) {
            Ok(())
        } else {
            Err(mismatch(
                kind,
                format!("keyword `{kw}` not in its sentence"),
            ))
        }
    };
    let bad_params = || mismatch(kind, format!("unexpected params {:?}", record.params));

    match (&record.params, kind) {
        (TaskParams::Check { present, keyword }, CheckKeyword) => {
            if *present {
                let kw = keyword.as_deref().ok_or_else(bad_params)?;
                holding(only()?, kw)?;
                Ok(answer(&scheme.answers.present))
            } else {
                Ok(answer(&scheme.answers.absent))
            }
        }
        (TaskParams::Classify { keyword, class }, ClassifyKeyword) => {
            holding(only()?, keyword)?;
            let owner = scheme
                .sentiment
                .iter()
                .find(|c| c.members.contains(keyword))
                .ok_or_else(|| mismatch(kind, format!("`{keyword}` is not a sentiment keyword")))?;
            if owner.label != *class {
                return Err(mismatch(
                    kind,
                    format!("`{keyword}` belongs to {}", owner.label),
                ));
            }
            Ok(answer(class))
        }
        (TaskParams::Majority { keywords, counts }, MajorityKeyword) => {
            if keywords.len() != 2 || counts.len() != 2 || counts[0] == counts[1] {
                return Err(bad_params());
            }
            for (kw, &c) in keywords.iter().zip(counts) {
                let found: usize = record
                    .sentences
                    .iter()
                    .map(|&i| sentence(i).map(|s| s.words.iter().filter(|w| *w == kw).count()))
                    .sum::<Result<_>>()?;
                if found != c {
                    return Err(mismatch(
                        kind,
                        format!("`{kw}` occurs {found} times, not {c}"),
                    ));
                }
            }
            let winner = if counts[0] > counts[1] {
                &keywords[0]
            } else {
                &keywords[1]
            };
            Ok(answer(winner))
        }
        (TaskParams::Copy, CopyFirstSentence | CopyLastSentence) => {
            let s = only()?;
            let expected = if kind == CopyFirstSentence {
                0
            } else {
                doc.len() - 1
            };
            if record.sentences != [expected] {
                return Err(mismatch(
                    kind,
                    "recorded sentence is not at the document edge",
                ));
            }
            Ok(s.to_tokens())
        }
        (TaskParams::Copy, CopyBulleted) => {
            let s = only()?;
            if s.words.first() != Some(&scheme.markers.bullet) {
                return Err(mismatch(
                    kind,
                    "sentence does not start with the bullet marker",
                ));
            }
            Ok(s.tokens().skip(1).map(str::to_string).collect())
        }
        (TaskParams::Quoted { start, len }, CopyQuoted) => {
            let s = only()?;
            let m = &scheme.markers;
            let (start, end) = (*start, start + len);
            if start == 0
                || end >= s.words.len()
                || s.words[start - 1] != m.quote_open
                || s.words[end] != m.quote_close
            {
                return Err(mismatch(kind, "quote marks not around the recorded span"));
            }
            let mut out = s.words[start..end].to_vec();
            out.push(PERIOD.to_string());
            Ok(out)
        }
        (TaskParams::Keywords { keywords }, CopyKwdOneSentence) => {
            let s = only()?;
            holding(s, keywords.first().ok_or_else(bad_params)?)?;
            Ok(s.to_tokens())
        }
        (
            TaskParams::Keywords { keywords },
            CopyKwdMultipleSentInOrder | CopyKwdMultipleSentSorted,
        ) => {
            if keywords.len() != record.sentences.len() {
                return Err(bad_params());
            }
            let mut marked: Vec<(usize, &Sentence)> = Vec::new();
            for (&i, kw) in record.sentences.iter().zip(keywords) {
                let s = sentence(i)?;
                holding(s, kw)?;
                let rank = if kind == CopyKwdMultipleSentSorted {
                    scheme
                        .keywords
                        .copy_sorted
                        .iter()
                        .position(|k| k == kw)
                        .ok_or_else(|| mismatch(kind, format!("`{kw}` not in the sorted pool")))?
                } else {
                    i
                };
                marked.push((rank, s));
            }
            marked.sort_by_key(|&(rank, _)| rank);
            Ok(marked
                .into_iter()
                .flat_map(|(_, s)| s.to_tokens())
                .collect())
        }
        (TaskParams::Shuffled { keywords, order }, CopyKwdMultipleSentShuffled) => {
            if keywords.len() != record.sentences.len() {
                return Err(bad_params());
            }
            for (&i, kw) in record.sentences.iter().zip(keywords) {
                holding(sentence(i)?, kw)?;
            }
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != record.sentences {
                return Err(mismatch(
                    kind,
                    "copy order is not a permutation of the marked sentences",
                ));
            }
            order
                .iter()
                .map(|&i| sentence(i).map(Sentence::to_tokens))
                .collect::<Result<Vec<_>>>()
                .map(|v| v.concat())
        }
        (TaskParams::Replace { keyword, label }, ReplaceClassKeyword) => {
            let s = only()?;
            holding(s, keyword)?;
            Ok(s.tokens()
                .map(|t| {
                    if t == keyword {
                        label.clone()
                    } else {
                        t.to_string()
                    }
                })
                .collect())
        }
        (TaskParams::Numbers { values }, _) if kind.is_numeric() => {
            let trigger = scheme.numbers.trigger(kind).expect("numeric kind");
            let mut found: Vec<i64> = Vec::new();
            for &i in &record.sentences {
                let s = sentence(i)?;
                for pair in s.words.windows(2) {
                    if pair[0] == trigger {
                        found.push(pair[1].parse().map_err(|_| {
                            mismatch(kind, format!("`{}` after trigger is not a number", pair[1]))
                        })?);
                    }
                }
            }
            let mut expected = values.clone();
            expected.sort_unstable();
            found.sort_unstable();
            if found != expected {
                return Err(mismatch(
                    kind,
                    format!("planted {found:?}, recorded {expected:?}"),
                ));
            }
            let value = match kind {
                CompareNumbers | LargestNumber => {
                    values.iter().max().ok_or_else(bad_params)?.to_string()
                }
                SumOfNumbers => values.iter().sum::<i64>().to_string(),
                _ => {
                    let v = *values.first().ok_or_else(bad_params)?;
                    return Ok(answer(if v >= scheme.numbers.threshold {
                        &scheme.answers.at_or_above
                    } else {
                        &scheme.answers.below
                    }));
                }
            };
            Ok(answer(value))
        }
        (TaskParams::Cutoff { position }, TruncateSentence) => {
            let s = only()?;
            if s.words.get(*position) != Some(&scheme.markers.cutoff) {
                return Err(mismatch(
                    kind,
                    "cutoff keyword not at the recorded position",
                ));
            }
            let mut out = s.words[..*position].to_vec();
            out.push(PERIOD.to_string());
            Ok(out)
        }
        (TaskParams::Clauses { lengths }, BreakClauses) => {
            let s = only()?;
            let sep = &scheme.markers.clause_separator;
            let clauses: Vec<&[String]> = s.words.split(|w| w == sep).collect();
            if clauses.iter().map(|c| c.len()).collect::<Vec<_>>() != *lengths {
                return Err(mismatch(kind, "clause lengths differ from the record"));
            }
            Ok(clauses
                .into_iter()
                .flat_map(|c| c.iter().cloned().chain(std::iter::once(PERIOD.to_string())))
                .collect())
        }
        (TaskParams::Keywords { keywords }, JoinClauses) => {
            if keywords.len() != record.sentences.len() || record.sentences.len() < 2 {
                return Err(bad_params());
            }
            if record.sentences.windows(2).any(|w| w[1] != w[0] + 1) {
                return Err(mismatch(kind, "joined sentences are not consecutive"));
            }
            let sep = &scheme.markers.clause_separator;
            let mut out = Vec::new();
            for (n, (&i, kw)) in record.sentences.iter().zip(keywords).enumerate() {
                let s = sentence(i)?;
                holding(s, kw)?;
                if n > 0 {
                    out.push(sep.clone());
                }
                out.extend(s.words.iter().cloned());
            }
            out.push(PERIOD.to_string());
            Ok(out)
        }
        (TaskParams::Paraphrase { keyword, synonym }, ParaphraseWords) => {
            let s = only()?;
            holding(s, keyword)?;
            let listed = scheme
                .synonyms
                .iter()
                .any(|e| e.source == *keyword && e.synonyms.contains(synonym));
            if !listed {
                return Err(mismatch(
                    kind,
                    format!("`{synonym}` is not a synonym of `{keyword}`"),
                ));
            }
            Ok(s.tokens()
                .map(|t| {
                    if t == keyword {
                        synonym.clone()
                    } else {
                        t.to_string()
                    }
                })
                .collect())
        }
        (TaskParams::Keywords { keywords }, TopicSegregation) => {
            if keywords.len() != record.sentences.len() {
                return Err(bad_params());
            }
            let mut out = Vec::new();
            for class in scheme.sorted_topics() {
                out.push(class.label.clone());
                for (&i, kw) in record.sentences.iter().zip(keywords) {
                    if class.members.contains(kw) {
                        let s = sentence(i)?;
                        holding(s, kw)?;
                        out.extend(s.to_tokens());
                    }
                }
            }
            Ok(out)
        }
        _ => Err(bad_params()),
    }
}
