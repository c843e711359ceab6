use std::collections::{BTreeMap, BTreeSet};

use super::{ElementaryKind, KeywordScheme, TaskRecord};
use crate::document::{Document, Sentence, PERIOD};

use ElementaryKind::*;

/// Largest marked-sentence count whose permutations the oracle enumerates.
const MAX_PERMUTED: usize = 8;

/// Integers that directly follow `trigger` in `tokens`.
pub fn integer_after<S: AsRef<str>>(tokens: &[S], trigger: &str) -> Vec<i64> {
    tokens
        .windows(2)
        .filter(|w| w[0].as_ref() == trigger)
        .filter_map(|w| w[1].as_ref().parse().ok())
        .collect()
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

fn answer(token: &str) -> Vec<Vec<String>> {
    vec![vec![token.to_string(), PERIOD.to_string()]]
}

/// Acceptance checker for elementary tasks.
///
/// Works only from the document and the keyword scheme: it rescans the text
/// for each kind's trigger tokens and derives the set of acceptable
/// summaries from what it finds.
#[derive(Debug, Clone, Copy)]
pub struct Oracle<'a> {
    scheme: &'a KeywordScheme,
}

impl<'a> Oracle<'a> {
    pub fn new(scheme: &'a KeywordScheme) -> Self {
        Oracle { scheme }
    }

    pub fn accepts(&self, record: &TaskRecord, doc: &Document, candidate: &[String]) -> bool {
        self.accepts_kind(record.kind, doc, candidate)
    }

    pub fn accepts_kind(&self, kind: ElementaryKind, doc: &Document, candidate: &[String]) -> bool {
        self.acceptance_set(kind, doc)
            .iter()
            .any(|ok| ok.as_slice() == candidate)
    }

    /// Every acceptable summary for `kind` on `doc`. Empty when the trigger
    /// material is missing or malformed.
    pub fn acceptance_set(&self, kind: ElementaryKind, doc: &Document) -> Vec<Vec<String>> {
        self.try_acceptance_set(kind, doc).unwrap_or_default()
    }

    fn try_acceptance_set(&self, kind: ElementaryKind, doc: &Document) -> Option<Vec<Vec<String>>> {
        let scheme = self.scheme;
        let k = &scheme.keywords;
        // (sentence index, word index) of every occurrence of any pool token
        let occurrences = |pool: &[String]| -> Vec<(usize, usize, &str)> {
            let mut out = Vec::new();
            for (si, s) in doc.sentences.iter().enumerate() {
                for (wi, w) in s.words.iter().enumerate() {
                    if pool.contains(w) {
                        out.push((si, wi, w.as_str()));
                    }
                }
            }
            out
        };
        let single = |pool: &[String]| -> Option<(usize, String)> {
            match occurrences(pool).as_slice() {
                [(si, _, w)] => Some((*si, w.to_string())),
                _ => None,
            }
        };
        // marked sentences, each holding exactly one pool keyword
        let marked = |pool: &[String]| -> Option<Vec<(usize, String)>> {
            let occ = occurrences(pool);
            let mut by_sentence: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
            for (si, _, w) in occ {
                by_sentence.entry(si).or_default().push(w);
            }
            by_sentence
                .into_iter()
                .map(|(si, ws)| (ws.len() == 1).then(|| (si, ws[0].to_string())))
                .collect()
        };
        let all_tokens: Vec<&str> = doc.tokens().collect();
        let sentence = |i: usize| &doc.sentences[i];
        let replaced = |s: &Sentence, from: &str, to: &str| -> Vec<String> {
            s.tokens()
                .map(|t| if t == from { to } else { t }.to_string())
                .collect()
        };

        Some(match kind {
            CheckKeyword => {
                if occurrences(&k.check).is_empty() {
                    answer(&scheme.answers.absent)
                } else {
                    answer(&scheme.answers.present)
                }
            }
            ClassifyKeyword => {
                let members: Vec<String> = scheme
                    .sentiment
                    .iter()
                    .flat_map(|c| c.members.clone())
                    .collect();
                let (_, kw) = single(&members)?;
                let class = scheme.sentiment.iter().find(|c| c.members.contains(&kw))?;
                answer(&class.label)
            }
            MajorityKeyword => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for (_, _, w) in occurrences(&k.majority) {
                    *counts.entry(w).or_default() += 1;
                }
                let counts: Vec<(&str, usize)> = counts.into_iter().collect();
                match counts.as_slice() {
                    [(a, ca), (b, cb)] if ca != cb => answer(if ca > cb { a } else { b }),
                    _ => return None,
                }
            }
            CopyFirstSentence => vec![doc.sentences.first()?.to_tokens()],
            CopyLastSentence => vec![doc.sentences.last()?.to_tokens()],
            CopyBulleted => {
                let bulleted: Vec<&Sentence> = doc
                    .sentences
                    .iter()
                    .filter(|s| s.words.first() == Some(&scheme.markers.bullet))
                    .collect();
                match bulleted.as_slice() {
                    [s] => vec![s.tokens().skip(1).map(str::to_string).collect()],
                    _ => return None,
                }
            }
            CopyQuoted => {
                let m = &scheme.markers;
                let opens: Vec<usize> = positions(&all_tokens, &m.quote_open);
                let closes: Vec<usize> = positions(&all_tokens, &m.quote_close);
                let (open, close) = if m.quote_open == m.quote_close {
                    match opens.as_slice() {
                        [a, b] => (*a, *b),
                        _ => return None,
                    }
                } else {
                    match (opens.as_slice(), closes.as_slice()) {
                        ([a], [b]) if a < b => (*a, *b),
                        _ => return None,
                    }
                };
                let span = &all_tokens[open + 1..close];
                if span.is_empty() || span.iter().any(|t| crate::document::is_terminator(t)) {
                    return None;
                }
                let mut out: Vec<String> = span.iter().map(|t| t.to_string()).collect();
                out.push(PERIOD.to_string());
                vec![out]
            }
            CopyKwdOneSentence => {
                let (si, _) = single(&k.copy_one)?;
                vec![sentence(si).to_tokens()]
            }
            CopyKwdMultipleSentInOrder => {
                let marked = marked(&k.copy_in_order)?;
                if marked.is_empty() {
                    return None;
                }
                vec![marked
                    .iter()
                    .flat_map(|(si, _)| sentence(*si).to_tokens())
                    .collect()]
            }
            CopyKwdMultipleSentSorted => {
                let mut marked = marked(&k.copy_sorted)?;
                let distinct: BTreeSet<&String> = marked.iter().map(|(_, w)| w).collect();
                if marked.is_empty() || distinct.len() != marked.len() {
                    return None;
                }
                marked.sort_by_key(|(_, w)| k.copy_sorted.iter().position(|p| p == w));
                vec![marked
                    .iter()
                    .flat_map(|(si, _)| sentence(*si).to_tokens())
                    .collect()]
            }
            CopyKwdMultipleSentShuffled => {
                let marked = marked(&k.copy_shuffled)?;
                if marked.is_empty() || marked.len() > MAX_PERMUTED {
                    return None;
                }
                let indices: Vec<usize> = marked.iter().map(|(si, _)| *si).collect();
                permutations(&indices)
                    .into_iter()
                    .map(|p| {
                        p.into_iter()
                            .flat_map(|si| sentence(si).to_tokens())
                            .collect()
                    })
                    .collect()
            }
            ReplaceClassKeyword => {
                let members: Vec<String> = scheme
                    .categories
                    .iter()
                    .flat_map(|c| c.members.clone())
                    .collect();
                let (si, kw) = single(&members)?;
                let class = scheme.categories.iter().find(|c| c.members.contains(&kw))?;
                vec![replaced(sentence(si), &kw, &class.label)]
            }
            CompareNumbers | SumOfNumbers | ThresholdNumber | LargestNumber => {
                let trigger = scheme.numbers.trigger(kind)?;
                let triggers = positions(&all_tokens, trigger).len();
                let values = integer_after(&all_tokens, trigger);
                if values.len() != triggers {
                    return None;
                }
                match (kind, values.as_slice()) {
                    (CompareNumbers, [a, b]) if a != b => answer(&(*a.max(b)).to_string()),
                    (SumOfNumbers, vs) if !vs.is_empty() => {
                        answer(&vs.iter().sum::<i64>().to_string())
                    }
                    (ThresholdNumber, [v]) => answer(if *v >= scheme.numbers.threshold {
                        &scheme.answers.at_or_above
                    } else {
                        &scheme.answers.below
                    }),
                    (LargestNumber, vs) if !vs.is_empty() => answer(&vs.iter().max()?.to_string()),
                    _ => return None,
                }
            }
            TruncateSentence => {
                let (si, _) = single(std::slice::from_ref(&scheme.markers.cutoff))?;
                let s = sentence(si);
                let cut = s.words.iter().position(|w| *w == scheme.markers.cutoff)?;
                let mut out = s.words[..cut].to_vec();
                out.push(PERIOD.to_string());
                vec![out]
            }
            BreakClauses => {
                let sep = &scheme.markers.clause_separator;
                let with_sep: Vec<&Sentence> =
                    doc.sentences.iter().filter(|s| s.contains(sep)).collect();
                let [s] = with_sep.as_slice() else {
                    return None;
                };
                let clauses: Vec<&[String]> = s.words.split(|w| w == sep).collect();
                if clauses.iter().any(|c| c.is_empty()) {
                    return None;
                }
                vec![clauses
                    .into_iter()
                    .flat_map(|c| c.iter().cloned().chain(std::iter::once(PERIOD.to_string())))
                    .collect()]
            }
            JoinClauses => {
                let marked = marked(&k.join)?;
                let distinct: BTreeSet<&String> = marked.iter().map(|(_, w)| w).collect();
                if marked.len() < 2
                    || distinct.len() != 1
                    || marked.windows(2).any(|w| w[1].0 != w[0].0 + 1)
                {
                    return None;
                }
                let sep = &scheme.markers.clause_separator;
                let mut out = Vec::new();
                for (n, (si, _)) in marked.iter().enumerate() {
                    if n > 0 {
                        out.push(sep.clone());
                    }
                    out.extend(sentence(*si).words.iter().cloned());
                }
                out.push(PERIOD.to_string());
                vec![out]
            }
            ParaphraseWords => {
                let sources: Vec<String> =
                    scheme.synonyms.iter().map(|e| e.source.clone()).collect();
                let (si, kw) = single(&sources)?;
                let entry = scheme.synonyms.iter().find(|e| e.source == kw)?;
                entry
                    .synonyms
                    .iter()
                    .map(|syn| replaced(sentence(si), &kw, syn))
                    .collect()
            }
            TopicSegregation => {
                let members: Vec<String> = scheme
                    .topics
                    .iter()
                    .flat_map(|c| c.members.clone())
                    .collect();
                let marked = marked(&members)?;
                if marked.is_empty() {
                    return None;
                }
                let mut out = Vec::new();
                for class in scheme.sorted_topics() {
                    out.push(class.label.clone());
                    for (si, kw) in &marked {
                        if class.members.contains(kw) {
                            out.extend(sentence(*si).to_tokens());
                        }
                    }
                }
                vec![out]
            }
        })
    }

    /// Kinds whose trigger material occurs in `doc`. CopyFirstSentence,
    /// CopyLastSentence and an absent CheckKeyword leave no trace and are
    /// never reported.
    pub fn detect_kinds(&self, doc: &Document) -> BTreeSet<ElementaryKind> {
        let s = self.scheme;
        let k = &s.keywords;
        let words: BTreeSet<&str> = doc
            .sentences
            .iter()
            .flat_map(|x| x.words.iter().map(String::as_str))
            .collect();
        let any = |pool: &[String]| pool.iter().any(|t| words.contains(t.as_str()));
        let class_any = |classes: &[super::KeywordClass]| classes.iter().any(|c| any(&c.members));
        let mut found = BTreeSet::new();
        let mut mark = |hit: bool, kind| {
            if hit {
                found.insert(kind);
            }
        };
        mark(any(&k.check), CheckKeyword);
        mark(class_any(&s.sentiment), ClassifyKeyword);
        mark(any(&k.majority), MajorityKeyword);
        mark(
            doc.sentences
                .iter()
                .any(|x| x.words.first() == Some(&s.markers.bullet)),
            CopyBulleted,
        );
        mark(
            words.contains(s.markers.quote_open.as_str())
                || words.contains(s.markers.quote_close.as_str()),
            CopyQuoted,
        );
        mark(any(&k.copy_one), CopyKwdOneSentence);
        mark(any(&k.copy_in_order), CopyKwdMultipleSentInOrder);
        mark(any(&k.copy_sorted), CopyKwdMultipleSentSorted);
        mark(any(&k.copy_shuffled), CopyKwdMultipleSentShuffled);
        mark(class_any(&s.categories), ReplaceClassKeyword);
        for kind in [CompareNumbers, SumOfNumbers, ThresholdNumber, LargestNumber] {
            mark(
                words.contains(s.numbers.trigger(kind).expect("numeric")),
                kind,
            );
        }
        mark(words.contains(s.markers.cutoff.as_str()), TruncateSentence);
        mark(
            words.contains(s.markers.clause_separator.as_str()),
            BreakClauses,
        );
        mark(any(&k.join), JoinClauses);
        mark(
            s.synonyms.iter().any(|e| words.contains(e.source.as_str())),
            ParaphraseWords,
        );
        mark(class_any(&s.topics), TopicSegregation);
        found
    }
}

fn positions(tokens: &[&str], token: &str) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| **t == token)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    fn doc(s: &str) -> Document {
        Document::from_text(s).unwrap()
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(&[1, 2, 3, 4]).len(), 24);
        assert_eq!(permutations::<u8>(&[]).len(), 1);
    }

    #[test]
    fn shuffled_two_sentences() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("aaa keyword22 . baa . caa keyword23 .");
        let a = "aaa keyword22 .";
        let c = "caa keyword23 .";
        assert!(o.accepts_kind(CopyKwdMultipleSentShuffled, &d, &toks(&format!("{a} {c}"))));
        assert!(o.accepts_kind(CopyKwdMultipleSentShuffled, &d, &toks(&format!("{c} {a}"))));
        assert!(!o.accepts_kind(CopyKwdMultipleSentShuffled, &d, &toks(&format!("{a} {a}"))));
        assert_eq!(o.acceptance_set(CopyKwdMultipleSentShuffled, &d).len(), 2);
    }

    #[test]
    fn sorted_by_pool_index() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        // keyword19 is third in the sorted pool, keyword17 first
        let d = doc("a0 . a1 . a2 keyword17 . a3 . a4 . a5 keyword19 . a6 .");
        let d2 = doc("a0 . a1 . a2 keyword19 . a3 . a4 . a5 keyword17 . a6 .");
        assert_eq!(
            o.acceptance_set(CopyKwdMultipleSentSorted, &d),
            vec![toks("a2 keyword17 . a5 keyword19 .")]
        );
        assert_eq!(
            o.acceptance_set(CopyKwdMultipleSentSorted, &d2),
            vec![toks("a5 keyword17 . a2 keyword19 .")]
        );
    }

    #[test]
    fn numbers() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("aaa cmpnum 12 baa . caa cmpnum 30 .");
        assert!(o.accepts_kind(CompareNumbers, &d, &toks("30 .")));
        assert!(!o.accepts_kind(CompareNumbers, &d, &toks("12 .")));
        let d = doc("aaa sumnum 12 . sumnum 30 baa .");
        assert!(o.accepts_kind(SumOfNumbers, &d, &toks("42 .")));
        let d = doc("aaa thrnum 50 .");
        assert!(o.accepts_kind(ThresholdNumber, &d, &toks("above .")));
        let d = doc("aaa thrnum 49 .");
        assert!(o.accepts_kind(ThresholdNumber, &d, &toks("below .")));
        let d = doc("aaa maxnum 7 .");
        assert!(o.accepts_kind(LargestNumber, &d, &toks("7 .")));
        // a trigger without a number is malformed
        let d = doc("aaa maxnum baa .");
        assert!(o.acceptance_set(LargestNumber, &d).is_empty());
    }

    #[test]
    fn truncate_and_clauses() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("aaa baa cutoff caa .");
        assert_eq!(
            o.acceptance_set(TruncateSentence, &d),
            vec![toks("aaa baa .")]
        );
        let d = doc("xaa . aaa baa caa , daa eaa faa .");
        assert_eq!(
            o.acceptance_set(BreakClauses, &d),
            vec![toks("aaa baa caa . daa eaa faa .")]
        );
        let d = doc("aaa keyword27 . baa keyword27 . caa .");
        assert_eq!(
            o.acceptance_set(JoinClauses, &d),
            vec![toks("aaa keyword27 , baa keyword27 .")]
        );
    }

    #[test]
    fn topics_keep_empty_sections() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("aaa topic9 . baa . caa topic1 . daa topic2 .");
        assert_eq!(
            o.acceptance_set(TopicSegregation, &d),
            vec![toks(
                "section1 caa topic1 . daa topic2 . section2 section3 aaa topic9 ."
            )]
        );
    }

    #[test]
    fn paraphrase_accepts_any_synonym() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("aaa src2 baa .");
        for syn in ["syn2_1", "syn2_2", "syn2_3"] {
            assert!(o.accepts_kind(ParaphraseWords, &d, &toks(&format!("aaa {syn} baa ."))));
        }
        assert!(!o.accepts_kind(ParaphraseWords, &d, &toks("aaa syn1_1 baa .")));
        assert!(!o.accepts_kind(ParaphraseWords, &d, &toks("aaa src2 baa .")));
    }

    #[test]
    fn detection() {
        let scheme = KeywordScheme::default();
        let o = Oracle::new(&scheme);
        let d = doc("* aaa \" baa caa \" . daa maxnum 3 .");
        let found: Vec<_> = o.detect_kinds(&d).into_iter().collect();
        assert_eq!(found, vec![CopyBulleted, CopyQuoted, LargestNumber]);
        assert!(o.detect_kinds(&doc("aaa baa .")).is_empty());
    }
}
