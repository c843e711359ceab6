use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{ElementaryKind, Planted, TaskContext, TaskParams, TaskRecord, MAX_MARKED_SENTENCES};
use crate::document::Document;
use crate::error::{Error, Result};

use ElementaryKind::*;

/// A sentence index with the words planted into it.
type Unit = (usize, Vec<String>);

/// Plants `kind` into a copy of `doc`, with every sentence available.
pub fn apply_modification<R: Rng + ?Sized>(
    kind: ElementaryKind,
    doc: &Document,
    rng: &mut R,
    ctx: TaskContext<'_>,
) -> Result<(Document, TaskRecord)> {
    let mut out = doc.clone();
    let available = (0..doc.len()).collect();
    let record = apply_modification_in(kind, &mut out, rng, ctx, &available)?;
    Ok((out, record))
}

fn too_small(kind: ElementaryKind, what: &str) -> Error {
    Error::invalid(format!("document too small for {kind}: {what}"))
}

fn choose<'a, R: Rng + ?Sized, T>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// `k` distinct sentences drawn uniformly from `candidates`, ascending.
fn pick<R: Rng + ?Sized>(rng: &mut R, candidates: &[usize], k: usize) -> Option<Vec<usize>> {
    if k > candidates.len() {
        return None;
    }
    let mut chosen: Vec<usize> = index::sample(rng, candidates.len(), k)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    chosen.sort_unstable();
    Some(chosen)
}

/// Inserts each unit at a uniformly drawn gap of the original word list
/// (gap `g` sits before word `g`). Units never interleave. Returns the final
/// start position of every unit, in input order.
fn insert_units<R: Rng + ?Sized>(
    words: &mut Vec<String>,
    rng: &mut R,
    units: Vec<Vec<String>>,
    gaps: RangeInclusive<usize>,
) -> Vec<usize> {
    let mut placed: Vec<(usize, usize, Vec<String>)> = units
        .into_iter()
        .enumerate()
        .map(|(i, u)| (rng.random_range(gaps.clone()), i, u))
        .collect();
    placed.sort_by_key(|&(gap, i, _)| (gap, i));

    let original = std::mem::take(words);
    let mut starts = vec![0; placed.len()];
    let mut units = placed.into_iter().peekable();
    for (pos, word) in original
        .into_iter()
        .map(Some)
        .chain(std::iter::once(None))
        .enumerate()
    {
        while let Some((_, i, unit)) = units.next_if(|(gap, _, _)| *gap == pos) {
            starts[i] = words.len();
            words.extend(unit);
        }
        if let Some(w) = word {
            words.push(w);
        }
    }
    starts
}

struct Planter<'d> {
    doc: &'d mut Document,
    planted: Vec<Planted>,
}

impl Planter<'_> {
    fn insert<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        sentence: usize,
        units: Vec<Vec<String>>,
        gaps: Option<RangeInclusive<usize>>,
    ) {
        let words = &mut self.doc.sentences[sentence].words;
        let gaps = gaps.unwrap_or(0..=words.len());
        let tokens: Vec<Vec<String>> = units.clone();
        let starts = insert_units(words, rng, units, gaps);
        for (start, unit) in starts.into_iter().zip(tokens) {
            for (offset, token) in unit.into_iter().enumerate() {
                self.planted.push(Planted {
                    sentence,
                    position: start + offset,
                    token,
                });
            }
        }
    }

    fn insert_one<R: Rng + ?Sized>(&mut self, rng: &mut R, sentence: usize, token: &str) {
        self.insert(rng, sentence, vec![vec![token.to_string()]], None);
    }

    /// Spreads units over `sentences`, each unit to a uniformly chosen one.
    fn scatter<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        sentences: &[usize],
        units: Vec<Vec<String>>,
    ) {
        let mut per_sentence = vec![Vec::new(); sentences.len()];
        for u in units {
            per_sentence[rng.random_range(0..sentences.len())].push(u);
        }
        for (&s, units) in sentences.iter().zip(per_sentence) {
            if !units.is_empty() {
                self.insert(rng, s, units, None);
            }
        }
    }
}

/// Plants `kind` into `doc`, touching only sentences in `available`.
///
/// On error the document is left unchanged.
pub fn apply_modification_in<R: Rng + ?Sized>(
    kind: ElementaryKind,
    doc: &mut Document,
    rng: &mut R,
    ctx: TaskContext<'_>,
    available: &BTreeSet<usize>,
) -> Result<TaskRecord> {
    let scheme = ctx.scheme;
    let free: Vec<usize> = available
        .iter()
        .copied()
        .filter(|&i| i < doc.len())
        .collect();
    let with_words = |min: usize| -> Vec<usize> {
        free.iter()
            .copied()
            .filter(|&i| doc.sentences[i].words.len() >= min)
            .collect()
    };
    let one = |rng: &mut R, candidates: &[usize]| -> Result<usize> {
        pick(rng, candidates, 1)
            .map(|v| v[0])
            .ok_or_else(|| too_small(kind, "no free sentence"))
    };

    let (sentences, params, units): (Vec<usize>, TaskParams, Vec<Unit>);
    // Decide everything first, then mutate.
    match kind {
        CheckKeyword => {
            let present = rng.random_bool(0.5);
            if present {
                let s = one(rng, &free)?;
                let kw = choose(rng, &scheme.keywords.check).clone();
                sentences = vec![s];
                units = vec![(s, vec![kw.clone()])];
                params = TaskParams::Check {
                    present,
                    keyword: Some(kw),
                };
            } else {
                sentences = vec![];
                units = vec![];
                params = TaskParams::Check {
                    present,
                    keyword: None,
                };
            }
        }
        ClassifyKeyword => {
            let s = one(rng, &free)?;
            let class = choose(rng, &scheme.sentiment);
            let kw = choose(rng, &class.members).clone();
            sentences = vec![s];
            units = vec![(s, vec![kw.clone()])];
            params = TaskParams::Classify {
                keyword: kw,
                class: class.label.clone(),
            };
        }
        MajorityKeyword => {
            let k = rng.random_range(1..=2usize.min(free.len().max(1)));
            let chosen = pick(rng, &free, k).ok_or_else(|| too_small(kind, "no free sentence"))?;
            let kws: Vec<String> = index::sample(rng, scheme.keywords.majority.len(), 2)
                .into_iter()
                .map(|i| scheme.keywords.majority[i].clone())
                .collect();
            let counts = loop {
                let a = rng.random_range(1..=4usize);
                let b = rng.random_range(1..=4usize);
                if a != b {
                    break vec![a, b];
                }
            };
            let mut all = Vec::new();
            for (kw, &c) in kws.iter().zip(&counts) {
                all.extend(std::iter::repeat_n(vec![kw.clone()], c));
            }
            let mut planter = Planter {
                doc,
                planted: vec![],
            };
            planter.scatter(rng, &chosen, all);
            return Ok(TaskRecord {
                kind,
                sentences: chosen,
                planted: planter.planted,
                params: TaskParams::Majority {
                    keywords: kws,
                    counts,
                },
            });
        }
        CopyFirstSentence | CopyLastSentence => {
            if doc.is_empty() {
                return Err(too_small(kind, "empty document"));
            }
            let s = if kind == CopyFirstSentence {
                0
            } else {
                doc.len() - 1
            };
            if !available.contains(&s) {
                return Err(too_small(kind, "sentence already used by another task"));
            }
            sentences = vec![s];
            units = vec![];
            params = TaskParams::Copy;
        }
        CopyBulleted => {
            let s = one(rng, &free)?;
            let bullet = scheme.markers.bullet.clone();
            let mut planter = Planter {
                doc,
                planted: vec![],
            };
            planter.insert(rng, s, vec![vec![bullet]], Some(0..=0));
            return Ok(TaskRecord {
                kind,
                sentences: vec![s],
                planted: planter.planted,
                params: TaskParams::Copy,
            });
        }
        CopyQuoted => {
            let s = one(rng, &with_words(2))?;
            let n = doc.sentences[s].words.len();
            let len = rng.random_range(2..=5.min(n));
            let start = rng.random_range(0..=n - len);
            let m = &scheme.markers;
            let words = &mut doc.sentences[s].words;
            words.insert(start + len, m.quote_close.clone());
            words.insert(start, m.quote_open.clone());
            return Ok(TaskRecord {
                kind,
                sentences: vec![s],
                planted: vec![
                    Planted {
                        sentence: s,
                        position: start,
                        token: m.quote_open.clone(),
                    },
                    Planted {
                        sentence: s,
                        position: start + len + 1,
                        token: m.quote_close.clone(),
                    },
                ],
                params: TaskParams::Quoted {
                    start: start + 1,
                    len,
                },
            });
        }
        CopyKwdOneSentence => {
            let s = one(rng, &free)?;
            let kw = choose(rng, &scheme.keywords.copy_one).clone();
            sentences = vec![s];
            units = vec![(s, vec![kw.clone()])];
            params = TaskParams::Keywords { keywords: vec![kw] };
        }
        CopyKwdMultipleSentInOrder | CopyKwdMultipleSentSorted | CopyKwdMultipleSentShuffled => {
            let pool = match kind {
                CopyKwdMultipleSentInOrder => &scheme.keywords.copy_in_order,
                CopyKwdMultipleSentSorted => &scheme.keywords.copy_sorted,
                _ => &scheme.keywords.copy_shuffled,
            };
            let m = rng.random_range(2..=MAX_MARKED_SENTENCES);
            let chosen =
                pick(rng, &free, m).ok_or_else(|| too_small(kind, "not enough free sentences"))?;
            // sampled in random order, so the sentence/keyword pairing is uniform
            let kws: Vec<String> = index::sample(rng, pool.len(), m)
                .into_iter()
                .map(|i| pool[i].clone())
                .collect();
            units = chosen
                .iter()
                .zip(&kws)
                .map(|(&s, kw)| (s, vec![kw.clone()]))
                .collect();
            params = if kind == CopyKwdMultipleSentShuffled {
                let mut order = chosen.clone();
                order.shuffle(rng);
                TaskParams::Shuffled {
                    keywords: kws,
                    order,
                }
            } else {
                TaskParams::Keywords { keywords: kws }
            };
            sentences = chosen;
        }
        ReplaceClassKeyword => {
            let s = one(rng, &free)?;
            let class = choose(rng, &scheme.categories);
            let kw = choose(rng, &class.members).clone();
            sentences = vec![s];
            units = vec![(s, vec![kw.clone()])];
            params = TaskParams::Replace {
                keyword: kw,
                label: class.label.clone(),
            };
        }
        CompareNumbers | SumOfNumbers | ThresholdNumber | LargestNumber => {
            let n = &scheme.numbers;
            let trigger = n.trigger(kind).expect("numeric kind").to_string();
            let count = match kind {
                CompareNumbers => 2,
                SumOfNumbers => rng.random_range(2..=4),
                ThresholdNumber => 1,
                _ => rng.random_range(1..=4),
            };
            let values: Vec<i64> = if kind == CompareNumbers {
                loop {
                    let a = rng.random_range(n.min..=n.max);
                    let b = rng.random_range(n.min..=n.max);
                    if a != b {
                        break vec![a, b];
                    }
                }
            } else {
                (0..count)
                    .map(|_| rng.random_range(n.min..=n.max))
                    .collect()
            };
            if free.is_empty() {
                return Err(too_small(kind, "no free sentence"));
            }
            let k = rng.random_range(1..=count.min(2).min(free.len()));
            let chosen = pick(rng, &free, k).expect("k <= free");
            let all = values
                .iter()
                .map(|v| vec![trigger.clone(), v.to_string()])
                .collect();
            let mut planter = Planter {
                doc,
                planted: vec![],
            };
            planter.scatter(rng, &chosen, all);
            return Ok(TaskRecord {
                kind,
                sentences: chosen,
                planted: planter.planted,
                params: TaskParams::Numbers { values },
            });
        }
        TruncateSentence => {
            let s = one(rng, &with_words(2))?;
            let n = doc.sentences[s].words.len();
            let cutoff = scheme.markers.cutoff.clone();
            let mut planter = Planter {
                doc,
                planted: vec![],
            };
            planter.insert(rng, s, vec![vec![cutoff]], Some(1..=n - 1));
            let position = planter.planted[0].position;
            return Ok(TaskRecord {
                kind,
                sentences: vec![s],
                planted: planter.planted,
                params: TaskParams::Cutoff { position },
            });
        }
        BreakClauses => {
            let s = one(rng, &free)?;
            let clauses = rng.random_range(2..=4usize);
            let lengths: Vec<usize> = (0..clauses).map(|_| rng.random_range(3..=6)).collect();
            let vocab = ctx.vocab.words();
            let sep = &scheme.markers.clause_separator;
            let mut words = Vec::new();
            let mut planted = Vec::new();
            for (c, &len) in lengths.iter().enumerate() {
                if c > 0 {
                    planted.push(Planted {
                        sentence: s,
                        position: words.len(),
                        token: sep.clone(),
                    });
                    words.push(sep.clone());
                }
                words.extend((0..len).map(|_| choose(rng, vocab).clone()));
            }
            doc.sentences[s].words = words;
            return Ok(TaskRecord {
                kind,
                sentences: vec![s],
                planted,
                params: TaskParams::Clauses { lengths },
            });
        }
        JoinClauses => {
            let m = rng.random_range(2..=3usize);
            let starts: Vec<usize> = free
                .iter()
                .copied()
                .filter(|&s| (s..s + m).all(|i| available.contains(&i) && i < doc.len()))
                .collect();
            if starts.is_empty() {
                return Err(too_small(kind, "no run of consecutive free sentences"));
            }
            let start = *choose(rng, &starts);
            let kw = choose(rng, &scheme.keywords.join).clone();
            sentences = (start..start + m).collect();
            units = sentences.iter().map(|&s| (s, vec![kw.clone()])).collect();
            params = TaskParams::Keywords {
                keywords: vec![kw; m],
            };
        }
        ParaphraseWords => {
            let s = one(rng, &free)?;
            let entry = choose(rng, &scheme.synonyms);
            let synonym = choose(rng, &entry.synonyms).clone();
            sentences = vec![s];
            units = vec![(s, vec![entry.source.clone()])];
            params = TaskParams::Paraphrase {
                keyword: entry.source.clone(),
                synonym,
            };
        }
        TopicSegregation => {
            let m = rng.random_range(2..=MAX_MARKED_SENTENCES);
            let chosen =
                pick(rng, &free, m).ok_or_else(|| too_small(kind, "not enough free sentences"))?;
            let kws: Vec<String> = chosen
                .iter()
                .map(|_| {
                    let class = choose(rng, &scheme.topics);
                    choose(rng, &class.members).clone()
                })
                .collect();
            units = chosen
                .iter()
                .zip(&kws)
                .map(|(&s, kw)| (s, vec![kw.clone()]))
                .collect();
            params = TaskParams::Keywords { keywords: kws };
            sentences = chosen;
        }
    }

    let mut planter = Planter {
        doc,
        planted: vec![],
    };
    for (s, unit) in units {
        debug_assert_eq!(unit.len(), 1);
        planter.insert_one(rng, s, &unit[0]);
    }
    Ok(TaskRecord {
        kind,
        sentences,
        planted: planter.planted,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_instance_rng;

    fn words(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn units_stay_contiguous() {
        for i in 0..200 {
            let mut rng = derive_instance_rng(0, "units", i);
            let mut w = words("a b c d e");
            let units = vec![words("T 1"), words("T 2"), words("T 3")];
            let starts = insert_units(&mut w, &mut rng, units, 0..=5);
            assert_eq!(w.len(), 11);
            for (k, &s) in starts.iter().enumerate() {
                assert_eq!(w[s], "T");
                assert_eq!(w[s + 1], (k + 1).to_string());
            }
            let rest: Vec<_> = w
                .iter()
                .filter(|t| t.len() == 1 && t.as_str() >= "a")
                .collect();
            assert_eq!(rest, ["a", "b", "c", "d", "e"]);
        }
    }

    #[test]
    fn restricted_gaps() {
        for i in 0..100 {
            let mut rng = derive_instance_rng(0, "gaps", i);
            let mut w = words("a b c");
            let starts = insert_units(&mut w, &mut rng, vec![words("X")], 1..=2);
            assert!((1..=2).contains(&starts[0]));
        }
    }
}
