mod common;

use proptest::prelude::*;
use serde_json::json;

use nonsense_core::document::DocumentSampler;
use nonsense_core::io::{ingest_text, read_dataset, split_sentences, write_dataset, DatasetRecord};
use nonsense_core::rouge::{lcs_len, rouge_l, rouge_n};
use nonsense_core::step::{make_step, verify_step};
use nonsense_core::vocab::{index_of, word_at, MAX_VOCAB_SIZE};
use nonsense_core::{derive_instance_rng, DocPolicy, MaskConfig, StepKind, Vocabulary};

use common::brute_force_lcs;

fn small_tokens(max_len: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec!["aaa", "baa", "caa", "daa"]),
        0..=max_len,
    )
    .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

const EPS: f64 = 1e-12;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn vocabulary_round_trip(i in 0usize..MAX_VOCAB_SIZE) {
        prop_assert_eq!(index_of(&word_at(i).unwrap()), Some(i));
    }

    #[test]
    fn rouge_precision_recall_duality(a in small_tokens(12), b in small_tokens(12), n in 1usize..=2) {
        let ab = rouge_n(&a, &b, n);
        let ba = rouge_n(&b, &a, n);
        prop_assert!((ab.precision - ba.recall).abs() < EPS);
        prop_assert!((ab.recall - ba.precision).abs() < EPS);
        let l_ab = rouge_l(&a, &b);
        let l_ba = rouge_l(&b, &a);
        prop_assert!((l_ab.precision - l_ba.recall).abs() < EPS);
    }

    #[test]
    fn rouge_scores_are_bounded(a in small_tokens(12), b in small_tokens(12)) {
        for s in [rouge_n(&a, &b, 1), rouge_n(&a, &b, 2), rouge_l(&a, &b)] {
            for v in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if s.precision + s.recall > 0.0 {
                let f = 2.0 * s.precision * s.recall / (s.precision + s.recall);
                prop_assert!((s.f1 - f).abs() < EPS);
            } else {
                prop_assert_eq!(s.f1, 0.0);
            }
        }
    }

    #[test]
    fn appending_a_reference_ngram_never_lowers_recall(
        a in small_tokens(10),
        b in small_tokens(10),
        n in 1usize..=2,
        pick in any::<prop::sample::Index>(),
    ) {
        prop_assume!(b.len() >= n);
        let start = pick.index(b.len() - n + 1);
        let mut extended = a.clone();
        extended.extend_from_slice(&b[start..start + n]);
        prop_assert!(rouge_n(&extended, &b, n).recall + EPS >= rouge_n(&a, &b, n).recall);
    }

    #[test]
    fn rouge_invariant_under_relabeling(a in small_tokens(12), b in small_tokens(12), shift in 1usize..4) {
        let names = ["aaa", "baa", "caa", "daa"];
        let relabel = |v: &[String]| -> Vec<String> {
            v.iter()
                .map(|t| names[(names.iter().position(|n| n == t).unwrap() + shift) % 4].to_string())
                .collect()
        };
        let (ra, rb) = (relabel(&a), relabel(&b));
        prop_assert_eq!(rouge_n(&a, &b, 1), rouge_n(&ra, &rb, 1));
        prop_assert_eq!(rouge_n(&a, &b, 2), rouge_n(&ra, &rb, 2));
        prop_assert_eq!(rouge_l(&a, &b), rouge_l(&ra, &rb));
    }

    #[test]
    fn lcs_matches_brute_force(a in small_tokens(10), b in small_tokens(10)) {
        prop_assert_eq!(lcs_len(&a, &b), brute_force_lcs(&a, &b));
    }

    #[test]
    fn dataset_round_trip(
        rows in prop::collection::vec(("\\PC{1,40}", "\\PC{1,40}", any::<u64>()), 1..20)
    ) {
        let rows: Vec<_> = rows
            .into_iter()
            .filter(|(s, t, _)| !s.trim().is_empty() && !t.trim().is_empty())
            .collect();
        let records: Vec<DatasetRecord> = rows
            .iter()
            .enumerate()
            .map(|(i, (s, t, v))| DatasetRecord {
                id: format!("r{i}"),
                task: "ünïcode".into(),
                source: s.clone(),
                target: t.clone(),
                meta: json!({"seed": v, "nested": {"text": t}}),
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.jsonl");
        write_dataset(&records, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let back = read_dataset(&path).unwrap();
        prop_assert_eq!(&back, &records);
        write_dataset(&back, &path).unwrap();
        prop_assert_eq!(std::fs::read(&path).unwrap(), bytes);
    }

    #[test]
    fn ingestion_never_fabricates_tokens(
        words in prop::collection::vec("[a-zA-Z,;'\"]{1,8}[.!?]?", 0..200),
        seed in any::<u64>(),
    ) {
        let text = words.join(" ");
        let input: std::collections::HashSet<&str> = text.split_whitespace().collect();
        let terminators = text.split_whitespace().filter(|t| t.ends_with(['.', '!', '?'])).count();
        let sentences = split_sentences(&text);
        prop_assert!(sentences.len() <= terminators);
        for s in &sentences {
            for w in &s.words {
                let kept = input.contains(w.as_str())
                    || input.iter().any(|t| t.len() == w.len() + 1 && t.starts_with(w.as_str()));
                prop_assert!(kept, "{}", w);
            }
        }
        for doc in ingest_text(&text, DocPolicy::BySentences { min: 2, max: 4 }, seed).unwrap() {
            prop_assert!((2..=4).contains(&doc.len()));
        }
    }

    #[test]
    fn step_instances_verify(seed in any::<u64>(), k in 0usize..5, per_token in any::<bool>()) {
        let kind = StepKind::ALL[k];
        let sampler = DocumentSampler::new(Vocabulary::default(), DocPolicy::STEP);
        let mut rng = derive_instance_rng(seed, "prop", 0);
        let doc = sampler.sample(&mut rng).unwrap();
        let cfg = MaskConfig { per_token, ..MaskConfig::default() };
        let inst = make_step(kind, &mut rng, &doc, &cfg).unwrap();
        prop_assert!(verify_step(&inst.source, &inst.target, &inst.record).is_ok());
    }
}

#[test]
fn punctuation_count_equals_sentence_count() {
    let text = "Alpha beta gamma. Delta epsilon! Zeta eta theta? Iota kappa.";
    assert_eq!(split_sentences(text).len(), 4);
}

#[test]
fn stats_histogram_for_ensemble_covers_sixteen_kinds() {
    use nonsense_core::pipeline::{Generator, RunConfig, TaskSelection};
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.jsonl");
    let g = Generator::new(RunConfig::new(
        1,
        600,
        TaskSelection::Ensemble {
            config: Default::default(),
        },
    ))
    .unwrap();
    g.write(&path).unwrap();
    let stats = nonsense_core::io::dataset_stats(&path).unwrap();
    assert_eq!(stats.kinds.len(), 16);
    assert_eq!(stats.kinds.values().sum::<usize>(), 1800);
    assert_eq!(stats.tasks["ensemble"], 600);
}

#[test]
fn step_by_tokens_median_in_range() {
    use nonsense_core::pipeline::{Generator, RunConfig, TaskSelection};
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    let g = Generator::new(RunConfig::new(
        1,
        300,
        TaskSelection::Step { kind: StepKind::Sr },
    ))
    .unwrap();
    g.write(&path).unwrap();
    let stats = nonsense_core::io::dataset_stats(&path).unwrap();
    let p50 = stats.source_tokens.p50.unwrap();
    assert!((512..=527).contains(&p50), "{p50}");
}
