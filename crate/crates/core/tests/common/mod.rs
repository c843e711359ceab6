#![allow(dead_code)]

use nonsense_core::{ElementaryKind, KeywordScheme};

/// Independent arithmetic answer for a standalone numeric task: every
/// integer-shaped token in the source is a planted value.
pub fn brute_force_numeric(
    kind: ElementaryKind,
    source: &[String],
    scheme: &KeywordScheme,
) -> Option<Vec<String>> {
    let values: Vec<i64> = source.iter().filter_map(|t| t.parse().ok()).collect();
    if values.is_empty() {
        return None;
    }
    let answer = match kind {
        ElementaryKind::CompareNumbers if values.len() == 2 => values.iter().max()?.to_string(),
        ElementaryKind::SumOfNumbers => values.iter().sum::<i64>().to_string(),
        ElementaryKind::ThresholdNumber if values.len() == 1 => {
            if values[0] >= scheme.numbers.threshold {
                scheme.answers.at_or_above.clone()
            } else {
                scheme.answers.below.clone()
            }
        }
        ElementaryKind::LargestNumber => values.iter().max()?.to_string(),
        _ => return None,
    };
    Some(vec![answer, ".".to_string()])
}

/// Brute-force LCS: longest subsequence of `a` (tried by bitmask, longest
/// first) that is also a subsequence of `b`.
pub fn brute_force_lcs(a: &[String], b: &[String]) -> usize {
    fn is_subsequence(sub: &[&String], seq: &[String]) -> bool {
        let mut it = seq.iter();
        sub.iter().all(|x| it.any(|y| y == *x))
    }
    let mut best = 0;
    for mask in 0u32..(1 << a.len()) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let sub: Vec<&String> = (0..a.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| &a[i])
            .collect();
        if is_subsequence(&sub, b) {
            best = len;
        }
    }
    best
}

pub fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}
