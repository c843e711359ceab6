use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 21 elementary summarization subtasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementaryKind {
    CheckKeyword,
    ClassifyKeyword,
    MajorityKeyword,
    CopyFirstSentence,
    CopyBulleted,
    CopyQuoted,
    CopyLastSentence,
    CopyKwdOneSentence,
    CopyKwdMultipleSentInOrder,
    CopyKwdMultipleSentSorted,
    CopyKwdMultipleSentShuffled,
    ReplaceClassKeyword,
    CompareNumbers,
    SumOfNumbers,
    ThresholdNumber,
    LargestNumber,
    TruncateSentence,
    BreakClauses,
    JoinClauses,
    ParaphraseWords,
    TopicSegregation,
}

use ElementaryKind::*;

impl ElementaryKind {
    pub const ALL: [ElementaryKind; 21] = [
        CheckKeyword,
        ClassifyKeyword,
        MajorityKeyword,
        CopyFirstSentence,
        CopyBulleted,
        CopyQuoted,
        CopyLastSentence,
        CopyKwdOneSentence,
        CopyKwdMultipleSentInOrder,
        CopyKwdMultipleSentSorted,
        CopyKwdMultipleSentShuffled,
        ReplaceClassKeyword,
        CompareNumbers,
        SumOfNumbers,
        ThresholdNumber,
        LargestNumber,
        TruncateSentence,
        BreakClauses,
        JoinClauses,
        ParaphraseWords,
        TopicSegregation,
    ];

    /// Kinds left out of ensemble pretraining: the first three do not always
    /// plant a keyword, the last two were not learnable in isolation.
    pub const ENSEMBLE_EXCLUDED: [ElementaryKind; 5] = [
        CopyFirstSentence,
        CopyLastSentence,
        CheckKeyword,
        SumOfNumbers,
        CompareNumbers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKeyword => "CheckKeyword",
            ClassifyKeyword => "ClassifyKeyword",
            MajorityKeyword => "MajorityKeyword",
            CopyFirstSentence => "CopyFirstSentence",
            CopyBulleted => "CopyBulleted",
            CopyQuoted => "CopyQuoted",
            CopyLastSentence => "CopyLastSentence",
            CopyKwdOneSentence => "CopyKwdOneSentence",
            CopyKwdMultipleSentInOrder => "CopyKwdMultipleSentInOrder",
            CopyKwdMultipleSentSorted => "CopyKwdMultipleSentSorted",
            CopyKwdMultipleSentShuffled => "CopyKwdMultipleSentShuffled",
            ReplaceClassKeyword => "ReplaceClassKeyword",
            CompareNumbers => "CompareNumbers",
            SumOfNumbers => "SumOfNumbers",
            ThresholdNumber => "ThresholdNumber",
            LargestNumber => "LargestNumber",
            TruncateSentence => "TruncateSentence",
            BreakClauses => "BreakClauses",
            JoinClauses => "JoinClauses",
            ParaphraseWords => "ParaphraseWords",
            TopicSegregation => "TopicSegregation",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            CompareNumbers | SumOfNumbers | ThresholdNumber | LargestNumber
        )
    }

    pub fn ensemble_eligible(self) -> bool {
        !Self::ENSEMBLE_EXCLUDED.contains(&self)
    }
}

impl fmt::Display for ElementaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ElementaryKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown elementary task `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_one_kinds() {
        let mut names: Vec<_> = ElementaryKind::ALL.iter().map(|k| k.name()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 21);
        assert_eq!(
            ElementaryKind::ALL
                .iter()
                .filter(|k| k.ensemble_eligible())
                .count(),
            16
        );
    }

    #[test]
    fn parse_round_trip() {
        for k in ElementaryKind::ALL {
            assert_eq!(k.name().parse::<ElementaryKind>().unwrap(), k);
        }
        assert_eq!(
            "copyfirstsentence".parse::<ElementaryKind>().unwrap(),
            CopyFirstSentence
        );
        assert!("ensemble".parse::<ElementaryKind>().is_err());
    }
}
