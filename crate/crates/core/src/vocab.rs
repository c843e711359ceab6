//! The artificial vocabulary: three-letter lowercase words. The first letter
//! varies fastest, then the last, then the middle one:
//! `aaa`, `baa`, ..., `zaa`, `aab`, `bab`, ..., `zzz` is followed by `aba`.

use std::sync::Arc;

use crate::error::{Error, Result};

pub const ALPHABET: &[u8; 26] = b"abcdefghijklmnopqrstuvwxyz";

/// Number of distinct three-letter words over the alphabet (26³).
pub const MAX_VOCAB_SIZE: usize = 26 * 26 * 26;

pub const DEFAULT_VOCAB_SIZE: usize = 5000;

/// Returns the word at `index`: digits in base 26, least significant first,
/// placed at letter positions 0, 2, 1.
pub fn word_at(index: usize) -> Result<String> {
    if index >= MAX_VOCAB_SIZE {
        return Err(Error::OutOfBounds {
            index,
            limit: MAX_VOCAB_SIZE,
        });
    }
    let chars = [
        ALPHABET[index % 26],
        ALPHABET[index / 676],
        ALPHABET[(index / 26) % 26],
    ];
    Ok(String::from_utf8(chars.to_vec()).expect("ascii"))
}

/// Inverse of [`word_at`]. Returns `None` for anything that is not three
/// lowercase ASCII letters.
pub fn index_of(word: &str) -> Option<usize> {
    let bytes = word.as_bytes();
    if bytes.len() != 3 || !bytes.iter().all(u8::is_ascii_lowercase) {
        return None;
    }
    let digit = |b: u8| (b - b'a') as usize;
    Some(digit(bytes[0]) + 26 * digit(bytes[2]) + 676 * digit(bytes[1]))
}

/// True when `token` lies in the space of all possible vocabulary words,
/// whatever the configured vocabulary size.
pub fn is_vocabulary_shaped(token: &str) -> bool {
    index_of(token).is_some()
}

/// An ordered prefix of the three-letter word enumeration.
///
/// Cloning is cheap; the word list is shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Arc<[String]>,
}

impl Vocabulary {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_VOCAB_SIZE {
            return Err(Error::InvalidInput(format!(
                "vocabulary size {size} outside 1..={MAX_VOCAB_SIZE}"
            )));
        }
        let words = (0..size).map(word_at).collect::<Result<Vec<_>>>()?.into();
        Ok(Vocabulary { words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, index: usize) -> Option<&str> {
        self.words.get(index).map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        index_of(word).is_some_and(|i| i < self.len())
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        index_of(word).filter(|&i| i < self.len())
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::new(DEFAULT_VOCAB_SIZE).expect("default size is in range")
    }
}

/// Builds the vocabulary of the first `size` words.
pub fn build_vocabulary(size: usize) -> Result<Vocabulary> {
    Vocabulary::new(size)
}
